//! Concrete stratified groups: abelian space, Heisenberg groups and general
//! step-2 groups parameterised by skew-symmetric matrices.
//!
//! A group lives on R^n split into strata R^{N_1} x ... x R^{N_r}. The
//! anisotropic dilations act with weight k on stratum k and the generating
//! left-invariant fields have the form
//! `X_k = d/dx_k + sum_m a_{k,m}(x') d/dz_m` with `a_{k,m}` linear in the
//! first-stratum variables at step 2. We store those linear forms as one
//! matrix `M_k` per generator, so that the coefficient vector of `X_k` at a
//! point `x` is `e_k + M_k x`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::MAX_DIM;

/// A point of the group is its vector of global coordinates, partitioned by
/// strata as (x', x^(2), ..., x^(r)).
pub type Point = Vec<f64>;

/// Which built-in group to construct.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupKind {
    /// R^n with addition; step 1, Q = n.
    Abelian { n: usize },
    /// Heisenberg group H^m: first stratum R^{2m}, one central coordinate.
    Heisenberg { m: usize },
    /// Step-2 group with first stratum R^{n1} and one second-stratum
    /// coordinate per skew-symmetric matrix B.
    Step2 { n1: usize, bs: Vec<Vec<Vec<f64>>> },
}

#[derive(Clone, Debug, PartialEq)]
pub enum GroupError {
    ZeroStratum,
    DimensionTooLarge(usize),
    NotSkewSymmetric(String),
    DegenerateBrackets,
    PointDimension { expected: usize, got: usize },
    BadDilationFactor(f64),
    GeneratorIndex { k: usize, n_first: usize },
}

impl core::fmt::Display for GroupError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GroupError::ZeroStratum => write!(f, "strata dimensions must be positive"),
            GroupError::DimensionTooLarge(n) => {
                write!(f, "total dimension {n} exceeds supported maximum {MAX_DIM}")
            }
            GroupError::NotSkewSymmetric(s) => write!(f, "matrix is not skew-symmetric: {s}"),
            GroupError::DegenerateBrackets => {
                write!(f, "second-stratum matrices are linearly dependent; brackets do not span")
            }
            GroupError::PointDimension { expected, got } => {
                write!(f, "point has dimension {got}, group expects {expected}")
            }
            GroupError::BadDilationFactor(l) => write!(f, "dilation factor must be > 0, got {l}"),
            GroupError::GeneratorIndex { k, n_first } => {
                write!(f, "generator index {k} out of range 1..={n_first}")
            }
        }
    }
}

impl core::error::Error for GroupError {}

/// A stratified group together with the data needed to evaluate its
/// left-invariant generators and group law.
#[derive(Clone, Debug)]
pub struct StratifiedGroup {
    kind: GroupKind,
    strata_dims: Vec<usize>,
    total_dim: usize,
    hom_dim: usize,
    /// `forms[m]` is the skew matrix B^(m) giving the second-stratum
    /// component `z_m` of the product its bilinear term (1/2)<B x', y'>.
    forms: Vec<Vec<Vec<f64>>>,
    /// Constant Jacobians d(coefficients of X_k)/dx, one per generator;
    /// precomputed because they sit on every second-order evaluation path.
    jacobians: Vec<Vec<Vec<f64>>>,
}

fn check_skew(b: &[Vec<f64>], n1: usize) -> Result<(), GroupError> {
    if b.len() != n1 || b.iter().any(|row| row.len() != n1) {
        return Err(GroupError::NotSkewSymmetric(format!(
            "expected {n1}x{n1} matrix, got {}x{}",
            b.len(),
            b.first().map_or(0, Vec::len)
        )));
    }
    for i in 0..n1 {
        for j in 0..n1 {
            if (b[i][j] + b[j][i]).abs() > 1e-14 {
                return Err(GroupError::NotSkewSymmetric(format!(
                    "entry ({i},{j}) = {}, ({j},{i}) = {}",
                    b[i][j], b[j][i]
                )));
            }
        }
    }
    Ok(())
}

/// The matrices must be linearly independent for the iterated brackets of the
/// generators to span the second stratum.
fn check_independent(bs: &[Vec<Vec<f64>>], n1: usize) -> Result<(), GroupError> {
    // Gaussian elimination on the flattened strictly-upper entries.
    let cols = n1 * (n1 - 1) / 2;
    let mut rows: Vec<Vec<f64>> = bs
        .iter()
        .map(|b| {
            let mut r = Vec::with_capacity(cols);
            for i in 0..n1 {
                for j in (i + 1)..n1 {
                    r.push(b[i][j]);
                }
            }
            r
        })
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows.len() {
            break;
        }
        let pivot = (rank..rows.len()).max_by(|&a, &b| {
            rows[a][c].abs().partial_cmp(&rows[b][c].abs()).unwrap()
        });
        let Some(p) = pivot else { break };
        if rows[p][c].abs() < 1e-12 {
            continue;
        }
        rows.swap(rank, p);
        for r in (rank + 1)..rows.len() {
            let f = rows[r][c] / rows[rank][c];
            for cc in c..cols {
                rows[r][cc] -= f * rows[rank][cc];
            }
        }
        rank += 1;
    }
    if rank < bs.len() {
        return Err(GroupError::DegenerateBrackets);
    }
    Ok(())
}

impl StratifiedGroup {
    /// Construct one of the built-in groups, validating its defining data.
    pub fn make(kind: GroupKind) -> Result<Self, GroupError> {
        let (strata_dims, forms) = match &kind {
            GroupKind::Abelian { n } => {
                if *n == 0 {
                    return Err(GroupError::ZeroStratum);
                }
                (vec![*n], Vec::new())
            }
            GroupKind::Heisenberg { m } => {
                if *m == 0 {
                    return Err(GroupError::ZeroStratum);
                }
                let n1 = 2 * m;
                // z-term of the product: (1/2) Σ_i (x_{2i-1} y_{2i} - x_{2i} y_{2i-1})
                // = (1/2) <B x', y'> with the block-symplectic B below.
                let mut b = vec![vec![0.0; n1]; n1];
                for i in 0..*m {
                    b[2 * i][2 * i + 1] = -1.0;
                    b[2 * i + 1][2 * i] = 1.0;
                }
                (vec![n1, 1], vec![b])
            }
            GroupKind::Step2 { n1, bs } => {
                if *n1 == 0 || bs.is_empty() {
                    return Err(GroupError::ZeroStratum);
                }
                for b in bs {
                    check_skew(b, *n1)?;
                }
                check_independent(bs, *n1)?;
                (vec![*n1, bs.len()], bs.clone())
            }
        };
        let total_dim: usize = strata_dims.iter().sum();
        if total_dim > MAX_DIM {
            return Err(GroupError::DimensionTooLarge(total_dim));
        }
        let hom_dim = strata_dims
            .iter()
            .enumerate()
            .map(|(k, nk)| (k + 1) * nk)
            .sum();
        let n1 = strata_dims[0];
        let mut jacobians = Vec::with_capacity(n1);
        for k in 0..n1 {
            let mut jac = vec![vec![0.0; total_dim]; total_dim];
            for (m, b) in forms.iter().enumerate() {
                for j in 0..n1 {
                    jac[n1 + m][j] = 0.5 * b[k][j];
                }
            }
            jacobians.push(jac);
        }
        Ok(StratifiedGroup {
            kind,
            strata_dims,
            total_dim,
            hom_dim,
            forms,
            jacobians,
        })
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    /// Strata dimensions [N_1, ..., N_r].
    pub fn strata_dims(&self) -> &[usize] {
        &self.strata_dims
    }

    /// Topological dimension n.
    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// Homogeneous dimension Q = sum k N_k.
    pub fn hom_dim(&self) -> usize {
        self.hom_dim
    }

    /// Dimension N of the first stratum (number of generators).
    pub fn n_first(&self) -> usize {
        self.strata_dims[0]
    }

    pub fn step(&self) -> usize {
        self.strata_dims.len()
    }

    /// Whether the horizontal structure is invariant under a group of
    /// first-stratum rotations acting transitively on spheres. True for
    /// abelian (O(N)) and Heisenberg (U(m)) groups; generic step-2 groups
    /// do not qualify.
    pub fn rotation_transitive(&self) -> bool {
        matches!(self.kind, GroupKind::Abelian { .. } | GroupKind::Heisenberg { .. })
    }

    pub fn check_point(&self, x: &[f64]) -> Result<(), GroupError> {
        if x.len() != self.total_dim {
            return Err(GroupError::PointDimension {
                expected: self.total_dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Euclidean norm |x'| of the first-stratum part.
    pub fn first_stratum_norm(&self, x: &[f64]) -> f64 {
        let n1 = self.n_first();
        let mut s = 0.0;
        for xi in &x[..n1] {
            s += xi * xi;
        }
        math::sqrt(s)
    }

    /// Anisotropic dilation: weight k on stratum k.
    pub fn dilate(&self, lambda: f64, x: &[f64]) -> Result<Point, GroupError> {
        if !(lambda > 0.0) {
            return Err(GroupError::BadDilationFactor(lambda));
        }
        self.check_point(x)?;
        let mut out = x.to_vec();
        let mut off = 0;
        for (k, nk) in self.strata_dims.iter().enumerate() {
            let w = math::powi(lambda, (k + 1) as i32);
            for v in &mut out[off..off + nk] {
                *v *= w;
            }
            off += nk;
        }
        Ok(out)
    }

    /// Group product x ∘ y.
    pub fn group_product(&self, x: &[f64], y: &[f64]) -> Result<Point, GroupError> {
        self.check_point(x)?;
        self.check_point(y)?;
        let n1 = self.n_first();
        let mut out: Point = x.iter().zip(y).map(|(a, b)| a + b).collect();
        for (m, b) in self.forms.iter().enumerate() {
            let mut corr = 0.0;
            for i in 0..n1 {
                let mut bi = 0.0;
                for j in 0..n1 {
                    bi += b[i][j] * x[j];
                }
                corr += bi * y[i];
            }
            out[n1 + m] += 0.5 * corr;
        }
        Ok(out)
    }

    /// Group inverse; for step <= 2 this is coordinate negation.
    pub fn inverse(&self, x: &[f64]) -> Result<Point, GroupError> {
        self.check_point(x)?;
        Ok(x.iter().map(|v| -v).collect())
    }

    /// Coefficient vector of the generator X_k (1-based `k`) at `x`:
    /// the k-th first-stratum unit vector plus the linear second-stratum
    /// corrections read off from the group law.
    pub fn field_coefficients(&self, k: usize, x: &[f64]) -> Result<Vec<f64>, GroupError> {
        let n1 = self.n_first();
        if k == 0 || k > n1 {
            return Err(GroupError::GeneratorIndex { k, n_first: n1 });
        }
        self.check_point(x)?;
        let mut c = vec![0.0; self.total_dim];
        self.coefficients_into(k - 1, x, &mut c);
        Ok(c)
    }

    /// Allocation-free coefficient evaluation with a 0-based generator
    /// index; `out` must have length `total_dim`.
    #[inline]
    pub fn coefficients_into(&self, k0: usize, x: &[f64], out: &mut [f64]) {
        let n1 = self.n_first();
        for v in out.iter_mut() {
            *v = 0.0;
        }
        out[k0] = 1.0;
        for (m, b) in self.forms.iter().enumerate() {
            // z_m-component of x ∘ (t e_k) is z_m + (t/2) (B^(m) x')_k.
            let mut a = 0.0;
            for j in 0..n1 {
                a += b[k0][j] * x[j];
            }
            out[n1 + m] = 0.5 * a;
        }
    }

    /// Jacobian of the coefficient vector of X_k with respect to the global
    /// coordinates. Constant in x at step 2: row `n1+m`, column `j` holds
    /// (1/2) B^(m)[k-1][j].
    pub fn coefficient_jacobian(&self, k: usize) -> Result<&[Vec<f64>], GroupError> {
        let n1 = self.n_first();
        if k == 0 || k > n1 {
            return Err(GroupError::GeneratorIndex { k, n_first: n1 });
        }
        Ok(&self.jacobians[k - 1])
    }
}

/// Convenience constructors mirroring the CLI group specs.
impl StratifiedGroup {
    pub fn abelian(n: usize) -> Self {
        Self::make(GroupKind::Abelian { n }).expect("abelian group")
    }

    pub fn heisenberg(m: usize) -> Self {
        Self::make(GroupKind::Heisenberg { m }).expect("heisenberg group")
    }
}
