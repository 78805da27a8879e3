//! Pointwise horizontal operators, evaluated by pushing second-order jets
//! through the generator coefficients: X_k f, the horizontal gradient and
//! divergence, the sub-Laplacian, the p-sub-Laplacian and its weighted
//! variant, plus residual checks for the two closed-form identities
//! |∇_H |x'|^γ| = |γ| |x'|^{γ-1} and div_H(x'/|x'|^γ) = (N-γ)/|x'|^γ.

use alloc::vec::Vec;

use crate::group::{GroupError, StratifiedGroup};
use crate::math;
use crate::scalar::{HorizontalVectorField, Profile, ScalarField};

/// Gradient-norm threshold below which the p-sub-Laplacian (p != 2) is
/// treated as singular rather than silently regularised.
pub const DELTA_REG: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum CalcError {
    Group(GroupError),
    /// |∇_H f| fell below `DELTA_REG` where a p < 2 operator needs it.
    SingularGradient { norm: f64 },
    /// A jet evaluation produced a non-finite number.
    NonFinite,
    /// The first-stratum origin is outside the domain of the identity.
    FirstStratumOrigin,
    BadExponent(f64),
}

impl From<GroupError> for CalcError {
    fn from(e: GroupError) -> Self {
        CalcError::Group(e)
    }
}

impl core::fmt::Display for CalcError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CalcError::Group(e) => write!(f, "{e}"),
            CalcError::SingularGradient { norm } => {
                write!(f, "horizontal gradient norm {norm:.3e} below regularity threshold")
            }
            CalcError::NonFinite => write!(f, "non-finite jet evaluation"),
            CalcError::FirstStratumOrigin => write!(f, "evaluation point has x' = 0"),
            CalcError::BadExponent(p) => write!(f, "exponent p = {p} out of range"),
        }
    }
}

impl core::error::Error for CalcError {}

pub type Result<T> = core::result::Result<T, CalcError>;

/// Horizontal gradient and iterated-derivative matrix at a point, on the
/// stack. `hess[a][b]` holds X_a X_b f (not symmetric off the abelian case).
#[derive(Clone, Copy, Debug)]
pub struct HorizontalJets {
    pub n1: usize,
    pub grad: [f64; crate::MAX_DIM],
    pub hess: [[f64; crate::MAX_DIM]; crate::MAX_DIM],
}

impl HorizontalJets {
    pub fn grad_norm(&self) -> f64 {
        let mut s = 0.0;
        for v in &self.grad[..self.n1] {
            s += v * v;
        }
        math::sqrt(s)
    }

    pub fn laplacian(&self) -> f64 {
        let mut s = 0.0;
        for k in 0..self.n1 {
            s += self.hess[k][k];
        }
        s
    }
}

/// X_k f at x (1-based k).
pub fn apply_field(g: &StratifiedGroup, k: usize, f: &ScalarField, x: &[f64]) -> Result<f64> {
    let c = g.field_coefficients(k, x)?;
    let jet = f.jet1(x);
    if !jet.is_finite() {
        return Err(CalcError::NonFinite);
    }
    Ok(dot(&c, jet.grad()))
}

/// ∇_H f = (X_1 f, ..., X_N f) at x, allocation-free.
pub fn horizontal_gradient_arr(
    g: &StratifiedGroup,
    f: &ScalarField,
    x: &[f64],
) -> Result<[f64; crate::MAX_DIM]> {
    g.check_point(x)?;
    let jet = f.jet1(x);
    if !jet.is_finite() {
        return Err(CalcError::NonFinite);
    }
    let n = g.total_dim();
    let mut c = [0.0; crate::MAX_DIM];
    let mut out = [0.0; crate::MAX_DIM];
    for k in 0..g.n_first() {
        g.coefficients_into(k, x, &mut c[..n]);
        out[k] = dot(&c[..n], jet.grad());
    }
    Ok(out)
}

/// ∇_H f = (X_1 f, ..., X_N f) at x.
pub fn horizontal_gradient(g: &StratifiedGroup, f: &ScalarField, x: &[f64]) -> Result<Vec<f64>> {
    Ok(horizontal_gradient_arr(g, f, x)?[..g.n_first()].to_vec())
}

pub fn horizontal_gradient_norm(g: &StratifiedGroup, f: &ScalarField, x: &[f64]) -> Result<f64> {
    let grad = horizontal_gradient_arr(g, f, x)?;
    Ok(norm(&grad[..g.n_first()]))
}

/// div_H v = sum_k X_k v_k at x.
pub fn horizontal_divergence(
    g: &StratifiedGroup,
    v: &HorizontalVectorField,
    x: &[f64],
) -> Result<f64> {
    debug_assert_eq!(v.len(), g.n_first());
    let mut acc = 0.0;
    for k in 1..=g.n_first() {
        acc += apply_field(g, k, v.component(k - 1), x)?;
    }
    Ok(acc)
}

/// The matrix W[a][b] = X_a X_b f of iterated horizontal derivatives,
/// together with the horizontal gradient. Both are what the second-order
/// operators consume.
pub fn horizontal_hessian(
    g: &StratifiedGroup,
    f: &ScalarField,
    x: &[f64],
) -> Result<HorizontalJets> {
    let n1 = g.n_first();
    let n = g.total_dim();
    let jet = f.jet2(x);
    if !jet.is_finite() {
        return Err(CalcError::NonFinite);
    }
    let mut coefs = [[0.0; crate::MAX_DIM]; crate::MAX_DIM];
    for (k, c) in coefs.iter_mut().enumerate().take(n1) {
        g.coefficients_into(k, x, &mut c[..n]);
    }
    let mut out = HorizontalJets {
        n1,
        grad: [0.0; crate::MAX_DIM],
        hess: [[0.0; crate::MAX_DIM]; crate::MAX_DIM],
    };
    for k in 0..n1 {
        out.grad[k] = dot(&coefs[k][..n], jet.grad());
    }
    for b in 0..n1 {
        // M_b c_a term: derivative of the coefficients of X_b along X_a.
        let jac_b = g.coefficient_jacobian(b + 1)?;
        for a in 0..n1 {
            let mut habc = 0.0;
            for i in 0..n {
                let mut hrow = 0.0;
                for j in 0..n {
                    hrow += jet.hess(i, j) * coefs[b][j];
                }
                habc += coefs[a][i] * hrow;
            }
            let mut lower = 0.0;
            for (i, jac_row) in jac_b.iter().enumerate().take(n) {
                let mba = dot(&jac_row[..n], &coefs[a][..n]);
                lower += mba * jet.grad()[i];
            }
            out.hess[a][b] = habc + lower;
        }
    }
    Ok(out)
}

/// Sub-Laplacian L f = sum_k X_k^2 f at x.
pub fn sub_laplacian(g: &StratifiedGroup, f: &ScalarField, x: &[f64]) -> Result<f64> {
    Ok(horizontal_hessian(g, f, x)?.laplacian())
}

/// p-sub-Laplacian L_p f = div_H(|∇_H f|^{p-2} ∇_H f) at x.
///
/// At points where |∇_H f| <= DELTA_REG the operator value is 0 for p > 2
/// (the limit), L f for p = 2, and an error for p < 2.
pub fn p_sub_laplacian(g: &StratifiedGroup, f: &ScalarField, p: f64, x: &[f64]) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(CalcError::BadExponent(p));
    }
    let w = horizontal_hessian(g, f, x)?;
    let n1 = w.n1;
    let lap = w.laplacian();
    if p == 2.0 {
        return Ok(lap);
    }
    let gn = w.grad_norm();
    if gn <= DELTA_REG {
        if p > 2.0 {
            return Ok(0.0);
        }
        return Err(CalcError::SingularGradient { norm: gn });
    }
    // q = <grad, W grad> / |grad|^2 stays bounded by the Hessian norm.
    let mut q = 0.0;
    for a in 0..n1 {
        for b in 0..n1 {
            q += w.grad[a] * w.grad[b] * w.hess[a][b];
        }
    }
    q /= gn * gn;
    let val = math::powf(gn, p - 2.0) * (lap + (p - 2.0) * q);
    if !val.is_finite() {
        return Err(CalcError::NonFinite);
    }
    Ok(val)
}

/// Weighted p-sub-Laplacian L_{p,ρ} f = div_H(ρ |∇_H f|^{p-2} ∇_H f)
///   = ρ L_p f + |∇_H f|^{p-2} <∇_H ρ, ∇_H f>.
pub fn weighted_p_sub_laplacian(
    g: &StratifiedGroup,
    rho: &ScalarField,
    f: &ScalarField,
    p: f64,
    x: &[f64],
) -> Result<f64> {
    let rho_val = rho.eval(x);
    let lp = p_sub_laplacian(g, f, p, x)?;
    let grad_f = horizontal_gradient_arr(g, f, x)?;
    let grad_rho = horizontal_gradient_arr(g, rho, x)?;
    let n1 = g.n_first();
    let gn = norm(&grad_f[..n1]);
    let weight = if p == 2.0 {
        1.0
    } else if gn <= DELTA_REG {
        // cross term vanishes with the gradient for p > 2
        0.0
    } else {
        math::powf(gn, p - 2.0)
    };
    Ok(rho_val * lp + weight * dot(&grad_rho[..n1], &grad_f[..n1]))
}

/// ∇_H |∇_H f| at x, the building block of the iterated gradients
/// ∇_H^m f = ∇_H |∇_H^{m-1} f|. Returns the zero vector at flat points
/// (|∇_H f| <= DELTA_REG), which is the correct limit on plateau interiors.
pub fn grad_of_grad_norm(
    g: &StratifiedGroup,
    f: &ScalarField,
    x: &[f64],
) -> Result<[f64; crate::MAX_DIM]> {
    let w = horizontal_hessian(g, f, x)?;
    let n1 = w.n1;
    let gn = w.grad_norm();
    let mut out = [0.0; crate::MAX_DIM];
    if gn <= DELTA_REG {
        return Ok(out);
    }
    for (k, slot) in out.iter_mut().enumerate().take(n1) {
        let mut s = 0.0;
        for j in 0..n1 {
            s += w.grad[j] * w.hess[k][j];
        }
        *slot = s / gn;
    }
    Ok(out)
}

/// |∇_H^order f| with the convention ∇_H^0 f = f, ∇_H^1 f = ∇_H f,
/// ∇_H^2 f = ∇_H |∇_H f|. Orders above 2 are not needed by the suite.
pub fn iterated_gradient_norm(
    g: &StratifiedGroup,
    f: &ScalarField,
    order: usize,
    x: &[f64],
) -> Result<f64> {
    match order {
        0 => Ok(math::abs(f.eval(x))),
        1 => horizontal_gradient_norm(g, f, x),
        2 => Ok(norm(&grad_of_grad_norm(g, f, x)?[..g.n_first()])),
        _ => Err(CalcError::BadExponent(order as f64)),
    }
}

/// Residuals of the two first-stratum identities at x:
/// r_grad = | |∇_H |x'|^γ| - |γ| |x'|^{γ-1} | and
/// r_div  = | div_H(x'/|x'|^γ) - (N-γ)/|x'|^γ |.
pub fn identity_residuals(g: &StratifiedGroup, gamma: f64, x: &[f64]) -> Result<(f64, f64)> {
    g.check_point(x)?;
    let r = g.first_stratum_norm(x);
    if r <= 0.0 {
        return Err(CalcError::FirstStratumOrigin);
    }
    let n1 = g.n_first();
    let power = ScalarField::radial(g.total_dim(), n1, 0.0, Profile::Power { a: gamma });
    let grad_norm = horizontal_gradient_norm(g, &power, x)?;
    let r_grad = math::abs(grad_norm - math::abs(gamma) * math::powf(r, gamma - 1.0));

    let v = HorizontalVectorField::radial_power(g.total_dim(), n1, gamma);
    let div = horizontal_divergence(g, &v, x)?;
    let r_div = math::abs(div - (n1 as f64 - gamma) / math::powf(r, gamma));
    Ok((r_grad, r_div))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    math::sqrt(a.iter().map(|x| x * x).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::SeededRng;
    use crate::scalar::{Factor, ProductTerm, Smoothness, Support};

    fn coordinate(dim: usize, axis: usize) -> ScalarField {
        ScalarField::new(
            dim,
            dim,
            vec![ProductTerm {
                coef: 1.0,
                factors: vec![Factor::Axis {
                    axis,
                    profile: Profile::Linear,
                }],
            }],
            Support::unbounded(),
            Smoothness::SmoothEverywhere,
        )
    }

    #[test]
    fn apply_field_examples() {
        let h1 = StratifiedGroup::heisenberg(1);
        let f = coordinate(3, 2); // f(x) = x_3
        // X_1 x_3 = -x_2/2 at (0,1,0)
        let v = apply_field(&h1, 1, &f, &[0.0, 1.0, 0.0]).unwrap();
        assert!((v + 0.5).abs() < 1e-14);
        // X_2 x_3 = x_1/2 at (1,0,0)
        let v = apply_field(&h1, 2, &f, &[1.0, 0.0, 0.0]).unwrap();
        assert!((v - 0.5).abs() < 1e-14);
        // finite-difference oracle along the flow of X_1
        let t = 1e-5;
        let x = [0.0, 1.0, 0.0];
        let mut flow = [0.0; 3];
        let c = h1.field_coefficients(1, &x).unwrap();
        for i in 0..3 {
            flow[i] = x[i] + t * c[i];
        }
        let fd = (f.eval(&flow) - f.eval(&x)) / t;
        assert!((fd + 0.5).abs() < 1e-4);
        // abelian: X_k x_k = 1 anywhere
        let a3 = StratifiedGroup::abelian(3);
        let f2 = coordinate(3, 1);
        let v = apply_field(&a3, 2, &f2, &[0.4, -0.2, 0.9]).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gradient_of_first_stratum_square() {
        // f = |x'|^2 has ∇_H f = 2x' on any built-in group
        for g in [
            StratifiedGroup::abelian(4),
            StratifiedGroup::heisenberg(2),
        ] {
            let f = ScalarField::radial(g.total_dim(), g.n_first(), 0.0, Profile::Power { a: 2.0 });
            let mut x = vec![0.0; g.total_dim()];
            for (i, v) in x.iter_mut().enumerate() {
                *v = 0.3 * (i as f64 + 1.0);
            }
            let grad = horizontal_gradient(&g, &f, &x).unwrap();
            for k in 0..g.n_first() {
                assert!((grad[k] - 2.0 * x[k]).abs() < 1e-12);
            }
            // constant field has zero gradient
            let c = ScalarField::constant(g.total_dim(), 3.5);
            assert!(horizontal_gradient_norm(&g, &c, &x).unwrap() < 1e-15);
        }
    }

    #[test]
    fn divergence_examples() {
        let h1 = StratifiedGroup::heisenberg(1); // N = 2
        let x = [0.6, -0.8, 0.3];
        // div of the identity field x' is N
        let v0 = HorizontalVectorField::radial_power(3, 2, 0.0);
        assert!((horizontal_divergence(&h1, &v0, &x).unwrap() - 2.0).abs() < 1e-12);
        // div_H(x'/|x'|^γ) = (N-γ)/|x'|^γ
        let h2 = StratifiedGroup::heisenberg(2);
        let y = [0.5, 0.2, -0.7, 0.4, 0.9];
        for gamma in [-1.5, 0.5, 2.0, 4.0] {
            let v = HorizontalVectorField::radial_power(5, 4, gamma);
            let r = h2.first_stratum_norm(&y);
            let expect = (4.0 - gamma) / math::powf(r, gamma);
            let got = horizontal_divergence(&h2, &v, &y).unwrap();
            assert!((got - expect).abs() < 1e-10 * (1.0 + expect.abs()));
        }
        // constant vector field is divergence free
        let c = HorizontalVectorField::constant(3, &[2.0, -1.0]);
        assert!(horizontal_divergence(&h1, &c, &x).unwrap().abs() < 1e-14);
    }

    #[test]
    fn sub_laplacian_examples() {
        // L |x'|^2 = 2N on any built-in group
        for g in [
            StratifiedGroup::abelian(3),
            StratifiedGroup::heisenberg(1),
            StratifiedGroup::heisenberg(2),
        ] {
            let f = ScalarField::radial(g.total_dim(), g.n_first(), 0.0, Profile::Power { a: 2.0 });
            let mut x = vec![0.1; g.total_dim()];
            x[0] = 0.7;
            let v = sub_laplacian(&g, &f, &x).unwrap();
            assert!((v - 2.0 * g.n_first() as f64).abs() < 1e-11, "{v}");
        }
        // linear functions are harmonic
        let h1 = StratifiedGroup::heisenberg(1);
        let f = coordinate(3, 2);
        assert!(sub_laplacian(&h1, &f, &[0.4, 0.5, 0.6]).unwrap().abs() < 1e-13);
        // L |x'|^γ = γ(γ-2+N) |x'|^{γ-2}: N=4, γ=2 at |x'|=1 gives 8
        let h2 = StratifiedGroup::heisenberg(2);
        let f = ScalarField::radial(5, 4, 0.0, Profile::Power { a: 2.0 });
        let x = [0.5, 0.5, 0.5, 0.5, 0.2]; // |x'| = 1
        assert!((sub_laplacian(&h2, &f, &x).unwrap() - 8.0).abs() < 1e-11);
        for gamma in [-2.5, 0.7, 3.0] {
            let f = ScalarField::radial(5, 4, 0.0, Profile::Power { a: gamma });
            let r = h2.first_stratum_norm(&x);
            let expect = gamma * (gamma - 2.0 + 4.0) * math::powf(r, gamma - 2.0);
            let got = sub_laplacian(&h2, &f, &x).unwrap();
            assert!((got - expect).abs() < 1e-9 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn p_sub_laplacian_reduces_to_sub_laplacian() {
        let h2 = StratifiedGroup::heisenberg(2);
        let mut rng = SeededRng::new(21);
        let f = crate::functions::random_field(
            33,
            &crate::functions::RandomFieldSpec::for_group(&h2, (0.2, 1.6), 2.0),
        );
        for _ in 0..40 {
            let x: Vec<f64> = (0..5).map(|_| rng.uniform(-1.5, 1.5)).collect();
            let l = sub_laplacian(&h2, &f, &x).unwrap();
            let lp = p_sub_laplacian(&h2, &f, 2.0, &x).unwrap();
            assert!((l - lp).abs() <= 1e-10 * (1.0 + l.abs()));
        }
    }

    #[test]
    fn p_sub_laplacian_of_constant_norm_gradient() {
        // f = sum_i x'_i has |∇_H f| = sqrt(N) constant, so L_p f = 0
        let h1 = StratifiedGroup::heisenberg(1);
        let f = coordinate(3, 0).sum(coordinate(3, 1));
        for p in [1.5, 2.0, 3.0] {
            let v = p_sub_laplacian(&h1, &f, p, &[0.3, -0.2, 0.8]).unwrap();
            assert!(v.abs() < 1e-12, "p={p}: {v}");
        }
    }

    #[test]
    fn p_sub_laplacian_singular_point_reported() {
        let h1 = StratifiedGroup::heisenberg(1);
        let c = ScalarField::constant(3, 1.0);
        let x = [0.1, 0.2, 0.3];
        assert!(matches!(
            p_sub_laplacian(&h1, &c, 1.5, &x),
            Err(CalcError::SingularGradient { .. })
        ));
        // for p > 2 the limit value 0 is returned instead
        assert_eq!(p_sub_laplacian(&h1, &c, 3.0, &x).unwrap(), 0.0);
        assert!(p_sub_laplacian(&h1, &c, 1.0, &x).is_err());
    }

    #[test]
    fn weighted_p_sub_laplacian_examples() {
        let h2 = StratifiedGroup::heisenberg(2);
        let f = crate::functions::random_field(
            5,
            &crate::functions::RandomFieldSpec::for_group(&h2, (0.3, 1.5), 2.0),
        );
        let one = ScalarField::constant(5, 1.0);
        let c = ScalarField::constant(5, 2.5);
        let mut rng = SeededRng::new(4);
        for p in [2.0, 3.0] {
            for _ in 0..20 {
                let x: Vec<f64> = (0..5).map(|_| rng.uniform(-1.4, 1.4)).collect();
                let lp = p_sub_laplacian(&h2, &f, p, &x).unwrap();
                let w1 = weighted_p_sub_laplacian(&h2, &one, &f, p, &x).unwrap();
                let wc = weighted_p_sub_laplacian(&h2, &c, &f, p, &x).unwrap();
                assert!((w1 - lp).abs() <= 1e-12 * (1.0 + lp.abs()));
                assert!((wc - 2.5 * lp).abs() <= 1e-11 * (1.0 + lp.abs()));
            }
        }
        // ρ = |x'|^2, f = |x'|^2, p = 2: value 2|x'|^2 (N+2)
        let rho = ScalarField::radial(5, 4, 0.0, Profile::Power { a: 2.0 });
        let fsq = ScalarField::radial(5, 4, 0.0, Profile::Power { a: 2.0 });
        let x = [0.4, -0.3, 0.8, 0.2, 0.5];
        let r2 = {
            let r = h2.first_stratum_norm(&x);
            r * r
        };
        let got = weighted_p_sub_laplacian(&h2, &rho, &fsq, 2.0, &x).unwrap();
        let expect = 2.0 * r2 * (4.0 + 2.0);
        assert!((got - expect).abs() < 1e-10 * (1.0 + expect));
    }

    #[test]
    fn identity_residuals_small_across_groups() {
        let b1 = vec![
            vec![0.0, 1.0, 0.0],
            vec![-1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ];
        let b2 = vec![
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0],
            vec![-1.0, 0.0, 0.0],
        ];
        let groups = [
            StratifiedGroup::abelian(3),
            StratifiedGroup::heisenberg(1),
            StratifiedGroup::heisenberg(2),
            StratifiedGroup::make(crate::group::GroupKind::Step2 {
                n1: 3,
                bs: vec![b1, b2],
            })
            .unwrap(),
        ];
        let mut rng = SeededRng::new(9);
        for g in &groups {
            for gamma in [-3.0, -1.0, 0.5, 2.0] {
                for _ in 0..100 {
                    let x: Vec<f64> = (0..g.total_dim())
                        .map(|_| rng.uniform(0.2, 1.5))
                        .collect();
                    let r = g.first_stratum_norm(&x);
                    let (rg, rd) = identity_residuals(g, gamma, &x).unwrap();
                    let scale_g = 1.0 + math::abs(gamma) * math::powf(r, gamma - 1.0);
                    let scale_d =
                        1.0 + math::abs((g.n_first() as f64 - gamma) / math::powf(r, gamma));
                    assert!(rg / scale_g <= 1e-9, "grad residual {rg} on {:?}", g.kind());
                    assert!(rd / scale_d <= 1e-9, "div residual {rd} on {:?}", g.kind());
                }
            }
        }
    }

    #[test]
    fn identity_residual_degenerate_cases() {
        let h1 = StratifiedGroup::heisenberg(1);
        let x = [0.8, -0.4, 0.1];
        // γ = 0: gradient side compares against zero
        let (rg, _) = identity_residuals(&h1, 0.0, &x).unwrap();
        assert!(rg < 1e-12);
        // γ = N: divergence side compares against zero
        let (_, rd) = identity_residuals(&h1, 2.0, &x).unwrap();
        assert!(rd < 1e-12);
        assert!(matches!(
            identity_residuals(&h1, 1.0, &[0.0, 0.0, 0.5]),
            Err(CalcError::FirstStratumOrigin)
        ));
    }

    #[test]
    fn gradient_is_dilation_homogeneous() {
        // |∇_H (f ∘ δ_λ)|(x) = λ |∇_H f|(δ_λ x)
        let h1 = StratifiedGroup::heisenberg(1);
        let lambda = 1.7;
        let f = ScalarField::new(
            3,
            2,
            vec![ProductTerm {
                coef: 1.0,
                factors: vec![
                    Factor::Radial {
                        shift: 0.0,
                        profile: Profile::ExpPower { c: 0.5, lambda: 2.0 },
                    },
                    Factor::Axis {
                        axis: 2,
                        profile: Profile::StepUp { a: -2.0, b: 1.5 },
                    },
                ],
            }],
            Support::unbounded(),
            Smoothness::SmoothEverywhere,
        );
        // f ∘ δ_λ: radial profile at λr, axis profile at λ^2 z
        let f_dil = ScalarField::new(
            3,
            2,
            vec![ProductTerm {
                coef: 1.0,
                factors: vec![
                    Factor::Radial {
                        shift: 0.0,
                        profile: Profile::ExpPower {
                            c: 0.5 * math::powf(lambda, 2.0),
                            lambda: 2.0,
                        },
                    },
                    Factor::Axis {
                        axis: 2,
                        profile: Profile::StepUp {
                            a: -2.0 / (lambda * lambda),
                            b: 1.5 / (lambda * lambda),
                        },
                    },
                ],
            }],
            Support::unbounded(),
            Smoothness::SmoothEverywhere,
        );
        let mut rng = SeededRng::new(17);
        for _ in 0..50 {
            let x: Vec<f64> = (0..3).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let lhs = horizontal_gradient_norm(&h1, &f_dil, &x).unwrap();
            let xl = h1.dilate(lambda, &x).unwrap();
            let rhs = lambda * horizontal_gradient_norm(&h1, &f, &xl).unwrap();
            assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
        }
    }
}
