//! Adaptive tensor Gauss-Legendre quadrature over truncated boxes, with an
//! optional first-stratum excision, plus a dense midpoint oracle used as
//! ground truth in tests.
//!
//! Cells are axis-aligned boxes; a cell's error indicator is the
//! disagreement between its one-shot rule and the sum of the rules over its
//! 2^n children. Cells whose indicator exceeds their share of the tolerance
//! are split, depth-first in a fixed order, so results are bit-reproducible
//! regardless of how callers schedule surrounding work.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::scalar::ScalarField;

/// Truncated integration domain: a box in R^n, with the cylinder
/// |x'| < excision (over the first `n_first` coordinates) removed.
#[derive(Clone, Debug)]
pub struct DomainSpec {
    pub bounds: Vec<(f64, f64)>,
    pub excision: f64,
    /// How many leading coordinates make up x'. 0 disables excision.
    pub n_first: usize,
}

impl DomainSpec {
    pub fn new(bounds: Vec<(f64, f64)>) -> Self {
        DomainSpec {
            bounds,
            excision: 0.0,
            n_first: 0,
        }
    }

    pub fn with_excision(mut self, n_first: usize, radius: f64) -> Self {
        self.n_first = n_first;
        self.excision = radius;
        self
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn volume(&self) -> f64 {
        self.bounds.iter().map(|(lo, hi)| hi - lo).product()
    }

    /// Largest first-stratum radius reached inside the box.
    pub fn sup_first_stratum_norm(&self, n_first: usize) -> f64 {
        let mut s = 0.0;
        for (lo, hi) in self.bounds.iter().take(n_first) {
            let m = lo.abs().max(hi.abs());
            s += m * m;
        }
        math::sqrt(s)
    }

    fn validate(&self) -> Result<(), QuadError> {
        if self.bounds.is_empty() || self.bounds.iter().any(|(lo, hi)| !(lo < hi)) {
            return Err(QuadError::BadSpec("domain box is empty"));
        }
        if self.excision > 0.0 {
            // the excised cylinder must fit strictly inside the box
            let inscribed = self
                .bounds
                .iter()
                .take(self.n_first)
                .map(|(lo, hi)| lo.abs().min(hi.abs()).max(-lo.min(*hi)))
                .fold(f64::INFINITY, f64::min);
            let inscribed = if self.n_first == 0 { 0.0 } else { inscribed };
            if self.excision >= inscribed && self.n_first > 0 {
                // allow boxes not containing the origin; then excision is inert
                let contains_origin = self.bounds[..self.n_first]
                    .iter()
                    .all(|(lo, hi)| *lo <= 0.0 && *hi >= 0.0);
                if contains_origin {
                    return Err(QuadError::BadSpec(
                        "excision radius exceeds the box's inscribed first-stratum radius",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Parameters of the adaptive integrator.
#[derive(Clone, Debug)]
pub struct QuadratureSpec {
    pub base_cells_per_axis: usize,
    pub max_refinement_depth: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Tensor Gauss-Legendre order per cell and axis.
    pub order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            base_cells_per_axis: 1,
            max_refinement_depth: 30,
            rel_tol: 1e-7,
            abs_tol: 1e-12,
            order: 8,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<(), QuadError> {
        if self.order < 2 {
            return Err(QuadError::BadSpec("rule order must be at least 2"));
        }
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(QuadError::BadSpec("tolerances must be positive"));
        }
        if self.base_cells_per_axis == 0 {
            return Err(QuadError::BadSpec("base cell count must be positive"));
        }
        Ok(())
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct IntegralValue {
    pub value: f64,
    pub err_estimate: f64,
    pub cells_used: usize,
    /// False when some cell hit the depth limit above its tolerance share.
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum QuadError {
    BadSpec(&'static str),
    NonFiniteSample { at: Vec<f64> },
    SingularWeight(&'static str),
    SupportNotContained,
}

impl core::fmt::Display for QuadError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            QuadError::BadSpec(s) => write!(f, "invalid quadrature setup: {s}"),
            QuadError::NonFiniteSample { at } => {
                write!(f, "integrand not finite at {at:?}")
            }
            QuadError::SingularWeight(s) => write!(f, "singular weight configuration: {s}"),
            QuadError::SupportNotContained => {
                write!(f, "field support is not contained in the domain box")
            }
        }
    }
}

impl core::error::Error for QuadError {}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = math::cos(math::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if math::abs(dx) < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

struct Cell {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

struct Worker<'a> {
    f: &'a dyn Fn(&[f64]) -> f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    excision: f64,
    n_excise: usize,
    abs_floor: f64,
    rel_tol: f64,
    max_depth: usize,
    cells: usize,
    converged: bool,
    failure: Option<QuadError>,
}

impl<'a> Worker<'a> {
    /// Tensor rule over one cell.
    fn rule(&mut self, cell: &Cell) -> f64 {
        let n = cell.lo.len();
        let ord = self.nodes.len();
        let mut idx = vec![0usize; n];
        let mut x = vec![0.0; n];
        let mut total = 0.0;
        let jac: f64 = (0..n).map(|d| 0.5 * (cell.hi[d] - cell.lo[d])).product();
        loop {
            let mut w = 1.0;
            for d in 0..n {
                let t = self.nodes[idx[d]];
                x[d] = 0.5 * (cell.lo[d] + cell.hi[d]) + 0.5 * (cell.hi[d] - cell.lo[d]) * t;
                w *= self.weights[idx[d]];
            }
            let fx = if self.excised(&x) { 0.0 } else { (self.f)(&x) };
            if !fx.is_finite() && self.failure.is_none() {
                self.failure = Some(QuadError::NonFiniteSample { at: x.clone() });
            }
            total += w * fx;
            // advance the multi-index
            let mut d = 0;
            loop {
                idx[d] += 1;
                if idx[d] < ord {
                    break;
                }
                idx[d] = 0;
                d += 1;
                if d == n {
                    return total * jac;
                }
            }
        }
    }

    fn excised(&self, x: &[f64]) -> bool {
        if self.excision <= 0.0 || self.n_excise == 0 {
            return false;
        }
        let mut s = 0.0;
        for xi in &x[..self.n_excise] {
            s += xi * xi;
        }
        s < self.excision * self.excision
    }

    /// Depth-first adaptive refinement; returns (value, error estimate).
    fn adapt(&mut self, cell: &Cell, coarse: f64, tol_share: f64, depth: usize) -> (f64, f64) {
        self.cells += 1;
        let n = cell.lo.len();
        let nchild = 1usize << n;
        let mut fine = 0.0;
        let mut children = Vec::with_capacity(nchild);
        let mut child_vals = Vec::with_capacity(nchild);
        for c in 0..nchild {
            let mut lo = cell.lo.clone();
            let mut hi = cell.hi.clone();
            for d in 0..n {
                let mid = 0.5 * (cell.lo[d] + cell.hi[d]);
                if (c >> d) & 1 == 0 {
                    hi[d] = mid;
                } else {
                    lo[d] = mid;
                }
            }
            let child = Cell { lo, hi };
            let v = self.rule(&child);
            fine += v;
            children.push(child);
            child_vals.push(v);
        }
        let err = math::abs(coarse - fine);
        let tol = tol_share + self.rel_tol * math::abs(fine);
        if err <= tol || self.failure.is_some() {
            return (fine, err);
        }
        if depth >= self.max_depth {
            self.converged = false;
            return (fine, err);
        }
        let mut value = 0.0;
        let mut err_sum = 0.0;
        let child_share = tol_share / nchild as f64;
        for (child, cval) in children.iter().zip(child_vals) {
            let (v, e) = self.adapt(child, cval, child_share, depth + 1);
            value += v;
            err_sum += e;
        }
        (value, err_sum)
    }
}

/// Adaptive integral of `f` over the domain.
pub fn integrate(
    f: &dyn Fn(&[f64]) -> f64,
    dom: &DomainSpec,
    spec: &QuadratureSpec,
) -> Result<IntegralValue, QuadError> {
    dom.validate()?;
    spec.validate()?;
    let n = dom.dim();
    let (nodes, weights) = gauss_legendre(spec.order);
    let mut worker = Worker {
        f,
        nodes,
        weights,
        excision: dom.excision,
        n_excise: dom.n_first,
        abs_floor: spec.abs_tol,
        rel_tol: spec.rel_tol,
        max_depth: spec.max_refinement_depth,
        cells: 0,
        converged: true,
        failure: None,
    };
    // fixed lexicographic base grid
    let b = spec.base_cells_per_axis;
    let nbase = math::powi(b as f64, n as i32) as usize;
    let mut value = 0.0;
    let mut err = 0.0;
    let share = worker.abs_floor / nbase as f64;
    for cidx in 0..nbase {
        let mut rem = cidx;
        let mut lo = vec![0.0; n];
        let mut hi = vec![0.0; n];
        for d in 0..n {
            let i = rem % b;
            rem /= b;
            let (blo, bhi) = dom.bounds[d];
            let w = (bhi - blo) / b as f64;
            lo[d] = blo + i as f64 * w;
            hi[d] = lo[d] + w;
        }
        let cell = Cell { lo, hi };
        let coarse = worker.rule(&cell);
        let (v, e) = worker.adapt(&cell, coarse, share, 0);
        value += v;
        err += e;
    }
    if let Some(e) = worker.failure {
        return Err(e);
    }
    Ok(IntegralValue {
        value,
        err_estimate: err,
        cells_used: worker.cells,
        converged: worker.converged,
    })
}

/// Dense composite midpoint rule on a uniform grid; the reference oracle.
pub fn oracle_integrate(
    f: &dyn Fn(&[f64]) -> f64,
    dom: &DomainSpec,
    resolution: usize,
) -> Result<f64, QuadError> {
    dom.validate()?;
    if resolution == 0 {
        return Err(QuadError::BadSpec("resolution must be positive"));
    }
    let n = dom.dim();
    let steps: Vec<f64> = dom
        .bounds
        .iter()
        .map(|(lo, hi)| (hi - lo) / resolution as f64)
        .collect();
    let cellvol: f64 = steps.iter().product();
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    let mut total = 0.0;
    loop {
        let mut excised = false;
        for d in 0..n {
            x[d] = dom.bounds[d].0 + (idx[d] as f64 + 0.5) * steps[d];
        }
        if dom.excision > 0.0 && dom.n_first > 0 {
            let mut s = 0.0;
            for xi in &x[..dom.n_first] {
                s += xi * xi;
            }
            excised = s < dom.excision * dom.excision;
        }
        if !excised {
            let fx = f(&x);
            if !fx.is_finite() {
                return Err(QuadError::NonFiniteSample { at: x.clone() });
            }
            total += fx;
        }
        let mut d = 0;
        loop {
            idx[d] += 1;
            if idx[d] < resolution {
                break;
            }
            idx[d] = 0;
            d += 1;
            if d == n {
                return Ok(total * cellvol);
            }
        }
    }
}

/// Weighted L^p norm (∫ |f|^p / |x'|^{γ_w} dx)^{1/p} over the domain.
///
/// With a positive singular weight the field support (or the domain
/// excision) must stay away from {x' = 0}.
pub fn weighted_lp_norm(
    n_first: usize,
    f: &ScalarField,
    p: f64,
    gamma_w: f64,
    dom: &DomainSpec,
    spec: &QuadratureSpec,
) -> Result<(f64, IntegralValue), QuadError> {
    if !(p >= 1.0) {
        return Err(QuadError::BadSpec("p must be >= 1"));
    }
    if gamma_w > 0.0 && f.support().inner_radius <= 0.0 && dom.excision <= 0.0 {
        return Err(QuadError::SingularWeight(
            "weight |x'|^{-γ} needs the support or the domain to avoid {x' = 0}",
        ));
    }
    if f.support().is_bounded() && !f.support().contained_in(&dom.bounds) {
        return Err(QuadError::SupportNotContained);
    }
    let integrand = move |x: &[f64]| -> f64 {
        let v = f.eval(x);
        if v == 0.0 {
            return 0.0;
        }
        let mut r2 = 0.0;
        for xi in &x[..n_first] {
            r2 += xi * xi;
        }
        let r = math::sqrt(r2);
        math::powf(math::abs(v), p) * math::powf(r, -gamma_w)
    };
    let raw = integrate(&integrand, dom, spec)?;
    Ok((math::powf(raw.value.max(0.0), 1.0 / p), raw))
}
