//! Evaluation of both sides of every inequality and identity in scope,
//! producing [`InequalityReport`]s with quadrature error bars and verdicts.
//!
//! Integrals run through one of two paths chosen per check:
//!
//! * the general adaptive box quadrature of [`crate::quad`], or
//! * an exact symmetry reduction to one or two dimensions, available when
//!   the group's horizontal structure is rotation-transitive on first-
//!   stratum spheres (abelian, Heisenberg) and every field involved is a
//!   function of (|x'|, transverse coordinate) only. The reduced path still
//!   evaluates the very same pointwise operators at representative points;
//!   only the measure factor σ_{N-1} r^{N-1} changes. The two paths are
//!   cross-checked against each other in the tests.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cell::{Cell, RefCell};

use crate::calculus::{self, CalcError};
use crate::functions::{GFunction, GKind};
use crate::group::StratifiedGroup;
use crate::math;
use crate::quad::{self, DomainSpec, IntegralValue, QuadError, QuadratureSpec};
use crate::scalar::ScalarField;

const TINY: f64 = 1e-300;

/// Outcome of a single inequality evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    HoldsWithinTolerance,
    Violated,
    Inconclusive,
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            Verdict::Holds => "holds",
            Verdict::HoldsWithinTolerance => "holds-within-tolerance",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        };
        write!(f, "{s}")
    }
}

/// Which inequality a campaign entry refers to, with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum InequalityCase {
    Ckn { alpha: f64, beta: f64, p: f64 },
    WeightedHardy { alpha: f64, p: f64 },
    Hardy { p: f64 },
    BadialeTarantello { n: usize, n_first: usize, alpha: f64, beta: f64, p: f64 },
    UncertaintyPVariant { p: f64 },
    UncertaintyHpw1 { alpha: f64, p: f64 },
    UncertaintyHpw2 { p: f64 },
    CriticalHardy,
    AbstractCritical { g: GKind },
    PoincareCritical,
    PoincareLp { p: f64 },
    HigherOrderCkn { alpha: f64, beta: f64, p: f64, k: usize, m: usize },
    HardyRellich { alpha: f64, beta: f64, p: f64 },
    RellichCorollary { p: f64 },
    UncertaintyPLap { p: f64 },
    WeightedPLap { p: f64 },
    LindqvistP12 { p: f64 },
    RemainderP2,
    DaviesIdentity { p: f64 },
}

impl InequalityCase {
    pub fn name(&self) -> &'static str {
        match self {
            InequalityCase::Ckn { .. } => "ckn",
            InequalityCase::WeightedHardy { .. } => "weighted-hardy",
            InequalityCase::Hardy { .. } => "hardy",
            InequalityCase::BadialeTarantello { .. } => "badiale-tarantello",
            InequalityCase::UncertaintyPVariant { .. } => "uncertainty-p",
            InequalityCase::UncertaintyHpw1 { .. } => "uncertainty-hpw1",
            InequalityCase::UncertaintyHpw2 { .. } => "uncertainty-hpw2",
            InequalityCase::CriticalHardy => "critical-hardy",
            InequalityCase::AbstractCritical { .. } => "abstract-critical",
            InequalityCase::PoincareCritical => "poincare-critical",
            InequalityCase::PoincareLp { .. } => "poincare-lp",
            InequalityCase::HigherOrderCkn { .. } => "higher-order-ckn",
            InequalityCase::HardyRellich { .. } => "hardy-rellich",
            InequalityCase::RellichCorollary { .. } => "rellich-corollary",
            InequalityCase::UncertaintyPLap { .. } => "uncertainty-plap",
            InequalityCase::WeightedPLap { .. } => "weighted-plap",
            InequalityCase::LindqvistP12 { .. } => "lindqvist-p12",
            InequalityCase::RemainderP2 => "remainder-p2",
            InequalityCase::DaviesIdentity { .. } => "davies-identity",
        }
    }
}

/// Evaluation result for one inequality instance.
#[derive(Clone, Debug)]
pub struct InequalityReport {
    pub case: String,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    /// (rhs - lhs) / max(|rhs|, tiny).
    pub margin: f64,
    /// Combined quadrature error estimate for lhs and rhs.
    pub quad_err: f64,
    pub verdict: Verdict,
    /// Sample points where a p < 2 operator hit a vanishing gradient.
    pub singular_samples: usize,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub enum SuiteError {
    Config(String),
    Quad(QuadError),
    Calc(CalcError),
}

impl From<QuadError> for SuiteError {
    fn from(e: QuadError) -> Self {
        SuiteError::Quad(e)
    }
}

impl From<CalcError> for SuiteError {
    fn from(e: CalcError) -> Self {
        SuiteError::Calc(e)
    }
}

impl core::fmt::Display for SuiteError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SuiteError::Config(s) => write!(f, "configuration error: {s}"),
            SuiteError::Quad(e) => write!(f, "{e}"),
            SuiteError::Calc(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SuiteError {}

pub type Result<T> = core::result::Result<T, SuiteError>;

fn cfg(msg: impl core::fmt::Display) -> SuiteError {
    SuiteError::Config(msg.to_string())
}

// ---------------------------------------------------------------------------
// sharp constants
// ---------------------------------------------------------------------------

/// The theorem constant for a case on a group with first-stratum dimension
/// `n_first`.
pub fn sharp_constant(case: &InequalityCase, n_first: usize) -> Result<f64> {
    let n = n_first as f64;
    match *case {
        InequalityCase::Ckn { alpha, beta, p } => {
            let gamma = alpha + beta + 1.0;
            Ok(math::abs(n - gamma) / p)
        }
        InequalityCase::BadialeTarantello {
            n_first: nf,
            alpha,
            beta,
            p,
            ..
        } => {
            let gamma = alpha + beta + 1.0;
            Ok(math::abs(nf as f64 - gamma) / p)
        }
        InequalityCase::WeightedHardy { alpha, p } => Ok(math::abs(n - p * (alpha + 1.0)) / p),
        InequalityCase::Hardy { p } => {
            if !(p < n) {
                return Err(cfg(format!("Hardy constant p/(N-p) needs p < N; got p = {p}, N = {n}")));
            }
            Ok(p / (n - p))
        }
        InequalityCase::CriticalHardy => Ok(n / (n - 1.0)),
        InequalityCase::HardyRellich { alpha, beta, p } => {
            let gamma = alpha + beta + 1.0;
            Ok((n + gamma * (p - 1.0) - p) / p)
        }
        InequalityCase::RellichCorollary { p } => {
            if !(p < n) {
                return Err(cfg("Rellich constant p/(N-p) needs p < N"));
            }
            Ok(p / (n - p))
        }
        InequalityCase::UncertaintyHpw2 { p } => Ok(n / p),
        InequalityCase::HigherOrderCkn { alpha, beta, p, k, m } => {
            let a_m = higher_order_factor(n, alpha, p, m, 1.0)?;
            let a_k = higher_order_factor(n, beta / (p - 1.0), p, k, p - 1.0)?;
            Ok(a_m * a_k)
        }
        _ => Err(cfg(format!("case {} has no single closed-form constant", case.name()))),
    }
}

/// Ã factor p^{m·weight} [ Π_{j<m} |N - p(exponent - j)| ]^{-weight}.
fn higher_order_factor(n: f64, exponent: f64, p: f64, m: usize, weight: f64) -> Result<f64> {
    let mut prod = 1.0;
    for j in 0..m {
        let factor = math::abs(n - p * (exponent - j as f64));
        if factor < 1e-14 {
            return Err(cfg(format!(
                "higher-order hypothesis violated: |N - p(α - {j})| = 0"
            )));
        }
        prod *= factor;
    }
    Ok(math::powf(math::powf(p, m as f64) / prod, weight))
}

// ---------------------------------------------------------------------------
// evaluation context
// ---------------------------------------------------------------------------

/// Shared state for a batch of checks on one group and domain.
pub struct CheckContext<'a> {
    pub group: &'a StratifiedGroup,
    pub dom: &'a DomainSpec,
    pub quad: &'a QuadratureSpec,
    force_general: bool,
}

impl<'a> CheckContext<'a> {
    pub fn new(group: &'a StratifiedGroup, dom: &'a DomainSpec, quad: &'a QuadratureSpec) -> Self {
        CheckContext {
            group,
            dom,
            quad,
            force_general: false,
        }
    }

    /// Disable the symmetry reduction; every integral runs over the full box.
    pub fn force_general(mut self) -> Self {
        self.force_general = true;
        self
    }

    fn n_first(&self) -> usize {
        self.group.n_first()
    }

    /// sup_Ω |x'| of the truncation box.
    pub fn domain_radius(&self) -> f64 {
        self.dom.sup_first_stratum_norm(self.n_first())
    }

    fn admissible(&self, f: &ScalarField, needs_inner: bool) -> Result<()> {
        if f.dim() != self.group.total_dim() {
            return Err(cfg("field dimension does not match the group"));
        }
        if !f.support().is_bounded() {
            return Err(cfg("field is not compactly supported"));
        }
        if !f.support().contained_in(&self.dom.bounds) {
            return Err(cfg("field support is not contained in the domain box"));
        }
        if needs_inner && f.support().inner_radius <= 0.0 && self.dom.excision <= 0.0 {
            return Err(cfg(
                "field must vanish near {x' = 0} (or the domain must excise it)",
            ));
        }
        Ok(())
    }

    /// Symmetry reduction parameters (radial dimension, transverse axis), if
    /// every field in the batch is a function of (|x'|, one transverse
    /// coordinate) and the group's horizontal structure is invariant under a
    /// sphere-transitive rotation group. On abelian space any leading block
    /// of coordinates may serve as the radial variables; on Heisenberg
    /// groups the block must be the full first stratum (U(m) symmetry).
    fn reduction(&self, fields: &[&ScalarField]) -> Option<(usize, Option<usize>)> {
        if self.force_general || !self.group.rotation_transitive() {
            return None;
        }
        let dim = self.group.total_dim();
        // constants carry no layout; take nr from the first structured field
        let nr = fields
            .iter()
            .find(|f| !f.is_constant())
            .map(|f| f.n_first())
            .unwrap_or_else(|| self.group.n_first());
        let abelian = matches!(self.group.kind(), crate::group::GroupKind::Abelian { .. });
        if !abelian && nr != self.group.n_first() {
            return None;
        }
        if dim < nr || dim - nr > 1 {
            return None;
        }
        let want_axis = if dim == nr + 1 { Some(nr) } else { None };
        for f in fields {
            if f.is_constant() {
                continue;
            }
            if f.n_first() != nr {
                return None;
            }
            match f.product_radial_axis() {
                Some(None) => {}
                Some(Some(a)) if Some(a) == want_axis => {}
                _ => return None,
            }
        }
        Some((nr, want_axis))
    }

    /// ∫ integrand dx over the support of `support`, via the reduced or the
    /// general path. `companions` are the other fields the integrand reads;
    /// they decide reducibility together with `support`.
    fn integral(
        &self,
        support: &ScalarField,
        companions: &[&ScalarField],
        integrand: &dyn Fn(&[f64]) -> f64,
    ) -> Result<IntegralValue> {
        let mut all: Vec<&ScalarField> = vec![support];
        all.extend_from_slice(companions);
        if let Some((nr, axis)) = self.reduction(&all) {
            self.integral_reduced(support, nr, axis, integrand)
        } else {
            Ok(quad::integrate(integrand, self.dom, self.quad)?)
        }
    }

    fn integral_reduced(
        &self,
        support: &ScalarField,
        nr: usize,
        axis: Option<usize>,
        integrand: &dyn Fn(&[f64]) -> f64,
    ) -> Result<IntegralValue> {
        let dim = self.group.total_dim();
        let r_lo = support
            .support()
            .inner_radius
            .max(self.dom.excision)
            .max(1e-12);
        let r_hi = support
            .support()
            .outer_radius
            .ok_or_else(|| cfg("reduced integration needs a radially bounded support"))?;
        if !(r_lo < r_hi) {
            return Ok(IntegralValue {
                value: 0.0,
                err_estimate: 0.0,
                cells_used: 0,
                converged: true,
            });
        }
        let area = math::unit_sphere_area(nr);
        let mut bounds = vec![(math::ln(r_lo), math::ln(r_hi))];
        if let Some(a) = axis {
            let b = support
                .support()
                .bounds
                .as_ref()
                .ok_or_else(|| cfg("reduced integration needs a bounded support box"))?[a];
            bounds.push(b);
        }
        let nf = nr as f64;
        let wrapped = move |u: &[f64]| -> f64 {
            let mut x = [0.0; crate::MAX_DIM];
            x[0] = math::exp(u[0]);
            if let Some(a) = axis {
                x[a] = u[1];
            }
            let w = area * math::exp(nf * u[0]);
            integrand(&x[..dim]) * w
        };
        let rdom = DomainSpec::new(bounds);
        Ok(quad::integrate(&wrapped, &rdom, self.quad)?)
    }
}

// ---------------------------------------------------------------------------
// kernels and norms
// ---------------------------------------------------------------------------

/// Collects calculus failures raised inside quadrature callbacks, which must
/// return plain floats.
struct KernelGuard {
    singular: Cell<usize>,
    error: RefCell<Option<CalcError>>,
}

impl KernelGuard {
    fn new() -> Self {
        KernelGuard {
            singular: Cell::new(0),
            error: RefCell::new(None),
        }
    }

    fn wrap(&self, r: core::result::Result<f64, CalcError>) -> f64 {
        match r {
            Ok(v) => v,
            Err(CalcError::SingularGradient { .. }) => {
                self.singular.set(self.singular.get() + 1);
                0.0
            }
            Err(e) => {
                let mut slot = self.error.borrow_mut();
                if slot.is_none() {
                    *slot = Some(e);
                }
                0.0
            }
        }
    }

    fn finish(&self) -> Result<usize> {
        if let Some(e) = self.error.borrow().clone() {
            return Err(SuiteError::Calc(e));
        }
        Ok(self.singular.get())
    }
}

fn first_norm(n1: usize, x: &[f64]) -> f64 {
    let mut s = 0.0;
    for xi in &x[..n1] {
        s += xi * xi;
    }
    math::sqrt(s)
}

/// ∫ |kernel|^p |x'|^{-w} dx over the support of `f`; kernel values are
/// taken as 0 wherever f vanishes, so singular weights never get sampled
/// outside the support.
struct PowIntegral {
    value: f64,
    err: f64,
    singular: usize,
    converged: bool,
}

impl CheckContext<'_> {
    /// The weight radius follows the field's own layout (`f.n_first()`),
    /// which coincides with the group's first stratum for group checks and
    /// with the partial-variable block for the Euclidean forms.
    fn lp_pow(
        &self,
        f: &ScalarField,
        companions: &[&ScalarField],
        kernel: &dyn Fn(&[f64]) -> core::result::Result<f64, CalcError>,
        p: f64,
        weight_exp: f64,
    ) -> Result<PowIntegral> {
        let guard = KernelGuard::new();
        let n1 = f.n_first();
        let integrand = |x: &[f64]| -> f64 {
            if !f.in_support(x) {
                return 0.0;
            }
            let v = guard.wrap(kernel(x));
            if v == 0.0 {
                return 0.0;
            }
            let mut out = math::powf(math::abs(v), p);
            if weight_exp != 0.0 {
                let r = first_norm(n1, x);
                if r <= 0.0 {
                    return 0.0;
                }
                out *= math::powf(r, -weight_exp);
            }
            out
        };
        let iv = self.integral(f, companions, &integrand)?;
        let singular = guard.finish()?;
        Ok(PowIntegral {
            value: iv.value.max(0.0),
            err: iv.err_estimate,
            singular,
            converged: iv.converged,
        })
    }
}

/// Error of A^{e} from (A, dA): e A^{e-1} dA, safeguarded for tiny A.
fn pow_err(a: f64, da: f64, e: f64) -> f64 {
    if a <= da.max(TINY) {
        return math::powf(da.max(0.0), e);
    }
    e * math::powf(a, e - 1.0) * da
}

fn verdict_from(lhs: f64, rhs: f64, combined: f64, converged: bool, singular: usize) -> Verdict {
    if !converged || singular > 0 {
        // still allow a definite Violated call if the gap is huge
        if lhs > rhs + combined && singular == 0 {
            return Verdict::Violated;
        }
        return Verdict::Inconclusive;
    }
    let gap = rhs - lhs;
    if gap > combined || (gap == 0.0 && combined == 0.0) {
        Verdict::Holds
    } else if gap >= -combined {
        Verdict::HoldsWithinTolerance
    } else {
        Verdict::Violated
    }
}

fn make_report(
    case: &InequalityCase,
    lhs: f64,
    rhs: f64,
    constant: f64,
    combined: f64,
    converged: bool,
    singular: usize,
) -> InequalityReport {
    InequalityReport {
        case: case.name().to_string(),
        lhs,
        rhs,
        constant,
        margin: (rhs - lhs) / math::abs(rhs).max(TINY),
        quad_err: combined,
        verdict: verdict_from(lhs, rhs, combined, converged, singular),
        singular_samples: singular,
        converged,
    }
}

// ---------------------------------------------------------------------------
// the checks
// ---------------------------------------------------------------------------

/// L^p Caffarelli-Kohn-Nirenberg:
/// (|N-γ|/p) ‖f/|x'|^{γ/p}‖_p^p <= ‖|x'|^{-α} ∇_H f‖_p ‖f/|x'|^{β/(p-1)}‖_p^{p-1}.
pub fn check_ckn(
    ctx: &CheckContext,
    f: &ScalarField,
    alpha: f64,
    beta: f64,
    p: f64,
) -> Result<InequalityReport> {
    if !(p > 1.0) {
        return Err(cfg("CKN needs p > 1"));
    }
    ctx.admissible(f, true)?;
    let case = InequalityCase::Ckn { alpha, beta, p };
    let n = ctx.n_first() as f64;
    let gamma = alpha + beta + 1.0;
    let constant = math::abs(n - gamma) / p;
    let g = ctx.group;
    let grad = |x: &[f64]| calculus::horizontal_gradient_norm(g, f, x);
    let val = |x: &[f64]| -> core::result::Result<f64, CalcError> { Ok(f.eval(x)) };
    let l = ctx.lp_pow(f, &[], &val, p, gamma)?;
    let a = ctx.lp_pow(f, &[], &grad, p, alpha * p)?;
    let b = ctx.lp_pow(f, &[], &val, p, beta * p / (p - 1.0))?;
    let lhs = constant * l.value;
    let rhs = math::powf(a.value, 1.0 / p) * math::powf(b.value, (p - 1.0) / p);
    let err = constant * l.err
        + pow_err(a.value, a.err, 1.0 / p) * math::powf(b.value, (p - 1.0) / p)
        + math::powf(a.value, 1.0 / p) * pow_err(b.value, b.err, (p - 1.0) / p);
    let converged = l.converged && a.converged && b.converged;
    Ok(make_report(&case, lhs, rhs, constant, err, converged, l.singular + a.singular + b.singular))
}

/// Weighted Hardy: (|N-p(α+1)|/p) ‖f/|x'|^{α+1}‖_p <= ‖|x'|^{-α} ∇_H f‖_p.
pub fn check_weighted_hardy(
    ctx: &CheckContext,
    f: &ScalarField,
    alpha: f64,
    p: f64,
) -> Result<InequalityReport> {
    if !(p > 1.0) {
        return Err(cfg("weighted Hardy needs p > 1"));
    }
    ctx.admissible(f, true)?;
    let case = InequalityCase::WeightedHardy { alpha, p };
    let n = ctx.n_first() as f64;
    let constant = math::abs(n - p * (alpha + 1.0)) / p;
    let g = ctx.group;
    let grad = |x: &[f64]| calculus::horizontal_gradient_norm(g, f, x);
    let val = |x: &[f64]| -> core::result::Result<f64, CalcError> { Ok(f.eval(x)) };
    let l = ctx.lp_pow(f, &[], &val, p, p * (alpha + 1.0))?;
    let a = ctx.lp_pow(f, &[], &grad, p, alpha * p)?;
    let lhs = constant * math::powf(l.value, 1.0 / p);
    let rhs = math::powf(a.value, 1.0 / p);
    let err = constant * pow_err(l.value, l.err, 1.0 / p) + pow_err(a.value, a.err, 1.0 / p);
    Ok(make_report(
        &case,
        lhs,
        rhs,
        constant,
        err,
        l.converged && a.converged,
        l.singular + a.singular,
    ))
}

/// Hardy: ‖f/|x'|‖_p <= (p/(N-p)) ‖∇_H f‖_p for 1 < p < N; p = N is
/// rejected in favour of the critical form, and p > N uses the modulus
/// form (|N-p|/p) ‖f/|x'|‖_p <= ‖∇_H f‖_p.
pub fn check_hardy(ctx: &CheckContext, f: &ScalarField, p: f64) -> Result<InequalityReport> {
    let n = ctx.n_first() as f64;
    if !(p > 1.0) {
        return Err(cfg("Hardy needs p > 1"));
    }
    if math::abs(p - n) < 1e-12 {
        return Err(cfg(
            "p = N is outside the Hardy range; use critical-hardy instead",
        ));
    }
    ctx.admissible(f, true)?;
    let case = InequalityCase::Hardy { p };
    let g = ctx.group;
    let grad = |x: &[f64]| calculus::horizontal_gradient_norm(g, f, x);
    let val = |x: &[f64]| -> core::result::Result<f64, CalcError> { Ok(f.eval(x)) };
    let l = ctx.lp_pow(f, &[], &val, p, p)?;
    let a = ctx.lp_pow(f, &[], &grad, p, 0.0)?;
    let (lhs, rhs, constant, err) = if p < n {
        let c = p / (n - p);
        (
            math::powf(l.value, 1.0 / p),
            c * math::powf(a.value, 1.0 / p),
            c,
            pow_err(l.value, l.err, 1.0 / p) + c * pow_err(a.value, a.err, 1.0 / p),
        )
    } else {
        let c = math::abs(n - p) / p;
        (
            c * math::powf(l.value, 1.0 / p),
            math::powf(a.value, 1.0 / p),
            c,
            c * pow_err(l.value, l.err, 1.0 / p) + pow_err(a.value, a.err, 1.0 / p),
        )
    };
    Ok(make_report(
        &case,
        lhs,
        rhs,
        constant,
        err,
        l.converged && a.converged,
        0,
    ))
}

/// Euclidean Badiale-Tarantello form on R^n with the full gradient on the
/// right and the partial-variable weight |x'| on the left.
pub fn check_badiale_tarantello(
    n: usize,
    n_first: usize,
    f: &ScalarField,
    alpha: f64,
    beta: f64,
    p: f64,
    dom: &DomainSpec,
    quadspec: &QuadratureSpec,
) -> Result<InequalityReport> {
    if n_first == 0 || n_first > n {
        return Err(cfg("need 1 <= N <= n"));
    }
    if f.n_first() != n_first || f.dim() != n {
        return Err(cfg("field layout does not match (n, N)"));
    }
    if !(p > 1.0) {
        return Err(cfg("needs p > 1"));
    }
    let euclid = StratifiedGroup::abelian(n);
    // the ambient group is R^n, but weights use only the first N coordinates;
    // reduce by hand through a context whose kernels read f's layout.
    let ctx = CheckContext::new(&euclid, dom, quadspec);
    if f.support().inner_radius <= 0.0 {
        return Err(cfg("field must vanish near {x' = 0}"));
    }
    if !f.support().contained_in(&dom.bounds) {
        return Err(cfg("field support is not contained in the domain box"));
    }
    let case = InequalityCase::BadialeTarantello {
        n,
        n_first,
        alpha,
        beta,
        p,
    };
    let gamma = alpha + beta + 1.0;
    let constant = math::abs(n_first as f64 - gamma) / p;
    // the right-hand side uses the full Euclidean gradient on R^n
    let grad = |x: &[f64]| -> core::result::Result<f64, CalcError> {
        let j = f.jet2(x);
        if !j.is_finite() {
            return Err(CalcError::NonFinite);
        }
        Ok(j.grad_norm())
    };
    let val = |x: &[f64]| -> core::result::Result<f64, CalcError> { Ok(f.eval(x)) };
    let l = ctx.lp_pow(f, &[], &val, p, gamma)?;
    let a = ctx.lp_pow(f, &[], &grad, p, alpha * p)?;
    let b = ctx.lp_pow(f, &[], &val, p, beta * p / (p - 1.0))?;
    let lhs = constant * l.value;
    let rhs = math::powf(a.value, 1.0 / p) * math::powf(b.value, (p - 1.0) / p);
    let err = constant * l.err
        + pow_err(a.value, a.err, 1.0 / p) * math::powf(b.value, (p - 1.0) / p)
        + math::powf(a.value, 1.0 / p) * pow_err(b.value, b.err, (p - 1.0) / p);
    Ok(make_report(
        &case,
        lhs,
        rhs,
        constant,
        err,
        l.converged && a.converged && b.converged,
        0,
    ))
}

/// The three first-order uncertainty-principle variants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UncertaintyKind {
    /// ‖f‖_{L²}² <= (p/(N-p)) ‖∇_H f‖_p ‖ |x'| f ‖_q, 1 < p < N.
    PVariant,
    /// αp = γ: (|N-αp|/p) ‖f/|x'|^α‖_p^p <= ‖∇_H f/|x'|^α‖_p ‖|x'|^{1/(p-1)-α} f‖_p^{p-1}.
    Hpw1 { alpha: f64 },
    /// (N/p) ‖f‖_p^p <= ‖|x'|^p ∇_H f‖_p ‖f/|x'|‖_p^{p-1}.
    Hpw2,
}

pub fn check_uncertainty(
    ctx: &CheckContext,
    f: &ScalarField,
    p: f64,
    kind: UncertaintyKind,
) -> Result<InequalityReport> {
    ctx.admissible(f, true)?;
    let n = ctx.n_first() as f64;
    let g = ctx.group;
    let grad = |x: &[f64]| calculus::horizontal_gradient_norm(g, f, x);
    let val = |x: &[f64]| -> core::result::Result<f64, CalcError> { Ok(f.eval(x)) };
    match kind {
        UncertaintyKind::PVariant => {
            if !(1.0 < p && p < n) {
                return Err(cfg(format!("uncertainty-p needs 1 < p < N, got p = {p}")));
            }
            let case = InequalityCase::UncertaintyPVariant { p };
            let q = p / (p - 1.0);
            let constant = p / (n - p);
            let l2 = ctx.lp_pow(f, &[], &val, 2.0, 0.0)?;
            let a = ctx.lp_pow(f, &[], &grad, p, 0.0)?;
            let b = ctx.lp_pow(f, &[], &val, q, -q)?; // weight |x'|^{+1} inside
            let lhs = l2.value;
            let rhs = constant * math::powf(a.value, 1.0 / p) * math::powf(b.value, 1.0 / q);
            let err = l2.err
                + constant
                    * (pow_err(a.value, a.err, 1.0 / p) * math::powf(b.value, 1.0 / q)
                        + math::powf(a.value, 1.0 / p) * pow_err(b.value, b.err, 1.0 / q));
            Ok(make_report(
                &case,
                lhs,
                rhs,
                constant,
                err,
                l2.converged && a.converged && b.converged,
                0,
            ))
        }
        UncertaintyKind::Hpw1 { alpha } => {
            if !(p > 1.0) {
                return Err(cfg("uncertainty-hpw1 needs p > 1"));
            }
            let case = InequalityCase::UncertaintyHpw1 { alpha, p };
            let constant = math::abs(n - alpha * p) / p;
            let l = ctx.lp_pow(f, &[], &val, p, alpha * p)?;
            let a = ctx.lp_pow(f, &[], &grad, p, alpha * p)?;
            let b = ctx.lp_pow(f, &[], &val, p, -(1.0 / (p - 1.0) - alpha) * p)?;
            let lhs = constant * l.value;
            let rhs = math::powf(a.value, 1.0 / p) * math::powf(b.value, (p - 1.0) / p);
            let err = constant * l.err
                + pow_err(a.value, a.err, 1.0 / p) * math::powf(b.value, (p - 1.0) / p)
                + math::powf(a.value, 1.0 / p) * pow_err(b.value, b.err, (p - 1.0) / p);
            Ok(make_report(
                &case,
                lhs,
                rhs,
                constant,
                err,
                l.converged && a.converged && b.converged,
                0,
            ))
        }
        UncertaintyKind::Hpw2 => {
            if !(p > 1.0) {
                return Err(cfg("uncertainty-hpw2 needs p > 1"));
            }
            let case = InequalityCase::UncertaintyHpw2 { p };
            let constant = n / p;
            let l = ctx.lp_pow(f, &[], &val, p, 0.0)?;
            let a = ctx.lp_pow(f, &[], &grad, p, -p * p)?; // |x'|^p inside the norm
            let b = ctx.lp_pow(f, &[], &val, p, p)?;
            let lhs = constant * l.value;
            let rhs = math::powf(a.value, 1.0 / p) * math::powf(b.value, (p - 1.0) / p);
            let err = constant * l.err
                + pow_err(a.value, a.err, 1.0 / p) * math::powf(b.value, (p - 1.0) / p)
                + math::powf(a.value, 1.0 / p) * pow_err(b.value, b.err, (p - 1.0) / p);
            Ok(make_report(
                &case,
                lhs,
                rhs,
                constant,
                err,
                l.converged && a.converged && b.converged,
                0,
            ))
        }
    }
}

/// Critical (logarithmic) Hardy in L^N:
/// ‖f/(|x'| log(R/|x'|))‖_N <= (N/(N-1)) ‖(x'/|x'|)·∇_H f‖_N,
/// with R = sup_Ω |x'|.
pub fn check_critical_hardy(ctx: &CheckContext, f: &ScalarField) -> Result<InequalityReport> {
    let n1 = ctx.n_first();
    if n1 < 2 {
        return Err(cfg("critical Hardy needs N >= 2"));
    }
    ctx.admissible(f, true)?;
    let r_sup = ctx.domain_radius();
    match f.support().outer_radius {
        Some(out) if out < r_sup => {}
        _ => {
            return Err(cfg(
                "support must stay strictly inside |x'| = R (log weight vanishes there)",
            ))
        }
    }
    let case = InequalityCase::CriticalHardy;
    let n = n1 as f64;
    let constant = n / (n - 1.0);
    let g = ctx.group;
    let lhs_kernel = |x: &[f64]| -> core::result::Result<f64, CalcError> {
        let v = f.eval(x);
        if v == 0.0 {
            return Ok(0.0);
        }
        let r = first_norm(n1, x);
        Ok(v / (r * math::ln(r_sup / r)))
    };
    let rhs_kernel = |x: &[f64]| radial_directional(g, f, x);
    let l = ctx.lp_pow(f, &[], &lhs_kernel, n, 0.0)?;
    let a = ctx.lp_pow(f, &[], &rhs_kernel, n, 0.0)?;
    let lhs = math::powf(l.value, 1.0 / n);
    let rhs = constant * math::powf(a.value, 1.0 / n);
    let err = pow_err(l.value, l.err, 1.0 / n) + constant * pow_err(a.value, a.err, 1.0 / n);
    Ok(make_report(
        &case,
        lhs,
        rhs,
        constant,
        err,
        l.converged && a.converged,
        0,
    ))
}

/// (x'/|x'|) · ∇_H f at x.
fn radial_directional(
    g: &StratifiedGroup,
    f: &ScalarField,
    x: &[f64],
) -> core::result::Result<f64, CalcError> {
    let grad = calculus::horizontal_gradient_arr(g, f, x)?;
    let n1 = g.n_first();
    let r = first_norm(n1, x);
    if r <= 0.0 {
        return Ok(0.0);
    }
    let mut s = 0.0;
    for k in 0..n1 {
        s += x[k] / r * grad[k];
    }
    Ok(s)
}

/// Abstract critical inequality for an admissible g-function:
/// ((N-1)/N)^N ∫ |f|^N/|x'|^N (-g')^{N-2} g'' dx
///   <= ∫ (-g')^{2(N-1)}/(g'')^{N-1} |(x'/|x'|)·∇_H f|^N dx,
/// all g-derivatives evaluated at log(Re/|x'|).
pub fn check_abstract_critical(
    ctx: &CheckContext,
    f: &ScalarField,
    gfun: &GFunction,
) -> Result<InequalityReport> {
    let n1 = ctx.n_first();
    if n1 < 2 {
        return Err(cfg("abstract critical case needs N >= 2"));
    }
    ctx.admissible(f, true)?;
    let r_sup = ctx.domain_radius();
    match f.support().outer_radius {
        Some(out) if out < r_sup => {}
        _ => return Err(cfg("support must stay strictly inside |x'| = R")),
    }
    // admissibility of g on a grid covering the arguments we will hit
    let t_min = 1.0 + math::ln(r_sup / f.support().outer_radius.unwrap());
    let t_max = 1.0 + math::ln(r_sup / f.support().inner_radius.max(1e-9));
    let mut grid = Vec::new();
    for i in 0..=64 {
        let s = i as f64 / 64.0;
        grid.push(t_min + (t_max - t_min) * s);
    }
    for &t in &grid {
        let j = gfun.jet(t).map_err(cfg)?;
        if !(j.d1 < 0.0 && j.d2 > 0.0) {
            return Err(cfg(format!(
                "g-function inadmissible at t = {t}: g' = {}, g'' = {}",
                j.d1, j.d2
            )));
        }
    }
    let case = InequalityCase::AbstractCritical { g: gfun.kind };
    let n = n1 as f64;
    let constant = math::powf((n - 1.0) / n, n);
    let g = ctx.group;
    let targ = move |x: &[f64]| -> f64 {
        let r = first_norm(n1, x);
        1.0 + math::ln(r_sup / r)
    };
    let lhs_int = |x: &[f64]| -> core::result::Result<f64, CalcError> {
        let v = f.eval(x);
        if v == 0.0 {
            return Ok(0.0);
        }
        let j = gfun.jet(targ(x)).map_err(|_| CalcError::NonFinite)?;
        let r = first_norm(n1, x);
        Ok(math::powf(math::abs(v) / r, n) * math::powf(-j.d1, n - 2.0) * j.d2)
    };
    let rhs_int = |x: &[f64]| -> core::result::Result<f64, CalcError> {
        if f.eval(x) == 0.0 {
            return Ok(0.0);
        }
        let d = radial_directional(g, f, x)?;
        let j = gfun.jet(targ(x)).map_err(|_| CalcError::NonFinite)?;
        let w = math::powf(-j.d1, 2.0 * (n - 1.0)) / math::powf(j.d2, n - 1.0);
        Ok(w * math::powf(math::abs(d), n))
    };
    let l = ctx.lp_pow(f, &[], &lhs_int, 1.0, 0.0)?;
    let a = ctx.lp_pow(f, &[], &rhs_int, 1.0, 0.0)?;
    let lhs = constant * l.value;
    let rhs = a.value;
    let err = constant * l.err + a.err;
    Ok(make_report(
        &case,
        lhs,
        rhs,
        constant,
        err,
        l.converged && a.converged,
        0,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PoincareForm {
    /// ‖f‖_N <= R ‖∇_H f‖_N (p must equal N).
    Critical,
    /// (|N-p|/(Rp)) ‖f‖_p <= ‖∇_H f‖_p (p != N, else trivial).
    Lp,
}

pub fn check_poincare(
    ctx: &CheckContext,
    f: &ScalarField,
    p: f64,
    form: PoincareForm,
) -> Result<InequalityReport> {
    ctx.admissible(f, matches!(form, PoincareForm::Lp))?;
    let n = ctx.n_first() as f64;
    let r_sup = ctx.domain_radius();
    let g = ctx.group;
    let grad = |x: &[f64]| calculus::horizontal_gradient_norm(g, f, x);
    let val = |x: &[f64]| -> core::result::Result<f64, CalcError> { Ok(f.eval(x)) };
    match form {
        PoincareForm::Critical => {
            if math::abs(p - n) > 1e-12 {
                return Err(cfg("critical Poincaré form requires p = N"));
            }
            let case = InequalityCase::PoincareCritical;
            let l = ctx.lp_pow(f, &[], &val, n, 0.0)?;
            let a = ctx.lp_pow(f, &[], &grad, n, 0.0)?;
            let lhs = math::powf(l.value, 1.0 / n);
            let rhs = r_sup * math::powf(a.value, 1.0 / n);
            let err =
                pow_err(l.value, l.err, 1.0 / n) + r_sup * pow_err(a.value, a.err, 1.0 / n);
            Ok(make_report(
                &case,
                lhs,
                rhs,
                r_sup,
                err,
                l.converged && a.converged,
                0,
            ))
        }
        PoincareForm::Lp => {
            if math::abs(p - n) < 1e-12 {
                return Err(cfg("the L^p Poincaré form is trivial for p = N; rejected"));
            }
            let case = InequalityCase::PoincareLp { p };
            let constant = math::abs(n - p) / (r_sup * p);
            let l = ctx.lp_pow(f, &[], &val, p, 0.0)?;
            let a = ctx.lp_pow(f, &[], &grad, p, 0.0)?;
            let lhs = constant * math::powf(l.value, 1.0 / p);
            let rhs = math::powf(a.value, 1.0 / p);
            let err =
                constant * pow_err(l.value, l.err, 1.0 / p) + pow_err(a.value, a.err, 1.0 / p);
            Ok(make_report(
                &case,
                lhs,
                rhs,
                constant,
                err,
                l.converged && a.converged,
                0,
            ))
        }
    }
}

/// Higher-order CKN with iterated gradients ∇_H^m f = ∇_H |∇_H^{m-1} f|:
/// (|N-γ|/p) ‖f/|x'|^{γ/p}‖_p^p
///   <= Ã_{α,m} Ã_{β,k} ‖|x'|^{m-α} ∇_H^{m+1} f‖_p ‖|x'|^{k-β/(p-1)} ∇_H^k f‖_p^{p-1}.
pub fn check_higher_order(
    ctx: &CheckContext,
    f: &ScalarField,
    alpha: f64,
    beta: f64,
    p: f64,
    k: usize,
    m: usize,
) -> Result<InequalityReport> {
    if !(p > 1.0) {
        return Err(cfg("higher-order CKN needs p > 1"));
    }
    if k > 1 || m > 1 {
        return Err(cfg("iterated gradients are implemented for k, m <= 1"));
    }
    ctx.admissible(f, true)?;
    let case = InequalityCase::HigherOrderCkn { alpha, beta, p, k, m };
    let n = ctx.n_first() as f64;
    let gamma = alpha + beta + 1.0;
    let lhs_const = math::abs(n - gamma) / p;
    let rhs_const = sharp_constant(&case, ctx.n_first())?;
    let g = ctx.group;
    let val = |x: &[f64]| -> core::result::Result<f64, CalcError> { Ok(f.eval(x)) };
    let kern_m = |x: &[f64]| calculus::iterated_gradient_norm(g, f, m + 1, x);
    let kern_k = |x: &[f64]| calculus::iterated_gradient_norm(g, f, k, x);
    let l = ctx.lp_pow(f, &[], &val, p, gamma)?;
    let a = ctx.lp_pow(f, &[], &kern_m, p, (alpha - m as f64) * p)?;
    let b = ctx.lp_pow(f, &[], &kern_k, p, (beta / (p - 1.0) - k as f64) * p)?;
    let lhs = lhs_const * l.value;
    let rhs = rhs_const * math::powf(a.value, 1.0 / p) * math::powf(b.value, (p - 1.0) / p);
    let err = lhs_const * l.err
        + rhs_const
            * (pow_err(a.value, a.err, 1.0 / p) * math::powf(b.value, (p - 1.0) / p)
                + math::powf(a.value, 1.0 / p) * pow_err(b.value, b.err, (p - 1.0) / p));
    Ok(make_report(
        &case,
        lhs,
        rhs,
        rhs_const,
        err,
        l.converged && a.converged && b.converged,
        l.singular + a.singular + b.singular,
    ))
}

/// Hardy-Rellich:
/// ((N+γ(p-1)-p)/p) ‖∇_H f/|x'|^{γ/p}‖_p^p
///   <= ‖|x'|^{-α} L_p f‖_p ‖∇_H f/|x'|^β‖_q, with 1/p + 1/q = 1,
/// for 1 < p < N and (p-N)/(p-1) <= γ = α+β+1 <= 0.
pub fn check_hardy_rellich(
    ctx: &CheckContext,
    f: &ScalarField,
    alpha: f64,
    beta: f64,
    p: f64,
) -> Result<InequalityReport> {
    let n = ctx.n_first() as f64;
    if !(1.0 < p && p < n) {
        return Err(cfg(format!(
            "Hardy-Rellich is stated for 1 < p < N (the introduction's 1 < p < ∞ is \
             superseded by the theorem); got p = {p}, N = {n}"
        )));
    }
    let gamma = alpha + beta + 1.0;
    if !((p - n) / (p - 1.0) - 1e-12 <= gamma && gamma <= 1e-12) {
        return Err(cfg(format!(
            "need (p-N)/(p-1) <= γ <= 0, got γ = {gamma}"
        )));
    }
    ctx.admissible(f, true)?;
    let case = InequalityCase::HardyRellich { alpha, beta, p };
    let q = p / (p - 1.0);
    let constant = (n + gamma * (p - 1.0) - p) / p;
    let g = ctx.group;
    let grad = |x: &[f64]| calculus::horizontal_gradient_norm(g, f, x);
    let plap = |x: &[f64]| calculus::p_sub_laplacian(g, f, p, x);
    let l = ctx.lp_pow(f, &[], &grad, p, gamma)?;
    let a = ctx.lp_pow(f, &[], &plap, p, alpha * p)?;
    let b = ctx.lp_pow(f, &[], &grad, q, beta * q)?;
    let lhs = constant * l.value;
    let rhs = math::powf(a.value, 1.0 / p) * math::powf(b.value, 1.0 / q);
    let err = constant * l.err
        + pow_err(a.value, a.err, 1.0 / p) * math::powf(b.value, 1.0 / q)
        + math::powf(a.value, 1.0 / p) * pow_err(b.value, b.err, 1.0 / q);
    Ok(make_report(
        &case,
        lhs,
        rhs,
        constant,
        err,
        l.converged && a.converged && b.converged,
        l.singular + a.singular + b.singular,
    ))
}

/// Weighted p-sub-Laplacian inequality, for pairs (F, η) satisfying
/// η F^{p-1} <= -L_{p,ρ} F:
/// ‖η^{1/p} f‖_p^p + C_p ‖ρ^{1/p} F ∇_H(f/F)‖_p^p <= ‖ρ^{1/p} ∇_H f‖_p^p.
pub fn check_weighted_plap(
    ctx: &CheckContext,
    f: &ScalarField,
    rho: &ScalarField,
    big_f: &ScalarField,
    eta: &ScalarField,
    p: f64,
    cp: f64,
) -> Result<InequalityReport> {
    if !(p >= 2.0) {
        return Err(cfg("weighted p-sub-Laplacian inequality needs p >= 2"));
    }
    ctx.admissible(f, false)?;
    verify_weighted_hypothesis(ctx, f, rho, big_f, eta, p)?;
    let case = InequalityCase::WeightedPLap { p };
    let g = ctx.group;
    let eta_term = |x: &[f64]| -> core::result::Result<f64, CalcError> {
        let v = f.eval(x);
        if v == 0.0 {
            return Ok(0.0);
        }
        Ok(eta.eval(x) * math::powf(math::abs(v), p))
    };
    let mid_term = |x: &[f64]| -> core::result::Result<f64, CalcError> {
        let w = scaled_quotient_gradient(g, f, big_f, x)?;
        Ok(rho.eval(x) * math::powf(w, p))
    };
    let rhs_term = |x: &[f64]| -> core::result::Result<f64, CalcError> {
        let gn = calculus::horizontal_gradient_norm(g, f, x)?;
        Ok(rho.eval(x) * math::powf(gn, p))
    };
    let companions = [rho, big_f, eta];
    let e = ctx.lp_pow(f, &companions, &eta_term, 1.0, 0.0)?;
    let mdl = ctx.lp_pow(f, &companions, &mid_term, 1.0, 0.0)?;
    let r = ctx.lp_pow(f, &companions, &rhs_term, 1.0, 0.0)?;
    let lhs = e.value + cp * mdl.value;
    let rhs = r.value;
    let err = e.err + cp * mdl.err + r.err;
    Ok(make_report(
        &case,
        lhs,
        rhs,
        cp,
        err,
        e.converged && mdl.converged && r.converged,
        e.singular + mdl.singular + r.singular,
    ))
}

/// |F ∇_H(f/F)| = |∇_H f - (f/F) ∇_H F| at x.
fn scaled_quotient_gradient(
    g: &StratifiedGroup,
    f: &ScalarField,
    big_f: &ScalarField,
    x: &[f64],
) -> core::result::Result<f64, CalcError> {
    let gf = calculus::horizontal_gradient_arr(g, f, x)?;
    let gbig = calculus::horizontal_gradient_arr(g, big_f, x)?;
    let fv = f.eval(x);
    let bv = big_f.eval(x);
    let ratio = fv / bv;
    let mut s = 0.0;
    for k in 0..g.n_first() {
        let w = gf[k] - ratio * gbig[k];
        s += w * w;
    }
    Ok(math::sqrt(s))
}

/// Pointwise verification of η F^{p-1} <= -L_{p,ρ}F on a deterministic
/// sample grid over the support of f; reports the first violating point.
fn verify_weighted_hypothesis(
    ctx: &CheckContext,
    f: &ScalarField,
    rho: &ScalarField,
    big_f: &ScalarField,
    eta: &ScalarField,
    p: f64,
) -> Result<()> {
    let g = ctx.group;
    for x in hypothesis_samples(ctx, f) {
        if f.eval(&x) == 0.0 {
            continue;
        }
        let bv = big_f.eval(&x);
        if !(bv > 0.0) {
            return Err(cfg(format!("F vanishes on the support of f, at {x:?}")));
        }
        let minus_l = match calculus::weighted_p_sub_laplacian(g, rho, big_f, p, &x) {
            Ok(v) => -v,
            Err(CalcError::SingularGradient { .. }) => continue,
            Err(e) => return Err(SuiteError::Calc(e)),
        };
        let lhs = eta.eval(&x) * math::powf(bv, p - 1.0);
        if lhs > minus_l + 1e-9 * (1.0 + math::abs(minus_l)) {
            return Err(cfg(format!(
                "hypothesis η F^{{p-1}} <= -L_{{p,ρ}}F fails at {x:?}: {lhs} > {minus_l}"
            )));
        }
    }
    Ok(())
}

fn hypothesis_samples(ctx: &CheckContext, f: &ScalarField) -> Vec<Vec<f64>> {
    let dim = ctx.group.total_dim();
    let n1 = ctx.n_first();
    let sup = f.support();
    let r_lo = sup.inner_radius.max(ctx.dom.excision).max(1e-6);
    let r_hi = sup.outer_radius.unwrap_or(ctx.domain_radius());
    let mut out = Vec::new();
    let bounds = sup.bounds.clone().unwrap_or_else(|| ctx.dom.bounds.clone());
    let zs: Vec<f64> = if dim > n1 {
        let (lo, hi) = bounds[n1];
        (0..5).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / 5.0).collect()
    } else {
        vec![0.0]
    };
    for i in 0..24 {
        let s = (i as f64 + 0.5) / 24.0;
        let r = r_lo * math::powf(r_hi / r_lo, s);
        for &z in &zs {
            let mut x = vec![0.0; dim];
            x[0] = r;
            if dim > n1 {
                x[n1] = z;
            }
            out.push(x);
            // an off-axis representative as well
            if n1 >= 2 {
                let mut y = vec![0.0; dim];
                y[0] = r * core::f64::consts::FRAC_1_SQRT_2;
                y[1] = -r * core::f64::consts::FRAC_1_SQRT_2;
                if dim > n1 {
                    y[n1] = z;
                }
                out.push(y);
            }
        }
    }
    out
}

/// Report of the p = 2 remainder identity
/// ‖ρ^{1/2} F ∇_H(f/F)‖² = ‖ρ^{1/2} ∇_H f‖² - ‖η^{1/2} f‖².
#[derive(Clone, Copy, Debug)]
pub struct RemainderReport {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub quad_err: f64,
}

pub fn remainder_identity_p2(
    ctx: &CheckContext,
    f: &ScalarField,
    rho: &ScalarField,
    big_f: &ScalarField,
    eta: &ScalarField,
) -> Result<RemainderReport> {
    ctx.admissible(f, false)?;
    let g = ctx.group;
    for x in hypothesis_samples(ctx, f) {
        if f.eval(&x) != 0.0 && big_f.eval(&x) == 0.0 {
            return Err(cfg(format!("F vanishes on the support of f, at {x:?}")));
        }
    }
    let companions = [rho, big_f, eta];
    let lhs_term = |x: &[f64]| -> core::result::Result<f64, CalcError> {
        let w = scaled_quotient_gradient(g, f, big_f, x)?;
        Ok(rho.eval(x) * w * w)
    };
    let grad_term = |x: &[f64]| -> core::result::Result<f64, CalcError> {
        let gn = calculus::horizontal_gradient_norm(g, f, x)?;
        Ok(rho.eval(x) * gn * gn)
    };
    let eta_term = |x: &[f64]| -> core::result::Result<f64, CalcError> {
        let v = f.eval(x);
        Ok(eta.eval(x) * v * v)
    };
    let l = ctx.lp_pow(f, &companions, &lhs_term, 1.0, 0.0)?;
    let a = ctx.lp_pow(f, &companions, &grad_term, 1.0, 0.0)?;
    // η may be signed here (η = -L_{2,ρ}F / F), so integrate without |·|
    let guard = KernelGuard::new();
    let signed = |x: &[f64]| -> f64 {
        if !f.in_support(x) {
            0.0
        } else {
            guard.wrap(eta_term(x))
        }
    };
    let b = ctx.integral(f, &companions, &signed)?;
    guard.finish()?;
    let lhs = l.value;
    let rhs = a.value - b.value;
    Ok(RemainderReport {
        lhs,
        rhs,
        gap: math::abs(lhs - rhs),
        quad_err: l.err + a.err + b.err_estimate,
    })
}

/// 1 < p < 2 variant with the Lindqvist middle term
/// C_p ‖ρ^{1/2} (|f/F ∇_H F| + F |∇_H(f/F)|)^{(p-2)/2} F ∇_H(f/F)‖²_{L²}.
pub fn check_lindqvist_p12(
    ctx: &CheckContext,
    f: &ScalarField,
    rho: &ScalarField,
    big_f: &ScalarField,
    eta: &ScalarField,
    p: f64,
    cp: f64,
) -> Result<InequalityReport> {
    if !(1.0 < p && p < 2.0) {
        return Err(cfg("this form is for 1 < p < 2"));
    }
    ctx.admissible(f, false)?;
    verify_weighted_hypothesis(ctx, f, rho, big_f, eta, p)?;
    let case = InequalityCase::LindqvistP12 { p };
    let g = ctx.group;
    let eta_term = |x: &[f64]| -> core::result::Result<f64, CalcError> {
        let v = f.eval(x);
        if v == 0.0 {
            return Ok(0.0);
        }
        Ok(eta.eval(x) * math::powf(math::abs(v), p))
    };
    let mid_term = |x: &[f64]| -> core::result::Result<f64, CalcError> {
        let u = scaled_quotient_gradient(g, f, big_f, x)?; // F |∇(f/F)|
        if u <= 1e-280 {
            return Ok(0.0);
        }
        let gbig = calculus::horizontal_gradient_arr(g, big_f, x)?;
        let fv = f.eval(x);
        let bv = big_f.eval(x);
        let gn: f64 = gbig[..g.n_first()].iter().map(|v| v * v).sum();
        let s = math::abs(fv / bv) * math::sqrt(gn);
        Ok(rho.eval(x) * math::powf(s + u, p - 2.0) * u * u)
    };
    let rhs_term = |x: &[f64]| -> core::result::Result<f64, CalcError> {
        let gn = calculus::horizontal_gradient_norm(g, f, x)?;
        Ok(rho.eval(x) * math::powf(gn, p))
    };
    let companions = [rho, big_f, eta];
    let e = ctx.lp_pow(f, &companions, &eta_term, 1.0, 0.0)?;
    let mdl = ctx.lp_pow(f, &companions, &mid_term, 1.0, 0.0)?;
    let r = ctx.lp_pow(f, &companions, &rhs_term, 1.0, 0.0)?;
    let lhs = e.value + cp * mdl.value;
    let rhs = r.value;
    let err = e.err + cp * mdl.err + r.err;
    Ok(make_report(
        &case,
        lhs,
        rhs,
        cp,
        err,
        e.converged && mdl.converged && r.converged,
        e.singular + mdl.singular + r.singular,
    ))
}

// ---------------------------------------------------------------------------
// pointwise constants
// ---------------------------------------------------------------------------

/// Numerically certified constant C_p of the vector inequality
/// |x|^p + C_p |y|^p + p|x|^{p-2} x·y <= |x+y|^p (p >= 2), or its
/// Lindqvist 1 < p < 2 form with the middle term C_p |y|²(|x|+|y|)^{p-2}.
/// Computed as a dense-grid infimum (reduced to the plane by rotation
/// invariance) shrunk by a 5% safety margin; C_2 = 1 exactly.
pub fn lindqvist_cp(p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(cfg("C_p is defined for p > 1"));
    }
    if math::abs(p - 2.0) < 1e-14 {
        return Ok(1.0);
    }
    let h = |rho: f64, phi: f64| -> f64 {
        let c = math::cos(phi);
        let xy = rho * c;
        let sum_sq = 1.0 + 2.0 * xy + rho * rho;
        let num = math::powf(sum_sq, p / 2.0) - 1.0 - p * xy;
        if p >= 2.0 {
            num / math::powf(rho, p)
        } else {
            num * math::powf(1.0 + rho, 2.0 - p) / (rho * rho)
        }
    };
    let mut best = f64::INFINITY;
    let mut best_at = (1.0, math::PI);
    let nr = 600;
    let nphi = 240;
    for i in 0..=nr {
        let rho = 1e-3 * math::powf(1e6, i as f64 / nr as f64);
        for j in 0..=nphi {
            let phi = math::PI * j as f64 / nphi as f64;
            let v = h(rho, phi);
            if v < best {
                best = v;
                best_at = (rho, phi);
            }
        }
    }
    // local refinement around the grid minimum
    let (mut rho0, mut phi0) = best_at;
    let mut dr = rho0 * 0.1;
    let mut dphi = math::PI / nphi as f64;
    for _ in 0..40 {
        for (r, f_) in [
            (rho0 - dr, phi0),
            (rho0 + dr, phi0),
            (rho0, (phi0 - dphi).max(0.0)),
            (rho0, (phi0 + dphi).min(math::PI)),
        ] {
            if r > 0.0 {
                let v = h(r, f_);
                if v < best {
                    best = v;
                    rho0 = r;
                    phi0 = f_;
                }
            }
        }
        dr *= 0.7;
        dphi *= 0.7;
    }
    if !(best > 0.0) {
        return Err(cfg(format!("C_p grid search found no positive margin at p = {p}")));
    }
    Ok(0.95 * best)
}

/// Both sides of the Davies modulus identity
/// |z|^p = (∫ |cos θ|^p dθ)^{-1} ∫ |Re(z) cos θ + Im(z) sin θ|^p dθ.
#[derive(Clone, Copy, Debug)]
pub struct DaviesReport {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_gap: f64,
}

pub fn davies_identity(re: f64, im: f64, p: f64) -> Result<DaviesReport> {
    if !(p >= 1.0) {
        return Err(cfg("Davies identity needs p >= 1"));
    }
    let dom = DomainSpec::new(vec![(-math::PI, math::PI)]);
    let spec = QuadratureSpec {
        base_cells_per_axis: 4,
        max_refinement_depth: 42,
        rel_tol: 1e-12,
        abs_tol: 1e-14,
        order: 10,
    };
    let denom_f = |t: &[f64]| math::powf(math::abs(math::cos(t[0])), p);
    let numer_f = |t: &[f64]| {
        math::powf(
            math::abs(re * math::cos(t[0]) + im * math::sin(t[0])),
            p,
        )
    };
    let denom = quad::integrate(&denom_f, &dom, &spec)?;
    let numer = quad::integrate(&numer_f, &dom, &spec)?;
    let lhs = math::powf(math::hypot(re, im), p);
    let rhs = numer.value / denom.value;
    let rel_gap = math::abs(lhs - rhs) / math::abs(lhs).max(TINY);
    Ok(DaviesReport { lhs, rhs, rel_gap })
}
