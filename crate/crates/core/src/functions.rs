//! The function families the inequality statements quantify over: annular
//! plateau bumps, seeded random admissible fields, the extremizer family
//! with its mollified cutoffs, the critical-case g-functions, and the
//! superharmonic (F, η) pairs used by the weighted p-sub-Laplacian theorems.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::StratifiedGroup;
use crate::jet::J1;
use crate::math;
use crate::scalar::{Factor, Profile, ProductTerm, ScalarField, Smoothness, Support};

#[derive(Clone, Debug, PartialEq)]
pub enum FnError {
    BadAnnulus { a: f64, b: f64 },
    BadParameter(String),
    DegenerateGamma,
    OutsideDomain(f64),
}

impl core::fmt::Display for FnError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FnError::BadAnnulus { a, b } => write!(f, "annulus needs 0 < a < b, got ({a}, {b})"),
            FnError::BadParameter(s) => write!(f, "{s}"),
            FnError::DegenerateGamma => {
                write!(f, "γ = N makes the extremizer constant; case excluded")
            }
            FnError::OutsideDomain(t) => write!(f, "g-functions are defined for t > 1, got {t}"),
        }
    }
}

impl core::error::Error for FnError {}

/// Small deterministic RNG used everywhere a seed appears in the API.
pub struct SeededRng(ChaCha8Rng);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn index(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    pub fn sign(&mut self) -> f64 {
        if self.0.next_u64() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// A smooth annular bump: plateau in |x'| on (a, b), times a plateau box in
/// each remaining coordinate.
#[derive(Clone, Debug)]
pub struct BumpSpec {
    pub dim: usize,
    pub n_first: usize,
    /// Inner and outer first-stratum radii (0 < a < b).
    pub annulus: (f64, f64),
    /// Boxes for the coordinates n_first..dim.
    pub transverse: Vec<(f64, f64)>,
    /// Fraction of each extent used for the two C^∞ ramps.
    pub transition: f64,
}

impl BumpSpec {
    pub fn new(dim: usize, n_first: usize, annulus: (f64, f64)) -> Self {
        BumpSpec {
            dim,
            n_first,
            annulus,
            transverse: vec![(-1.0, 1.0); dim - n_first],
            transition: 0.25,
        }
    }

    pub fn with_transverse(mut self, boxes: Vec<(f64, f64)>) -> Self {
        self.transverse = boxes;
        self
    }

    fn validate(&self) -> Result<(), FnError> {
        let (a, b) = self.annulus;
        if !(0.0 < a && a < b) {
            return Err(FnError::BadAnnulus { a, b });
        }
        if !(self.transition > 0.0 && self.transition < 0.5) {
            return Err(FnError::BadParameter(format!(
                "transition fraction {} not in (0, 1/2)",
                self.transition
            )));
        }
        if self.transverse.len() != self.dim - self.n_first
            || self.transverse.iter().any(|(lo, hi)| !(lo < hi))
        {
            return Err(FnError::BadParameter("bad transverse boxes".into()));
        }
        Ok(())
    }
}

fn plateau(lo: f64, hi: f64, transition: f64) -> Profile {
    let w = (hi - lo) * transition;
    Profile::Plateau {
        a: lo,
        b: lo + w,
        c: hi - w,
        d: hi,
    }
}

/// C^∞ plateau bump per the spec above; vanishes for |x'| <= a, outside the
/// transverse boxes, and equals 1 on the inner plateau.
pub fn bump(spec: &BumpSpec) -> Result<ScalarField, FnError> {
    spec.validate()?;
    let (a, b) = spec.annulus;
    let mut factors = vec![Factor::Radial {
        shift: 0.0,
        profile: plateau(a, b, spec.transition),
    }];
    let mut bounds = vec![(-b, b); spec.n_first];
    for (i, (lo, hi)) in spec.transverse.iter().enumerate() {
        factors.push(Factor::Axis {
            axis: spec.n_first + i,
            profile: plateau(*lo, *hi, spec.transition),
        });
        bounds.push((*lo, *hi));
    }
    Ok(ScalarField::new(
        spec.dim,
        spec.n_first,
        vec![ProductTerm { coef: 1.0, factors }],
        Support {
            inner_radius: a,
            outer_radius: Some(b),
            bounds: Some(bounds),
        },
        Smoothness::SmoothEverywhere,
    ))
}

/// How a seeded random field is assembled.
#[derive(Clone, Debug)]
pub struct RandomFieldSpec {
    pub dim: usize,
    pub n_first: usize,
    pub annulus: (f64, f64),
    pub transverse: Vec<(f64, f64)>,
    /// Number of radial sub-bumps summed (all sharing the transverse
    /// profile, so the field stays a function of (|x'|, transverse)).
    pub terms: usize,
    /// Restrict to one radial plateau so that the horizontal gradient only
    /// vanishes on sets where the field is flat; needed by checks that
    /// evaluate L_p with p < 2.
    pub single_plateau: bool,
}

impl RandomFieldSpec {
    pub fn for_group(g: &StratifiedGroup, annulus: (f64, f64), transverse_half: f64) -> Self {
        RandomFieldSpec {
            dim: g.total_dim(),
            n_first: g.n_first(),
            annulus,
            transverse: vec![
                (-transverse_half, transverse_half);
                g.total_dim() - g.n_first()
            ],
            terms: 3,
            single_plateau: false,
        }
    }

    pub fn single_plateau(mut self) -> Self {
        self.single_plateau = true;
        self
    }
}

/// Deterministic-in-seed admissible field: a sum of radial plateau bumps
/// over randomized sub-annuli of (a, b), sharing one randomized transverse
/// plateau per remaining coordinate.
pub fn random_field(seed: u64, spec: &RandomFieldSpec) -> ScalarField {
    let (a, b) = spec.annulus;
    assert!(0.0 < a && a < b, "random_field: bad annulus");
    let mut rng = SeededRng::new(seed);
    // shared transverse profiles
    let mut shared = Vec::new();
    let mut bounds = vec![(-b, b); spec.n_first];
    for (i, (lo, hi)) in spec.transverse.iter().enumerate() {
        let width = hi - lo;
        let s_lo = lo + 0.05 * width * rng.unit();
        let s_hi = hi - 0.05 * width * rng.unit();
        shared.push(Factor::Axis {
            axis: spec.n_first + i,
            profile: plateau(s_lo, s_hi, rng.uniform(0.15, 0.35)),
        });
        bounds.push((s_lo, s_hi));
    }
    let n_terms = if spec.single_plateau { 1 } else { spec.terms.max(1) };
    let mut terms = Vec::new();
    for t in 0..n_terms {
        let (sa, sb) = if spec.single_plateau || n_terms == 1 {
            (a, b)
        } else {
            // randomized sub-annulus, wide enough to keep a plateau
            let lo = rng.uniform(a, a + 0.4 * (b - a));
            let hi = rng.uniform(lo + 0.4 * (b - a), b);
            (lo, hi)
        };
        let amp = rng.uniform(0.4, 1.6) * if t == 0 { 1.0 } else { rng.sign() };
        let mut factors = vec![Factor::Radial {
            shift: 0.0,
            profile: plateau(sa, sb, rng.uniform(0.15, 0.35)),
        }];
        factors.extend(shared.iter().cloned());
        terms.push(ProductTerm { coef: amp, factors });
    }
    ScalarField::new(
        spec.dim,
        spec.n_first,
        terms,
        Support {
            inner_radius: a,
            outer_radius: Some(b),
            bounds: Some(bounds),
        },
        Smoothness::SmoothEverywhere,
    )
}

/// Smooth (not compactly supported) separable field for quadrature tests:
/// a seeded sum of anisotropic Gaussian products.
pub fn random_smooth_field(seed: u64, dim: usize, box_: &[(f64, f64)]) -> ScalarField {
    let mut rng = SeededRng::new(seed);
    let mut terms = Vec::new();
    for _ in 0..3 {
        let mut factors = Vec::new();
        for (d, (lo, hi)) in box_.iter().enumerate() {
            let center = rng.uniform(*lo, *hi);
            let sigma = rng.uniform(0.25, 0.9) * (hi - lo);
            factors.push(Factor::Axis {
                axis: d,
                profile: Profile::Gauss { center, sigma },
            });
        }
        let _ = dim;
        terms.push(ProductTerm {
            coef: rng.uniform(-2.0, 2.0),
            factors,
        });
    }
    ScalarField::new(
        dim,
        dim,
        terms,
        Support::unbounded(),
        Smoothness::SmoothEverywhere,
    )
}

/// Exponent λ = α - β/(p-1) + 1 separating the two extremizer branches.
pub fn extremizer_lambda(alpha: f64, beta: f64, p: f64) -> f64 {
    alpha - beta / (p - 1.0) + 1.0
}

/// The extremizer family saturating the Hölder step:
/// g = exp(-(C/λ)|x'|^λ) for λ != 0 and g = |x'|^{-C} for λ = 0, with
/// C = |N-γ|/p and γ = α+β+1.
pub fn extremizer(
    alpha: f64,
    beta: f64,
    p: f64,
    n_first: usize,
    dim: usize,
) -> Result<ScalarField, FnError> {
    if !(p > 1.0) {
        return Err(FnError::BadParameter(format!("p must be > 1, got {p}")));
    }
    let gamma = alpha + beta + 1.0;
    let n = n_first as f64;
    if math::abs(gamma - n) < 1e-14 {
        return Err(FnError::DegenerateGamma);
    }
    let c = math::abs(n - gamma) / p;
    let lambda = extremizer_lambda(alpha, beta, p);
    let profile = if math::abs(lambda) < 1e-14 {
        Profile::Power { a: -c }
    } else {
        Profile::ExpPower {
            c: c / lambda,
            lambda,
        }
    };
    Ok(ScalarField::radial(dim, n_first, 0.0, profile))
}

/// Cutoff schedule for sharpness probes: inner radii ε_j decreasing, outer
/// radii R_j increasing, C^∞ transitions of a configurable width in octaves,
/// and a transverse box growing like R_j^2 (the dilation weight of the
/// second stratum).
#[derive(Clone, Debug)]
pub struct CutoffFamily {
    pub eps0: f64,
    pub eps_ratio: f64,
    pub r0: f64,
    pub r_ratio: f64,
    /// Width of each radial transition, in octaves; None means a quarter of
    /// the total log-span, which keeps the ramp cost proportionally small as
    /// the annulus widens.
    pub transition_octaves: Option<f64>,
    /// Transverse half-width is transverse_scale * R_j^2.
    pub transverse_scale: f64,
}

impl Default for CutoffFamily {
    fn default() -> Self {
        CutoffFamily {
            eps0: 0.5,
            eps_ratio: 0.5,
            r0: 2.0,
            r_ratio: 2.0,
            transition_octaves: Some(1.0),
            transverse_scale: 1.0,
        }
    }
}

impl CutoffFamily {
    /// Aggressive schedule used when a probe must get close to the sharp
    /// constant within few steps.
    pub fn fast() -> Self {
        CutoffFamily {
            eps0: 0.25,
            eps_ratio: 0.25,
            r0: 4.0,
            r_ratio: 4.0,
            transition_octaves: None,
            transverse_scale: 1.0,
        }
    }

    pub fn eps(&self, j: usize) -> f64 {
        self.eps0 * math::powf(self.eps_ratio, (j - 1) as f64)
    }

    pub fn outer(&self, j: usize) -> f64 {
        self.r0 * math::powf(self.r_ratio, (j - 1) as f64)
    }

    pub fn transverse_half(&self, j: usize) -> f64 {
        let r = self.outer(j);
        self.transverse_scale * r * r
    }

    /// (inner_ramp_end, outer_ramp_start) for step j.
    fn ramp_radii(&self, j: usize) -> Result<(f64, f64), FnError> {
        let eps = self.eps(j);
        let r = self.outer(j);
        let span = math::ln(r / eps) / core::f64::consts::LN_2;
        let w = self.transition_octaves.unwrap_or(span / 4.0);
        if !(w > 0.0) || 2.0 * w >= span {
            return Err(FnError::BadParameter(format!(
                "transition width {w} octaves does not fit in span {span}"
            )));
        }
        let two_w = math::powf(2.0, w);
        Ok((eps * two_w, r / two_w))
    }
}

/// The extremizer multiplied by a C^∞ cutoff supported in
/// ε_j <= |x'| <= R_j and in the transverse box; compactly supported and
/// admissible, equal to the extremizer on the inner plateau.
pub fn cutoff_extremizer(
    alpha: f64,
    beta: f64,
    p: f64,
    n_first: usize,
    dim: usize,
    transverse_axes: &[usize],
    fam: &CutoffFamily,
    j: usize,
) -> Result<ScalarField, FnError> {
    if j == 0 {
        return Err(FnError::BadParameter("cutoff index j starts at 1".into()));
    }
    let base = extremizer(alpha, beta, p, n_first, dim)?;
    let eps = fam.eps(j);
    let r = fam.outer(j);
    let (b, c) = fam.ramp_radii(j)?;
    let cut = Profile::Plateau { a: eps, b, c, d: r };
    let mut terms = base.terms().to_vec();
    debug_assert_eq!(terms.len(), 1);
    terms[0].factors.push(Factor::Radial {
        shift: 0.0,
        profile: cut,
    });
    let mut bounds = vec![(-r, r); dim];
    let s = fam.transverse_half(j);
    for &axis in transverse_axes {
        terms[0].factors.push(Factor::Axis {
            axis,
            profile: plateau(-s, s, 0.25),
        });
        bounds[axis] = (-s, s);
    }
    Ok(ScalarField::new(
        dim,
        n_first,
        terms,
        Support {
            inner_radius: eps,
            outer_radius: Some(r),
            bounds: Some(bounds),
        },
        Smoothness::SmoothEverywhere,
    ))
}

/// Central-coordinate axes of a group (everything past the first stratum).
pub fn central_axes(g: &StratifiedGroup) -> Vec<usize> {
    (g.n_first()..g.total_dim()).collect()
}

/// Which built-in g-function to use in the abstract critical theorem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GKind {
    /// g(t) = -log(t-1); the choice that reproduces the critical Hardy
    /// inequality, with (-g')^{2(N-1)}/(g'')^{N-1} identically 1.
    NegLog,
    /// g(t) = exp(Nt/(1-N)); yields the L^N Poincaré inequality.
    ExpCritical { n: usize },
}

/// A C^2 function g on (1, ∞) with closed-form derivatives.
#[derive(Clone, Copy, Debug)]
pub struct GFunction {
    pub kind: GKind,
}

pub fn builtin_g(kind: GKind) -> GFunction {
    GFunction { kind }
}

impl GFunction {
    /// (g, g', g'') at t; domain error for t <= 1.
    pub fn jet(&self, t: f64) -> Result<J1, FnError> {
        if !(t > 1.0) {
            return Err(FnError::OutsideDomain(t));
        }
        Ok(match self.kind {
            GKind::NegLog => {
                let u = t - 1.0;
                J1 {
                    v: -math::ln(u),
                    d1: -1.0 / u,
                    d2: 1.0 / (u * u),
                }
            }
            GKind::ExpCritical { n } => {
                let k = n as f64 / (1.0 - n as f64);
                let e = math::exp(k * t);
                J1 {
                    v: e,
                    d1: k * e,
                    d2: k * k * e,
                }
            }
        })
    }

    /// The lem2 quantity (-g')^{2(N-1)} / (g'')^{N-1} at t.
    pub fn admissibility_ratio(&self, n: usize, t: f64) -> Result<f64, FnError> {
        let j = self.jet(t)?;
        let m = (n - 1) as i32;
        Ok(math::powi(-j.d1, 2 * m) / math::powi(j.d2, m))
    }

    /// Checks g' < 0 and g'' > 0 on the grid and returns the largest
    /// admissibility ratio encountered.
    pub fn check_admissible(&self, n: usize, grid: &[f64]) -> Result<f64, FnError> {
        let mut worst = 0.0;
        for &t in grid {
            let j = self.jet(t)?;
            if !(j.d1 < 0.0 && j.d2 > 0.0) {
                return Err(FnError::BadParameter(format!(
                    "g fails monotonicity/convexity at t = {t}: g' = {}, g'' = {}",
                    j.d1, j.d2
                )));
            }
            let r = self.admissibility_ratio(n, t)?;
            if r > worst {
                worst = r;
            }
        }
        Ok(worst)
    }
}

/// Coefficient C_0 = (θ-p-2)/p of the superharmonic shifted power.
pub fn thetacor_exponent(theta: f64, p: f64) -> f64 {
    (theta - p - 2.0) / p
}

/// Shifted-norm pair (F_ε, η) from the weighted p-sub-Laplacian
/// proposition: F_ε = |x'_ε|^{-(θ-p-2)/p} and η = |(θ-p-2)/p|^p |x'_ε|^{-p},
/// where |x'_ε|^2 = Σ (x'_i + ε)^2. Requires 1 < p < θ-2 and θ ≤ 2+N.
pub fn thetacor_pair(
    g: &StratifiedGroup,
    theta: f64,
    p: f64,
    eps: f64,
) -> Result<(ScalarField, ScalarField), FnError> {
    let n = g.n_first() as f64;
    if !(1.0 < p && p < theta - 2.0) || !(theta <= 2.0 + n) {
        return Err(FnError::BadParameter(format!(
            "need 1 < p < θ-2 and θ <= 2+N; got p = {p}, θ = {theta}, N = {n}"
        )));
    }
    if !(eps > 0.0) {
        return Err(FnError::BadParameter("ε must be positive".into()));
    }
    let c0 = thetacor_exponent(theta, p);
    let f = ScalarField::radial(g.total_dim(), g.n_first(), eps, Profile::Power { a: -c0 });
    let eta = ScalarField::radial(g.total_dim(), g.n_first(), eps, Profile::Power { a: -p })
        .scaled(math::powf(math::abs(c0), p));
    Ok((f, eta))
}

/// Closed form of -L_{p,1} F_ε for the shifted power
/// F_ε = |x'_ε|^{-C_0}: the bracket
/// (|C_0|^p + C_0 |C_0|^{p-2}(2+N-θ)) |x'_ε|^{-C_0(p-1)-p}.
pub fn thetacor_minus_lp(g: &StratifiedGroup, theta: f64, p: f64, eps: f64, x: &[f64]) -> f64 {
    let n = g.n_first() as f64;
    let c0 = thetacor_exponent(theta, p);
    let mut s = 0.0;
    for xi in &x[..g.n_first()] {
        let y = xi + eps;
        s += y * y;
    }
    let r = math::sqrt(s);
    let bracket = math::powf(math::abs(c0), p)
        + c0 * math::powf(math::abs(c0), p - 2.0) * (2.0 + n - theta);
    bracket * math::powf(r, -(c0 * (p - 1.0) + p))
}

/// Unshifted power pair (F, η) = (|x'|^c, κ |x'|^{-p}) with
/// κ = C_0 |C_0|^{p-2} (N - C_0(p-1) - p), C_0 = -c, valid as a
/// weighted-theorem hypothesis pair whenever κ >= 0.
pub fn superharmonic_power_pair(
    g: &StratifiedGroup,
    c: f64,
    p: f64,
) -> Result<(ScalarField, ScalarField), FnError> {
    let n = g.n_first() as f64;
    let c0 = -c;
    let kappa = c0 * math::powf(math::abs(c0), p - 2.0) * (n - c0 * (p - 1.0) - p);
    if !(kappa >= 0.0) {
        return Err(FnError::BadParameter(format!(
            "power c = {c} is not p-superharmonic on N = {n}: κ = {kappa}"
        )));
    }
    let f = ScalarField::radial(g.total_dim(), g.n_first(), 0.0, Profile::Power { a: c });
    let eta = ScalarField::radial(g.total_dim(), g.n_first(), 0.0, Profile::Power { a: -p })
        .scaled(kappa);
    Ok((f, eta))
}

/// Pair (F, η) = (log(top/|x'|), 0): F is harmonic off {x' = 0} when N = 2,
/// so the p = 2 hypothesis holds with η = 0; F > 0 on |x'| < top.
pub fn harmonic_log_pair(g: &StratifiedGroup, top: f64) -> Result<(ScalarField, ScalarField), FnError> {
    if g.n_first() != 2 {
        return Err(FnError::BadParameter(
            "log pair is harmonic only on first-stratum dimension 2".into(),
        ));
    }
    let f = ScalarField::radial(g.total_dim(), 2, 0.0, Profile::LogRatio { top });
    let eta = ScalarField::constant(g.total_dim(), 0.0);
    Ok((f, eta))
}

/// (ρ, F, η) configuration with η = (-L_{2,ρ}F)/F available in closed form:
/// F = |x'_ε|^c and either ρ = 1 or ρ = 1 + |x'_ε|^2.
pub fn remainder_pair_power(
    g: &StratifiedGroup,
    c: f64,
    eps: f64,
    quadratic_weight: bool,
) -> (ScalarField, ScalarField, ScalarField) {
    let dim = g.total_dim();
    let n1 = g.n_first();
    let n = n1 as f64;
    let f = ScalarField::radial(dim, n1, eps, Profile::Power { a: c });
    // -ΔF/F = -c(N+c-2) r^{-2}; with ρ = 1+r^2 an extra -c(N+c) constant.
    let base = ScalarField::radial(dim, n1, eps, Profile::Power { a: -2.0 })
        .scaled(-c * (n + c - 2.0));
    if quadratic_weight {
        let rho = ScalarField::radial(dim, n1, eps, Profile::Power { a: 2.0 })
            .sum(ScalarField::constant(dim, 1.0));
        let eta = base.sum(ScalarField::constant(dim, -c * (n + c)));
        (rho, f, eta)
    } else {
        (ScalarField::constant(dim, 1.0), f, base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus;
    use crate::fd;

    #[test]
    fn bump_examples() {
        let spec = BumpSpec::new(3, 2, (0.2, 1.0));
        let f = bump(&spec).unwrap();
        assert_eq!(f.eval(&[0.1, 0.1, 0.0]), 0.0); // |x'| < 0.2
        assert_eq!(f.eval(&[0.05, 0.05, 0.0]), 0.0);
        // plateau region value 1
        let mid = f.eval(&[0.5, 0.0, 0.0]);
        assert_eq!(mid, 1.0);
        // vanishes outside the transverse box, exactly
        assert_eq!(f.eval(&[0.5, 0.0, 2.0]), 0.0);
        assert!(bump(&BumpSpec::new(3, 2, (1.0, 0.5))).is_err());
    }

    #[test]
    fn bump_jets_match_finite_differences() {
        let f = bump(&BumpSpec::new(3, 2, (0.2, 1.0))).unwrap();
        let pts = [[0.27, 0.1, 0.3], [0.6, -0.3, -0.6], [0.0, 0.9, 0.2]];
        for x in &pts {
            let j = f.jet2(x);
            let ev = |y: &[f64]| f.eval(y);
            let g = fd::gradient(&ev, x, 1e-6);
            for i in 0..3 {
                assert!((j.grad()[i] - g[i]).abs() <= 1e-6 * (1.0 + g[i].abs()));
            }
        }
    }

    #[test]
    fn random_field_determinism() {
        let h1 = StratifiedGroup::heisenberg(1);
        let spec = RandomFieldSpec::for_group(&h1, (0.2, 1.5), 1.5);
        let f1 = random_field(42, &spec);
        let f2 = random_field(42, &spec);
        let f3 = random_field(43, &spec);
        let mut rng = SeededRng::new(5);
        let mut differs = false;
        for _ in 0..100 {
            let x: Vec<f64> = (0..3).map(|_| rng.uniform(-1.5, 1.5)).collect();
            assert_eq!(f1.eval(&x), f2.eval(&x));
            if (f1.eval(&x) - f3.eval(&x)).abs() > 1e-12 {
                differs = true;
            }
            // admissibility: vanishes at small first-stratum radius
            let y = [0.05, 0.05, x[2]];
            assert_eq!(f1.eval(&y), 0.0);
        }
        assert!(differs, "different seeds should give different fields");
    }

    #[test]
    fn extremizer_branches() {
        // α=0, β=p-1=1, p=2, N=4: γ=2, C=1, λ=0 → pure power |x'|^{-1}
        let g = extremizer(0.0, 1.0, 2.0, 4, 5).unwrap();
        let x = [2.0, 0.0, 0.0, 0.0, 0.3];
        assert!((g.eval(&x) - 0.5).abs() < 1e-14);
        // α=1, β=0, p=2, N=4: λ=2, C=1 → exp(-r²/2)
        let g = extremizer(1.0, 0.0, 2.0, 4, 5).unwrap();
        assert!((g.eval(&x) - math::exp(-2.0)).abs() < 1e-14);
        // γ=N rejected
        assert!(matches!(
            extremizer(1.0, 2.0, 2.0, 4, 5),
            Err(FnError::DegenerateGamma)
        ));
    }

    #[test]
    fn cutoff_extremizer_plateau_and_vanishing() {
        let fam = CutoffFamily::default();
        let h2 = StratifiedGroup::heisenberg(2);
        let j = 3; // ε = 1/8, R = 8, one-octave ramps
        let f = cutoff_extremizer(1.0, 0.0, 2.0, 4, 5, &central_axes(&h2), &fam, j).unwrap();
        let full = extremizer(1.0, 0.0, 2.0, 4, 5).unwrap();
        // equals the extremizer on 2ε <= |x'| <= R/2 (transverse plateau too)
        for r in [0.26, 0.5, 1.0, 3.9] {
            let x = [r, 0.0, 0.0, 0.0, 0.0];
            assert_eq!(f.eval(&x), full.eval(&x), "at r = {r}");
        }
        // vanishes for |x'| <= ε, exactly
        assert_eq!(f.eval(&[0.1, 0.0, 0.0, 0.0, 0.0]), 0.0);
        assert_eq!(f.eval(&[9.0, 0.0, 0.0, 0.0, 0.0]), 0.0);
        // bounded support recorded
        assert!(f.support().is_bounded());
    }

    #[test]
    fn neglog_admissibility_ratio_is_one() {
        let g = builtin_g(GKind::NegLog);
        for n in [2usize, 3, 4] {
            let mut t = 1.0 + 1e-6;
            while t < 1e6 {
                let r = g.admissibility_ratio(n, t).unwrap();
                assert!((r - 1.0).abs() < 1e-12, "N={n}, t={t}: {r}");
                t *= 7.3;
            }
        }
        let j = g.jet(2.0).unwrap();
        assert_eq!((j.d1, j.d2), (-1.0, 1.0));
        assert!(g.jet(1.0).is_err());
        assert!(g.jet(0.5).is_err());
    }

    #[test]
    fn exp_critical_derivatives() {
        let g = builtin_g(GKind::ExpCritical { n: 2 });
        let j = g.jet(1.5).unwrap();
        // g'(t) = -2 e^{-2t} < 0
        assert!((j.d1 + 2.0 * math::exp(-3.0)).abs() < 1e-15);
        assert!(j.d2 > 0.0);
        for n in [2usize, 3, 4] {
            let g = builtin_g(GKind::ExpCritical { n });
            let grid: Vec<f64> = (0..40).map(|i| 1.0 + 0.001 + 0.5 * i as f64).collect();
            let worst = g.check_admissible(n, &grid).unwrap();
            assert!(worst <= math::exp(-(n as f64)) + 1e-12);
        }
    }

    #[test]
    fn thetacor_pair_satisfies_hypothesis_pointwise() {
        let h2 = StratifiedGroup::heisenberg(2);
        let (theta, p, eps) = (6.0, 2.0, 0.3);
        let (f, eta) = thetacor_pair(&h2, theta, p, eps).unwrap();
        let mut rng = SeededRng::new(77);
        for _ in 0..100 {
            let x: Vec<f64> = (0..5).map(|_| rng.uniform(-1.2, 1.2)).collect();
            let minus_lp = -calculus::p_sub_laplacian(&h2, &f, p, &x).unwrap();
            let lhs = eta.eval(&x) * math::powf(f.eval(&x), p - 1.0);
            assert!(
                lhs <= minus_lp + 1e-10 * (1.0 + minus_lp.abs()),
                "hypothesis fails: {lhs} vs {minus_lp}"
            );
            // and the closed form matches the jet evaluation
            let closed = thetacor_minus_lp(&h2, theta, p, eps, &x);
            assert!(
                (minus_lp - closed).abs() <= 1e-9 * (1.0 + closed.abs()),
                "{minus_lp} vs {closed}"
            );
        }
        // parameter guards
        assert!(thetacor_pair(&h2, 6.5, 2.0, 0.3).is_err()); // θ > 2+N
        assert!(thetacor_pair(&h2, 6.0, 4.5, 0.3).is_err()); // p >= θ-2
        assert!(thetacor_pair(&h2, 6.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn eta_limit_as_eps_vanishes() {
        let h2 = StratifiedGroup::heisenberg(2);
        let x = [0.8, -0.2, 0.4, 0.6, 0.1];
        let (theta, p) = (6.0, 2.0);
        let c0 = thetacor_exponent(theta, p);
        let r = h2.first_stratum_norm(&x);
        let limit = math::powf(math::abs(c0), p) * math::powf(r, -p);
        let mut eps = 0.1;
        let mut prev_err = f64::INFINITY;
        while eps > 1e-5 {
            let (_, eta) = thetacor_pair(&h2, theta, p, eps).unwrap();
            let err = (eta.eval(&x) - limit).abs();
            assert!(err < prev_err);
            prev_err = err;
            eps *= 0.1;
        }
        assert!(prev_err < 1e-3 * limit);
    }

    #[test]
    fn superharmonic_power_pair_guards() {
        let h1 = StratifiedGroup::heisenberg(1);
        // p = 3, c = 1/4 works on N = 2 with κ = 1/32
        let (f, eta) = superharmonic_power_pair(&h1, 0.25, 3.0).unwrap();
        let x = [0.7, -0.5, 0.2];
        let minus_lp = -calculus::p_sub_laplacian(&h1, &f, 3.0, &x).unwrap();
        let lhs = eta.eval(&x) * math::powf(f.eval(&x), 2.0);
        assert!((lhs - minus_lp).abs() <= 1e-10 * (1.0 + minus_lp.abs()));
        // p = 2 has no positive superharmonic power on N = 2
        assert!(superharmonic_power_pair(&h1, 0.25, 2.0).is_err());
    }

    #[test]
    fn remainder_pair_matches_jet_eta() {
        let a3 = StratifiedGroup::abelian(3);
        let mut rng = SeededRng::new(13);
        for quadratic in [false, true] {
            let (rho, f, eta) = remainder_pair_power(&a3, -0.5, 0.2, quadratic);
            for _ in 0..50 {
                let x: Vec<f64> = (0..3).map(|_| rng.uniform(-1.0, 1.0)).collect();
                let lf = calculus::weighted_p_sub_laplacian(&a3, &rho, &f, 2.0, &x).unwrap();
                let expect = -lf / f.eval(&x);
                let got = eta.eval(&x);
                assert!(
                    (got - expect).abs() <= 1e-9 * (1.0 + expect.abs()),
                    "quadratic={quadratic}: {got} vs {expect}"
                );
            }
        }
    }
}
