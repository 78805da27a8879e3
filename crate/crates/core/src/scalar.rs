//! Scalar fields on a group: sums of product terms, each factor being either
//! a radial profile in the (possibly shifted) first-stratum norm or a 1-D
//! profile in a single coordinate. Every profile carries exact closed-form
//! jets, so fields expose second-order Euclidean jets with no differencing
//! noise.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::jet::{Jet2, J1};
use crate::math;

/// A 1-D C^∞ building block with exact (value, d1, d2) jets.
#[derive(Clone, Debug)]
pub enum Profile {
    Const(f64),
    /// The identity t.
    Linear,
    /// t^a for t > 0.
    Power { a: f64 },
    /// exp(-c t^lambda) for t > 0 (smooth at 0 when lambda is a positive
    /// even integer; callers keep t away from 0 otherwise).
    ExpPower { c: f64, lambda: f64 },
    /// ln(top / t) for t > 0.
    LogRatio { top: f64 },
    /// exp(-((t - center)/sigma)^2).
    Gauss { center: f64, sigma: f64 },
    /// Smooth step: 0 for t <= a, 1 for t >= b, strictly increasing between,
    /// built from exp(-1/t) so that all derivatives vanish at the junctions.
    StepUp { a: f64, b: f64 },
    /// Smooth plateau: 0 outside [a, d], 1 on [b, c].
    Plateau { a: f64, b: f64, c: f64, d: f64 },
    Sum(Vec<(f64, Profile)>),
    Prod(Box<Profile>, Box<Profile>),
}

fn sigma(u: f64) -> J1 {
    if u <= 0.0 {
        return J1::ZERO;
    }
    let v = math::exp(-1.0 / u);
    J1 {
        v,
        d1: v / (u * u),
        d2: v * (1.0 / (u * u * u * u) - 2.0 / (u * u * u)),
    }
}

/// Smooth step on [0, 1] as a function of the plain variable u.
fn smoothstep01(u: f64) -> J1 {
    if u <= 0.0 {
        return J1::ZERO;
    }
    if u >= 1.0 {
        return J1::constant(1.0);
    }
    let s = sigma(u);
    // sigma(1-u) with inner derivative -1
    let sm = sigma(1.0 - u);
    let sm = J1 {
        v: sm.v,
        d1: -sm.d1,
        d2: sm.d2,
    };
    s.div(s.add(sm))
}

impl Profile {
    /// Jet of the profile at `t`.
    pub fn jet(&self, t: f64) -> J1 {
        match self {
            Profile::Const(c) => J1::constant(*c),
            Profile::Linear => J1::var(t),
            Profile::Power { a } => {
                let p = math::powf(t, *a);
                J1 {
                    v: p,
                    d1: a * p / t,
                    d2: a * (a - 1.0) * p / (t * t),
                }
            }
            Profile::ExpPower { c, lambda } => {
                let u = -c * math::powf(t, *lambda);
                let du = -c * lambda * math::powf(t, lambda - 1.0);
                let d2u = -c * lambda * (lambda - 1.0) * math::powf(t, lambda - 2.0);
                let e = math::exp(u);
                J1 {
                    v: e,
                    d1: e * du,
                    d2: e * (du * du + d2u),
                }
            }
            Profile::LogRatio { top } => J1 {
                v: math::ln(top / t),
                d1: -1.0 / t,
                d2: 1.0 / (t * t),
            },
            Profile::Gauss { center, sigma } => {
                let u = (t - center) / sigma;
                let e = math::exp(-u * u);
                J1 {
                    v: e,
                    d1: -2.0 * u * e / sigma,
                    d2: (4.0 * u * u - 2.0) * e / (sigma * sigma),
                }
            }
            Profile::StepUp { a, b } => {
                let w = b - a;
                let inner = (t - a) / w;
                let s = smoothstep01(inner);
                J1 {
                    v: s.v,
                    d1: s.d1 / w,
                    d2: s.d2 / (w * w),
                }
            }
            Profile::Plateau { a, b, c, d } => {
                let up = Profile::StepUp { a: *a, b: *b }.jet(t);
                let down = Profile::StepUp { a: *c, b: *d }.jet(t);
                up.mul(J1::constant(1.0).sub(down))
            }
            Profile::Sum(parts) => {
                let mut acc = J1::ZERO;
                for (coef, p) in parts {
                    acc = acc.add(p.jet(t).scale(*coef));
                }
                acc
            }
            Profile::Prod(p, q) => p.jet(t).mul(q.jet(t)),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        // Cheap paths for the common plateau cases; otherwise reuse the jet.
        match self {
            Profile::Const(c) => *c,
            Profile::Linear => t,
            Profile::Power { a } => math::powf(t, *a),
            Profile::StepUp { a, .. } if t <= *a => 0.0,
            Profile::StepUp { b, .. } if t >= *b => 1.0,
            Profile::Plateau { a, d, .. } if t <= *a || t >= *d => 0.0,
            Profile::Plateau { b, c, .. } if t >= *b && t <= *c => 1.0,
            _ => self.jet(t).v,
        }
    }
}

/// One multiplicative factor of a product term.
#[derive(Clone, Debug)]
pub enum Factor {
    /// profile(|x' + shift·(1,...,1)|), a function of the first `n_first`
    /// coordinates only.
    Radial { shift: f64, profile: Profile },
    /// profile(x[axis]).
    Axis { axis: usize, profile: Profile },
}

#[derive(Clone, Debug)]
pub struct ProductTerm {
    pub coef: f64,
    pub factors: Vec<Factor>,
}

/// Where a field is guaranteed to vanish / live.
#[derive(Clone, Debug)]
pub struct Support {
    /// eval = 0 whenever |x'| <= inner_radius.
    pub inner_radius: f64,
    /// eval = 0 whenever |x'| >= outer_radius, if finite.
    pub outer_radius: Option<f64>,
    /// Per-coordinate bounding box outside of which eval = 0, if bounded.
    pub bounds: Option<Vec<(f64, f64)>>,
}

impl Support {
    pub fn unbounded() -> Self {
        Support {
            inner_radius: 0.0,
            outer_radius: None,
            bounds: None,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.bounds.is_some()
    }

    /// Whether the support box sits inside the given domain box.
    pub fn contained_in(&self, box_: &[(f64, f64)]) -> bool {
        match &self.bounds {
            None => false,
            Some(b) => {
                b.len() == box_.len()
                    && b.iter()
                        .zip(box_)
                        .all(|((lo, hi), (blo, bhi))| lo >= blo && hi <= bhi)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothness {
    SmoothEverywhere,
    /// Smooth away from the set {x' = 0}.
    SmoothAwayFromX0,
}

/// A scalar field: a sum of product terms with recorded support.
#[derive(Clone, Debug)]
pub struct ScalarField {
    dim: usize,
    n_first: usize,
    terms: Vec<ProductTerm>,
    support: Support,
    smoothness: Smoothness,
}

impl ScalarField {
    pub fn new(
        dim: usize,
        n_first: usize,
        terms: Vec<ProductTerm>,
        support: Support,
        smoothness: Smoothness,
    ) -> Self {
        assert!(n_first <= dim && dim <= crate::MAX_DIM);
        ScalarField {
            dim,
            n_first,
            terms,
            support,
            smoothness,
        }
    }

    /// Constant field c on R^dim.
    pub fn constant(dim: usize, c: f64) -> Self {
        ScalarField::new(
            dim,
            dim,
            vec![ProductTerm {
                coef: c,
                factors: Vec::new(),
            }],
            Support::unbounded(),
            Smoothness::SmoothEverywhere,
        )
    }

    /// Field h(|x' + shift·1|) from a single radial profile.
    pub fn radial(dim: usize, n_first: usize, shift: f64, profile: Profile) -> Self {
        let smooth = if shift == 0.0 {
            Smoothness::SmoothAwayFromX0
        } else {
            Smoothness::SmoothEverywhere
        };
        ScalarField::new(
            dim,
            n_first,
            vec![ProductTerm {
                coef: 1.0,
                factors: vec![Factor::Radial { shift, profile }],
            }],
            Support::unbounded(),
            smooth,
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_first(&self) -> usize {
        self.n_first
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn terms(&self) -> &[ProductTerm] {
        &self.terms
    }

    pub fn with_support(mut self, support: Support) -> Self {
        self.support = support;
        self
    }

    pub fn scaled(mut self, c: f64) -> Self {
        for t in &mut self.terms {
            t.coef *= c;
        }
        self
    }

    /// Sum of two fields over the same space; support is the union.
    pub fn sum(mut self, other: ScalarField) -> Self {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.n_first, other.n_first);
        let support = Support {
            inner_radius: self.support.inner_radius.min(other.support.inner_radius),
            outer_radius: match (self.support.outer_radius, other.support.outer_radius) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            },
            bounds: match (&self.support.bounds, &other.support.bounds) {
                (Some(a), Some(b)) => Some(
                    a.iter()
                        .zip(b)
                        .map(|((alo, ahi), (blo, bhi))| (alo.min(*blo), ahi.max(*bhi)))
                        .collect(),
                ),
                _ => None,
            },
        };
        let smoothness = if self.smoothness == Smoothness::SmoothEverywhere
            && other.smoothness == Smoothness::SmoothEverywhere
        {
            Smoothness::SmoothEverywhere
        } else {
            Smoothness::SmoothAwayFromX0
        };
        self.terms.extend(other.terms);
        self.support = support;
        self.smoothness = smoothness;
        self
    }

    fn first_norm(&self, x: &[f64], shift: f64) -> f64 {
        let mut s = 0.0;
        for xi in &x[..self.n_first] {
            let y = xi + shift;
            s += y * y;
        }
        math::sqrt(s)
    }

    fn outside_support(&self, x: &[f64]) -> bool {
        let r = self.first_norm(x, 0.0);
        if r <= self.support.inner_radius {
            return true;
        }
        if let Some(outer) = self.support.outer_radius {
            if r >= outer {
                return true;
            }
        }
        if let Some(b) = &self.support.bounds {
            for (xi, (lo, hi)) in x.iter().zip(b) {
                if xi <= lo || xi >= hi {
                    return true;
                }
            }
        }
        false
    }

    /// Whether x lies inside the recorded support (cheap; no profile
    /// evaluations). The field is exactly zero outside.
    pub fn in_support(&self, x: &[f64]) -> bool {
        !self.outside_support(x)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        if self.outside_support(x) {
            return 0.0;
        }
        let mut acc = 0.0;
        for term in &self.terms {
            let mut v = term.coef;
            for f in &term.factors {
                if v == 0.0 {
                    break;
                }
                v *= match f {
                    Factor::Radial { shift, profile } => profile.eval(self.first_norm(x, *shift)),
                    Factor::Axis { axis, profile } => profile.eval(x[*axis]),
                };
            }
            acc += v;
        }
        acc
    }

    /// Value and Euclidean gradient only; cheaper than [`Self::jet2`] and
    /// allocation-free, for first-order kernels inside quadrature loops.
    pub fn jet1(&self, x: &[f64]) -> Jet1 {
        debug_assert_eq!(x.len(), self.dim);
        let mut out = Jet1 {
            value: 0.0,
            n: self.dim,
            grad: [0.0; crate::MAX_DIM],
        };
        if self.outside_support(x) {
            return out;
        }
        for term in &self.terms {
            let mut v = term.coef;
            let mut g = [0.0; crate::MAX_DIM];
            for f in &term.factors {
                let (fv, fg) = self.factor_jet1(f, x);
                for i in 0..self.dim {
                    g[i] = g[i] * fv + v * fg[i];
                }
                v *= fv;
            }
            out.value += v;
            for i in 0..self.dim {
                out.grad[i] += g[i];
            }
        }
        out
    }

    fn factor_jet1(&self, f: &Factor, x: &[f64]) -> (f64, [f64; crate::MAX_DIM]) {
        let mut g = [0.0; crate::MAX_DIM];
        match f {
            Factor::Axis { axis, profile } => {
                let j = profile.jet(x[*axis]);
                g[*axis] = j.d1;
                (j.v, g)
            }
            Factor::Radial { shift, profile } => {
                let r = self.first_norm(x, *shift);
                if r < 1e-150 {
                    let j = profile.jet(r.max(1e-150));
                    return (j.v, g);
                }
                let j = profile.jet(r);
                let h1r = j.d1 / r;
                for i in 0..self.n_first {
                    g[i] = h1r * (x[i] + shift);
                }
                (j.v, g)
            }
        }
    }

    /// Second-order Euclidean jet at `x`. Radial factors use the radial
    /// chain rule; the gradient and Hessian follow by products over factors.
    pub fn jet2(&self, x: &[f64]) -> Jet2 {
        debug_assert_eq!(x.len(), self.dim);
        if self.outside_support(x) {
            return Jet2::constant(self.dim, 0.0);
        }
        let mut acc = Jet2::constant(self.dim, 0.0);
        for term in &self.terms {
            let mut jet = Jet2::constant(self.dim, term.coef);
            for f in &term.factors {
                let fj = self.factor_jet(f, x);
                jet = jet.mul(&fj);
            }
            acc = acc.add(&jet);
        }
        acc
    }

    fn factor_jet(&self, f: &Factor, x: &[f64]) -> Jet2 {
        match f {
            Factor::Axis { axis, profile } => {
                let j = profile.jet(x[*axis]);
                let mut out = Jet2::constant(self.dim, j.v);
                out.grad_mut()[*axis] = j.d1;
                *out.hess_mut(*axis, *axis) = j.d2;
                out
            }
            Factor::Radial { shift, profile } => {
                let r = self.first_norm(x, *shift);
                if r < 1e-150 {
                    // Only hit by fields vanishing near the first-stratum
                    // origin or by pointwise callers that guard x' != 0.
                    let j = profile.jet(r.max(1e-150));
                    return Jet2::constant(self.dim, j.v);
                }
                let j = profile.jet(r);
                let mut out = Jet2::constant(self.dim, j.v);
                let h1r = j.d1 / r;
                let curv = (j.d2 - h1r) / (r * r);
                for i in 0..self.n_first {
                    let yi = x[i] + shift;
                    out.grad_mut()[i] = h1r * yi;
                    for k in i..self.n_first {
                        let yk = x[k] + shift;
                        let mut v = curv * yi * yk;
                        if i == k {
                            v += h1r;
                        }
                        *out.hess_mut(i, k) = v;
                    }
                }
                out
            }
        }
    }

    /// Euclidean gradient at `x`.
    pub fn euclid_gradient(&self, x: &[f64]) -> Vec<f64> {
        self.jet2(x).grad().to_vec()
    }

    /// A field with no factors at all (a constant); compatible with any
    /// coordinate layout.
    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.factors.is_empty())
    }

    /// If the field is a function of (|x'|, x[axis]) only — all radial
    /// factors unshifted and at most one transverse coordinate appearing —
    /// returns that axis (None when purely radial). Used to reduce integrals
    /// over rotation-invariant groups to one or two dimensions.
    pub fn product_radial_axis(&self) -> Option<Option<usize>> {
        let mut transverse: Option<usize> = None;
        for term in &self.terms {
            for f in &term.factors {
                match f {
                    Factor::Radial { shift, .. } => {
                        if *shift != 0.0 {
                            return None;
                        }
                    }
                    Factor::Axis { axis, .. } => {
                        if *axis < self.n_first {
                            return None;
                        }
                        match transverse {
                            None => transverse = Some(*axis),
                            Some(a) if a == *axis => {}
                            Some(_) => return None,
                        }
                    }
                }
            }
        }
        Some(transverse)
    }
}

/// Stack-allocated value-and-gradient pair returned by [`ScalarField::jet1`].
#[derive(Clone, Copy, Debug)]
pub struct Jet1 {
    pub value: f64,
    n: usize,
    grad: [f64; crate::MAX_DIM],
}

impl Jet1 {
    pub fn grad(&self) -> &[f64] {
        &self.grad[..self.n]
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad[..self.n].iter().all(|g| g.is_finite())
    }
}

/// A horizontal vector field, given by one scalar component per generator.
pub struct HorizontalVectorField {
    components: Vec<ScalarField>,
}

impl HorizontalVectorField {
    pub fn new(components: Vec<ScalarField>) -> Self {
        HorizontalVectorField { components }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, k: usize) -> &ScalarField {
        &self.components[k]
    }

    /// The field x'/|x'|^gamma extended by zero components off the first
    /// stratum, used by the divergence identity.
    pub fn radial_power(dim: usize, n_first: usize, gamma: f64) -> Self {
        let components = (0..n_first)
            .map(|k| {
                ScalarField::new(
                    dim,
                    n_first,
                    vec![ProductTerm {
                        coef: 1.0,
                        factors: vec![
                            Factor::Axis {
                                axis: k,
                                profile: Profile::Linear,
                            },
                            Factor::Radial {
                                shift: 0.0,
                                profile: Profile::Power { a: -gamma },
                            },
                        ],
                    }],
                    Support::unbounded(),
                    Smoothness::SmoothAwayFromX0,
                )
            })
            .collect();
        HorizontalVectorField { components }
    }

    /// Constant vector field.
    pub fn constant(dim: usize, values: &[f64]) -> Self {
        let components = values
            .iter()
            .map(|v| ScalarField::constant(dim, *v))
            .collect();
        HorizontalVectorField { components }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd;

    #[test]
    fn smoothstep_is_flat_at_junctions() {
        let p = Profile::StepUp { a: 0.2, b: 1.0 };
        assert_eq!(p.jet(0.1), J1::ZERO);
        assert_eq!(p.jet(0.2), J1::ZERO);
        let top = p.jet(1.0);
        assert_eq!((top.v, top.d1, top.d2), (1.0, 0.0, 0.0));
        let mid = p.jet(0.6);
        assert!(mid.v > 0.0 && mid.v < 1.0 && mid.d1 > 0.0);
        // derivatives decay extremely fast near the junctions
        let near = p.jet(0.2005);
        assert!(near.v < 1e-100);
    }

    #[test]
    fn plateau_region_is_exactly_one() {
        let p = Profile::Plateau {
            a: 0.2,
            b: 0.4,
            c: 0.8,
            d: 1.0,
        };
        for t in [0.4, 0.5, 0.65, 0.8] {
            let j = p.jet(t);
            assert_eq!((j.v, j.d1, j.d2), (1.0, 0.0, 0.0));
        }
        assert_eq!(p.eval(0.1), 0.0);
        assert_eq!(p.eval(1.5), 0.0);
    }

    #[test]
    fn profile_jets_match_finite_differences() {
        let profiles = [
            Profile::Power { a: -1.7 },
            Profile::ExpPower { c: 0.5, lambda: 2.0 },
            Profile::ExpPower { c: 1.0, lambda: -0.5 },
            Profile::LogRatio { top: 4.0 },
            Profile::StepUp { a: 0.3, b: 1.1 },
            Profile::Plateau {
                a: 0.3,
                b: 0.5,
                c: 0.9,
                d: 1.2,
            },
        ];
        for p in &profiles {
            for t in [0.45, 0.62, 0.85, 1.05] {
                let j = p.jet(t);
                let h = 1e-5;
                let d1 = (p.jet(t + h).v - p.jet(t - h).v) / (2.0 * h);
                let d2 = (p.jet(t + h).v - 2.0 * j.v + p.jet(t - h).v) / (h * h);
                assert!((j.d1 - d1).abs() <= 1e-6 * (1.0 + d1.abs()), "{p:?} at {t}");
                assert!((j.d2 - d2).abs() <= 1e-3 * (1.0 + d2.abs()), "{p:?} at {t}");
            }
        }
    }

    #[test]
    fn radial_field_jets_match_finite_differences() {
        // h(|x' + 0.3|) * plateau(z) on a 3-dimensional space, N = 2
        let f = ScalarField::new(
            3,
            2,
            vec![ProductTerm {
                coef: 2.0,
                factors: vec![
                    Factor::Radial {
                        shift: 0.3,
                        profile: Profile::Power { a: -0.8 },
                    },
                    Factor::Axis {
                        axis: 2,
                        profile: Profile::Plateau {
                            a: -1.0,
                            b: -0.5,
                            c: 0.5,
                            d: 1.0,
                        },
                    },
                ],
            }],
            Support::unbounded(),
            Smoothness::SmoothEverywhere,
        );
        let x = [0.7, -0.4, 0.1];
        let j = f.jet2(&x);
        let ev = |y: &[f64]| f.eval(y);
        let g = fd::gradient(&ev, &x, 1e-5);
        let h = fd::hessian(&ev, &x, 1e-4);
        for i in 0..3 {
            assert!((j.grad()[i] - g[i]).abs() <= 1e-7 * (1.0 + g[i].abs()));
            for k in 0..3 {
                assert!((j.hess(i, k) - h[i][k]).abs() <= 1e-4 * (1.0 + h[i][k].abs()));
            }
        }
    }

    #[test]
    fn support_zeroing_is_exact() {
        let f = ScalarField::new(
            2,
            2,
            vec![ProductTerm {
                coef: 1.0,
                factors: vec![Factor::Radial {
                    shift: 0.0,
                    profile: Profile::Plateau {
                        a: 0.2,
                        b: 0.3,
                        c: 0.8,
                        d: 0.9,
                    },
                }],
            }],
            Support {
                inner_radius: 0.2,
                outer_radius: Some(0.9),
                bounds: Some(vec![(-0.9, 0.9), (-0.9, 0.9)]),
            },
            Smoothness::SmoothEverywhere,
        );
        assert_eq!(f.eval(&[0.05, 0.05]), 0.0);
        assert_eq!(f.eval(&[2.0, 0.0]), 0.0);
        assert_eq!(f.eval(&[0.0, 0.5]), 1.0);
    }

    #[test]
    fn product_radial_detection() {
        let radial = ScalarField::radial(3, 2, 0.0, Profile::Power { a: 1.0 });
        assert_eq!(radial.product_radial_axis(), Some(None));
        let shifted = ScalarField::radial(3, 2, 0.5, Profile::Power { a: 1.0 });
        assert_eq!(shifted.product_radial_axis(), None);
        let mut with_axis = ScalarField::radial(3, 2, 0.0, Profile::Power { a: 1.0 });
        with_axis.terms[0].factors.push(Factor::Axis {
            axis: 2,
            profile: Profile::Linear,
        });
        assert_eq!(with_axis.product_radial_axis(), Some(Some(2)));
    }
}
