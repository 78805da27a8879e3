//! Second-order forward-mode jets.
//!
//! [`Jet2`] carries a value, an n-dimensional gradient and a packed symmetric
//! Hessian through arithmetic and elementary functions. All pointwise
//! horizontal operators are built on these; finite differences appear only as
//! an independent test oracle (see [`crate::fd`]).

use crate::math;
use crate::MAX_DIM;

const HESS_LEN: usize = MAX_DIM * (MAX_DIM + 1) / 2;

#[inline]
fn hidx(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // row-major upper triangle of a MAX_DIM x MAX_DIM matrix
    i * MAX_DIM - i * (i + 1) / 2 + j
}

/// Value, gradient and Hessian of a scalar expression in `n` variables.
#[derive(Clone, Copy, Debug)]
pub struct Jet2 {
    pub value: f64,
    n: usize,
    grad: [f64; MAX_DIM],
    hess: [f64; HESS_LEN],
}

impl Jet2 {
    pub fn constant(n: usize, value: f64) -> Self {
        assert!(n <= MAX_DIM, "jet dimension {n} exceeds MAX_DIM");
        Jet2 {
            value,
            n,
            grad: [0.0; MAX_DIM],
            hess: [0.0; HESS_LEN],
        }
    }

    /// The coordinate function `x_i` seeded as a jet.
    pub fn variable(n: usize, i: usize, value: f64) -> Self {
        let mut j = Self::constant(n, value);
        j.grad[i] = 1.0;
        j
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad[..self.n]
    }

    pub fn grad_mut(&mut self) -> &mut [f64] {
        &mut self.grad[..self.n]
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[hidx(i, j)]
    }

    pub fn hess_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.hess[hidx(i, j)]
    }

    pub fn grad_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            s += self.grad[i] * self.grad[i];
        }
        math::sqrt(s)
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad[..self.n].iter().all(|g| g.is_finite())
            && self.hess.iter().all(|h| h.is_finite())
    }

    /// Composition with a scalar function given by `(g(v), g'(v), g''(v))`.
    pub fn chain(&self, g: f64, dg: f64, d2g: f64) -> Self {
        let mut out = Self::constant(self.n, g);
        for i in 0..self.n {
            out.grad[i] = dg * self.grad[i];
        }
        for i in 0..self.n {
            for j in i..self.n {
                out.hess[hidx(i, j)] =
                    d2g * self.grad[i] * self.grad[j] + dg * self.hess[hidx(i, j)];
            }
        }
        out
    }

    pub fn scale(&self, c: f64) -> Self {
        self.chain(c * self.value, c, 0.0)
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        let mut out = *self;
        out.value += o.value;
        for i in 0..self.n {
            out.grad[i] += o.grad[i];
        }
        for k in 0..HESS_LEN {
            out.hess[k] += o.hess[k];
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1.0))
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        let mut out = Self::constant(self.n, self.value * o.value);
        for i in 0..self.n {
            out.grad[i] = self.grad[i] * o.value + self.value * o.grad[i];
        }
        for i in 0..self.n {
            for j in i..self.n {
                out.hess[hidx(i, j)] = self.hess[hidx(i, j)] * o.value
                    + self.grad[i] * o.grad[j]
                    + self.grad[j] * o.grad[i]
                    + self.value * o.hess[hidx(i, j)];
            }
        }
        out
    }

    pub fn recip(&self) -> Self {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    pub fn exp(&self) -> Self {
        let e = math::exp(self.value);
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Self {
        let v = self.value;
        self.chain(math::ln(v), 1.0 / v, -1.0 / (v * v))
    }

    pub fn sqrt(&self) -> Self {
        let s = math::sqrt(self.value);
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }

    /// Real power `f^a`; requires a strictly positive base.
    pub fn powf(&self, a: f64) -> Self {
        let v = self.value;
        let p = math::powf(v, a);
        self.chain(p, a * p / v, a * (a - 1.0) * p / (v * v))
    }

    /// |f|, using the sign of the value; undefined at f = 0.
    pub fn abs(&self) -> Self {
        let s = if self.value < 0.0 { -1.0 } else { 1.0 };
        self.chain(s * self.value, s, 0.0)
    }
}

/// One-dimensional second-order jet used by the profile functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct J1 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl J1 {
    pub const ZERO: J1 = J1 {
        v: 0.0,
        d1: 0.0,
        d2: 0.0,
    };

    pub fn constant(v: f64) -> Self {
        J1 { v, d1: 0.0, d2: 0.0 }
    }

    pub fn var(v: f64) -> Self {
        J1 { v, d1: 1.0, d2: 0.0 }
    }

    pub fn add(self, o: J1) -> J1 {
        J1 {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
        }
    }

    pub fn sub(self, o: J1) -> J1 {
        J1 {
            v: self.v - o.v,
            d1: self.d1 - o.d1,
            d2: self.d2 - o.d2,
        }
    }

    pub fn mul(self, o: J1) -> J1 {
        J1 {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }

    pub fn scale(self, c: f64) -> J1 {
        J1 {
            v: c * self.v,
            d1: c * self.d1,
            d2: c * self.d2,
        }
    }

    pub fn div(self, o: J1) -> J1 {
        self.mul(o.chain(1.0 / o.v, -1.0 / (o.v * o.v), 2.0 / (o.v * o.v * o.v)))
    }

    /// Composition `g ∘ self` from `(g, g', g'')` at `self.v`.
    pub fn chain(self, g: f64, dg: f64, d2g: f64) -> J1 {
        J1 {
            v: g,
            d1: dg * self.d1,
            d2: d2g * self.d1 * self.d1 + dg * self.d2,
        }
    }

    pub fn exp(self) -> J1 {
        let e = math::exp(self.v);
        self.chain(e, e, e)
    }

    pub fn ln(self) -> J1 {
        self.chain(math::ln(self.v), 1.0 / self.v, -1.0 / (self.v * self.v))
    }

    pub fn powf(self, a: f64) -> J1 {
        let p = math::powf(self.v, a);
        self.chain(p, a * p / self.v, a * (a - 1.0) * p / (self.v * self.v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd;

    fn sample_expr(x: &[f64]) -> Jet2 {
        // exp(x0*x1) / sqrt(1 + x0^2 + x2^2) + ln(2 + sin-free polynomial)
        let n = x.len();
        let x0 = Jet2::variable(n, 0, x[0]);
        let x1 = Jet2::variable(n, 1, x[1]);
        let x2 = Jet2::variable(n, 2, x[2]);
        let a = x0.mul(&x1).exp();
        let b = Jet2::constant(n, 1.0)
            .add(&x0.mul(&x0))
            .add(&x2.mul(&x2))
            .sqrt();
        let c = Jet2::constant(n, 2.0)
            .add(&x0.mul(&x2).scale(0.25))
            .ln();
        a.div(&b).add(&c)
    }

    #[test]
    fn jet_matches_finite_differences() {
        let pts = [[0.3, -0.7, 1.1], [1.0, 0.2, -0.4], [-0.6, 0.9, 0.5]];
        for p in &pts {
            let j = sample_expr(p);
            let f = |y: &[f64]| sample_expr(y).value;
            let g = fd::gradient(&f, p, 1e-5);
            let h = fd::hessian(&f, p, 1e-4);
            for i in 0..3 {
                assert!(
                    (j.grad()[i] - g[i]).abs() <= 1e-8 * (1.0 + g[i].abs()),
                    "grad[{i}]: {} vs {}",
                    j.grad()[i],
                    g[i]
                );
                for k in 0..3 {
                    assert!(
                        (j.hess(i, k) - h[i][k]).abs() <= 1e-5 * (1.0 + h[i][k].abs()),
                        "hess[{i}{k}]: {} vs {}",
                        j.hess(i, k),
                        h[i][k]
                    );
                }
            }
        }
    }

    #[test]
    fn powf_and_recip_consistent() {
        let x = Jet2::variable(2, 0, 1.7);
        let a = x.powf(-3.0);
        let b = x.recip().mul(&x.recip()).mul(&x.recip());
        assert!((a.value - b.value).abs() < 1e-14);
        assert!((a.grad()[0] - b.grad()[0]).abs() < 1e-12);
        assert!((a.hess(0, 0) - b.hess(0, 0)).abs() < 1e-11);
    }

    #[test]
    fn j1_product_rule() {
        let t = J1::var(0.8);
        let p = t.mul(t).mul(t); // t^3
        assert!((p.v - 0.512).abs() < 1e-15);
        assert!((p.d1 - 3.0 * 0.64).abs() < 1e-14);
        assert!((p.d2 - 6.0 * 0.8).abs() < 1e-14);
    }
}
