//! Dense univariate polynomials in the absolute coordinate `x`.
//!
//! Densities, CDF differences and posterior slices are all piecewise
//! polynomials, so every integral the laboratory needs on them (including
//! integrals of absolute values) is done here exactly: roots are isolated
//! recursively through the roots of the derivative and refined by bisection.

use std::fmt;

/// `c[0] + c[1] x + c[2] x^2 + ...`
#[derive(Clone, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    /// `a + b x`
    pub fn linear(a: f64, b: f64) -> Self {
        Poly::new(vec![a, b])
    }

    /// `x^k`
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![0.0; k + 1];
        c[k] = 1.0;
        Poly { coeffs: c }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Antiderivative vanishing at `x = 0`.
    pub fn antiderivative(&self) -> Poly {
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(0.0);
        c.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &v)| v / (k as f64 + 1.0)),
        );
        Poly::new(c)
    }

    /// `∫_a^b p(x) dx`
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if self.is_zero() || a == b {
            return 0.0;
        }
        let anti = self.antiderivative();
        anti.eval(b) - anti.eval(a)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(0.0)
                        + other.coeffs.get(k).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Poly {
        if s == 0.0 {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    pub fn pow(&self, k: usize) -> Poly {
        (0..k).fold(Poly::constant(1.0), |acc, _| acc.mul(self))
    }

    /// `x ↦ p(offset + slope·x)`
    pub fn compose_affine(&self, offset: f64, slope: f64) -> Poly {
        let inner = Poly::linear(offset, slope);
        let mut out = Poly::zero();
        for &c in self.coeffs.iter().rev() {
            out = out.mul(&inner).add(&Poly::constant(c));
        }
        out
    }

    /// Cubic Hermite interpolant on `[a, b]` with the given end values and slopes.
    pub fn hermite(a: f64, b: f64, fa: f64, fb: f64, da: f64, db: f64) -> Poly {
        let h = b - a;
        // In the local coordinate t = (x - a) / h.
        let h00 = Poly::new(vec![1.0, 0.0, -3.0, 2.0]);
        let h10 = Poly::new(vec![0.0, 1.0, -2.0, 1.0]);
        let h01 = Poly::new(vec![0.0, 0.0, 3.0, -2.0]);
        let h11 = Poly::new(vec![0.0, 0.0, -1.0, 1.0]);
        let local = h00
            .scale(fa)
            .add(&h10.scale(h * da))
            .add(&h01.scale(fb))
            .add(&h11.scale(h * db));
        local.compose_affine(-a / h, 1.0 / h)
    }

    /// Sorted, distinct roots in the closed interval `[a, b]`.
    ///
    /// The zero polynomial has no isolated roots and returns an empty list.
    pub fn roots_in(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if self.is_zero() || a > b {
            return out;
        }
        match self.degree() {
            0 => {}
            1 => {
                let r = -self.coeffs[0] / self.coeffs[1];
                if r >= a && r <= b {
                    out.push(r);
                }
            }
            _ => {
                let mut knots = vec![a];
                knots.extend(self.derivative().roots_in(a, b));
                knots.push(b);
                for w in knots.windows(2) {
                    let (l, r) = (w[0], w[1]);
                    let (fl, fr) = (self.eval(l), self.eval(r));
                    if fl == 0.0 {
                        push_distinct(&mut out, l);
                    }
                    if fl != 0.0 && fr != 0.0 && (fl < 0.0) != (fr < 0.0) {
                        push_distinct(&mut out, self.bisect(l, r, fl));
                    }
                }
                if self.eval(b) == 0.0 {
                    push_distinct(&mut out, b);
                }
            }
        }
        out
    }

    fn bisect(&self, mut l: f64, mut r: f64, fl: f64) -> f64 {
        let neg_left = fl < 0.0;
        for _ in 0..200 {
            let m = 0.5 * (l + r);
            if m <= l || m >= r {
                break;
            }
            let fm = self.eval(m);
            if fm == 0.0 {
                return m;
            }
            if (fm < 0.0) == neg_left {
                l = m;
            } else {
                r = m;
            }
        }
        0.5 * (l + r)
    }

    /// `∫_a^b |p(x)| dx`, split exactly at the sign changes.
    pub fn abs_integral(&self, a: f64, b: f64) -> f64 {
        if self.is_zero() || a >= b {
            return 0.0;
        }
        let anti = self.antiderivative();
        let mut knots = vec![a];
        knots.extend(self.roots_in(a, b).into_iter().filter(|&r| r > a && r < b));
        knots.push(b);
        knots
            .windows(2)
            .map(|w| (anti.eval(w[1]) - anti.eval(w[0])).abs())
            .sum()
    }

    /// Minimum over `[a, b]`, attained at an endpoint or an interior critical point.
    pub fn min_on(&self, a: f64, b: f64) -> f64 {
        let mut m = self.eval(a).min(self.eval(b));
        for r in self.derivative().roots_in(a, b) {
            m = m.min(self.eval(r));
        }
        m
    }

    /// Maximum of `|p|` over `[a, b]`.
    pub fn max_abs_on(&self, a: f64, b: f64) -> f64 {
        let mut m = self.eval(a).abs().max(self.eval(b).abs());
        for r in self.derivative().roots_in(a, b) {
            m = m.max(self.eval(r).abs());
        }
        m
    }
}

fn push_distinct(v: &mut Vec<f64>, x: f64) {
    if v.last().map_or(true, |&l| x > l) {
        v.push(x);
    }
}

/// Binomial coefficient as a float; small arguments only.
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
