//! # Jets: truncated complex power series
//!
//! A [`Jet`] stores the Taylor coefficients of a holomorphic quantity at a
//! base point z₀, up to a truncation order. Every derivative used by the
//! geometry modules is read off a jet coefficient; there is no symbolic
//! differentiation anywhere else in the crate.
//!
//! Conventions:
//! - `coeff(k)` is the coefficient of (z−z₀)^k, so the k-th derivative at the
//!   base is `k! · coeff(k)`.
//! - Arithmetic never silently extends the order: binary results carry the
//!   minimum of the input orders, and differentiation lowers the order.
//! - Division strips the common valuation of numerator and denominator and
//!   reports how much was stripped; a quotient that would still have a pole
//!   is an error rather than a hidden Laurent series.
//! - Elementary functions use the principal branch anchored at the constant
//!   term; multivalued continuation along paths is the caller's job.

use crate::error::{Error, Result};
use crate::tol;
use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Complex scalar shorthand used throughout the crate.
pub type C = Complex64;

/// Truncated complex power series at a base point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    base: C,
    /// `c[k]` is the coefficient of (z−base)^k; length is order+1.
    c: Vec<C>,
}

/// Binary operation selector for [`Jet::binary`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Jet {
    /// Builds a jet from explicit coefficients (index k ↦ coefficient of
    /// (z−base)^k). The coefficient list must be nonempty.
    pub fn new(base: C, coeffs: Vec<C>) -> Jet {
        assert!(!coeffs.is_empty(), "a jet needs at least a constant term");
        Jet { base, c: coeffs }
    }

    /// The constant jet `value` at `base` with the given order.
    pub fn constant(base: C, value: C, order: usize) -> Jet {
        let mut c = vec![C::ZERO; order + 1];
        c[0] = value;
        Jet { base, c }
    }

    /// The zero jet at `base` with the given order.
    pub fn zero(base: C, order: usize) -> Jet {
        Jet {
            base,
            c: vec![C::ZERO; order + 1],
        }
    }

    /// The coordinate function z expanded at `base`: base + (z−base).
    pub fn variable(base: C, order: usize) -> Jet {
        let mut c = vec![C::ZERO; order + 1];
        c[0] = base;
        if order >= 1 {
            c[1] = C::ONE;
        }
        Jet { base, c }
    }

    pub fn base(&self) -> C {
        self.base
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    /// Coefficient of (z−base)^k; zero beyond the truncation order.
    pub fn coeff(&self, k: usize) -> C {
        self.c.get(k).copied().unwrap_or(C::ZERO)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.c
    }

    /// Value at the base point (constant term).
    pub fn value(&self) -> C {
        self.c[0]
    }

    /// Largest coefficient magnitude; the scale used by relative tests.
    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Copy truncated to at most `order` (never extends).
    pub fn truncated(&self, order: usize) -> Jet {
        let n = order.min(self.order());
        Jet {
            base: self.base,
            c: self.c[..=n].to_vec(),
        }
    }

    /// Jet of `z ↦ f(z₀ + s·(z − z₀))`: coefficient `k` is scaled by `s^k`.
    ///
    /// With `s < 1` this pulls singularities of `f` away from the unit
    /// coefficient scale, which keeps the feedback error of division and
    /// logarithm recurrences from growing with the index.
    pub fn dilate(&self, s: f64) -> Jet {
        let mut c = self.c.clone();
        let mut p = 1.0;
        for ck in c.iter_mut() {
            *ck *= p;
            p *= s;
        }
        Jet { base: self.base, c }
    }

    /// Index of the first coefficient that is nonzero relative to the jet's
    /// scale, or `None` if the jet is zero to working order.
    pub fn valuation(&self) -> Option<usize> {
        let scale = self.max_abs();
        if scale == 0.0 {
            return None;
        }
        self.c
            .iter()
            .position(|z| z.norm() > tol::ZERO_COEFF_REL * scale)
    }

    /// `true` when every coefficient is below the relative zero threshold of
    /// the given scale (pass the natural scale of the surrounding
    /// computation; for standalone jets use `max_abs`).
    pub fn is_zero_rel(&self, scale: f64) -> bool {
        let floor = tol::ZERO_COEFF_REL * scale.max(f64::MIN_POSITIVE);
        self.c.iter().all(|z| z.norm() <= floor)
    }

    /// Splits the jet as (z−base)^v · unit with unit(base) ≠ 0. The unit
    /// keeps only the coefficients actually known, so its order drops by v.
    pub fn strip(&self) -> Result<(usize, Jet)> {
        let v = self.valuation().ok_or(Error::ZeroJet)?;
        Ok((
            v,
            Jet {
                base: self.base,
                c: self.c[v..].to_vec(),
            },
        ))
    }

    /// Evaluates the truncated polynomial at z (Horner).
    pub fn eval(&self, z: C) -> C {
        let dz = z - self.base;
        let mut acc = C::ZERO;
        for &ck in self.c.iter().rev() {
            acc = acc * dz + ck;
        }
        acc
    }

    fn check_base(&self, other: &Jet) -> Result<()> {
        let scale = 1.0 + self.base.norm().max(other.base.norm());
        if (self.base - other.base).norm() > 1e-12 * scale {
            return Err(Error::BaseMismatch(self.base, other.base));
        }
        Ok(())
    }

    /// Checked binary arithmetic (the operator impls panic on base
    /// mismatch; this returns the error instead).
    pub fn binary(&self, other: &Jet, op: JetOp) -> Result<Jet> {
        self.check_base(other)?;
        match op {
            JetOp::Add => Ok(self.zip(other, |a, b| a + b)),
            JetOp::Sub => Ok(self.zip(other, |a, b| a - b)),
            JetOp::Mul => Ok(self.mul_impl(other)),
            JetOp::Div => self.div_reported(other).map(|(q, _)| q),
        }
    }

    fn zip(&self, other: &Jet, f: impl Fn(C, C) -> C) -> Jet {
        let n = self.order().min(other.order());
        let c = (0..=n).map(|k| f(self.coeff(k), other.coeff(k))).collect();
        Jet { base: self.base, c }
    }

    fn mul_impl(&self, other: &Jet) -> Jet {
        let n = self.order().min(other.order());
        let mut c = vec![C::ZERO; n + 1];
        for (k, ck) in c.iter_mut().enumerate() {
            // Cauchy product, truncated at the shared order.
            let mut s = C::ZERO;
            for j in 0..=k {
                s += self.coeff(j) * other.coeff(k - j);
            }
            *ck = s;
        }
        Jet { base: self.base, c }
    }

    /// Division with valuation-strip bookkeeping: returns (quotient, s)
    /// where s is the valuation stripped from both operands (the
    /// denominator's valuation). Errors when the denominator is zero to
    /// working order or the quotient would retain a pole.
    pub fn div_reported(&self, den: &Jet) -> Result<(Jet, usize)> {
        self.check_base(den)?;
        let vb = match den.valuation() {
            Some(v) => v,
            None => return Err(Error::DivisionByIdenticallyZero),
        };
        if vb > 0 {
            let va = self.valuation().unwrap_or(usize::MAX);
            if va < vb {
                return Err(Error::LaurentQuotient(vb - va));
            }
        }
        let num = if vb > 0 {
            Jet {
                base: self.base,
                c: self.c[vb.min(self.c.len() - 1)..].to_vec(),
            }
        } else {
            self.clone()
        };
        let (_, den_unit) = if vb > 0 { den.strip()? } else { (0, den.clone()) };
        let n = num.order().min(den_unit.order());
        let b0 = den_unit.coeff(0);
        let mut q = vec![C::ZERO; n + 1];
        for k in 0..=n {
            // Long division: a_k = Σ_{j≤k} q_j b_{k−j}, solve for q_k.
            let mut s = num.coeff(k);
            for j in 0..k {
                s -= q[j] * den_unit.coeff(k - j);
            }
            q[k] = s / b0;
        }
        Ok((Jet { base: self.base, c: q }, vb))
    }

    /// Multiplicative inverse (order preserved; errors if the constant term
    /// vanishes to working order).
    pub fn recip(&self) -> Result<Jet> {
        Jet::constant(self.base, C::ONE, self.order()).div_reported(self).map(|(q, _)| q)
    }

    /// exp(self), via the ODE recurrence f' = a'·f.
    pub fn exp(&self) -> Jet {
        let n = self.order();
        let mut f = vec![C::ZERO; n + 1];
        f[0] = self.c[0].exp();
        for k in 1..=n {
            let mut s = C::ZERO;
            for j in 1..=k {
                s += (j as f64) * self.coeff(j) * f[k - j];
            }
            f[k] = s / (k as f64);
        }
        Jet { base: self.base, c: f }
    }

    /// Principal log; the constant term must be nonzero.
    pub fn log(&self) -> Result<Jet> {
        let a0 = self.c[0];
        if a0 == C::ZERO {
            return Err(Error::BranchPointAtBase);
        }
        let n = self.order();
        let mut g = vec![C::ZERO; n + 1];
        g[0] = a0.ln();
        for k in 1..=n {
            // From a·g' = a': k·a₀·g_k = k·a_k − Σ_{j<k} j·g_j·a_{k−j}.
            let mut s = (k as f64) * self.coeff(k);
            for j in 1..k {
                s -= (j as f64) * g[j] * self.coeff(k - j);
            }
            g[k] = s / ((k as f64) * a0);
        }
        Ok(Jet { base: self.base, c: g })
    }

    /// Integer power (valuation at the base allowed).
    pub fn powi(&self, n: i64) -> Result<Jet> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        let mut acc = Jet::constant(self.base, C::ONE, self.order());
        let mut b = self.clone();
        let mut n = n as u64;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &b;
            }
            n >>= 1;
            if n > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// Arbitrary complex power, principal branch at the constant term. An
    /// exponent that is a non-negative integer (within 1e-9) falls back to
    /// the valuation-tolerant integer power.
    pub fn pow(&self, e: C) -> Result<Jet> {
        if e.im == 0.0 && e.re >= 0.0 && (e.re - e.re.round()).abs() < 1e-9 {
            return self.powi(e.re.round() as i64);
        }
        let a0 = self.c[0];
        if a0 == C::ZERO {
            return Err(Error::BranchPointAtBase);
        }
        let n = self.order();
        let mut p = vec![C::ZERO; n + 1];
        p[0] = a0.powc(e);
        for k in 1..=n {
            // J.C.P. Miller recurrence from a·p' = e·a'·p.
            let mut s = C::ZERO;
            for j in 0..k {
                let kj = (k - j) as f64;
                s += (e * kj - C::from(j as f64)) * self.coeff(k - j) * p[j];
            }
            p[k] = s / ((k as f64) * a0);
        }
        Ok(Jet { base: self.base, c: p })
    }

    /// Principal square root (constant term nonzero).
    pub fn sqrt(&self) -> Result<Jet> {
        self.pow(C::new(0.5, 0.0))
    }

    /// k-th derivative; the order drops by k.
    pub fn derive(&self, k: usize) -> Result<Jet> {
        if k > self.order() {
            return Err(Error::OrderExhausted {
                requested: k,
                order: self.order(),
            });
        }
        let mut cur = self.clone();
        for _ in 0..k {
            let n = cur.order();
            let c = (1..=n).map(|j| (j as f64) * cur.c[j]).collect::<Vec<_>>();
            cur = Jet {
                base: cur.base,
                c: if c.is_empty() { vec![C::ZERO] } else { c },
            };
        }
        Ok(cur)
    }

    /// First derivative, panicking only for order-0 jets (which callers
    /// never differentiate without checking).
    pub fn d(&self) -> Jet {
        self.derive(1).expect("derivative of an order-0 jet")
    }

    /// Termwise antiderivative with zero constant term; order rises by one
    /// (explicitly, not silently — this is the one op that extends).
    pub fn integrate(&self) -> Jet {
        let mut c = vec![C::ZERO; self.c.len() + 1];
        for (k, &ck) in self.c.iter().enumerate() {
            c[k + 1] = ck / ((k + 1) as f64);
        }
        Jet { base: self.base, c }
    }

    /// Taylor coefficients of `outer ∘ inner`. Requires inner(base_inner) to
    /// equal outer's base; the result lives at inner's base.
    pub fn compose(outer: &Jet, inner: &Jet) -> Result<Jet> {
        let scale = 1.0 + outer.base.norm().max(inner.value().norm());
        if (inner.value() - outer.base).norm() > 1e-9 * scale {
            return Err(Error::BaseMismatch(outer.base, inner.value()));
        }
        let n = outer.order().min(inner.order());
        // u = inner − inner(base) has valuation ≥ 1 at inner's base.
        let mut u = inner.truncated(n);
        u.c[0] = C::ZERO;
        let mut acc = Jet::constant(inner.base, outer.coeff(n), n);
        for k in (0..n).rev() {
            // Horner over the outer coefficients.
            acc = &(&acc * &u) + &Jet::constant(inner.base, outer.coeff(k), n);
        }
        Ok(acc)
    }
}

/// Largest coefficientwise difference between two jets (compared up to the
/// shorter order). Test helper used across the crate.
pub fn max_coeff_diff(a: &Jet, b: &Jet) -> f64 {
    let n = a.order().min(b.order());
    (0..=n)
        .map(|k| (a.coeff(k) - b.coeff(k)).norm())
        .fold(0.0, f64::max)
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                self.binary(rhs, $op).expect("jet arithmetic")
            }
        }
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).binary(&rhs, $op).expect("jet arithmetic")
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).binary(rhs, $op).expect("jet arithmetic")
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.binary(&rhs, $op).expect("jet arithmetic")
            }
        }
    };
}

jet_binop!(Add, add, JetOp::Add);
jet_binop!(Sub, sub, JetOp::Sub);
jet_binop!(Mul, mul, JetOp::Mul);
jet_binop!(Div, div, JetOp::Div);

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            base: self.base,
            c: self.c.iter().map(|z| -z).collect(),
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

impl Mul<C> for &Jet {
    type Output = Jet;
    fn mul(self, s: C) -> Jet {
        Jet {
            base: self.base,
            c: self.c.iter().map(|z| z * s).collect(),
        }
    }
}

impl Mul<C> for Jet {
    type Output = Jet;
    fn mul(self, s: C) -> Jet {
        &self * s
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        self * C::from(s)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        &self * C::from(s)
    }
}
