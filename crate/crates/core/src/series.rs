//! Truncated Laurent series over F_{p^2} in an abstract local parameter t.
//!
//! A nonzero series is stored as `t^val * (c_0 + c_1 t + ... + c_N t^N) +
//! O(t^(val+N+1))` with `c_0 != 0`. A series that vanishes to its precision
//! keeps no coefficients and stores its precision bound in `val`, so callers
//! can tell "zero" apart from "not enough precision".

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, Fq2};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    val: i64,
    coeffs: Vec<Fq2>,
}

impl TruncSeries {
    /// `t^val * sum coeffs[k] t^k + O(t^(val + coeffs.len()))`, normalized.
    pub fn from_coeffs(val: i64, coeffs: Vec<Fq2>) -> Self {
        let mut s = TruncSeries { val, coeffs };
        s.normalize();
        s
    }

    /// The series O(t^prec).
    pub fn zero(prec: i64) -> Self {
        TruncSeries {
            val: prec,
            coeffs: Vec::new(),
        }
    }

    /// Constant `c` known to absolute precision O(t^(order+1)).
    pub fn constant(c: Fq2, order: usize) -> Self {
        let mut coeffs = vec![Fq2::ZERO; order + 1];
        coeffs[0] = c;
        Self::from_coeffs(0, coeffs)
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Fq2::ONE, order)
    }

    /// t^k, exact to relative order `order`.
    pub fn monomial(k: i64, order: usize) -> Self {
        Self::one(order).shift(k)
    }

    fn normalize(&mut self) {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(0) => {}
            Some(i) => {
                self.coeffs.drain(..i);
                self.val += i as i64;
            }
            None => {
                self.val += self.coeffs.len() as i64;
                self.coeffs.clear();
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Valuation of a nonzero series; for a zero series, its precision bound.
    pub fn val(&self) -> i64 {
        self.val
    }

    /// Exclusive absolute precision: the series is known modulo t^abs_prec.
    pub fn abs_prec(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }

    /// Relative truncation order N (number of known coefficients minus one).
    /// Zero series report -1.
    pub fn order(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[Fq2] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<Fq2> {
        self.coeffs.first().copied()
    }

    /// Coefficient of t^e.
    pub fn coeff(&self, e: i64) -> Result<Fq2> {
        if e >= self.abs_prec() {
            return Err(Error::PrecisionExhausted {
                needed: e,
                available: self.abs_prec() - 1,
            });
        }
        if e < self.val {
            return Ok(Fq2::ZERO);
        }
        Ok(self.coeffs[(e - self.val) as usize])
    }

    /// Multiplication by t^k.
    pub fn shift(mut self, k: i64) -> Self {
        self.val += k;
        self
    }

    /// Drops everything from t^prec on.
    pub fn truncate_abs(&self, prec: i64) -> Self {
        if prec >= self.abs_prec() {
            return self.clone();
        }
        if prec <= self.val {
            return Self::zero(prec);
        }
        Self::from_coeffs(self.val, self.coeffs[..(prec - self.val) as usize].to_vec())
    }

    pub fn neg(&self, ctx: &FieldCtx) -> Self {
        TruncSeries {
            val: self.val,
            coeffs: self.coeffs.iter().map(|&c| ctx.neg(c)).collect(),
        }
    }

    pub fn scale(&self, ctx: &FieldCtx, c: Fq2) -> Self {
        if c.is_zero() {
            return Self::zero(self.abs_prec());
        }
        TruncSeries {
            val: self.val,
            coeffs: self.coeffs.iter().map(|&x| ctx.mul(x, c)).collect(),
        }
    }

    pub fn add(&self, ctx: &FieldCtx, other: &Self) -> Self {
        self.axpy(ctx, Fq2::ONE, other)
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &Self) -> Self {
        self.axpy(ctx, ctx.neg(Fq2::ONE), other)
    }

    /// self + c * other, truncated to the smaller absolute precision.
    pub fn axpy(&self, ctx: &FieldCtx, c: Fq2, other: &Self) -> Self {
        let prec = self.abs_prec().min(other.abs_prec());
        let lo = match (self.is_zero(), other.is_zero() || c.is_zero()) {
            (true, true) => return Self::zero(prec),
            (true, false) => other.val,
            (false, true) => self.val,
            (false, false) => self.val.min(other.val),
        };
        if lo >= prec {
            return Self::zero(prec);
        }
        let mut coeffs = vec![Fq2::ZERO; (prec - lo) as usize];
        for (k, &x) in self.coeffs.iter().enumerate() {
            let e = self.val + k as i64;
            if e >= prec {
                break;
            }
            coeffs[(e - lo) as usize] = x;
        }
        if !c.is_zero() {
            for (k, &x) in other.coeffs.iter().enumerate() {
                let e = other.val + k as i64;
                if e >= prec {
                    break;
                }
                let slot = &mut coeffs[(e - lo) as usize];
                *slot = ctx.add(*slot, ctx.mul(c, x));
            }
        }
        Self::from_coeffs(lo, coeffs)
    }

    /// Product; relative precision is the smaller of the two.
    pub fn mul(&self, ctx: &FieldCtx, other: &Self) -> Self {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Self::zero(self.val + other.val),
            (true, false) => return Self::zero(self.val + other.val),
            (false, true) => return Self::zero(self.val + other.val),
            (false, false) => {}
        }
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut coeffs = vec![Fq2::ZERO; n];
        for (i, &x) in self.coeffs[..n].iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (k, &y) in other.coeffs[..n - i].iter().enumerate() {
                let slot = &mut coeffs[i + k];
                *slot = ctx.add(*slot, ctx.mul(x, y));
            }
        }
        Self::from_coeffs(self.val + other.val, coeffs)
    }

    /// Multiplicative inverse, valuation -val.
    pub fn inv(&self, ctx: &FieldCtx) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NonInvertibleSeries);
        }
        let n = self.coeffs.len();
        let r0 = ctx.inv(self.coeffs[0])?;
        let minus_r0 = ctx.neg(r0);
        let mut r = Vec::with_capacity(n);
        r.push(r0);
        for k in 1..n {
            let mut acc = Fq2::ZERO;
            for i in 1..=k {
                acc = ctx.add(acc, ctx.mul(self.coeffs[i], r[k - i]));
            }
            r.push(ctx.mul(minus_r0, acc));
        }
        Ok(Self::from_coeffs(-self.val, r))
    }

    /// Square root with constant term 1 of a series 1 + b_1 t + ...,
    /// via c_k = (b_k - sum_{l=1}^{k-1} c_l c_{k-l}) / 2.
    pub fn sqrt_one(&self, ctx: &FieldCtx) -> Result<Self> {
        if self.is_zero() || self.val != 0 || self.coeffs[0] != Fq2::ONE {
            return Err(Error::SqrtBranchUndefined);
        }
        let b = &self.coeffs;
        let half = ctx.half();
        let mut c = Vec::with_capacity(b.len());
        c.push(Fq2::ONE);
        for k in 1..b.len() {
            let mut acc = b[k];
            for l in 1..k {
                acc = ctx.sub(acc, ctx.mul(c[l], c[k - l]));
            }
            c.push(ctx.mul(half, acc));
        }
        Ok(Self::from_coeffs(0, c))
    }

    /// n-th power; negative n goes through the inverse.
    pub fn pow(&self, ctx: &FieldCtx, n: i64) -> Result<Self> {
        if n < 0 {
            return self.inv(ctx)?.pow(ctx, -n);
        }
        if n == 0 {
            return Ok(Self::one(self.coeffs.len().max(1) - 1));
        }
        let mut base = self.clone();
        let mut acc: Option<Self> = None;
        let mut e = n as u64;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(ctx, &base),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(ctx, &base);
        }
        Ok(acc.expect("n > 0"))
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match self.val + k as i64 {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*t")?,
                e => write!(f, "({c})*t^{e}")?,
            }
        }
        if !first {
            write!(f, " + ")?;
        }
        write!(f, "O(t^{})", self.abs_prec())
    }
}
