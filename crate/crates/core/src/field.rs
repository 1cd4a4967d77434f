//! Arithmetic in F_p and F_{p^2} for odd primes p.
//!
//! F_{p^2} is modelled as F_p[u]/(u^2 - d) where d is the smallest positive
//! quadratic non-residue modulo p. Elements are plain `Copy` pairs; all
//! arithmetic goes through a [`FieldCtx`], which owns the modulus.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An element a + b*u of F_{p^2}, with 0 <= a, b < p.
///
/// The derived ordering is lexicographic on (a, b); it is the order used
/// to pick canonical square roots and to sort places.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fq2 {
    pub a: u32,
    pub b: u32,
}

impl Fq2 {
    pub const ZERO: Fq2 = Fq2 { a: 0, b: 0 };
    pub const ONE: Fq2 = Fq2 { a: 1, b: 0 };

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }
}

impl fmt::Display for Fq2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*u", self.a, self.b)
    }
}

/// Parses the `a+b*u` form. Range checks against a prime happen in
/// [`FieldCtx::parse`].
impl FromStr for Fq2 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("field element {s:?}"));
        let (a, rest) = s.trim().split_once('+').ok_or_else(bad)?;
        let b = rest.strip_suffix("*u").ok_or_else(bad)?;
        Ok(Fq2 {
            a: a.parse().map_err(|_| bad())?,
            b: b.parse().map_err(|_| bad())?,
        })
    }
}

/// Field context: the prime p, the non-residue d with u^2 = d, and a fixed
/// square root of -1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCtx {
    p: u32,
    d: u32,
    i_elem: Fq2,
    /// First non-square of F_{p^2} in lexicographic order, for Tonelli-Shanks.
    non_square: Fq2,
    /// p^2 - 1 = 2^two_adicity * odd_part
    two_adicity: u32,
    odd_part: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

fn pow_mod(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Builds the context for F_{p^2}. Fails with "invalid prime" when p is not
/// an odd prime fitting in 32 bits.
pub fn make_field_ctx(p: u64) -> Result<FieldCtx> {
    if p < 3 || p.is_multiple_of(2) || p > u32::MAX as u64 || !is_prime(p) {
        return Err(Error::InvalidPrime(p));
    }
    let d = (2..p)
        .find(|&d| pow_mod(d, (p - 1) / 2, p) == p - 1)
        .expect("odd prime has a non-residue");
    let q1 = p * p - 1;
    let two_adicity = q1.trailing_zeros();
    let mut ctx = FieldCtx {
        p: p as u32,
        d: d as u32,
        i_elem: Fq2::ZERO,
        non_square: Fq2::ZERO,
        two_adicity,
        odd_part: q1 >> two_adicity,
    };
    let non_square = ctx
        .elements()
        .find(|&x| !x.is_zero() && !ctx.is_square(x))
        .expect("F_{p^2} has non-squares");
    ctx.non_square = non_square;
    let minus_one = ctx.neg(Fq2::ONE);
    ctx.i_elem = ctx.sqrt(minus_one).expect("-1 is a square in F_{p^2}");
    Ok(ctx)
}

impl FieldCtx {
    pub fn p(&self) -> u32 {
        self.p
    }

    /// The non-residue d with u^2 = d.
    pub fn d(&self) -> u32 {
        self.d
    }

    /// The canonical square root of -1.
    pub fn i_elem(&self) -> Fq2 {
        self.i_elem
    }

    pub fn order(&self) -> u64 {
        self.p as u64 * self.p as u64
    }

    pub fn elem(&self, a: u64, b: u64) -> Fq2 {
        let p = self.p as u64;
        Fq2 {
            a: (a % p) as u32,
            b: (b % p) as u32,
        }
    }

    pub fn from_i64(&self, n: i64) -> Fq2 {
        let p = self.p as i64;
        Fq2 {
            a: n.rem_euclid(p) as u32,
            b: 0,
        }
    }

    /// Parses "a+b*u" and rejects residues out of range.
    pub fn parse(&self, s: &str) -> Result<Fq2> {
        let x: Fq2 = s.parse()?;
        if x.a >= self.p || x.b >= self.p {
            return Err(Error::Parse(format!("{s:?} is not reduced mod {}", self.p)));
        }
        Ok(x)
    }

    /// Element with index `idx` in lexicographic order, 0 <= idx < p^2.
    pub fn elem_at(&self, idx: u64) -> Fq2 {
        let p = self.p as u64;
        Fq2 {
            a: (idx / p) as u32,
            b: (idx % p) as u32,
        }
    }

    /// All p^2 elements in lexicographic order of (a, b).
    pub fn elements(&self) -> impl Iterator<Item = Fq2> + '_ {
        (0..self.order()).map(move |i| self.elem_at(i))
    }

    #[inline]
    pub fn add(&self, x: Fq2, y: Fq2) -> Fq2 {
        let p = self.p as u64;
        Fq2 {
            a: ((x.a as u64 + y.a as u64) % p) as u32,
            b: ((x.b as u64 + y.b as u64) % p) as u32,
        }
    }

    #[inline]
    pub fn neg(&self, x: Fq2) -> Fq2 {
        let p = self.p;
        Fq2 {
            a: if x.a == 0 { 0 } else { p - x.a },
            b: if x.b == 0 { 0 } else { p - x.b },
        }
    }

    #[inline]
    pub fn sub(&self, x: Fq2, y: Fq2) -> Fq2 {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: Fq2, y: Fq2) -> Fq2 {
        let p = self.p as u64;
        let (xa, xb, ya, yb) = (x.a as u64, x.b as u64, y.a as u64, y.b as u64);
        let bb = xb * yb % p * self.d as u64 % p;
        Fq2 {
            a: ((xa * ya % p + bb) % p) as u32,
            b: ((xa * yb % p + xb * ya % p) % p) as u32,
        }
    }

    pub fn square(&self, x: Fq2) -> Fq2 {
        self.mul(x, x)
    }

    /// x^e for e >= 0.
    pub fn pow(&self, mut x: Fq2, mut e: u64) -> Fq2 {
        let mut acc = Fq2::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        acc
    }

    /// The norm a^2 - d b^2, an element of F_p.
    fn norm(&self, x: Fq2) -> u64 {
        let p = self.p as u64;
        let aa = x.a as u64 * x.a as u64 % p;
        let bb = x.b as u64 * x.b as u64 % p * self.d as u64 % p;
        (aa + p - bb) % p
    }

    /// Inverse via x^{-1} = conj(x) / N(x).
    pub fn inv(&self, x: Fq2) -> Result<Fq2> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.p as u64;
        let n_inv = pow_mod(self.norm(x), p - 2, p);
        let conj = Fq2 {
            a: x.a,
            b: if x.b == 0 { 0 } else { self.p - x.b },
        };
        Ok(self.mul(conj, Fq2 { a: n_inv as u32, b: 0 }))
    }

    pub fn div(&self, x: Fq2, y: Fq2) -> Result<Fq2> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// Inverse of 2, which exists because p is odd.
    pub fn half(&self) -> Fq2 {
        Fq2 {
            a: self.p.div_ceil(2),
            b: 0,
        }
    }

    pub fn is_square(&self, x: Fq2) -> bool {
        x.is_zero() || self.pow(x, (self.order() - 1) / 2) == Fq2::ONE
    }

    /// Square root in F_{p^2} by Tonelli-Shanks, returning the
    /// lexicographically smaller of the two roots, or `None` for non-squares.
    pub fn sqrt(&self, x: Fq2) -> Option<Fq2> {
        if x.is_zero() {
            return Some(Fq2::ZERO);
        }
        if !self.is_square(x) {
            return None;
        }
        let mut m = self.two_adicity;
        let mut c = self.pow(self.non_square, self.odd_part);
        let mut t = self.pow(x, self.odd_part);
        let mut r = self.pow(x, self.odd_part.div_ceil(2));
        while t != Fq2::ONE {
            // least i with t^(2^i) = 1
            let mut i = 0;
            let mut t2 = t;
            while t2 != Fq2::ONE {
                t2 = self.square(t2);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = self.square(b);
            }
            m = i;
            c = self.square(b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        let other = self.neg(r);
        Some(r.min(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_elem(ctx: &FieldCtx, rng: &mut ChaCha8Rng) -> Fq2 {
        ctx.elem_at(rng.gen_range(0..ctx.order()))
    }

    #[test]
    fn non_residue_choice() {
        // squares mod 3: {0,1}; mod 7: {0,1,2,4}
        assert_eq!(make_field_ctx(3).unwrap().d(), 2);
        assert_eq!(make_field_ctx(7).unwrap().d(), 3);
        assert_eq!(make_field_ctx(5).unwrap().d(), 2);
        assert_eq!(make_field_ctx(11).unwrap().d(), 2);
    }

    #[test]
    fn rejects_bad_primes() {
        for p in [0, 1, 2, 4, 9, 15, 21] {
            assert_eq!(make_field_ctx(p), Err(Error::InvalidPrime(p)));
        }
        assert_eq!(
            make_field_ctx(2).unwrap_err().to_string(),
            "invalid prime: 2"
        );
    }

    #[test]
    fn inverses_p3() {
        let ctx = make_field_ctx(3).unwrap();
        assert_eq!(ctx.inv(ctx.elem(2, 0)).unwrap(), ctx.elem(2, 0));
        let u = ctx.elem(0, 1);
        let inv_u = ctx.inv(u).unwrap();
        assert_eq!(inv_u, ctx.elem(0, 2));
        assert_eq!(ctx.mul(u, inv_u), Fq2::ONE);
        assert_eq!(ctx.inv(Fq2::ZERO), Err(Error::DivisionByZero));
    }

    #[test]
    fn sqrt_examples_p3() {
        let ctx = make_field_ctx(3).unwrap();
        assert_eq!(ctx.sqrt(Fq2::ONE), Some(Fq2::ONE));
        assert_eq!(ctx.sqrt(ctx.elem(2, 0)), Some(ctx.elem(0, 1)));
        // Brute-force the squares of F_9^* and pick a non-square witness.
        let squares: std::collections::BTreeSet<Fq2> = ctx
            .elements()
            .filter(|x| !x.is_zero())
            .map(|x| ctx.square(x))
            .collect();
        assert_eq!(squares.len(), 4);
        let witness = ctx
            .elements()
            .find(|x| !x.is_zero() && !squares.contains(x))
            .unwrap();
        assert_eq!(ctx.sqrt(witness), None);
    }

    #[test]
    fn i_squared_is_minus_one() {
        for p in [3, 5, 7, 11, 13, 101] {
            let ctx = make_field_ctx(p).unwrap();
            let i = ctx.i_elem();
            assert_eq!(ctx.add(ctx.square(i), Fq2::ONE), Fq2::ZERO);
            assert!(i <= ctx.neg(i));
        }
    }

    #[test]
    fn sqrt_exhaustive_small_fields() {
        for p in [3, 5] {
            let ctx = make_field_ctx(p).unwrap();
            for x in ctx.elements() {
                let x2 = ctx.square(x);
                let r = ctx.sqrt(x2).unwrap();
                assert_eq!(ctx.square(r), x2);
                assert!(r <= ctx.neg(r));
            }
            let n_squares = ctx.elements().filter(|&x| ctx.sqrt(x).is_some()).count();
            assert_eq!(n_squares as u64, (ctx.order() - 1) / 2 + 1);
        }
    }

    #[test]
    fn frobenius_fixes_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [3, 5, 7, 11] {
            let ctx = make_field_ctx(p).unwrap();
            for _ in 0..200 {
                let x = random_elem(&ctx, &mut rng);
                assert_eq!(ctx.pow(x, ctx.order()), x);
            }
        }
    }

    #[test]
    fn field_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in [3, 5, 7, 11] {
            let ctx = make_field_ctx(p).unwrap();
            for _ in 0..100 {
                let (x, y, z) = (
                    random_elem(&ctx, &mut rng),
                    random_elem(&ctx, &mut rng),
                    random_elem(&ctx, &mut rng),
                );
                assert_eq!(ctx.mul(ctx.mul(x, y), z), ctx.mul(x, ctx.mul(y, z)));
                assert_eq!(ctx.add(ctx.add(x, y), z), ctx.add(x, ctx.add(y, z)));
                assert_eq!(
                    ctx.mul(x, ctx.add(y, z)),
                    ctx.add(ctx.mul(x, y), ctx.mul(x, z))
                );
                assert_eq!(ctx.mul(x, y), ctx.mul(y, x));
                if !x.is_zero() {
                    assert_eq!(ctx.mul(x, ctx.inv(x).unwrap()), Fq2::ONE);
                }
            }
        }
    }

    #[test]
    fn display_round_trip() {
        let ctx = make_field_ctx(7).unwrap();
        let x = ctx.elem(2, 1);
        assert_eq!(x.to_string(), "2+1*u");
        assert_eq!(ctx.parse("2+1*u").unwrap(), x);
        assert!(ctx.parse("9+1*u").is_err());
        assert!(ctx.parse("2+1").is_err());
    }
}
