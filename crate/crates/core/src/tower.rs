//! Combinatorics of the tower x_{j+1}^2 = (x_j^2 + 1) / (2 x_j): genus,
//! degrees of the divisors D_r^j, the principal divisors of x_j and 1 + x_j,
//! and restriction of Galois-invariant divisors one level down.
//!
//! Place notation: `P_inf^k` is the unique pole of x_0, `D_r^k` for
//! r = -2..k-1 is the sum of places over `P_-1^r` (with `D_-2 = P_0` and
//! `D_-1 = P_i + P_-i`), and `P_-1^k = D_k^k` is kept in its own slot.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

/// Genus of T_j by the closed form.
pub fn genus(j: usize) -> i64 {
    if j.is_multiple_of(2) {
        ((1i64 << ((j + 2) / 2)) - 1) * ((1i64 << (j / 2)) - 1)
    } else {
        let a = (1i64 << j.div_ceil(2)) - 1;
        a * a
    }
}

/// Degree of the ramification locus R_j of T_{j+1}/T_j.
fn ramification_degree(j: usize) -> i64 {
    if j % 2 == 1 {
        1i64 << ((j + 3) / 2)
    } else {
        1i64 << ((j + 4) / 2)
    }
}

/// Genus by iterating Riemann-Hurwitz, g_{j+1} = 2 g_j - 1 + R_j / 2.
pub fn genus_riemann_hurwitz(j: usize) -> i64 {
    (0..j).fold(0, |g, k| 2 * g - 1 + ramification_degree(k) / 2)
}

/// Genus by the two-step recursion g_{j+2} = 4 g_j + ... with g_0 = 0, g_1 = 1.
pub fn genus_two_step(j: usize) -> i64 {
    match j {
        0 => 0,
        1 => 1,
        _ => {
            let i = j - 2;
            let g = genus_two_step(i);
            if i.is_multiple_of(2) {
                4 * g + 3 * (1i64 << ((i + 2) / 2)) - 3
            } else {
                4 * g + (1i64 << ((i + 5) / 2)) - 3
            }
        }
    }
}

/// deg(D_r^j) for -2 <= r <= j.
pub fn divisor_degree(j: usize, r: i64) -> Result<i64> {
    let ji = j as i64;
    if r < -2 || r > ji {
        return Err(Error::InvalidRamificationIndex { level: j, r });
    }
    Ok(if ji <= 2 * r + 2 {
        1i64 << (ji - r)
    } else {
        1i64 << (r + 2)
    })
}

/// Whether the places of D_r^k ramify in T_k / T_{k-1} (k >= 1).
pub fn is_ramified(k: usize, r: i64) -> bool {
    k as i64 >= 2 * r + 3
}

/// A divisor on level k supported on P_inf, D_-2..D_{k-1} and P_-1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Divisor {
    level: usize,
    pub a_inf: i64,
    /// coefficient of D_r at index r + 2, r = -2..level-1
    a: Vec<i64>,
    pub a_m1: i64,
}

impl Divisor {
    pub fn zero(level: usize) -> Self {
        Divisor {
            level,
            a_inf: 0,
            a: vec![0; level + 2],
            a_m1: 0,
        }
    }

    /// s * P_inf^k
    pub fn at_infinity(level: usize, s: i64) -> Self {
        let mut d = Self::zero(level);
        d.a_inf = s;
        d
    }

    pub fn level(&self) -> usize {
        self.level
    }

    fn check_r(&self, r: i64) {
        assert!(
            (-2..self.level as i64).contains(&r),
            "D_{r} is not a D-slot on level {}",
            self.level
        );
    }

    /// Coefficient of D_r, r in -2..level-1.
    pub fn coef(&self, r: i64) -> i64 {
        self.check_r(r);
        self.a[(r + 2) as usize]
    }

    pub fn set_coef(&mut self, r: i64, v: i64) {
        self.check_r(r);
        self.a[(r + 2) as usize] = v;
    }

    /// Coefficients of D_-2 .. D_{level-1}.
    pub fn d_coefs(&self) -> &[i64] {
        &self.a
    }

    pub fn add(&self, other: &Divisor) -> Result<Divisor> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        Ok(Divisor {
            level: self.level,
            a_inf: self.a_inf + other.a_inf,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
            a_m1: self.a_m1 + other.a_m1,
        })
    }

    pub fn scale(&self, c: i64) -> Divisor {
        Divisor {
            level: self.level,
            a_inf: c * self.a_inf,
            a: self.a.iter().map(|x| c * x).collect(),
            a_m1: c * self.a_m1,
        }
    }

    pub fn degree(&self) -> i64 {
        let k = self.level;
        let d_part: i64 = (-2..k as i64)
            .map(|r| self.coef(r) * divisor_degree(k, r).expect("r in range"))
            .sum();
        self.a_inf + d_part + self.a_m1
    }

    pub fn is_invariant(&self) -> bool {
        self.a_m1 == 0
    }

    /// Restriction to T_{k-1}: ramified coefficients are halved (floor),
    /// unramified ones carried over, and D_{k-1}^k lands on P_-1^{k-1}.
    pub fn restrict(&self) -> Result<Divisor> {
        let k = self.level;
        assert!(k >= 1, "restriction needs level >= 1");
        if self.a_m1 != 0 {
            return Err(Error::NotInvariant(self.a_m1));
        }
        let mut out = Divisor::zero(k - 1);
        out.a_inf = self.a_inf.div_euclid(2);
        for r in -2..k as i64 - 1 {
            let v = self.coef(r);
            out.set_coef(r, if is_ramified(k, r) { v.div_euclid(2) } else { v });
        }
        out.a_m1 = self.coef(k as i64 - 1);
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let mut d = Map::new();
        for r in -2..self.level as i64 {
            d.insert(r.to_string(), json!(self.coef(r)));
        }
        json!({"level": self.level, "inf": self.a_inf, "d": d, "m1": self.a_m1})
    }

    pub fn from_json(v: &Value) -> Result<Divisor> {
        let bad = |what: &str| Error::Parse(format!("divisor: {what}"));
        let level = v["level"].as_u64().ok_or_else(|| bad("level"))? as usize;
        let mut out = Divisor::zero(level);
        out.a_inf = v["inf"].as_i64().ok_or_else(|| bad("inf"))?;
        out.a_m1 = v["m1"].as_i64().ok_or_else(|| bad("m1"))?;
        let d = v["d"].as_object().ok_or_else(|| bad("d"))?;
        for (key, val) in d {
            let r: i64 = key.parse().map_err(|_| bad("d key"))?;
            if !(-2..level as i64).contains(&r) {
                return Err(Error::InvalidRamificationIndex { level, r });
            }
            out.set_coef(r, val.as_i64().ok_or_else(|| bad("d value"))?);
        }
        Ok(out)
    }
}

/// Shared pole part of (x_j) and (1 + x_j) for j >= 2, without P_inf.
fn pole_part(j: usize, d: &mut Divisor) {
    let ji = j as i64;
    for r in -2..=(ji - 3).div_euclid(2) {
        d.set_coef(r, -1);
    }
    for r in (ji - 1).div_euclid(2)..=ji - 3 {
        d.set_coef(r, -(1i64 << (2 * r - ji + 2)));
    }
}

/// The principal divisor (x_j) on level j.
pub fn principal_x(j: usize) -> Divisor {
    let mut d = Divisor::zero(j);
    d.a_inf = -1;
    match j {
        0 => d.set_coef(-2, 1),
        1 => {
            d.set_coef(-2, -1);
            d.set_coef(-1, 1);
        }
        _ => {
            pole_part(j, &mut d);
            d.set_coef(j as i64 - 2, 1i64 << (j - 2));
        }
    }
    d
}

/// The principal divisor (1 + x_j) on level j.
pub fn principal_one_plus_x(j: usize) -> Divisor {
    let mut d = Divisor::zero(j);
    d.a_inf = -1;
    match j {
        0 => d.a_m1 = 1,
        1 => {
            d.set_coef(-2, -1);
            d.a_m1 = 2;
        }
        _ => {
            pole_part(j, &mut d);
            d.a_m1 = 1i64 << j;
        }
    }
    d
}
