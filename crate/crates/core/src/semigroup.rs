//! The Weierstrass semigroup H(P_inf^j) read off the master ladder: s is a
//! pole number iff s = 2^j q + m with q >= c_m.

use std::fmt;

use serde_json::{json, Value};

use crate::ladder::MasterLadder;
use crate::tower::genus;

pub fn member(ladder: &MasterLadder, s: i64) -> bool {
    if s < 0 {
        return false;
    }
    let pj = 1i64 << ladder.j;
    s.div_euclid(pj) >= ladder.c[s.rem_euclid(pj) as usize]
}

/// H as maximal finite intervals followed by the tail [tail, inf).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Semigroup {
    pub j: usize,
    pub intervals: Vec<(i64, i64)>,
    pub tail: i64,
}

impl Semigroup {
    pub fn genus(&self) -> i64 {
        genus(self.j)
    }

    pub fn contains(&self, s: i64) -> bool {
        s >= self.tail || self.intervals.iter().any(|&(a, b)| a <= s && s <= b)
    }

    /// Sorted complement of H in [0, tail).
    pub fn gaps(&self) -> Vec<i64> {
        (0..self.tail).filter(|&s| !self.contains(s)).collect()
    }

    pub fn to_json(&self) -> Value {
        let iv: Vec<Value> = self.intervals.iter().map(|&(a, b)| json!([a, b])).collect();
        json!({"j": self.j, "intervals": iv, "tail": self.tail, "genus": self.genus()})
    }
}

impl fmt::Display for Semigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(a, b) in &self.intervals {
            if a == b {
                write!(f, "{a}; ")?;
            } else {
                write!(f, "{a}-{b}; ")?;
            }
        }
        write!(f, "{}-inf", self.tail)
    }
}

/// Scans [0, 2g] (no gap exceeds 2g - 1) and compresses to intervals.
pub fn intervals(ladder: &MasterLadder) -> Semigroup {
    let end = 2 * genus(ladder.j);
    let mut runs: Vec<(i64, i64)> = Vec::new();
    for s in 0..=end {
        if !member(ladder, s) {
            continue;
        }
        match runs.last_mut() {
            Some(last) if last.1 + 1 == s => last.1 = s,
            _ => runs.push((s, s)),
        }
    }
    let (tail, _) = runs.pop().expect("2g is a pole number");
    Semigroup {
        j: ladder.j,
        intervals: runs,
        tail,
    }
}

pub fn gaps(ladder: &MasterLadder) -> Vec<i64> {
    intervals(ladder).gaps()
}

/// {2^j} together with the pole orders 2^j c_m + m, 0 < m < 2^j.
pub fn generators(ladder: &MasterLadder) -> Vec<i64> {
    let mut g = vec![1i64 << ladder.j];
    g.extend((1..ladder.c.len()).map(|m| ladder.pole_order(m)));
    g
}

/// Membership table of the numerical semigroup generated by `gens` on [0, bound].
pub fn closure(gens: &[i64], bound: i64) -> Vec<bool> {
    let mut reach = vec![false; bound as usize + 1];
    reach[0] = true;
    for s in 1..=bound {
        reach[s as usize] = gens
            .iter()
            .any(|&g| g > 0 && g <= s && reach[(s - g) as usize]);
    }
    reach
}
