//! Divisor ladders and the bases they produce.
//!
//! `build_updown` walks down from level j-1 to 0 computing the divisors
//! A^k_n and B^k_n with their P_inf coefficient kept as an offset inside
//! floor((s + a) / 2^(j-k)). The rows then walk back up: base rows on the
//! rational level, peeling at P_-1^k, the (1 + x_k)^gamma twist and the
//! x_{k+1} split, ending in the twisted ladder of level j and the master
//! ladder of L(s P_inf^j).
//!
//! Every row carries two expansions in t = 1 - x_0: one around P_-1^k
//! (used for peeling) and one around P_1^k (the germ that becomes both
//! P_1^{k+1} and P_-1^{k+1} one level up). The symbolic function is
//! optional; without it only the integers c are produced, which is all the
//! semigroup needs.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{FieldCtx, Fq2};
use crate::funcrep::{Expander, Monomial, TowerFunction};
use crate::series::TruncSeries;
use crate::tower::{principal_one_plus_x, principal_x, Divisor};

/// Format version of the ladder cache file.
pub const CACHE_FORMAT_VERSION: u32 = 1;

/// One (k, n) entry of the up-down tables. The divisors have their P_inf
/// coefficient set to zero; it is floor((s + a) / 2^(j-k)) for `adiv` and
/// floor((s + b) / 2^(j-k)) for `bdiv`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpDownEntry {
    pub a: i64,
    pub b: i64,
    pub adiv: Divisor,
    pub bdiv: Divisor,
    pub alpha: i64,
    pub gamma: i64,
    pub delta: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpDownTables {
    j: usize,
    /// levels[k][n - 1]
    levels: Vec<Vec<UpDownEntry>>,
}

impl UpDownTables {
    pub fn j(&self) -> usize {
        self.j
    }

    /// Entry for level k and branch n (1-based).
    pub fn entry(&self, k: usize, n: usize) -> &UpDownEntry {
        &self.levels[k][n - 1]
    }

    pub fn level(&self, k: usize) -> &[UpDownEntry] {
        &self.levels[k]
    }
}

fn check_odd_residues(vals: impl Iterator<Item = i64>, modulus: i64, what: &str) -> Result<()> {
    let mut seen = vec![false; modulus as usize];
    for v in vals {
        let r = v.rem_euclid(modulus);
        if r % 2 == 0 || seen[r as usize] {
            return Err(Error::LadderInconsistency(format!(
                "{what} residues mod {modulus} are not the odd classes"
            )));
        }
        seen[r as usize] = true;
    }
    if seen.iter().filter(|&&x| x).count() as i64 != modulus / 2 {
        return Err(Error::LadderInconsistency(format!(
            "{what} residues mod {modulus} are incomplete"
        )));
    }
    Ok(())
}

fn without_infinity(mut d: Divisor) -> Divisor {
    d.a_inf = 0;
    d
}

/// Divisors A^k_n, B^k_n and their integers for 0 <= k < j.
pub fn build_updown(j: usize) -> Result<UpDownTables> {
    if j == 0 {
        return Err(Error::LadderInconsistency("up-down tables need j >= 1".into()));
    }
    let mut levels: Vec<Vec<UpDownEntry>> = vec![Vec::new(); j];
    for k in (0..j).rev() {
        let count = 1usize << (j - k - 1);
        let mut entries = Vec::with_capacity(count);
        for n in 1..=count {
            let (a, adiv) = if k == j - 1 {
                (-1, without_infinity(principal_x(j)).restrict()?)
            } else {
                let parent = &levels[k + 1][n.div_ceil(2) - 1];
                if n % 2 == 1 {
                    (parent.b, parent.bdiv.restrict()?)
                } else {
                    let d = without_infinity(parent.bdiv.add(&principal_x(k + 1))?);
                    (parent.b - (1i64 << (j - k - 1)), d.restrict()?)
                }
            };
            let alpha = adiv.a_m1;
            let pk = 1i64 << k;
            let gamma = (-alpha).div_euclid(pk);
            let delta = (-alpha).rem_euclid(pk);
            let mut bdiv = adiv.add(&principal_one_plus_x(k).scale(gamma))?;
            bdiv.a_m1 += delta;
            if bdiv.a_m1 != 0 {
                return Err(Error::LadderInconsistency(format!(
                    "B^{k}_{n} has P_-1 coefficient {}",
                    bdiv.a_m1
                )));
            }
            let bdiv = without_infinity(bdiv);
            let b = a - (1i64 << (j - k)) * gamma;
            entries.push(UpDownEntry {
                a,
                b,
                adiv,
                bdiv,
                alpha,
                gamma,
                delta,
            });
        }
        let modulus = 1i64 << (j - k);
        check_odd_residues(entries.iter().map(|e| e.a), modulus, "a")?;
        check_odd_residues(entries.iter().map(|e| e.b), modulus, "b")?;
        levels[k] = entries;
    }
    Ok(UpDownTables { j, levels })
}

/// A row of the ladder: the family x_0^l z, 0 <= l <= floor((s - b) / 2^j) - d.
/// After step 2 on a level `d` plays the role of c and `z` of w.
#[derive(Clone, Debug)]
pub struct LadderRow {
    pub m: usize,
    pub b: i64,
    pub d: i64,
    pub z: Option<TowerFunction>,
    /// expansion around P_1^k
    plus: TruncSeries,
    /// expansion around P_-1^k (equal to `plus` on level 0, where it is unused)
    minus: TruncSeries,
}

impl LadderRow {
    pub fn plus(&self) -> &TruncSeries {
        &self.plus
    }

    pub fn minus(&self) -> &TruncSeries {
        &self.minus
    }
}

/// Generator expansions on the P_1 branch shared by all rows of one run.
struct Germs<'a> {
    ctx: &'a FieldCtx,
    /// x_0..x_{j-1}
    x: Vec<TruncSeries>,
    order: usize,
}

impl<'a> Germs<'a> {
    fn new(ex: &'a Expander, j: usize, order: usize) -> Self {
        Germs {
            ctx: ex.ctx(),
            x: ex.plus_branch(j.saturating_sub(1), order),
            order,
        }
    }

    fn one_plus_x(&self, k: usize) -> TruncSeries {
        TruncSeries::one(self.order).add(self.ctx, &self.x[k])
    }

    fn s(&self) -> TruncSeries {
        let x0 = &self.x[0];
        TruncSeries::one(self.order).add(self.ctx, &x0.mul(self.ctx, x0))
    }
}

/// Rows of L(B^0_n), n = 1..2^(j-1), one per n.
pub fn base_rows(
    ex: &Expander,
    t: &UpDownTables,
    order: usize,
    symbolic: bool,
) -> Result<Vec<LadderRow>> {
    let germs = Germs::new(ex, t.j, order);
    base_rows_with(&germs, t, symbolic)
}

fn base_rows_with(germs: &Germs, t: &UpDownTables, symbolic: bool) -> Result<Vec<LadderRow>> {
    let ctx = germs.ctx;
    let pj = 1i64 << t.j;
    let s = germs.s();
    t.level(0)
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let beta2 = e.bdiv.coef(-2);
            let beta1 = e.bdiv.coef(-1);
            let q = (-e.b).div_euclid(pj);
            let b = (-e.b).rem_euclid(pj);
            let plus = germs.x[0]
                .pow(ctx, -beta2)?
                .mul(ctx, &s.pow(ctx, -beta1)?);
            let z = if symbolic {
                let mono = Monomial::x(0, -beta2).mul(&Monomial::s(-beta1));
                Some(TowerFunction::monomial(0, mono)?)
            } else {
                None
            };
            Ok(LadderRow {
                m: i + 1,
                b,
                d: q - beta2 - 2 * beta1,
                z,
                minus: plus.clone(),
                plus,
            })
        })
        .collect()
}

/// Indices of `keys` = (d, b) sorted strictly descending.
pub fn sigma_order(keys: &[(i64, i64)]) -> Result<Vec<usize>> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&x, &y| keys[y].cmp(&keys[x]));
    for w in idx.windows(2) {
        if keys[w[0]] == keys[w[1]] {
            let (d, b) = keys[w[0]];
            return Err(Error::OrderingNotUnique(d, b));
        }
    }
    Ok(idx)
}

/// One elimination step at P_-1^k for the rows of a single branch, all of
/// which vanish to order at least `eps` there.
pub fn peel_once(ctx: &FieldCtx, rows: &mut [LadderRow], eps: i64) -> Result<()> {
    let mut values = Vec::with_capacity(rows.len());
    for r in rows.iter() {
        if !r.minus.is_zero() && r.minus.val() < eps {
            return Err(Error::ValuationViolation { m: r.m, eps });
        }
        values.push(r.minus.coeff(eps)?);
    }
    let keys: Vec<(i64, i64)> = rows.iter().map(|r| (r.d, r.b)).collect();
    let sigma = sigma_order(&keys)?;
    let pivot = *sigma
        .iter()
        .rev()
        .find(|&&i| !values[i].is_zero())
        .ok_or(Error::MissingLeadingCoefficient(eps))?;
    let pivot_inv = ctx.inv(values[pivot])?;
    let (p_plus, p_minus, p_z) = {
        let r = &rows[pivot];
        (r.plus.clone(), r.minus.clone(), r.z.clone())
    };
    for (i, r) in rows.iter_mut().enumerate() {
        if i == pivot {
            r.plus = r.plus.clone().shift(1);
            r.minus = r.minus.clone().shift(1);
            r.z = r.z.as_ref().map(|z| z.mul_one_minus_x0(ctx));
            r.d += 1;
        } else if !values[i].is_zero() {
            let c = ctx.neg(ctx.mul(values[i], pivot_inv));
            r.plus = r.plus.axpy(ctx, c, &p_plus);
            r.minus = r.minus.axpy(ctx, c, &p_minus);
            if let (Some(z), Some(pz)) = (r.z.as_ref(), p_z.as_ref()) {
                r.z = Some(TowerFunction::linear(ctx, Fq2::ONE, z, c, pz)?);
            }
        }
    }
    Ok(())
}

fn level_step2_with(
    germs: &Germs,
    k: usize,
    t: &UpDownTables,
    rows: &mut [LadderRow],
) -> Result<()> {
    let ctx = germs.ctx;
    let width = 1usize << k;
    let y = germs.one_plus_x(k);
    for (n0, branch) in rows.chunks_mut(width).enumerate() {
        let e = t.entry(k, n0 + 1);
        for eps in 0..e.delta {
            peel_once(ctx, branch, eps)?;
        }
        if e.gamma != 0 {
            let factor = y.pow(ctx, e.gamma)?;
            let mono = Monomial::y(k, e.gamma);
            for r in branch.iter_mut() {
                r.plus = r.plus.mul(ctx, &factor);
                r.z = r.z.as_ref().map(|z| z.mul_monomial(&mono)).transpose()?;
            }
        }
    }
    Ok(())
}

/// Turns B-bases of level k into A-bases: peel delta times per branch, then
/// twist by (1 + x_k)^gamma. Row values of d become the c of level k.
pub fn level_step2(
    ex: &Expander,
    k: usize,
    t: &UpDownTables,
    rows: &mut [LadderRow],
    order: usize,
) -> Result<()> {
    level_step2_with(&Germs::new(ex, t.j, order), k, t, rows)
}

fn level_step3_with(germs: &Germs, k: usize, rows: &mut [LadderRow]) -> Result<()> {
    let ctx = germs.ctx;
    let half = 1usize << k;
    let xk1 = &germs.x[k + 1];
    let neg_xk1 = xk1.neg(ctx);
    let mono = Monomial::x(k + 1, 1);
    for branch in rows.chunks_mut(2 * half) {
        for (off, r) in branch.iter_mut().enumerate() {
            let z = r.z.take().map(|z| z.lift(k + 1));
            if off >= half {
                r.minus = r.plus.mul(ctx, &neg_xk1);
                r.plus = r.plus.mul(ctx, xk1);
                r.z = z.map(|z| z.mul_monomial(&mono)).transpose()?;
            } else {
                r.minus = r.plus.clone();
                r.z = z;
            }
        }
    }
    Ok(())
}

/// Moves A-bases of level k to B-bases of level k + 1, multiplying the
/// second half of each new branch by x_{k+1}.
pub fn level_step3(
    ex: &Expander,
    k: usize,
    t: &UpDownTables,
    rows: &mut [LadderRow],
    order: usize,
) -> Result<()> {
    level_step3_with(&Germs::new(ex, t.j, order), k, rows)
}

/// Basis data for L([s P_inf^j + (x_j)] restricted to level j-1), indexed
/// by odd m: entry (m - 1) / 2 holds (c~_m, w~_m).
#[derive(Clone, Debug)]
pub struct TwistedLadder {
    pub j: usize,
    pub c: Vec<i64>,
    pub w: Option<Vec<TowerFunction>>,
}

fn run_rows(ex: &Expander, t: &UpDownTables, order: usize, symbolic: bool) -> Result<Vec<LadderRow>> {
    let germs = Germs::new(ex, t.j, order);
    let mut rows = base_rows_with(&germs, t, symbolic)?;
    for k in 0..t.j {
        level_step2_with(&germs, k, t, &mut rows)?;
        if k + 1 < t.j {
            level_step3_with(&germs, k, &mut rows)?;
        }
    }
    Ok(rows)
}

/// Final rows of the twisted ladder, before reindexing. The expansion
/// order starts at 2^(j-1) + 8 and doubles while precision runs out.
pub fn twisted_rows(ex: &Expander, j: usize, symbolic: bool) -> Result<Vec<LadderRow>> {
    let t = build_updown(j)?;
    let mut order = (1usize << (j - 1)) + 8;
    loop {
        match run_rows(ex, &t, order, symbolic) {
            Err(Error::PrecisionExhausted { .. }) if order < 1 << 16 => order *= 2,
            other => return other,
        }
    }
}

pub fn twisted_ladder(ex: &Expander, j: usize, symbolic: bool) -> Result<TwistedLadder> {
    let rows = twisted_rows(ex, j, symbolic)?;
    let half = 1usize << (j - 1);
    let mut c = vec![None; half];
    let mut w = vec![None; half];
    for r in rows {
        let slot = (r.b / 2) as usize;
        if r.b % 2 == 0 || slot >= half || c[slot].is_some() {
            return Err(Error::LadderInconsistency(format!(
                "b = {} is not a fresh odd residue mod {}",
                r.b,
                1 << j
            )));
        }
        c[slot] = Some(r.d);
        w[slot] = r.z;
    }
    let c = c.into_iter().map(|x| x.expect("all slots filled")).collect();
    let w = if symbolic {
        Some(w.into_iter().map(|x| x.expect("symbolic rows")).collect())
    } else {
        None
    };
    Ok(TwistedLadder { j, c, w })
}

/// Hermitian basis data of L(s P_inf^j): for 0 <= m < 2^j the family
/// x_0^l w_m, 0 <= l <= floor((s - m) / 2^j) - c_m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MasterLadder {
    pub j: usize,
    pub c: Vec<i64>,
    pub w: Option<Vec<TowerFunction>>,
}

impl MasterLadder {
    pub fn level0() -> Self {
        MasterLadder {
            j: 0,
            c: vec![0],
            w: Some(vec![TowerFunction::one(0)]),
        }
    }

    fn extend(&self, tw: &TwistedLadder) -> Result<MasterLadder> {
        let j = self.j + 1;
        debug_assert_eq!(tw.j, j);
        let size = 1usize << j;
        let c = (0..size)
            .map(|m| if m % 2 == 0 { self.c[m / 2] } else { tw.c[m / 2] })
            .collect();
        let w = match (&self.w, &tw.w) {
            (Some(prev), Some(odd)) => {
                let xj = Monomial::x(j, 1);
                let mut out = Vec::with_capacity(size);
                for m in 0..size {
                    out.push(if m % 2 == 0 {
                        prev[m / 2].lift(j)
                    } else {
                        odd[m / 2].lift(j).mul_monomial(&xj)?
                    });
                }
                Some(out)
            }
            _ => None,
        };
        Ok(MasterLadder { j, c, w })
    }

    /// Pole order of w_m at P_inf^j.
    pub fn pole_order(&self, m: usize) -> i64 {
        (1i64 << self.j) * self.c[m] + m as i64
    }

    /// Largest l for family m, negative when the family is empty.
    pub fn family_bound(&self, m: usize, s: i64) -> i64 {
        (s - m as i64).div_euclid(1i64 << self.j) - self.c[m]
    }

    /// dim L(s P_inf^j)
    pub fn dim(&self, s: i64) -> i64 {
        (0..self.c.len())
            .map(|m| (self.family_bound(m, s) + 1).max(0))
            .sum()
    }

    /// Basis x_0^l w_m of L(s P_inf^j), ordered by (m, l). Needs the functions.
    pub fn basis(&self, s: i64) -> Option<Vec<TowerFunction>> {
        let w = self.w.as_ref()?;
        let mut out = Vec::new();
        for (m, wm) in w.iter().enumerate() {
            for l in 0..=self.family_bound(m, s) {
                out.push(
                    wm.mul_monomial(&Monomial::x(0, l))
                        .expect("x_0 lives on every level"),
                );
            }
        }
        Some(out)
    }

    /// (m, l) labels of `basis(s)` with the pole order of each element.
    pub fn basis_labels(&self, s: i64) -> Vec<(usize, i64, i64)> {
        let pj = 1i64 << self.j;
        let mut out = Vec::new();
        for m in 0..self.c.len() {
            for l in 0..=self.family_bound(m, s) {
                out.push((m, l, self.pole_order(m) + l * pj));
            }
        }
        out
    }

    /// `{"p", "j", "rows": [{"m", "c", "w"}]}`; w is null without functions.
    pub fn to_json(&self, p: u32) -> Value {
        let rows: Vec<Value> = (0..self.c.len())
            .map(|m| {
                let w = match &self.w {
                    Some(w) => w[m].to_json(),
                    None => Value::Null,
                };
                json!({"m": m, "c": self.c[m], "w": w})
            })
            .collect();
        json!({"p": p, "j": self.j, "rows": rows})
    }

    pub fn from_json(ctx: &FieldCtx, v: &Value) -> Result<MasterLadder> {
        let bad = |what: &str| Error::Parse(format!("ladder json: {what}"));
        if v["p"].as_u64() != Some(ctx.p() as u64) {
            return Err(bad("prime mismatch"));
        }
        let j = v["j"].as_u64().ok_or_else(|| bad("j"))? as usize;
        let rows = v["rows"].as_array().ok_or_else(|| bad("rows"))?;
        if rows.len() != 1 << j {
            return Err(bad("row count"));
        }
        let mut c = Vec::with_capacity(rows.len());
        let mut w = Vec::with_capacity(rows.len());
        for (m, r) in rows.iter().enumerate() {
            if r["m"].as_u64() != Some(m as u64) {
                return Err(bad("row order"));
            }
            c.push(r["c"].as_i64().ok_or_else(|| bad("c"))?);
            if !r["w"].is_null() {
                w.push(TowerFunction::from_json(ctx, j, &r["w"])?);
            }
        }
        let w = match w.len() {
            0 => None,
            n if n == rows.len() => Some(w),
            _ => return Err(bad("partial functions")),
        };
        Ok(MasterLadder { j, c, w })
    }
}

/// Master ladder of level j, with functions when `symbolic` is set.
pub fn master_ladder(ex: &Expander, j: usize, symbolic: bool) -> Result<MasterLadder> {
    let mut ladder = MasterLadder::level0();
    if !symbolic {
        ladder.w = None;
    }
    for level in 1..=j {
        ladder = ladder.extend(&twisted_ladder(ex, level, symbolic)?)?;
    }
    Ok(ladder)
}

/// dim L(s P_inf^j) from the integers of the master ladder.
pub fn dim(ex: &Expander, j: usize, s: i64) -> Result<i64> {
    Ok(master_ladder(ex, j, false)?.dim(s))
}

/// Basis of L(s P_inf^j).
pub fn basis(ex: &Expander, j: usize, s: i64) -> Result<Vec<TowerFunction>> {
    Ok(master_ladder(ex, j, true)?
        .basis(s)
        .expect("symbolic ladder has functions"))
}
