//! One-point codes C_L(s P_inf^j, D^j): the completely split rational
//! places, generator matrices by evaluation, rank and brute-force minimum
//! distance.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{FieldCtx, Fq2};
use crate::funcrep::TowerFunction;

/// A rational place of level j away from P_inf, given by its coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SplitPlace {
    pub coords: Vec<Fq2>,
}

/// Places of level j over every alpha_0 outside {0, 1, -1, i, -i} that
/// splits completely, sorted lexicographically.
pub fn split_places(ctx: &FieldCtx, j: usize) -> Vec<SplitPlace> {
    let i = ctx.i_elem();
    let excluded = [Fq2::ZERO, Fq2::ONE, ctx.neg(Fq2::ONE), i, ctx.neg(i)];
    let mut out = Vec::new();
    'alpha: for a0 in ctx.elements() {
        if excluded.contains(&a0) {
            continue;
        }
        let mut layer = vec![vec![a0]];
        for _ in 0..j {
            let mut next = Vec::with_capacity(2 * layer.len());
            for pt in &layer {
                let a = *pt.last().unwrap();
                let step = ctx
                    .div(ctx.add(ctx.square(a), Fq2::ONE), ctx.add(a, a))
                    .expect("coordinates are nonzero");
                let root = match ctx.sqrt(step) {
                    Some(r) if !r.is_zero() => r,
                    _ => continue 'alpha,
                };
                for r in [root, ctx.neg(root)] {
                    let mut q = pt.clone();
                    q.push(r);
                    next.push(q);
                }
            }
            layer = next;
        }
        out.extend(layer.into_iter().map(|coords| SplitPlace { coords }));
    }
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenMatrix {
    pub rows: Vec<Vec<Fq2>>,
    pub ncols: usize,
}

/// Row i holds the values of `basis[i]` at the places.
pub fn generator_matrix(
    ctx: &FieldCtx,
    basis: &[TowerFunction],
    places: &[SplitPlace],
) -> Result<GenMatrix> {
    let rows = basis
        .iter()
        .map(|f| {
            places
                .iter()
                .map(|pl| match f.evaluate(ctx, &pl.coords) {
                    Err(Error::PoleAtPoint) => Err(Error::BasisPoleAtSplitPlace),
                    other => other,
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GenMatrix {
        rows,
        ncols: places.len(),
    })
}

/// Row echelon form; returns the nonzero rows.
fn echelon(ctx: &FieldCtx, m: &GenMatrix) -> Vec<Vec<Fq2>> {
    let mut a = m.rows.clone();
    let mut r = 0;
    for col in 0..m.ncols {
        let Some(piv) = (r..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        let inv = ctx.inv(a[r][col]).expect("pivot is nonzero");
        let pivot_row: Vec<Fq2> = a[r].iter().map(|&x| ctx.mul(x, inv)).collect();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col];
                for (x, &p) in row.iter_mut().zip(&pivot_row) {
                    *x = ctx.sub(*x, ctx.mul(f, p));
                }
            }
        }
        a[r] = pivot_row;
        r += 1;
        if r == a.len() {
            break;
        }
    }
    a.truncate(r);
    a
}

pub fn rank(ctx: &FieldCtx, m: &GenMatrix) -> usize {
    echelon(ctx, m).len()
}

/// Largest number of codewords the brute force will visit.
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;
pub const BRUTE_FORCE_MAX_K: usize = 14;

/// Minimum Hamming weight of the row space, one codeword per projective point.
pub fn min_distance_bruteforce(ctx: &FieldCtx, m: &GenMatrix) -> Result<usize> {
    let basis = echelon(ctx, m);
    let k = basis.len();
    let q = ctx.order();
    let total = q.checked_pow(k as u32).filter(|&n| n <= BRUTE_FORCE_LIMIT);
    if k > BRUTE_FORCE_MAX_K || total.is_none() {
        return Err(Error::InstanceTooLarge(format!(
            "k = {k}, q = {q}: needs k <= {BRUTE_FORCE_MAX_K} and q^k <= {BRUTE_FORCE_LIMIT}"
        )));
    }
    if k == 0 {
        return Err(Error::InstanceTooLarge("zero code has no minimum distance".into()));
    }
    let n = m.ncols;
    let mut best = n;
    for lead in 0..k {
        // codeword = basis[lead] + sum_{i > lead} digit_i * basis[i]
        let free = &basis[lead + 1..];
        let mut word = basis[lead].clone();
        let mut digits = vec![0u64; free.len()];
        loop {
            best = best.min(word.iter().filter(|x| !x.is_zero()).count());
            // odometer step, updating the word by the change of one coefficient
            let mut pos = 0;
            loop {
                if pos == digits.len() {
                    break;
                }
                let old = ctx.elem_at(digits[pos]);
                digits[pos] = (digits[pos] + 1) % q;
                let delta = ctx.sub(ctx.elem_at(digits[pos]), old);
                for (w, &b) in word.iter_mut().zip(&free[pos]) {
                    *w = ctx.add(*w, ctx.mul(delta, b));
                }
                if digits[pos] != 0 {
                    break;
                }
                pos += 1;
            }
            if pos == digits.len() {
                break;
            }
        }
    }
    Ok(best)
}

impl GenMatrix {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    /// `{"n", "k", "designed_d", "matrix"}` with k the rank.
    pub fn to_json(&self, ctx: &FieldCtx, s: i64) -> Value {
        let matrix: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(|x| json!(x.to_string())).collect()))
            .collect();
        json!({
            "n": self.ncols,
            "k": rank(ctx, self),
            "designed_d": self.ncols as i64 - s,
            "matrix": matrix,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field_ctx;
    use crate::funcrep::{check_tower_point, Expander};
    use crate::ladder::master_ladder;

    #[test]
    fn places_level0_p3() {
        let ctx = make_field_ctx(3).unwrap();
        let pl = split_places(&ctx, 0);
        assert_eq!(pl.len(), 4);
        let u = ctx.elem(0, 1);
        for p in &pl {
            let a = p.coords[0];
            assert!(![Fq2::ZERO, Fq2::ONE, ctx.neg(Fq2::ONE), u, ctx.neg(u)].contains(&a));
        }
    }

    #[test]
    fn places_by_brute_force() {
        for p in [3, 5, 7] {
            let ctx = make_field_ctx(p).unwrap();
            for j in 0..=3 {
                let pl = split_places(&ctx, j);
                assert_eq!(pl.len() % (1 << j), 0);
                for w in pl.windows(2) {
                    assert!(w[0] < w[1]);
                }
                for x in &pl {
                    assert_eq!(x.coords.len(), j + 1);
                    check_tower_point(&ctx, &x.coords).unwrap();
                }
            }
            // level 1 by enumerating all pairs
            let i = ctx.i_elem();
            let bad = [Fq2::ZERO, Fq2::ONE, ctx.neg(Fq2::ONE), i, ctx.neg(i)];
            let mut pairs = Vec::new();
            for a in ctx.elements().filter(|a| !bad.contains(a)) {
                for b in ctx.elements().filter(|b| !b.is_zero()) {
                    if check_tower_point(&ctx, &[a, b]).is_ok() {
                        pairs.push(vec![a, b]);
                    }
                }
            }
            pairs.sort();
            let got: Vec<Vec<Fq2>> = split_places(&ctx, 1).into_iter().map(|x| x.coords).collect();
            assert_eq!(got, pairs);
        }
    }

    #[test]
    fn vandermonde_and_ranks() {
        let ctx = make_field_ctx(3).unwrap();
        let ex = Expander::new(&ctx);
        let l0 = master_ladder(&ex, 0, true).unwrap();
        let pl = split_places(&ctx, 0);
        let m = generator_matrix(&ctx, &l0.basis(2).unwrap(), &pl).unwrap();
        for (c, p) in pl.iter().enumerate() {
            let a = p.coords[0];
            assert_eq!(m.rows[1][c], a);
            assert_eq!(m.rows[2][c], ctx.square(a));
        }
        assert_eq!(rank(&ctx, &m), 3);
        let big = generator_matrix(&ctx, &l0.basis(7).unwrap(), &pl).unwrap();
        assert_eq!(big.rows.len(), 8);
        assert_eq!(rank(&ctx, &big), 4);

        let l1 = master_ladder(&ex, 1, true).unwrap();
        let pl1 = split_places(&ctx, 1);
        assert!(pl1.len() >= 4);
        let m1 = generator_matrix(&ctx, &l1.basis(4).unwrap(), &pl1).unwrap();
        assert_eq!(rank(&ctx, &m1), 4);

        // s = N: the product of x_0 - alpha_0 over the split alpha_0 lies in
        // L(N P_inf) and vanishes on every place, so the rank drops below dim
        let n = pl1.len() as i64;
        let full = generator_matrix(&ctx, &l1.basis(n).unwrap(), &pl1).unwrap();
        assert_eq!(full.rows.len() as i64, n);
        assert!(rank(&ctx, &full) < full.rows.len());
    }

    #[test]
    fn brute_force_distance() {
        let ctx = make_field_ctx(3).unwrap();
        let ones = GenMatrix {
            rows: vec![vec![Fq2::ONE; 5]],
            ncols: 5,
        };
        assert_eq!(min_distance_bruteforce(&ctx, &ones).unwrap(), 5);
        let ex = Expander::new(&ctx);
        let l0 = master_ladder(&ex, 0, true).unwrap();
        let pl = split_places(&ctx, 0);
        let m = generator_matrix(&ctx, &l0.basis(1).unwrap(), &pl).unwrap();
        assert_eq!(min_distance_bruteforce(&ctx, &m).unwrap(), 3);
        let wide = GenMatrix {
            rows: (0..8).map(|i| (0..8).map(|c| if c == i { Fq2::ONE } else { Fq2::ZERO }).collect()).collect(),
            ncols: 8,
        };
        assert!(matches!(
            min_distance_bruteforce(&ctx, &wide),
            Err(Error::InstanceTooLarge(_))
        ));
    }

    #[test]
    fn output_formats() {
        let ctx = make_field_ctx(3).unwrap();
        let m = GenMatrix {
            rows: vec![vec![Fq2::ONE, ctx.elem(2, 1)]],
            ncols: 2,
        };
        assert_eq!(m.to_csv(), "1+0*u,2+1*u\n");
        assert_eq!(
            m.to_json(&ctx, 1).to_string(),
            r#"{"n":2,"k":1,"designed_d":1,"matrix":[["1+0*u","2+1*u"]]}"#
        );
    }
}
