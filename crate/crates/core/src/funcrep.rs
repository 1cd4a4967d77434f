//! Tower functions as F_{p^2}-linear combinations of monomials in the
//! generators x_i, y_i := 1 + x_i and S := 1 + x_0^2, with local expansions
//! at P_-1^k (parameter t = 1 - x_0) and at P_inf^j (parameter 1/x_j), and
//! evaluation at rational points.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::RwLock;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::field::{FieldCtx, Fq2};
use crate::series::TruncSeries;

/// x_0^{ex_0} ... x_k^{ex_k} (1+x_0)^{ey_0} ... (1+x_k)^{ey_k} S^{es}.
///
/// Exponent vectors carry no trailing zeros, so equal monomials compare
/// equal. Field order gives the lexicographic order on (es, ey, ex).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    es: i64,
    ey: Vec<i64>,
    ex: Vec<i64>,
}

fn trim(v: &mut Vec<i64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn add_vecs(a: &[i64], b: &[i64]) -> Vec<i64> {
    let n = a.len().max(b.len());
    let mut v: Vec<i64> = (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0))
        .collect();
    trim(&mut v);
    v
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn new(mut ex: Vec<i64>, mut ey: Vec<i64>, es: i64) -> Self {
        trim(&mut ex);
        trim(&mut ey);
        Monomial { es, ey, ex }
    }

    /// x_i^e
    pub fn x(i: usize, e: i64) -> Self {
        let mut ex = vec![0; i + 1];
        ex[i] = e;
        Self::new(ex, Vec::new(), 0)
    }

    /// (1 + x_i)^e
    pub fn y(i: usize, e: i64) -> Self {
        let mut ey = vec![0; i + 1];
        ey[i] = e;
        Self::new(Vec::new(), ey, 0)
    }

    /// (1 + x_0^2)^e
    pub fn s(e: i64) -> Self {
        Self::new(Vec::new(), Vec::new(), e)
    }

    pub fn ex(&self, i: usize) -> i64 {
        self.ex.get(i).copied().unwrap_or(0)
    }

    pub fn ey(&self, i: usize) -> i64 {
        self.ey.get(i).copied().unwrap_or(0)
    }

    pub fn es(&self) -> i64 {
        self.es
    }

    pub fn is_one(&self) -> bool {
        self.es == 0 && self.ex.is_empty() && self.ey.is_empty()
    }

    /// Largest generator index with a nonzero exponent (S counts as index 0).
    pub fn max_index(&self) -> Option<usize> {
        let m = self.ex.len().max(self.ey.len());
        if m > 0 {
            Some(m - 1)
        } else if self.es != 0 {
            Some(0)
        } else {
            None
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            es: self.es + other.es,
            ey: add_vecs(&self.ey, &other.ey),
            ex: add_vecs(&self.ex, &other.ex),
        }
    }

    /// Valuation at P_inf^j: -(sum of weighted exponents).
    pub fn valuation_at_infinity(&self, j: usize) -> i64 {
        let w = |i: usize| 1i64 << (j - i);
        let xs: i64 = self.ex.iter().enumerate().map(|(i, e)| e * w(i)).sum();
        let ys: i64 = self.ey.iter().enumerate().map(|(i, e)| e * w(i)).sum();
        -(xs + ys + self.es * (1i64 << (j + 1)))
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (i, &e) in self.ex.iter().enumerate() {
            if e != 0 {
                m.insert(format!("x{i}"), json!(e));
            }
        }
        for (i, &e) in self.ey.iter().enumerate() {
            if e != 0 {
                m.insert(format!("y{i}"), json!(e));
            }
        }
        if self.es != 0 {
            m.insert("S".into(), json!(self.es));
        }
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<Monomial> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("monomial must be an object".into()))?;
        let mut out = Monomial::one();
        for (key, e) in obj {
            let e = e
                .as_i64()
                .ok_or_else(|| Error::Parse(format!("exponent of {key}")))?;
            let factor = if key == "S" {
                Monomial::s(e)
            } else {
                let idx = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("monomial key {key:?}")))
                };
                match key.split_at(1) {
                    ("x", i) => Monomial::x(idx(i)?, e),
                    ("y", i) => Monomial::y(idx(i)?, e),
                    _ => return Err(Error::Parse(format!("monomial key {key:?}"))),
                }
            };
            out = out.mul(&factor);
        }
        Ok(out)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let pw = |base: String, e: i64| {
            if e == 1 {
                base
            } else {
                format!("{base}^{e}")
            }
        };
        for (i, &e) in self.ex.iter().enumerate() {
            if e != 0 {
                parts.push(pw(format!("x{i}"), e));
            }
        }
        for (i, &e) in self.ey.iter().enumerate() {
            if e != 0 {
                parts.push(pw(format!("(1+x{i})"), e));
            }
        }
        if self.es != 0 {
            parts.push(pw("S".into(), self.es));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// A function on level k of the tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerFunction {
    level: usize,
    terms: BTreeMap<Monomial, Fq2>,
}

impl TowerFunction {
    pub fn zero(level: usize) -> Self {
        TowerFunction {
            level,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(level: usize, c: Fq2) -> Self {
        let mut f = Self::zero(level);
        if !c.is_zero() {
            f.terms.insert(Monomial::one(), c);
        }
        f
    }

    pub fn one(level: usize) -> Self {
        Self::constant(level, Fq2::ONE)
    }

    pub fn monomial(level: usize, m: Monomial) -> Result<Self> {
        Self::one(level).mul_monomial(&m)
    }

    /// Builds a function from (coefficient, monomial) pairs, merging repeats.
    pub fn from_terms(
        ctx: &FieldCtx,
        level: usize,
        terms: impl IntoIterator<Item = (Fq2, Monomial)>,
    ) -> Result<Self> {
        let mut f = Self::zero(level);
        for (c, m) in terms {
            if m.max_index().is_some_and(|i| i > level) {
                return Err(Error::LevelMismatch(m.max_index().unwrap(), level));
            }
            f.add_term(ctx, m, c);
        }
        Ok(f)
    }

    fn add_term(&mut self, ctx: &FieldCtx, m: Monomial, c: Fq2) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let v = ctx.add(*e.get(), c);
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Fq2)> {
        self.terms.iter()
    }

    /// The same function viewed on a higher level.
    pub fn lift(&self, level: usize) -> Self {
        assert!(level >= self.level, "cannot lower a function's level");
        TowerFunction {
            level,
            terms: self.terms.clone(),
        }
    }

    /// c1 * f + c2 * g.
    pub fn linear(ctx: &FieldCtx, c1: Fq2, f: &Self, c2: Fq2, g: &Self) -> Result<Self> {
        if f.level != g.level {
            return Err(Error::LevelMismatch(f.level, g.level));
        }
        let mut out = f.scale(ctx, c1);
        for (m, &c) in &g.terms {
            out.add_term(ctx, m.clone(), ctx.mul(c2, c));
        }
        Ok(out)
    }

    pub fn scale(&self, ctx: &FieldCtx, c: Fq2) -> Self {
        if c.is_zero() {
            return Self::zero(self.level);
        }
        TowerFunction {
            level: self.level,
            terms: self
                .terms
                .iter()
                .map(|(m, &x)| (m.clone(), ctx.mul(c, x)))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Result<Self> {
        if let Some(i) = m.max_index() {
            if i > self.level {
                return Err(Error::LevelMismatch(i, self.level));
            }
        }
        Ok(TowerFunction {
            level: self.level,
            terms: self.terms.iter().map(|(k, &c)| (k.mul(m), c)).collect(),
        })
    }

    /// f * (1 - x_0)
    pub fn mul_one_minus_x0(&self, ctx: &FieldCtx) -> Self {
        let mut out = self.clone();
        let minus_one = ctx.neg(Fq2::ONE);
        let x0 = Monomial::x(0, 1);
        for (m, &c) in &self.terms {
            out.add_term(ctx, m.mul(&x0), ctx.mul(minus_one, c));
        }
        out
    }

    /// Product of two functions, living on the higher of the two levels.
    pub fn mul(&self, ctx: &FieldCtx, other: &Self) -> Self {
        let mut out = Self::zero(self.level.max(other.level));
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &other.terms {
                out.add_term(ctx, m1.mul(m2), ctx.mul(c1, c2));
            }
        }
        out
    }

    /// Upper bound for the pole order at P_inf^level (monomials may cancel).
    pub fn pole_bound_at_infinity(&self) -> i64 {
        self.terms
            .keys()
            .map(|m| -m.valuation_at_infinity(self.level))
            .max()
            .unwrap_or(0)
            .max(0)
    }

    /// Plug-in evaluation at a point (a_0, ..., a_k) of the tower.
    pub fn evaluate(&self, ctx: &FieldCtx, pt: &[Fq2]) -> Result<Fq2> {
        if pt.len() != self.level + 1 {
            return Err(Error::NotATowerPoint(format!(
                "expected {} coordinates, got {}",
                self.level + 1,
                pt.len()
            )));
        }
        check_tower_point(ctx, pt)?;
        let mut acc = Fq2::ZERO;
        for (m, &c) in &self.terms {
            let mut v = c;
            for (i, &e) in m.ex.iter().enumerate() {
                v = ctx.mul(v, pow_signed(ctx, pt[i], e)?);
            }
            for (i, &e) in m.ey.iter().enumerate() {
                v = ctx.mul(v, pow_signed(ctx, ctx.add(Fq2::ONE, pt[i]), e)?);
            }
            if m.es != 0 {
                let s = ctx.add(Fq2::ONE, ctx.square(pt[0]));
                v = ctx.mul(v, pow_signed(ctx, s, m.es)?);
            }
            acc = ctx.add(acc, v);
        }
        Ok(acc)
    }

    /// `[[coeff, monomial], ...]` in monomial order.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| json!([c.to_string(), m.to_json()]))
                .collect(),
        )
    }

    pub fn from_json(ctx: &FieldCtx, level: usize, v: &Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Parse("function must be an array".into()))?;
        let mut terms = Vec::with_capacity(arr.len());
        for t in arr {
            let c = t[0]
                .as_str()
                .ok_or_else(|| Error::Parse("term coefficient".into()))?;
            terms.push((ctx.parse(c)?, Monomial::from_json(&t[1])?));
        }
        Self::from_terms(ctx, level, terms)
    }
}

impl fmt::Display for TowerFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({c})*{m}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn pow_signed(ctx: &FieldCtx, x: Fq2, e: i64) -> Result<Fq2> {
    if e >= 0 {
        Ok(ctx.pow(x, e as u64))
    } else if x.is_zero() {
        Err(Error::PoleAtPoint)
    } else {
        Ok(ctx.pow(ctx.inv(x)?, e.unsigned_abs()))
    }
}

/// Checks a_{i+1}^2 * 2 a_i = a_i^2 + 1 for consecutive coordinates.
pub fn check_tower_point(ctx: &FieldCtx, pt: &[Fq2]) -> Result<()> {
    for (i, w) in pt.windows(2).enumerate() {
        let lhs = ctx.mul(ctx.square(w[1]), ctx.add(w[0], w[0]));
        let rhs = ctx.add(ctx.square(w[0]), Fq2::ONE);
        if w[0].is_zero() || lhs != rhs {
            return Err(Error::NotATowerPoint(format!(
                "relation between coordinates {i} and {} fails",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Expansions of x_0..x_k, (1 + x_0)..(1 + x_k) and S at one place.
struct LocalGenerators {
    x: Vec<TruncSeries>,
    y: Vec<TruncSeries>,
    s: TruncSeries,
}

impl LocalGenerators {
    fn new(ctx: &FieldCtx, x: Vec<TruncSeries>, order: usize) -> Self {
        let one = TruncSeries::one(order);
        let y = x.iter().map(|xi| one.add(ctx, xi)).collect();
        let s = one.add(ctx, &x[0].mul(ctx, &x[0]));
        LocalGenerators { x, y, s }
    }

    fn expand(&self, ctx: &FieldCtx, f: &TowerFunction, order: usize) -> Result<TruncSeries> {
        #[derive(Hash, PartialEq, Eq, Clone, Copy)]
        enum Factor {
            X(usize),
            Y(usize),
            S,
        }
        let mut powers: HashMap<(Factor, i64), TruncSeries> = HashMap::new();
        let mut power = |fac: Factor, e: i64| -> Result<TruncSeries> {
            if let Some(s) = powers.get(&(fac, e)) {
                return Ok(s.clone());
            }
            let base = match fac {
                Factor::X(i) => &self.x[i],
                Factor::Y(i) => &self.y[i],
                Factor::S => &self.s,
            };
            let v = base.pow(ctx, e).map_err(|e| match e {
                Error::NonInvertibleSeries => Error::PoleAtExpansionPoint,
                other => other,
            })?;
            powers.insert((fac, e), v.clone());
            Ok(v)
        };
        let mut acc: Option<TruncSeries> = None;
        for (m, &c) in &f.terms {
            let mut term = TruncSeries::constant(c, order);
            for (i, &e) in m.ex.iter().enumerate() {
                if e != 0 {
                    term = term.mul(ctx, &power(Factor::X(i), e)?);
                }
            }
            for (i, &e) in m.ey.iter().enumerate() {
                if e != 0 {
                    term = term.mul(ctx, &power(Factor::Y(i), e)?);
                }
            }
            if m.es != 0 {
                term = term.mul(ctx, &power(Factor::S, m.es)?);
            }
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(ctx, &term),
            });
        }
        Ok(acc.unwrap_or_else(|| TruncSeries::zero(order as i64 + 1)))
    }
}

/// Expansion engine for one field, caching the P_1-branch expansions of the
/// generators in t = 1 - x_0 and regrowing them on demand.
///
/// The P_1 branch of x_i is the series with constant term 1; around
/// P_-1^k the generators x_i, i < k, take that branch and x_k its negative.
#[derive(Debug)]
pub struct Expander {
    ctx: FieldCtx,
    /// (order, [x_0, x_1, ...]) on the P_1 branch
    cache: RwLock<(usize, Vec<TruncSeries>)>,
}

impl Expander {
    pub fn new(ctx: &FieldCtx) -> Self {
        Expander {
            ctx: ctx.clone(),
            cache: RwLock::new((0, Vec::new())),
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    fn grow(&self, order: usize, count: usize) -> Vec<TruncSeries> {
        let ctx = &self.ctx;
        let one = TruncSeries::one(order);
        let two = ctx.from_i64(2);
        let mut out = vec![one.sub(ctx, &TruncSeries::monomial(1, order))];
        while out.len() < count {
            let x = out.last().unwrap();
            let num = x.mul(ctx, x).add(ctx, &one);
            let den = x.scale(ctx, two).inv(ctx).expect("x_i is a unit at P_1");
            let b = num.mul(ctx, &den);
            out.push(b.sqrt_one(ctx).expect("step value has constant term 1"));
        }
        out
    }

    /// P_1-branch expansions of x_0..=x_k to order `order`.
    pub fn plus_branch(&self, k: usize, order: usize) -> Vec<TruncSeries> {
        {
            let cache = self.cache.read().unwrap();
            if cache.0 >= order && cache.1.len() > k {
                return cache.1[..=k]
                    .iter()
                    .map(|s| s.truncate_abs(order as i64 + 1))
                    .collect();
            }
        }
        let mut cache = self.cache.write().unwrap();
        if !(cache.0 >= order && cache.1.len() > k) {
            let new_order = if cache.0 >= order {
                cache.0
            } else {
                order.max(2 * cache.0)
            };
            let count = (k + 1).max(cache.1.len());
            *cache = (new_order, self.grow(new_order, count));
        }
        cache.1[..=k]
            .iter()
            .map(|s| s.truncate_abs(order as i64 + 1))
            .collect()
    }

    /// Expansions of x_0..=x_k around P_-1^k in t = 1 - x_0, to order N.
    /// On level 0 this is the expansion of x_0 around P_1^0.
    pub fn generator_expansions(&self, k: usize, order: usize) -> Vec<TruncSeries> {
        let mut gens = self.plus_branch(k, order);
        if k > 0 {
            gens[k] = gens[k].neg(&self.ctx);
        }
        gens
    }

    /// Expansion around P_-1^k, k = level of f >= 1.
    pub fn expand_at_pminus1(&self, f: &TowerFunction, order: usize) -> Result<TruncSeries> {
        if f.level == 0 {
            return Err(Error::NoLocalParameter);
        }
        let gens = self.generator_expansions(f.level, order);
        LocalGenerators::new(&self.ctx, gens, order).expand(&self.ctx, f, order)
    }

    /// Expansion around P_1^k (all generators on the P_1 branch).
    pub fn expand_at_p1(&self, f: &TowerFunction, order: usize) -> Result<TruncSeries> {
        let gens = self.plus_branch(f.level, order);
        LocalGenerators::new(&self.ctx, gens, order).expand(&self.ctx, f, order)
    }

    /// Laurent expansions of x_0..=x_j around P_inf^j in pi = 1/x_j, relative order N.
    pub fn infinity_generators(&self, j: usize, order: usize) -> Vec<TruncSeries> {
        let ctx = &self.ctx;
        let one = TruncSeries::one(order);
        let mut gens = vec![TruncSeries::monomial(-1, order)];
        for _ in 0..j {
            let xk = gens.last().unwrap();
            let inv4 = xk.pow(ctx, -4).expect("x_k has a pole at P_inf");
            let root = one.sub(ctx, &inv4).sqrt_one(ctx).expect("unit with constant 1");
            gens.push(xk.mul(ctx, xk).mul(ctx, &one.add(ctx, &root)));
        }
        gens.reverse();
        gens
    }

    /// Laurent expansion of f around P_inf^j in pi = 1/x_j.
    pub fn expand_at_infinity(&self, f: &TowerFunction, order: usize) -> Result<TruncSeries> {
        let gens = self.infinity_generators(f.level, order);
        let s = LocalGenerators::new(&self.ctx, gens, order).expand(&self.ctx, f, order)?;
        if s.is_zero() && !f.is_zero() {
            return Err(Error::PrecisionExhausted {
                needed: order as i64 + 1,
                available: s.abs_prec(),
            });
        }
        Ok(s)
    }

    /// Exact pole order at P_inf^j, raising the expansion order until the
    /// leading term is resolved.
    pub fn pole_order_at_infinity(&self, f: &TowerFunction) -> Result<i64> {
        let mut order = (2 * f.pole_bound_at_infinity() as usize + 16).max(32);
        loop {
            match self.expand_at_infinity(f, order) {
                Ok(s) => return Ok(-s.val()),
                Err(Error::PrecisionExhausted { .. }) if order < 1 << 14 => order *= 2,
                Err(e) => return Err(e),
            }
        }
    }
}
