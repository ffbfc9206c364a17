//! Functions on `[q]^n`, product measures and exact expectations.
//!
//! Tables are laid out big-endian in the first coordinate: the point
//! `x = (x_0, ..., x_{n-1})` lives at index `sum_i x_i * q^(n-1-i)`.
//! Coordinates and symbols are 0-based throughout the crate.

use std::borrow::Cow;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::FamilySpec;

/// Largest table (in entries) the exact routines will materialize.
pub const EXACT_CAP: usize = 1 << 24;

/// Number of points of `[q]^n`, refusing anything over [`EXACT_CAP`].
pub fn table_len(q: usize, n: usize) -> Result<usize> {
    let too_large = Error::TableTooLarge { q, n, cap: EXACT_CAP };
    let exp = u32::try_from(n).map_err(|_| too_large.clone())?;
    match q.checked_pow(exp) {
        Some(len) if len <= EXACT_CAP => Ok(len),
        _ => Err(too_large),
    }
}

/// Table index of a point.
pub fn encode(q: usize, x: &[u32]) -> usize {
    x.iter().fold(0, |acc, &s| acc * q + s as usize)
}

/// Writes the point at `index` into `out` (whose length is the arity).
pub fn decode_into(q: usize, mut index: usize, out: &mut [u32]) {
    for slot in out.iter_mut().rev() {
        *slot = (index % q) as u32;
        index /= q;
    }
}

pub fn decode(q: usize, n: usize, index: usize) -> Vec<u32> {
    let mut x = vec![0; n];
    decode_into(q, index, &mut x);
    x
}

/// Codomain of a [`QaryFunction`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Codomain {
    /// Symbols `0..size`.
    Alphabet(usize),
    Real,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Symbols(Vec<u32>),
    Reals(Vec<f64>),
    Oracle(FamilySpec),
}

/// A total function `[q]^n -> V`, either a dense table or a family oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct QaryFunction {
    q: usize,
    n: usize,
    codomain: Codomain,
    body: Body,
}

impl QaryFunction {
    pub fn from_symbols(q: usize, n: usize, codomain_size: usize, table: Vec<u32>) -> Result<Self> {
        check_shape(q, n)?;
        let expected = table_len(q, n)?;
        if table.len() != expected {
            return Err(Error::TableLength { expected, found: table.len() });
        }
        if codomain_size == 0 {
            return Err(Error::InvalidFunction("empty codomain".into()));
        }
        if let Some(&bad) = table.iter().find(|&&v| v as usize >= codomain_size) {
            return Err(Error::SymbolOutOfRange { symbol: bad as usize, q: codomain_size });
        }
        Ok(Self { q, n, codomain: Codomain::Alphabet(codomain_size), body: Body::Symbols(table) })
    }

    pub fn from_reals(q: usize, n: usize, table: Vec<f64>) -> Result<Self> {
        check_shape(q, n)?;
        let expected = table_len(q, n)?;
        if table.len() != expected {
            return Err(Error::TableLength { expected, found: table.len() });
        }
        if table.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction("non-finite table entry".into()));
        }
        Ok(Self { q, n, codomain: Codomain::Real, body: Body::Reals(table) })
    }

    pub fn from_family(spec: FamilySpec) -> Result<Self> {
        spec.validate()?;
        let (q, n) = (spec.q(), spec.arity());
        Ok(Self { q, n, codomain: Codomain::Alphabet(spec.codomain_size()), body: Body::Oracle(spec) })
    }

    /// Tabulates a symbol-valued closure.
    pub fn tabulate_symbols(
        q: usize,
        n: usize,
        codomain_size: usize,
        f: impl Fn(&[u32]) -> u32,
    ) -> Result<Self> {
        check_shape(q, n)?;
        let len = table_len(q, n)?;
        let mut x = vec![0; n];
        let table = (0..len)
            .map(|i| {
                decode_into(q, i, &mut x);
                f(&x)
            })
            .collect();
        Self::from_symbols(q, n, codomain_size, table)
    }

    /// Tabulates a real-valued closure.
    pub fn tabulate_reals(q: usize, n: usize, f: impl Fn(&[u32]) -> f64) -> Result<Self> {
        check_shape(q, n)?;
        let len = table_len(q, n)?;
        let mut x = vec![0; n];
        let table = (0..len)
            .map(|i| {
                decode_into(q, i, &mut x);
                f(&x)
            })
            .collect();
        Self::from_reals(q, n, table)
    }

    pub fn constant(q: usize, n: usize, value: f64) -> Result<Self> {
        Self::from_reals(q, n, vec![value; table_len(q, n)?])
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn codomain(&self) -> Codomain {
        self.codomain
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn family(&self) -> Option<&FamilySpec> {
        match &self.body {
            Body::Oracle(spec) => Some(spec),
            _ => None,
        }
    }

    pub fn is_tabulated(&self) -> bool {
        !matches!(self.body, Body::Oracle(_))
    }

    /// Evaluates a symbol-valued function at `x`.
    pub fn eval_symbol(&self, x: &[u32]) -> Result<u32> {
        self.check_point(x)?;
        match &self.body {
            Body::Symbols(t) => Ok(t[encode(self.q, x)]),
            Body::Oracle(spec) => Ok(spec.eval(x)),
            Body::Reals(_) => Err(Error::CodomainMismatch { expected: "alphabet" }),
        }
    }

    /// Evaluates at `x`, reading symbols as reals.
    pub fn eval_real(&self, x: &[u32]) -> Result<f64> {
        self.check_point(x)?;
        Ok(match &self.body {
            Body::Symbols(t) => t[encode(self.q, x)] as f64,
            Body::Reals(t) => t[encode(self.q, x)],
            Body::Oracle(spec) => spec.eval(x) as f64,
        })
    }

    /// Symbol at a point known to be valid; reals are truncated.
    pub(crate) fn eval_symbol_unchecked(&self, x: &[u32]) -> u32 {
        match &self.body {
            Body::Symbols(t) => t[encode(self.q, x)],
            Body::Reals(t) => t[encode(self.q, x)] as u32,
            Body::Oracle(spec) => spec.eval(x),
        }
    }

    fn check_point(&self, x: &[u32]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::InvalidParameter(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.n
            )));
        }
        if let Some(&s) = x.iter().find(|&&s| s as usize >= self.q) {
            return Err(Error::SymbolOutOfRange { symbol: s as usize, q: self.q });
        }
        Ok(())
    }

    /// Materializes an oracle into a symbol table; tables are returned as is.
    pub fn tabulate(&self) -> Result<Self> {
        match &self.body {
            Body::Oracle(spec) => {
                Self::tabulate_symbols(self.q, self.n, self.codomain_size()?, |x| spec.eval(x))
            }
            _ => Ok(self.clone()),
        }
    }

    fn codomain_size(&self) -> Result<usize> {
        match self.codomain {
            Codomain::Alphabet(k) => Ok(k),
            Codomain::Real => Err(Error::CodomainMismatch { expected: "alphabet" }),
        }
    }

    /// Symbol table, tabulating oracles on the fly.
    pub fn symbols(&self) -> Result<Cow<'_, [u32]>> {
        match &self.body {
            Body::Symbols(t) => Ok(Cow::Borrowed(t)),
            Body::Oracle(_) => match self.tabulate()?.body {
                Body::Symbols(t) => Ok(Cow::Owned(t)),
                _ => unreachable!("tabulated oracles are symbol tables"),
            },
            Body::Reals(_) => Err(Error::CodomainMismatch { expected: "alphabet" }),
        }
    }

    /// Real-valued table, reading symbols as reals.
    pub fn reals(&self) -> Result<Cow<'_, [f64]>> {
        match &self.body {
            Body::Reals(t) => Ok(Cow::Borrowed(t)),
            _ => Ok(Cow::Owned(self.symbols()?.iter().map(|&s| s as f64).collect())),
        }
    }

    /// The same function with a real codomain.
    pub fn to_real(&self) -> Result<Self> {
        Self::from_reals(self.q, self.n, self.reals()?.into_owned())
    }

    /// `x -> 1[f(x) = a]` as a real table.
    pub fn indicator(&self, a: u32) -> Result<Self> {
        let k = self.codomain_size()?;
        if a as usize >= k {
            return Err(Error::SymbolOutOfRange { symbol: a as usize, q: k });
        }
        let table = self.symbols()?.iter().map(|&s| f64::from(u8::from(s == a))).collect();
        Self::from_reals(self.q, self.n, table)
    }

    /// Pointwise `alpha * self + beta * other`.
    pub fn linear_combination(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        if (self.q, self.n) != (other.q, other.n) {
            return Err(Error::InvalidParameter("shape mismatch in linear combination".into()));
        }
        let (a, b) = (self.reals()?, other.reals()?);
        Self::from_reals(self.q, self.n, a.iter().zip(b.iter()).map(|(u, v)| alpha * u + beta * v).collect())
    }

    /// Whether every value is 0 or 1.
    pub fn is_binary(&self) -> Result<bool> {
        Ok(self.reals()?.iter().all(|&v| v == 0.0 || v == 1.0))
    }
}

fn check_shape(q: usize, n: usize) -> Result<()> {
    if q < 1 || n < 1 {
        return Err(Error::InvalidFunction(format!("need q >= 1 and n >= 1, got q = {q}, n = {n}")));
    }
    if q > u32::MAX as usize {
        return Err(Error::InvalidFunction("alphabet too large".into()));
    }
    Ok(())
}

/// A probability measure on `[q]`, used as the product measure `mu^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRecord", into = "MeasureRecord")]
pub struct ProductMeasure {
    atoms: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MeasureRecord {
    q: usize,
    atoms: Vec<f64>,
}

impl TryFrom<MeasureRecord> for ProductMeasure {
    type Error = Error;

    fn try_from(r: MeasureRecord) -> Result<Self> {
        if r.q != r.atoms.len() {
            return Err(Error::DimensionMismatch { expected: r.q, found: r.atoms.len() });
        }
        Self::new(r.atoms)
    }
}

impl From<ProductMeasure> for MeasureRecord {
    fn from(m: ProductMeasure) -> Self {
        Self { q: m.atoms.len(), atoms: m.atoms }
    }
}

impl ProductMeasure {
    pub fn new(atoms: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        if atoms.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidMeasure("atoms must be finite and nonnegative".into()));
        }
        let total: f64 = atoms.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(format!("atoms sum to {total}")));
        }
        Ok(Self { atoms })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidMeasure("weights must have a positive finite sum".into()));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(q: usize) -> Self {
        Self { atoms: vec![1.0 / q as f64; q] }
    }

    pub fn point_mass(q: usize, a: usize) -> Self {
        let mut atoms = vec![0.0; q];
        atoms[a] = 1.0;
        Self { atoms }
    }

    pub fn q(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn atom(&self, a: usize) -> f64 {
        self.atoms[a]
    }

    /// Smallest atom `mu*`.
    pub fn min_atom(&self) -> f64 {
        self.atoms.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// True when some atom is zero.
    pub fn is_degenerate(&self) -> bool {
        self.min_atom() == 0.0
    }

    pub(crate) fn require_positive(&self) -> Result<()> {
        match self.atoms.iter().position(|&a| a == 0.0) {
            Some(symbol) => Err(Error::ZeroAtom { symbol }),
            None => Ok(()),
        }
    }

    pub(crate) fn require_q(&self, q: usize) -> Result<()> {
        if self.q() != q {
            return Err(Error::DimensionMismatch { expected: q, found: self.q() });
        }
        Ok(())
    }

    /// Applies a relabeling of symbols: the result gives `perm[s]` the mass of `s`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        let mut atoms = vec![0.0; self.q()];
        for (s, &p) in perm.iter().enumerate() {
            atoms[p] = self.atoms[s];
        }
        Self { atoms }
    }
}

/// The segment `mu^t = t * delta_anchor + (1 - t) * base` with `base(anchor) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurePath {
    anchor: usize,
    base: ProductMeasure,
}

impl MeasurePath {
    pub fn new(anchor: usize, base: ProductMeasure) -> Result<Self> {
        if anchor >= base.q() {
            return Err(Error::SymbolOutOfRange { symbol: anchor, q: base.q() });
        }
        if base.atom(anchor) != 0.0 {
            return Err(Error::InvalidMeasure(format!(
                "path base must vanish on the anchor {anchor}, found {}",
                base.atom(anchor)
            )));
        }
        Ok(Self { anchor, base })
    }

    /// Path whose base is uniform on the symbols other than `anchor`.
    pub fn uniform_base(q: usize, anchor: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParameter("a path needs q >= 2".into()));
        }
        let mut atoms = vec![1.0 / (q - 1) as f64; q];
        if anchor >= q {
            return Err(Error::SymbolOutOfRange { symbol: anchor, q });
        }
        atoms[anchor] = 0.0;
        Self::new(anchor, ProductMeasure { atoms })
    }

    /// Writes `mu = t* delta_anchor + (1 - t*) base`, returning `(t*, path)`.
    /// For `mu = delta_anchor` the base is taken uniform on the other symbols.
    pub fn through(mu: &ProductMeasure, anchor: usize) -> Result<(f64, Self)> {
        if anchor >= mu.q() {
            return Err(Error::SymbolOutOfRange { symbol: anchor, q: mu.q() });
        }
        let t_star = mu.atom(anchor);
        if 1.0 - t_star <= 0.0 {
            return Ok((1.0, Self::uniform_base(mu.q(), anchor)?));
        }
        let mut weights = mu.atoms().to_vec();
        weights[anchor] = 0.0;
        Ok((t_star, Self::new(anchor, ProductMeasure::from_weights(&weights)?)?))
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn base(&self) -> &ProductMeasure {
        &self.base
    }

    pub fn q(&self) -> usize {
        self.base.q()
    }

    /// `mu^t`; `t` is clamped to `[0, 1]`.
    pub fn at(&self, t: f64) -> ProductMeasure {
        let t = t.clamp(0.0, 1.0);
        let atoms = self
            .base
            .atoms()
            .iter()
            .enumerate()
            .map(|(s, &b)| if s == self.anchor { t } else { (1.0 - t) * b })
            .collect();
        ProductMeasure { atoms }
    }

    /// Tangent direction `delta_anchor - base`.
    pub fn direction(&self) -> Vec<f64> {
        let mut d: Vec<f64> = self.base.atoms().iter().map(|b| -b).collect();
        d[self.anchor] += 1.0;
        d
    }
}

/// Seeded uniform sampler on the simplex `Delta[q]`.
#[derive(Debug, Clone)]
pub struct SimplexSampler {
    q: usize,
    seed: u64,
    rng: ChaCha8Rng,
}

impl SimplexSampler {
    pub fn new(q: usize, seed: u64) -> Self {
        Self { q, seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Normalized unit exponentials are uniform on the simplex.
    pub fn sample(&mut self) -> ProductMeasure {
        if self.q <= 1 {
            return ProductMeasure { atoms: vec![1.0; self.q.max(1)] };
        }
        loop {
            let draws: Vec<f64> = (0..self.q).map(|_| Exp1.sample(&mut self.rng)).collect();
            let total: f64 = draws.iter().sum();
            if total > 0.0 {
                return ProductMeasure { atoms: draws.iter().map(|d| d / total).collect() };
            }
        }
    }
}

impl Iterator for SimplexSampler {
    type Item = ProductMeasure;

    fn next(&mut self) -> Option<ProductMeasure> {
        Some(self.sample())
    }
}

/// `sum_x leaf(index(x)) * prod_i mu(x_i)`, folding the last coordinate first.
pub(crate) fn contract(q: usize, n: usize, mu: &[f64], leaf: impl Fn(usize) -> f64) -> f64 {
    let len = q.pow(n as u32);
    let mut level: Vec<f64> = (0..len / q)
        .map(|j| (0..q).map(|s| mu[s] * leaf(j * q + s)).sum())
        .collect();
    while level.len() > 1 {
        level = level.chunks(q).map(|c| c.iter().zip(mu).map(|(v, m)| v * m).sum()).collect();
    }
    level[0]
}

/// Replaces each value by its average over coordinate `i` under `mu`.
pub(crate) fn average_out(table: &mut [f64], q: usize, n: usize, i: usize, mu: &[f64]) {
    let stride = q.pow((n - 1 - i) as u32);
    for block in table.chunks_mut(stride * q) {
        for off in 0..stride {
            let avg: f64 = (0..q).map(|s| mu[s] * block[off + s * stride]).sum();
            for s in 0..q {
                block[off + s * stride] = avg;
            }
        }
    }
}

/// `E_mu[f]` for a real (or symbol) function.
pub fn expectation(f: &QaryFunction, mu: &ProductMeasure) -> Result<f64> {
    mu.require_q(f.q())?;
    match f.body() {
        Body::Reals(t) => Ok(contract(f.q(), f.n(), mu.atoms(), |i| t[i])),
        Body::Symbols(t) => Ok(contract(f.q(), f.n(), mu.atoms(), |i| t[i] as f64)),
        Body::Oracle(_) => {
            Ok(value_distribution(f, mu)?.iter().enumerate().map(|(a, p)| a as f64 * p).sum())
        }
    }
}

/// `P_mu[f = a]`.
pub fn prob_value(f: &QaryFunction, mu: &ProductMeasure, a: u32) -> Result<f64> {
    mu.require_q(f.q())?;
    let k = f.codomain_size()?;
    if a as usize >= k {
        return Err(Error::SymbolOutOfRange { symbol: a as usize, q: k });
    }
    match f.body() {
        Body::Symbols(t) => Ok(contract(f.q(), f.n(), mu.atoms(), |i| f64::from(u8::from(t[i] == a)))),
        Body::Oracle(_) => Ok(value_distribution(f, mu)?[a as usize]),
        Body::Reals(_) => unreachable!("codomain_size rejects real functions"),
    }
}

/// The law of `f(X)` under `mu^n` for alphabet-valued `f`.
///
/// Oracles use the family's structured evaluator when one exists and fall
/// back to tabulation within [`EXACT_CAP`].
pub fn value_distribution(f: &QaryFunction, mu: &ProductMeasure) -> Result<Vec<f64>> {
    mu.require_q(f.q())?;
    let k = f.codomain_size()?;
    if let Body::Oracle(spec) = f.body() {
        if let Some(dist) = spec.exact_distribution(mu) {
            return Ok(dist);
        }
        if table_len(f.q(), f.n()).is_err() {
            return Err(Error::NoExactEvaluator);
        }
    }
    let table = f.symbols()?;
    Ok((0..k as u32)
        .map(|a| contract(f.q(), f.n(), mu.atoms(), |i| f64::from(u8::from(table[i] == a))))
        .collect())
}

/// Mask of a coordinate set, validated against the arity.
pub fn coordinate_mask(coords: &[usize], n: usize) -> Result<u64> {
    coords.iter().try_fold(0u64, |mask, &c| {
        if c >= n || c >= 64 {
            Err(Error::CoordinateOutOfRange { coordinate: c, n })
        } else {
            Ok(mask | (1 << c))
        }
    })
}

/// `x -> E_mu[f | X_S = x_S]` for the coordinate set `coords`.
pub fn conditional_expectation(f: &QaryFunction, mu: &ProductMeasure, coords: &[usize]) -> Result<QaryFunction> {
    let mask = coordinate_mask(coords, f.n())?;
    conditional_expectation_mask(f, mu, mask)
}

pub(crate) fn conditional_expectation_mask(f: &QaryFunction, mu: &ProductMeasure, mask: u64) -> Result<QaryFunction> {
    mu.require_q(f.q())?;
    let mut table = f.reals()?.into_owned();
    for i in (0..f.n()).filter(|i| mask & (1 << i) == 0) {
        average_out(&mut table, f.q(), f.n(), i, mu.atoms());
    }
    QaryFunction::from_reals(f.q(), f.n(), table)
}

/// Draws a simplex point.
pub fn sample_simplex(sampler: &mut SimplexSampler) -> ProductMeasure {
    sampler.sample()
}
