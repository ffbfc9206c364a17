//! Built-in voting rules and graph properties used as test subjects.
//!
//! Every family evaluates pointwise as an oracle. Plurality, recursive
//! plurality, dictators and the antisymmetric majority also have exact
//! evaluators for the law of `f(X)` under a product measure, so they can be
//! studied at sizes far beyond what a table allows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qfun::{ProductMeasure, QaryFunction};

/// How plurality resolves a tie among the most frequent symbols.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// The tied symbol whose first appearance in the input is earliest.
    /// Fair and monotone, but depends on voter order.
    #[default]
    FirstOccurrence,
    /// The smallest tied symbol. Anonymous and monotone, not fair.
    SmallestIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphPropertyKind {
    /// Color with the most edges.
    MostPopularColor,
    /// Color whose graph has the largest clique.
    MaxCliqueColor,
    /// Color whose graph has the smallest independence number.
    MinIndependentSetColor,
}

/// A parametrized family instance. Serializes as
/// `{"oracle": "<kind>", "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "oracle", content = "params", rename_all = "snake_case")]
pub enum FamilySpec {
    Plurality {
        q: usize,
        n: usize,
        #[serde(default)]
        tie_break: TieBreak,
    },
    /// Plurality of pluralities over consecutive blocks; `n = arity^depth`.
    RecursivePlurality {
        q: usize,
        arity: usize,
        depth: usize,
        #[serde(default)]
        tie_break: TieBreak,
    },
    /// Edge colorings of `K_vertices`, one coordinate per edge in
    /// lexicographic order `(0,1), (0,2), ..., (v-2,v-1)`. Ties go to the
    /// smaller color.
    GraphProperty {
        vertices: usize,
        q: usize,
        property: GraphPropertyKind,
    },
    /// `m(x, -y)` on `2n` bits: `x` is the first half, `y` the second.
    AntisymMajority { n: usize },
    Dictator { q: usize, n: usize, coordinate: usize },
}

impl FamilySpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            Self::Plurality { q, n, .. } => {
                if q < 2 || n < 1 {
                    return bad(format!("plurality needs q >= 2 and n >= 1, got q = {q}, n = {n}"));
                }
            }
            Self::RecursivePlurality { q, arity, depth, .. } => {
                if q < 2 || arity < 2 || depth < 1 {
                    return bad("recursive plurality needs q >= 2, arity >= 2, depth >= 1".into());
                }
                let leaves = u32::try_from(depth).ok().and_then(|d| arity.checked_pow(d));
                if leaves.is_none() {
                    return bad("arity^depth overflows".into());
                }
            }
            Self::GraphProperty { vertices, q, .. } => {
                if !(2..=64).contains(&vertices) {
                    return bad(format!("graph properties need 2..=64 vertices, got {vertices}"));
                }
                if q < 2 {
                    return bad("graph properties need q >= 2".into());
                }
            }
            Self::AntisymMajority { n } => {
                if n < 1 {
                    return bad("antisymmetric majority needs n >= 1".into());
                }
            }
            Self::Dictator { q, n, coordinate } => {
                if q < 1 || n < 1 {
                    return bad("dictator needs q >= 1 and n >= 1".into());
                }
                if coordinate >= n {
                    return Err(Error::CoordinateOutOfRange { coordinate, n });
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Plurality { .. } => "plurality",
            Self::RecursivePlurality { .. } => "recursive_plurality",
            Self::GraphProperty { .. } => "graph_property",
            Self::AntisymMajority { .. } => "antisym_majority",
            Self::Dictator { .. } => "dictator",
        }
    }

    /// Input alphabet size.
    pub fn q(&self) -> usize {
        match *self {
            Self::Plurality { q, .. }
            | Self::RecursivePlurality { q, .. }
            | Self::GraphProperty { q, .. }
            | Self::Dictator { q, .. } => q,
            Self::AntisymMajority { .. } => 2,
        }
    }

    /// Number of coordinates.
    pub fn arity(&self) -> usize {
        match *self {
            Self::Plurality { n, .. } | Self::Dictator { n, .. } => n,
            Self::RecursivePlurality { arity, depth, .. } => arity.pow(depth as u32),
            Self::GraphProperty { vertices, .. } => vertices * (vertices - 1) / 2,
            Self::AntisymMajority { n } => 2 * n,
        }
    }

    pub fn codomain_size(&self) -> usize {
        self.q()
    }

    /// Evaluates the rule at a valid point.
    pub fn eval(&self, x: &[u32]) -> u32 {
        match *self {
            Self::Plurality { q, tie_break, .. } => plurality_winner(x, q, tie_break),
            Self::RecursivePlurality { q, arity, depth, tie_break } => {
                let mut level = x.to_vec();
                for _ in 0..depth {
                    level = level.chunks(arity).map(|b| plurality_winner(b, q, tie_break)).collect();
                }
                level[0]
            }
            Self::GraphProperty { vertices, q, property } => graph_property_value(x, vertices, q, property),
            Self::AntisymMajority { n } => antisym_majority_value(&x[..n], &x[n..]),
            Self::Dictator { coordinate, .. } => x[coordinate],
        }
    }

    /// Exact law of `f(X)` for `X ~ mu^n`, when a structured evaluator exists.
    pub fn exact_distribution(&self, mu: &ProductMeasure) -> Option<Vec<f64>> {
        if mu.q() != self.q() {
            return None;
        }
        match *self {
            Self::Plurality { n, tie_break, .. } => plurality_distribution(mu.atoms(), n, tie_break),
            Self::RecursivePlurality { arity, depth, tie_break, .. } => {
                let mut dist = mu.atoms().to_vec();
                for _ in 0..depth {
                    dist = plurality_distribution(&dist, arity, tie_break)?;
                }
                Some(dist)
            }
            Self::Dictator { .. } => Some(mu.atoms().to_vec()),
            Self::AntisymMajority { n } => {
                let one = antisym_majority_mean(n, mu.atom(1));
                Some(vec![1.0 - one, one])
            }
            Self::GraphProperty { .. } => None,
        }
    }
}

pub fn plurality(q: usize, n: usize, tie_break: TieBreak) -> Result<QaryFunction> {
    QaryFunction::from_family(FamilySpec::Plurality { q, n, tie_break })
}

pub fn recursive_plurality(q: usize, arity: usize, depth: usize, tie_break: TieBreak) -> Result<QaryFunction> {
    QaryFunction::from_family(FamilySpec::RecursivePlurality { q, arity, depth, tie_break })
}

pub fn graph_property(vertices: usize, q: usize, property: GraphPropertyKind) -> Result<QaryFunction> {
    QaryFunction::from_family(FamilySpec::GraphProperty { vertices, q, property })
}

/// The antisymmetric majority on `2n` bits.
pub fn antisym_majority(n: usize) -> Result<QaryFunction> {
    QaryFunction::from_family(FamilySpec::AntisymMajority { n })
}

/// The antisymmetric majority for a given total input length, which must be even.
pub fn antisym_majority_with_length(len: usize) -> Result<QaryFunction> {
    if len % 2 == 1 {
        return Err(Error::InvalidParameter(format!("antisymmetric majority needs an even input length, got {len}")));
    }
    antisym_majority(len / 2)
}

pub fn dictator(q: usize, n: usize, coordinate: usize) -> Result<QaryFunction> {
    QaryFunction::from_family(FamilySpec::Dictator { q, n, coordinate })
}

/// Most frequent symbol of `x`, ties resolved by `tie_break`.
pub fn plurality_winner(x: &[u32], q: usize, tie_break: TieBreak) -> u32 {
    let mut counts = vec![0usize; q];
    for &s in x {
        counts[s as usize] += 1;
    }
    let best = counts.iter().copied().max().unwrap_or(0);
    match tie_break {
        TieBreak::SmallestIndex => counts.iter().position(|&c| c == best).unwrap_or(0) as u32,
        TieBreak::FirstOccurrence => x.iter().copied().find(|&s| counts[s as usize] == best).unwrap_or(0),
    }
}

/// Upper bound on count vectors enumerated by [`plurality_distribution`].
const COUNT_VECTOR_CAP: u64 = 4_000_000;

fn count_vectors(n: usize, q: usize) -> Option<u64> {
    // C(n + q - 1, q - 1)
    let mut acc: u64 = 1;
    for j in 1..q as u64 {
        acc = acc.checked_mul(n as u64 + j)? / j;
        if acc > COUNT_VECTOR_CAP {
            return None;
        }
    }
    Some(acc)
}

/// Law of the plurality winner of `n` i.i.d. votes drawn from `weights`.
///
/// Sums multinomial probabilities over count vectors. Conditional on the
/// counts every arrangement is equally likely, so under first-occurrence
/// each of `k` tied symbols wins with probability `1/k`. Returns `None` when
/// the number of count vectors exceeds an internal cap.
pub fn plurality_distribution(weights: &[f64], n: usize, tie_break: TieBreak) -> Option<Vec<f64>> {
    let q = weights.len();
    count_vectors(n, q)?;
    let log_fact = log_factorials(n);
    let log_w: Vec<f64> = weights.iter().map(|w| w.ln()).collect();
    let mut out = vec![0.0; q];
    let mut counts = vec![0usize; q];

    struct Ctx<'a> {
        n: usize,
        log_fact: &'a [f64],
        weights: &'a [f64],
        log_w: &'a [f64],
        tie_break: TieBreak,
    }

    fn visit(ctx: &Ctx<'_>, counts: &mut [usize], slot: usize, left: usize, out: &mut [f64]) {
        let q = counts.len();
        if slot + 1 == q {
            counts[slot] = left;
            let mut log_p = ctx.log_fact[ctx.n];
            for (s, &c) in counts.iter().enumerate() {
                if c > 0 {
                    if ctx.weights[s] == 0.0 {
                        return;
                    }
                    log_p += c as f64 * ctx.log_w[s] - ctx.log_fact[c];
                }
            }
            let p = log_p.exp();
            let best = *counts.iter().max().unwrap();
            match ctx.tie_break {
                TieBreak::SmallestIndex => {
                    out[counts.iter().position(|&c| c == best).unwrap()] += p;
                }
                TieBreak::FirstOccurrence => {
                    let tied = counts.iter().filter(|&&c| c == best).count() as f64;
                    for (s, &c) in counts.iter().enumerate() {
                        if c == best {
                            out[s] += p / tied;
                        }
                    }
                }
            }
            return;
        }
        for c in 0..=left {
            counts[slot] = c;
            visit(ctx, counts, slot + 1, left - c, out);
        }
    }

    let ctx = Ctx { n, log_fact: &log_fact, weights, log_w: &log_w, tie_break };
    visit(&ctx, &mut counts, 0, n, &mut out);
    Some(out)
}

pub(crate) fn log_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    if p <= 0.0 || p >= 1.0 {
        let mut pmf = vec![0.0; n + 1];
        pmf[if p >= 1.0 { n } else { 0 }] = 1.0;
        return pmf;
    }
    let lf = log_factorials(n);
    (0..=n)
        .map(|k| (lf[n] - lf[k] - lf[n - k] + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp())
        .collect()
}

fn antisym_majority_value(x: &[u32], y: &[u32]) -> u32 {
    let sx: usize = x.iter().map(|&b| b as usize).sum();
    let sy: usize = y.iter().map(|&b| b as usize).sum();
    let one = match sx.cmp(&sy) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal if x != y => x > y,
        std::cmp::Ordering::Equal => x[0] == 1,
    };
    u32::from(one)
}

/// `E_p[m(x, -y)]` on `2n` bits each equal to 1 with probability `p`.
///
/// Ties in the count difference with `x != y` split evenly by the swap
/// `(x, y) -> (y, x)`; the residual `x = y` event pays out when `x_0 = 1`.
pub fn antisym_majority_mean(n: usize, p: f64) -> f64 {
    let pmf = binomial_pmf(n, p);
    let mut above = 0.0;
    let mut cum_below = 0.0;
    let mut equal = 0.0;
    for a in 0..=n {
        above += pmf[a] * cum_below;
        equal += pmf[a] * pmf[a];
        cum_below += pmf[a];
    }
    let agree = p * p + (1.0 - p) * (1.0 - p);
    let diagonal = agree.powi(n as i32);
    let diagonal_one = p * p * agree.powi(n as i32 - 1);
    above + (equal - diagonal) / 2.0 + diagonal_one
}

/// Lexicographic edge list of `K_vertices`.
pub fn edge_list(vertices: usize) -> Vec<(usize, usize)> {
    (0..vertices).flat_map(|u| (u + 1..vertices).map(move |v| (u, v))).collect()
}

/// Coordinate of edge `{u, v}` in the lexicographic order.
pub fn edge_index(vertices: usize, u: usize, v: usize) -> usize {
    let (u, v) = if u < v { (u, v) } else { (v, u) };
    u * vertices - u * (u + 1) / 2 + (v - u - 1)
}

fn graph_property_value(x: &[u32], vertices: usize, q: usize, property: GraphPropertyKind) -> u32 {
    if property == GraphPropertyKind::MostPopularColor {
        return plurality_winner(x, q, TieBreak::SmallestIndex);
    }
    let mut adjacency = vec![vec![0u64; vertices]; q];
    for ((u, v), &c) in edge_list(vertices).into_iter().zip(x) {
        adjacency[c as usize][u] |= 1 << v;
        adjacency[c as usize][v] |= 1 << u;
    }
    let everyone = if vertices == 64 { u64::MAX } else { (1u64 << vertices) - 1 };
    let scores: Vec<usize> = adjacency
        .iter()
        .map(|adj| match property {
            GraphPropertyKind::MaxCliqueColor => clique_number(adj),
            _ => {
                let complement: Vec<u64> =
                    adj.iter().enumerate().map(|(v, &a)| !a & everyone & !(1 << v)).collect();
                clique_number(&complement)
            }
        })
        .collect();
    let pick = match property {
        GraphPropertyKind::MaxCliqueColor => *scores.iter().max().unwrap(),
        _ => *scores.iter().min().unwrap(),
    };
    scores.iter().position(|&s| s == pick).unwrap() as u32
}

/// Size of a largest clique of the graph given by adjacency bitmasks.
pub fn clique_number(adj: &[u64]) -> usize {
    fn grow(adj: &[u64], candidates: u64, size: usize, best: &mut usize) {
        if candidates == 0 {
            *best = (*best).max(size);
            return;
        }
        let mut rest = candidates;
        while rest != 0 {
            if size + rest.count_ones() as usize <= *best {
                return;
            }
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            grow(adj, rest & adj[v], size + 1, best);
        }
    }
    let all = if adj.len() == 64 { u64::MAX } else { (1u64 << adj.len()) - 1 };
    let mut best = 0;
    grow(adj, all, 0, &mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfun::{decode, value_distribution};

    #[test]
    fn plurality_examples() {
        let f = |x: &[u32], q| plurality_winner(x, q, TieBreak::FirstOccurrence);
        assert_eq!(f(&[0, 0, 1], 2), 0);
        assert_eq!(f(&[0, 1, 2], 3), 0);
        assert_eq!(f(&[2, 1, 1, 2], 3), 2);
        assert_eq!(plurality_winner(&[2, 1, 1, 2], 3, TieBreak::SmallestIndex), 1);
    }

    #[test]
    fn recursive_plurality_examples() {
        let f = recursive_plurality(2, 3, 2, TieBreak::FirstOccurrence).unwrap();
        assert_eq!(f.n(), 9);
        assert_eq!(f.eval_symbol(&[0, 0, 1, 0, 1, 1, 1, 1, 1]).unwrap(), 1);
        let flat = plurality(3, 3, TieBreak::FirstOccurrence).unwrap().tabulate().unwrap();
        let rec = recursive_plurality(3, 3, 1, TieBreak::FirstOccurrence).unwrap().tabulate().unwrap();
        assert_eq!(flat.symbols().unwrap(), rec.symbols().unwrap());
    }

    #[test]
    fn graph_property_examples() {
        let f = graph_property(4, 3, GraphPropertyKind::MostPopularColor).unwrap();
        assert_eq!(f.n(), 6);
        assert_eq!(f.eval_symbol(&[1; 6]).unwrap(), 1);
        let k3 = graph_property(3, 2, GraphPropertyKind::MostPopularColor).unwrap();
        assert_eq!(k3.eval_symbol(&[0, 0, 1]).unwrap(), 0);

        // Color 2 is the triangle {0,1,2}; colors 0 and 1 are matchings on the rest.
        let mut x = vec![0u32; 6];
        for (u, v) in [(0, 1), (0, 2), (1, 2)] {
            x[edge_index(4, u, v)] = 2;
        }
        x[edge_index(4, 0, 3)] = 0;
        x[edge_index(4, 1, 3)] = 1;
        x[edge_index(4, 2, 3)] = 1;
        let clique = graph_property(4, 3, GraphPropertyKind::MaxCliqueColor).unwrap();
        assert_eq!(clique.eval_symbol(&x).unwrap(), 2);
        let indep = graph_property(4, 3, GraphPropertyKind::MinIndependentSetColor).unwrap();
        // alpha(color 2) = 2 ({0,3}), colors 0 and 1 have alpha 3.
        assert_eq!(indep.eval_symbol(&x).unwrap(), 2);
        assert!(graph_property(1, 2, GraphPropertyKind::MaxCliqueColor).is_err());
    }

    #[test]
    fn edge_indexing_is_lexicographic() {
        let edges = edge_list(5);
        for (i, &(u, v)) in edges.iter().enumerate() {
            assert_eq!(edge_index(5, u, v), i);
            assert_eq!(edge_index(5, v, u), i);
        }
    }

    #[test]
    fn clique_number_small_graphs() {
        // 5-cycle
        let adj: Vec<u64> = (0..5).map(|v| (1 << ((v + 1) % 5)) | (1 << ((v + 4) % 5))).collect();
        assert_eq!(clique_number(&adj), 2);
        let k4: Vec<u64> = (0..4).map(|v| 0b1111 & !(1 << v)).collect();
        assert_eq!(clique_number(&k4), 4);
        assert_eq!(clique_number(&[0, 0, 0]), 1);
    }

    #[test]
    fn antisym_majority_examples() {
        let f = antisym_majority(3).unwrap();
        assert_eq!(f.eval_symbol(&[1, 1, 1, 0, 0, 0]).unwrap(), 1);
        let table = f.tabulate().unwrap();
        for i in 0..64 {
            let x = decode(2, 6, i);
            let swapped: Vec<u32> = x[3..].iter().chain(&x[..3]).copied().collect();
            if x[..3] != x[3..] {
                assert_ne!(table.eval_symbol(&x).unwrap(), table.eval_symbol(&swapped).unwrap());
            }
        }
        assert!(antisym_majority_with_length(5).is_err());
        assert_eq!(antisym_majority_with_length(6).unwrap(), f);
    }

    #[test]
    fn dictator_examples() {
        let f = dictator(3, 4, 2).unwrap();
        assert_eq!(f.eval_symbol(&[0, 1, 2, 0]).unwrap(), 2);
        let mu = ProductMeasure::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(value_distribution(&f, &mu).unwrap(), vec![0.2, 0.3, 0.5]);
        assert!(dictator(2, 2, 2).is_err());
    }

    #[test]
    fn structured_plurality_matches_enumeration() {
        let measures = [vec![0.5, 0.5], vec![0.3, 0.7], vec![0.2, 0.3, 0.5], vec![0.0, 0.4, 0.6]];
        for atoms in measures {
            let mu = ProductMeasure::new(atoms).unwrap();
            for n in 1..=7 {
                for tb in [TieBreak::FirstOccurrence, TieBreak::SmallestIndex] {
                    let oracle = plurality(mu.q(), n, tb).unwrap();
                    let exact = value_distribution(&oracle, &mu).unwrap();
                    let table = value_distribution(&oracle.tabulate().unwrap(), &mu).unwrap();
                    for (a, b) in exact.iter().zip(&table) {
                        assert!((a - b).abs() < 1e-10, "n = {n}, {tb:?}: {exact:?} vs {table:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn structured_recursive_and_antisym_match_enumeration() {
        let mu = ProductMeasure::new(vec![0.35, 0.65]).unwrap();
        let rec = recursive_plurality(2, 3, 2, TieBreak::FirstOccurrence).unwrap();
        let a = value_distribution(&rec, &mu).unwrap();
        let b = value_distribution(&rec.tabulate().unwrap(), &mu).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-12);
        let rec3 = recursive_plurality(3, 2, 3, TieBreak::FirstOccurrence).unwrap();
        let mu3 = ProductMeasure::new(vec![0.5, 0.3, 0.2]).unwrap();
        let a = value_distribution(&rec3, &mu3).unwrap();
        let b = value_distribution(&rec3.tabulate().unwrap(), &mu3).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
        for n in 1..=6 {
            for p in [0.1, 0.5, 0.77] {
                let f = antisym_majority(n).unwrap();
                let mu = ProductMeasure::new(vec![1.0 - p, p]).unwrap();
                let exact = antisym_majority_mean(n, p);
                let table = value_distribution(&f.tabulate().unwrap(), &mu).unwrap()[1];
                assert!((exact - table).abs() < 1e-12, "n = {n}, p = {p}");
            }
        }
    }

    #[test]
    fn antisym_majority_is_balanced_at_uniform() {
        for n in 1..=6 {
            let f = antisym_majority(n).unwrap().tabulate().unwrap();
            let ones = f.symbols().unwrap().iter().filter(|&&s| s == 1).count();
            // Exactly half the 2^(2n) inputs map to 1: zero tie-rule excess.
            assert_eq!(ones * 2, 1 << (2 * n));
        }
    }

    #[test]
    fn family_json_shape() {
        let spec = FamilySpec::Plurality { q: 3, n: 5, tie_break: TieBreak::FirstOccurrence };
        let json = serde_json::to_value(&spec).unwrap();
        assert_eq!(json["oracle"], "plurality");
        assert_eq!(json["params"]["tie_break"], "first_occurrence");
        let back: FamilySpec =
            serde_json::from_str(r#"{"oracle":"graph_property","params":{"vertices":4,"q":2,"property":"max_clique_color"}}"#)
                .unwrap();
        assert_eq!(back.arity(), 6);
    }
}
