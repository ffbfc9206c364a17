//! Choice functions, voter profiles and plurality social choice.
//!
//! Subsets of the alternatives `0..m` are bitmasks (`u64`, bit `a` set when
//! `a` is a member). A profile is a sequence of weighted linear orders; a
//! weight-`k` entry stands for `k` consecutive identical voters, which is the
//! voter sequence used by first-occurrence tie-breaking.

use std::collections::BTreeMap;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{plurality_distribution, TieBreak};
use crate::rng::stream;
use crate::threshold::Z95;

/// Choice functions are stored densely, so `m` is kept small.
pub const MAX_CHOICE_ALTERNATIVES: usize = 12;

/// Orders over more alternatives than this are not enumerated.
pub const MAX_SEARCH_ALTERNATIVES: usize = 5;

pub fn subset_mask(members: &[usize]) -> u64 {
    members.iter().fold(0, |acc, &a| acc | 1 << a)
}

pub fn subset_members(mask: u64) -> Vec<usize> {
    (0..64).filter(|&a| mask >> a & 1 == 1).collect()
}

fn check_subset(m: usize, mask: u64) -> Result<()> {
    if mask == 0 {
        return Err(Error::EmptySubset);
    }
    if m < 64 && mask >> m != 0 {
        return Err(Error::InvalidParameter(format!("subset {mask:#b} has members outside 0..{m}")));
    }
    Ok(())
}

/// A strict ranking of `0..m`, best first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct LinearOrder {
    ranking: Vec<usize>,
}

impl TryFrom<Vec<usize>> for LinearOrder {
    type Error = Error;

    fn try_from(ranking: Vec<usize>) -> Result<Self> {
        Self::new(ranking)
    }
}

impl From<LinearOrder> for Vec<usize> {
    fn from(order: LinearOrder) -> Self {
        order.ranking
    }
}

impl LinearOrder {
    pub fn new(ranking: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; ranking.len()];
        for &a in &ranking {
            if a >= ranking.len() || std::mem::replace(&mut seen[a], true) {
                return Err(Error::InvalidProfile(format!("{ranking:?} is not a permutation")));
            }
        }
        Ok(Self { ranking })
    }

    /// `0 > 1 > ... > m-1`.
    pub fn identity(m: usize) -> Self {
        Self { ranking: (0..m).collect() }
    }

    pub fn m(&self) -> usize {
        self.ranking.len()
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    /// `position[a]` is the 0-based rank of `a`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.ranking.len()];
        for (r, &a) in self.ranking.iter().enumerate() {
            pos[a] = r;
        }
        pos
    }

    pub fn prefers(&self, a: usize, b: usize) -> bool {
        let pos = self.positions();
        pos[a] < pos[b]
    }

    /// Highest-ranked member of a nonempty subset.
    pub fn top_of(&self, mask: u64) -> Result<usize> {
        check_subset(self.m(), mask)?;
        Ok(self.top_unchecked(mask))
    }

    fn top_unchecked(&self, mask: u64) -> usize {
        *self.ranking.iter().find(|&&a| mask >> a & 1 == 1).expect("nonempty subset")
    }

    /// Relabels alternatives by `a -> perm[a]`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        Self { ranking: self.ranking.iter().map(|&a| perm[a]).collect() }
    }

    /// All `m!` orders, lexicographically.
    pub fn all(m: usize) -> Result<Vec<Self>> {
        if m > MAX_SEARCH_ALTERNATIVES + 3 {
            return Err(Error::InvalidParameter(format!("refusing to enumerate {m}! orders")));
        }
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..m).collect();
        loop {
            out.push(Self { ranking: current.clone() });
            // next permutation
            let Some(i) = (1..m).rev().find(|&i| current[i - 1] < current[i]) else { break };
            let j = (i..m).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        Ok(out)
    }
}

/// One entry of a profile: `weight` voters sharing a ranking.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedOrder {
    pub ranking: LinearOrder,
    pub weight: u64,
}

#[derive(Serialize, Deserialize)]
struct ProfileRecord {
    m: usize,
    orders: Vec<WeightedOrder>,
}

/// A finite electorate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRecord", into = "ProfileRecord")]
pub struct VoterProfile {
    m: usize,
    orders: Vec<WeightedOrder>,
}

impl TryFrom<ProfileRecord> for VoterProfile {
    type Error = Error;

    fn try_from(r: ProfileRecord) -> Result<Self> {
        Self::new(r.m, r.orders)
    }
}

impl From<VoterProfile> for ProfileRecord {
    fn from(p: VoterProfile) -> Self {
        Self { m: p.m, orders: p.orders }
    }
}

impl VoterProfile {
    pub fn new(m: usize, orders: Vec<WeightedOrder>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidProfile("profile has no voters".into()));
        }
        for o in &orders {
            if o.ranking.m() != m {
                return Err(Error::InvalidProfile(format!("ranking {:?} is not over {m} alternatives", o.ranking.ranking)));
            }
            if o.weight == 0 {
                return Err(Error::InvalidProfile("weights must be positive".into()));
            }
        }
        Ok(Self { m, orders })
    }

    /// One voter per order.
    pub fn from_voters(voters: Vec<LinearOrder>) -> Result<Self> {
        let m = voters.first().map_or(0, LinearOrder::m);
        Self::new(m, voters.into_iter().map(|ranking| WeightedOrder { ranking, weight: 1 }).collect())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn orders(&self) -> &[WeightedOrder] {
        &self.orders
    }

    /// Number of voters `n_0`.
    pub fn size(&self) -> u64 {
        self.orders.iter().map(|o| o.weight).sum()
    }

    /// Voters in sequence, weights expanded.
    pub fn voters(&self) -> impl Iterator<Item = &LinearOrder> + '_ {
        self.orders.iter().flat_map(|o| std::iter::repeat(&o.ranking).take(o.weight as usize))
    }

    /// `w(pi) = w'(pi) / n_0`, merged over repeated rankings.
    pub fn distribution(&self) -> Vec<(LinearOrder, f64)> {
        let total = self.size() as f64;
        let mut merged: BTreeMap<&LinearOrder, u64> = BTreeMap::new();
        for o in &self.orders {
            *merged.entry(&o.ranking).or_default() += o.weight;
        }
        merged.into_iter().map(|(r, w)| (r.clone(), w as f64 / total)).collect()
    }

    /// `margins[a][b]` = voters preferring `a` to `b` minus those preferring `b` to `a`.
    pub fn majority_margins(&self) -> Vec<Vec<i64>> {
        let m = self.m;
        let mut margins = vec![vec![0i64; m]; m];
        for o in &self.orders {
            let pos = o.ranking.positions();
            for a in 0..m {
                for b in 0..m {
                    if pos[a] < pos[b] {
                        margins[a][b] += o.weight as i64;
                        margins[b][a] -= o.weight as i64;
                    }
                }
            }
        }
        margins
    }

    /// Pairs `(a, b)` where a strict majority prefers `a` to `b`.
    pub fn strict_majority(&self) -> Vec<(usize, usize)> {
        let margins = self.majority_margins();
        let m = self.m;
        (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).filter(|&(a, b)| margins[a][b] > 0).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct ChoiceRecord {
    m: usize,
    choices: BTreeMap<u64, usize>,
}

/// `S -> c(S) in S` for every nonempty `S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ChoiceRecord", into = "ChoiceRecord")]
pub struct ChoiceFunction {
    m: usize,
    /// Indexed by mask; entry 0 is unused.
    choices: Vec<usize>,
}

impl TryFrom<ChoiceRecord> for ChoiceFunction {
    type Error = Error;

    fn try_from(r: ChoiceRecord) -> Result<Self> {
        Self::from_map(r.m, &r.choices)
    }
}

impl From<ChoiceFunction> for ChoiceRecord {
    fn from(c: ChoiceFunction) -> Self {
        Self { m: c.m, choices: c.subsets().map(|s| (s, c.choices[s as usize])).collect() }
    }
}

impl ChoiceFunction {
    fn check_m(m: usize) -> Result<()> {
        if m == 0 || m > MAX_CHOICE_ALTERNATIVES {
            return Err(Error::InvalidChoiceFunction(format!("m = {m} outside 1..={MAX_CHOICE_ALTERNATIVES}")));
        }
        Ok(())
    }

    /// Builds `c` from a rule; singletons are fixed regardless of the rule.
    pub fn from_rule(m: usize, mut rule: impl FnMut(u64) -> Result<usize>) -> Result<Self> {
        Self::check_m(m)?;
        let mut choices = vec![0; 1 << m];
        for s in 1..1u64 << m {
            let c = if s.is_power_of_two() { s.trailing_zeros() as usize } else { rule(s)? };
            if c >= m || s >> c & 1 == 0 {
                return Err(Error::InvalidChoiceFunction(format!("c({s}) = {c} is not in the subset")));
            }
            choices[s as usize] = c;
        }
        Ok(Self { m, choices })
    }

    /// Explicit table keyed by mask. Singletons may be omitted.
    pub fn from_map(m: usize, map: &BTreeMap<u64, usize>) -> Result<Self> {
        Self::check_m(m)?;
        if let Some(&bad) = map.keys().find(|&&s| s == 0 || s >> m != 0) {
            return Err(Error::InvalidChoiceFunction(format!("{bad} is not a nonempty subset of 0..{m}")));
        }
        Self::from_rule(m, |s| {
            map.get(&s).copied().ok_or_else(|| Error::InvalidChoiceFunction(format!("no choice for subset {s}")))
        })
    }

    /// The rational choice function of `order`.
    pub fn from_order(order: &LinearOrder) -> Result<Self> {
        Self::from_rule(order.m(), |s| Ok(order.top_unchecked(s)))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn choice(&self, mask: u64) -> Result<usize> {
        check_subset(self.m, mask)?;
        Ok(self.choices[mask as usize])
    }

    /// All nonempty subsets in increasing mask order.
    pub fn subsets(&self) -> impl Iterator<Item = u64> {
        1..1u64 << self.m
    }

    /// Subsets with at least two members.
    pub fn contested(&self) -> impl Iterator<Item = u64> {
        self.subsets().filter(|s| s.count_ones() >= 2)
    }

    /// `perm[c(S)] = c'(perm[S])`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        let mut choices = vec![0; self.choices.len()];
        for s in self.subsets() {
            let image = subset_members(s).iter().fold(0u64, |acc, &a| acc | 1 << perm[a]);
            choices[image as usize] = perm[self.choices[s as usize]];
        }
        Self { m: self.m, choices }
    }
}

/// Complete asymmetric relation on `0..m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TournamentRecord", into = "TournamentRecord")]
pub struct Tournament {
    m: usize,
    beats: Vec<Vec<bool>>,
}

#[derive(Serialize, Deserialize)]
struct TournamentRecord {
    m: usize,
    /// `[winner, loser]` pairs.
    relation: Vec<[usize; 2]>,
}

impl TryFrom<TournamentRecord> for Tournament {
    type Error = Error;

    fn try_from(r: TournamentRecord) -> Result<Self> {
        Self::from_pairs(r.m, &r.relation.iter().map(|&[a, b]| (a, b)).collect::<Vec<_>>())
    }
}

impl From<Tournament> for TournamentRecord {
    fn from(t: Tournament) -> Self {
        Self { m: t.m, relation: t.pairs().into_iter().map(|(a, b)| [a, b]).collect() }
    }
}

impl Tournament {
    /// From `(winner, loser)` pairs; every unordered pair must appear once.
    pub fn from_pairs(m: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut beats = vec![vec![false; m]; m];
        for &(a, b) in pairs {
            if a >= m || b >= m || a == b {
                return Err(Error::InvalidParameter(format!("({a}, {b}) is not a pair of distinct alternatives")));
            }
            if beats[a][b] || beats[b][a] {
                return Err(Error::InvalidParameter(format!("pair {{{a}, {b}}} appears twice")));
            }
            beats[a][b] = true;
        }
        let t = Self { m, beats };
        for a in 0..m {
            for b in a + 1..m {
                if !t.beats[a][b] && !t.beats[b][a] {
                    return Err(Error::InvalidParameter(format!("pair {{{a}, {b}}} has no winner")));
                }
            }
        }
        Ok(t)
    }

    /// Each pair's winner decided by a fair coin.
    pub fn random(m: usize, rng: &mut impl Rng) -> Self {
        let mut beats = vec![vec![false; m]; m];
        for a in 0..m {
            for b in a + 1..m {
                if rng.gen::<bool>() {
                    beats[a][b] = true;
                } else {
                    beats[b][a] = true;
                }
            }
        }
        Self { m, beats }
    }

    /// `a` beats `b` iff `b = a + 1 (mod m)`.
    pub fn cyclic(m: usize) -> Result<Self> {
        if m != 3 {
            return Err(Error::InvalidParameter("the cyclic tournament is defined for m = 3".into()));
        }
        Self::from_pairs(3, &[(0, 1), (1, 2), (2, 0)])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn beats(&self, a: usize, b: usize) -> bool {
        self.beats[a][b]
    }

    /// `(winner, loser)` pairs in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let m = self.m;
        (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).filter(|&(a, b)| self.beats[a][b]).collect()
    }
}

/// A linear order rationalizing `c`, if one exists.
///
/// A rationalizing order must agree with `c` on pairs, so the only
/// candidate ranks alternatives by their number of pairwise wins.
pub fn is_rational(c: &ChoiceFunction) -> Option<LinearOrder> {
    let m = c.m;
    let mut wins = vec![0usize; m];
    for a in 0..m {
        for b in a + 1..m {
            wins[c.choices[(1 << a) | (1 << b)]] += 1;
        }
    }
    let mut ranking: Vec<usize> = (0..m).collect();
    ranking.sort_by_key(|&a| std::cmp::Reverse(wins[a]));
    let order = LinearOrder { ranking };
    c.subsets().all(|s| order.top_unchecked(s) == c.choices[s as usize]).then_some(order)
}

/// Plurality over the voters' tops on `S`.
pub fn plurality_choice(profile: &VoterProfile, mask: u64, tie_break: TieBreak) -> Result<usize> {
    check_subset(profile.m, mask)?;
    let mut counts = vec![0u64; profile.m];
    let tops: Vec<usize> = profile.orders.iter().map(|o| o.ranking.top_unchecked(mask)).collect();
    for (o, &t) in profile.orders.iter().zip(&tops) {
        counts[t] += o.weight;
    }
    let best = *counts.iter().max().unwrap();
    Ok(match tie_break {
        TieBreak::SmallestIndex => counts.iter().position(|&c| c == best).unwrap(),
        TieBreak::FirstOccurrence => tops.into_iter().find(|&t| counts[t] == best).unwrap(),
    })
}

/// The choice function the plurality rule induces on `profile`.
pub fn plurality_choice_function(profile: &VoterProfile, tie_break: TieBreak) -> Result<ChoiceFunction> {
    ChoiceFunction::from_rule(profile.m, |s| plurality_choice(profile, s, tie_break))
}

/// Two voters per pair `aRb`: `a, b, rest ascending` and `rest descending, a, b`.
///
/// The pair `{a, b}` gets margin 2 from its gadget; every other pair is split
/// evenly by it.
pub fn mcgarvey_profile(r: &Tournament) -> Result<VoterProfile> {
    let m = r.m;
    if m < 2 {
        return Err(Error::InvalidParameter("need at least two alternatives".into()));
    }
    let mut voters = Vec::new();
    for (a, b) in r.pairs() {
        let rest: Vec<usize> = (0..m).filter(|&c| c != a && c != b).collect();
        let first = [a, b].into_iter().chain(rest.iter().copied()).collect();
        let second = rest.iter().rev().copied().chain([a, b]).collect();
        voters.push(LinearOrder { ranking: first });
        voters.push(LinearOrder { ranking: second });
    }
    VoterProfile::from_voters(voters)
}

/// Plurality scores on every contested subset, one column per order.
struct SaariSystem {
    orders: Vec<LinearOrder>,
    /// Rows of `sum_pi coeff[pi] w_pi >= 1`, one per `(S, b != c0(S))`.
    rows: Vec<Vec<i64>>,
}

impl SaariSystem {
    fn new(c0: &ChoiceFunction) -> Result<Self> {
        let orders = LinearOrder::all(c0.m)?;
        let mut rows = Vec::new();
        for s in c0.contested() {
            let winner = c0.choices[s as usize];
            let tops: Vec<usize> = orders.iter().map(|o| o.top_unchecked(s)).collect();
            for b in subset_members(s).into_iter().filter(|&b| b != winner) {
                rows.push(
                    tops.iter()
                        .map(|&t| i64::from(t == winner) - i64::from(t == b))
                        .collect(),
                );
            }
        }
        Ok(Self { orders, rows })
    }

    fn satisfied(&self, w: &[u64]) -> bool {
        self.rows
            .iter()
            .all(|row| row.iter().zip(w).map(|(&c, &x)| c * x as i64).sum::<i64>() >= 1)
    }

    /// Optimal fractional weights, or `None` when no profile exists.
    fn relaxation(&self) -> Option<Vec<f64>> {
        let mut lp = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<_> = self.orders.iter().map(|_| lp.add_var(1.0, (0.0, f64::INFINITY))).collect();
        for row in &self.rows {
            let expr: Vec<_> = vars.iter().zip(row).filter(|(_, &c)| c != 0).map(|(&v, &c)| (v, c as f64)).collect();
            lp.add_constraint(expr.as_slice(), ComparisonOp::Ge, 1.0);
        }
        let solution = lp.solve().ok()?;
        Some(vars.iter().map(|&v| solution[v].max(0.0)).collect())
    }

    /// Smallest `ceil(K w*)` that satisfies every row. `K = m! + 1` always works.
    fn round(&self, fractional: &[f64]) -> Vec<u64> {
        let k_max = 2 * (self.orders.len() as u64 + 1);
        (1..=k_max)
            .map(|k| fractional.iter().map(|&x| (k as f64 * x - 1e-9).ceil().max(0.0) as u64).collect::<Vec<_>>())
            .find(|w| self.satisfied(w))
            .expect("scaled relaxation rounds to a feasible profile")
    }

    /// Lexicographically first weight vector of each total below `limit`.
    fn exhaustive(&self, limit: u64) -> Option<Vec<u64>> {
        fn fill(sys: &SaariSystem, w: &mut Vec<u64>, left: u64) -> bool {
            if w.len() + 1 == sys.orders.len() {
                w.push(left);
                if sys.satisfied(w) {
                    return true;
                }
                w.pop();
                return false;
            }
            for x in (0..=left).rev() {
                w.push(x);
                if fill(sys, w, left - x) {
                    return true;
                }
                w.pop();
            }
            false
        }
        (1..limit).find_map(|total| {
            let mut w = Vec::with_capacity(self.orders.len());
            fill(self, &mut w, total).then_some(w)
        })
    }
}

/// How a realization was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    /// Every weight vector of smaller total was tried; the size is minimal.
    Exhaustive,
    /// Rounded linear-programming relaxation; the size need not be minimal.
    LpRounding,
}

/// A profile whose plurality choice function is `c0`, with every contested
/// winner strict so the tie-break never matters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaariRealization {
    pub profile: VoterProfile,
    pub size: u64,
    pub budget: u64,
    pub strict: bool,
    pub method: SearchMethod,
    /// Optimal value of the relaxation, a lower bound on `size`.
    pub lower_bound: f64,
}

/// Searches for a profile of at most `max_profile_size` voters realizing `c0`.
///
/// `Ok(None)` means no profile of any size gives strict plurality winners
/// matching `c0`. `BudgetExhausted` means one exists but the smallest found
/// is larger than the budget.
pub fn saari_search(c0: &ChoiceFunction, max_profile_size: u64) -> Result<Option<SaariRealization>> {
    if c0.m > MAX_SEARCH_ALTERNATIVES {
        return Err(Error::InvalidParameter(format!("search supports m <= {MAX_SEARCH_ALTERNATIVES}")));
    }
    if c0.m == 1 {
        let profile = VoterProfile::from_voters(vec![LinearOrder::identity(1)])?;
        return Ok(Some(SaariRealization {
            profile,
            size: 1,
            budget: max_profile_size,
            strict: true,
            method: SearchMethod::Exhaustive,
            lower_bound: 0.0,
        }));
    }
    let system = SaariSystem::new(c0)?;
    let Some(fractional) = system.relaxation() else { return Ok(None) };
    let lower_bound: f64 = fractional.iter().sum();
    let mut weights = system.round(&fractional);
    let mut method = SearchMethod::LpRounding;
    if system.orders.len() <= 6 {
        let limit = weights.iter().sum::<u64>();
        if let Some(smaller) = system.exhaustive(limit) {
            weights = smaller;
        }
        method = SearchMethod::Exhaustive;
    }
    let size: u64 = weights.iter().sum();
    if size > max_profile_size {
        return Err(Error::BudgetExhausted { needed: size, budget: max_profile_size });
    }
    let orders = system
        .orders
        .into_iter()
        .zip(weights)
        .filter(|&(_, w)| w > 0)
        .map(|(ranking, weight)| WeightedOrder { ranking, weight })
        .collect();
    let profile = VoterProfile::new(c0.m, orders)?;
    Ok(Some(SaariRealization { profile, size, budget: max_profile_size, strict: true, method, lower_bound }))
}

/// Agreement on one contested subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetAgreement {
    #[serde(rename = "S")]
    pub subset: Vec<usize>,
    pub mask: u64,
    pub target: usize,
    pub p_hat: f64,
    pub half_width: f64,
    /// Exact probability under the induced top-choice law, when affordable.
    pub exact: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndeterminacyReport {
    pub m: usize,
    pub voters: usize,
    pub samples: usize,
    pub seed: u64,
    pub per_subset: Vec<SubsetAgreement>,
    pub min_s: f64,
    pub min_subset: Vec<usize>,
    /// Fraction of trials agreeing with `c0` on every subset at once.
    pub joint: f64,
    pub joint_half_width: f64,
    /// `1 - sum_S (1 - p_S)`, the union-bound floor for `joint`.
    pub union_bound: f64,
}

fn half_width(p: f64, samples: usize) -> f64 {
    Z95 * (p * (1.0 - p) / samples as f64).sqrt()
}

/// Samples `n` voters i.i.d. from `w(pi)` per trial and compares the plurality
/// choice function (first occurrence) with `c0` on every contested subset.
pub fn indeterminacy_experiment(
    c0: &ChoiceFunction,
    realization: &VoterProfile,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<IndeterminacyReport> {
    if realization.m != c0.m {
        return Err(Error::DimensionMismatch { expected: c0.m, found: realization.m });
    }
    if n == 0 || samples == 0 {
        return Err(Error::InvalidParameter("need at least one voter and one trial".into()));
    }
    let law = realization.distribution();
    let cumulative: Vec<f64> = law
        .iter()
        .scan(0.0, |acc, (_, w)| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    let subsets: Vec<u64> = c0.contested().collect();
    // tops[s][pi]
    let tops: Vec<Vec<usize>> = subsets.iter().map(|&s| law.iter().map(|(o, _)| o.top_unchecked(s)).collect()).collect();
    let k = law.len();
    let m = c0.m;

    let trials: Vec<Vec<bool>> = (0..samples)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream(seed, trial as u64);
            let mut counts = vec![0u64; k];
            let mut first = vec![usize::MAX; k];
            for voter in 0..n {
                let u: f64 = rng.gen();
                let pi = cumulative.iter().position(|&c| u < c).unwrap_or(k - 1);
                counts[pi] += 1;
                if first[pi] == usize::MAX {
                    first[pi] = voter;
                }
            }
            subsets
                .iter()
                .zip(&tops)
                .map(|(&s, tops)| {
                    let mut tally = vec![0u64; m];
                    let mut earliest = vec![usize::MAX; m];
                    for pi in 0..k {
                        tally[tops[pi]] += counts[pi];
                        earliest[tops[pi]] = earliest[tops[pi]].min(first[pi]);
                    }
                    let best = *tally.iter().max().unwrap();
                    let winner = (0..m).filter(|&a| tally[a] == best).min_by_key(|&a| earliest[a]).unwrap();
                    winner == c0.choices[s as usize]
                })
                .collect()
        })
        .collect();

    let per_subset: Vec<SubsetAgreement> = subsets
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            let members = subset_members(s);
            let target = c0.choices[s as usize];
            let hits = trials.iter().filter(|t| t[j]).count();
            let p_hat = hits as f64 / samples as f64;
            let mut induced = vec![0.0; members.len()];
            for ((_, w), &t) in law.iter().zip(&tops[j]) {
                induced[members.iter().position(|&a| a == t).unwrap()] += w;
            }
            let exact = plurality_distribution(&induced, n, TieBreak::FirstOccurrence)
                .map(|d| d[members.iter().position(|&a| a == target).unwrap()]);
            SubsetAgreement { subset: members, mask: s, target, p_hat, half_width: half_width(p_hat, samples), exact }
        })
        .collect();

    let (min_s, min_subset) = per_subset
        .iter()
        .map(|a| (a.p_hat, a.subset.clone()))
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .unwrap_or((1.0, Vec::new()));
    let joint = trials.iter().filter(|t| t.iter().all(|&ok| ok)).count() as f64 / samples as f64;
    let union_bound = 1.0 - per_subset.iter().map(|a| 1.0 - a.p_hat).sum::<f64>();
    Ok(IndeterminacyReport {
        m,
        voters: n,
        samples,
        seed,
        per_subset,
        min_s,
        min_subset,
        joint,
        joint_half_width: half_width(joint, samples),
        union_bound,
    })
}

/// Member of `S` beating the most others by strict majority; ties go to the
/// member ranked highest in `tie_order`.
pub fn outdegree_choice(profile: &VoterProfile, mask: u64, tie_order: &LinearOrder) -> Result<usize> {
    check_subset(profile.m, mask)?;
    if tie_order.m() != profile.m {
        return Err(Error::DimensionMismatch { expected: profile.m, found: tie_order.m() });
    }
    let margins = profile.majority_margins();
    let members = subset_members(mask);
    let outdegree = |a: usize| members.iter().filter(|&&b| margins[a][b] > 0).count();
    let best = members.iter().map(|&a| outdegree(a)).max().unwrap();
    Ok(tie_order.ranking.iter().copied().find(|&a| mask >> a & 1 == 1 && outdegree(a) == best).unwrap())
}

/// Borda on `S`: minimal `r(a) = sum_voters rank_S(a)` (ranks from 1).
///
/// Ties go to the first tied alternative met when scanning voters' tops in
/// sequence, then their second choices, and so on.
pub fn borda_choice(profile: &VoterProfile, mask: u64) -> Result<usize> {
    check_subset(profile.m, mask)?;
    let restricted: Vec<(Vec<usize>, u64)> = profile
        .orders
        .iter()
        .map(|o| (o.ranking.ranking.iter().copied().filter(|&a| mask >> a & 1 == 1).collect(), o.weight))
        .collect();
    let mut score = vec![0u64; profile.m];
    for (ranking, weight) in &restricted {
        for (r, &a) in ranking.iter().enumerate() {
            score[a] += (r as u64 + 1) * weight;
        }
    }
    let best = subset_members(mask).into_iter().map(|a| score[a]).min().unwrap();
    let size = mask.count_ones() as usize;
    Ok((0..size)
        .flat_map(|level| restricted.iter().map(move |(ranking, _)| ranking[level]))
        .find(|&a| score[a] == best)
        .unwrap())
}

/// Uniformly random voters, for tests and experiments.
pub fn random_profile(m: usize, voters: usize, rng: &mut impl Rng) -> Result<VoterProfile> {
    let orders = (0..voters)
        .map(|_| {
            let mut ranking: Vec<usize> = (0..m).collect();
            ranking.shuffle(rng);
            LinearOrder { ranking }
        })
        .collect();
    VoterProfile::from_voters(orders)
}
