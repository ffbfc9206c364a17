//! The partial orders `<=_a` and certified structural checks.
//!
//! `x <=_a y` holds when `y` is obtained from `x` by rewriting some
//! coordinates to `a`. Every such pair is joined by a chain of single
//! rewrites, so monotonicity only has to be checked on covering pairs.
//! Symmetry and fairness are checked on group generators.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::edge_index;
use crate::qfun::{decode_into, encode, Codomain, QaryFunction};

/// `x <=_a y`: `{i : x_i = a} ⊆ {i : y_i = a}` and `x_i = y_i` wherever `y_i != a`.
pub fn leq_a(x: &[u32], y: &[u32], a: u32) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter(format!("points of lengths {} and {}", x.len(), y.len())));
    }
    let grows = x.iter().zip(y).all(|(&u, &v)| u != a || v == a);
    let fixed = x.iter().zip(y).all(|(&u, &v)| v == a || u == v);
    Ok(grows && fixed)
}

/// A counterexample found by one of the checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "relation", rename_all = "snake_case")]
pub enum Violation {
    /// `x <=_a y` and `f(x) = a` but `f(y) != a`.
    Monotone { x: Vec<u32>, y: Vec<u32>, symbol: u32 },
    /// `x <=_0 y` and `f(x) = 1 > f(y) = 0`.
    ZeroMonotone { x: Vec<u32>, y: Vec<u32> },
    /// `f(x_sigma) != f(x)` with `(x_sigma)_i = x_{sigma(i)}`.
    Symmetric { x: Vec<u32>, permutation: Vec<usize> },
    /// `f(sigma(x)) != sigma(f(x))`.
    Fair { x: Vec<u32>, relabeling: Vec<u32> },
}

impl Violation {
    /// Re-evaluates `f` on the witness; true when the violation is real.
    pub fn reproduces(&self, f: &QaryFunction) -> Result<bool> {
        Ok(match self {
            Self::Monotone { x, y, symbol } => {
                leq_a(x, y, *symbol)? && f.eval_symbol(x)? == *symbol && f.eval_symbol(y)? != *symbol
            }
            Self::ZeroMonotone { x, y } => leq_a(x, y, 0)? && f.eval_real(x)? > f.eval_real(y)?,
            Self::Symmetric { x, permutation } => {
                let moved: Vec<u32> = permutation.iter().map(|&j| x[j]).collect();
                f.eval_real(&moved)? != f.eval_real(x)?
            }
            Self::Fair { x, relabeling } => {
                let moved: Vec<u32> = x.iter().map(|&s| relabeling[s as usize]).collect();
                f.eval_symbol(&moved)? != relabeling[f.eval_symbol(x)? as usize]
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub pass: bool,
    pub witness: Option<Violation>,
    /// Only set by [`check_symmetric`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transitive: Option<bool>,
}

impl CheckResult {
    fn from_witness(witness: Option<Violation>) -> Self {
        Self { pass: witness.is_none(), witness, transitive: None }
    }
}

/// A permutation group on coordinates, given by generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryGroup {
    n: usize,
    generators: Vec<Vec<usize>>,
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&j| j < p.len() && !std::mem::replace(&mut seen[j], true))
}

impl SymmetryGroup {
    pub fn new(n: usize, generators: Vec<Vec<usize>>) -> Result<Self> {
        for g in &generators {
            if g.len() != n || !is_permutation(g) {
                return Err(Error::InvalidParameter(format!("{g:?} is not a permutation of 0..{n}")));
            }
        }
        Ok(Self { n, generators })
    }

    /// `S_n` from an adjacent transposition and the `n`-cycle.
    pub fn full(n: usize) -> Self {
        let mut generators = vec![Self::rotation(n)];
        if n >= 2 {
            let mut swap: Vec<usize> = (0..n).collect();
            swap.swap(0, 1);
            generators.push(swap);
        }
        Self { n, generators }
    }

    /// The cyclic group generated by the `n`-cycle.
    pub fn cyclic(n: usize) -> Self {
        Self { n, generators: vec![Self::rotation(n)] }
    }

    fn rotation(n: usize) -> Vec<usize> {
        (0..n).map(|i| (i + 1) % n).collect()
    }

    /// Action of vertex relabelings on the lexicographic edges of `K_vertices`,
    /// generated by the transposition `(0 1)` and the cycle `v -> v + 1`.
    pub fn graph_vertex_action(vertices: usize) -> Result<Self> {
        if vertices < 2 {
            return Err(Error::InvalidParameter("need at least two vertices".into()));
        }
        let lift = |pi: &dyn Fn(usize) -> usize| -> Vec<usize> {
            crate::families::edge_list(vertices)
                .into_iter()
                .map(|(u, v)| edge_index(vertices, pi(u), pi(v)))
                .collect()
        };
        let swap = |v: usize| match v {
            0 => 1,
            1 => 0,
            v => v,
        };
        let cycle = |v: usize| (v + 1) % vertices;
        Self::new(vertices * (vertices - 1) / 2, vec![lift(&swap), lift(&cycle)])
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }

    /// Whether the orbit of coordinate 0 is everything.
    pub fn is_transitive(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for g in &self.generators {
                if !std::mem::replace(&mut seen[g[i]], true) {
                    queue.push_back(g[i]);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Checks `f(x) = a, x <=_a y => f(y) = a` on all single-coordinate covers.
pub fn check_monotone(f: &QaryFunction) -> Result<CheckResult> {
    let table = f.symbols()?;
    let (q, n) = (f.q(), f.n());
    let mut x = vec![0u32; n];
    for (idx, &a) in table.iter().enumerate() {
        decode_into(q, idx, &mut x);
        for i in 0..n {
            if x[i] == a {
                continue;
            }
            let mut y = x.clone();
            y[i] = a;
            if table[encode(q, &y)] != a {
                return Ok(CheckResult::from_witness(Some(Violation::Monotone { x, y, symbol: a })));
            }
        }
    }
    Ok(CheckResult::from_witness(None))
}

/// Checks `x <=_0 y => f(x) <= f(y)` for a `{0,1}`-valued `f`.
pub fn check_zero_monotone(f: &QaryFunction) -> Result<CheckResult> {
    if !f.is_binary()? {
        return Err(Error::NotBinary);
    }
    let table = f.reals()?;
    let (q, n) = (f.q(), f.n());
    let mut x = vec![0u32; n];
    for (idx, &v) in table.iter().enumerate() {
        if v != 1.0 {
            continue;
        }
        decode_into(q, idx, &mut x);
        for i in (0..n).filter(|&i| x[i] != 0) {
            let mut y = x.clone();
            y[i] = 0;
            if table[encode(q, &y)] != 1.0 {
                return Ok(CheckResult::from_witness(Some(Violation::ZeroMonotone { x, y })));
            }
        }
    }
    Ok(CheckResult::from_witness(None))
}

/// Checks invariance under every generator and reports transitivity.
pub fn check_symmetric(f: &QaryFunction, group: &SymmetryGroup) -> Result<CheckResult> {
    if group.degree() != f.n() {
        return Err(Error::InvalidParameter(format!(
            "group acts on {} coordinates, function has {}",
            group.degree(),
            f.n()
        )));
    }
    let table = f.reals()?;
    let (q, n) = (f.q(), f.n());
    let mut x = vec![0u32; n];
    let mut moved = vec![0u32; n];
    let mut witness = None;
    'outer: for (idx, &v) in table.iter().enumerate() {
        decode_into(q, idx, &mut x);
        for g in group.generators() {
            for (m, &j) in moved.iter_mut().zip(g) {
                *m = x[j];
            }
            if table[encode(q, &moved)] != v {
                witness = Some(Violation::Symmetric { x: x.clone(), permutation: g.clone() });
                break 'outer;
            }
        }
    }
    let mut result = CheckResult::from_witness(witness);
    result.transitive = Some(group.is_transitive());
    Ok(result)
}

/// Symbol relabelings generating `S(A)`: the swap `(0 1)` and the `q`-cycle.
pub fn alphabet_generators(q: usize) -> Vec<Vec<u32>> {
    if q < 2 {
        return Vec::new();
    }
    let mut swap: Vec<u32> = (0..q as u32).collect();
    swap.swap(0, 1);
    vec![swap, (0..q as u32).map(|s| (s + 1) % q as u32).collect()]
}

/// Checks `f(sigma(x)) = sigma(f(x))` for the generators of `S(A)`.
pub fn check_fair(f: &QaryFunction) -> Result<CheckResult> {
    if f.codomain() != Codomain::Alphabet(f.q()) {
        return Err(Error::CodomainMismatch { expected: "alphabet equal to the input alphabet" });
    }
    let table = f.symbols()?;
    let (q, n) = (f.q(), f.n());
    let gens = alphabet_generators(q);
    let mut x = vec![0u32; n];
    for (idx, &v) in table.iter().enumerate() {
        decode_into(q, idx, &mut x);
        for g in &gens {
            let moved: Vec<u32> = x.iter().map(|&s| g[s as usize]).collect();
            if table[encode(q, &moved)] != g[v as usize] {
                return Ok(CheckResult::from_witness(Some(Violation::Fair { x, relabeling: g.clone() })));
            }
        }
    }
    Ok(CheckResult::from_witness(None))
}

/// Swaps symbols `0` and `a` in every input coordinate of `f`.
pub fn swap_input_symbols(f: &QaryFunction, a: u32) -> Result<QaryFunction> {
    if a as usize >= f.q() {
        return Err(Error::SymbolOutOfRange { symbol: a as usize, q: f.q() });
    }
    let table = f.reals()?;
    let q = f.q();
    QaryFunction::tabulate_reals(q, f.n(), |x| {
        let swapped: Vec<u32> = x.iter().map(|&s| if s == a { 0 } else if s == 0 { a } else { s }).collect();
        table[encode(q, &swapped)]
    })
}

/// `x -> 1[f(tau x) = a]` with `tau` swapping `0` and `a`: 0-monotone when `f` is monotone.
pub fn zero_anchored_indicator(f: &QaryFunction, a: u32) -> Result<QaryFunction> {
    swap_input_symbols(&f.indicator(a)?, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{dictator, graph_property, plurality, GraphPropertyKind, TieBreak};
    use crate::qfun::decode;

    #[test]
    fn leq_a_examples() {
        assert!(leq_a(&[1, 2], &[1, 2], 0).unwrap());
        assert!(leq_a(&[1, 2], &[0, 2], 0).unwrap());
        assert!(!leq_a(&[1, 2], &[0, 1], 0).unwrap());
        assert!(!leq_a(&[0, 2], &[1, 2], 0).unwrap());
        assert!(leq_a(&[1], &[1, 2], 0).is_err());
    }

    #[test]
    fn monotone_examples() {
        assert!(check_monotone(&dictator(3, 3, 1).unwrap()).unwrap().pass);
        for q in 2..=3 {
            for n in 1..=4 {
                let f = plurality(q, n, TieBreak::FirstOccurrence).unwrap();
                assert!(check_monotone(&f).unwrap().pass, "q = {q}, n = {n}");
            }
        }
        let anti = QaryFunction::tabulate_symbols(2, 3, 2, |x| {
            let ones = x.iter().sum::<u32>();
            u32::from(ones < 2)
        })
        .unwrap();
        let r = check_monotone(&anti).unwrap();
        assert!(!r.pass);
        assert!(r.witness.unwrap().reproduces(&anti).unwrap());
    }

    #[test]
    fn zero_monotone_examples() {
        let f = plurality(3, 3, TieBreak::FirstOccurrence).unwrap();
        for a in 0..3 {
            let g = zero_anchored_indicator(&f, a).unwrap();
            assert!(check_zero_monotone(&g).unwrap().pass);
        }
        assert!(check_zero_monotone(&QaryFunction::constant(3, 2, 0.0).unwrap()).unwrap().pass);
        let anti = QaryFunction::tabulate_reals(3, 2, |x| f64::from(u8::from(x[0] != 0))).unwrap();
        let r = check_zero_monotone(&anti).unwrap();
        assert!(!r.pass && r.witness.unwrap().reproduces(&anti).unwrap());
        let not_binary = QaryFunction::constant(2, 2, 0.5).unwrap();
        assert!(matches!(check_zero_monotone(&not_binary), Err(Error::NotBinary)));
    }

    #[test]
    fn symmetric_examples() {
        for n in 1..=5 {
            let f = plurality(3, n, TieBreak::SmallestIndex).unwrap();
            let r = check_symmetric(&f, &SymmetryGroup::full(n)).unwrap();
            assert!(r.pass && r.transitive == Some(true));
        }
        let d = dictator(2, 3, 0).unwrap();
        let r = check_symmetric(&d, &SymmetryGroup::cyclic(3)).unwrap();
        assert!(!r.pass);
        assert!(r.witness.as_ref().unwrap().reproduces(&d).unwrap());
        let g = graph_property(4, 2, GraphPropertyKind::MostPopularColor).unwrap();
        let group = SymmetryGroup::graph_vertex_action(4).unwrap();
        assert!(group.is_transitive());
        assert!(check_symmetric(&g, &group).unwrap().pass);
        assert!(check_symmetric(&g, &SymmetryGroup::full(5)).is_err());
    }

    #[test]
    fn first_occurrence_plurality_is_not_anonymous_with_ties() {
        let f = plurality(2, 2, TieBreak::FirstOccurrence).unwrap();
        let r = check_symmetric(&f, &SymmetryGroup::full(2)).unwrap();
        assert!(!r.pass);
        let odd = plurality(2, 5, TieBreak::FirstOccurrence).unwrap();
        assert!(check_symmetric(&odd, &SymmetryGroup::full(5)).unwrap().pass);
    }

    #[test]
    fn fair_examples() {
        assert!(check_fair(&dictator(3, 2, 0).unwrap()).unwrap().pass);
        let f = plurality(2, 2, TieBreak::SmallestIndex).unwrap();
        let r = check_fair(&f).unwrap();
        assert!(!r.pass);
        match r.witness.clone().unwrap() {
            Violation::Fair { x, .. } => assert_eq!(x, vec![0, 1]),
            other => panic!("unexpected witness {other:?}"),
        }
        assert!(r.witness.unwrap().reproduces(&f).unwrap());
        for q in 2..=3 {
            for n in 1..=4 {
                assert!(check_fair(&plurality(q, n, TieBreak::FirstOccurrence).unwrap()).unwrap().pass);
            }
        }
        let real = QaryFunction::constant(2, 2, 0.0).unwrap();
        assert!(matches!(check_fair(&real), Err(Error::CodomainMismatch { .. })));
    }

    #[test]
    fn transitivity() {
        let split = SymmetryGroup::new(4, vec![vec![1, 0, 2, 3], vec![0, 1, 3, 2]]).unwrap();
        assert!(!split.is_transitive());
        assert!(SymmetryGroup::cyclic(6).is_transitive());
        assert!(SymmetryGroup::new(3, vec![vec![0, 0, 1]]).is_err());
    }

    fn all_pairs_monotone(f: &QaryFunction) -> bool {
        let (q, n) = (f.q(), f.n());
        let len = q.pow(n as u32);
        (0..len).all(|i| {
            let x = decode(q, n, i);
            let fx = f.eval_symbol(&x).unwrap();
            (0..len).all(|j| {
                let y = decode(q, n, j);
                !leq_a(&x, &y, fx).unwrap() || f.eval_symbol(&y).unwrap() == fx
            })
        })
    }

    #[test]
    fn cover_check_agrees_with_all_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..300 {
            let q: usize = 2 + trial % 2;
            let n = 1 + trial % 3;
            let len = q.pow(n as u32);
            // Mostly plurality with a few random flips, so both verdicts occur.
            let base = plurality(q, n, TieBreak::FirstOccurrence).unwrap().tabulate().unwrap();
            let mut table = base.symbols().unwrap().into_owned();
            for _ in 0..rng.gen_range(0..3) {
                let i = rng.gen_range(0..len);
                table[i] = rng.gen_range(0..q as u32);
            }
            let f = QaryFunction::from_symbols(q, n, q, table).unwrap();
            assert_eq!(check_monotone(&f).unwrap().pass, all_pairs_monotone(&f));
        }
    }
}
