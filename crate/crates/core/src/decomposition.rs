//! Efron–Stein decomposition and the quantities built from it.
//!
//! Components are dense tables over `[q]^n`, one per subset `S` of the
//! coordinates, indexed by bitmask (bit `i` is coordinate `i`). The whole
//! family costs `2^n * q^n` entries and is capped at [`DECOMPOSITION_CAP`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qfun::{average_out, conditional_expectation_mask, contract, table_len, ProductMeasure, QaryFunction};

/// Cap on `2^n * q^n`, the total entry count of a decomposition.
pub const DECOMPOSITION_CAP: usize = 1 << 24;

/// Tolerance used by the inequality verifiers.
pub const VERIFY_TOL: f64 = 1e-9;

/// The orthogonal components `f_S` of a function under a product measure.
#[derive(Debug, Clone, PartialEq)]
pub struct EfronSteinDecomposition {
    q: usize,
    n: usize,
    measure: ProductMeasure,
    components: Vec<Vec<f64>>,
}

fn check_decomposable(f: &QaryFunction, mu: &ProductMeasure) -> Result<()> {
    mu.require_q(f.q())?;
    mu.require_positive()?;
    let len = table_len(f.q(), f.n())?;
    if f.n() >= 24 || (len << f.n()) > DECOMPOSITION_CAP {
        return Err(Error::TableTooLarge { q: f.q(), n: f.n(), cap: DECOMPOSITION_CAP });
    }
    Ok(())
}

/// Decomposes `f` as `sum_S f_S`.
///
/// Conditional expectations `E[f | X_S]` are built for every `S` by
/// averaging out one coordinate at a time, then inverted over the subset
/// lattice, which evaluates `f_S = sum_{S' <= S} (-1)^{|S \ S'|} E[f | X_S']`.
pub fn efron_stein(f: &QaryFunction, mu: &ProductMeasure) -> Result<EfronSteinDecomposition> {
    check_decomposable(f, mu)?;
    let (q, n) = (f.q(), f.n());
    let full = (1usize << n) - 1;
    let mut tables: Vec<Vec<f64>> = vec![Vec::new(); full + 1];
    tables[full] = f.reals()?.into_owned();
    for mask in (0..full).rev() {
        let j = (!mask).trailing_zeros() as usize;
        let mut t = tables[mask | (1 << j)].clone();
        average_out(&mut t, q, n, j, mu.atoms());
        tables[mask] = t;
    }
    for j in 0..n {
        let bit = 1 << j;
        for mask in 0..=full {
            if mask & bit != 0 {
                let (lo, hi) = tables.split_at_mut(mask);
                for (v, w) in hi[0].iter_mut().zip(&lo[mask ^ bit]) {
                    *v -= w;
                }
            }
        }
    }
    Ok(EfronSteinDecomposition { q, n, measure: mu.clone(), components: tables })
}

/// Squared `L_2(mu)` norm of a table.
fn sq_norm(table: &[f64], q: usize, n: usize, mu: &ProductMeasure) -> f64 {
    contract(q, n, mu.atoms(), |i| table[i] * table[i])
}

impl EfronSteinDecomposition {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn measure(&self) -> &ProductMeasure {
        &self.measure
    }

    /// Table of `f_S` for the subset with bitmask `mask`.
    pub fn component(&self, mask: usize) -> &[f64] {
        &self.components[mask]
    }

    pub fn component_function(&self, mask: usize) -> QaryFunction {
        QaryFunction::from_reals(self.q, self.n, self.components[mask].clone())
            .expect("components share the base shape")
    }

    /// Subsets in bitmask order.
    pub fn masks(&self) -> std::ops::Range<usize> {
        0..self.components.len()
    }

    /// `E[f] = f_empty`.
    pub fn mean(&self) -> f64 {
        self.components[0][0]
    }

    /// `||f_S||_2^2`.
    pub fn component_sq_norm(&self, mask: usize) -> f64 {
        sq_norm(&self.components[mask], self.q, self.n, &self.measure)
    }

    /// `sum_{|S| = k} ||f_S||_2^2`.
    pub fn level_weight(&self, k: usize) -> f64 {
        self.masks().filter(|m| m.count_ones() as usize == k).map(|m| self.component_sq_norm(m)).sum()
    }

    /// `sum_{S != empty} ||f_S||_2^2`, which equals the variance.
    pub fn variance(&self) -> f64 {
        self.masks().skip(1).map(|m| self.component_sq_norm(m)).sum()
    }

    /// `M^2(f) = sum_{S != empty} ||f_S||_2^2 / |S|`.
    pub fn m2(&self) -> f64 {
        self.masks().skip(1).map(|m| self.component_sq_norm(m) / m.count_ones() as f64).sum()
    }

    fn sum_where(&self, weight: impl Fn(usize) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.components[0].len()];
        for mask in self.masks() {
            let w = weight(mask);
            if w != 0.0 {
                for (o, v) in out.iter_mut().zip(&self.components[mask]) {
                    *o += w * v;
                }
            }
        }
        out
    }

    /// `sum_S f_S`.
    pub fn reconstruct(&self) -> QaryFunction {
        QaryFunction::from_reals(self.q, self.n, self.sum_where(|_| 1.0)).expect("shape preserved")
    }

    /// `Delta_i f = sum_{S contains i} f_S`.
    pub fn delta(&self, i: usize) -> Result<QaryFunction> {
        if i >= self.n {
            return Err(Error::CoordinateOutOfRange { coordinate: i, n: self.n });
        }
        let table = self.sum_where(|m| if m & (1 << i) != 0 { 1.0 } else { 0.0 });
        QaryFunction::from_reals(self.q, self.n, table)
    }

    /// JSON-friendly export.
    pub fn to_record(&self) -> DecompositionRecord {
        DecompositionRecord {
            schema: "threshold-lab/decomposition/v1".into(),
            q: self.q,
            n: self.n,
            atoms: self.measure.atoms().to_vec(),
            components: self
                .masks()
                .map(|mask| ComponentRecord {
                    subset: (0..self.n).filter(|i| mask & (1 << i) != 0).collect(),
                    table: self.components[mask].clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionRecord {
    pub schema: String,
    pub q: usize,
    pub n: usize,
    pub atoms: Vec<f64>,
    pub components: Vec<ComponentRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentRecord {
    #[serde(rename = "S")]
    pub subset: Vec<usize>,
    pub table: Vec<f64>,
}

/// `Delta_i f = f - E[f | x_{-i}]`.
pub fn delta_i(f: &QaryFunction, mu: &ProductMeasure, i: usize) -> Result<QaryFunction> {
    mu.require_q(f.q())?;
    mu.require_positive()?;
    if i >= f.n() {
        return Err(Error::CoordinateOutOfRange { coordinate: i, n: f.n() });
    }
    let others = ((1u64 << f.n()) - 1) & !(1 << i);
    let cond = conditional_expectation_mask(f, mu, others)?;
    f.linear_combination(1.0, &cond, -1.0)
}

/// `I_i(f) = E_mu[Var[f | x_{-i}]]`. Zero atoms are allowed.
pub fn influence(f: &QaryFunction, mu: &ProductMeasure, i: usize) -> Result<f64> {
    mu.require_q(f.q())?;
    if i >= f.n() {
        return Err(Error::CoordinateOutOfRange { coordinate: i, n: f.n() });
    }
    let (q, n) = (f.q(), f.n());
    let mut table = f.reals()?.into_owned();
    let stride = q.pow((n - 1 - i) as u32);
    let atoms = mu.atoms();
    for block in table.chunks_mut(stride * q) {
        for off in 0..stride {
            let mean: f64 = (0..q).map(|s| atoms[s] * block[off + s * stride]).sum();
            let var: f64 = (0..q).map(|s| atoms[s] * (block[off + s * stride] - mean).powi(2)).sum();
            for s in 0..q {
                block[off + s * stride] = var;
            }
        }
    }
    Ok(contract(q, n, atoms, |k| table[k]))
}

/// `(E_mu |g|^p)^(1/p)` for `p >= 1`.
pub fn lp_norm(g: &QaryFunction, mu: &ProductMeasure, p: f64) -> Result<f64> {
    mu.require_q(g.q())?;
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("L_p norms need finite p >= 1, got {p}")));
    }
    let t = g.reals()?;
    Ok(contract(g.q(), g.n(), mu.atoms(), |i| t[i].abs().powf(p)).powf(1.0 / p))
}

/// `T_theta f = sum_S theta^|S| f_S`.
pub fn noise_operator(d: &EfronSteinDecomposition, theta: f64) -> Result<QaryFunction> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!("noise parameter must lie in [0, 1], got {theta}")));
    }
    let table = d.sum_where(|m| theta.powi(m.count_ones() as i32));
    QaryFunction::from_reals(d.q, d.n, table)
}

/// Per-coordinate influence data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceReport {
    pub influences: Vec<f64>,
    pub total: f64,
    pub delta_l1: Vec<f64>,
    pub delta_l3_2: Vec<f64>,
    pub delta_l2: Vec<f64>,
}

pub fn influence_report(f: &QaryFunction, mu: &ProductMeasure) -> Result<InfluenceReport> {
    let mut report = InfluenceReport {
        influences: Vec::with_capacity(f.n()),
        total: 0.0,
        delta_l1: Vec::new(),
        delta_l3_2: Vec::new(),
        delta_l2: Vec::new(),
    };
    for i in 0..f.n() {
        let inf = influence(f, mu, i)?;
        let d = delta_i(f, mu, i)?;
        report.influences.push(inf);
        report.delta_l1.push(lp_norm(&d, mu, 1.0)?);
        report.delta_l3_2.push(lp_norm(&d, mu, 1.5)?);
        report.delta_l2.push(lp_norm(&d, mu, 2.0)?);
    }
    report.total = report.influences.iter().sum();
    Ok(report)
}

/// Which hypercontractive constant to use.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMode {
    /// `alpha^2 / 6`.
    #[default]
    Safe,
    /// The two-point expression, floored at `alpha^2 / 6`.
    Exact,
}

/// `alpha^2 / 6` for a smallest atom `alpha` in `(0, 1/2]`.
pub fn hypercontractive_sigma(alpha: f64) -> Result<f64> {
    hypercontractive_sigma_with(alpha, SigmaMode::Safe)
}

pub fn hypercontractive_sigma_with(alpha: f64, mode: SigmaMode) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::InvalidParameter(format!("smallest atom must lie in (0, 1/2], got {alpha}")));
    }
    let safe = alpha * alpha / 6.0;
    Ok(match mode {
        SigmaMode::Safe => safe,
        SigmaMode::Exact => wolff_sigma(alpha).map_or(safe, |s| s.max(safe)),
    })
}

/// Square root of
/// `((1-a)^(2/3) - a^(2/3)) / ((1-a) a^(-1/3) - a (1-a)^(-1/3))`,
/// evaluated from logarithms. `None` near `a = 1/2`, where it is `0/0`.
pub fn wolff_sigma(alpha: f64) -> Option<f64> {
    if !(alpha > 0.0 && alpha < 0.5) || 0.5 - alpha < 1e-4 {
        return None;
    }
    let (la, lb) = (alpha.ln(), (1.0 - alpha).ln());
    let num = (2.0 / 3.0 * lb).exp() - (2.0 / 3.0 * la).exp();
    let den = (lb - la / 3.0).exp() - (la - lb / 3.0).exp();
    let ratio = num / den;
    (ratio.is_finite() && ratio > 0.0).then(|| ratio.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypercontractivityReport {
    pub sigma: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Checks `||T_sigma g||_2 <= ||g||_{3/2}` with `sigma = mu*^2 / 6`.
pub fn verify_hypercontractivity(g: &QaryFunction, mu: &ProductMeasure) -> Result<HypercontractivityReport> {
    verify_hypercontractivity_with(g, mu, SigmaMode::Safe)
}

pub fn verify_hypercontractivity_with(
    g: &QaryFunction,
    mu: &ProductMeasure,
    mode: SigmaMode,
) -> Result<HypercontractivityReport> {
    let d = efron_stein(g, mu)?;
    let sigma = hypercontractive_sigma_with(mu.min_atom(), mode)?;
    let lhs = lp_norm(&noise_operator(&d, sigma)?, mu, 2.0)?;
    let rhs = lp_norm(g, mu, 1.5)?;
    Ok(HypercontractivityReport { sigma, lhs, rhs, ok: lhs <= rhs + VERIFY_TOL })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelBoundReport {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Checks `sum_{|S| = k} ||g_S||_2^2 <= (6 / alpha^2)^k ||g||_{3/2}^2` for mean-zero `g`.
pub fn verify_level_bound(g: &QaryFunction, mu: &ProductMeasure, k: usize) -> Result<LevelBoundReport> {
    if k < 1 || k > g.n() {
        return Err(Error::InvalidParameter(format!("level must lie in 1..={}, got {k}", g.n())));
    }
    let d = efron_stein(g, mu)?;
    if d.mean().abs() > VERIFY_TOL {
        return Err(Error::NonZeroMean { mean: d.mean() });
    }
    let alpha = mu.min_atom();
    let lhs = d.level_weight(k);
    let rhs = (6.0 / (alpha * alpha)).powi(k as i32) * lp_norm(g, mu, 1.5)?.powi(2);
    Ok(LevelBoundReport { k, lhs, rhs, ok: lhs <= rhs + VERIFY_TOL })
}

/// How a coordinate entered the influence-sum bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermStatus {
    Counted,
    /// `Delta_i f = 0`: contributes nothing.
    Null,
    /// `||Delta_i f||_2 = ||Delta_i f||_1`, so the log ratio vanishes.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TalagrandTerm {
    pub coordinate: usize,
    pub influence: f64,
    pub l1: f64,
    pub l2: f64,
    pub log_ratio: f64,
    pub term: Option<f64>,
    pub status: TermStatus,
    /// `M^2(Delta_i f)`.
    pub m2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TalagrandReport {
    pub variance: f64,
    pub terms: Vec<TalagrandTerm>,
    /// Sum of counted `||Delta_i f||_2^2 / log(||Delta_i f||_2 / ||Delta_i f||_1)`.
    pub weighted_sum: f64,
    pub log_inv_min_atom: f64,
    /// `log(1/mu*) * weighted_sum`.
    pub rhs_no_constant: f64,
    /// `variance / rhs_no_constant`, absent when every term is degenerate or null.
    pub empirical_c: Option<f64>,
    /// `sum_i M^2(Delta_i f)`.
    pub m2_sum: f64,
    pub variance_identity_ok: bool,
    pub degenerate_coordinates: Vec<usize>,
    /// For `{0,1}`-valued `f`: `sum_i I_i / (log(1/2) - log(I_i) / 2)` over counted terms.
    pub binary_form_sum: Option<f64>,
}

/// Both sides of the influence-sum variance bound, without its constant.
pub fn talagrand_report(f: &QaryFunction, mu: &ProductMeasure) -> Result<TalagrandReport> {
    let d = efron_stein(f, mu)?;
    let variance = d.variance();
    let scale = 1.0 + d.mean().powi(2);
    if variance <= 1e-15 * scale {
        return Err(Error::ConstantFunction);
    }
    let binary = f.is_binary()?;
    let mut terms = Vec::with_capacity(f.n());
    for i in 0..f.n() {
        let delta = delta_i(f, mu, i)?;
        let l1 = lp_norm(&delta, mu, 1.0)?;
        let l2 = lp_norm(&delta, mu, 2.0)?;
        let m2 = efron_stein(&delta, mu)?.m2();
        let log_ratio = if l1 > 0.0 { (l2 / l1).ln() } else { 0.0 };
        let status = if l2 <= 1e-12 * scale.sqrt() {
            TermStatus::Null
        } else if log_ratio <= 1e-12 {
            TermStatus::Degenerate
        } else {
            TermStatus::Counted
        };
        let term = (status == TermStatus::Counted).then(|| l2 * l2 / log_ratio);
        terms.push(TalagrandTerm { coordinate: i, influence: influence(f, mu, i)?, l1, l2, log_ratio, term, status, m2 });
    }
    let weighted_sum: f64 = terms.iter().filter_map(|t| t.term).sum();
    let log_inv_min_atom = (1.0 / mu.min_atom()).ln();
    let rhs_no_constant = weighted_sum * log_inv_min_atom;
    let m2_sum: f64 = terms.iter().map(|t| t.m2).sum();
    let binary_form_sum = binary.then(|| {
        terms
            .iter()
            .filter(|t| t.status == TermStatus::Counted)
            .map(|t| t.influence / (0.5f64.ln() - t.influence.ln() / 2.0))
            .sum()
    });
    Ok(TalagrandReport {
        variance,
        empirical_c: (rhs_no_constant > 0.0).then(|| variance / rhs_no_constant),
        weighted_sum,
        log_inv_min_atom,
        rhs_no_constant,
        variance_identity_ok: (variance - m2_sum).abs() <= VERIFY_TOL,
        m2_sum,
        degenerate_coordinates: terms.iter().filter(|t| t.status == TermStatus::Degenerate).map(|t| t.coordinate).collect(),
        binary_form_sum,
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform2() -> ProductMeasure {
        ProductMeasure::uniform(2)
    }

    fn dictator_real(n: usize) -> QaryFunction {
        QaryFunction::tabulate_reals(2, n, |x| x[0] as f64).unwrap()
    }

    fn xor2() -> QaryFunction {
        QaryFunction::tabulate_reals(2, 2, |x| f64::from(u8::from(x[0] != x[1]))).unwrap()
    }

    fn majority3() -> QaryFunction {
        QaryFunction::tabulate_reals(2, 3, |x| f64::from(u8::from(x.iter().sum::<u32>() >= 2))).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(u, v)| (u - v).abs() < 1e-12)
    }

    #[test]
    fn constant_decomposition() {
        let d = efron_stein(&QaryFunction::constant(3, 2, 4.5).unwrap(), &ProductMeasure::uniform(3)).unwrap();
        assert!(d.component(0).iter().all(|&v| (v - 4.5).abs() < 1e-12));
        assert!((1..4).all(|m| d.component(m).iter().all(|v| v.abs() < 1e-12)));
    }

    #[test]
    fn dictator_and_xor_decompositions() {
        // Hand inclusion-exclusion over the four points (index = 2 x_0 + x_1).
        let d = efron_stein(&dictator_real(2), &uniform2()).unwrap();
        assert!(close(d.component(0b00), &[0.5; 4]));
        assert!(close(d.component(0b01), &[-0.5, -0.5, 0.5, 0.5]));
        assert!(close(d.component(0b10), &[0.0; 4]));
        assert!(close(d.component(0b11), &[0.0; 4]));

        let d = efron_stein(&xor2(), &uniform2()).unwrap();
        assert!(close(d.component(0b00), &[0.5; 4]));
        assert!(close(d.component(0b01), &[0.0; 4]));
        assert!(close(d.component(0b10), &[0.0; 4]));
        assert!(close(d.component(0b11), &[-0.5, 0.5, 0.5, -0.5]));
    }

    #[test]
    fn zero_atom_and_size_cap_rejected() {
        let mu = ProductMeasure::new(vec![0.0, 1.0]).unwrap();
        assert!(matches!(efron_stein(&xor2(), &mu), Err(Error::ZeroAtom { symbol: 0 })));
        let big = QaryFunction::constant(2, 13, 1.0).unwrap();
        assert!(matches!(efron_stein(&big, &uniform2()), Err(Error::TableTooLarge { .. })));
        assert!(efron_stein(&QaryFunction::constant(2, 12, 1.0).unwrap(), &uniform2()).is_ok());
    }

    #[test]
    fn delta_examples() {
        let mu = uniform2();
        let d1 = delta_i(&dictator_real(2), &mu, 0).unwrap();
        assert!(close(&d1.reals().unwrap(), &[-0.5, -0.5, 0.5, 0.5]));
        let d2 = delta_i(&dictator_real(2), &mu, 1).unwrap();
        assert!(close(&d2.reals().unwrap(), &[0.0; 4]));
        let c = delta_i(&QaryFunction::constant(2, 2, 3.0).unwrap(), &mu, 0).unwrap();
        assert!(close(&c.reals().unwrap(), &[0.0; 4]));
        let x = delta_i(&xor2(), &mu, 0).unwrap();
        assert!(close(&x.reals().unwrap(), &[-0.5, 0.5, 0.5, -0.5]));
        assert!(delta_i(&xor2(), &mu, 2).is_err());
    }

    #[test]
    fn influence_examples() {
        let mu = uniform2();
        assert!((influence(&dictator_real(2), &mu, 0).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(influence(&dictator_real(2), &mu, 1).unwrap(), 0.0);
        // Coordinate i is pivotal with probability 1/2, conditional variance 1/4.
        for i in 0..3 {
            assert!((influence(&majority3(), &mu, i).unwrap() - 0.125).abs() < 1e-15);
        }
        assert_eq!(influence(&QaryFunction::constant(2, 3, 1.0).unwrap(), &mu, 2).unwrap(), 0.0);
    }

    #[test]
    fn lp_norm_examples() {
        let mu = uniform2();
        let pm = QaryFunction::from_reals(2, 1, vec![-1.0, 1.0]).unwrap();
        for p in [1.0, 1.5, 2.0, 7.0] {
            assert!((lp_norm(&pm, &mu, p).unwrap() - 1.0).abs() < 1e-15);
        }
        let g = delta_i(&dictator_real(2), &mu, 0).unwrap();
        assert!((lp_norm(&g, &mu, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((lp_norm(&g, &mu, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(lp_norm(&g, &mu, 0.5).is_err());

        // Delta_0 majority is +-1/2 on the pivotal half, 0 elsewhere:
        // L1 = 1/4, L2^2 = 1/8, L_{3/2}^{3/2} = (1/2) (1/2)^{3/2}.
        let d = delta_i(&majority3(), &mu, 0).unwrap();
        let (l1, l15, l2) =
            (lp_norm(&d, &mu, 1.0).unwrap(), lp_norm(&d, &mu, 1.5).unwrap(), lp_norm(&d, &mu, 2.0).unwrap());
        assert!((l1 - 0.25).abs() < 1e-15);
        assert!((l2 * l2 - 0.125).abs() < 1e-15);
        assert!((l15.powf(1.5) - 0.5 * 0.5f64.powf(1.5)).abs() < 1e-15);
        assert!(l15.powi(3) <= l1 * l2 * l2 + 1e-12);
    }

    #[test]
    fn noise_operator_examples() {
        let mu = uniform2();
        let f = dictator_real(1);
        let d = efron_stein(&f, &mu).unwrap();
        assert!(close(&noise_operator(&d, 1.0).unwrap().reals().unwrap(), &f.reals().unwrap()));
        assert!(close(&noise_operator(&d, 0.0).unwrap().reals().unwrap(), &[0.5, 0.5]));
        assert!(close(&noise_operator(&d, 0.5).unwrap().reals().unwrap(), &[0.25, 0.75]));
        assert!(noise_operator(&d, 1.5).is_err());
        assert!(noise_operator(&d, -0.1).is_err());
    }

    #[test]
    fn sigma_values() {
        assert!((hypercontractive_sigma(0.5).unwrap() - 1.0 / 24.0).abs() < 1e-15);
        assert!((hypercontractive_sigma(0.25).unwrap() - 1.0 / 96.0).abs() < 1e-15);
        assert!(hypercontractive_sigma(1e-9).unwrap() < 1e-18);
        assert!(hypercontractive_sigma(0.0).is_err());
        assert!(hypercontractive_sigma(0.6).is_err());
        // Numeric two-point expression at alpha = 1/4: sqrt(0.42856 / 0.91538).
        let exact = hypercontractive_sigma_with(0.25, SigmaMode::Exact).unwrap();
        let num = 0.75f64.powf(2.0 / 3.0) - 0.25f64.powf(2.0 / 3.0);
        let den = 0.75 * 0.25f64.powf(-1.0 / 3.0) - 0.25 * 0.75f64.powf(-1.0 / 3.0);
        assert!((exact - (num / den).sqrt()).abs() < 1e-12);
        assert!(exact >= 1.0 / 96.0);
        // Degenerate at 1/2: fall back to the safe constant.
        assert_eq!(hypercontractive_sigma_with(0.5, SigmaMode::Exact).unwrap(), 1.0 / 24.0);
        // The two-point expression tends to 1/sqrt(2) at 1/2.
        assert!((wolff_sigma(0.4998).unwrap() - 0.5f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn hypercontractivity_examples() {
        let mu = uniform2();
        let g = QaryFunction::from_reals(2, 1, vec![-1.0, 1.0]).unwrap();
        let r = verify_hypercontractivity(&g, &mu).unwrap();
        assert!((r.lhs - 1.0 / 24.0).abs() < 1e-15 && (r.rhs - 1.0).abs() < 1e-15 && r.ok);
        let c = QaryFunction::constant(3, 2, -2.0).unwrap();
        let r = verify_hypercontractivity(&c, &ProductMeasure::uniform(3)).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-12 && (r.rhs - 2.0).abs() < 1e-12 && r.ok);
    }

    #[test]
    fn level_bound_examples() {
        let mu = uniform2();
        let g = QaryFunction::from_reals(2, 1, vec![-0.5, 0.5]).unwrap();
        let r = verify_level_bound(&g, &mu, 1).unwrap();
        assert!((r.lhs - 0.25).abs() < 1e-15);
        assert!((r.rhs - 6.0).abs() < 1e-12);
        assert!(r.ok);
        let g2 = delta_i(&dictator_real(2), &mu, 0).unwrap();
        let r = verify_level_bound(&g2, &mu, 2).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.ok);
        assert!(matches!(verify_level_bound(&dictator_real(2), &mu, 1), Err(Error::NonZeroMean { .. })));
        assert!(verify_level_bound(&g2, &mu, 3).is_err());
    }

    #[test]
    fn talagrand_examples() {
        let mu = uniform2();
        let r = talagrand_report(&dictator_real(2), &mu).unwrap();
        assert!((r.variance - 0.25).abs() < 1e-15);
        assert_eq!(r.terms[0].status, TermStatus::Degenerate);
        assert_eq!(r.terms[1].status, TermStatus::Null);
        assert_eq!(r.degenerate_coordinates, vec![0]);
        assert!((r.terms[0].m2 - 0.25).abs() < 1e-15);
        assert_eq!(r.empirical_c, None);
        assert!(r.variance_identity_ok);

        // I_i = 1/8, log ratio = log(sqrt 2), so the sum is 3/(4 ln 2) and C = 1/3.
        let r = talagrand_report(&majority3(), &mu).unwrap();
        assert!((r.variance - 0.25).abs() < 1e-15);
        let total: f64 = r.terms.iter().map(|t| t.influence).sum();
        assert!((total - 0.375).abs() < 1e-15);
        assert!((r.weighted_sum - 0.75 / 2f64.ln()).abs() < 1e-12);
        assert!((r.empirical_c.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((r.binary_form_sum.unwrap() - r.weighted_sum).abs() < 1e-12);
        assert!(r.variance_identity_ok);

        assert!(matches!(
            talagrand_report(&QaryFunction::constant(2, 2, 1.0).unwrap(), &mu),
            Err(Error::ConstantFunction)
        ));
    }

    #[test]
    fn record_export() {
        let d = efron_stein(&xor2(), &uniform2()).unwrap();
        let json = serde_json::to_value(d.to_record()).unwrap();
        assert_eq!(json["components"][3]["S"], serde_json::json!([0, 1]));
        assert_eq!(json["components"].as_array().unwrap().len(), 4);
    }
}
