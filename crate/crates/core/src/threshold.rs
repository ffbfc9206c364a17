//! Threshold behaviour along simplex paths.
//!
//! For a path `mu^t = t delta_a + (1 - t) mu'` the curve `G(t) = P_{mu^t}[f = a]`
//! is nondecreasing when `f` is monotone. Its derivative has the Russo-type
//! form computed by [`russo_derivative`], and the window where it climbs from
//! `eps` to `1 - eps` is located by [`threshold_window`].

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::influence;
use crate::error::{Error, Result};
use crate::qfun::{contract, decode_into, prob_value, value_distribution, MeasurePath, ProductMeasure, QaryFunction, SimplexSampler};
use crate::rng::{derive_seed, stream};
use crate::structure::{check_zero_monotone, swap_input_symbols};

/// Normal quantile for 95% two-sided intervals.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Bisection stops once the bracket is this narrow.
pub const BISECTION_TOL: f64 = 1e-6;

pub const DEFAULT_GRID: usize = 101;
pub const DEFAULT_SAMPLES: usize = 10_000;

const MC_CHUNK: usize = 4096;

/// How curve values are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::MonteCarlo { .. } => "monte_carlo",
        }
    }
}

/// Monte Carlo estimate of a probability with a 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub p_hat: f64,
    pub half_width: f64,
    pub samples: usize,
    pub seed: u64,
}

struct SymbolSampler {
    cumulative: Vec<f64>,
    last_positive: u32,
}

impl SymbolSampler {
    fn new(mu: &ProductMeasure) -> Self {
        let cumulative = mu
            .atoms()
            .iter()
            .scan(0.0, |acc, a| {
                *acc += a;
                Some(*acc)
            })
            .collect();
        let last_positive = mu.atoms().iter().rposition(|&a| a > 0.0).unwrap_or(0) as u32;
        Self { cumulative, last_positive }
    }

    fn draw(&self, rng: &mut impl Rng) -> u32 {
        let u: f64 = rng.gen();
        self.cumulative.iter().position(|&c| u < c).map_or(self.last_positive, |s| s as u32)
    }
}

/// Estimates `P_mu[f = a]` from `samples` i.i.d. draws of `X ~ mu^n`.
///
/// Draws are split into fixed-size chunks with their own streams derived
/// from `seed`, so the result does not depend on the thread count.
pub fn mc_estimate(f: &QaryFunction, mu: &ProductMeasure, a: u32, samples: usize, seed: u64) -> Result<McEstimate> {
    mu.require_q(f.q())?;
    if samples == 0 {
        return Err(Error::InvalidParameter("Monte Carlo needs at least one sample".into()));
    }
    let sampler = SymbolSampler::new(mu);
    let n = f.n();
    let chunks = samples.div_ceil(MC_CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed, c as u64);
            let mut x = vec![0u32; n];
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            (0..count)
                .filter(|_| {
                    x.iter_mut().for_each(|s| *s = sampler.draw(&mut rng));
                    f.eval_symbol_unchecked(&x) == a
                })
                .count()
        })
        .sum();
    let p_hat = hits as f64 / samples as f64;
    let half_width = Z95 * (p_hat * (1.0 - p_hat) / samples as f64).sqrt();
    Ok(McEstimate { p_hat, half_width, samples, seed })
}

fn require_binary(f: &QaryFunction) -> Result<()> {
    if f.is_binary()? {
        Ok(())
    } else {
        Err(Error::NotBinary)
    }
}

/// Refuses `f` unless `x <=_anchor y` implies `f(x) <= f(y)`.
fn require_anchor_monotone(f: &QaryFunction, anchor: usize) -> Result<()> {
    require_binary(f)?;
    let relabeled = swap_input_symbols(f, anchor as u32)?;
    if check_zero_monotone(&relabeled)?.pass {
        Ok(())
    } else {
        Err(Error::NotZeroMonotone { anchor })
    }
}

/// For each coordinate, replaces every point by `reduce(h)` where `h` is the
/// restriction of the table to that point's line along the coordinate,
/// then averages under `outer`.
fn line_functional(table: &[f64], q: usize, n: usize, outer: &ProductMeasure, reduce: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut line = vec![0.0; q];
    (0..n)
        .map(|i| {
            let stride = q.pow((n - 1 - i) as u32);
            let mut values = table.to_vec();
            for block in values.chunks_mut(stride * q) {
                for off in 0..stride {
                    for s in 0..q {
                        line[s] = block[off + s * stride];
                    }
                    let r = reduce(&line);
                    for s in 0..q {
                        block[off + s * stride] = r;
                    }
                }
            }
            contract(q, n, outer.atoms(), |k| values[k])
        })
        .collect()
}

/// `dG/dt` at `t` for a `{0,1}`-valued `f` monotone towards the anchor:
/// `sum_i E_{mu^t}[1(f|F_i non-constant) * E_{mu'}[1 - f | F_i]]`.
pub fn russo_derivative(f: &QaryFunction, path: &MeasurePath, t: f64) -> Result<f64> {
    path.base().require_q(f.q())?;
    require_anchor_monotone(f, path.anchor())?;
    Ok(russo_terms(f, path, t)?.iter().sum())
}

fn russo_terms(f: &QaryFunction, path: &MeasurePath, t: f64) -> Result<Vec<f64>> {
    let table = f.reals()?;
    let base = path.base().atoms().to_vec();
    let mu_t = path.at(t);
    Ok(line_functional(&table, f.q(), f.n(), &mu_t, |h| {
        if h.iter().all(|&v| v == h[0]) {
            0.0
        } else {
            h.iter().zip(&base).map(|(v, m)| m * (1.0 - v)).sum()
        }
    }))
}

/// The derivative together with finite-difference and influence comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RussoReport {
    pub t: f64,
    pub g: f64,
    pub derivative: f64,
    /// `(G(t + h) - G(t - h)) / 2h`, when `[t - h, t + h]` fits in `[0, 1]`.
    pub central_difference: Option<f64>,
    pub step: f64,
    /// `sum_i E_{x_{-i} ~ mu^t}[Var_{x_i ~ mu'} f]`: bounded by the derivative term by term.
    pub mixed_influence_sum: f64,
    /// `sum_i I_i` under `mu^t`.
    pub path_influence_sum: f64,
    /// `sum_i I_i` under the base `mu'`; recorded, not asserted.
    pub base_influence_sum: f64,
    /// `derivative >= mixed_influence_sum` and `derivative >= path_influence_sum`.
    pub lemma_holds: bool,
}

pub fn russo_report(f: &QaryFunction, path: &MeasurePath, t: f64, step: f64) -> Result<RussoReport> {
    let derivative = russo_derivative(f, path, t)?;
    let g_at = |s: f64| crate::qfun::expectation(f, &path.at(s));
    let central_difference = if t - step >= 0.0 && t + step <= 1.0 {
        Some((g_at(t + step)? - g_at(t - step)?) / (2.0 * step))
    } else {
        None
    };
    let table = f.reals()?;
    let base = path.base().atoms().to_vec();
    let mu_t = path.at(t);
    let mixed_influence_sum: f64 = line_functional(&table, f.q(), f.n(), &mu_t, |h| {
        let mean: f64 = h.iter().zip(&base).map(|(v, m)| v * m).sum();
        h.iter().zip(&base).map(|(v, m)| m * (v - mean).powi(2)).sum()
    })
    .iter()
    .sum();
    let influence_sum = |mu: &ProductMeasure| -> Result<f64> { (0..f.n()).map(|i| influence(f, mu, i)).sum() };
    let path_influence_sum = influence_sum(&mu_t)?;
    let base_influence_sum = influence_sum(path.base())?;
    let slack = 1e-12;
    Ok(RussoReport {
        t,
        g: g_at(t)?,
        derivative,
        central_difference,
        step,
        mixed_influence_sum,
        path_influence_sum,
        base_influence_sum,
        lemma_holds: derivative + slack >= mixed_influence_sum && derivative + slack >= path_influence_sum,
    })
}

/// Sampled `G(t) = P_{mu^t}[f = a]` on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCurve {
    pub path: MeasurePath,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Zero in exact mode.
    pub half_widths: Vec<f64>,
    pub method: Method,
}

impl ThresholdCurve {
    pub fn symbol(&self) -> u32 {
        self.path.anchor() as u32
    }

    /// CSV with columns `t,G,method,half_width`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,G,method,half_width\n");
        for ((t, g), h) in self.grid.iter().zip(&self.values).zip(&self.half_widths) {
            out.push_str(&format!("{t},{g},{},{h}\n", self.method.name()));
        }
        out
    }
}

/// Evaluates `G` along the path from `base` towards `delta_a`.
pub fn scan_path(f: &QaryFunction, a: u32, base: &ProductMeasure, grid_size: usize, method: Method) -> Result<ThresholdCurve> {
    if grid_size < 2 {
        return Err(Error::InvalidParameter(format!("grid needs at least 2 points, got {grid_size}")));
    }
    base.require_q(f.q())?;
    let path = MeasurePath::new(a as usize, base.clone())?;
    let grid: Vec<f64> = (0..grid_size).map(|k| k as f64 / (grid_size - 1) as f64).collect();
    let points: Vec<(f64, f64)> = grid
        .par_iter()
        .enumerate()
        .map(|(k, &t)| match method {
            Method::Exact => Ok((prob_value(f, &path.at(t), a)?, 0.0)),
            Method::MonteCarlo { samples, seed } => {
                let e = mc_estimate(f, &path.at(t), a, samples, derive_seed(seed, k as u64))?;
                Ok((e.p_hat, e.half_width))
            }
        })
        .collect::<Result<_>>()?;
    let (values, half_widths) = points.into_iter().unzip();
    Ok(ThresholdCurve { path, grid, values, half_widths, method })
}

/// The parameter interval where `G` runs from `eps` to `1 - eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdWindow {
    pub eps: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub width: f64,
    /// Bracket width in exact mode, grid spacing in Monte Carlo mode.
    pub resolution: f64,
}

/// Locates `J^{eps, 1-eps}` on a curve. Exact curves are refined by
/// bisection on `G` itself (hence `f`); Monte Carlo curves interpolate.
pub fn threshold_window(curve: &ThresholdCurve, eps: f64, f: &QaryFunction) -> Result<ThresholdWindow> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1/2], got {eps}")));
    }
    let crossing = |level: f64| -> Result<f64> {
        let j = curve.values.iter().position(|&v| v >= level).ok_or(Error::NoCrossing { level })?;
        if j == 0 {
            return if curve.values[0] == level { Ok(curve.grid[0]) } else { Err(Error::NoCrossing { level }) };
        }
        let (mut lo, mut hi) = (curve.grid[j - 1], curve.grid[j]);
        match curve.method {
            Method::Exact => {
                let a = curve.symbol();
                while hi - lo > BISECTION_TOL {
                    let mid = 0.5 * (lo + hi);
                    if prob_value(f, &curve.path.at(mid), a)? >= level {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
            Method::MonteCarlo { .. } => {
                let (g_lo, g_hi) = (curve.values[j - 1], curve.values[j]);
                Ok(lo + (hi - lo) * (level - g_lo) / (g_hi - g_lo))
            }
        }
    };
    let t_lo = crossing(eps)?;
    let t_hi = crossing(1.0 - eps)?;
    let resolution = match curve.method {
        Method::Exact => BISECTION_TOL,
        Method::MonteCarlo { .. } => 1.0 / (curve.grid.len() - 1) as f64,
    };
    Ok(ThresholdWindow { eps, t_lo, t_hi, width: (t_hi - t_lo).max(0.0), resolution })
}

/// `(log(1 - eps) - log(eps)) * log log n / log n`, defined for `n >= 3`.
pub fn bound_shape(eps: f64, n: usize) -> Option<f64> {
    let ln = (n as f64).ln();
    (n >= 3).then(|| ((1.0 - eps).ln() - eps.ln()) * ln.ln() / ln)
}

/// Monte Carlo measure of `{mu : eps <= P_mu[f = a] <= 1 - eps}` under the uniform simplex law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub symbol: u32,
    pub eps: f64,
    pub q: usize,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub method: Method,
    pub in_window: usize,
    pub estimate: f64,
    pub half_width: f64,
    /// `(log(1 - eps) - log(eps)) / log n`.
    pub eta: Option<f64>,
    /// Fraction of sampled measures with an atom below `eta`.
    pub boundary_fraction: Option<f64>,
    pub bound_shape: Option<f64>,
}

/// Samples measures from `sampler` and counts those in the critical window.
/// `method` evaluates `P_mu[f = a]`; Monte Carlo uses a nested budget per measure.
pub fn simplex_sweep(
    f: &QaryFunction,
    a: u32,
    eps: f64,
    sampler: &mut SimplexSampler,
    samples: usize,
    method: Method,
) -> Result<SweepReport> {
    if samples == 0 {
        return Err(Error::InvalidParameter("sweep needs at least one sample".into()));
    }
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1/2], got {eps}")));
    }
    if sampler.q() != f.q() {
        return Err(Error::DimensionMismatch { expected: f.q(), found: sampler.q() });
    }
    let measures: Vec<ProductMeasure> = (0..samples).map(|_| sampler.sample()).collect();
    let probabilities: Vec<f64> = measures
        .par_iter()
        .enumerate()
        .map(|(k, mu)| match method {
            Method::Exact => Ok(value_distribution(f, mu)?[a as usize]),
            Method::MonteCarlo { samples, seed } => Ok(mc_estimate(f, mu, a, samples, derive_seed(seed, k as u64))?.p_hat),
        })
        .collect::<Result<_>>()?;
    let in_window = probabilities.iter().filter(|&&p| p >= eps && p <= 1.0 - eps).count();
    let estimate = in_window as f64 / samples as f64;
    let n = f.n();
    let eta = (n >= 2).then(|| ((1.0 - eps).ln() - eps.ln()) / (n as f64).ln());
    let boundary_fraction =
        eta.map(|eta| measures.iter().filter(|m| m.min_atom() < eta).count() as f64 / samples as f64);
    Ok(SweepReport {
        symbol: a,
        eps,
        q: f.q(),
        n,
        samples,
        seed: sampler.seed(),
        method,
        in_window,
        estimate,
        half_width: Z95 * (estimate * (1.0 - estimate) / samples as f64).sqrt(),
        eta,
        boundary_fraction,
        bound_shape: bound_shape(eps, n),
    })
}

/// The shifted measure `mu-hat` used to reduce to measures with all atoms above `1/log n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedMeasure {
    pub atoms: Vec<f64>,
    pub margin: f64,
    pub exact: Option<f64>,
    pub estimate: McEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JuryReport {
    pub symbol: u32,
    pub n: usize,
    pub atoms: Vec<f64>,
    /// `mu(i) - max_{j != i} mu(j)`.
    pub margin: f64,
    /// `log log n / log n`.
    pub bound_margin: Option<f64>,
    pub estimate: McEstimate,
    pub exact: Option<f64>,
    /// `mu = t* delta_i + (1 - t*) mu'`.
    pub t_star: f64,
    /// The point `s` of the path where `mu^s(i) = max_{j != i} mu^s(j)`.
    pub s: f64,
    pub exact_at_s: Option<f64>,
    /// `None` when `mu(i) < (q - 1) / log n` or `n < 2`.
    pub perturbed: Option<PerturbedMeasure>,
}

/// Probability that a biased electorate elects its favourite.
pub fn jury_experiment(f: &QaryFunction, mu: &ProductMeasure, i: u32, samples: usize, seed: u64) -> Result<JuryReport> {
    mu.require_q(f.q())?;
    let q = f.q();
    if i as usize >= q {
        return Err(Error::SymbolOutOfRange { symbol: i as usize, q });
    }
    let rival = (0..q).filter(|&j| j != i as usize).map(|j| mu.atom(j)).fold(f64::NEG_INFINITY, f64::max);
    let margin = mu.atom(i as usize) - rival;
    if !(margin > 0.0) {
        return Err(Error::NoStrictLeader { symbol: i as usize });
    }
    let n = f.n();
    let exact_at = |m: &ProductMeasure| value_distribution(f, m).ok().map(|d| d[i as usize]);
    let estimate = mc_estimate(f, mu, i, samples, seed)?;
    let (t_star, path) = MeasurePath::through(mu, i as usize)?;
    let base_max = path.base().atoms().iter().copied().fold(0.0, f64::max);
    let s = base_max / (1.0 + base_max);
    let perturbed = if n >= 2 {
        let shift = 1.0 / (n as f64).ln();
        let mut atoms: Vec<f64> = mu.atoms().iter().map(|a| a + shift).collect();
        atoms[i as usize] = mu.atom(i as usize) - (q - 1) as f64 * shift;
        match ProductMeasure::new(atoms) {
            Ok(hat) => {
                let hat_rival =
                    (0..q).filter(|&j| j != i as usize).map(|j| hat.atom(j)).fold(f64::NEG_INFINITY, f64::max);
                Some(PerturbedMeasure {
                    margin: hat.atom(i as usize) - hat_rival,
                    exact: exact_at(&hat),
                    estimate: mc_estimate(f, &hat, i, samples, derive_seed(seed, 1))?,
                    atoms: hat.atoms().to_vec(),
                })
            }
            Err(_) => None,
        }
    } else {
        None
    };
    Ok(JuryReport {
        symbol: i,
        n,
        atoms: mu.atoms().to_vec(),
        margin,
        bound_margin: (n >= 3).then(|| (n as f64).ln().ln() / (n as f64).ln()),
        estimate,
        exact: exact_at(mu),
        t_star,
        s,
        exact_at_s: exact_at(&path.at(s)),
        perturbed,
    })
}

/// Draws a random up-set of `<=_0` on `[q]^n`: the union of the up-closures
/// of `generators` random points. Used to build 0-monotone test functions.
pub fn random_zero_monotone(q: usize, n: usize, generators: usize, rng: &mut impl Rng) -> Result<QaryFunction> {
    let len = crate::qfun::table_len(q, n)?;
    let seeds: Vec<Vec<u32>> = (0..generators).map(|_| (0..n).map(|_| rng.gen_range(0..q as u32)).collect()).collect();
    let mut table = vec![0.0; len];
    let mut y = vec![0u32; n];
    for (idx, slot) in table.iter_mut().enumerate() {
        decode_into(q, idx, &mut y);
        // y lies above x iff y agrees with x off the zeros of y.
        if seeds.iter().any(|x| x.iter().zip(&y).all(|(&xi, &yi)| yi == 0 || xi == yi)) {
            *slot = 1.0;
        }
    }
    QaryFunction::from_reals(q, n, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{dictator, plurality, TieBreak};

    fn majority3_zero() -> QaryFunction {
        QaryFunction::tabulate_reals(2, 3, |x| f64::from(u8::from(x.iter().filter(|&&s| s == 0).count() >= 2)))
            .unwrap()
    }

    #[test]
    fn russo_examples() {
        let path = MeasurePath::uniform_base(3, 0).unwrap();
        let point = QaryFunction::tabulate_reals(3, 1, |x| f64::from(u8::from(x[0] == 0))).unwrap();
        for t in [0.0, 0.3, 0.9] {
            assert!((russo_derivative(&point, &path, t).unwrap() - 1.0).abs() < 1e-15);
        }
        // G(t) = 3t^2 - 2t^3, G'(1/2) = 3/2
        let path2 = MeasurePath::uniform_base(2, 0).unwrap();
        assert!((russo_derivative(&majority3_zero(), &path2, 0.5).unwrap() - 1.5).abs() < 1e-12);
        let c = QaryFunction::constant(3, 2, 1.0).unwrap();
        assert_eq!(russo_derivative(&c, &path, 0.4).unwrap(), 0.0);
        let anti = QaryFunction::tabulate_reals(3, 1, |x| f64::from(u8::from(x[0] != 0))).unwrap();
        assert!(matches!(russo_derivative(&anti, &path, 0.4), Err(Error::NotZeroMonotone { anchor: 0 })));
        let half = QaryFunction::constant(3, 1, 0.5).unwrap();
        assert!(matches!(russo_derivative(&half, &path, 0.4), Err(Error::NotBinary)));
    }

    #[test]
    fn russo_with_nonzero_anchor() {
        // 1[plurality = 2] is monotone towards 2; G'(t) matches a central difference.
        let f = plurality(3, 3, TieBreak::FirstOccurrence).unwrap().indicator(2).unwrap();
        let base = ProductMeasure::new(vec![0.7, 0.3, 0.0]).unwrap();
        let path = MeasurePath::new(2, base).unwrap();
        let r = russo_report(&f, &path, 0.37, 1e-4).unwrap();
        assert!((r.derivative - r.central_difference.unwrap()).abs() < 1e-6);
        assert!(r.lemma_holds);
    }

    #[test]
    fn scan_examples() {
        let maj = QaryFunction::tabulate_symbols(2, 3, 2, |x| u32::from(x.iter().sum::<u32>() >= 2)).unwrap();
        let base = ProductMeasure::point_mass(2, 1);
        let curve = scan_path(&maj, 0, &base, 5, Method::Exact).unwrap();
        let expected = [0.0, 0.15625, 0.5, 0.84375, 1.0];
        for (v, e) in curve.values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-12);
        }
        let p = plurality(3, 4, TieBreak::FirstOccurrence).unwrap();
        let path_base = MeasurePath::uniform_base(3, 1).unwrap().base().clone();
        let c = scan_path(&p, 1, &path_base, 11, Method::Exact).unwrap();
        assert_eq!(c.values[0], 0.0);
        assert!((c.values[10] - 1.0).abs() < 1e-12);
        assert!(c.values.windows(2).all(|w| w[1] >= w[0] - 1e-10));
        assert!(scan_path(&p, 1, &ProductMeasure::uniform(3), 11, Method::Exact).is_err());
        assert!(scan_path(&p, 1, &path_base, 1, Method::Exact).is_err());
        assert!(c.to_csv().starts_with("t,G,method,half_width\n0,0,exact,0\n"));
    }

    #[test]
    fn window_examples() {
        let maj = QaryFunction::tabulate_symbols(2, 3, 2, |x| u32::from(x.iter().sum::<u32>() >= 2)).unwrap();
        let curve = scan_path(&maj, 0, &ProductMeasure::point_mass(2, 1), 101, Method::Exact).unwrap();
        let w = threshold_window(&curve, 0.5, &maj).unwrap();
        assert_eq!(w.t_lo, w.t_hi);
        assert!((w.t_lo - 0.5).abs() < 1e-6);
        // Root of 3t^2 - 2t^3 = 0.1 by Newton from 0.2, independent of the bisection.
        let mut r: f64 = 0.2;
        for _ in 0..50 {
            r -= (3.0 * r * r - 2.0 * r.powi(3) - 0.1) / (6.0 * r - 6.0 * r * r);
        }
        let w = threshold_window(&curve, 0.1, &maj).unwrap();
        assert!((w.t_lo - r).abs() < 2e-6);
        assert!((w.width - (1.0 - 2.0 * r)).abs() < 4e-6);
        let flat = QaryFunction::tabulate_symbols(2, 3, 2, |_| 1).unwrap();
        let c = scan_path(&flat, 0, &ProductMeasure::point_mass(2, 1), 11, Method::Exact).unwrap();
        assert!(matches!(threshold_window(&c, 0.1, &flat), Err(Error::NoCrossing { .. })));
    }

    #[test]
    fn monte_carlo_window_interpolates() {
        let maj = QaryFunction::tabulate_symbols(2, 3, 2, |x| u32::from(x.iter().sum::<u32>() >= 2)).unwrap();
        let method = Method::MonteCarlo { samples: 20_000, seed: 3 };
        let curve = scan_path(&maj, 0, &ProductMeasure::point_mass(2, 1), 21, method).unwrap();
        let w = threshold_window(&curve, 0.25, &maj).unwrap();
        assert!((w.t_lo - 0.3264).abs() < 0.02, "{w:?}");
        assert_eq!(w.resolution, 0.05);
    }

    #[test]
    fn mc_examples() {
        let k = QaryFunction::tabulate_symbols(2, 3, 2, |_| 1).unwrap();
        let e = mc_estimate(&k, &ProductMeasure::uniform(2), 1, 100, 0).unwrap();
        assert_eq!((e.p_hat, e.half_width), (1.0, 0.0));
        let maj = QaryFunction::tabulate_symbols(2, 3, 2, |x| u32::from(x.iter().sum::<u32>() >= 2)).unwrap();
        let mu = ProductMeasure::new(vec![0.6, 0.4]).unwrap();
        let e = mc_estimate(&maj, &mu, 0, 100_000, 9).unwrap();
        assert!((e.p_hat - 0.648).abs() <= 3.0 * e.half_width, "{e:?}");
        assert_eq!(e, mc_estimate(&maj, &mu, 0, 100_000, 9).unwrap());
        assert!(mc_estimate(&maj, &mu, 0, 0, 9).is_err());
        // Zero atoms are never drawn.
        let d = dictator(3, 2, 0).unwrap();
        let e = mc_estimate(&d, &ProductMeasure::new(vec![0.5, 0.5, 0.0]).unwrap(), 2, 10_000, 1).unwrap();
        assert_eq!(e.p_hat, 0.0);
    }

    #[test]
    fn sweep_examples() {
        let k = QaryFunction::tabulate_symbols(2, 3, 2, |_| 0).unwrap();
        let r = simplex_sweep(&k, 0, 0.1, &mut SimplexSampler::new(2, 1), 500, Method::Exact).unwrap();
        assert_eq!(r.estimate, 0.0);
        let d = dictator(2, 1, 0).unwrap();
        let r = simplex_sweep(&d, 0, 0.1, &mut SimplexSampler::new(2, 2), 10_000, Method::Exact).unwrap();
        assert!((r.estimate - 0.8).abs() < 0.02);
        assert!(simplex_sweep(&d, 0, 0.1, &mut SimplexSampler::new(2, 2), 0, Method::Exact).is_err());
        assert!(simplex_sweep(&d, 0, 0.1, &mut SimplexSampler::new(3, 2), 10, Method::Exact).is_err());
    }

    #[test]
    fn jury_examples() {
        let p = plurality(3, 5, TieBreak::FirstOccurrence).unwrap();
        let r = jury_experiment(&p, &ProductMeasure::point_mass(3, 1), 1, 1000, 4).unwrap();
        assert_eq!(r.estimate.p_hat, 1.0);
        let d = dictator(2, 1, 0).unwrap();
        let r = jury_experiment(&d, &ProductMeasure::new(vec![0.6, 0.4]).unwrap(), 0, 100_000, 4).unwrap();
        assert!((r.estimate.p_hat - 0.6).abs() < 3.0 * r.estimate.half_width);
        assert_eq!(r.exact, Some(0.6));
        assert!(matches!(
            jury_experiment(&p, &ProductMeasure::new(vec![0.4, 0.4, 0.2]).unwrap(), 0, 10, 0),
            Err(Error::NoStrictLeader { symbol: 0 })
        ));
        let mu = ProductMeasure::new(vec![0.5, 0.3, 0.2]).unwrap();
        let r = jury_experiment(&p, &mu, 0, 1000, 4).unwrap();
        assert!((r.t_star - 0.5).abs() < 1e-15);
        // mu' = (0, 0.6, 0.4); s solves s = (1 - s) 0.6.
        assert!((r.s - 0.375).abs() < 1e-12);
        assert!(r.exact_at_s.unwrap() >= 1.0 / 3.0 - 1e-12);
    }

    #[test]
    fn random_up_sets_are_zero_monotone() {
        let mut rng = stream(1, 0);
        for _ in 0..50 {
            let f = random_zero_monotone(3, 3, 3, &mut rng).unwrap();
            assert!(check_zero_monotone(&f).unwrap().pass);
        }
    }

    #[test]
    fn bound_shape_domain() {
        assert_eq!(bound_shape(0.1, 2), None);
        let v = bound_shape(0.1, 729).unwrap();
        assert!((v - 9f64.ln() * 729f64.ln().ln() / 729f64.ln()).abs() < 1e-12);
    }
}
