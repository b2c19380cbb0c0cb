//! Monte Carlo estimation of logical noise channels and break-even points.
//!
//! Configurations are drawn conditioned on at least `k_min` faulty locations
//! and reweighted by the exact tail probability. Every trajectory owns a
//! ChaCha stream selected by its index, so results do not depend on the
//! number of worker threads.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadgets::{
    build_default, run, Circuit, Evaluator, GadgetId, LabelWeights, Layout, ResetMode,
};
use crate::noise::{
    sample_config_conditioned, tail_probability, FaultConfig, FaultLocation, NoiseModel,
    PauliString,
};
use crate::statevec::DEFAULT_BRANCH_THRESHOLD;
use crate::steane::{label_string, LogicalLabel, TestState};

/// Largest branch count for which a lone fault is evaluated exactly.
pub const MEMO_BRANCH_CAP: usize = 8;

/// Label rates of one gadget under one noise model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub gadget: String,
    pub layout: Layout,
    pub model: NoiseModel,
    pub test: TestState,
    pub k_min: usize,
    pub n_samples: usize,
    pub seed: u64,
    /// `P(K ≥ k_min)`, the factor applied to the sample frequencies.
    pub tail_probability: f64,
    /// `P(K = 0)`.
    pub no_fault_probability: f64,
    /// Failure labels (`S`-type labels split into `I`/`Z`) with their rates.
    pub rates: BTreeMap<String, f64>,
    pub stderr: BTreeMap<String, f64>,
    /// Total failure rate.
    pub failure: f64,
    pub failure_stderr: f64,
    /// Failure rate carried by configurations with exactly one fault.
    pub single_fault_failure: f64,
    pub single_fault_stderr: f64,
    /// Samples whose unaggregated label has `X`, `Y` or an unknown operator
    /// on some block.
    pub non_z_samples: usize,
}

impl RateEstimate {
    pub fn rate(&self, label: &str) -> f64 {
        self.rates.get(label).copied().unwrap_or(0.0)
    }

    pub fn rate_stderr(&self, label: &str) -> f64 {
        self.stderr.get(label).copied().unwrap_or(0.0)
    }

    /// Linear coefficient `c` in `c·ε·p`, from the single-fault part.
    pub fn linear_coefficient(&self) -> Option<(f64, f64)> {
        let scale = self.model.epsilon * self.model.p * self.no_fault_probability;
        (scale > 0.0).then(|| {
            (
                self.single_fault_failure / scale,
                self.single_fault_stderr / scale,
            )
        })
    }
}

fn binomial_stderr(mean: f64, n: usize) -> f64 {
    (mean.clamp(0.0, 1.0) * (1.0 - mean.clamp(0.0, 1.0)) / n as f64).sqrt()
}

fn is_non_z(labels: &[LogicalLabel]) -> bool {
    labels
        .iter()
        .any(|l| matches!(l, LogicalLabel::X | LogicalLabel::Y | LogicalLabel::Other))
}

struct Sample {
    labels: LabelWeights,
    non_z: bool,
    single: bool,
}

/// Shared state for drawing and evaluating trajectories of one circuit.
struct Sampler<'a> {
    circuit: &'a Circuit,
    locations: Vec<FaultLocation>,
    model: NoiseModel,
    input: Option<crate::statevec::PureState>,
    evaluator: Evaluator,
    memo: Mutex<HashMap<(usize, PauliString), Option<LabelWeights>>>,
}

impl<'a> Sampler<'a> {
    fn new(circuit: &'a Circuit, model: &NoiseModel, test: TestState) -> Result<Sampler<'a>> {
        let (input, ideal) = circuit.test_io(test)?;
        Ok(Sampler {
            circuit,
            locations: circuit.fault_locations(model),
            model: *model,
            input,
            evaluator: Evaluator::new(circuit, &ideal)?,
            memo: Mutex::new(HashMap::new()),
        })
    }

    fn evaluate(
        &self,
        config: &FaultConfig,
        mode: ResetMode,
        rng: &mut ChaCha8Rng,
    ) -> Result<LabelWeights> {
        let branches = run(
            self.circuit,
            &self.locations,
            config,
            self.input.as_ref(),
            mode,
            rng,
        )?;
        self.evaluator.evaluate(branches)
    }

    /// Outcome of a lone fault: exact (and remembered) when its resets stay
    /// within [`MEMO_BRANCH_CAP`] branches, sampled otherwise.
    fn single(&self, config: &FaultConfig, rng: &mut ChaCha8Rng) -> Result<LabelWeights> {
        let key = config.assignments[0];
        let cached = self.memo.lock().expect("memo").get(&key).cloned();
        match cached {
            Some(Some(w)) => return Ok(w),
            Some(None) => return self.evaluate(config, ResetMode::Sample, rng),
            None => {}
        }
        let mode = ResetMode::Branch {
            threshold: DEFAULT_BRANCH_THRESHOLD,
            cap: MEMO_BRANCH_CAP,
        };
        let mut dummy = ChaCha8Rng::seed_from_u64(0);
        match self.evaluate(config, mode, &mut dummy) {
            Ok(w) => {
                self.memo.lock().expect("memo").insert(key, Some(w.clone()));
                Ok(w)
            }
            Err(Error::BranchCap { .. }) => {
                self.memo.lock().expect("memo").insert(key, None);
                self.evaluate(config, ResetMode::Sample, rng)
            }
            Err(e) => Err(e),
        }
    }

    fn sample(&self, k_min: usize, seed: u64, index: u64) -> Result<Sample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let config = sample_config_conditioned(&self.locations, &self.model, k_min, &mut rng)?;
        let single = config.len() == 1;
        let labels = if config.is_empty() {
            let mut w = LabelWeights::default();
            w.add(vec![LogicalLabel::I; self.evaluator.n_blocks()], 1.0);
            w
        } else if single {
            self.single(&config, &mut rng)?
        } else {
            self.evaluate(&config, ResetMode::Sample, &mut rng)?
        };
        let non_z = labels.entries.iter().any(|(l, &w)| w > 0.0 && is_non_z(l));
        Ok(Sample {
            labels,
            non_z,
            single,
        })
    }
}

/// Monte Carlo label rates for an already built circuit.
pub fn estimate_circuit_rates(
    circuit: &Circuit,
    model: &NoiseModel,
    k_min: usize,
    n_samples: usize,
    test: TestState,
    seed: u64,
) -> Result<RateEstimate> {
    if k_min > 2 {
        return Err(Error::InvalidRequest(format!(
            "k_min must be 0, 1 or 2, got {k_min}"
        )));
    }
    if n_samples == 0 {
        return Err(Error::InvalidRequest("n_samples must be positive".into()));
    }
    model.validate()?;
    let sampler = Sampler::new(circuit, model, test)?;
    let tail = tail_probability(&sampler.locations, model, k_min);
    let no_fault = 1.0 - tail_probability(&sampler.locations, model, 1);
    let n_blocks = sampler.evaluator.n_blocks();

    let mut sum = LabelWeights::default();
    let mut single_sum = 0.0;
    let mut non_z_samples = 0;
    if tail > 0.0 {
        let samples: Vec<Sample> = (0..n_samples as u64)
            .into_par_iter()
            .map(|i| sampler.sample(k_min, seed, i))
            .collect::<Result<_>>()?;
        for s in samples {
            let agg = s.labels.aggregated();
            if s.single {
                single_sum += agg.failure();
            }
            sum.merge_scaled(&agg, 1.0);
            non_z_samples += usize::from(s.non_z);
        }
    } else {
        sum.add(vec![LogicalLabel::I; n_blocks], n_samples as f64);
    }

    let n = n_samples as f64;
    let mut rates = BTreeMap::new();
    let mut stderr = BTreeMap::new();
    for (labels, w) in &sum.entries {
        if labels.iter().all(|&l| l == LogicalLabel::I) {
            continue;
        }
        let mean = w / n;
        rates.insert(label_string(labels), tail * mean);
        stderr.insert(
            label_string(labels),
            tail * binomial_stderr(mean, n_samples),
        );
    }
    let fail_mean = sum.failure() / n;
    let single_mean = single_sum / n;
    Ok(RateEstimate {
        gadget: circuit.name.clone(),
        layout: circuit.layout,
        model: *model,
        test,
        k_min,
        n_samples,
        seed,
        tail_probability: tail,
        no_fault_probability: no_fault,
        rates,
        stderr,
        failure: tail * fail_mean,
        failure_stderr: tail * binomial_stderr(fail_mean, n_samples),
        single_fault_failure: tail * single_mean,
        single_fault_stderr: tail * binomial_stderr(single_mean, n_samples),
        non_z_samples,
    })
}

/// Builds `id` and estimates its label rates on `test`.
pub fn estimate_logical_rates(
    id: &GadgetId,
    model: &NoiseModel,
    k_min: usize,
    n_samples: usize,
    test: TestState,
    seed: u64,
) -> Result<RateEstimate> {
    let circuit = build_default(id)?;
    estimate_circuit_rates(&circuit, model, k_min, n_samples, test, seed)
}

/// Rates of an extended rectangle with one error-correction cycle removed.
///
/// Every label with a single non-`I` block loses the cycle's rate for that
/// letter; errors are combined in quadrature.
pub fn subtract_ec_cycle(ext: &RateEstimate, ec: &RateEstimate) -> BTreeMap<String, (f64, f64)> {
    ext.rates
        .iter()
        .map(|(label, &r)| {
            let letters: Vec<char> = label.chars().filter(|&c| c != 'I').collect();
            let (sub, sub_err) = if letters.len() == 1 {
                let l = letters[0].to_string();
                (ec.rate(&l), ec.rate_stderr(&l))
            } else {
                (0.0, 0.0)
            };
            let err = ext.rate_stderr(label).hypot(sub_err);
            (label.clone(), (r - sub, err))
        })
        .collect()
}

/// Least-squares fit of the summed failure rate and its break-even point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakEvenFit {
    /// Quadratic coefficient.
    pub a: f64,
    /// Cubic coefficient.
    pub b: f64,
    /// Coefficient of `ε·p` (zero when ε = 0).
    pub c: f64,
    pub epsilon: f64,
    /// Physical rate where the fitted logical rate equals `p`.
    pub p_c: Option<f64>,
}

impl BreakEvenFit {
    pub fn predict(&self, p: f64) -> f64 {
        self.a * p * p + self.b * p * p * p + self.c * self.epsilon * p
    }
}

/// Smallest positive root of `b·p² + a·p + (c·ε − 1) = 0`.
pub fn break_even_root(a: f64, b: f64, c: f64, epsilon: f64) -> Option<f64> {
    let gap = 1.0 - c * epsilon;
    if gap <= 0.0 {
        return None;
    }
    let disc = a * a + 4.0 * b * gap;
    if disc < 0.0 {
        return None;
    }
    let den = a + disc.sqrt();
    (den > 0.0).then(|| 2.0 * gap / den)
}

/// Unweighted least squares of `rates` against `a·p² + b·p³ (+ c·ε·p)`.
pub fn fit_break_even(ps: &[f64], rates: &[f64], epsilon: f64) -> Result<BreakEvenFit> {
    if ps.len() != rates.len() {
        return Err(Error::DimensionMismatch(ps.len(), rates.len()));
    }
    let cols = if epsilon > 0.0 { 3 } else { 2 };
    if ps.len() < cols {
        return Err(Error::FitDegenerate(format!(
            "{} points for {cols} coefficients",
            ps.len()
        )));
    }
    // Columns are scaled to unit size at the largest p to keep the system
    // well conditioned.
    let pmax = ps.iter().cloned().fold(0.0, f64::max);
    let scales = [pmax * pmax, pmax * pmax * pmax, epsilon * pmax];
    let m = DMatrix::from_fn(ps.len(), cols, |i, j| {
        let p = ps[i];
        let v = match j {
            0 => p * p,
            1 => p * p * p,
            _ => epsilon * p,
        };
        v / scales[j]
    });
    let y = DVector::from_column_slice(rates);
    let sol = m
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::FitDegenerate(e.to_string()))?;
    let a = sol[0] / scales[0];
    let b = sol[1] / scales[1];
    let c = if cols == 3 { sol[2] / scales[2] } else { 0.0 };
    if !(a > 0.0) {
        return Err(Error::FitDegenerate(format!("quadratic coefficient {a}")));
    }
    Ok(BreakEvenFit {
        a,
        b,
        c,
        epsilon,
        p_c: break_even_root(a, b, c, epsilon),
    })
}

/// Logarithmic grid with `per_decade` points per decade from `lo` up to `hi`.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let step = 1.0 / per_decade as f64;
    let mut out = Vec::new();
    let mut k = 0;
    loop {
        let v = lo * 10f64.powf(k as f64 * step);
        if v > hi * (1.0 + 1e-9) {
            break;
        }
        out.push(v);
        k += 1;
    }
    out
}

/// Default grid: 6 points per decade over `[1e-3, 3e-2]`.
pub fn default_grid() -> Vec<f64> {
    log_grid(1e-3, 3e-2, 6)
}

/// One point of a break-even sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub p: f64,
    pub p1: f64,
    pub zero: RateEstimate,
    pub plus: RateEstimate,
    /// Failure on `|0_L⟩` plus failure on `|+_L⟩`.
    pub total: f64,
    pub total_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub gadget: String,
    pub alpha: f64,
    pub epsilon: f64,
    pub points: Vec<SweepPoint>,
    pub fit: BreakEvenFit,
}

/// Sweeps `p` over `grid` with `p1 = α·p` and fits the summed failure rate.
///
/// Each grid point `i` uses seeds derived from `seed` and `i` only, so sweeps
/// at different `α` share their random streams.
pub fn sweep_and_fit(
    id: &GadgetId,
    template: &NoiseModel,
    grid: &[f64],
    alpha: f64,
    k_min: usize,
    n_per_point: usize,
    seed: u64,
) -> Result<Sweep> {
    if grid.len() < 4 {
        return Err(Error::InvalidRequest(
            "a sweep needs at least 4 grid points".into(),
        ));
    }
    let lo = grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().cloned().fold(0.0, f64::max);
    if !(lo > 0.0 && hi >= 3.0 * lo) {
        return Err(Error::InvalidRequest(
            "the grid must span at least a factor 3".into(),
        ));
    }
    let circuit = build_default(id)?;
    let mut points = Vec::with_capacity(grid.len());
    for (i, &p) in grid.iter().enumerate() {
        let mut model = NoiseModel::with_alpha(p, alpha, template.epsilon)?;
        if alpha > 0.0 {
            model.reset_is_init = template.reset_is_init;
        }
        let base = seed.wrapping_add((i as u64) << 32);
        let zero =
            estimate_circuit_rates(&circuit, &model, k_min, n_per_point, TestState::Zero, base)?;
        let plus = estimate_circuit_rates(
            &circuit,
            &model,
            k_min,
            n_per_point,
            TestState::Plus,
            base ^ 1,
        )?;
        points.push(SweepPoint {
            p,
            p1: model.p1,
            total: zero.failure + plus.failure,
            total_stderr: zero.failure_stderr.hypot(plus.failure_stderr),
            zero,
            plus,
        });
    }
    let ps: Vec<f64> = points.iter().map(|pt| pt.p).collect();
    let rates: Vec<f64> = points.iter().map(|pt| pt.total).collect();
    let fit = fit_break_even(&ps, &rates, template.epsilon)?;
    Ok(Sweep {
        gadget: circuit.name,
        alpha,
        epsilon: template.epsilon,
        points,
        fit,
    })
}

/// One CSV record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub gadget: String,
    pub layout: String,
    pub p: f64,
    pub p1: f64,
    pub epsilon: f64,
    pub label: String,
    pub estimate: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub k_min: usize,
    pub seed: u64,
}

/// Rows for every failure label plus a `total` row.
pub fn csv_rows(est: &RateEstimate) -> Vec<CsvRow> {
    let row = |label: &str, estimate: f64, stderr: f64| CsvRow {
        gadget: est.gadget.clone(),
        layout: est.layout.to_string(),
        p: est.model.p,
        p1: est.model.p1,
        epsilon: est.model.epsilon,
        label: label.to_string(),
        estimate,
        stderr,
        n_samples: est.n_samples,
        k_min: est.k_min,
        seed: est.seed,
    };
    let mut out: Vec<CsvRow> = est
        .rates
        .iter()
        .map(|(l, &r)| row(l, r, est.rate_stderr(l)))
        .collect();
    out.push(row("total", est.failure, est.failure_stderr));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_limits() {
        assert!((break_even_root(100.0, 0.0, 0.0, 0.0).unwrap() - 0.01).abs() < 1e-15);
        let p = break_even_root(100.0, 1e4, 0.0, 0.0).unwrap();
        let closed = (-100.0 + (1e4f64 + 4e4).sqrt()) / 2e4;
        assert!((p - closed).abs() < 1e-15);
        assert!(break_even_root(100.0, 0.0, 10.0, 0.1).is_none());
        assert!((break_even_root(100.0, 0.0, 10.0, 0.05).unwrap() - 0.005).abs() < 1e-15);
    }

    #[test]
    fn grid_has_six_points_per_decade() {
        let g = default_grid();
        assert_eq!(g.len(), 9);
        assert!((g[6] - 1e-2).abs() < 1e-12);
        assert!(*g.last().unwrap() <= 3e-2);
    }

    #[test]
    fn fit_recovers_synthetic_coefficients() {
        let g = default_grid();
        let y: Vec<f64> = g.iter().map(|p| 100.0 * p * p + 1e4 * p * p * p).collect();
        let f = fit_break_even(&g, &y, 0.0).unwrap();
        assert!((f.a / 100.0 - 1.0).abs() < 1e-9);
        assert!((f.b / 1e4 - 1.0).abs() < 1e-9);
        let y: Vec<f64> = g.iter().map(|p| 50.0 * p * p + 12.0 * 0.05 * p).collect();
        let f = fit_break_even(&g, &y, 0.05).unwrap();
        assert!((f.c / 12.0 - 1.0).abs() < 1e-9);
        assert!(f.b.abs() < 1e-6);
    }

    #[test]
    fn negative_quadratic_is_degenerate() {
        let g = default_grid();
        let y: Vec<f64> = g.iter().map(|p| -p * p).collect();
        assert!(matches!(
            fit_break_even(&g, &y, 0.0),
            Err(Error::FitDegenerate(_))
        ));
    }

    #[test]
    fn ec_subtraction_hits_single_block_labels() {
        let mut ext = RateEstimate {
            gadget: "x".into(),
            layout: Layout::AllToAll,
            model: NoiseModel::biased(1e-3).unwrap(),
            test: TestState::Double,
            k_min: 2,
            n_samples: 100,
            seed: 0,
            tail_probability: 1.0,
            no_fault_probability: 0.0,
            rates: BTreeMap::new(),
            stderr: BTreeMap::new(),
            failure: 0.0,
            failure_stderr: 0.0,
            single_fault_failure: 0.0,
            single_fault_stderr: 0.0,
            non_z_samples: 0,
        };
        let mut ec = ext.clone();
        ext.rates.insert("ZI".into(), 5.0);
        ext.rates.insert("ZZ".into(), 2.0);
        ec.rates.insert("Z".into(), 1.5);
        let adj = subtract_ec_cycle(&ext, &ec);
        assert_eq!(adj["ZI"].0, 3.5);
        assert_eq!(adj["ZZ"].0, 2.0);
    }
}
