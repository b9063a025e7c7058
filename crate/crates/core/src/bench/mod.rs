//! Monte Carlo SNR benchmarks over iid Gaussian matrices.
//!
//! Every matrix comes from [`gen_gaussian`]: a ChaCha8 stream seeded with a
//! 64-bit value, mapped to standard normals by the ziggurat sampler of
//! `rand_distr`. Trial seeds are derived from the master seed, a cell id and
//! the trial index with [`crate::seed::derive`], so results do not depend on
//! thread scheduling.

mod csv_io;

pub use csv_io::{emit_csv, emit_fig1, fig1_curve, read_csv, FIG1_HEADER};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::engine::po2_ledger;
use crate::error::{Error, Result};
use crate::factorizer::{factorize, FactorConfig};
use crate::po2::{DenseMatrix, QuantizerConfig};
use crate::rate::Rate;
use crate::reference;
use crate::theory::{rows_for_aspect, SnrRow};

/// `n × k` matrix of iid standard normal entries.
pub fn gen_gaussian(n: usize, k: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * k)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    DenseMatrix::new(n, k, data).expect("gaussian samples are finite")
}

/// What to sweep. Not every table reads every field: Table 1 uses `sizes`,
/// Tables 2 and 3 use `columns`, Table 3 also uses `budgets`.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkSpec {
    pub sizes: Vec<(usize, usize)>,
    pub columns: Vec<usize>,
    pub q_max: usize,
    pub rates: Vec<Rate>,
    pub budgets: Vec<Rate>,
    /// Minimum trials per cell; raised as needed to reach `min_entries`.
    pub trials: usize,
    pub seed: u64,
    /// Lower bound on `trials · N · K` for every cell.
    pub min_entries: usize,
    pub quantizer: QuantizerConfig,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        BenchmarkSpec {
            sizes: Vec::new(),
            columns: Vec::new(),
            q_max: 5,
            rates: vec![Rate::ONE],
            budgets: Vec::new(),
            trials: 1,
            seed: 0,
            min_entries: 100_000,
            quantizer: QuantizerConfig::default(),
        }
    }
}

fn reciprocals(max_den: u32) -> Vec<Rate> {
    (1..=max_den)
        .map(|d| Rate::reciprocal(d).expect("positive denominator"))
        .collect()
}

impl BenchmarkSpec {
    /// Sizes 2×4 through 10×1024 with `Q = 1..=5`.
    pub fn table1() -> Self {
        BenchmarkSpec {
            sizes: reference::TABLE1[..9]
                .iter()
                .map(|(n, k, _)| (*n, *k))
                .collect(),
            ..BenchmarkSpec::default()
        }
    }

    /// `K = 1024`, rates `1, 1/2, …, 1/12`, `Q = 1..=7`.
    pub fn table2() -> Self {
        BenchmarkSpec {
            columns: vec![1024],
            q_max: 7,
            rates: reciprocals(12),
            ..BenchmarkSpec::default()
        }
    }

    /// `K ∈ {256, 1024}`, budgets `1/4 … 3`, rates `1 … 1/12`.
    pub fn table3() -> Self {
        BenchmarkSpec {
            columns: vec![256, 1024],
            rates: reciprocals(12),
            budgets: reference::TABLE3_BUDGETS
                .iter()
                .map(|&(a, b)| Rate::new(a, b).expect("positive budget"))
                .collect(),
            ..BenchmarkSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.q_max == 0 {
            return Err(Error::InvalidInput(
                "trials and Q range must be positive".into(),
            ));
        }
        if let Some(r) = self.rates.iter().find(|r| !r.is_at_most_one()) {
            return Err(Error::InvalidInput(format!("rate {r} exceeds 1")));
        }
        if let Some((n, k)) = self.sizes.iter().find(|(n, k)| *n == 0 || n > k) {
            return Err(Error::InvalidInput(format!(
                "size {n}x{k} needs 1 <= N <= K"
            )));
        }
        if let Some(k) = self.columns.iter().find(|&&k| k < 2) {
            return Err(Error::InvalidInput(format!("column count {k} below 2")));
        }
        self.quantizer.validate()
    }

    /// Trials for an `n × k` cell: at least `trials`, and enough to cover
    /// `min_entries` matrix entries.
    pub fn trials_for(&self, n: usize, k: usize) -> usize {
        self.trials.max(self.min_entries.div_ceil(n * k))
    }
}

/// Aggregate over the trials of one `(N, K, Q, R)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub n: usize,
    pub k: usize,
    pub q: usize,
    pub rate: Rate,
    pub trials: usize,
    /// SNR of the trial-averaged powers, `10 log10(Σ‖M‖² / Σ‖M − A‖²)`.
    pub mean_snr_db: f64,
    /// Delta-method standard error of `mean_snr_db`.
    pub stderr_db: f64,
    /// Additions per matrix entry counted by the engine ledger.
    pub adds_per_entry: f64,
}

impl CellResult {
    /// Additions per entry implied by the parameters alone, `Q·R`.
    pub fn nominal_adds(&self) -> f64 {
        self.q as f64 * self.rate.value()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchmarkResult {
    pub cells: Vec<CellResult>,
    /// Human-readable remarks such as skipped parameter combinations.
    pub notes: Vec<String>,
}

impl BenchmarkResult {
    /// Groups cells by `(N, K)` in order, collecting SNR over consecutive `Q`.
    pub fn snr_rows(&self) -> Vec<SnrRow> {
        let mut rows: Vec<SnrRow> = Vec::new();
        for c in &self.cells {
            match rows.last_mut() {
                Some(r) if r.n == c.n && r.k == c.k => r.snr_db.push(c.mean_snr_db),
                _ => rows.push(SnrRow {
                    n: c.n,
                    k: c.k,
                    snr_db: vec![c.mean_snr_db],
                }),
            }
        }
        rows
    }
}

fn cell_id(n: usize, k: usize, rate: Rate) -> u64 {
    crate::seed::splitmix64(
        ((n as u64) << 40) ^ ((k as u64) << 16) ^ ((rate.den() as u64) << 8) ^ rate.num() as u64,
    )
}

/// Ratio-of-means SNR over trials with its delta-method standard error.
/// Powers are averaged before taking decibels, so every matrix entry
/// carries equal weight.
pub fn pooled_snr_db(signal: &[f64], noise: &[f64]) -> (f64, f64) {
    assert_eq!(signal.len(), noise.len());
    let t = signal.len() as f64;
    let s_bar = signal.iter().sum::<f64>() / t;
    let e_bar = noise.iter().sum::<f64>() / t;
    if e_bar == 0.0 {
        return (f64::INFINITY, 0.0);
    }
    let snr = 10.0 * (s_bar / e_bar).log10();
    if signal.len() < 2 {
        return (snr, 0.0);
    }
    // d(10 log10(S/E)) = (10 / ln 10) (dS/S − dE/E)
    let z: Vec<f64> = signal
        .iter()
        .zip(noise)
        .map(|(s, e)| s / s_bar - e / e_bar)
        .collect();
    let z_bar = z.iter().sum::<f64>() / t;
    let var = z.iter().map(|v| (v - z_bar) * (v - z_bar)).sum::<f64>() / (t - 1.0);
    (snr, 10.0 / std::f64::consts::LN_10 * (var / t).sqrt())
}

/// Runs `trials` random `n × k` matrices through a `q_max`-factor
/// factorization at `rate` and reports one cell per prefix `Q = 1..=q_max`.
pub fn run_sweep(
    n: usize,
    k: usize,
    rate: Rate,
    q_max: usize,
    trials: usize,
    seed: u64,
    quantizer: QuantizerConfig,
) -> Result<Vec<CellResult>> {
    let id = cell_id(n, k, rate);
    let cfg = FactorConfig {
        factors: q_max,
        rate,
        column_budget: None,
        quantizer,
        seed,
    };
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|t| {
            let m = gen_gaussian(n, k, crate::seed::derive(seed, id, t as u64));
            let fact = factorize(&m, &cfg)?;
            let signal = m.frobenius_sq();
            let noise = fact
                .prefix_products()
                .map(|p| m.sub(&p).map(|d| d.frobenius_sq()))
                .collect::<Result<Vec<_>>>()?;
            let mut adds = Vec::with_capacity(q_max);
            let mut total = 0u64;
            for f in fact.factors() {
                total += po2_ledger(f).additions;
                adds.push(total as f64 / (n * k) as f64);
            }
            Ok((signal, noise, adds))
        })
        .collect::<Result<Vec<_>>>()?;

    let signal: Vec<f64> = per_trial.iter().map(|(s, _, _)| *s).collect();
    Ok((0..q_max)
        .map(|qi| {
            let noise: Vec<f64> = per_trial.iter().map(|(_, e, _)| e[qi]).collect();
            let adds: Vec<f64> = per_trial.iter().map(|(_, _, a)| a[qi]).collect();
            let (mean, stderr) = pooled_snr_db(&signal, &noise);
            CellResult {
                n,
                k,
                q: qi + 1,
                rate,
                trials,
                mean_snr_db: mean,
                stderr_db: stderr,
                adds_per_entry: adds.iter().sum::<f64>() / trials as f64,
            }
        })
        .collect())
}

/// Sizes × `Q` at rate 1.
pub fn run_table1(spec: &BenchmarkSpec) -> Result<BenchmarkResult> {
    spec.validate()?;
    let mut result = BenchmarkResult::default();
    for &(n, k) in &spec.sizes {
        let cells = run_sweep(
            n,
            k,
            Rate::ONE,
            spec.q_max,
            spec.trials_for(n, k),
            spec.seed,
            spec.quantizer,
        )?;
        result.cells.extend(cells);
    }
    Ok(result)
}

/// For each `K`, rates × `Q` on `round(log2 K / R) × K` matrices.
pub fn run_table2(spec: &BenchmarkSpec) -> Result<BenchmarkResult> {
    spec.validate()?;
    let mut result = BenchmarkResult::default();
    for &k in &spec.columns {
        for &rate in &spec.rates {
            let n = rows_for_aspect(k, rate.value());
            if n > k {
                result.notes.push(format!(
                    "skipped R = {rate} at K = {k}: {n} rows exceed columns"
                ));
                continue;
            }
            let cells = run_sweep(
                n,
                k,
                rate,
                spec.q_max,
                spec.trials_for(n, k),
                spec.seed,
                spec.quantizer,
            )?;
            result.cells.extend(cells);
        }
    }
    Ok(result)
}

/// For each `K` and additions budget `A`, the best SNR over the rates `R`
/// for which `Q = A/R` is a positive integer.
pub fn run_table3(spec: &BenchmarkSpec) -> Result<BenchmarkResult> {
    spec.validate()?;
    let mut result = BenchmarkResult::default();
    for &k in &spec.columns {
        // one sweep per rate, long enough for every budget it can serve
        let mut sweeps = Vec::new();
        for &rate in &spec.rates {
            let n = rows_for_aspect(k, rate.value());
            let q_need = spec.budgets.iter().filter_map(|a| a.div_exact(rate)).max();
            let Some(q_need) = q_need else { continue };
            if n > k {
                result.notes.push(format!(
                    "skipped R = {rate} at K = {k}: {n} rows exceed columns"
                ));
                continue;
            }
            let cells = run_sweep(
                n,
                k,
                rate,
                q_need as usize,
                spec.trials_for(n, k),
                spec.seed,
                spec.quantizer,
            )?;
            sweeps.push((rate, cells));
        }
        for &budget in &spec.budgets {
            let mut best: Option<&CellResult> = None;
            for (rate, cells) in &sweeps {
                match budget.div_exact(*rate) {
                    Some(q) => {
                        let cell = &cells[q as usize - 1];
                        if best.is_none_or(|b| cell.mean_snr_db > b.mean_snr_db) {
                            best = Some(cell);
                        }
                    }
                    None => result.notes.push(format!(
                        "K = {k}, budget {budget}: R = {rate} skipped, Q = budget/R is not an integer"
                    )),
                }
            }
            match best {
                Some(cell) => result.cells.push(cell.clone()),
                None => result
                    .notes
                    .push(format!("K = {k}, budget {budget}: no feasible rate")),
            }
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_moments_and_repeatability() {
        let m = gen_gaussian(1000, 1000, 42);
        let n = m.data().len() as f64;
        let mean = m.data().iter().sum::<f64>() / n;
        let var = m
            .data()
            .iter()
            .map(|x| (x - mean) * (x - mean))
            .sum::<f64>()
            / n;
        assert!(mean.abs() < 0.004, "mean {mean}");
        assert!((var - 1.0).abs() < 0.006, "variance {var}");
        assert_eq!(gen_gaussian(3, 5, 9), gen_gaussian(3, 5, 9));
        assert_ne!(gen_gaussian(3, 5, 9), gen_gaussian(3, 5, 10));
    }

    #[test]
    fn pooled_snr() {
        let (snr, se) = pooled_snr_db(&[1.0, 3.0], &[0.1, 0.1]);
        assert!((snr - 10.0 * 20f64.log10()).abs() < 1e-12);
        assert!(se > 0.0);
        let (snr, se) = pooled_snr_db(&[2.0; 3], &[0.02; 3]);
        assert!((snr - 20.0).abs() < 1e-12 && se == 0.0);
        assert_eq!(pooled_snr_db(&[2.0], &[0.0]).0, f64::INFINITY);
    }

    #[test]
    fn trial_floor() {
        let spec = BenchmarkSpec {
            trials: 10,
            ..BenchmarkSpec::default()
        };
        assert_eq!(spec.trials_for(2, 4), 12_500);
        assert_eq!(spec.trials_for(1000, 1000), 10);
    }

    #[test]
    fn sweep_shape_and_reproducibility() {
        let cells = run_sweep(3, 8, Rate::ONE, 3, 20, 5, QuantizerConfig::default()).unwrap();
        assert_eq!(cells.len(), 3);
        assert_eq!(cells.iter().map(|c| c.q).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(cells
            .iter()
            .all(|c| c.stderr_db.is_finite() && c.trials == 20));
        assert!(cells[2].mean_snr_db > cells[0].mean_snr_db);
        let again = run_sweep(3, 8, Rate::ONE, 3, 20, 5, QuantizerConfig::default()).unwrap();
        assert_eq!(cells, again);
    }

    #[test]
    fn table3_skips_infeasible_rates() {
        let spec = BenchmarkSpec {
            columns: vec![16],
            rates: vec![Rate::ONE, Rate::reciprocal(2).unwrap()],
            budgets: vec![Rate::reciprocal(2).unwrap(), Rate::ONE],
            trials: 2,
            min_entries: 0,
            ..BenchmarkSpec::default()
        };
        let result = run_table3(&spec).unwrap();
        assert_eq!(result.cells.len(), 2);
        assert_eq!(result.cells[0].q, 1);
        assert_eq!(result.cells[0].rate, Rate::reciprocal(2).unwrap());
        assert!(result
            .notes
            .iter()
            .any(|n| n.contains("budget 1/2: R = 1 skipped")));
    }

    #[test]
    fn invalid_specs() {
        let spec = BenchmarkSpec {
            sizes: vec![(5, 3)],
            ..BenchmarkSpec::default()
        };
        assert!(run_table1(&spec).is_err());
        let spec = BenchmarkSpec {
            trials: 0,
            ..BenchmarkSpec::default()
        };
        assert!(run_table1(&spec).is_err());
    }
}
