//! Multiplicative approximation `M ≈ F_1 F_2 ⋯ F_Q` with sparse power-of-two
//! factors.
//!
//! `F_1` (N×K) is the entrywise power-of-two rounding of the `R·N·K`
//! largest-magnitude entries of `M` (all of them at rate 1). Every further factor `F_q` (K×K)
//! is chosen column by column so that `L_q F_q ≈ M` with
//! `L_q = F_1 ⋯ F_{q-1}`, each column being a greedy sparse power-of-two
//! solution with at most `s` nonzeros.

mod blocks;
mod greedy;

pub use blocks::{plan_blocks, target_height, Block, BlockPlan};
pub use greedy::{greedy_sparse_column, ColumnSolver, SparseColumn};

use rayon::prelude::*;

use crate::error::{mismatch, Error, Result};
use crate::po2::{quantize_matrix, DenseMatrix, Po2Entry, Po2Matrix, QuantizerConfig};
use crate::rate::Rate;

/// Parameters of the multiplicative approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorConfig {
    /// Number of factors `Q`.
    pub factors: usize,
    /// Sparsification rate `R`; every factor keeps about `R·N·K` nonzeros.
    pub rate: Rate,
    /// Nonzeros per column of `F_2..F_Q`. `None` means `max(1, round(R·N))`.
    pub column_budget: Option<usize>,
    pub quantizer: QuantizerConfig,
    /// Provenance only; the algorithm itself is deterministic.
    pub seed: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            factors: 2,
            rate: Rate::ONE,
            column_budget: None,
            quantizer: QuantizerConfig::default(),
            seed: 0,
        }
    }
}

impl FactorConfig {
    pub fn new(factors: usize, rate: Rate) -> Self {
        FactorConfig {
            factors,
            rate,
            ..FactorConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.factors == 0 {
            return Err(Error::InvalidInput("need at least one factor".into()));
        }
        if !self.rate.is_at_most_one() {
            return Err(Error::InvalidInput(format!(
                "sparsification rate {} exceeds 1",
                self.rate
            )));
        }
        if self.column_budget == Some(0) {
            return Err(Error::InvalidInput("column budget must be positive".into()));
        }
        self.quantizer.validate()
    }

    /// Resolved per-column budget `s` for an `n`×`k` matrix.
    pub fn column_budget_for(&self, n: usize, k: usize) -> usize {
        self.column_budget
            .unwrap_or_else(|| (self.rate.round_mul(n as u64) as usize).max(1))
            .min(k)
    }

    /// Aggregate nonzero budget `ceil(R·N·K)` for every factor.
    pub fn nnz_budget(&self, n: usize, k: usize) -> usize {
        self.rate.ceil_mul((n * k) as u64) as usize
    }
}

/// Ordered factors `F_1..F_Q` whose product approximates an N×K matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    rows: usize,
    cols: usize,
    factors: Vec<Po2Matrix>,
    config: FactorConfig,
}

impl Factorization {
    /// Validates the dimension chain: `F_1` is N×K and the rest are K×K.
    pub fn new(
        rows: usize,
        cols: usize,
        factors: Vec<Po2Matrix>,
        config: FactorConfig,
    ) -> Result<Self> {
        config.validate()?;
        if factors.len() != config.factors {
            return Err(mismatch(
                format!("{} factors", config.factors),
                factors.len(),
            ));
        }
        for (q, f) in factors.iter().enumerate() {
            let want = if q == 0 { (rows, cols) } else { (cols, cols) };
            if (f.rows(), f.cols()) != want {
                return Err(mismatch(
                    format!("factor {} of shape {}x{}", q + 1, want.0, want.1),
                    format!("{}x{}", f.rows(), f.cols()),
                ));
            }
        }
        Ok(Factorization {
            rows,
            cols,
            factors,
            config,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn factors(&self) -> &[Po2Matrix] {
        &self.factors
    }

    pub fn config(&self) -> &FactorConfig {
        &self.config
    }

    /// Dense product `F_1 ⋯ F_Q`.
    pub fn reconstruct(&self) -> DenseMatrix {
        self.prefix_products().last().expect("at least one factor")
    }

    /// Dense products `F_1`, `F_1 F_2`, …, `F_1 ⋯ F_Q`, i.e. the
    /// approximations obtained by stopping after each factor.
    pub fn prefix_products(&self) -> impl Iterator<Item = DenseMatrix> + '_ {
        let mut acc: Option<DenseMatrix> = None;
        self.factors.iter().map(move |f| {
            let next = match acc.take() {
                None => f.to_dense(),
                Some(l) => l
                    .mul_po2(f)
                    .expect("dimension chain checked at construction"),
            };
            acc = Some(next.clone());
            next
        })
    }
}

/// Keeps the `budget` entries of largest magnitude; ties go to the smaller
/// `(row, col)`.
pub fn sparsify_po2(f: &Po2Matrix, budget: usize) -> Po2Matrix {
    if budget >= f.nnz() {
        return f.clone();
    }
    let mut order: Vec<&Po2Entry> = f.entries().iter().collect();
    // entries are already (row, col) sorted, so a stable sort keeps that order on ties
    order.sort_by_key(|e| std::cmp::Reverse(e.value.exponent));
    let kept = order.into_iter().take(budget).copied().collect();
    Po2Matrix::new(f.rows(), f.cols(), kept).expect("subset of a valid matrix")
}

/// Zeroes all but the `budget` entries of `m` with the largest magnitude;
/// ties go to the smaller `(row, col)`.
pub fn keep_largest(m: &DenseMatrix, budget: usize) -> DenseMatrix {
    let data = m.data();
    if budget >= data.len() {
        return m.clone();
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.sort_by(|&a, &b| data[b].abs().total_cmp(&data[a].abs()).then(a.cmp(&b)));
    let mut kept = vec![0.0; data.len()];
    for &i in &order[..budget] {
        kept[i] = data[i];
    }
    DenseMatrix::new(m.rows(), m.cols(), kept).expect("subset of a valid matrix")
}

/// One recursion stage: column `k` of the result is the greedy solution of
/// `basis · ρ ≈ m_k` with at most `budget` nonzeros.
pub fn factor_step(
    basis: &DenseMatrix,
    m: &DenseMatrix,
    budget: usize,
    cfg: &QuantizerConfig,
) -> Result<Po2Matrix> {
    if basis.rows() != m.rows() {
        return Err(mismatch(
            format!("target with {} rows", basis.rows()),
            m.rows(),
        ));
    }
    let solver = ColumnSolver::new(basis)?;
    step_with_solver(&solver, m, budget, cfg)
}

fn step_with_solver(
    solver: &ColumnSolver,
    m: &DenseMatrix,
    budget: usize,
    cfg: &QuantizerConfig,
) -> Result<Po2Matrix> {
    let targets = m.transpose();
    let columns = (0..m.cols())
        .into_par_iter()
        .map(|c| solver.solve(targets.row(c), budget, cfg))
        .collect::<Result<Vec<_>>>()?;
    let entries = columns
        .iter()
        .enumerate()
        .flat_map(|(col, rho)| {
            rho.picks
                .iter()
                .map(move |&(row, value)| Po2Entry { row, col, value })
        })
        .collect();
    Po2Matrix::new(solver.cols(), m.cols(), entries)
}

/// Multiplicative approximation of an N×K matrix with `N <= K`.
pub fn factorize(m: &DenseMatrix, cfg: &FactorConfig) -> Result<Factorization> {
    cfg.validate()?;
    let (n, k) = (m.rows(), m.cols());
    if n > k {
        return Err(Error::Orientation { rows: n, cols: k });
    }
    let nnz_budget = cfg.nnz_budget(n, k);
    let budget = cfg.column_budget_for(n, k);

    // thin by the magnitude of M itself, then round what is left
    let first = quantize_matrix(&keep_largest(m, nnz_budget), &cfg.quantizer)?;
    let mut basis = first.to_dense();
    let mut factors = vec![first];
    for _ in 1..cfg.factors {
        let solver = ColumnSolver::new(&basis)?;
        let mut f = step_with_solver(&solver, m, budget, &cfg.quantizer)?;
        if f.nnz() > nnz_budget {
            // only reachable when the per-column budget is set above R·N
            f = sparsify_po2(&f, nnz_budget);
        }
        basis = basis.mul_po2(&f)?;
        factors.push(f);
    }
    Factorization::new(n, k, factors, *cfg)
}

/// Factorizes each row block of `m` independently.
pub fn factorize_blocked(
    m: &DenseMatrix,
    cfg: &FactorConfig,
) -> Result<Vec<(Block, Factorization)>> {
    if m.cols() < 2 {
        return Err(Error::InvalidInput(
            "blocked factorization needs at least two columns".into(),
        ));
    }
    let plan = plan_blocks(m.rows(), m.cols(), cfg.rate);
    plan.blocks
        .par_iter()
        .map(|b| {
            let part = m.row_block(b.row_start, b.row_count);
            factorize(&part, cfg).map(|f| (*b, f))
        })
        .collect()
}

/// Stacks the block reconstructions back into one matrix.
pub fn reconstruct_blocked(parts: &[(Block, Factorization)]) -> Result<DenseMatrix> {
    let dense: Vec<DenseMatrix> = parts.iter().map(|(_, f)| f.reconstruct()).collect();
    DenseMatrix::vstack(&dense)
}
