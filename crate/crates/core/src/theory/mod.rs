//! Analytic companions to the factorizer: how much information the support
//! of a sparse factor carries, how well the best of `K` random directions
//! correlates with a target, the per-nonzero SNR factor that follows, and
//! the column-collision bound that limits how short blocks may get.

mod quadrature;

pub use quadrature::integrate;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use statrs::function::beta::ln_beta;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::po2::{pow2, QuantizerConfig};
use crate::rate::Rate;

/// SNR gain of one extra bit of uniform resolution, `20 log10 2`.
pub const DB_PER_BIT: f64 = 6.020_599_913_279_624;

/// Absolute tolerance used for every integral in this module.
pub const QUAD_TOL: f64 = 1e-10;

/// The per-nonzero SNR factor obtained by averaging the distance error
/// linearly instead of logarithmically.
pub const GAMMA_LINEAR: f64 = 18.0 / 5.0;

pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidInput(format!(
            "probability {x} outside [0, 1]"
        )));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(x) + term(1.0 - x))
}

/// Bits of support information per nonzero entry at aspect ratio `x = K/N`:
/// `x · H2(1/x)`.
pub fn info_at_aspect(x: f64) -> f64 {
    assert!(x >= 1.0, "aspect ratio must be at least 1");
    x * binary_entropy(1.0 / x).expect("1/x lies in (0, 1]")
}

/// `(K/N) · H2(N/K)`, the normalized log-count of `N·K`-of-`K²` supports.
pub fn info_per_entry(n: usize, k: usize) -> f64 {
    assert!(n >= 1 && n <= k, "need 1 <= N <= K");
    info_at_aspect(k as f64 / n as f64)
}

/// Row count matched to `k` columns at rate `r`: `max(1, round(log2(k) / r))`.
pub fn rows_for_aspect(k: usize, r: f64) -> usize {
    assert!(k >= 2 && r > 0.0, "need K >= 2 and R > 0");
    // tolerate representation error such as 10 / (1/3) = 30.000000000000004
    let exact = (k as f64).log2() / r;
    let n = (exact + 1e-9).round().max(1.0);
    n as usize
}

/// Distribution of the absolute correlation `ϱ` between a fixed unit vector
/// and a uniformly random direction in `n` dimensions, and of the maximum of
/// `k` such correlations.
///
/// `ϱ²` is Beta(1/2, (n−1)/2) distributed, so `ϱ` has density
/// `(2/Z)(1 − ϱ²)^((n−3)/2)` on `[0, 1]` with `Z = B(1/2, (n−1)/2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaCorrModel {
    pub n: usize,
    pub k: usize,
}

impl BetaCorrModel {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 2 || k < 1 {
            return Err(Error::InvalidInput(format!(
                "correlation model needs N >= 2 and K >= 1, got N = {n}, K = {k}"
            )));
        }
        Ok(BetaCorrModel { n, k })
    }

    /// `ln Z = ln B(1/2, (n−1)/2)`.
    pub fn ln_partition(&self) -> f64 {
        ln_beta(0.5, (self.n as f64 - 1.0) / 2.0)
    }

    /// Density of `ϱ²` at `r`.
    pub fn density_sq(&self, r: f64) -> f64 {
        if r <= 0.0 || r >= 1.0 {
            return 0.0;
        }
        let ln = -0.5 * r.ln() + (self.n as f64 - 3.0) / 2.0 * (1.0 - r).ln() - self.ln_partition();
        ln.exp()
    }

    /// Density of `ϱ` at `rho`.
    pub fn density(&self, rho: f64) -> f64 {
        if !(0.0..1.0).contains(&rho) {
            return 0.0;
        }
        let ln =
            2f64.ln() + (self.n as f64 - 3.0) / 2.0 * (1.0 - rho * rho).ln() - self.ln_partition();
        ln.exp()
    }

    /// `(2/Z) ∫ (1 − ξ²)^((n−3)/2) dξ` over `[sin a, sin b]`, integrated in
    /// the angle `θ = asin ξ` where the integrand `cos^(n−2) θ` is smooth even
    /// for `n = 2`.
    fn mass_between_angles(&self, a: f64, b: f64) -> f64 {
        let p = self.n as f64 - 2.0;
        let scale = (2f64.ln() - self.ln_partition()).exp();
        scale * integrate(|t: f64| t.cos().max(0.0).powf(p), a, b, QUAD_TOL / scale)
    }

    /// `P(ϱ > rho)`.
    pub fn tail(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 1.0;
        }
        if rho >= 1.0 {
            return 0.0;
        }
        let theta = rho.asin();
        if theta > std::f64::consts::FRAC_PI_4 {
            self.mass_between_angles(theta, std::f64::consts::FRAC_PI_2)
                .clamp(0.0, 1.0)
        } else {
            (1.0 - self.mass_between_angles(0.0, theta)).clamp(0.0, 1.0)
        }
    }

    /// `P(ϱ ≤ rho)`.
    pub fn cdf(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        if rho >= 1.0 {
            return 1.0;
        }
        let theta = rho.asin();
        if theta > std::f64::consts::FRAC_PI_4 {
            1.0 - self.tail(rho)
        } else {
            self.mass_between_angles(0.0, theta).clamp(0.0, 1.0)
        }
    }

    /// `P(max of k correlations ≤ rho) = cdf(rho)^k`.
    pub fn max_cdf(&self, rho: f64) -> f64 {
        let tail = self.tail(rho);
        if tail >= 1.0 {
            return 0.0;
        }
        (self.k as f64 * (-tail).ln_1p()).exp()
    }
}

pub fn corr_cdf(rho: f64, n: usize) -> Result<f64> {
    Ok(BetaCorrModel::new(n, 1)?.cdf(rho))
}

pub fn pmax_cdf(rho: f64, n: usize, k: usize) -> Result<f64> {
    Ok(BetaCorrModel::new(n, k)?.max_cdf(rho))
}

/// Large-size limit of the squared best correlation, `1 − 4^(−r)`.
pub fn limiting_cos2(r: f64) -> f64 {
    assert!(r > 0.0, "rate must be positive");
    1.0 - 4f64.powf(-r)
}

/// `3 exp(2 − √3 π / 3) ≈ 3.614`.
pub fn gamma_constant() -> f64 {
    3.0 * (2.0 - 3f64.sqrt() * std::f64::consts::PI / 3.0).exp()
}

/// `exp(−3 ∫_0^{1/3} ln(1/4 + 3a²/4) da)`, the log-average of the SNR
/// factor over a distance error uniform on `[0, 1/3)`.
pub fn gamma_by_quadrature() -> f64 {
    let integral = integrate(|a| (0.25 + 0.75 * a * a).ln(), 0.0, 1.0 / 3.0, 1e-14);
    (-3.0 * integral).exp()
}

/// `10 log10(γ^(N·R))` dB gained per factor.
pub fn predicted_snr_db(n: usize, r: f64) -> f64 {
    10.0 * n as f64 * r * gamma_constant().log10()
}

/// `10 (Q−1) R log10(R K² / log2 K)`.
pub fn conjectured_snr_db(k: usize, q: usize, r: f64) -> f64 {
    assert!(k >= 2 && q >= 1, "need K >= 2 and Q >= 1");
    let k = k as f64;
    10.0 * (q as f64 - 1.0) * r * (r * k * k / k.log2()).log10()
}

fn gaussian_mass(lo: f64, hi: f64) -> f64 {
    // P(lo <= X < hi) for X ~ N(0, 1), 0 <= lo < hi, via upper tails
    0.5 * (erfc(lo / std::f64::consts::SQRT_2) - erfc(hi / std::f64::consts::SQRT_2))
}

/// Probability that two independent standard Gaussians round to the same
/// element of `{0, ±2^e}` under `cfg`.
pub fn po2_match_prob(cfg: &QuantizerConfig) -> f64 {
    let zero = gaussian_mass(0.0, cfg.zero_threshold()) * 2.0;
    let mut same = zero * zero;
    for e in cfg.e_min..=cfg.e_max {
        let lo = 0.75 * pow2(e);
        let hi = if e == cfg.e_max {
            f64::INFINITY
        } else {
            1.5 * pow2(e)
        };
        let p = gaussian_mass(lo, hi);
        same += 2.0 * p * p;
    }
    same
}

/// Union bound `min(1, p^N · K(K−1)/2)` on two of `K` columns coinciding.
pub fn collision_bound(p: f64, n: usize, k: usize) -> f64 {
    let pairs = k as f64 * (k as f64 - 1.0) / 2.0;
    if pairs == 0.0 {
        return 0.0;
    }
    (p.powi(n as i32) * pairs).min(1.0)
}

/// Measured SNR (dB) of one matrix size for consecutive `Q = 1, 2, …`.
#[derive(Clone, Debug, PartialEq)]
pub struct SnrRow {
    pub n: usize,
    pub k: usize,
    pub snr_db: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fig1Marker {
    pub aspect_ratio: f64,
    pub bits: f64,
}

/// Largest SNR step between neighbouring resolutions of each row, in bits.
pub fn fig1_markers(rows: &[SnrRow]) -> Result<Vec<Fig1Marker>> {
    rows.iter()
        .map(|row| {
            if row.snr_db.len() < 2 {
                return Err(Error::InvalidInput(format!(
                    "row {}x{} needs at least two resolutions",
                    row.n, row.k
                )));
            }
            let gap = row
                .snr_db
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::NEG_INFINITY, f64::max);
            Ok(Fig1Marker {
                aspect_ratio: row.k as f64 / row.n as f64,
                bits: gap / DB_PER_BIT,
            })
        })
        .collect()
}

/// Analytic summary for a `K`-column block at rate `R` with `Q` factors.
#[derive(Clone, Debug, PartialEq)]
pub struct TheoryReport {
    pub k: usize,
    pub q: usize,
    pub rate: Rate,
    /// Block height `round(log2 K / R)`.
    pub n: usize,
    /// Support information, bits per entry.
    pub info_bits: f64,
    pub cos2_alpha: f64,
    pub sin2_alpha: f64,
    pub gamma: f64,
    /// SNR gained per factor, `γ^(N·R)` in dB.
    pub predicted_snr_db: f64,
    pub conjectured_snr_db: f64,
    pub collision_bound: f64,
}

impl TheoryReport {
    pub fn evaluate(k: usize, q: usize, rate: Rate, cfg: &QuantizerConfig) -> Result<Self> {
        if k < 2 || q == 0 {
            return Err(Error::InvalidInput(format!(
                "theory needs K >= 2 and Q >= 1, got K = {k}, Q = {q}"
            )));
        }
        let r = rate.value();
        let n = rows_for_aspect(k, r).min(k);
        let cos2 = limiting_cos2(r);
        Ok(TheoryReport {
            k,
            q,
            rate,
            n,
            info_bits: info_per_entry(n, k),
            cos2_alpha: cos2,
            sin2_alpha: 1.0 - cos2,
            gamma: gamma_constant(),
            predicted_snr_db: predicted_snr_db(n, r),
            conjectured_snr_db: conjectured_snr_db(k, q, r),
            collision_bound: collision_bound(po2_match_prob(cfg), n, k),
        })
    }
}

/// Samples the maximum absolute correlation between the first unit vector
/// and `k` independent uniformly random directions in `n` dimensions.
pub fn sample_max_correlation(n: usize, k: usize, trials: usize, seed: u64) -> Vec<f64> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(crate::seed::derive(seed, 0, t as u64));
            (0..k)
                .map(|_| {
                    let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let norm_sq: f64 = g.iter().map(|x| x * x).sum();
                    g[0].abs() / norm_sq.sqrt()
                })
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and
/// the continuous CDF `cdf`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / m).abs().max(((i + 1) as f64 / m - f).abs())
        })
        .fold(0.0, f64::max)
}
