//! Closed-form throughput and chain-probability results, and the
//! max-loaded ℓ-choice balls-in-bins process.

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};

fn require(cond: bool, name: &'static str, reason: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::param(name, reason))
    }
}

/// `exp(-C/(1-C)^2)` with `C = e^{-1/Δ}`: the Nakamoto throughput lower
/// bound for one proposer per unit epoch and no waiting. Exactly 1 at `Δ = 0`.
pub fn nakamoto_lower_bound(delta: f64) -> Result<f64> {
    require(delta >= 0.0 && !delta.is_nan(), "delta", format!("must be positive, got {delta}"))?;
    if delta == 0.0 {
        return Ok(1.0);
    }
    let c = (-1.0 / delta).exp();
    // (1 - C) computed as -expm1 keeps precision for large Δ.
    let one_minus_c = -(-1.0 / delta).exp_m1();
    Ok((-c / (one_minus_c * one_minus_c)).exp())
}

/// Probability that the tree is the perfect chain `Gen-1-…-t`, for one
/// proposer per unit epoch, `ell`-polling and all polled nodes distinct:
/// `∏_{j=1}^{t-1} (1 - α e^{-jℓ/Δ})^{t-j}` with `α = e^{Δ̃ℓ/Δ}`.
pub fn exact_chain_probability(t: u32, ell: u32, delta: f64, wait: f64) -> Result<f64> {
    require(t >= 1, "t", "need at least one epoch")?;
    require(ell >= 1, "ell", "must be at least 1")?;
    require(delta >= 0.0, "delta", format!("must be non-negative, got {delta}"))?;
    require(wait >= 0.0, "wait", format!("must be non-negative, got {wait}"))?;
    if wait >= 1.0 {
        return Err(Error::Domain(format!("waiting time {wait} >= 1 makes the first factor non-positive")));
    }
    let rate = ell as f64 / delta;
    let mut log_p = 0.0;
    for j in 1..t {
        // α e^{-jℓ/Δ} = e^{-(j - Δ̃)ℓ/Δ}
        let x = (-(j as f64 - wait) * rate).exp();
        log_p += (t - j) as f64 * (-x).ln_1p();
    }
    Ok(log_p.exp())
}

/// Critical delay `Δ* = ℓ(1-Δ̃) / (ln t - ln ln(1/δ))` separating the
/// high-chain-probability regime (`Δ ≤ Δ*`) from the forking regime.
pub fn chain_threshold_delta(t: u32, confidence: f64, wait: f64, ell: u32) -> Result<f64> {
    require(t >= 2, "t", "need at least two epochs")?;
    require(confidence > 0.0 && confidence < 1.0, "delta_conf", format!("{confidence} is not in (0, 1)"))?;
    require((0.0..1.0).contains(&wait), "wait", format!("{wait} is not in [0, 1)"))?;
    require(ell >= 1, "ell", "must be at least 1")?;
    let denom = (t as f64).ln() - (1.0 / confidence).ln().ln();
    if denom <= 0.0 {
        return Err(Error::Domain(format!(
            "ln t = {:.4} does not exceed ln ln(1/δ) = {:.4}; the threshold is vacuous",
            (t as f64).ln(),
            (1.0 / confidence).ln().ln()
        )));
    }
    Ok(ell as f64 * (1.0 - wait) / denom)
}

/// Probability that at least one of `ell` distinct nodes holds block `r`
/// when block `j` is proposed: `1 - e^{-(γ_j - γ_r - Δ̃)ℓ/Δ}`.
pub fn e_jir_expectation(gamma_j: f64, gamma_r: f64, wait: f64, ell: u32, delta: f64) -> Result<f64> {
    require(ell >= 1, "ell", "must be at least 1")?;
    require(delta > 0.0, "delta", format!("must be positive, got {delta}"))?;
    let gap = gamma_j - gamma_r - wait;
    if gap.is_nan() || gap <= 0.0 {
        return Err(Error::Domain(format!("block broadcast {gap} after the poll; exponent must be positive")));
    }
    Ok(-(-gap * ell as f64 / delta).exp_m1())
}

/// Total-variation bounds between the real and conditioned tree laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvBound {
    /// `min(1, m(m-1)/(2n))`, `m = kℓt`: collision probability.
    pub birthday: f64,
    /// `(ℓkt)^2 / (2n)`, uncapped.
    pub display: f64,
}

pub fn tv_bound(ell: u32, k: u32, t: u32, n: u32) -> Result<TvBound> {
    require(ell >= 1 && k >= 1 && t >= 1 && n >= 1, "tv_bound", "all arguments must be at least 1")?;
    let m = ell as f64 * k as f64 * t as f64;
    let n = n as f64;
    Ok(TvBound { birthday: (m * (m - 1.0) / (2.0 * n)).min(1.0), display: m * m / (2.0 * n) })
}

/// `Σ_{k=2}^{n-1} (n-k) ln(1 - c^k/n^k)`, which vanishes as `n` grows.
pub fn lemma_limit_sum(n: u64, c: f64) -> Result<f64> {
    require(n >= 3, "n", "need n >= 3")?;
    require(c > 0.0, "c", format!("must be positive, got {c}"))?;
    if c >= n as f64 {
        return Err(Error::Domain(format!("c = {c} >= n = {n} takes the log of a non-positive number")));
    }
    let ratio = c / n as f64;
    let mut sum = 0.0;
    let mut power = ratio;
    for k in 2..n {
        power *= ratio;
        if power == 0.0 {
            break;
        }
        sum += (n - k) as f64 * (-power).ln_1p();
    }
    Ok(sum)
}

/// How the ℓ candidate bins of one ball are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BinSampling {
    #[default]
    WithoutReplacement,
    WithReplacement,
}

/// Throw `t` balls into `t` bins, each into the fullest of `ell` random bins
/// (ties uniform), and return the maximum load.
pub fn balls_in_bins_max_load<R: Rng + ?Sized>(t: u32, ell: u32, sampling: BinSampling, rng: &mut R) -> Result<u32> {
    require(t >= 1, "t", "need at least one bin")?;
    require(ell >= 1, "ell", "must be at least 1")?;
    require(ell <= t, "ell", format!("cannot choose {ell} of {t} bins"))?;
    let t = t as usize;
    let mut load = vec![0u32; t];
    let mut max_load = 0;
    let mut candidates = Vec::with_capacity(ell as usize);
    for _ in 0..t {
        candidates.clear();
        match sampling {
            BinSampling::WithoutReplacement => candidates.extend(index::sample(rng, t, ell as usize)),
            BinSampling::WithReplacement => candidates.extend((0..ell).map(|_| rng.random_range(0..t))),
        }
        let mut best = candidates[0];
        let mut ties = 1u32;
        for &c in &candidates[1..] {
            if load[c] > load[best] {
                best = c;
                ties = 1;
            } else if load[c] == load[best] && c != best {
                ties += 1;
                if rng.random_range(0..ties) == 0 {
                    best = c;
                }
            }
        }
        load[best] += 1;
        max_load = max_load.max(load[best]);
    }
    Ok(max_load)
}

/// `C·ℓ·ln t / ln ln t`.
pub fn balls_in_bins_bound(t: u32, ell: u32, c: f64) -> Result<f64> {
    if t < 3 {
        return Err(Error::Domain(format!("ln ln t is undefined or non-positive for t = {t}")));
    }
    require(c > 0.0, "C", "must be positive")?;
    let lt = (t as f64).ln();
    Ok(c * ell as f64 * lt / lt.ln())
}
