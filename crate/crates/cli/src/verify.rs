//! Built-in numerical checks of the simulator against closed forms, each
//! with a fixed budget.

use std::fmt;

use barracuda_core::theory::{balls_in_bins_bound, exact_chain_probability, nakamoto_lower_bound, BinSampling};
use barracuda_core::{
    delta_at_threshold, estimate_shape_pmf, estimate_throughput, BlockId, DelayModel, SearchSettings, SimConfig,
    TreeShape,
};

use crate::balls::balls_in_bins_rows;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Check {
    /// Throughput against the Nakamoto lower bound, and its tightness.
    Theorem1,
    /// Throughput invariance under (Δ, ℓ) → (mΔ, mℓ).
    Collapse,
    /// Perfect-chain frequency against the product formula.
    Exactchain,
    /// Shape-distribution distance under the same rescaling.
    Tvshape,
    /// Δ₀.₈ grows linearly in ℓ.
    Delta80,
    /// Max-loaded ℓ-choice loads against the high-probability bound.
    Ballsbins,
}

impl Check {
    pub const ALL: [Check; 6] =
        [Check::Theorem1, Check::Collapse, Check::Exactchain, Check::Tvshape, Check::Delta80, Check::Ballsbins];

    pub fn name(self) -> &'static str {
        match self {
            Check::Theorem1 => "theorem1",
            Check::Collapse => "collapse",
            Check::Exactchain => "exactchain",
            Check::Tvshape => "tvshape",
            Check::Delta80 => "delta80",
            Check::Ballsbins => "ballsbins",
        }
    }
}

/// One measured quantity and its verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub check: &'static str,
    pub name: String,
    pub measured: f64,
    /// Human-readable acceptance region, e.g. `>= 0.81 (bound - 3 se)`.
    pub required: String,
    pub passed: bool,
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}: measured {:.6}, required {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.check,
            self.name,
            self.measured,
            self.required
        )
    }
}

pub const DEFAULT_SEED: u64 = 20_190_101;

fn homogeneous(n: u32, t: u32, ell: u32, delta: f64, trials: u32, seed: u64) -> SimConfig {
    SimConfig { n, t, ell, delay: DelayModel::homogeneous(delta), trials, seed, ..SimConfig::default() }
}

pub fn run_check(check: Check, seed: u64) -> Result<Vec<Assertion>> {
    match check {
        Check::Theorem1 => theorem1(seed),
        Check::Collapse => collapse(seed),
        Check::Exactchain => exact_chain(seed),
        Check::Tvshape => tv_shape(seed),
        Check::Delta80 => delta80(seed),
        Check::Ballsbins => balls_bins(seed),
    }
}

/// n = 2000, t = 50, 400 trials per Δ.
pub fn theorem1(seed: u64) -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    for delta in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let est = estimate_throughput(&homogeneous(2000, 50, 1, delta, 400, seed))?;
        let bound = nakamoto_lower_bound(delta)?;
        let floor = bound - 3.0 * est.stderr;
        out.push(Assertion {
            check: "theorem1",
            name: format!("bound delta={delta}"),
            measured: est.mean,
            required: format!(">= {floor:.6} (bound {bound:.6} - 3 se)"),
            passed: est.mean >= floor,
        });
    }
    let est = estimate_throughput(&homogeneous(2000, 50, 1, 0.1, 400, seed))?;
    let bound = nakamoto_lower_bound(0.1)?;
    out.push(Assertion {
        check: "theorem1",
        name: "tight delta=0.1".into(),
        measured: est.mean,
        required: format!("within 0.02 of {bound:.6}"),
        passed: (est.mean - bound).abs() <= 0.02,
    });
    Ok(out)
}

/// n = 10⁴, t = 50, k = 1, 200 trials per cell.
pub fn collapse(seed: u64) -> Result<Vec<Assertion>> {
    let base = estimate_throughput(&homogeneous(10_000, 50, 1, 1.0, 200, seed))?;
    let mut out = Vec::new();
    for m in [2u32, 4] {
        let est = estimate_throughput(&homogeneous(10_000, 50, m, m as f64, 200, seed))?;
        let tol = 3.0 * est.pooled_stderr(&base);
        out.push(Assertion {
            check: "collapse",
            name: format!("delta={m} ell={m} vs delta=1 ell=1"),
            measured: est.mean - base.mean,
            required: format!("|diff| <= {tol:.6} (3 pooled se; base {:.6})", base.mean),
            passed: (est.mean - base.mean).abs() <= tol,
        });
    }
    Ok(out)
}

fn perfect_chain(t: u32) -> TreeShape {
    TreeShape((1..=t).map(|e| if e == 1 { BlockId::Genesis } else { BlockId::new(e - 1, 1) }).collect())
}

/// n = 10⁴, k = 1, no waiting, 10⁵ trials per case.
pub fn exact_chain(seed: u64) -> Result<Vec<Assertion>> {
    let trials = 100_000;
    let mut out = Vec::new();
    for (t, ell, delta) in [(3, 1, 1.0), (4, 1, 2.0), (3, 2, 1.0)] {
        let p = exact_chain_probability(t, ell, delta, 0.0)?;
        let pmf = estimate_shape_pmf(&homogeneous(10_000, t, ell, delta, trials, seed))?;
        let freq = pmf.probability(&perfect_chain(t));
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        out.push(Assertion {
            check: "exactchain",
            name: format!("t={t} ell={ell} delta={delta}"),
            measured: freq,
            required: format!("within {:.6} (3 sigma) of {p:.6}", 3.0 * sigma),
            passed: (freq - p).abs() <= 3.0 * sigma,
        });
    }
    Ok(out)
}

/// t = 3, 10⁵ trials per law.
pub fn tv_shape(seed: u64) -> Result<Vec<Assertion>> {
    let a = estimate_shape_pmf(&homogeneous(10_000, 3, 1, 1.0, 100_000, seed))?;
    let b = estimate_shape_pmf(&homogeneous(10_000, 3, 2, 2.0, 100_000, seed.wrapping_add(1)))?;
    let tv = a.total_variation(&b);
    Ok(vec![Assertion {
        check: "tvshape",
        name: "t=3 (delta=2, ell=2) vs (delta=1, ell=1)".into(),
        measured: tv,
        required: "<= 0.02".into(),
        passed: tv <= 0.02,
    }])
}

/// Instant polling at n = 2000, t = 50, 200 trials per probe.
pub fn delta80(seed: u64) -> Result<Vec<Assertion>> {
    let template = homogeneous(2000, 50, 1, 1.0, 200, seed);
    let settings = SearchSettings::default();
    let one = delta_at_threshold(1, &template, &settings)?;
    let four = delta_at_threshold(4, &template, &settings)?;
    let ratio = four.delta / one.delta;
    Ok(vec![Assertion {
        check: "delta80",
        name: format!("ratio ell=4/ell=1 ({:.4}/{:.4})", four.delta, one.delta),
        measured: ratio,
        required: "in [3.4, 4.6]".into(),
        passed: (3.4..=4.6).contains(&ratio),
    }])
}

/// t = 10⁴ balls and bins, 1000 runs per ℓ ∈ {1, 2, 4, 8}.
pub fn balls_bins(seed: u64) -> Result<Vec<Assertion>> {
    let (t, runs) = (10_000u32, 1000u32);
    let ells = [1u32, 2, 4, 8];
    let rows = balls_in_bins_rows(t, &ells, runs, BinSampling::WithoutReplacement, seed)?;
    let mut means = Vec::new();
    let mut out = Vec::new();
    let p0 = 1.0 / t as f64;
    let sigma = (p0 * (1.0 - p0) / runs as f64).sqrt();
    for &ell in &ells {
        let loads: Vec<u32> = rows.iter().filter(|r| r.ell == ell).map(|r| r.max_load).collect();
        let bound = balls_in_bins_bound(t, ell, 6.0)?;
        let exceed = loads.iter().filter(|&&l| l as f64 > bound).count() as f64 / runs as f64;
        out.push(Assertion {
            check: "ballsbins",
            name: format!("exceedance ell={ell} (bound {bound:.3})"),
            measured: exceed,
            required: format!("<= {:.6} (1/t + 3 sigma)", p0 + 3.0 * sigma),
            passed: exceed <= p0 + 3.0 * sigma,
        });
        means.push(loads.iter().map(|&l| l as f64).sum::<f64>() / runs as f64);
    }
    let monotone = means.windows(2).all(|w| w[1] >= w[0]);
    out.push(Assertion {
        check: "ballsbins",
        name: format!("mean max load non-decreasing {means:?}"),
        measured: means.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min),
        required: "every step >= 0".into(),
        passed: monotone,
    });
    let ratio = means[3] / means[0];
    out.push(Assertion {
        check: "ballsbins",
        name: "mean ratio ell=8/ell=1".into(),
        measured: ratio,
        required: "in [4, 12]".into(),
        passed: (4.0..=12.0).contains(&ratio),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assertion_lines_are_greppable() {
        let a = Assertion {
            check: "theorem1",
            name: "bound delta=1".into(),
            measured: 0.5,
            required: ">= 0.4".into(),
            passed: true,
        };
        assert_eq!(a.to_string(), "PASS theorem1 bound delta=1: measured 0.500000, required >= 0.4");
    }

    #[test]
    fn every_check_has_a_distinct_name() {
        let names: Vec<&str> = Check::ALL.iter().map(|c| c.name()).collect();
        assert_eq!(names, ["theorem1", "collapse", "exactchain", "tvshape", "delta80", "ballsbins"]);
    }
}
