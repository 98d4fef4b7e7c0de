//! Batch runs of the max-loaded ℓ-choice process.

use barracuda_core::rng::{stream, Purpose};
use barracuda_core::theory::{balls_in_bins_bound, balls_in_bins_max_load, BinSampling};
use rayon::prelude::*;

use crate::error::Result;
use crate::table::BallsRow;

/// `runs` independent runs per `ell`, in `(ell, run)` order. Run `r` of a
/// given `ell` draws from its own stream, so results do not depend on
/// which other `ell` values are requested.
pub fn balls_in_bins_rows(t: u32, ells: &[u32], runs: u32, sampling: BinSampling, seed: u64) -> Result<Vec<BallsRow>> {
    let mut rows = Vec::with_capacity(ells.len() * runs as usize);
    for &ell in ells {
        let bound = balls_in_bins_bound(t, ell, 6.0)?;
        let loads = (0..runs)
            .into_par_iter()
            .map(|run| {
                let mut rng = stream(seed, Purpose::BallsInBins, (u64::from(ell) << 32) | u64::from(run));
                balls_in_bins_max_load(t, ell, sampling, &mut rng)
            })
            .collect::<Result<Vec<u32>, _>>()?;
        rows.extend(loads.into_iter().enumerate().map(|(run, max_load)| BallsRow {
            t,
            ell,
            run: run as u32,
            max_load,
            bound_c6: bound,
        }));
    }
    Ok(rows)
}
