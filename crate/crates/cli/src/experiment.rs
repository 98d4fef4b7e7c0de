//! Running experiment files: sweeps, threshold searches and single-setting
//! simulations, each written as CSV and optionally plotted.

use std::path::{Path, PathBuf};

use barracuda_core::{delta_at_threshold, SimConfig, Simulator, SweepRow, SweepTable};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::Result;
use crate::figure::{render_figure, FigureSpec, SeriesBy, XAxis, YMetric};
use crate::table::{write_csv, Delta80Row, ShapeRow, TrialRow};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Apply the file's `[full]` overrides.
    pub full: bool,
    pub seed: Option<u64>,
    /// Replaces `output.dir`.
    pub output_dir: Option<PathBuf>,
    /// Replaces the file's `kind`.
    pub kind: Option<ExperimentKind>,
}

/// Load, validate and run an experiment file; returns the files written.
pub fn run_experiment(path: &Path, options: &RunOptions) -> Result<Vec<PathBuf>> {
    let cfg = ExperimentConfig::load(path)?;
    run_config(&cfg, options)
}

pub fn run_config(cfg: &ExperimentConfig, options: &RunOptions) -> Result<Vec<PathBuf>> {
    let cfg = cfg.at_scale(options.full, options.seed);
    let dir = options.output_dir.clone().unwrap_or_else(|| cfg.output.dir.clone());
    let kind = options.kind.unwrap_or(cfg.kind);
    match kind {
        ExperimentKind::Sweep => sweep(&cfg, &dir),
        ExperimentKind::Delta80 => delta80(&cfg, &dir),
        ExperimentKind::Simulate => simulate(&cfg, &dir),
    }
}

fn template(cfg: &ExperimentConfig, polling: &barracuda_core::PollingVariant) -> SimConfig {
    SimConfig { polling: polling.clone(), ..cfg.model.clone() }
}

fn sweep(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let series = cfg.series();
    let mut rows: Vec<SweepRow> = Vec::new();
    for s in &series {
        let label = s.label();
        let table = SweepTable::run(&template(cfg, &s.polling), &cfg.sweep.deltas, &cfg.sweep.ells, |row| {
            log::info!(
                "{} [{label}] delta={} ell={}: {:.4} ± {:.4}",
                cfg.name,
                row.delta,
                row.ell,
                row.mean_throughput,
                row.stderr
            )
        })?;
        rows.extend(table.rows.into_iter().map(|r| SweepRow { variant: label.clone(), ..r }));
    }
    let csv = dir.join(format!("{}.csv", cfg.name));
    write_csv(&csv, &rows)?;
    let mut files = vec![csv.clone()];
    if cfg.output.plot {
        let by = if series.len() > 1 { SeriesBy::EllVariant } else { SeriesBy::Ell };
        for rescale in [false, true] {
            let suffix = if rescale { "_rescaled" } else { "" };
            let spec = FigureSpec {
                title: cfg.name.clone(),
                x: XAxis::Delta,
                rescale,
                log_x: true,
                y: YMetric::Throughput,
                series: by,
                inputs: vec![csv.clone()],
                output: dir.join(format!("{}{suffix}.svg", cfg.name)),
            };
            files.push(render_figure(&spec)?);
        }
    }
    Ok(files)
}

fn delta80(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let settings = cfg.search.settings();
    let mut rows = Vec::new();
    for s in cfg.series() {
        let label = s.label();
        let base = template(cfg, &s.polling);
        for &ell in &cfg.sweep.ells {
            let found = delta_at_threshold(ell, &base, &settings)?;
            log::info!(
                "{} [{label}] ell={ell}: delta_{} = {:.4} ± {:.4} ({} probes)",
                cfg.name,
                settings.threshold,
                found.delta,
                found.stderr,
                found.probes
            );
            rows.push(Delta80Row {
                ell,
                variant: label.clone(),
                n: base.n,
                k: base.k,
                t: base.t,
                trials: base.trials,
                threshold: settings.threshold,
                delta80: found.delta,
                stderr: found.stderr,
                replicates: settings.replicates,
                probes: found.probes,
            });
        }
    }
    let csv = dir.join(format!("{}.csv", cfg.name));
    write_csv(&csv, &rows)?;
    let mut files = vec![csv.clone()];
    if cfg.output.plot {
        let spec = FigureSpec {
            title: cfg.name.clone(),
            x: XAxis::Ell,
            rescale: false,
            log_x: false,
            y: YMetric::Delta80,
            series: SeriesBy::Variant,
            inputs: vec![csv],
            output: dir.join(format!("{}.svg", cfg.name)),
        };
        files.push(render_figure(&spec)?);
    }
    Ok(files)
}

fn simulate(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let sim = Simulator::new(cfg.model.clone())?;
    let t = cfg.model.t as f64;
    let trials: Vec<TrialRow> = (0..cfg.model.trials as u64)
        .into_par_iter()
        .map(|i| {
            let r = sim.run_trial(i);
            TrialRow {
                trial: i,
                longest_chain: r.longest_chain,
                throughput: r.longest_chain as f64 / t,
                shape_code: r.shape.to_string(),
            }
        })
        .collect();
    let mut counts = std::collections::BTreeMap::new();
    for row in &trials {
        *counts.entry(row.shape_code.as_str()).or_insert(0u64) += 1;
    }
    let total = trials.len() as f64;
    let shapes: Vec<ShapeRow> = counts
        .into_iter()
        .map(|(code, count)| ShapeRow { shape_code: code.to_string(), count, probability: count as f64 / total })
        .collect();
    let trials_csv = dir.join(format!("{}_trials.csv", cfg.name));
    let shapes_csv = dir.join(format!("{}_shapes.csv", cfg.name));
    write_csv(&trials_csv, &trials)?;
    write_csv(&shapes_csv, &shapes)?;
    log::info!("{}: {} trials, {} distinct shapes", cfg.name, trials.len(), shapes.len());
    Ok(vec![trials_csv, shapes_csv])
}
