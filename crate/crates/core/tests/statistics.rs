use barracuda_core::engine::mean_stderr;
use barracuda_core::theory::{e_jir_expectation, exact_chain_probability, nakamoto_lower_bound};
use barracuda_core::{
    estimate_shape_pmf, estimate_throughput, BlockId, DelayModel, PollingVariant, SimConfig, Simulator, SnapshotPolicy,
    TreeShape,
};

fn config(n: u32, t: u32, ell: u32, delta: f64, trials: u32) -> SimConfig {
    SimConfig { n, t, ell, delay: DelayModel::homogeneous(delta), trials, seed: 2024, ..SimConfig::default() }
}

fn chain_frequency(cfg: &SimConfig) -> f64 {
    let pmf = estimate_shape_pmf(cfg).unwrap();
    let chain =
        TreeShape((1..=cfg.t).map(|e| if e == 1 { BlockId::Genesis } else { BlockId::new(e - 1, 1) }).collect());
    pmf.probability(&chain)
}

fn binomial_sigma(p: f64, n: u32) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn perfect_chain_frequency_matches_product_formula() {
    for (t, ell, delta) in [(3, 1, 1.0), (4, 1, 2.0), (3, 2, 1.0)] {
        let trials = 50_000;
        let cfg = config(10_000, t, ell, delta, trials);
        let p = exact_chain_probability(t, ell, delta, 0.0).unwrap();
        let f = chain_frequency(&cfg);
        assert!((f - p).abs() <= 3.0 * binomial_sigma(p, trials), "({t},{ell},{delta}): {f} vs {p}");
    }
}

#[test]
fn election_time_views_match_product_formula_with_waiting() {
    let trials = 50_000;
    let mut cfg = config(10_000, 3, 2, 1.0, trials);
    cfg.wait = 0.3;
    cfg.snapshot = SnapshotPolicy::Election;
    let p = exact_chain_probability(3, 2, 1.0, 0.3).unwrap();
    let f = chain_frequency(&cfg);
    assert!((f - p).abs() <= 3.0 * binomial_sigma(p, trials), "{f} vs {p}");
}

#[test]
fn reception_indicator_matches_closed_form() {
    // Does some polled node (proposer included) hold block r when block j polls?
    let (ell, delta, wait) = (2, 1.0, 0.2);
    let mut cfg = config(10_000, 5, ell, delta, 25_000);
    cfg.wait = wait;
    cfg.snapshot = SnapshotPolicy::Election;
    let sim = Simulator::new(cfg.clone()).unwrap();
    let mut hits = [0u64; 3];
    let mut seen = [0u64; 3];
    for trial in 0..cfg.trials as u64 {
        sim.run_trial_observed(trial, |rec| {
            let j = rec.id.epoch().unwrap();
            for gap in 1..=3u32 {
                if j > gap {
                    let r = (j - gap - 1) as usize;
                    seen[gap as usize - 1] += 1;
                    hits[gap as usize - 1] += rec.received[r] as u64;
                }
            }
        });
    }
    for gap in 1..=3 {
        let p = e_jir_expectation(gap as f64, 0.0, wait, ell, delta).unwrap();
        let n = seen[gap - 1];
        let f = hits[gap - 1] as f64 / n as f64;
        assert!(n >= 50_000);
        assert!((f - p).abs() <= 3.0 * (p * (1.0 - p) / n as f64).sqrt(), "gap {gap}: {f} vs {p} over {n}");
    }
}

#[test]
fn delay_and_polling_trade_one_for_one() {
    let base = estimate_throughput(&config(10_000, 50, 1, 1.0, 200)).unwrap();
    for m in [2u32, 4] {
        let est = estimate_throughput(&config(10_000, 50, m, m as f64, 200)).unwrap();
        assert!(
            (est.mean - base.mean).abs() <= 3.0 * est.pooled_stderr(&base),
            "ell={m}: {} vs {}",
            est.mean,
            base.mean
        );
    }
}

#[test]
fn shape_law_collapses_under_rescaling() {
    let a = estimate_shape_pmf(&config(10_000, 3, 1, 1.0, 50_000)).unwrap();
    let b = estimate_shape_pmf(&config(10_000, 3, 2, 2.0, 50_000)).unwrap();
    let tv = a.total_variation(&b);
    assert!(tv <= 0.02, "tv = {tv}");
}

#[test]
fn throughput_respects_nakamoto_bound() {
    for delta in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let est = estimate_throughput(&config(2000, 50, 1, delta, 400)).unwrap();
        let bound = nakamoto_lower_bound(delta).unwrap();
        assert!(est.mean >= bound - 3.0 * est.stderr, "delta={delta}: {} < {bound}", est.mean);
    }
}

#[test]
fn bound_is_tight_for_small_delay() {
    let est = estimate_throughput(&config(2000, 50, 1, 0.1, 400)).unwrap();
    let bound = nakamoto_lower_bound(0.1).unwrap();
    assert!((est.mean - bound).abs() <= 0.02, "{} vs {bound}", est.mean);
}

#[test]
fn throughput_falls_with_delay_and_rises_with_polling() {
    let at = |ell, delta| estimate_throughput(&config(2000, 50, ell, delta, 200)).unwrap().mean;
    let by_delay: Vec<f64> = [0.25, 1.0, 4.0].iter().map(|&d| at(1, d)).collect();
    assert!(by_delay.windows(2).all(|w| w[0] > w[1]), "{by_delay:?}");
    let by_ell: Vec<f64> = [1, 2, 4].iter().map(|&l| at(l, 2.0)).collect();
    assert!(by_ell.windows(2).all(|w| w[0] < w[1]), "{by_ell:?}");
}

#[test]
fn delayed_variants_cost_throughput_against_instant() {
    let mut cfg = config(2000, 50, 4, 1.0, 200);
    let instant = estimate_throughput(&cfg).unwrap().mean;
    cfg.polling = PollingVariant::WaitAll { response_mean: 0.3 };
    let wait_all = estimate_throughput(&cfg).unwrap().mean;
    assert!(wait_all < instant, "{wait_all} vs {instant}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let sim = Simulator::new(config(500, 30, 3, 1.5, 64)).unwrap();
    let run =
        |threads| rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| sim.chain_lengths());
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(7));
}

#[test]
fn stderr_helper_matches_textbook_formula() {
    let (m, s) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
    assert_eq!(m, 2.5);
    assert!((s - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-12);
}
