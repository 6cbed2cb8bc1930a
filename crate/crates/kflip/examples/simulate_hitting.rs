//! Seed-reproducible Monte Carlo escape times against the exact chain
//! values: sample mean and variance with their pulls, plus the shape of the
//! hitting-time histogram.
//!
//! Run: cargo run --release --example simulate_hitting

use kflip::chain::hitting_times_linear_solve;
use kflip::model::{h_star, trajectory_endpoints, GameParams, NoiseKind, NoiseModel};
use kflip::montecarlo::{run_batch, RunConfig};
use kflip::transition::build_transition_matrix;

fn main() {
    let n = 60;
    let beta = 1.9;
    let gamma = 0.8;
    let samples = 3000;
    let hs = h_star(beta, 1.0, NoiseKind::Gumbel).unwrap();
    let base = GameParams::new(n, 1, 1.0, gamma * hs, NoiseModel::gumbel(beta).unwrap()).unwrap();
    let ep = trajectory_endpoints(&base, gamma).unwrap();
    println!(
        "N = {n}, beta = {beta}, H = {gamma} H*, {} -> {}, {samples} samples per k\n",
        ep.i_meta, ep.i_stable
    );

    println!(
        "{:>4} {:>12} {:>12} {:>7} {:>12} {:>12}",
        "k", "T_chain", "T_sim", "pull", "sd_chain", "sd_sim"
    );
    for k in [1usize, 5, 20, 60] {
        let params = base.with_k(k).unwrap();
        let omega = build_transition_matrix(&params).unwrap();
        let hit = hitting_times_linear_solve(&omega, ep.i_stable).unwrap();
        let t = hit.mean[ep.i_meta];
        let sd = (hit.second_moment[ep.i_meta] - t * t).sqrt();

        let config = RunConfig::new(params, ep.i_meta, ep.i_stable, samples, 2024).unwrap();
        let summary = run_batch(&config).unwrap();
        println!(
            "{k:>4} {t:>12.4e} {:>12.4e} {:>7.2} {sd:>12.4e} {:>12.4e}",
            summary.mean,
            (summary.mean - t) / summary.std_error,
            summary.variance.sqrt(),
        );
    }

    // Histogram of the k = 1 batch on log-spaced bins.
    let config = RunConfig::new(base, ep.i_meta, ep.i_stable, samples, 2024).unwrap();
    let summary = run_batch(&config).unwrap();
    println!("\nk = 1 histogram (log-spaced bins):");
    let max = *summary.histogram.counts.iter().max().unwrap() as f64;
    for (idx, &count) in summary.histogram.counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let bar = "#".repeat((50.0 * count as f64 / max).ceil() as usize);
        println!(
            "{:>10.0} .. {:>10.0} | {bar}",
            summary.histogram.edges[idx],
            summary.histogram.edges[idx + 1]
        );
    }
    let median = summary.samples[summary.samples.len() / 2];
    println!(
        "\nmean/median = {:.2} (right skew), censored = {}",
        summary.mean / median as f64,
        summary.n_censored
    );
}
