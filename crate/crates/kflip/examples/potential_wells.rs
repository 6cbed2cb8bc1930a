//! Effective potential V = -ln pi of the exact chain for several flip
//! counts k, compared with the continuum (drift-diffusion) potential: well
//! positions and the escape barrier seen from the metastable side.
//!
//! Run: cargo run --release --example potential_wells

use kflip::chain::{potential_from_pi, stationary_distribution};
use kflip::model::{fp_potential, h_star, trajectory_endpoints, GameParams, NoiseKind, NoiseModel};
use kflip::numeric::linspace;
use kflip::transition::build_transition_matrix;

fn main() {
    let n = 100;
    let beta = 1.9;
    let gamma = 0.8;
    let hs = h_star(beta, 1.0, NoiseKind::Gumbel).unwrap();
    let base = GameParams::new(n, 1, 1.0, gamma * hs, NoiseModel::gumbel(beta).unwrap()).unwrap();
    let ep = trajectory_endpoints(&base, gamma).unwrap();
    println!(
        "N = {n}, beta = {beta}, H = {gamma} H*  (meta {} / saddle region / stable {})",
        ep.i_meta, ep.i_stable
    );

    println!(
        "{:>5} {:>12} {:>12} {:>14}",
        "k", "V(meta)", "barrier", "V(stable)"
    );
    for k in [1usize, 10, 50, 100] {
        let params = base.with_k(k).unwrap();
        let omega = build_transition_matrix(&params).unwrap();
        let dist = stationary_distribution(&omega).unwrap();
        let v = potential_from_pi(&dist);
        // Barrier: highest point between the wells, relative to the
        // metastable well bottom.
        let saddle = (ep.i_meta..=ep.i_stable)
            .map(|i| v[i])
            .fold(f64::NEG_INFINITY, f64::max);
        println!(
            "{k:>5} {:>12.4} {:>12.4} {:>14.4}",
            v[ep.i_meta],
            saddle - v[ep.i_meta],
            v[ep.i_stable]
        );
    }

    let grid = linspace(0.005, 0.995, 199);
    let v = fp_potential(&base, &grid).unwrap();
    let (arg, _) =
        v.iter().enumerate().fold(
            (0, f64::INFINITY),
            |acc, (i, &x)| if x < acc.1 { (i, x) } else { acc },
        );
    println!(
        "\ncontinuum potential: global minimum at phi = {:.3} (stable state {} / N = {:.3})",
        grid[arg],
        ep.i_stable,
        ep.i_stable as f64 / n as f64
    );
}
