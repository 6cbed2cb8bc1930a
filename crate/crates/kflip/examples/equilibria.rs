//! Equilibrium structure of the adoption fraction across temperatures:
//! Curie-Weiss fixed points, the spinodal field H* and magnetization phi*,
//! and the regime classification.
//!
//! Run: cargo run --release --example equilibria

use kflip::model::{h_star, phi_star, solve_equilibria, GameParams, NoiseKind, NoiseModel};

fn main() {
    println!("Gumbel noise, J = 1, H = 0.8 H* (once H* exists)");
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}  regime",
        "beta", "H*", "phi*", "phi-", "phi0", "phi+"
    );
    for beta in [0.6, 0.9, 1.1, 1.5, 1.9, 2.5, 3.0] {
        let (h, hs, ps) = match h_star(beta, 1.0, NoiseKind::Gumbel) {
            Ok(hs) => (0.8 * hs, Some(hs), phi_star(beta, 1.0).ok()),
            Err(_) => (0.0, None, None),
        };
        let params = GameParams::new(100, 1, 1.0, h, NoiseModel::gumbel(beta).unwrap()).unwrap();
        let eq = solve_equilibria(&params);
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.6}"));
        println!(
            "{beta:>6.2} {:>10} {:>10} {:>10} {:>10} {:>10.6}  {:?}",
            opt(hs),
            opt(ps),
            opt(eq.phi_minus),
            opt(eq.phi_zero),
            eq.phi_plus,
            eq.regime,
        );
    }

    // The normal-noise variant has its own critical point at
    // beta J = sqrt(pi)/2 ~ 0.8862.
    println!("\nNormal noise near its critical point:");
    let beta_crit = std::f64::consts::PI.sqrt() / 2.0;
    for beta in [0.85, beta_crit, 0.95, 1.4] {
        match h_star(beta, 1.0, NoiseKind::Normal) {
            Ok(hs) => println!("  beta = {beta:.6}: H* = {hs:.6}"),
            Err(e) => println!("  beta = {beta:.6}: {e}"),
        }
    }
}
