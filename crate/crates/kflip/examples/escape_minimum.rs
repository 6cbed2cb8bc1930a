//! Location of the escape-time minimum in the flip fraction rho = k/N:
//! exact integer argmin against the drift/diffusion balance estimate, as a
//! function of the inverse temperature.
//!
//! Run: cargo run --release --example escape_minimum

use kflip::escape::escape_estimate;
use kflip::model::{h_star, GameParams, NoiseKind, NoiseModel};
use kflip::numeric::linspace;

fn main() {
    let n = 80;
    let gamma = 0.8;
    println!("N = {n}, H = {gamma} H*(beta)");
    println!(
        "{:>6} {:>9} {:>10} {:>10} {:>12} {:>9}",
        "beta", "phi_mid", "k*_exact", "rho_exact", "rho_estim", "gap"
    );
    for beta in linspace(1.6, 3.0, 8) {
        let hs = h_star(beta, 1.0, NoiseKind::Gumbel).unwrap();
        let params =
            GameParams::new(n, 1, 1.0, gamma * hs, NoiseModel::gumbel(beta).unwrap()).unwrap();
        match escape_estimate(&params) {
            Ok(est) => println!(
                "{beta:>6.3} {:>9.4} {:>10} {:>10.4} {:>12.4} {:>9.4}",
                est.phi_mid,
                est.k_min_exact,
                est.rho_min_exact,
                est.rho_min_estimated,
                (est.rho_min_estimated - est.rho_min_exact).abs()
            ),
            Err(e) => println!("{beta:>6.3}  {e}"),
        }
    }
}
