//! Two-regime phase map in the (beta, gamma) plane: '+' cells have an
//! interior escape-time minimum (the time grows again toward k = N), '-'
//! cells are monotone decreasing in k, '.' cells have no metastable state.
//!
//! Run: cargo run --release --example phase_map

use kflip::escape::{phase_diagram, PhaseDiagramSpec, PhasePlane};
use kflip::model::NoiseKind;
use kflip::numeric::linspace;

fn main() {
    let betas = linspace(1.4, 3.0, 17);
    let gammas = linspace(0.70, 0.95, 11);
    let spec = PhaseDiagramSpec {
        betas: betas.clone(),
        plane: PhasePlane::BetaGamma {
            n_agents: 60,
            gammas: gammas.clone(),
        },
        coupling: 1.0,
        noise_kind: NoiseKind::Gumbel,
    };
    let grid = phase_diagram(&spec);

    println!("N = 60, ln[T(k=N)/T(k=N-1)] sign over (beta, gamma)\n");
    print!("{:>6} ", "");
    for gamma in &gammas {
        print!("{gamma:>6.2}");
    }
    println!("  <- gamma");
    for (bi, beta) in betas.iter().enumerate() {
        print!("{beta:>6.2} ");
        for gi in 0..gammas.len() {
            let mark = match grid.log_ratio[bi * gammas.len() + gi] {
                Some(v) if v > 0.0 => '+',
                Some(_) => '-',
                None => '.',
            };
            print!("{mark:>6}");
        }
        println!();
    }
    println!("\n'+' minimum exists, '-' monotone decrease, '.' outside the hysteresis regime");
}
