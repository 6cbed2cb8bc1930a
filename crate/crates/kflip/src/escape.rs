//! Restoring-force versus diffusion analysis of the escape from the
//! metastable state: the intermediate point phi_mid, the continuous-k
//! estimate of the escape-time minimum, exact integer argmin sweeps, and the
//! two-regime phase diagram.

use rayon::prelude::*;

use crate::chain::{hitting_curve, hitting_times_linear_solve};
use crate::error::{Error, Result};
use crate::model::{h_star, p_plus, solve_equilibria, GameParams, NoiseKind, NoiseModel};
use crate::numeric::golden_section_max;
use crate::transition::{build_transition_matrix, step_moment_k_derivatives_with_k};

/// Point between the metastable state and the saddle where the magnitude of
/// the restoring drift |<dphi>| is maximal. The k/N prefactor cancels in the
/// argmax, so the result depends only on (beta, J, H).
pub fn phi_mid(params: &GameParams) -> Result<f64> {
    let eq = solve_equilibria(params);
    let lo = eq.phi_minus.ok_or(Error::NoMetastableState)?;
    let hi = eq.phi_zero.ok_or(Error::NoMetastableState)?;
    let force = |phi: f64| (p_plus(params, phi) - phi).abs();

    // Bracket scan, then golden section inside the best bracket.
    const SCAN: usize = 256;
    let mut best_idx = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=SCAN {
        let phi = lo + (hi - lo) * i as f64 / SCAN as f64;
        let f = force(phi);
        if f > best {
            best = f;
            best_idx = i;
        }
    }
    let step = (hi - lo) / SCAN as f64;
    let a = lo + step * best_idx.saturating_sub(1) as f64;
    let b = (lo + step * (best_idx + 1) as f64).min(hi);
    Ok(golden_section_max(force, a, b, 1e-10))
}

/// Continuous-k estimate of the escape-time minimum from the balance of the
/// k-derivatives of restoring drift and step-length deviation at phi_mid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KminEstimate {
    pub phi_mid: f64,
    /// Smallest k in [1, N] balancing the two derivatives; N when no
    /// balance point exists.
    pub k_min: f64,
    /// k_min / N; exactly 1 in the no-minimum regime.
    pub rho_min: f64,
}

/// Solves -d<dphi>/dk = d sigma/dk at phi = phi_mid for continuous
/// k in [1, N] by bisection (tolerance 1e-8 in k), taking the smallest root
/// when several exist. No sign change on [1, N] means the no-minimum
/// regime: rho_min = 1.
pub fn estimate_k_min(params: &GameParams) -> Result<KminEstimate> {
    let mid = phi_mid(params)?;
    let n = params.n_agents as f64;
    let balance = |k: f64| -> Result<f64> {
        let d = step_moment_k_derivatives_with_k(params, k, mid)?;
        Ok(-d.d_mean_dk - d.d_sigma_dk)
    };

    const SCAN: usize = 1024;
    let mut prev_k = 1.0;
    let mut prev = balance(prev_k)?;
    let mut root = None;
    if prev == 0.0 {
        root = Some(1.0);
    } else {
        for i in 1..=SCAN {
            let k = 1.0 + (n - 1.0) * i as f64 / SCAN as f64;
            let cur = balance(k)?;
            if cur == 0.0 {
                root = Some(k);
                break;
            }
            if prev.signum() != cur.signum() {
                let f = |k: f64| balance(k).unwrap_or(f64::NAN);
                root = Some(crate::numeric::bisect(f, prev_k, k, 1e-8));
                break;
            }
            prev_k = k;
            prev = cur;
        }
    }

    let (k_min, rho_min) = match root {
        Some(k) => (k, k / n),
        None => (n, 1.0),
    };
    Ok(KminEstimate {
        phi_mid: mid,
        k_min,
        rho_min,
    })
}

/// Exact integer argmin of the mean hitting time over k = 1..=N.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactRhoMin {
    pub k_min: usize,
    pub rho_min: f64,
    /// T(start -> target) for k = 1..=N.
    pub mean_times: Vec<f64>,
}

/// Computes T_(start,target)(k) for every k and returns the argmin, ties
/// broken toward smaller k.
pub fn exact_rho_min(params: &GameParams, start: usize, target: usize) -> Result<ExactRhoMin> {
    let curve = hitting_curve(params, start, target)?;
    let mut k_min = 1;
    let mut best = curve.t_mean[0];
    for (idx, &t) in curve.t_mean.iter().enumerate() {
        if t < best {
            best = t;
            k_min = idx + 1;
        }
    }
    Ok(ExactRhoMin {
        k_min,
        rho_min: k_min as f64 / params.n_agents as f64,
        mean_times: curve.t_mean,
    })
}

/// Combined estimate/exact summary for one parameter point (the field of
/// `params` must already be set, e.g. to gamma * H*).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeEstimate {
    pub phi_mid: f64,
    pub k_min_estimated: f64,
    pub rho_min_estimated: f64,
    pub k_min_exact: usize,
    pub rho_min_exact: f64,
}

/// Runs both the continuous-k estimate and the exact sweep for the
/// metastable -> stable trajectory of this parameter point.
pub fn escape_estimate(params: &GameParams) -> Result<EscapeEstimate> {
    let estimate = estimate_k_min(params)?;
    let eq = solve_equilibria(params);
    let phi_minus = eq.phi_minus.ok_or(Error::NoMetastableState)?;
    let n = params.n_agents as f64;
    let start = (phi_minus * n).round() as usize;
    let target = (eq.phi_plus * n).round() as usize;
    let exact = exact_rho_min(params, start, target)?;
    Ok(EscapeEstimate {
        phi_mid: estimate.phi_mid,
        k_min_estimated: estimate.k_min,
        rho_min_estimated: estimate.rho_min,
        k_min_exact: exact.k_min,
        rho_min_exact: exact.rho_min,
    })
}

/// Second axis of a phase-diagram grid.
#[derive(Debug, Clone)]
pub enum PhasePlane {
    /// gamma on the second axis at fixed N.
    BetaGamma { n_agents: usize, gammas: Vec<f64> },
    /// N on the second axis at fixed gamma.
    BetaN { gamma: f64, n_agents: Vec<usize> },
}

/// Grid specification for [`phase_diagram`].
#[derive(Debug, Clone)]
pub struct PhaseDiagramSpec {
    pub betas: Vec<f64>,
    pub plane: PhasePlane,
    pub coupling: f64,
    pub noise_kind: NoiseKind,
}

/// End-slope indicator grid. `log_ratio` is row-major over
/// (beta index, second-axis index); cells outside the three-root regime (or
/// failing numerically) are `None`.
#[derive(Debug, Clone)]
pub struct PhaseDiagram {
    pub betas: Vec<f64>,
    /// gamma values, or N values as f64, matching the plane.
    pub other_axis: Vec<f64>,
    pub log_ratio: Vec<Option<f64>>,
}

fn end_slope_cell(
    beta: f64,
    gamma: f64,
    n_agents: usize,
    coupling: f64,
    kind: NoiseKind,
) -> Result<f64> {
    let hs = h_star(beta, coupling, kind)?;
    let noise = NoiseModel::new(kind, beta)?;
    let base = GameParams::new(n_agents, n_agents, coupling, gamma * hs, noise)?;
    let eq = solve_equilibria(&base);
    let phi_minus = eq.phi_minus.ok_or(Error::NoMetastableState)?;
    let n = n_agents as f64;
    let start = (phi_minus * n).round() as usize;
    let target = (eq.phi_plus * n).round() as usize;
    if start == target {
        return Err(Error::NoMetastableState);
    }

    let t_at = |k: usize| -> Result<f64> {
        let params = base.with_k(k)?;
        let omega = build_transition_matrix(&params)?;
        Ok(hitting_times_linear_solve(&omega, target)?.mean[start])
    };
    let t_full = t_at(n_agents)?;
    let t_prev = t_at(n_agents - 1)?;
    Ok((t_full / t_prev).ln())
}

/// ln[T(k=N) / T(k=N-1)] for the metastable -> stable trajectory on each
/// grid cell: positive cells have an interior escape-time minimum, negative
/// cells are monotone in k. Per-cell failures become missing values; the
/// grid never aborts.
pub fn phase_diagram(spec: &PhaseDiagramSpec) -> PhaseDiagram {
    let cells: Vec<(f64, f64, usize)> = match &spec.plane {
        PhasePlane::BetaGamma { n_agents, gammas } => spec
            .betas
            .iter()
            .flat_map(|&b| gammas.iter().map(move |&g| (b, g, *n_agents)))
            .collect(),
        PhasePlane::BetaN { gamma, n_agents } => spec
            .betas
            .iter()
            .flat_map(|&b| n_agents.iter().map(move |&n| (b, *gamma, n)))
            .collect(),
    };
    let log_ratio: Vec<Option<f64>> = cells
        .par_iter()
        .map(|&(beta, gamma, n)| {
            end_slope_cell(beta, gamma, n, spec.coupling, spec.noise_kind).ok()
        })
        .collect();
    let other_axis = match &spec.plane {
        PhasePlane::BetaGamma { gammas, .. } => gammas.clone(),
        PhasePlane::BetaN { n_agents, .. } => n_agents.iter().map(|&n| n as f64).collect(),
    };
    PhaseDiagram {
        betas: spec.betas.clone(),
        other_axis,
        log_ratio,
    }
}
