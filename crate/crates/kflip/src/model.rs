//! Game parameters, noise models, the choice probability `p_plus`, and the
//! equilibrium structure of the adoption fraction: Curie-Weiss roots,
//! spinodal magnetization and field, trajectory endpoints, and the continuum
//! effective potential.

use crate::error::{Error, Result};
use crate::numeric::{bisect, cumulative_simpson};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Noise family entering each agent's utility comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    /// Gumbel (extreme-value) noise: logit choice probabilities.
    Gumbel,
    /// Gaussian noise with per-strategy variance 1/beta^2, so the utility-gap
    /// noise has variance 2/beta^2 and p_plus(phi) = Phi(sqrt(2) beta u).
    /// This scale convention reproduces the critical point
    /// (beta J)_crit = sqrt(pi)/2.
    Normal,
}

impl NoiseKind {
    /// Critical value of beta*J below which no hysteresis exists.
    pub fn critical_beta_j(self) -> f64 {
        match self {
            NoiseKind::Gumbel => 1.0,
            NoiseKind::Normal => SQRT_PI / 2.0,
        }
    }
}

/// Noise kind plus inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub beta: f64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, beta: f64) -> Result<Self> {
        // beta = 0 (pure noise, p_plus = 1/2 everywhere) is admitted: the
        // fair-coin limit is a useful exactly-solvable reference case.
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "beta must be finite and non-negative, got {beta}"
            )));
        }
        Ok(Self { kind, beta })
    }

    pub fn gumbel(beta: f64) -> Result<Self> {
        Self::new(NoiseKind::Gumbel, beta)
    }

    pub fn normal(beta: f64) -> Result<Self> {
        Self::new(NoiseKind::Normal, beta)
    }
}

/// Parameter tuple (N, k, J, H, noise) of one game instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameParams {
    pub n_agents: usize,
    pub k_flip: usize,
    pub coupling: f64,
    pub field: f64,
    pub noise: NoiseModel,
}

impl GameParams {
    pub fn new(
        n_agents: usize,
        k_flip: usize,
        coupling: f64,
        field: f64,
        noise: NoiseModel,
    ) -> Result<Self> {
        if n_agents < 1 {
            return Err(Error::InvalidInput("n_agents must be >= 1".into()));
        }
        if k_flip < 1 || k_flip > n_agents {
            return Err(Error::InvalidInput(format!(
                "k_flip must lie in [1, {n_agents}], got {k_flip}"
            )));
        }
        if !(coupling.is_finite() && coupling > 0.0) {
            return Err(Error::InvalidInput(format!(
                "coupling must be finite and positive, got {coupling}"
            )));
        }
        if !field.is_finite() {
            return Err(Error::InvalidInput("field must be finite".into()));
        }
        Ok(Self {
            n_agents,
            k_flip,
            coupling,
            field,
            noise,
        })
    }

    /// Flip fraction rho = k/N.
    pub fn rho(&self) -> f64 {
        self.k_flip as f64 / self.n_agents as f64
    }

    /// Number of chain states, N+1.
    pub fn n_states(&self) -> usize {
        self.n_agents + 1
    }

    pub fn with_k(&self, k_flip: usize) -> Result<Self> {
        Self::new(self.n_agents, k_flip, self.coupling, self.field, self.noise)
    }

    pub fn with_field(&self, field: f64) -> Result<Self> {
        Self::new(self.n_agents, self.k_flip, self.coupling, field, self.noise)
    }

    /// Spinodal field for this instance's noise and temperature.
    pub fn h_star(&self) -> Result<f64> {
        h_star(self.noise.beta, self.coupling, self.noise.kind)
    }
}

/// Probability that a reconsidering agent adopts +1 at adoption fraction
/// `phi`. Strictly increasing in `phi` for beta > 0 and maps into (0,1).
pub fn p_plus(params: &GameParams, phi: f64) -> f64 {
    let u = params.field + params.coupling * (2.0 * phi - 1.0);
    let x = params.noise.beta * u;
    match params.noise.kind {
        // e^{beta u} / (2 cosh(beta u)) as a sigmoid, stable for any |x|.
        NoiseKind::Gumbel => 1.0 / (1.0 + (-2.0 * x).exp()),
        // Phi(sqrt(2) beta u) = erfc(-beta u) / 2.
        NoiseKind::Normal => 0.5 * libm::erfc(-x),
    }
}

/// d p_plus / d phi, in closed form.
pub fn p_plus_slope(params: &GameParams, phi: f64) -> f64 {
    let beta = params.noise.beta;
    let j = params.coupling;
    let u = params.field + j * (2.0 * phi - 1.0);
    match params.noise.kind {
        NoiseKind::Gumbel => {
            let p = p_plus(params, phi);
            4.0 * beta * j * p * (1.0 - p)
        }
        NoiseKind::Normal => {
            let x = beta * u;
            2.0 * beta * j / SQRT_PI * (-x * x).exp()
        }
    }
}

/// Spinodal magnetization for Gumbel noise: (1 + sqrt((bJ-1)/bJ)) / 2.
pub fn phi_star(beta: f64, coupling: f64) -> Result<f64> {
    let beta_j = beta * coupling;
    if beta_j <= 1.0 {
        return Err(Error::SubcriticalTemperature {
            beta_j,
            critical: 1.0,
        });
    }
    Ok(0.5 * (1.0 + ((beta_j - 1.0) / beta_j).sqrt()))
}

/// Critical field H* at which the metastable solution branch terminates by
/// tangency of p_plus with the diagonal.
///
/// Gumbel: closed form J d - atanh(d)/beta with d = sqrt((bJ-1)/bJ).
/// Normal: the tangency system p_plus(phi) = phi, p_plus'(phi) = 1 is solved
/// exactly; the slope condition fixes the utility gap and the fixed-point
/// condition then yields the field.
///
/// At the critical point itself the tangency degenerates and H* = 0 (the
/// formulas are continuous there); only strictly subcritical temperatures
/// are an error.
pub fn h_star(beta: f64, coupling: f64, kind: NoiseKind) -> Result<f64> {
    let beta_j = beta * coupling;
    let critical = kind.critical_beta_j();
    if beta_j < critical {
        return Err(Error::SubcriticalTemperature { beta_j, critical });
    }
    match kind {
        NoiseKind::Gumbel => {
            let d = ((beta_j - 1.0) / beta_j).sqrt();
            Ok(coupling * d - d.atanh() / beta)
        }
        NoiseKind::Normal => {
            // Slope 1 requires (2 bJ / sqrt(pi)) exp(-(beta u)^2) = 1; the
            // lower tangency sits at negative utility gap.
            let r = (2.0 * beta_j / SQRT_PI).ln().sqrt();
            let u_t = -r / beta;
            let phi_t = 0.5 * libm::erfc(r);
            Ok(u_t - coupling * (2.0 * phi_t - 1.0))
        }
    }
}

/// Temperature regime of the equilibrium structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// beta*J at or below critical: a single fixed point.
    HighTemperature,
    /// Supercritical with |H| < H*: three fixed points (hysteresis).
    LowTemperatureHysteresis,
    /// Supercritical with the field beyond the spinodal: one fixed point.
    LowTemperatureSingle,
}

/// Fixed points of phi = p_plus(phi) together with the spinodal data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibria {
    /// Lower stable root (the metastable state for H > 0); absent outside
    /// the hysteresis regime.
    pub phi_minus: Option<f64>,
    /// Interior unstable root; absent outside the hysteresis regime.
    pub phi_zero: Option<f64>,
    /// The stable root (the largest one when several exist).
    pub phi_plus: f64,
    /// Spinodal field; present only above the critical temperature.
    pub h_star: Option<f64>,
    /// Spinodal magnetization; present only above the critical temperature.
    pub phi_star: Option<f64>,
    pub regime: Regime,
}

/// All fixed points of phi = p_plus(phi) on [0,1].
///
/// g(phi) = p_plus(phi) - phi is scanned on a 2048-node uniform grid and
/// every sign-change bracket is bisected to floating-point collapse, so each
/// root carries residual |p_plus(r) - r| well below 1e-12.
pub fn solve_equilibria(params: &GameParams) -> Equilibria {
    const GRID: usize = 2048;
    let g = |phi: f64| p_plus(params, phi) - phi;

    let mut roots: Vec<f64> = Vec::new();
    let mut prev_x = 0.0;
    let mut prev_g = g(0.0);
    if prev_g == 0.0 {
        roots.push(0.0);
    }
    for i in 1..GRID {
        let x = i as f64 / (GRID - 1) as f64;
        let gx = g(x);
        if gx == 0.0 {
            roots.push(x);
        } else if prev_g != 0.0 && prev_g.signum() != gx.signum() {
            roots.push(bisect(g, prev_x, x, 0.0));
        }
        prev_x = x;
        prev_g = gx;
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);

    let beta_j = params.noise.beta * params.coupling;
    let critical = params.noise.kind.critical_beta_j();
    let supercritical = beta_j > critical;

    let (h_star_value, phi_star_value) = if supercritical {
        let hs = h_star(params.noise.beta, params.coupling, params.noise.kind).ok();
        let ps = match params.noise.kind {
            NoiseKind::Gumbel => phi_star(params.noise.beta, params.coupling).ok(),
            NoiseKind::Normal => {
                let r = (2.0 * beta_j / SQRT_PI).ln().sqrt();
                Some(0.5 * libm::erfc(-r))
            }
        };
        (hs, ps)
    } else {
        (None, None)
    };

    // Classify by the slope of p_plus at each root: stable below 1.
    let stable: Vec<f64> = roots
        .iter()
        .copied()
        .filter(|&r| p_plus_slope(params, r) < 1.0)
        .collect();
    let unstable: Vec<f64> = roots
        .iter()
        .copied()
        .filter(|&r| p_plus_slope(params, r) >= 1.0)
        .collect();

    let phi_plus = stable
        .last()
        .copied()
        .or_else(|| roots.last().copied())
        .unwrap_or(0.5);
    let (phi_minus, phi_zero) = if stable.len() >= 2 {
        (stable.first().copied(), unstable.first().copied())
    } else {
        (None, None)
    };

    let regime = if !supercritical {
        Regime::HighTemperature
    } else if phi_minus.is_some() && phi_zero.is_some() {
        Regime::LowTemperatureHysteresis
    } else {
        Regime::LowTemperatureSingle
    };

    Equilibria {
        phi_minus,
        phi_zero,
        phi_plus,
        h_star: h_star_value,
        phi_star: phi_star_value,
        regime,
    }
}

/// Integer state indices of the sample trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrajectoryEndpoints {
    /// round(phi_minus * N): the metastable starting state.
    pub i_meta: usize,
    /// round(N/2): the unstable starting state.
    pub i_unstable: usize,
    /// round(phi_plus * N): the stable target state.
    pub i_stable: usize,
}

/// Endpoints of the metastable->stable and unstable->stable trajectories at
/// field H = gamma * H*. The field of `params` is ignored and replaced.
///
/// States are mapped by rounding half away from zero.
pub fn trajectory_endpoints(params: &GameParams, gamma: f64) -> Result<TrajectoryEndpoints> {
    let hs = match h_star(params.noise.beta, params.coupling, params.noise.kind) {
        Ok(h) => h,
        Err(_) => return Err(Error::NoMetastableState),
    };
    let tilted = params.with_field(gamma * hs)?;
    let eq = solve_equilibria(&tilted);
    let phi_minus = eq.phi_minus.ok_or(Error::NoMetastableState)?;
    let n = params.n_agents as f64;
    Ok(TrajectoryEndpoints {
        i_meta: (phi_minus * n).round() as usize,
        i_unstable: (0.5 * n).round() as usize,
        i_stable: (eq.phi_plus * n).round() as usize,
    })
}

/// Continuum effective potential of the adoption fraction, from the
/// stationary measure of the one-flip drift-diffusion limit:
///
///   V(phi) = -(N/2) Int^phi [tanh(bH + bJ(2t-1)) - (2t-1)]
///                           / [1 - (2t-1) tanh(bH + bJ(2t-1))] dt,
///
/// evaluated by composite Simpson on the supplied grid and shifted so the
/// minimum is zero.
pub fn fp_potential(params: &GameParams, phi_grid: &[f64]) -> Result<Vec<f64>> {
    if phi_grid.len() < 2 {
        return Err(Error::InvalidInput(
            "potential grid needs at least two points".into(),
        ));
    }
    let increasing = phi_grid
        .windows(2)
        .all(|w| w[1].partial_cmp(&w[0]) == Some(std::cmp::Ordering::Greater));
    if !increasing {
        return Err(Error::InvalidInput(
            "potential grid must be strictly increasing".into(),
        ));
    }
    if phi_grid[0] <= 0.0 || *phi_grid.last().unwrap() >= 1.0 {
        return Err(Error::InvalidInput(
            "potential grid must lie strictly inside (0, 1)".into(),
        ));
    }
    let beta = params.noise.beta;
    let j = params.coupling;
    let h = params.field;
    let mut integrand = Vec::with_capacity(phi_grid.len());
    for &phi in phi_grid {
        let m = 2.0 * phi - 1.0;
        let t = (beta * h + beta * j * m).tanh();
        let denom = 1.0 - m * t;
        if denom.abs() < 1e-14 {
            return Err(Error::QuadratureFailure {
                phi,
                denominator: denom,
            });
        }
        integrand.push((t - m) / denom);
    }
    let cumulative = cumulative_simpson(phi_grid, &integrand);
    let scale = -(params.n_agents as f64) / 2.0;
    let mut v: Vec<f64> = cumulative.iter().map(|&c| scale * c).collect();
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    for value in &mut v {
        *value -= min;
    }
    Ok(v)
}
