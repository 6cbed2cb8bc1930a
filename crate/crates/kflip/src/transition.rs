//! Exact one-step transition matrix of the k-flip game and the closed-form
//! step-length moments, each backed by an independent brute-force oracle.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{p_plus, GameParams};
use crate::numeric::{log_sum_exp, LnFactorials};

/// Dense row-stochastic transition matrix over the states 0..=N.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    n_states: usize,
    entries: Vec<f64>,
    params: GameParams,
    max_raw_row_deviation: f64,
}

impl TransitionMatrix {
    #[inline]
    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n_states + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n_states..(i + 1) * self.n_states]
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn params(&self) -> &GameParams {
        &self.params
    }

    /// Largest |row sum - 1| observed before renormalization. Rounding dust
    /// sits around 1e-15; anything large would signal a formula bug.
    pub fn max_raw_row_deviation(&self) -> f64 {
        self.max_raw_row_deviation
    }
}

/// coefficient * ln(base), with the 0 * ln(0) = 0 convention so that
/// saturated probabilities (p exactly 0 or 1) drop terms cleanly.
#[inline]
fn pow_ln(ln_base: f64, coefficient: i64) -> f64 {
    if coefficient == 0 {
        0.0
    } else {
        coefficient as f64 * ln_base
    }
}

fn row_probabilities(
    params: &GameParams,
    lf: &LnFactorials,
    i: usize,
    out: &mut [f64],
) -> Result<f64> {
    let n = params.n_agents;
    let k = params.k_flip;
    let p = p_plus(params, i as f64 / n as f64);
    let ln_p = p.ln();
    let ln_q = (1.0 - p).ln();
    // i! (N-i)! / N!
    let ln_state_factor = lf.ln_factorial(i) + lf.ln_factorial(n - i) - lf.ln_factorial(n);

    out.fill(0.0);
    let j_lo = i.saturating_sub(k);
    let j_hi = (i + k).min(n);
    let mut terms: Vec<f64> = Vec::with_capacity(k + 1);
    for (j, slot) in out.iter_mut().enumerate().take(j_hi + 1).skip(j_lo) {
        let step = j as i64 - i as i64;
        let abs_step = step.unsigned_abs() as usize;
        let delta_plus = step.max(0);
        let delta_minus = (-step).max(0);
        terms.clear();
        for s in 0..=(k - abs_step) as i64 {
            let c_rest = match lf.ln_choose(n - k, (n - i) as i64 - s - delta_plus) {
                Some(c) => c,
                None => continue,
            };
            let c_s = match lf.ln_choose(k, s) {
                Some(c) => c,
                None => continue,
            };
            let c_sn = match lf.ln_choose(k, s + abs_step as i64) {
                Some(c) => c,
                None => continue,
            };
            let term = c_rest
                + c_s
                + c_sn
                + pow_ln(ln_p, k as i64 - s - delta_minus)
                + pow_ln(ln_q, s + delta_minus)
                + ln_state_factor;
            if term.is_nan() || term == f64::INFINITY {
                return Err(Error::OverflowGuard { log_term: term });
            }
            terms.push(term);
        }
        let lse = log_sum_exp(&terms);
        *slot = if lse == f64::NEG_INFINITY {
            0.0
        } else {
            lse.exp()
        };
    }

    let sum: f64 = out.iter().sum();
    let deviation = (sum - 1.0).abs();
    if deviation > 1e-13 {
        for v in out.iter_mut() {
            *v /= sum;
        }
    }
    Ok(deviation)
}

/// Builds the exact (N+1)x(N+1) transition matrix, entry by entry from the
/// closed-form s-sum with p_plus evaluated at phi = i/N. Every term is
/// assembled in log space and summed with log-sum-exp; rows are renormalized
/// only when the raw deviation exceeds 1e-13, and the worst deviation is
/// recorded on the result.
pub fn build_transition_matrix(params: &GameParams) -> Result<TransitionMatrix> {
    let n_states = params.n_states();
    let lf = LnFactorials::up_to(params.n_agents);
    let mut entries = vec![0.0; n_states * n_states];

    let deviations: Result<Vec<f64>> = entries
        .par_chunks_mut(n_states)
        .enumerate()
        .map(|(i, row)| row_probabilities(params, &lf, i, row))
        .collect();
    let max_raw_row_deviation = deviations?.into_iter().fold(0.0, f64::max);

    Ok(TransitionMatrix {
        n_states,
        entries,
        params: *params,
        max_raw_row_deviation,
    })
}

/// Literal evaluation of the defining quadruple sum over per-agent outcome
/// counts (x1: -1 -> +1, x2: -1 -> -1, x3: +1 -> +1, x4: +1 -> -1). Serves
/// as the test oracle for `build_transition_matrix`; restricted to N <= 14.
pub fn transition_prob_bruteforce(params: &GameParams, i: usize, j: usize) -> Result<f64> {
    const MAX_N: usize = 14;
    let n = params.n_agents;
    if n > MAX_N {
        return Err(Error::InstanceTooLarge {
            n_agents: n,
            max: MAX_N,
        });
    }
    let k = params.k_flip;
    let step = j as i64 - i as i64;
    let p = p_plus(params, i as f64 / n as f64);
    let q = 1.0 - p;

    let mut factorial = [1.0f64; MAX_N + 1];
    for m in 1..=MAX_N {
        factorial[m] = factorial[m - 1] * m as f64;
    }
    // a! / (a - m)!, zero when the pool is too small.
    let falling = |a: usize, m: usize| -> f64 {
        if m > a {
            0.0
        } else {
            factorial[a] / factorial[a - m]
        }
    };

    let n_minus = n - i;
    let n_plus = i;
    let mut total = 0.0;
    for x1 in 0..=k {
        for x4 in 0..=(k - x1) {
            if x1 as i64 - x4 as i64 != step {
                continue;
            }
            for x2 in 0..=(k - x1 - x4) {
                let x3 = k - x1 - x4 - x2;
                let multinomial =
                    factorial[k] / (factorial[x1] * factorial[x2] * factorial[x3] * factorial[x4]);
                let pools = falling(n_minus, x1 + x2) * falling(n_plus, x3 + x4);
                if pools == 0.0 {
                    continue;
                }
                let prob = p.powi((x1 + x3) as i32) * q.powi((x2 + x4) as i32);
                total += multinomial * prob * pools;
            }
        }
    }
    Ok(total / falling(n, k))
}

/// Second independent oracle: the k sampled agents contain
/// h ~ Hypergeometric(N, i, k) current adopters, and their k fresh choices
/// contribute b ~ Binomial(k, p_plus) adopters, so j = i - h + b.
pub fn transition_prob_convolution(params: &GameParams, i: usize, j: usize) -> f64 {
    let n = params.n_agents;
    let k = params.k_flip;
    let lf = LnFactorials::up_to(n);
    let p = p_plus(params, i as f64 / n as f64);
    let ln_p = p.ln();
    let ln_q = (1.0 - p).ln();
    let ln_choose_n_k = lf.ln_choose(n, k as i64).expect("k <= n");

    let h_lo = k.saturating_sub(n - i);
    let h_hi = i.min(k);
    let mut terms = Vec::with_capacity(h_hi.saturating_sub(h_lo) + 1);
    for h in h_lo..=h_hi {
        let b = j as i64 - i as i64 + h as i64;
        if b < 0 || b > k as i64 {
            continue;
        }
        let ln_hyp = match (
            lf.ln_choose(i, h as i64),
            lf.ln_choose(n - i, (k - h) as i64),
        ) {
            (Some(a), Some(bb)) => a + bb - ln_choose_n_k,
            _ => continue,
        };
        let ln_bin = match lf.ln_choose(k, b) {
            Some(c) => c + pow_ln(ln_p, b) + pow_ln(ln_q, k as i64 - b),
            None => continue,
        };
        terms.push(ln_hyp + ln_bin);
    }
    let lse = log_sum_exp(&terms);
    if lse == f64::NEG_INFINITY {
        0.0
    } else {
        lse.exp()
    }
}

/// First two moments and standard deviation of the one-step displacement of
/// phi = N+/N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMoments {
    pub mean_dphi: f64,
    pub mean_dphi2: f64,
    pub sigma: f64,
}

fn moments_impl(n: f64, k: f64, p: f64, phi: f64) -> StepMoments {
    let mean_dphi = k / n * (p - phi);
    let mean_dphi2 = if n == 1.0 {
        // Single agent: the pair-correlation term is vacuous.
        p * (1.0 - phi) + (1.0 - p) * phi
    } else {
        k / (n * n)
            * (p * p * (k - 1.0)
                + p * (1.0 - 2.0 * k * phi)
                + phi * (-k + n + (k - 1.0) * n * phi) / (n - 1.0))
    };
    let sigma = (mean_dphi2 - mean_dphi * mean_dphi).max(0.0).sqrt();
    StepMoments {
        mean_dphi,
        mean_dphi2,
        sigma,
    }
}

/// Closed-form step moments at adoption fraction `phi` (defined on lattice
/// states phi = i/N; the expressions are evaluated exactly).
pub fn step_moments(params: &GameParams, phi: f64) -> StepMoments {
    step_moments_with_k(params, params.k_flip as f64, phi)
}

/// Step moments with `k` treated as a continuous variable; used by the
/// escape-time estimate.
pub fn step_moments_with_k(params: &GameParams, k: f64, phi: f64) -> StepMoments {
    moments_impl(params.n_agents as f64, k, p_plus(params, phi), phi)
}

/// Closed-form derivatives of the step moments with respect to k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMomentKDerivatives {
    pub d_mean_dk: f64,
    pub d_sigma_dk: f64,
}

/// d<dphi>/dk and d sigma/dk at `phi`, treating k as continuous.
///
/// From sigma^2 = (k/N^2) [p(1-p) + phi(1-phi)(N-k)/(N-1)]:
///
///   d sigma/dk = sigma/(2k) - k phi(1-phi) / (2 sigma N^2 (N-1)).
pub fn step_moment_k_derivatives(params: &GameParams, phi: f64) -> Result<StepMomentKDerivatives> {
    step_moment_k_derivatives_with_k(params, params.k_flip as f64, phi)
}

/// Continuous-k variant of [`step_moment_k_derivatives`].
pub fn step_moment_k_derivatives_with_k(
    params: &GameParams,
    k: f64,
    phi: f64,
) -> Result<StepMomentKDerivatives> {
    let n = params.n_agents as f64;
    let p = p_plus(params, phi);
    let sigma = moments_impl(n, k, p, phi).sigma;
    if sigma == 0.0 {
        return Err(Error::DegenerateSigma);
    }
    let d_mean_dk = (p - phi) / n;
    let d_sigma_dk = sigma / (2.0 * k) - k * phi * (1.0 - phi) / (2.0 * sigma * n * n * (n - 1.0));
    Ok(StepMomentKDerivatives {
        d_mean_dk,
        d_sigma_dk,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{h_star, solve_equilibria, NoiseKind, NoiseModel};

    fn params(n: usize, k: usize, beta: f64, h: f64) -> GameParams {
        GameParams::new(n, k, 1.0, h, NoiseModel::gumbel(beta).unwrap()).unwrap()
    }

    #[test]
    fn glauber_rows_for_single_flip() {
        let pr = params(50, 1, 1.9, 0.12);
        let omega = build_transition_matrix(&pr).unwrap();
        for i in 0..=50usize {
            let phi = i as f64 / 50.0;
            let p = p_plus(&pr, phi);
            if i < 50 {
                assert!((omega.prob(i, i + 1) - (1.0 - phi) * p).abs() < 1e-14);
            }
            if i > 0 {
                assert!((omega.prob(i, i - 1) - phi * (1.0 - p)).abs() < 1e-14);
            }
            let stay = 1.0 - (1.0 - phi) * p - phi * (1.0 - p);
            assert!((omega.prob(i, i) - stay).abs() < 1e-13);
        }
    }

    #[test]
    fn full_flip_rows_are_binomial() {
        let n = 40;
        let pr = params(n, n, 2.2, 0.3);
        let omega = build_transition_matrix(&pr).unwrap();
        let lf = LnFactorials::up_to(n);
        for i in 0..=n {
            let p = p_plus(&pr, i as f64 / n as f64);
            for j in 0..=n {
                let ln_pmf = lf.ln_choose(n, j as i64).unwrap()
                    + j as f64 * p.ln()
                    + (n - j) as f64 * (1.0 - p).ln();
                assert!(
                    (omega.prob(i, j) - ln_pmf.exp()).abs() < 1e-12,
                    "i={i} j={j}"
                );
            }
        }
    }

    #[test]
    fn fair_coin_reflip_rows() {
        // beta = 0: every sampled agent re-flips a fair coin.
        let pr = GameParams::new(2, 2, 1.0, 0.0, NoiseModel::gumbel(0.0).unwrap()).unwrap();
        let omega = build_transition_matrix(&pr).unwrap();
        for i in 0..=2 {
            assert!((omega.prob(i, 0) - 0.25).abs() < 1e-15);
            assert!((omega.prob(i, 1) - 0.5).abs() < 1e-15);
            assert!((omega.prob(i, 2) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn rows_are_stochastic_with_bounded_support() {
        let pr = params(60, 7, 1.9, 0.2);
        let omega = build_transition_matrix(&pr).unwrap();
        assert!(omega.max_raw_row_deviation() < 1e-12);
        for i in 0..=60usize {
            let row = omega.row(i);
            let sum: f64 = row.iter().sum();
            assert!((sum - 1.0).abs() < 1e-10);
            for (j, &v) in row.iter().enumerate() {
                let reachable = j as i64 >= i as i64 - 7 && j as i64 <= i as i64 + 7;
                // Window from the step bound: inside it every entry is
                // strictly positive because p_plus is in (0,1).
                let window = j >= i.saturating_sub(7.min(i)) && j <= i + 7.min(60 - i);
                assert_eq!(reachable && window, v > 0.0, "i={i} j={j} v={v}");
                assert!((0.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn bruteforce_matches_glauber_single_term() {
        let pr = params(2, 1, 1.3, 0.4);
        let direct = transition_prob_bruteforce(&pr, 1, 2).unwrap();
        let expected = (1.0 - 0.5) * p_plus(&pr, 0.5);
        assert!((direct - expected).abs() < 1e-15);
    }

    #[test]
    fn bruteforce_rows_sum_to_one() {
        let pr = params(8, 3, 1.7, -0.25);
        for i in 0..=8usize {
            let total: f64 = (0..=8)
                .map(|j| transition_prob_bruteforce(&pr, i, j).unwrap())
                .sum();
            assert!((total - 1.0).abs() < 1e-12, "row {i}: {total}");
        }
    }

    #[test]
    fn bruteforce_rejects_large_instances() {
        let pr = params(15, 3, 1.0, 0.0);
        assert!(matches!(
            transition_prob_bruteforce(&pr, 0, 1),
            Err(Error::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn oracle_triangle_small_systems() {
        // Builder, brute force and hypergeometric-binomial convolution agree
        // entrywise. The acceptance suite runs the full N <= 12 sweep.
        for &(n, beta, h) in &[(4usize, 1.9, 0.2), (6, 0.9, -0.4), (8, 2.6, 0.05)] {
            for k in 1..=n {
                let pr = params(n, k, beta, h);
                let omega = build_transition_matrix(&pr).unwrap();
                for i in 0..=n {
                    for j in 0..=n {
                        let built = omega.prob(i, j);
                        let brute = transition_prob_bruteforce(&pr, i, j).unwrap();
                        let conv = transition_prob_convolution(&pr, i, j);
                        assert!(
                            (built - brute).abs() < 1e-12,
                            "N={n} k={k} {i}->{j}: built {built} brute {brute}"
                        );
                        assert!(
                            (built - conv).abs() < 1e-12,
                            "N={n} k={k} {i}->{j}: built {built} conv {conv}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn convolution_limits() {
        // k = N: deterministic hypergeometric, binomial result.
        let n = 12;
        let pr = params(n, n, 1.4, 0.3);
        let lf = LnFactorials::up_to(n);
        for j in 0..=n {
            let p = p_plus(&pr, 5.0 / 12.0);
            let pmf = (lf.ln_choose(n, j as i64).unwrap()
                + j as f64 * p.ln()
                + (n - j) as f64 * (1.0 - p).ln())
            .exp();
            assert!((transition_prob_convolution(&pr, 5, j) - pmf).abs() < 1e-13);
        }
        // k = 1: Glauber rates, two-term convolution by hand.
        let pr = params(10, 1, 1.9, 0.1);
        let phi = 0.4;
        let p = p_plus(&pr, phi);
        assert!((transition_prob_convolution(&pr, 4, 5) - (1.0 - phi) * p).abs() < 1e-14);
        assert!((transition_prob_convolution(&pr, 4, 3) - phi * (1.0 - p)).abs() < 1e-14);
    }

    #[test]
    fn convolution_matches_builder_mid_size() {
        let pr = params(50, 17, 2.1, 0.17);
        let omega = build_transition_matrix(&pr).unwrap();
        for &(i, j) in &[(10usize, 14usize), (25, 25), (40, 31), (3, 20), (49, 50)] {
            let conv = transition_prob_convolution(&pr, i, j);
            assert!((omega.prob(i, j) - conv).abs() < 1e-10, "{i}->{j}");
        }
    }

    #[test]
    fn moments_match_matrix_route() {
        let n = 40;
        let pr = params(n, 11, 1.9, 0.2);
        let omega = build_transition_matrix(&pr).unwrap();
        let i = 12; // phi = 0.3
        let phi = i as f64 / n as f64;
        let m = step_moments(&pr, phi);
        let (mut m1, mut m2) = (0.0, 0.0);
        for j in 0..=n {
            let d = (j as f64 - i as f64) / n as f64;
            m1 += omega.prob(i, j) * d;
            m2 += omega.prob(i, j) * d * d;
        }
        assert!((m.mean_dphi - m1).abs() < 1e-12);
        assert!((m.mean_dphi2 - m2).abs() < 1e-12);
        assert!(m.mean_dphi2 + 1e-15 >= m.mean_dphi * m.mean_dphi);
        assert!(m.mean_dphi.abs() <= 11.0 / 40.0 + 1e-15);
    }

    #[test]
    fn moments_at_fixed_point_and_single_flip() {
        let pr = params(80, 5, 1.9, 0.1);
        let eq = solve_equilibria(&pr);
        let m = step_moments(&pr, eq.phi_plus);
        assert!(m.mean_dphi.abs() < 1e-12);

        let pr1 = params(30, 1, 1.6, 0.2);
        let phi = 0.4;
        let p = p_plus(&pr1, phi);
        let m = step_moments(&pr1, phi);
        let expected = (p + phi - 2.0 * p * phi) / 900.0;
        assert!((m.mean_dphi2 - expected).abs() < 1e-16);
    }

    #[test]
    fn sigma_closed_form_cross_check() {
        // sigma^2 = (k/N^2)[p(1-p) + phi(1-phi)(N-k)/(N-1)] is an algebraic
        // rearrangement of the published moments; verify both routes agree.
        let pr = params(60, 23, 2.3, 0.15);
        for i in [0usize, 9, 30, 51, 60] {
            let phi = i as f64 / 60.0;
            let p = p_plus(&pr, phi);
            let m = step_moments(&pr, phi);
            let direct =
                (23.0 / 3600.0) * (p * (1.0 - p) + phi * (1.0 - phi) * (60.0 - 23.0) / 59.0);
            assert!((m.sigma * m.sigma - direct).abs() < 1e-15, "i={i}");
        }
    }

    #[test]
    fn derivative_of_mean_vanishes_at_roots_and_is_negative_inside_well() {
        let beta = 1.9;
        let hs = h_star(beta, 1.0, NoiseKind::Gumbel).unwrap();
        let pr = params(150, 20, beta, 0.8 * hs);
        let eq = solve_equilibria(&pr);
        let at_root = step_moment_k_derivatives(&pr, eq.phi_plus).unwrap();
        assert!(at_root.d_mean_dk.abs() < 1e-12);

        let mid = 0.5 * (eq.phi_minus.unwrap() + eq.phi_zero.unwrap());
        let inside = step_moment_k_derivatives(&pr, mid).unwrap();
        assert!(inside.d_mean_dk < 0.0);
    }

    #[test]
    fn sigma_derivative_matches_central_difference() {
        let pr = params(150, 1, 1.9, 0.15);
        let phi = 0.21;
        for k in (10..=140).step_by(13) {
            let kf = k as f64;
            let d = step_moment_k_derivatives_with_k(&pr, kf, phi).unwrap();
            let hi = step_moments_with_k(&pr, kf + 1.0, phi).sigma;
            let lo = step_moments_with_k(&pr, kf - 1.0, phi).sigma;
            let fd = (hi - lo) / 2.0;
            assert!(
                (d.d_sigma_dk - fd).abs() <= 0.02 * fd.abs(),
                "k={k}: closed {} vs fd {fd}",
                d.d_sigma_dk
            );
        }
    }

    #[test]
    fn degenerate_sigma_is_reported() {
        // Saturated p_plus at the full-consensus state with k = N leaves no
        // randomness in the step.
        let pr = GameParams::new(6, 6, 1.0, 5.0, NoiseModel::gumbel(200.0).unwrap()).unwrap();
        assert!(matches!(
            step_moment_k_derivatives(&pr, 1.0),
            Err(Error::DegenerateSigma)
        ));
    }
}
