//! Markov-chain analysis of the k-flip game: stationary distribution and its
//! potential, the fundamental matrix, and the first two moments of the
//! first-hitting-time distribution, with an independent linear-solve oracle.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{invert, lu_factor, Matrix};
use crate::model::GameParams;
use crate::transition::{build_transition_matrix, TransitionMatrix};

/// Stationary distribution pi of a transition matrix, with the max-norm
/// residual of pi Omega - pi recorded.
#[derive(Debug, Clone)]
pub struct StationaryDistribution {
    pi: Vec<f64>,
    residual: f64,
}

impl StationaryDistribution {
    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    /// Effective potential V_i = -ln pi_i, shifted so min V = 0.
    pub fn potential(&self) -> Vec<f64> {
        potential_from_pi(self)
    }
}

fn residual_of(pi: &[f64], omega: &TransitionMatrix) -> f64 {
    let n = pi.len();
    let mut pi_omega = vec![0.0; n];
    for (i, &w) in pi.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (acc, &p) in pi_omega.iter_mut().zip(omega.row(i)) {
            *acc += w * p;
        }
    }
    pi_omega
        .iter()
        .zip(pi)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Solves pi Omega = pi by Grassmann-Taksar-Heyman state reduction.
///
/// The stationary vector of a metastable chain spans hundreds of orders of
/// magnitude; a replaced-row LU solve resolves entries only down to roughly
/// machine epsilon times the largest entry and returns zeros or sign noise
/// below that. GTH elimination never subtracts (diagonals are rebuilt from
/// off-diagonal row sums), so every entry keeps full relative accuracy in
/// plain linear space. An exact zero can then only mean true underflow past
/// 1e-308, which is reported rather than patched.
pub fn stationary_distribution(omega: &TransitionMatrix) -> Result<StationaryDistribution> {
    let n = omega.n_states();
    let mut a = Matrix::from_fn(n, n, |i, j| omega.prob(i, j));

    // Eliminate states n-1 .. 1: censor each top state and redistribute its
    // probability flux over the remaining ones. Sums of nonnegative terms
    // throughout.
    for k in (1..n).rev() {
        let s: f64 = a.row(k)[..k].iter().sum();
        if s <= 0.0 || !s.is_finite() {
            return Err(Error::SingularSystem);
        }
        for i in 0..k {
            a[(i, k)] /= s;
        }
        for i in 0..k {
            let w = a[(i, k)];
            if w == 0.0 {
                continue;
            }
            for j in 0..k {
                let flux = w * a[(k, j)];
                a[(i, j)] += flux;
            }
        }
    }

    // Back substitution; rescale on the fly so huge pi ratios cannot
    // overflow before the final normalization.
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    for k in 1..n {
        let mut acc = 0.0;
        for i in 0..k {
            acc += pi[i] * a[(i, k)];
        }
        pi[k] = acc;
        if acc > 1e250 {
            for value in pi.iter_mut().take(k + 1) {
                *value /= 1e250;
            }
        }
    }
    let sum: f64 = pi.iter().sum();
    for value in pi.iter_mut() {
        *value /= sum;
    }

    for (state, &value) in pi.iter().enumerate() {
        if value <= 0.0 {
            return Err(Error::NonPositiveStationary { state, value });
        }
    }

    let residual = residual_of(&pi, omega);
    if residual >= 1e-10 {
        return Err(Error::IllConditioned { residual });
    }
    Ok(StationaryDistribution { pi, residual })
}

/// V_i = -ln pi_i shifted so the minimum is zero.
pub fn potential_from_pi(dist: &StationaryDistribution) -> Vec<f64> {
    potential_from_probabilities(dist.pi())
}

/// Potential of an arbitrary positive probability vector; invariant under
/// rescaling of the input.
pub fn potential_from_probabilities(pi: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = pi.iter().map(|&p| -p.ln()).collect();
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    for value in &mut v {
        *value -= min;
    }
    v
}

/// Fundamental matrix Z = (I - Omega + Pi)^{-1}, where Pi is the rank-one
/// matrix whose rows are all pi. The identity-product residual is asserted
/// below 1e-8.
pub fn fundamental_matrix(
    omega: &TransitionMatrix,
    dist: &StationaryDistribution,
) -> Result<Matrix> {
    let n = omega.n_states();
    let a = Matrix::from_fn(n, n, |i, j| {
        let identity = if i == j { 1.0 } else { 0.0 };
        identity - omega.prob(i, j) + dist.pi()[j]
    });
    let z = invert(&a)?;
    let residual = z.matmul(&a).max_abs_diff(&Matrix::identity(n));
    if residual >= 1e-8 {
        return Err(Error::IllConditioned { residual });
    }
    Ok(z)
}

/// Mean first-hitting-time matrix T_ij = (Z_jj - Z_ij) / pi_j, with the
/// diagonal set to the mean recurrence times 1/pi_j.
pub fn mean_hitting_times(z: &Matrix, dist: &StationaryDistribution) -> Matrix {
    let n = dist.len();
    Matrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0 / dist.pi()[j]
        } else {
            (z[(j, j)] - z[(i, j)]) / dist.pi()[j]
        }
    })
}

/// Second moment and variance of the first-hitting-time distribution.
#[derive(Debug, Clone)]
pub struct HittingSecondMoments {
    /// T2_ij = <tau_ij^2>
    pub t2: Matrix,
    /// Var tau_ij = T2_ij - T_ij^2
    pub var: Matrix,
}

/// Evaluates T2 = 2 T D diag Z - 3 T + 2 [I + E diag(Z^2) - Z^2] D exactly
/// as written, along with the variance matrix. Variance dust within
/// -1e-6 * T2 is clamped to zero; anything more negative is an error.
pub fn second_moment_hitting(
    z: &Matrix,
    t: &Matrix,
    dist: &StationaryDistribution,
) -> Result<HittingSecondMoments> {
    let n = dist.len();
    let z2 = z.matmul(z);
    let mut t2 = Matrix::zeros(n, n);
    let mut var = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let d = 1.0 / dist.pi()[j];
            let identity = if i == j { 1.0 } else { 0.0 };
            let second = 2.0 * t[(i, j)] * z[(j, j)] * d - 3.0 * t[(i, j)]
                + 2.0 * (identity + z2[(j, j)] - z2[(i, j)]) * d;
            let mut v = second - t[(i, j)] * t[(i, j)];
            if v < 0.0 {
                if v < -1e-6 * second.abs() {
                    return Err(Error::NegativeVariance {
                        from: i,
                        to: j,
                        variance: v,
                    });
                }
                v = 0.0;
            }
            t2[(i, j)] = second;
            var[(i, j)] = v;
        }
    }
    Ok(HittingSecondMoments { t2, var })
}

/// Fundamental matrix, hitting-time moment matrices and variances of one
/// chain instance.
#[derive(Debug, Clone)]
pub struct HittingAnalysis {
    pub z: Matrix,
    pub t: Matrix,
    pub t2: Matrix,
    pub var: Matrix,
}

/// Full fundamental-matrix route: Z, T, T2 and Var in one call.
pub fn hitting_analysis(
    omega: &TransitionMatrix,
    dist: &StationaryDistribution,
) -> Result<HittingAnalysis> {
    let z = fundamental_matrix(omega, dist)?;
    let t = mean_hitting_times(&z, dist);
    let HittingSecondMoments { t2, var } = second_moment_hitting(&z, &t, dist)?;
    Ok(HittingAnalysis { z, t, t2, var })
}

/// One column of T and T2 evaluated from the fundamental matrix, for
/// targets whose hitting times are resolvable in doubles. Columns of the
/// full matrices whose true times exceed ~1e12 steps (hitting a state the
/// stationary measure all but excludes) cannot carry meaningful second
/// moments in f64; restricting to one physical target sidesteps them.
pub fn hitting_moments_into(
    z: &Matrix,
    dist: &StationaryDistribution,
    target: usize,
) -> TargetHitting {
    let n = dist.len();
    let pi_t = dist.pi()[target];
    let z2_tt: f64 = (0..n).map(|m| z[(target, m)] * z[(m, target)]).sum();
    let mut mean = vec![0.0; n];
    let mut second_moment = vec![0.0; n];
    for i in 0..n {
        if i == target {
            continue;
        }
        let t = (z[(target, target)] - z[(i, target)]) / pi_t;
        let z2_it: f64 = (0..n).map(|m| z[(i, m)] * z[(m, target)]).sum();
        second_moment[i] =
            2.0 * t * z[(target, target)] / pi_t - 3.0 * t + 2.0 * (z2_tt - z2_it) / pi_t;
        mean[i] = t;
    }
    TargetHitting {
        target,
        mean,
        second_moment,
    }
}

/// Mean and second-moment hitting times into one target state, solved from
/// the defining recurrences with the target row and column deleted:
/// (I - Q) t = 1 and (I - Q) t2 = 1 + 2 Q t.
///
/// Entries at the target itself are zero by convention.
#[derive(Debug, Clone)]
pub struct TargetHitting {
    pub target: usize,
    pub mean: Vec<f64>,
    pub second_moment: Vec<f64>,
}

pub fn hitting_times_linear_solve(
    omega: &TransitionMatrix,
    target: usize,
) -> Result<TargetHitting> {
    let n = omega.n_states();
    if target >= n {
        return Err(Error::InvalidInput(format!(
            "target state {target} out of range 0..{n}"
        )));
    }
    let m = n - 1;
    let full = |r: usize| if r < target { r } else { r + 1 };
    let a = Matrix::from_fn(m, m, |i, j| {
        let identity = if i == j { 1.0 } else { 0.0 };
        identity - omega.prob(full(i), full(j))
    });
    let lu = lu_factor(&a)?;

    let ones = vec![1.0; m];
    let mut t = lu.solve(&ones);
    lu.refine_compensated(&a, &ones, &mut t);

    // rhs2 = 1 + 2 Q t
    let mut rhs2 = vec![0.0; m];
    for (i, r) in rhs2.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, &tj) in t.iter().enumerate() {
            acc += omega.prob(full(i), full(j)) * tj;
        }
        *r = 1.0 + 2.0 * acc;
    }
    let mut t2 = lu.solve(&rhs2);
    lu.refine_compensated(&a, &rhs2, &mut t2);

    let mut mean = vec![0.0; n];
    let mut second_moment = vec![0.0; n];
    for r in 0..m {
        mean[full(r)] = t[r];
        second_moment[full(r)] = t2[r];
    }
    Ok(TargetHitting {
        target,
        mean,
        second_moment,
    })
}

/// Mean and variance of the hitting time start -> target as functions of k,
/// normalized by their k = 1 values.
#[derive(Debug, Clone)]
pub struct HittingCurve {
    /// k = 1..=N.
    pub k: Vec<usize>,
    pub t_mean: Vec<f64>,
    pub t_var: Vec<f64>,
    /// r_tau(k) = T(k) / T(1); exactly 1 at k = 1.
    pub r_tau: Vec<f64>,
    /// r_sigma(k) = Var(k) / Var(1); exactly 1 at k = 1.
    pub r_sigma: Vec<f64>,
}

/// Sweeps k = 1..=N at fixed (N, beta, H, noise), computing the hitting
/// moments into `target` from `start` by the linear-solve route (one
/// factorization per k, k-points in parallel).
pub fn hitting_curve(base: &GameParams, start: usize, target: usize) -> Result<HittingCurve> {
    let n = base.n_agents;
    if start >= base.n_states() || target >= base.n_states() || start == target {
        return Err(Error::InvalidInput(format!(
            "need distinct start/target states in 0..={n}, got {start} -> {target}"
        )));
    }
    let points: Result<Vec<(f64, f64)>> = (1..=n)
        .into_par_iter()
        .map(|k| {
            let params = base.with_k(k)?;
            let omega = build_transition_matrix(&params)?;
            let hit = hitting_times_linear_solve(&omega, target)?;
            let mean = hit.mean[start];
            let second = hit.second_moment[start];
            let mut var = second - mean * mean;
            if var < 0.0 {
                if var < -1e-6 * second.abs() {
                    return Err(Error::NegativeVariance {
                        from: start,
                        to: target,
                        variance: var,
                    });
                }
                var = 0.0;
            }
            Ok((mean, var))
        })
        .collect();
    let points = points?;
    let (t1, v1) = points[0];
    Ok(HittingCurve {
        k: (1..=n).collect(),
        t_mean: points.iter().map(|p| p.0).collect(),
        t_var: points.iter().map(|p| p.1).collect(),
        r_tau: points.iter().map(|p| p.0 / t1).collect(),
        r_sigma: points.iter().map(|p| p.1 / v1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{h_star, trajectory_endpoints, NoiseKind, NoiseModel};
    use crate::numeric::LnFactorials;

    fn params(n: usize, k: usize, beta: f64, h: f64) -> GameParams {
        GameParams::new(n, k, 1.0, h, NoiseModel::gumbel(beta).unwrap()).unwrap()
    }

    fn gamma_params(n: usize, k: usize, beta: f64, gamma: f64) -> GameParams {
        let hs = h_star(beta, 1.0, NoiseKind::Gumbel).unwrap();
        params(n, k, beta, gamma * hs)
    }

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn fair_coin_stationary_is_binomial() {
        // beta = 0: every re-decision is a fair coin, so the product measure
        // Binomial(N, 1/2) is invariant for every k.
        let n = 30;
        let lf = LnFactorials::up_to(n);
        for k in [1usize, 7, 30] {
            let pr = GameParams::new(n, k, 1.0, 0.0, NoiseModel::gumbel(0.0).unwrap()).unwrap();
            let omega = build_transition_matrix(&pr).unwrap();
            let dist = stationary_distribution(&omega).unwrap();
            for i in 0..=n {
                let pmf =
                    (lf.ln_choose(n, i as i64).unwrap() - n as f64 * std::f64::consts::LN_2).exp();
                assert!((dist.pi()[i] - pmf).abs() < 1e-12, "k={k} i={i}");
            }
            assert!(dist.residual() < 1e-12);
        }
    }

    #[test]
    fn two_state_stationary_closed_form() {
        let pr = params(1, 1, 1.4, 0.3);
        let omega = build_transition_matrix(&pr).unwrap();
        let dist = stationary_distribution(&omega).unwrap();
        let a = omega.prob(0, 1);
        let b = omega.prob(1, 0);
        assert!((dist.pi()[0] - b / (a + b)).abs() < 1e-14);
        assert!((dist.pi()[1] - a / (a + b)).abs() < 1e-14);
    }

    #[test]
    fn headline_parameters_stationary_is_positive_and_balanced() {
        let pr = gamma_params(150, 50, 1.9, 0.8);
        let omega = build_transition_matrix(&pr).unwrap();
        let dist = stationary_distribution(&omega).unwrap();
        assert!(dist.residual() < 1e-10);
        assert!(dist.pi().iter().all(|&p| p > 0.0));
        let sum: f64 = dist.pi().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn potential_wells_sit_at_equilibria() {
        let beta = 1.9;
        let hs = h_star(beta, 1.0, NoiseKind::Gumbel).unwrap();
        let n = 150;
        let ep = trajectory_endpoints(&params(n, 1, beta, 0.0), 0.8).unwrap();
        for k in [1usize, 10, 50, 100, 150] {
            let pr = params(n, k, beta, 0.8 * hs);
            let omega = build_transition_matrix(&pr).unwrap();
            let dist = stationary_distribution(&omega).unwrap();
            let v = potential_from_pi(&dist);

            // argmin V = argmax pi.
            let argmin_v = (0..v.len()).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
            let argmax_pi = (0..v.len())
                .max_by(|&a, &b| dist.pi()[a].total_cmp(&dist.pi()[b]))
                .unwrap();
            assert_eq!(argmin_v, argmax_pi);

            // Double-well: global minimum near the stable state and a local
            // minimum near the metastable one.
            assert!(argmin_v.abs_diff(ep.i_stable) <= 2, "k={k}: {argmin_v}");
            let lo = ep.i_meta.saturating_sub(3);
            let hi = ep.i_meta + 3;
            let local_min =
                (lo..=hi).any(|i| i > 0 && i + 1 < v.len() && v[i] <= v[i - 1] && v[i] <= v[i + 1]);
            assert!(local_min, "k={k}: no local minimum near {}", ep.i_meta);
        }
    }

    #[test]
    fn potential_invariant_under_rescaling() {
        let pi = vec![0.2, 0.5, 0.3];
        let scaled: Vec<f64> = pi.iter().map(|p| p * 7.3).collect();
        let v1 = potential_from_probabilities(&pi);
        let v2 = potential_from_probabilities(&scaled);
        for (a, b) in v1.iter().zip(&v2) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(v1[1], 0.0);
    }

    #[test]
    fn fundamental_matrix_identities() {
        let pr = gamma_params(60, 10, 1.9, 0.8);
        let omega = build_transition_matrix(&pr).unwrap();
        let dist = stationary_distribution(&omega).unwrap();
        let z = fundamental_matrix(&omega, &dist).unwrap();
        let n = omega.n_states();

        let pi_mat = Matrix::from_fn(n, n, |_, j| dist.pi()[j]);
        let ones = Matrix::from_fn(n, n, |_, _| 1.0);
        let omega_mat = Matrix::from_fn(n, n, |i, j| omega.prob(i, j));

        // Z Pi = Pi Z = Pi
        assert!(z.matmul(&pi_mat).max_abs_diff(&pi_mat) < 1e-9);
        assert!(pi_mat.matmul(&z).max_abs_diff(&pi_mat) < 1e-9);
        // Z E = E (row sums of Z are 1). The transposed product E Z = E
        // does not hold for row-stochastic chains: column sums of Z differ
        // from 1 whenever Omega is not doubly stochastic.
        assert!(z.matmul(&ones).max_abs_diff(&ones) < 1e-9);
        // Z (I - Omega) = I - Pi
        let i_minus_omega = Matrix::from_fn(n, n, |i, j| {
            (if i == j { 1.0 } else { 0.0 }) - omega_mat[(i, j)]
        });
        let i_minus_pi = Matrix::from_fn(n, n, |i, j| {
            (if i == j { 1.0 } else { 0.0 }) - pi_mat[(i, j)]
        });
        assert!(z.matmul(&i_minus_omega).max_abs_diff(&i_minus_pi) < 1e-9);
        // Z Omega = Omega Z
        assert!(z.matmul(&omega_mat).max_abs_diff(&omega_mat.matmul(&z)) < 1e-9);
        // pi Z = pi
        let pi_z = z.vecmat(dist.pi());
        for (a, b) in pi_z.iter().zip(dist.pi()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn kac_recurrence_identity() {
        let pr = gamma_params(50, 7, 1.9, 0.8);
        let omega = build_transition_matrix(&pr).unwrap();
        let dist = stationary_distribution(&omega).unwrap();
        let z = fundamental_matrix(&omega, &dist).unwrap();
        let t = mean_hitting_times(&z, &dist);
        for j in 0..omega.n_states() {
            assert!(rel_err(t[(j, j)], 1.0 / dist.pi()[j]) < 1e-10);
        }
    }

    #[test]
    fn two_state_hitting_moments_are_geometric() {
        let pr = params(1, 1, 1.2, 0.4);
        let omega = build_transition_matrix(&pr).unwrap();
        let p = omega.prob(0, 1);

        let hit = hitting_times_linear_solve(&omega, 1).unwrap();
        assert!(rel_err(hit.mean[0], 1.0 / p) < 1e-14);
        assert!(rel_err(hit.second_moment[0], (2.0 - p) / (p * p)) < 1e-13);

        let dist = stationary_distribution(&omega).unwrap();
        let analysis = hitting_analysis(&omega, &dist).unwrap();
        assert!(rel_err(analysis.t[(0, 1)], 1.0 / p) < 1e-12);
        assert!(rel_err(analysis.t2[(0, 1)], (2.0 - p) / (p * p)) < 1e-12);
        // Var of the geometric hitting time: (1-p)/p^2.
        assert!(rel_err(analysis.var[(0, 1)], (1.0 - p) / (p * p)) < 1e-11);
    }

    #[test]
    fn dual_route_agreement_and_recurrence_residuals() {
        let pr = gamma_params(60, 6, 1.9, 0.8);
        let ep = trajectory_endpoints(&pr, 0.8).unwrap();
        let omega = build_transition_matrix(&pr).unwrap();
        let dist = stationary_distribution(&omega).unwrap();
        let z = fundamental_matrix(&omega, &dist).unwrap();
        let n = omega.n_states();

        // Targets in the stable well, where pi_target is order one. The
        // fundamental route computes T_ij as a difference of Z entries over
        // pi_j, so low-pi targets (the metastable and unstable states, or
        // the excluded corners) lose relative accuracy in that difference;
        // the trajectories of interest always end in the stable well.
        for target in [ep.i_stable, ep.i_stable - 1, 60] {
            let fund = hitting_moments_into(&z, &dist, target);
            let hit = hitting_times_linear_solve(&omega, target).unwrap();
            for i in 0..n {
                if i == target {
                    continue;
                }
                assert!(
                    rel_err(hit.mean[i], fund.mean[i]) < 1e-8,
                    "mean {i}->{target}"
                );
                assert!(
                    rel_err(hit.second_moment[i], fund.second_moment[i]) < 1e-8,
                    "second {i}->{target}"
                );
            }
        }

        // Substituting T and T2 back into the defining recurrences:
        // T_ij = 1 + sum_{m != j} Omega_im T_mj, and likewise for T2, over
        // the columns with resolvable scales (mean recurrence <= 1e10).
        let analysis = hitting_analysis(&omega, &dist).unwrap();
        let mut worst = 0.0f64;
        for j in 0..n {
            if 1.0 / dist.pi()[j] > 1e10 {
                continue;
            }
            for i in 0..n {
                if i == j {
                    continue;
                }
                let mut acc1 = 1.0;
                let mut acc2 = 1.0;
                for m in 0..n {
                    if m == j {
                        continue;
                    }
                    acc1 += omega.prob(i, m) * analysis.t[(m, j)];
                    acc2 += omega.prob(i, m) * (analysis.t2[(m, j)] + 2.0 * analysis.t[(m, j)]);
                }
                worst = worst.max(rel_err(acc1, analysis.t[(i, j)]));
                worst = worst.max(rel_err(acc2, analysis.t2[(i, j)]));
            }
        }
        assert!(worst < 1e-8, "recurrence residual {worst}");
    }

    #[test]
    fn diagonal_second_moment_identity() {
        let pr = gamma_params(40, 5, 1.9, 0.8);
        let omega = build_transition_matrix(&pr).unwrap();
        let dist = stationary_distribution(&omega).unwrap();
        let analysis = hitting_analysis(&omega, &dist).unwrap();
        for j in 0..omega.n_states() {
            let pi_j = dist.pi()[j];
            let expected = -1.0 / pi_j + 2.0 * analysis.z[(j, j)] / (pi_j * pi_j);
            assert!(rel_err(analysis.t2[(j, j)], expected) < 1e-9, "j={j}");
        }
    }

    #[test]
    fn hitting_times_are_at_least_one_and_variances_nonnegative() {
        let pr = gamma_params(40, 3, 1.9, 0.8);
        let omega = build_transition_matrix(&pr).unwrap();
        let dist = stationary_distribution(&omega).unwrap();
        let analysis = hitting_analysis(&omega, &dist).unwrap();
        let n = omega.n_states();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    assert!(analysis.t[(i, j)] >= 1.0);
                    assert!(analysis.t2[(i, j)] >= analysis.t[(i, j)].powi(2) - 1e-9);
                }
                assert!(analysis.var[(i, j)] >= 0.0);
            }
        }
    }

    #[test]
    fn hitting_curve_normalization_and_shape() {
        // N = 40 metastable -> stable: the non-monotone shape is already
        // visible at this size (interior minimum below 1).
        let base = gamma_params(40, 1, 1.9, 0.8);
        let ep = trajectory_endpoints(&base, 0.8).unwrap();
        let curve = hitting_curve(&base, ep.i_meta, ep.i_stable).unwrap();
        assert_eq!(curve.k.len(), 40);
        assert_eq!(curve.r_tau[0], 1.0);
        assert_eq!(curve.r_sigma[0], 1.0);
        let (argmin, &min) = curve
            .r_tau
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert!(argmin > 0 && argmin < 39, "argmin k = {}", argmin + 1);
        assert!(min < 1.0);
        assert!(curve.t_var.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn linear_solve_rejects_bad_target() {
        let pr = params(5, 1, 1.0, 0.0);
        let omega = build_transition_matrix(&pr).unwrap();
        assert!(hitting_times_linear_solve(&omega, 9).is_err());
    }
}
