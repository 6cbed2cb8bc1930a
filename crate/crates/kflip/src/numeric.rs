//! Shared numeric helpers: log-factorials, log-sum-exp, quadrature and
//! bracketed root/extremum searches.

/// Table of ln(n!) for n = 0..=max, built once and indexed thereafter.
#[derive(Debug, Clone)]
pub struct LnFactorials {
    table: Vec<f64>,
}

impl LnFactorials {
    pub fn up_to(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        table.push(0.0);
        for n in 1..=max {
            table.push(table[n - 1] + (n as f64).ln());
        }
        Self { table }
    }

    #[inline]
    pub fn ln_factorial(&self, n: usize) -> f64 {
        self.table[n]
    }

    /// ln C(n, r); `None` when the coefficient is zero (r out of range).
    #[inline]
    pub fn ln_choose(&self, n: usize, r: i64) -> Option<f64> {
        if r < 0 || r as usize > n {
            return None;
        }
        let r = r as usize;
        Some(self.table[n] - self.table[r] - self.table[n - r])
    }
}

/// log(sum exp(terms)), anchored at the maximum term. Returns -inf for an
/// empty or all-(-inf) slice.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = terms.iter().map(|&t| (t - max).exp()).sum();
    max + sum.ln()
}

/// Cumulative integral of sampled values on a grid, by composite Simpson:
/// each pair of consecutive intervals is integrated with the quadratic
/// through its three nodes (both half-panel increments are kept, so the
/// cumulative value is available at every grid point). An odd trailing
/// interval reuses the quadratic through the last three nodes.
///
/// Returns the running integral, `out[0] = 0`.
pub fn cumulative_simpson(x: &[f64], f: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), f.len());
    let n = x.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * (f[0] + f[1]) * (x[1] - x[0]);
        return out;
    }
    let mut m = 0;
    while m + 2 < n {
        let (i0, i1, i2) = (m, m + 1, m + 2);
        let (a1, a2) = quadratic_panel(x[i0], x[i1], x[i2], f[i0], f[i1], f[i2]);
        out[i1] = out[i0] + a1;
        out[i2] = out[i1] + a2;
        m += 2;
    }
    if m + 1 < n {
        // Odd interval count: integrate the last interval with the quadratic
        // through the final three nodes.
        let (i0, i1, i2) = (n - 3, n - 2, n - 1);
        let a2 = quadratic_tail(x[i0], x[i1], x[i2], f[i0], f[i1], f[i2]);
        out[i2] = out[i1] + a2;
    }
    out
}

/// Integrals of the interpolating quadratic over [x0,x1] and [x1,x2].
/// For uniform spacing these reduce to (h/12)(5f0+8f1-f2) and
/// (h/12)(-f0+8f1+5f2).
fn quadratic_panel(x0: f64, x1: f64, x2: f64, f0: f64, f1: f64, f2: f64) -> (f64, f64) {
    let h0 = x1 - x0;
    let h1 = x2 - x1;
    let h = h0 + h1;
    let a1 = (h0 / 6.0)
        * (f0 * (2.0 * h0 + 3.0 * h1) / h + f1 * (h0 + 3.0 * h1) / h1 - f2 * h0 * h0 / (h * h1));
    let a2 = (h1 / 6.0)
        * (f2 * (2.0 * h1 + 3.0 * h0) / h + f1 * (h1 + 3.0 * h0) / h0 - f0 * h1 * h1 / (h * h0));
    (a1, a2)
}

/// Integral over the last interval [x1,x2] of the quadratic through
/// (x0,f0),(x1,f1),(x2,f2).
fn quadratic_tail(x0: f64, x1: f64, x2: f64, f0: f64, f1: f64, f2: f64) -> f64 {
    let (_, a2) = quadratic_panel(x0, x1, x2, f0, f1, f2);
    a2
}

/// Bisection for a root of `g` inside a bracket with g(lo) and g(hi) of
/// opposite sign. Runs to floating-point interval collapse or `width_tol`.
pub fn bisect<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64, width_tol: f64) -> f64 {
    let mut g_lo = g(lo);
    if g_lo == 0.0 {
        return lo;
    }
    let g_hi = g(hi);
    if g_hi == 0.0 {
        return hi;
    }
    debug_assert!(g_lo * g_hi < 0.0, "bisect requires a sign-change bracket");
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (hi - lo) < width_tol {
            return mid;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if g_lo * g_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            g_lo = g_mid;
        }
    }
}

/// Golden-section maximum of a unimodal `f` on [lo, hi] to tolerance `tol`
/// in the abscissa.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
        if x2 <= x1 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `count` evenly spaced points covering [lo, hi] inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2, "linspace needs at least two points");
    let step = (hi - lo) / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i == count - 1 {
                hi
            } else {
                lo + step * i as f64
            }
        })
        .collect()
}

/// SplitMix64 finalizer; used to derive independent per-sample RNG seeds.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
