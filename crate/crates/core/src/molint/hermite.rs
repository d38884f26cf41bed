//! McMurchie–Davidson building blocks: Hermite expansion coefficients of
//! Gaussian overlap distributions and Hermite Coulomb integrals R_{tuv}.

use super::boys::boys_array;

/// Maximum `i` and `j` tabulated (j up to 3 is needed for kinetic energy).
pub(crate) const IJ_MAX: usize = 4;
const T_MAX: usize = 2 * IJ_MAX;

/// E^{ij}_t for one Cartesian direction.
#[derive(Clone, Copy)]
pub(crate) struct Hermite1D {
    e: [[[f64; T_MAX]; IJ_MAX]; IJ_MAX],
}

impl Hermite1D {
    /// Coefficients for `i ≤ imax`, `j ≤ jmax`, with `p = a + b`,
    /// `xpa = P − A`, `xpb = P − B` and `k = exp(−ab/p · X_AB²)`.
    pub(crate) fn new(imax: usize, jmax: usize, p: f64, xpa: f64, xpb: f64, k: f64) -> Self {
        debug_assert!(imax < IJ_MAX && jmax < IJ_MAX);
        let mut e = [[[0.0; T_MAX]; IJ_MAX]; IJ_MAX];
        let h = 0.5 / p;
        e[0][0][0] = k;
        for j in 0..jmax {
            for t in 0..=j + 1 {
                let mut v = xpb * e[0][j][t];
                if t > 0 {
                    v += h * e[0][j][t - 1];
                }
                if t < j {
                    v += (t + 1) as f64 * e[0][j][t + 1];
                }
                e[0][j + 1][t] = v;
            }
        }
        for i in 0..imax {
            for j in 0..=jmax {
                for t in 0..=i + j + 1 {
                    let mut v = if t <= i + j { xpa * e[i][j][t] } else { 0.0 };
                    if t > 0 {
                        v += h * e[i][j][t - 1];
                    }
                    if t < i + j {
                        v += (t + 1) as f64 * e[i][j][t + 1];
                    }
                    e[i + 1][j][t] = v;
                }
            }
        }
        Self { e }
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize, t: usize) -> f64 {
        self.e[i][j][t]
    }
}

pub(crate) const R_MAX: usize = 5;

/// Hermite Coulomb integrals R^0_{tuv}(α, PC) for t+u+v ≤ `l`, scaled so
/// that R^n_{000} = (−2α)^n F_n(α |PC|²).
pub(crate) struct HermiteR {
    pub(crate) r: [[[f64; R_MAX]; R_MAX]; R_MAX],
}

impl HermiteR {
    pub(crate) fn new(l: usize, alpha: f64, pc: [f64; 3]) -> Self {
        debug_assert!(l < R_MAX);
        let x = alpha * (pc[0] * pc[0] + pc[1] * pc[1] + pc[2] * pc[2]);
        let mut f = [0.0; R_MAX];
        boys_array(l, x, &mut f);
        let mut cur = [[[0.0; R_MAX]; R_MAX]; R_MAX];
        let mut next = [[[0.0; R_MAX]; R_MAX]; R_MAX];
        let m2a = -2.0 * alpha;
        // Work downward in the auxiliary index n; `next` holds level n+1.
        for n in (0..=l).rev() {
            let lim = l - n;
            cur[0][0][0] = m2a.powi(n as i32) * f[n];
            for t in 0..=lim {
                for u in 0..=lim - t {
                    for v in 0..=lim - t - u {
                        if t + u + v == 0 {
                            continue;
                        }
                        let val = if t > 0 {
                            let mut s = pc[0] * next[t - 1][u][v];
                            if t > 1 {
                                s += (t - 1) as f64 * next[t - 2][u][v];
                            }
                            s
                        } else if u > 0 {
                            let mut s = pc[1] * next[t][u - 1][v];
                            if u > 1 {
                                s += (u - 1) as f64 * next[t][u - 2][v];
                            }
                            s
                        } else {
                            let mut s = pc[2] * next[t][u][v - 1];
                            if v > 1 {
                                s += (v - 1) as f64 * next[t][u][v - 2];
                            }
                            s
                        };
                        cur[t][u][v] = val;
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Self { r: next }
    }
}
