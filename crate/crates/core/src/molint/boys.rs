//! Boys function F_m(x) = ∫_0^1 t^{2m} e^{-x t^2} dt.
//!
//! The highest order needed is seeded from a Taylor expansion around a
//! tabulated grid (the table itself comes from the convergent series) or,
//! for large x, from the asymptotic form; lower orders follow by downward
//! recursion.

use std::sync::OnceLock;

/// Highest order callers may request.
pub const MAX_ORDER: usize = 8;
const TAYLOR_TERMS: usize = 8;
const GRID_STEP: f64 = 0.05;
const GRID_MAX: f64 = 40.0;
const TABLE_ORDERS: usize = MAX_ORDER + TAYLOR_TERMS + 1;

/// Series evaluation, accurate to ~1e-16 relative for x ≤ 50.
pub fn boys_series(m: usize, x: f64) -> f64 {
    let mut term = 1.0 / (2 * m + 1) as f64;
    let mut sum = term;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= 2.0 * x / (2 * m + 2 * k + 1) as f64;
        sum += term;
        if term < 1e-18 * sum || k > 2000 {
            break;
        }
    }
    (-x).exp() * sum
}

fn table() -> &'static Vec<[f64; TABLE_ORDERS]> {
    static T: OnceLock<Vec<[f64; TABLE_ORDERS]>> = OnceLock::new();
    T.get_or_init(|| {
        let n = (GRID_MAX / GRID_STEP).round() as usize + 1;
        (0..n)
            .map(|i| {
                let x = i as f64 * GRID_STEP;
                let mut row = [0.0; TABLE_ORDERS];
                for (m, r) in row.iter_mut().enumerate() {
                    *r = boys_series(m, x);
                }
                row
            })
            .collect()
    })
}

/// Fill `out[0..=m_max]` with F_0(x) … F_{m_max}(x).
pub fn boys_array(m_max: usize, x: f64, out: &mut [f64]) {
    assert!(m_max <= MAX_ORDER, "Boys order {m_max} above supported maximum");
    let ex = (-x).exp();
    if x >= GRID_MAX {
        // Asymptotic seed; e^{-x} < 5e-18 so upward recursion is exact to
        // working precision in this regime.
        out[0] = 0.5 * (std::f64::consts::PI / x).sqrt();
        for m in 0..m_max {
            out[m + 1] = ((2 * m + 1) as f64 * out[m] - ex) / (2.0 * x);
        }
        return;
    }
    let t = table();
    let i = (x / GRID_STEP).round() as usize;
    let dx = i as f64 * GRID_STEP - x;
    let row = &t[i];
    let mut f = 0.0;
    let mut c = 1.0;
    for k in 0..TAYLOR_TERMS {
        f += row[m_max + k] * c;
        c *= dx / (k + 1) as f64;
    }
    out[m_max] = f;
    for m in (1..=m_max).rev() {
        out[m - 1] = (2.0 * x * out[m] + ex) / (2 * m - 1) as f64;
    }
}

/// Single value F_m(x).
pub fn boys(m: usize, x: f64) -> f64 {
    let mut out = [0.0; MAX_ORDER + 1];
    boys_array(m, x, &mut out);
    out[m]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_argument() {
        for m in 0..=MAX_ORDER {
            assert!((boys(m, 0.0) - 1.0 / (2 * m + 1) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn asymptotic_region() {
        for &x in &[30.5, 35.0, 39.99, 40.0, 55.0, 200.0] {
            let f = boys(0, x);
            assert!((f - 0.5 * (std::f64::consts::PI / x).sqrt()).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn matches_series_between_grid_points() {
        for k in 0..4000 {
            let x = k as f64 * 0.0101;
            for m in 0..=MAX_ORDER {
                let a = boys(m, x);
                let b = boys_series(m, x);
                assert!((a - b).abs() < 1e-14, "m={m} x={x} {a} {b}");
            }
        }
    }
}
