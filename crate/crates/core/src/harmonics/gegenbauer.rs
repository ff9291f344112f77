use std::f64::consts::PI;

use crate::sphere::{ln_factorial, ln_gamma};

/// Gegenbauer polynomial C_l^λ(x) by the three-term recurrence
/// l·C_l = 2x(l+λ-1)·C_{l-1} - (l+2λ-2)·C_{l-2}.
pub fn gegenbauer(l: usize, lambda: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if l == 0 {
        return prev;
    }
    let mut cur = 2.0 * lambda * x;
    for m in 2..=l {
        let mf = m as f64;
        let next = (2.0 * x * (mf + lambda - 1.0) * cur - (mf + 2.0 * lambda - 2.0) * prev) / mf;
        prev = cur;
        cur = next;
    }
    cur
}

/// C_0^λ(x), ..., C_max^λ(x) written into `out` (length `max + 1`).
pub fn gegenbauer_all(max: usize, lambda: f64, x: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if max == 0 {
        return;
    }
    out[1] = 2.0 * lambda * x;
    for m in 2..=max {
        let mf = m as f64;
        out[m] = (2.0 * x * (mf + lambda - 1.0) * out[m - 1]
            - (mf + 2.0 * lambda - 2.0) * out[m - 2])
            / mf;
    }
}

/// ∫_{-1}^{1} (1-x²)^{λ-1/2} C_l^λ(x)² dx = π 2^{1-2λ} Γ(l+2λ) / (l! (l+λ) Γ(λ)²).
pub fn gegenbauer_norm_sq(l: usize, lambda: f64) -> f64 {
    let lf = l as f64;
    let log = PI.ln() + (1.0 - 2.0 * lambda) * 2.0f64.ln() + ln_gamma(lf + 2.0 * lambda)
        - ln_factorial(l)
        - (lf + lambda).ln()
        - 2.0 * ln_gamma(lambda);
    log.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::gauss_legendre;

    #[test]
    fn low_order_values() {
        assert_eq!(gegenbauer(0, 0.5, 0.3), 1.0);
        assert!((gegenbauer(1, 0.5, 0.3) - 0.3).abs() < 1e-15);
        assert!((gegenbauer(2, 0.5, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn half_order_is_legendre() {
        // P_3(x) = (5x³ - 3x)/2
        for &x in &[-0.9, -0.2, 0.0, 0.4, 0.77] {
            let p3 = 0.5 * (5.0 * x * x * x - 3.0 * x);
            assert!((gegenbauer(3, 0.5, x) - p3).abs() < 1e-14);
        }
    }

    #[test]
    fn batch_matches_scalar() {
        let mut out = [0.0; 9];
        gegenbauer_all(8, 2.5, -0.37, &mut out);
        for (l, v) in out.iter().enumerate() {
            assert!((v - gegenbauer(l, 2.5, -0.37)).abs() < 1e-12);
        }
    }

    #[test]
    fn norm_matches_quadrature() {
        // integer λ - 1/2 exponents keep the integrand polynomial
        let (x, w) = gauss_legendre(40);
        for j in 0..4usize {
            let lambda = j as f64 + 0.5;
            for l in 0..7 {
                let q: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(&t, &wt)| {
                        wt * (1.0 - t * t).powi(j as i32) * gegenbauer(l, lambda, t).powi(2)
                    })
                    .sum();
                let exact = gegenbauer_norm_sq(l, lambda);
                assert!(
                    (q - exact).abs() < 1e-11 * exact.max(1.0),
                    "l={l} j={j}: {q} vs {exact}"
                );
            }
        }
    }
}
