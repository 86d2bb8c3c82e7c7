//! Higher-order frequency bookkeeping for the full models: exact dispersive
//! shift of a driven two-level system and sideband Stark shifts.

use num_complex::Complex;

use crate::floquet::QUADRATURE_POINTS;
use crate::scalar::{cabs, cis, Real};

/// Bessel function of the first kind `J_n(x)` by its power series. Only
/// used for the modest arguments (`|x| < 2`) of the sideband expansion.
pub fn bessel_j<T: Real>(n: i32, x: T) -> T {
    let m = n.unsigned_abs() as usize;
    let half = x / T::lit(2.0);
    let mut term = T::one();
    for k in 1..=m {
        term *= half / T::from_usize_lossy(k);
    }
    let mut sum = term;
    let q = -half * half;
    for k in 1..60 {
        term *= q / (T::from_usize_lossy(k) * T::from_usize_lossy(k + m));
        sum += term;
        if term.mag() <= T::eps() * sum.mag() {
            break;
        }
    }
    if n < 0 && m % 2 == 1 {
        -sum
    } else {
        sum
    }
}

/// Mean and first harmonic of the exact level shift
/// `(√(Δ(θ)² + 4g²) − Δ(θ))/2` with `Δ(θ) = Δ_p(1 + λ cos θ)`.
pub fn exact_shift_harmonics<T: Real>(g: T, delta_p: T, lambda: T) -> (T, Complex<T>) {
    let m = QUADRATURE_POINTS;
    let dtheta = <T as nalgebra::RealField>::two_pi() / T::from_usize_lossy(m);
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let mut mean = T::zero();
    let mut first = Complex::new(T::zero(), T::zero());
    for k in 0..m {
        let th = dtheta * T::from_usize_lossy(k);
        let d = delta_p * (T::one() + lambda * th.cos());
        let s = ((d * d + four * g * g).sqrt() - d) / two;
        mean += s;
        first += cis(-th) * s;
    }
    let norm = T::one() / T::from_usize_lossy(m);
    (mean * norm, first * (two * norm))
}

/// Second-order shift of a level detuned by `detuning` from a partner that
/// is frequency-modulated with index `k_index` at `omega_d`, summed over all
/// non-resonant sidebands: `g² Σ_k J_k(K)² / (detuning + k ω_d)`.
pub fn sideband_stark<T: Real>(g: T, detuning: T, omega_d: T, k_index: T) -> T {
    let mut s = T::zero();
    for k in -12..=12 {
        let den = detuning + T::lit(f64::from(k)) * omega_d;
        if den.mag() < T::lit(1e-9) * (detuning.mag() + omega_d.mag()) {
            continue;
        }
        let j = bessel_j(k, k_index);
        s += g * g * j * j / den;
    }
    s
}

/// Modulation index of the exact shift at drive frequency `omega_d`.
pub fn exact_modulation_index<T: Real>(g: T, delta_p: T, lambda: T, omega_d: T) -> T {
    let (_, first) = exact_shift_harmonics(g, delta_p, lambda);
    cabs(first) / omega_d.mag()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_values() {
        // Reference values of J_0, J_1, J_2 at x = 1.
        assert!((bessel_j(0, 1.0f64) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(1, 1.0f64) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j(2, 1.0f64) - 0.114_903_484_931_900_5).abs() < 1e-15);
        assert!((bessel_j(-1, 1.0f64) + 0.440_050_585_744_933_5).abs() < 1e-15);
        assert_eq!(bessel_j(3, 0.0), 0.0);
        assert_eq!(bessel_j(0, 0.0), 1.0);
    }

    #[test]
    fn bessel_sum_rule() {
        let x = 0.7f64;
        let total: f64 = (-15..=15).map(|k| bessel_j(k, x).powi(2)).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_shift_reduces_to_dispersive() {
        let (mean, first) = exact_shift_harmonics(1.0f64, 600.0, 0.0);
        let exact = ((600.0f64 * 600.0 + 4.0).sqrt() - 600.0) / 2.0;
        assert!((mean - exact).abs() < 1e-13);
        assert!(first.norm() < 1e-13);
        // Weak coupling: shift ≈ g²/Δ(θ), whose mean is χ₀/√(1−λ²).
        let (mean, first) = exact_shift_harmonics(0.01f64, 600.0, 0.5);
        let chi0 = 1e-4 / 600.0;
        assert!((mean / (chi0 * 1.154_700_538_379_251_7) - 1.0).abs() < 1e-6);
        assert!((first.norm() / (chi0 * 0.618_802_153_517_006_4) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn stark_reduces_to_static_shift() {
        // No modulation: only k = 0 survives.
        assert!((sideband_stark(1.0f64, 20.0, 15.0, 0.0) - 0.05).abs() < 1e-15);
    }
}
