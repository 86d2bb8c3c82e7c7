//! Fourier analysis of the modulated dispersive shift and the coupling
//! constants derived from it.
//!
//! A longitudinal drive turns the qubit detuning into
//! `Δ(t) = Δ_p (1 + λ cos(ω_d t + φ))`, so the dispersive shift
//! `χ(t) = χ₀ / (1 + λ cos(ω_d t + φ))` carries every harmonic of `ω_d`.
//! [`Harmonics`] stores the complex coefficients `cₙ` of that series.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cabs, carg, cis, Real};

/// Number of trapezoid nodes used by [`chi_harmonics`].
pub const QUADRATURE_POINTS: usize = 4096;

/// Default harmonic cutoff.
pub const DEFAULT_NMAX: usize = 8;

/// Longitudinal drive on a p-qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec<T> {
    /// `λ = Ω_p / Δ_p`.
    pub lambda: T,
    /// Drive frequency in MHz (sign selects the resonance branch).
    pub omega_d: T,
    /// Drive phase in rad.
    pub phi: T,
}

impl<T: Real> DriveSpec<T> {
    pub fn new(lambda: T, omega_d: T, phi: T) -> Result<Self> {
        check_lambda(lambda)?;
        if omega_d == T::zero() || !omega_d.is_finite() {
            return Err(Error::param("omega_d", omega_d.as_f64(), "must be finite and nonzero"));
        }
        Ok(Self { lambda, omega_d, phi })
    }

    /// Builds the drive from the raw amplitude `Ω_p` and detuning `Δ_p`.
    pub fn from_amplitude(omega_p: T, delta_p: T, omega_d: T, phi: T) -> Result<Self> {
        if delta_p == T::zero() {
            return Err(Error::param("delta_p", 0.0, "must be nonzero"));
        }
        Self::new((omega_p / delta_p).mag(), omega_d, phi)
    }
}

fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if !(lambda >= T::zero()) {
        return Err(Error::param("lambda", lambda.as_f64(), "must be >= 0"));
    }
    if !(lambda < T::one()) {
        return Err(Error::param(
            "lambda",
            lambda.as_f64(),
            "must be < 1 (the dispersive shift diverges)",
        ));
    }
    Ok(())
}

fn check_nmax(n_max: usize) -> Result<()> {
    if n_max == 0 {
        return Err(Error::param("n_max", 0.0, "must be >= 1"));
    }
    Ok(())
}

/// Fourier coefficients of `1 / (1 + λ cos(θ + φ))`.
///
/// The series reads `c₀ + Σₙ Re(cₙ e^{inθ})`, so `c₀` is the mean value and
/// `cₙ = ξₙ e^{iφₙ}` for `n ≥ 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Harmonics<T> {
    pub lambda: T,
    pub phi: T,
    pub coeffs: Vec<Complex<T>>,
}

impl<T: Real> Harmonics<T> {
    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn c(&self, n: usize) -> Complex<T> {
        self.coeffs[n]
    }

    /// Mean value `c₀`.
    pub fn c0(&self) -> T {
        self.coeffs[0].re
    }

    /// Amplitude `ξₙ = |cₙ|`.
    pub fn xi(&self, n: usize) -> T {
        cabs(self.coeffs[n])
    }

    /// Phase `φₙ = arg cₙ` in `(-π, π]`.
    pub fn phase(&self, n: usize) -> T {
        carg(self.coeffs[n])
    }

    /// Evaluates the truncated series at `θ`.
    pub fn eval(&self, theta: T) -> T {
        let mut acc = self.c0();
        for (n, c) in self.coeffs.iter().enumerate().skip(1) {
            acc += (*c * cis(T::from_usize_lossy(n) * theta)).re;
        }
        acc
    }
}

/// Geometric ratio `r = (1 − √(1−λ²))/λ` of the harmonic series.
pub fn decay_ratio<T: Real>(lambda: T) -> T {
    if lambda == T::zero() {
        return T::zero();
    }
    (T::one() - (T::one() - lambda * lambda).sqrt()) / lambda
}

/// Harmonics by trapezoidal quadrature over one period.
pub fn chi_harmonics<T: Real>(drive: &DriveSpec<T>, n_max: usize) -> Result<Harmonics<T>> {
    check_lambda(drive.lambda)?;
    check_nmax(n_max)?;
    let m = QUADRATURE_POINTS;
    let dtheta = <T as nalgebra::RealField>::two_pi() / T::from_usize_lossy(m);
    let mut acc = vec![Complex::new(T::zero(), T::zero()); n_max + 1];
    for k in 0..m {
        let tau = dtheta * T::from_usize_lossy(k);
        let w = T::one() / (T::one() + drive.lambda * (tau + drive.phi).cos());
        for (n, a) in acc.iter_mut().enumerate() {
            *a += cis(-T::from_usize_lossy(n) * tau) * w;
        }
    }
    // Mean for n = 0, twice the mean for the cosine amplitudes.
    let norm = T::one() / T::from_usize_lossy(m);
    let coeffs = acc
        .into_iter()
        .enumerate()
        .map(|(n, a)| {
            let s = if n == 0 { norm } else { norm + norm };
            if n == 0 {
                Complex::new(a.re * s, T::zero())
            } else {
                a * s
            }
        })
        .collect();
    Ok(Harmonics {
        lambda: drive.lambda,
        phi: drive.phi,
        coeffs,
    })
}

/// Harmonics from the analytic series `cₙ = 2(−r)ⁿ e^{inφ} / √(1−λ²)`.
pub fn chi_harmonics_closed_form<T: Real>(drive: &DriveSpec<T>, n_max: usize) -> Result<Harmonics<T>> {
    check_lambda(drive.lambda)?;
    check_nmax(n_max)?;
    let lam = drive.lambda;
    let s = (T::one() - lam * lam).sqrt();
    let r = decay_ratio(lam);
    let mut coeffs = Vec::with_capacity(n_max + 1);
    coeffs.push(Complex::new(T::one() / s, T::zero()));
    let mut amp = T::lit(2.0) / s;
    for n in 1..=n_max {
        amp *= -r;
        coeffs.push(cis(T::from_usize_lossy(n) * drive.phi) * amp);
    }
    Ok(Harmonics {
        lambda: lam,
        phi: drive.phi,
        coeffs,
    })
}

/// Threshold on `|K₁|` beyond which the Bessel expansion is unreliable.
pub const K_VALIDITY: f64 = 0.5;

/// Dimensionless drive strengths `Kₙ = χ₀ ξₙ / (n ω_d)` for `n = 1..=n_max`.
pub fn drive_strengths<T: Real>(chi0: T, omega_d: T, h: &Harmonics<T>) -> Result<Vec<T>> {
    if omega_d == T::zero() {
        return Err(Error::param("omega_d", 0.0, "must be nonzero"));
    }
    let k: Vec<T> = (1..=h.n_max())
        .map(|n| chi0 * h.xi(n) / (T::from_usize_lossy(n) * omega_d))
        .collect();
    if k[0].mag() >= T::lit(K_VALIDITY) {
        log::warn!(
            "|K1| = {:.4} >= {K_VALIDITY}: the first-order sideband expansion is unreliable",
            k[0].mag().as_f64()
        );
    }
    Ok(k)
}

/// Ratio below which `|Δ|/g` leaves the dispersive regime.
pub const DISPERSIVE_RATIO: f64 = 5.0;

/// `χ₀ = g_p² / Δ_p`.
pub fn dispersive_shift<T: Real>(g_p: T, delta_p: T) -> Result<T> {
    if delta_p == T::zero() {
        return Err(Error::param("delta_p", 0.0, "must be nonzero"));
    }
    warn_dispersive("delta_p", g_p, delta_p);
    Ok(g_p * g_p / delta_p)
}

fn warn_dispersive<T: Real>(name: &str, g: T, delta: T) {
    if delta.mag() < T::lit(DISPERSIVE_RATIO) * g.mag() {
        log::warn!(
            "|{name}| = {} < {DISPERSIVE_RATIO}·g = {}: outside the dispersive regime",
            delta.mag(),
            T::lit(DISPERSIVE_RATIO) * g.mag()
        );
    }
}

/// Dispersive shift of a Kerr resonator with anharmonicity `kerr`:
/// `χ′₀ = −g² K / (Δ(Δ − K))`.
pub fn kerr_dispersive_shift<T: Real>(g_p: T, delta_p: T, kerr: T) -> Result<T> {
    if delta_p == T::zero() {
        return Err(Error::param("delta_p", 0.0, "must be nonzero"));
    }
    if delta_p == kerr {
        return Err(Error::param("kerr", kerr.as_f64(), "pole at delta_p = kerr"));
    }
    Ok(-(g_p * g_p * kerr) / (delta_p * (delta_p - kerr)))
}

/// Qubit-mediated dispersive coupling of two cavities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersiveSpec<T> {
    pub g_p: T,
    pub delta_p: T,
    pub chi0: T,
}

impl<T: Real> DispersiveSpec<T> {
    pub fn new(g_p: T, delta_p: T) -> Result<Self> {
        Ok(Self {
            g_p,
            delta_p,
            chi0: dispersive_shift(g_p, delta_p)?,
        })
    }
}

/// Cavity–cavity hopping mediated by a far-detuned c-qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MediatedCoupling<T> {
    pub g12: T,
    /// Detuning including the qubit-induced shifts.
    pub delta12_prime: T,
    /// Renormalized detuning, once computed by [`renormalized_detuning`].
    pub delta12: Option<T>,
}

/// `g₁₂ = (g₁g₂/2)(1/Δ₁ + 1/Δ₂)` and `δ′₁₂ = (Δ₂ − Δ₁)(1 − g₁g₂/(Δ₁Δ₂))`.
pub fn mediated_coupling<T: Real>(g1: T, g2: T, delta1: T, delta2: T) -> Result<MediatedCoupling<T>> {
    if delta1 == T::zero() {
        return Err(Error::param("delta1", 0.0, "must be nonzero"));
    }
    if delta2 == T::zero() {
        return Err(Error::param("delta2", 0.0, "must be nonzero"));
    }
    warn_dispersive("delta1", g1, delta1);
    warn_dispersive("delta2", g2, delta2);
    let spread = (delta2 - delta1).mag();
    if spread > T::lit(0.2) * delta1.mag().min(delta2.mag()) {
        log::warn!("|delta2 - delta1| = {spread} is not small against the qubit detunings");
    }
    let half = T::lit(0.5);
    let g12 = half * g1 * g2 * (T::one() / delta1 + T::one() / delta2);
    let delta12_prime = (delta2 - delta1) * (T::one() - g1 * g2 / (delta1 * delta2));
    Ok(MediatedCoupling {
        g12,
        delta12_prime,
        delta12: None,
    })
}

/// `δ₁₂ = δ′₁₂ + 2g₁₂²/δ′₁₂ + χ₀ c₀`.
pub fn renormalized_detuning<T: Real>(mc: &MediatedCoupling<T>, chi0: T, c0: T) -> Result<T> {
    if mc.delta12_prime == T::zero() {
        return Err(Error::param(
            "delta12_prime",
            0.0,
            "must be nonzero (resonant cavities need the degenerate treatment)",
        ));
    }
    let two = T::lit(2.0);
    Ok(mc.delta12_prime + two * mc.g12 * mc.g12 / mc.delta12_prime + chi0 * c0)
}

impl<T: Real> MediatedCoupling<T> {
    pub fn renormalized(mut self, chi0: T, c0: T) -> Result<Self> {
        self.delta12 = Some(renormalized_detuning(&self, chi0, c0)?);
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn drive(lambda: f64, phi: f64) -> DriveSpec<f64> {
        DriveSpec::new(lambda, 15.0, phi).unwrap()
    }

    #[test]
    fn half_lambda_values() {
        let h = chi_harmonics(&drive(0.5, 0.0), 8).unwrap();
        assert!((h.c0() - 1.154701).abs() < 1e-6);
        assert!((h.c(1).re + 0.618802).abs() < 1e-6);
        assert!((h.c(2).re - 0.1658075).abs() < 1e-6);
        assert!(h.c(1).im.abs() < 1e-12);
        let cf = chi_harmonics_closed_form(&drive(0.5, 0.0), 8).unwrap();
        assert!((cf.xi(2) / cf.xi(1) - 0.267949).abs() < 1e-6);
        let cf8 = chi_harmonics_closed_form(&drive(0.8, 0.0), 2).unwrap();
        assert!((cf8.c0() - 1.0 / 0.6).abs() < 1e-12);
    }

    #[test]
    fn quadrature_matches_series() {
        for k in 1..=9 {
            let d = drive(k as f64 / 10.0, 0.37);
            let q = chi_harmonics(&d, 8).unwrap();
            let c = chi_harmonics_closed_form(&d, 8).unwrap();
            for n in 0..=8 {
                assert!((q.c(n) - c.c(n)).norm() < 1e-9, "lambda {} n {n}", d.lambda);
            }
        }
    }

    #[test]
    fn small_lambda_limit() {
        let lam = 1e-4;
        let h = chi_harmonics(&drive(lam, 0.0), 2).unwrap();
        assert!((h.c0() - 1.0).abs() <= lam * lam);
        assert!((h.c(1).re + lam).abs() <= lam * lam);
        // phase of c1 is φ + π for φ = 0.3
        let h = chi_harmonics(&drive(lam, 0.3), 2).unwrap();
        assert!((crate::scalar::wrap_angle(h.phase(1) - 0.3 - PI)).abs() < 1e-9);
    }

    #[test]
    fn series_reconstructs_function() {
        let h = chi_harmonics_closed_form(&drive(0.3, 0.2), 30).unwrap();
        for k in 0..10 {
            let th = k as f64 * 0.6;
            let exact = 1.0 / (1.0 + 0.3 * (th + 0.2).cos());
            assert!((h.eval(th) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(DriveSpec::new(1.0, 15.0, 0.0).is_err());
        assert!(DriveSpec::new(-0.1, 15.0, 0.0).is_err());
        assert!(DriveSpec::new(0.5, 0.0, 0.0).is_err());
        let bad = DriveSpec { lambda: 1.2, omega_d: 1.0, phi: 0.0 };
        assert!(chi_harmonics(&bad, 4).is_err());
        assert!(chi_harmonics(&drive(0.5, 0.0), 0).is_err());
        assert!(dispersive_shift(60.0f64, 0.0).is_err());
        assert!(kerr_dispersive_shift(60.0f64, 600.0, 600.0).is_err());
        assert!(mediated_coupling(1.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn drive_strength_values() {
        let chi0 = dispersive_shift(60.0f64, 600.0).unwrap();
        assert!((chi0 - 6.0).abs() < 1e-12);
        assert!((dispersive_shift(60.0f64, -600.0).unwrap() + 6.0).abs() < 1e-12);
        assert_eq!(dispersive_shift(0.0, 600.0).unwrap(), 0.0);
        let h = chi_harmonics(&drive(0.5, 0.0), 8).unwrap();
        let k = drive_strengths(chi0, 15.0, &h).unwrap();
        assert_eq!(k.len(), 8);
        assert!((k[0] - 0.2475).abs() < 1e-3);
        assert!((k[1] / k[0] - decay_ratio(0.5) / 2.0).abs() < 1e-9);
        let h0 = chi_harmonics(&drive(0.0, 0.0), 3).unwrap();
        assert!(drive_strengths(chi0, 15.0, &h0).unwrap().iter().all(|k| k.abs() < 1e-15));
        assert!(drive_strengths(chi0, 0.0, &h).is_err());
    }

    #[test]
    fn kerr_limits() {
        let big = kerr_dispersive_shift(60.0f64, 600.0, 1e9).unwrap();
        assert!((big - 6.0).abs() < 1e-5);
        assert_eq!(kerr_dispersive_shift(60.0f64, 600.0, 0.0).unwrap(), 0.0);
        assert!((kerr_dispersive_shift(60.0f64, 600.0, -300.0).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mediated_coupling_values() {
        let mc = mediated_coupling(60.0f64, 60.0, 600.0, 615.0).unwrap();
        assert!((mc.g12 - 5.9268).abs() < 1e-3);
        assert!((mc.delta12_prime - 14.8537).abs() < 1e-3);
        let eq = mediated_coupling(60.0f64, 60.0, 600.0, 600.0).unwrap();
        assert!((eq.g12 - 6.0).abs() < 1e-12);
        assert_eq!(eq.delta12_prime, 0.0);
        assert!(renormalized_detuning(&eq, 6.0, 1.0).is_err());
        let weak = mediated_coupling(1e-9f64, 1e-9, 600.0, 615.0).unwrap();
        assert!(weak.g12.abs() < 1e-18 && (weak.delta12_prime - 15.0).abs() < 1e-12);
    }

    #[test]
    fn renormalized_detuning_values() {
        let mc = MediatedCoupling { g12: 1.0f64, delta12_prime: 15.0, delta12: None };
        let d = renormalized_detuning(&mc, 6.0, 1.1547).unwrap();
        assert!((d - (15.0 + 2.0 / 15.0 + 6.0 * 1.1547)).abs() < 1e-12);
        assert!((d - 22.06).abs() < 0.01);
        let plain = MediatedCoupling { g12: 0.0f64, delta12_prime: 7.0, delta12: None };
        assert_eq!(renormalized_detuning(&plain, 0.0, 1.0).unwrap(), 7.0);
        let neg = MediatedCoupling { g12: 0.3f64, delta12_prime: -7.0, delta12: None };
        let pos = MediatedCoupling { g12: 0.3f64, delta12_prime: 7.0, delta12: None };
        assert_eq!(
            renormalized_detuning(&neg, 0.0, 1.0).unwrap(),
            -renormalized_detuning(&pos, 0.0, 1.0).unwrap()
        );
        assert!(mc.renormalized(6.0, 1.1547).unwrap().delta12.is_some());
    }

    #[test]
    fn single_precision() {
        let d = DriveSpec::new(0.5f32, 15.0, 0.0).unwrap();
        let h = chi_harmonics(&d, 4).unwrap();
        assert!((h.c0() - 1.154701).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn phase_law(lambda in 0.2f64..0.95, phi in -3.0f64..3.0) {
            let h0 = chi_harmonics(&drive(lambda, 0.0), 6).unwrap();
            let h = chi_harmonics(&drive(lambda, phi), 6).unwrap();
            for n in 1..=6 {
                let rel = h.c(n) * h0.c(n).conj();
                let dphi = crate::scalar::wrap_angle(crate::scalar::carg(rel) - n as f64 * phi);
                prop_assert!(dphi.abs() < 1e-9);
            }
        }

        #[test]
        fn geometric_decay(lambda in 0.01f64..0.95) {
            let h = chi_harmonics_closed_form(&drive(lambda, 0.0), 8).unwrap();
            let r = decay_ratio(lambda);
            prop_assert!(r < 1.0);
            for n in 1..8 {
                prop_assert!((h.xi(n + 1) / h.xi(n) - r).abs() < 1e-8);
                prop_assert!(h.xi(n + 1) < h.xi(n));
            }
            prop_assert!(h.c0() >= 1.0);
        }

        #[test]
        fn small_lambda_residual(lambda in 1e-4f64..0.1) {
            let h = chi_harmonics(&drive(lambda, 0.0), 1).unwrap();
            prop_assert!((h.c0() - 1.0).abs() <= lambda * lambda);
            prop_assert!((h.c(1).re + lambda).abs() <= lambda * lambda);
        }
    }
}
