//! Parameter sets of the reference figures. Frequencies in MHz.

use crate::dynamics::{DetuningCalibration, PumpQubit, Resonance, ThreeSiteFullSpec, ThreeSiteMode, TwoSiteFullSpec};
use crate::floquet::{DriveSpec, DEFAULT_NMAX};
use crate::scalar::Real;

/// Harmonic decomposition inset: `λ = 0.5`, `φ = 0`, harmonics up to 8.
pub fn figure2<T: Real>() -> (DriveSpec<T>, usize) {
    let drive = DriveSpec::new(T::lit(0.5), T::lit(15.0), T::zero()).expect("valid preset");
    (drive, DEFAULT_NMAX)
}

/// Two-cavity Rabi test. The drive is fixed through `λ = 0.5`; the quoted
/// pump amplitude does not enter.
pub fn figure3<T: Real>() -> TwoSiteFullSpec<T> {
    TwoSiteFullSpec {
        g12: T::one(),
        g_p: T::lit(60.0),
        delta_p: T::lit(600.0),
        lambda: T::lit(0.5),
        omega_d: T::lit(15.0),
        phi: T::zero(),
        resonance: Resonance::Lower,
        boson_dim: 3,
        calibration: DetuningCalibration::Exact,
    }
}

/// Three-cavity loop, zero flux. Use [`ThreeSiteFullSpec::with_flux`].
pub fn figure5<T: Real>(mode: ThreeSiteMode) -> ThreeSiteFullSpec<T> {
    let pump = PumpQubit {
        g_p: T::lit(60.0),
        delta_p: T::lit(600.0),
        lambda: T::lit(0.5),
        phi: T::zero(),
    };
    ThreeSiteFullSpec {
        g12: T::lit(0.042),
        g13: T::lit(1.1),
        g23: T::lit(1.1),
        omega_d: T::lit(-20.0),
        pumps: vec![pump, pump],
        mode,
        boson_dim: 3,
        stark_compensation: true,
    }
}

/// Port loss of the loop circulator.
pub const FIGURE5_KAPPA: f64 = 0.2;

/// Four-site interference loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Figure7<T> {
    pub j: T,
    pub kappa: T,
    /// Path losses of the two curves.
    pub kappa_p: [T; 2],
}

pub fn figure7<T: Real>() -> Figure7<T> {
    let kappa = T::lit(0.2);
    Figure7 {
        j: T::lit(0.1),
        kappa,
        kappa_p: [T::lit(0.1) * kappa, kappa],
    }
}
