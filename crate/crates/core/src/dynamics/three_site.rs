use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::calibration::{exact_modulation_index, exact_shift_harmonics, sideband_stark};
use super::peaks::{first_peak, period_average};
use super::two_site::{period_grid, SAMPLES_PER_PERIOD};
use crate::error::{Error, Result};
use crate::floquet::{chi_harmonics, dispersive_shift, drive_strengths, DriveSpec};
use crate::lattice::{three_site_effective, Direction, GaugeLattice};
use crate::quantum::{
    basis_state, build_space, evolve, mode_operator, Envelope, ModeOp, Operator, SpaceDescriptor, SubsystemSpec,
    TimeDependentModel, Trajectory,
};
use crate::scalar::{angular, carg, cplx, Real};

/// Longitudinally driven qubit dispersively coupled to one cavity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PumpQubit<T> {
    pub g_p: T,
    pub delta_p: T,
    pub lambda: T,
    pub phi: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThreeSiteMode {
    /// Cavities and both pump qubits, space `[b1, b2, b3, q1, q2]`.
    WithQubits,
    /// Cavities only; qubits replaced by their first-harmonic frequency
    /// modulation of cavities 1 and 2.
    QubitEliminated,
}

/// Three-cavity loop. Cavities 1 and 2 carry pump qubits; cavity 3 sits
/// `|ω_d|` away so that `δ₁₃ = δ₂₃ = −ω_d`. Frequencies in MHz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreeSiteFullSpec<T> {
    pub g12: T,
    pub g13: T,
    pub g23: T,
    pub omega_d: T,
    pub pumps: Vec<PumpQubit<T>>,
    pub mode: ThreeSiteMode,
    pub boson_dim: usize,
    /// Cancel the static Stark shifts from off-resonant sidebands.
    pub stark_compensation: bool,
}

/// Frequency modulation `amplitude · cos(2π f t + phase)` of one site (MHz).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SiteModulation<T> {
    pub site: usize,
    pub amplitude: T,
    pub frequency: T,
    pub phase: T,
}

/// Number-conserving single-particle Hamiltonian `H(t)` in MHz.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleParticleModel<T: Real> {
    pub static_matrix: DMatrix<Complex<T>>,
    pub modulations: Vec<SiteModulation<T>>,
}

impl<T: Real> SingleParticleModel<T> {
    pub fn n_sites(&self) -> usize {
        self.static_matrix.nrows()
    }

    pub fn matrix_at(&self, t: T) -> DMatrix<Complex<T>> {
        let mut h = self.static_matrix.clone();
        for m in &self.modulations {
            h[(m.site, m.site)] += cplx(m.amplitude * (angular(m.frequency) * t + m.phase).cos());
        }
        h
    }

    /// Slowest modulation frequency (MHz), or zero when static.
    pub fn modulation_frequency(&self) -> T {
        self.modulations
            .iter()
            .map(|m| m.frequency.mag())
            .fold(T::zero(), |a, b| a.max(b))
    }
}

impl<T: Real> ThreeSiteFullSpec<T> {
    /// Detuning of cavity 3 below cavities 1 and 2.
    pub fn detuning(&self) -> T {
        -self.omega_d
    }

    fn validate(&self) -> Result<()> {
        if self.pumps.len() != 2 {
            return Err(Error::MissingParameter("pumps (two pump qubits required)"));
        }
        if self.boson_dim < 2 {
            return Err(Error::param("boson_dim", self.boson_dim as f64, "must be >= 2"));
        }
        for p in &self.pumps {
            DriveSpec::new(p.lambda, self.omega_d, p.phi)?;
            dispersive_shift(p.g_p, p.delta_p)?;
            if self.mode == ThreeSiteMode::WithQubits && p.g_p == T::zero() {
                return Err(Error::MissingParameter("g_p"));
            }
        }
        Ok(())
    }

    /// Copy with pump phases `(−Φ/2, +Φ/2)`, giving loop flux `Φ`.
    pub fn with_flux(&self, flux: T) -> Self {
        let mut s = self.clone();
        let half = flux / T::lit(2.0);
        if s.pumps.len() == 2 {
            s.pumps[0].phi = -half;
            s.pumps[1].phi = half;
        }
        s
    }

    /// Leading-order modulation `χ₀|c₁| cos(ω_d t + arg c₁)` of each pumped
    /// cavity, with `K_i = χ₀|c₁|/ω_d`.
    pub fn modulations(&self) -> Result<Vec<SiteModulation<T>>> {
        self.validate()?;
        self.pumps
            .iter()
            .enumerate()
            .map(|(site, p)| {
                let chi0 = dispersive_shift(p.g_p, p.delta_p)?;
                let h = chi_harmonics(&DriveSpec::new(p.lambda, self.omega_d, p.phi)?, 1)?;
                Ok(SiteModulation {
                    site,
                    amplitude: chi0 * h.xi(1),
                    frequency: self.omega_d,
                    phase: carg(h.c(1)),
                })
            })
            .collect()
    }

    /// Drive strengths `K₁` of the two pumps.
    pub fn drive_strengths(&self) -> Result<[T; 2]> {
        self.validate()?;
        let mut k = [T::zero(); 2];
        for (i, p) in self.pumps.iter().enumerate() {
            let chi0 = dispersive_shift(p.g_p, p.delta_p)?;
            let h = chi_harmonics(&DriveSpec::new(p.lambda, self.omega_d, p.phi)?, 1)?;
            k[i] = drive_strengths(chi0, self.omega_d, &h)?[0];
        }
        Ok(k)
    }

    /// Effective gauge lattice predicted for this drive configuration.
    pub fn effective_lattice(&self) -> Result<GaugeLattice<T>> {
        let k = self.drive_strengths()?;
        three_site_effective(
            self.g12,
            self.g13,
            self.g23,
            self.omega_d,
            k[0],
            k[1],
            self.pumps[0].phi,
            self.pumps[1].phi,
        )
    }

    /// Onsite energies (MHz) of the three cavities in the frame of the
    /// pumped cavities, for modulation indices `k_index`.
    fn onsite(&self, k_index: [T; 2]) -> [T; 3] {
        let d = self.detuning();
        if !self.stark_compensation {
            return [T::zero(), T::zero(), -d];
        }
        let s1 = sideband_stark(self.g13, d, self.omega_d, k_index[0]);
        let s2 = sideband_stark(self.g23, d, self.omega_d, k_index[1]);
        [-s1, -s2, -d + s1 + s2]
    }

    /// Qubit-eliminated single-particle model.
    pub fn single_particle(&self) -> Result<SingleParticleModel<T>> {
        let modulations = self.modulations()?;
        let k = [
            modulations[0].amplitude / self.omega_d,
            modulations[1].amplitude / self.omega_d,
        ];
        let onsite = self.onsite(k);
        let mut h = DMatrix::from_element(3, 3, cplx(T::zero()));
        for (i, e) in onsite.iter().enumerate() {
            h[(i, i)] = cplx(*e);
        }
        for (a, b, g) in [(0, 1, self.g12), (0, 2, self.g13), (1, 2, self.g23)] {
            h[(a, b)] = cplx(g);
            h[(b, a)] = cplx(g);
        }
        Ok(SingleParticleModel {
            static_matrix: h,
            modulations,
        })
    }

    /// Expected time for one full circulation of the effective loop (µs).
    pub fn circulation_period(&self) -> Result<T> {
        let l = self.effective_lattice()?;
        let mean = l.hoppings.iter().map(|h| h.amplitude).fold(T::zero(), |a, b| a + b)
            / T::from_usize_lossy(l.hoppings.len());
        Ok(T::one() / (T::lit(3.0).sqrt() * mean))
    }
}

/// `Σ_ij h_ij b_i† b_j` scaled by `2π`.
fn quadratic_form<T: Real>(space: &Arc<SpaceDescriptor>, h: &DMatrix<Complex<T>>) -> Result<Operator<T>> {
    let mut acc = Operator::zero(space.clone());
    let lower: Vec<Operator<T>> = (0..h.nrows())
        .map(|i| mode_operator(space, i, ModeOp::Lower))
        .collect::<Result<_>>()?;
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            if h[(i, j)] != cplx(T::zero()) {
                let term = (&lower[i].adjoint() * &lower[j]).scale(h[(i, j)] * cplx(angular(T::one())));
                acc = &acc + &term;
            }
        }
    }
    Ok(acc)
}

pub fn build_three_site<T: Real>(spec: &ThreeSiteFullSpec<T>) -> Result<TimeDependentModel<T>> {
    spec.validate()?;
    match spec.mode {
        ThreeSiteMode::QubitEliminated => {
            let sp = spec.single_particle()?;
            let space = Arc::new(build_space(
                (1..=3).map(|i| SubsystemSpec::boson(format!("b{i}"), spec.boson_dim)).collect(),
            )?);
            let mut model = TimeDependentModel::new(space.clone());
            model.add_static(quadratic_form(&space, &sp.static_matrix)?)?;
            for m in &sp.modulations {
                model.add_driven(
                    mode_operator(&space, m.site, ModeOp::Number)?,
                    Envelope::cosine(angular(m.amplitude), angular(m.frequency), m.phase),
                )?;
            }
            Ok(model)
        }
        ThreeSiteMode::WithQubits => {
            let mut subs: Vec<SubsystemSpec> =
                (1..=3).map(|i| SubsystemSpec::boson(format!("b{i}"), spec.boson_dim)).collect();
            subs.push(SubsystemSpec::qubit("q1"));
            subs.push(SubsystemSpec::qubit("q2"));
            let space = Arc::new(build_space(subs)?);
            // Dressed cavities: remove the mean dispersive shift exactly.
            let mut k = [T::zero(); 2];
            let mut mean = [T::zero(); 2];
            for (i, p) in spec.pumps.iter().enumerate() {
                mean[i] = exact_shift_harmonics(p.g_p, p.delta_p, p.lambda).0;
                k[i] = exact_modulation_index(p.g_p, p.delta_p, p.lambda, spec.omega_d);
            }
            let onsite = spec.onsite(k);
            let mut h = DMatrix::from_element(3, 3, cplx(T::zero()));
            h[(0, 0)] = cplx(onsite[0] - mean[0]);
            h[(1, 1)] = cplx(onsite[1] - mean[1]);
            h[(2, 2)] = cplx(onsite[2]);
            for (a, b, g) in [(0, 1, spec.g12), (0, 2, spec.g13), (1, 2, spec.g23)] {
                h[(a, b)] = cplx(g);
                h[(b, a)] = cplx(g);
            }
            let mut model = TimeDependentModel::new(space.clone());
            model.add_static(quadratic_form(&space, &h)?)?;
            let half = T::lit(0.5);
            for (i, p) in spec.pumps.iter().enumerate() {
                let sz = mode_operator::<T>(&space, 3 + i, ModeOp::SigmaZ)?;
                let sm = mode_operator::<T>(&space, 3 + i, ModeOp::SigmaMinus)?;
                let b = mode_operator::<T>(&space, i, ModeOp::Lower)?;
                let jc = &(&b.adjoint() * &sm) + &(&sm.adjoint() * &b);
                model
                    .add_static(sz.scale_real(-angular(p.delta_p) * half))?
                    .add_static(jc.scale_real(angular(p.g_p)))?
                    .add_driven(
                        sz,
                        Envelope::cosine(-angular(p.lambda * p.delta_p) * half, angular(spec.omega_d), p.phi),
                    )?;
            }
            Ok(model)
        }
    }
}

/// Basis levels with one phonon in `site` and every qubit in `|g⟩`.
fn single_phonon(spec_mode: ThreeSiteMode, site: usize) -> Vec<usize> {
    let width = match spec_mode {
        ThreeSiteMode::WithQubits => 5,
        ThreeSiteMode::QubitEliminated => 3,
    };
    let mut levels = vec![0; width];
    levels[site] = 1;
    levels
}

/// Site populations `P1..P3` from one phonon in cavity 1.
pub fn three_site_trajectory<T: Real>(spec: &ThreeSiteFullSpec<T>, t_grid: &[T]) -> Result<Trajectory<T>> {
    let model = build_three_site(spec)?;
    let space = model.space().clone();
    let mut obs = BTreeMap::new();
    for site in 0..3 {
        obs.insert(
            format!("P{}", site + 1),
            Operator::projector(space.clone(), &single_phonon(spec.mode, site))?,
        );
    }
    let psi = basis_state(&space, &single_phonon(spec.mode, 0))?;
    evolve(&model, &psi, t_grid, &obs)
}

/// Peak ordering of a circulating phonon.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CirculationReport<T> {
    /// First period-averaged maximum of each site population (µs); site 1
    /// reports its first return.
    pub peak_times: Vec<Option<T>>,
    /// Sites (0-based) in the order they are visited, starting at site 0.
    pub order: Vec<usize>,
    pub direction: Direction,
    /// Loop flux of the effective lattice (rad).
    pub flux: T,
}

/// Runs the loop with flux `flux` from one phonon in cavity 1 and reads the
/// circulation direction from the order of the population peaks.
pub fn chiral_circulation<T: Real>(
    spec: &ThreeSiteFullSpec<T>,
    flux: T,
    t_max: T,
) -> Result<(CirculationReport<T>, Trajectory<T>)> {
    let spec = spec.with_flux(flux);
    let period = spec.circulation_period()?;
    if t_max < period {
        return Err(Error::param(
            "t_max",
            t_max.as_f64(),
            format!("shorter than one circulation period ({:.3} µs)", period.as_f64()),
        ));
    }
    let traj = three_site_trajectory(&spec, &period_grid(t_max, spec.omega_d))?;
    let threshold = T::lit(super::PEAK_THRESHOLD);
    let peak_times: Vec<Option<T>> = (1..=3)
        .map(|i| {
            let avg = period_average(traj.observable(&format!("P{i}")).expect("registered"), SAMPLES_PER_PERIOD);
            first_peak(&traj.times, &avg, threshold)
        })
        .collect();
    let tie = T::lit(0.01) * period;
    let (direction, order) = match (peak_times[1], peak_times[2]) {
        (Some(a), Some(b)) if (a - b).mag() > tie => {
            if a < b {
                (Direction::Ccw, vec![0, 1, 2])
            } else {
                (Direction::Cw, vec![0, 2, 1])
            }
        }
        _ => (Direction::None, vec![0, 1, 2]),
    };
    let lattice = spec.effective_lattice()?;
    let flux = crate::lattice::loop_flux(&lattice, &[0, 1, 2])?.flux;
    Ok((
        CirculationReport {
            peak_times,
            order,
            direction,
            flux,
        },
        traj,
    ))
}
