use std::f64::consts::PI;

use floqlat::dynamics::{
    chiral_circulation, rabi_compare, DetuningCalibration, PumpQubit, Resonance, ThreeSiteFullSpec, ThreeSiteMode,
    TwoSiteFullSpec,
};
use floqlat::floquet::{chi_harmonics, decay_ratio, dispersive_shift, DriveSpec, DEFAULT_NMAX};
use floqlat::lattice::{
    ladder_bloch_spectrum, ladder_lattice, ladder_plaquette, ladder_spectrum, loop_flux, Boundary, Direction,
    GaugeLattice, LadderSpec,
};
use floqlat::presets;
use floqlat::transport::{
    ab_interference, circulator_fidelity, floquet_transmission_sweep, format_significant, scattering_matrix,
    transmission_sweep, SteadyStateOptions, SweepResult,
};
use floqlat::{Lattice, Sweep};
use serde_json::{Map, Value};

use crate::config::*;
use crate::error::CliError;

pub struct Report {
    pub table: Sweep,
    pub summary: Vec<(String, String)>,
    pub notes: Vec<String>,
}

impl Report {
    fn new(table: Sweep) -> Self {
        Self {
            table,
            summary: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn num(&mut self, key: &str, value: f64) {
        self.summary.push((key.to_string(), format_significant(value, 6)));
    }

    fn text(&mut self, key: &str, value: impl Into<String>) {
        self.summary.push((key.to_string(), value.into()));
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Six significant digits without trailing zeros.
fn short(x: f64) -> f64 {
    format_significant(x, 6).parse().unwrap_or(x)
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

pub fn fourier(preset: bool, file: &Map<String, Value>, flags: &FourierParams) -> Result<Report, CliError> {
    let base = preset.then(|| {
        let (d, n) = presets::figure2::<f64>();
        FourierParams {
            lambda: Some(d.lambda),
            phi: Some(d.phi),
            nmax: Some(n),
            lambda_steps: None,
        }
    });
    let p = layer(base, file, flags)?;
    let phi = p.phi.unwrap_or(0.0);
    let nmax = at_least(p.nmax.unwrap_or(DEFAULT_NMAX), 1, "nmax")?;

    if let Some(steps) = p.lambda_steps {
        let steps = at_least(steps, 2, "lambda_steps")?;
        let lambdas = linspace(0.0, 0.95, steps);
        let rows = lambdas
            .iter()
            .map(|&l| chi_harmonics(&DriveSpec::new(l, 1.0, phi)?, nmax.max(3)))
            .collect::<floqlat::Result<Vec<_>>>()?;
        let mut table = SweepResult::new("lambda", lambdas);
        for n in 0..=3 {
            table.push_curve(format!("xi{n}"), rows.iter().map(|h| h.xi(n)).collect())?;
        }
        table.push_curve("phi1_rad", rows.iter().map(|h| h.phase(1)).collect())?;
        let mut r = Report::new(table);
        r.num("phi_rad", phi);
        return Ok(r);
    }

    let lambda = required(p.lambda, "lambda")?;
    let h = chi_harmonics(&DriveSpec::new(lambda, 1.0, phi)?, nmax)?;
    let ns: Vec<f64> = (0..=nmax).map(|n| n as f64).collect();
    let mut table = SweepResult::new("n", ns);
    table.push_curve("xi", (0..=nmax).map(|n| h.xi(n)).collect())?;
    table.push_curve("phi_rad", (0..=nmax).map(|n| if n == 0 { 0.0 } else { h.phase(n) }).collect())?;
    let mut r = Report::new(table);
    r.num("lambda", lambda);
    r.num("phi_rad", phi);
    r.num("c0", h.c0());
    r.num("xi1", h.xi(1));
    r.num("decay_ratio", decay_ratio(lambda));
    Ok(r)
}

pub fn rabi(preset: bool, file: &Map<String, Value>, flags: &RabiParams) -> Result<Report, CliError> {
    let base = preset.then(|| {
        let s = presets::figure3::<f64>();
        RabiParams {
            g12: Some(s.g12),
            g_p: Some(s.g_p),
            delta_p: Some(s.delta_p),
            lambda: Some(s.lambda),
            omega_d: Some(s.omega_d),
            phi: Some(s.phi),
            boson_dim: Some(s.boson_dim),
            ..Default::default()
        }
    });
    let p = layer(base, file, flags)?;
    let spec = TwoSiteFullSpec {
        g12: required(p.g12, "g12")?,
        g_p: required(p.g_p, "g_p")?,
        delta_p: required(p.delta_p, "delta_p")?,
        lambda: required(p.lambda, "lambda")?,
        omega_d: required(p.omega_d, "omega_d")?,
        phi: p.phi.unwrap_or(0.0),
        resonance: match p.resonance.unwrap_or(Sideband::Lower) {
            Sideband::Lower => Resonance::Lower,
            Sideband::Upper => Resonance::Upper,
        },
        boson_dim: at_least(p.boson_dim.unwrap_or(3), 2, "boson_dim")?,
        calibration: match p.calibration.unwrap_or(Calibration::Exact) {
            Calibration::Exact => DetuningCalibration::Exact,
            Calibration::LeadingOrder => DetuningCalibration::LeadingOrder,
        },
    };
    let (k1, j12) = spec.effective_coupling()?;
    let swap = 1.0 / (4.0 * j12.abs());
    let t_max = positive(p.t_max.unwrap_or(2.0 * swap), "t_max")?;
    let cmp = rabi_compare(&spec, t_max)?;

    let mut table = SweepResult::new("t_us", cmp.full.times.clone());
    for (name, traj, label) in [
        ("P1_full", &cmp.full, "P1"),
        ("P2_full", &cmp.full, "P2"),
        ("Pe_full", &cmp.full, "Pe"),
        ("P1_eff", &cmp.effective, "P1"),
        ("P2_eff", &cmp.effective, "P2"),
    ] {
        table.push_curve(name, traj.observable(label).expect("registered").to_vec())?;
    }
    let mut r = Report::new(table);
    r.num("lambda", spec.lambda);
    r.num("Omega_p_MHz", spec.omega_p());
    r.num("chi0_MHz", dispersive_shift(spec.g_p, spec.delta_p)?);
    r.num("K1", k1);
    r.num("J12_MHz", j12);
    r.num("bare_detuning_MHz", spec.bare_detuning()?);
    r.num("expected_swap_us", swap);
    match cmp.swap_time {
        Some(t) => r.num("swap_time_us", t),
        None => r.text("swap_time_us", "none"),
    }
    r.num("max_P2", max_of(cmp.full.observable("P2").expect("registered")));
    r.num("max_Pe", max_of(cmp.full.observable("Pe").expect("registered")));
    r.num("max_deviation", cmp.max_deviation);
    r.num("norm_drift", cmp.full.max_norm_drift());
    r.notes.extend(cmp.full.warnings.iter().cloned());
    if preset {
        r.notes.push(format!(
            "preset figure3: drive fixed by lambda = {}, so Omega_p = lambda * Delta_p = {} MHz",
            spec.lambda,
            spec.omega_p()
        ));
    }
    Ok(r)
}

fn figure5_loop(flux: f64) -> (f64, f64, f64, f64, PumpQubit<f64>, f64) {
    let s = presets::figure5::<f64>(ThreeSiteMode::QubitEliminated);
    (s.g12, s.g13, s.g23, s.omega_d, s.pumps[0], flux)
}

struct LoopInput {
    g12: Option<f64>,
    g13: Option<f64>,
    g23: Option<f64>,
    omega_d: Option<f64>,
    g_p: Option<f64>,
    delta_p: Option<f64>,
    lambda: Option<f64>,
    flux: Option<f64>,
    stark_compensation: Option<bool>,
}

fn loop_spec(p: LoopInput, mode: ThreeSiteMode, boson_dim: usize) -> Result<(ThreeSiteFullSpec<f64>, f64), CliError> {
    let pump = PumpQubit {
        g_p: required(p.g_p, "g_p")?,
        delta_p: required(p.delta_p, "delta_p")?,
        lambda: required(p.lambda, "lambda")?,
        phi: 0.0,
    };
    let spec = ThreeSiteFullSpec {
        g12: required(p.g12, "g12")?,
        g13: required(p.g13, "g13")?,
        g23: required(p.g23, "g23")?,
        omega_d: required(p.omega_d, "omega_d")?,
        pumps: vec![pump, pump],
        mode,
        boson_dim,
        stark_compensation: p.stark_compensation.unwrap_or(true),
    };
    let flux = p.flux.unwrap_or(0.0);
    Ok((spec.with_flux(flux), flux))
}

fn loop_summary(r: &mut Report, spec: &ThreeSiteFullSpec<f64>) -> Result<Lattice, CliError> {
    let l = spec.effective_lattice()?;
    let k = spec.drive_strengths()?;
    r.num("lambda", spec.pumps[0].lambda);
    r.num("chi0_MHz", dispersive_shift(spec.pumps[0].g_p, spec.pumps[0].delta_p)?);
    r.num("K1", k[0]);
    r.num("K2", k[1]);
    for (a, b, key) in [(0, 1, "J12_MHz"), (1, 2, "J23_MHz"), (2, 0, "J31_MHz")] {
        r.num(key, l.edge_amplitude(a, b).unwrap_or(0.0));
    }
    let flux = loop_flux(&l, &[0, 1, 2])?.flux;
    r.num("Phi_B_rad", flux);
    Ok(l)
}

pub fn chiral(preset: bool, file: &Map<String, Value>, flags: &ChiralParams) -> Result<Report, CliError> {
    let base = preset.then(|| {
        let (g12, g13, g23, omega_d, pump, flux) = figure5_loop(PI / 2.0);
        ChiralParams {
            g12: Some(g12),
            g13: Some(g13),
            g23: Some(g23),
            omega_d: Some(omega_d),
            g_p: Some(pump.g_p),
            delta_p: Some(pump.delta_p),
            lambda: Some(pump.lambda),
            flux: Some(flux),
            ..Default::default()
        }
    });
    let p = layer(base, file, flags)?;
    let mode = match p.mode.unwrap_or(LoopMode::Eliminated) {
        LoopMode::Eliminated => ThreeSiteMode::QubitEliminated,
        LoopMode::WithQubits => ThreeSiteMode::WithQubits,
    };
    let boson_dim = at_least(p.boson_dim.unwrap_or(3), 2, "boson_dim")?;
    let t_max = p.t_max;
    let (spec, flux) = loop_spec(
        LoopInput {
            g12: p.g12,
            g13: p.g13,
            g23: p.g23,
            omega_d: p.omega_d,
            g_p: p.g_p,
            delta_p: p.delta_p,
            lambda: p.lambda,
            flux: p.flux,
            stark_compensation: p.stark_compensation,
        },
        mode,
        boson_dim,
    )?;
    let period = spec.circulation_period()?;
    let t_max = positive(t_max.unwrap_or(2.0 * period), "t_max")?;
    let (report, traj) = chiral_circulation(&spec, flux, t_max)?;

    let mut table = SweepResult::new("t_us", traj.times.clone());
    for i in 1..=3 {
        let label = format!("P{i}");
        table.push_curve(label.clone(), traj.observable(&label).expect("registered").to_vec())?;
    }
    let mut r = Report::new(table);
    loop_summary(&mut r, &spec)?;
    r.num("circulation_period_us", period);
    for (i, t) in report.peak_times.iter().enumerate() {
        let key = format!("peak_P{}_us", i + 1);
        match t {
            Some(t) => r.num(&key, *t),
            None => r.text(&key, "none"),
        }
    }
    let order: Vec<String> = report.order.iter().map(|s| (s + 1).to_string()).collect();
    r.text("order", order.join("->"));
    r.text("direction", direction_name(report.direction));
    r.num("norm_drift", traj.max_norm_drift());
    r.notes.extend(traj.warnings.iter().cloned());
    if preset {
        r.notes.push("preset figure5: pump drive fixed by lambda = 0.5".to_string());
    }
    Ok(r)
}

fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::Ccw => "ccw",
        Direction::Cw => "cw",
        Direction::None => "none",
    }
}

pub fn circulator(preset: bool, file: &Map<String, Value>, flags: &CirculatorParams) -> Result<Report, CliError> {
    let base = preset.then(|| {
        let (g12, g13, g23, omega_d, pump, flux) = figure5_loop(PI / 2.0);
        CirculatorParams {
            g12: Some(g12),
            g13: Some(g13),
            g23: Some(g23),
            omega_d: Some(omega_d),
            g_p: Some(pump.g_p),
            delta_p: Some(pump.delta_p),
            lambda: Some(pump.lambda),
            flux: Some(flux),
            kappa: Some(presets::FIGURE5_KAPPA),
            ..Default::default()
        }
    });
    let p = layer(base, file, flags)?;
    let lo = p.delta_min.unwrap_or(-0.5);
    let hi = p.delta_max.unwrap_or(0.5);
    if !(hi > lo) {
        return Err(CliError::Validation(format!("`delta_max` = {hi} must exceed `delta_min` = {lo}")));
    }
    let deltas = linspace(lo, hi, at_least(p.delta_steps.unwrap_or(101), 1, "delta_steps")?);
    let input = at_least(p.input_port.unwrap_or(1), 1, "input_port")? - 1;

    let mut driven = None;
    let lattice = match &p.lattice {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
            let l = GaugeLattice::<f64>::from_json(&text)?;
            match p.kappa {
                Some(k) => l.clone().with_losses(vec![positive(k, "kappa")?; l.n_sites])?,
                None => l,
            }
        }
        None => {
            let kappa = positive(required(p.kappa, "kappa")?, "kappa")?;
            let (spec, _) = loop_spec(
                LoopInput {
                    g12: p.g12,
                    g13: p.g13,
                    g23: p.g23,
                    omega_d: p.omega_d,
                    g_p: p.g_p,
                    delta_p: p.delta_p,
                    lambda: p.lambda,
                    flux: p.flux,
                    stark_compensation: p.stark_compensation,
                },
                ThreeSiteMode::QubitEliminated,
                2,
            )?;
            let l = spec.effective_lattice()?.with_losses(vec![kappa; 3])?;
            driven = Some((spec, kappa));
            l
        }
    };
    if input >= lattice.n_sites {
        return Err(CliError::Validation(format!(
            "`input_port` = {} must be <= {}",
            input + 1,
            lattice.n_sites
        )));
    }
    let mut table = transmission_sweep(&lattice, &deltas, input)?;
    let mut r = Report::new(table.clone());
    if let Some((spec, kappa)) = &driven {
        loop_summary(&mut r, spec)?;
        r.num("kappa_half_MHz", kappa / 2.0);
        let flux = loop_flux(&lattice, &[0, 1, 2])?.flux;
        r.num("phi_c_rad", flux / 3.0);
        if p.floquet.unwrap_or(false) {
            let numeric = floquet_transmission_sweep(spec, *kappa, input, &deltas, &SteadyStateOptions::default())?;
            for (name, values) in numeric.curves {
                table.push_curve(format!("{name}_floquet"), values)?;
            }
        }
    }
    let at_zero = scattering_matrix(&lattice, 0.0)?;
    for &port in &at_zero.ports {
        if let Some(t) = at_zero.transmission(port, input) {
            r.num(&format!("T{}_at_0", port + 1), t);
        }
    }
    if at_zero.n_ports() == 3 {
        r.num("fidelity_ccw_at_0", circulator_fidelity(&at_zero, Direction::Ccw)?);
        r.num("fidelity_cw_at_0", circulator_fidelity(&at_zero, Direction::Cw)?);
    }
    if preset {
        r.notes.push("preset figure5: pump drive fixed by lambda = 0.5, kappa = 0.2 MHz".to_string());
    }
    r.table = table;
    Ok(r)
}

pub fn ab(preset: bool, file: &Map<String, Value>, flags: &AbParams) -> Result<Report, CliError> {
    let base = preset.then(|| {
        let f = presets::figure7::<f64>();
        AbParams {
            j: Some(f.j),
            kappa: Some(f.kappa),
            kappa_p: Some(f.kappa_p.to_vec()),
            flux_steps: None,
        }
    });
    let p = layer(base, file, flags)?;
    let defaults = presets::figure7::<f64>();
    let j = positive(p.j.unwrap_or(defaults.j), "j")?;
    let kappa = positive(p.kappa.unwrap_or(defaults.kappa), "kappa")?;
    let kappa_p = p.kappa_p.clone().unwrap_or_else(|| vec![0.1 * kappa]);
    if kappa_p.is_empty() || kappa_p.iter().any(|k| !(*k >= 0.0)) {
        return Err(CliError::Validation("`kappa_p` values must be >= 0".to_string()));
    }
    let steps = at_least(p.flux_steps.unwrap_or(101), 2, "flux_steps")?;
    let fluxes = linspace(0.0, 2.0 * PI, steps);
    let mut table = SweepResult::new("flux_rad", fluxes.clone());
    let mut r = Report::new(table.clone());
    r.num("J_MHz", j);
    r.num("kappa_MHz", kappa);
    for kp in &kappa_p {
        let sweep = ab_interference(j, kappa, *kp, &fluxes)?;
        let curve = sweep.curve("T41").expect("single curve").to_vec();
        let name = if kappa_p.len() == 1 { "T41".to_string() } else { format!("T41_kp_{}", short(*kp)) };
        r.num(&format!("peak_{name}"), max_of(&curve));
        let at_pi = ab_interference(j, kappa, *kp, &[PI])?.curves[0].1[0];
        r.num(&format!("{name}_at_pi"), at_pi);
        table.push_curve(name, curve)?;
    }
    r.text("gauge", "phi1 = phi4 = Phi_B / 4");
    r.table = table;
    Ok(r)
}

pub fn ladder(file: &Map<String, Value>, flags: &LadderParams) -> Result<Report, CliError> {
    let p = layer(None, file, flags)?;
    let spec = LadderSpec {
        n_rungs: at_least(required(p.n_rungs, "n_rungs")?, 2, "n_rungs")?,
        t_prime: required(p.t_prime, "t_prime")?,
        j_rung: required(p.j_rung, "j_rung")?,
        phi: required(p.phi, "phi")?,
        boundary: match p.boundary.unwrap_or(BoundaryArg::Periodic) {
            BoundaryArg::Open => Boundary::Open,
            BoundaryArg::Periodic => Boundary::Periodic,
        },
    };
    let direct = ladder_spectrum(&spec)?;
    let n = spec.n_rungs;
    let table = match p.spectrum.unwrap_or(SpectrumKind::Bloch) {
        SpectrumKind::Bloch => {
            let ks: Vec<f64> = (0..n).map(|m| 2.0 * PI * m as f64 / n as f64).collect();
            let (lower, upper) = ladder_bloch_spectrum(spec.t_prime, spec.j_rung, spec.phi, &ks);
            let mut t = SweepResult::new("k_rad", ks);
            t.push_curve("E_lower_MHz", lower)?;
            t.push_curve("E_upper_MHz", upper)?;
            t
        }
        SpectrumKind::Direct => {
            let mut t = SweepResult::new("index", (0..direct.len()).map(|i| i as f64).collect());
            t.push_curve("E_MHz", direct.clone())?;
            t
        }
    };
    let mut r = Report::new(table);
    r.text("n_rungs", n.to_string());
    if spec.boundary == Boundary::Open || n >= 3 {
        let l = ladder_lattice(&spec)?;
        r.num("plaquette_flux_rad", loop_flux(&l, &ladder_plaquette(n, 0))?.flux);
    }
    r.num("E_min_MHz", direct[0]);
    r.num("E_max_MHz", direct[direct.len() - 1]);
    Ok(r)
}
