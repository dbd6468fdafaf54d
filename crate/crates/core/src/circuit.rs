//! Superconducting-circuit parameters → model parameters.
//!
//! Model energies are angular frequencies in rad/s. Fluxes enter as the
//! radian arguments of the trigonometric factors; [`flux_to_radians`]
//! converts from webers.

use std::f64::consts::PI;
use std::fmt;

use crate::{Error, ModelParams, Result};

/// Magnetic flux quantum `h/2e` in webers.
pub const FLUX_QUANTUM: f64 = 2.067833848e-15;
/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054571817e-34;

/// Default absolute tolerance for the operating-point checks, in rad/s.
pub const REGIME_TOL: f64 = 1e-9;

/// How the energy-like entries of a device file are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviceUnits {
    /// `E_c`, `E_J` in joules; `omega`, `g` in rad/s.
    Si,
    /// `E_c`, `E_J`, `omega`, `g` in rad/s.
    Angular,
    /// `E_c`, `E_J`, `omega`, `g` as linear frequencies in MHz.
    Megahertz,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitParams {
    /// Charging energy, rad/s.
    pub e_c: f64,
    /// Josephson energy, rad/s.
    pub e_j: f64,
    /// Gate charge `C_g V_g / 2e`.
    pub n_g: f64,
    /// Local SQUID flux, radians.
    pub phi_x: f64,
    /// Global flux through the shared inductance, radians.
    pub phi_e: f64,
    /// Henry.
    pub inductance: f64,
    /// Ampere.
    pub critical_current: f64,
    /// Cavity frequency, rad/s.
    pub omega: f64,
    /// Atom-field coupling, rad/s.
    pub g: f64,
    pub n_atoms: usize,
}

impl CircuitParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.inductance > 0.0) {
            return Err(Error::invalid("inductance L must be positive"));
        }
        if !(self.critical_current > 0.0) {
            return Err(Error::invalid("critical current I_c must be positive"));
        }
        if !(self.omega > 0.0) {
            return Err(Error::invalid("cavity frequency omega must be positive"));
        }
        if !(0.0..=1.0).contains(&self.n_g) {
            return Err(Error::invalid(format!(
                "gate charge n_g = {} outside [0, 1]",
                self.n_g
            )));
        }
        if self.n_atoms < 1 {
            return Err(Error::invalid("atom count N must be at least 1"));
        }
        Ok(())
    }
}

/// Single-atom quantities of the Cooper-pair box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedSingleAtom {
    /// `ε = 2E_c(2n_g − 1)`.
    pub epsilon: f64,
    /// `η = −E_J cosΦ_x cosΦ_e (1 − 2ϰ² sin²Φ_e)`.
    pub eta: f64,
    /// `ϰ = π L I_c / Φ_0`.
    pub kappa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitModel {
    pub model: ModelParams,
    pub single_atom: DerivedSingleAtom,
}

pub fn flux_to_radians(weber: f64) -> f64 {
    2.0 * PI * weber / FLUX_QUANTUM
}

pub fn energy_to_angular(joule: f64) -> f64 {
    joule / HBAR
}

pub fn angular_to_energy(rad_per_s: f64) -> f64 {
    rad_per_s * HBAR
}

/// Inductive coupling `v = L I_c² sin²Φ_e / 2`, in rad/s.
pub fn inductive_coupling(inductance: f64, critical_current: f64, phi_e: f64) -> f64 {
    let s = phi_e.sin();
    energy_to_angular(inductance * critical_current * critical_current * s * s / 2.0)
}

/// Cosine that returns exactly 0 at the float nearest an odd multiple of π/2.
fn flux_cos(phi: f64) -> f64 {
    let c = phi.cos();
    if c.abs() < 4.0 * f64::EPSILON * phi.abs().max(1.0) {
        0.0
    } else {
        c
    }
}

pub fn derive_model_params(c: &CircuitParams) -> Result<CircuitModel> {
    c.validate()?;
    let kappa = PI * c.inductance * c.critical_current / FLUX_QUANTUM;
    let sin_e = c.phi_e.sin();
    let single_atom = DerivedSingleAtom {
        epsilon: 2.0 * c.e_c * (2.0 * c.n_g - 1.0),
        eta: -c.e_j
            * flux_cos(c.phi_x)
            * flux_cos(c.phi_e)
            * (1.0 - 2.0 * kappa * kappa * sin_e * sin_e),
        kappa,
    };
    let v = inductive_coupling(c.inductance, c.critical_current, c.phi_e);
    let model = ModelParams::new(c.n_atoms, c.omega, c.g, v)?;
    Ok(CircuitModel { model, single_atom })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    /// `u = g²/ω < v`: the double-well regime.
    pub u_lt_v: bool,
    /// `ε ≈ 0` (gate charge at 1/2).
    pub optimal_point: bool,
    /// `η ≈ 0` (`cosΦ_x = 0`).
    pub eta_zero: bool,
    pub messages: Vec<String>,
}

impl RegimeReport {
    pub fn all_ok(&self) -> bool {
        self.u_lt_v && self.optimal_point && self.eta_zero
    }
}

pub fn validate_regime(m: &ModelParams, d: &DerivedSingleAtom) -> RegimeReport {
    validate_regime_with_tol(m, d, REGIME_TOL)
}

pub fn validate_regime_with_tol(
    m: &ModelParams,
    d: &DerivedSingleAtom,
    tol_abs: f64,
) -> RegimeReport {
    let u_lt_v = m.u() < m.v();
    let optimal_point = d.epsilon.abs() < tol_abs;
    let eta_zero = d.eta.abs() < tol_abs;
    let mut messages = Vec::new();
    if !u_lt_v {
        messages.push(format!(
            "u = g²/ω = {:.6e} is not below v = {:.6e}; no double-well ground doublet",
            m.u(),
            m.v()
        ));
    }
    if !optimal_point {
        messages.push(format!(
            "epsilon = {:.6e} is nonzero; gate charge n_g is off the optimal point 1/2",
            d.epsilon
        ));
    }
    if !eta_zero {
        messages.push(format!(
            "eta = {:.6e} is nonzero; cos(Phi_x) must vanish for the S_x field to drop out",
            d.eta
        ));
    }
    RegimeReport {
        u_lt_v,
        optimal_point,
        eta_zero,
        messages,
    }
}

/// Parse a `key = value` device file. Keys: `E_c E_J n_g Phi_x Phi_e L I_c
/// omega g N`, plus optional `units = si | angular | mhz` (default `angular`).
pub fn parse_device_file(text: &str) -> Result<CircuitParams> {
    const KEYS: [&str; 10] = [
        "E_c", "E_J", "n_g", "Phi_x", "Phi_e", "L", "I_c", "omega", "g", "N",
    ];
    let mut values: [Option<f64>; 10] = [None; 10];
    let mut units = DeviceUnits::Angular;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::parse(line_no, format!("expected `key = value`, got `{line}`"))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key == "units" {
            units = match value.to_ascii_lowercase().as_str() {
                "si" => DeviceUnits::Si,
                "angular" | "rad/s" => DeviceUnits::Angular,
                "mhz" => DeviceUnits::Megahertz,
                other => return Err(Error::parse(line_no, format!("unknown units `{other}`"))),
            };
            continue;
        }
        let slot = KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| Error::parse(line_no, format!("unknown key `{key}`")))?;
        if values[slot].is_some() {
            return Err(Error::parse(line_no, format!("duplicate key `{key}`")));
        }
        let parsed: f64 = value
            .parse()
            .map_err(|_| Error::parse(line_no, format!("`{key}`: malformed number `{value}`")))?;
        values[slot] = Some(parsed);
    }

    let get =
        |i: usize| values[i].ok_or_else(|| Error::invalid(format!("missing key `{}`", KEYS[i])));
    let energy = |x: f64| match units {
        DeviceUnits::Si => energy_to_angular(x),
        DeviceUnits::Angular => x,
        DeviceUnits::Megahertz => 2.0 * PI * 1e6 * x,
    };
    let freq = |x: f64| match units {
        DeviceUnits::Megahertz => 2.0 * PI * 1e6 * x,
        _ => x,
    };
    let n = get(9)?;
    if n.fract() != 0.0 || n < 1.0 {
        return Err(Error::invalid(format!(
            "N must be a positive integer, got {n}"
        )));
    }
    let params = CircuitParams {
        e_c: energy(get(0)?),
        e_j: energy(get(1)?),
        n_g: get(2)?,
        phi_x: get(3)?,
        phi_e: get(4)?,
        inductance: get(5)?,
        critical_current: get(6)?,
        omega: freq(get(7)?),
        g: freq(get(8)?),
        n_atoms: n as usize,
    };
    params.validate()?;
    Ok(params)
}

/// How angular frequencies are shown to people.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreqDisplay {
    /// rad/s as stored.
    Angular,
    /// Divided by 2π, in Hz.
    Linear,
}

impl FreqDisplay {
    pub fn convert(self, rad_per_s: f64) -> f64 {
        match self {
            FreqDisplay::Angular => rad_per_s,
            FreqDisplay::Linear => rad_per_s / (2.0 * PI),
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            FreqDisplay::Angular => "rad/s",
            FreqDisplay::Linear => "Hz",
        }
    }
}

impl fmt::Display for FreqDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FreqDisplay::Angular => "angular",
            FreqDisplay::Linear => "linear",
        })
    }
}
