//! Travelling-wave conversions between beam parameters, coupling rates and
//! susceptibilities. SI units throughout.

use serde::{Deserialize, Serialize};

pub const HBAR: f64 = 1.054_571_817e-34;
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// One debye in C·m.
pub const DEBYE: f64 = 3.335_640_952e-30;

/// Beam description; the pulse form uses `photons` and either
/// `mode_volume` or `length × area`, the continuous form uses `power` and
/// `area`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldUnits {
    /// W
    pub power: Option<f64>,
    /// m²
    pub area: Option<f64>,
    /// m
    pub length: Option<f64>,
    pub photons: Option<f64>,
    /// m³
    pub mode_volume: Option<f64>,
    /// C·m
    pub dipole: f64,
    /// rad/s
    pub frequency: f64,
    /// m⁻³
    pub density: Option<f64>,
}

impl FieldUnits {
    pub fn volume(&self) -> Option<f64> {
        self.mode_volume.or_else(|| Some(self.length? * self.area?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RabiRates {
    /// Ω in rad/s.
    pub rabi: f64,
    /// g = Ω/√n_p in rad/s; absent for a continuous beam without photon number.
    pub coupling: Option<f64>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum UnitsError {
    #[error("beam needs either power and area or photons and a mode volume")]
    Underdetermined,
    #[error("{0} must be positive")]
    NotPositive(&'static str),
}

fn positive(name: &'static str, x: f64) -> Result<f64, UnitsError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(UnitsError::NotPositive(name))
    }
}

/// Single-photon coupling `g = μ √(2ω/(ε₀ħV))`.
pub fn single_photon_coupling(dipole: f64, frequency: f64, volume: f64) -> f64 {
    dipole * (2.0 * frequency / (EPSILON_0 * HBAR * volume)).sqrt()
}

/// Rabi frequency of a beam, from its photon number when given and from its
/// power otherwise.
pub fn rabi_from_beam(u: &FieldUnits) -> Result<RabiRates, UnitsError> {
    positive("dipole", u.dipole)?;
    if let (Some(n_p), Some(v)) = (u.photons, u.volume()) {
        positive("mode volume", v)?;
        positive("frequency", u.frequency)?;
        if n_p < 0.0 {
            return Err(UnitsError::NotPositive("photon number"));
        }
        let g = single_photon_coupling(u.dipole, u.frequency, v);
        return Ok(RabiRates {
            rabi: g * n_p.sqrt(),
            coupling: Some(g),
        });
    }
    let (Some(p), Some(a)) = (u.power, u.area) else {
        return Err(UnitsError::Underdetermined);
    };
    positive("power", p)?;
    positive("area", a)?;
    let rabi = u.dipole / HBAR * (2.0 * p / (EPSILON_0 * SPEED_OF_LIGHT * a)).sqrt();
    let coupling = match u.volume() {
        Some(v) => Some(single_photon_coupling(
            u.dipole,
            positive("frequency", u.frequency)?,
            positive("mode volume", v)?,
        )),
        None => None,
    };
    Ok(RabiRates { rabi, coupling })
}

/// Plane-wave intensity `ε₀c|E|²/2`.
pub fn intensity(field: f64) -> f64 {
    EPSILON_0 * SPEED_OF_LIGHT * field * field / 2.0
}

/// Field amplitude with intensity `i`.
pub fn field_from_intensity(i: f64) -> f64 {
    (2.0 * i / (EPSILON_0 * SPEED_OF_LIGHT)).sqrt()
}

/// Susceptibility of a fourth-order two-coupling nonlinearity.
///
/// `rate_per_coupling` is the Hamiltonian coefficient (rad/s) divided by
/// `λ²ν²` per emitter. Each coupling becomes `|μ|/ħ` and the result is
/// multiplied by `ħ n_d/ε₀`.
pub fn chi3_from_kerr(rate_per_coupling: f64, dipole_a: f64, dipole_b: f64, density: f64) -> f64 {
    let la = dipole_a / HBAR;
    let lb = dipole_b / HBAR;
    rate_per_coupling.abs() * la * la * lb * lb * HBAR * density / EPSILON_0
}

/// Cross-Kerr susceptibility of the four-level scheme,
/// `n_d|μ₁₂|²|μ₃₄|²/(ε₀ħ³ΔΩ²)`.
pub fn chi3_four_level(
    density: f64,
    dipole_12: f64,
    dipole_34: f64,
    delta: f64,
    omega: f64,
) -> f64 {
    density * dipole_12.powi(2) * dipole_34.powi(2)
        / (EPSILON_0 * HBAR.powi(3) * delta * omega * omega)
}

/// `n_r = √(1 + χ⁽³⁾|E|²/ε₀)`.
pub fn refractive_index(chi3: f64, field: f64) -> f64 {
    (1.0 + chi3 * field * field / EPSILON_0).sqrt()
}
