use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::EmitterError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Bare,
    Rwa,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub label: String,
    /// Bare energy in angular-frequency units.
    pub energy: f64,
    #[serde(default)]
    pub decay_rate: f64,
    #[serde(default)]
    pub decays_to_ground: bool,
}

/// Dipole transition; `upper` lies above `lower`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub lower: usize,
    pub upper: usize,
    /// Dipole moment magnitude in C·m.
    #[serde(default)]
    pub dipole: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelScheme {
    pub levels: Vec<Level>,
    pub transitions: Vec<Transition>,
}

impl LevelScheme {
    pub fn validate(&self) -> Result<(), EmitterError> {
        if self.levels.is_empty() {
            return Err(EmitterError::InvalidScheme("no levels".into()));
        }
        for (i, l) in self.levels.iter().enumerate() {
            // NaN rates fail the range check too
            if !(0.0..=f64::INFINITY).contains(&l.decay_rate) || !l.energy.is_finite() {
                return Err(EmitterError::InvalidScheme(format!(
                    "level {i} ({}) has invalid energy or decay rate",
                    l.label
                )));
            }
        }
        for (t, tr) in self.transitions.iter().enumerate() {
            let n = self.levels.len();
            if tr.lower >= n || tr.upper >= n {
                return Err(EmitterError::InvalidScheme(format!(
                    "transition {t} refers to a missing level"
                )));
            }
            if self.levels[tr.upper].energy <= self.levels[tr.lower].energy {
                return Err(EmitterError::InvalidScheme(format!(
                    "transition {t}: upper level {} is not above lower level {}",
                    tr.upper, tr.lower
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DriveKind {
    /// Real classical amplitude `D` multiplying `σ + σ†`.
    ClassicalBare { amplitude: f64 },
    /// Rotating-frame classical drive `β σ† + β* σ`. Without a frequency the
    /// drive is taken to be resonant with its transition.
    ClassicalRwa {
        amplitude: C64,
        #[serde(default)]
        frequency: Option<f64>,
    },
    /// Cavity mode with coupling `g` and frequency `ω`.
    Quantized {
        name: String,
        coupling: C64,
        frequency: f64,
        #[serde(default)]
        ground_coupled: Option<bool>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub transition: usize,
    #[serde(flatten)]
    pub kind: DriveKind,
}

impl DriveSpec {
    pub fn is_quantized(&self) -> bool {
        matches!(self.kind, DriveKind::Quantized { .. })
    }
}

fn level(label: &str, energy: f64, decay_rate: f64) -> Level {
    Level {
        label: label.into(),
        energy,
        decay_rate,
        decays_to_ground: decay_rate > 0.0,
    }
}

/// Parameters of the four-level double-Λ cross-Kerr scheme.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourLevelParams {
    /// Detuning of mode `b` from the 2↔3 transition.
    pub delta: f64,
    /// Classical Rabi coupling on 2↔1.
    pub omega: f64,
    /// Coupling of mode `a` on 0↔1.
    pub lambda: f64,
    /// Coupling of mode `b` on 2↔3.
    pub nu: f64,
    pub gamma1: f64,
    pub gamma3: f64,
}

/// Four-level scheme: mode `a` resonant on 0↔1, a classical drive resonant
/// on 2↔1 and mode `b` detuned on 2↔3. Levels 1 and 3 decay to the ground.
pub fn four_level(p: FourLevelParams) -> (LevelScheme, Vec<DriveSpec>) {
    let (w1, wc, w23) = (1000.0, 100.0, 950.0);
    let scheme = LevelScheme {
        levels: vec![
            level("g", 0.0, 0.0),
            level("e", w1, p.gamma1),
            level("s", w1 - wc, 0.0),
            level("u", w1 - wc + w23, p.gamma3),
        ],
        transitions: vec![
            Transition {
                lower: 0,
                upper: 1,
                dipole: None,
            },
            Transition {
                lower: 2,
                upper: 1,
                dipole: None,
            },
            Transition {
                lower: 2,
                upper: 3,
                dipole: None,
            },
        ],
    };
    let drives = vec![
        DriveSpec {
            transition: 0,
            kind: DriveKind::Quantized {
                name: "a".into(),
                coupling: C64::new(p.lambda, 0.0),
                frequency: w1,
                ground_coupled: Some(true),
            },
        },
        DriveSpec {
            transition: 1,
            kind: DriveKind::ClassicalRwa {
                amplitude: C64::new(p.omega, 0.0),
                frequency: Some(wc),
            },
        },
        DriveSpec {
            transition: 2,
            kind: DriveKind::Quantized {
                name: "b".into(),
                coupling: C64::new(p.nu, 0.0),
                frequency: w23 - p.delta,
                ground_coupled: Some(false),
            },
        },
    ];
    (scheme, drives)
}

/// Undriven two-level emitter with one mode detuned by `delta` below the
/// transition frequency `omega0`.
pub fn two_level(
    omega0: f64,
    delta: f64,
    coupling: f64,
    gamma: f64,
) -> (LevelScheme, Vec<DriveSpec>) {
    let scheme = LevelScheme {
        levels: vec![level("g", 0.0, 0.0), level("e", omega0, gamma)],
        transitions: vec![Transition {
            lower: 0,
            upper: 1,
            dipole: None,
        }],
    };
    let drives = vec![DriveSpec {
        transition: 0,
        kind: DriveKind::Quantized {
            name: "a".into(),
            coupling: C64::new(coupling, 0.0),
            frequency: omega0 - delta,
            ground_coupled: Some(true),
        },
    }];
    (scheme, drives)
}
