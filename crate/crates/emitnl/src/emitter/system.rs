use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{DressedBasis, DriveKind, DriveSpec, EmitterError, LevelScheme, Regime};
use crate::ops::{DenseOperator, FockTruncation, ModePolynomial, OperatorMatrix, OpsError};

/// Quantized mode attached to one transition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeInfo {
    pub name: String,
    /// Mode frequency ω in rad/s (or the working angular-frequency unit).
    pub frequency: f64,
    /// Expansion rate `|g|`; the phase of `g` lives in the interaction matrix.
    pub rate: f64,
    /// Whether the mode's transition involves the ground state, when declared.
    pub ground_coupled: Option<bool>,
}

/// Emitter in its dressed basis with one operator-valued interaction per mode.
#[derive(Clone, Debug)]
pub struct CoupledSystem {
    pub energies: Vec<f64>,
    pub u: DMatrix<C64>,
    pub bare_label: Vec<usize>,
    pub modes: Vec<ModeInfo>,
    pub interactions: Vec<OperatorMatrix>,
    pub regime: Regime,
}

impl CoupledSystem {
    /// Builds a system directly from dressed energies and interactions,
    /// with the dressed basis taken as the bare one.
    pub fn from_parts(
        energies: Vec<f64>,
        modes: Vec<ModeInfo>,
        interactions: Vec<OperatorMatrix>,
        regime: Regime,
    ) -> Result<Self, EmitterError> {
        let n = energies.len();
        if modes.len() != interactions.len() {
            return Err(EmitterError::InvalidScheme(format!(
                "{} modes but {} interaction matrices",
                modes.len(),
                interactions.len()
            )));
        }
        for (l, v) in interactions.iter().enumerate() {
            if v.dim() != n || v.n_modes() != modes.len() {
                return Err(EmitterError::InvalidScheme(format!(
                    "interaction {l} has shape {}×{} over {} modes",
                    v.dim(),
                    v.dim(),
                    v.n_modes()
                )));
            }
            if !v.is_hermitian(1e-12) {
                return Err(EmitterError::NotHermitian);
            }
        }
        Ok(Self {
            energies,
            u: DMatrix::identity(n, n),
            bare_label: (0..n).collect(),
            modes,
            interactions,
            regime,
        })
    }

    pub fn n_levels(&self) -> usize {
        self.energies.len()
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn rates(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.rate).collect()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.frequency).collect()
    }

    pub fn mode_names(&self) -> Vec<String> {
        self.modes.iter().map(|m| m.name.clone()).collect()
    }

    /// `Δ_nm = E_n − E_m`.
    pub fn gap(&self, n: usize, m: usize) -> f64 {
        self.energies[n] - self.energies[m]
    }

    /// True when no interaction has an operator on its diagonal.
    pub fn has_zero_diagonals(&self) -> bool {
        self.interactions
            .iter()
            .all(OperatorMatrix::has_zero_diagonal)
    }

    /// Same system with every coupling rate replaced.
    pub fn with_rates(&self, rates: &[f64]) -> Self {
        let mut out = self.clone();
        for (m, &r) in out.modes.iter_mut().zip(rates) {
            m.rate = r;
        }
        out
    }

    /// Joint Hamiltonian `diag(E) ⊗ 1 + Σ_l rate_l V_l` on emitter ⊗ Fock,
    /// without free-field terms.
    pub fn joint_hamiltonian(&self, t: &FockTruncation) -> Result<DenseOperator, OpsError> {
        let fd = t.dim();
        let n = self.n_levels();
        let mut h = DMatrix::<C64>::zeros(n * fd, n * fd);
        for (i, e) in self.energies.iter().enumerate() {
            for k in 0..fd {
                h[(i * fd + k, i * fd + k)] = C64::new(*e, 0.0);
            }
        }
        for (mode, v) in self.modes.iter().zip(&self.interactions) {
            h += v.realize(t)?.into_matrix().scale(mode.rate);
        }
        let mut dims = vec![n];
        dims.extend(t.dims());
        DenseOperator::new(h, dims).into_hermitian()
    }
}

/// Interaction of one mode in the bare emitter basis, divided by `|g|`.
fn bare_interaction(
    scheme: &LevelScheme,
    drive: &DriveSpec,
    mode: usize,
    n_modes: usize,
    regime: Regime,
) -> Result<(OperatorMatrix, f64), EmitterError> {
    let DriveKind::Quantized { coupling, .. } = &drive.kind else {
        unreachable!("only quantized drives carry modes")
    };
    let tr = &scheme.transitions[drive.transition];
    let n = scheme.len();
    let rate = coupling.norm();
    let phase = if rate > 0.0 {
        coupling / rate
    } else {
        C64::new(1.0, 0.0)
    };
    let a = ModePolynomial::annihilate(n_modes, mode);
    let ad = ModePolynomial::create(n_modes, mode);
    // σ = |lower⟩⟨upper|
    let mut lower = DMatrix::<C64>::zeros(n, n);
    lower[(tr.lower, tr.upper)] = C64::new(1.0, 0.0);
    let raise = lower.transpose();
    let m = match regime {
        Regime::Bare => {
            let x = &lower + &raise;
            let field = a.scale(phase) + ad.scale(phase.conj());
            OperatorMatrix::product(&x, &field)
        }
        Regime::Rwa => {
            let up = OperatorMatrix::product(&raise, &a.scale(phase));
            let down = OperatorMatrix::product(&lower, &ad.scale(phase.conj()));
            OperatorMatrix::from_fn(n, n_modes, |i, j| {
                up.get(i, j).clone() + down.get(i, j).clone()
            })?
        }
    };
    Ok((m, rate))
}

/// Interactions in the bare emitter basis, one per quantized mode.
pub fn undressed_interactions(
    scheme: &LevelScheme,
    drives: &[DriveSpec],
    regime: Regime,
) -> Result<(Vec<ModeInfo>, Vec<OperatorMatrix>), EmitterError> {
    scheme.validate()?;
    let quantized: Vec<&DriveSpec> = drives.iter().filter(|d| d.is_quantized()).collect();
    let n_modes = quantized.len();
    let mut modes = Vec::with_capacity(n_modes);
    let mut mats = Vec::with_capacity(n_modes);
    for (l, d) in quantized.into_iter().enumerate() {
        if d.transition >= scheme.transitions.len() {
            return Err(EmitterError::UnknownTransition {
                drive: l,
                transition: d.transition,
            });
        }
        let (m, rate) = bare_interaction(scheme, d, l, n_modes, regime)?;
        let DriveKind::Quantized {
            name,
            frequency,
            ground_coupled,
            ..
        } = &d.kind
        else {
            unreachable!()
        };
        modes.push(ModeInfo {
            name: name.clone(),
            frequency: *frequency,
            rate,
            ground_coupled: *ground_coupled,
        });
        mats.push(m);
    }
    Ok((modes, mats))
}

/// Moves each mode's interaction into the dressed basis.
pub fn transform_interactions(
    scheme: &LevelScheme,
    drives: &[DriveSpec],
    basis: &DressedBasis,
    regime: Regime,
) -> Result<CoupledSystem, EmitterError> {
    let (modes, bare) = undressed_interactions(scheme, drives, regime)?;
    let interactions = bare.iter().map(|m| m.conjugate(&basis.u)).collect();
    Ok(CoupledSystem {
        energies: basis.energies.clone(),
        u: basis.u.clone(),
        bare_label: basis.bare_label.clone(),
        modes,
        interactions,
        regime,
    })
}

/// Builds, dresses and transforms in one step.
pub fn coupled_system(
    scheme: &LevelScheme,
    drives: &[DriveSpec],
    regime: Regime,
) -> Result<CoupledSystem, EmitterError> {
    let h = super::build_driven_emitter(scheme, drives, regime)?;
    let basis = super::dress(&h)?;
    transform_interactions(scheme, drives, &basis, regime)
}
