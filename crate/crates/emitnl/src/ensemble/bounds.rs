use serde::Serialize;

use crate::emitter::Regime;

/// Largest perturbative coupling per mode: `Δ/√⟨n⟩`, or `Δ/√(N⟨n⟩)` for
/// rotating-wave couplings on transitions out of the ground state.
pub fn coupling_bounds(
    regime: Regime,
    n: usize,
    ground_coupled: &[bool],
    gaps: &[f64],
    photons: &[f64],
) -> Vec<f64> {
    ground_coupled
        .iter()
        .zip(gaps)
        .zip(photons)
        .map(|((&g, &gap), &p)| {
            let enhanced = regime == Regime::Rwa && g;
            let k = if enhanced { n as f64 * p } else { p };
            gap.abs() / k.sqrt()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum KerrScheme {
    /// Two-level emitters; self-Kerr `κ_s = Nλ⁴/Δ³`.
    Tls { delta: f64 },
    /// Four-level emitters; cross-Kerr `κ = Nλ²μ²/(ΔΩ²)`.
    FourLevel { delta: f64, omega: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KerrScaling {
    pub n: usize,
    /// Couplings at their rotating-wave bounds, one per mode.
    pub couplings: Vec<f64>,
    /// Kerr rate with those couplings.
    pub rate: f64,
    /// `d ln κ / d ln N`.
    pub exponent: f64,
}

fn rate_at_bound(scheme: KerrScheme, n: usize, photons: &[f64]) -> (Vec<f64>, f64) {
    let nf = n as f64;
    match scheme {
        KerrScheme::Tls { delta } => {
            let l = coupling_bounds(Regime::Rwa, n, &[true], &[delta], &photons[..1]);
            let r = nf * l[0].powi(4) / delta.powi(3);
            (l, r)
        }
        KerrScheme::FourLevel { delta, omega } => {
            let l = coupling_bounds(
                Regime::Rwa,
                n,
                &[true, false],
                &[omega, delta],
                &photons[..2],
            );
            let r = nf * l[0].powi(2) * l[1].powi(2) / (delta * omega * omega);
            (l, r)
        }
    }
}

/// Kerr rate reached at the coupling bounds and its scaling with `N`.
///
/// `photons` holds `⟨a†a⟩`, and for the four-level scheme also `⟨b†b⟩`.
pub fn kerr_scaling_report(scheme: KerrScheme, n: usize, photons: &[f64]) -> KerrScaling {
    let (couplings, rate) = rate_at_bound(scheme, n, photons);
    let (_, doubled) = rate_at_bound(scheme, 2 * n, photons);
    KerrScaling {
        n,
        couplings,
        rate,
        exponent: (doubled / rate).log2(),
    }
}
