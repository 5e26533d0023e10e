use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::ops::{default_mode_name, fmt_monomial, ModePolynomial, Monomial, DEFAULT_PRUNE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearityKind {
    FrequencyShift,
    LinearCoupling,
    FrequencyDoubling,
    ThreeWaveMixing,
    SelfKerr,
    CrossKerr,
    FourWaveMixing,
    Other,
}

impl fmt::Display for NonlinearityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::FrequencyShift => "frequency shift",
            Self::LinearCoupling => "linear coupling",
            Self::FrequencyDoubling => "frequency doubling",
            Self::ThreeWaveMixing => "three-wave mixing",
            Self::SelfKerr => "self-Kerr",
            Self::CrossKerr => "cross-Kerr",
            Self::FourWaveMixing => "four-wave mixing",
            Self::Other => "other",
        })
    }
}

/// Resonance condition of one term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    /// `"none"` for number-conserving terms, else e.g. `2ω_a − ω_b = 0`;
    /// `detuning` is the left-hand side.
    pub condition: String,
    pub detuning: f64,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearityEntry {
    pub kind: NonlinearityKind,
    pub modes: Vec<String>,
    /// Operator as written, in powers of `n = a†a` for number-conserving
    /// terms; non-Hermitian terms stand for themselves plus their conjugate.
    pub term: String,
    pub coefficient: C64,
    /// `|coefficient|`.
    pub rate: f64,
    pub matching: Matching,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NonlinearityReport {
    /// Constant energy offset.
    pub offset: f64,
    pub entries: Vec<NonlinearityEntry>,
}

impl NonlinearityReport {
    pub fn of_kind(&self, kind: NonlinearityKind) -> impl Iterator<Item = &NonlinearityEntry> {
        self.entries.iter().filter(move |e| e.kind == kind)
    }

    /// Summed coefficient over entries of one kind acting on exactly `modes`.
    pub fn coefficient(&self, kind: NonlinearityKind, modes: &[&str]) -> C64 {
        self.of_kind(kind)
            .filter(|e| e.modes.iter().map(String::as_str).eq(modes.iter().copied()))
            .map(|e| e.coefficient)
            .sum()
    }
}

fn names_or_default(names: &[String], n: usize) -> Vec<String> {
    (0..n)
        .map(|m| {
            names
                .get(m)
                .cloned()
                .unwrap_or_else(|| default_mode_name(m))
        })
        .collect()
}

fn condition_text(mono: &Monomial, names: &[String]) -> String {
    let mut s = String::new();
    for (m, &(k, j)) in mono.powers().iter().enumerate() {
        let d = k as i64 - j as i64;
        if d == 0 {
            continue;
        }
        let sign = match (s.is_empty(), d < 0) {
            (true, false) => "",
            (true, true) => "−",
            (false, false) => " + ",
            (false, true) => " − ",
        };
        let mag = d.unsigned_abs();
        let coef = if mag == 1 {
            String::new()
        } else {
            mag.to_string()
        };
        s.push_str(&format!("{sign}{coef}ω_{}", names[m]));
    }
    s.push_str(" = 0");
    s
}

fn kind_of(mono: &Monomial) -> NonlinearityKind {
    let sig: Vec<(u32, u32)> = mono
        .powers()
        .iter()
        .copied()
        .filter(|&(k, j)| k + j > 0)
        .collect();
    let creates = sig.iter().any(|&(k, _)| k > 0);
    let annihilates = sig.iter().any(|&(_, j)| j > 0);
    let single = sig.iter().all(|&(k, j)| k + j == 1);
    match sig.len() {
        2 if single && creates && annihilates => NonlinearityKind::LinearCoupling,
        2 if sig.contains(&(2, 0)) && sig.contains(&(0, 1))
            || sig.contains(&(0, 2)) && sig.contains(&(1, 0)) =>
        {
            NonlinearityKind::FrequencyDoubling
        }
        3 if single && creates && annihilates => NonlinearityKind::ThreeWaveMixing,
        4 if single && sig.iter().filter(|&&(k, _)| k == 1).count() == 2 => {
            NonlinearityKind::FourWaveMixing
        }
        _ => NonlinearityKind::Other,
    }
}

/// Sorts the terms of an effective Hamiltonian into named nonlinearities.
///
/// Number-conserving terms are rewritten in powers of `n_m = a_m† a_m`:
/// `n` is a frequency shift, `n²` self-Kerr and `n_a n_b` cross-Kerr.
/// Other monomials are matched by their per-mode operator counts, reported
/// once per conjugate pair, with their resonance condition evaluated
/// against `tol`.
pub fn classify(
    poly: &ModePolynomial,
    omega: &[f64],
    names: &[String],
    tol: f64,
) -> NonlinearityReport {
    let names = names_or_default(names, poly.n_modes());
    let mut report = NonlinearityReport::default();
    let scale = poly.max_abs();
    for (pw, c) in poly.number_form() {
        let support: Vec<usize> = (0..pw.len()).filter(|&m| pw[m] > 0).collect();
        if support.is_empty() {
            report.offset = c.re;
            continue;
        }
        let kind = match (support.len(), support.iter().map(|&m| pw[m]).sum::<u32>()) {
            (1, 1) => NonlinearityKind::FrequencyShift,
            (1, 2) => NonlinearityKind::SelfKerr,
            (2, 2) => NonlinearityKind::CrossKerr,
            _ => NonlinearityKind::Other,
        };
        let term = support
            .iter()
            .map(|&m| {
                if pw[m] == 1 {
                    format!("n_{}", names[m])
                } else {
                    format!("n_{}^{}", names[m], pw[m])
                }
            })
            .collect::<Vec<_>>()
            .join(" ");
        report.entries.push(NonlinearityEntry {
            kind,
            modes: support.iter().map(|&m| names[m].clone()).collect(),
            term,
            coefficient: c,
            rate: c.norm(),
            matching: Matching {
                condition: "none".into(),
                detuning: 0.0,
                satisfied: true,
            },
        });
    }
    for (mono, &c) in poly.terms() {
        if mono.is_number_conserving() || c.norm() <= DEFAULT_PRUNE * scale {
            continue;
        }
        // of a conjugate pair, report the one creating on its first mode
        let creates_first = mono
            .powers()
            .iter()
            .find(|(k, j)| k != j)
            .is_some_and(|(k, j)| k > j);
        if !creates_first && poly.coeff(&mono.dagger()).norm() > 0.0 {
            continue;
        }
        let detuning = -mono.frequency(omega);
        report.entries.push(NonlinearityEntry {
            kind: kind_of(mono),
            modes: mono
                .support()
                .into_iter()
                .map(|m| names[m].clone())
                .collect(),
            term: fmt_monomial(mono, Some(&names)),
            coefficient: c,
            rate: c.norm(),
            matching: Matching {
                condition: condition_text(mono, &names),
                detuning,
                satisfied: detuning.abs() <= tol,
            },
        });
    }
    report
}
