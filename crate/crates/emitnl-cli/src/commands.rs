use std::fmt::Write as _;
use std::path::Path;

use anyhow::Context;
use emitnl::effective::{classify, default_tolerance, effective_model, NonlinearityReport};
use emitnl::emitter::{CoupledSystem, Regime};
use emitnl::ensemble::{
    collective_matrix, coupling_bounds, ensemble_expansion, kerr_scaling_report,
    scaling_identity_check, KerrScheme,
};
use emitnl::ops::{ModePolynomial, Monomial};
use emitnl::tipt::{closed_levels, expand_recursive, MultiIndex, SeriesReport};
use emitnl::validation::config::{load, ConfigError, SystemConfig, UnitsConfig};
use emitnl::validation::units::{
    chi3_four_level, chi3_from_kerr, intensity, rabi_from_beam, refractive_index,
};
use emitnl::validation::{
    curves_csv, four_level_kerr_rate, nscaling_curves, oracle_report, NscalingOptions, Probe,
};
use serde_json::json;

use crate::table::{complex, num, Table};

/// Result of one subcommand. Without a table the machine form goes to
/// standard output unless `--out` is given.
pub struct Output {
    table: Option<String>,
    machine: String,
}

impl Output {
    pub fn emit(self, out: Option<&Path>) -> anyhow::Result<()> {
        if let Some(t) = &self.table {
            print!("{t}");
        }
        match out {
            Some(p) => {
                std::fs::write(p, &self.machine)
                    .with_context(|| format!("writing {}", p.display()))?;
                println!("wrote {}", p.display());
            }
            None if self.table.is_none() => print!("{}", self.machine),
            None => {}
        }
        Ok(())
    }
}

fn json_output(table: String, value: &serde_json::Value) -> anyhow::Result<Output> {
    Ok(Output {
        table: Some(table),
        machine: serde_json::to_string_pretty(value)? + "\n",
    })
}

fn system(path: &Path) -> anyhow::Result<(SystemConfig, CoupledSystem)> {
    let cfg: SystemConfig = load(path)?;
    let sys = cfg.system()?;
    Ok((cfg, sys))
}

fn monomial(m: &Monomial, names: &[String]) -> String {
    let mut s = String::new();
    for (name, &(k, j)) in names.iter().zip(m.powers()) {
        match k {
            0 => {}
            1 => s.push_str(&format!("{name}†")),
            _ => s.push_str(&format!("{name}†^{k}")),
        }
        match j {
            0 => {}
            1 => s.push_str(name),
            _ => s.push_str(&format!("{name}^{j}")),
        }
    }
    if s.is_empty() {
        "1".into()
    } else {
        s
    }
}

/// Product of number operators, e.g. `n_a^2 n_b`.
fn number_term(powers: &[u32], names: &[String]) -> String {
    let parts: Vec<String> = names
        .iter()
        .zip(powers)
        .filter(|(_, &p)| p > 0)
        .map(|(n, &p)| {
            if p == 1 {
                format!("n_{n}")
            } else {
                format!("n_{n}^{p}")
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

fn index(j: &[u32]) -> String {
    format!(
        "({})",
        j.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    )
}

fn polynomial_rows(t: &mut Table, p: &ModePolynomial, names: &[String]) {
    for (m, c) in p.terms() {
        t.row([monomial(m, names), complex(*c)]);
    }
}

pub fn dress(path: &Path) -> anyhow::Result<Output> {
    let (cfg, sys) = system(path)?;
    let names = sys.mode_names();
    let mut out = String::new();
    let mut levels = Table::new(["state", "bare level", "energy (rad/s)", "E0 - E (rad/s)"]);
    for (i, e) in sys.energies.iter().enumerate() {
        let label = &cfg.levels[sys.bare_label[i]].label;
        levels.row([i.to_string(), label.clone(), num(*e), num(sys.gap(0, i))]);
    }
    writeln!(out, "Dressed levels\n{levels}")?;
    let mut u = Table::new(
        std::iter::once("bare \\ dressed".to_string())
            .chain((0..sys.n_levels()).map(|i| i.to_string())),
    );
    for r in 0..sys.n_levels() {
        u.row(
            std::iter::once(cfg.levels[r].label.clone())
                .chain((0..sys.n_levels()).map(|c| complex(sys.u[(r, c)]))),
        );
    }
    writeln!(out, "Dressing unitary\n{u}")?;
    let mut inter = Table::new(["mode", "rate (rad/s)", "element", "operator"]);
    let mut elements = Vec::new();
    for (l, v) in sys.interactions.iter().enumerate() {
        let mut list = Vec::new();
        for i in 0..v.dim() {
            for j in 0..v.dim() {
                let p = v.get(i, j);
                if p.is_zero() {
                    continue;
                }
                inter.row([
                    names[l].clone(),
                    num(sys.modes[l].rate),
                    format!("[{i},{j}]"),
                    p.display_with(&names).to_string(),
                ]);
                list.push(json!({ "row": i, "col": j, "operator": p }));
            }
        }
        elements.push(list);
    }
    writeln!(out, "Interactions (divided by the rate)\n{inter}")?;
    let value = json!({
        "energies": sys.energies,
        "bare_label": sys.bare_label,
        "u": (0..sys.n_levels())
            .map(|r| (0..sys.n_levels()).map(|c| [sys.u[(r, c)].re, sys.u[(r, c)].im]).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "modes": sys.modes,
        "interactions": elements,
    });
    json_output(out, &value)
}

pub fn expand(path: &Path, order: Option<u32>, closed: bool) -> anyhow::Result<Output> {
    let (cfg, sys) = system(path)?;
    let order = order.unwrap_or(cfg.expansion.order);
    let terms: Vec<(Vec<u32>, ModePolynomial)> = if closed {
        let mut v = Vec::new();
        for k in 0..=order {
            for j in MultiIndex::with_total(sys.n_modes(), k) {
                let e = closed_levels(&j, &sys.energies, &sys.interactions)?;
                v.push((j.exponents().to_vec(), e));
            }
        }
        v
    } else {
        let s = expand_recursive(&sys, 0, order)?;
        s.eigenvalue_terms()
            .map(|(j, e)| (j.exponents().to_vec(), e.clone()))
            .collect()
    };
    let names = sys.mode_names();
    let unit = (sys.n_levels() > 1).then(|| sys.energies[1] - sys.energies[0]);
    let mut t = Table::new(["index", "form", "term", "coefficient", "× (E1-E0)^(K-1)"]);
    for (j, e) in &terms {
        let k = j.iter().sum::<u32>();
        let scaled = |c: f64| match unit {
            Some(u) if k > 0 => format!("{:.6}", c * u.powi(k as i32 - 1)),
            _ => "-".into(),
        };
        if e.terms().all(|(m, _)| m.is_number_conserving()) {
            for (pw, c) in e.number_form() {
                if c.norm() > 0.0 {
                    t.row([
                        index(j),
                        "n".into(),
                        number_term(&pw, &names),
                        complex(c),
                        scaled(c.re),
                    ]);
                }
            }
        } else {
            for (m, c) in e.terms() {
                t.row([
                    index(j),
                    "normal".into(),
                    monomial(m, &names),
                    complex(*c),
                    scaled(c.re),
                ]);
            }
        }
    }
    let method = if closed { "explicit sums" } else { "recursion" };
    let table = format!(
        "Ground-energy coefficients E_J ({method}, total order ≤ {order}); the energy is Σ_J rates^J E_J\n{t}"
    );
    let report = SeriesReport {
        target: 0,
        energy0: sys.energies[0],
        max_order: order,
        eigenvalue: terms,
    };
    json_output(table, &serde_json::to_value(report)?)
}

fn nonlinearity_table(r: &NonlinearityReport) -> Table {
    let mut t = Table::new(["kind", "modes", "term", "coefficient", "rate", "matching"]);
    for e in &r.entries {
        let m = &e.matching;
        let matching = if m.condition == "none" {
            "none".into()
        } else {
            format!(
                "{} ({})",
                m.condition,
                if m.satisfied { "met" } else { "off" }
            )
        };
        t.row([
            e.kind.to_string(),
            e.modes.join(","),
            e.term.clone(),
            complex(e.coefficient),
            num(e.rate),
            matching,
        ]);
    }
    t
}

pub fn effective(path: &Path) -> anyhow::Result<Output> {
    let (cfg, sys) = system(path)?;
    let model = effective_model(&sys, Some(&cfg.scheme()), cfg.model_options())?;
    let tol = default_tolerance(&model.frequencies);
    let report = classify(
        &model.hamiltonian,
        &model.frequencies,
        &model.mode_names,
        tol,
    );
    let mut out = String::new();
    let mut h = Table::new(["term", "coefficient (rad/s)"]);
    polynomial_rows(&mut h, &model.hamiltonian, &model.mode_names);
    writeln!(out, "Effective Hamiltonian\n{h}")?;
    writeln!(
        out,
        "Nonlinearities (offset {})\n{}",
        num(report.offset),
        nonlinearity_table(&report)
    )?;
    let mut d = Table::new(["level", "operator", "rate (rad/s)", "frequency (rad/s)"]);
    for x in &model.dissipators {
        d.row([
            x.level.to_string(),
            x.operator.display_with(&model.mode_names).to_string(),
            num(x.rate),
            num(x.frequency),
        ]);
    }
    if d.is_empty() {
        writeln!(out, "No dissipators")?;
    } else {
        writeln!(out, "Dissipators\n{d}")?;
    }
    json_output(out, &json!({ "model": model, "nonlinearities": report }))
}

/// Ground-coupled flag and gap of each mode: the mean `|E_i − E_k|` over the
/// transitions it drives, weighted by `|V_ik|²`. For a symmetric dressed
/// doublet this is the undressed detuning.
fn mode_gaps(sys: &CoupledSystem) -> (Vec<bool>, Vec<f64>) {
    let n = sys.n_levels();
    sys.interactions
        .iter()
        .zip(&sys.modes)
        .map(|(v, m)| {
            let ground = m
                .ground_coupled
                .unwrap_or_else(|| (1..n).any(|k| !v.get(0, k).is_zero()));
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..n {
                for k in i + 1..n {
                    let w = v.get(i, k).max_abs().max(v.get(k, i).max_abs()).powi(2);
                    num += w * (sys.energies[i] - sys.energies[k]).abs();
                    den += w;
                }
            }
            (ground, if den > 0.0 { num / den } else { f64::INFINITY })
        })
        .unzip()
}

pub fn ensemble(path: &Path, n: Option<usize>) -> anyhow::Result<Output> {
    let (cfg, sys) = system(path)?;
    let n = n.or(cfg.ensemble.as_ref().map(|e| e.n)).ok_or_else(|| {
        ConfigError::Invalid("ensemble size missing: pass --n or set [ensemble] n".into())
    })?;
    let photons = match cfg
        .ensemble
        .as_ref()
        .map(|e| e.photons.clone())
        .filter(|p| !p.is_empty())
    {
        Some(p) if p.len() != sys.n_modes() => {
            return Err(ConfigError::Invalid(format!(
                "{} photon numbers for {} modes",
                p.len(),
                sys.n_modes()
            ))
            .into())
        }
        Some(p) => p,
        None => vec![1.0; sys.n_modes()],
    };
    let order = cfg.expansion.order;
    let rates = sys.rates();
    let names = sys.mode_names();
    let omega = sys.frequencies();
    let tol = default_tolerance(&omega);
    let c = collective_matrix(&sys, n)?;
    let collective = ensemble_expansion(&c, order)?.resum_eigenvalue(&rates, order);
    let single = expand_recursive(&sys, 0, order)?.resum_eigenvalue(&rates, order);
    let rc = classify(&collective, &omega, &names, tol);
    let rs = classify(&single, &omega, &names, tol);

    let mut out = String::new();
    let mut t = Table::new(["kind", "modes", "term", "ensemble", "single", "ratio"]);
    for e in &rc.entries {
        let modes: Vec<&str> = e.modes.iter().map(String::as_str).collect();
        let s = rs.coefficient(e.kind, &modes);
        let ratio = if s.norm() > 0.0 {
            format!("{:.6}", (e.coefficient / s).re)
        } else {
            "-".into()
        };
        t.row([
            e.kind.to_string(),
            e.modes.join(","),
            e.term.clone(),
            complex(e.coefficient),
            complex(s),
            ratio,
        ]);
    }
    writeln!(out, "Collective nonlinearities, N = {n}\n{t}")?;

    let scaling = if sys.n_modes() == 1 {
        let s = scaling_identity_check(&sys, n)?;
        writeln!(
            out,
            "Fourth-order scaling: |E4(N) - N E4(1)| = {}, commutator correction {}, residual {}\n",
            num(s.difference.max_abs()),
            num(s.correction.max_abs()),
            num(s.residual.max_abs())
        )?;
        json!({
            "difference": s.difference,
            "correction": s.correction,
            "residual": s.residual,
        })
    } else {
        writeln!(
            out,
            "Fourth-order scaling check needs a single mode; skipped\n"
        )?;
        serde_json::Value::Null
    };

    let (ground, gaps) = mode_gaps(&sys);
    let bounds = coupling_bounds(sys.regime, n, &ground, &gaps, &photons);
    let mut b = Table::new([
        "mode",
        "ground coupled",
        "gap (rad/s)",
        "photons",
        "bound (rad/s)",
        "rate (rad/s)",
    ]);
    for l in 0..sys.n_modes() {
        b.row([
            names[l].clone(),
            ground[l].to_string(),
            num(gaps[l]),
            num(photons[l]),
            num(bounds[l]),
            num(rates[l]),
        ]);
    }
    writeln!(out, "Coupling bounds\n{b}")?;

    let kerr = match (sys.n_modes(), ground.as_slice()) {
        (1, _) => Some((KerrScheme::Tls { delta: gaps[0] }, photons.clone())),
        (2, [true, false]) => Some((
            KerrScheme::FourLevel {
                delta: gaps[1],
                omega: gaps[0],
            },
            photons.clone(),
        )),
        (2, [false, true]) => Some((
            KerrScheme::FourLevel {
                delta: gaps[0],
                omega: gaps[1],
            },
            vec![photons[1], photons[0]],
        )),
        _ => None,
    };
    let kerr = kerr.map(|(scheme, p)| kerr_scaling_report(scheme, n, &p));
    match &kerr {
        Some(k) => writeln!(
            out,
            "Kerr rate at the bounds: {} rad/s, scaling N^{:.3}",
            num(k.rate),
            (k.exponent * 1e3).round() / 1e3 + 0.0
        )?,
        None => writeln!(
            out,
            "Kerr scaling report needs one mode or one ground-coupled and one other mode; skipped"
        )?,
    }
    let value = json!({
        "n": n,
        "hamiltonian": collective,
        "nonlinearities": rc,
        "single_emitter": rs,
        "scaling": scaling,
        "bounds": bounds,
        "kerr_scaling": kerr,
    });
    json_output(out, &value)
}

fn probe_label(p: &Probe) -> String {
    match p {
        Probe::Fock(n) => format!(
            "fock:{}",
            n.iter().map(usize::to_string).collect::<Vec<_>>().join(";")
        ),
        Probe::Quadrature(x) => format!(
            "quadrature:{}",
            x.iter()
                .map(|v| format!("{v:.9}"))
                .collect::<Vec<_>>()
                .join(";")
        ),
    }
}

pub fn validate(path: &Path) -> anyhow::Result<Output> {
    let (cfg, sys) = system(path)?;
    let r = oracle_report(
        &sys,
        cfg.truncation.cutoff,
        cfg.truncation.n_probe,
        cfg.expansion.order,
    )?;
    let mut t = Table::new([
        "probe",
        "exact (rad/s)",
        "expansion (rad/s)",
        "relative error",
    ]);
    let mut csv = String::from("probe,exact,predicted,rel_error\n");
    for e in &r.entries {
        let label = probe_label(&e.probe);
        t.row([
            label.clone(),
            num(e.exact),
            num(e.predicted),
            format!("{:.3e}", e.rel_error),
        ]);
        writeln!(
            csv,
            "{label},{:.17e},{:.17e},{:.17e}",
            e.exact, e.predicted, e.rel_error
        )?;
    }
    let table = format!(
        "Ground manifold, cutoff {}, order {}\n{t}Largest change under cutoff doubling: {:.3e}\n",
        r.cutoff, r.order, r.cutoff_stability
    );
    Ok(Output {
        table: Some(table),
        machine: csv,
    })
}

pub fn nscaling(path: &Path) -> anyhow::Result<Output> {
    let (cfg, sys) = system(path)?;
    if sys.n_levels() != 2 || sys.n_modes() != 1 {
        return Err(ConfigError::Invalid(
            "error curves need a two-level emitter with one mode".into(),
        )
        .into());
    }
    let n_probe = cfg.truncation.n_probe;
    let (opts, ns, regimes) = match &cfg.sweep {
        Some(s) => (s.options(n_probe)?, s.n.clone(), s.regimes.clone()),
        None => {
            let mut o = NscalingOptions::standard(sys.energies[1] - sys.energies[0]);
            o.n_probe = n_probe;
            (o, vec![1, 10], vec![Regime::Bare, Regime::Rwa])
        }
    };
    let mut curves = Vec::new();
    for r in regimes {
        curves.extend(nscaling_curves(r, &ns, &opts)?);
    }
    Ok(Output {
        table: None,
        machine: curves_csv(&curves),
    })
}

pub fn convert(path: &Path) -> anyhow::Result<Output> {
    let u: UnitsConfig = load(path)?;
    let rates = rabi_from_beam(&u.field_units())?;
    let mut t = Table::new(["quantity", "value", "unit"]);
    t.row([
        "Rabi frequency Ω".into(),
        num(rates.rabi),
        "rad/s".to_string(),
    ]);
    if let Some(g) = rates.coupling {
        t.row([
            "single-photon coupling g".into(),
            num(g),
            "rad/s".to_string(),
        ]);
    }
    let mut kerr = serde_json::Value::Null;
    if let (Some(k), Some(density)) = (&u.kerr, u.density_per_m3) {
        let rate = four_level_kerr_rate(k.delta_rad_per_s, k.omega_rad_per_s)?;
        let from_rate = chi3_from_kerr(rate, k.dipole_12_c_m, k.dipole_34_c_m, density);
        let closed = chi3_four_level(
            density,
            k.dipole_12_c_m,
            k.dipole_34_c_m,
            k.delta_rad_per_s,
            k.omega_rad_per_s,
        );
        t.row([
            "Kerr coefficient per λ²ν²".into(),
            num(rate),
            "s³/rad³".to_string(),
        ]);
        t.row([
            "χ3 from the Kerr coefficient".into(),
            num(from_rate),
            "m²/V²".to_string(),
        ]);
        t.row(["χ3 closed form".into(), num(closed), "m²/V²".to_string()]);
        let field = k
            .field_v_per_m
            .map(|e| (intensity(e), refractive_index(closed, e)));
        if let Some((i, n)) = field {
            t.row(["probe intensity".into(), num(i), "W/m²".to_string()]);
            t.row(["refractive index".into(), format!("{n:.12}"), String::new()]);
        }
        kerr = json!({
            "rate_per_coupling": rate,
            "chi3_from_rate": from_rate,
            "chi3_closed_form": closed,
            "intensity": field.map(|f| f.0),
            "refractive_index": field.map(|f| f.1),
        });
    }
    json_output(
        format!("{t}"),
        &json!({ "rabi": rates.rabi, "coupling": rates.coupling, "kerr": kerr }),
    )
}
