use std::collections::VecDeque;

use super::{DriveKind, DriveSpec, EmitterError, LevelScheme};

/// Relative tolerance on loop sums of drive frequencies.
pub const LOOP_TOL: f64 = 1e-9;

/// Frequency carried by a rotating-frame drive.
fn drive_frequency(scheme: &LevelScheme, d: &DriveSpec) -> Option<f64> {
    let tr = &scheme.transitions[d.transition];
    match &d.kind {
        DriveKind::ClassicalBare { .. } => None,
        DriveKind::ClassicalRwa { frequency, .. } => Some(
            frequency.unwrap_or(scheme.levels[tr.upper].energy - scheme.levels[tr.lower].energy),
        ),
        DriveKind::Quantized { frequency, .. } => Some(*frequency),
    }
}

/// Solves `ℰ_k − ℰ_n = ω` over every driven transition and returns the
/// detunings `ℰ̃_n − ℰ_n`. Levels not connected to any drive keep zero
/// detuning relative to their own component.
pub fn check_consistency(
    scheme: &LevelScheme,
    drives: &[DriveSpec],
) -> Result<Vec<f64>, EmitterError> {
    scheme.validate()?;
    let n = scheme.len();
    // adjacency: (neighbor, signed frequency from this level to the neighbor)
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, d) in drives.iter().enumerate() {
        let tr = scheme
            .transitions
            .get(d.transition)
            .ok_or(EmitterError::UnknownTransition {
                drive: i,
                transition: d.transition,
            })?;
        if let Some(w) = drive_frequency(scheme, d) {
            adj[tr.lower].push((tr.upper, w));
            adj[tr.upper].push((tr.lower, -w));
        }
    }
    let scale = drives
        .iter()
        .filter_map(|d| drive_frequency(scheme, d))
        .map(f64::abs)
        .fold(0.0, f64::max)
        .max(1.0);

    let mut reference: Vec<Option<f64>> = vec![None; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    for root in 0..n {
        if reference[root].is_some() {
            continue;
        }
        reference[root] = Some(scheme.levels[root].energy);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let ev = reference[v].expect("visited");
            for &(u, w) in &adj[v] {
                match reference[u] {
                    None => {
                        reference[u] = Some(ev + w);
                        parent[u] = Some(v);
                        queue.push_back(u);
                    }
                    Some(eu) => {
                        let mismatch = eu - (ev + w);
                        if mismatch.abs() > LOOP_TOL * scale {
                            return Err(EmitterError::Inconsistent {
                                cycle: cycle(&parent, v, u),
                                mismatch,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(scheme
        .levels
        .iter()
        .zip(reference)
        .map(|(l, e)| l.energy - e.expect("all levels visited"))
        .collect())
}

fn path_to_root(parent: &[Option<usize>], mut v: usize) -> Vec<usize> {
    let mut path = vec![v];
    while let Some(p) = parent[v] {
        path.push(p);
        v = p;
    }
    path
}

/// Levels on the loop closed by the edge `v–u`.
fn cycle(parent: &[Option<usize>], v: usize, u: usize) -> Vec<usize> {
    let pv = path_to_root(parent, v);
    let pu = path_to_root(parent, u);
    let meet = pv.iter().find(|x| pu.contains(x)).copied().unwrap_or(v);
    let mut out: Vec<usize> = pv.iter().take_while(|&&x| x != meet).copied().collect();
    out.push(meet);
    let back: Vec<usize> = pu.iter().take_while(|&&x| x != meet).copied().collect();
    out.extend(back.into_iter().rev());
    out
}
