use num_complex::Complex64 as C64;

use super::TiptError;
use crate::ops::{ModePolynomial, OperatorMatrix, PolySum};

/// One factor `S_{row,col}` of a subscript chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factor {
    pub symbol: usize,
    pub row: usize,
    pub col: usize,
}

/// Distinct orderings of a multiset of symbols, in lexicographic order.
pub fn distinct_permutations(symbols: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = symbols.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..cur.len())
            .rev()
            .find(|&j| cur[j] > cur[i - 1])
            .expect("pivot exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

/// Checks that consecutive factors share their inner subscript.
pub fn check_chain(factors: &[Factor]) -> Result<(), TiptError> {
    match factors.windows(2).position(|w| w[0].col != w[1].row) {
        Some(p) => Err(TiptError::BrokenChain { position: p + 1 }),
        None => Ok(()),
    }
}

/// Sum over distinct permutations of the symbols with the subscripts held in
/// place, each product taken left to right.
pub fn allp(matrices: &[&OperatorMatrix], factors: &[Factor]) -> Result<ModePolynomial, TiptError> {
    check_chain(factors)?;
    let n_modes = matrices.first().map(|m| m.n_modes()).unwrap_or(0);
    let symbols: Vec<usize> = factors.iter().map(|f| f.symbol).collect();
    let chain: Vec<usize> = factors
        .first()
        .map(|f| f.row)
        .into_iter()
        .chain(factors.iter().map(|f| f.col))
        .collect();
    let mut sum = PolySum::new(n_modes);
    for perm in distinct_permutations(&symbols) {
        if let Some(p) = chain_product(matrices, &perm, &chain) {
            sum.push_poly(&p, C64::new(1.0, 0.0));
        }
    }
    Ok(sum.finish())
}

/// `M[s0]_{c0 c1} M[s1]_{c1 c2} ⋯`, or `None` when a factor vanishes.
pub(crate) fn chain_product(
    matrices: &[&OperatorMatrix],
    symbols: &[usize],
    chain: &[usize],
) -> Option<ModePolynomial> {
    let mut acc: Option<ModePolynomial> = None;
    for (k, &s) in symbols.iter().enumerate() {
        let f = matrices[s].get(chain[k], chain[k + 1]);
        if f.is_zero() {
            return None;
        }
        acc = Some(match acc {
            None => f.clone(),
            Some(a) => &a * f,
        });
        if acc.as_ref().is_some_and(ModePolynomial::is_zero) {
            return None;
        }
    }
    acc
}
