mod common;

use common::*;
use emitnl::emitter::{coupled_system, four_level, FourLevelParams, Regime};
use emitnl::ops::{ModePolynomial, OperatorMatrix};
use emitnl::tipt::{
    allp, closed_levels, eigenvalue_coefficient_closed, expand_recursive, Factor, MultiIndex,
    TiptError,
};
use emitnl::C64;

fn idx(v: &[u32]) -> MultiIndex {
    MultiIndex::new(v.to_vec())
}

#[test]
fn allp_three_distinct_symbols() {
    // scalar symbols make every product a distinct number
    let mk = |vals: [f64; 9]| {
        OperatorMatrix::from_fn(3, 0, |i, j| {
            ModePolynomial::constant(0, C64::new(vals[3 * i + j], 0.0))
        })
        .unwrap()
    };
    let a = mk([1., 2., 3., 5., 7., 11., 13., 17., 19.]);
    let b = mk([23., 29., 31., 37., 41., 43., 47., 53., 59.]);
    let c = mk([61., 67., 71., 73., 79., 83., 89., 97., 101.]);
    let f = [
        Factor {
            symbol: 0,
            row: 0,
            col: 1,
        },
        Factor {
            symbol: 1,
            row: 1,
            col: 2,
        },
        Factor {
            symbol: 2,
            row: 2,
            col: 0,
        },
    ];
    let m = [&a, &b, &c];
    let got = allp(&m, &f).unwrap().scalar().re;
    let g = |s: &OperatorMatrix, i: usize, j: usize| s.get(i, j).scalar().re;
    let mut expect = 0.0;
    for p in [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ] {
        expect += g(m[p[0]], 0, 1) * g(m[p[1]], 1, 2) * g(m[p[2]], 2, 0);
    }
    assert_eq!(got, expect);

    let f2 = [
        Factor {
            symbol: 0,
            row: 0,
            col: 1,
        },
        Factor {
            symbol: 1,
            row: 1,
            col: 2,
        },
        Factor {
            symbol: 1,
            row: 2,
            col: 0,
        },
    ];
    let got = allp(&m, &f2).unwrap().scalar().re;
    let expect = g(&a, 0, 1) * g(&b, 1, 2) * g(&b, 2, 0)
        + g(&b, 0, 1) * g(&a, 1, 2) * g(&b, 2, 0)
        + g(&b, 0, 1) * g(&b, 1, 2) * g(&a, 2, 0);
    assert_eq!(got, expect);

    let single = allp(&m, &f[..1]).unwrap();
    assert_eq!(single, *a.get(0, 1));
}

#[test]
fn two_level_second_and_fourth_order() {
    let delta = 1.7;
    let sys = two_level_rwa(delta);
    let n = ModePolynomial::number(1, 0);
    let e2 = eigenvalue_coefficient_closed(&idx(&[2]), &sys).unwrap();
    assert!(e2.rel_diff(&n.scale_re(-1.0 / delta)) < 1e-14);
    let e4 = eigenvalue_coefficient_closed(&idx(&[4]), &sys).unwrap();
    let nn = &n * &n;
    assert!(e4.rel_diff(&nn.scale_re(1.0 / delta.powi(3))) < 1e-14);
    let s = expand_recursive(&sys, 0, 4).unwrap();
    assert!(s.eigenvalue(&idx(&[4])).unwrap().rel_diff(&e4) < 1e-14);
}

#[test]
fn first_order_vanishes_and_unit_eigenvector_diagonal_vanishes() {
    let mut r = rng(11);
    let sys = random_system(&mut r, 4, 2, false);
    let s = expand_recursive(&sys, 0, 3).unwrap();
    for i in 0..2 {
        let u = MultiIndex::unit(2, i);
        assert!(s.eigenvalue(&u).unwrap().is_zero());
        assert!(s.eigenvector_coefficient(0, &u).unwrap().is_zero());
    }
    assert_eq!(s.eigenvalue(&idx(&[0, 0])).unwrap().scalar().re, 0.0);
}

#[test]
fn closed_forms_match_recursion_on_random_systems() {
    let mut r = rng(5);
    for trial in 0..12 {
        let levels = 3 + trial % 3;
        let n_modes = 1 + trial % 4;
        let sys = random_system(&mut r, levels, n_modes, trial % 2 == 0);
        let s = expand_recursive(&sys, 0, 4).unwrap();
        for j in MultiIndex::enumerate(n_modes, 4) {
            let closed = eigenvalue_coefficient_closed(&j, &sys).unwrap();
            let rec = s.eigenvalue(&j).unwrap();
            let scale = closed.max_abs().max(rec.max_abs());
            assert!(
                closed.max_diff(rec) <= 1e-11 * scale.max(1e-300),
                "trial {trial} index {j}: {}",
                closed.max_diff(rec) / scale
            );
        }
    }
}

#[test]
fn eigenvalue_coefficients_are_hermitian() {
    let mut r = rng(8);
    for _ in 0..5 {
        let sys = random_system(&mut r, 4, 2, true);
        let s = expand_recursive(&sys, 0, 5).unwrap();
        for (j, e) in s.eigenvalue_terms() {
            assert!(e.is_hermitian(1e-11), "index {j}");
        }
        // excited levels too
        let s2 = expand_recursive(&sys, 2, 4).unwrap();
        for (j, e) in s2.eigenvalue_terms() {
            assert!(e.is_hermitian(1e-11), "excited index {j}");
        }
    }
}

#[test]
fn relabeling_modes_swaps_indices() {
    let mut r = rng(21);
    let sys = random_system(&mut r, 4, 2, false);
    let mut swapped = sys.clone();
    swapped.interactions.swap(0, 1);
    // rename operators so that mode 0 of the swapped system is mode 1 of the original
    let swap_modes = |p: &ModePolynomial| {
        ModePolynomial::from_terms(
            2,
            p.terms()
                .map(|(m, c)| (mono(&[m.powers()[1], m.powers()[0]]), *c)),
        )
        .unwrap()
    };
    for v in swapped.interactions.iter_mut() {
        *v = OperatorMatrix::from_fn(4, 2, |i, j| swap_modes(v.get(i, j))).unwrap();
    }
    let a = expand_recursive(&sys, 0, 4).unwrap();
    let b = expand_recursive(&swapped, 0, 4).unwrap();
    for j in MultiIndex::enumerate(2, 4) {
        let jt = idx(&[j.exponents()[1], j.exponents()[0]]);
        let lhs = swap_modes(a.eigenvalue(&j).unwrap());
        assert!(lhs.rel_diff(b.eigenvalue(&jt).unwrap()) < 1e-12, "{j}");
    }
}

#[test]
fn four_level_expansion() {
    let (delta, omega) = (2.3, 0.9);
    let (s, d) = four_level(FourLevelParams {
        delta,
        omega,
        lambda: 0.01,
        nu: 0.02,
        gamma1: 1.0,
        gamma3: 1.0,
    });
    let sys = coupled_system(&s, &d, Regime::Rwa).unwrap();
    let ser = expand_recursive(&sys, 0, 4).unwrap();
    for (j, e) in ser.eigenvalue_terms() {
        if j.total() == 0 {
            continue;
        }
        if j.exponents() == [2, 2] {
            let expect = ModePolynomial::number(2, 0) * ModePolynomial::number(2, 1);
            assert!(
                e.rel_diff(&expect.scale_re(-1.0 / (delta * omega * omega))) < 1e-12,
                "{e}"
            );
        } else {
            assert!(e.pruned(1e-12).is_zero(), "index {j}: {e}");
        }
    }
    // two-photon amplitude onto the upper level
    let c = ser.eigenvector_coefficient(3, &idx(&[1, 1])).unwrap();
    let ab = ModePolynomial::annihilate(2, 0) * ModePolynomial::annihilate(2, 1);
    assert!(
        c.rel_diff(&ab.scale_re(1.0 / (delta * omega))) < 1e-12,
        "{c}"
    );
}

#[test]
fn closed_form_limits() {
    let sys = two_level_rwa(1.0);
    assert_eq!(
        eigenvalue_coefficient_closed(&idx(&[5]), &sys),
        Err(TiptError::ClosedFormOrder(5))
    );
    let mut v = OperatorMatrix::zeros(2, 1);
    v.set(0, 0, ModePolynomial::quadrature(1, 0));
    assert_eq!(
        closed_levels(&idx(&[2]), &[0.0, 1.0], &[v]),
        Err(TiptError::NonzeroDiagonal { mode: 0 })
    );
}

#[test]
fn degenerate_target_rejected() {
    let mut v = OperatorMatrix::zeros(2, 1);
    v.set(0, 1, ModePolynomial::create(1, 0));
    v.set(1, 0, ModePolynomial::annihilate(1, 0));
    let err = emitnl::tipt::expand_levels(&[0.0, 0.0], &[v], 0, 2, Default::default()).unwrap_err();
    assert!(matches!(err, TiptError::DegenerateGap { level: 1, .. }));
}

#[test]
fn two_level_series_follows_catalan_numbers() {
    // ground branch (Δ − √(Δ² + 4nλ²))/2 expands in signed Catalan numbers
    let delta = 1.0;
    let sys = two_level_rwa(delta);
    let s = expand_recursive(&sys, 0, 12).unwrap();
    let catalan = [1.0, 1.0, 2.0, 5.0, 14.0, 42.0];
    for k in 1..=6u32 {
        let nf = s.eigenvalue(&idx(&[2 * k])).unwrap().number_form();
        let expect = if k % 2 == 1 {
            -catalan[k as usize - 1]
        } else {
            catalan[k as usize - 1]
        };
        for (pw, c) in &nf {
            if pw[0] == k {
                assert!(
                    (c.re - expect).abs() < 1e-9 * expect.abs() && c.im.abs() < 1e-9,
                    "k={k}: {c}"
                );
            } else {
                assert!(c.norm() < 1e-9, "k={k} stray n^{}: {c}", pw[0]);
            }
        }
        assert!(s
            .eigenvalue(&idx(&[2 * k - 1]))
            .unwrap()
            .pruned(1e-12)
            .is_zero());
    }
}
