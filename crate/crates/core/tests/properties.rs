use num_complex::Complex64;
use proptest::prelude::*;
use qes_core::bethe::build_system;
use qes_core::models::{g_from_nu, nu_from_g, H2Spec, H4Spec, Mode, ModelSpec};
use qes_core::poly::{all_roots, pseudo_hermite, relative_residual, Poly, ROOT_RESIDUAL_TOL};
use qes_core::solve::{polish, residual_inf, solve_system, SolverConfig};
use qes_core::spectra::enumerate_levels;
use qes_core::Poly32;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn root_residuals_on_random_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let deg = rng.gen_range(1..=8);
        let mut c: Vec<f64> = (0..=deg).map(|_| rng.gen_range(-10.0..=10.0)).collect();
        if c[deg] == 0.0 {
            c[deg] = 1.0;
        }
        let p = Poly::new(c);
        let rs = all_roots(&p).unwrap();
        assert_eq!(rs.count(), p.degree(), "{:?}", p.coeffs());
        for r in rs.all() {
            let res = relative_residual(&p, r);
            assert!(res <= ROOT_RESIDUAL_TOL, "{:?}: root {r} residual {res}", p.coeffs());
        }
    }
}

#[test]
fn roots_in_single_precision() {
    let p: Poly32 = Poly::new(vec![-2.0f32, 0.0, 1.0]);
    let rs = all_roots(&p).unwrap();
    assert_eq!(rs.real_roots.len(), 2);
    assert!((rs.real_roots[1] - 2.0f32.sqrt()).abs() < 1e-5);
}

fn direct_hermite(m: usize, r: f64) -> f64 {
    let fact = |k: usize| (1..=k).map(|x| x as f64).product::<f64>();
    let mut s = 0.0;
    for p in 0..=m / 2 {
        s += (2.0 * r).powi((m - 2 * p) as i32) / (fact(p) * fact(m - 2 * p));
    }
    fact(m) * s
}

#[test]
fn pseudo_hermite_matches_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in [2, 4, 6, 8, 10] {
        let h = pseudo_hermite::<f64>(m).unwrap();
        for _ in 0..20 {
            let r = rng.gen_range(-3.0..3.0);
            let want = direct_hermite(m, r);
            assert!((h.eval(r) - want).abs() <= 1e-12 * want.abs(), "m={m} r={r}");
        }
        for k in 0..=2000 {
            assert!(h.eval(k as f64 * 0.01) > 0.0);
        }
        assert_eq!(h.coeffs()[m], 2f64.powi(m as i32));
    }
}

fn small_int_poly() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-20i32..=20).prop_map(f64::from), 1..8)
}

proptest! {
    #[test]
    fn derivative_is_linear(p in small_int_poly(), q in small_int_poly(), a in -5i32..=5, b in -5i32..=5) {
        let (p, q) = (Poly::new(p), Poly::new(q));
        let (a, b) = (f64::from(a), f64::from(b));
        let lhs = (&p.scale(a) + &q.scale(b)).derivative();
        let rhs = &p.derivative().scale(a) + &q.derivative().scale(b);
        prop_assert_eq!(lhs.coeffs(), rhs.coeffs());
    }

    #[test]
    fn coupling_round_trip(nu in -50.0f64..=0.5) {
        let g = g_from_nu(Complex64::new(nu, 0.0)).re;
        let back = nu_from_g(g).unwrap();
        prop_assert!((back - nu).abs() <= 1e-9 * (1.0 + nu.abs()));
        prop_assert!((g_from_nu(Complex64::new(back, 0.0)).re - g).abs() <= 1e-10 * (1.0 + g.abs()));
    }
}

fn swap_roots(x: &[Complex64]) -> Vec<Complex64> {
    let mut y = x.to_vec();
    y.swap(0, 1);
    y
}

#[test]
fn two_root_solutions_are_closed_under_permutation() {
    let cfg = SolverConfig { starts: 3000, ..Default::default() };
    let cases = [
        (ModelSpec::H2(H2Spec::new(0.1, 1, 2).unwrap()), Mode::Fixed),
        (ModelSpec::H4(H4Spec::new(0.1, 0.0, 1, 2).unwrap()), Mode::Table),
    ];
    for (m, mode) in cases {
        let sys = build_system(&m, mode).unwrap();
        let (sols, _) = solve_system(&sys, &cfg).unwrap();
        assert!(!sols.is_empty());
        for s in &sols {
            let swapped = swap_roots(&s.values);
            assert!(residual_inf(&sys, &swapped) <= 1e-9, "{m:?}");
            // polishing the swapped point lands on the same canonical solution
            let p = polish(&sys, &swapped, &cfg).expect("swapped point polishes");
            let d = p.values.iter().zip(&s.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(d <= 1e-7, "{m:?}: {d}");
        }
    }
}

#[test]
fn solver_is_deterministic() {
    let cfg = SolverConfig { starts: 2000, ..Default::default() };
    let m = ModelSpec::H2(H2Spec::new(0.1, 3, 2).unwrap());
    let sys = build_system(&m, Mode::Fixed).unwrap();
    let (a, sa) = solve_system(&sys, &cfg).unwrap();
    let (b, sb) = solve_system(&sys, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(sa, sb);

    let h4 = ModelSpec::H4(H4Spec::new(1.0, 0.0, 1, 1).unwrap());
    let x = enumerate_levels(&h4, Mode::Table, &cfg).unwrap();
    let y = enumerate_levels(&h4, Mode::Table, &cfg).unwrap();
    assert_eq!(serde_json::to_string(&x).unwrap(), serde_json::to_string(&y).unwrap());
}
