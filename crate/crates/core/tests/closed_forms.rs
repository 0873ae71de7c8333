use num_complex::Complex64;
use qes_core::models::{energy_h2_general, g_from_nu, kappa_h4, nu_from_g, H2Spec, H4Spec, Mode, ModelSpec};
use qes_core::solve::SolverConfig;
use qes_core::spectra::enumerate_levels;

#[test]
fn ground_branches_without_roots() {
    for ell in 0..=10 {
        for omega in [0.1, 1.0, 4.0] {
            let spec = H2Spec::new(omega, ell, 0).unwrap();
            let rep = enumerate_levels(&ModelSpec::H2(spec.clone()), Mode::Fixed, &SolverConfig::default()).unwrap();
            assert_eq!(rep.branches.len(), 2);
            let sw = omega.sqrt();
            let l = ell as f64;
            let mut nus: Vec<f64> = rep.branches.iter().map(|b| b.nu).collect();
            nus.sort_by(f64::total_cmp);
            assert!((nus[0] + (2.0 * l + sw / 2.0 + 1.0)).abs() <= 1e-12, "{ell} {omega}: {nus:?}");
            assert!(nus[1].abs() <= 1e-12);
            for b in &rep.branches {
                let want = sw * (2.0 * b.nu + l + 1.5);
                assert!((b.energy - want).abs() <= 1e-9);
                assert_eq!(b.nu_im, 0.0);
            }
        }
    }
}

#[test]
fn one_root_energies_follow_the_general_formula() {
    for ell in [-1, 0, 1, 2, 5, 10] {
        for omega in [0.1, 1.0] {
            let spec = H2Spec::new(omega, ell, 1).unwrap();
            let rep = enumerate_levels(&ModelSpec::H2(spec.clone()), Mode::Fixed, &SolverConfig::default()).unwrap();
            assert!(!rep.branches.is_empty());
            for b in &rep.branches {
                let want = energy_h2_general(&spec, Complex64::new(b.nu, b.nu_im));
                assert!((Complex64::new(b.energy, b.energy_im) - want).norm() <= 1e-9, "{ell} {omega}");
            }
        }
    }
}

#[test]
fn kappa_relation_holds_on_solved_branches() {
    let cfg = SolverConfig { starts: 2000, ..Default::default() };
    for (n, ell) in [(0, 1), (0, 6), (1, 2)] {
        let spec = H4Spec::new(0.1, 0.0, ell, n).unwrap();
        let rep = enumerate_levels(&ModelSpec::H4(spec.clone()), Mode::Table, &cfg).unwrap();
        assert!(!rep.branches.is_empty());
        for b in &rep.branches {
            let p = b.params();
            let want = kappa_h4(&spec, p.nu, p.rho.unwrap());
            let got = p.kappa.unwrap();
            assert!((got - want).norm() <= 1e-9 * (1.0 + want.norm()), "n={n} l={ell}");
        }
    }
}

#[test]
fn coupling_round_trip() {
    for k in 0..=200 {
        let nu = -20.0 + 0.1025 * k as f64;
        let nu = nu.min(0.5);
        let g = g_from_nu(nu.into()).re;
        assert!((g - nu * (1.0 - nu)).abs() <= 1e-12 * (1.0 + g.abs()));
        assert!((nu_from_g(g).unwrap() - nu).abs() <= 1e-9 * (1.0 + nu.abs()));
    }
    assert!(nu_from_g(0.3).is_err());
}
