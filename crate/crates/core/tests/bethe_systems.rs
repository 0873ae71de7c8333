use qes_core::bethe::{build_generic_system, build_system, symbolic_compare, AlgebraicSystem, MultiPoly, MAX_TOTAL_DEGREE};
use qes_core::models::{H2Spec, H4Spec, Mode, ModelSpec};

fn h2(omega: f64, ell: i32, n: usize) -> ModelSpec {
    ModelSpec::H2(H2Spec::new(omega, ell, n).unwrap())
}

fn h4(gamma: f64, rho: f64, ell: i32, n: usize) -> ModelSpec {
    ModelSpec::H4(H4Spec::new(gamma, rho, ell, n).unwrap())
}

fn configurations() -> Vec<(ModelSpec, Mode)> {
    let mut out = Vec::new();
    for n in 0..=2 {
        for ell in [-1, 0, 1, 4, 10] {
            out.push((h2(0.1, ell, n), Mode::Fixed));
            out.push((h2(4.0, ell, n), Mode::Fixed));
            out.push((h4(0.1, 0.0, ell, n), Mode::Table));
            out.push((h4(7.0, 0.0, ell, n), Mode::Table));
        }
    }
    out
}

#[test]
fn every_system_is_square_and_degree_bounded() {
    for (m, mode) in configurations() {
        for sys in [build_system(&m, mode).unwrap(), build_generic_system(&m, mode).unwrap()] {
            assert_eq!(sys.equations().len(), sys.unknowns().len(), "{m:?}");
            assert!(sys.max_total_degree() <= MAX_TOTAL_DEGREE, "{m:?}");
            assert_eq!(sys.n_roots(), m.n());
        }
    }
}

#[test]
fn h4_with_fixed_rho_is_overdetermined() {
    let err = build_system(&h4(1.0, 0.3, 1, 1), Mode::Fixed).unwrap_err();
    assert!(err.to_string().contains("table"), "{err}");
    assert!(build_system(&h2(1.0, 1, 1), Mode::Table).is_err());
}

#[test]
fn generic_matches_closed_forms_for_h2_up_to_one_root() {
    for n in 0..=1 {
        for ell in [-1, 0, 1, 5, 10] {
            for omega in [0.1, 1.0, 4.0] {
                let m = h2(omega, ell, n);
                let rep = symbolic_compare(
                    &build_generic_system(&m, Mode::Fixed).unwrap(),
                    &build_system(&m, Mode::Fixed).unwrap(),
                );
                assert!(rep.equivalent, "{m:?}: {:?}", rep.mismatches);
                assert!(rep.max_discrepancy <= 1e-10);
            }
        }
    }
}

#[test]
fn two_root_h2_energy_offset_is_located() {
    // The dedicated two-root forms shift the energy by √ω relative to the
    // general formula; the comparison must point at exactly that.
    let m = h2(0.1, 1, 2);
    let rep = symbolic_compare(
        &build_generic_system(&m, Mode::Fixed).unwrap(),
        &build_system(&m, Mode::Fixed).unwrap(),
    );
    assert!(!rep.equivalent);
    assert!(!rep.mismatches.is_empty());
}

#[test]
fn perturbed_coefficient_is_detected() {
    let m = h2(0.1, 1, 1);
    let sys = build_system(&m, Mode::Fixed).unwrap();
    let last = sys.equations().len() - 1;
    let eq = sys.equations()[last].clone();
    let vars = eq.vars().clone();
    let bumped = &eq + &MultiPoly::constant(&vars, 1e-3);
    let perturbed = sys.with_equation(last, bumped);
    let rep = symbolic_compare(&build_generic_system(&m, Mode::Fixed).unwrap(), &perturbed);
    assert!(!rep.equivalent);
    assert!(rep.max_discrepancy > 1e-6);
    assert!(!rep.mismatches.is_empty());
}

#[test]
fn mismatched_equation_counts_are_structural() {
    let a = build_system(&h2(0.1, 1, 1), Mode::Fixed).unwrap();
    let b = build_system(&h2(0.1, 1, 2), Mode::Fixed).unwrap();
    let rep = symbolic_compare(&a, &b);
    assert!(!rep.equivalent);
}

#[test]
fn json_round_trip_preserves_system() {
    for (m, mode) in [(h2(0.1, 3, 2), Mode::Fixed), (h4(0.1, 0.0, 2, 2), Mode::Table)] {
        let sys = build_system(&m, mode).unwrap();
        let back: AlgebraicSystem<f64> = AlgebraicSystem::from_json(&sys.to_json()).unwrap();
        assert_eq!(back.unknowns(), sys.unknowns());
        assert_eq!(back.equations(), sys.equations());
        assert_eq!(back.provenance(), sys.provenance());
    }
}

#[test]
fn one_root_h2_system_vanishes_at_a_tabulated_branch() {
    // ℓ=1, ω=0.1: ν and E to five decimals, z from the root equation.
    let m = h2(0.1, 1, 1);
    let sys = build_system(&m, Mode::Fixed).unwrap();
    let (nu, e) = (0.07658f64, 1.47146f64);
    let sw = 0.1f64.sqrt();
    let (a, b, c) = (4.0 * sw, -(4.0 - 2.0 * sw + 8.0 * nu + 3.0), -5.0);
    let z = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
    let mut x = vec![0.0; sys.unknowns().len()];
    x[sys.index_of("z1").unwrap()] = z;
    x[sys.index_of("nu").unwrap()] = nu;
    x[sys.index_of("E").unwrap()] = e;
    for eq in sys.equations() {
        let scale = eq.max_abs_coeff() * (1.0 + z.abs()).powi(eq.total_degree() as i32);
        assert!(eq.eval(&x).abs() / scale < 1e-4, "{eq:?}");
    }
}
