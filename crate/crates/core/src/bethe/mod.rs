//! Bethe-ansatz algebraic systems: the generic construction from an ODE
//! triple, the closed model-specific forms, and a comparison between them.

pub mod compare;
pub mod generic;
pub(crate) mod handcoded;
pub mod multipoly;
pub mod system;

pub use compare::{symbolic_compare, CompareReport};
pub use generic::{coefficient_constraints, residue_equations};
pub use multipoly::{vars_from, MultiPoly, Vars};
pub use system::{AlgebraicSystem, Provenance, MAX_TOTAL_DEGREE};

use crate::error::{QesError, Result};
use crate::models::{ode_system_h2, ode_system_h4, Mode, ModelSpec};

fn check_mode(model: &ModelSpec, mode: Mode) -> Result<()> {
    match (model, mode) {
        (ModelSpec::H2(_), Mode::Table) => Err(QesError::Domain("table mode applies to h4 only".into())),
        (ModelSpec::H4(s), Mode::Fixed) => Err(QesError::NonSquare {
            equations: s.n + 4,
            unknowns: s.n + 3,
            hint: "one equation too many with rho fixed; free rho (table mode)".into(),
        }),
        _ => Ok(()),
    }
}

fn finish(
    model: &ModelSpec,
    vars: Vars,
    equations: Vec<MultiPoly<f64>>,
    provenance: Vec<Provenance>,
) -> Result<AlgebraicSystem<f64>> {
    if let Some(d) = equations.iter().map(|e| e.total_degree()).max() {
        if d > MAX_TOTAL_DEGREE {
            return Err(QesError::Domain(format!("generated equation of total degree {d}")));
        }
    }
    AlgebraicSystem::new(vars, equations, provenance, model.n(), model.poles())
}

/// The closed-form system for `model` (energy formula, coefficient
/// constraints, root equations).
pub fn build_system(model: &ModelSpec, mode: Mode) -> Result<AlgebraicSystem<f64>> {
    model.validate()?;
    check_mode(model, mode)?;
    let vars = model.unknowns(mode);
    let parts = match model {
        ModelSpec::H2(s) => handcoded::h2(s, &vars),
        ModelSpec::H4(s) => handcoded::h4(s, &vars),
    };
    let mut eqs = vec![parts.energy];
    let mut prov = vec![Provenance::EnergyFormula];
    if let Some(k) = parts.kappa {
        eqs.push(k);
        prov.push(Provenance::KappaConstraint);
    }
    for c in parts.coefficient {
        eqs.push(c);
        prov.push(Provenance::Coefficient);
    }
    for r in parts.residues {
        eqs.push(r);
        prov.push(Provenance::Residue);
    }
    finish(model, vars, eqs, prov)
}

/// The system obtained from the model's ODE triple by the generic
/// construction. Coefficient equations are tagged: the one containing `κ`
/// but not `E` is the κ-constraint; the highest-power one containing `E` is
/// the energy formula.
pub fn build_generic_system(model: &ModelSpec, mode: Mode) -> Result<AlgebraicSystem<f64>> {
    model.validate()?;
    check_mode(model, mode)?;
    let vars = model.unknowns(mode);
    let ode = match model {
        ModelSpec::H2(s) => ode_system_h2(s, &vars),
        ModelSpec::H4(s) => ode_system_h4(s, &vars),
    };
    let n = model.n();
    let coeffs = coefficient_constraints(&ode.p, &ode.q, &ode.w, n)?;
    let ie = vars.iter().position(|v| v == "E");
    let ik = vars.iter().position(|v| v == "kappa");
    let has = |e: &MultiPoly<f64>, i: Option<usize>| i.map(|i| e.contains(i)).unwrap_or(false);
    let mut prov = vec![Provenance::Coefficient; coeffs.len()];
    for (m, e) in coeffs.iter().enumerate() {
        if has(e, ik) && !has(e, ie) {
            prov[m] = Provenance::KappaConstraint;
        }
    }
    if let Some(m) = (0..coeffs.len()).rev().find(|&m| prov[m] == Provenance::Coefficient && has(&coeffs[m], ie)) {
        prov[m] = Provenance::EnergyFormula;
    }
    let mut eqs = coeffs;
    for r in residue_equations(&ode.p, &ode.q, n) {
        eqs.push(r);
        prov.push(Provenance::Residue);
    }
    finish(model, vars, eqs, prov)
}
