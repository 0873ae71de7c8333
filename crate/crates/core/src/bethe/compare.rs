//! Equivalence check between two Bethe systems over the same unknowns.
//!
//! Both systems are first brought to a canonical form: the κ-constraint is
//! solved for `κ` and substituted everywhere, then the energy formula is
//! solved for `E` and substituted. What remains is compared equation by
//! equation up to a scalar factor.

use serde::Serialize;

use super::multipoly::{Exps, MultiPoly};
use super::system::{AlgebraicSystem, Provenance};

pub const COMPARE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub equivalent: bool,
    pub max_discrepancy: f64,
    /// Human-readable location of every mismatch above tolerance.
    pub mismatches: Vec<String>,
}

struct Canon {
    kappa: Option<MultiPoly<f64>>,
    energy: Option<MultiPoly<f64>>,
    coefficient: Vec<MultiPoly<f64>>,
    residues: Vec<MultiPoly<f64>>,
}

fn canonicalize(sys: &AlgebraicSystem<f64>) -> Result<Canon, String> {
    let find = |p: Provenance| -> Vec<usize> {
        sys.provenance().iter().enumerate().filter(|(_, q)| **q == p).map(|(i, _)| i).collect()
    };
    let mut eqs: Vec<MultiPoly<f64>> = sys.equations().to_vec();
    let mut kappa = None;
    if let Some(ik) = sys.index_of("kappa") {
        let idx = find(Provenance::KappaConstraint);
        if idx.len() != 1 {
            return Err(format!("expected one kappa constraint, found {}", idx.len()));
        }
        let k = eqs[idx[0]].solve_linear_for(ik).ok_or("kappa constraint is not linear in kappa")?;
        for (i, e) in eqs.iter_mut().enumerate() {
            if i != idx[0] {
                *e = e.substitute(ik, &k);
            }
        }
        kappa = Some(k);
    }
    let mut energy = None;
    if let Some(ie) = sys.index_of("E") {
        let idx = find(Provenance::EnergyFormula);
        if idx.len() != 1 {
            return Err(format!("expected one energy formula, found {}", idx.len()));
        }
        let en = eqs[idx[0]].solve_linear_for(ie).ok_or("energy formula is not linear in E")?;
        for (i, e) in eqs.iter_mut().enumerate() {
            if i != idx[0] && sys.provenance()[i] != Provenance::KappaConstraint {
                *e = e.substitute(ie, &en);
            }
        }
        energy = Some(en);
    }
    let pick = |p: Provenance| -> Vec<MultiPoly<f64>> { find(p).into_iter().map(|i| eqs[i].clone()).collect() };
    Ok(Canon { kappa, energy, coefficient: pick(Provenance::Coefficient), residues: pick(Provenance::Residue) })
}

fn term_name(vars: &[String], e: &Exps) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(v, &k)| if k == 1 { vars[v].clone() } else { format!("{}^{k}", vars[v]) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Relative discrepancy of `a ≈ λ·b` (λ fixed to 1 when `exact`), with the
/// worst term.
fn discrepancy(a: &MultiPoly<f64>, b: &MultiPoly<f64>, exact: bool) -> (f64, Option<Exps>) {
    if a.is_zero() && b.is_zero() {
        return (0.0, None);
    }
    let scale = a.max_abs_coeff().max(if exact { b.max_abs_coeff() } else { 0.0 });
    if a.is_zero() || b.is_zero() {
        let t = a.terms().chain(b.terms()).next().map(|(e, _)| e.clone());
        return (1.0, t);
    }
    let lambda = if exact {
        1.0
    } else {
        let (e, ca) = a.terms().fold((None, 0.0f64), |(be, bc), (e, c)| {
            if c.abs() > bc.abs() {
                (Some(e.clone()), *c)
            } else {
                (be, bc)
            }
        });
        let cb = b.coeff(e.as_ref().expect("nonzero polynomial"));
        if cb == 0.0 {
            return (1.0, e);
        }
        ca / cb
    };
    let diff = a - &b.scale(lambda);
    let mut worst = (0.0, None);
    for (e, c) in diff.terms() {
        let d = c.abs() / scale;
        if d > worst.0 {
            worst = (d, Some(e.clone()));
        }
    }
    worst
}

/// Whether every equation of `generic` equals a scalar multiple of the
/// corresponding equation of `handcoded`, coefficientwise to `1e-10`.
pub fn symbolic_compare(generic: &AlgebraicSystem<f64>, handcoded: &AlgebraicSystem<f64>) -> CompareReport {
    let mut rep = CompareReport { equivalent: true, max_discrepancy: 0.0, mismatches: Vec::new() };
    let structural = |rep: &mut CompareReport, msg: String| {
        rep.equivalent = false;
        rep.max_discrepancy = f64::INFINITY;
        rep.mismatches.push(msg);
    };
    if generic.unknowns() != handcoded.unknowns() {
        structural(&mut rep, "unknown lists differ".into());
        return rep;
    }
    if generic.equations().len() != handcoded.equations().len() {
        structural(
            &mut rep,
            format!(
                "equation counts differ: {} vs {}",
                generic.equations().len(),
                handcoded.equations().len()
            ),
        );
        return rep;
    }
    let (g, h) = match (canonicalize(generic), canonicalize(handcoded)) {
        (Ok(g), Ok(h)) => (g, h),
        (Err(e), _) => {
            structural(&mut rep, format!("generic system: {e}"));
            return rep;
        }
        (_, Err(e)) => {
            structural(&mut rep, format!("hand-coded system: {e}"));
            return rep;
        }
    };
    let vars: Vec<String> = generic.unknowns().iter().cloned().collect();
    let record = |rep: &mut CompareReport, what: String, (d, t): (f64, Option<Exps>)| {
        rep.max_discrepancy = rep.max_discrepancy.max(d);
        if d > COMPARE_TOL {
            rep.equivalent = false;
            let at = t.map(|e| term_name(&vars, &e)).unwrap_or_default();
            rep.mismatches.push(format!("{what}: relative discrepancy {d:.3e} at term {at}"));
        }
    };

    match (&g.kappa, &h.kappa) {
        (Some(a), Some(b)) => record(&mut rep, "kappa relation".into(), discrepancy(a, b, true)),
        (None, None) => {}
        _ => structural(&mut rep, "only one system has a kappa constraint".into()),
    }
    match (&g.energy, &h.energy) {
        (Some(a), Some(b)) => record(&mut rep, "energy formula".into(), discrepancy(a, b, true)),
        (None, None) => {}
        _ => structural(&mut rep, "only one system has an energy formula".into()),
    }
    if g.residues.len() != h.residues.len() {
        structural(&mut rep, "root equation counts differ".into());
    } else {
        for (i, (a, b)) in g.residues.iter().zip(&h.residues).enumerate() {
            record(&mut rep, format!("root equation {}", i + 1), discrepancy(a, b, false));
        }
    }
    if g.coefficient.len() != h.coefficient.len() {
        structural(&mut rep, "coefficient constraint counts differ".into());
    } else {
        let mut used = vec![false; g.coefficient.len()];
        for (i, b) in h.coefficient.iter().enumerate() {
            let best = (0..g.coefficient.len())
                .filter(|&j| !used[j])
                .map(|j| (j, discrepancy(&g.coefficient[j], b, false)))
                .min_by(|x, y| x.1 .0.total_cmp(&y.1 .0));
            if let Some((j, d)) = best {
                used[j] = true;
                record(&mut rep, format!("coefficient constraint {}", i + 1), d);
            }
        }
    }
    rep
}
