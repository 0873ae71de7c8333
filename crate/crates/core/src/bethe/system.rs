use serde::{Deserialize, Serialize};

use super::multipoly::{vars_from, MultiPoly, Vars};
use crate::error::{QesError, Result};
use crate::scalar::Real;

/// Where an equation of a system comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Residue,
    Coefficient,
    EnergyFormula,
    KappaConstraint,
}

/// Square polynomial system `equations[i] = 0` over `unknowns`.
///
/// The first `n_roots` unknowns are the Bethe roots `z_i`; `poles` are
/// values they must avoid.
#[derive(Clone, Debug)]
pub struct AlgebraicSystem<T: Real> {
    vars: Vars,
    equations: Vec<MultiPoly<T>>,
    provenance: Vec<Provenance>,
    n_roots: usize,
    poles: Vec<T>,
}

/// Largest total degree any generated equation may have.
pub const MAX_TOTAL_DEGREE: usize = 6;

impl<T: Real> AlgebraicSystem<T> {
    pub fn new(
        vars: Vars,
        equations: Vec<MultiPoly<T>>,
        provenance: Vec<Provenance>,
        n_roots: usize,
        poles: Vec<T>,
    ) -> Result<Self> {
        assert_eq!(equations.len(), provenance.len());
        if equations.len() != vars.len() {
            return Err(QesError::NonSquare {
                equations: equations.len(),
                unknowns: vars.len(),
                hint: "equation and unknown counts differ".into(),
            });
        }
        for (i, _) in vars.iter().enumerate() {
            if !equations.iter().any(|e| e.contains(i)) {
                return Err(QesError::Domain(format!("unknown {} appears in no equation", vars[i])));
            }
        }
        Ok(AlgebraicSystem { vars, equations, provenance, n_roots, poles })
    }

    /// Builds without the squareness checks (used for comparisons of raw
    /// generated equation sets).
    pub fn unchecked(vars: Vars, equations: Vec<MultiPoly<T>>, provenance: Vec<Provenance>, n_roots: usize) -> Self {
        AlgebraicSystem { vars, equations, provenance, n_roots, poles: Vec::new() }
    }

    pub fn unknowns(&self) -> &Vars {
        &self.vars
    }

    pub fn equations(&self) -> &[MultiPoly<T>] {
        &self.equations
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn n_roots(&self) -> usize {
        self.n_roots
    }

    pub fn poles(&self) -> &[T] {
        &self.poles
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn max_total_degree(&self) -> usize {
        self.equations.iter().map(|e| e.total_degree()).max().unwrap_or(0)
    }

    /// Same system with equation `i` replaced; used for negative controls.
    pub fn with_equation(&self, i: usize, eq: MultiPoly<T>) -> Self {
        let mut s = self.clone();
        s.equations[i] = eq;
        s
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exps: Vec<u16>,
    coef: f64,
}

#[derive(Serialize, Deserialize)]
struct EquationJson {
    terms: Vec<TermJson>,
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct SystemJson {
    unknowns: Vec<String>,
    equations: Vec<EquationJson>,
    #[serde(default)]
    n_roots: usize,
    #[serde(default)]
    poles: Vec<f64>,
}

impl AlgebraicSystem<f64> {
    /// Canonical JSON text: unknown list plus per-equation term maps.
    pub fn to_json(&self) -> String {
        let j = SystemJson {
            unknowns: self.vars.iter().cloned().collect(),
            equations: self
                .equations
                .iter()
                .zip(&self.provenance)
                .map(|(e, p)| EquationJson {
                    terms: e.terms().map(|(x, c)| TermJson { exps: x.clone(), coef: *c }).collect(),
                    provenance: *p,
                })
                .collect(),
            n_roots: self.n_roots,
            poles: self.poles.clone(),
        };
        serde_json::to_string_pretty(&j).expect("system serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: SystemJson = serde_json::from_str(text)?;
        let vars = vars_from(&j.unknowns);
        let mut eqs = Vec::new();
        let mut prov = Vec::new();
        for e in j.equations {
            if e.terms.iter().any(|t| t.exps.len() != vars.len()) {
                return Err(QesError::Parse("exponent vector length mismatch".into()));
            }
            eqs.push(MultiPoly::from_terms(&vars, e.terms.into_iter().map(|t| (t.exps, t.coef))));
            prov.push(e.provenance);
        }
        Self::new(vars, eqs, prov, j.n_roots, j.poles)
    }
}
