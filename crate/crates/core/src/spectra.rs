//! Physical reports built from raw solutions: branch assembly, flags,
//! normalization and coupling scans.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bethe::build_system;
use crate::error::{QesError, Result};
use crate::models::{energy_h2, energy_h4, BranchParams, Gauge, H4Spec, Mode, ModelSpec};
use crate::quad::adaptive_simpson;
use crate::solve::{closed_form_solutions, solve_system, RawSolution, SolverConfig, SolverStats, POLE_TOL, REAL_TOL};

/// Energies closer than this are tagged as a degenerate pair.
pub const DEGENERATE_TOL: f64 = 1e-6;
/// Solver energy and closed-form energy must agree to this.
pub const ENERGY_CONSISTENCY_TOL: f64 = 1e-9;
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
pub const DEFAULT_NORM_RMAX: f64 = 20.0;

fn real(c: Complex64) -> bool {
    c.im.abs() <= REAL_TOL * (1.0 + c.re.abs())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchFlags {
    pub real_energy: bool,
    /// `ν` real and at most 1/2.
    pub nu_admissible: bool,
    pub roots_real: bool,
    pub pole_clear: bool,
    pub normalizable: bool,
    /// Another branch of the report has an energy within `1e-6`.
    pub degenerate_pair: bool,
    /// Solver Jacobian nearly singular here.
    pub singular: bool,
    /// Closed-form energy agrees with the solved one to `1e-9`.
    pub energy_consistent: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootValue {
    pub re: f64,
    pub im: f64,
}

/// One solution branch in report form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub nu: f64,
    pub nu_im: f64,
    pub g: f64,
    pub energy: f64,
    pub energy_im: f64,
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_im: Option<f64>,
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_im: Option<f64>,
    pub roots: Vec<RootValue>,
    pub flags: BranchFlags,
    /// Scaled residual of the Bethe system at this branch.
    pub residual: f64,
}

impl Branch {
    pub fn params(&self) -> BranchParams {
        BranchParams::new(
            Complex64::new(self.nu, self.nu_im),
            Complex64::new(self.energy, self.energy_im),
            self.kappa.map(|k| Complex64::new(k, self.kappa_im.unwrap_or(0.0))),
            self.rho.map(|r| Complex64::new(r, self.rho_im.unwrap_or(0.0))),
            self.roots.iter().map(|r| Complex64::new(r.re, r.im)).collect(),
        )
    }

    /// Real `ν`, `E` and couplings; the roots may still form conjugate pairs.
    pub fn is_real(&self) -> bool {
        let p = self.params();
        real(p.nu) && real(p.energy) && p.kappa.map_or(true, real) && p.rho.map_or(true, real)
    }
}

/// How the branch set was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    MultiStart,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub model: String,
    pub spec: ModelSpec,
    pub mode: Mode,
    pub method: Method,
    pub branches: Vec<Branch>,
    pub stats: SolverStats,
    /// Largest branch residual.
    pub residual_max: f64,
}

impl SpectrumReport {
    pub fn real_count(&self) -> usize {
        self.branches.iter().filter(|b| b.is_real()).count()
    }

    pub fn complex_count(&self) -> usize {
        self.branches.len() - self.real_count()
    }
}

/// Branch flags that depend on the branch alone.
pub fn branch_flags(model: &ModelSpec, p: &BranchParams) -> BranchFlags {
    let poles = model.poles();
    let pole_clear = p
        .roots
        .iter()
        .all(|z| poles.iter().all(|&q| (z - q).norm() > POLE_TOL * (1.0 + q.abs())));
    BranchFlags {
        real_energy: real(p.energy),
        nu_admissible: real(p.nu) && p.nu.re <= 0.5,
        roots_real: p.roots.iter().all(|&z| real(z)),
        pole_clear,
        normalizable: normalize(model, p, DEFAULT_NORM_RMAX, DEFAULT_QUAD_TOL).is_ok(),
        ..Default::default()
    }
}

/// Closed-form energy from the other unknowns of a branch.
pub fn closed_form_energy(model: &ModelSpec, p: &BranchParams) -> Complex64 {
    match model {
        ModelSpec::H2(s) => energy_h2(s, p.nu),
        ModelSpec::H4(s) => {
            let rho = p.rho.unwrap_or(Complex64::new(s.rho, 0.0));
            energy_h4(s, p.sum_roots(), p.nu, p.kappa.unwrap_or_default(), rho)
        }
    }
}

fn to_params(model: &ModelSpec, s: &RawSolution<f64>) -> BranchParams {
    let n = model.n();
    let roots = s.values[..n].to_vec();
    let get = |k: &str| s.get(k);
    let rho = match model {
        ModelSpec::H4(spec) => Some(get("rho").unwrap_or(Complex64::new(spec.rho, 0.0))),
        ModelSpec::H2(_) => None,
    };
    BranchParams::new(get("nu").expect("nu unknown"), get("E").expect("E unknown"), get("kappa"), rho, roots)
}

fn assemble(model: &ModelSpec, sols: &[RawSolution<f64>]) -> Vec<Branch> {
    let mut out: Vec<Branch> = sols
        .iter()
        .map(|s| {
            let mut p = to_params(model, s);
            let e_closed = closed_form_energy(model, &p);
            let consistent = (e_closed - p.energy).norm() <= ENERGY_CONSISTENCY_TOL * (1.0 + p.energy.norm());
            p.energy = e_closed;
            let mut flags = branch_flags(model, &p);
            flags.singular = s.singular;
            flags.energy_consistent = consistent;
            Branch {
                nu: p.nu.re,
                nu_im: p.nu.im,
                g: p.g.re,
                energy: p.energy.re,
                energy_im: p.energy.im,
                kappa: p.kappa.map(|k| k.re),
                kappa_im: p.kappa.map(|k| k.im).filter(|v| *v != 0.0),
                rho: p.rho.map(|r| r.re),
                rho_im: p.rho.map(|r| r.im).filter(|v| *v != 0.0),
                roots: p.roots.iter().map(|z| RootValue { re: z.re, im: z.im }).collect(),
                flags,
                residual: s.residual_inf,
            }
        })
        .collect();
    sort_branches(&mut out);
    tag_degenerate(&mut out);
    out
}

/// Real-energy branches by energy, then complex ones by real part.
pub fn sort_branches(b: &mut [Branch]) {
    b.sort_by(|x, y| {
        y.flags
            .real_energy
            .cmp(&x.flags.real_energy)
            .then(x.energy.total_cmp(&y.energy))
            .then(x.energy_im.total_cmp(&y.energy_im))
            .then(x.nu.total_cmp(&y.nu))
            .then(x.nu_im.total_cmp(&y.nu_im))
    });
}

fn tag_degenerate(b: &mut [Branch]) {
    for i in 0..b.len() {
        if !b[i].flags.real_energy {
            continue;
        }
        let e = b[i].energy;
        b[i].flags.degenerate_pair =
            (0..b.len()).any(|j| j != i && b[j].flags.real_energy && (b[j].energy - e).abs() <= DEGENERATE_TOL);
    }
}

/// Builds and solves the model's system, then assembles flagged, sorted
/// branches. H2 with `n ≤ 1` uses the closed-form elimination.
pub fn enumerate_levels(model: &ModelSpec, mode: Mode, cfg: &SolverConfig) -> Result<SpectrumReport> {
    let sys = build_system(model, mode)?;
    let (sols, stats, method) = match closed_form_solutions(model, &sys)? {
        Some(s) => (s, SolverStats::default(), Method::ClosedForm),
        None => {
            let (s, st) = solve_system(&sys, cfg)?;
            (s, st, Method::MultiStart)
        }
    };
    let branches = assemble(model, &sols);
    let residual_max = branches.iter().map(|b| b.residual).fold(0.0, f64::max);
    Ok(SpectrumReport { model: model.id().into(), spec: model.clone(), mode, method, branches, stats, residual_max })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Normalization {
    /// `N` with `∫₀^{r_max} |NΨ|² dr = 1`.
    pub constant: f64,
    /// `ln N`, usable when `N` itself over- or underflows.
    pub log_constant: f64,
    /// Upper limit actually used after tail extension.
    pub r_max: f64,
}

/// Normalization constant of a real branch's wavefunction by adaptive
/// Simpson on a log-rescaled `|Ψ|²`. `r_max` is doubled until the
/// integrand has decayed; a tail that never decays is an error.
pub fn normalize(model: &ModelSpec, branch: &BranchParams, r_max: f64, quad_tol: f64) -> Result<Normalization> {
    if !(r_max > 0.0) || !(quad_tol > 0.0) {
        return Err(QesError::Domain("normalize needs r_max > 0 and quad_tol > 0".into()));
    }
    let gauge = Gauge::new(model, branch)?;
    let ln_psi = |r: f64| gauge.log_abs(r.max(1e-300)).0;
    let mut r_max = r_max;
    for _ in 0..12 {
        let peak = (1..=4000).map(|k| ln_psi(r_max * k as f64 / 4000.0)).fold(f64::NEG_INFINITY, f64::max);
        if !peak.is_finite() {
            return Err(QesError::Domain("wavefunction vanishes or overflows on the grid".into()));
        }
        let tail = (2.0 * (ln_psi(r_max) - peak)).exp();
        if tail > quad_tol * 1e-6 {
            r_max *= 2.0;
            continue;
        }
        let f = |r: f64| {
            let v = (2.0 * (ln_psi(r) - peak)).exp();
            if v.is_nan() {
                0.0
            } else {
                v
            }
        };
        let rough = adaptive_simpson(f, 0.0, r_max, 1e-6 * r_max, 64)?;
        if !(rough > 0.0) {
            return Err(QesError::Domain("zero norm".into()));
        }
        let integral = adaptive_simpson(f, 0.0, r_max, quad_tol * rough, 64)?;
        let log_constant = -peak - 0.5 * integral.ln();
        return Ok(Normalization { constant: log_constant.exp(), log_constant, r_max });
    }
    Err(QesError::Domain("wavefunction tail does not decay; not normalizable".into()))
}

/// Normalized wavefunction value.
pub fn normalized_psi(model: &ModelSpec, branch: &BranchParams, norm: &Normalization, r: f64) -> Result<f64> {
    let gauge = Gauge::new(model, branch)?;
    let (l, s) = gauge.log_abs(r);
    Ok(s * (l + norm.log_constant).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanAxis {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
    pub log_spaced: bool,
}

impl ScanAxis {
    pub fn values(&self) -> Vec<f64> {
        let k = self.samples;
        (0..k)
            .map(|i| {
                let t = if k == 1 { 0.0 } else { i as f64 / (k - 1) as f64 };
                if self.log_spaced {
                    (self.lo.ln() + t * (self.hi.ln() - self.lo.ln())).exp()
                } else {
                    self.lo + t * (self.hi - self.lo)
                }
            })
            .collect()
    }
}

/// A real solution recorded by a scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub gamma: f64,
    pub rho: f64,
    pub nu: f64,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSample {
    pub gamma: f64,
    pub real: Vec<ScanPoint>,
    pub real_count: usize,
    pub complex_count: usize,
    /// Complex energies `(re, im)` with their `(ρ, ν)` real parts.
    pub complex: Vec<(f64, f64, f64, f64)>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub n: usize,
    pub ell: i32,
    pub axis: ScanAxis,
    pub samples: Vec<ScanSample>,
}

impl ScanGrid {
    pub fn solved_fraction(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().filter(|s| s.error.is_none()).count() as f64 / self.samples.len() as f64
    }
}

/// Search boxes for a scan point. Branch parameters grow with the coupling
/// (`ρ`, `ν` like `√γ`, energies and `κ` like `γ`), and the scan counts
/// every real branch, so `ν` is not capped at `1/2`.
fn scan_config(cfg: &SolverConfig, gamma: f64) -> SolverConfig {
    let s = gamma.sqrt();
    let mut c = cfg.clone();
    let boxes = [
        ("nu", (-10.0 - s, 2.0 + 1.5 * s)),
        ("E", (-100.0 - 10.0 * gamma, 100.0 + 2.0 * gamma)),
        ("kappa", (-100.0 - 13.0 * gamma, 10.0 + gamma)),
        ("rho", (-20.0 - 5.0 * s, 20.0 + 5.0 * s)),
    ];
    for (name, b) in boxes {
        c.boxes.entry(name.into()).or_insert(b);
    }
    c
}

/// Table-mode H4 enumeration at log-spaced `γ` in `[lo, hi]`.
pub fn scan_parameters(
    n: usize,
    ell: i32,
    gamma_range: (f64, f64),
    samples: usize,
    cfg: &SolverConfig,
) -> Result<ScanGrid> {
    let (lo, hi) = gamma_range;
    if samples < 2 {
        return Err(QesError::Domain("a scan needs at least 2 samples".into()));
    }
    if !(lo > 0.0 && hi > lo) {
        return Err(QesError::Domain(format!("bad gamma range [{lo}, {hi}]")));
    }
    let axis = ScanAxis { name: "gamma".into(), lo, hi, samples, log_spaced: true };
    let mut out = Vec::with_capacity(samples);
    for gamma in axis.values() {
        let spec = ModelSpec::H4(H4Spec { gamma, rho: 0.0, ell, n });
        let sample = match enumerate_levels(&spec, Mode::Table, &scan_config(cfg, gamma)) {
            Ok(rep) => {
                let real: Vec<ScanPoint> = rep
                    .branches
                    .iter()
                    .filter(|b| b.is_real())
                    .map(|b| ScanPoint { gamma, rho: b.rho.unwrap_or(0.0), nu: b.nu, energy: b.energy })
                    .collect();
                let complex: Vec<(f64, f64, f64, f64)> = rep
                    .branches
                    .iter()
                    .filter(|b| !b.is_real())
                    .map(|b| (b.energy, b.energy_im, b.rho.unwrap_or(0.0), b.nu))
                    .collect();
                ScanSample { gamma, real_count: real.len(), complex_count: complex.len(), real, complex, error: None }
            }
            Err(e) => ScanSample {
                gamma,
                real: Vec::new(),
                real_count: 0,
                complex_count: 0,
                complex: Vec::new(),
                error: Some(e.to_string()),
            },
        };
        out.push(sample);
    }
    Ok(ScanGrid { n, ell, axis, samples: out })
}
