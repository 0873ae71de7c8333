//! Enumeration of all solutions of a square polynomial system.
//!
//! Quasi-random multi-start damped Newton in complex arithmetic, followed by
//! a deflation pass that searches for solutions the starts missed. The
//! small H2 cases with a closed-form elimination are in [`closed`].

pub mod closed;
pub mod compiled;

use std::collections::BTreeMap;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bethe::AlgebraicSystem;
use crate::error::{QesError, Result};
use crate::scalar::Real;
use compiled::{lu, lu_solve, norm_sq, Compiled};

pub use closed::{closed_form_solutions, h2_n0_branches, reduce_h2_n1, H2N1Branch};

/// Imaginary parts at or below `1e-8·(1 + |re|)` count as zero.
pub const REAL_TOL: f64 = 1e-8;
/// Accepted solutions have scaled residual at or below this.
pub const ACCEPT_TOL: f64 = 1e-10;
/// Minimum distance of a root from a pole of the reduced ODE.
pub const POLE_TOL: f64 = 1e-8;
/// Jacobian pivot ratio below which a solution is flagged singular.
pub const SINGULAR_RATIO: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub starts: usize,
    /// Overrides of the default search interval, by unknown name.
    pub boxes: BTreeMap<String, (f64, f64)>,
    pub newton_tol: f64,
    pub dedup_tol: f64,
    pub max_newton_iters: usize,
    /// Extra starts run with deflation of everything already found.
    pub deflation_starts: usize,
    /// Offset into the quasi-random sequence.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            starts: 20000,
            boxes: BTreeMap::new(),
            newton_tol: 1e-12,
            dedup_tol: 1e-8,
            max_newton_iters: 200,
            deflation_starts: 200,
            seed: 0,
        }
    }
}

/// Default search interval for an unknown.
pub fn default_box(name: &str) -> (f64, f64) {
    match name {
        "nu" => (-40.0, 0.5),
        "E" => (-100.0, 100.0),
        "kappa" => (-100.0, 10.0),
        "rho" => (-20.0, 20.0),
        _ => (-50.0, 50.0),
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(QesError::Domain("starts must be at least 1".into()));
        }
        if !(self.dedup_tol > self.newton_tol) {
            return Err(QesError::Domain("dedup_tol must exceed newton_tol".into()));
        }
        for (k, &(lo, hi)) in &self.boxes {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(QesError::Domain(format!("empty search interval for {k}")));
            }
        }
        Ok(())
    }

    pub fn box_for(&self, name: &str) -> (f64, f64) {
        if let Some(&b) = self.boxes.get(name) {
            return b;
        }
        // a "z" override applies to every root unknown
        if name.starts_with('z') {
            if let Some(&b) = self.boxes.get("z") {
                return b;
            }
        }
        default_box(name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawSolution<T: Real> {
    pub unknowns: Vec<String>,
    pub values: Vec<Complex<T>>,
    pub residual_inf: T,
    pub is_real: bool,
    /// Jacobian nearly singular at the solution (possible multiple root).
    pub singular: bool,
}

impl<T: Real> RawSolution<T> {
    pub fn get(&self, name: &str) -> Option<Complex<T>> {
        self.unknowns.iter().position(|u| u == name).map(|i| self.values[i])
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub starts: usize,
    pub converged: usize,
    pub diverged: usize,
    /// Converged points discarded for sitting on a pole or on coincident roots.
    pub rejected: usize,
    /// Converged points merged into an existing solution.
    pub deduped: usize,
    pub singular: usize,
    /// Solutions first found by the deflation pass.
    pub deflation_found: usize,
}

fn is_real_value<T: Real>(c: Complex<T>) -> bool {
    c.im.abs() <= T::lit(REAL_TOL) * (T::one() + c.re.abs())
}

/// Radical inverse of `i` in base `b`.
fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

const PRIMES: [u64; 24] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89];

fn halton(i: u64, dims: usize) -> Vec<f64> {
    (0..dims).map(|d| radical_inverse(i, PRIMES[d % PRIMES.len()])).collect()
}

/// Start `k`: Halton point mapped into the search box; odd `k` get
/// imaginary parts of up to a quarter of the box width.
fn start_point<T: Real>(k: u64, boxes: &[(f64, f64)]) -> Vec<Complex<T>> {
    let dim = boxes.len();
    let u = halton(k + 1, 2 * dim);
    boxes
        .iter()
        .enumerate()
        .map(|(j, &(lo, hi))| {
            let re = lo + (hi - lo) * u[j];
            let im = if k % 2 == 1 { (hi - lo) * (u[dim + j] - 0.5) * 0.5 } else { 0.0 };
            Complex::new(T::lit(re), T::lit(im))
        })
        .collect()
}

enum Outcome<T: Real> {
    Converged(Vec<Complex<T>>),
    Failed,
}

/// Damped Newton on the row-scaled system. With a nonempty `deflate` list
/// the iteration runs on `m(x)·F(x)`, `m = Π(‖x − r‖⁻² + 1)`.
fn newton<T: Real>(
    c: &Compiled<T>,
    mut x: Vec<Complex<T>>,
    tol: T,
    max_iters: usize,
    deflate: &[Vec<Complex<T>>],
) -> Outcome<T> {
    let big = T::lit(1e12);
    let sigma = T::lit(1e-4);
    let min_step = T::lit(1e-10);
    let merit = |x: &[Complex<T>]| -> T {
        let f = norm_sq(&c.residual(x));
        let mut m = T::one();
        for r in deflate {
            let d: T = x.iter().zip(r).fold(T::zero(), |a, (p, q)| a + (*p - *q).norm_sqr());
            m *= T::one() / d + T::one();
        }
        f * m * m
    };
    let mut phi = merit(&x);
    for _ in 0..max_iters {
        if c.residual_inf(&x) <= tol {
            return Outcome::Converged(x);
        }
        let f = c.residual(&x);
        let mut j = c.jacobian(&x);
        let (perm, _) = lu(&mut j);
        let rhs: Vec<Complex<T>> = f.iter().map(|v| -*v).collect();
        let mut d = match lu_solve(&j, &perm, &rhs) {
            Some(d) => d,
            None => return Outcome::Failed,
        };
        if !deflate.is_empty() {
            // Newton step of the deflated map is a real rescaling of the
            // undeflated one
            let mut g = T::zero();
            for r in deflate {
                let mut dist = T::zero();
                let mut dot = T::zero();
                for ((xi, ri), di) in x.iter().zip(r).zip(&d) {
                    let e = *xi - *ri;
                    dist += e.norm_sqr();
                    dot += e.re * di.re + e.im * di.im;
                }
                g += -T::lit(2.0) * dot / (dist * (T::one() + dist));
            }
            let den = T::one() - g;
            if den.abs() < T::lit(1e-12) {
                return Outcome::Failed;
            }
            let s = T::one() / den;
            for v in d.iter_mut() {
                *v = v.scale(s);
            }
        }
        let mut t = T::one();
        loop {
            let xn: Vec<Complex<T>> = x.iter().zip(&d).map(|(a, b)| *a + b.scale(t)).collect();
            let pn = merit(&xn);
            if pn.is_finite() && pn <= (T::one() - T::lit(2.0) * sigma * t) * phi {
                x = xn;
                phi = pn;
                break;
            }
            t = t * T::lit(0.5);
            if t < min_step {
                return Outcome::Failed;
            }
        }
        if x.iter().any(|v| !(v.norm() < big)) {
            return Outcome::Failed;
        }
    }
    if c.residual_inf(&x) <= T::lit(ACCEPT_TOL) {
        Outcome::Converged(x)
    } else {
        Outcome::Failed
    }
}

struct Ctx<'a, T: Real> {
    sys: &'a AlgebraicSystem<T>,
    c: Compiled<T>,
    cfg: &'a SolverConfig,
}

enum Polished<T: Real> {
    Accepted(RawSolution<T>),
    Rejected,
    Failed,
}

impl<T: Real> Ctx<'_, T> {
    /// Newton to `newton_tol`, realness snap, acceptance and pole checks.
    fn polish_from(&self, x0: Vec<Complex<T>>, deflate: &[Vec<Complex<T>>]) -> Polished<T> {
        let tol = T::lit(self.cfg.newton_tol);
        let iters = self.cfg.max_newton_iters;
        let x = match newton(&self.c, x0, tol, iters, deflate) {
            Outcome::Converged(x) => x,
            Outcome::Failed => return Polished::Failed,
        };
        // deflated convergence is re-polished on the plain system
        let x = if deflate.is_empty() {
            x
        } else {
            match newton(&self.c, x, tol, iters, &[]) {
                Outcome::Converged(x) => x,
                Outcome::Failed => return Polished::Failed,
            }
        };
        let mut x = x;
        let mut is_real = x.iter().all(|v| v.im == T::zero());
        if !is_real && x.iter().all(|v| is_real_value(*v)) {
            let snapped: Vec<Complex<T>> = x.iter().map(|v| Complex::new(v.re, T::zero())).collect();
            if let Outcome::Converged(y) = newton(&self.c, snapped, tol, iters, &[]) {
                x = y;
                is_real = true;
            }
        }
        let res = self.c.residual_inf(&x);
        if !(res <= T::lit(ACCEPT_TOL)) {
            return Polished::Failed;
        }
        if !self.roots_admissible(&x) {
            return Polished::Rejected;
        }
        let mut j = self.c.jacobian(&x);
        let (_, ratio) = lu(&mut j);
        let mut values = x;
        canonicalize(&mut values, self.sys.n_roots());
        Polished::Accepted(RawSolution {
            unknowns: self.sys.unknowns().iter().cloned().collect(),
            values,
            residual_inf: res,
            is_real,
            singular: ratio < T::lit(SINGULAR_RATIO),
        })
    }

    fn roots_admissible(&self, x: &[Complex<T>]) -> bool {
        let n = self.sys.n_roots();
        let tol = T::lit(POLE_TOL);
        for i in 0..n {
            for &p in self.sys.poles() {
                if (x[i] - Complex::new(p, T::zero())).norm() <= tol * (T::one() + p.abs()) {
                    return false;
                }
            }
            for j in (i + 1)..n {
                if (x[i] - x[j]).norm() <= tol * (T::one() + x[i].norm()) {
                    return false;
                }
            }
        }
        true
    }
}

/// Sorts the root block so permuted copies of a solution coincide.
fn canonicalize<T: Real>(x: &mut [Complex<T>], n_roots: usize) {
    let z = &mut x[..n_roots];
    z.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap_or(std::cmp::Ordering::Equal));
    // real parts equal up to round-off (conjugate pairs) are ordered by the
    // imaginary part, so both orderings of a pair canonicalize alike
    let tol = T::lit(REAL_TOL);
    let mut start = 0;
    while start < z.len() {
        let mut end = start + 1;
        while end < z.len() && (z[end].re - z[end - 1].re).abs() <= tol * (T::one() + z[end].re.abs()) {
            end += 1;
        }
        z[start..end].sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal));
        start = end;
    }
}

fn lex_cmp<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> std::cmp::Ordering {
    for (p, q) in a.iter().zip(b) {
        let o = p
            .re
            .partial_cmp(&q.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(p.im.partial_cmp(&q.im).unwrap_or(std::cmp::Ordering::Equal));
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// Relative max-norm distance between two unknown vectors.
pub fn distance<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    a.iter()
        .zip(b)
        .map(|(p, q)| (*p - *q).norm() / (T::one() + p.norm().max(q.norm())))
        .fold(T::zero(), |m, v| m.max(v))
}

/// Merges solutions closer than `tol`; the smallest residual survives, ties
/// going to the lexicographically smallest vector. The result does not
/// depend on input order. Root blocks must already be canonical.
pub fn dedup<T: Real>(mut sols: Vec<RawSolution<T>>, tol: f64) -> (Vec<RawSolution<T>>, usize) {
    sols.sort_by(|a, b| {
        a.residual_inf
            .partial_cmp(&b.residual_inf)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| lex_cmp(&a.values, &b.values))
    });
    let tol = T::lit(tol);
    let mut kept: Vec<RawSolution<T>> = Vec::new();
    let mut merged = 0;
    for s in sols {
        if kept.iter().any(|k| distance(&k.values, &s.values) <= tol) {
            merged += 1;
        } else {
            kept.push(s);
        }
    }
    kept.sort_by(|a, b| lex_cmp(&a.values, &b.values));
    (kept, merged)
}

/// Polishes a candidate point; `None` if Newton fails or the result sits on
/// a pole.
pub fn polish<T: Real>(sys: &AlgebraicSystem<T>, candidate: &[Complex<T>], cfg: &SolverConfig) -> Option<RawSolution<T>> {
    let ctx = Ctx { sys, c: Compiled::new(sys), cfg };
    match ctx.polish_from(candidate.to_vec(), &[]) {
        Polished::Accepted(s) => Some(s),
        _ => None,
    }
}

/// Scaled residual of `sys` at `x`, evaluated independently of any solver
/// state.
pub fn residual_inf<T: Real>(sys: &AlgebraicSystem<T>, x: &[Complex<T>]) -> T {
    Compiled::new(sys).residual_inf(x)
}

/// All solutions reachable from the configured starts, real and complex,
/// deduplicated and with canonical root order.
pub fn solve_system<T: Real>(sys: &AlgebraicSystem<T>, cfg: &SolverConfig) -> Result<(Vec<RawSolution<T>>, SolverStats)> {
    cfg.validate()?;
    if sys.equations().len() != sys.unknowns().len() {
        return Err(QesError::NonSquare {
            equations: sys.equations().len(),
            unknowns: sys.unknowns().len(),
            hint: "solver needs a square system".into(),
        });
    }
    let ctx = Ctx { sys, c: Compiled::new(sys), cfg };
    let boxes: Vec<(f64, f64)> = sys.unknowns().iter().map(|u| cfg.box_for(u)).collect();
    let offset = cfg.seed;
    let outcomes: Vec<Polished<T>> = crate::threads::install(|| {
        (0..cfg.starts as u64)
            .into_par_iter()
            .map(|k| ctx.polish_from(start_point(k + offset, &boxes), &[]))
            .collect()
    });
    let mut stats = SolverStats { starts: cfg.starts, ..Default::default() };
    let mut found = Vec::new();
    for o in outcomes {
        match o {
            Polished::Accepted(s) => {
                stats.converged += 1;
                found.push(s);
            }
            Polished::Rejected => {
                stats.converged += 1;
                stats.rejected += 1;
            }
            Polished::Failed => stats.diverged += 1,
        }
    }
    let (mut sols, merged) = dedup(found, cfg.dedup_tol);
    stats.deduped = merged;

    // Deflation: each new start sees everything found so far, so this pass
    // runs sequentially.
    let base = offset + cfg.starts as u64;
    for k in 0..cfg.deflation_starts as u64 {
        let known: Vec<Vec<Complex<T>>> = sols.iter().flat_map(|s| permutations(&s.values, sys.n_roots())).collect();
        match ctx.polish_from(start_point(base + k, &boxes), &known) {
            Polished::Accepted(s) => {
                if sols.iter().any(|k| distance(&k.values, &s.values) <= T::lit(cfg.dedup_tol)) {
                    stats.deduped += 1;
                } else {
                    stats.deflation_found += 1;
                    sols.push(s);
                }
            }
            Polished::Rejected => stats.rejected += 1,
            Polished::Failed => {}
        }
    }
    sols.sort_by(|a, b| lex_cmp(&a.values, &b.values));
    stats.singular = sols.iter().filter(|s| s.singular).count();
    Ok((sols, stats))
}

/// Every ordering of the root block (deflation must repel all of them).
fn permutations<T: Real>(x: &[Complex<T>], n: usize) -> Vec<Vec<Complex<T>>> {
    let mut out = vec![x.to_vec()];
    if n < 2 {
        return out;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    // Heap's algorithm
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                idx.swap(0, i);
            } else {
                idx.swap(c[i], i);
            }
            let mut y = x.to_vec();
            for (k, &j) in idx.iter().enumerate() {
                y[k] = x[j];
            }
            out.push(y);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bethe::{vars_from, MultiPoly, Provenance};

    fn circle_line() -> AlgebraicSystem<f64> {
        // x² + y² = 4, x = y
        let vars = vars_from(&["x", "y"]);
        let x = MultiPoly::var(&vars, 0);
        let y = MultiPoly::var(&vars, 1);
        let e1 = &(&x.pow(2) + &y.pow(2)) - &MultiPoly::constant(&vars, 4.0);
        let e2 = &x - &y;
        AlgebraicSystem::new(vars, vec![e1, e2], vec![Provenance::Coefficient; 2], 0, vec![]).unwrap()
    }

    #[test]
    fn finds_both_intersections() {
        let cfg = SolverConfig { starts: 64, deflation_starts: 8, ..Default::default() };
        let (sols, stats) = solve_system(&circle_line(), &cfg).unwrap();
        assert_eq!(sols.len(), 2, "{stats:?}");
        let r = 2f64.sqrt();
        assert!((sols[0].values[0].re + r).abs() < 1e-12);
        assert!((sols[1].values[0].re - r).abs() < 1e-12);
        assert!(sols.iter().all(|s| s.is_real && !s.singular));
    }

    #[test]
    fn halton_is_in_unit_cube() {
        for i in 1..200 {
            assert!(halton(i, 6).iter().all(|&u| (0.0..1.0).contains(&u)));
        }
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }

    #[test]
    fn permutations_cover_all_orders() {
        let x: Vec<Complex<f64>> = (0..4).map(|i| Complex::new(i as f64, 0.0)).collect();
        let p = permutations(&x, 3);
        assert_eq!(p.len(), 6);
        assert!(p.iter().all(|v| v[3].re == 3.0));
    }
}
