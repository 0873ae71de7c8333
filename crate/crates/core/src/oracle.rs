//! Independent checks of a branch: the reduced ODE residual, the Schrödinger
//! residual of the closed-form wavefunction, and a finite-difference
//! eigensolver run on the reconstructed potential.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QesError, Result};
use crate::models::{ode_system_h2, ode_system_h4, printed_potential, BranchParams, Gauge, Mode, ModelSpec};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    /// Zero derivative (used at the origin for `ℓ = −1`).
    Neumann,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdGrid<T> {
    pub r_min: T,
    pub r_max: T,
    /// Node count including both boundary nodes.
    pub n: usize,
    pub left: Boundary,
    pub right: Boundary,
}

/// Default inner wall. A Dirichlet wall at `a` instead of the origin shifts
/// `ℓ = 0` levels by about `|Ψ'(0)|²a/2`, so it sits far below the
/// tolerances the oracle is used at.
pub const DEFAULT_R_MIN: f64 = 1e-9;
pub const DEFAULT_R_MAX: f64 = 20.0;
pub const DEFAULT_N: usize = 4000;
pub const BISECTION_TOL: f64 = 1e-10;

impl<T: Real> FdGrid<T> {
    pub fn new(r_min: T, r_max: T, n: usize, left: Boundary) -> Result<Self> {
        let g = FdGrid { r_min, r_max, n, left, right: Boundary::Dirichlet };
        g.validate()?;
        Ok(g)
    }

    /// Grid for angular momentum `ell`: Neumann at the origin for `ℓ = −1`.
    pub fn for_ell(ell: i32, r_max: T, n: usize) -> Result<Self> {
        let left = if ell == -1 { Boundary::Neumann } else { Boundary::Dirichlet };
        Self::new(T::lit(DEFAULT_R_MIN), r_max, n, left)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 100 {
            return Err(QesError::Domain(format!("grid needs at least 100 points, got {}", self.n)));
        }
        self.check_geometry()
    }

    /// Interval and boundary checks only; the coarse Richardson levels of a
    /// valid grid may fall below the point minimum.
    fn check_geometry(&self) -> Result<()> {
        if self.n < 4 {
            return Err(QesError::Domain(format!("grid needs at least 4 points, got {}", self.n)));
        }
        if !(self.r_min > T::zero()) || !(self.r_max > self.r_min) {
            return Err(QesError::Domain("grid needs 0 < r_min < r_max".into()));
        }
        if self.right != Boundary::Dirichlet {
            return Err(QesError::Domain("outer boundary must be Dirichlet".into()));
        }
        Ok(())
    }

    pub fn h(&self) -> T {
        (self.r_max - self.r_min) / T::from_usize_lossy(self.n - 1)
    }

    pub fn node(&self, i: usize) -> T {
        self.r_min + self.h() * T::from_usize_lossy(i)
    }

    /// Same interval with spacing multiplied by `factor`; needs
    /// `(n − 1) % factor == 0`.
    pub fn coarsened(&self, factor: usize) -> Self {
        assert_eq!((self.n - 1) % factor, 0, "grid does not coarsen exactly");
        FdGrid { n: (self.n - 1) / factor + 1, ..*self }
    }

    /// Smallest grid of at least `self.n` nodes that coarsens exactly by 4.
    pub fn refinable(&self) -> Self {
        let mut n = self.n;
        while (n - 1) % 4 != 0 {
            n += 1;
        }
        FdGrid { n, ..*self }
    }
}

/// Symmetric tridiagonal matrix: diagonal `d`, off-diagonal `e`
/// (`e[i]` couples `i` and `i+1`).
#[derive(Clone, Debug)]
pub struct Tridiagonal<T> {
    pub d: Vec<T>,
    pub e: Vec<T>,
}

impl<T: Real> Tridiagonal<T> {
    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: T) -> usize {
        let tiny = T::min_positive_value().sqrt();
        let mut count = 0;
        let mut q = self.d[0] - x;
        if q < T::zero() {
            count += 1;
        }
        for i in 1..self.d.len() {
            let qq = if q.abs() < tiny { tiny.copysign(q) } else { q };
            q = self.d[i] - x - self.e[i - 1] * self.e[i - 1] / qq;
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval holding the whole spectrum.
    pub fn bounds(&self) -> (T, T) {
        let n = self.d.len();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let r = (if i > 0 { self.e[i - 1].abs() } else { T::zero() })
                + (if i + 1 < n { self.e[i].abs() } else { T::zero() });
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    /// Eigenvalue `k` (0-based, ascending) by bisection to absolute `tol`.
    pub fn eigenvalue(&self, k: usize, tol: T) -> T {
        let (mut lo, mut hi) = self.bounds();
        let two = T::lit(2.0);
        while hi - lo > tol.max(T::epsilon() * (lo.abs().max(hi.abs()))) {
            let mid = (lo + hi) / two;
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo + hi) / two
    }
}

/// Matrix of `½[−d²/dr² + ℓ(ℓ+1)/r² + 2V]` on the interior nodes (and the
/// first node under a Neumann wall, symmetrized).
pub fn fd_matrix<T: Real>(potential: &dyn Fn(T) -> T, ell: i32, grid: &FdGrid<T>) -> Result<Tridiagonal<T>> {
    grid.check_geometry()?;
    let h = grid.h();
    let ih2 = T::one() / (h * h);
    let half = T::lit(0.5);
    let cent = T::lit((ell as f64) * (ell as f64 + 1.0));
    let first = match grid.left {
        Boundary::Dirichlet => 1,
        Boundary::Neumann => 0,
    };
    let last = grid.n - 2;
    let mut d = Vec::with_capacity(last + 1 - first);
    for i in first..=last {
        let r = grid.node(i);
        let v = potential(r);
        if !v.is_finite() {
            return Err(QesError::NonFinite { r: r.to_f64().unwrap_or(f64::NAN) });
        }
        let c = if cent == T::zero() { T::zero() } else { cent / (r * r) };
        d.push(ih2 + half * c + v);
    }
    let mut e = vec![-half * ih2; d.len() - 1];
    if grid.left == Boundary::Neumann {
        // ghost node ψ₋₁ = ψ₁ doubles the first coupling; a diagonal
        // similarity with weight 1/2 on the first node restores symmetry
        e[0] = -ih2 / T::lit(2.0).sqrt();
    }
    Ok(Tridiagonal { d, e })
}

/// The `k` lowest eigenvalues of the radial operator for `potential`.
pub fn fd_spectrum<T: Real>(potential: &dyn Fn(T) -> T, ell: i32, grid: &FdGrid<T>, k: usize) -> Result<Vec<T>> {
    if k >= grid.n / 4 {
        return Err(QesError::Domain(format!("k = {k} too large for {} grid points", grid.n)));
    }
    let m = fd_matrix(potential, ell, grid)?;
    Ok((0..k).map(|i| m.eigenvalue(i, T::lit(BISECTION_TOL))).collect())
}

/// Eigenvalues inside `[lo, hi]`, ascending.
pub fn fd_window<T: Real>(potential: &dyn Fn(T) -> T, ell: i32, grid: &FdGrid<T>, lo: T, hi: T) -> Result<Vec<T>> {
    let m = fd_matrix(potential, ell, grid)?;
    let a = m.count_below(lo);
    let b = m.count_below(hi);
    Ok((a..b).map(|i| m.eigenvalue(i, T::lit(BISECTION_TOL))).collect())
}

/// Eigenvalue of `m` closest to `target`.
fn nearest<T: Real>(m: &Tridiagonal<T>, target: T) -> T {
    let c = m.count_below(target);
    let tol = T::lit(BISECTION_TOL);
    let mut best: Option<T> = None;
    for k in [c.checked_sub(1), Some(c)].into_iter().flatten() {
        if k < m.d.len() {
            let v = m.eigenvalue(k, tol);
            if best.map_or(true, |b| (v - target).abs() < (b - target).abs()) {
                best = Some(v);
            }
        }
    }
    best.expect("nonempty matrix")
}

/// Richardson-extrapolated eigenvalue nearest `target`, with the grid
/// convergence diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdMatch {
    pub eigenvalue: f64,
    pub fine: f64,
    pub coarse: f64,
    pub coarsest: f64,
    pub distance: f64,
    /// `(λ_4h − λ_2h)/(λ_2h − λ_h)`, near 4 for a resolved second-order run.
    pub ratio: f64,
    pub converged: bool,
    pub n: usize,
}

/// Differences below this are at the bisection floor and say nothing about
/// the convergence order.
const RATIO_FLOOR: f64 = 1e-8;

pub fn fd_nearest(potential: &dyn Fn(f64) -> f64, ell: i32, grid: &FdGrid<f64>, target: f64) -> Result<FdMatch> {
    grid.validate()?;
    let g1 = grid.refinable();
    let g2 = g1.coarsened(2);
    let g4 = g1.coarsened(4);
    let fine = nearest(&fd_matrix(potential, ell, &g1)?, target);
    // coarse levels paired with the fine one, not with the target
    let coarse = nearest(&fd_matrix(potential, ell, &g2)?, fine);
    let coarsest = nearest(&fd_matrix(potential, ell, &g4)?, coarse);
    let eigenvalue = (4.0 * fine - coarse) / 3.0;
    let d1 = coarse - fine;
    let d2 = coarsest - coarse;
    let ratio = if d1.abs() > 0.0 { d2 / d1 } else { f64::INFINITY };
    let converged = (d1.abs() < RATIO_FLOOR && d2.abs() < 4.0 * RATIO_FLOOR) || (2.0..=8.0).contains(&ratio);
    Ok(FdMatch { eigenvalue, fine, coarse, coarsest, distance: (eigenvalue - target).abs(), ratio, converged, n: g1.n })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// Relative residual of the reduced ODE on `f` at Chebyshev points.
    pub ode_residual: f64,
    /// Relative L² residual of the radial equation for `(Ψ, E, V_rec)`.
    pub schrodinger_residual: Option<f64>,
    pub fd: Option<FdMatch>,
    /// `max |V_rec − V_printed|` on the grid (diagnostic only).
    pub printed_potential_discrepancy: Option<f64>,
    /// Grid points skipped at nodes of `Ψ`.
    pub nodes_skipped: usize,
    /// Complex `ν` or energy: only the ODE residual was computed.
    pub complex_limited: bool,
}

/// Expanded coefficients of `Π(z − z_i)`.
fn expand_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &z in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (k, &a) in c.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * z;
        }
        c = next;
    }
    c
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// `Σ|c_k| t^k`.
fn horner_abs(c: &[Complex64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * t + a.norm())
}

fn horner_abs_re(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * t + a.abs())
}

fn deriv(c: &[Complex64]) -> Vec<Complex64> {
    c.iter().enumerate().skip(1).map(|(k, &a)| a * k as f64).collect()
}

/// Relative residual of `P f'' + Q f' + W f` at 64 Chebyshev points of
/// `[0, z_max]`, relative to the largest sum of monomial magnitudes, so
/// cancellation inside a coefficient does not hide in the scale.
pub fn ode_residual(model: &ModelSpec, branch: &BranchParams, z_max: f64) -> f64 {
    let mode = match (model, branch.rho) {
        (ModelSpec::H4(_), Some(_)) => Mode::Table,
        _ => Mode::Fixed,
    };
    let vars = model.unknowns(mode);
    let ode = match model {
        ModelSpec::H2(s) => ode_system_h2(s, &vars),
        ModelSpec::H4(s) => ode_system_h4(s, &vars),
    };
    let mut x: Vec<Complex64> = branch.roots.clone();
    x.push(branch.nu);
    x.push(branch.energy);
    if let ModelSpec::H4(_) = model {
        x.push(branch.kappa.unwrap_or_default());
        if mode == Mode::Table {
            x.push(branch.rho.unwrap_or_default());
        }
    }
    let [p, q, w] = ode.at_complex(&x);
    let [pa, qa, wa] = ode.at_abs(&x);
    let f0 = expand_roots(&branch.roots);
    let f1 = deriv(&f0);
    let f2 = deriv(&f1);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    const M: usize = 64;
    for k in 0..M {
        let t = ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * M) as f64).cos();
        let z = Complex64::new(0.5 * z_max * (1.0 + t), 0.0);
        let a = horner(&p, z) * horner(&f2, z);
        let b = horner(&q, z) * horner(&f1, z);
        let c = horner(&w, z) * horner(&f0, z);
        worst = worst.max((a + b + c).norm());
        let t = z.re;
        let mag = horner_abs_re(&pa, t) * horner_abs(&f2, t)
            + horner_abs_re(&qa, t) * horner_abs(&f1, t)
            + horner_abs_re(&wa, t) * horner_abs(&f0, t);
        scale = scale.max(mag);
    }
    if scale > 0.0 {
        worst / scale
    } else {
        0.0
    }
}

/// Runs every check on one branch.
pub fn verify_branch(model: &ModelSpec, branch: &BranchParams, grid: &FdGrid<f64>) -> Result<VerifyReport> {
    let ode = ode_residual(model, branch, grid.r_max * grid.r_max);
    let gauge = match Gauge::new(model, branch) {
        Ok(g) => g,
        Err(_) => {
            return Ok(VerifyReport {
                ode_residual: ode,
                schrodinger_residual: None,
                fd: None,
                printed_potential_discrepancy: None,
                nodes_skipped: 0,
                complex_limited: true,
            })
        }
    };
    let ell = model.ell();
    let l = ell as f64;
    let energy = branch.energy.re;

    // Schrödinger residual on the fine grid, where Ψ is representable
    let g = grid.refinable();
    let nodes: Vec<f64> = (1..g.n - 1).map(|i| g.node(i)).collect();
    let peak = nodes.iter().map(|&r| gauge.log_abs(r).0).fold(f64::NEG_INFINITY, f64::max);
    let mut num = 0.0;
    let mut den = 0.0;
    let mut skipped = 0;
    let mut printed: f64 = 0.0;
    for &r in &nodes {
        if gauge.at_node(r) {
            skipped += 1;
            continue;
        }
        let vr = gauge.reconstructed_potential(r);
        if let Ok(vp) = printed_potential(model, branch, r) {
            if vp.is_finite() && vr.is_finite() {
                printed = printed.max((vr - vp).abs());
            }
        }
        if gauge.log_abs(r).0 < peak - 600.0 {
            continue;
        }
        let (p0, _, p2) = gauge.derivatives(r);
        let cent = l * (l + 1.0) / (r * r) * p0;
        let pot = 2.0 * vr * p0;
        let en = 2.0 * energy * p0;
        let res = -p2 + cent + pot - en;
        if res.is_finite() {
            num += res * res;
            let s = p2.abs() + cent.abs() + pot.abs() + en.abs();
            den += s * s;
        }
    }
    let schrodinger = if den > 0.0 { (num / den).sqrt() } else { 0.0 };

    let v = |r: f64| gauge.reconstructed_potential(r);
    let fd = fd_nearest(&v, ell, grid, energy)?;
    Ok(VerifyReport {
        ode_residual: ode,
        schrodinger_residual: Some(schrodinger),
        fd: Some(fd),
        printed_potential_discrepancy: Some(printed),
        nodes_skipped: skipped,
        complex_limited: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sturm_count_on_known_matrix() {
        // 1D Laplacian: eigenvalues 2 − 2cos(kπ/(n+1))
        let n = 50;
        let m = Tridiagonal { d: vec![2.0; n], e: vec![-1.0; n - 1] };
        for k in [0, 7, 49] {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((m.eigenvalue(k, 1e-13) - want).abs() < 1e-11);
        }
        assert_eq!(m.count_below(0.0), 0);
        assert_eq!(m.count_below(4.1), n);
    }

    #[test]
    fn expand_matches_product() {
        let r = [Complex64::new(1.0, 2.0), Complex64::new(1.0, -2.0), Complex64::new(-3.0, 0.0)];
        let c = expand_roots(&r);
        let z = Complex64::new(0.7, 0.0);
        let direct: Complex64 = r.iter().map(|&x| z - x).product();
        assert!((horner(&c, z) - direct).norm() < 1e-13);
    }
}
