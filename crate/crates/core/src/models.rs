//! The two oscillator families: model parameters, potentials, the gauge-reduced
//! ODE coefficients, closed-form wavefunctions and potential reconstruction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bethe::multipoly::{MultiPoly, Vars};
use crate::error::{domain, Result};
use crate::poly::Poly;

/// Harmonic isotonic oscillator `V = ωr²/2 − 2g(2r²−1)/(2r²+1)²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct H2Spec {
    pub omega: f64,
    pub ell: i32,
    pub n: usize,
}

/// Sextic deformation built on the quartic pseudo-Hermite polynomial.
/// `κ` is not stored here; it follows from the other
/// parameters once `ν` is known.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct H4Spec {
    pub gamma: f64,
    pub rho: f64,
    pub ell: i32,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelSpec {
    H2(H2Spec),
    H4(H4Spec),
}

/// Which couplings are unknowns of the algebraic system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// All couplings fixed; only `z`, `ν`, `E` (and `κ` for H4) are solved for.
    Fixed,
    /// H4 only: `ρ` is also an unknown (γ fixed).
    Table,
}

impl H2Spec {
    pub fn new(omega: f64, ell: i32, n: usize) -> Result<Self> {
        let s = H2Spec { omega, ell, n };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return domain(format!("omega must be positive, got {}", self.omega));
        }
        if self.ell < -1 {
            return domain(format!("ell must be >= -1, got {}", self.ell));
        }
        Ok(())
    }

    pub fn sqrt_omega(&self) -> f64 {
        self.omega.sqrt()
    }
}

impl H4Spec {
    pub fn new(gamma: f64, rho: f64, ell: i32, n: usize) -> Result<Self> {
        let s = H4Spec { gamma, rho, ell, n };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return domain(format!("gamma must be positive, got {}", self.gamma));
        }
        if !self.rho.is_finite() {
            return domain("rho must be finite");
        }
        if self.ell < -1 {
            return domain(format!("ell must be >= -1, got {}", self.ell));
        }
        Ok(())
    }

    pub fn sqrt_gamma(&self) -> f64 {
        self.gamma.sqrt()
    }
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::H2(s) => s.validate(),
            ModelSpec::H4(s) => s.validate(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            ModelSpec::H2(s) => s.n,
            ModelSpec::H4(s) => s.n,
        }
    }

    pub fn ell(&self) -> i32 {
        match self {
            ModelSpec::H2(s) => s.ell,
            ModelSpec::H4(s) => s.ell,
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            ModelSpec::H2(_) => "h2",
            ModelSpec::H4(_) => "h4",
        }
    }

    /// Finite singular points of the reduced ODE in `z = r²`; the cleared
    /// Bethe equations acquire spurious roots there.
    pub fn poles(&self) -> Vec<f64> {
        match self {
            ModelSpec::H2(_) => vec![0.0, -0.5],
            ModelSpec::H4(_) => {
                let s6 = 6f64.sqrt();
                vec![0.0, (-3.0 - s6) / 2.0, (-3.0 + s6) / 2.0]
            }
        }
    }

    /// Unknown names in solver order: `z1..zn, nu, E[, kappa][, rho]`.
    pub fn unknowns(&self, mode: Mode) -> Vars {
        let mut names: Vec<String> = (1..=self.n()).map(|i| format!("z{i}")).collect();
        names.push("nu".into());
        names.push("E".into());
        if let ModelSpec::H4(_) = self {
            names.push("kappa".into());
            if mode == Mode::Table {
                names.push("rho".into());
            }
        }
        names.into()
    }
}

/// Parameters of one solution branch. Complex values are kept; `g` is
/// derived from `ν` at construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchParams {
    pub nu: Complex64,
    pub g: Complex64,
    pub energy: Complex64,
    pub kappa: Option<Complex64>,
    pub rho: Option<Complex64>,
    pub roots: Vec<Complex64>,
}

impl BranchParams {
    pub fn new(
        nu: Complex64,
        energy: Complex64,
        kappa: Option<Complex64>,
        rho: Option<Complex64>,
        roots: Vec<Complex64>,
    ) -> Self {
        BranchParams { nu, g: g_from_nu(nu), energy, kappa, rho, roots }
    }

    pub fn real(nu: f64, energy: f64, kappa: Option<f64>, rho: Option<f64>, roots: Vec<f64>) -> Self {
        Self::new(
            nu.into(),
            energy.into(),
            kappa.map(Into::into),
            rho.map(Into::into),
            roots.into_iter().map(Into::into).collect(),
        )
    }

    pub fn sum_roots(&self) -> Complex64 {
        self.roots.iter().sum()
    }
}

pub fn g_from_nu(nu: Complex64) -> Complex64 {
    nu * (Complex64::new(1.0, 0.0) - nu)
}

/// Inverse of `g = ν(1−ν)` on the branch `ν ≤ 1/2`.
pub fn nu_from_g(g: f64) -> Result<f64> {
    let disc = 1.0 - 4.0 * g;
    if disc < 0.0 {
        return domain(format!("g = {g} > 1/4 has no real nu"));
    }
    Ok(0.5 * (1.0 - disc.sqrt()))
}

pub fn potential_h2(r: f64, omega: f64, g: f64) -> Result<f64> {
    if !(r > 0.0) {
        return domain(format!("potential needs r > 0, got {r}"));
    }
    let r2 = r * r;
    let d = 2.0 * r2 + 1.0;
    Ok(0.5 * omega * r2 - 2.0 * g * (2.0 * r2 - 1.0) / (d * d))
}

/// The sextic potential, odd powers in the rational numerator included as
/// written.
pub fn potential_h4(r: f64, gamma: f64, rho: f64, kappa: f64, g: f64) -> Result<f64> {
    if !(r > 0.0) {
        return domain(format!("potential needs r > 0, got {r}"));
    }
    if !(gamma > 0.0) {
        return domain("gamma must be positive");
    }
    let r2 = r * r;
    let r4 = r2 * r2;
    let r6 = r4 * r2;
    let num = 96.0 * r6 + 336.0 * r4 - 2.0 * r2 * r + 216.0 * r2 - 3.0 * r + 36.0;
    let d = 4.0 * r4 + 12.0 * r2 + 3.0;
    Ok(0.5 * (gamma * r6 + rho * r4 + kappa * r2 + g * num / (2.0 * d * d)))
}

/// Coefficients of `P f'' + Q f' + W f = 0` in `z = r²`, ascending powers,
/// each a polynomial in the unknowns.
#[derive(Clone, Debug)]
pub struct OdeTriple {
    pub p: Vec<MultiPoly<f64>>,
    pub q: Vec<MultiPoly<f64>>,
    pub w: Vec<MultiPoly<f64>>,
}

impl OdeTriple {
    /// Numeric `(P, Q, W)` at a point of the unknown space.
    pub fn at(&self, x: &[f64]) -> (Poly<f64>, Poly<f64>, Poly<f64>) {
        let ev = |v: &[MultiPoly<f64>]| Poly::new(v.iter().map(|c| c.eval(x)).collect());
        (ev(&self.p), ev(&self.q), ev(&self.w))
    }

    pub fn at_complex(&self, x: &[Complex64]) -> [Vec<Complex64>; 3] {
        let ev = |v: &[MultiPoly<f64>]| v.iter().map(|c| c.eval_complex(x)).collect();
        [ev(&self.p), ev(&self.q), ev(&self.w)]
    }

    /// Per-coefficient sums of monomial magnitudes, the cancellation-free
    /// scale of [`OdeTriple::at_complex`].
    pub fn at_abs(&self, x: &[Complex64]) -> [Vec<f64>; 3] {
        let ev = |v: &[MultiPoly<f64>]| v.iter().map(|c| c.eval_abs(x)).collect();
        [ev(&self.p), ev(&self.q), ev(&self.w)]
    }
}

/// Builder for coefficient polynomials over a fixed unknown list.
pub(crate) struct Coef<'a> {
    pub vars: &'a Vars,
}

impl Coef<'_> {
    pub fn c(&self, x: f64) -> MultiPoly<f64> {
        MultiPoly::constant(self.vars, x)
    }

    pub fn v(&self, name: &str) -> MultiPoly<f64> {
        MultiPoly::named(self.vars, name).unwrap_or_else(|| panic!("unknown {name} not in system"))
    }

    /// `ρ` as an unknown when present, else the fixed value.
    pub fn rho_or(&self, fixed: f64) -> MultiPoly<f64> {
        MultiPoly::named(self.vars, "rho").unwrap_or_else(|| self.c(fixed))
    }

    /// `g = ν − ν²`.
    pub fn g(&self) -> MultiPoly<f64> {
        let nu = self.v("nu");
        &nu - &nu.pow(2)
    }
}

/// Reduced ODE of the H2 model with `g = ν(1−ν)` substituted.
pub fn ode_system_h2(spec: &H2Spec, vars: &Vars) -> OdeTriple {
    let k = Coef { vars };
    let sw = spec.sqrt_omega();
    let l = spec.ell as f64;
    let nu = k.v("nu");
    let e = k.v("E");
    let p = vec![k.c(0.0), k.c(2.0), k.c(4.0)];
    let q = vec![
        k.c(2.0 * l + 3.0),
        &k.c(4.0 * l - 2.0 * sw + 3.0) + &nu.scale(8.0),
        k.c(-4.0 * sw),
    ];
    let w0 = &(&(&nu.scale(4.0 * (l + 1.0)) + &k.c(-(sw / 2.0) * (l + 1.5))) + &e.scale(0.5))
        - &k.g().scale(2.0);
    let w1 = &e.scale(2.0) - &(&nu.scale(4.0 * sw) + &k.c(sw * (2.0 * l + 3.0)));
    OdeTriple { p, q, w: vec![w0, w1] }
}

/// Reduced ODE of the H4 model, coefficients as printed with `g = ν(1−ν)`.
/// `ρ` is taken from `vars` when it is an unknown, otherwise from `spec`.
pub fn ode_system_h4(spec: &H4Spec, vars: &Vars) -> OdeTriple {
    let k = Coef { vars };
    let sg = spec.sqrt_gamma();
    let gam = spec.gamma;
    let l = spec.ell as f64;
    let nu = k.v("nu");
    let e = k.v("E");
    let kap = k.v("kappa");
    let rho = k.rho_or(spec.rho);
    let rho2 = rho.pow(2);
    let g = k.g();

    let p = vec![k.c(0.0), k.c(3.0), k.c(12.0), k.c(4.0)];
    let q = vec![
        k.c(3.0 * (l + 1.5)),
        (&(&k.c(6.0 + 4.0 * l) + &nu.scale(8.0)) - &rho.scale(1.0 / (2.0 * sg))).scale(3.0),
        &(&k.c(6.0 - 3.0 * sg + 4.0 * l) + &nu.scale(16.0)) - &rho.scale(6.0 / sg),
        -&(&k.c(12.0 * sg) + &rho.scale(2.0 / sg)),
        k.c(-4.0 * sg),
    ];

    let w3 = &(&rho2.scale(1.0 / (4.0 * gam)) - &(&k.c(sg * (5.0 + 2.0 * l)) + &nu.scale(8.0 * sg))) - &kap;
    let w2 = {
        let a = e.scale(2.0);
        let b = &k.c(3.0 * sg * (2.0 * l + 5.0)) + &nu.scale(12.0 * sg);
        let c = &rho * &(&k.c(l + 1.5) + &nu.scale(4.0)).scale(1.0 / sg);
        let d = rho2.scale(3.0 / (4.0 * gam));
        &(&(&(&a - &b) - &c) - &d) - &kap.scale(3.0)
    };
    let w1 = {
        let a = &e.scale(6.0) - &g.scale(12.0);
        let b = &(&nu.scale(4.0) + &k.c(-0.75 * sg)).scale(2.0 * l + 5.0);
        let inner = &(&k.c(6.0 + 4.0 * l) + &nu.scale(8.0)) + &rho2.scale(0.75);
        let c = (&rho * &inner).scale(3.0 / (4.0 * sg));
        &(&(&a + b) - &c) - &kap.scale(0.75)
    };
    let w0 = {
        let a = &e.scale(1.5) + &nu.scale(6.0 * (2.0 * l + 3.0));
        let b = g.scale(6.0);
        let c = rho.scale(3.0 / (4.0 * sg) * (l + 1.5));
        &(&a - &b) - &c
    };
    OdeTriple { p, q, w: vec![w0, w1, w2, w3] }
}

/// Closed-form H2 energy, in the same form the Bethe system uses (the
/// dedicated two-root energy at `n = 2`).
pub fn energy_h2(spec: &H2Spec, nu: Complex64) -> Complex64 {
    let c = crate::bethe::handcoded::h2_energy_offset(spec.n, spec.ell as f64);
    (nu * 2.0 + c) * spec.sqrt_omega()
}

/// The general-`n` H2 energy `√ω(2n + 2ν + ℓ + 3/2)`.
pub fn energy_h2_general(spec: &H2Spec, nu: Complex64) -> Complex64 {
    (nu * 2.0 + 2.0 * spec.n as f64 + spec.ell as f64 + 1.5) * spec.sqrt_omega()
}

/// Closed-form H4 energy from `(Σz, ν, κ, ρ)`.
pub fn energy_h4(spec: &H4Spec, sum_z: Complex64, nu: Complex64, kappa: Complex64, rho: Complex64) -> Complex64 {
    let sg = spec.sqrt_gamma();
    let l = spec.ell as f64;
    let n = spec.n as f64;
    sum_z * (2.0 * sg)
        + (nu * 2.0 + 2.0 * n + l + 2.5) * (3.0 * sg)
        + rho / sg * (nu * 2.0 + n + l / 2.0 + 0.75)
        + rho * rho * (3.0 / (8.0 * spec.gamma))
        + kappa * 1.5
}

/// The `κ` relation of the H4 model.
pub fn kappa_h4(spec: &H4Spec, nu: Complex64, rho: Complex64) -> Complex64 {
    let sg = spec.sqrt_gamma();
    rho * rho / (4.0 * spec.gamma) - (nu * 8.0 + 4.0 * spec.n as f64 + 2.0 * spec.ell as f64 + 5.0) * sg
}

/// Closed form `Ψ = r^{ℓ+1} h(r)^ν e^{w(r)} f(r²)` for a specific branch.
#[derive(Clone, Debug)]
pub struct Gauge {
    pub ell: i32,
    pub nu: f64,
    /// `h(r)`, the pseudo-Hermite factor up to normalization.
    pub h: Poly<f64>,
    /// Exponent polynomial `w(r)`.
    pub w: Poly<f64>,
    /// `f(z) = Π(z − z_i)` with roots closed under conjugation.
    pub roots: Vec<Complex64>,
    pub energy: f64,
}

impl Gauge {
    pub fn new(model: &ModelSpec, branch: &BranchParams) -> Result<Self> {
        if branch.nu.im.abs() > 1e-8 * (1.0 + branch.nu.re.abs()) {
            return domain("branch has complex nu; no real wavefunction");
        }
        if branch.energy.im.abs() > 1e-8 * (1.0 + branch.energy.re.abs()) {
            return domain("branch has complex energy; no real wavefunction");
        }
        let (h, w) = match model {
            ModelSpec::H2(s) => {
                let sw = s.sqrt_omega();
                (Poly::new(vec![1.0, 0.0, 2.0]), Poly::new(vec![0.0, 0.0, -sw / 2.0]))
            }
            ModelSpec::H4(s) => {
                let sg = s.sqrt_gamma();
                let rho = branch.rho.map(|c| c.re).unwrap_or(s.rho);
                (
                    Poly::new(vec![3.0, 0.0, 12.0, 0.0, 4.0]),
                    Poly::new(vec![0.0, 0.0, -rho / (4.0 * sg), 0.0, -sg / 4.0]),
                )
            }
        };
        if !roots_conjugate_closed(&branch.roots) {
            return domain("root set is not closed under conjugation");
        }
        Ok(Gauge {
            ell: model.ell(),
            nu: branch.nu.re,
            h,
            w,
            roots: branch.roots.clone(),
            energy: branch.energy.re,
        })
    }

    /// `f(r²)`, its size relative to the product of term magnitudes, and the
    /// log-derivatives `f_r/f`, `(f_r/f)'` in `r`.
    fn f_parts(&self, r: f64) -> (f64, f64, Complex64, Complex64) {
        let z = r * r;
        let mut f = Complex64::new(1.0, 0.0);
        let mut mag = 1.0;
        let mut d1 = Complex64::new(0.0, 0.0);
        let mut d2 = Complex64::new(0.0, 0.0);
        for &zi in &self.roots {
            let t = Complex64::new(z, 0.0) - zi;
            f *= t;
            mag *= z.abs() + zi.norm();
            d1 += 2.0 * r / t;
            d2 += 2.0 / t - 4.0 * z / (t * t);
        }
        (f.re, if mag > 0.0 { f.norm() / mag } else { 1.0 }, d1, d2)
    }

    /// True when `r` sits on (or numerically at) a node of the polynomial
    /// factor.
    pub fn at_node(&self, r: f64) -> bool {
        let (_, rel, _, _) = self.f_parts(r);
        rel <= 1e-12
    }

    /// `ln|Ψ|` and the sign of `Ψ`.
    pub fn log_abs(&self, r: f64) -> (f64, f64) {
        let (f, _, _, _) = self.f_parts(r);
        let l = (self.ell + 1) as f64 * r.ln() + self.nu * self.h.eval(r).ln() + self.w.eval(r);
        let s = if f < 0.0 { -1.0 } else { 1.0 };
        (l + f.abs().ln(), s)
    }

    pub fn value(&self, r: f64) -> f64 {
        let (l, s) = self.log_abs(r);
        s * l.exp()
    }

    /// `L' = Ψ'/Ψ` and `L''`.
    pub fn log_derivatives(&self, r: f64) -> (f64, f64) {
        let (_, _, fd1, fd2) = self.f_parts(r);
        let lp1 = (self.ell + 1) as f64;
        let h = self.h.eval(r);
        let h1 = self.h.derivative().eval(r);
        let h2 = self.h.derivative().derivative().eval(r);
        let w1 = self.w.derivative().eval(r);
        let w2 = self.w.derivative().derivative().eval(r);
        let d1 = lp1 / r + self.nu * h1 / h + w1 + fd1.re;
        let d2 = -lp1 / (r * r) + self.nu * (h2 / h - (h1 / h) * (h1 / h)) + w2 + fd2.re;
        (d1, d2)
    }

    /// `(Ψ, Ψ', Ψ'')` by the product rule over the four factors, without
    /// going through logarithmic derivatives.
    pub fn derivatives(&self, r: f64) -> (f64, f64, f64) {
        let lp1 = (self.ell + 1) as f64;
        let a0 = r.powf(lp1);
        let a1 = if lp1 == 0.0 { 0.0 } else { lp1 * r.powf(lp1 - 1.0) };
        let a2 = if lp1 == 0.0 || lp1 == 1.0 { 0.0 } else { lp1 * (lp1 - 1.0) * r.powf(lp1 - 2.0) };

        let h = self.h.eval(r);
        let h1 = self.h.derivative().eval(r);
        let h2 = self.h.derivative().derivative().eval(r);
        let b0 = h.powf(self.nu);
        let b1 = self.nu * h.powf(self.nu - 1.0) * h1;
        let b2 = self.nu * (self.nu - 1.0) * h.powf(self.nu - 2.0) * h1 * h1
            + self.nu * h.powf(self.nu - 1.0) * h2;

        let wv = self.w.eval(r);
        let w1 = self.w.derivative().eval(r);
        let w2 = self.w.derivative().derivative().eval(r);
        let c0 = wv.exp();
        let c1 = w1 * c0;
        let c2 = (w2 + w1 * w1) * c0;

        let fr = self.f_in_r();
        let d0 = fr.eval(r);
        let d1 = fr.derivative().eval(r);
        let d2 = fr.derivative().derivative().eval(r);

        let v0 = a0 * b0 * c0 * d0;
        let v1 = a1 * b0 * c0 * d0 + a0 * b1 * c0 * d0 + a0 * b0 * c1 * d0 + a0 * b0 * c0 * d1;
        // second derivative of a four-fold product
        let f = [[a0, a1, a2], [b0, b1, b2], [c0, c1, c2], [d0, d1, d2]];
        let mut v2 = 0.0;
        for i in 0..4 {
            let mut t = f[i][2];
            for (k, fk) in f.iter().enumerate() {
                if k != i {
                    t *= fk[0];
                }
            }
            v2 += t;
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                let mut t = 2.0 * f[i][1] * f[j][1];
                for (k, fk) in f.iter().enumerate() {
                    if k != i && k != j {
                        t *= fk[0];
                    }
                }
                v2 += t;
            }
        }
        (v0, v1, v2)
    }

    /// `f(r²)` as a real polynomial in `r`, pairing conjugate roots.
    pub fn f_in_r(&self) -> Poly<f64> {
        let mut acc = Poly::constant(1.0);
        let mut used = vec![false; self.roots.len()];
        for i in 0..self.roots.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let zi = self.roots[i];
            let factor = if zi.im.abs() <= 1e-8 * (1.0 + zi.re.abs()) {
                Poly::new(vec![-zi.re, 0.0, 1.0])
            } else {
                let j = (0..self.roots.len())
                    .find(|&j| !used[j] && (self.roots[j] - zi.conj()).norm() <= 1e-8 * (1.0 + zi.norm()))
                    .expect("conjugate partner checked at construction");
                used[j] = true;
                // (r² − z)(r² − z̄) = r⁴ − 2Re z r² + |z|²
                Poly::new(vec![zi.norm_sqr(), 0.0, -2.0 * zi.re, 0.0, 1.0])
            };
            acc = &acc * &factor;
        }
        acc
    }

    /// The potential for which `Ψ` is an exact eigenfunction at `E`.
    pub fn reconstructed_potential(&self, r: f64) -> f64 {
        let (d1, d2) = self.log_derivatives(r);
        let l = self.ell as f64;
        self.energy + 0.5 * (d1 * d1 + d2) - l * (l + 1.0) / (2.0 * r * r)
    }
}

fn roots_conjugate_closed(roots: &[Complex64]) -> bool {
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let z = roots[i];
        if z.im.abs() <= 1e-8 * (1.0 + z.re.abs()) {
            continue;
        }
        match (0..roots.len()).find(|&j| !used[j] && (roots[j] - z.conj()).norm() <= 1e-8 * (1.0 + z.norm())) {
            Some(j) => used[j] = true,
            None => return false,
        }
    }
    true
}

/// Unnormalized wavefunction of a branch at `r > 0`.
pub fn wavefunction(model: &ModelSpec, branch: &BranchParams, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return domain(format!("wavefunction needs r > 0, got {r}"));
    }
    Ok(Gauge::new(model, branch)?.value(r))
}

/// Reconstructed potential on a grid; `None` marks points at a node of `Ψ`.
pub fn reconstruct_potential(model: &ModelSpec, branch: &BranchParams, grid: &[f64]) -> Result<Vec<Option<f64>>> {
    let gauge = Gauge::new(model, branch)?;
    grid.iter()
        .map(|&r| {
            if !(r > 0.0) {
                return domain(format!("grid point r = {r} is not positive"));
            }
            Ok(if gauge.at_node(r) { None } else { Some(gauge.reconstructed_potential(r)) })
        })
        .collect()
}

/// The printed potential of the model evaluated with a branch's parameters.
pub fn printed_potential(model: &ModelSpec, branch: &BranchParams, r: f64) -> Result<f64> {
    let g = branch.g.re;
    match model {
        ModelSpec::H2(s) => potential_h2(r, s.omega, g),
        ModelSpec::H4(s) => {
            let rho = branch.rho.map(|c| c.re).unwrap_or(s.rho);
            let kappa = branch.kappa.map(|c| c.re).unwrap_or(f64::NAN);
            potential_h4(r, s.gamma, rho, kappa, g)
        }
    }
}
