//! Model-specific Bethe systems in their closed forms: energy formula,
//! coefficient constraints in power sums, and the cleared root equations.
//! General in `n`, except that H2 at `n = 2` uses its dedicated two-root
//! energy and constraint.

use super::multipoly::{MultiPoly, Vars};
use crate::models::{Coef, H2Spec, H4Spec};

pub(crate) struct Parts {
    pub energy: MultiPoly<f64>,
    pub kappa: Option<MultiPoly<f64>>,
    pub coefficient: Vec<MultiPoly<f64>>,
    pub residues: Vec<MultiPoly<f64>>,
}

fn power_sum(vars: &Vars, n: usize, t: u32) -> MultiPoly<f64> {
    let mut s = MultiPoly::zero(vars);
    for i in 0..n {
        s = &s + &MultiPoly::var(vars, i).pow(t);
    }
    s
}

/// `den(z_i)·Σ_{j≠i} 2Π_{k≠i,j}(z_i − z_k) − num(z_i)·Π_{j≠i}(z_i − z_j)`,
/// i.e. `Σ_{j≠i} 2/(z_i − z_j) = num(z_i)/den(z_i)` with denominators cleared.
fn cleared_root_equations(
    vars: &Vars,
    n: usize,
    den: impl Fn(&MultiPoly<f64>) -> MultiPoly<f64>,
    num: impl Fn(&MultiPoly<f64>) -> MultiPoly<f64>,
) -> Vec<MultiPoly<f64>> {
    let z: Vec<MultiPoly<f64>> = (0..n).map(|i| MultiPoly::var(vars, i)).collect();
    let one = MultiPoly::constant(vars, 1.0);
    (0..n)
        .map(|i| {
            let mut prod = one.clone();
            let mut sum = MultiPoly::zero(vars);
            for j in (0..n).filter(|&j| j != i) {
                prod = &prod * &(&z[i] - &z[j]);
                let mut t = one.scale(2.0);
                for k in (0..n).filter(|&k| k != i && k != j) {
                    t = &t * &(&z[i] - &z[k]);
                }
                sum = &sum + &t;
            }
            &(&den(&z[i]) * &sum) - &(&num(&z[i]) * &prod)
        })
        .collect()
}

/// `E = √ω(2ν + c)` with `c = 2n + ℓ + 3/2`, except at `n = 2` where the
/// dedicated two-root energy has `c = ℓ + 9/2`.
pub(crate) fn h2_energy_offset(n: usize, l: f64) -> f64 {
    if n == 2 {
        l + 4.5
    } else {
        2.0 * n as f64 + l + 1.5
    }
}

pub(crate) fn h2(spec: &H2Spec, vars: &Vars) -> Parts {
    let k = Coef { vars };
    let n = spec.n;
    let nf = n as f64;
    let sw = spec.sqrt_omega();
    let l = spec.ell as f64;
    let nu = k.v("nu");
    let e = k.v("E");
    let s1 = power_sum(vars, n, 1);

    let energy = &e - &(&nu.scale(2.0 * sw) + &k.c(sw * h2_energy_offset(n, l)));

    // ν² + ν(2ℓ + √ω/2 + 1) = 2√ω Σz − n(2n + 2ℓ + 4ν − √ω/2 − 1/2)
    // At n = 2 the dedicated two-root constraint has constant 2ℓ − √ω/2 + 7/2,
    // half of what the general form gives; the dedicated form is kept since
    // the reference n = 2 levels follow it.
    let constant = if n == 2 { 2.0 * l - sw / 2.0 + 3.5 } else { nf * (2.0 * nf + 2.0 * l - sw / 2.0 - 0.5) };
    let lhs = &nu.pow(2) + &nu.scale(2.0 * l + sw / 2.0 + 1.0);
    let rhs = &s1.scale(2.0 * sw) - &(&nu.scale(4.0 * nf) + &k.c(constant));
    let constraint = &lhs - &rhs;

    let residues = cleared_root_equations(
        vars,
        n,
        |z| &(z * z).scale(4.0) + &z.scale(2.0),
        |z| {
            let lin = &k.c(4.0 * l - 2.0 * sw + 3.0) + &nu.scale(8.0);
            &(&(z * z).scale(4.0 * sw) - &(&lin * z)) - &k.c(2.0 * l + 3.0)
        },
    );
    Parts { energy, kappa: None, coefficient: vec![constraint], residues }
}

pub(crate) fn h4(spec: &H4Spec, vars: &Vars) -> Parts {
    let k = Coef { vars };
    let n = spec.n;
    let nf = n as f64;
    let sg = spec.sqrt_gamma();
    let gam = spec.gamma;
    let l = spec.ell as f64;
    let nu = k.v("nu");
    let e = k.v("E");
    let kap = k.v("kappa");
    let rho = k.rho_or(spec.rho);
    let rho2 = rho.pow(2);
    let s1 = power_sum(vars, n, 1);
    let s2 = power_sum(vars, n, 2);
    let s3 = power_sum(vars, n, 3);
    let rs = rho.scale(1.0 / sg);

    // E = 2√γΣz + 3√γ(2n+2ν+ℓ+5/2) + (ρ/√γ)(n+2ν+ℓ/2+3/4) + 3ρ²/(8γ) + 3κ/2
    let e_rhs = {
        let a = s1.scale(2.0 * sg);
        let b = &nu.scale(6.0 * sg) + &k.c(3.0 * sg * (2.0 * nf + l + 2.5));
        let c = &rs * &(&nu.scale(2.0) + &k.c(nf + l / 2.0 + 0.75));
        let d = rho2.scale(3.0 / (8.0 * gam));
        &(&(&(&a + &b) + &c) + &d) + &kap.scale(1.5)
    };
    let energy = &e - &e_rhs;

    // κ = ρ²/(4γ) − √γ(4n + 2ℓ + 8ν + 5)
    let kappa = &(&kap - &rho2.scale(1.0 / (4.0 * gam))) + &(&nu.scale(8.0 * sg) + &k.c(sg * (4.0 * nf + 2.0 * l + 5.0)));

    let second = {
        let a = s3.scale(-2.0 * sg);
        let b = -&(&(&k.c(6.0 * sg) + &rs) * &s2);
        let cc = &(&nu.scale(8.0) + &k.c(4.0 * nf + 2.0 * l - 1.5 * sg - 1.0)) - &rs.scale(3.0);
        let c = &cc * &s1;
        let d = (&(&nu.scale(12.0) + &k.c(6.0 * l + 15.0)) - &rho.scale(3.0 / (4.0 * sg))).scale(nf);
        let f = &e.scale(0.75) + &(&nu * &(&nu + &k.c(2.0 * l + 2.0))).scale(3.0);
        &(&(&(&a + &b) + &c) + &d) + &f
    };

    let third = {
        let lhs = &(&e.scale(6.0) - &k.g().scale(12.0)) - &kap.scale(0.75);
        let r1 = s2.scale(4.0 * sg);
        let r2 = &(&k.c(6.0 * sg) + &rs) * &s1;
        let r3 = (&nu.scale(16.0) + &k.c(4.0 * nf + 4.0 * l - 3.0 * sg + 2.0)).scale(nf);
        let r4 = &rs * &(&(&nu.scale(6.0) + &k.c(6.0 * nf + 2.0 * l)) - &rho2.scale(3.0 / 16.0));
        let r5 = (&nu.scale(4.0) + &k.c(-0.75 * sg)).scale(2.0 * l + 5.0);
        let rhs = &(&(&(&r1 + &r2) - &r3) + &r4) - &r5;
        &lhs - &rhs
    };

    // Σ_{j≠i} 2/(z_i − z_j) = Q̃(z_i) / (z_i(4z_i² + 12z_i + 3)), numerator as printed
    let residues = cleared_root_equations(
        vars,
        n,
        |z| &(&z.pow(3).scale(4.0) + &z.pow(2).scale(12.0)) + &z.scale(3.0),
        |z| {
            let c4 = k.c(-4.0 * sg);
            let c3 = -&(&k.c(12.0 * sg) + &rs.scale(2.0));
            let c2 = &(&k.c(6.0 - 3.0 * sg + 4.0 * l) + &nu.scale(16.0)) - &rs.scale(6.0);
            let c1 = (&(&k.c(6.0 + 4.0 * l) + &nu.scale(8.0)) - &rs.scale(0.5)).scale(3.0);
            let c0 = k.c(3.0 * (l + 1.5));
            let mut acc = c4;
            for c in [c3, c2, c1, c0] {
                acc = &(&acc * z) + &c;
            }
            acc
        },
    );
    Parts { energy, kappa: Some(kappa), coefficient: vec![second, third], residues }
}
