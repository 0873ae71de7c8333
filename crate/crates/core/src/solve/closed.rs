//! Closed-form solutions of the H2 system for `n = 0` and `n = 1`.

use num_complex::Complex64;
use serde::Serialize;

use super::{canonicalize, residual_inf, RawSolution};
use crate::bethe::AlgebraicSystem;
use crate::error::Result;
use crate::models::{H2Spec, ModelSpec};
use crate::poly::{all_roots, Poly};

/// The two `n = 0` branches `ν = 0` and `ν = −(2ℓ + √ω/2 + 1)` with their
/// energies `√ω(2ν + ℓ + 3/2)`.
pub fn h2_n0_branches(ell: i32, omega: f64) -> [(f64, f64); 2] {
    let sw = omega.sqrt();
    let l = ell as f64;
    let e = |nu: f64| sw * (2.0 * nu + l + 1.5);
    let nu2 = -(2.0 * l + sw / 2.0 + 1.0);
    [(0.0, e(0.0)), (nu2, e(nu2))]
}

/// One real branch of the `n = 1` elimination.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct H2N1Branch {
    pub nu: f64,
    pub z1: f64,
    pub energy: f64,
    /// Sign of the square root in the unsquared relation the branch satisfies.
    pub sign: i8,
}

/// `n = 1` eliminant. Writing `c = 4ℓ − 2√ω + 8ν + 3`, the root condition
/// gives `2√ω z₁ = (c ± √D)/4`, `D = c² + 16(2ℓ+3)√ω`; substituted into the
/// constraint this is
/// `ν² + ν(2ℓ + √ω/2 + 3) + ℓ + 3/4 = ±√D/4`, squared into a quartic in `ν`.
/// Real roots are kept when the unsquared relation holds for one sign.
pub fn reduce_h2_n1(ell: i32, omega: f64) -> Result<(Poly<f64>, Vec<H2N1Branch>)> {
    H2Spec::new(omega, ell, 1)?;
    let sw = omega.sqrt();
    let l = ell as f64;
    let a = Poly::new(vec![l + 0.75, 2.0 * l + sw / 2.0 + 3.0, 1.0]);
    let c = Poly::new(vec![4.0 * l - 2.0 * sw + 3.0, 8.0]);
    let d = &(&c * &c) + &Poly::constant(16.0 * (2.0 * l + 3.0) * sw);
    let quartic = &(&a * &a).scale(16.0) - &d;
    let roots = all_roots(&quartic)?;
    let mut out = Vec::new();
    for nu in roots.real_roots.iter().copied() {
        let lhs = a.eval(nu);
        let rad = d.eval(nu).max(0.0).sqrt() / 4.0;
        let sign: i8 = if lhs >= 0.0 { 1 } else { -1 };
        if (lhs - sign as f64 * rad).abs() > 1e-9 * (1.0 + lhs.abs()) {
            continue;
        }
        let z1 = (nu * nu + nu * (2.0 * l + sw / 2.0 + 5.0) + 2.0 * l - sw / 2.0 + 1.5) / (2.0 * sw);
        let energy = sw * (2.0 * nu + l + 3.5);
        out.push(H2N1Branch { nu, z1, energy, sign });
    }
    out.sort_by(|p, q| p.nu.total_cmp(&q.nu));
    Ok((quartic, out))
}

/// Closed-form solutions for the systems that have one, evaluated against
/// `sys` for their residuals. `None` when no closed form applies.
pub fn closed_form_solutions(model: &ModelSpec, sys: &AlgebraicSystem<f64>) -> Result<Option<Vec<RawSolution<f64>>>> {
    let s = match model {
        ModelSpec::H2(s) if s.n <= 1 => s,
        _ => return Ok(None),
    };
    let points: Vec<Vec<f64>> = if s.n == 0 {
        h2_n0_branches(s.ell, s.omega).iter().map(|&(nu, e)| vec![nu, e]).collect()
    } else {
        reduce_h2_n1(s.ell, s.omega)?.1.iter().map(|b| vec![b.z1, b.nu, b.energy]).collect()
    };
    let unknowns: Vec<String> = sys.unknowns().iter().cloned().collect();
    Ok(Some(
        points
            .into_iter()
            .map(|p| {
                let mut values: Vec<Complex64> = p.into_iter().map(Complex64::from).collect();
                canonicalize(&mut values, sys.n_roots());
                RawSolution {
                    unknowns: unknowns.clone(),
                    residual_inf: residual_inf(sys, &values),
                    values,
                    is_real: true,
                    singular: false,
                }
            })
            .collect(),
    ))
}
