//! Adaptive Simpson quadrature.

use crate::error::{QesError, Result};
use crate::scalar::Real;

const MAX_DEPTH: u32 = 50;

#[derive(Clone, Copy, Debug)]
struct Panel<T> {
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

fn refine<T: Real, F: Fn(T) -> T>(f: &F, p: Panel<T>, tol: T, depth: u32, evals: &mut usize) -> Result<T> {
    let two = T::lit(2.0);
    let m = (p.a + p.b) / two;
    let lm = (p.a + m) / two;
    let rm = (m + p.b) / two;
    let flm = f(lm);
    let frm = f(rm);
    *evals += 2;
    if !flm.is_finite() || !frm.is_finite() {
        return Err(QesError::NonFinite { r: if flm.is_finite() { rm.to_f64().unwrap_or(f64::NAN) } else { lm.to_f64().unwrap_or(f64::NAN) } });
    }
    let left = simpson(p.a, m, p.fa, flm, p.fm);
    let right = simpson(m, p.b, p.fm, frm, p.fb);
    let delta = left + right - p.whole;
    if depth >= MAX_DEPTH || delta.abs() <= T::lit(15.0) * tol {
        return Ok(left + right + delta / T::lit(15.0));
    }
    let l = refine(f, Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left }, tol / two, depth + 1, evals)?;
    let r = refine(f, Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right }, tol / two, depth + 1, evals)?;
    Ok(l + r)
}

/// `∫_a^b f` to absolute tolerance `tol`, starting from `panels` equal
/// panels so narrow features are not stepped over.
pub fn adaptive_simpson<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T, panels: usize) -> Result<T> {
    let panels = panels.max(1);
    let h = (b - a) / T::from_usize_lossy(panels);
    let mut total = T::zero();
    let mut evals = 0usize;
    let ptol = tol / T::from_usize_lossy(panels);
    for k in 0..panels {
        let pa = a + h * T::from_usize_lossy(k);
        let pb = if k + 1 == panels { b } else { pa + h };
        let pm = (pa + pb) / T::lit(2.0);
        let (fa, fm, fb) = (f(pa), f(pm), f(pb));
        evals += 3;
        for (x, v) in [(pa, fa), (pm, fm), (pb, fb)] {
            if !v.is_finite() {
                return Err(QesError::NonFinite { r: x.to_f64().unwrap_or(f64::NAN) });
            }
        }
        let whole = simpson(pa, pb, fa, fm, fb);
        total += refine(&f, Panel { a: pa, b: pb, fa, fm, fb, whole }, ptol, 0, &mut evals)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact_and_gaussian_moment() {
        let v = adaptive_simpson(|x: f64| x * x * x, 0.0, 2.0, 1e-12, 1).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
        let g = adaptive_simpson(|r: f64| r * r * (-r * r).exp(), 0.0, 12.0, 1e-13, 8).unwrap();
        assert!((g - std::f64::consts::PI.sqrt() / 4.0).abs() < 1e-11);
    }

    #[test]
    fn works_in_single_precision() {
        let v = adaptive_simpson(|x: f32| x.sin(), 0.0, std::f32::consts::PI, 1e-5, 4).unwrap();
        assert!((v - 2.0).abs() < 1e-4);
    }
}
