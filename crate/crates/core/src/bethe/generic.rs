//! Bethe equations for an arbitrary `P f'' + Q f' + W f = 0` with
//! `f = Π(z − z_i)`. The roots are the first `n` unknowns of the coefficient
//! polynomials' unknown list.

use super::multipoly::MultiPoly;
use crate::error::{domain, Result};
use crate::scalar::Real;

fn at<T: Real>(coeffs: &[MultiPoly<T>], z: &MultiPoly<T>) -> MultiPoly<T> {
    // Horner in the root unknown
    let mut acc = MultiPoly::zero(z.vars());
    for c in coeffs.iter().rev() {
        acc = &(&acc * z) + c;
    }
    acc
}

fn structural_degree<T: Real>(coeffs: &[MultiPoly<T>]) -> Option<usize> {
    coeffs.iter().rposition(|c| !c.is_zero())
}

/// One cleared equation per root:
/// `P(z_i)·Σ_{j≠i} 2Π_{k≠i,j}(z_i − z_k) + Q(z_i)·Π_{j≠i}(z_i − z_j) = 0`.
pub fn residue_equations<T: Real>(p: &[MultiPoly<T>], q: &[MultiPoly<T>], n: usize) -> Vec<MultiPoly<T>> {
    if n == 0 {
        return Vec::new();
    }
    let vars = p.first().or(q.first()).expect("nonempty coefficient list").vars().clone();
    assert!(n <= vars.len(), "more roots than unknowns");
    let z: Vec<MultiPoly<T>> = (0..n).map(|i| MultiPoly::var(&vars, i)).collect();
    let one = MultiPoly::constant(&vars, T::one());
    let two = T::lit(2.0);
    (0..n)
        .map(|i| {
            let diff = |j: usize| &z[i] - &z[j];
            let mut prod = one.clone();
            for j in (0..n).filter(|&j| j != i) {
                prod = &prod * &diff(j);
            }
            let mut sum = MultiPoly::zero(&vars);
            for j in (0..n).filter(|&j| j != i) {
                let mut t = one.scale(two);
                for k in (0..n).filter(|&k| k != i && k != j) {
                    t = &t * &diff(k);
                }
                sum = &sum + &t;
            }
            &(&at(p, &z[i]) * &sum) + &(&at(q, &z[i]) * &prod)
        })
        .collect()
}

/// `Σ_i z_i^t` over the first `n` unknowns (`n` for `t = 0`).
fn power_sum<T: Real>(vars: &super::multipoly::Vars, n: usize, t: usize) -> MultiPoly<T> {
    let mut s = MultiPoly::zero(vars);
    for i in 0..n {
        s = &s + &MultiPoly::var(vars, i).pow(t as u32);
    }
    s
}

/// `Σ_{i<j} 2 h_{t−1}(z_i, z_j)` with `h` the complete homogeneous symmetric
/// polynomial in two variables; zero for `t = 0`.
fn pair_sum<T: Real>(vars: &super::multipoly::Vars, n: usize, t: usize) -> MultiPoly<T> {
    let mut s = MultiPoly::zero(vars);
    if t == 0 {
        return s;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let a = MultiPoly::var(vars, i);
            let b = MultiPoly::var(vars, j);
            for k in 0..t {
                s = &s + &(&a.pow(k as u32) * &b.pow((t - 1 - k) as u32)).scale(T::lit(2.0));
            }
        }
    }
    s
}

/// Vanishing of each power `z^m` in the polynomial part of
/// `P f''/f + Q f'/f + W`. Returned in ascending `m`.
pub fn coefficient_constraints<T: Real>(
    p: &[MultiPoly<T>],
    q: &[MultiPoly<T>],
    w: &[MultiPoly<T>],
    n: usize,
) -> Result<Vec<MultiPoly<T>>> {
    let dq = structural_degree(q);
    let dw = structural_degree(w);
    let dp = structural_degree(p);
    match (dq, dw) {
        (Some(s), Some(t)) if t >= s => {
            return domain(format!("deg W = {t} is not below deg Q = {s}; not closable"));
        }
        (None, Some(_)) => return domain("Q vanishes while W does not"),
        _ => {}
    }
    let vars = p.first().or(q.first()).expect("nonempty coefficient list").vars().clone();
    let top = [
        dq.map(|d| d as isize - 1),
        dp.map(|d| d as isize - 2),
        dw.map(|d| d as isize),
    ]
    .into_iter()
    .flatten()
    .max()
    .unwrap_or(-1);
    let mut out = Vec::new();
    for m in 0..=top.max(0) as usize {
        let mut eq = w.get(m).cloned().unwrap_or_else(|| MultiPoly::zero(&vars));
        for (k, pk) in p.iter().enumerate() {
            if k > m && !pk.is_zero() {
                eq = &eq + &(pk * &pair_sum(&vars, n, k - 1 - m));
            }
        }
        for (k, qk) in q.iter().enumerate() {
            if k > m && !qk.is_zero() {
                eq = &eq + &(qk * &power_sum(&vars, n, k - 1 - m));
            }
        }
        out.push(eq);
    }
    Ok(out)
}
