//! Flat evaluation form of a polynomial system and its Jacobian, plus a
//! small complex LU solver.

use num_complex::Complex;
use num_traits::Zero;

use crate::bethe::{AlgebraicSystem, MultiPoly};
use crate::scalar::Real;

#[derive(Clone, Debug)]
struct Term<T> {
    coef: T,
    /// `(variable, power)` for nonzero powers only.
    powers: Vec<(usize, u16)>,
}

#[derive(Clone, Debug)]
struct Flat<T> {
    terms: Vec<Term<T>>,
}

impl<T: Real> Flat<T> {
    fn from(p: &MultiPoly<T>) -> Self {
        let terms = p
            .terms()
            .map(|(e, &c)| Term {
                coef: c,
                powers: e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(v, &k)| (v, k)).collect(),
            })
            .collect();
        Flat { terms }
    }

    /// Value and the sum of term magnitudes at `x`.
    fn eval(&self, x: &[Complex<T>]) -> (Complex<T>, T) {
        let mut acc = Complex::zero();
        let mut mag = T::zero();
        for t in &self.terms {
            let mut m = Complex::new(t.coef, T::zero());
            for &(v, k) in &t.powers {
                m = m * x[v].powi(k as i32);
            }
            acc = acc + m;
            mag += m.norm();
        }
        (acc, mag)
    }
}

/// A system ready for Newton iteration: equations, Jacobian entries and
/// per-equation coefficient scales.
#[derive(Clone, Debug)]
pub struct Compiled<T: Real> {
    eqs: Vec<Flat<T>>,
    jac: Vec<Vec<Option<Flat<T>>>>,
    /// `max |coefficient|` of each equation.
    pub scale: Vec<T>,
    pub dim: usize,
}

impl<T: Real> Compiled<T> {
    pub fn new(sys: &AlgebraicSystem<T>) -> Self {
        let dim = sys.unknowns().len();
        let eqs = sys.equations().iter().map(Flat::from).collect();
        let jac = sys
            .equations()
            .iter()
            .map(|e| {
                (0..dim)
                    .map(|v| {
                        let d = e.partial(v);
                        if d.is_zero() {
                            None
                        } else {
                            Some(Flat::from(&d))
                        }
                    })
                    .collect()
            })
            .collect();
        let scale = sys
            .equations()
            .iter()
            .map(|e| {
                let s = e.max_abs_coeff();
                if s > T::zero() {
                    s
                } else {
                    T::one()
                }
            })
            .collect();
        Compiled { eqs, jac, scale, dim }
    }

    /// `F(x)` divided row-wise by the coefficient scale.
    pub fn residual(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        self.eqs.iter().zip(&self.scale).map(|(e, &s)| e.eval(x).0 / s).collect()
    }

    /// Max over equations of `|F_i(x)|` relative to the magnitude of the
    /// terms of `F_i` at `x`.
    pub fn residual_inf(&self, x: &[Complex<T>]) -> T {
        let tiny = T::min_positive_value();
        self.eqs
            .iter()
            .map(|e| {
                let (v, mag) = e.eval(x);
                v.norm() / mag.max(tiny)
            })
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Row-scaled Jacobian.
    pub fn jacobian(&self, x: &[Complex<T>]) -> Vec<Vec<Complex<T>>> {
        self.jac
            .iter()
            .zip(&self.scale)
            .map(|(row, &s)| {
                row.iter()
                    .map(|d| d.as_ref().map(|d| d.eval(x).0 / s).unwrap_or_else(Complex::zero))
                    .collect()
            })
            .collect()
    }
}

/// In-place LU with partial pivoting. Returns the permutation and the
/// ratio of smallest to largest pivot magnitude (0 when exactly singular).
pub fn lu<T: Real>(a: &mut [Vec<Complex<T>>]) -> (Vec<usize>, T) {
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut pmin = T::infinity();
    let mut pmax = T::zero();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].norm().partial_cmp(&a[j][k].norm()).unwrap_or(std::cmp::Ordering::Equal)).unwrap_or(k);
        a.swap(k, p);
        perm.swap(k, p);
        let piv = a[k][k];
        let m = piv.norm();
        pmin = pmin.min(m);
        pmax = pmax.max(m);
        if m == T::zero() {
            continue;
        }
        for i in (k + 1)..n {
            let f = a[i][k] / piv;
            a[i][k] = f;
            for j in (k + 1)..n {
                let t = a[k][j];
                a[i][j] = a[i][j] - f * t;
            }
        }
    }
    let ratio = if n == 0 {
        T::one()
    } else if pmax > T::zero() {
        pmin / pmax
    } else {
        T::zero()
    };
    (perm, ratio)
}

/// Solves `A x = b` given the output of [`lu`]. `None` if a pivot is zero.
pub fn lu_solve<T: Real>(a: &[Vec<Complex<T>>], perm: &[usize], b: &[Complex<T>]) -> Option<Vec<Complex<T>>> {
    let n = a.len();
    let mut y: Vec<Complex<T>> = perm.iter().map(|&p| b[p]).collect();
    for i in 0..n {
        for j in 0..i {
            let t = a[i][j] * y[j];
            y[i] = y[i] - t;
        }
    }
    for i in (0..n).rev() {
        for j in (i + 1)..n {
            let t = a[i][j] * y[j];
            y[i] = y[i] - t;
        }
        if a[i][i].norm() == T::zero() {
            return None;
        }
        y[i] = y[i] / a[i][i];
    }
    if y.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Some(y)
    } else {
        None
    }
}

pub fn norm_sq<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |a, c| a + c.norm_sqr())
}
