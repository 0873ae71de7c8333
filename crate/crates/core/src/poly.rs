//! Dense univariate polynomials with ascending coefficients.
//!
//! Used for the pseudo-Hermite polynomials, the coefficient polynomials of the
//! gauge-reduced ODEs and the univariate eliminants solved by [`all_roots`].

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::eigen::{balance, hessenberg_eigenvalues};
use crate::error::{QesError, Result};
use crate::scalar::Real;

/// Real/complex classification threshold: `|im| <= CLASSIFY_TOL * (1 + |re|)`.
pub const CLASSIFY_TOL: f64 = 1e-8;
/// Relative residual every returned root must meet.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;

/// Dense polynomial, `coeffs[k]` multiplies `z^k`.
///
/// Trailing coefficients that are exactly zero are trimmed on construction, so
/// `degree() == coeffs().len() - 1` always holds and the zero polynomial is `[0]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
pub struct Poly<T: Real> {
    coeffs: Vec<T>,
}

impl<T: Real> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == T::zero() {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::new(vec![T::zero()])
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c * z^k`.
    pub fn monomial(c: T, k: usize) -> Self {
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == T::zero()
    }

    pub fn leading(&self) -> T {
        *self.coeffs.last().unwrap()
    }

    /// Largest coefficient magnitude.
    pub fn coeff_scale(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, x: Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * x + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, x: Complex<T>) -> (Complex<T>, Complex<T>) {
        let zero = Complex::new(T::zero(), T::zero());
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * T::from_usize_lossy(k))
            .collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, c: T) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// `sum_k coeffs[k] * x^k` where the monomials are produced by `x^k` on
    /// another polynomial, i.e. composition `self(inner(z))`.
    pub fn compose(&self, inner: &Poly<T>) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, &c| &(&acc * inner) + &Self::constant(c))
    }
}

impl<T: Real> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                let a = self.coeffs.get(k).copied().unwrap_or_else(T::zero);
                let b = rhs.coeffs.get(k).copied().unwrap_or_else(T::zero);
                a + b
            })
            .collect();
        Poly::new(coeffs)
    }
}

impl<T: Real> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        self + &(-rhs)
    }
}

impl<T: Real> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

/// Pseudo-Hermite polynomial of even degree `m >= 2`:
/// `H_m(r) = m! * sum_{p=0}^{m/2} (2r)^(m-2p) / (p! (m-2p)!)`.
pub fn pseudo_hermite<T: Real>(m: usize) -> Result<Poly<T>> {
    if m < 2 || m % 2 != 0 {
        return Err(QesError::Domain(format!(
            "pseudo-Hermite degree must be even and >= 2, got {m}"
        )));
    }
    let mut coeffs = vec![T::zero(); m + 1];
    for p in 0..=m / 2 {
        let k = m - 2 * p;
        // m! / (p! k!) accumulated as a product to stay exact for moderate m
        let mut c = T::one();
        for f in (k + 1)..=m {
            c *= T::from_usize_lossy(f);
        }
        for f in 2..=p {
            c /= T::from_usize_lossy(f);
        }
        coeffs[k] = c * T::lit(2.0).powi(k as i32);
    }
    Ok(Poly::new(coeffs))
}

/// All roots of a univariate polynomial, split into real roots and conjugate pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
pub struct RootSet<T: Real> {
    /// Ascending.
    pub real_roots: Vec<T>,
    /// `(re, im)` with `im > 0`; the conjugate is implied.
    pub complex_pairs: Vec<(T, T)>,
    /// Worst relative residual `|p(r)| / (max_k |c_k| * max(1,|r|)^deg)`.
    pub residual_bound: T,
}

impl<T: Real> RootSet<T> {
    pub fn count(&self) -> usize {
        self.real_roots.len() + 2 * self.complex_pairs.len()
    }

    /// Every root, conjugates included.
    pub fn all(&self) -> Vec<Complex<T>> {
        let mut out: Vec<Complex<T>> = self
            .real_roots
            .iter()
            .map(|&r| Complex::new(r, T::zero()))
            .collect();
        for &(re, im) in &self.complex_pairs {
            out.push(Complex::new(re, im));
            out.push(Complex::new(re, -im));
        }
        out
    }
}

/// Relative residual of a candidate root, the quantity bounded by [`ROOT_RESIDUAL_TOL`].
pub fn relative_residual<T: Real>(p: &Poly<T>, root: Complex<T>) -> T {
    let scale = p.coeff_scale() * T::one().max(root.norm()).powi(p.degree() as i32);
    p.eval_complex(root).norm() / scale
}

fn newton_polish<T: Real>(p: &Poly<T>, start: Complex<T>, iters: usize) -> Complex<T> {
    let mut best = start;
    let mut best_res = p.eval_complex(start).norm();
    let mut z = start;
    for _ in 0..iters {
        let (v, dv) = p.eval_with_derivative(z);
        if dv.norm() == T::zero() {
            break;
        }
        let next = z - v / dv;
        if !(next.re.is_finite() && next.im.is_finite()) {
            break;
        }
        let res = p.eval_complex(next).norm();
        z = next;
        if res < best_res {
            best = next;
            best_res = res;
            if res == T::zero() {
                break;
            }
        } else if res > best_res * T::lit(1e3) {
            break;
        }
    }
    best
}

fn is_near_real<T: Real>(z: Complex<T>) -> bool {
    z.im.abs() <= T::lit(CLASSIFY_TOL) * (T::one() + z.re.abs())
}

/// All roots of `p` from the eigenvalues of its balanced companion matrix,
/// each refined by Newton iteration on `p`.
pub fn all_roots<T: Real>(p: &Poly<T>) -> Result<RootSet<T>> {
    let deg = p.degree();
    if deg == 0 {
        return Err(QesError::Domain(
            "root finding needs a polynomial of degree >= 1".into(),
        ));
    }
    let c = p.coeffs();
    let zeros_at_origin = c.iter().take_while(|&&x| x == T::zero()).count();
    let reduced = &c[zeros_at_origin..];
    let m = reduced.len() - 1;

    let mut eig: Vec<Complex<T>> = Vec::with_capacity(deg);
    if m > 0 {
        // Companion matrix in upper Hessenberg form.
        let lead = reduced[m];
        let mut a = vec![vec![T::zero(); m]; m];
        for j in 0..m {
            a[0][j] = -reduced[m - 1 - j] / lead;
        }
        for i in 1..m {
            a[i][i - 1] = T::one();
        }
        balance(&mut a);
        eig = hessenberg_eigenvalues(a)?;
    }

    let mut real_roots = vec![T::zero(); zeros_at_origin];
    let mut complex_pairs = Vec::new();
    for z in eig {
        if z.im < T::zero() {
            continue;
        }
        if z.im == T::zero() {
            let r = newton_polish(p, z, 60);
            real_roots.push(r.re);
            continue;
        }
        let polished = newton_polish(p, z, 60);
        if is_near_real(polished) {
            // A conjugate pair that collapses onto the real axis: two real roots.
            let r = newton_polish(p, Complex::new(polished.re, T::zero()), 60).re;
            real_roots.push(r);
            real_roots.push(r);
        } else {
            complex_pairs.push((polished.re, polished.im.abs()));
        }
    }
    real_roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    complex_pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut set = RootSet {
        real_roots,
        complex_pairs,
        residual_bound: T::zero(),
    };
    set.residual_bound = set
        .all()
        .into_iter()
        .map(|r| relative_residual(p, r))
        .fold(T::zero(), T::max);
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pseudo_hermite_low_degrees() {
        assert_eq!(pseudo_hermite::<f64>(2).unwrap().coeffs(), &[2.0, 0.0, 4.0]);
        assert_eq!(
            pseudo_hermite::<f64>(4).unwrap().coeffs(),
            &[12.0, 0.0, 48.0, 0.0, 16.0]
        );
        assert_eq!(
            pseudo_hermite::<f64>(6).unwrap().coeffs(),
            &[120.0, 0.0, 720.0, 0.0, 480.0, 0.0, 64.0]
        );
    }

    #[test]
    fn pseudo_hermite_rejects_odd_and_small() {
        assert!(pseudo_hermite::<f64>(3).is_err());
        assert!(pseudo_hermite::<f64>(0).is_err());
    }

    #[test]
    fn eval_and_calculus() {
        let h2 = Poly::new(vec![2.0, 0.0, 4.0]);
        assert_eq!(h2.eval(0.0), 2.0);
        assert_eq!(h2.eval(1.0), 6.0);
        assert_eq!(pseudo_hermite::<f64>(4).unwrap().eval(1.0), 76.0);
        assert_eq!(h2.derivative().coeffs(), &[0.0, 8.0]);
        assert_eq!(h2.derivative().derivative().coeffs(), &[8.0]);
        let r = Poly::new(vec![0.0, 1.0]);
        assert_eq!((&r * &r).coeffs(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn trimming_keeps_structure() {
        let p = Poly::new(vec![1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
        let z: Poly<f64> = Poly::new(vec![]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), 0);
        // cancellation is exact, so the degree drops explicitly
        let a = Poly::new(vec![1.0, 1.0]);
        let b = Poly::new(vec![0.0, 1.0]);
        assert_eq!((&a - &b).degree(), 0);
    }

    #[test]
    fn compose_substitutes() {
        // (z^2 + 1) o (2z) = 4z^2 + 1
        let p = Poly::new(vec![1.0, 0.0, 1.0]);
        let q = Poly::new(vec![0.0, 2.0]);
        assert_eq!(p.compose(&q).coeffs(), &[1.0, 0.0, 4.0]);
    }

    #[test]
    fn roots_of_simple_quadratics() {
        let rs = all_roots(&Poly::new(vec![-1.0, 0.0, 1.0])).unwrap();
        assert_eq!(rs.real_roots.len(), 2);
        assert_relative_eq!(rs.real_roots[0], -1.0, epsilon = 1e-14);
        assert_relative_eq!(rs.real_roots[1], 1.0, epsilon = 1e-14);

        let rs = all_roots(&Poly::new(vec![1.0, 0.0, 1.0])).unwrap();
        assert!(rs.real_roots.is_empty());
        assert_eq!(rs.complex_pairs.len(), 1);
        assert_relative_eq!(rs.complex_pairs[0].0, 0.0, epsilon = 1e-14);
        assert_relative_eq!(rs.complex_pairs[0].1, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn roots_reject_constants() {
        assert!(all_roots(&Poly::constant(3.0)).is_err());
    }

    #[test]
    fn roots_with_zero_roots_and_multiplicity() {
        // z^2 (z - 2)^2
        let p = Poly::new(vec![0.0, 0.0, 4.0, -4.0, 1.0]);
        let rs = all_roots(&p).unwrap();
        assert_eq!(rs.count(), 4);
        assert!(rs.residual_bound <= 1e-10);
    }

    #[test]
    fn isotonic_n1_quadratic_root_back_substitutes() {
        // Bethe quadratic for z1 at l=1, omega=0.1 and the linear constraint
        // relating z1 back to nu. The tabulated nu=0.07658 is rounded, so nu is
        // first recovered from the squared eliminant quartic.
        let (l, w) = (1.0f64, 0.1f64);
        let sw = w.sqrt();
        let inner = Poly::new(vec![l + 0.75, 2.0 * l + sw / 2.0 + 3.0, 1.0]);
        let c = Poly::new(vec![4.0 * l - 2.0 * sw + 3.0, 8.0]);
        let quartic = &(&inner * &inner).scale(16.0)
            - &(&(&c * &c) + &Poly::constant(16.0 * (2.0 * l + 3.0) * sw));
        let nus = all_roots(&quartic).unwrap();
        let nu = *nus
            .real_roots
            .iter()
            .min_by(|a, b| (*a - 0.07658).abs().partial_cmp(&(*b - 0.07658).abs()).unwrap())
            .unwrap();
        assert!((nu - 0.07658).abs() < 5e-6);

        let p = Poly::new(vec![
            -(2.0 * l + 3.0),
            -(4.0 * l - 2.0 * sw + 8.0 * nu + 3.0),
            4.0 * sw,
        ]);
        let rs = all_roots(&p).unwrap();
        let z1 = *rs.real_roots.last().unwrap();
        let lhs = nu * nu + nu * (2.0 * l + sw / 2.0 + 5.0);
        let rhs = 2.0 * sw * z1 - (2.0 * l - sw / 2.0 + 1.5);
        assert!((lhs - rhs).abs() <= 1e-6, "{lhs} vs {rhs}");
    }

    #[test]
    fn generic_over_f32() {
        let rs = all_roots(&Poly::<f32>::new(vec![-2.0, 0.0, 1.0])).unwrap();
        assert!((rs.real_roots[1] - 2f32.sqrt()).abs() < 1e-6);
    }
}
