//! Sparse multivariate polynomials over a named, ordered unknown list.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex;

use crate::scalar::Real;

/// Shared, ordered list of unknown names.
pub type Vars = Arc<[String]>;

pub fn vars_from<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into()
}

/// Exponent vector, one entry per unknown.
pub type Exps = Vec<u16>;

#[derive(Clone, PartialEq)]
pub struct MultiPoly<T: Real> {
    vars: Vars,
    terms: BTreeMap<Exps, T>,
}

impl<T: Real> fmt::Debug for MultiPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c:?}")?;
            for (v, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*{}", self.vars[v])?,
                    _ => write!(f, "*{}^{k}", self.vars[v])?,
                }
            }
        }
        Ok(())
    }
}

impl<T: Real> MultiPoly<T> {
    pub fn zero(vars: &Vars) -> Self {
        MultiPoly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &Vars, c: T) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    /// The unknown at position `idx`.
    pub fn var(vars: &Vars, idx: usize) -> Self {
        assert!(idx < vars.len(), "unknown index out of range");
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        let mut p = Self::zero(vars);
        p.add_term(e, T::one());
        p
    }

    /// Looks an unknown up by name.
    pub fn named(vars: &Vars, name: &str) -> Option<Self> {
        vars.iter().position(|v| v == name).map(|i| Self::var(vars, i))
    }

    pub fn from_terms(vars: &Vars, terms: impl IntoIterator<Item = (Exps, T)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &T)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, e: Exps, c: T) {
        if c == T::zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == T::zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    fn check_vars(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "polynomials over different unknown lists"
        );
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&k| k as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, idx: usize) -> usize {
        self.terms.keys().map(|e| e[idx] as usize).max().unwrap_or(0)
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.terms.keys().any(|e| e[idx] > 0)
    }

    pub fn max_abs_coeff(&self) -> T {
        self.terms.values().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, c: T) -> Self {
        let mut p = Self::zero(&self.vars);
        for (e, v) in &self.terms {
            p.add_term(e.clone(), *v * c);
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(&self.vars, T::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Coefficient of the exponent vector `e` (zero if absent).
    pub fn coeff(&self, e: &[u16]) -> T {
        self.terms.get(e).copied().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: &[T]) -> T {
        let mut s = T::zero();
        for (e, c) in &self.terms {
            let mut m = *c;
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    m *= x[v].powi(k as i32);
                }
            }
            s += m;
        }
        s
    }

    pub fn eval_complex(&self, x: &[Complex<T>]) -> Complex<T> {
        let mut s = Complex::new(T::zero(), T::zero());
        for (e, c) in &self.terms {
            let mut m = Complex::new(*c, T::zero());
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    m *= x[v].powu(k as u32);
                }
            }
            s += m;
        }
        s
    }

    /// Σ|c|·|x^α|, the natural magnitude against which a residual is judged.
    pub fn eval_abs(&self, x: &[Complex<T>]) -> T {
        let mut s = T::zero();
        for (e, c) in &self.terms {
            let mut m = c.abs();
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    m *= x[v].norm().powi(k as i32);
                }
            }
            s += m;
        }
        s
    }

    pub fn partial(&self, idx: usize) -> Self {
        let mut p = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[idx] > 0 {
                let mut d = e.clone();
                d[idx] -= 1;
                p.add_term(d, *c * T::from_usize_lossy(e[idx] as usize));
            }
        }
        p
    }

    /// Replaces unknown `idx` by the polynomial `by` (over the same unknowns).
    pub fn substitute(&self, idx: usize, by: &Self) -> Self {
        self.check_vars(by);
        let maxk = self.degree_in(idx);
        let mut powers = vec![Self::constant(&self.vars, T::one())];
        for k in 1..=maxk {
            powers.push(&powers[k - 1] * by);
        }
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let k = e[idx] as usize;
            let mut rest = e.clone();
            rest[idx] = 0;
            let mono = Self::from_terms(&self.vars, [(rest, *c)]);
            out = &out + &(&mono * &powers[k]);
        }
        out
    }

    /// If `self = a·x_idx + rest` with constant `a ≠ 0` and `rest` free of
    /// `x_idx`, returns `x_idx = -rest / a`.
    pub fn solve_linear_for(&self, idx: usize) -> Option<Self> {
        if self.degree_in(idx) != 1 {
            return None;
        }
        let mut a = None;
        let mut rest = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[idx] == 1 {
                if e.iter().enumerate().any(|(v, &k)| v != idx && k > 0) {
                    return None;
                }
                a = Some(*c);
            } else {
                rest.add_term(e.clone(), *c);
            }
        }
        let a = a?;
        Some(rest.scale(-T::one() / a))
    }

    /// Re-expresses the polynomial over a different unknown list. Unknowns
    /// absent from `to` must not occur.
    pub fn remap(&self, to: &Vars) -> Self {
        let map: Vec<Option<usize>> = self
            .vars
            .iter()
            .map(|v| to.iter().position(|w| w == v))
            .collect();
        let mut p = Self::zero(to);
        for (e, c) in &self.terms {
            let mut ne = vec![0u16; to.len()];
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    let j = map[v].expect("unknown missing from target list");
                    ne[j] = k;
                }
            }
            p.add_term(ne, *c);
        }
        p
    }
}

impl<T: Real> Add for &MultiPoly<T> {
    type Output = MultiPoly<T>;
    fn add(self, rhs: Self) -> MultiPoly<T> {
        self.check_vars(rhs);
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), *c);
        }
        p
    }
}

impl<T: Real> Sub for &MultiPoly<T> {
    type Output = MultiPoly<T>;
    fn sub(self, rhs: Self) -> MultiPoly<T> {
        self + &(-rhs)
    }
}

impl<T: Real> Neg for &MultiPoly<T> {
    type Output = MultiPoly<T>;
    fn neg(self) -> MultiPoly<T> {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for &MultiPoly<T> {
    type Output = MultiPoly<T>;
    fn mul(self, rhs: Self) -> MultiPoly<T> {
        self.check_vars(rhs);
        let mut p = MultiPoly::zero(&self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exps = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                p.add_term(e, *ca * *cb);
            }
        }
        p
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl<T: Real> $tr for MultiPoly<T> {
            type Output = MultiPoly<T>;
            fn $m(self, rhs: Self) -> MultiPoly<T> {
                (&self).$m(&rhs)
            }
        }
        impl<T: Real> $tr<&MultiPoly<T>> for MultiPoly<T> {
            type Output = MultiPoly<T>;
            fn $m(self, rhs: &MultiPoly<T>) -> MultiPoly<T> {
                (&self).$m(rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl<T: Real> Neg for MultiPoly<T> {
    type Output = MultiPoly<T>;
    fn neg(self) -> MultiPoly<T> {
        -&self
    }
}
