//! Real polynomials in ascending-coefficient form, a symmetric tridiagonal
//! eigensolver, and zeros of the classical orthogonal polynomials obtained
//! from their Jacobi matrices.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients at or below this magnitude are dropped from the top end.
pub const TRIM_TOL: f64 = 1e-14;

/// Polynomial `c0 + c1 z + ... + cd z^d`.
///
/// The coefficient vector is never empty and its last entry is nonzero
/// unless the polynomial is the constant zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Default for Poly {
    fn default() -> Self {
        Poly::zero()
    }
}

impl From<Vec<f64>> for Poly {
    fn from(v: Vec<f64>) -> Self {
        Poly::new(v)
    }
}

impl From<Poly> for Vec<f64> {
    fn from(p: Poly) -> Self {
        p.coeffs
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() <= TRIM_TOL) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        if coeffs.len() == 1 && coeffs[0].abs() <= TRIM_TOL {
            coeffs[0] = 0.0;
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `z - w`.
    pub fn linear_factor(w: f64) -> Self {
        Poly::new(vec![-w, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `z^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    /// Horner evaluation.
    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Poly {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(0.0);
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c / (i as f64 + 1.0)),
        );
        Poly::new(out)
    }

    /// `(p(z) - p(w)) / (z - w)` as a polynomial in `z`, by synthetic division.
    pub fn divided_difference(&self, w: f64) -> Poly {
        let d = self.degree();
        if d == 0 {
            return Poly::zero();
        }
        let mut q = vec![0.0; d];
        q[d - 1] = self.coeffs[d];
        for i in (1..d).rev() {
            q[i - 1] = self.coeffs[i] + w * q[i];
        }
        Poly::new(q)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Euclidean division: returns `(quotient, remainder)` with
    /// `deg remainder < deg divisor`.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        if divisor.is_zero() {
            return Err(Error::InvalidParameter("division by the zero polynomial".into()));
        }
        let dd = divisor.degree();
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![0.0; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dd] / lead;
            quot[i] = c;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= c * dc;
            }
        }
        rem.truncate(dd.max(1));
        if dd == 0 {
            rem = vec![0.0];
        }
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Real zeros of a polynomial of degree at most two, ascending, with
    /// a repeated zero reported twice.
    pub fn real_roots_low_degree(&self) -> Result<Vec<f64>> {
        match self.degree() {
            0 => Ok(Vec::new()),
            1 => Ok(vec![-self.coeffs[0] / self.coeffs[1]]),
            2 => {
                let (c, b, a) = (self.coeffs[0], self.coeffs[1], self.coeffs[2]);
                let disc = b * b - 4.0 * a * c;
                let scale = (b * b).max((4.0 * a * c).abs()).max(f64::MIN_POSITIVE);
                if disc.abs() <= 1e-14 * scale {
                    let r = -b / (2.0 * a);
                    return Ok(vec![r, r]);
                }
                if disc < 0.0 {
                    return Ok(Vec::new());
                }
                let sign = if b >= 0.0 { 1.0 } else { -1.0 };
                let q = -0.5 * (b + sign * disc.sqrt());
                let mut r = vec![q / a, c / q];
                r.sort_by(f64::total_cmp);
                Ok(r)
            }
            d => Err(Error::InvalidParameter(format!(
                "closed-form roots requested for degree {d}"
            ))),
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 && !(self.is_zero() && i == 0) {
                continue;
            }
            let mag = c.abs();
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}*z")?,
                _ => write!(f, "{mag}*z^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiag {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl Tridiag {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidParameter("empty tridiagonal matrix".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidParameter(format!(
                "tridiagonal of order {} needs {} off-diagonal entries, got {}",
                diag.len(),
                diag.len() - 1,
                offdiag.len()
            )));
        }
        Ok(Tridiag { diag, offdiag })
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }
}

const QL_MAX_SWEEPS: usize = 60;

/// All eigenvalues of `t`, ascending, by the implicit-shift QL algorithm.
pub fn tridiag_eigenvalues(t: &Tridiag) -> Result<Vec<f64>> {
    let n = t.order();
    let mut d = t.diag.clone();
    let mut e = t.offdiag.clone();
    e.push(0.0);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > QL_MAX_SWEEPS {
                return Err(Error::EigenNonConvergence(l));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Zeros of the physicists' Hermite polynomial `H_n`, ascending.
pub fn hermite_zeros(n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let off = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let t = Tridiag::new(vec![0.0; n], off).expect("consistent lengths");
    let mut z = tridiag_eigenvalues(&t).expect("Hermite Jacobi matrix converges");
    // exact odd symmetry
    for i in 0..n / 2 {
        let m = 0.5 * (z[n - 1 - i] - z[i]);
        z[i] = -m;
        z[n - 1 - i] = m;
    }
    if n % 2 == 1 {
        z[n / 2] = 0.0;
    }
    z
}

/// Zeros of the associated Laguerre polynomial `L_n^{(beta)}`, ascending.
pub fn laguerre_zeros(n: usize, beta: f64) -> Result<Vec<f64>> {
    if !(beta > -1.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Laguerre parameter must exceed -1, got {beta}"
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let diag = (0..n).map(|k| 2.0 * k as f64 + beta + 1.0).collect();
    let off = (1..n)
        .map(|k| (k as f64 * (k as f64 + beta)).sqrt())
        .collect();
    tridiag_eigenvalues(&Tridiag::new(diag, off)?)
}

/// Chebyshev points of the first kind mapped onto `[lo, hi]`, ascending.
pub fn chebyshev_nodes(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    (0..n)
        .rev()
        .map(|k| {
            let t = ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos();
            mid + half * t
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    /// Hermite H_n by its three-term recurrence, independent of the Jacobi route.
    fn hermite_rec(n: usize, x: f64) -> f64 {
        let (mut h0, mut h1) = (1.0, 2.0 * x);
        if n == 0 {
            return h0;
        }
        for k in 1..n {
            let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
            h0 = h1;
            h1 = h2;
        }
        h1
    }

    fn laguerre_rec(n: usize, beta: f64, x: f64) -> f64 {
        let (mut l0, mut l1) = (1.0, 1.0 + beta - x);
        if n == 0 {
            return l0;
        }
        for k in 1..n {
            let k = k as f64;
            let l2 = ((2.0 * k + 1.0 + beta - x) * l1 - (k + beta) * l0) / (k + 1.0);
            l0 = l1;
            l1 = l2;
        }
        l1
    }

    /// Eigenvalue count below `x` by Sturm sequence sign changes.
    fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
        let mut count = 0;
        let mut q = d[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..d.len() {
            let prev = if q == 0.0 { f64::EPSILON * (1.0 + x.abs()) } else { q };
            q = d[i] - x - e[i - 1] * e[i - 1] / prev;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn sturm_eigenvalues(d: &[f64], e: &[f64]) -> Vec<f64> {
        let n = d.len();
        let mut bound = 0.0f64;
        for i in 0..n {
            let r = d[i].abs()
                + if i > 0 { e[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { e[i].abs() } else { 0.0 };
            bound = bound.max(r);
        }
        (0..n)
            .map(|k| {
                let (mut lo, mut hi) = (-bound - 1.0, bound + 1.0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if sturm_count(d, e, mid) > k {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }

    #[test]
    fn eval_examples() {
        let h2 = Poly::new(vec![-2.0, 0.0, 4.0]);
        assert_abs_diff_eq!(h2.eval(FRAC_1_SQRT_2), 0.0, epsilon = 1e-15);
        assert_eq!(Poly::new(vec![0.0]).eval(7.0), 0.0);
        assert_eq!(Poly::new(vec![1.0, 2.0, 3.0]).eval(2.0), 17.0);
        // the H_2 zero is the one the Jacobi route produces
        assert_abs_diff_eq!(h2.eval(hermite_zeros(2)[1]), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn trimming_is_canonical() {
        let p = Poly::new(vec![1.0, 2.0, 1e-16, 0.0]);
        assert_eq!(p.degree(), 1);
        assert_eq!(Poly::new(vec![]).coeffs(), &[0.0]);
        assert!(Poly::new(vec![1e-15]).is_zero());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(Poly::new(vec![0.0, 4.0, 0.0]).derivative().coeffs(), &[4.0]);
        assert!(Poly::constant(3.0).derivative().is_zero());
        let a2 = 2.5f64 * 2.5;
        assert_eq!(
            Poly::new(vec![0.0, 0.0, a2]).derivative().coeffs(),
            &[0.0, 2.0 * a2]
        );
    }

    #[test]
    fn divided_difference_examples() {
        let z2 = Poly::new(vec![0.0, 0.0, 1.0]);
        assert_eq!(z2.divided_difference(3.0).coeffs(), &[3.0, 1.0]);

        // sextic P with a = b = 1: 2z^2 + 2z
        let p = Poly::new(vec![0.0, 2.0, 2.0]);
        let zk = 0.37;
        let q = p.divided_difference(zk);
        assert_abs_diff_eq!(q.coeff(0), 2.0 * zk + 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q.coeff(1), 2.0, epsilon = 1e-15);
        let back = &(&q * &Poly::linear_factor(zk)) + &Poly::constant(p.eval(zk));
        for (a, b) in back.coeffs().iter().zip(p.coeffs()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }

        assert!(Poly::constant(4.0).divided_difference(1.0).is_zero());
    }

    #[test]
    fn div_rem_reconstructs() {
        let p = Poly::new(vec![1.0, -2.0, 0.5, 3.0, 1.0]);
        let d = Poly::new(vec![2.0, 1.0, -4.0]);
        let (q, r) = p.div_rem(&d).unwrap();
        assert!(r.degree() < 2);
        let back = &(&q * &d) + &r;
        for i in 0..5 {
            assert_abs_diff_eq!(back.coeff(i), p.coeff(i), epsilon = 1e-13);
        }
        let (q, r) = p.div_rem(&Poly::constant(2.0)).unwrap();
        assert!(r.is_zero());
        assert_abs_diff_eq!(q.coeff(3), 1.5);
    }

    #[test]
    fn low_degree_roots() {
        let r = Poly::new(vec![0.0, 4.0, -4.0]).real_roots_low_degree().unwrap();
        assert_eq!(r, vec![0.0, 1.0]);
        let r = Poly::new(vec![0.0, 0.0, 1.0]).real_roots_low_degree().unwrap();
        assert_eq!(r, vec![0.0, 0.0]);
        assert!(Poly::new(vec![1.0, 0.0, 1.0])
            .real_roots_low_degree()
            .unwrap()
            .is_empty());
        let r = Poly::new(vec![2.0, -3.0, 1.0]).real_roots_low_degree().unwrap();
        assert_abs_diff_eq!(r[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r[1], 2.0, epsilon = 1e-15);
        let r = Poly::new(vec![-2.0, 3.0, 1.0]).real_roots_low_degree().unwrap();
        assert_abs_diff_eq!(r[0], (-3.0 - 17f64.sqrt()) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r[1], (-3.0 + 17f64.sqrt()) / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn tridiag_examples() {
        let t = Tridiag::new(vec![0.0], vec![]).unwrap();
        assert_eq!(tridiag_eigenvalues(&t).unwrap(), vec![0.0]);
        let t = Tridiag::new(vec![0.0, 0.0], vec![1.0]).unwrap();
        let ev = tridiag_eigenvalues(&t).unwrap();
        assert_abs_diff_eq!(ev[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ev[1], 1.0, epsilon = 1e-15);
        let t = Tridiag::new(vec![0.0, 0.0], vec![0.5f64.sqrt()]).unwrap();
        let ev = tridiag_eigenvalues(&t).unwrap();
        assert_abs_diff_eq!(ev[1], FRAC_1_SQRT_2, epsilon = 1e-15);
        assert!(Tridiag::new(vec![], vec![]).is_err());
        assert!(Tridiag::new(vec![1.0, 2.0], vec![]).is_err());
    }

    #[test]
    fn hermite_examples() {
        assert!(hermite_zeros(0).is_empty());
        assert_eq!(hermite_zeros(1), vec![0.0]);
        let z = hermite_zeros(2);
        assert_abs_diff_eq!(z[0], -FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(z[1], FRAC_1_SQRT_2, epsilon = 1e-15);
        let z = hermite_zeros(3);
        let r = 1.5f64.sqrt();
        assert_abs_diff_eq!(z[0], -r, epsilon = 1e-14);
        assert_eq!(z[1], 0.0);
        assert_abs_diff_eq!(z[2], r, epsilon = 1e-14);
    }

    #[test]
    fn laguerre_examples() {
        let gamma = 3.7;
        let z = laguerre_zeros(1, gamma - 1.0).unwrap();
        assert_abs_diff_eq!(z[0], gamma, epsilon = 1e-14);
        let z = laguerre_zeros(2, 0.0).unwrap();
        assert_abs_diff_eq!(z[0], 2.0 - 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(z[1], 2.0 + 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(laguerre_zeros(1, 0.0).unwrap()[0], 1.0, epsilon = 1e-15);
        assert!(laguerre_zeros(3, -1.0).is_err());
        assert!(laguerre_zeros(3, -2.5).is_err());
    }

    #[test]
    fn zeros_vanish_under_recurrence() {
        for n in 1..=30 {
            let z = hermite_zeros(n);
            let span = z[n - 1].abs().max(1.0);
            let pmax = (0..=400)
                .map(|i| hermite_rec(n, -span + 2.0 * span * i as f64 / 400.0).abs())
                .fold(0.0, f64::max);
            for &w in &z {
                assert!(hermite_rec(n, w).abs() < 1e-9 * pmax, "H_{n} at {w}");
            }
            for &beta in &[-0.5, 0.0, 1.0, 4.5] {
                let z = laguerre_zeros(n, beta).unwrap();
                assert!(z.iter().all(|&w| w > 0.0));
                let hi = z[n - 1];
                let pmax = (0..=400)
                    .map(|i| laguerre_rec(n, beta, hi * i as f64 / 400.0).abs())
                    .fold(0.0, f64::max);
                for &w in &z {
                    assert!(laguerre_rec(n, beta, w).abs() < 1e-9 * pmax);
                }
            }
        }
    }

    #[test]
    fn chebyshev_nodes_are_interior_and_sorted() {
        let x = chebyshev_nodes(5, 0.0, 1.0);
        assert!(x.windows(2).all(|w| w[0] < w[1]));
        assert!(x.iter().all(|&v| v > 0.0 && v < 1.0));
        assert_abs_diff_eq!(x[2], 0.5, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn horner_matches_power_sum(
            c in prop::collection::vec(-10.0f64..10.0, 1..9),
            z in -10.0f64..10.0,
        ) {
            let p = Poly::new(c.clone());
            let naive: f64 = c.iter().enumerate().map(|(i, ci)| ci * z.powi(i as i32)).sum();
            let scale: f64 = c.iter().enumerate().map(|(i, ci)| (ci * z.powi(i as i32)).abs()).sum();
            prop_assert!((p.eval(z) - naive).abs() <= 1e-12 * scale.max(1e-300));
        }

        #[test]
        fn divided_difference_identity(
            c in prop::collection::vec(-10.0f64..10.0, 1..5),
            w in -10.0f64..10.0,
            z in -10.0f64..10.0,
        ) {
            let p = Poly::new(c);
            let q = p.divided_difference(w);
            let lhs = q.eval(z) * (z - w) + p.eval(w);
            let scale = p.coeffs().iter().enumerate()
                .map(|(i, ci)| ci.abs() * 10f64.powi(i as i32)).sum::<f64>().max(1.0);
            prop_assert!((lhs - p.eval(z)).abs() <= 1e-12 * scale);
        }

        #[test]
        fn ql_matches_sturm_bisection(
            d in prop::collection::vec(-5.0f64..5.0, 1..50),
            seed in prop::collection::vec(-3.0f64..3.0, 50),
        ) {
            let n = d.len();
            let e: Vec<f64> = seed[..n - 1].to_vec();
            let ql = tridiag_eigenvalues(&Tridiag::new(d.clone(), e.clone()).unwrap()).unwrap();
            let st = sturm_eigenvalues(&d, &e);
            for (a, b) in ql.iter().zip(&st) {
                prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
        }
    }
}
