//! Zeroth-order prepotential `W0(z) = ∫ P/Q dz` in closed form and the
//! N-th order prepotential
//! `W_N = W0 - Σ_j mu_j ln|z - a_j| - Σ_k ln|z - z_k|`.

use serde::{Deserialize, Serialize};

use crate::coords::CoordinateMap;
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::poly::Poly;

/// Remainder coefficients below this are treated as an absent pole.
const POLE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LogTerm {
    /// `weight * ln|z - center|`
    Real { center: f64, weight: f64 },
    /// `weight * ln((z - center)^2 + width^2)`
    ConjugatePair { center: f64, width: f64, weight: f64 },
}

/// `weight * atan((z - center) / scale)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArctanTerm {
    pub center: f64,
    pub scale: f64,
    pub weight: f64,
}

/// `weight / (z - center)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseTerm {
    pub center: f64,
    pub weight: f64,
}

/// `W0` as an explicit function of `z`, bundled with the coordinate map
/// that turns it into a function of `x`.
#[derive(Debug, Clone)]
pub struct Prepotential {
    pub poly_part: Poly,
    pub log_terms: Vec<LogTerm>,
    pub arctan_terms: Vec<ArctanTerm>,
    pub inverse_terms: Vec<InverseTerm>,
    spec: ModelSpec,
    map: CoordinateMap,
}

/// Sign/log-magnitude representation of `phi_N(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiValue {
    pub log_magnitude: f64,
    pub sign: f64,
}

impl PhiValue {
    pub fn value(&self) -> f64 {
        self.sign * self.log_magnitude.exp()
    }
}

/// Integrates `P/Q` term by term and builds the coordinate map of `spec`.
pub fn integrate_w0(spec: &ModelSpec) -> Result<Prepotential> {
    spec.check()?;
    let map = CoordinateMap::build(&spec.q, spec.anchor, spec.branch)?;
    let q = &spec.q;
    let (quot, rem) = spec.p.div_rem(q)?;
    let mut log_terms = Vec::new();
    let mut arctan_terms = Vec::new();
    let mut inverse_terms = Vec::new();

    match q.degree() {
        0 => {}
        1 => {
            // rem / (q1 (z - r))
            let r = -q.coeff(0) / q.coeff(1);
            let w = rem.coeff(0) / q.coeff(1);
            if w.abs() > POLE_TOL {
                log_terms.push(LogTerm::Real { center: r, weight: w });
            }
        }
        _ => {
            let q2 = q.coeff(2);
            let (u, v) = (rem.coeff(0), rem.coeff(1));
            let roots = q.real_roots_low_degree()?;
            if roots.len() == 2 && roots[0] == roots[1] {
                // (u + v z) / (q2 (z - r)^2)
                let r = roots[0];
                let a1 = v / q2;
                let a2 = (u + v * r) / q2;
                if a1.abs() > POLE_TOL {
                    log_terms.push(LogTerm::Real { center: r, weight: a1 });
                }
                if a2.abs() > POLE_TOL {
                    inverse_terms.push(InverseTerm { center: r, weight: -a2 });
                }
            } else if roots.len() == 2 {
                let (r1, r2) = (roots[0], roots[1]);
                for (ri, rj) in [(r1, r2), (r2, r1)] {
                    let w = (u + v * ri) / (q2 * (ri - rj));
                    if w.abs() > POLE_TOL {
                        log_terms.push(LogTerm::Real { center: ri, weight: w });
                    }
                }
            } else {
                // Q = q2 ((z - c)^2 + s^2)
                let c = -q.coeff(1) / (2.0 * q2);
                let s = (q.coeff(0) / q2 - c * c).sqrt();
                if v.abs() > POLE_TOL {
                    log_terms.push(LogTerm::ConjugatePair {
                        center: c,
                        width: s,
                        weight: v / (2.0 * q2),
                    });
                }
                let w = (u + v * c) / (q2 * s);
                if w.abs() > POLE_TOL {
                    arctan_terms.push(ArctanTerm {
                        center: c,
                        scale: s,
                        weight: w,
                    });
                }
            }
        }
    }

    let image = map.z_image();
    let centers = log_terms
        .iter()
        .filter_map(|t| match t {
            LogTerm::Real { center, .. } => Some(*center),
            LogTerm::ConjugatePair { .. } => None,
        })
        .chain(inverse_terms.iter().map(|t| t.center));
    for c in centers {
        if image.contains_open(c) {
            return Err(Error::InteriorSingularity(c));
        }
    }

    Ok(Prepotential {
        poly_part: quot.antiderivative(),
        log_terms,
        arctan_terms,
        inverse_terms,
        spec: spec.clone(),
        map,
    })
}

impl Prepotential {
    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn map(&self) -> &CoordinateMap {
        &self.map
    }

    /// `W0` as a function of `z`.
    pub fn w0_z(&self, z: f64) -> f64 {
        let mut w = self.poly_part.eval(z);
        for t in &self.log_terms {
            w += match *t {
                LogTerm::Real { center, weight } => weight * (z - center).abs().ln(),
                LogTerm::ConjugatePair {
                    center,
                    width,
                    weight,
                } => weight * ((z - center).powi(2) + width * width).ln(),
            };
        }
        for t in &self.arctan_terms {
            w += t.weight * ((z - t.center) / t.scale).atan();
        }
        for t in &self.inverse_terms {
            w += t.weight / (z - t.center);
        }
        w
    }

    /// `dW0/dz` from the represented terms.
    pub fn dw0_dz(&self, z: f64) -> f64 {
        let mut d = self.poly_part.derivative().eval(z);
        for t in &self.log_terms {
            d += match *t {
                LogTerm::Real { center, weight } => weight / (z - center),
                LogTerm::ConjugatePair {
                    center,
                    width,
                    weight,
                } => 2.0 * weight * (z - center) / ((z - center).powi(2) + width * width),
            };
        }
        for t in &self.arctan_terms {
            let u = (z - t.center) / t.scale;
            d += t.weight / (t.scale * (1.0 + u * u));
        }
        for t in &self.inverse_terms {
            d -= t.weight / (z - t.center).powi(2);
        }
        d
    }

    pub fn w0_x(&self, x: f64) -> Result<f64> {
        Ok(self.w0_z(self.map.z_of_x(x)?))
    }

    fn check_poles(&self, z: f64, roots: &[f64]) -> Result<()> {
        for s in &self.spec.singularities {
            if z == s.location && s.exponent != 0.0 {
                return Err(Error::Pole(z));
            }
        }
        if roots.iter().any(|&r| r == z) {
            return Err(Error::Pole(z));
        }
        Ok(())
    }

    /// `W_N(x)` for the given roots.
    pub fn wn_value(&self, roots: &[f64], x: f64) -> Result<f64> {
        let z = self.map.z_of_x(x)?;
        self.check_poles(z, roots)?;
        Ok(self.wn_at_z(roots, z))
    }

    fn wn_at_z(&self, roots: &[f64], z: f64) -> f64 {
        let mut w = self.w0_z(z);
        for s in &self.spec.singularities {
            if s.exponent != 0.0 {
                w -= s.exponent * (z - s.location).abs().ln();
            }
        }
        for &r in roots {
            w -= (z - r).abs().ln();
        }
        w
    }

    /// Analytic `dW_N/dx = P(z)/z' - Σ mu_j z'/(z - a_j) - Σ z'/(z - z_k)`.
    pub fn wn_derivative(&self, roots: &[f64], x: f64) -> Result<f64> {
        let z = self.map.z_of_x(x)?;
        self.check_poles(z, roots)?;
        let dz = self.map.dz_dx(x)?;
        let mut d = self.spec.p.eval(z) / dz;
        for s in &self.spec.singularities {
            d -= s.exponent * dz / (z - s.location);
        }
        for &r in roots {
            d -= dz / (z - r);
        }
        Ok(d)
    }

    /// `phi_N(x) = exp(-W_N(x))` with the signed root product, in log form.
    /// Zeros are reported as `log_magnitude = -inf`.
    pub fn phi_value(&self, roots: &[f64], x: f64) -> Result<PhiValue> {
        let z = self.map.z_of_x(x)?;
        let sign = roots
            .iter()
            .map(|&r| if z < r { -1.0 } else { 1.0 })
            .product::<f64>();
        Ok(PhiValue {
            log_magnitude: -self.wn_at_z(roots, z),
            sign,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BranchSign, Singularity};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(q: &[f64], p: &[f64], s: &[(f64, f64)], n: usize) -> ModelSpec {
        ModelSpec::new(
            Poly::new(q.to_vec()),
            Poly::new(p.to_vec()),
            s.iter().map(|&(a, mu)| Singularity::new(a, mu)).collect(),
            n,
        )
        .unwrap()
    }

    #[test]
    fn harmonic_w0() {
        let b = 1.7;
        let pre = integrate_w0(&spec(&[1.0], &[0.0, b], &[], 0)).unwrap();
        assert_eq!(pre.poly_part.coeffs(), &[0.0, 0.0, b / 2.0]);
        assert!(pre.log_terms.is_empty());
        assert_abs_diff_eq!(pre.w0_x(1.3).unwrap(), b * 1.69 / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn sextic_w0() {
        let (a, b) = (0.8, -0.3);
        let pre = integrate_w0(&spec(&[0.0, 4.0], &[0.0, 2.0 * b, 2.0 * a], &[], 0)).unwrap();
        assert!(pre.log_terms.is_empty());
        assert_abs_diff_eq!(pre.poly_part.coeff(1), b / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pre.poly_part.coeff(2), a / 4.0, epsilon = 1e-15);
        let x: f64 = 1.4;
        let expect = a * x.powi(4) / 4.0 + b * x * x / 2.0;
        assert_abs_diff_eq!(pre.w0_x(x).unwrap(), expect, epsilon = 1e-14);
    }

    #[test]
    fn morse_w0() {
        let (big_a, big_b, alpha) = (5.0, 2.0, 1.3);
        let s = spec(
            &[0.0, 0.0, alpha * alpha],
            &[-alpha * big_b, alpha * big_a],
            &[],
            0,
        );
        let pre = integrate_w0(&s).unwrap();
        for x in [-1.0, 0.0, 0.7, 2.5] {
            let expect = big_a * x + big_b / alpha * (-alpha * x).exp();
            assert_abs_diff_eq!(pre.w0_x(x).unwrap(), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn wn_examples() {
        let pre = integrate_w0(&spec(&[1.0], &[0.0, 1.0], &[], 1)).unwrap();
        assert_abs_diff_eq!(pre.wn_value(&[], 0.9).unwrap(), 0.405, epsilon = 1e-15);
        assert_abs_diff_eq!(
            pre.wn_value(&[0.0], 2.0).unwrap(),
            2.0 - 2f64.ln(),
            epsilon = 1e-15
        );
        assert!(matches!(pre.wn_value(&[0.5], 0.5), Err(Error::Pole(_))));

        // morse with mu = -N on z = exp(-alpha x)
        let (big_a, alpha, n) = (5.0, 1.0, 2usize);
        let s = spec(
            &[0.0, 0.0, alpha * alpha],
            &[0.0, -alpha * big_a, alpha * alpha / 2.0],
            &[(0.0, -(n as f64))],
            n,
        )
        .with_branch(BranchSign::Minus);
        let pre = integrate_w0(&s).unwrap();
        let roots = [1.5, 6.0];
        for x in [-1.2, 0.3, 1.9] {
            let z = (-alpha * x).exp();
            let expect = big_a * x + 0.5 * (-alpha * x).exp() + n as f64 * z.ln()
                - roots.iter().map(|r| (z - r).abs().ln()).sum::<f64>();
            assert_abs_diff_eq!(pre.wn_value(&roots, x).unwrap(), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn phi_examples() {
        let pre = integrate_w0(&spec(&[1.0], &[0.0, 1.0], &[], 0)).unwrap();
        let v = pre.phi_value(&[], 0.0).unwrap();
        assert_eq!((v.log_magnitude, v.sign), (0.0, 1.0));

        let pre = integrate_w0(&spec(&[1.0], &[0.0, 1.0], &[], 1)).unwrap();
        for x in [-2.0f64, -0.3, 0.4, 1.9] {
            let v = pre.phi_value(&[0.0], x).unwrap();
            assert_abs_diff_eq!(v.value(), x * (-x * x / 2.0).exp(), epsilon = 1e-15);
        }
        assert_eq!(pre.phi_value(&[0.0], 0.0).unwrap().log_magnitude, f64::NEG_INFINITY);

        let pre = integrate_w0(&spec(&[0.0, 4.0], &[0.0, 0.0, 2.0], &[], 1)).unwrap();
        let z1 = std::f64::consts::FRAC_1_SQRT_2;
        for x in [-1.5f64, -0.5, 0.2, 1.1] {
            let v = pre.phi_value(&[z1], x).unwrap();
            let expect = (x * x - z1) * (-x.powi(4) / 4.0).exp();
            assert_abs_diff_eq!(v.value(), expect, epsilon = 1e-15);
        }
        // far tail stays representable
        let v = pre.phi_value(&[z1], 60.0).unwrap();
        assert!(v.log_magnitude.is_finite() && v.log_magnitude < -3.0e6);
    }

    #[test]
    fn derivative_of_represented_w0_is_p_over_q() {
        let cases: Vec<ModelSpec> = vec![
            spec(&[1.0], &[0.3, 1.0, 0.0, 0.5], &[], 0),
            spec(&[0.0, 4.0], &[0.5, 2.0, 2.0], &[], 0),
            spec(&[1.0, -3.0], &[1.0, 2.0, 0.5, -1.0], &[], 0),
            spec(&[0.0, 0.0, 1.0], &[-2.0, 5.0], &[], 0),
            spec(&[1.0, 2.0, 1.0], &[1.0, -1.0, 3.0, 0.2], &[], 0),
            spec(&[-1.0, 0.0, 2.0], &[0.5, 1.0, 1.0, 1.0], &[], 0),
            spec(&[1.0, 0.0, 1.0], &[0.5, 1.0, 1.0, 1.0], &[], 0),
            spec(&[0.0, 4.0, -4.0], &[0.3, -4.0, 4.0, 0.7], &[], 0),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for s in cases {
            let pre = integrate_w0(&s).unwrap();
            let roots = s.q.real_roots_low_degree().unwrap();
            let mut checked = 0;
            while checked < 100 {
                let z: f64 = rng.gen_range(-6.0..6.0);
                if roots.iter().any(|r| (z - r).abs() < 0.05) {
                    continue;
                }
                let direct = s.p.eval(z) / s.q.eval(z);
                let got = pre.dw0_dz(z);
                assert!(
                    (got - direct).abs() <= 1e-10 * direct.abs().max(1.0),
                    "{:?}: {got} vs {direct} at {z}",
                    s.q
                );
                checked += 1;
            }
        }
    }

    #[test]
    fn zeros_of_q_sit_on_the_image_boundary() {
        // log pole at the parabola vertex z = 1 is an endpoint, not interior
        let pre = integrate_w0(&spec(&[-4.0, 4.0], &[1.0, 1.0], &[], 0)).unwrap();
        assert_eq!(pre.log_terms.len(), 1);
        assert_eq!(pre.map().z_image().lo, 1.0);
        assert!(pre.w0_x(0.5).unwrap().is_finite());
    }

    #[test]
    fn analytic_derivative_matches_finite_differences() {
        let cases = vec![
            (spec(&[1.0], &[0.0, 1.0], &[], 2), vec![-0.7, 0.7], (-3.0, 3.0)),
            (
                spec(&[0.0, 4.0], &[0.0, 0.0, 2.0], &[], 1),
                vec![-0.7071],
                (0.2, 2.0),
            ),
            (
                spec(&[0.0, 0.0, 1.0], &[-2.0, 5.0], &[], 2),
                vec![0.3, 0.9],
                (-2.0, 2.0),
            ),
            (
                spec(&[0.0, 4.0, -4.0], &[0.0, -4.0, 4.0], &[(0.0, 0.25), (1.0, 0.25)], 1),
                vec![0.4],
                (0.15, 1.4),
            ),
            (
                spec(&[0.0, 4.0], &[0.0, 0.0, 2.0], &[(0.0, 0.3)], 1),
                vec![0.9],
                (0.2, 2.0),
            ),
        ];
        for (s, roots, (lo, hi)) in cases {
            let pre = integrate_w0(&s).unwrap();
            let h = 1e-5;
            for i in 0..40 {
                let x = lo + (hi - lo) * i as f64 / 39.0;
                let z = pre.map().z_of_x(x).unwrap();
                let near = roots
                    .iter()
                    .chain(s.singularities.iter().map(|s| &s.location))
                    .any(|&r| pre.map().preimages(r).iter().any(|xr| (xr - x).abs() < 0.1));
                if near || s.q.eval(z).abs() < 1e-3 {
                    continue;
                }
                let fd = (pre.wn_value(&roots, x + h).unwrap() - pre.wn_value(&roots, x - h).unwrap())
                    / (2.0 * h);
                let an = pre.wn_derivative(&roots, x).unwrap();
                assert!((fd - an).abs() < 1e-6 * an.abs().max(1.0), "x={x}: {fd} vs {an}");
            }
        }
    }

    #[test]
    fn phi_sign_changes_only_at_in_image_roots() {
        let pre = integrate_w0(&spec(&[0.0, 4.0], &[0.0, 0.0, 2.0], &[], 2)).unwrap();
        // one root inside x^2 >= 0, one outside
        let roots = [-0.9, 0.6];
        let xs: Vec<f64> = (0..=2000).map(|i| -3.0 + 6.0 * i as f64 / 2000.0).collect();
        let mut changes = Vec::new();
        for w in xs.windows(2) {
            let a = pre.phi_value(&roots, w[0]).unwrap().sign;
            let b = pre.phi_value(&roots, w[1]).unwrap().sign;
            if a != b {
                changes.push(0.5 * (w[0] + w[1]));
            }
        }
        assert_eq!(changes.len(), 2);
        for c in changes {
            assert!((c.abs() - 0.6f64.sqrt()).abs() < 3e-3);
        }
    }
}
