//! Reduction of `V_0` and `ΔV_N` to polynomial + pole form in `z`, and the
//! energy split `V_N = U - E + (root poles)`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bae::{raw_energy, BetheBranch};
use crate::coords::CoordinateMap;
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::poly::Poly;

/// Tolerance on root residues for a profile to be accepted.
pub const RESIDUE_TOL: f64 = 1e-10;
const SAME_LOCATION: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPole {
    pub location: f64,
    /// Coefficient of `1/(z - location)`.
    pub c1: f64,
    /// Coefficient of `1/(z - location)^2`.
    pub c2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootPole {
    pub location: f64,
    pub residue: f64,
}

/// `numerator / denominator` with a denominator free of real zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothRational {
    pub numerator: Poly,
    pub denominator: Poly,
}

/// Partial-fraction expansion in `z`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Pfe {
    pub poly: Poly,
    pub boundary_poles: Vec<BoundaryPole>,
    pub root_residues: Vec<RootPole>,
    pub smooth: Option<SmoothRational>,
}

fn same_location(a: f64, b: f64) -> bool {
    (a - b).abs() <= SAME_LOCATION * a.abs().max(b.abs()).max(1.0)
}

impl Pfe {
    pub fn polynomial(poly: Poly) -> Self {
        Pfe {
            poly,
            ..Pfe::default()
        }
    }

    pub fn add_pole(&mut self, location: f64, c1: f64, c2: f64) {
        match self
            .boundary_poles
            .iter_mut()
            .find(|p| same_location(p.location, location))
        {
            Some(p) => {
                p.c1 += c1;
                p.c2 += c2;
            }
            None => self.boundary_poles.push(BoundaryPole { location, c1, c2 }),
        }
    }

    pub fn add_root_pole(&mut self, location: f64, residue: f64) {
        match self
            .root_residues
            .iter_mut()
            .find(|p| same_location(p.location, location))
        {
            Some(p) => p.residue += residue,
            None => self.root_residues.push(RootPole { location, residue }),
        }
    }

    /// `(c1, c2)` at `location`, zero when no pole is recorded there.
    pub fn pole_at(&self, location: f64) -> (f64, f64) {
        self.boundary_poles
            .iter()
            .find(|p| same_location(p.location, location))
            .map_or((0.0, 0.0), |p| (p.c1, p.c2))
    }

    pub fn constant(&self) -> f64 {
        self.poly.coeff(0)
    }

    pub fn eval(&self, z: f64) -> f64 {
        let mut v = self.poly.eval(z);
        for p in &self.boundary_poles {
            let inv = 1.0 / (z - p.location);
            v += p.c1 * inv + p.c2 * inv * inv;
        }
        for r in &self.root_residues {
            v += r.residue / (z - r.location);
        }
        if let Some(s) = &self.smooth {
            v += s.numerator.eval(z) / s.denominator.eval(z);
        }
        v
    }

    pub fn sum(&self, other: &Pfe) -> Pfe {
        let mut out = self.clone();
        out.poly = &self.poly + &other.poly;
        for p in &other.boundary_poles {
            out.add_pole(p.location, p.c1, p.c2);
        }
        for r in &other.root_residues {
            out.add_root_pole(r.location, r.residue);
        }
        out.smooth = match (&self.smooth, &other.smooth) {
            (None, None) => None,
            (Some(s), None) | (None, Some(s)) => Some(s.clone()),
            (Some(a), Some(b)) if a.denominator == b.denominator => Some(SmoothRational {
                numerator: &a.numerator + &b.numerator,
                denominator: a.denominator.clone(),
            }),
            (Some(a), Some(b)) => Some(SmoothRational {
                numerator: &(&a.numerator * &b.denominator) + &(&b.numerator * &a.denominator),
                denominator: &a.denominator * &b.denominator,
            }),
        };
        out
    }

    pub fn max_root_residue(&self) -> f64 {
        self.root_residues
            .iter()
            .map(|r| r.residue.abs())
            .fold(0.0, f64::max)
    }

    /// Max coefficient-wise difference of the polynomial and boundary parts.
    pub fn coefficient_distance(&self, other: &Pfe) -> f64 {
        let n = self.poly.coeffs().len().max(other.poly.coeffs().len());
        let mut d = (0..n)
            .map(|i| (self.poly.coeff(i) - other.poly.coeff(i)).abs())
            .fold(0.0, f64::max);
        for p in self.boundary_poles.iter().chain(&other.boundary_poles) {
            let (a1, a2) = self.pole_at(p.location);
            let (b1, b2) = other.pole_at(p.location);
            d = d.max((a1 - b1).abs()).max((a2 - b2).abs());
        }
        if self.smooth != other.smooth {
            d = f64::INFINITY;
        }
        d
    }
}

impl fmt::Display for Pfe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)?;
        for p in &self.boundary_poles {
            if p.c1 != 0.0 {
                write!(f, " + ({})/(z - {})", p.c1, p.location)?;
            }
            if p.c2 != 0.0 {
                write!(f, " + ({})/(z - {})^2", p.c2, p.location)?;
            }
        }
        if let Some(s) = &self.smooth {
            write!(f, " + ({})/({})", s.numerator, s.denominator)?;
        }
        for r in &self.root_residues {
            write!(f, " + ({})/(z - {})", r.residue, r.location)?;
        }
        Ok(())
    }
}

/// `V_0 = P^2/Q - P' + P Q'/(2Q) - 2(P - Q'/4) Σ mu_j/(z - a_j)
///       + Q [Σ mu_j(mu_j - 1)/(z - a_j)^2 + 2 mu_1 mu_2/((z - a_1)(z - a_2))]`
pub fn v0_pfe(spec: &ModelSpec) -> Result<Pfe> {
    spec.check()?;
    let map = CoordinateMap::build(&spec.q, spec.anchor, spec.branch)?;
    let (p, q) = (&spec.p, &spec.q);
    let dq = q.derivative();
    let num = p * &(&p.scale(2.0) + &dq);
    let den = q.scale(2.0);
    let (quot, rem) = num.div_rem(&den)?;
    let mut pfe = Pfe::polynomial(&quot - &p.derivative());

    let mut q_poles = Vec::new();
    if !rem.is_zero() {
        match den.degree() {
            1 => {
                let r = -den.coeff(0) / den.coeff(1);
                q_poles.push((r, rem.eval(r) / den.coeff(1), 0.0));
            }
            2 => {
                let lead = den.coeff(2);
                let roots = q.real_roots_low_degree()?;
                if roots.len() == 2 && roots[0] == roots[1] {
                    let r = roots[0];
                    let (u, v) = (rem.coeff(0), rem.coeff(1));
                    q_poles.push((r, v / lead, (u + v * r) / lead));
                } else if roots.len() == 2 {
                    for (ri, rj) in [(roots[0], roots[1]), (roots[1], roots[0])] {
                        q_poles.push((ri, rem.eval(ri) / (lead * (ri - rj)), 0.0));
                    }
                } else {
                    pfe.smooth = Some(SmoothRational {
                        numerator: rem,
                        denominator: den,
                    });
                }
            }
            _ => {}
        }
    }
    for (r, c1, c2) in q_poles {
        let declared = spec
            .singularities
            .iter()
            .any(|s| same_location(s.location, r));
        if !declared && map.z_image().contains_open(r) && (c1 != 0.0 || c2 != 0.0) {
            return Err(Error::ModelInconsistency(format!(
                "pole of V_0 at z = {r} lies inside the coordinate image"
            )));
        }
        pfe.add_pole(r, c1, c2);
    }

    let core = p - &dq.scale(0.25);
    let q2 = spec.q2();
    for s in &spec.singularities {
        let (a, mu) = (s.location, s.exponent);
        if mu == 0.0 {
            continue;
        }
        pfe.poly = &pfe.poly - &core.divided_difference(a).scale(2.0 * mu);
        pfe.add_pole(a, -2.0 * mu * core.eval(a), 0.0);
        let w = mu * (mu - 1.0);
        pfe.poly = &pfe.poly + &Poly::constant(w * q2);
        pfe.add_pole(a, w * dq.eval(a), w * q.eval(a));
    }
    if let [s1, s2] = spec.singularities.as_slice() {
        let w = 2.0 * s1.exponent * s2.exponent;
        if w != 0.0 {
            let (a1, a2) = (s1.location, s2.location);
            pfe.poly = &pfe.poly + &Poly::constant(w * q2);
            pfe.add_pole(a1, w * q.eval(a1) / (a1 - a2), 0.0);
            pfe.add_pole(a2, w * q.eval(a2) / (a2 - a1), 0.0);
        }
    }
    Ok(pfe)
}

/// `ΔV_N = -2(P - Q'/4) Σ_k 1/(z - z_k)
///        + Q [Σ_{k≠l} 1/((z - z_k)(z - z_l)) + 2 Σ_j Σ_k mu_j/((z - a_j)(z - z_k))]`
pub fn delta_v_pfe(spec: &ModelSpec, roots: &[f64]) -> Pfe {
    let (p, q) = (&spec.p, &spec.q);
    let core = p - &q.derivative().scale(0.25);
    let n = roots.len() as f64;
    let q2 = spec.q2();

    let mut poly = Poly::constant(q2 * n * (n - 1.0) + 2.0 * q2 * n * spec.exponent_sum());
    for &zk in roots {
        poly = &poly - &core.divided_difference(zk).scale(2.0);
    }
    let mut pfe = Pfe::polynomial(poly);

    for s in &spec.singularities {
        if s.exponent == 0.0 || roots.is_empty() {
            continue;
        }
        let qa = q.eval(s.location);
        let sum: f64 = roots.iter().map(|zk| 1.0 / (s.location - zk)).sum();
        pfe.add_pole(s.location, 2.0 * s.exponent * qa * sum, 0.0);
    }

    for (k, &zk) in roots.iter().enumerate() {
        let qk = q.eval(zk);
        let mut d = -2.0 * core.eval(zk);
        for (l, &zl) in roots.iter().enumerate() {
            if l != k {
                d += 2.0 * qk / (zk - zl);
            }
        }
        for s in &spec.singularities {
            d += 2.0 * s.exponent * qk / (zk - s.location);
        }
        pfe.add_root_pole(zk, d);
    }
    pfe
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueCheck {
    pub pass: bool,
    pub max_residue: f64,
}

pub fn check_residues(pfe: &Pfe, tol: f64) -> ResidueCheck {
    let max_residue = pfe.max_root_residue();
    ResidueCheck {
        pass: max_residue < tol,
        max_residue,
    }
}

/// Zero-point convention for reported energies.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceShift {
    /// `E = -(constant of ΔV_N)`, `U` as constructed.
    #[default]
    Raw,
    /// Shift `U` and `E` together so the constant term of `U` equals the value.
    UConstant(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialProfile {
    /// Reported potential, root poles removed, shift applied.
    pub u: Pfe,
    pub energy: f64,
    pub raw_energy: f64,
    pub shift: f64,
    pub branch: BetheBranch,
    /// Root-pole part of `ΔV_N`; empty up to solver tolerance.
    pub root_part: Pfe,
}

impl PotentialProfile {
    /// `U - E + root part`, which equals `V_N`.
    pub fn reconstruct_vn(&self, z: f64) -> f64 {
        self.u.eval(z) - self.energy + self.root_part.eval(z)
    }
}

pub fn split_energy(
    spec: &ModelSpec,
    branch: &BetheBranch,
    shift: ReferenceShift,
) -> Result<PotentialProfile> {
    let v0 = v0_pfe(spec)?;
    let dv = delta_v_pfe(spec, &branch.roots);
    let check = check_residues(&dv, RESIDUE_TOL);
    if !check.pass {
        return Err(Error::ModelInconsistency(format!(
            "root residues do not cancel (max {:e})",
            check.max_residue
        )));
    }
    let raw = -dv.constant();
    let smooth_dv = Pfe {
        poly: &dv.poly - &Poly::constant(dv.constant()),
        boundary_poles: dv.boundary_poles.clone(),
        ..Pfe::default()
    };
    let mut u = v0.sum(&smooth_dv);
    let shift_value = match shift {
        ReferenceShift::Raw => 0.0,
        ReferenceShift::UConstant(c) => c - u.constant(),
    };
    u.poly = &u.poly + &Poly::constant(shift_value);
    debug_assert!((raw - raw_energy(spec, &branch.roots)).abs() <= 1e-9 * raw.abs().max(1.0));
    Ok(PotentialProfile {
        u,
        energy: raw + shift_value,
        raw_energy: raw,
        shift: shift_value,
        branch: branch.clone(),
        root_part: Pfe {
            root_residues: dv.root_residues,
            ..Pfe::default()
        },
    })
}

/// `V_0` evaluated term by term from its defining expression.
pub fn v0_direct(spec: &ModelSpec, z: f64) -> f64 {
    let (p, q) = (spec.p.eval(z), spec.q.eval(z));
    let dp = spec.p.derivative().eval(z);
    let dq = spec.q.derivative().eval(z);
    let mut v = p * p / q - dp + p * dq / (2.0 * q);
    let s: f64 = spec
        .singularities
        .iter()
        .map(|sg| sg.exponent / (z - sg.location))
        .sum();
    v -= 2.0 * (p - dq / 4.0) * s;
    let mut bracket: f64 = spec
        .singularities
        .iter()
        .map(|sg| sg.exponent * (sg.exponent - 1.0) / (z - sg.location).powi(2))
        .sum();
    if let [s1, s2] = spec.singularities.as_slice() {
        bracket += 2.0 * s1.exponent * s2.exponent / ((z - s1.location) * (z - s2.location));
    }
    v + q * bracket
}

/// `ΔV_N` evaluated term by term from its defining expression.
pub fn delta_v_direct(spec: &ModelSpec, roots: &[f64], z: f64) -> f64 {
    let (p, q) = (spec.p.eval(z), spec.q.eval(z));
    let dq = spec.q.derivative().eval(z);
    let r: f64 = roots.iter().map(|zk| 1.0 / (z - zk)).sum();
    let s: f64 = spec
        .singularities
        .iter()
        .map(|sg| sg.exponent / (z - sg.location))
        .sum();
    let mut pairs = 0.0;
    for (k, zk) in roots.iter().enumerate() {
        for (l, zl) in roots.iter().enumerate() {
            if k != l {
                pairs += 1.0 / ((z - zk) * (z - zl));
            }
        }
    }
    -2.0 * (p - dq / 4.0) * r + q * (pairs + 2.0 * s * r)
}

/// `V_N = Q g^2 - Q' g / 2 - Q g'` with `g = dW_N/dz = P/Q - Σ mu_j/(z - a_j) - Σ 1/(z - z_k)`.
pub fn vn_from_prepotential(spec: &ModelSpec, roots: &[f64], z: f64) -> f64 {
    let (p, q) = (spec.p.eval(z), spec.q.eval(z));
    let dp = spec.p.derivative().eval(z);
    let dq = spec.q.derivative().eval(z);
    let mut g = p / q;
    let mut dg = (dp * q - p * dq) / (q * q);
    for sg in &spec.singularities {
        g -= sg.exponent / (z - sg.location);
        dg += sg.exponent / (z - sg.location).powi(2);
    }
    for zk in roots {
        g -= 1.0 / (z - zk);
        dg += 1.0 / (z - zk).powi(2);
    }
    q * g * g - dq * g / 2.0 - q * dg
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    pub pass: bool,
    /// Worst relative error for numerators `1`, `z`, `z^2`.
    pub max_rel_error: [f64; 3],
}

/// Checks, at the points `zs`,
/// `Σ_{k≠l} z^j/((z - z_k)(z - z_l)) = 2 Σ_{k≠l} z_k^j/((z - z_k)(z_k - z_l)) + [j = 2] N(N-1)`
/// for `j = 0, 1, 2`.
pub fn identity_check_at(roots: &[f64], zs: &[f64], tol: f64) -> IdentityReport {
    let n = roots.len();
    let mut worst = [0.0f64; 3];
    for &z in zs {
        for (j, w) in worst.iter_mut().enumerate() {
            let mut lhs = 0.0;
            let mut rhs = 0.0;
            let mut scale = 0.0f64;
            for k in 0..n {
                for l in 0..n {
                    if k == l {
                        continue;
                    }
                    let a = z.powi(j as i32) / ((z - roots[k]) * (z - roots[l]));
                    let b = 2.0 * roots[k].powi(j as i32) / ((z - roots[k]) * (roots[k] - roots[l]));
                    lhs += a;
                    rhs += b;
                    scale = scale.max(a.abs()).max(b.abs());
                }
            }
            if j == 2 {
                let c = (n * n.saturating_sub(1)) as f64;
                rhs += c;
                scale = scale.max(c);
            }
            let err = if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale };
            *w = w.max(err);
        }
    }
    IdentityReport {
        pass: worst.iter().all(|&e| e < tol),
        max_rel_error: worst,
    }
}

/// [`identity_check_at`] on 20 pseudo-random points away from the roots.
pub fn identity_check(roots: &[f64], tol: f64) -> Result<IdentityReport> {
    let mut sorted = roots.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[1] - w[0] == 0.0) {
        return Err(Error::InvalidParameter("roots must be pairwise distinct".into()));
    }
    let (lo, hi) = match (sorted.first(), sorted.last()) {
        (Some(&a), Some(&b)) => (a - 2.0, b + 2.0),
        _ => (-2.0, 2.0),
    };
    let seed = roots.iter().fold(0x5eed_u64, |h, r| h.rotate_left(7) ^ r.to_bits());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut zs = Vec::with_capacity(20);
    while zs.len() < 20 {
        let z: f64 = rng.gen_range(lo..hi);
        if sorted.iter().all(|r| (z - r).abs() > 1e-3) {
            zs.push(z);
        }
    }
    Ok(identity_check_at(roots, &zs, tol))
}
