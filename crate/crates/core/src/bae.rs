//! Root systems `{z_k}` that cancel every simple pole of the order-N
//! potential at the roots.
//!
//! With `S_k = Σ_{l≠k} 1/(z_k - z_l)` the residual is
//!
//! `F_k = P(z_k) - Q'(z_k)/4 - Q(z_k) [S_k + Σ_j mu_j/(z_k - a_j)]`
//!
//! and vanishes exactly when the residue of the potential at `z_k` does.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coords::CoordinateMap;
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::poly::{chebyshev_nodes, hermite_zeros, laguerre_zeros, Poly};

pub const SOLVER_TOL: f64 = 1e-12;
pub const COLLISION_TOL: f64 = 1e-8;
pub const DEDUP_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 200;
pub const DEFAULT_ATTEMPTS: usize = 48;

const MAX_HALVINGS: usize = 40;
const MAX_CONDITION: f64 = 1e15;
/// Newton steps below this, relative to `1 + max|z|`, end the polishing phase.
const STEP_TOL: f64 = 1e-13;
/// Imaginary parts below this mark a complex branch as real.
const REAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Empty,
    User,
    Hermite,
    Laguerre,
    Reciprocal,
    Reflected,
    Chebyshev,
    Random,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Origin::Empty => "empty",
            Origin::User => "user",
            Origin::Hermite => "hermite",
            Origin::Laguerre => "laguerre",
            Origin::Reciprocal => "reciprocal",
            Origin::Reflected => "reflected",
            Origin::Chebyshev => "chebyshev",
            Origin::Random => "random",
        };
        f.write_str(s)
    }
}

/// One accepted solution of the root equations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheBranch {
    /// Sorted ascending.
    pub roots: Vec<f64>,
    pub residual_norm: f64,
    pub newton_iters: usize,
    pub origin: Origin,
    /// Raw energy, before any catalog reference shift.
    pub energy: f64,
}

impl BetheBranch {
    /// Wraps externally supplied roots after checking them against `spec`.
    pub fn from_roots(spec: &ModelSpec, mut roots: Vec<f64>, origin: Origin) -> Result<Self> {
        if roots.len() != spec.n {
            return Err(Error::InvalidParameter(format!(
                "expected {} roots, got {}",
                spec.n,
                roots.len()
            )));
        }
        roots.sort_by(f64::total_cmp);
        let f = residual(spec, &roots)?;
        Ok(BetheBranch {
            residual_norm: max_abs(&f),
            newton_iters: 0,
            origin,
            energy: raw_energy(spec, &roots),
            roots,
        })
    }
}

/// Solution of the root equations in complex arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexBranch {
    pub roots: Vec<Complex64>,
    pub residual_norm: f64,
    pub newton_iters: usize,
    pub origin: Origin,
    pub energy: Complex64,
}

impl ComplexBranch {
    pub fn is_real(&self) -> bool {
        self.roots.iter().all(|z| z.im.abs() < REAL_TOL)
    }

    /// Real projection, available only for real branches.
    pub fn to_real(&self) -> Option<Vec<f64>> {
        self.is_real().then(|| {
            let mut r: Vec<f64> = self.roots.iter().map(|z| z.re).collect();
            r.sort_by(f64::total_cmp);
            r
        })
    }
}

fn eval_in<T: ComplexField<RealField = f64> + Copy>(p: &Poly, z: T) -> T {
    p.coeffs()
        .iter()
        .rev()
        .fold(T::zero(), |acc, &c| acc * z + T::from_real(c))
}

fn check_config<T: ComplexField<RealField = f64> + Copy>(
    spec: &ModelSpec,
    roots: &[T],
) -> Result<()> {
    for (i, &zi) in roots.iter().enumerate() {
        for (j, &zj) in roots.iter().enumerate().skip(i + 1) {
            if (zi - zj).modulus() < COLLISION_TOL {
                return Err(Error::Collision(i, j, COLLISION_TOL));
            }
        }
        for s in &spec.singularities {
            if s.exponent != 0.0 && (zi - T::from_real(s.location)).modulus() < COLLISION_TOL {
                return Err(Error::Pole(s.location));
            }
        }
    }
    Ok(())
}

fn residual_in<T: ComplexField<RealField = f64> + Copy>(spec: &ModelSpec, roots: &[T]) -> Vec<T> {
    let dq = spec.q.derivative();
    let quarter = T::from_real(0.25);
    roots
        .iter()
        .enumerate()
        .map(|(k, &zk)| {
            let mut sum = T::zero();
            for (l, &zl) in roots.iter().enumerate() {
                if l != k {
                    sum += (zk - zl).recip();
                }
            }
            for s in &spec.singularities {
                sum += T::from_real(s.exponent) / (zk - T::from_real(s.location));
            }
            eval_in(&spec.p, zk) - eval_in(&dq, zk) * quarter - eval_in(&spec.q, zk) * sum
        })
        .collect()
}

fn jacobian_in<T: ComplexField<RealField = f64> + Copy>(
    spec: &ModelSpec,
    roots: &[T],
) -> DMatrix<T> {
    let n = roots.len();
    let dp = spec.p.derivative();
    let dq = spec.q.derivative();
    let half_q2 = T::from_real(0.5 * spec.q2());
    DMatrix::from_fn(n, n, |k, j| {
        let zk = roots[k];
        let qk = eval_in(&spec.q, zk);
        if j != k {
            let d = zk - roots[j];
            return -qk / (d * d);
        }
        let mut s1 = T::zero();
        let mut s2 = T::zero();
        for (l, &zl) in roots.iter().enumerate() {
            if l != k {
                let inv = (zk - zl).recip();
                s1 += inv;
                s2 += inv * inv;
            }
        }
        for s in &spec.singularities {
            let inv = (zk - T::from_real(s.location)).recip();
            let mu = T::from_real(s.exponent);
            s1 += mu * inv;
            s2 += mu * inv * inv;
        }
        eval_in(&dp, zk) - half_q2 - eval_in(&dq, zk) * s1 + qk * s2
    })
}

/// Energy constant `-(constant term of the polynomial part of ΔV_N)`:
/// `2 Σ_k (p1 + p2 z_k + p3 z_k^2) - q2 N^2 - 2 q2 N Σ_j mu_j`.
pub fn raw_energy_in<T: ComplexField<RealField = f64> + Copy>(spec: &ModelSpec, roots: &[T]) -> T {
    let (p1, p2, p3) = (spec.p.coeff(1), spec.p.coeff(2), spec.p.coeff(3));
    let n = roots.len() as f64;
    let mut e = T::zero();
    for &z in roots {
        e += T::from_real(p1) + z * T::from_real(p2) + z * z * T::from_real(p3);
    }
    e * T::from_real(2.0) - T::from_real(spec.q2() * n * n + 2.0 * spec.q2() * n * spec.exponent_sum())
}

pub fn raw_energy(spec: &ModelSpec, roots: &[f64]) -> f64 {
    raw_energy_in(spec, roots)
}

pub fn residual(spec: &ModelSpec, roots: &[f64]) -> Result<Vec<f64>> {
    check_config(spec, roots)?;
    Ok(residual_in(spec, roots))
}

pub fn jacobian(spec: &ModelSpec, roots: &[f64]) -> Result<DMatrix<f64>> {
    check_config(spec, roots)?;
    Ok(jacobian_in(spec, roots))
}

pub fn residual_complex(spec: &ModelSpec, roots: &[Complex64]) -> Result<Vec<Complex64>> {
    check_config(spec, roots)?;
    Ok(residual_in(spec, roots))
}

pub fn jacobian_complex(spec: &ModelSpec, roots: &[Complex64]) -> Result<DMatrix<Complex64>> {
    check_config(spec, roots)?;
    Ok(jacobian_in(spec, roots))
}

fn max_abs<T: ComplexField<RealField = f64> + Copy>(v: &[T]) -> f64 {
    v.iter().map(|x| x.modulus()).fold(0.0, f64::max)
}

struct Converged<T> {
    roots: Vec<T>,
    residual_norm: f64,
    iterations: usize,
}

fn newton<T: ComplexField<RealField = f64> + Copy>(
    spec: &ModelSpec,
    init: &[T],
    max_iter: usize,
    tol: f64,
) -> Result<Converged<T>> {
    let n = init.len();
    if check_config(spec, init).is_err() {
        return Err(Error::InvalidParameter(
            "initial roots must be pairwise distinct and away from singularities".into(),
        ));
    }
    let mut z = init.to_vec();
    let mut f = residual_in(spec, &z);
    let mut norm = max_abs(&f);
    let mut last_step = f64::INFINITY;
    // Below `tol` the iteration keeps polishing until the step is negligible,
    // so clustered (degenerate) roots are driven together instead of being
    // accepted at scattered points where |F| first drops below `tol`.
    let done = |z: Vec<T>, norm: f64, it: usize| {
        Ok(Converged {
            roots: z,
            residual_norm: norm,
            iterations: it,
        })
    };
    for it in 0..=max_iter {
        if !norm.is_finite() {
            return Err(Error::NonConvergence {
                iterations: it,
                residual: norm,
            });
        }
        let scale = 1.0 + max_abs(&z);
        if norm < tol && (last_step <= STEP_TOL * scale || norm == 0.0) {
            return done(z, norm, it);
        }
        if it == max_iter {
            if norm < tol {
                return done(z, norm, it);
            }
            break;
        }
        let lu = jacobian_in(spec, &z).lu();
        let diag: Vec<f64> = (0..n).map(|i| lu.u()[(i, i)].modulus()).collect();
        let (dmax, dmin) = diag
            .iter()
            .fold((0.0f64, f64::INFINITY), |(a, b), &d| (a.max(d), b.min(d)));
        let condition = dmax / dmin;
        if !condition.is_finite() || condition > MAX_CONDITION {
            if norm < tol {
                return done(z, norm, it);
            }
            return Err(Error::SingularJacobian { condition });
        }
        let rhs = DVector::from_iterator(n, f.iter().map(|&v| -v));
        let step = lu.solve(&rhs).ok_or(Error::SingularJacobian { condition })?;

        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<T> = z
                .iter()
                .zip(step.iter())
                .map(|(&zi, &di)| zi + di * T::from_real(lambda))
                .collect();
            if check_config(spec, &trial).is_ok() {
                let ft = residual_in(spec, &trial);
                let nt = max_abs(&ft);
                if nt < norm {
                    last_step = max_abs(step.as_slice()) * lambda;
                    z = trial;
                    f = ft;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            if norm < tol {
                return done(z, norm, it);
            }
            return Err(Error::NonConvergence {
                iterations: it + 1,
                residual: norm,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual: norm,
    })
}

/// Damped Newton from `init`.
pub fn solve(spec: &ModelSpec, init: &[f64], max_iter: usize, tol: f64) -> Result<BetheBranch> {
    solve_tagged(spec, init, max_iter, tol, Origin::User)
}

fn solve_tagged(
    spec: &ModelSpec,
    init: &[f64],
    max_iter: usize,
    tol: f64,
    origin: Origin,
) -> Result<BetheBranch> {
    if init.len() != spec.n {
        return Err(Error::InvalidParameter(format!(
            "expected {} initial roots, got {}",
            spec.n,
            init.len()
        )));
    }
    if init.is_empty() {
        return Ok(BetheBranch {
            roots: Vec::new(),
            residual_norm: 0.0,
            newton_iters: 0,
            origin: Origin::Empty,
            energy: raw_energy(spec, &[]),
        });
    }
    let c = newton(spec, init, max_iter, tol)?;
    let mut roots = c.roots;
    roots.sort_by(f64::total_cmp);
    Ok(BetheBranch {
        energy: raw_energy(spec, &roots),
        roots,
        residual_norm: c.residual_norm,
        newton_iters: c.iterations,
        origin,
    })
}

pub fn solve_complex(
    spec: &ModelSpec,
    init: &[Complex64],
    max_iter: usize,
    tol: f64,
) -> Result<ComplexBranch> {
    if init.len() != spec.n {
        return Err(Error::InvalidParameter(format!(
            "expected {} initial roots, got {}",
            spec.n,
            init.len()
        )));
    }
    let c = newton(spec, init, max_iter, tol)?;
    let mut roots = c.roots;
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ComplexBranch {
        energy: raw_energy_in(spec, &roots),
        roots,
        residual_norm: c.residual_norm,
        newton_iters: c.iterations,
        origin: Origin::User,
    })
}

/// Multi-start settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub tol: f64,
    /// Number of pseudo-random starts on top of the classical ones.
    pub attempts: usize,
    pub max_iter: usize,
    /// Defaults to the model fingerprint.
    pub seed: Option<u64>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            tol: SOLVER_TOL,
            attempts: DEFAULT_ATTEMPTS,
            max_iter: DEFAULT_MAX_ITER,
            seed: None,
        }
    }
}

fn attempt_rng(seed: u64, attempt: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attempt as u64);
    rng
}

fn distinct(v: &[f64]) -> bool {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s.windows(2).all(|w| w[1] - w[0] > 1e-6)
}

/// Characteristic center and finite ends used to place starts.
fn classical_seeds(spec: &ModelSpec, map: &CoordinateMap) -> Vec<(Origin, Vec<f64>)> {
    let n = spec.n;
    let image = map.z_image();
    let scales = [0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];
    let mut out = Vec::new();
    let push = |out: &mut Vec<(Origin, Vec<f64>)>, o: Origin, v: Vec<f64>| {
        if distinct(&v) && v.iter().all(|x| x.is_finite()) {
            out.push((o, v));
        }
    };

    let mut centers = vec![0.0];
    if spec.p.degree() >= 1 && spec.p.coeff(1) != 0.0 {
        centers.push(-spec.p.coeff(0) / spec.p.coeff(1));
    }
    if image.lo.is_finite() {
        centers.push(image.lo);
    }
    if image.hi.is_finite() {
        centers.push(image.hi);
    }

    let herm = hermite_zeros(n);
    for &c in &centers {
        for &s in &scales {
            push(&mut out, Origin::Hermite, herm.iter().map(|h| c + s * h).collect());
        }
    }

    let ends: Vec<(f64, f64)> = [(image.lo, 1.0), (image.hi, -1.0)]
        .into_iter()
        .filter(|(e, _)| e.is_finite())
        .collect();
    let ends = if ends.is_empty() { vec![(0.0, 1.0), (0.0, -1.0)] } else { ends };
    for beta in [0.0, 2.0, 6.0] {
        let lag = laguerre_zeros(n, beta).unwrap_or_default();
        for &(e, dir) in &ends {
            for &s in &scales {
                push(&mut out, Origin::Laguerre, lag.iter().map(|l| e + dir * s * l).collect());
                push(&mut out, Origin::Reflected, lag.iter().map(|l| e - dir * s * l).collect());
                push(&mut out, Origin::Reciprocal, lag.iter().map(|l| e + dir * s / l).collect());
            }
        }
    }

    if image.is_bounded() {
        let w = image.width();
        for (lo, hi) in [
            (image.lo, image.hi),
            (image.lo - w, image.hi + w),
            (image.lo - w, image.lo),
            (image.hi, image.hi + w),
        ] {
            push(&mut out, Origin::Chebyshev, chebyshev_nodes(n, lo, hi));
        }
    }
    out
}

fn random_seed(spec: &ModelSpec, map: &CoordinateMap, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let image = map.z_image();
    let base = match (image.lo.is_finite(), image.hi.is_finite()) {
        (true, true) => 0.5 * (image.lo + image.hi),
        (true, false) => image.lo,
        (false, true) => image.hi,
        (false, false) => 0.0,
    };
    let span = if image.is_bounded() { image.width() } else { 1.0 };
    (0..spec.n)
        .map(|_| {
            let mag = span * 10f64.powf(rng.gen_range(-1.5..1.5));
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            base + sign * mag
        })
        .collect()
}

fn same_roots(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < DEDUP_TOL)
}

fn merge(branches: &mut Vec<BetheBranch>, b: BetheBranch) {
    if let Some(existing) = branches.iter_mut().find(|e| same_roots(&e.roots, &b.roots)) {
        if b.residual_norm < existing.residual_norm {
            *existing = b;
        }
    } else {
        branches.push(b);
    }
}

fn branch_order(a: &BetheBranch, b: &BetheBranch) -> Ordering {
    a.energy.total_cmp(&b.energy).then_with(|| {
        a.roots
            .iter()
            .zip(&b.roots)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// Distinct real branches from classical and pseudo-random starts, sorted
/// by raw energy.
pub fn enumerate_branches(spec: &ModelSpec, tol: f64, attempts: usize) -> Result<Vec<BetheBranch>> {
    enumerate_branches_with(
        spec,
        &SearchOptions {
            tol,
            attempts,
            ..SearchOptions::default()
        },
    )
}

pub fn enumerate_branches_with(spec: &ModelSpec, opts: &SearchOptions) -> Result<Vec<BetheBranch>> {
    spec.check()?;
    if spec.n == 0 {
        return Ok(vec![solve_tagged(spec, &[], 0, opts.tol, Origin::Empty)?]);
    }
    let map = CoordinateMap::build(&spec.q, spec.anchor, spec.branch)?;
    let seed = opts.seed.unwrap_or_else(|| spec.fingerprint());

    let mut starts = classical_seeds(spec, &map);
    for attempt in 0..opts.attempts {
        let mut rng = attempt_rng(seed, attempt);
        let v = random_seed(spec, &map, &mut rng);
        if distinct(&v) {
            starts.push((Origin::Random, v));
        }
    }

    let mut branches = Vec::new();
    for (origin, init) in starts {
        if let Ok(b) = solve_tagged(spec, &init, opts.max_iter, opts.tol, origin) {
            merge(&mut branches, b);
        }
    }
    branches.sort_by(branch_order);
    Ok(branches)
}

/// Complex-arithmetic search. Real branches come back flagged through
/// [`ComplexBranch::is_real`].
pub fn enumerate_complex(spec: &ModelSpec, opts: &SearchOptions) -> Result<Vec<ComplexBranch>> {
    spec.check()?;
    if spec.n == 0 {
        return Ok(vec![ComplexBranch {
            roots: Vec::new(),
            residual_norm: 0.0,
            newton_iters: 0,
            origin: Origin::Empty,
            energy: Complex64::new(raw_energy(spec, &[]), 0.0),
        }]);
    }
    let map = CoordinateMap::build(&spec.q, spec.anchor, spec.branch)?;
    let seed = opts.seed.unwrap_or_else(|| spec.fingerprint());
    let mut out: Vec<ComplexBranch> = Vec::new();
    let starts = classical_seeds(spec, &map);
    for (attempt, (origin, init)) in starts.into_iter().enumerate() {
        let mut rng = attempt_rng(seed ^ 0x9e37_79b9_7f4a_7c15, attempt);
        let z: Vec<Complex64> = init
            .iter()
            .map(|&x| Complex64::new(x, rng.gen_range(-0.5..0.5) * x.abs().max(0.5)))
            .collect();
        if let Ok(mut b) = solve_complex(spec, &z, opts.max_iter, opts.tol) {
            b.origin = origin;
            let dup = out.iter().any(|e| {
                e.roots
                    .iter()
                    .zip(&b.roots)
                    .all(|(x, y)| (x - y).norm() < DEDUP_TOL)
            });
            if !dup {
                out.push(b);
            }
        }
    }
    out.sort_by(|a, b| {
        a.energy
            .re
            .total_cmp(&b.energy.re)
            .then(a.energy.im.total_cmp(&b.energy.im))
    });
    Ok(out)
}
