//! Finite-difference certification of `(-d^2/dx^2 + U - E) phi_N = 0`,
//! finite-difference spectra, node counts and normalizability.

use serde::{Deserialize, Serialize};

use crate::coords::Interval;
use crate::error::{Error, Result};
use crate::pipeline::Model;
use crate::poly::{tridiag_eigenvalues, Tridiag};
use crate::potential::PotentialProfile;

/// `phi` is truncated where it has dropped this far below its maximum (log scale).
pub const TRUNCATION_DEPTH: f64 = 40.0;
pub const DEFAULT_GRID_POINTS: usize = 4000;
pub const RESIDUAL_TOL: f64 = 1e-6;
pub const SPECTRUM_TOL: f64 = 1e-3;
/// Downgraded tolerance for spectra of potentials singular at an end.
pub const SINGULAR_SPECTRUM_TOL: f64 = 1e-2;
const NODE_EXCLUSION: f64 = 10.0;
const SINGULAR_INSET_MIN: f64 = 1e-3;
const MAX_EXTENT: f64 = 1e4;

/// Uniform grid with node exclusion zones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    points: Vec<f64>,
    h: f64,
    excluded: Vec<Interval>,
}

impl Grid {
    /// `n` points from `lo` to `hi` inclusive.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Grid(format!("invalid bounds [{lo}, {hi}]")));
        }
        if n < 3 {
            return Err(Error::Grid(format!("need at least 3 points, got {n}")));
        }
        let h = (hi - lo) / (n - 1) as f64;
        let points = (0..n).map(|i| lo + h * i as f64).collect();
        Ok(Grid {
            points,
            h,
            excluded: Vec::new(),
        })
    }

    /// Box adapted to `phi_N` for the given roots: unbounded ends are cut
    /// where `phi` has decayed by [`TRUNCATION_DEPTH`], singular finite ends
    /// are inset by `max(10h, 1e-3)` and regular finite ends by `h`.
    /// Unbounded ends are then widened by `pad` times the box width.
    /// Nodes of `phi` get exclusion zones of radius `10h`.
    pub fn for_branch(model: &Model, roots: &[f64], n: usize, pad: f64) -> Result<Self> {
        let domain = model.domain();
        let (mut lo, mut hi) = truncation_box(model, roots)?;
        let width = hi - lo;
        if !domain.lo.is_finite() {
            lo -= pad * width;
        }
        if !domain.hi.is_finite() {
            hi += pad * width;
        }
        let h0 = (hi - lo) / (n.max(3) - 1) as f64;
        let (sing_lo, sing_hi) = model.singular_ends();
        let inset = |singular: bool| {
            if singular {
                (NODE_EXCLUSION * h0).max(SINGULAR_INSET_MIN)
            } else {
                h0
            }
        };
        if domain.lo.is_finite() {
            lo = domain.lo + inset(sing_lo);
        }
        if domain.hi.is_finite() {
            hi = domain.hi - inset(sing_hi);
        }
        let mut grid = Grid::uniform(lo, hi, n)?;
        let radius = NODE_EXCLUSION * grid.h;
        for &zk in roots {
            for x in model.map().preimages(zk) {
                if x > lo - radius && x < hi + radius {
                    grid.excluded.push(Interval::new(x - radius, x + radius));
                }
            }
        }
        Ok(grid)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn bounds(&self) -> Interval {
        Interval::new(self.points[0], self.points[self.points.len() - 1])
    }

    pub fn excluded(&self) -> &[Interval] {
        &self.excluded
    }

    pub fn exclude(&mut self, zone: Interval) {
        self.excluded.push(zone);
    }

    pub fn is_excluded(&self, x: f64) -> bool {
        self.excluded.iter().any(|z| z.contains_open(x))
    }
}

fn log_phi(model: &Model, roots: &[f64], x: f64) -> f64 {
    model
        .prepotential()
        .phi_value(roots, x)
        .map(|v| v.log_magnitude)
        .unwrap_or(f64::NEG_INFINITY)
}

/// Finite part of the domain where `phi_N` is within [`TRUNCATION_DEPTH`] of its maximum.
fn truncation_box(model: &Model, roots: &[f64]) -> Result<(f64, f64)> {
    let d = model.domain();
    let start = match (d.lo.is_finite(), d.hi.is_finite()) {
        (true, true) => 0.5 * (d.lo + d.hi),
        (true, false) => d.lo + 1.0,
        (false, true) => d.hi - 1.0,
        (false, false) => model.spec().anchor.map_or(0.0, |a| a.x0),
    };
    let mut running_max = log_phi(model, roots, start);
    let mut ends = [d.lo, d.hi];
    let mut reached = [d.lo.is_finite(), d.hi.is_finite()];
    let mut step = 0.05;
    let mut below = [0usize; 2];
    let mut offset = 0.0;
    // march outward in both directions until three consecutive samples are deep enough
    while !(reached[0] && reached[1]) {
        offset += step;
        step *= 1.1;
        if offset > MAX_EXTENT {
            return Err(Error::Grid(
                "wavefunction does not decay within the search range".into(),
            ));
        }
        for (side, dir) in [(0usize, -1.0), (1usize, 1.0)] {
            if reached[side] {
                continue;
            }
            let x = start + dir * offset;
            let l = log_phi(model, roots, x);
            if l.is_finite() {
                running_max = running_max.max(l);
            }
            if l < running_max - TRUNCATION_DEPTH {
                below[side] += 1;
                if below[side] >= 3 {
                    reached[side] = true;
                    ends[side] = x;
                }
            } else {
                below[side] = 0;
            }
        }
    }
    Ok((ends[0], ends[1]))
}

fn stencil(order: usize) -> Result<&'static [f64]> {
    match order {
        2 => Ok(&[1.0, -2.0, 1.0]),
        4 => Ok(&[-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0]),
        6 => Ok(&[
            1.0 / 90.0,
            -3.0 / 20.0,
            3.0 / 2.0,
            -49.0 / 18.0,
            3.0 / 2.0,
            -3.0 / 20.0,
            1.0 / 90.0,
        ]),
        _ => Err(Error::InvalidParameter(format!(
            "stencil order must be 2, 4 or 6, got {order}"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualNorms {
    pub max: f64,
    pub rms: f64,
    pub points: usize,
}

fn check_no_poles(model: &Model, profile: &PotentialProfile, grid: &Grid) -> Result<()> {
    let b = grid.bounds();
    for p in &profile.u.boundary_poles {
        for x in model.map().preimages(p.location) {
            if b.contains(x) {
                return Err(Error::Grid(format!("grid meets a pole of U at x = {x}")));
            }
        }
    }
    Ok(())
}

/// Residual of `(-d^2/dx^2 + U - E) phi_N` on the grid, with `phi` scaled to
/// unit maximum and the result divided by `max|phi| (1 + max|U - E|)`.
pub fn schrodinger_residual(
    model: &Model,
    profile: &PotentialProfile,
    grid: &Grid,
    order: usize,
) -> Result<ResidualNorms> {
    let w = stencil(order)?;
    let m = w.len() / 2;
    check_no_poles(model, profile, grid)?;
    let roots = &profile.branch.roots;
    let pre = model.prepotential();
    let domain = model.domain();
    let h = grid.h();

    let log_max = grid
        .points()
        .iter()
        .map(|&x| log_phi(model, roots, x))
        .fold(f64::NEG_INFINITY, f64::max);
    if !log_max.is_finite() {
        return Err(Error::Grid("wavefunction vanishes on the grid".into()));
    }
    let phi = |x: f64| -> Result<f64> {
        let v = pre.phi_value(roots, x)?;
        Ok(v.sign * (v.log_magnitude - log_max).exp())
    };

    let mut residuals = Vec::with_capacity(grid.points().len());
    let mut phi_max = 0.0f64;
    let mut pot_max = 0.0f64;
    for &x in grid.points() {
        if grid.is_excluded(x) {
            continue;
        }
        let (a, b) = (x - m as f64 * h, x + m as f64 * h);
        if !(domain.contains_open(a) || (domain.lo.is_finite() && a == domain.lo && !model.singular_ends().0))
            || !(domain.contains_open(b) || (domain.hi.is_finite() && b == domain.hi && !model.singular_ends().1))
        {
            continue;
        }
        let mut d2 = 0.0;
        for (j, wj) in w.iter().enumerate() {
            d2 += wj * phi(x + (j as f64 - m as f64) * h)?;
        }
        d2 /= h * h;
        let phi0 = phi(x)?;
        let z = model.map().z_of_x(x)?;
        let pot = profile.u.eval(z) - profile.energy;
        residuals.push(-d2 + pot * phi0);
        phi_max = phi_max.max(phi0.abs());
        pot_max = pot_max.max(pot.abs());
    }
    if residuals.is_empty() {
        return Err(Error::Grid("no admissible grid points".into()));
    }
    let scale = phi_max * (1.0 + pot_max);
    let max = residuals.iter().map(|r| r.abs()).fold(0.0, f64::max) / scale;
    let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt() / scale;
    Ok(ResidualNorms {
        max,
        rms,
        points: residuals.len(),
    })
}

/// Lowest `k` eigenvalues of the second-order discretization of
/// `-d^2/dx^2 + U` with Dirichlet conditions one step beyond each grid end.
pub fn fd_spectrum(model: &Model, profile: &PotentialProfile, grid: &Grid, k: usize) -> Result<Vec<f64>> {
    let n = grid.points().len();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "requested {k} eigenvalues from a grid of {n} points"
        )));
    }
    check_no_poles(model, profile, grid)?;
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    let mut diag = Vec::with_capacity(n);
    for &x in grid.points() {
        let u = profile.u.eval(model.map().z_of_x(x)?);
        if !u.is_finite() {
            return Err(Error::Grid(format!("U is not finite at x = {x}")));
        }
        diag.push(2.0 * inv_h2 + u);
    }
    let off = vec![-inv_h2; n - 1];
    let mut ev = tridiag_eigenvalues(&Tridiag::new(diag, off)?)?;
    ev.truncate(k);
    Ok(ev)
}

/// [`fd_spectrum`] on `n` and `2n - 1` points over the same box, combined by
/// Richardson extrapolation.
pub fn fd_spectrum_richardson(
    model: &Model,
    profile: &PotentialProfile,
    bounds: Interval,
    n: usize,
    k: usize,
) -> Result<Vec<f64>> {
    let coarse = fd_spectrum(model, profile, &Grid::uniform(bounds.lo, bounds.hi, n)?, k)?;
    let fine = fd_spectrum(model, profile, &Grid::uniform(bounds.lo, bounds.hi, 2 * n - 1)?, k)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect())
}

/// Sign changes of `phi_N` along the grid.
pub fn node_count(model: &Model, roots: &[f64], grid: &Grid) -> usize {
    let pre = model.prepotential();
    let mut last = 0.0;
    let mut count = 0;
    for &x in grid.points() {
        let Ok(v) = pre.phi_value(roots, x) else {
            continue;
        };
        if v.log_magnitude == f64::NEG_INFINITY {
            continue;
        }
        if last != 0.0 && v.sign != last {
            count += 1;
        }
        last = v.sign;
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormCheck {
    pub normalizable: bool,
    /// `ln ∫ phi^2 dx` over the truncated range, with `phi` unscaled.
    pub log_integral: f64,
}

const GL_ORDER: usize = 20;
const MAX_CHUNKS: usize = 80;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln ∫_a^b phi^2`.
fn log_chunk(model: &Model, roots: &[f64], a: f64, b: f64, rule: &[(f64, f64)]) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let vals: Vec<(f64, f64)> = rule
        .iter()
        .map(|&(t, w)| (2.0 * log_phi(model, roots, mid + half * t), w))
        .collect();
    let m = vals.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = vals.iter().map(|&(l, w)| w * (l - m).exp()).sum();
    m + (s * half).ln()
}

/// Integrates `phi_N^2` outward from an interior point in chunks whose width
/// doubles toward infinite ends and halves toward finite ones. The integral
/// converges when the tail chunks shrink geometrically.
pub fn normalizability_check(model: &Model, roots: &[f64]) -> NormCheck {
    let rule = gauss_legendre(GL_ORDER);
    let d = model.domain();
    let center = match (d.lo.is_finite(), d.hi.is_finite()) {
        (true, true) => 0.5 * (d.lo + d.hi),
        (true, false) => d.lo + 1.0,
        (false, true) => d.hi - 1.0,
        (false, false) => model.spec().anchor.map_or(0.0, |a| a.x0),
    };
    let mut total = f64::NEG_INFINITY;
    let mut ok = true;
    for (end, dir) in [(d.lo, -1.0), (d.hi, 1.0)] {
        let mut logs = Vec::new();
        let mut a = center;
        let mut width = 1.0;
        for _ in 0..MAX_CHUNKS {
            let b = if end.is_finite() {
                // halve the remaining distance
                a + 0.5 * (end - a)
            } else {
                a + dir * width
            };
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let l = log_chunk(model, roots, lo, hi, &rule);
            if l.is_nan() || l == f64::INFINITY {
                ok = false;
                break;
            }
            logs.push(l);
            total = log_sum_exp(total, l);
            a = b;
            width *= 2.0;
            if l < total - 40.0 && logs.len() > 4 {
                break;
            }
        }
        if !ok {
            break;
        }
        let n = logs.len();
        let decaying = n >= 4
            && logs[n - 3..]
                .windows(2)
                .all(|w| w[1] - w[0] < (0.97f64).ln())
            && logs[n - 1] < total - 10.0;
        ok &= decaying;
    }
    NormCheck {
        normalizable: ok,
        log_integral: total,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMatch {
    pub claimed: f64,
    pub fd: f64,
    pub diff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub residual: bool,
    pub spectrum: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub residual_max: f64,
    pub residual_rms: f64,
    pub spectrum_matches: Vec<SpectrumMatch>,
    pub node_count: usize,
    pub normalizable: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub grid_points: usize,
    /// `None` picks 6 for models with a singular end and 4 otherwise.
    pub stencil: Option<usize>,
    pub residual_tol: f64,
    /// Also match the energy against the FD spectrum.
    pub check_spectrum: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            grid_points: DEFAULT_GRID_POINTS,
            stencil: None,
            residual_tol: RESIDUAL_TOL,
            check_spectrum: false,
        }
    }
}

/// Residual, nodes, normalizability and optionally the spectrum match for one profile.
pub fn certify(model: &Model, profile: &PotentialProfile, opts: &VerifyOptions) -> Result<VerificationReport> {
    let roots = &profile.branch.roots;
    let order = opts
        .stencil
        .unwrap_or(if model.has_singular_end() { 6 } else { 4 });
    let grid = Grid::for_branch(model, roots, opts.grid_points, 0.0)?;
    let res = schrodinger_residual(model, profile, &grid, order)?;
    let residual_ok = res.max < opts.residual_tol;

    let mut matches = Vec::new();
    let mut spectrum_ok = true;
    if opts.check_spectrum {
        let tol = if model.has_singular_end() {
            SINGULAR_SPECTRUM_TOL
        } else {
            SPECTRUM_TOL
        };
        let box_grid = Grid::for_branch(model, roots, opts.grid_points, 0.1)?;
        let k = (2 * roots.len() + 4).min(opts.grid_points);
        let ev = fd_spectrum(model, profile, &box_grid, k)?;
        let fd = ev
            .iter()
            .copied()
            .min_by(|a, b| (a - profile.energy).abs().total_cmp(&(b - profile.energy).abs()))
            .unwrap_or(f64::NAN);
        let diff = (fd - profile.energy).abs();
        spectrum_ok = diff < tol * profile.energy.abs().max(1.0);
        matches.push(SpectrumMatch {
            claimed: profile.energy,
            fd,
            diff,
        });
    }
    let norm = normalizability_check(model, roots);
    Ok(VerificationReport {
        residual_max: res.max,
        residual_rms: res.rms,
        spectrum_matches: matches,
        node_count: node_count(model, roots, &grid),
        normalizable: norm.normalizable,
        verdict: Verdict {
            residual: residual_ok,
            spectrum: spectrum_ok,
            pass: residual_ok && spectrum_ok,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bae::{enumerate_branches, SOLVER_TOL};
    use crate::model::{BranchSign, ModelSpec, Singularity};
    use crate::poly::Poly;
    use crate::potential::{split_energy, ReferenceShift};
    use approx::assert_abs_diff_eq;

    fn spec(q: &[f64], p: &[f64], s: &[(f64, f64)], n: usize) -> ModelSpec {
        ModelSpec::new(
            Poly::new(q.to_vec()),
            Poly::new(p.to_vec()),
            s.iter().map(|&(a, mu)| Singularity::new(a, mu)).collect(),
            n,
        )
        .unwrap()
    }

    fn profiles(s: &ModelSpec, shift: ReferenceShift) -> (Model, Vec<PotentialProfile>) {
        let m = Model::build(s).unwrap();
        let ps = enumerate_branches(s, SOLVER_TOL, 32)
            .unwrap()
            .iter()
            .map(|b| split_energy(s, b, shift).unwrap())
            .collect();
        (m, ps)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(GL_ORDER);
        let w: f64 = rule.iter().map(|r| r.1).sum();
        assert_abs_diff_eq!(w, 2.0, epsilon = 1e-13);
        let x8: f64 = rule.iter().map(|(x, w)| w * x.powi(8)).sum();
        assert_abs_diff_eq!(x8, 2.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::uniform(1.0, 0.0, 10).is_err());
        assert!(Grid::uniform(0.0, 1.0, 2).is_err());
        assert!(Grid::uniform(0.0, f64::INFINITY, 10).is_err());
        let g = Grid::uniform(-1.0, 1.0, 201).unwrap();
        assert_abs_diff_eq!(g.h(), 0.01, epsilon = 1e-15);
        for w in g.points().windows(2) {
            assert!((w[1] - w[0] - g.h()).abs() < 1e-14);
        }
    }

    #[test]
    fn harmonic_residual_order_four() {
        let (m, ps) = profiles(&spec(&[1.0], &[0.0, 1.0], &[], 2), ReferenceShift::Raw);
        let p = &ps[0];
        let mut g = Grid::uniform(-8.0, 8.0, 16001).unwrap();
        assert_abs_diff_eq!(g.h(), 1e-3, epsilon = 1e-15);
        for x in [-0.5f64.sqrt(), 0.5f64.sqrt()] {
            g.exclude(Interval::new(x - 0.01, x + 0.01));
        }
        let r = schrodinger_residual(&m, p, &g, 4).unwrap();
        assert!(r.max < 1e-8, "{r:?}");
    }

    #[test]
    fn sextic_residual_both_branches() {
        let (m, ps) = profiles(&spec(&[0.0, 4.0], &[0.0, 0.0, 2.0], &[], 1), ReferenceShift::Raw);
        assert_eq!(ps.len(), 2);
        for p in &ps {
            let g = Grid::for_branch(&m, &p.branch.roots, 4000, 0.0).unwrap();
            let r = schrodinger_residual(&m, p, &g, 4).unwrap();
            assert!(r.max < 1e-7, "{r:?}");
        }
    }

    #[test]
    fn wrong_energy_is_detected() {
        let (m, ps) = profiles(&spec(&[1.0], &[0.0, 1.0], &[], 2), ReferenceShift::Raw);
        let mut p = ps[0].clone();
        let g = Grid::for_branch(&m, &p.branch.roots, 4000, 0.0).unwrap();
        let good = schrodinger_residual(&m, &p, &g, 4).unwrap().max;
        p.energy += 0.1;
        let bad = schrodinger_residual(&m, &p, &g, 4).unwrap().max;
        assert!(good < 1e-8);
        // |0.1 phi| against max|phi| (1 + max|U - E|)
        assert!(bad > 100.0 * RESIDUAL_TOL && bad < 0.1, "{bad}");
    }

    #[test]
    fn residual_converges_at_stencil_order() {
        let (m, ps) = profiles(&spec(&[1.0], &[0.0, 1.0], &[], 1), ReferenceShift::Raw);
        let p = &ps[0];
        for (order, h) in [(2usize, 0.02), (4, 0.04), (6, 0.08)] {
            let n = |h: f64| (12.0 / h).round() as usize + 1;
            let mut g1 = Grid::uniform(-6.0, 6.0, n(h)).unwrap();
            let mut g2 = Grid::uniform(-6.0, 6.0, n(h / 2.0)).unwrap();
            g1.exclude(Interval::new(-0.5, 0.5));
            g2.exclude(Interval::new(-0.5, 0.5));
            let r1 = schrodinger_residual(&m, p, &g1, order).unwrap().max;
            let r2 = schrodinger_residual(&m, p, &g2, order).unwrap().max;
            let slope = (r1 / r2).log2();
            assert!(
                (slope - order as f64).abs() < 0.2 * order as f64,
                "order {order}: slope {slope} ({r1} -> {r2})"
            );
        }
    }

    #[test]
    fn stencil_order_is_validated() {
        let (m, ps) = profiles(&spec(&[1.0], &[0.0, 1.0], &[], 0), ReferenceShift::Raw);
        let g = Grid::uniform(-5.0, 5.0, 101).unwrap();
        assert!(matches!(
            schrodinger_residual(&m, &ps[0], &g, 3),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn harmonic_normal_form_spectrum() {
        let (m, ps) = profiles(&spec(&[1.0], &[0.0, 1.0], &[], 0), ReferenceShift::UConstant(0.0));
        let g = Grid::uniform(-10.0, 10.0, 4000).unwrap();
        let ev = fd_spectrum(&m, &ps[0], &g, 4).unwrap();
        for (i, e) in ev.iter().take(3).enumerate() {
            assert_abs_diff_eq!(*e, (2 * i + 1) as f64, epsilon = 1e-4);
        }
        let ev = fd_spectrum_richardson(&m, &ps[0], Interval::new(-10.0, 10.0), 4000, 6).unwrap();
        for (i, e) in ev.iter().enumerate() {
            assert_abs_diff_eq!(*e, (2 * i + 1) as f64, epsilon = 1e-4);
        }
        assert!(fd_spectrum(&m, &ps[0], &g, 4001).is_err());
    }

    #[test]
    fn sextic_energies_in_spectrum() {
        let (m, ps) = profiles(&spec(&[0.0, 4.0], &[0.0, 0.0, 2.0], &[], 1), ReferenceShift::Raw);
        let g = Grid::for_branch(&m, &ps[0].branch.roots, 4000, 0.1).unwrap();
        let ev = fd_spectrum(&m, &ps[0], &g, 6).unwrap();
        let e = 2.0 * 2f64.sqrt();
        for target in [-e, e] {
            assert!(ev.iter().any(|v| (v - target).abs() < 1e-3), "{target} not in {ev:?}");
        }
    }

    #[test]
    fn morse_levels() {
        let (big_a, alpha, big_b) = (5.0, 1.0, 2.0);
        let mk = |n| spec(&[0.0, 0.0, alpha * alpha], &[-alpha * big_b, alpha * big_a], &[], n);
        let (m, ps) = profiles(&mk(4), ReferenceShift::Raw);
        let g = Grid::for_branch(&m, &ps[0].branch.roots, 4000, 0.1).unwrap();
        let ev = fd_spectrum(&m, &ps[0], &g, 6).unwrap();
        for n in 0..=4 {
            let e = big_a * big_a - (big_a - n as f64 * alpha).powi(2);
            assert!(ev.iter().any(|v| (v - e).abs() < 1e-3 * e.max(1.0)), "{e} not in {ev:?}");
        }
    }

    #[test]
    fn node_counts() {
        let (m, ps) = profiles(&spec(&[1.0], &[0.0, 1.0], &[], 0), ReferenceShift::Raw);
        let g = Grid::for_branch(&m, &ps[0].branch.roots, 2000, 0.0).unwrap();
        assert_eq!(node_count(&m, &ps[0].branch.roots, &g), 0);

        let (m, ps) = profiles(&spec(&[1.0], &[0.0, 1.0], &[], 3), ReferenceShift::Raw);
        let g = Grid::for_branch(&m, &ps[0].branch.roots, 2000, 0.0).unwrap();
        assert_eq!(node_count(&m, &ps[0].branch.roots, &g), 3);

        let (m, ps) = profiles(&spec(&[0.0, 4.0], &[0.0, 0.0, 2.0], &[], 1), ReferenceShift::Raw);
        let neg = ps.iter().find(|p| p.branch.roots[0] < 0.0).unwrap();
        let g = Grid::for_branch(&m, &neg.branch.roots, 2000, 0.0).unwrap();
        assert_eq!(node_count(&m, &neg.branch.roots, &g), 0);
        let pos = ps.iter().find(|p| p.branch.roots[0] > 0.0).unwrap();
        assert_eq!(node_count(&m, &pos.branch.roots, &g), 2);
    }

    #[test]
    fn normalizability() {
        let m = Model::build(&spec(&[1.0], &[0.0, 1.0], &[], 0)).unwrap();
        let c = normalizability_check(&m, &[]);
        assert!(c.normalizable);
        assert_abs_diff_eq!(c.log_integral, std::f64::consts::PI.sqrt().ln(), epsilon = 1e-10);
        let m = Model::build(&spec(&[1.0], &[0.0, -1.0], &[], 0)).unwrap();
        assert!(!normalizability_check(&m, &[]).normalizable);

        let morse_p = |big_a: f64, n: usize| {
            spec(&[0.0, 0.0, 1.0], &[0.0, -big_a, 0.5], &[(0.0, -(n as f64))], n)
                .with_branch(BranchSign::Minus)
        };
        for (big_a, n, expect) in [(5.0, 2, true), (5.0, 4, true), (1.5, 2, false), (2.5, 4, false)] {
            let s = morse_p(big_a, n);
            let m = Model::build(&s).unwrap();
            let roots = crate::poly::laguerre_zeros(n, 2.0 * big_a - 2.0 * n as f64)
                .unwrap_or_else(|_| vec![0.5; n]);
            assert_eq!(normalizability_check(&m, &roots).normalizable, expect, "A={big_a} N={n}");
        }
    }

    #[test]
    fn halfline_and_interval_certify() {
        let s = spec(&[0.0, 4.0], &[0.0, 0.0, 2.0], &[(0.0, 0.3)], 1);
        let (m, ps) = profiles(&s, ReferenceShift::Raw);
        assert!(!ps.is_empty());
        for p in &ps {
            let r = certify(&m, p, &VerifyOptions::default()).unwrap();
            assert!(r.verdict.pass, "{r:?}");
        }
        let s = spec(&[0.0, 4.0, -4.0], &[0.0, -4.0, 4.0], &[(0.0, 0.25), (1.0, 0.25)], 2);
        let (m, ps) = profiles(&s, ReferenceShift::Raw);
        assert!(!ps.is_empty());
        for p in &ps {
            let r = certify(&m, p, &VerifyOptions::default()).unwrap();
            assert!(r.verdict.pass, "{r:?}");
        }
    }
}
