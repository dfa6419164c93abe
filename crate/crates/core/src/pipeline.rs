//! A model ready for evaluation: spec, coordinate map, prepotential and
//! the effective `x` domain, plus the end-to-end solve/verify run.

use serde::Serialize;

use crate::bae::{enumerate_branches_with, BetheBranch, SearchOptions};
use crate::coords::{CoordinateMap, Interval};
use crate::error::Result;
use crate::model::{BranchSign, ModelSpec};
use crate::potential::{split_energy, v0_pfe, Pfe, PotentialProfile, ReferenceShift};
use crate::prepot::{integrate_w0, LogTerm, Prepotential};
use crate::verify::{certify, VerificationReport, VerifyOptions};

const END_MATCH: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Model {
    pre: Prepotential,
    v0: Pfe,
    domain: Interval,
    singular_lo: bool,
    singular_hi: bool,
}

impl Model {
    /// Builds the map and prepotential and clips the domain at interior
    /// preimages of singular points. `+1` keeps the piece to the right of
    /// the cut, `-1` the piece to the left.
    pub fn build(spec: &ModelSpec) -> Result<Self> {
        let pre = integrate_w0(spec)?;
        let v0 = v0_pfe(spec)?;
        let map = pre.map();

        let mut poles: Vec<f64> = spec
            .singularities
            .iter()
            .filter(|s| s.exponent != 0.0)
            .map(|s| s.location)
            .collect();
        poles.extend(pre.log_terms.iter().filter_map(|t| match t {
            LogTerm::Real { center, .. } => Some(*center),
            LogTerm::ConjugatePair { .. } => None,
        }));
        poles.extend(pre.inverse_terms.iter().map(|t| t.center));
        poles.extend(
            v0.boundary_poles
                .iter()
                .filter(|p| p.c1 != 0.0 || p.c2 != 0.0)
                .map(|p| p.location),
        );

        let mut domain = map.x_domain();
        for &a in &poles {
            for x in map.preimages(a) {
                if domain.contains_open(x) {
                    match spec.branch {
                        BranchSign::Plus => domain.lo = x,
                        BranchSign::Minus => domain.hi = x,
                    }
                }
            }
        }

        let singular_at = |x: f64| {
            x.is_finite()
                && map
                    .z_of_x(x)
                    .map(|z| {
                        poles
                            .iter()
                            .any(|&a| (z - a).abs() <= END_MATCH * a.abs().max(1.0))
                    })
                    .unwrap_or(false)
        };
        let singular_lo = singular_at(domain.lo);
        let singular_hi = singular_at(domain.hi);
        Ok(Model {
            pre,
            v0,
            domain,
            singular_lo,
            singular_hi,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        self.pre.spec()
    }

    pub fn map(&self) -> &CoordinateMap {
        self.pre.map()
    }

    pub fn prepotential(&self) -> &Prepotential {
        &self.pre
    }

    pub fn v0(&self) -> &Pfe {
        &self.v0
    }

    /// Effective `x` domain.
    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Whether the potential or the wavefunction is singular at each end.
    pub fn singular_ends(&self) -> (bool, bool) {
        (self.singular_lo, self.singular_hi)
    }

    pub fn has_singular_end(&self) -> bool {
        self.singular_lo || self.singular_hi
    }
}

/// One branch carried through energy split and verification.
#[derive(Debug, Clone, Serialize)]
pub struct BranchResult {
    pub branch: BetheBranch,
    pub energy: f64,
    #[serde(skip)]
    pub profile: Option<PotentialProfile>,
    pub report: Option<VerificationReport>,
}

impl BranchResult {
    pub fn verified(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.verdict.pass)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub search: SearchOptions,
    pub shift: ReferenceShift,
    /// Skip verification when `None`.
    pub verify: Option<VerifyOptions>,
}

/// Enumerates branches, splits the energy and optionally certifies each one.
pub fn run(spec: &ModelSpec, opts: &RunOptions) -> Result<(Model, Vec<BranchResult>)> {
    let model = Model::build(spec)?;
    let branches = enumerate_branches_with(spec, &opts.search)?;
    let mut out = Vec::with_capacity(branches.len());
    for b in branches {
        out.push(evaluate_branch(&model, b, opts)?);
    }
    Ok((model, out))
}

/// Energy split and verification of a single branch.
pub fn evaluate_branch(model: &Model, branch: BetheBranch, opts: &RunOptions) -> Result<BranchResult> {
    let profile = split_energy(model.spec(), &branch, opts.shift)?;
    let report = match &opts.verify {
        Some(v) => Some(certify(model, &profile, v)?),
        None => None,
    };
    Ok(BranchResult {
        energy: profile.energy,
        branch,
        profile: Some(profile),
        report,
    })
}
