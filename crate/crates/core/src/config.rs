//! JSON model configs and CSV root files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::catalog::{self, Params};
use crate::error::{Error, Result};
use crate::model::{Anchor, BranchSign, ModelSpec, Singularity};
use crate::poly::Poly;
use crate::potential::ReferenceShift;

/// On-disk model description. Either explicit polynomials or a catalog
/// entry with parameter overrides; `N`, `branch` and `anchor` apply to both.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub singularities: Vec<Singularity>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<BranchSign>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Anchor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: Params,
}

impl ModelConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("model config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Explicit config for a spec.
    pub fn from_spec(spec: &ModelSpec) -> Self {
        ModelConfig {
            q: Some(spec.q.coeffs().to_vec()),
            p: Some(spec.p.coeffs().to_vec()),
            singularities: spec.singularities.clone(),
            n: Some(spec.n),
            branch: Some(spec.branch),
            anchor: spec.anchor,
            catalog: None,
            params: Params::new(),
        }
    }

    /// `n` overrides the `N` key when given.
    pub fn to_spec(&self, n: Option<usize>) -> Result<ModelSpec> {
        let mut spec = match &self.catalog {
            Some(name) => {
                if self.q.is_some() || self.p.is_some() || !self.singularities.is_empty() {
                    return Err(Error::Parse(
                        "model config: \"catalog\" cannot be combined with \"Q\", \"P\" or \"singularities\"".into(),
                    ));
                }
                let entry = catalog::lookup(name)?;
                let n = n.or(self.n).unwrap_or(entry.default_n);
                let mut spec = entry.instantiate(&self.params, n)?;
                if let Some(b) = self.branch {
                    spec.branch = b;
                }
                spec
            }
            None => {
                if !self.params.is_empty() {
                    return Err(Error::Parse("model config: \"params\" requires \"catalog\"".into()));
                }
                let q = self.q.as_ref().ok_or_else(|| missing("Q"))?;
                let p = self.p.as_ref().ok_or_else(|| missing("P"))?;
                let n = n.or(self.n).ok_or_else(|| missing("N"))?;
                if q.len() > 3 {
                    return Err(Error::Parse(format!(
                        "model config: key \"Q\" takes at most 3 coefficients, got {}",
                        q.len()
                    )));
                }
                if p.len() > 4 {
                    return Err(Error::Parse(format!(
                        "model config: key \"P\" takes at most 4 coefficients, got {}",
                        p.len()
                    )));
                }
                ModelSpec::new(Poly::new(q.clone()), Poly::new(p.clone()), self.singularities.clone(), n)?
                    .with_branch(self.branch.unwrap_or_default())
            }
        };
        if self.anchor.is_some() {
            spec = spec.with_anchor(self.anchor);
        }
        Ok(spec)
    }

    /// Reference shift used when reporting energies: the entry's rule for
    /// catalog configs, raw otherwise.
    pub fn shift(&self) -> Result<ReferenceShift> {
        match &self.catalog {
            Some(name) => catalog::lookup(name)?.shift(&self.params),
            None => Ok(ReferenceShift::Raw),
        }
    }
}

fn missing(key: &str) -> Error {
    Error::Parse(format!("model config: missing key \"{key}\""))
}

pub const CSV_HEADER: &str = "branch_id,k,z_k,residual_max,E,verified";

/// One CSV row: root `k` of branch `branch_id`, or `z_k = None` for `N = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootRow {
    pub branch_id: usize,
    pub k: usize,
    pub z_k: Option<f64>,
    pub residual_max: f64,
    pub energy: f64,
    pub verified: bool,
}

/// A parsed root file grouped by branch, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct RootFile {
    pub seed: Option<u64>,
    pub branches: Vec<(usize, Vec<f64>)>,
    pub rows: Vec<RootRow>,
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Deserialize)]
struct CsvRecord {
    branch_id: usize,
    k: usize,
    z_k: Option<f64>,
    residual_max: f64,
    #[serde(rename = "E")]
    energy: f64,
    verified: bool,
}

pub fn write_csv(seed: Option<u64>, rows: &[RootRow]) -> String {
    let mut out = String::new();
    if let Some(s) = seed {
        writeln!(out, "# seed={s}").unwrap();
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(',')).unwrap();
    for r in rows {
        w.write_record([
            r.branch_id.to_string(),
            r.k.to_string(),
            r.z_k.map(fmt_f64).unwrap_or_default(),
            fmt_f64(r.residual_max),
            fmt_f64(r.energy),
            r.verified.to_string(),
        ])
        .unwrap();
    }
    out.push_str(&String::from_utf8(w.into_inner().unwrap()).unwrap());
    out
}

pub fn parse_csv(text: &str) -> Result<RootFile> {
    let mut seed = None;
    for line in text.lines().map(str::trim).filter(|l| l.starts_with('#')) {
        if let Some(v) = line[1..].trim().strip_prefix("seed=") {
            seed = Some(
                v.parse()
                    .map_err(|_| Error::Parse(format!("roots file: bad seed '{v}'")))?,
            );
        }
    }
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| Error::Parse(format!("roots file: {e}")))?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(Error::Parse(format!("roots file: expected header '{CSV_HEADER}'")));
    }
    let mut rows = Vec::new();
    for rec in rdr.deserialize::<CsvRecord>() {
        let r = rec.map_err(|e| Error::Parse(format!("roots file: {e}")))?;
        rows.push(RootRow {
            branch_id: r.branch_id,
            k: r.k,
            z_k: r.z_k,
            residual_max: r.residual_max,
            energy: r.energy,
            verified: r.verified,
        });
    }
    let mut branches: Vec<(usize, Vec<f64>)> = Vec::new();
    for r in &rows {
        match branches.iter_mut().find(|(id, _)| *id == r.branch_id) {
            Some((_, roots)) => roots.extend(r.z_k),
            None => branches.push((r.branch_id, r.z_k.into_iter().collect())),
        }
    }
    if branches.is_empty() {
        return Err(Error::Parse("roots file: no branches".into()));
    }
    Ok(RootFile { seed, branches, rows })
}
