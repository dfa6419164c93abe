//! Named model presets with default parameters, closed-form energies where
//! known and the reference shift used when reporting energies.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BranchSign, ModelSpec, Singularity};
use crate::poly::Poly;
use crate::potential::ReferenceShift;

pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Constraint {
    Positive,
    Any,
}

#[derive(Debug, Clone, Copy)]
struct ParamDef {
    name: &'static str,
    default: f64,
    constraint: Constraint,
}

const fn pos(name: &'static str, default: f64) -> ParamDef {
    ParamDef {
        name,
        default,
        constraint: Constraint::Positive,
    }
}

const fn any(name: &'static str, default: f64) -> ParamDef {
    ParamDef {
        name,
        default,
        constraint: Constraint::Any,
    }
}

/// How reported energies are anchored for an entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftRule {
    /// Report `E` as constructed.
    Raw,
    /// Constant term of `U` set to zero.
    ZeroConstant,
    /// Constant term of `U` set to `A^2`.
    MorseDepth,
}

#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    /// Closed-form energy, or a note when none is known.
    pub energy: &'static str,
    pub default_n: usize,
    pub shift_rule: ShiftRule,
    params: &'static [ParamDef],
    optional: &'static [&'static str],
}

/// Closed-form reference energies for an instantiated entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expected {
    Values(Vec<f64>),
    OracleRequired,
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expected::Values(v) => {
                let parts: Vec<String> = v.iter().map(|e| format!("{e}")).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
            Expected::OracleRequired => f.write_str("oracle required"),
        }
    }
}

pub const ENTRIES: [CatalogEntry; 7] = [
    CatalogEntry {
        name: "harmonic",
        summary: "harmonic oscillator, z = x, U = b^2 x^2",
        energy: "b(2N+1)",
        default_n: 4,
        shift_rule: ShiftRule::ZeroConstant,
        params: &[pos("b", 1.0)],
        optional: &[],
    },
    CatalogEntry {
        name: "sextic",
        summary: "type-1 sextic oscillator, z = x^2, N+1 levels per potential",
        energy: "4a sum z_k + (4N+1)b; N=1: 3b +- 2 sqrt(b^2+2a)",
        default_n: 1,
        shift_rule: ShiftRule::ZeroConstant,
        params: &[pos("a", 1.0), any("b", 0.0)],
        optional: &[],
    },
    CatalogEntry {
        name: "sextic-type2",
        summary: "type-2 sextic oscillator, z = x, one level per potential",
        energy: "(2N+1)b + 2a sum z_k^2",
        default_n: 1,
        shift_rule: ShiftRule::ZeroConstant,
        params: &[pos("a", 1.0), any("b", 0.0)],
        optional: &[],
    },
    CatalogEntry {
        name: "morse-es",
        summary: "Morse potential on z = exp(alpha x)",
        energy: "A^2 - (A - N alpha)^2",
        default_n: 3,
        shift_rule: ShiftRule::Raw,
        params: &[pos("A", 5.0), pos("alpha", 1.0), pos("B", 2.0)],
        optional: &[],
    },
    CatalogEntry {
        name: "sextic-halfline",
        summary: "sextic with a z^mu factor on x > 0; mu = 0 and 1/2 are the full-line cases",
        energy: "oracle required",
        default_n: 1,
        shift_rule: ShiftRule::ZeroConstant,
        params: &[any("p", 0.3), pos("a", 1.0), any("b", 0.0)],
        optional: &[],
    },
    CatalogEntry {
        name: "morse-p",
        summary: "Morse construction with a boundary factor z^mu; mu = -N (default) is exactly solvable",
        energy: "A^2 - (A - N alpha)^2 at mu = -N",
        default_n: 2,
        shift_rule: ShiftRule::MorseDepth,
        params: &[pos("A", 5.0), pos("alpha", 1.0)],
        optional: &["mu"],
    },
    CatalogEntry {
        name: "trig-interval",
        summary: "trigonometric model on (0, pi/2), z = sin^2 x",
        energy: "oracle required",
        default_n: 1,
        shift_rule: ShiftRule::Raw,
        params: &[pos("a", 1.0), any("p1", 0.25), any("p2", 0.25)],
        optional: &[],
    },
];

pub fn entries() -> &'static [CatalogEntry] {
    &ENTRIES
}

pub fn lookup(name: &str) -> Result<&'static CatalogEntry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownEntry(name.to_string()))
}

impl CatalogEntry {
    pub fn defaults(&self) -> Params {
        self.params
            .iter()
            .map(|p| (p.name.to_string(), p.default))
            .collect()
    }

    pub fn param_names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.params.iter().map(|p| p.name).chain(self.optional.iter().copied())
    }

    /// Defaults merged with `overrides`, rejecting unknown names and
    /// values that violate the entry's sign constraints.
    pub fn resolve(&self, overrides: &Params) -> Result<Params> {
        let mut out = self.defaults();
        for (k, v) in overrides {
            if !self.param_names().any(|n| n == k) {
                return Err(Error::InvalidParameter(format!(
                    "{} has no parameter '{k}' (expected one of: {})",
                    self.name,
                    self.param_names().collect::<Vec<_>>().join(", ")
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{}: {k} must be finite", self.name)));
            }
            out.insert(k.clone(), *v);
        }
        for p in self.params {
            let v = out[p.name];
            if p.constraint == Constraint::Positive && v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{}: {} must be > 0, got {v}",
                    self.name, p.name
                )));
            }
        }
        Ok(out)
    }

    pub fn instantiate(&self, overrides: &Params, n: usize) -> Result<ModelSpec> {
        let p = self.resolve(overrides)?;
        let g = |k: &str| p[k];
        let spec = |q: &[f64], pc: &[f64], s: Vec<Singularity>| {
            ModelSpec::new(Poly::new(q.to_vec()), Poly::new(pc.to_vec()), s, n)
        };
        match self.name {
            "harmonic" => spec(&[1.0], &[0.0, g("b")], vec![]),
            "sextic" => spec(&[0.0, 4.0], &[0.0, 2.0 * g("b"), 2.0 * g("a")], vec![]),
            "sextic-type2" => spec(&[1.0], &[0.0, g("b"), 0.0, g("a")], vec![]),
            "morse-es" => {
                let (a, al, b) = (g("A"), g("alpha"), g("B"));
                spec(&[0.0, 0.0, al * al], &[-al * b, al * a], vec![])
            }
            "sextic-halfline" => spec(
                &[0.0, 4.0],
                &[0.0, 2.0 * g("b"), 2.0 * g("a")],
                vec![Singularity::new(0.0, g("p"))],
            ),
            "morse-p" => {
                let (a, al) = (g("A"), g("alpha"));
                let mu = p.get("mu").copied().unwrap_or(-(n as f64));
                Ok(spec(
                    &[0.0, 0.0, al * al],
                    &[0.0, -al * a, al * al / 2.0],
                    vec![Singularity::new(0.0, mu)],
                )?
                .with_branch(BranchSign::Minus))
            }
            "trig-interval" => {
                let a = g("a");
                spec(
                    &[0.0, 4.0, -4.0],
                    &[0.0, -4.0 * a, 4.0 * a],
                    vec![
                        Singularity::new(0.0, g("p1")),
                        Singularity::new(1.0, g("p2")),
                    ],
                )
            }
            other => Err(Error::UnknownEntry(other.to_string())),
        }
    }

    pub fn shift(&self, overrides: &Params) -> Result<ReferenceShift> {
        let p = self.resolve(overrides)?;
        Ok(match self.shift_rule {
            ShiftRule::Raw => ReferenceShift::Raw,
            ShiftRule::ZeroConstant => ReferenceShift::UConstant(0.0),
            ShiftRule::MorseDepth => ReferenceShift::UConstant(p["A"] * p["A"]),
        })
    }

    /// Closed-form energies after the entry's shift, where known.
    pub fn expected_energies(&self, overrides: &Params, n: usize) -> Result<Expected> {
        let p = self.resolve(overrides)?;
        let nf = n as f64;
        Ok(match self.name {
            "harmonic" => Expected::Values(vec![p["b"] * (2.0 * nf + 1.0)]),
            "morse-es" => {
                let (a, al) = (p["A"], p["alpha"]);
                Expected::Values(vec![a * a - (a - nf * al).powi(2)])
            }
            "morse-p" if p.get("mu").is_none_or(|&mu| mu == -nf) => {
                let (a, al) = (p["A"], p["alpha"]);
                Expected::Values(vec![a * a - (a - nf * al).powi(2)])
            }
            "sextic" | "sextic-type2" if n == 0 => Expected::Values(vec![p["b"]]),
            "sextic" if n == 1 => {
                let (a, b) = (p["a"], p["b"]);
                let r = (b * b + 2.0 * a).sqrt();
                Expected::Values(vec![3.0 * b - 2.0 * r, 3.0 * b + 2.0 * r])
            }
            _ => Expected::OracleRequired,
        })
    }
}

pub fn instantiate(name: &str, overrides: &Params, n: usize) -> Result<ModelSpec> {
    lookup(name)?.instantiate(overrides, n)
}

pub fn expected_energies(name: &str, overrides: &Params, n: usize) -> Result<Expected> {
    lookup(name)?.expected_energies(overrides, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bae::{enumerate_branches, SOLVER_TOL};
    use crate::model::{classify, SolvabilityTag};
    use crate::pipeline::{run, RunOptions};
    use crate::potential::split_energy;
    use crate::verify::VerifyOptions;

    fn params(kv: &[(&str, f64)]) -> Params {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn seven_entries_with_unique_names() {
        assert_eq!(entries().len(), 7);
        let mut names: Vec<_> = entries().iter().map(|e| e.name).collect();
        names.dedup();
        assert_eq!(names.len(), 7);
    }

    #[test]
    fn instantiate_examples() {
        let h = instantiate("harmonic", &params(&[("b", 1.0)]), 2).unwrap();
        assert_eq!(h.q.coeffs(), &[1.0]);
        assert_eq!(h.p.coeffs(), &[0.0, 1.0]);
        assert!(h.singularities.is_empty());

        let m = instantiate("morse-es", &params(&[("A", 5.0), ("alpha", 1.0), ("B", 2.0)]), 2).unwrap();
        assert_eq!(m.q.coeffs(), &[0.0, 0.0, 1.0]);
        assert_eq!(m.p.coeffs(), &[-2.0, 5.0]);

        let t = instantiate("trig-interval", &params(&[("a", 1.0), ("p1", 0.25), ("p2", 0.25)]), 1).unwrap();
        assert_eq!(t.q.coeffs(), &[0.0, 4.0, -4.0]);
        assert_eq!(t.p.coeffs(), &[0.0, -4.0, 4.0]);
        assert_eq!(
            t.singularities,
            vec![Singularity::new(0.0, 0.25), Singularity::new(1.0, 0.25)]
        );
    }

    #[test]
    fn constraint_and_name_errors() {
        assert!(matches!(
            instantiate("sextic", &params(&[("a", 0.0)]), 1),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            instantiate("sextic", &params(&[("c", 1.0)]), 1),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(instantiate("nonsense", &Params::new(), 1), Err(Error::UnknownEntry(_))));
    }

    #[test]
    fn classification_of_entries() {
        let tag = |name: &str| classify(&instantiate(name, &Params::new(), 1).unwrap()).unwrap().tag;
        assert_eq!(tag("harmonic"), SolvabilityTag::ExactlySolvable);
        assert_eq!(tag("sextic"), SolvabilityTag::QesType1);
        assert_eq!(tag("sextic-type2"), SolvabilityTag::QesType2);
        assert_eq!(tag("morse-es"), SolvabilityTag::ExactlySolvable);
    }

    #[test]
    fn expected_energy_examples() {
        assert_eq!(
            expected_energies("harmonic", &params(&[("b", 1.0)]), 4).unwrap(),
            Expected::Values(vec![9.0])
        );
        assert_eq!(
            expected_energies("morse-es", &Params::new(), 3).unwrap(),
            Expected::Values(vec![21.0])
        );
        let Expected::Values(v) = expected_energies("sextic", &Params::new(), 1).unwrap() else {
            panic!("closed form expected");
        };
        let r = 2.0 * 2f64.sqrt();
        assert!((v[0] + r).abs() < 1e-15 && (v[1] - r).abs() < 1e-15);
        assert_eq!(
            expected_energies("trig-interval", &Params::new(), 1).unwrap(),
            Expected::OracleRequired
        );
        assert_eq!(
            expected_energies("morse-p", &params(&[("mu", 0.5)]), 2).unwrap(),
            Expected::OracleRequired
        );
    }

    #[test]
    fn shifted_energies_match_closed_forms() {
        for e in entries() {
            for n in 0..=3 {
                let ov = Params::new();
                let Expected::Values(want) = e.expected_energies(&ov, n).unwrap() else {
                    continue;
                };
                let spec = e.instantiate(&ov, n).unwrap();
                let shift = e.shift(&ov).unwrap();
                let mut got: Vec<f64> = enumerate_branches(&spec, SOLVER_TOL, 32)
                    .unwrap()
                    .iter()
                    .map(|b| split_energy(&spec, b, shift).unwrap().energy)
                    .collect();
                got.sort_by(f64::total_cmp);
                // ES entries list the top level only; it must be among the branches
                for w in &want {
                    assert!(
                        got.iter().any(|g| (g - w).abs() < 1e-9 * w.abs().max(1.0)),
                        "{} N={n}: {w} not in {got:?}",
                        e.name
                    );
                }
            }
        }
    }

    #[test]
    fn defaults_pass_the_pipeline() {
        for e in entries() {
            let ov = Params::new();
            let spec = e.instantiate(&ov, e.default_n).unwrap();
            let opts = RunOptions {
                shift: e.shift(&ov).unwrap(),
                verify: Some(VerifyOptions::default()),
                ..RunOptions::default()
            };
            let (_, results) = run(&spec, &opts).unwrap();
            assert!(!results.is_empty(), "{}", e.name);
            for r in &results {
                assert!(r.verified(), "{}: {:?}", e.name, r.report);
            }
        }
    }
}
