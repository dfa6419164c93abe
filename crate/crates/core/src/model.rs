//! The model input space and the degree-based solvability classifier.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Minimum separation between two singularity locations.
pub const SINGULARITY_SEPARATION: f64 = 1e-12;

pub const MAX_P_DEGREE: usize = 3;
pub const MAX_Q_DEGREE: usize = 2;

/// Sign choice for `z' = ±sqrt(Q(z))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(into = "i8", try_from = "i8")]
pub enum BranchSign {
    #[default]
    Plus,
    Minus,
}

impl BranchSign {
    pub fn value(self) -> f64 {
        match self {
            BranchSign::Plus => 1.0,
            BranchSign::Minus => -1.0,
        }
    }
}

impl From<BranchSign> for i8 {
    fn from(b: BranchSign) -> i8 {
        match b {
            BranchSign::Plus => 1,
            BranchSign::Minus => -1,
        }
    }
}

impl TryFrom<i8> for BranchSign {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(BranchSign::Plus),
            -1 => Ok(BranchSign::Minus),
            other => Err(format!("branch must be +1 or -1, got {other}")),
        }
    }
}

/// A log-singularity `-mu ln|z - a|` of the prepotential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Singularity {
    #[serde(rename = "a")]
    pub location: f64,
    #[serde(rename = "mu")]
    pub exponent: f64,
}

impl Singularity {
    pub fn new(location: f64, exponent: f64) -> Self {
        Singularity { location, exponent }
    }
}

/// Point `(x0, z0)` through which the coordinate map is required to pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub x0: f64,
    pub z0: f64,
}

/// Everything that defines a model: `z'^2 = Q(z)`, `W0' z' = P(z)`,
/// boundary singularities and the number of roots `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub q: Poly,
    pub p: Poly,
    pub singularities: Vec<Singularity>,
    pub n: usize,
    pub branch: BranchSign,
    pub anchor: Option<Anchor>,
}

impl ModelSpec {
    /// Builds a spec and rejects it if any structural invariant fails.
    pub fn new(q: Poly, p: Poly, singularities: Vec<Singularity>, n: usize) -> Result<Self> {
        let spec = ModelSpec {
            q,
            p,
            singularities,
            n,
            branch: BranchSign::Plus,
            anchor: None,
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn with_branch(mut self, branch: BranchSign) -> Self {
        self.branch = branch;
        self
    }

    pub fn with_anchor(mut self, anchor: Option<Anchor>) -> Self {
        self.anchor = anchor;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    /// Degree `m` of `P`.
    pub fn m(&self) -> usize {
        self.p.degree()
    }

    /// Degree `n` of `Q` (not the root count).
    pub fn q_degree(&self) -> usize {
        self.q.degree()
    }

    pub fn q2(&self) -> f64 {
        self.q.coeff(2)
    }

    pub fn q1(&self) -> f64 {
        self.q.coeff(1)
    }

    pub fn q0(&self) -> f64 {
        self.q.coeff(0)
    }

    pub fn exponent_sum(&self) -> f64 {
        self.singularities.iter().map(|s| s.exponent).sum()
    }

    fn structural_errors(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.q.is_zero() {
            out.push("Q is identically zero".to_string());
        }
        if self.q.degree() > MAX_Q_DEGREE {
            out.push(format!(
                "deg Q = {} exceeds {MAX_Q_DEGREE}",
                self.q.degree()
            ));
        }
        if self.p.degree() > MAX_P_DEGREE {
            out.push(format!(
                "deg P = {} exceeds {MAX_P_DEGREE}",
                self.p.degree()
            ));
        }
        if self.singularities.len() > 2 {
            out.push(format!(
                "at most two singularities are supported, got {}",
                self.singularities.len()
            ));
        }
        for s in &self.singularities {
            if !s.location.is_finite() || !s.exponent.is_finite() {
                out.push(format!(
                    "singularity ({}, {}) is not finite",
                    s.location, s.exponent
                ));
            }
        }
        for (i, a) in self.singularities.iter().enumerate() {
            for b in &self.singularities[i + 1..] {
                if (a.location - b.location).abs() <= SINGULARITY_SEPARATION {
                    out.push(format!(
                        "singularities at {} and {} coincide",
                        a.location, b.location
                    ));
                }
            }
        }
        if self
            .q
            .coeffs()
            .iter()
            .chain(self.p.coeffs())
            .any(|c| !c.is_finite())
        {
            out.push("non-finite polynomial coefficient".to_string());
        }
        out
    }

    /// Structural validity; the error lists every violated invariant.
    pub fn check(&self) -> Result<()> {
        let errs = self.structural_errors();
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidModel(errs.join("; ")))
        }
    }

    /// Stable 64-bit hash of the defining data, used to seed pseudo-random
    /// initial guesses.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Sha256::new();
        let mut put = |tag: &[u8], vals: &[f64]| {
            h.update(tag);
            h.update((vals.len() as u64).to_le_bytes());
            for v in vals {
                h.update(v.to_bits().to_le_bytes());
            }
        };
        put(b"Q", self.q.coeffs());
        put(b"P", self.p.coeffs());
        let sing: Vec<f64> = self
            .singularities
            .iter()
            .flat_map(|s| [s.location, s.exponent])
            .collect();
        put(b"S", &sing);
        put(b"N", &[self.n as f64]);
        put(b"B", &[self.branch.value()]);
        if let Some(a) = self.anchor {
            put(b"A", &[a.x0, a.z0]);
        }
        let digest = h.finalize();
        u64::from_le_bytes(digest[..8].try_into().unwrap())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolvabilityTag {
    ExactlySolvable,
    QesType1,
    QesType2,
    QesHigherType,
    QesSingularityInduced,
}

impl fmt::Display for SolvabilityTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolvabilityTag::ExactlySolvable => "Exactly-Solvable",
            SolvabilityTag::QesType1 => "QES-Type1",
            SolvabilityTag::QesType2 => "QES-Type2",
            SolvabilityTag::QesHigherType => "QES-HigherType",
            SolvabilityTag::QesSingularityInduced => "QES-SingularityInduced",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvabilityClass {
    pub tag: SolvabilityTag,
    pub rationale: String,
}

impl fmt::Display for SolvabilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.tag, self.rationale)
    }
}

/// Classifies by the degrees `m = deg P`, `n = deg Q`, and by whether a
/// singularity with nonzero exponent sits where `Q` does not vanish.
pub fn classify(spec: &ModelSpec) -> Result<SolvabilityClass> {
    spec.check()?;
    let m = spec.m();
    let n = spec.q_degree();
    let k = (m as i64).max(n as i64 - 1);

    let coupled: Vec<&Singularity> = spec
        .singularities
        .iter()
        .filter(|s| s.exponent != 0.0 && spec.q.eval(s.location) != 0.0)
        .collect();

    let (tag, rationale) = if k <= 1 && !coupled.is_empty() {
        let s = coupled[0];
        (
            SolvabilityTag::QesSingularityInduced,
            format!(
                "max{{m,n-1}}={k} but mu={} at a={} with Q(a)={} != 0 couples the roots to 1/(z-a)",
                s.exponent,
                s.location,
                spec.q.eval(s.location)
            ),
        )
    } else if m >= 4 {
        (SolvabilityTag::QesHigherType, format!("m={m} >= 4"))
    } else if m == 3 {
        (
            SolvabilityTag::QesType2,
            format!("m=3: roots enter the linear-in-z term (max{{m,n-1}}={k})"),
        )
    } else if k == 2 {
        (SolvabilityTag::QesType1, "max{m,n-1}=2".to_string())
    } else {
        (SolvabilityTag::ExactlySolvable, format!("max{{m,n-1}}={k}<=1"))
    };
    Ok(SolvabilityClass { tag, rationale })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{s}: {}", self.message)
    }
}

/// Outcome of the cheap asymptotic square-integrability rule for `exp(-W0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalizabilityHint {
    Satisfied,
    Violated,
    /// No closed-form rule applies; settle it with a numerical check.
    Deferred,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub diagnostics: Vec<Diagnostic>,
    pub normalizability: NormalizabilityHint,
}

impl Validation {
    pub fn is_clean(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.diagnostics
            .iter()
            .any(|d| d.severity == Severity::Error)
    }
}

pub fn validate(spec: &ModelSpec) -> Validation {
    let mut diagnostics: Vec<Diagnostic> = spec
        .structural_errors()
        .into_iter()
        .map(|message| Diagnostic {
            severity: Severity::Error,
            message,
        })
        .collect();
    if !diagnostics.is_empty() {
        return Validation {
            diagnostics,
            normalizability: NormalizabilityHint::Deferred,
        };
    }

    for s in &spec.singularities {
        let is_morse_exception = s.exponent == -(spec.n as f64);
        if s.exponent < 0.0 && !is_morse_exception {
            diagnostics.push(Diagnostic {
                severity: Severity::Warning,
                message: format!(
                    "negative exponent mu={} at a={} (only mu=-N is a known special case)",
                    s.exponent, s.location
                ),
            });
        }
    }

    let normalizability = asymptotic_rule(spec);
    if normalizability == NormalizabilityHint::Violated {
        diagnostics.push(Diagnostic {
            severity: Severity::Warning,
            message: "phi_0 = exp(-W_0) is not square-integrable: W_0 does not grow at the ends of the domain"
                .to_string(),
        });
    }
    Validation {
        diagnostics,
        normalizability,
    }
}

/// Leading-order growth of `W0(z) = ∫ P/Q dz` for the polynomial coordinate
/// families on the whole line.
fn asymptotic_rule(spec: &ModelSpec) -> NormalizabilityHint {
    if !spec.singularities.is_empty() {
        return NormalizabilityHint::Deferred;
    }
    let (q0, q1, q2) = (spec.q0(), spec.q1(), spec.q2());
    let m = spec.m();
    let cm = spec.p.leading();
    let ok = |b: bool| {
        if b {
            NormalizabilityHint::Satisfied
        } else {
            NormalizabilityHint::Violated
        }
    };
    if q2 == 0.0 && q1 == 0.0 {
        if q0 <= 0.0 {
            return NormalizabilityHint::Deferred;
        }
        // W0 ~ cm z^{m+1} / ((m+1) q0) on the whole z line
        ok((m + 1) % 2 == 0 && cm / q0 > 0.0)
    } else if q2 == 0.0 {
        // z -> sign(q1) * inf at both ends of the x line
        let s = q1.signum();
        if m == 0 {
            // phi^2 ~ |z|^{-2 c0/q1} ~ |x|^{-4 c0/q1}
            ok(4.0 * cm / q1 > 1.0)
        } else {
            ok(cm * s.powi(m as i32) / q1 > 0.0)
        }
    } else {
        NormalizabilityHint::Deferred
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(q: &[f64], p: &[f64], s: &[(f64, f64)]) -> ModelSpec {
        ModelSpec::new(
            Poly::new(q.to_vec()),
            Poly::new(p.to_vec()),
            s.iter().map(|&(a, mu)| Singularity::new(a, mu)).collect(),
            1,
        )
        .unwrap()
    }

    #[test]
    fn classify_examples() {
        let b = 1.3;
        let a = 0.7;
        assert_eq!(
            classify(&spec(&[1.0], &[0.0, b], &[])).unwrap().tag,
            SolvabilityTag::ExactlySolvable
        );
        let sextic = classify(&spec(&[0.0, 4.0], &[0.0, 2.0 * b, 2.0 * a], &[])).unwrap();
        assert_eq!(sextic.tag, SolvabilityTag::QesType1);
        assert_eq!(sextic.to_string(), "QES-Type1: max{m,n-1}=2");
        assert_eq!(
            classify(&spec(&[1.0], &[0.0, b, 0.0, a], &[])).unwrap().tag,
            SolvabilityTag::QesType2
        );
        assert_eq!(
            classify(&spec(&[1.0], &[a, b], &[(0.0, 0.4)])).unwrap().tag,
            SolvabilityTag::QesSingularityInduced
        );
    }

    #[test]
    fn classify_more() {
        // half-line sextic: Q(0) = 0 so no promotion
        assert_eq!(
            classify(&spec(&[0.0, 4.0], &[0.0, 0.0, 2.0], &[(0.0, 0.3)]))
                .unwrap()
                .tag,
            SolvabilityTag::QesType1
        );
        // Morse: Q = z^2, m = 1
        assert_eq!(
            classify(&spec(&[0.0, 0.0, 1.0], &[-2.0, 5.0], &[])).unwrap().tag,
            SolvabilityTag::ExactlySolvable
        );
        // trigonometric interval model
        assert_eq!(
            classify(&spec(
                &[0.0, 4.0, -4.0],
                &[0.0, -4.0, 4.0],
                &[(0.0, 0.25), (1.0, 0.25)]
            ))
            .unwrap()
            .tag,
            SolvabilityTag::QesType1
        );
        // zero exponent never promotes
        assert_eq!(
            classify(&spec(&[1.0], &[0.3, 1.0], &[(0.0, 0.0)])).unwrap().tag,
            SolvabilityTag::ExactlySolvable
        );
        // general a_j with Q(a_j) != 0
        assert_eq!(
            classify(&spec(&[0.0, 4.0], &[0.0, 1.0], &[(2.0, 0.5)]))
                .unwrap()
                .tag,
            SolvabilityTag::QesSingularityInduced
        );
    }

    #[test]
    fn invalid_specs() {
        let e = ModelSpec::new(Poly::zero(), Poly::new(vec![1.0]), vec![], 0).unwrap_err();
        assert!(e.to_string().contains("identically zero"));
        let bad = ModelSpec {
            q: Poly::new(vec![1.0]),
            p: Poly::new(vec![0.0, 0.0, 0.0, 0.0, 1.0]),
            singularities: vec![],
            n: 1,
            branch: BranchSign::Plus,
            anchor: None,
        };
        assert!(classify(&bad).is_err());
        assert!(validate(&bad).has_errors());
        let cubic_q = ModelSpec {
            q: Poly::new(vec![0.0, 0.0, 0.0, 1.0]),
            ..bad.clone()
        };
        let msg = cubic_q.check().unwrap_err().to_string();
        assert!(msg.contains("deg Q = 3") && msg.contains("deg P = 4"));
    }

    #[test]
    fn validate_examples() {
        let v = validate(&spec(&[1.0], &[0.0, -1.0], &[]));
        assert_eq!(v.normalizability, NormalizabilityHint::Violated);
        assert!(v.diagnostics[0].message.contains("not square-integrable"));

        let v = validate(&spec(&[0.0, 4.0], &[0.0, 0.0, 2.0], &[]));
        assert!(v.is_clean());
        assert_eq!(v.normalizability, NormalizabilityHint::Satisfied);

        let dup = ModelSpec {
            q: Poly::new(vec![1.0]),
            p: Poly::new(vec![0.0, 1.0]),
            singularities: vec![Singularity::new(0.5, 1.0), Singularity::new(0.5, 2.0)],
            n: 0,
            branch: BranchSign::Plus,
            anchor: None,
        };
        let v = validate(&dup);
        assert!(v.has_errors());
        assert!(v.diagnostics[0].message.contains("coincide"));
    }

    #[test]
    fn negative_exponent_warnings() {
        let morse_p = spec(&[0.0, 0.0, 1.0], &[0.0, -5.0, 0.5], &[(0.0, -1.0)]);
        assert!(validate(&morse_p).is_clean());
        let other = spec(&[0.0, 0.0, 1.0], &[0.0, -5.0, 0.5], &[(0.0, -0.5)]);
        let v = validate(&other);
        assert_eq!(v.diagnostics.len(), 1);
        assert_eq!(v.diagnostics[0].severity, Severity::Warning);
        assert_eq!(v.normalizability, NormalizabilityHint::Deferred);
    }

    #[test]
    fn fingerprint_is_stable_and_sensitive() {
        let a = spec(&[1.0], &[0.0, 1.0], &[]);
        let b = spec(&[1.0], &[0.0, 1.0], &[]);
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), a.clone().with_n(2).fingerprint());
    }

    proptest! {
        #[test]
        fn classification_invariant_under_positive_rescaling(
            p in prop::collection::vec(-5.0f64..5.0, 1..5),
            q in prop::collection::vec(-5.0f64..5.0, 1..4),
            lambda in 0.01f64..100.0,
            mu in -2.0f64..2.0,
        ) {
            let q = Poly::new(q);
            prop_assume!(!q.is_zero());
            let sing = vec![Singularity::new(0.0, mu)];
            let s1 = ModelSpec::new(q.clone(), Poly::new(p.clone()), sing.clone(), 2).unwrap();
            let s2 = ModelSpec::new(q, Poly::new(p).scale(lambda), sing, 2).unwrap();
            prop_assume!(s1.m() == s2.m());
            prop_assert_eq!(classify(&s1).unwrap().tag, classify(&s2).unwrap().tag);
        }
    }
}
