//! Symbolic report of the constructed potential, its energy and the root
//! equations, with a term-by-term comparison against the closed forms
//! usually quoted for the whole-line, half-line and `sin^2` models.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::error::Result;
use crate::model::{classify, ModelSpec};
use crate::poly::Poly;
use crate::potential::v0_pfe;

const ZERO_TOL: f64 = 1e-14;

/// Laurent-type local part of a root equation: coefficients of `z_k^j`
/// for `j >= -1`, plus simple poles `c/(z_k - a)` at `a != 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LocalTerms {
    pub powers: BTreeMap<i32, f64>,
    pub poles: Vec<(f64, f64)>,
}

impl LocalTerms {
    fn add_power(&mut self, j: i32, c: f64) {
        *self.powers.entry(j).or_insert(0.0) += c;
    }

    fn add_poly(&mut self, p: &Poly, scale: f64) {
        for (j, c) in p.coeffs().iter().enumerate() {
            self.add_power(j as i32, scale * c);
        }
    }

    fn add_pole(&mut self, a: f64, c: f64) {
        if a.abs() <= ZERO_TOL {
            self.add_power(-1, c);
        } else if let Some(p) = self.poles.iter_mut().find(|p| (p.0 - a).abs() <= ZERO_TOL) {
            p.1 += c;
        } else {
            self.poles.push((a, c));
        }
    }

    /// `self - other`, with zero entries dropped.
    pub fn minus(&self, other: &LocalTerms) -> LocalTerms {
        let mut out = self.clone();
        for (&j, &c) in &other.powers {
            out.add_power(j, -c);
        }
        for &(a, c) in &other.poles {
            out.add_pole(a, -c);
        }
        out.powers.retain(|_, c| c.abs() > ZERO_TOL);
        out.poles.retain(|p| p.1.abs() > ZERO_TOL);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.powers.values().all(|c| c.abs() <= ZERO_TOL) && self.poles.iter().all(|p| p.1.abs() <= ZERO_TOL)
    }
}

fn monomial(j: i32) -> String {
    match j {
        0 => String::new(),
        1 => "*z_k".into(),
        -1 => "/z_k".into(),
        _ => format!("*z_k^{j}"),
    }
}

impl fmt::Display for LocalTerms {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (&j, &c) in self.powers.iter().rev() {
            if c.abs() > ZERO_TOL {
                parts.push((c, monomial(j)));
            }
        }
        for &(a, c) in &self.poles {
            parts.push((c, format!("/(z_k - {a})")));
        }
        if parts.is_empty() {
            return f.write_str("0");
        }
        for (i, (c, m)) in parts.iter().enumerate() {
            match (i, *c < 0.0) {
                (0, true) => write!(f, "-{}{m}", c.abs())?,
                (0, false) => write!(f, "{c}{m}")?,
                (_, true) => write!(f, " - {}{m}", c.abs())?,
                (_, false) => write!(f, " + {c}{m}")?,
            }
        }
        Ok(())
    }
}

/// Local part of the residue condition
/// `P(z_k) - Q'(z_k)/4 - Q(z_k) Σ_j mu_j/(z_k - a_j)`, the remaining term
/// being `-Q(z_k) Σ_{l≠k} 1/(z_k - z_l)`.
pub fn residue_form(spec: &ModelSpec) -> LocalTerms {
    let mut t = LocalTerms::default();
    t.add_poly(&spec.p, 1.0);
    t.add_poly(&spec.q.derivative(), -0.25);
    for s in &spec.singularities {
        let (a, mu) = (s.location, s.exponent);
        t.add_poly(&spec.q.divided_difference(a), -mu);
        let qa = spec.q.eval(a);
        if qa.abs() > ZERO_TOL {
            t.add_pole(a, -mu * qa);
        }
    }
    t.powers.retain(|_, c| c.abs() > ZERO_TOL);
    t
}

/// A closed form the residue condition is compared against.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceForm {
    pub label: &'static str,
    pub terms: LocalTerms,
}

/// Reference form for specs of a recognised shape.
pub fn reference_form(spec: &ModelSpec) -> Option<ReferenceForm> {
    let (q0, q1, q2) = (spec.q0(), spec.q1(), spec.q2());
    match spec.singularities.as_slice() {
        [] => {
            let mut t = LocalTerms::default();
            t.add_poly(&spec.p, 1.0);
            t.add_power(1, -q2 / 2.0);
            t.add_power(0, -q1 / 4.0);
            t.powers.retain(|_, c| c.abs() > ZERO_TOL);
            Some(ReferenceForm {
                label: "whole line: P(z_k) - q2 z_k/2 - q1/4",
                terms: t,
            })
        }
        [s] if s.location == 0.0 => {
            let p = s.exponent;
            let mut t = LocalTerms::default();
            t.add_poly(&spec.p, 1.0);
            t.add_power(-1, p * q0);
            t.add_power(1, -(p + 0.5) * q2);
            t.add_power(0, -(p + 0.25) * q1);
            t.powers.retain(|_, c| c.abs() > ZERO_TOL);
            Some(ReferenceForm {
                label: "half line: P(z_k) + p q0/z_k - (p + 1/2) q2 z_k - (p + 1/4) q1",
                terms: t,
            })
        }
        [s1, s2] if s1.location == 0.0 && s2.location == 1.0 => {
            let (c, pc) = (spec.q.coeffs(), spec.p.coeffs());
            let q_ok = c.len() == 3 && c[0] == 0.0 && c[1] == 4.0 && c[2] == -4.0;
            let p_ok = pc.len() == 3 && pc[0] == 0.0 && pc[1] == -pc[2];
            if !(q_ok && p_ok) {
                return None;
            }
            let a = pc[2] / 4.0;
            let (p1, p2) = (s1.exponent, s2.exponent);
            let mut t = LocalTerms::default();
            t.add_power(2, 4.0 * a);
            t.add_power(1, -2.0 * (2.0 * (a - p1 - p2) - 1.0));
            t.add_power(0, -1.0);
            t.powers.retain(|_, c| c.abs() > ZERO_TOL);
            Some(ReferenceForm {
                label: "sin^2 x: 4a z_k^2 - 2(2(a - p1 - p2) - 1) z_k - 1",
                terms: t,
            })
        }
        _ => None,
    }
}

fn power_sum(m: usize) -> String {
    match m {
        0 => "N".into(),
        1 => "S1".into(),
        _ => format!("S{m}"),
    }
}

/// Coefficients of the smooth part of `ΔV_N` as linear combinations of the
/// power sums `S_m = Σ_k z_k^m` (`S_0 = N`).
fn delta_v_symbolic(spec: &ModelSpec) -> Vec<(usize, Vec<(f64, String)>)> {
    let r = &spec.p - &spec.q.derivative().scale(0.25);
    let rc = r.coeffs();
    let mut out = Vec::new();
    for j in 0..rc.len().saturating_sub(1) {
        let mut terms = Vec::new();
        for (i, &ri) in rc.iter().enumerate().skip(j + 1) {
            if ri != 0.0 {
                terms.push((-2.0 * ri, power_sum(i - 1 - j)));
            }
        }
        if !terms.is_empty() {
            out.push((j, terms));
        }
    }
    out
}

fn linear_combination(terms: &[(f64, String)]) -> String {
    let mut s = String::new();
    for (i, (c, name)) in terms.iter().enumerate() {
        let sign = if *c < 0.0 { "-" } else { "+" };
        if i == 0 {
            if *c < 0.0 {
                s.push('-');
            }
        } else {
            write!(s, " {sign} ").unwrap();
        }
        if name == "1" {
            write!(s, "{}", c.abs()).unwrap();
        } else if c.abs() == 1.0 {
            s.push_str(name);
        } else {
            write!(s, "{}*{name}", c.abs()).unwrap();
        }
    }
    s
}

/// Full text report for a spec.
pub fn report(spec: &ModelSpec) -> Result<String> {
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "Q(z) = {}", spec.q).unwrap();
    writeln!(w, "P(z) = {}", spec.p).unwrap();
    for s in &spec.singularities {
        writeln!(w, "singularity: a = {}, mu = {}", s.location, s.exponent).unwrap();
    }
    writeln!(w, "N = {}", spec.n).unwrap();
    writeln!(w, "class: {}", classify(spec)?).unwrap();
    writeln!(w).unwrap();

    writeln!(w, "V0(z) = {}", v0_pfe(spec)?).unwrap();
    let q2 = spec.q2();
    let nf = spec.n as f64;
    let mu_sum = spec.exponent_sum();
    let c0 = q2 * nf * (nf - 1.0) + 2.0 * q2 * nf * mu_sum;
    writeln!(w, "smooth part of Delta V_N, with S_m = sum_k z_k^m:").unwrap();
    let sym = delta_v_symbolic(spec);
    for (j, terms) in sym.iter().rev() {
        let label = match j {
            0 => "z^0".to_string(),
            1 => "z^1".to_string(),
            _ => format!("z^{j}"),
        };
        let mut terms = terms.clone();
        if *j == 0 && c0 != 0.0 {
            terms.push((c0, "1".into()));
        }
        writeln!(w, "  {label}: {}", linear_combination(&terms)).unwrap();
    }
    if sym.iter().all(|(j, _)| *j != 0) && c0 != 0.0 {
        writeln!(w, "  z^0: {c0}").unwrap();
    }
    for s in &spec.singularities {
        let c = 2.0 * s.exponent * spec.q.eval(s.location);
        if c != 0.0 {
            writeln!(w, "  1/(z - {}): {c} * sum_k 1/({} - z_k)", s.location, s.location).unwrap();
        }
    }
    let mut e_terms: Vec<(f64, String)> = sym
        .iter()
        .find(|(j, _)| *j == 0)
        .map(|(_, t)| t.iter().map(|(c, n)| (-c, n.clone())).collect())
        .unwrap_or_default();
    if c0 != 0.0 {
        e_terms.push((-c0, "1".into()));
    }
    let e = if e_terms.is_empty() {
        "0".to_string()
    } else {
        linear_combination(&e_terms)
    };
    writeln!(w, "E = -(constant of Delta V_N) = {e}").unwrap();
    writeln!(w).unwrap();

    let res = residue_form(spec);
    writeln!(w, "root equations, k = 1..N:").unwrap();
    writeln!(w, "  {} - Q(z_k) sum_{{l!=k}} 1/(z_k - z_l) = 0", res).unwrap();
    match reference_form(spec) {
        Some(r) => {
            writeln!(w, "reference form ({}):", r.label).unwrap();
            writeln!(w, "  {} - Q(z_k) sum_{{l!=k}} 1/(z_k - z_l) = 0", r.terms).unwrap();
            let d = res.minus(&r.terms);
            writeln!(w, "term-by-term difference (root equations - reference):").unwrap();
            if d.is_zero() {
                writeln!(w, "  none").unwrap();
            } else {
                for (&j, &c) in &d.powers {
                    let m = match j {
                        0 => "1".to_string(),
                        1 => "z_k".to_string(),
                        -1 => "1/z_k".to_string(),
                        _ => format!("z_k^{j}"),
                    };
                    writeln!(w, "  {m}: {c}").unwrap();
                }
                for &(a, c) in &d.poles {
                    writeln!(w, "  1/(z_k - {a}): {c}").unwrap();
                }
            }
        }
        None => writeln!(w, "reference form: none for this shape").unwrap(),
    }
    Ok(out)
}
