//! Closed-form solutions of `z'^2 = Q(z)` for `deg Q <= 2`.
//!
//! Each family is written around the shift `s0 = -q1/(2 q2)` and the
//! discriminant `D = q1^2 - 4 q0 q2`:
//!
//! | family        | condition            | z(x)                                  |
//! |---------------|----------------------|---------------------------------------|
//! | linear        | q2 = q1 = 0, q0 > 0  | `±sqrt(q0) x + c`                      |
//! | parabolic     | q2 = 0, q1 != 0      | `(q1/4)(x - xc)^2 - q0/q1`             |
//! | exponential   | q2 > 0, D = 0        | `s0 + A exp(±w x)`                     |
//! | hyperbolic    | q2 > 0, D != 0       | `s0 + R cosh(w(x-xc))` / `R sinh(..)`  |
//! | trigonometric | q2 < 0, D > 0        | `s0 ∓ R cos(w(x - xc))`                |

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Anchor, BranchSign};
use crate::poly::Poly;

/// Relative size below which the discriminant is treated as zero.
const DISCRIMINANT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn real_line() -> Self {
        Interval::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    pub fn contains_open(&self, v: f64) -> bool {
        v > self.lo && v < self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Linear,
    Parabolic,
    Exponential,
    Hyperbolic,
    Trigonometric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    /// z = slope x + offset
    Linear { slope: f64, offset: f64 },
    /// z = c (x - xc)^2 + zv
    Parabolic { c: f64, xc: f64, zv: f64 },
    /// z = s0 + amp exp(rate x)
    Exponential { rate: f64, amp: f64, s0: f64 },
    /// z = s0 + amp cosh(w (x - xc)), amp = ±R
    Cosh { w: f64, amp: f64, xc: f64, s0: f64 },
    /// z = s0 + r sinh(rate (x - xc))
    Sinh { rate: f64, r: f64, xc: f64, s0: f64 },
    /// z = s0 - sigma r cos(w (x - xc)), x in (xc, xc + pi/w)
    Trig { w: f64, r: f64, xc: f64, s0: f64 },
}

/// A monotone (or declared-branch) solution `z(x)` of `z'^2 = Q(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateMap {
    q: Poly,
    shape: Shape,
    branch: BranchSign,
    x_domain: Interval,
    z_image: Interval,
}

impl CoordinateMap {
    /// Solves `z'^2 = Q(z)` in closed form. Without an anchor the canonical
    /// particular solution of each family is used.
    pub fn build(q: &Poly, anchor: Option<Anchor>, branch: BranchSign) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::InvalidModel("Q is identically zero".into()));
        }
        if q.degree() > 2 {
            return Err(Error::InvalidModel(format!(
                "deg Q = {} is not a sinusoidal coordinate",
                q.degree()
            )));
        }
        let sigma = branch.value();
        let (q0, q1, q2) = (q.coeff(0), q.coeff(1), q.coeff(2));
        let bad_anchor = |a: Anchor, reason: &str| Error::InvalidAnchor {
            x0: a.x0,
            z0: a.z0,
            reason: reason.to_string(),
        };
        let inf = f64::INFINITY;

        let (shape, x_domain, z_image) = if q2 == 0.0 && q1 == 0.0 {
            if q0 <= 0.0 {
                return Err(Error::InvalidModel(format!(
                    "Q = {q0} admits no real coordinate"
                )));
            }
            let slope = sigma * q0.sqrt();
            let offset = anchor.map_or(0.0, |a| a.z0 - slope * a.x0);
            (
                Shape::Linear { slope, offset },
                Interval::real_line(),
                Interval::real_line(),
            )
        } else if q2 == 0.0 {
            let c = q1 / 4.0;
            let zv = -q0 / q1;
            let xc = match anchor {
                None => 0.0,
                Some(a) => {
                    let t = (a.z0 - zv) / c;
                    if t < 0.0 {
                        return Err(bad_anchor(a, "z0 lies beyond the parabola vertex"));
                    }
                    a.x0 - sigma * t.sqrt()
                }
            };
            let image = if c > 0.0 {
                Interval::new(zv, inf)
            } else {
                Interval::new(-inf, zv)
            };
            (Shape::Parabolic { c, xc, zv }, Interval::real_line(), image)
        } else {
            let s0 = -q1 / (2.0 * q2);
            let disc = q1 * q1 - 4.0 * q0 * q2;
            let scale = (q1 * q1).max((4.0 * q0 * q2).abs());
            let degenerate = disc.abs() <= DISCRIMINANT_TOL * scale;
            if q2 > 0.0 {
                let w = q2.sqrt();
                if degenerate {
                    let rate = sigma * w;
                    let amp = match anchor {
                        None => 1.0,
                        Some(a) => {
                            if a.z0 == s0 {
                                return Err(bad_anchor(a, "z0 sits on the asymptote"));
                            }
                            (a.z0 - s0) * (-rate * a.x0).exp()
                        }
                    };
                    let image = if amp > 0.0 {
                        Interval::new(s0, inf)
                    } else {
                        Interval::new(-inf, s0)
                    };
                    (
                        Shape::Exponential { rate, amp, s0 },
                        Interval::real_line(),
                        image,
                    )
                } else if disc > 0.0 {
                    let r = disc.sqrt() / (2.0 * q2);
                    let (amp, xc) = match anchor {
                        None => (r, 0.0),
                        Some(a) => {
                            let u = (a.z0 - s0) / r;
                            if u.abs() < 1.0 {
                                return Err(bad_anchor(a, "Q(z0) < 0"));
                            }
                            (r * u.signum(), a.x0 - sigma * u.abs().acosh() / w)
                        }
                    };
                    let x_domain = if sigma > 0.0 {
                        Interval::new(xc, inf)
                    } else {
                        Interval::new(-inf, xc)
                    };
                    let image = if amp > 0.0 {
                        Interval::new(s0 + r, inf)
                    } else {
                        Interval::new(-inf, s0 - r)
                    };
                    (Shape::Cosh { w, amp, xc, s0 }, x_domain, image)
                } else {
                    let r = (-disc).sqrt() / (2.0 * q2);
                    let rate = sigma * w;
                    let xc = anchor.map_or(0.0, |a| a.x0 - ((a.z0 - s0) / r).asinh() / rate);
                    (
                        Shape::Sinh { rate, r, xc, s0 },
                        Interval::real_line(),
                        Interval::real_line(),
                    )
                }
            } else {
                if degenerate || disc < 0.0 {
                    return Err(Error::InvalidModel(format!(
                        "Q = {q} is nowhere positive"
                    )));
                }
                let w = (-q2).sqrt();
                let r = disc.sqrt() / (2.0 * w * w);
                let xc = match anchor {
                    None => 0.0,
                    Some(a) => {
                        let u = -sigma * (a.z0 - s0) / r;
                        if u.abs() > 1.0 {
                            return Err(bad_anchor(a, "Q(z0) < 0"));
                        }
                        a.x0 - u.acos() / w
                    }
                };
                (
                    Shape::Trig { w, r, xc, s0 },
                    Interval::new(xc, xc + PI / w),
                    Interval::new(s0 - r, s0 + r),
                )
            }
        };

        if let Some(a) = anchor {
            if !x_domain.contains(a.x0) {
                return Err(bad_anchor(a, "x0 lies outside the monotone branch"));
            }
        }
        Ok(CoordinateMap {
            q: q.clone(),
            shape,
            branch,
            x_domain,
            z_image,
        })
    }

    pub fn family(&self) -> Family {
        match self.shape {
            Shape::Linear { .. } => Family::Linear,
            Shape::Parabolic { .. } => Family::Parabolic,
            Shape::Exponential { .. } => Family::Exponential,
            Shape::Cosh { .. } | Shape::Sinh { .. } => Family::Hyperbolic,
            Shape::Trig { .. } => Family::Trigonometric,
        }
    }

    pub fn q(&self) -> &Poly {
        &self.q
    }

    pub fn branch(&self) -> BranchSign {
        self.branch
    }

    pub fn x_domain(&self) -> Interval {
        self.x_domain
    }

    pub fn z_image(&self) -> Interval {
        self.z_image
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if x.is_nan() || !self.x_domain.contains(x) {
            return Err(Error::Domain {
                what: "x",
                value: x,
                lo: self.x_domain.lo,
                hi: self.x_domain.hi,
            });
        }
        Ok(())
    }

    pub fn z_of_x(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        Ok(self.z_unchecked(x))
    }

    pub fn dz_dx(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        Ok(self.dz_unchecked(x))
    }

    pub(crate) fn z_unchecked(&self, x: f64) -> f64 {
        match self.shape {
            Shape::Linear { slope, offset } => slope * x + offset,
            Shape::Parabolic { c, xc, zv } => c * (x - xc) * (x - xc) + zv,
            Shape::Exponential { rate, amp, s0 } => s0 + amp * (rate * x).exp(),
            Shape::Cosh { w, amp, xc, s0 } => s0 + amp * (w * (x - xc)).cosh(),
            Shape::Sinh { rate, r, xc, s0 } => s0 + r * (rate * (x - xc)).sinh(),
            Shape::Trig { w, r, xc, s0 } => s0 - self.branch.value() * r * (w * (x - xc)).cos(),
        }
    }

    pub(crate) fn dz_unchecked(&self, x: f64) -> f64 {
        match self.shape {
            Shape::Linear { slope, .. } => slope,
            Shape::Parabolic { c, xc, .. } => 2.0 * c * (x - xc),
            Shape::Exponential { rate, amp, .. } => amp * rate * (rate * x).exp(),
            Shape::Cosh { w, amp, xc, .. } => amp * w * (w * (x - xc)).sinh(),
            Shape::Sinh { rate, r, xc, .. } => r * rate * (rate * (x - xc)).cosh(),
            Shape::Trig { w, r, xc, .. } => self.branch.value() * r * w * (w * (x - xc)).sin(),
        }
    }

    /// Inverse on the declared branch.
    pub fn x_of_z(&self, z: f64) -> Result<f64> {
        let sigma = self.branch.value();
        let out_of_image = || Error::Domain {
            what: "z",
            value: z,
            lo: self.z_image.lo,
            hi: self.z_image.hi,
        };
        if z.is_nan() || !self.z_image.contains(z) {
            return Err(out_of_image());
        }
        let x = match self.shape {
            Shape::Linear { slope, offset } => (z - offset) / slope,
            Shape::Parabolic { c, xc, zv } => xc + sigma * ((z - zv) / c).max(0.0).sqrt(),
            Shape::Exponential { rate, amp, s0 } => {
                let u = (z - s0) / amp;
                if u <= 0.0 {
                    return Err(out_of_image());
                }
                u.ln() / rate
            }
            Shape::Cosh { w, amp, xc, s0 } => xc + sigma * ((z - s0) / amp).max(1.0).acosh() / w,
            Shape::Sinh { rate, r, xc, s0 } => xc + ((z - s0) / r).asinh() / rate,
            Shape::Trig { w, r, xc, s0 } => {
                xc + (-sigma * (z - s0) / r).clamp(-1.0, 1.0).acos() / w
            }
        };
        Ok(x)
    }

    /// Every `x` in the domain with `z(x) = z` (two points for the
    /// symmetric parabolic family, at most one otherwise).
    pub fn preimages(&self, z: f64) -> Vec<f64> {
        if !self.z_image.contains(z) {
            return Vec::new();
        }
        match self.shape {
            Shape::Parabolic { c, xc, zv } => {
                let d = ((z - zv) / c).max(0.0).sqrt();
                if d == 0.0 {
                    vec![xc]
                } else {
                    vec![xc - d, xc + d]
                }
            }
            _ => self
                .x_of_z(z)
                .ok()
                .filter(|x| self.x_domain.contains(*x))
                .into_iter()
                .collect(),
        }
    }

    /// Human-readable closed form.
    pub fn describe(&self) -> String {
        match self.shape {
            Shape::Linear { slope, offset } => format!("z = {slope}*x + {offset}"),
            Shape::Parabolic { c, xc, zv } => format!("z = {c}*(x - {xc})^2 + {zv}"),
            Shape::Exponential { rate, amp, s0 } => format!("z = {s0} + {amp}*exp({rate}*x)"),
            Shape::Cosh { w, amp, xc, s0 } => format!("z = {s0} + {amp}*cosh({w}*(x - {xc}))"),
            Shape::Sinh { rate, r, xc, s0 } => format!("z = {s0} + {r}*sinh({rate}*(x - {xc}))"),
            Shape::Trig { w, r, xc, s0 } => format!(
                "z = {s0} {} {r}*cos({w}*(x - {xc}))",
                if self.branch.value() > 0.0 { '-' } else { '+' }
            ),
        }
    }
}
