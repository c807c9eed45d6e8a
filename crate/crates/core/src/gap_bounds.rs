//! Exact verification of the gap inequalities for the Zalcman family
//! `D = 𝔻 \ ∪ D̄(2^-l, 2^-3l)` and its neighborhoods `D^{t_j}`, plus the two
//! constructive steps that transfer them to the tube domains `Ω_k`.
//!
//! Every quantity is a [`PowerSum`]. Sup and inf of `δ_{D^t}` over `∂D` are
//! computed component by component from circle-to-circle distance ranges, not
//! from the simplified end formulas; the end formulas are checked against them.

use std::cmp::Ordering;

use serde::Serialize;

use crate::dyadic::PowerSum;
use crate::error::{Error, Result};
use crate::geometry::hole_shrink_exponent;

/// Holes of `D` enumerated explicitly; the rest sit inside `D̄(0, 2^-HOLES)`
/// and are dominated by the accumulation point.
pub const HOLES: u32 = 40;

pub const J_MIN: u32 = 18;
pub const J_MAX: u32 = 24;

/// Real-centered circle (radius zero for a point).
#[derive(Debug, Clone)]
struct Circle {
    center: PowerSum,
    radius: PowerSum,
}

fn circ(center: PowerSum, radius: PowerSum) -> Circle {
    Circle { center, radius }
}

/// Range of distances from points of `a` to the circle `b`. The circles are
/// either nested or disjoint.
fn distance_range(a: &Circle, b: &Circle) -> Result<(PowerSum, PowerSum)> {
    let d = (a.center.clone() - b.center.clone()).abs()?;
    let lo = (d.clone() - a.radius.clone()).abs()?;
    let hi = d + a.radius.clone();
    if lo.compare(&b.radius)? != Ordering::Less {
        Ok((lo - b.radius.clone(), hi - b.radius.clone()))
    } else if hi.compare(&b.radius)? != Ordering::Greater {
        Ok((b.radius.clone() - hi, b.radius.clone() - lo))
    } else {
        Err(Error::Precondition("circles cross".into()))
    }
}

/// The shrink `s_j = 2^-2^(j/3)`, as an exact power of two.
pub fn shrink(j: u32) -> PowerSum {
    PowerSum::pow2(-hole_shrink_exponent(0.5f64.powi(j as i32)))
}

/// `e^{-log 2 / t^{1/3}}` at `t = 2^-j`, written as the power of two it equals.
pub fn lower_bound(j: u32) -> PowerSum {
    let t = 0.5f64.powi(j as i32);
    PowerSum::pow2(-hole_shrink_exponent(t))
}

struct Config {
    /// Boundary components of `D`: outer circle, holes, accumulation point.
    base: Vec<Circle>,
    /// Boundary components of `D^{t_j}`: outer circle first, then holes.
    member: Vec<Circle>,
}

fn configuration(j: u32) -> Result<Config> {
    let s = shrink(j);
    let one = PowerSum::int(1);
    let mut base = vec![circ(PowerSum::zero(), one.clone())];
    let mut member = vec![circ(PowerSum::zero(), one + s.clone())];
    for l in 1..=HOLES {
        let x = PowerSum::pow2(-(l as f64));
        let r = PowerSum::pow2(-3.0 * l as f64);
        base.push(circ(x.clone(), r.clone()));
        if l <= j {
            let rt = r - s.clone();
            if rt.sign()? == Ordering::Greater {
                member.push(circ(x, rt));
            }
        }
    }
    base.push(circ(PowerSum::zero(), PowerSum::zero()));
    Ok(Config { base, member })
}

/// Signed distance of a real point to a domain given as outer circle plus
/// holes (and, for `D`, the accumulation point treated as a hole of radius 0).
fn signed_real(x: &PowerSum, comps: &[Circle]) -> Result<PowerSum> {
    let outer = &comps[0];
    let mut best = outer.radius.clone() - (x.clone() - outer.center.clone()).abs()?;
    for h in &comps[1..] {
        let v = (x.clone() - h.center.clone()).abs()? - h.radius.clone();
        best = best.min(&v)?;
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapBoundRow {
    pub j: u32,
    pub t_j: f64,
    #[serde(rename = "Lambda_j")]
    pub big_lambda: f64,
    #[serde(rename = "lambda_j")]
    pub small_lambda: f64,
    pub lower_bound: f64,
    pub pass_planar: bool,
    pub pass_tube: bool,
    pub big_lambda_exact: String,
    pub small_lambda_exact: String,
    /// Whether the component-wise upper bound for the sup is attained.
    pub big_lambda_attained: bool,
    pub closed_forms_match: bool,
    pub tube_samples: usize,
    pub tube_k: Vec<TubeCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TubeCheck {
    pub k: u32,
    /// Witness step: `δ_{D^t} − δ_D ≤ Λ_j` on every sample and `Λ_j/√k ≤ t_j`.
    pub witness: bool,
    /// Box step: `δ_{D^t} ≥ δ_D + λ_j` on every sample, and the shifted box
    /// corners stay inside `Ω_k^{t_j}`.
    pub boxed: bool,
}

fn tube_samples(j: u32) -> Vec<PowerSum> {
    let mut xs = vec![
        PowerSum::int(-1),
        PowerSum::int(1),
        PowerSum::zero(),
        PowerSum::term(-1, -1.0),
    ];
    let top = (j + 3).min(HOLES);
    for l in 1..=top {
        let x = PowerSum::pow2(-(l as f64));
        let r = PowerSum::pow2(-3.0 * l as f64);
        xs.push(x.clone() - r.clone());
        xs.push(x.clone() + r.clone());
        // midpoint of the gap to the next hole (or to the outer circle)
        let right = if l == 1 {
            PowerSum::int(1)
        } else {
            PowerSum::pow2(-(l as f64 - 1.0)) - PowerSum::pow2(-3.0 * (l as f64 - 1.0))
        };
        xs.push((x + r + right).scale_pow2(-1.0));
    }
    xs
}

/// Verifies one `j`. Requires `J_MIN <= j <= J_MAX`.
pub fn verify_j(j: u32) -> Result<GapBoundRow> {
    if j > J_MAX {
        return Err(Error::ScaleUnderflow { j });
    }
    if j < J_MIN {
        return Err(Error::Precondition(format!(
            "j = {j} is below the supported range {J_MIN}..={J_MAX}"
        )));
    }
    let cfg = configuration(j)?;
    let t = PowerSum::pow2(-(j as f64));
    let s = shrink(j);

    // per base component: exact inf, upper bound for the sup
    let mut lam: Option<PowerSum> = None;
    let mut big_lo: Option<PowerSum> = None;
    let mut big_hi: Option<PowerSum> = None;
    for a in &cfg.base {
        let mut inf: Option<PowerSum> = None;
        let mut sup: Option<PowerSum> = None;
        for b in &cfg.member {
            let (lo, hi) = distance_range(a, b)?;
            inf = Some(match inf {
                None => lo,
                Some(v) => v.min(&lo)?,
            });
            sup = Some(match sup {
                None => hi,
                Some(v) => v.min(&hi)?,
            });
        }
        let (inf, sup) = (inf.unwrap(), sup.unwrap());
        lam = Some(match lam {
            None => inf.clone(),
            Some(v) => v.min(&inf)?,
        });
        big_lo = Some(match big_lo {
            None => inf,
            Some(v) => v.max(&inf)?,
        });
        big_hi = Some(match big_hi {
            None => sup,
            Some(v) => v.max(&sup)?,
        });
    }
    let lam = lam.unwrap();
    let (big_lo, big_hi) = (big_lo.unwrap(), big_hi.unwrap());
    let attained = big_lo.compare(&big_hi)? == Ordering::Equal;
    let big = big_hi;

    let lb = lower_bound(j);
    let closed_big = PowerSum::pow2(-(j as f64)) - PowerSum::pow2(-3.0 * j as f64) + s.clone();
    let closed_forms_match = attained
        && big.compare(&closed_big)? == Ordering::Equal
        && lam.compare(&s)? == Ordering::Equal;
    let pass_planar = lb.le(&lam)? && big.le(&t)? && closed_forms_match;

    let xs = tube_samples(j);
    let mut tube_k = Vec::new();
    for k in [1u32, 4] {
        let half_log_k = (k as f64).log2() / 2.0;
        let mut witness = big.scale_pow2(-half_log_k).le(&t)?;
        let mut boxed = true;
        for x in &xs {
            let dd = signed_real(x, &cfg.base)?;
            if dd.sign()? == Ordering::Less {
                continue;
            }
            let dt = signed_real(x, &cfg.member)?;
            witness &= (dt.clone() - dd.clone()).le(&big)?;
            boxed &= (dd.clone() + lam.clone()).le(&dt)?;
            let need = dd + lam.scale_pow2(-1.0);
            let half = lam.scale_pow2(-1.0);
            for shifted in [x.clone() - half.clone(), x.clone() + half] {
                boxed &= need.le(&signed_real(&shifted, &cfg.member)?)?;
            }
        }
        tube_k.push(TubeCheck { k, witness, boxed });
    }
    let pass_tube = tube_k.iter().all(|c| c.witness && c.boxed);

    Ok(GapBoundRow {
        j,
        t_j: t.to_f64(),
        big_lambda: big.to_f64(),
        small_lambda: lam.to_f64(),
        lower_bound: lb.to_f64(),
        pass_planar,
        pass_tube,
        big_lambda_exact: big.to_string(),
        small_lambda_exact: lam.to_string(),
        big_lambda_attained: attained,
        closed_forms_match,
        tube_samples: xs.len(),
        tube_k,
    })
}

pub fn verify_gap_bounds(js: std::ops::RangeInclusive<u32>) -> Result<Vec<GapBoundRow>> {
    js.map(verify_j).collect()
}

pub const CSV_HEADER: &str = "j,t_j,Lambda_j,lambda_j,lower_bound,pass_planar,pass_tube";

impl GapBoundRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{:e},{:e},{:e},{:e},{},{}",
            self.j,
            self.t_j,
            self.big_lambda,
            self.small_lambda,
            self.lower_bound,
            self.pass_planar,
            self.pass_tube
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j21_lower_bound_is_equality() {
        let r = verify_j(21).unwrap();
        assert_eq!(shrink(21), PowerSum::pow2(-128.0));
        assert_eq!(r.small_lambda, 2f64.powi(-128));
        assert_eq!(r.lower_bound, r.small_lambda);
        assert!(r.pass_planar && r.pass_tube);
    }

    #[test]
    fn j18_big_lambda() {
        let r = verify_j(18).unwrap();
        let want = PowerSum::pow2(-18.0) - PowerSum::pow2(-54.0) + PowerSum::pow2(-64.0);
        assert_eq!(r.big_lambda_exact, want.to_string());
        assert!(r.big_lambda_attained);
        assert!(r.big_lambda <= r.t_j);
    }

    #[test]
    fn full_range_passes() {
        for r in verify_gap_bounds(J_MIN..=J_MAX).unwrap() {
            assert!(r.pass_planar, "j = {}", r.j);
            assert!(r.pass_tube, "j = {}: {:?}", r.j, r.tube_k);
        }
    }

    #[test]
    fn range_is_enforced() {
        assert!(matches!(verify_j(25), Err(Error::ScaleUnderflow { j: 25 })));
        assert!(verify_j(10).is_err());
    }

    #[test]
    fn distance_range_for_concentric_and_nested() {
        let unit = circ(PowerSum::zero(), PowerSum::int(1));
        let big = circ(PowerSum::zero(), PowerSum::int(2));
        let (lo, hi) = distance_range(&unit, &big).unwrap();
        assert_eq!(lo.compare(&PowerSum::int(1)).unwrap(), Ordering::Equal);
        assert_eq!(hi.compare(&PowerSum::int(1)).unwrap(), Ordering::Equal);
        let small = circ(PowerSum::pow2(-1.0), PowerSum::pow2(-3.0));
        let (lo, hi) = distance_range(&unit, &small).unwrap();
        assert_eq!(lo.to_f64(), 1.0 - 0.5 - 0.125);
        assert_eq!(hi.to_f64(), 1.0 + 0.5 - 0.125);
    }
}
