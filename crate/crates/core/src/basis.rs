//! Polynomial and Laurent bases for weighted Bergman spaces on planar domains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PlanarDomain;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaurentGroup {
    pub pole: C64,
    pub max_order: usize,
}

/// `(z − center)^n` for `n ≤ polynomial_degree`, then `(z − pole)^-m` for
/// `m = 1..=max_order`, one group per pole in list order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub polynomial_degree: usize,
    #[serde(default)]
    pub center: C64,
    #[serde(default)]
    pub laurent: Vec<LaurentGroup>,
}

/// Largest pole order at a puncture for which `|z − p|^{-2m} δ^β` stays
/// integrable, i.e. the largest integer `m < 1 + β/2`.
pub fn puncture_order_cap(beta: f64) -> usize {
    let bound = 1.0 + beta / 2.0;
    let m = bound.ceil() as usize;
    m.saturating_sub(1)
}

impl BasisSpec {
    pub fn polynomials(n: usize) -> Self {
        BasisSpec {
            polynomial_degree: n,
            center: C64::new(0.0, 0.0),
            laurent: vec![],
        }
    }

    /// Polynomials centered at the outer center, order-`m` poles at every
    /// hole center, and at each puncture the largest order admissible for the
    /// weight exponent `beta`.
    pub fn for_domain(domain: &PlanarDomain, n: usize, m: usize, beta: f64) -> Self {
        let mut laurent: Vec<LaurentGroup> = domain
            .holes()
            .iter()
            .filter(|_| m > 0)
            .map(|h| LaurentGroup {
                pole: h.center,
                max_order: m,
            })
            .collect();
        let cap = puncture_order_cap(beta).min(m.max(1));
        if cap > 0 {
            laurent.extend(domain.punctures().iter().map(|&p| LaurentGroup {
                pole: p,
                max_order: cap,
            }));
        }
        BasisSpec {
            polynomial_degree: n,
            center: domain.outer().center,
            laurent,
        }
    }

    pub fn with_poles(mut self, poles: impl IntoIterator<Item = (C64, usize)>) -> Self {
        self.laurent.extend(
            poles
                .into_iter()
                .map(|(pole, max_order)| LaurentGroup { pole, max_order }),
        );
        self
    }

    /// Poles outside the closed outer disc at `z0 + offset·ν`, where `z0` lies
    /// on the outer circle and `ν` is the outward normal there.
    pub fn with_exterior_ladder(
        self,
        domain: &PlanarDomain,
        z0: C64,
        offsets: &[f64],
        max_order: usize,
    ) -> Result<Self> {
        let o = domain.outer();
        let r = (z0 - o.center).norm();
        if (r - o.radius).abs() > 1e-12 * o.radius {
            return Err(Error::Precondition(format!(
                "ladder anchor {z0} is not on the outer circle"
            )));
        }
        if offsets.iter().any(|&d| !(d > 0.0)) {
            return Err(Error::InvalidInput(
                "ladder offsets must be positive".into(),
            ));
        }
        let nu = (z0 - o.center) / r;
        Ok(self.with_poles(offsets.iter().map(|&d| (z0 + nu * d, max_order))))
    }

    pub fn dim(&self) -> usize {
        self.polynomial_degree + 1 + self.laurent.iter().map(|g| g.max_order).sum::<usize>()
    }

    /// Every pole must sit in a hole closure, at a puncture, or outside the
    /// closed outer disc.
    pub fn validate(&self, domain: &PlanarDomain) -> Result<()> {
        for g in &self.laurent {
            if g.max_order == 0 {
                return Err(Error::InvalidInput("Laurent group of order 0".into()));
            }
            let p = g.pole;
            let in_hole = domain
                .holes()
                .iter()
                .any(|h| (p - h.center).norm() <= h.radius);
            let at_puncture = domain.punctures().contains(&p);
            let o = domain.outer();
            let outside = (p - o.center).norm() > o.radius;
            if !(in_hole || at_puncture || outside) {
                return Err(Error::InvalidInput(format!("pole {p} lies in the domain")));
            }
        }
        Ok(())
    }

    /// Basis values at `z` into `out` (length `dim`).
    pub fn eval_into(&self, z: C64, out: &mut [C64]) {
        let u = z - self.center;
        let mut p = C64::new(1.0, 0.0);
        for v in out.iter_mut().take(self.polynomial_degree + 1) {
            *v = p;
            p *= u;
        }
        let mut k = self.polynomial_degree + 1;
        for g in &self.laurent {
            let inv = (z - g.pole).inv();
            let mut q = inv;
            for _ in 0..g.max_order {
                out[k] = q;
                q *= inv;
                k += 1;
            }
        }
    }

    pub fn eval(&self, z: C64) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        self.eval_into(z, &mut v);
        v
    }

    /// Complex derivatives of the basis functions at `z`.
    pub fn derivative(&self, z: C64) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        let u = z - self.center;
        let mut p = C64::new(1.0, 0.0);
        for n in 1..=self.polynomial_degree {
            out[n] = p * n as f64;
            p *= u;
        }
        let mut k = self.polynomial_degree + 1;
        for g in &self.laurent {
            let inv = (z - g.pole).inv();
            let mut q = inv * inv;
            for m in 1..=g.max_order {
                out[k] = -q * m as f64;
                q *= inv;
                k += 1;
            }
        }
        out
    }

    pub fn describe(&self) -> Vec<String> {
        let mut v: Vec<String> = (0..=self.polynomial_degree)
            .map(|n| format!("(z-{})^{n}", self.center))
            .collect();
        for g in &self.laurent {
            for m in 1..=g.max_order {
                v.push(format!("(z-{})^-{m}", g.pole));
            }
        }
        v
    }
}
