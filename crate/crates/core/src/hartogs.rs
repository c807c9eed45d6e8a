//! Bergman kernels of Hartogs domains `Ω = {|w| < δ(z)^α}` over a planar base.
//!
//! Holomorphic `f` on `Ω` expands as `Σ_j f_j(z) w^j`, and the slices are
//! orthogonal with `‖f‖² = Σ_j π/(j+1) ‖f_j‖²` in `L²(D, δ^{2α(j+1)})`. So
//!
//! ```text
//! K_Ω((z,w),(t,s)) = Σ_j (j+1)/π · K_j(z,t) · (w s̄)^j
//! ```
//!
//! with `K_j` the planar kernel for density `δ^{2α(j+1)}`.

use std::ops::Range;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::geometry::{HartogsDomain, PlanarDomain};
use crate::kernel::{KernelModel, Weight};
use crate::linalg::{factor_with_jitter, Factor};
use crate::quadrature::{
    integrate_hartogs, integrate_planar, pairwise, FiberRule, PlanarRule, QuadratureConfig,
};
use crate::C64;

pub const J_CAP: usize = 60;
pub const TARGET_TAIL: f64 = 1e-8;
/// `tail_flag` is raised when the tail bound exceeds this fraction of `|K|`.
pub const TAIL_FLAG: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct HartogsKernel {
    pub hartogs: HartogsDomain,
    /// `fiber_models[j]` carries density `δ^{2α(j+1)}`.
    pub fiber_models: Vec<KernelModel>,
    pub target_tail: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HartogsValue {
    pub value: C64,
    pub tail_bound: f64,
    /// Index of the last series term included.
    pub terms: usize,
    pub tail_flag: bool,
}

/// Builds the fiber kernels `j = 0..=j_max` on one shared planar rule.
/// `basis_for(base, j)` supplies the basis of fiber `j`.
pub fn build_hartogs_kernel<B>(
    h: &HartogsDomain,
    j_max: usize,
    basis_for: &B,
    cfg: &QuadratureConfig,
) -> Result<HartogsKernel>
where
    B: Fn(&PlanarDomain, usize) -> BasisSpec + Sync,
{
    if j_max > J_CAP {
        return Err(Error::InvalidInput(format!(
            "truncation {j_max} exceeds the cap {J_CAP}"
        )));
    }
    let rule = Arc::new(PlanarRule::build(&h.base, cfg));
    let fiber_models = (0..=j_max)
        .into_par_iter()
        .map(|j| {
            KernelModel::with_rule(
                &h.base,
                Weight::FiberScaled { alpha: h.alpha, j },
                &basis_for(&h.base, j),
                rule.clone(),
                cfg.max_depth,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HartogsKernel {
        hartogs: h.clone(),
        fiber_models,
        target_tail: TARGET_TAIL,
    })
}

/// Bound on `Σ_{i>j} |T_i|` assuming the terms shrink at least by `r` from `|T_j|`.
fn geometric_tail(last: f64, r: f64) -> f64 {
    if last == 0.0 {
        0.0
    } else if r < 1.0 {
        last * r / (1.0 - r)
    } else {
        f64::INFINITY
    }
}

impl HartogsKernel {
    /// Largest `J` available.
    pub fn j_max(&self) -> usize {
        self.fiber_models.len() - 1
    }

    fn check(&self, p: (C64, C64)) -> Result<()> {
        if self.hartogs.contains(p.0, p.1) {
            Ok(())
        } else {
            Err(Error::OutsideDomain(p.0))
        }
    }

    fn series(&self, p: (C64, C64), q: (C64, C64), stop: Option<usize>) -> Result<HartogsValue> {
        self.check(p)?;
        self.check(q)?;
        let x = p.1 * q.1.conj();
        let radii = self.hartogs.fiber_radius(p.0) * self.hartogs.fiber_radius(q.0);
        let rho = x.norm() / radii;
        let last_j = stop.unwrap_or(self.j_max());
        let mut sum = C64::new(0.0, 0.0);
        let mut xj = C64::new(1.0, 0.0);
        let mut prev = 0.0;
        let mut tail: f64;
        let mut j = 0;
        loop {
            let k = self.fiber_models[j].eval_unchecked(p.0, q.0);
            let term = k * xj * ((j + 1) as f64 / std::f64::consts::PI);
            sum += term;
            let mag = term.norm();
            if x == C64::new(0.0, 0.0) {
                tail = 0.0;
                break;
            }
            let r = if j > 0 && prev > 0.0 {
                rho.max(mag / prev)
            } else {
                rho
            };
            tail = geometric_tail(mag, r);
            prev = mag;
            let done = stop.is_none() && j > 0 && tail <= self.target_tail * sum.norm();
            if done || j == last_j {
                break;
            }
            j += 1;
            xj *= x;
        }
        Ok(HartogsValue {
            value: sum,
            tail_bound: tail,
            terms: j,
            tail_flag: tail > TAIL_FLAG * sum.norm(),
        })
    }

    /// Sums until the tail estimate drops below `target_tail·|K|` or the
    /// built fibers run out.
    pub fn eval(&self, p: (C64, C64), q: (C64, C64)) -> Result<HartogsValue> {
        self.series(p, q, None)
    }

    /// Terms `j = 0..=j_trunc` exactly.
    pub fn eval_truncated(
        &self,
        p: (C64, C64),
        q: (C64, C64),
        j_trunc: usize,
    ) -> Result<HartogsValue> {
        if j_trunc > self.j_max() {
            return Err(Error::InvalidInput(format!(
                "truncation {j_trunc} exceeds the {} fibers built",
                self.j_max() + 1
            )));
        }
        self.series(p, q, Some(j_trunc))
    }

    pub fn diag(&self, p: (C64, C64)) -> Result<HartogsValue> {
        self.eval(p, p)
    }

    /// Feature vector `U` with `K = Σ U_k conj(U_k)` over all built fibers,
    /// and its `z` and `w` derivatives.
    pub fn features_with_gradient(&self, z: C64, w: C64) -> (Vec<C64>, [Vec<C64>; 2]) {
        let mut u = Vec::new();
        let mut dz = Vec::new();
        let mut dw = Vec::new();
        let mut wj = C64::new(1.0, 0.0);
        let mut wj1 = C64::new(0.0, 0.0); // w^{j-1}
        for (j, m) in self.fiber_models.iter().enumerate() {
            let c = ((j + 1) as f64 / std::f64::consts::PI).sqrt();
            let f = m.features(z);
            let fd = m.feature_derivative(z);
            for (a, b) in f.iter().zip(&fd) {
                u.push(a * wj * c);
                dz.push(b * wj * c);
                dw.push(a * wj1 * (j as f64) * c);
            }
            wj1 = wj;
            wj *= w;
        }
        (u, [dz, dw])
    }
}

// ---------------------------------------------------------------------------
// Direct two-dimensional oracle

/// Kernel of `Ω` from the monomials `z^n w^j`, `n ≤ degree_z`, `j ≤ degree_w`,
/// orthonormalized under the Hartogs quadrature with unit weight.
#[derive(Debug, Clone)]
pub struct HartogsOracle {
    pub hartogs: HartogsDomain,
    pub degree_z: usize,
    pub degree_w: usize,
    /// Raw Gram matrix, index `j·(degree_z+1) + n`.
    pub gram: Vec<C64>,
    pub norms: Vec<f64>,
    pub factor: Factor,
}

/// `Σ_f ω_f u_f^j conj(u_f)^i` over the unit fiber rule.
fn unit_moments(fiber: &FiberRule, jm: usize) -> Vec<C64> {
    let nodes = fiber.unit_nodes();
    let k = jm + 1;
    let mut m = vec![C64::new(0.0, 0.0); k * k];
    for (u, w) in nodes {
        let mut pj = C64::new(1.0, 0.0);
        let mut pows = Vec::with_capacity(k);
        for _ in 0..k {
            pows.push(pj);
            pj *= u;
        }
        for j in 0..k {
            for i in 0..k {
                m[j * k + i] += pows[j] * pows[i].conj() * w;
            }
        }
    }
    m
}

/// Desk-scale limits: `degree_z ≤ 10`, `degree_w ≤ 6`, `max_depth ≤ 8`.
///
/// The fiber integral of `z^n w^j conj(z^m w^i)` over `|w| < R` with the fiber
/// rule scaled by `R` is `R^{2+i+j} z^n conj(z^m)` times a fixed moment, so the
/// four-dimensional sum factors and each planar node is visited once. The
/// result is the same sum [`integrate_hartogs`] would form entry by entry.
pub fn hartogs_direct_oracle(
    h: &HartogsDomain,
    degree_z: usize,
    degree_w: usize,
    cfg: &QuadratureConfig,
    fiber: &FiberRule,
) -> Result<HartogsOracle> {
    if degree_z > 10 || degree_w > 6 || cfg.max_depth > 8 {
        return Err(Error::Precondition(format!(
            "oracle is limited to N ≤ 10, J ≤ 6, depth ≤ 8 (got {degree_z}, {degree_w}, {})",
            cfg.max_depth
        )));
    }
    let rule = PlanarRule::build(&h.base, cfg);
    let mom = unit_moments(fiber, degree_w);
    let (nz, nw) = (degree_z + 1, degree_w + 1);
    let dim = nz * nw;
    let mut g = pairwise(
        rule.len(),
        &|r: Range<usize>| {
            let mut acc = vec![C64::new(0.0, 0.0); dim * dim];
            let mut zp = vec![C64::new(0.0, 0.0); nz];
            let mut rp = vec![0.0; 2 * nw + 1];
            for k in r {
                let z = rule.nodes[k];
                let rad = h.fiber_radius(z);
                if rad <= 0.0 {
                    continue;
                }
                let mut p = C64::new(1.0, 0.0);
                for v in zp.iter_mut() {
                    *v = p;
                    p *= z;
                }
                let mut q = rule.weights[k] * rad * rad;
                for v in rp.iter_mut() {
                    *v = q;
                    q *= rad;
                }
                for j in 0..nw {
                    for i in 0..=j {
                        let c = mom[j * nw + i] * rp[i + j];
                        for n in 0..nz {
                            let a = j * nz + n;
                            let top = if i == j { n + 1 } else { nz };
                            for m in 0..top {
                                acc[a * dim + i * nz + m] += c * zp[n] * zp[m].conj();
                            }
                        }
                    }
                }
            }
            acc
        },
        &|mut a: Vec<C64>, b: Vec<C64>| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    );
    for a in 0..dim {
        for b in a + 1..dim {
            g[a * dim + b] = g[b * dim + a].conj();
        }
    }
    let norms: Vec<f64> = (0..dim)
        .map(|i| g[i * dim + i].re.max(0.0).sqrt())
        .collect();
    let mut s = g.clone();
    for a in 0..dim {
        for b in 0..dim {
            s[a * dim + b] /= norms[a] * norms[b];
        }
    }
    let factor = factor_with_jitter(&s, dim)?;
    Ok(HartogsOracle {
        hartogs: h.clone(),
        degree_z,
        degree_w,
        gram: g,
        norms,
        factor,
    })
}

impl HartogsOracle {
    pub fn dim(&self) -> usize {
        (self.degree_z + 1) * (self.degree_w + 1)
    }

    /// Raw Gram entry `⟨z^n w^j, z^m w^i⟩`.
    pub fn gram_entry(&self, (n, j): (usize, usize), (m, i): (usize, usize)) -> C64 {
        let nz = self.degree_z + 1;
        self.gram[(j * nz + n) * self.dim() + i * nz + m]
    }

    pub fn features(&self, z: C64, w: C64) -> Vec<C64> {
        let mut b = Vec::with_capacity(self.dim());
        let mut wj = C64::new(1.0, 0.0);
        for _ in 0..=self.degree_w {
            let mut p = wj;
            for _ in 0..=self.degree_z {
                b.push(p);
                p *= z;
            }
            wj *= w;
        }
        for (x, n) in b.iter_mut().zip(&self.norms) {
            *x /= *n;
        }
        self.factor.forward(&b)
    }

    pub fn eval(&self, p: (C64, C64), q: (C64, C64)) -> Result<C64> {
        for x in [p, q] {
            if !self.hartogs.contains(x.0, x.1) {
                return Err(Error::OutsideDomain(x.0));
            }
        }
        let (u, v) = (self.features(p.0, p.1), self.features(q.0, q.1));
        Ok(u.iter().zip(&v).map(|(a, b)| a * b.conj()).sum())
    }

    pub fn diag(&self, p: (C64, C64)) -> Result<f64> {
        Ok(self.eval(p, p)?.re)
    }
}

// ---------------------------------------------------------------------------
// Checks

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormDecomposition {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `f(z, w) = Σ_j f_j(z) w^j` with `f_j = Σ_m slices[j][m] b_m` in `basis`.
/// Compares the direct integral of `|f|²` over `Ω` with
/// `Σ_j π/(j+1) ∫_D |f_j|² δ^{2α(j+1)}`.
pub fn norm_decomposition_check(
    h: &HartogsDomain,
    basis: &BasisSpec,
    slices: &[Vec<C64>],
    cfg: &QuadratureConfig,
    fiber: &FiberRule,
) -> Result<NormDecomposition> {
    let dim = basis.dim();
    if let Some(s) = slices.iter().find(|s| s.len() != dim) {
        return Err(Error::InvalidInput(format!(
            "slice has {} coefficients, basis has {dim}",
            s.len()
        )));
    }
    basis.validate(&h.base)?;
    let slice_at = |j: usize, z: C64| -> C64 {
        basis
            .eval(z)
            .iter()
            .zip(&slices[j])
            .map(|(b, c)| b * c)
            .sum()
    };
    let lhs = integrate_hartogs(
        h,
        |z, w| {
            let mut s = C64::new(0.0, 0.0);
            let mut wj = C64::new(1.0, 0.0);
            for j in 0..slices.len() {
                s += slice_at(j, z) * wj;
                wj *= w;
            }
            C64::new(s.norm_sqr(), 0.0)
        },
        cfg,
        fiber,
    )
    .value
    .re;
    let mut rhs = 0.0;
    for j in 0..slices.len() {
        let weight = Weight::FiberScaled { alpha: h.alpha, j };
        let part = integrate_planar(
            &h.base,
            |z| C64::new(slice_at(j, z).norm_sqr(), 0.0),
            |z| weight.density(&h.base, z),
            cfg,
        );
        rhs += std::f64::consts::PI / (j + 1) as f64 * part.value.re;
    }
    let scale = lhs.abs().max(rhs.abs());
    Ok(NormDecomposition {
        lhs,
        rhs,
        pass: (lhs - rhs).abs() <= 1e-3 * scale,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExhaustionRow {
    pub z: C64,
    pub w: C64,
    pub k_omega: f64,
    /// `K_0(z, z)/π`.
    pub lower: f64,
    pub tail_bound: f64,
    pub pass: bool,
}

pub fn exhaustion_lower_bound_check(
    hk: &HartogsKernel,
    probes: &[(C64, C64)],
) -> Result<Vec<ExhaustionRow>> {
    probes
        .iter()
        .map(|&p| {
            let v = hk.diag(p)?;
            let lower = hk.fiber_models[0].diag(p.0)? / std::f64::consts::PI;
            Ok(ExhaustionRow {
                z: p.0,
                w: p.1,
                k_omega: v.value.re,
                lower,
                tail_bound: v.tail_bound,
                pass: v.value.re >= lower - 1e-9,
            })
        })
        .collect()
}
