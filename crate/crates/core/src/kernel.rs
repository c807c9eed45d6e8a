//! Weighted Bergman kernels by Gram orthonormalization.
//!
//! For a basis `b_1..b_n`, each normalized by its quadrature norm, the Gram
//! matrix `G_mn = ∫ b_m conj(b_n) e^{-φ}` is factored as `L Lᴴ`. The vector
//! `u(z) = L⁻¹ b(z)` then lists an orthonormal basis evaluated at `z`, and
//! `K(z, w) = Σ u_k(z) conj(u_k(w))`.

use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::geometry::{NeighborhoodFamily, PlanarDomain};
use crate::linalg::{factor_with_jitter, Factor};
use crate::quadrature::{pairwise, PlanarRule, QuadratureConfig};
use crate::C64;

/// Plurisubharmonic weight `φ`; only the density `e^{-φ}` is ever evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Weight {
    Zero,
    /// `φ = −α log δ`, density `δ^α`.
    NegLogDistance {
        alpha: f64,
    },
    /// `2(j+1)φ` for `φ = −α log δ`, density `δ^{2α(j+1)}`.
    FiberScaled {
        alpha: f64,
        j: usize,
    },
}

impl Weight {
    pub fn exponent(&self) -> f64 {
        match *self {
            Weight::Zero => 0.0,
            Weight::NegLogDistance { alpha } => alpha,
            Weight::FiberScaled { alpha, j } => 2.0 * alpha * (j as f64 + 1.0),
        }
    }

    /// Density from the signed distance directly, clamped at zero outside.
    pub fn density_from_delta(&self, delta: f64) -> f64 {
        let e = self.exponent();
        if e == 0.0 {
            1.0
        } else if delta <= 0.0 {
            0.0
        } else {
            delta.powf(e)
        }
    }

    pub fn density(&self, domain: &PlanarDomain, z: C64) -> f64 {
        if self.exponent() == 0.0 {
            1.0
        } else {
            self.density_from_delta(domain.signed_distance(z).value)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let e = self.exponent();
        if !(e >= 0.0 && e.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "weight exponent {e} is invalid"
            )));
        }
        Ok(())
    }
}

/// `Σ_nodes w ρ b bᴴ` over a rule, as a full Hermitian `n × n` matrix.
pub(crate) fn assemble_gram<D>(rule: &PlanarRule, basis: &BasisSpec, density: &D) -> Vec<C64>
where
    D: Fn(C64) -> f64 + Sync,
{
    let n = basis.dim();
    let mut g = pairwise(
        rule.len(),
        &|r: Range<usize>| {
            let mut acc = vec![C64::new(0.0, 0.0); n * n];
            let mut v = vec![C64::new(0.0, 0.0); n];
            for i in r {
                let z = rule.nodes[i];
                let wr = rule.weights[i] * density(z);
                if wr <= 0.0 {
                    continue;
                }
                basis.eval_into(z, &mut v);
                let s = wr.sqrt();
                for x in v.iter_mut() {
                    *x *= s;
                }
                for a in 0..n {
                    let va = v[a];
                    let row = &mut acc[a * n..a * n + a + 1];
                    for (b, g) in row.iter_mut().enumerate() {
                        *g += va * v[b].conj();
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
    for a in 0..n {
        for b in a + 1..n {
            g[a * n + b] = g[b * n + a].conj();
        }
    }
    g
}

#[derive(Debug, Clone)]
pub struct KernelModel {
    pub domain: PlanarDomain,
    pub weight: Weight,
    pub basis: BasisSpec,
    /// Raw Gram matrix before normalization, row-major.
    pub gram: Vec<C64>,
    pub norms: Vec<f64>,
    pub factor: Factor,
    pub rule: Arc<PlanarRule>,
    pub depth: u32,
}

pub fn build_kernel(
    domain: &PlanarDomain,
    weight: Weight,
    basis: &BasisSpec,
    cfg: &QuadratureConfig,
) -> Result<KernelModel> {
    let rule = Arc::new(PlanarRule::build(domain, cfg));
    KernelModel::with_rule(domain, weight, basis, rule, cfg.max_depth)
}

impl KernelModel {
    pub fn with_rule(
        domain: &PlanarDomain,
        weight: Weight,
        basis: &BasisSpec,
        rule: Arc<PlanarRule>,
        depth: u32,
    ) -> Result<Self> {
        weight.validate()?;
        basis.validate(domain)?;
        let gram = assemble_gram(&rule, basis, &|z| weight.density(domain, z));
        Self::from_gram(domain, weight, basis, gram, rule, depth)
    }

    pub(crate) fn from_gram(
        domain: &PlanarDomain,
        weight: Weight,
        basis: &BasisSpec,
        gram: Vec<C64>,
        rule: Arc<PlanarRule>,
        depth: u32,
    ) -> Result<Self> {
        let n = basis.dim();
        let norms: Vec<f64> = (0..n).map(|i| gram[i * n + i].re.max(0.0).sqrt()).collect();
        if let Some(k) = norms.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::IllConditioned {
                dim: n,
                jitter: 0.0,
                min_pivot: norms[k],
                trace: norms.iter().map(|x| x * x).sum(),
            });
        }
        let mut g = gram.clone();
        for a in 0..n {
            for b in 0..n {
                g[a * n + b] /= norms[a] * norms[b];
            }
        }
        let factor = factor_with_jitter(&g, n)?;
        Ok(KernelModel {
            domain: domain.clone(),
            weight,
            basis: basis.clone(),
            gram,
            norms,
            factor,
            rule,
            depth,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn jitter_used(&self) -> f64 {
        self.factor.jitter_used
    }

    fn check(&self, z: C64) -> Result<()> {
        if self.domain.contains(z) {
            Ok(())
        } else {
            Err(Error::OutsideDomain(z))
        }
    }

    /// Orthonormal basis values `u(z)`; no membership check.
    pub fn features(&self, z: C64) -> Vec<C64> {
        let mut b = self.basis.eval(z);
        for (x, n) in b.iter_mut().zip(&self.norms) {
            *x /= *n;
        }
        self.factor.forward(&b)
    }

    /// `u'(z)`.
    pub fn feature_derivative(&self, z: C64) -> Vec<C64> {
        let mut b = self.basis.derivative(z);
        for (x, n) in b.iter_mut().zip(&self.norms) {
            *x /= *n;
        }
        self.factor.forward(&b)
    }

    pub fn eval_unchecked(&self, z: C64, w: C64) -> C64 {
        let (u, v) = (self.features(z), self.features(w));
        u.iter().zip(&v).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn eval(&self, z: C64, w: C64) -> Result<C64> {
        self.check(z)?;
        self.check(w)?;
        Ok(self.eval_unchecked(z, w))
    }

    pub fn diag(&self, z: C64) -> Result<f64> {
        self.check(z)?;
        Ok(self.features(z).iter().map(|a| a.norm_sqr()).sum())
    }

    pub fn density(&self, z: C64) -> f64 {
        self.weight.density(&self.domain, z)
    }

    /// `f = Σ c_m b_m` in the raw basis.
    pub fn eval_combination(&self, coeffs: &[C64], z: C64) -> C64 {
        self.basis
            .eval(z)
            .iter()
            .zip(coeffs)
            .map(|(b, c)| b * c)
            .sum()
    }

    /// `|∫ f conj(K(·, w)) e^{-φ} − f(w)|` with the model's own quadrature.
    pub fn reproducing_check(&self, coeffs: &[C64], w: C64) -> Result<f64> {
        if coeffs.len() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients, got {}",
                self.dim(),
                coeffs.len()
            )));
        }
        self.check(w)?;
        let uw = self.features(w);
        let integral = self
            .rule
            .integrate(|z| {
                let u = self.features(z);
                let k: C64 = u.iter().zip(&uw).map(|(a, b)| a.conj() * b).sum();
                self.eval_combination(coeffs, z) * k * self.density(z)
            })
            .value;
        Ok((integral - self.eval_combination(coeffs, w)).norm())
    }

    /// Coefficients `⟨f, e_k⟩` of `f` against the orthonormal basis.
    pub fn project<F>(&self, f: &F) -> Vec<C64>
    where
        F: Fn(C64) -> C64 + Sync,
    {
        let n = self.dim();
        let rule = &self.rule;
        pairwise(
            rule.len(),
            &|r: Range<usize>| {
                let mut acc = vec![C64::new(0.0, 0.0); n];
                for i in r {
                    let z = rule.nodes[i];
                    let wr = rule.weights[i] * self.density(z);
                    if wr <= 0.0 {
                        continue;
                    }
                    let fz = f(z) * wr;
                    for (a, u) in acc.iter_mut().zip(self.features(z)) {
                        *a += fz * u.conj();
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
        )
    }

    /// `(‖f − P f‖, ‖f‖)` in the model's weighted norm, with the residual
    /// integrated pointwise (no cancellation between `‖f‖²` and `‖P f‖²`).
    pub fn projection_error<F>(&self, f: &F) -> (f64, f64)
    where
        F: Fn(C64) -> C64 + Sync,
    {
        let a = self.project(f);
        let res = self.rule.integrate(|z| {
            let pf: C64 = self.features(z).iter().zip(&a).map(|(u, c)| u * c).sum();
            C64::new((f(z) - pf).norm_sqr() * self.density(z), 0.0)
        });
        let nf = self
            .rule
            .integrate(|z| C64::new(f(z).norm_sqr() * self.density(z), 0.0));
        (res.value.re.max(0.0).sqrt(), nf.value.re.max(0.0).sqrt())
    }

    pub fn summary(&self, probes: &[C64]) -> KernelSummary {
        KernelSummary {
            basis: self.basis.describe(),
            dim: self.dim(),
            weight: self.weight,
            depth: self.depth,
            nodes: self.rule.len(),
            jitter_used: self.factor.jitter_used,
            condition_estimate: self.factor.condition_estimate,
            diagonal: probes
                .iter()
                .map(|&z| DiagonalValue {
                    point: z,
                    value: self.diag(z).ok(),
                })
                .collect(),
        }
    }

    /// Largest `|G_mn − conj(G_nm)|` relative to `max |G|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        let mut big: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                big = big.max(self.gram[a * n + b].norm());
                worst = worst.max((self.gram[a * n + b] - self.gram[b * n + a].conj()).norm());
            }
        }
        worst / big
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalValue {
    pub point: C64,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelSummary {
    pub basis: Vec<String>,
    pub dim: usize,
    pub weight: Weight,
    pub depth: u32,
    pub nodes: usize,
    pub jitter_used: f64,
    pub condition_estimate: f64,
    pub diagonal: Vec<DiagonalValue>,
}

// ---------------------------------------------------------------------------
// Convergence along a neighborhood family

/// Base model plus one model per scheduled member. Each member carries its
/// own weight `δ_member^α`.
pub struct FamilyModels {
    pub base: KernelModel,
    pub members: Vec<(f64, Result<KernelModel>)>,
}

pub fn build_family_models<B>(
    family: &NeighborhoodFamily,
    alpha: f64,
    basis_rule: &B,
    cfg: &QuadratureConfig,
) -> Result<FamilyModels>
where
    B: Fn(&PlanarDomain) -> BasisSpec,
{
    let weight = if alpha == 0.0 {
        Weight::Zero
    } else {
        Weight::NegLogDistance { alpha }
    };
    let base = build_kernel(&family.base, weight, &basis_rule(&family.base), cfg)?;
    let members = family
        .schedule
        .iter()
        .map(|&t| {
            let m = family
                .member(t)
                .and_then(|d| build_kernel(&d, weight, &basis_rule(&d), cfg));
            (t, m)
        })
        .collect();
    Ok(FamilyModels { base, members })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub t: f64,
    pub probe: C64,
    pub k_member: Option<f64>,
    pub k_base: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Per probe, member values never decrease as `t` decreases.
    pub monotone: bool,
    /// Every member value is at most `K_base + tol`.
    pub bounded: bool,
}

pub fn diagonal_convergence_table(
    models: &FamilyModels,
    probes: &[C64],
    tol: f64,
) -> Result<ConvergenceTable> {
    let mut rows = Vec::new();
    let mut monotone = true;
    let mut bounded = true;
    for &w in probes {
        let kb = models.base.diag(w)?;
        let mut prev: Option<f64> = None;
        for (t, m) in &models.members {
            let (k, err) = match m {
                Ok(m) => match m.diag(w) {
                    Ok(k) => (Some(k), None),
                    Err(e) => (None, Some(e.to_string())),
                },
                Err(e) => (None, Some(e.to_string())),
            };
            if let Some(k) = k {
                if let Some(p) = prev {
                    monotone &= k >= p * (1.0 - 1e-12);
                }
                bounded &= k <= kb + tol;
                prev = Some(k);
            }
            rows.push(ConvergenceRow {
                t: *t,
                probe: w,
                k_member: k,
                k_base: kb,
                error: err,
            });
        }
    }
    Ok(ConvergenceTable {
        rows,
        monotone,
        bounded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DifferenceNorm {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `∫_base |K_t(·,w) − K_base(·,w)|² e^{-φ}` against `K_base(w,w) − K_t(w,w)`.
pub fn difference_norm_check(
    base: &KernelModel,
    t_model: &KernelModel,
    w: C64,
) -> Result<DifferenceNorm> {
    let ub = base.features(w);
    let ut = t_model.features(w);
    base.diag(w)?;
    t_model.diag(w)?;
    let lhs = base
        .rule
        .integrate(|z| {
            let kb: C64 = base
                .features(z)
                .iter()
                .zip(&ub)
                .map(|(a, b)| a * b.conj())
                .sum();
            let kt: C64 = t_model
                .features(z)
                .iter()
                .zip(&ut)
                .map(|(a, b)| a * b.conj())
                .sum();
            C64::new((kt - kb).norm_sqr() * base.density(z), 0.0)
        })
        .value
        .re;
    let kbw: f64 = ub.iter().map(|a| a.norm_sqr()).sum();
    let ktw: f64 = ut.iter().map(|a| a.norm_sqr()).sum();
    let rhs = kbw - ktw;
    Ok(DifferenceNorm {
        lhs,
        rhs,
        pass: lhs <= rhs + 1e-6 * (1.0 + rhs.abs()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    pub t: f64,
    pub poles: usize,
    pub error: f64,
    pub relative_error: f64,
    pub failure: Option<String>,
}

/// Best weighted `L²(base)` approximation error of `f` from the span of each
/// member's basis, measured in the base inner product.
pub fn density_profile<F, B>(
    family: &NeighborhoodFamily,
    weight: Weight,
    f: &F,
    basis_rule: &B,
    cfg: &QuadratureConfig,
) -> Result<Vec<DensityRow>>
where
    F: Fn(C64) -> C64 + Sync,
    B: Fn(&PlanarDomain) -> BasisSpec,
{
    let rule = Arc::new(PlanarRule::build(&family.base, cfg));
    let mut rows = Vec::new();
    for &t in &family.schedule {
        let built = family.member(t).and_then(|m| {
            let spec = basis_rule(&m);
            KernelModel::with_rule(&family.base, weight, &spec, rule.clone(), cfg.max_depth)
        });
        rows.push(match built {
            Ok(model) => {
                let (e, nf) = model.projection_error(f);
                DensityRow {
                    t,
                    poles: model.basis.laurent.len(),
                    error: e,
                    relative_error: e / nf,
                    failure: None,
                }
            }
            Err(e) => DensityRow {
                t,
                poles: 0,
                error: f64::NAN,
                relative_error: f64::NAN,
                failure: Some(e.to_string()),
            },
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FamilyRule;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn disc_model(depth: u32, weight: Weight, n: usize) -> KernelModel {
        build_kernel(
            &PlanarDomain::unit_disc(),
            weight,
            &BasisSpec::polynomials(n),
            &QuadratureConfig::with_depth(depth),
        )
        .unwrap()
    }

    fn disc_kernel(z: C64, w: C64, r: f64) -> C64 {
        // unweighted kernel of the disc of radius r centered at 0
        let q = c(r * r, 0.0) - z * w.conj();
        c(r * r / PI, 0.0) / (q * q)
    }

    #[test]
    fn unweighted_disc_closed_form() {
        let m = disc_model(10, Weight::Zero, 12);
        assert!((m.diag(c(0.0, 0.0)).unwrap() - 1.0 / PI).abs() < 1e-6);
        let k = m.diag(c(0.3, 0.0)).unwrap();
        assert!((k - 1.0 / (PI * 0.91 * 0.91)).abs() < 1e-5);
        let off = m.eval(c(0.5, 0.0), c(0.0, 0.0)).unwrap();
        assert!((off - c(1.0 / PI, 0.0)).norm() < 1e-6);
        assert!(m.eval(c(1.2, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn weighted_disc_at_center() {
        let m = disc_model(10, Weight::NegLogDistance { alpha: 1.0 }, 12);
        assert!((m.diag(c(0.0, 0.0)).unwrap() - 3.0 / PI).abs() < 1e-4);
    }

    #[test]
    fn radial_weight_gram_is_diagonal() {
        let m = disc_model(9, Weight::NegLogDistance { alpha: 1.0 }, 8);
        let n = m.dim();
        let big = (0..n).map(|i| m.gram[i * n + i].re).fold(0.0, f64::max);
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    assert!(m.gram[a * n + b].norm() < 1e-7 * big, "{a} {b}");
                }
            }
        }
        assert!(m.hermitian_defect() < 1e-12);
    }

    #[test]
    fn reproducing_residuals() {
        let m = disc_model(10, Weight::Zero, 12);
        let mut one = vec![c(0.0, 0.0); m.dim()];
        one[0] = c(1.0, 0.0);
        assert!(m.reproducing_check(&one, c(0.0, 0.0)).unwrap() < 1e-8);
        let mut z3 = vec![c(0.0, 0.0); m.dim()];
        z3[3] = c(1.0, 0.0);
        assert!(m.reproducing_check(&z3, c(0.4, 0.0)).unwrap() < 1e-6);

        let d = PlanarDomain::scaled_zalcman(2).unwrap();
        let spec = BasisSpec::for_domain(&d, 8, 4, 0.0);
        let zm = build_kernel(&d, Weight::Zero, &spec, &QuadratureConfig::with_depth(9)).unwrap();
        let mut lt = vec![c(0.0, 0.0); zm.dim()];
        lt[9] = c(1.0, 0.0); // (z - x_1)^-1
        assert!(zm.reproducing_check(&lt, c(-0.3, 0.2)).unwrap() < 1e-5);
    }

    #[test]
    fn basis_enlargement_never_lowers_diagonal() {
        let d = PlanarDomain::scaled_zalcman(2).unwrap();
        let cfg = QuadratureConfig::with_depth(8);
        let rule = Arc::new(PlanarRule::build(&d, &cfg));
        let small = BasisSpec::for_domain(&d, 4, 2, 1.0);
        let large = BasisSpec::for_domain(&d, 6, 2, 1.0);
        let larger = BasisSpec::for_domain(&d, 6, 3, 1.0);
        let w = Weight::NegLogDistance { alpha: 1.0 };
        let ms = KernelModel::with_rule(&d, w, &small, rule.clone(), 8).unwrap();
        let ml = KernelModel::with_rule(&d, w, &large, rule.clone(), 8).unwrap();
        let mx = KernelModel::with_rule(&d, w, &larger, rule, 8).unwrap();
        for z in [c(-0.5, 0.0), c(0.0, 0.6), c(0.35, -0.1)] {
            let (a, b, x) = (
                ms.diag(z).unwrap(),
                ml.diag(z).unwrap(),
                mx.diag(z).unwrap(),
            );
            assert!(b >= a - 1e-9 * a);
            assert!(x >= a - 1e-9 * a, "{x} < {a}");
        }
    }

    #[test]
    fn disc_domain_monotonicity() {
        let cfg = QuadratureConfig::with_depth(10);
        let small = build_kernel(
            &PlanarDomain::unit_disc(),
            Weight::Zero,
            &BasisSpec::polynomials(12),
            &cfg,
        )
        .unwrap();
        let big_d = PlanarDomain::disc(c(0.0, 0.0), 1.3).unwrap();
        let big = build_kernel(&big_d, Weight::Zero, &BasisSpec::polynomials(12), &cfg).unwrap();
        for z in [c(0.0, 0.0), c(0.2, 0.1), c(-0.4, 0.0)] {
            let kb = big.diag(z).unwrap();
            assert!((kb - disc_kernel(z, z, 1.3).re).abs() < 1e-6);
            assert!(kb <= small.diag(z).unwrap());
        }
    }

    #[test]
    fn enlarged_disc_family() {
        let base = PlanarDomain::unit_disc();
        let fam = NeighborhoodFamily::new(base, vec![0.2, 0.1, 0.05], FamilyRule::Uniform).unwrap();
        let models = build_family_models(
            &fam,
            0.0,
            &|_: &PlanarDomain| BasisSpec::polynomials(12),
            &QuadratureConfig::with_depth(10),
        )
        .unwrap();
        let tab = diagonal_convergence_table(&models, &[c(0.0, 0.0)], 1e-6).unwrap();
        assert!(tab.monotone && tab.bounded);
        for r in &tab.rows {
            let want = 1.0 / (PI * (1.0 + r.t).powi(2));
            assert!((r.k_member.unwrap() - want).abs() < 1e-6);
        }
        let same = difference_norm_check(&models.base, &models.base, c(0.0, 0.0)).unwrap();
        assert!(same.lhs.abs() < 1e-12 && same.rhs.abs() < 1e-12 && same.pass);
        for (_, m) in &models.members {
            let d = difference_norm_check(&models.base, m.as_ref().unwrap(), c(0.0, 0.0)).unwrap();
            assert!(d.pass, "{d:?}");
            assert!(d.rhs - d.lhs > 1e-4);
        }
    }

    #[test]
    fn density_profile_detects_missing_pole() {
        let base = PlanarDomain::scaled_zalcman(3).unwrap();
        let fam =
            NeighborhoodFamily::new(base.clone(), vec![0.08, 0.04], FamilyRule::Uniform).unwrap();
        let x2 = base.holes()[1].center;
        let rows = density_profile(
            &fam,
            Weight::NegLogDistance { alpha: 1.0 },
            &|z: C64| (z - x2).inv(),
            &|m: &PlanarDomain| BasisSpec::for_domain(m, 8, 4, 1.0),
            &QuadratureConfig::with_depth(9),
        )
        .unwrap();
        assert_eq!(rows[0].poles, 1);
        assert!(rows[0].error > 1e-4);
        assert!(rows[1].error < 1e-6, "{:?}", rows[1]);
    }

    #[test]
    fn duplicated_basis_needs_jitter() {
        let d = PlanarDomain::unit_disc();
        let spec = BasisSpec::polynomials(3).with_poles([(c(5.0, 0.0), 1), (c(5.0, 0.0), 1)]);
        let m = build_kernel(&d, Weight::Zero, &spec, &QuadratureConfig::with_depth(6)).unwrap();
        assert!(m.jitter_used() > 0.0);
        assert!(m.factor.condition_estimate > 1e6);
    }

    #[test]
    fn summary_serializes() {
        let m = disc_model(7, Weight::Zero, 4);
        let s = serde_json::to_value(m.summary(&[c(0.0, 0.0)])).unwrap();
        assert_eq!(s["dim"], 5);
        assert!(s["diagonal"][0]["value"].as_f64().unwrap() > 0.3);
        let w: Weight =
            serde_json::from_str(r#"{"kind":"fiber_scaled","alpha":1.0,"j":2}"#).unwrap();
        assert_eq!(w.exponent(), 6.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn hermitian_and_cauchy_schwarz(seed in 0u64..1000) {
            let d = PlanarDomain::scaled_zalcman(2).unwrap();
            thread_local! {
                static M: KernelModel = {
                    let d = PlanarDomain::scaled_zalcman(2).unwrap();
                    build_kernel(
                        &d,
                        Weight::NegLogDistance { alpha: 1.0 },
                        &BasisSpec::for_domain(&d, 6, 3, 1.0),
                        &QuadratureConfig::with_depth(7),
                    )
                    .unwrap()
                };
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pt = || loop {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                if d.contains(z) {
                    return z;
                }
            };
            let (z, w) = (pt(), pt());
            M.with(|m| {
                let a = m.eval(z, w).unwrap();
                let b = m.eval(w, z).unwrap();
                assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1e-300));
                let kz = m.diag(z).unwrap();
                let kw = m.diag(w).unwrap();
                assert!(kz >= 0.0 && kw >= 0.0);
                assert!(a.norm_sqr() <= kz * kw * (1.0 + 1e-12));
            });
        }
    }
}
