//! Bergman metric, path lengths, Kobayashi ratios and boundary mass.
//!
//! Every kernel here has the form `K(p, p) = Σ |U_k(p)|²` for a holomorphic
//! feature vector `U`. Then for a direction `v`
//!
//! ```text
//! ∂∂̄ log K (v, v̄) = (‖∂_v U‖² K − |⟨∂_v U, U⟩|²) / K²
//! ```
//!
//! which needs only `U` and its first derivatives.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::PlanarDomain;
use crate::hartogs::HartogsKernel;
use crate::kernel::KernelModel;
use crate::quadrature::{Collar, PlanarRule, QuadratureConfig};
use crate::C64;

pub trait FeatureSource: Sync {
    fn coords(&self) -> usize;
    fn contains(&self, p: &[C64]) -> bool;
    /// `U(p)` and `∂U/∂p_a` for each coordinate `a`.
    fn jet(&self, p: &[C64]) -> (Vec<C64>, Vec<Vec<C64>>);

    fn kernel_diag(&self, p: &[C64]) -> f64 {
        self.jet(p).0.iter().map(|u| u.norm_sqr()).sum()
    }
}

impl FeatureSource for KernelModel {
    fn coords(&self) -> usize {
        1
    }

    fn contains(&self, p: &[C64]) -> bool {
        self.domain.contains(p[0])
    }

    fn jet(&self, p: &[C64]) -> (Vec<C64>, Vec<Vec<C64>>) {
        (self.features(p[0]), vec![self.feature_derivative(p[0])])
    }

    fn kernel_diag(&self, p: &[C64]) -> f64 {
        self.features(p[0]).iter().map(|u| u.norm_sqr()).sum()
    }
}

impl FeatureSource for HartogsKernel {
    fn coords(&self) -> usize {
        2
    }

    fn contains(&self, p: &[C64]) -> bool {
        self.hartogs.contains(p[0], p[1])
    }

    fn jet(&self, p: &[C64]) -> (Vec<C64>, Vec<Vec<C64>>) {
        let (u, [dz, dw]) = self.features_with_gradient(p[0], p[1]);
        (u, vec![dz, dw])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricValue {
    pub point: Vec<C64>,
    pub direction: Vec<C64>,
    pub value: f64,
}

fn check_point<S: FeatureSource + ?Sized>(src: &S, p: &[C64], v: &[C64]) -> Result<()> {
    let n = src.coords();
    if p.len() != n || v.len() != n {
        return Err(Error::InvalidInput(format!(
            "expected {n} coordinates, got point {} and direction {}",
            p.len(),
            v.len()
        )));
    }
    if !src.contains(p) {
        return Err(Error::OutsideDomain(p[0]));
    }
    Ok(())
}

/// `sqrt(∂∂̄ log K (v, v̄))` from exact feature derivatives.
pub fn metric_at<S: FeatureSource + ?Sized>(src: &S, p: &[C64], v: &[C64]) -> Result<MetricValue> {
    check_point(src, p, v)?;
    let (u, du) = src.jet(p);
    let k: f64 = u.iter().map(|x| x.norm_sqr()).sum();
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::DegenerateKernel(k));
    }
    let mut dv = vec![C64::new(0.0, 0.0); u.len()];
    for (a, va) in v.iter().enumerate() {
        for (d, x) in dv.iter_mut().zip(&du[a]) {
            *d += x * va;
        }
    }
    let nd: f64 = dv.iter().map(|x| x.norm_sqr()).sum();
    let cross: C64 = dv.iter().zip(&u).map(|(a, b)| a * b.conj()).sum();
    let g = (nd * k - cross.norm_sqr()) / (k * k);
    Ok(MetricValue {
        point: p.to_vec(),
        direction: v.to_vec(),
        value: g.max(0.0).sqrt(),
    })
}

/// The same quantity from a five-point Laplacian of `λ ↦ log K(p + λv)`.
pub fn metric_fd<S: FeatureSource + ?Sized>(src: &S, p: &[C64], v: &[C64], h: f64) -> Result<f64> {
    check_point(src, p, v)?;
    let f = |lam: C64| -> Result<f64> {
        let q: Vec<C64> = p.iter().zip(v).map(|(a, b)| a + b * lam).collect();
        if !src.contains(&q) {
            return Err(Error::OutsideDomain(q[0]));
        }
        let k = src.kernel_diag(&q);
        if !(k > 0.0) {
            return Err(Error::DegenerateKernel(k));
        }
        Ok(k.ln())
    };
    let f0 = f(C64::new(0.0, 0.0))?;
    let mut s = -4.0 * f0;
    for d in [
        C64::new(h, 0.0),
        C64::new(-h, 0.0),
        C64::new(0.0, h),
        C64::new(0.0, -h),
    ] {
        s += f(d)?;
    }
    Ok((s / (4.0 * h * h)).max(0.0).sqrt())
}

// ---------------------------------------------------------------------------
// Path lengths

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointRegime {
    IsolatedBoundaryPoint,
    NonIsolatedBoundaryPoint,
    Interior,
}

/// Regime of a base point `z` for a path ending there.
pub fn classify_endpoint(domain: &PlanarDomain, z: C64) -> EndpointRegime {
    if domain.contains(z) {
        EndpointRegime::Interior
    } else if domain.punctures().contains(&z) {
        EndpointRegime::IsolatedBoundaryPoint
    } else {
        EndpointRegime::NonIsolatedBoundaryPoint
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathLengthProfile {
    /// Path parameter of each sample, uniform on `[0, 1]`.
    pub s: Vec<f64>,
    pub length: Vec<f64>,
    pub endpoint_regime: EndpointRegime,
}

impl PathLengthProfile {
    pub fn total(&self) -> f64 {
        self.length.last().copied().unwrap_or(0.0)
    }
}

/// Trapezoidal length of the polygonal samples `γ(s_i)`, `s_i = i/(n−1)`,
/// with velocities from central differences.
pub fn path_length<S: FeatureSource + ?Sized>(
    src: &S,
    samples: &[Vec<C64>],
    endpoint_regime: EndpointRegime,
) -> Result<PathLengthProfile> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InvalidInput(
            "a path needs at least two samples".into(),
        ));
    }
    let ds = 1.0 / (n - 1) as f64;
    let mut speed = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
        let span = (b - a) as f64 * ds;
        let vel: Vec<C64> = samples[b]
            .iter()
            .zip(&samples[a])
            .map(|(x, y)| (x - y) / span)
            .collect();
        speed.push(metric_at(src, &samples[i], &vel)?.value);
    }
    let mut length = vec![0.0; n];
    for i in 1..n {
        length[i] = length[i - 1] + ds * (speed[i - 1] + speed[i]) / 2.0;
    }
    Ok(PathLengthProfile {
        s: (0..n).map(|i| i as f64 * ds).collect(),
        length,
        endpoint_regime,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecadeIncrement {
    /// Covers distances `2^-k` down to `2^-(k+1)` from the target.
    pub k: u32,
    pub increment: f64,
}

/// Length increments along `target + d·dir` for `d` in each dyadic band
/// `[2^-(k+1), 2^-k]`, `per_decade` geometric steps per band.
pub fn decade_increments<S: FeatureSource + ?Sized>(
    src: &S,
    target: &[C64],
    dir: &[C64],
    decades: std::ops::RangeInclusive<u32>,
    per_decade: usize,
) -> Result<Vec<DecadeIncrement>> {
    decades
        .map(|k| {
            let d0 = (-(k as f64)).exp2();
            let samples: Vec<Vec<C64>> = (0..=per_decade)
                .map(|i| {
                    let d = d0 * (-(i as f64) / per_decade as f64).exp2();
                    target.iter().zip(dir).map(|(t, v)| t + v * d).collect()
                })
                .collect();
            let prof = path_length(src, &samples, EndpointRegime::Interior)?;
            Ok(DecadeIncrement {
                k,
                increment: prof.total(),
            })
        })
        .collect()
}

/// `target + 2^-k·dir` for `k` in the range.
pub fn approach_sequence(target: C64, dir: C64, ks: std::ops::RangeInclusive<u32>) -> Vec<C64> {
    ks.map(|k| target + dir * (-(k as f64)).exp2()).collect()
}

// ---------------------------------------------------------------------------
// Kobayashi ratios

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KobayashiRow {
    pub k: usize,
    pub point: C64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KobayashiReport {
    pub rows: Vec<KobayashiRow>,
    pub monotone: bool,
    /// Every later ratio is at most the first and the last is at most a tenth
    /// of it.
    pub pass: bool,
}

/// `|f(y_k)|² / K(y_k, y_k)` for `f = Σ coeffs_m b_m` in the model's basis.
pub fn kobayashi_ratio(
    model: &KernelModel,
    coeffs: &[C64],
    points: &[C64],
) -> Result<KobayashiReport> {
    if coeffs.len() != model.dim() {
        return Err(Error::InvalidInput(format!(
            "expected {} coefficients, got {}",
            model.dim(),
            coeffs.len()
        )));
    }
    let rows = points
        .iter()
        .enumerate()
        .map(|(k, &y)| {
            let kd = model.diag(y)?;
            if !(kd > 0.0) {
                return Err(Error::DegenerateKernel(kd));
            }
            Ok(KobayashiRow {
                k: k + 1,
                point: y,
                ratio: model.eval_combination(coeffs, y).norm_sqr() / kd,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = rows.windows(2).all(|w| w[1].ratio <= w[0].ratio);
    let pass = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) if rows.len() > 1 => {
            rows[1..].iter().all(|r| r.ratio <= a.ratio) && b.ratio <= a.ratio / 10.0
        }
        _ => false,
    };
    Ok(KobayashiReport {
        rows,
        monotone,
        pass,
    })
}

// ---------------------------------------------------------------------------
// Boundary mass

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassRow {
    pub t: f64,
    pub nu: f64,
    pub boundary_mass_bound: f64,
    /// The quadrature bound exceeds the value itself.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryMassProfile {
    pub probes: Vec<C64>,
    pub rows: Vec<MassRow>,
    pub r_hat: f64,
    pub log_c: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
}

impl BoundaryMassProfile {
    pub fn fit(&self, t: f64) -> f64 {
        (self.log_c + self.r_hat * t.ln()).exp()
    }
}

/// `ν(t) = max_{w ∈ E} ∫_{0<δ<t} |K(·,w)|² e^{-φ}` over a decreasing schedule,
/// with `ν ≈ C t^r` fitted by least squares in log-log coordinates.
pub fn boundary_mass(
    model: &KernelModel,
    probes: &[C64],
    schedule: &[f64],
    cfg: &QuadratureConfig,
) -> Result<BoundaryMassProfile> {
    if probes.is_empty() {
        return Err(Error::InvalidInput("probe set is empty".into()));
    }
    if schedule.windows(2).any(|w| !(w[1] < w[0])) || schedule.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidInput(
            "t schedule must be positive and strictly decreasing".into(),
        ));
    }
    let feats = probes
        .iter()
        .map(|&w| {
            model.diag(w)?;
            Ok(model.features(w))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(schedule.len());
    for &t in schedule {
        let rule = PlanarRule::build(
            &Collar {
                domain: &model.domain,
                t,
            },
            cfg,
        );
        let mut best = (0.0, 0.0);
        for uw in &feats {
            let e = rule.integrate(|z| {
                let u = model.features(z);
                let k: C64 = u.iter().zip(uw).map(|(a, b)| a * b.conj()).sum();
                C64::new(k.norm_sqr() * model.density(z), 0.0)
            });
            if e.value.re > best.0 {
                best = (e.value.re, e.boundary_mass_bound);
            }
        }
        rows.push(MassRow {
            t,
            nu: best.0,
            boundary_mass_bound: best.1,
            flagged: best.1 > best.0,
        });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.nu > 0.0)
        .map(|r| (r.t.ln(), r.nu.ln()))
        .collect();
    let (r_hat, log_c, residual) = least_squares(&pts);
    Ok(BoundaryMassProfile {
        probes: probes.to_vec(),
        rows,
        r_hat,
        log_c,
        residual,
    })
}

/// Slope, intercept and RMS residual of the line through `pts`.
fn least_squares(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum();
    (slope, icpt, (rss / n).sqrt())
}
