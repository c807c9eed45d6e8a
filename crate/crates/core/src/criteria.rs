//! Side conditions as checkable procedures: the divergence condition on the
//! neighborhood gap `η`, the `β < α/2` gate, Levi forms of tube defining
//! functions, and a falsifier for hyperconvex index claims.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PlanarDomain, TubeDomain};
use crate::quadrature::gauss_legendre;
use crate::C64;

// ---------------------------------------------------------------------------
// ∫₀^{r0} dt / (t log(t/η(t)))

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EtaKind {
    /// `η(t) = c t^alpha`.
    PowerLaw { c: f64, alpha: f64 },
    /// `η(t) = c exp(−c1 / t^beta)`.
    StretchedExponential { c: f64, c1: f64, beta: f64 },
    /// `(t, η(t))` pairs, interpolated linearly in log-log coordinates. With
    /// `log_eta` the second entry is `ln η(t)`, for tables reaching where `η`
    /// underflows.
    Tabulated {
        samples: Vec<[f64; 2]>,
        #[serde(default)]
        log_eta: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaProfile {
    #[serde(flatten)]
    pub kind: EtaKind,
    pub r0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaVerdict {
    Divergent,
    Convergent,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialIntegral {
    pub eps: f64,
    /// `∫_eps^{r0}`.
    pub integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtaClassification {
    pub verdict: EtaVerdict,
    /// Closed form for the symbolic kinds, partial-integral trend for tables.
    pub symbolic: bool,
    pub partial_integrals: Vec<PartialIntegral>,
    /// Slope of `I(eps)` against `log log(1/eps)` over the last quarter of
    /// the schedule, and over the quarter before it.
    pub slope: f64,
    pub slope_prev: f64,
}

/// A table diverges when the last-quarter slope keeps at least this fraction
/// of the previous quarter's, and converges when it falls below `TREND_DECAYED`.
pub const TREND_SUSTAINED: f64 = 0.8;
pub const TREND_DECAYED: f64 = 0.5;

impl EtaProfile {
    /// `log(t/η(t))`, computed without forming `η` where it would underflow.
    pub fn log_ratio(&self, t: f64) -> f64 {
        match &self.kind {
            EtaKind::PowerLaw { c, alpha } => (1.0 - alpha) * t.ln() - c.ln(),
            EtaKind::StretchedExponential { c, c1, beta } => t.ln() - c.ln() + c1 * t.powf(-beta),
            EtaKind::Tabulated { samples, log_eta } => {
                let lt = t.ln();
                let le = |s: [f64; 2]| if *log_eta { s[1] } else { s[1].ln() };
                let i = samples
                    .partition_point(|s| s[0] < t)
                    .clamp(1, samples.len() - 1);
                let (a, b) = (samples[i - 1], samples[i]);
                let (la, lb) = (a[0].ln(), b[0].ln());
                let s = if lb > la { (lt - la) / (lb - la) } else { 0.0 };
                lt - (le(a) + s * (le(b) - le(a)))
            }
        }
    }

    /// Smallest `t` the profile can be evaluated at.
    fn floor(&self) -> f64 {
        let f = (-64f64).exp2() * self.r0;
        match &self.kind {
            EtaKind::Tabulated { samples, .. } => f.max(samples[0][0]),
            _ => f,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.r0 > 0.0 && self.r0 < 1.0) {
            return Err(Error::InvalidInput(format!(
                "r0 must lie in (0, 1), got {}",
                self.r0
            )));
        }
        match &self.kind {
            EtaKind::PowerLaw { c, alpha } if !(*c > 0.0 && *alpha > 0.0) => Err(
                Error::InvalidInput("power law needs c > 0 and alpha > 0".into()),
            ),
            EtaKind::StretchedExponential { c, c1, beta }
                if !(*c > 0.0 && *c1 > 0.0 && *beta > 0.0) =>
            {
                Err(Error::InvalidInput(
                    "stretched exponential needs positive c, c1, beta".into(),
                ))
            }
            EtaKind::Tabulated { samples, log_eta } => {
                if samples.len() < 2 {
                    return Err(Error::InvalidInput(
                        "a table needs at least two samples".into(),
                    ));
                }
                if samples.windows(2).any(|w| !(w[1][0] > w[0][0])) {
                    return Err(Error::InvalidInput("table abscissae must increase".into()));
                }
                if samples
                    .iter()
                    .any(|s| !(s[0] > 0.0 && (*log_eta || s[1] > 0.0)))
                {
                    return Err(Error::InvalidInput("table entries must be positive".into()));
                }
                if samples.last().unwrap()[0] < self.r0 {
                    return Err(Error::InvalidInput("table does not reach r0".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Dyadic points `r0·2^-k` down to the profile floor.
fn eps_schedule(p: &EtaProfile) -> Vec<f64> {
    let floor = p.floor();
    let mut v = Vec::new();
    let mut e = p.r0 / 2.0;
    while e >= floor {
        v.push(e);
        e /= 2.0;
    }
    v
}

/// `∫_a^b dt/(t L(t)) = ∫ du / L(e^u)` by 8-point Gauss–Legendre in `u = log t`.
fn integrate_band(p: &EtaProfile, a: f64, b: f64, gl: &(Vec<f64>, Vec<f64>)) -> f64 {
    let (ua, ub) = (a.ln(), b.ln());
    let h = (ub - ua) / 2.0;
    gl.0.iter()
        .zip(&gl.1)
        .map(|(x, w)| w * h / p.log_ratio((ua + h * (x + 1.0)).exp()))
        .sum()
}

pub fn classify_eta_integral(eta: &EtaProfile) -> Result<EtaClassification> {
    eta.validate()?;
    let schedule = eps_schedule(eta);
    let mut check: Vec<f64> = vec![eta.r0];
    check.extend(&schedule);
    if let EtaKind::Tabulated { samples, .. } = &eta.kind {
        check.extend(samples.iter().map(|s| s[0]).filter(|&t| t <= eta.r0));
    }
    if let Some(&t) = check.iter().find(|&&t| !(eta.log_ratio(t) > 0.0)) {
        return Err(Error::Precondition(format!("η(t) ≥ t at t = {t:e}")));
    }

    let gl = gauss_legendre(8);
    let mut partial_integrals = Vec::with_capacity(schedule.len());
    let mut acc = 0.0;
    let mut upper = eta.r0;
    for &e in &schedule {
        acc += integrate_band(eta, e, upper, &gl);
        partial_integrals.push(PartialIntegral {
            eps: e,
            integral: acc,
        });
        upper = e;
    }
    let n = partial_integrals.len();
    let slope_over = |lo: usize, hi: usize| {
        if hi <= lo || hi >= n {
            return f64::NAN;
        }
        let (a, b) = (partial_integrals[lo], partial_integrals[hi]);
        let lla = (1.0 / a.eps).ln().ln();
        let llb = (1.0 / b.eps).ln().ln();
        (b.integral - a.integral) / (llb - lla)
    };
    let slope_prev = slope_over(n / 2, n * 3 / 4);
    let slope = slope_over(n * 3 / 4, n.saturating_sub(1));

    let (verdict, symbolic) = match &eta.kind {
        // α < 1 already failed the η < t check; α = 1 with c < 1 leaves
        // log(t/η) constant, so the integrand is ~ 1/t
        EtaKind::PowerLaw { .. } => (EtaVerdict::Divergent, true),
        EtaKind::StretchedExponential { .. } => (EtaVerdict::Convergent, true),
        EtaKind::Tabulated { .. } => {
            let q = slope / slope_prev;
            let v = if !q.is_finite() || !(slope >= 0.0) {
                EtaVerdict::Inconclusive
            } else if q >= TREND_SUSTAINED {
                EtaVerdict::Divergent
            } else if q <= TREND_DECAYED {
                EtaVerdict::Convergent
            } else {
                EtaVerdict::Inconclusive
            };
            (v, false)
        }
    };
    Ok(EtaClassification {
        verdict,
        symbolic,
        partial_integrals,
        slope,
        slope_prev,
    })
}

/// Samples a symbolic profile into a table (`ln η`, four points per octave
/// from `r0·2^-64` to `r0`) so the trend route can be compared against the
/// closed form.
pub fn tabulate(eta: &EtaProfile) -> EtaProfile {
    let ln_eta = |t: f64| t.ln() - eta.log_ratio(t);
    let samples = (0..=256)
        .rev()
        .map(|i| {
            let t = eta.r0 * (-(i as f64) / 4.0).exp2();
            [t, ln_eta(t)]
        })
        .collect();
    EtaProfile {
        kind: EtaKind::Tabulated {
            samples,
            log_eta: true,
        },
        r0: eta.r0,
    }
}

/// `β < α/2`, strictly.
pub fn beta_alpha_gate(alpha: f64, beta: f64) -> bool {
    beta < alpha / 2.0
}

// ---------------------------------------------------------------------------
// Levi forms

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeviSample {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeviReport {
    pub samples: Vec<LeviSample>,
    /// Samples whose stencil straddled a change of nearest boundary piece.
    pub skipped: usize,
    pub global_min: f64,
    pub threshold: f64,
    pub pass: bool,
}

pub const LEVI_THRESHOLD: f64 = -1e-6;

/// Smallest eigenvalue of the complex Hessian `∂_a ∂̄_b ρ` of the tube's
/// defining function, by central differences in the four real coordinates
/// `(x1, y1, x2, y2)` with `z_a = x_a + i y_a`.
pub fn levi_check_tube(
    tube: &TubeDomain,
    samples: &[([f64; 2], [f64; 2])],
    fd_step: f64,
) -> Result<LeviReport> {
    if !(fd_step > 0.0 && fd_step <= 1e-3) {
        return Err(Error::InvalidInput(format!(
            "fd_step must lie in (0, 1e-3], got {fd_step}"
        )));
    }
    let rho = |v: [f64; 4]| tube.defining_function([v[0], v[2]], [v[1], v[3]]);
    let tag = |v: [f64; 4]| tube.base.signed_distance(C64::new(v[0], v[2])).nearest;
    let mut out = Vec::new();
    let mut skipped = 0;
    for &(x, y) in samples {
        if !crate::geometry::tube_membership(tube, x, y) {
            return Err(Error::OutsideDomain(C64::new(x[0], x[1])));
        }
        let p = [x[0], y[0], x[1], y[1]];
        let h = fd_step;
        let shift = |a: usize, s: f64, b: usize, t: f64| {
            let mut q = p;
            q[a] += s;
            q[b] += t;
            q
        };
        let t0 = tag(p);
        let ridge = (0..4).any(|a| {
            (0..4).any(|b| {
                [(h, h), (h, -h), (-h, h), (-h, -h)]
                    .iter()
                    .any(|&(s, t)| tag(shift(a, s, b, t)) != t0)
            })
        });
        if ridge {
            skipped += 1;
            continue;
        }
        let mut hs = [[0.0; 4]; 4];
        let f0 = rho(p);
        for a in 0..4 {
            let fp = rho(shift(a, h, a, 0.0));
            let fm = rho(shift(a, -h, a, 0.0));
            hs[a][a] = (fp - 2.0 * f0 + fm) / (h * h);
            for b in 0..a {
                let v =
                    (rho(shift(a, h, b, h)) - rho(shift(a, h, b, -h)) - rho(shift(a, -h, b, h))
                        + rho(shift(a, -h, b, -h)))
                        / (4.0 * h * h);
                hs[a][b] = v;
                hs[b][a] = v;
            }
        }
        // H_ab = ¼[(ρ_{x_a x_b} + ρ_{y_a y_b}) + i(ρ_{x_a y_b} − ρ_{y_a x_b})]
        let (xi, yi) = ([0, 2], [1, 3]);
        let entry = |a: usize, b: usize| {
            C64::new(
                hs[xi[a]][xi[b]] + hs[yi[a]][yi[b]],
                hs[xi[a]][yi[b]] - hs[yi[a]][xi[b]],
            ) / 4.0
        };
        let (h11, h22, h12) = (entry(0, 0).re, entry(1, 1).re, entry(0, 1));
        let mean = (h11 + h22) / 2.0;
        let disc = (((h11 - h22) / 2.0).powi(2) + h12.norm_sqr()).sqrt();
        out.push(LeviSample {
            x,
            y,
            min_eigenvalue: mean - disc,
        });
    }
    let global_min = out
        .iter()
        .map(|s| s.min_eigenvalue)
        .fold(f64::INFINITY, f64::min);
    Ok(LeviReport {
        pass: !out.is_empty() && global_min >= LEVI_THRESHOLD,
        samples: out,
        skipped,
        global_min,
        threshold: LEVI_THRESHOLD,
    })
}

// ---------------------------------------------------------------------------
// Hyperconvex index

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperconvexRow {
    pub anchor: C64,
    pub s: f64,
    pub delta: f64,
    /// `−ρ/δ`
    pub q1: f64,
    /// `−ρ/δ^α`
    pub q_alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperconvexVerdict {
    /// Both `−ρ ≥ cδ` and `−ρ ≤ Cδ^α` look sustainable over the samples.
    Consistent,
    /// `−ρ/δ^α` grows without bound.
    UpperBoundFails,
    /// `−ρ/δ` collapses: no Hopf constant.
    HopfFails,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperconvexReport {
    pub alpha: f64,
    pub rows: Vec<HyperconvexRow>,
    /// Smallest `−ρ/δ` seen.
    pub c_fit: f64,
    /// Largest `−ρ/δ^α` seen.
    pub upper_fit: f64,
    /// `C·δ_min^{α−1} − c`; negative means both bounds cannot hold at `δ_min`.
    pub margin: f64,
    pub verdict: HyperconvexVerdict,
}

/// Growth or decay by more than this factor across the schedule decides a trend.
pub const TREND_FACTOR: f64 = 10.0;

/// Samples `ρ` at `anchor + s_k ν` for inward normals `ν` at the boundary
/// anchors and `s_k = s0·2^-k`, `k < steps`.
pub fn hyperconvex_index_falsifier<F>(
    domain: &PlanarDomain,
    rho: F,
    alpha: f64,
    anchors: &[C64],
    s0: f64,
    steps: usize,
) -> Result<HyperconvexReport>
where
    F: Fn(C64) -> f64,
{
    if anchors.is_empty() || steps < 2 || !(s0 > 0.0) {
        return Err(Error::InvalidInput(
            "need anchors, s0 > 0 and at least two steps".into(),
        ));
    }
    let mut rows = Vec::new();
    let mut verdict = HyperconvexVerdict::Consistent;
    for &a in anchors {
        let sd = domain.signed_distance(a);
        if sd.value.abs() > 1e-12 || sd.gradient.norm() == 0.0 {
            return Err(Error::Precondition(format!(
                "{a} is not on a smooth boundary piece"
            )));
        }
        let nu = sd.gradient;
        let mut line = Vec::with_capacity(steps);
        for k in 0..steps {
            let s = s0 * (-(k as f64)).exp2();
            let z = a + nu * s;
            let delta = domain.delta(z);
            let r = rho(z);
            if !(r < 0.0) || !(delta > 0.0) {
                return Err(Error::Precondition(format!(
                    "ρ must be negative inside (at {z})"
                )));
            }
            line.push(HyperconvexRow {
                anchor: a,
                s,
                delta,
                q1: -r / delta,
                q_alpha: -r / delta.powf(alpha),
            });
        }
        let (first, last) = (line[0], line[steps - 1]);
        if last.q1 < first.q1 / TREND_FACTOR {
            verdict = HyperconvexVerdict::HopfFails;
        } else if last.q_alpha > first.q_alpha * TREND_FACTOR
            && verdict == HyperconvexVerdict::Consistent
        {
            verdict = HyperconvexVerdict::UpperBoundFails;
        }
        rows.extend(line);
    }
    let c_fit = rows.iter().map(|r| r.q1).fold(f64::INFINITY, f64::min);
    let upper_fit = rows.iter().map(|r| r.q_alpha).fold(0.0, f64::max);
    let dmin = rows.iter().map(|r| r.delta).fold(f64::INFINITY, f64::min);
    Ok(HyperconvexReport {
        alpha,
        c_fit,
        upper_fit,
        margin: upper_fit * dmin.powf(alpha - 1.0) - c_fit,
        rows,
        verdict,
    })
}
