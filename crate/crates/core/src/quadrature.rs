//! Adaptive dyadic quadrature over implicit planar regions and over Hartogs
//! domains.
//!
//! A region is anything that can report a 1-Lipschitz signed distance with a
//! gradient and a component tag. Cells of a quadtree over its bounding square
//! are kept whole (4×4 Gauss–Legendre) when comfortably inside, and split into
//! 4×4 subcells at the finest level when they meet the boundary. A boundary
//! subcell is clipped against the tangent half-plane of the signed distance;
//! where the tangent is meaningless (ridges, punctures) point membership is
//! used instead.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{Component, HartogsDomain, PlanarDomain};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub value: f64,
    pub gradient: C64,
    pub tag: u32,
    /// The nearest boundary piece is a single point.
    pub point_like: bool,
}

pub trait Region: Sync {
    fn probe(&self, z: C64) -> Probe;
    fn bounding_square(&self) -> (C64, f64);
    /// Points where the signed distance has a cone or the region a puncture.
    fn kinks(&self) -> Vec<C64>;
}

impl Region for PlanarDomain {
    fn probe(&self, z: C64) -> Probe {
        let s = self.signed_distance(z);
        Probe {
            value: s.value,
            gradient: s.gradient,
            tag: s.nearest.tag(),
            point_like: matches!(s.nearest, Component::Puncture(_)),
        }
    }

    fn bounding_square(&self) -> (C64, f64) {
        PlanarDomain::bounding_square(self)
    }

    fn kinks(&self) -> Vec<C64> {
        let mut k = vec![self.outer().center];
        k.extend(self.holes().iter().map(|h| h.center));
        k.extend(self.punctures().iter().copied());
        k
    }
}

/// The boundary collar `{z ∈ D : 0 < δ_D(z) < t}`.
pub struct Collar<'a> {
    pub domain: &'a PlanarDomain,
    pub t: f64,
}

impl Region for Collar<'_> {
    fn probe(&self, z: C64) -> Probe {
        let p = self.domain.probe(z);
        if p.value <= self.t - p.value {
            p
        } else {
            Probe {
                value: self.t - p.value,
                gradient: -p.gradient,
                tag: u32::MAX,
                point_like: false,
            }
        }
    }

    fn bounding_square(&self) -> (C64, f64) {
        self.domain.bounding_square()
    }

    fn kinks(&self) -> Vec<C64> {
        self.domain.kinks()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub max_depth: u32,
    pub min_depth: u32,
    /// A cell is accepted as interior once `sd(center) > grading · half_diagonal`.
    pub grading: f64,
    /// Extra points around which cells are refined down to `singular_depth`.
    pub singular_points: Vec<[f64; 2]>,
    pub singular_depth: u32,
    pub ridge_depth: u32,
    /// Flag estimates whose boundary mass bound exceeds this.
    pub tolerance: Option<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            max_depth: 11,
            min_depth: 3,
            grading: 2.0,
            singular_points: vec![],
            singular_depth: 14,
            ridge_depth: 11,
            tolerance: None,
        }
    }
}

impl QuadratureConfig {
    pub fn with_depth(depth: u32) -> Self {
        QuadratureConfig {
            max_depth: depth,
            ridge_depth: depth,
            singular_depth: depth.max(14),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralEstimate {
    pub value: C64,
    pub boundary_mass_bound: f64,
    /// Tolerance was requested and the boundary bound did not meet it.
    pub flagged: bool,
    pub nodes: usize,
}

/// A fixed set of nodes and weights for one region and configuration.
#[derive(Debug, Clone)]
pub struct PlanarRule {
    pub nodes: Vec<C64>,
    pub weights: Vec<f64>,
    /// Area of boundary subcells attributed to each node (zero for clean nodes).
    pub ambiguous: Vec<f64>,
    pub tolerance: Option<f64>,
}

const GL4_X: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_W: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

struct Builder<'a, R: Region> {
    region: &'a R,
    cfg: &'a QuadratureConfig,
    singular: Vec<C64>,
}

#[derive(Default)]
struct Acc {
    nodes: Vec<C64>,
    weights: Vec<f64>,
    ambiguous: Vec<f64>,
}

impl Acc {
    fn push(&mut self, z: C64, w: f64, a: f64) {
        self.nodes.push(z);
        self.weights.push(w);
        self.ambiguous.push(a);
    }
}

impl<R: Region> Builder<'_, R> {
    fn visit(&self, c: C64, hw: f64, depth: u32, out: &mut Acc) {
        let hd = hw * std::f64::consts::SQRT_2;
        let p = self.region.probe(c);
        if p.value < -hd {
            return;
        }
        let cfg = self.cfg;
        let near_singular = depth < cfg.singular_depth
            && self
                .singular
                .iter()
                .any(|&s| (c - s).norm() < cfg.grading * hd);
        let mut refine = near_singular;
        if !refine && depth < cfg.max_depth {
            refine = depth < cfg.min_depth || p.value <= cfg.grading * hd;
            if !refine && depth < cfg.ridge_depth {
                refine = self.ridge(c, hw, p.tag);
            }
        }
        if refine {
            let q = hw / 2.0;
            for (dx, dy) in [(-q, -q), (q, -q), (-q, q), (q, q)] {
                self.visit(c + C64::new(dx, dy), q, depth + 1, out);
            }
        } else if p.value > hd {
            for (a, &xa) in GL4_X.iter().enumerate() {
                for (b, &xb) in GL4_X.iter().enumerate() {
                    out.push(
                        c + C64::new(xa, xb) * hw,
                        hw * hw * GL4_W[a] * GL4_W[b],
                        0.0,
                    );
                }
            }
        } else {
            self.boundary_leaf(c, hw, out);
        }
    }

    fn ridge(&self, c: C64, hw: f64, tag: u32) -> bool {
        [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)]
            .iter()
            .any(|&(x, y)| self.region.probe(c + C64::new(x, y) * hw).tag != tag)
    }

    fn boundary_leaf(&self, c: C64, hw: f64, out: &mut Acc) {
        let hs = hw / 4.0;
        let hds = hs * std::f64::consts::SQRT_2;
        let area = 4.0 * hs * hs;
        for a in 0..4 {
            for b in 0..4 {
                let cs = c + C64::new(-hw + (2 * a + 1) as f64 * hs, -hw + (2 * b + 1) as f64 * hs);
                let p = self.region.probe(cs);
                if p.value > hds {
                    out.push(cs, area, 0.0);
                } else if p.value < -hds {
                } else if p.point_like {
                    if p.value > 0.0 {
                        out.push(cs, area, area);
                    }
                } else if p.gradient.norm() == 0.0 || self.ridge(cs, hs, p.tag) {
                    self.membership(cs, hs, area, out);
                } else {
                    let (clipped, m) = clip_square(cs, hs, p.value, p.gradient);
                    if clipped > 0.0 {
                        out.push(m, clipped, area);
                    }
                }
            }
        }
    }

    fn membership(&self, cs: C64, hs: f64, area: f64, out: &mut Acc) {
        let h = hs / 4.0;
        let a16 = area / 16.0;
        for a in 0..4 {
            for b in 0..4 {
                let z = cs + C64::new(-hs + (2 * a + 1) as f64 * h, -hs + (2 * b + 1) as f64 * h);
                if self.region.probe(z).value > 0.0 {
                    out.push(z, a16, a16);
                }
            }
        }
    }
}

/// Area and centroid of the square `cs ± hs` intersected with the half-plane
/// `value + <gradient, z − cs> ≥ 0`.
fn clip_square(cs: C64, hs: f64, value: f64, g: C64) -> (f64, C64) {
    let poly = [
        C64::new(-hs, -hs),
        C64::new(hs, -hs),
        C64::new(hs, hs),
        C64::new(-hs, hs),
    ];
    let lin = |z: C64| value + g.re * z.re + g.im * z.im;
    let mut out: Vec<C64> = Vec::with_capacity(5);
    for i in 0..4 {
        let (p, q) = (poly[i], poly[(i + 1) % 4]);
        let (lp, lq) = (lin(p), lin(q));
        if lp >= 0.0 {
            out.push(p);
        }
        if (lp >= 0.0) != (lq >= 0.0) {
            let s = lp / (lp - lq);
            out.push(p + (q - p) * s);
        }
    }
    if out.len() < 3 {
        return (0.0, cs);
    }
    let (mut a2, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..out.len() {
        let (p, q) = (out[i], out[(i + 1) % out.len()]);
        let cr = p.re * q.im - q.re * p.im;
        a2 += cr;
        cx += (p.re + q.re) * cr;
        cy += (p.im + q.im) * cr;
    }
    if a2 <= 0.0 {
        return (0.0, cs);
    }
    (a2 / 2.0, cs + C64::new(cx, cy) / (3.0 * a2))
}

impl PlanarRule {
    pub fn build<R: Region>(region: &R, cfg: &QuadratureConfig) -> Self {
        let mut singular = region.kinks();
        singular.extend(cfg.singular_points.iter().map(|p| C64::new(p[0], p[1])));
        let b = Builder {
            region,
            cfg,
            singular,
        };
        let (c0, hw0) = region.bounding_square();
        // enumerate the cells at min_depth in a fixed order, then fan out
        let top = cfg.min_depth.min(4);
        let n = 1usize << top;
        let hw = hw0 / n as f64;
        let cells: Vec<C64> = (0..n * n)
            .map(|k| {
                let (i, j) = (k % n, k / n);
                c0 + C64::new(
                    -hw0 + (2 * i + 1) as f64 * hw,
                    -hw0 + (2 * j + 1) as f64 * hw,
                )
            })
            .collect();
        let parts: Vec<Acc> = cells
            .par_iter()
            .map(|&c| {
                let mut acc = Acc::default();
                b.visit(c, hw, top, &mut acc);
                acc
            })
            .collect();
        let mut rule = PlanarRule {
            nodes: vec![],
            weights: vec![],
            ambiguous: vec![],
            tolerance: cfg.tolerance,
        };
        for p in parts {
            rule.nodes.extend(p.nodes);
            rule.weights.extend(p.weights);
            rule.ambiguous.extend(p.ambiguous);
        }
        rule
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F>(&self, f: F) -> IntegralEstimate
    where
        F: Fn(C64) -> C64 + Sync,
    {
        let (value, bound) = pairwise(
            self.nodes.len(),
            &|r: Range<usize>| {
                let mut s = C64::new(0.0, 0.0);
                let mut m = 0.0;
                for i in r {
                    let v = f(self.nodes[i]);
                    s += v * self.weights[i];
                    if self.ambiguous[i] > 0.0 {
                        m += self.ambiguous[i] * v.norm();
                    }
                }
                (s, m)
            },
            &|a: (C64, f64), b: (C64, f64)| (a.0 + b.0, a.1 + b.1),
        );
        IntegralEstimate {
            value,
            boundary_mass_bound: bound,
            flagged: self.tolerance.is_some_and(|t| bound > t),
            nodes: self.nodes.len(),
        }
    }

    pub fn area(&self) -> f64 {
        self.integrate(|_| C64::new(1.0, 0.0)).value.re
    }
}

pub const PAIRWISE_CHUNK: usize = 2048;

/// Fixed-shape pairwise reduction: the split points depend only on `n`, so the
/// result is bit-identical for any number of worker threads.
pub fn pairwise<T, M, C>(n: usize, map: &M, combine: &C) -> T
where
    T: Send,
    M: Fn(Range<usize>) -> T + Sync,
    C: Fn(T, T) -> T + Sync,
{
    fn rec<T: Send, M, C>(lo: usize, hi: usize, map: &M, combine: &C) -> T
    where
        M: Fn(Range<usize>) -> T + Sync,
        C: Fn(T, T) -> T + Sync,
    {
        if hi - lo <= PAIRWISE_CHUNK {
            return map(lo..hi);
        }
        let mid = lo + (hi - lo) / 2;
        let (a, b) = rayon::join(|| rec(lo, mid, map, combine), || rec(mid, hi, map, combine));
        combine(a, b)
    }
    rec(0, n, map, combine)
}

/// `∫_D f · density`, with the density evaluated from the domain's signed
/// distance.
pub fn integrate_planar<F, W>(
    domain: &PlanarDomain,
    integrand: F,
    density: W,
    cfg: &QuadratureConfig,
) -> IntegralEstimate
where
    F: Fn(C64) -> C64 + Sync,
    W: Fn(C64) -> f64 + Sync,
{
    PlanarRule::build(domain, cfg).integrate(|z| integrand(z) * density(z))
}

// ---------------------------------------------------------------------------
// Hartogs domains

/// Polar rule on the unit disc: `annuli` equal rings, Gauss–Legendre in the
/// radius, trapezoid in the angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberRule {
    pub annuli: usize,
    pub radial: usize,
    pub angular: usize,
}

impl Default for FiberRule {
    fn default() -> Self {
        FiberRule {
            annuli: 2,
            radial: 8,
            angular: 24,
        }
    }
}

impl FiberRule {
    /// Nodes and weights on the unit disc (weights sum to π).
    pub fn unit_nodes(&self) -> Vec<(C64, f64)> {
        let (x, w) = gauss_legendre(self.radial);
        let mut out = Vec::with_capacity(self.annuli * self.radial * self.angular);
        let dr = 1.0 / self.annuli as f64;
        let dth = std::f64::consts::TAU / self.angular as f64;
        for a in 0..self.annuli {
            let r0 = a as f64 * dr;
            for (xi, wi) in x.iter().zip(&w) {
                let r = r0 + dr * (xi + 1.0) / 2.0;
                let wr = wi * dr / 2.0 * r;
                for m in 0..self.angular {
                    // offset by half a step so no node sits on the positive real axis
                    let th = dth * (m as f64 + 0.5);
                    out.push((C64::from_polar(r, th), wr * dth));
                }
            }
        }
        out
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm = if n <= 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[n - 1 - i] = z;
        w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// `∫_Ω f(z, w)` over `Ω = {|w| < δ(z)^α}` with unit density.
pub fn integrate_hartogs<F>(
    h: &HartogsDomain,
    integrand: F,
    cfg: &QuadratureConfig,
    fiber: &FiberRule,
) -> IntegralEstimate
where
    F: Fn(C64, C64) -> C64 + Sync,
{
    let rule = PlanarRule::build(&h.base, cfg);
    let fib = fiber.unit_nodes();
    let (value, bound) = pairwise(
        rule.len(),
        &|r: Range<usize>| {
            let mut s = C64::new(0.0, 0.0);
            let mut m = 0.0;
            for i in r {
                let z = rule.nodes[i];
                let rad = h.fiber_radius(z);
                if rad <= 0.0 {
                    continue;
                }
                let mut inner = C64::new(0.0, 0.0);
                let mut mag = 0.0;
                for &(u, wu) in &fib {
                    let v = integrand(z, u * rad);
                    inner += v * wu;
                    mag += v.norm() * wu;
                }
                let r2 = rad * rad;
                s += inner * (rule.weights[i] * r2);
                m += rule.ambiguous[i] * mag * r2;
            }
            (s, m)
        },
        &|a: (C64, f64), b: (C64, f64)| (a.0 + b.0, a.1 + b.1),
    );
    IntegralEstimate {
        value,
        boundary_mass_bound: bound,
        flagged: cfg.tolerance.is_some_and(|t| bound > t),
        nodes: rule.len() * fib.len(),
    }
}
