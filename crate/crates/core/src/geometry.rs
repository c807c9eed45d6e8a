//! Planar domains of the form "disc minus finitely many closed discs and points",
//! their exact signed boundary distance, Stein neighborhood families, and the
//! Hartogs and tube domains built over them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// A boundary component of a [`PlanarDomain`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    Outer,
    Hole(usize),
    Puncture(usize),
}

impl Component {
    /// Dense integer tag, used by the quadrature to detect distance ridges.
    pub fn tag(self) -> u32 {
        match self {
            Component::Outer => 0,
            Component::Hole(l) => 1 + 2 * l as u32,
            Component::Puncture(p) => 2 + 2 * p as u32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedDistance {
    pub value: f64,
    pub nearest: Component,
    /// Unit gradient of the signed distance, as a vector in the plane. Zero at
    /// points where the nearest boundary point is not unique by symmetry
    /// (e.g. the center of a disc).
    pub gradient: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: C64,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: C64, radius: f64) -> Self {
        Disc { center, radius }
    }
}

/// Outer open disc minus closed hole discs and puncture points.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarDomain {
    outer: Disc,
    holes: Vec<Disc>,
    punctures: Vec<C64>,
}

impl PlanarDomain {
    pub fn new(outer: Disc, holes: Vec<Disc>, punctures: Vec<C64>) -> Result<Self> {
        let d = PlanarDomain {
            outer,
            holes,
            punctures,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn unit_disc() -> Self {
        PlanarDomain {
            outer: Disc::new(C64::new(0.0, 0.0), 1.0),
            holes: vec![],
            punctures: vec![],
        }
    }

    pub fn disc(center: C64, radius: f64) -> Result<Self> {
        Self::new(Disc::new(center, radius), vec![], vec![])
    }

    /// Unit disc with a single puncture at the origin.
    pub fn punctured_unit_disc() -> Self {
        PlanarDomain {
            outer: Disc::new(C64::new(0.0, 0.0), 1.0),
            holes: vec![],
            punctures: vec![C64::new(0.0, 0.0)],
        }
    }

    /// Unit disc minus `n_holes` closed discs centered at `2^-l` with radius
    /// `2^-l / 5`, l = 1..=n_holes. Radii stay at or above `1e-2` for n_holes <= 4.
    pub fn scaled_zalcman(n_holes: usize) -> Result<Self> {
        let holes = (1..=n_holes)
            .map(|l| {
                let x = 0.5f64.powi(l as i32);
                Disc::new(C64::new(x, 0.0), x / 5.0)
            })
            .collect();
        Self::new(Disc::new(C64::new(0.0, 0.0), 1.0), holes, vec![])
    }

    fn validate(&self) -> Result<()> {
        let o = &self.outer;
        if !(o.radius.is_finite() && o.radius > 0.0) || !finite(o.center) {
            return Err(Error::InvalidDomain(format!(
                "outer radius must be positive and finite, got {}",
                o.radius
            )));
        }
        for (l, h) in self.holes.iter().enumerate() {
            if !(h.radius.is_finite() && h.radius > 0.0) || !finite(h.center) {
                return Err(Error::InvalidDomain(format!(
                    "hole {l} radius must be positive and finite, got {}",
                    h.radius
                )));
            }
            if (h.center - o.center).norm() + h.radius >= o.radius {
                return Err(Error::InvalidDomain(format!(
                    "closure of hole {l} is not inside the open outer disc"
                )));
            }
            for (m, g) in self.holes.iter().enumerate().take(l) {
                if (h.center - g.center).norm() <= h.radius + g.radius {
                    return Err(Error::InvalidDomain(format!(
                        "holes {m} and {l} have intersecting closures"
                    )));
                }
            }
        }
        for (p, &z) in self.punctures.iter().enumerate() {
            if !finite(z) {
                return Err(Error::InvalidDomain(format!("puncture {p} is not finite")));
            }
            let sd = self.signed_distance_without_puncture(z, Some(p));
            if sd.value <= 0.0 {
                return Err(Error::InvalidDomain(format!(
                    "puncture {p} must lie in the open domain"
                )));
            }
        }
        Ok(())
    }

    pub fn outer(&self) -> Disc {
        self.outer
    }

    pub fn holes(&self) -> &[Disc] {
        &self.holes
    }

    pub fn punctures(&self) -> &[C64] {
        &self.punctures
    }

    pub fn contains(&self, z: C64) -> bool {
        if (z - self.outer.center).norm() >= self.outer.radius {
            return false;
        }
        if self.holes.iter().any(|h| (z - h.center).norm() <= h.radius) {
            return false;
        }
        !self.punctures.contains(&z)
    }

    pub fn signed_distance(&self, z: C64) -> SignedDistance {
        self.signed_distance_without_puncture(z, None)
    }

    fn signed_distance_without_puncture(&self, z: C64, skip: Option<usize>) -> SignedDistance {
        let d = z - self.outer.center;
        let r = d.norm();
        let mut best = SignedDistance {
            value: self.outer.radius - r,
            nearest: Component::Outer,
            gradient: if r > 0.0 { -d / r } else { C64::new(0.0, 0.0) },
        };
        for (l, h) in self.holes.iter().enumerate() {
            let d = z - h.center;
            let r = d.norm();
            let v = r - h.radius;
            if v < best.value {
                best = SignedDistance {
                    value: v,
                    nearest: Component::Hole(l),
                    gradient: if r > 0.0 { d / r } else { C64::new(0.0, 0.0) },
                };
            }
        }
        for (p, &c) in self.punctures.iter().enumerate() {
            if Some(p) == skip {
                continue;
            }
            let d = z - c;
            let r = d.norm();
            if r < best.value {
                best = SignedDistance {
                    value: r,
                    nearest: Component::Puncture(p),
                    gradient: if r > 0.0 { d / r } else { C64::new(0.0, 0.0) },
                };
            }
        }
        best
    }

    /// Boundary distance `δ(z)`, clamped at zero outside the domain.
    pub fn delta(&self, z: C64) -> f64 {
        self.signed_distance(z).value.max(0.0)
    }

    /// Center and half-width of an axis-aligned square containing the closure.
    pub fn bounding_square(&self) -> (C64, f64) {
        (self.outer.center, self.outer.radius)
    }

    /// Orthogonal projection of `z` onto the boundary component nearest to it.
    pub fn project_to_boundary(&self, z: C64) -> C64 {
        let sd = self.signed_distance(z);
        match sd.nearest {
            Component::Puncture(p) => self.punctures[p],
            _ => z - sd.gradient * sd.value,
        }
    }

    /// Closed-set distance from `z` to a single boundary component, measured
    /// as that component contributes to the signed distance.
    pub fn component_term(&self, z: C64, c: Component) -> f64 {
        match c {
            Component::Outer => self.outer.radius - (z - self.outer.center).norm(),
            Component::Hole(l) => (z - self.holes[l].center).norm() - self.holes[l].radius,
            Component::Puncture(p) => (z - self.punctures[p]).norm(),
        }
    }

    pub fn components(&self) -> Vec<Component> {
        let mut v = vec![Component::Outer];
        v.extend((0..self.holes.len()).map(Component::Hole));
        v.extend((0..self.punctures.len()).map(Component::Puncture));
        v
    }
}

fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `signed_distance` as a free function.
pub fn signed_distance(domain: &PlanarDomain, z: C64) -> SignedDistance {
    domain.signed_distance(z)
}

// ---------------------------------------------------------------------------
// JSON form

#[derive(Serialize, Deserialize)]
struct DiscDoc {
    center: [f64; 2],
    radius: f64,
}

#[derive(Serialize, Deserialize)]
struct DomainDoc {
    outer: DiscDoc,
    #[serde(default)]
    holes: Vec<DiscDoc>,
    #[serde(default)]
    punctures: Vec<[f64; 2]>,
}

impl Serialize for PlanarDomain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let disc = |d: &Disc| DiscDoc {
            center: [d.center.re, d.center.im],
            radius: d.radius,
        };
        DomainDoc {
            outer: disc(&self.outer),
            holes: self.holes.iter().map(disc).collect(),
            punctures: self.punctures.iter().map(|p| [p.re, p.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PlanarDomain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = DomainDoc::deserialize(d)?;
        let disc = |d: &DiscDoc| Disc::new(C64::new(d.center[0], d.center[1]), d.radius);
        PlanarDomain::new(
            disc(&doc.outer),
            doc.holes.iter().map(disc).collect(),
            doc.punctures.iter().map(|p| C64::new(p[0], p[1])).collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Neighborhood families

/// How `member(t)` is derived from the base domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyRule {
    /// Outer radius grows by `t`, every hole shrinks by `t`, punctures are filled.
    Uniform,
    /// `t = 2^-j`: outer radius `1 + s`, holes `l <= j` shrink by `s`, holes `l > j`
    /// are filled, with `s = 2^-2^(j/3)`.
    ShrinkingHoles,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodFamily {
    pub base: PlanarDomain,
    /// Strictly decreasing parameter values.
    pub schedule: Vec<f64>,
    pub rule: FamilyRule,
}

/// The shrink amount `2^-(1/t^(1/3))`, which equals `2^-2^(j/3)` at `t = 2^-j`.
///
/// The lower bound `exp(-log 2 / t^(1/3))` of the gap profile is the same
/// number; both go through this function so the identity holds bit for bit.
pub fn hole_shrink_exponent(t: f64) -> f64 {
    1.0 / t.cbrt()
}

pub fn hole_shrink(t: f64) -> f64 {
    (-hole_shrink_exponent(t)).exp2()
}

impl NeighborhoodFamily {
    pub fn new(base: PlanarDomain, schedule: Vec<f64>, rule: FamilyRule) -> Result<Self> {
        if schedule.is_empty() {
            return Err(Error::InvalidInput("empty parameter schedule".into()));
        }
        if schedule.windows(2).any(|w| w[1] >= w[0]) || schedule.iter().any(|&t| t <= 0.0) {
            return Err(Error::InvalidInput(
                "schedule must be positive and strictly decreasing".into(),
            ));
        }
        Ok(NeighborhoodFamily {
            base,
            schedule,
            rule,
        })
    }

    pub fn member(&self, t: f64) -> Result<PlanarDomain> {
        let base = &self.base;
        match self.rule {
            FamilyRule::Uniform => {
                let outer = Disc::new(base.outer.center, base.outer.radius + t);
                let holes = base
                    .holes
                    .iter()
                    .filter(|h| h.radius - t > 0.0)
                    .map(|h| Disc::new(h.center, h.radius - t))
                    .collect();
                PlanarDomain::new(outer, holes, vec![])
            }
            FamilyRule::ShrinkingHoles => {
                let j = (-t.log2()).round().max(0.0) as usize;
                let s = hole_shrink(t);
                if s < f64::MIN_POSITIVE {
                    return Err(Error::ScaleUnderflow { j: j as u32 });
                }
                let outer = Disc::new(base.outer.center, base.outer.radius + s);
                let holes = base
                    .holes
                    .iter()
                    .take(j)
                    .filter(|h| h.radius - s > 0.0)
                    .map(|h| Disc::new(h.center, h.radius - s))
                    .collect();
                PlanarDomain::new(outer, holes, vec![])
            }
        }
    }

    pub fn members(&self) -> Result<Vec<(f64, PlanarDomain)>> {
        self.schedule
            .iter()
            .map(|&t| self.member(t).map(|m| (t, m)))
            .collect()
    }
}

/// The Zalcman-type domain with holes at `2^-l` of radius `2^-3l`, l <= j_max,
/// together with its neighborhood family at `t_j = 2^-j`, j = 1..=j_max.
pub fn zalcman_shrink_family(j_max: u32) -> Result<(PlanarDomain, NeighborhoodFamily)> {
    if j_max < 1 {
        return Err(Error::InvalidInput("j_max must be at least 1".into()));
    }
    let t_last = 0.5f64.powi(j_max as i32);
    if hole_shrink(t_last) < f64::MIN_POSITIVE {
        return Err(Error::ScaleUnderflow { j: j_max });
    }
    let holes = (1..=j_max as i32)
        .map(|l| Disc::new(C64::new(0.5f64.powi(l), 0.0), 0.5f64.powi(3 * l)))
        .collect();
    let base = PlanarDomain::new(Disc::new(C64::new(0.0, 0.0), 1.0), holes, vec![])?;
    let schedule = (1..=j_max as i32).map(|j| 0.5f64.powi(j)).collect();
    let family = NeighborhoodFamily::new(base.clone(), schedule, FamilyRule::ShrinkingHoles)?;
    Ok((base, family))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapRow {
    pub t: f64,
    /// Largest distance from a base boundary sample to the member's boundary.
    pub sup_gap: f64,
    /// Smallest such distance.
    pub inf_gap: f64,
}

/// Sup/inf of `δ_{member(t)}` over samples of the base boundary, for every
/// scheduled `t`. Samples are first projected onto the base boundary.
pub fn neighborhood_gap_profile(
    family: &NeighborhoodFamily,
    samples: &[C64],
) -> Result<Vec<GapRow>> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("empty boundary sample list".into()));
    }
    let pts: Vec<C64> = samples
        .iter()
        .map(|&z| family.base.project_to_boundary(z))
        .collect();
    family
        .schedule
        .iter()
        .map(|&t| {
            let m = family.member(t)?;
            let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
            for &z in &pts {
                let v = m.signed_distance(z).value;
                hi = hi.max(v);
                lo = lo.min(v);
            }
            Ok(GapRow {
                t,
                sup_gap: hi,
                inf_gap: lo,
            })
        })
        .collect()
}

/// Evenly spaced samples on every boundary component (punctures contribute
/// the point itself).
pub fn boundary_samples(domain: &PlanarDomain, per_circle: usize) -> Vec<C64> {
    let mut out = Vec::new();
    let mut circle = |c: C64, r: f64| {
        for i in 0..per_circle {
            let th = std::f64::consts::TAU * i as f64 / per_circle as f64;
            out.push(c + C64::from_polar(r, th));
        }
    };
    circle(domain.outer.center, domain.outer.radius);
    for h in &domain.holes {
        circle(h.center, h.radius);
    }
    out.extend(domain.punctures.iter().copied());
    out
}

// ---------------------------------------------------------------------------
// Enlargement by a small disc at a boundary point

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DkBoundReport {
    pub z0: C64,
    pub r_k: f64,
    pub samples_used: usize,
    pub max_ratio: f64,
    pub pass: bool,
}

/// Checks `δ_{D ∪ Δ(z0, r_k)} <= 3 δ_D` on `D ∩ {2 r_k <= |z - z0| <= sqrt(2 r_k)}`.
pub fn dk_bound_check(
    domain: &PlanarDomain,
    z0: C64,
    r_k: f64,
    samples: usize,
) -> Result<DkBoundReport> {
    if !(r_k > 0.0) {
        return Err(Error::InvalidInput("r_k must be positive".into()));
    }
    let (r_in, r_out) = (2.0 * r_k, (2.0 * r_k).sqrt());
    if r_in > r_out {
        return Err(Error::DegenerateAnnulus { r_k });
    }
    let sd0 = domain.signed_distance(z0);
    if sd0.value.abs() > 1e-9 {
        return Err(Error::Precondition(format!(
            "z0 = {z0} is not on the boundary (signed distance {})",
            sd0.value
        )));
    }
    let own = sd0.nearest;
    if let Component::Puncture(_) = own {
        return Err(Error::IsolatedBoundaryPoint(z0));
    }
    for c in domain.components() {
        if c != own && domain.component_term(z0, c) <= r_k {
            return Err(Error::Precondition(format!(
                "r_k = {r_k} reaches boundary component {c:?} other than the one through z0"
            )));
        }
    }
    let n_r = samples.max(2);
    let n_th = 4 * samples.max(2);
    let mut max_ratio: f64 = 0.0;
    let mut used = 0;
    for i in 0..n_r {
        let rad = r_in + (r_out - r_in) * i as f64 / (n_r - 1) as f64;
        for k in 0..n_th {
            let th = std::f64::consts::TAU * (k as f64 + 0.5) / n_th as f64;
            let z = z0 + C64::from_polar(rad, th);
            let d = domain.signed_distance(z).value;
            if d <= 0.0 {
                continue;
            }
            let dk = enlarged_distance(domain, z, own, z0, r_k);
            max_ratio = max_ratio.max(dk / d);
            used += 1;
        }
    }
    Ok(DkBoundReport {
        z0,
        r_k,
        samples_used: used,
        max_ratio,
        pass: used > 0 && max_ratio <= 3.0 + 1e-9,
    })
}

/// Boundary distance of `D ∪ Δ(z0, r)` at a point `z ∈ D` outside `Δ(z0, r)`,
/// where the small disc only meets the boundary component `own`.
pub fn enlarged_distance(domain: &PlanarDomain, z: C64, own: Component, z0: C64, r: f64) -> f64 {
    let mut best = f64::INFINITY;
    for c in domain.components() {
        if c != own {
            best = best.min(domain.component_term(z, c));
        }
    }
    // Distance from z to (closed complement piece C) minus the open disc Δ(z0, r).
    let (cc, cr, exterior) = match own {
        Component::Outer => (domain.outer.center, domain.outer.radius, true),
        Component::Hole(l) => (domain.holes[l].center, domain.holes[l].radius, false),
        Component::Puncture(_) => return best,
    };
    let in_piece = |q: C64| {
        let d = (q - cc).norm();
        if exterior {
            d >= cr * (1.0 - 1e-14)
        } else {
            d <= cr * (1.0 + 1e-14)
        }
    };
    let outside_small = |q: C64| (q - z0).norm() >= r * (1.0 - 1e-14);
    let mut own_best = f64::INFINITY;
    // nearest point of the piece's circle
    let dz = z - cc;
    if dz.norm() > 0.0 {
        let q = cc + dz * (cr / dz.norm());
        if outside_small(q) {
            own_best = own_best.min((z - q).norm());
        }
    }
    // nearest point of the small circle
    let dz0 = z - z0;
    if dz0.norm() > 0.0 {
        let q = z0 + dz0 * (r / dz0.norm());
        if in_piece(q) {
            own_best = own_best.min((z - q).norm());
        }
    }
    for q in circle_intersections(cc, cr, z0, r) {
        own_best = own_best.min((z - q).norm());
    }
    best.min(own_best)
}

fn circle_intersections(c1: C64, r1: f64, c2: C64, r2: f64) -> Vec<C64> {
    let d = (c2 - c1).norm();
    if d == 0.0 || d > r1 + r2 || d < (r1 - r2).abs() {
        return vec![];
    }
    let a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    let h = (r1 * r1 - a * a).max(0.0).sqrt();
    let u = (c2 - c1) / d;
    let p = c1 + u * a;
    let n = C64::new(-u.im, u.re);
    vec![p + n * h, p - n * h]
}

// ---------------------------------------------------------------------------
// Hartogs and tube domains

/// `{(z, w) : z ∈ base, |w| < δ_base(z)^alpha}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HartogsDomain {
    pub base: PlanarDomain,
    pub alpha: f64,
}

impl HartogsDomain {
    pub fn new(base: PlanarDomain, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        Ok(HartogsDomain { base, alpha })
    }

    pub fn fiber_radius(&self, z: C64) -> f64 {
        let d = self.base.signed_distance(z).value;
        if d <= 0.0 {
            0.0
        } else {
            d.powf(self.alpha)
        }
    }

    pub fn contains(&self, z: C64, w: C64) -> bool {
        self.base.contains(z) && w.norm() < self.fiber_radius(z)
    }
}

/// `{x + iy : x ∈ D ⊂ R², k|y|² < δ_D(x)²}` with D given by a planar domain
/// read as a subset of R².
#[derive(Debug, Clone, PartialEq)]
pub struct TubeDomain {
    pub base: PlanarDomain,
    pub k: f64,
}

impl TubeDomain {
    pub fn new(base: PlanarDomain, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidInput(format!("k must be positive, got {k}")));
        }
        Ok(TubeDomain { base, k })
    }

    /// `ρ(x, y) = k|y|² - δ_D(x)²` with the signed distance.
    pub fn defining_function(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        let d = self.base.signed_distance(C64::new(x[0], x[1])).value;
        self.k * (y[0] * y[0] + y[1] * y[1]) - d * d
    }
}

pub fn tube_membership(tube: &TubeDomain, x: [f64; 2], y: [f64; 2]) -> bool {
    let xz = C64::new(x[0], x[1]);
    if !tube.base.contains(xz) {
        return false;
    }
    let d = tube.base.signed_distance(xz).value;
    tube.k * (y[0] * y[0] + y[1] * y[1]) < d * d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn two_hole_zalcman() -> PlanarDomain {
        PlanarDomain::new(
            Disc::new(c(0.0, 0.0), 1.0),
            vec![
                Disc::new(c(0.5, 0.0), 0.125),
                Disc::new(c(0.25, 0.0), 1.0 / 64.0),
            ],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn unit_disc_distances() {
        let d = PlanarDomain::unit_disc();
        let s = d.signed_distance(c(0.0, 0.0));
        assert_eq!(s.value, 1.0);
        assert_eq!(s.nearest, Component::Outer);
        assert_eq!(d.signed_distance(c(1.5, 0.0)).value, -0.5);
    }

    #[test]
    fn zalcman_nearest_hole() {
        let s = two_hole_zalcman().signed_distance(c(0.7, 0.0));
        assert!((s.value - 0.075).abs() < 1e-15);
        assert_eq!(s.nearest, Component::Hole(0));
    }

    #[test]
    fn invalid_domains_rejected() {
        let o = Disc::new(c(0.0, 0.0), 1.0);
        assert!(PlanarDomain::new(o, vec![Disc::new(c(0.9, 0.0), 0.2)], vec![]).is_err());
        assert!(PlanarDomain::new(
            o,
            vec![Disc::new(c(0.3, 0.0), 0.1), Disc::new(c(0.45, 0.0), 0.1)],
            vec![]
        )
        .is_err());
        assert!(
            PlanarDomain::new(o, vec![Disc::new(c(0.3, 0.0), 0.1)], vec![c(0.3, 0.0)]).is_err()
        );
        assert!(PlanarDomain::new(Disc::new(c(0.0, 0.0), -1.0), vec![], vec![]).is_err());
    }

    #[test]
    fn punctures_are_boundary() {
        let d = PlanarDomain::punctured_unit_disc();
        assert!(!d.contains(c(0.0, 0.0)));
        let s = d.signed_distance(c(0.1, 0.0));
        assert_eq!(s.nearest, Component::Puncture(0));
        assert!((s.value - 0.1).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip_uses_fixed_field_names() {
        let d = PlanarDomain::new(
            Disc::new(c(0.0, 0.0), 1.0),
            vec![Disc::new(c(0.5, 0.0), 0.125)],
            vec![c(-0.5, 0.0)],
        )
        .unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains("\"outer\"") && s.contains("\"holes\"") && s.contains("\"punctures\""));
        let back: PlanarDomain = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        let bad =
            r#"{"outer":{"center":[0,0],"radius":1},"holes":[{"center":[0.9,0],"radius":0.5}]}"#;
        assert!(serde_json::from_str::<PlanarDomain>(bad).is_err());
    }

    #[test]
    fn shrink_family_j3_member_has_no_holes() {
        let (_, fam) = zalcman_shrink_family(3).unwrap();
        let m = fam.member(0.125).unwrap();
        assert_eq!(m.outer().radius, 1.25);
        assert!(m.holes().is_empty());
    }

    #[test]
    fn shrink_family_j18_keeps_innermost_hole() {
        let (base, fam) = zalcman_shrink_family(18).unwrap();
        assert_eq!(base.holes()[0].center, c(0.5, 0.0));
        assert_eq!(base.holes()[0].radius, 0.125);
        let t = 0.5f64.powi(18);
        assert_eq!(hole_shrink(t), 0.5f64.powi(64));
        let m = fam.member(t).unwrap();
        assert_eq!(m.holes().len(), 18);
        let r = m.holes()[17].radius;
        assert!(r > 0.0);
        assert_eq!(r, 0.5f64.powi(54) - 0.5f64.powi(64));
    }

    #[test]
    fn shrink_family_underflow() {
        assert!(zalcman_shrink_family(29).is_ok());
        assert_eq!(
            zalcman_shrink_family(30).unwrap_err(),
            Error::ScaleUnderflow { j: 30 }
        );
        assert!(zalcman_shrink_family(0).is_err());
    }

    #[test]
    fn gap_profile_on_outer_circle_is_the_enlargement() {
        let base = PlanarDomain::scaled_zalcman(3).unwrap();
        let fam =
            NeighborhoodFamily::new(base, vec![0.04, 0.02, 0.01], FamilyRule::Uniform).unwrap();
        let pts: Vec<C64> = (0..64)
            .map(|i| C64::from_polar(1.0, i as f64 * 0.1))
            .collect();
        for row in neighborhood_gap_profile(&fam, &pts).unwrap() {
            assert!((row.inf_gap - row.t).abs() < 1e-12);
            assert!((row.sup_gap - row.t).abs() < 1e-12);
        }
        assert!(neighborhood_gap_profile(&fam, &[]).is_err());
    }

    #[test]
    fn gap_profile_full_boundary_positive() {
        let base = PlanarDomain::scaled_zalcman(3).unwrap();
        let fam =
            NeighborhoodFamily::new(base.clone(), vec![0.02, 0.01], FamilyRule::Uniform).unwrap();
        let rows = neighborhood_gap_profile(&fam, &boundary_samples(&base, 64)).unwrap();
        for r in rows {
            assert!(r.inf_gap > 0.0 && r.sup_gap >= r.inf_gap);
            assert!((r.inf_gap - r.t).abs() < 1e-12);
        }
    }

    #[test]
    fn schedule_must_decrease() {
        let b = PlanarDomain::unit_disc();
        assert!(NeighborhoodFamily::new(b.clone(), vec![0.1, 0.2], FamilyRule::Uniform).is_err());
        assert!(NeighborhoodFamily::new(b, vec![], FamilyRule::Uniform).is_err());
    }

    #[test]
    fn dk_bound_on_outer_circle_of_punctured_disc() {
        let d = PlanarDomain::punctured_unit_disc();
        for r in [1e-2, 1e-3] {
            let rep = dk_bound_check(&d, c(1.0, 0.0), r, 40).unwrap();
            assert!(rep.samples_used > 100);
            assert!(rep.pass, "max ratio {}", rep.max_ratio);
        }
    }

    #[test]
    fn dk_bound_errors() {
        let d = PlanarDomain::punctured_unit_disc();
        assert!(matches!(
            dk_bound_check(&d, c(1.0, 0.0), 0.6, 10),
            Err(Error::DegenerateAnnulus { .. })
        ));
        assert!(matches!(
            dk_bound_check(&d, c(0.0, 0.0), 0.01, 10),
            Err(Error::IsolatedBoundaryPoint(_))
        ));
        assert!(dk_bound_check(&d, c(0.5, 0.0), 0.01, 10).is_err());
    }

    #[test]
    fn dk_case_one_ratio_is_exactly_one() {
        // z is much closer to a hole than to the small disc at z0 = 1.
        let d = two_hole_zalcman();
        let z = c(0.63, 0.0);
        let r = 0.01;
        let delta = d.signed_distance(z).value;
        assert!(delta < (z - c(1.0, 0.0)).norm() - r);
        let dk = enlarged_distance(&d, z, Component::Outer, c(1.0, 0.0), r);
        assert!((dk / delta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dk_case_two_at_hole_boundary() {
        let d = two_hole_zalcman();
        let z0 = c(0.5 + 0.125, 0.0);
        let rep = dk_bound_check(&d, z0, 1e-3, 40).unwrap();
        assert!(rep.pass, "max ratio {}", rep.max_ratio);
        assert!(rep.max_ratio > 1.0);
    }

    #[test]
    fn tube_membership_cases() {
        let base = PlanarDomain::unit_disc();
        let tube = TubeDomain::new(base, 1.0).unwrap();
        assert!(tube_membership(&tube, [0.8, 0.0], [0.1, 0.0]));
        assert!(!tube_membership(&tube, [0.8, 0.0], [0.2, 0.0]));
        assert!(tube_membership(&tube, [0.99, 0.0], [0.0, 0.0]));
        assert!(!tube_membership(&tube, [1.2, 0.0], [0.0, 0.0]));
    }

    #[test]
    fn hartogs_membership() {
        let h = HartogsDomain::new(PlanarDomain::unit_disc(), 1.0).unwrap();
        assert!(h.contains(c(0.0, 0.0), c(0.99, 0.0)));
        assert!(!h.contains(c(0.5, 0.0), c(0.0, 0.5)));
        assert!(HartogsDomain::new(PlanarDomain::unit_disc(), 0.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn signed_distance_is_1_lipschitz_and_signed(
            ax in -1.3f64..1.3, ay in -1.3f64..1.3,
            bx in -1.3f64..1.3, by in -1.3f64..1.3,
            holes in 0usize..4,
        ) {
            let d = PlanarDomain::scaled_zalcman(holes).unwrap();
            let (a, b) = (c(ax, ay), c(bx, by));
            let (sa, sb) = (d.signed_distance(a).value, d.signed_distance(b).value);
            proptest::prop_assert!((sa - sb).abs() <= (a - b).norm() * (1.0 + 1e-12) + 1e-15);
            proptest::prop_assert_eq!(sa > 0.0, d.contains(a));
            // unit-rate ascent along the gradient, off the medial axis
            let g = d.signed_distance(a).gradient;
            if sa.abs() > 1e-6 {
                proptest::prop_assert!((g.norm() - 1.0).abs() < 1e-12);
                let h = 1e-8;
                let s2 = d.signed_distance(a + g * h).value;
                proptest::prop_assert!((s2 - sa - h).abs() < 1e-12, "{} vs {}", s2 - sa, h);
            }
        }
    }
}
