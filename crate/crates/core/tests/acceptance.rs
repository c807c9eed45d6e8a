//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//! Oracles are closed forms computed here, independently of the library.

use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use bergman_core::basis::BasisSpec;
use bergman_core::criteria::{
    beta_alpha_gate, classify_eta_integral, levi_check_tube, EtaKind, EtaProfile, EtaVerdict,
};
use bergman_core::experiment::{run, ExperimentConfig, Scenario};
use bergman_core::gap_bounds::verify_gap_bounds;
use bergman_core::hartogs::{
    build_hartogs_kernel, hartogs_direct_oracle, norm_decomposition_check,
};
use bergman_core::kernel::{
    build_family_models, build_kernel, density_profile, diagonal_convergence_table,
    difference_norm_check, Weight,
};
use bergman_core::metric::boundary_mass;
use bergman_core::quadrature::{FiberRule, QuadratureConfig};
use bergman_core::{
    dk_bound_check, FamilyRule, HartogsDomain, NeighborhoodFamily, PlanarDomain, TubeDomain, C64,
};
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn fact(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// B(a, b) for positive integers.
fn beta_int(a: u32, b: u32) -> f64 {
    fact(a - 1) * fact(b - 1) / fact(a + b - 1)
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// tolerances
const TOL_1: f64 = 1e-5;
const TOL_2_CENTER: f64 = 1e-4;
const TOL_2_GRAM: f64 = 1e-5;
const TOL_3: f64 = 1e-3;
const TOL_4_REL: f64 = 1e-3;
const TOL_4_W: f64 = 1e-4;
const TOL_5: f64 = 1e-6;
const TOL_7: f64 = 1e-4;
const TOL_9: f64 = 1e-6;

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let m = build_kernel(
        &PlanarDomain::unit_disc(),
        Weight::Zero,
        &BasisSpec::polynomials(12),
        &QuadratureConfig::with_depth(11),
    )
    .map_err(err)?;
    let exact = |r: f64| 1.0 / (PI * (1.0 - r * r).powi(2));
    let e0 = (m.diag(c(0.0, 0.0)).map_err(err)? - exact(0.0)).abs();
    let e3 = (m.diag(c(0.3, 0.0)).map_err(err)? - exact(0.3)).abs();
    let secs = t0.elapsed().as_secs_f64();
    ensure(
        e0 <= TOL_1 && e3 <= TOL_1 && secs < 30.0,
        format!("|ΔK(0,0)| = {e0:.2e}, |ΔK(0.3,0.3)| = {e3:.2e} (tol {TOL_1:e}), {secs:.2} s"),
    )
}

fn criterion_2() -> Outcome {
    let n_deg = 12;
    let m = build_kernel(
        &PlanarDomain::unit_disc(),
        Weight::NegLogDistance { alpha: 1.0 },
        &BasisSpec::polynomials(n_deg),
        &QuadratureConfig::with_depth(11),
    )
    .map_err(err)?;
    let e0 = (m.diag(c(0.0, 0.0)).map_err(err)? - 3.0 / PI).abs();
    // density 1 − |z|: ‖z^n‖² = 2π ∫ r^{2n+1}(1 − r) dr = 2π B(2n+2, 2)
    let n = m.dim();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let want = if a == b {
                2.0 * PI * beta_int(2 * a as u32 + 2, 2)
            } else {
                0.0
            };
            worst = worst.max((m.gram[a * n + b] - want).norm());
        }
    }
    ensure(
        e0 <= TOL_2_CENTER && worst <= TOL_2_GRAM,
        format!("|ΔK(0,0)| = {e0:.2e} (tol {TOL_2_CENTER:e}), max Gram entry error {worst:.2e} (tol {TOL_2_GRAM:e})"),
    )
}

fn criterion_3() -> Outcome {
    let t0 = Instant::now();
    let h = HartogsDomain::new(PlanarDomain::unit_disc(), 1.0).map_err(err)?;
    let hk = build_hartogs_kernel(
        &h,
        20,
        &|d: &PlanarDomain, j| BasisSpec::for_domain(d, 12, 0, 2.0 * (j as f64 + 1.0)),
        &QuadratureConfig::with_depth(9),
    )
    .map_err(err)?;
    let oracle = hartogs_direct_oracle(
        &h,
        8,
        5,
        &QuadratureConfig::with_depth(8),
        &FiberRule::default(),
    )
    .map_err(err)?;
    let pts = [
        (c(0.0, 0.0), c(0.0, 0.0)),
        (c(0.1, 0.0), c(0.05, 0.0)),
        (c(0.0, -0.15), c(0.0, 0.05)),
        (c(-0.1, 0.1), c(0.03, -0.03)),
        (c(0.3, 0.0), c(0.1, 0.0)),
        (c(0.2, 0.2), c(-0.05, 0.05)),
    ];
    let mut worst: f64 = 0.0;
    for p in pts {
        let s = hk.diag(p).map_err(err)?.value.re;
        let o = oracle.diag(p).map_err(err)?;
        worst = worst.max((s - o).abs() / o);
    }
    let origin = hk.diag((c(0.0, 0.0), c(0.0, 0.0))).map_err(err)?.value.re;
    let e_origin = (origin - 6.0 / (PI * PI)).abs();
    let secs = t0.elapsed().as_secs_f64();
    ensure(
        worst <= TOL_3 && e_origin <= TOL_3 && secs < 300.0,
        format!(
            "{} points, max relative gap {worst:.2e}; |K(0,0) − 6/π²| = {e_origin:.2e} (tol {TOL_3:e}), {secs:.1} s",
            pts.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let h = HartogsDomain::new(PlanarDomain::unit_disc(), 1.0).map_err(err)?;
    let b = BasisSpec::polynomials(1);
    let cfg = QuadratureConfig::with_depth(9);
    let fiber = FiberRule::default();
    let (o, z) = (c(0.0, 0.0), c(1.0, 0.0));
    let cases = [
        ("1", vec![vec![z, o]]),
        ("w", vec![vec![o, o], vec![z, o]]),
        ("zw", vec![vec![o, o], vec![o, z]]),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    let mut w_norm = f64::NAN;
    for (name, slices) in cases {
        let r = norm_decomposition_check(&h, &b, &slices, &cfg, &fiber).map_err(err)?;
        let gap = (r.lhs - r.rhs).abs() / r.rhs;
        ok &= gap <= TOL_4_REL;
        if name == "w" {
            w_norm = r.lhs;
        }
        parts.push(format!("{name}: {gap:.1e}"));
    }
    let ew = (w_norm - PI * PI / 30.0).abs();
    ensure(
        ok && ew <= TOL_4_W,
        format!(
            "relative gaps [{}] (tol {TOL_4_REL:e}); |‖w‖² − π²/30| = {ew:.2e} (tol {TOL_4_W:e})",
            parts.join(", ")
        ),
    )
}

fn criterion_5() -> Outcome {
    let base = PlanarDomain::scaled_zalcman(3).map_err(err)?;
    let min_radius = base
        .holes()
        .iter()
        .map(|h| h.radius)
        .fold(f64::INFINITY, f64::min);
    let schedule = vec![0.2, 0.1, 0.05, 0.02, 0.01];
    let family = NeighborhoodFamily::new(base, schedule, FamilyRule::Uniform).map_err(err)?;
    let models = build_family_models(
        &family,
        0.0,
        &|d: &PlanarDomain| BasisSpec::for_domain(d, 10, 3, 0.0),
        &QuadratureConfig::with_depth(9),
    )
    .map_err(err)?;
    let probes = [c(-0.5, 0.0), c(0.0, 0.6), c(0.35, -0.1)];
    let table = diagonal_convergence_table(&models, &probes, TOL_5).map_err(err)?;
    let mut chain = vec![&models.base];
    for (_, m) in models.members.iter().rev() {
        chain.push(m.as_ref().map_err(err)?);
    }
    let mut pairs = 0;
    let mut pairs_ok = true;
    for w in chain.windows(2) {
        for &p in &probes {
            let r = difference_norm_check(w[0], w[1], p).map_err(err)?;
            pairs_ok &= r.lhs <= r.rhs + TOL_5 * (1.0 + r.rhs);
            pairs += 1;
        }
    }
    ensure(
        min_radius >= 1e-2 && table.monotone && table.bounded && pairs_ok,
        format!(
            "min hole radius {min_radius}, monotone {}, bounded {}, difference norms {pairs_ok} over {pairs} pairs",
            table.monotone, table.bounded
        ),
    )
}

fn criterion_6() -> Outcome {
    let cfg = QuadratureConfig::with_depth(9);
    let m = build_kernel(
        &PlanarDomain::unit_disc(),
        Weight::Zero,
        &BasisSpec::polynomials(6),
        &cfg,
    )
    .map_err(err)?;
    let schedule = [0.2, 0.1, 0.05, 0.025, 0.0125];
    let prof = boundary_mass(&m, &[c(0.0, 0.0)], &schedule, &cfg).map_err(err)?;
    let worst = prof
        .rows
        .iter()
        .map(|r| (r.nu - (2.0 * r.t - r.t * r.t) / PI).abs())
        .fold(0.0, f64::max);
    ensure(
        (0.85..=1.15).contains(&prof.r_hat) && worst <= 1e-5,
        format!(
            "r̂ = {:.4} (band [0.85, 1.15]), max |ν − (2t − t²)/π| = {worst:.2e}",
            prof.r_hat
        ),
    )
}

fn criterion_7() -> Outcome {
    let r = run(&ExperimentConfig::new(Scenario::Kobayashi)).map_err(err)?;
    let rows: Vec<(f64, f64)> = r
        .csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (f[1], f[2])
        })
        .collect();
    let worst = rows
        .iter()
        .map(|&(y, ratio)| (ratio - PI * (1.0 - y * y).powi(2)).abs())
        .fold(0.0, f64::max);
    let monotone = rows.windows(2).all(|w| w[1].1 < w[0].1);
    ensure(
        rows.len() == 10 && worst <= TOL_7 && monotone,
        format!("k = 1..{}, max |ratio − π(1 − y²)²| = {worst:.2e} (tol {TOL_7:e}), monotone {monotone}", rows.len()),
    )
}

fn criterion_8() -> Outcome {
    let t0 = Instant::now();
    let r = run(&ExperimentConfig::new(Scenario::MetricPath)).map_err(err)?;
    let mut iso = Vec::new();
    let mut non = Vec::new();
    for l in r.csv.lines().skip(1) {
        let f: Vec<&str> = l.split(',').collect();
        let v: f64 = f[2].parse().unwrap();
        if f[0] == "isolated" {
            iso.push(v);
        } else {
            non.push(v);
        }
    }
    let decay = iso
        .windows(2)
        .map(|w| w[0] / w[1])
        .fold(f64::INFINITY, f64::min);
    let band =
        non.iter().cloned().fold(0.0, f64::max) / non.iter().cloned().fold(f64::INFINITY, f64::min);
    let secs = t0.elapsed().as_secs_f64();
    ensure(
        iso.len() == 4 && non.len() == 4 && decay >= 1.5 && band <= 1.5 && secs < 600.0,
        format!(
            "isolated: min decade ratio {decay:.3} (≥ 1.5); non-isolated: band {band:.3} (≤ 1.5), last increment {:.4} vs log 2 = {LN_2:.4}; {secs:.1} s",
            non.last().copied().unwrap_or(f64::NAN)
        ),
    )
}

fn criterion_9() -> Outcome {
    let base = PlanarDomain::punctured_unit_disc();
    let mut parts = Vec::new();
    let mut ok = true;
    // near the puncture, off the ridge δ = |x| = 1 − |x|
    let xs: [[f64; 2]; 5] = [
        [0.05, 0.02],
        [-0.03, 0.06],
        [0.1, -0.1],
        [0.0, 0.2],
        [-0.25, 0.05],
    ];
    for (k, want) in [(1.0, 0.0), (0.9, -0.05), (2.0, 0.5)] {
        let tube = TubeDomain::new(base.clone(), k).map_err(err)?;
        let samples: Vec<([f64; 2], [f64; 2])> = xs
            .iter()
            .map(|&x| {
                let d = (x[0] * x[0] + x[1] * x[1]).sqrt();
                let s = 0.3 * d / k.sqrt();
                (x, [s * 0.6, -s * 0.5])
            })
            .collect();
        let rep = levi_check_tube(&tube, &samples, 1e-4).map_err(err)?;
        let worst = rep
            .samples
            .iter()
            .map(|s| (s.min_eigenvalue - want).abs())
            .fold(0.0, f64::max);
        ok &= worst <= TOL_9 && rep.samples.len() == xs.len();
        parts.push(format!("k = {k}: max |λ − {want}| = {worst:.1e}"));
    }
    ensure(ok, format!("{} (tol {TOL_9:e})", parts.join("; ")))
}

fn criterion_10() -> Outcome {
    let t0 = Instant::now();
    let rows = verify_gap_bounds(18..=24).map_err(err)?;
    let secs = t0.elapsed().as_secs_f64();
    let all = rows.iter().all(|r| r.pass_planar && r.pass_tube);
    ensure(
        rows.len() == 7 && all && secs < 1.0,
        format!("{} rows, all pass {all}, {:.0} ms", rows.len(), secs * 1e3),
    )
}

fn criterion_11() -> Outcome {
    let power = classify_eta_integral(&EtaProfile {
        kind: EtaKind::PowerLaw { c: 1.0, alpha: 2.0 },
        r0: 0.5,
    })
    .map_err(err)?;
    let stretched = classify_eta_integral(&EtaProfile {
        kind: EtaKind::StretchedExponential {
            c: 1.0,
            c1: 1.0,
            beta: 0.25,
        },
        r0: (-14f64).exp2(),
    })
    .map_err(err)?;
    let samples: Vec<[f64; 2]> = (0..=200)
        .rev()
        .map(|i| {
            let t = 0.5 * (-(i as f64) * 0.25).exp2();
            [t, t * t]
        })
        .collect();
    let table = classify_eta_integral(&EtaProfile {
        kind: EtaKind::Tabulated {
            samples,
            log_eta: false,
        },
        r0: 0.5,
    })
    .map_err(err)?;
    let gate =
        beta_alpha_gate(2.0, 0.999_999) && !beta_alpha_gate(2.0, 1.0) && !beta_alpha_gate(1.0, 0.5);
    ensure(
        power.verdict == EtaVerdict::Divergent
            && stretched.verdict == EtaVerdict::Convergent
            && table.verdict == EtaVerdict::Divergent
            && gate,
        format!(
            "power law {:?}, stretched exponential {:?}, tabulated t² {:?}, gate strict {gate}",
            power.verdict, stretched.verdict, table.verdict
        ),
    )
}

fn criterion_12() -> Outcome {
    let d = PlanarDomain::scaled_zalcman(3).map_err(err)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
    let mut worst_lip: f64 = 0.0;
    for _ in 0..10_000 {
        let a = c(rng.gen_range(-1.3..1.3), rng.gen_range(-1.3..1.3));
        let b = c(rng.gen_range(-1.3..1.3), rng.gen_range(-1.3..1.3));
        let q = (d.signed_distance(a).value - d.signed_distance(b).value).abs() / (a - b).norm();
        worst_lip = worst_lip.max(q);
    }
    let pd = PlanarDomain::punctured_unit_disc();
    let mut worst_dk: f64 = 0.0;
    for r in [1e-2, 1e-3] {
        worst_dk = worst_dk.max(
            dk_bound_check(&pd, c(1.0, 0.0), r, 256)
                .map_err(err)?
                .max_ratio,
        );
    }
    let base = PlanarDomain::scaled_zalcman(3).map_err(err)?;
    let hole = *base.holes().last().unwrap();
    let family = NeighborhoodFamily::new(base, vec![0.08, 0.04, 0.02, 0.01], FamilyRule::Uniform)
        .map_err(err)?;
    let rows = density_profile(
        &family,
        Weight::NegLogDistance { alpha: 1.0 },
        &|z: C64| (z - hole.center).inv(),
        &|m: &PlanarDomain| BasisSpec::for_domain(m, 8, 4, 1.0),
        &QuadratureConfig::with_depth(9),
    )
    .map_err(err)?;
    // the pole survives in the member once the hole is wider than t
    let drops = rows.iter().all(|r| (r.error < 1e-6) == (hole.radius > r.t))
        && rows.iter().any(|r| r.error < 1e-6)
        && rows.iter().any(|r| r.error >= 1e-6);
    let errs: Vec<String> = rows.iter().map(|r| format!("{:.1e}", r.error)).collect();
    ensure(
        worst_lip <= 1.0 + 1e-12 && worst_dk <= 3.0 + 1e-9 && drops,
        format!(
            "max Lipschitz quotient {worst_lip:.6}, max dk ratio {worst_dk:.4}, density errors [{}]",
            errs.join(", ")
        ),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("closed-form disc kernel", criterion_1),
        ("weighted disc kernel and Gram", criterion_2),
        ("Hartogs series vs direct oracle", criterion_3),
        ("Hartogs norm decomposition", criterion_4),
        ("kernel convergence on neighborhoods", criterion_5),
        ("boundary mass exponent", criterion_6),
        ("Kobayashi ratio", criterion_7),
        ("completeness dichotomy", criterion_8),
        ("tube Levi form", criterion_9),
        ("exact gap bounds", criterion_10),
        ("eta classifier and gate", criterion_11),
        ("geometry suite", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t0.elapsed().as_secs_f64();
        match out {
            Ok(d) => println!("PASS {:>2} {name}: {d} [{secs:.1} s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d} [{secs:.1} s]", i + 1)
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
