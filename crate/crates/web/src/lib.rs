//! Browser bindings. Each export takes a planar domain as JSON
//! (`{"outer":{"center":[x,y],"radius":r},"holes":[...],"punctures":[[x,y],...]}`)
//! and returns a flat `Float64Array`. The pure `*_impl` functions carry the
//! logic so they can be tested natively.

use bergman_core::basis::BasisSpec;
use bergman_core::kernel::{build_kernel, Weight};
use bergman_core::metric::{classify_endpoint, path_length};
use bergman_core::quadrature::QuadratureConfig;
use bergman_core::{PlanarDomain, C64};
use wasm_bindgen::prelude::*;

const MAX_PIXELS: usize = 512 * 512;

fn parse_domain(json: &str) -> Result<PlanarDomain, String> {
    serde_json::from_str(json).map_err(|e| format!("domain: {e}"))
}

fn grid(domain: &PlanarDomain, width: usize, height: usize) -> Result<Vec<C64>, String> {
    if width < 2 || height < 2 || width * height > MAX_PIXELS {
        return Err(format!(
            "grid {width}x{height} outside 2x2..{MAX_PIXELS} pixels"
        ));
    }
    let o = domain.outer();
    let r = o.radius * 1.05;
    let mut pts = Vec::with_capacity(width * height);
    for row in 0..height {
        let y = o.center.im + r - 2.0 * r * row as f64 / (height - 1) as f64;
        for col in 0..width {
            let x = o.center.re - r + 2.0 * r * col as f64 / (width - 1) as f64;
            pts.push(C64::new(x, y));
        }
    }
    Ok(pts)
}

fn model(
    domain: &PlanarDomain,
    alpha: f64,
    degree: usize,
    depth: u32,
) -> Result<bergman_core::kernel::KernelModel, String> {
    if !(0.0..=4.0).contains(&alpha) || degree > 24 || !(4..=10).contains(&depth) {
        return Err("need 0 ≤ alpha ≤ 4, degree ≤ 24, depth in 4..=10".into());
    }
    let weight = if alpha == 0.0 {
        Weight::Zero
    } else {
        Weight::NegLogDistance { alpha }
    };
    let spec = BasisSpec::for_domain(domain, degree, 3, alpha);
    build_kernel(domain, weight, &spec, &QuadratureConfig::with_depth(depth))
        .map_err(|e| e.to_string())
}

/// Row-major signed distance to the boundary over the square around the outer disc.
pub fn distance_field_impl(domain: &str, width: usize, height: usize) -> Result<Vec<f64>, String> {
    let d = parse_domain(domain)?;
    Ok(grid(&d, width, height)?
        .into_iter()
        .map(|z| d.signed_distance(z).value)
        .collect())
}

/// Row-major `log K(z,z)`, NaN outside the domain.
pub fn log_kernel_heatmap_impl(
    domain: &str,
    alpha: f64,
    degree: usize,
    depth: u32,
    width: usize,
    height: usize,
) -> Result<Vec<f64>, String> {
    let d = parse_domain(domain)?;
    let pts = grid(&d, width, height)?;
    let m = model(&d, alpha, degree, depth)?;
    Ok(pts
        .into_iter()
        .map(|z| match m.diag(z) {
            Ok(v) if v > 0.0 => v.ln(),
            _ => f64::NAN,
        })
        .collect())
}

/// Cumulative Bergman length along the segment `a → b`, one value per sample.
pub fn path_length_profile_impl(
    domain: &str,
    alpha: f64,
    degree: usize,
    depth: u32,
    a: [f64; 2],
    b: [f64; 2],
    samples: usize,
) -> Result<Vec<f64>, String> {
    let d = parse_domain(domain)?;
    if !(2..=2000).contains(&samples) {
        return Err("samples must lie in 2..=2000".into());
    }
    let (a, b) = (C64::new(a[0], a[1]), C64::new(b[0], b[1]));
    let pts: Vec<Vec<C64>> = (0..samples)
        .map(|i| vec![a + (b - a) * (i as f64 / (samples - 1) as f64)])
        .collect();
    if let Some(p) = pts.iter().find(|p| !d.contains(p[0])) {
        return Err(format!("segment leaves the domain at {}", p[0]));
    }
    let m = model(&d, alpha, degree, depth)?;
    let prof = path_length(&m, &pts, classify_endpoint(&d, b)).map_err(|e| e.to_string())?;
    Ok(prof.length)
}

#[wasm_bindgen]
pub fn distance_field(domain: &str, width: usize, height: usize) -> Result<Vec<f64>, JsError> {
    distance_field_impl(domain, width, height).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn log_kernel_heatmap(
    domain: &str,
    alpha: f64,
    degree: usize,
    depth: u32,
    width: usize,
    height: usize,
) -> Result<Vec<f64>, JsError> {
    log_kernel_heatmap_impl(domain, alpha, degree, depth, width, height)
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn path_length_profile(
    domain: &str,
    alpha: f64,
    degree: usize,
    depth: u32,
    ax: f64,
    ay: f64,
    bx: f64,
    by: f64,
    samples: usize,
) -> Result<Vec<f64>, JsError> {
    path_length_profile_impl(domain, alpha, degree, depth, [ax, ay], [bx, by], samples)
        .map_err(|e| JsError::new(&e))
}
