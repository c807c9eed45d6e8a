use bergman_web::*;

const DISC: &str = r#"{"outer":{"center":[0,0],"radius":1}}"#;

#[test]
fn distance_field_matches_disc() {
    let v = distance_field_impl(DISC, 21, 21).unwrap();
    assert_eq!(v.len(), 441);
    // centre pixel
    assert!((v[220] - 1.0).abs() < 1e-12);
    assert!(v[0] < 0.0);
}

#[test]
fn heatmap_matches_closed_form() {
    let v = log_kernel_heatmap_impl(DISC, 0.0, 12, 8, 11, 11).unwrap();
    assert!((v[60] - (1.0 / std::f64::consts::PI).ln()).abs() < 1e-6);
    assert!(v[0].is_nan());
}

#[test]
fn disc_path_length_is_hyperbolic() {
    // ds = √2 |dz| / (1 − |z|²) on the unit disc
    let prof = path_length_profile_impl(DISC, 0.0, 16, 8, [0.0, 0.0], [0.5, 0.0], 201).unwrap();
    let exact = 2f64.sqrt() * 0.5 * (3.0f64).ln();
    assert!((prof.last().unwrap() - exact).abs() < 1e-3, "{prof:?}");
    assert!(prof.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn bad_inputs_are_errors() {
    assert!(distance_field_impl("{}", 10, 10).is_err());
    assert!(distance_field_impl(DISC, 1, 10).is_err());
    assert!(path_length_profile_impl(DISC, 0.0, 8, 8, [0.0, 0.0], [2.0, 0.0], 10).is_err());
}
