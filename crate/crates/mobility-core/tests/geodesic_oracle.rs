//! Geodesic solver vs the geographiclib reference implementation.
//!
//! The solver has to agree with the reference to well under a metre on
//! random pairs, including near-antipodal ones where naive iterations fail
//! to converge.

use geographiclib_rs::{Geodesic as RefGeodesic, InverseGeodesic};
use mobility_core::geo::Geodesic;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn reference_m(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let g = RefGeodesic::wgs84();
    g.inverse(lat1, lon1, lat2, lon2)
}

#[test]
fn random_pairs_agree_with_reference() {
    let own = Geodesic::wgs84();
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e0d_e51c);
    let mut max_err = 0.0f64;
    for _ in 0..10_000 {
        let lat1 = rng.gen_range(-90.0..=90.0);
        let lon1 = rng.gen_range(-180.0..=180.0);
        let lat2 = rng.gen_range(-90.0..=90.0);
        let lon2 = rng.gen_range(-180.0..=180.0);
        let got = own.inverse_distance_m(lat1, lon1, lat2, lon2);
        let want = reference_m(lat1, lon1, lat2, lon2);
        let err = (got - want).abs();
        assert!(
            err < 1e-3,
            "({lat1},{lon1})-({lat2},{lon2}): got {got}, want {want}, err {err}"
        );
        max_err = max_err.max(err);
    }
    // Print via panic-free path: cargo test -- --nocapture shows it.
    println!("max error over 10k random pairs: {max_err:.3e} m");
}

#[test]
fn near_antipodal_pairs_agree_with_reference() {
    let own = Geodesic::wgs84();
    let mut rng = ChaCha8Rng::seed_from_u64(0xa217_0d0f);
    let mut max_err = 0.0f64;
    for _ in 0..1_000 {
        let lat1: f64 = rng.gen_range(-90.0..=90.0);
        let lon1: f64 = rng.gen_range(-180.0..=180.0);
        // Perturb the exact antipode by up to ~0.01 degrees.
        let lat2 = (-lat1 + rng.gen_range(-0.01..=0.01)).clamp(-90.0, 90.0);
        let lon2 = lon1 + 180.0 + rng.gen_range(-0.01..=0.01);
        let lon2 = if lon2 > 180.0 { lon2 - 360.0 } else { lon2 };
        let got = own.inverse_distance_m(lat1, lon1, lat2, lon2);
        let want = reference_m(lat1, lon1, lat2, lon2);
        let err = (got - want).abs();
        assert!(
            err < 1e-3,
            "antipodal ({lat1},{lon1})-({lat2},{lon2}): got {got}, want {want}, err {err}"
        );
        max_err = max_err.max(err);
    }
    println!("max error over 1k near-antipodal pairs: {max_err:.3e} m");
}

#[test]
fn exactly_antipodal_and_polar_cases() {
    let own = Geodesic::wgs84();
    for (lat1, lon1, lat2, lon2) in [
        (0.0, 0.0, 0.0, 180.0),
        (90.0, 0.0, -90.0, 0.0),
        (45.0, 10.0, -45.0, -170.0),
        (90.0, 0.0, 90.0, 180.0),
        (0.0, -180.0, 0.0, 180.0),
    ] {
        let got = own.inverse_distance_m(lat1, lon1, lat2, lon2);
        let want = reference_m(lat1, lon1, lat2, lon2);
        assert!(
            (got - want).abs() < 1e-3,
            "({lat1},{lon1})-({lat2},{lon2}): got {got}, want {want}"
        );
    }
}

#[test]
fn triangle_inequality_on_random_triples() {
    let own = Geodesic::wgs84();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a1a_5eed);
    for _ in 0..500 {
        let p: Vec<(f64, f64)> = (0..3)
            .map(|_| (rng.gen_range(-80.0..=80.0), rng.gen_range(-180.0..=180.0)))
            .collect();
        let dab = own.inverse_distance_km(p[0].0, p[0].1, p[1].0, p[1].1);
        let dbc = own.inverse_distance_km(p[1].0, p[1].1, p[2].0, p[2].1);
        let dac = own.inverse_distance_km(p[0].0, p[0].1, p[2].0, p[2].1);
        assert!(dac <= dab + dbc + 1e-6, "triangle violated: {dac} > {dab} + {dbc}");
    }
}
