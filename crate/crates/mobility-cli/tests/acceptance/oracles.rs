//! Independent oracle implementations used only by the acceptance suite.
//! These deliberately take different algorithmic routes from the library:
//! Vincenty's iteration instead of the production solver, vector-mean
//! centroids and two-pass standard deviations written from scratch, and an
//! unpruned O(n^2) segmentation dynamic program.

/// Vincenty inverse distance on WGS-84, in kilometres. Converges quickly
/// for the short lines the index oracle feeds it; do not use near the
/// antipode.
pub fn vincenty_distance_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let a = 6_378_137.0_f64;
    let f = 1.0 / 298.257_223_563;
    let b = a * (1.0 - f);

    let u1 = ((1.0 - f) * lat1.to_radians().tan()).atan();
    let u2 = ((1.0 - f) * lat2.to_radians().tan()).atan();
    let l = (lon2 - lon1).to_radians();
    let (sin_u1, cos_u1) = u1.sin_cos();
    let (sin_u2, cos_u2) = u2.sin_cos();

    let mut lambda = l;
    let mut iterations = 0;
    let (mut sin_sigma, mut cos_sigma, mut sigma, mut cos_sq_alpha, mut cos_2sigma_m);
    loop {
        let (sin_lambda, cos_lambda) = lambda.sin_cos();
        sin_sigma = ((cos_u2 * sin_lambda).powi(2)
            + (cos_u1 * sin_u2 - sin_u1 * cos_u2 * cos_lambda).powi(2))
        .sqrt();
        if sin_sigma == 0.0 {
            return 0.0; // coincident points
        }
        cos_sigma = sin_u1 * sin_u2 + cos_u1 * cos_u2 * cos_lambda;
        sigma = sin_sigma.atan2(cos_sigma);
        let sin_alpha = cos_u1 * cos_u2 * sin_lambda / sin_sigma;
        cos_sq_alpha = 1.0 - sin_alpha * sin_alpha;
        cos_2sigma_m = if cos_sq_alpha == 0.0 {
            0.0 // equatorial line
        } else {
            cos_sigma - 2.0 * sin_u1 * sin_u2 / cos_sq_alpha
        };
        let c = f / 16.0 * cos_sq_alpha * (4.0 + f * (4.0 - 3.0 * cos_sq_alpha));
        let lambda_prev = lambda;
        lambda = l
            + (1.0 - c)
                * f
                * sin_alpha
                * (sigma
                    + c * sin_sigma
                        * (cos_2sigma_m
                            + c * cos_sigma * (-1.0 + 2.0 * cos_2sigma_m * cos_2sigma_m)));
        iterations += 1;
        if (lambda - lambda_prev).abs() < 1e-13 || iterations > 200 {
            break;
        }
    }

    let u_sq = cos_sq_alpha * (a * a - b * b) / (b * b);
    let big_a = 1.0 + u_sq / 16384.0 * (4096.0 + u_sq * (-768.0 + u_sq * (320.0 - 175.0 * u_sq)));
    let big_b = u_sq / 1024.0 * (256.0 + u_sq * (-128.0 + u_sq * (74.0 - 47.0 * u_sq)));
    let delta_sigma = big_b
        * sin_sigma
        * (cos_2sigma_m
            + big_b / 4.0
                * (cos_sigma * (-1.0 + 2.0 * cos_2sigma_m * cos_2sigma_m)
                    - big_b / 6.0
                        * cos_2sigma_m
                        * (-3.0 + 4.0 * sin_sigma * sin_sigma)
                        * (-3.0 + 4.0 * cos_2sigma_m * cos_2sigma_m)));
    b * big_a * (sigma - delta_sigma) / 1000.0
}

/// Brute-force mobility index: vector-mean centroid, Vincenty distances,
/// direct two-pass population standard deviation.
pub fn brute_force_index_km(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sz) = (0.0, 0.0, 0.0);
    for &(lat, lon) in points {
        let (lat, lon) = (lat.to_radians(), lon.to_radians());
        sx += lat.cos() * lon.cos();
        sy += lat.cos() * lon.sin();
        sz += lat.sin();
    }
    let (mx, my, mz) = (sx / n, sy / n, sz / n);
    let clat = mz.atan2((mx * mx + my * my).sqrt()).to_degrees();
    let clon = my.atan2(mx).to_degrees();
    let distances: Vec<f64> = points
        .iter()
        .map(|&(lat, lon)| vincenty_distance_km(lat, lon, clat, clon))
        .collect();
    let mean = distances.iter().sum::<f64>() / n;
    let variance = distances.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n;
    variance.sqrt()
}

/// Exhaustive penalized segmentation: O(n^2) dynamic program over every
/// admissible last change point, two-pass segment costs, ascending-scan
/// tie-break. Returns (breakpoints, total objective).
pub fn exhaustive_segmentation(values: &[f64], penalty: f64) -> (Vec<usize>, f64) {
    let n = values.len();
    let cost = |i: usize, j: usize| -> f64 {
        let seg = &values[i..j];
        let mean = seg.iter().sum::<f64>() / seg.len() as f64;
        seg.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
    };
    let mut best = vec![f64::INFINITY; n + 1];
    best[0] = -penalty;
    let mut prev = vec![0usize; n + 1];
    for t in 1..=n {
        for s in 0..t {
            let total = best[s] + cost(s, t) + penalty;
            if total < best[t] {
                best[t] = total;
                prev[t] = s;
            }
        }
    }
    let mut bps = Vec::new();
    let mut t = n;
    while t > 0 {
        let s = prev[t];
        if s > 0 {
            bps.push(s);
        }
        t = s;
    }
    bps.reverse();
    (bps, best[n])
}
