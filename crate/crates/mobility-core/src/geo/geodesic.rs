//! Inverse geodesic problem on an ellipsoid of revolution.
//!
//! Solves for the shortest-path distance between two points on WGS-84 using
//! Karney's method: Newton iteration for the azimuth on the auxiliary
//! sphere with sixth-order series for the ellipsoidal integrals, an astroid
//! starting guess for nearly antipodal pairs, and a bisection fallback that
//! guarantees convergence everywhere. Accuracy is far below a millimetre;
//! the pipeline only needs metres.

use libm::{atan2, cbrt, cos, fabs, hypot, remainder, remquo, sin, sqrt};

const GEODESIC_ORDER: usize = 6;
const MAXIT1: usize = 20;
const MAXIT2: usize = MAXIT1 + 53 + 10;

/// WGS-84 semi-major axis, metres.
pub const WGS84_A: f64 = 6_378_137.0;
/// WGS-84 flattening.
pub const WGS84_F: f64 = 1.0 / 298.257_223_563;

fn sq(x: f64) -> f64 {
    x * x
}

fn norm2(x: &mut f64, y: &mut f64) {
    let h = hypot(*x, *y);
    *x /= h;
    *y /= h;
}

/// Error-free sum: returns (round(u + v), residual).
fn sum_err(u: f64, v: f64) -> (f64, f64) {
    let s = u + v;
    let mut up = s - v;
    let mut vpp = s - up;
    up -= u;
    vpp -= v;
    let t = if s != 0.0 { 0.0 - (up + vpp) } else { s };
    (s, t)
}

/// Exact angle difference y - x in (-180, 180], with a correction term.
fn ang_diff(x: f64, y: f64) -> (f64, f64) {
    let (d0, t0) = sum_err(remainder(-x, 360.0), remainder(y, 360.0));
    let (mut d, t) = sum_err(remainder(d0, 360.0), t0);
    if d == 0.0 || fabs(d) == 180.0 {
        d = libm::copysign(d, if t == 0.0 { y - x } else { -t });
    }
    (d, t)
}

/// Round tiny angles so that directly opposite points resolve cleanly.
fn ang_round(x: f64) -> f64 {
    let z = 1.0 / 16.0;
    if x == 0.0 {
        return 0.0;
    }
    let mut y = fabs(x);
    if y < z {
        y = z - (z - y);
    }
    libm::copysign(y, x)
}

/// Sine and cosine of an angle in degrees, exact at the quadrant points.
fn sincosd(x: f64) -> (f64, f64) {
    let (r, q) = remquo(x, 90.0);
    let r = r.to_radians();
    let (s, c) = (sin(r), cos(r));
    let (mut sinx, cosx) = match (q as u32) & 3 {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    };
    if sinx == 0.0 {
        sinx = libm::copysign(sinx, x);
    }
    (sinx, 0.0 + cosx)
}

/// Clenshaw summation of sum(c[k] * sin(2k x), k = 1..n); c[0] is unused.
fn sin_series(sinx: f64, cosx: f64, c: &[f64]) -> f64 {
    let mut k = c.len();
    let mut n = k as i64 - 1;
    let ar = 2.0 * (cosx - sinx) * (cosx + sinx);
    let mut y1 = 0.0;
    let mut y0 = if n & 1 != 0 {
        k -= 1;
        c[k]
    } else {
        0.0
    };
    n /= 2;
    while n > 0 {
        n -= 1;
        k -= 1;
        y1 = ar * y0 - y1 + c[k];
        k -= 1;
        y0 = ar * y1 - y0 + c[k];
    }
    2.0 * sinx * cosx * y0
}

/// Horner evaluation of p[0] x^n + p[1] x^(n-1) + ... + p[n].
fn polyval(p: &[f64], x: f64) -> f64 {
    let mut y = 0.0;
    for &c in p {
        y = y * x + c;
    }
    y
}

/// A1 - 1 (series in the expansion parameter eps).
fn a1m1f(eps: f64) -> f64 {
    const COEFF: [f64; 4] = [1.0, 4.0, 64.0, 0.0];
    let t = polyval(&COEFF, sq(eps)) / 256.0;
    (t + eps) / (1.0 - eps)
}

/// A2 - 1.
fn a2m1f(eps: f64) -> f64 {
    const COEFF: [f64; 4] = [-11.0, -28.0, -192.0, 0.0];
    let t = polyval(&COEFF, sq(eps)) / 256.0;
    (t - eps) / (1.0 + eps)
}

/// Fill c[1..=6] with the C1 coefficients.
fn c1f(eps: f64, c: &mut [f64; GEODESIC_ORDER + 1]) {
    const COEFF: [f64; 18] = [
        -1.0, 6.0, -16.0, 32.0, // C1[1]
        -9.0, 64.0, -128.0, 2048.0, // C1[2]
        9.0, -16.0, 768.0, // C1[3]
        3.0, -5.0, 512.0, // C1[4]
        -7.0, 1280.0, // C1[5]
        -7.0, 2048.0, // C1[6]
    ];
    fill_even_series(eps, c, &COEFF);
}

/// Fill c[1..=6] with the C2 coefficients.
fn c2f(eps: f64, c: &mut [f64; GEODESIC_ORDER + 1]) {
    const COEFF: [f64; 18] = [
        1.0, 2.0, 16.0, 32.0, // C2[1]
        35.0, 64.0, 384.0, 2048.0, // C2[2]
        15.0, 80.0, 768.0, // C2[3]
        7.0, 35.0, 512.0, // C2[4]
        63.0, 1280.0, // C2[5]
        77.0, 2048.0, // C2[6]
    ];
    fill_even_series(eps, c, &COEFF);
}

#[allow(clippy::needless_range_loop)]
fn fill_even_series(eps: f64, c: &mut [f64; GEODESIC_ORDER + 1], coeff: &[f64]) {
    let eps2 = sq(eps);
    let mut d = eps;
    let mut o = 0;
    for l in 1..=GEODESIC_ORDER {
        let m = (GEODESIC_ORDER - l) / 2;
        c[l] = d * polyval(&coeff[o..o + m + 1], eps2) / coeff[o + m + 1];
        o += m + 2;
        d *= eps;
    }
}

/// Solve k^4 + 2 k^3 - (x^2 + y^2 - 1) k^2 - 2 y^2 k - y^2 = 0 for its
/// positive root. Governs the starting azimuth for nearly antipodal pairs.
fn astroid(x: f64, y: f64) -> f64 {
    let p = sq(x);
    let q = sq(y);
    let r = (p + q - 1.0) / 6.0;
    if q == 0.0 && r <= 0.0 {
        return 0.0;
    }
    let s = p * q / 4.0;
    let r2 = sq(r);
    let r3 = r * r2;
    let disc = s * (s + 2.0 * r3);
    let mut u = r;
    if disc >= 0.0 {
        let mut t3 = s + r3;
        t3 += if t3 < 0.0 { -sqrt(disc) } else { sqrt(disc) };
        let t = cbrt(t3);
        u += t + if t != 0.0 { r2 / t } else { 0.0 };
    } else {
        let ang = atan2(sqrt(-disc), -(s + r3));
        u += 2.0 * r * cos(ang / 3.0);
    }
    let v = sqrt(sq(u) + q);
    let uv = if u < 0.0 { q / (v - u) } else { u + v };
    let w = (uv - q) / (2.0 * v);
    uv / (sqrt(uv + sq(w)) + w)
}

/// Inverse geodesic solver for one ellipsoid.
#[derive(Debug, Clone)]
pub struct Geodesic {
    a: f64,
    f: f64,
    f1: f64,
    ep2: f64,
    n: f64,
    b: f64,
    etol2: f64,
    tiny: f64,
    tol0: f64,
    tol1: f64,
    tolb: f64,
    xthresh: f64,
    a3x: [f64; GEODESIC_ORDER],
    c3x: [f64; 15],
}

impl Geodesic {
    #[allow(clippy::explicit_counter_loop)]
    pub fn new(a: f64, f: f64) -> Self {
        let f1 = 1.0 - f;
        let e2 = f * (2.0 - f);
        let ep2 = e2 / sq(f1);
        let n = f / (2.0 - f);
        let b = a * f1;
        let tiny = sqrt(f64::MIN_POSITIVE);
        let tol0 = f64::EPSILON;
        let tol1 = 200.0 * tol0;
        let tol2 = sqrt(tol0);
        let tolb = tol0 * tol2;
        let xthresh = 1000.0 * tol2;
        let etol2 = 0.1 * tol2
            / sqrt(f64::max(0.001, fabs(f)) * f64::min(1.0, 1.0 - f / 2.0) / 2.0);

        let mut a3x = [0.0; GEODESIC_ORDER];
        const A3_COEFF: [f64; 18] = [
            -3.0, 128.0, // eps^5
            -2.0, -3.0, 64.0, // eps^4
            -1.0, -3.0, -1.0, 16.0, // eps^3
            3.0, -1.0, -2.0, 8.0, // eps^2
            1.0, -1.0, 2.0, // eps^1
            1.0, 1.0, // eps^0
        ];
        let mut o = 0;
        let mut k = 0;
        for j in (0..GEODESIC_ORDER).rev() {
            let m = usize::min(GEODESIC_ORDER - j - 1, j);
            a3x[k] = polyval(&A3_COEFF[o..o + m + 1], n) / A3_COEFF[o + m + 1];
            k += 1;
            o += m + 2;
        }

        let mut c3x = [0.0; 15];
        const C3_COEFF: [f64; 45] = [
            3.0, 128.0, // C3[1] eps^5
            2.0, 5.0, 128.0, // C3[1] eps^4
            -1.0, 3.0, 3.0, 64.0, // C3[1] eps^3
            -1.0, 0.0, 1.0, 8.0, // C3[1] eps^2
            -1.0, 1.0, 4.0, // C3[1] eps^1
            5.0, 256.0, // C3[2] eps^5
            1.0, 3.0, 128.0, // C3[2] eps^4
            -3.0, -2.0, 3.0, 64.0, // C3[2] eps^3
            1.0, -3.0, 2.0, 32.0, // C3[2] eps^2
            7.0, 512.0, // C3[3] eps^5
            -10.0, 9.0, 384.0, // C3[3] eps^4
            5.0, -9.0, 5.0, 192.0, // C3[3] eps^3
            7.0, 512.0, // C3[4] eps^5
            -14.0, 7.0, 512.0, // C3[4] eps^4
            21.0, 2560.0, // C3[5] eps^5
        ];
        let mut o = 0;
        let mut k = 0;
        for l in 1..GEODESIC_ORDER {
            for j in (l..GEODESIC_ORDER).rev() {
                let m = usize::min(GEODESIC_ORDER - j - 1, j);
                c3x[k] = polyval(&C3_COEFF[o..o + m + 1], n) / C3_COEFF[o + m + 1];
                k += 1;
                o += m + 2;
            }
        }

        Self {
            a,
            f,
            f1,
            ep2,
            n,
            b,
            etol2,
            tiny,
            tol0,
            tol1,
            tolb,
            xthresh,
            a3x,
            c3x,
        }
    }

    pub fn wgs84() -> Self {
        Self::new(WGS84_A, WGS84_F)
    }

    fn a3f(&self, eps: f64) -> f64 {
        polyval(&self.a3x, eps)
    }

    #[allow(clippy::needless_range_loop)]
    fn c3f(&self, eps: f64, c: &mut [f64; GEODESIC_ORDER]) {
        let mut mult = 1.0;
        let mut o = 0;
        for l in 1..GEODESIC_ORDER {
            let m = GEODESIC_ORDER - l - 1;
            mult *= eps;
            c[l] = mult * polyval(&self.c3x[o..o + m + 1], eps);
            o += m + 1;
        }
    }

    /// Distance and reduced-length integrals over a geodesic segment on the
    /// auxiliary sphere. Returns (s12 / b, m12 / b, m0).
    #[allow(clippy::too_many_arguments)]
    fn lengths(
        &self,
        eps: f64,
        sig12: f64,
        ssig1: f64,
        csig1: f64,
        dn1: f64,
        ssig2: f64,
        csig2: f64,
        dn2: f64,
        want_distance: bool,
        want_reduced: bool,
        c1a: &mut [f64; GEODESIC_ORDER + 1],
        c2a: &mut [f64; GEODESIC_ORDER + 1],
    ) -> (f64, f64, f64) {
        let mut s12b = f64::NAN;
        let mut m12b = f64::NAN;
        let mut m0 = f64::NAN;
        let mut a1 = 0.0;
        let mut a2 = 0.0;
        let mut m0x = 0.0;
        if want_distance || want_reduced {
            a1 = a1m1f(eps);
            c1f(eps, c1a);
            if want_reduced {
                a2 = a2m1f(eps);
                c2f(eps, c2a);
                m0x = a1 - a2;
                a2 += 1.0;
            }
            a1 += 1.0;
        }
        if want_distance {
            let b1 = sin_series(ssig2, csig2, &c1a[..]) - sin_series(ssig1, csig1, &c1a[..]);
            s12b = a1 * (sig12 + b1);
            if want_reduced {
                let b2 = sin_series(ssig2, csig2, &c2a[..]) - sin_series(ssig1, csig1, &c2a[..]);
                let j12 = m0x * sig12 + (a1 * b1 - a2 * b2);
                m0 = m0x;
                m12b = dn2 * (csig1 * ssig2) - dn1 * (ssig1 * csig2) - csig1 * csig2 * j12;
            }
        } else if want_reduced {
            for l in 1..=GEODESIC_ORDER {
                c2a[l] = a1 * c1a[l] - a2 * c2a[l];
            }
            let j12 = m0x * sig12
                + (sin_series(ssig2, csig2, &c2a[..]) - sin_series(ssig1, csig1, &c2a[..]));
            m0 = m0x;
            m12b = dn2 * (csig1 * ssig2) - dn1 * (ssig1 * csig2) - csig1 * csig2 * j12;
        }
        (s12b, m12b, m0)
    }

    /// Starting guess for the azimuth at point 1. Returns
    /// (sig12, salp1, calp1, salp2, calp2, dnm); sig12 >= 0 signals the
    /// short-line shortcut where the guess is already the answer.
    #[allow(clippy::too_many_arguments)]
    fn inverse_start(
        &self,
        sbet1: f64,
        cbet1: f64,
        dn1: f64,
        sbet2: f64,
        cbet2: f64,
        dn2: f64,
        lam12: f64,
        slam12: f64,
        clam12: f64,
        c1a: &mut [f64; GEODESIC_ORDER + 1],
        c2a: &mut [f64; GEODESIC_ORDER + 1],
    ) -> (f64, f64, f64, f64, f64, f64) {
        let mut sig12 = -1.0;
        let mut salp2 = f64::NAN;
        let mut calp2 = f64::NAN;
        let mut dnm = f64::NAN;

        let sbet12 = sbet2 * cbet1 - cbet2 * sbet1;
        let cbet12 = cbet2 * cbet1 + sbet2 * sbet1;
        let sbet12a = sbet2 * cbet1 + cbet2 * sbet1;

        let shortline = cbet12 >= 0.0 && sbet12 < 0.5 && cbet2 * lam12 < 0.5;
        let (somg12, comg12) = if shortline {
            let mut sbetm2 = sq(sbet1 + sbet2);
            sbetm2 /= sbetm2 + sq(cbet1 + cbet2);
            dnm = sqrt(1.0 + self.ep2 * sbetm2);
            let omg12 = lam12 / (self.f1 * dnm);
            (sin(omg12), cos(omg12))
        } else {
            (slam12, clam12)
        };

        let mut salp1 = cbet2 * somg12;
        let mut calp1 = if comg12 >= 0.0 {
            sbet12 + cbet2 * sbet1 * sq(somg12) / (1.0 + comg12)
        } else {
            sbet12a - cbet2 * sbet1 * sq(somg12) / (1.0 - comg12)
        };

        let ssig12 = hypot(salp1, calp1);
        let csig12 = sbet1 * sbet2 + cbet1 * cbet2 * comg12;

        if shortline && ssig12 < self.etol2 {
            // Very short line: the spherical solution is good enough.
            salp2 = cbet1 * somg12;
            calp2 = sbet12
                - cbet1
                    * sbet2
                    * (if comg12 >= 0.0 {
                        sq(somg12) / (1.0 + comg12)
                    } else {
                        1.0 - comg12
                    });
            norm2(&mut salp2, &mut calp2);
            sig12 = atan2(ssig12, csig12);
        } else if fabs(self.n) > 0.1
            || csig12 >= 0.0
            || ssig12 >= 6.0 * fabs(self.n) * core::f64::consts::PI * sq(cbet1)
        {
            // Nothing to do: the guess above is adequate for Newton.
        } else {
            // Nearly antipodal: work in a scaled coordinate system where the
            // singular point maps to the origin and solve the astroid.
            let lam12x = atan2(-slam12, -clam12);
            let (x, y, betscale, lamscale);
            if self.f >= 0.0 {
                let k2 = sq(sbet1) * self.ep2;
                let eps = k2 / (2.0 * (1.0 + sqrt(1.0 + k2)) + k2);
                lamscale = self.f * cbet1 * self.a3f(eps) * core::f64::consts::PI;
                betscale = lamscale * cbet1;
                x = lam12x / lamscale;
                y = sbet12a / betscale;
            } else {
                let cbet12a = cbet2 * cbet1 - sbet2 * sbet1;
                let bet12a = atan2(sbet12a, cbet12a);
                let (_, m12b, m0) = self.lengths(
                    self.n,
                    core::f64::consts::PI + bet12a,
                    sbet1,
                    -cbet1,
                    dn1,
                    sbet2,
                    cbet2,
                    dn2,
                    false,
                    true,
                    c1a,
                    c2a,
                );
                x = -1.0 + m12b / (cbet1 * cbet2 * m0 * core::f64::consts::PI);
                betscale = if x < -0.01 {
                    sbet12a / x
                } else {
                    -self.f * sq(cbet1) * core::f64::consts::PI
                };
                lamscale = betscale / cbet1;
                y = lam12x / lamscale;
            }

            if y > -self.tol1 && x > -1.0 - self.xthresh {
                // Strip near the cut.
                if self.f >= 0.0 {
                    salp1 = f64::min(1.0, -x);
                    calp1 = -sqrt(1.0 - sq(salp1));
                } else {
                    calp1 = f64::max(if x > -self.tol1 { 0.0 } else { -1.0 }, x);
                    salp1 = sqrt(1.0 - sq(calp1));
                }
            } else {
                let k = astroid(x, y);
                let omg12a = lamscale
                    * if self.f >= 0.0 {
                        -x * k / (1.0 + k)
                    } else {
                        -y * (1.0 + k) / k
                    };
                let somg12 = sin(omg12a);
                let comg12 = -cos(omg12a);
                salp1 = cbet2 * somg12;
                calp1 = sbet12a - cbet2 * sbet1 * sq(somg12) / (1.0 - comg12);
            }
        }

        if salp1 > 0.0 {
            norm2(&mut salp1, &mut calp1);
        } else {
            // Guard against a degenerate guess.
            salp1 = 1.0;
            calp1 = 0.0;
        }
        (sig12, salp1, calp1, salp2, calp2, dnm)
    }

    /// Evaluate the difference between the longitude produced by the
    /// azimuth guess and the target longitude, plus everything Newton needs.
    #[allow(clippy::too_many_arguments)]
    fn lambda12(
        &self,
        sbet1: f64,
        cbet1: f64,
        dn1: f64,
        sbet2: f64,
        cbet2: f64,
        dn2: f64,
        salp1: f64,
        calp1_in: f64,
        slam120: f64,
        clam120: f64,
        diffp: bool,
        c1a: &mut [f64; GEODESIC_ORDER + 1],
        c2a: &mut [f64; GEODESIC_ORDER + 1],
        c3a: &mut [f64; GEODESIC_ORDER],
    ) -> Lambda12 {
        let mut calp1 = calp1_in;
        if sbet1 == 0.0 && calp1 == 0.0 {
            // Break the degeneracy for equatorial antipodal points.
            calp1 = -self.tiny;
        }
        let salp0 = salp1 * cbet1;
        let calp0 = hypot(calp1, salp1 * sbet1);

        let mut ssig1 = sbet1;
        let somg1 = salp0 * sbet1;
        let mut csig1 = calp1 * cbet1;
        let comg1 = csig1;
        norm2(&mut ssig1, &mut csig1);

        let calp2 = if cbet2 != cbet1 || fabs(sbet2) != -sbet1 {
            sqrt(sq(calp1 * cbet1)
                + if cbet1 < -sbet1 {
                    (cbet2 - cbet1) * (cbet1 + cbet2)
                } else {
                    (sbet1 - sbet2) * (sbet1 + sbet2)
                })
                / cbet2
        } else {
            fabs(calp1)
        };

        let mut ssig2 = sbet2;
        let somg2 = salp0 * sbet2;
        let mut csig2 = calp2 * cbet2;
        let comg2 = csig2;
        norm2(&mut ssig2, &mut csig2);

        let sig12 = atan2(
            f64::max(0.0, csig1 * ssig2 - ssig1 * csig2),
            csig1 * csig2 + ssig1 * ssig2,
        );

        let somg12 = f64::max(0.0, comg1 * somg2 - somg1 * comg2);
        let comg12 = comg1 * comg2 + somg1 * somg2;
        let eta = atan2(
            somg12 * clam120 - comg12 * slam120,
            comg12 * clam120 + somg12 * slam120,
        );

        let k2 = sq(calp0) * self.ep2;
        let eps = k2 / (2.0 * (1.0 + sqrt(1.0 + k2)) + k2);
        self.c3f(eps, c3a);
        let b312 = sin_series(ssig2, csig2, &c3a[..]) - sin_series(ssig1, csig1, &c3a[..]);
        let domg12 = -self.f * self.a3f(eps) * salp0 * (sig12 + b312);
        let lam12 = eta + domg12;

        let dlam12 = if diffp {
            if calp2 == 0.0 {
                -2.0 * self.f1 * dn1 / sbet1
            } else {
                let (_, m12b, _) = self.lengths(
                    eps, sig12, ssig1, csig1, dn1, ssig2, csig2, dn2, false, true, c1a, c2a,
                );
                m12b * self.f1 / (calp2 * cbet2)
            }
        } else {
            f64::NAN
        };

        Lambda12 {
            lam12,
            sig12,
            ssig1,
            csig1,
            ssig2,
            csig2,
            eps,
            dlam12,
        }
    }

    /// Shortest distance between two points, in metres.
    ///
    /// Latitudes must lie in [-90, 90]; longitudes may be any finite value.
    pub fn inverse_distance_m(&self, lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
        let (d, t) = ang_diff(lon1, lon2);
        let lonsign = if d >= 0.0 { 1.0 } else { -1.0 };
        let lon12 = lonsign * ang_round(d);
        // Supplement of the longitude difference, with the residual folded
        // in; keeps sin/cos accurate for obtuse differences.
        let lon12s = ang_round((180.0 - lon12) - lonsign * t);
        let lam12 = lon12.to_radians();
        let (slam12, clam12) = if lon12 > 90.0 {
            let (s, c) = sincosd(lon12s);
            (s, -c)
        } else {
            sincosd(lon12)
        };

        let mut lat1 = ang_round(lat1);
        let mut lat2 = ang_round(lat2);
        // Put the point with the larger |latitude| first, in the southern
        // hemisphere; distance is invariant under these symmetries.
        if fabs(lat1) < fabs(lat2) {
            core::mem::swap(&mut lat1, &mut lat2);
        }
        let latsign = if lat1 < 0.0 { 1.0 } else { -1.0 };
        lat1 *= latsign;
        lat2 *= latsign;

        let (mut sbet1, mut cbet1) = sincosd(lat1);
        sbet1 *= self.f1;
        norm2(&mut sbet1, &mut cbet1);
        cbet1 = f64::max(self.tiny, cbet1);

        let (mut sbet2, mut cbet2) = sincosd(lat2);
        sbet2 *= self.f1;
        norm2(&mut sbet2, &mut cbet2);
        cbet2 = f64::max(self.tiny, cbet2);

        // Tie the latitudes together when they are nearly mirror images so
        // the sensitive differences below stay exact.
        if cbet1 < -sbet1 {
            if cbet2 == cbet1 {
                sbet2 = if sbet2 < 0.0 { sbet1 } else { -sbet1 };
            }
        } else if fabs(sbet2) == -sbet1 {
            cbet2 = cbet1;
        }

        let dn1 = sqrt(1.0 + self.ep2 * sq(sbet1));
        let dn2 = sqrt(1.0 + self.ep2 * sq(sbet2));

        let mut c1a = [0.0; GEODESIC_ORDER + 1];
        let mut c2a = [0.0; GEODESIC_ORDER + 1];
        let mut c3a = [0.0; GEODESIC_ORDER];

        let mut s12x = f64::NAN;
        let mut meridian = lat1 == -90.0 || slam12 == 0.0;

        if meridian {
            // Geodesic runs along a meridian; reduce to a 1D integral.
            let calp1 = clam12;
            let ssig1 = sbet1;
            let csig1 = calp1 * cbet1;
            let ssig2 = sbet2;
            let csig2 = cbet2;

            let sig12 = atan2(
                f64::max(0.0, csig1 * ssig2 - ssig1 * csig2),
                csig1 * csig2 + ssig1 * ssig2,
            );
            let (s12b, m12b, _) = self.lengths(
                self.n, sig12, ssig1, csig1, dn1, ssig2, csig2, dn2, true, true, &mut c1a,
                &mut c2a,
            );
            if sig12 < 1.0 || m12b >= 0.0 {
                let s12b = if sig12 < 3.0 * self.tiny
                    || (sig12 < self.tol0 && (s12b < 0.0 || m12b < 0.0))
                {
                    0.0
                } else {
                    s12b
                };
                s12x = s12b * self.b;
            } else {
                // The meridian crossing a pole is not the shortest path;
                // fall through to the general solver.
                meridian = false;
            }
        }

        if !meridian && sbet1 == 0.0 && (self.f <= 0.0 || lon12s >= self.f * 180.0) {
            // Both points on the equator with a short enough arc: the
            // equator is the geodesic.
            s12x = self.a * lam12;
        } else if !meridian {
            let (sig12_start, mut salp1, mut calp1, _salp2, _calp2, dnm) = self.inverse_start(
                sbet1, cbet1, dn1, sbet2, cbet2, dn2, lam12, slam12, clam12, &mut c1a, &mut c2a,
            );

            if sig12_start >= 0.0 {
                // Short-line shortcut from inverse_start.
                s12x = sig12_start * self.b * dnm;
            } else {
                // Newton's method with a bisection safety net.
                let mut tripn = false;
                let mut tripb = false;
                let mut salp1a = self.tiny;
                let mut calp1a = 1.0;
                let mut salp1b = self.tiny;
                let mut calp1b = -1.0;
                let mut sig12 = f64::NAN;
                let mut ssig1 = f64::NAN;
                let mut csig1 = f64::NAN;
                let mut ssig2 = f64::NAN;
                let mut csig2 = f64::NAN;
                let mut eps = f64::NAN;
                let mut numit = 0;
                while numit < MAXIT2 {
                    let r = self.lambda12(
                        sbet1,
                        cbet1,
                        dn1,
                        sbet2,
                        cbet2,
                        dn2,
                        salp1,
                        calp1,
                        slam12,
                        clam12,
                        numit < MAXIT1,
                        &mut c1a,
                        &mut c2a,
                        &mut c3a,
                    );
                    let v = r.lam12;
                    sig12 = r.sig12;
                    ssig1 = r.ssig1;
                    csig1 = r.csig1;
                    ssig2 = r.ssig2;
                    csig2 = r.csig2;
                    eps = r.eps;

                    // Negated comparison on purpose: a NaN residual must
                    // also escape the loop.
                    #[allow(clippy::neg_cmp_op_on_partial_ord)]
                    if tripb || !(fabs(v) >= (if tripn { 8.0 } else { 1.0 }) * self.tol0) {
                        break;
                    }
                    // Maintain the bracket [alp1a, alp1b].
                    if v > 0.0 && (numit > MAXIT1 || calp1 / salp1 > calp1b / salp1b) {
                        salp1b = salp1;
                        calp1b = calp1;
                    } else if v < 0.0 && (numit > MAXIT1 || calp1 / salp1 < calp1a / salp1a) {
                        salp1a = salp1;
                        calp1a = calp1;
                    }
                    numit += 1;
                    if numit < MAXIT1 && r.dlam12 > 0.0 {
                        let dalp1 = -v / r.dlam12;
                        let sdalp1 = sin(dalp1);
                        let cdalp1 = cos(dalp1);
                        let nsalp1 = salp1 * cdalp1 + calp1 * sdalp1;
                        if nsalp1 > 0.0 && fabs(dalp1) < core::f64::consts::PI {
                            calp1 = calp1 * cdalp1 - salp1 * sdalp1;
                            salp1 = nsalp1;
                            norm2(&mut salp1, &mut calp1);
                            // Near the turning point the slope vanishes and
                            // convergence degrades to linear; loosen the exit.
                            tripn = fabs(v) <= 16.0 * self.tol0;
                            continue;
                        }
                    }
                    // Newton stepped outside the bracket (or no derivative):
                    // bisect instead.
                    salp1 = (salp1a + salp1b) / 2.0;
                    calp1 = (calp1a + calp1b) / 2.0;
                    norm2(&mut salp1, &mut calp1);
                    tripn = false;
                    tripb = fabs(salp1a - salp1) + (calp1a - calp1) < self.tolb
                        || fabs(salp1 - salp1b) + (calp1 - calp1b) < self.tolb;
                }
                let (s12b, _, _) = self.lengths(
                    eps, sig12, ssig1, csig1, dn1, ssig2, csig2, dn2, true, false, &mut c1a,
                    &mut c2a,
                );
                s12x = s12b * self.b;
            }
        }

        // Round off the smallest distances so coincident points return 0.
        if s12x < 1.0e-10 {
            0.0
        } else {
            s12x
        }
    }

    /// Shortest distance in kilometres.
    pub fn inverse_distance_km(&self, lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
        self.inverse_distance_m(lat1, lon1, lat2, lon2) / 1000.0
    }
}

struct Lambda12 {
    lam12: f64,
    sig12: f64,
    ssig1: f64,
    csig1: f64,
    ssig2: f64,
    csig2: f64,
    eps: f64,
    dlam12: f64,
}
