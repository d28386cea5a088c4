//! Deterministic statistics primitives.
//!
//! The aggregation stages merge per-partition results, and the pipeline
//! promises byte-identical output for any worker count. Ordinary f64
//! accumulation is not associative, so [`ExactSum`] keeps the running sum as
//! an exact integer (every finite f64 is an integer multiple of 2^-1074) and
//! rounds once on read-out. Merging two sums is integer addition, which makes
//! the (mean, variance, count) merge exact under any partitioning.

use alloc::vec::Vec;
use num_bigint::BigInt;
use num_bigint::Sign;

/// Exact, order-independent sum of finite f64 values.
///
/// Internally the value is `acc * 2^-1074`. `to_f64` rounds to nearest-even,
/// so two sums over the same multiset of values read out identically no
/// matter how the additions were grouped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExactSum {
    acc: BigInt,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add a finite value. Panics on NaN or infinity; the pipeline never
    /// produces them.
    pub fn add(&mut self, x: f64) {
        assert!(x.is_finite(), "ExactSum::add: non-finite value {x}");
        if x == 0.0 {
            return;
        }
        let bits = x.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        // Subnormals sit at the bottom of the scale (2^-1074); normals carry
        // the implicit leading bit.
        let (mantissa, shift) = if exp == 0 {
            (frac, 0u64)
        } else {
            (frac | (1u64 << 52), (exp - 1) as u64)
        };
        let mut term = BigInt::from(mantissa) << shift;
        if bits >> 63 == 1 {
            term = -term;
        }
        self.acc += term;
    }

    /// Fold another sum in. Exact: integer addition.
    pub fn merge(&mut self, other: &ExactSum) {
        self.acc += &other.acc;
    }

    /// Round the exact value to the nearest f64 (ties to even).
    pub fn to_f64(&self) -> f64 {
        let (sign, mag) = self.acc.clone().into_parts();
        let bits = mag.bits();
        if bits == 0 {
            return 0.0;
        }
        let out = if bits <= 53 {
            // Fits in the mantissa: exact.
            let m = u64::try_from(&mag).expect("<= 53 bits");
            libm::ldexp(m as f64, -1074)
        } else {
            // Keep 53 bits plus a round bit, track a sticky bit, and round
            // to nearest-even.
            let drop = bits - 54;
            let top = u64::try_from(&(&mag >> drop)).expect("54 bits");
            let sticky = mag.trailing_zeros().unwrap_or(0) < drop;
            let mut keep = top >> 1;
            if top & 1 == 1 && (sticky || keep & 1 == 1) {
                keep += 1;
            }
            libm::ldexp(keep as f64, drop as i32 + 1 - 1074)
        };
        if sign == Sign::Minus {
            -out
        } else {
            out
        }
    }

    pub fn is_zero(&self) -> bool {
        self.acc.bits() == 0
    }
}

/// Count, exact sum and exact sum of squares for one aggregation bucket.
///
/// `merge` is exact, so folding per-worker accumulators gives the same
/// (mean, variance, count) as a single pass, bit for bit.
#[derive(Debug, Clone, Default)]
pub struct MomentAccumulator {
    count: u64,
    sum: ExactSum,
    sum_sq: ExactSum,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum.add(x);
        self.sum_sq.add(x * x);
    }

    pub fn merge(&mut self, other: &MomentAccumulator) {
        self.count += other.count;
        self.sum.merge(&other.sum);
        self.sum_sq.merge(&other.sum_sq);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Mean as `round(exact sum) / n`.
    pub fn mean(&self) -> Option<f64> {
        if self.count == 0 {
            None
        } else {
            Some(self.sum.to_f64() / self.count as f64)
        }
    }

    /// Population variance `sum_sq/n - mean^2`, clamped at 0 so rounding
    /// cannot produce a negative variance.
    pub fn variance(&self) -> Option<f64> {
        let mean = self.mean()?;
        let var = self.sum_sq.to_f64() / self.count as f64 - mean * mean;
        Some(if var > 0.0 { var } else { 0.0 })
    }
}

/// Population (divide-by-n) standard deviation over a slice, two-pass.
pub fn population_std(values: &[f64]) -> f64 {
    libm::sqrt(population_variance(values))
}

/// Population variance over a slice, two-pass for accuracy.
pub fn population_variance(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss = values
        .iter()
        .map(|v| {
            let d = v - mean;
            d * d
        })
        .sum::<f64>();
    ss / n
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Median with the usual midpoint convention for even counts.
/// Sorts a copy; NaN-free input is the caller's contract.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v: Vec<f64> = values.to_vec();
    v.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN in median input"));
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}

/// Nearest-rank quantile: the smallest element whose rank is >= p * n.
/// `sorted` must be ascending and non-empty.
pub fn nearest_rank_quantile(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&p));
    let n = sorted.len();
    let rank = libm::ceil(p * n as f64) as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// Quantile of the standard normal distribution (inverse CDF).
///
/// Acklam's rational approximation refined with one Halley step against
/// `erfc`; accurate to close to machine precision over (0, 1). Used for the
/// low-data week threshold, whose confidence level is configurable.
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "normal_quantile needs p in (0, 1)");
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = libm::sqrt(-2.0 * libm::log(p));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = libm::sqrt(-2.0 * libm::log(1.0 - p));
        -((((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0))
    };
    // Halley refinement against the exact CDF.
    let e = 0.5 * libm::erfc(-x / core::f64::consts::SQRT_2) - p;
    let u = e * libm::sqrt(2.0 * core::f64::consts::PI) * libm::exp(x * x / 2.0);
    x - u / (1.0 + x * u / 2.0)
}

/// Box-plot statistics under the nearest-rank convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveNumberSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl FiveNumberSummary {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v: Vec<f64> = values.to_vec();
        v.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN in summary input"));
        Some(Self {
            min: v[0],
            q1: nearest_rank_quantile(&v, 0.25),
            median: nearest_rank_quantile(&v, 0.5),
            q3: nearest_rank_quantile(&v, 0.75),
            max: v[v.len() - 1],
        })
    }
}
