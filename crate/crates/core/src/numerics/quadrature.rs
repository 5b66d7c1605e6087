//! Globally adaptive Gauss–Kronrod (7/15) integration.
//!
//! Segments are kept in a max-heap keyed on their error estimate; the worst
//! segment is bisected until the summed error meets the requested tolerance.
//! Semi-infinite ranges are mapped onto `[0, 1)` with `x = a + t / (1 - t)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Requested accuracy: the run stops once `error <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn relative(rel: f64) -> Self {
        Self { abs: 0.0, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// Result of a converged integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const MAX_SEGMENTS: usize = 4000;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.abs() * WGK[7];
    let mut values = [(0.0, 0.0); 7];
    for (j, &x) in XGK[..7].iter().enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        values[j] = (f1, f2);
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for (j, &(f1, f2)) in values.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = kronrod * half;
    let abs_value = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_value > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_value);
    }
    Segment { a, b, value, error }
}

/// Integrate `f` over `[points[0], points[last]]`, seeding the adaptive
/// subdivision with the supplied break points.
pub fn integrate_breaks<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: Tolerance) -> Result<Integral> {
    if points.len() < 2 {
        return Err(Error::InvalidInput("integration needs at least two points".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        heap.push(kronrod15(&f, w[0], w[1]));
        evaluations += 15;
    }
    // Segments that can no longer be split in floating point.
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    loop {
        let value: f64 = frozen_value + heap.iter().map(|s| s.value).sum::<f64>();
        let error: f64 = frozen_error + heap.iter().map(|s| s.error).sum::<f64>();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::QuadratureFailure { value, error, evaluations });
        }
        if error <= tol.target(value) {
            return Ok(Integral { value, error, evaluations });
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::QuadratureFailure { value, error, evaluations });
        };
        if heap.len() + 2 > MAX_SEGMENTS {
            heap.push(worst);
            return Err(Error::QuadratureFailure { value, error, evaluations });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let width = (worst.b - worst.a).abs();
        if width <= 100.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE) {
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        heap.push(kronrod15(&f, worst.a, mid));
        heap.push(kronrod15(&f, mid, worst.b));
        evaluations += 30;
    }
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    integrate_breaks(f, &[a, b], tol)
}

/// Integrate `f` over `[a, ∞)`. The finite `breaks` (all `> a`, ascending)
/// are integrated directly; the tail beyond the last break is mapped onto
/// the unit interval.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Integral> {
    let mut points = vec![a];
    points.extend(breaks.iter().copied().filter(|&x| x > a));
    let start = *points.last().unwrap_or(&a);
    let head = if points.len() >= 2 {
        Some(integrate_breaks(&f, &points, Tolerance { abs: tol.abs * 0.5, rel: tol.rel * 0.5 })?)
    } else {
        None
    };
    let mapped = |t: f64| {
        let s = 1.0 - t;
        let x = start + t / s;
        if !x.is_finite() {
            return 0.0;
        }
        f(x) / (s * s)
    };
    let head_value = head.map_or(0.0, |h| h.value);
    let tail_tol = Tolerance {
        abs: (tol.abs * 0.5).max(0.5 * tol.rel * head_value.abs()),
        rel: tol.rel * 0.5,
    };
    let tail = integrate_breaks(mapped, &[0.0, 0.5, 0.9, 1.0], tail_tol)?;
    let (value, error, evaluations) = match head {
        Some(h) => (h.value + tail.value, h.error + tail.error, h.evaluations + tail.evaluations),
        None => (tail.value, tail.error, tail.evaluations),
    };
    if error > tol.target(value) * 2.0 {
        return Err(Error::QuadratureFailure { value, error, evaluations });
    }
    Ok(Integral { value, error, evaluations })
}
