//! Globally adaptive 21-point Gauss-Kronrod quadrature on the real line.
//!
//! Infinite endpoints are replaced by finite truncation points found by a
//! geometric scan outward from the nearest finite anchor: the scan stops at
//! the first pair of consecutive probes where `|f| < 1e-14`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::Interval;
use crate::error::{Error, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-10;

const MAX_PANELS: usize = 1 << 20;
const TRUNCATION_LEVEL: f64 = 1e-14;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    abs_value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

#[inline]
fn checked<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_nan() {
        Err(Error::InvalidFunction { x })
    } else if y.is_infinite() {
        Err(Error::Divergent { x })
    } else {
        Ok(y)
    }
}

fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = checked(f, center)?;
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = checked(f, center - dx)?;
        let f2 = checked(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
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
    Ok(Panel {
        a,
        b,
        value,
        abs_value,
        error,
    })
}

/// Adaptive quadrature settings.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub rel_tol: f64,
    /// Absolute error accepted regardless of the integral's size.
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            rel_tol: DEFAULT_REL_TOL,
            abs_tol: 0.0,
            max_panels: MAX_PANELS,
        }
    }
}

impl Quadrature {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Quadrature {
            rel_tol,
            ..Default::default()
        }
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    /// Integrates over `[points[0], points[last]]`, forcing panel boundaries
    /// at every interior point (kinks, jumps, support edges).
    pub fn integrate_pieces<F: Fn(f64) -> f64>(&self, f: F, points: &[f64]) -> Result<f64> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(Error::InvalidInput(format!(
                "rel_tol {} outside (0, 1e-2]",
                self.rel_tol
            )));
        }
        let mut pts: Vec<f64> = points.iter().copied().filter(|p| !p.is_nan()).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        if pts.len() < 2 {
            return Err(Error::InvalidInput("need at least two breakpoints".into()));
        }
        let last = pts.len() - 1;
        let interior: Vec<f64> = pts.iter().copied().filter(|p| p.is_finite()).collect();
        if pts[0] == f64::NEG_INFINITY {
            let anchor = interior.first().copied().unwrap_or(0.0);
            pts[0] = truncation_point(&f, anchor, -1.0)?;
        }
        if pts[last] == f64::INFINITY {
            let anchor = interior.last().copied().unwrap_or(0.0);
            pts[last] = truncation_point(&f, anchor, 1.0)?;
        }
        // Truncation may cross interior breakpoints when f vanishes early.
        let lo = pts[0];
        let hi = pts[last];
        let mut pts: Vec<f64> = pts.into_iter().filter(|&p| p >= lo && p <= hi).collect();
        pts.dedup();
        if pts.len() < 2 {
            return Ok(0.0);
        }
        self.adapt(&f, &pts)
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, domain: Interval) -> Result<f64> {
        self.integrate_pieces(f, &[domain.lo, domain.hi])
    }

    fn adapt<F: Fn(f64) -> f64>(&self, f: &F, pts: &[f64]) -> Result<f64> {
        let mut heap = BinaryHeap::new();
        let mut total = 0.0;
        let mut total_abs = 0.0;
        let mut total_err = 0.0;
        for w in pts.windows(2) {
            let p = gauss_kronrod_21(f, w[0], w[1])?;
            total += p.value;
            total_abs += p.abs_value;
            total_err += p.error;
            heap.push(p);
        }
        let mut panels = heap.len();
        // Panels too narrow to split keep their error; it still counts.
        let mut frozen_err = 0.0;
        loop {
            let tol = (self.rel_tol * total.abs()).max(1e-13 * total_abs).max(self.abs_tol);
            if total_err + frozen_err <= tol || total_err <= 0.0 {
                break;
            }
            if panels >= self.max_panels {
                return Err(Error::NonConvergence {
                    panels,
                    estimate: total_err + frozen_err,
                });
            }
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            let scale = worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE);
            if worst.b - worst.a <= 8.0 * f64::EPSILON * scale {
                total_err -= worst.error;
                frozen_err += worst.error;
                continue;
            }
            let left = gauss_kronrod_21(f, worst.a, mid)?;
            let right = gauss_kronrod_21(f, mid, worst.b)?;
            total += left.value + right.value - worst.value;
            total_abs += left.abs_value + right.abs_value - worst.abs_value;
            total_err += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
            panels += 1;
            // Re-sum periodically to keep the running totals from drifting.
            if panels % 256 == 0 {
                total = heap.iter().map(|p| p.value).sum();
                total_err = heap.iter().map(|p| p.error).sum();
            }
        }
        Ok(heap.iter().map(|p| p.value).sum())
    }
}

fn truncation_point<F: Fn(f64) -> f64>(f: &F, anchor: f64, direction: f64) -> Result<f64> {
    let mut step = 0.5;
    let mut prev_small = false;
    for _ in 0..80 {
        let x = anchor + direction * step;
        let y = f(x);
        if y.is_nan() {
            return Err(Error::InvalidFunction { x });
        }
        let small = y.abs() < TRUNCATION_LEVEL;
        if small && prev_small {
            return Ok(x);
        }
        prev_small = small;
        step *= 2.0;
    }
    Err(Error::NonConvergence {
        panels: 0,
        estimate: f64::INFINITY,
    })
}

/// ∫ f over `domain` to relative tolerance `rel_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, domain: Interval, rel_tol: f64) -> Result<f64> {
    Quadrature::with_rel_tol(rel_tol).integrate(f, domain)
}

/// ∫ f over the hull of `points`, splitting at each of them.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, points: &[f64], rel_tol: f64) -> Result<f64> {
    Quadrature::with_rel_tol(rel_tol).integrate_pieces(f, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::normal_pdf;

    #[test]
    fn polynomial_on_unit_interval() {
        let v = integrate(|x| x * x, Interval::new(0.0, 1.0).unwrap(), 1e-9).unwrap();
        assert!((v - 1.0 / 3.0).abs() <= 1e-9);
    }

    #[test]
    fn normal_density_on_real_line() {
        let v = integrate(normal_pdf, Interval::real_line(), 1e-9).unwrap();
        assert!((v - 1.0).abs() <= 1e-9, "{v}");
    }

    #[test]
    fn half_lines() {
        let v = integrate(|x| (-x).exp(), Interval::new(0.0, f64::INFINITY).unwrap(), 1e-10)
            .unwrap();
        assert!((v - 1.0).abs() < 1e-10);
        let v = integrate(|x| x.exp(), Interval::new(f64::NEG_INFINITY, 1.0).unwrap(), 1e-10)
            .unwrap();
        assert!((v - std::f64::consts::E).abs() < 1e-9);
    }

    #[test]
    fn kink_with_breakpoint() {
        let v = integrate_pieces(|x: f64| x.abs(), &[-1.0, 0.0, 2.0], 1e-12).unwrap();
        assert!((v - 2.5).abs() < 1e-12);
    }

    #[test]
    fn jump_without_breakpoint_still_converges() {
        let v = integrate(
            |x| if x < 0.3 { 1.0 } else { 0.0 },
            Interval::new(0.0, 1.0).unwrap(),
            1e-8,
        )
        .unwrap();
        assert!((v - 0.3).abs() < 1e-7);
    }

    #[test]
    fn nan_is_reported() {
        let r = integrate(|_| f64::NAN, Interval::new(0.0, 1.0).unwrap(), 1e-6);
        assert!(matches!(r, Err(Error::InvalidFunction { .. })));
    }

    #[test]
    fn infinite_value_is_divergent() {
        let r = integrate(|x| if x > 0.5 { f64::NEG_INFINITY } else { 0.0 }, Interval::new(0.0, 1.0).unwrap(), 1e-6);
        assert!(matches!(r, Err(Error::Divergent { .. })));
    }

    #[test]
    fn non_decaying_tail_fails() {
        let r = integrate(|_| 1.0, Interval::real_line(), 1e-6);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(integrate(|x| x, Interval::new(0.0, 1.0).unwrap(), 0.5).is_err());
    }
}
