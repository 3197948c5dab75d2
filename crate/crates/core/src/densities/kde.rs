use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{normal_cdf, Interval, SeededRng};

/// Kernels further than this many bandwidths away contribute below 1e-15
/// relative and are skipped.
const WINDOW: f64 = 8.5;
/// The reported support extends this many bandwidths past the data.
const SUPPORT_PAD: f64 = 9.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    Silverman,
    Fixed(f64),
}

/// Gaussian kernel density estimate over a sorted, shared sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Kde {
    points: Arc<[f64]>,
    h: f64,
}

fn quantile_sorted(xs: &[f64], p: f64) -> f64 {
    let pos = p * (xs.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < xs.len() {
        xs[i] + frac * (xs[i + 1] - xs[i])
    } else {
        xs[i]
    }
}

/// Silverman's rule of thumb, `0.9 min(sd, IQR/1.34) n^(-1/5)`.
pub fn silverman_bandwidth(sample: &[f64]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let var = if sample.len() > 1 {
        sample.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let sd = var.sqrt();
    if !(sd > 0.0) {
        return Err(Error::DegenerateSample);
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    Ok(0.9 * spread * n.powf(-0.2))
}

pub fn kde(sample: &[f64], bandwidth: Bandwidth) -> Result<Kde> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("sample contains non-finite values".into()));
    }
    let h = match bandwidth {
        Bandwidth::Silverman => silverman_bandwidth(sample)?,
        Bandwidth::Fixed(h) => {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidParams {
                    field: "bandwidth".into(),
                    reason: format!("must be positive, got {h}"),
                });
            }
            h
        }
    };
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(Kde {
        points: sorted.into(),
        h,
    })
}

impl Kde {
    pub fn bandwidth(&self) -> f64 {
        self.h
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn support(&self) -> Interval {
        Interval {
            lo: self.points[0] - SUPPORT_PAD * self.h,
            hi: self.points[self.points.len() - 1] + SUPPORT_PAD * self.h,
        }
    }

    /// Sample quantiles at a few levels; dense enough for quadrature to find
    /// all the mass.
    pub fn breakpoints(&self) -> Vec<f64> {
        let s = self.support();
        let mut v = vec![s.lo, s.hi];
        for k in 0..=16 {
            v.push(quantile_sorted(&self.points, k as f64 / 16.0));
        }
        v
    }

    fn window(&self, x: f64) -> (usize, usize) {
        let lo = self.points.partition_point(|p| *p < x - WINDOW * self.h);
        let hi = self.points.partition_point(|p| *p <= x + WINDOW * self.h);
        (lo, hi)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let s = self.support();
        if x < s.lo || x > s.hi {
            return 0.0;
        }
        let (lo, hi) = self.window(x);
        let sum: f64 = self.points[lo..hi]
            .iter()
            .map(|p| {
                let z = (x - p) / self.h;
                (-0.5 * z * z).exp()
            })
            .sum();
        sum / (self.points.len() as f64 * self.h * (2.0 * PI).sqrt())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.window(x);
        let partial: f64 = self.points[lo..hi]
            .iter()
            .map(|p| normal_cdf((x - p) / self.h))
            .sum();
        ((lo as f64 + partial) / self.points.len() as f64).clamp(0.0, 1.0)
    }

    pub fn sample_one(&self, rng: &mut SeededRng) -> f64 {
        let i = rng.below(self.points.len());
        self.points[i] + self.h * rng.standard_normal()
    }
}
