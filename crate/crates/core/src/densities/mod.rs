//! Catalog of one-dimensional densities used as targets `p*` and as
//! generator pushforwards `pθ`.
//!
//! Every density can be evaluated, sampled by inverse-CDF, and reports its
//! support together with the points where it is not smooth, so quadrature
//! can put panel boundaries there.

mod kde;

use std::f64::consts::PI;
use std::sync::Arc;

pub use kde::{kde, silverman_bandwidth, Bandwidth, Kde};

use crate::error::{Error, Result};
use crate::numerics::{normal_cdf, normal_quantile, normal_sf, Interval, Quadrature, SeededRng};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    Gaussian { mean: f64, sd: f64 },
    /// Centered Laplace, `exp(-|x|/b) / (2b)`.
    Laplace { scale: f64 },
    /// Centered logistic with scale `s`.
    Logistic { scale: f64 },
    Exponential { rate: f64 },
    Uniform { lo: f64, hi: f64 },
    Mixture {
        weights: Vec<f64>,
        components: Vec<Density>,
    },
    Kde(Kde),
    /// `base` restricted to `[lo, hi]` and renormalized.
    Truncated {
        base: Arc<Density>,
        lo: f64,
        hi: f64,
        mass: f64,
    },
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams {
            field: field.to_string(),
            reason: format!("must be positive and finite, got {v}"),
        })
    }
}

impl Density {
    pub fn gaussian(mean: f64, sd: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::InvalidParams {
                field: "mean".into(),
                reason: "must be finite".into(),
            });
        }
        positive("sigma", sd)?;
        Ok(Density::Gaussian { mean, sd })
    }

    pub fn laplace(scale: f64) -> Result<Self> {
        positive("b", scale)?;
        Ok(Density::Laplace { scale })
    }

    pub fn logistic(scale: f64) -> Result<Self> {
        positive("s", scale)?;
        Ok(Density::Logistic { scale })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        positive("lambda", rate)?;
        Ok(Density::Exponential { rate })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParams {
                field: "theta".into(),
                reason: format!("uniform needs finite lo < hi, got [{lo}, {hi}]"),
            });
        }
        Ok(Density::Uniform { lo, hi })
    }

    pub fn mixture(weights: Vec<f64>, components: Vec<Density>) -> Result<Self> {
        if weights.is_empty() || weights.len() != components.len() {
            return Err(Error::InvalidParams {
                field: "weights".into(),
                reason: "need one weight per component".into(),
            });
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidParams {
                field: "weights".into(),
                reason: "weights must be nonnegative".into(),
            });
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams {
                field: "weights".into(),
                reason: format!("weights sum to {total}, not 1"),
            });
        }
        Ok(Density::Mixture {
            weights,
            components,
        })
    }

    /// Half a standard normal plus five narrow bumps at -1, -0.5, 0, 0.5, 1.
    pub fn claw() -> Self {
        let mut weights = vec![0.5];
        let mut components = vec![Density::Gaussian { mean: 0.0, sd: 1.0 }];
        for k in 0..5 {
            weights.push(0.1);
            components.push(Density::Gaussian {
                mean: -1.0 + 0.5 * k as f64,
                sd: 0.1,
            });
        }
        Density::Mixture {
            weights,
            components,
        }
    }

    /// Restricts to `[lo, hi]` and renormalizes.
    pub fn truncated(self, lo: f64, hi: f64) -> Result<Self> {
        let window = Interval::new(lo, hi)?;
        let support = self.support();
        let Some(w) = support.intersect(&window) else {
            return Err(Error::InvalidParams {
                field: "truncation".into(),
                reason: "window misses the support".into(),
            });
        };
        let mass = match (self.cdf(w.hi), self.cdf(w.lo)) {
            (Some(a), Some(b)) => a - b,
            _ => {
                let mut pts = self.breakpoints();
                pts.retain(|p| *p > w.lo && *p < w.hi);
                pts.push(w.lo);
                pts.push(w.hi);
                Quadrature::with_rel_tol(1e-13).integrate_pieces(|x| self.pdf(x), &pts)?
            }
        };
        if !(mass > 0.0) {
            return Err(Error::InvalidParams {
                field: "truncation".into(),
                reason: "window carries no mass".into(),
            });
        }
        Ok(Density::Truncated {
            base: Arc::new(self),
            lo: w.lo,
            hi: w.hi,
            mass,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Density::Gaussian { .. } => "gaussian",
            Density::Laplace { .. } => "laplace",
            Density::Logistic { .. } => "logistic",
            Density::Exponential { .. } => "exponential",
            Density::Uniform { .. } => "uniform",
            Density::Mixture { .. } => "mixture",
            Density::Kde(_) => "kde",
            Density::Truncated { .. } => "truncated",
        }
    }

    pub fn support(&self) -> Interval {
        match self {
            Density::Gaussian { .. } | Density::Laplace { .. } | Density::Logistic { .. } => {
                Interval::real_line()
            }
            Density::Exponential { .. } => Interval {
                lo: 0.0,
                hi: f64::INFINITY,
            },
            Density::Uniform { lo, hi } => Interval { lo: *lo, hi: *hi },
            Density::Mixture { components, .. } => components
                .iter()
                .map(Density::support)
                .reduce(|a, b| a.hull(&b))
                .expect("mixture has components"),
            Density::Kde(k) => k.support(),
            Density::Truncated { lo, hi, .. } => Interval { lo: *lo, hi: *hi },
        }
    }

    /// Finite support endpoints, kinks, and component centers; a good set of
    /// forced panel boundaries for quadrature.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = match self {
            Density::Gaussian { mean, .. } => vec![*mean],
            Density::Laplace { .. } | Density::Logistic { .. } | Density::Exponential { .. } => {
                vec![0.0]
            }
            Density::Uniform { lo, hi } => vec![*lo, *hi],
            Density::Mixture { components, .. } => {
                components.iter().flat_map(Density::breakpoints).collect()
            }
            Density::Kde(k) => k.breakpoints(),
            Density::Truncated { base, lo, hi, .. } => {
                let mut v: Vec<f64> = base
                    .breakpoints()
                    .into_iter()
                    .filter(|p| p > lo && p < hi)
                    .collect();
                v.push(*lo);
                v.push(*hi);
                v
            }
        };
        let s = self.support();
        pts.retain(|p| p.is_finite() && s.contains(*p));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            Density::Gaussian { mean, sd } => {
                let z = (x - mean) / sd;
                (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
            }
            Density::Laplace { scale } => (-x.abs() / scale).exp() / (2.0 * scale),
            Density::Logistic { scale } => {
                // Symmetric, so evaluate on the side where exp cannot overflow.
                let e = (-x.abs() / scale).exp();
                e / (scale * (1.0 + e) * (1.0 + e))
            }
            Density::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            Density::Uniform { lo, hi } => {
                if x >= *lo && x <= *hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            Density::Mixture {
                weights,
                components,
            } => weights
                .iter()
                .zip(components)
                .map(|(w, c)| w * c.pdf(x))
                .sum(),
            Density::Kde(k) => k.pdf(x),
            Density::Truncated { base, lo, hi, mass } => {
                if x >= *lo && x <= *hi {
                    base.pdf(x) / mass
                } else {
                    0.0
                }
            }
        }
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        match self {
            Density::Gaussian { mean, sd } => {
                let z = (x - mean) / sd;
                -0.5 * z * z - sd.ln() - LN_SQRT_2PI
            }
            Density::Laplace { scale } => -x.abs() / scale - (2.0 * scale).ln(),
            Density::Logistic { scale } => {
                let a = x.abs() / scale;
                -a - scale.ln() - 2.0 * (-a).exp().ln_1p()
            }
            Density::Exponential { rate } => {
                if x < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    rate.ln() - rate * x
                }
            }
            _ => self.pdf(x).ln(),
        }
    }

    pub fn cdf(&self, x: f64) -> Option<f64> {
        Some(match self {
            Density::Gaussian { mean, sd } => normal_cdf((x - mean) / sd),
            Density::Laplace { scale } => {
                if x < 0.0 {
                    0.5 * (x / scale).exp()
                } else {
                    1.0 - 0.5 * (-x / scale).exp()
                }
            }
            Density::Logistic { scale } => crate::numerics::sigmoid(x / scale),
            Density::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Density::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Density::Mixture {
                weights,
                components,
            } => {
                let mut acc = 0.0;
                for (w, c) in weights.iter().zip(components) {
                    acc += w * c.cdf(x)?;
                }
                acc.clamp(0.0, 1.0)
            }
            Density::Kde(k) => k.cdf(x),
            Density::Truncated { base, lo, hi, mass } => {
                let xc = x.clamp(*lo, *hi);
                ((base.cdf(xc)? - base.cdf(*lo)?) / mass).clamp(0.0, 1.0)
            }
        })
    }

    /// Upper tail `1 - F(x)`, computed without cancellation where possible.
    pub fn sf(&self, x: f64) -> Option<f64> {
        match self {
            Density::Gaussian { mean, sd } => Some(normal_sf((x - mean) / sd)),
            Density::Exponential { rate } => Some(if x <= 0.0 { 1.0 } else { (-rate * x).exp() }),
            _ => self.cdf(x).map(|c| 1.0 - c),
        }
    }

    /// Quantile function F⁻¹(u), closed form where available and bisection on
    /// the CDF otherwise.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::DomainError {
                function: "quantile",
                value: u,
            });
        }
        Ok(match self {
            Density::Gaussian { mean, sd } => mean + sd * normal_quantile(u)?,
            Density::Laplace { scale } => {
                if u < 0.5 {
                    scale * (2.0 * u).ln()
                } else {
                    -scale * (2.0 * (1.0 - u)).ln()
                }
            }
            Density::Logistic { scale } => scale * (u / (1.0 - u)).ln(),
            Density::Exponential { rate } => -(-u).ln_1p() / rate,
            Density::Uniform { lo, hi } => lo + (hi - lo) * u,
            Density::Truncated { base, lo, mass, .. }
                if !matches!(**base, Density::Mixture { .. } | Density::Kde(_)) =>
            {
                let f_lo = base.cdf(*lo).expect("catalog base has a cdf");
                base.quantile((f_lo + u * mass).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON))?
            }
            _ => self.bisect_quantile(u)?,
        })
    }

    fn bisect_quantile(&self, u: f64) -> Result<f64> {
        let cdf = |x: f64| self.cdf(x).ok_or(Error::SampleOnly);
        let s = self.support();
        let mut lo = if s.lo.is_finite() { s.lo } else { -1.0 };
        let mut hi = if s.hi.is_finite() { s.hi } else { 1.0 };
        while cdf(lo)? > u {
            lo = 2.0 * lo - hi.abs().max(1.0);
        }
        while cdf(hi)? < u {
            hi = 2.0 * hi + lo.abs().max(1.0);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if cdf(mid)? < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn sample_one(&self, rng: &mut SeededRng) -> f64 {
        match self {
            Density::Mixture {
                weights,
                components,
            } => {
                let u = rng.uniform();
                let mut acc = 0.0;
                let mut pick = components.len() - 1;
                for (i, w) in weights.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        pick = i;
                        break;
                    }
                }
                components[pick].sample_one(rng)
            }
            Density::Kde(k) => k.sample_one(rng),
            _ => self
                .quantile(rng.uniform())
                .expect("catalog quantiles accept any open-interval uniform"),
        }
    }

    /// `n` i.i.d. draws; deterministic given the generator state.
    pub fn sample(&self, rng: &mut SeededRng, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }

    /// ∫ g(x) p(x) dx over the support.
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G, rel_tol: f64) -> Result<f64> {
        let s = self.support();
        let mut pts = self.breakpoints();
        pts.push(s.lo);
        pts.push(s.hi);
        Quadrature::with_rel_tol(rel_tol).integrate_pieces(
            |x| {
                let p = self.pdf(x);
                if p == 0.0 {
                    0.0
                } else {
                    g(x) * p
                }
            },
            &pts,
        )
    }

    pub fn mean(&self) -> Result<f64> {
        self.expect(|x| x, 1e-10)
    }

    pub fn variance(&self) -> Result<f64> {
        let m = self.mean()?;
        self.expect(|x| (x - m) * (x - m), 1e-10)
    }

    /// Largest pdf value over a grid; used by bound checks.
    pub fn pdf_range_on(&self, lo: f64, hi: f64, points: usize) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut max = 0.0f64;
        for i in 0..points {
            let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            let p = self.pdf(x);
            min = min.min(p);
            max = max.max(p);
        }
        (min, max)
    }
}

/// Builds a catalog density from a tag and its parameter list.
///
/// Tags: `gaussian [mean, sd]`, `laplace [b]`, `logistic [s]`,
/// `exponential [lambda]`, `uniform [theta]` (support `[0, theta]`) or
/// `uniform [lo, hi]`, `claw []`.
pub fn make_density(kind: &str, params: &[f64]) -> Result<Density> {
    let want = |n: usize| -> Result<()> {
        if params.len() == n {
            Ok(())
        } else {
            Err(Error::InvalidParams {
                field: "params".into(),
                reason: format!("`{kind}` takes {n} parameter(s), got {}", params.len()),
            })
        }
    };
    match kind {
        "gaussian" | "normal" => {
            want(2)?;
            Density::gaussian(params[0], params[1])
        }
        "laplace" => {
            want(1)?;
            Density::laplace(params[0])
        }
        "logistic" => {
            want(1)?;
            Density::logistic(params[0])
        }
        "exponential" => {
            want(1)?;
            Density::exponential(params[0])
        }
        "uniform" => match params.len() {
            1 => {
                positive("theta", params[0])?;
                Density::uniform(0.0, params[0])
            }
            _ => {
                want(2)?;
                Density::uniform(params[0], params[1])
            }
        },
        "claw" => {
            want(0)?;
            Ok(Density::claw())
        }
        other => Err(Error::InvalidParams {
            field: "kind".into(),
            reason: format!("unknown density `{other}`"),
        }),
    }
}

/// Panel boundaries for integrating anything built from `densities`: the
/// hull of their supports plus every breakpoint.
pub fn joint_points(densities: &[&Density]) -> Vec<f64> {
    let mut hull = densities[0].support();
    let mut pts = Vec::new();
    for d in densities {
        hull = hull.hull(&d.support());
        pts.extend(d.breakpoints());
    }
    pts.push(hull.lo);
    pts.push(hull.hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}
