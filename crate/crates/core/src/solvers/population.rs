use serde::Serialize;

use super::is_log_coord;
use crate::criterion::{js_divergence, AdversarialProblem, LatentCriterion, LN_4};
use crate::error::{Error, Result};
use crate::families::DiscriminatorFamily;
use crate::numerics::{jacobian_fd, Interval, Matrix, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StartSet {
    /// Box corners, the (log-)center, the random starts and the warm start.
    Full,
    /// The warm start alone (falls back to the center without one).
    WarmOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InnerMaxOptions {
    pub random_starts: usize,
    pub max_iter: usize,
    /// Tolerance on the projected `‖∇₂L‖∞`.
    pub grad_tol: f64,
    pub starts: StartSet,
    pub seed: u64,
}

impl Default for InnerMaxOptions {
    fn default() -> Self {
        InnerMaxOptions {
            random_starts: 3,
            max_iter: 500,
            grad_tol: 1e-8,
            starts: StartSet::Full,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerMax {
    pub alpha: Vec<f64>,
    /// `L(θ, α) + ln 4`.
    pub excess: f64,
    /// Projected gradient norm, the larger of `‖∇₂L‖∞` and its log-space
    /// counterpart.
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Excess at the start and after each accepted line-search step.
    #[serde(skip)]
    pub path: Vec<f64>,
}

impl InnerMax {
    pub fn value(&self) -> f64 {
        self.excess - LN_4
    }
}

/// Coordinates for the search: `ln α` on positive boxes, `α` otherwise.
struct Coords<'a> {
    boxes: &'a [Interval],
}

impl Coords<'_> {
    fn to_u(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.boxes)
            .map(|(v, b)| if is_log_coord(b) { v.ln() } else { *v })
            .collect()
    }

    fn to_x(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.boxes)
            .map(|(v, b)| if is_log_coord(b) { b.clamp(v.exp()) } else { b.clamp(*v) })
            .collect()
    }

    fn bounds(&self, i: usize) -> (f64, f64) {
        let b = &self.boxes[i];
        if is_log_coord(b) {
            (b.lo.ln(), b.hi.ln())
        } else {
            (b.lo, b.hi)
        }
    }

    fn project(&self, u: &mut [f64]) {
        for (i, v) in u.iter_mut().enumerate() {
            let (lo, hi) = self.bounds(i);
            *v = v.clamp(lo, hi);
        }
    }

    /// dx/du.
    fn scale(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.boxes)
            .map(|(v, b)| if is_log_coord(b) { *v } else { 1.0 })
            .collect()
    }

    /// Coordinates sitting on a bound with the gradient pushing outward.
    fn active(&self, u: &[f64], g: &[f64]) -> Vec<bool> {
        (0..u.len())
            .map(|i| {
                let (lo, hi) = self.bounds(i);
                let span = (hi - lo).abs().max(1.0);
                (u[i] <= lo + 1e-12 * span && g[i] < 0.0) || (u[i] >= hi - 1e-12 * span && g[i] > 0.0)
            })
            .collect()
    }
}

/// Hessian of `u ↦ L(θ, x(u))`.
fn hessian_u(lc: &LatentCriterion<'_>, coords: &Coords<'_>, theta: &[f64], u: &[f64], gx: &[f64]) -> Result<Matrix> {
    let x = coords.to_x(u);
    let s = coords.scale(&x);
    if let Some(hx) = lc.hess_alpha(theta, &x)? {
        let q = x.len();
        let mut h = Matrix::zeros(q, q);
        for i in 0..q {
            for j in 0..q {
                h[(i, j)] = s[i] * s[j] * hx[(i, j)];
            }
            if is_log_coord(&coords.boxes[i]) {
                h[(i, i)] += s[i] * gx[i];
            }
        }
        return Ok(h);
    }
    let j = jacobian_fd(
        |v| {
            let xv = coords.to_x(v);
            let sv = coords.scale(&xv);
            let g = lc.grad_alpha(theta, &xv)?;
            Ok(g.iter().zip(&sv).map(|(a, b)| a * b).collect())
        },
        u,
        None,
    )?;
    Ok(j.symmetrized())
}

/// Ascent direction `−H̃⁻¹g` on the free coordinates, with `H̃` the
/// Hessian whose eigenvalues are replaced by `−max(|λ|, floor)`.
fn newton_direction(h: &Matrix, g: &[f64], active: &[bool]) -> Result<Vec<f64>> {
    let free: Vec<usize> = (0..g.len()).filter(|&i| !active[i]).collect();
    let mut d = vec![0.0; g.len()];
    if free.is_empty() {
        return Ok(d);
    }
    let m = free.len();
    let mut hf = Matrix::zeros(m, m);
    for (a, &i) in free.iter().enumerate() {
        for (b, &j) in free.iter().enumerate() {
            hf[(a, b)] = h[(i, j)];
        }
    }
    let (vals, vecs) = hf.symmetrized().symmetric_eigen()?;
    let big = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = (1e-6 * big).max(1e-12);
    for (k, lam) in vals.iter().enumerate() {
        let lam = -lam.abs().max(floor);
        let proj: f64 = (0..m).map(|a| vecs[(a, k)] * g[free[a]]).sum();
        for a in 0..m {
            d[free[a]] -= vecs[(a, k)] * proj / lam;
        }
    }
    Ok(d)
}

fn ascend(
    lc: &LatentCriterion<'_>,
    coords: &Coords<'_>,
    theta: &[f64],
    start: &[f64],
    opts: &InnerMaxOptions,
) -> Result<InnerMax> {
    let mut u = coords.to_u(start);
    coords.project(&mut u);
    let mut x = coords.to_x(&u);
    let mut f = lc.excess(theta, &x)?;
    let mut out = InnerMax {
        alpha: x.clone(),
        excess: f,
        grad_norm: f64::INFINITY,
        iterations: 0,
        converged: false,
        path: vec![f],
    };
    for it in 0..=opts.max_iter {
        let gx = lc.grad_alpha(theta, &x)?;
        let s = coords.scale(&x);
        let mut gu: Vec<f64> = gx.iter().zip(&s).map(|(a, b)| a * b).collect();
        let active = coords.active(&u, &gu);
        // Convergence is judged in both coordinates: a tiny plain gradient
        // at large α can still hide a usable log-space slope.
        let mut norm = 0.0f64;
        for i in 0..gu.len() {
            if active[i] {
                gu[i] = 0.0;
            } else {
                norm = norm.max(gx[i].abs()).max(gu[i].abs());
            }
        }
        out.grad_norm = norm;
        out.iterations = it;
        if norm <= opts.grad_tol {
            out.converged = true;
            break;
        }
        if it == opts.max_iter || !f.is_finite() {
            break;
        }
        let h = hessian_u(lc, coords, theta, &u, &gx)?;
        let mut d = if h.as_slice().iter().all(|v| v.is_finite()) {
            newton_direction(&h, &gu, &active)?
        } else {
            gu.clone()
        };
        if d.iter().zip(&gu).map(|(a, b)| a * b).sum::<f64>() <= 0.0 {
            d = gu.clone();
        }
        let dmax = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if dmax > 1.0 {
            d.iter_mut().for_each(|v| *v /= dmax);
        }
        let mut step = 1.0;
        let mut accepted = false;
        while step > 1e-12 {
            let mut trial: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a + step * b).collect();
            coords.project(&mut trial);
            let xt = coords.to_x(&trial);
            let ft = lc.excess(theta, &xt)?;
            let slope: f64 = gu.iter().zip(trial.iter().zip(&u)).map(|(g, (a, b))| g * (a - b)).sum();
            if ft.is_finite() && ft >= f + 1e-4 * slope {
                u = trial;
                x = xt;
                f = ft;
                out.path.push(f);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    out.alpha = x;
    out.excess = f;
    Ok(out)
}

fn start_points(p: &AdversarialProblem, warm: Option<&[f64]>, opts: &InnerMaxOptions) -> Vec<Vec<f64>> {
    let boxes = &p.alpha_box;
    let center: Vec<f64> = boxes
        .iter()
        .map(|b| {
            if is_log_coord(b) {
                (b.lo * b.hi).sqrt()
            } else {
                b.clamp(0.5 * (b.lo + b.hi))
            }
        })
        .collect();
    let mut starts = Vec::new();
    if let Some(w) = warm {
        starts.push(w.iter().zip(boxes).map(|(v, b)| b.clamp(*v)).collect());
    }
    if opts.starts == StartSet::WarmOnly {
        if starts.is_empty() {
            starts.push(center);
        }
        return starts;
    }
    let q = boxes.len();
    if q <= 4 {
        for mask in 0..(1usize << q) {
            starts.push(
                boxes
                    .iter()
                    .enumerate()
                    .map(|(i, b)| if mask >> i & 1 == 1 { b.hi } else { b.lo })
                    .collect(),
            );
        }
    }
    starts.push(center);
    let mut rng = SeededRng::new(opts.seed);
    for _ in 0..opts.random_starts {
        starts.push(
            boxes
                .iter()
                .map(|b| {
                    if is_log_coord(b) {
                        (b.lo.ln() + rng.uniform() * (b.hi.ln() - b.lo.ln())).exp()
                    } else {
                        rng.uniform_in(b.lo, b.hi)
                    }
                })
                .collect(),
        );
    }
    starts
}

/// Maximizer of `α ↦ L(θ, α)` from the default multi-start set.
pub fn inner_max_alpha(p: &AdversarialProblem, theta: &[f64]) -> Result<InnerMax> {
    inner_max_alpha_with(p, theta, None, &InnerMaxOptions::default())
}

/// Projected Newton ascent in log coordinates from each start, with an
/// eigenvalue-modified Hessian and Armijo backtracking. Returns the best
/// converged start.
pub fn inner_max_alpha_with(
    p: &AdversarialProblem,
    theta: &[f64],
    warm: Option<&[f64]>,
    opts: &InnerMaxOptions,
) -> Result<InnerMax> {
    p.check_theta(theta)?;
    let lc = LatentCriterion::new(p);
    let coords = Coords { boxes: &p.alpha_box };
    let mut best: Option<InnerMax> = None;
    let mut best_any: Option<InnerMax> = None;
    for s in start_points(p, warm, opts) {
        let r = match ascend(&lc, &coords, theta, &s, opts) {
            Ok(r) => r,
            Err(Error::Divergent { .. }) | Err(Error::NonConvergence { .. }) => continue,
            Err(e) => return Err(e),
        };
        let better = |cur: &Option<InnerMax>| cur.as_ref().map_or(true, |c| r.excess > c.excess);
        if r.converged && better(&best) {
            best = Some(r.clone());
        }
        if better(&best_any) {
            best_any = Some(r);
        }
    }
    match best {
        Some(b) => Ok(b),
        None => Err(Error::OptimizerNonConvergence(match best_any {
            Some(b) => format!(
                "inner maximization at θ = {theta:?}: best start stopped at α = {:?} with |grad| = {:e}",
                b.alpha, b.grad_norm
            ),
            None => format!("inner maximization at θ = {theta:?}: criterion not computable from any start"),
        })),
    }
}

/// `V(θ) = max_α L(θ, α)`.
pub fn envelope_value(p: &AdversarialProblem, theta: &[f64]) -> Result<f64> {
    Ok(inner_max_alpha(p, theta)?.value())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equilibrium {
    pub theta_bar: Vec<f64>,
    /// Limit of the inner maximizers `α(θ)` as `θ → θ̄`.
    pub alpha_bar: Vec<f64>,
    /// Inner maximizers at `θ̄(1 ± δ)` that `alpha_bar` averages.
    pub alpha_minus: Vec<f64>,
    pub alpha_plus: Vec<f64>,
    pub delta: f64,
    /// `V(θ̄) + ln 4`.
    pub excess: f64,
    /// `dV/dθ` at `θ̄`, by the envelope theorem.
    pub dv_dtheta: f64,
    pub grad_alpha_norm: f64,
}

impl Equilibrium {
    pub fn value(&self) -> f64 {
        self.excess - LN_4
    }
}

const GRID_POINTS: usize = 33;
const INV_PHI: f64 = 0.618_033_988_749_894_9;
pub(crate) const CONTINUATION_DELTA: f64 = 1e-2;

fn scalar_box(boxes: &[Interval], what: &str) -> Result<Interval> {
    match boxes {
        [b] if b.is_finite() => Ok(*b),
        _ => Err(Error::InvalidInput(format!(
            "{what} solver needs a scalar, bounded parameter box (got {} dimensions)",
            boxes.len()
        ))),
    }
}

fn grid(b: &Interval) -> Vec<f64> {
    (0..GRID_POINTS)
        .map(|k| {
            let t = k as f64 / (GRID_POINTS - 1) as f64;
            if is_log_coord(b) {
                (b.lo.ln() + t * (b.hi.ln() - b.lo.ln())).exp()
            } else {
                b.lo + t * (b.hi - b.lo)
            }
        })
        .collect()
}

/// Bracket around the grid minimum, in the search coordinate.
fn bracket(b: &Interval, pts: &[f64], vals: &[f64]) -> (f64, f64, usize) {
    let k = vals
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap_or(GRID_POINTS / 2);
    let lo = pts[k.saturating_sub(1)];
    let hi = pts[(k + 1).min(pts.len() - 1)];
    if is_log_coord(b) {
        (lo.ln(), hi.ln(), k)
    } else {
        (lo, hi, k)
    }
}

/// Golden-section minimization of `f` over `[a, b]` down to width `tol`.
fn golden<F: FnMut(f64) -> Result<f64>>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Illinois false position for a sign change of `f` on `[a, b]`.
fn illinois<F: FnMut(f64) -> Result<f64>>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<Option<f64>> {
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(Some(a));
    }
    if fb == 0.0 {
        return Ok(Some(b));
    }
    if fa.signum() == fb.signum() {
        return Ok(None);
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        if (b - a).abs() <= tol {
            return Ok(Some(c));
        }
        let fc = f(c)?;
        if fc == 0.0 {
            return Ok(Some(c));
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() <= tol {
            return Ok(Some(0.5 * (a + b)));
        }
    }
    Ok(Some(0.5 * (a + b)))
}

fn from_coord(b: &Interval, v: f64) -> f64 {
    b.clamp(if is_log_coord(b) { v.exp() } else { v })
}

/// `θ̄ = argmin_θ max_α L(θ, α)` for a scalar generator parameter, and the
/// equilibrium discriminator `ᾱ`.
///
/// A 33-point grid brackets the minimum of `V`, golden section narrows it,
/// and false position on `dV/dθ = ∂₁L(θ, α(θ))` finishes the solve.
pub fn solve_theta_bar(p: &AdversarialProblem) -> Result<Equilibrium> {
    let tb = scalar_box(&p.theta_box, "θ̄")?;
    let lc = LatentCriterion::new(p);
    let pts = grid(&tb);
    let mut vals = Vec::with_capacity(pts.len());
    let mut alphas = Vec::with_capacity(pts.len());
    for &t in &pts {
        match inner_max_alpha(p, &[t]) {
            Ok(r) => {
                vals.push(r.excess);
                alphas.push(Some(r.alpha));
            }
            Err(Error::OptimizerNonConvergence(_)) => {
                vals.push(f64::NAN);
                alphas.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    let (a, b, k) = bracket(&tb, &pts, &vals);
    let mut warm = alphas[k]
        .clone()
        .ok_or_else(|| Error::OptimizerNonConvergence("θ̄ grid: no inner maximization converged".into()))?;
    let warm_opts = InnerMaxOptions {
        starts: StartSet::WarmOnly,
        ..InnerMaxOptions::default()
    };
    let inner = |t: f64, warm: &mut Vec<f64>| -> Result<InnerMax> {
        let r = inner_max_alpha_with(p, &[t], Some(warm), &warm_opts)
            .or_else(|_| inner_max_alpha_with(p, &[t], Some(warm), &InnerMaxOptions::default()))?;
        *warm = r.alpha.clone();
        Ok(r)
    };

    let u0 = golden(
        |u| Ok(inner(from_coord(&tb, u), &mut warm)?.excess),
        a,
        b,
        1e-4 * (b - a).abs().max(1e-12),
    )?;
    let width = (b - a).abs() * 1e-2;
    let dv = |u: f64, warm: &mut Vec<f64>| -> Result<f64> {
        let t = from_coord(&tb, u);
        let r = inner_max_alpha_with(p, &[t], Some(warm), &warm_opts)
            .or_else(|_| inner_max_alpha_with(p, &[t], Some(warm), &InnerMaxOptions::default()))?;
        *warm = r.alpha.clone();
        Ok(lc.grad_theta(&[t], &r.alpha)?[0])
    };
    let (lo, hi) = (
        (u0 - width).max(a.min(b)),
        (u0 + width).min(a.max(b)),
    );
    let tol = if is_log_coord(&tb) { 1e-9 } else { 1e-9 * u0.abs().max(1.0) };
    let root = illinois(|u| dv(u, &mut warm), lo, hi, tol)?.unwrap_or(u0);
    let theta_bar = from_coord(&tb, root);

    let at = inner_max_alpha_with(p, &[theta_bar], Some(&warm), &InnerMaxOptions::default())?;
    let dv_dtheta = lc.grad_theta(&[theta_bar], &at.alpha)?[0];
    let side = |t: f64| inner_max_alpha_with(p, &[tb.clamp(t)], Some(&at.alpha), &InnerMaxOptions::default());
    let minus = side(theta_bar * (1.0 - CONTINUATION_DELTA))?;
    let plus = side(theta_bar * (1.0 + CONTINUATION_DELTA))?;
    let mut alpha_bar: Vec<f64> = minus
        .alpha
        .iter()
        .zip(&plus.alpha)
        .zip(&p.alpha_box)
        .map(|((a, b), bx)| bx.clamp(0.5 * (a + b)))
        .collect();
    if p.discriminator == DiscriminatorFamily::GaussianRatio && at.excess.abs() <= 1e-10 {
        // D ≡ 1/2 attains the max: every diagonal point is a maximizer, and
        // the continuation fixes the common level.
        let c = alpha_bar.iter().map(|v| v.ln()).sum::<f64>() / alpha_bar.len() as f64;
        alpha_bar = p.alpha_box.iter().map(|b| b.clamp(c.exp())).collect();
    }
    let grad = lc.grad_alpha(&[theta_bar], &alpha_bar)?;
    Ok(Equilibrium {
        theta_bar: vec![theta_bar],
        alpha_bar,
        alpha_minus: minus.alpha,
        alpha_plus: plus.alpha,
        delta: CONTINUATION_DELTA,
        excess: at.excess,
        dv_dtheta,
        grad_alpha_norm: grad.iter().fold(0.0f64, |m, v| m.max(v.abs())),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaStar {
    pub theta_star: Vec<f64>,
    pub js: f64,
}

/// `θ* = argmin_θ JS(p*‖p_θ)` for a scalar generator parameter with a
/// closed-form pushforward: grid bracket, then golden section.
pub fn solve_theta_star(p: &AdversarialProblem) -> Result<ThetaStar> {
    let tb = scalar_box(&p.theta_box, "θ*")?;
    let js = |t: f64| -> Result<f64> { js_divergence(&p.target, &p.pushforward(&[t])?) };
    let pts = grid(&tb);
    let vals = pts.iter().map(|&t| js(t)).collect::<Result<Vec<_>>>()?;
    let (a, b, _) = bracket(&tb, &pts, &vals);
    let u = golden(|u| js(from_coord(&tb, u)), a, b, 1e-10)?;
    let theta = from_coord(&tb, u);
    Ok(ThetaStar {
        theta_star: vec![theta],
        js: js(theta)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criterion::{optimal_discriminator, population_criterion};
    use crate::families::model;

    #[test]
    fn well_specified_inner_max_reproduces_optimal_discriminator() {
        let p = model("gaussian-gaussian").unwrap();
        let theta = 1.7;
        let r = inner_max_alpha(&p, &[theta]).unwrap();
        assert!(r.converged);
        let mut a = r.alpha.clone();
        a.sort_by(f64::total_cmp);
        assert!((a[0] - 1.0).abs() < 1e-5 && (a[1] - theta).abs() < 1e-5, "{:?}", r.alpha);
        let ptheta = p.pushforward(&[theta]).unwrap();
        let jsv = js_divergence(&p.target, &ptheta).unwrap();
        assert!((r.value() - (2.0 * jsv - LN_4)).abs() < 1e-9);
        let d = optimal_discriminator(&p.target, &ptheta);
        let lstar = population_criterion(&p, &[theta], &d).unwrap();
        assert!((r.value() - lstar).abs() < 1e-8);
    }

    #[test]
    fn equal_distributions_give_flat_maximum() {
        let p = model("gaussian-gaussian").unwrap();
        let r = inner_max_alpha(&p, &[1.0]).unwrap();
        assert!((r.value() + LN_4).abs() <= 1e-6);
        assert!(r.grad_norm <= 1e-8);
    }

    #[test]
    fn accepted_steps_never_decrease_the_criterion() {
        let opts = InnerMaxOptions::default();
        let mut steps = 0;
        for (name, thetas) in [
            ("laplace-gaussian", [0.5, 2.1, 7.0]),
            ("exponential-uniform", [0.3, 2.45, 9.0]),
            ("claw-gaussian", [0.2, 0.87, 3.0]),
        ] {
            let p = model(name).unwrap();
            let lc = LatentCriterion::new(&p);
            let coords = Coords { boxes: &p.alpha_box };
            for t in thetas {
                for s in start_points(&p, None, &opts) {
                    let r = match ascend(&lc, &coords, &[t], &s, &opts) {
                        Ok(r) => r,
                        Err(Error::Divergent { .. }) | Err(Error::NonConvergence { .. }) => continue,
                        Err(e) => panic!("{e}"),
                    };
                    steps += r.path.len() - 1;
                    assert!(r.path.windows(2).all(|w| w[1] >= w[0]), "{name} θ={t} from {s:?}");
                    assert_eq!(*r.path.last().unwrap(), r.excess);
                }
            }
        }
        assert!(steps > 100);
    }

    #[test]
    fn golden_and_illinois_on_known_functions() {
        let m = golden(|x| Ok((x - 0.3) * (x - 0.3)), -1.0, 2.0, 1e-9).unwrap();
        assert!((m - 0.3).abs() < 1e-8);
        let r = illinois(|x| Ok(x * x * x - 2.0), 0.0, 3.0, 1e-12).unwrap().unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-10);
        assert!(illinois(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12).unwrap().is_none());
    }

    #[test]
    fn rejects_vector_theta() {
        let p = crate::families::neural_problem(1, 1).unwrap();
        assert!(matches!(solve_theta_bar(&p), Err(Error::InvalidInput(_))));
        assert!(matches!(solve_theta_star(&p), Err(Error::InvalidInput(_))));
    }
}
