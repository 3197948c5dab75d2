//! Central finite differences.

use super::Matrix;
use crate::error::Result;

fn step(h: Option<f64>, xi: f64, power: f64) -> f64 {
    h.unwrap_or_else(|| f64::EPSILON.powf(power) * xi.abs().max(1.0))
}

/// Central-difference gradient. `h = None` uses `cbrt(eps)·max(1, |xᵢ|)`.
pub fn grad_fd<F>(f: F, x: &[f64], h: Option<f64>) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut probe = x.to_vec();
    let mut g = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let hi = step(h, x[i], 1.0 / 3.0);
        probe[i] = x[i] + hi;
        let up = f(&probe)?;
        probe[i] = x[i] - hi;
        let down = f(&probe)?;
        probe[i] = x[i];
        g.push((up - down) / (2.0 * hi));
    }
    Ok(g)
}

/// Jacobian (rows = outputs) of a vector-valued map by central differences.
pub fn jacobian_fd<F>(f: F, x: &[f64], h: Option<f64>) -> Result<Matrix>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut probe = x.to_vec();
    let mut cols = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let hi = step(h, x[i], 1.0 / 3.0);
        probe[i] = x[i] + hi;
        let up = f(&probe)?;
        probe[i] = x[i] - hi;
        let down = f(&probe)?;
        probe[i] = x[i];
        cols.push(
            up.iter()
                .zip(&down)
                .map(|(u, d)| (u - d) / (2.0 * hi))
                .collect::<Vec<_>>(),
        );
    }
    let rows = cols.first().map_or(0, Vec::len);
    let mut m = Matrix::zeros(rows, x.len());
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    Ok(m)
}

/// Second-order central Hessian, symmetrized. `h = None` uses
/// `eps^(1/4)·max(1, |xᵢ|)`.
pub fn hessian_fd<F>(f: F, x: &[f64], h: Option<f64>) -> Result<Matrix>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let n = x.len();
    let hs: Vec<f64> = x.iter().map(|&xi| step(h, xi, 0.25)).collect();
    let mut probe = x.to_vec();
    let f0 = f(x)?;
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        probe[i] = x[i] + hs[i];
        let up = f(&probe)?;
        probe[i] = x[i] - hs[i];
        let down = f(&probe)?;
        probe[i] = x[i];
        m[(i, i)] = (up - 2.0 * f0 + down) / (hs[i] * hs[i]);
        for j in 0..i {
            let mut corner = |si: f64, sj: f64| {
                probe[i] = x[i] + si * hs[i];
                probe[j] = x[j] + sj * hs[j];
                let v = f(&probe);
                probe[i] = x[i];
                probe[j] = x[j];
                v
            };
            let pp = corner(1.0, 1.0)?;
            let pm = corner(1.0, -1.0)?;
            let mp = corner(-1.0, 1.0)?;
            let mm = corner(-1.0, -1.0)?;
            let v = (pp - pm - mp + mm) / (4.0 * hs[i] * hs[j]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m.symmetrized())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_of_square() {
        let g = grad_fd(|x| Ok(x[0] * x[0]), &[3.0], None).unwrap();
        assert!((g[0] - 6.0).abs() < 1e-6);
    }

    #[test]
    fn gradient_of_product() {
        let g = grad_fd(|x| Ok(x[0] * x[1]), &[2.0, 5.0], None).unwrap();
        assert!((g[0] - 5.0).abs() < 1e-6);
        assert!((g[1] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn hessian_of_square_at_zero() {
        let h = hessian_fd(|x| Ok(x[0] * x[0]), &[0.0], None).unwrap();
        assert!((h[(0, 0)] - 2.0).abs() < 1e-4);
    }

    #[test]
    fn hessian_of_quadratic_form() {
        let h = hessian_fd(
            |v| Ok(v[0] * v[0] + 3.0 * v[1] * v[1] + v[0] * v[1]),
            &[0.7, -1.3],
            None,
        )
        .unwrap();
        let expected = [[2.0, 1.0], [1.0, 6.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((h[(i, j)] - expected[i][j]).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn jacobian_of_linear_map() {
        let j = jacobian_fd(|x| Ok(vec![2.0 * x[0] + x[1], -x[1]]), &[1.0, 1.0], None).unwrap();
        assert!((j[(0, 0)] - 2.0).abs() < 1e-8);
        assert!((j[(0, 1)] - 1.0).abs() < 1e-8);
        assert!(j[(1, 0)].abs() < 1e-8);
        assert!((j[(1, 1)] + 1.0).abs() < 1e-8);
    }

    #[test]
    fn errors_propagate() {
        let r = grad_fd(|_| Err(crate::Error::EmptySample), &[1.0], None);
        assert!(r.is_err());
    }
}
