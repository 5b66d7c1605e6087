//! Small dense least-squares fits.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Least-squares coefficients `c` minimising `Σ_i (Σ_j c_j·basis_j(x_i) − y_i)²`.
pub fn linear_least_squares<B>(xs: &[f64], ys: &[f64], n_basis: usize, basis: B) -> Result<Vec<f64>>
where
    B: Fn(usize, f64) -> f64,
{
    if xs.len() != ys.len() || xs.len() < n_basis {
        return Err(Error::InvalidInput(format!(
            "least squares needs at least {n_basis} points with matching lengths"
        )));
    }
    let design = DMatrix::from_fn(xs.len(), n_basis, |i, j| basis(j, xs[i]));
    let rhs = DVector::from_column_slice(ys);
    let svd = design.svd(true, true);
    let solution = svd
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::SingularSystem(e.to_string()))?;
    Ok(solution.iter().copied().collect())
}

/// Polynomial fit `y ≈ Σ_{j≤degree} c_j x^j`. The abscissae are rescaled to
/// `[-1, 1]` internally and the coefficients mapped back.
pub fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> Result<Vec<f64>> {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let center = 0.5 * (hi + lo);
    let half = 0.5 * (hi - lo);
    if !(half > 0.0) {
        return Err(Error::InvalidInput("polyfit needs distinct abscissae".into()));
    }
    let scaled: Vec<f64> = xs.iter().map(|x| (x - center) / half).collect();
    let t = linear_least_squares(&scaled, ys, degree + 1, |j, x| x.powi(j as i32))?;
    // Expand Σ t_j ((x - center)/half)^j into powers of x.
    let mut out = vec![0.0; degree + 1];
    for (j, tj) in t.iter().enumerate() {
        let scale = tj / half.powi(j as i32);
        let mut binom = 1.0;
        for i in 0..=j {
            // coefficient of x^i in (x - center)^j
            out[i] += scale * binom * (-center).powi((j - i) as i32);
            binom = binom * (j - i) as f64 / (i + 1) as f64;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polyfit_recovers_quadratic() {
        let xs: Vec<f64> = (0..20).map(|i| 1e-6 + i as f64 * 5e-5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x + 7.0 * x * x).collect();
        let c = polyfit(&xs, &ys, 2).unwrap();
        assert!((c[0] - 3.0).abs() < 1e-12);
        assert!((c[1] + 2.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_too_few_points() {
        assert!(linear_least_squares(&[1.0], &[1.0], 2, |j, x| x.powi(j as i32)).is_err());
    }
}
