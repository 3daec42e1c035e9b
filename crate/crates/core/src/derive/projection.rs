//! Top-two principal component projection with min-max scaling.

#![allow(clippy::needless_range_loop)]

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenvalues closer than this fraction of the largest are treated as tied.
const TIE_TOLERANCE: f64 = 1e-9;
/// Loadings within this distance of the largest magnitude count as tied for
/// the sign convention.
const SIGN_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// A fitted projection onto the first two principal components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection2D {
    pub mean: Vec<f64>,
    /// Unit-norm, mutually orthogonal, ordered by decreasing variance.
    pub components: [Vec<f64>; 2],
    /// Sample variance along each component.
    pub explained_variance: [f64; 2],
    /// Per-axis minimum of the projected fitting set.
    pub axis_min: [f64; 2],
    /// Per-axis maximum of the projected fitting set.
    pub axis_max: [f64; 2],
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues and the matrix whose columns are the eigenvectors.
fn symmetric_eigen(mut a: Vec<Vec<f64>>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let d = a.len();
    let mut v: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let total: f64 = a.iter().flatten().map(|x| x * x).sum();
    let target = (f64::EPSILON * f64::EPSILON) * total;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..d)
            .flat_map(|p| (p + 1..d).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum();
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::Fit("eigendecomposition did not converge".into()));
    }
    let values = (0..d).map(|i| a[i][i]).collect();
    Ok((values, v))
}

/// Flips `v` so that its largest-magnitude entry (lowest index on ties) is positive.
fn normalize_sign(v: &mut [f64]) {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(lead) = v.iter().position(|x| x.abs() >= peak - SIGN_TOLERANCE) {
        if v[lead] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_rows(rows: &[Vec<f64>], d: usize) -> Result<()> {
    for (i, row) in rows.iter().enumerate() {
        if row.len() != d {
            return Err(Error::Validation(format!(
                "row {i} has {} columns, expected {d}",
                row.len()
            )));
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("row {i} has a non-finite entry")));
        }
    }
    Ok(())
}

/// Fits the mean-centred top-two principal components of `rows` (n x d).
///
/// Fails when the second component is not uniquely determined: the top two
/// eigenvalues tie, or (for d >= 3) the second and third do, which includes
/// every covariance of rank below two.
pub fn fit_projection(rows: &[Vec<f64>]) -> Result<Projection2D> {
    let n = rows.len();
    if n < 3 {
        return Err(Error::Fit(format!(
            "projection needs at least 3 rows, got {n}"
        )));
    }
    let d = rows[0].len();
    if d < 2 {
        return Err(Error::Fit(format!(
            "projection needs at least 2 columns, got {d}"
        )));
    }
    check_rows(rows, d)?;

    let mut mean = vec![0.0; d];
    for row in rows {
        for (m, x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let mut cov = vec![vec![0.0; d]; d];
    for row in rows {
        let centred: Vec<f64> = row.iter().zip(&mean).map(|(x, m)| x - m).collect();
        for i in 0..d {
            for j in i..d {
                cov[i][j] += centred[i] * centred[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            cov[i][j] /= (n - 1) as f64;
            cov[j][i] = cov[i][j];
        }
    }

    let (values, vectors) = symmetric_eigen(cov)?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    let lambda: Vec<f64> = order.iter().map(|&i| values[i].max(0.0)).collect();

    if lambda[0] <= 0.0 {
        return Err(Error::DegenerateProjection("all rows are identical".into()));
    }
    let tol = TIE_TOLERANCE * lambda[0];
    if lambda[0] - lambda[1] <= tol {
        return Err(Error::DegenerateProjection(format!(
            "top two eigenvalues tie ({} vs {})",
            lambda[0], lambda[1]
        )));
    }
    if d >= 3 && lambda[1] - lambda[2] <= tol {
        return Err(Error::DegenerateProjection(format!(
            "second and third eigenvalues tie ({} vs {}); covariance rank may be below 2",
            lambda[1], lambda[2]
        )));
    }

    let mut components: [Vec<f64>; 2] = [0, 1].map(|c| {
        let col = order[c];
        vectors.iter().map(|row| row[col]).collect::<Vec<f64>>()
    });
    for component in components.iter_mut() {
        let norm = dot(component, component).sqrt();
        component.iter_mut().for_each(|x| *x /= norm);
        normalize_sign(component);
    }

    let mut projection = Projection2D {
        mean,
        components,
        explained_variance: [lambda[0], lambda[1]],
        axis_min: [f64::INFINITY; 2],
        axis_max: [f64::NEG_INFINITY; 2],
    };
    for row in rows {
        let p = projection.project_raw(row);
        for axis in 0..2 {
            projection.axis_min[axis] = projection.axis_min[axis].min(p[axis]);
            projection.axis_max[axis] = projection.axis_max[axis].max(p[axis]);
        }
    }
    Ok(projection)
}

impl Projection2D {
    pub fn dimension(&self) -> usize {
        self.mean.len()
    }

    fn project_raw(&self, row: &[f64]) -> [f64; 2] {
        let centred: Vec<f64> = row.iter().zip(&self.mean).map(|(x, m)| x - m).collect();
        [
            dot(&centred, &self.components[0]),
            dot(&centred, &self.components[1]),
        ]
    }

    /// Coordinates on the two components, before scaling.
    pub fn project(&self, row: &[f64]) -> Result<[f64; 2]> {
        check_rows(std::slice::from_ref(&row.to_vec()), self.dimension())?;
        Ok(self.project_raw(row))
    }

    /// Min-max scales a projected point with the fitted ranges and clamps it
    /// into the unit square. An axis with zero fitted range maps to 0.5.
    pub fn scale(&self, projected: [f64; 2]) -> (f64, f64) {
        let axis = |i: usize| {
            let span = self.axis_max[i] - self.axis_min[i];
            if span > 0.0 {
                ((projected[i] - self.axis_min[i]) / span).clamp(0.0, 1.0)
            } else {
                0.5
            }
        };
        (axis(0), axis(1))
    }

    pub fn project_and_scale(&self, rows: &[Vec<f64>]) -> Result<Vec<(f64, f64)>> {
        check_rows(rows, self.dimension())?;
        Ok(rows
            .iter()
            .map(|row| self.scale(self.project_raw(row)))
            .collect())
    }
}
