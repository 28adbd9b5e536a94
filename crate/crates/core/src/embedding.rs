//! PCA projection followed by the signed-square-root (Hellinger) map and L2
//! normalization.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::descriptor::PageDescriptor;
use crate::error::{Error, Result};

/// Default number of principal components kept.
pub const DEFAULT_COMPONENTS: usize = 200;

/// Eigenvalues at or below this fraction of the largest are treated as null
/// directions and not kept as components.
const NULL_VARIANCE_RATIO: f64 = 1e-9;

impl AsRef<[f64]> for PageDescriptor {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Which eigenproblem [`fit_pca_with`] solves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PcaSolver {
    /// Gram matrix when there are fewer samples than dimensions, covariance
    /// otherwise.
    #[default]
    Auto,
    /// Eigen-decomposition of the `D x D` covariance matrix.
    Covariance,
    /// Eigen-decomposition of the `n x n` Gram matrix of centered samples,
    /// mapped back to feature space.
    Gram,
}

/// Mean vector and orthonormal principal axes, largest variance first.
#[derive(Clone, Debug, PartialEq)]
pub struct PcaModel {
    input_dim: usize,
    mean: Vec<f64>,
    /// Row-major `n_components x input_dim`.
    components: Vec<f64>,
    explained_variance: Vec<f64>,
}

impl PcaModel {
    /// Reassembles a model, e.g. one read back from disk. Rows must be
    /// orthonormal within 1e-6.
    pub fn from_parts(
        mean: Vec<f64>,
        components: Vec<f64>,
        explained_variance: Vec<f64>,
    ) -> Result<Self> {
        let d = mean.len();
        if d == 0 {
            return Err(Error::invalid("PCA model with zero input dimension"));
        }
        if components.len() != explained_variance.len() * d {
            return Err(Error::invalid(format!(
                "component matrix of {} values does not match {} components x {d} dims",
                components.len(),
                explained_variance.len()
            )));
        }
        let model = Self {
            input_dim: d,
            mean,
            components,
            explained_variance,
        };
        let err = model.orthonormality_error();
        if err > 1e-6 {
            return Err(Error::invalid(format!(
                "component rows are not orthonormal (max deviation {err:.3e})"
            )));
        }
        Ok(model)
    }

    #[inline]
    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    #[inline]
    pub fn n_components(&self) -> usize {
        self.explained_variance.len()
    }

    #[inline]
    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Row-major component matrix.
    #[inline]
    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.components[i * self.input_dim..(i + 1) * self.input_dim]
    }

    /// Variance of the training data along each component.
    #[inline]
    pub fn explained_variance(&self) -> &[f64] {
        &self.explained_variance
    }

    /// Copy of the model restricted to its first `n` components.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.n_components());
        Self {
            input_dim: self.input_dim,
            mean: self.mean.clone(),
            components: self.components[..n * self.input_dim].to_vec(),
            explained_variance: self.explained_variance[..n].to_vec(),
        }
    }

    /// Largest deviation of `C C^T` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.n_components();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let dot: f64 = self
                    .component(i)
                    .iter()
                    .zip(self.component(j))
                    .map(|(a, b)| a * b)
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Maps projection coefficients back to descriptor space.
    pub fn reconstruct(&self, coefficients: &[f64]) -> Vec<f64> {
        let mut out = self.mean.clone();
        for (i, &c) in coefficients.iter().enumerate().take(self.n_components()) {
            for (o, &v) in out.iter_mut().zip(self.component(i)) {
                *o += c * v;
            }
        }
        out
    }
}

/// Fits PCA with the default solver choice.
pub fn fit_pca<R: AsRef<[f64]> + Sync>(samples: &[R], n_components: usize) -> Result<PcaModel> {
    fit_pca_with(samples, n_components, PcaSolver::Auto)
}

/// Fits PCA on `samples` (one row each).
///
/// Keeps `min(n_components, dim, samples - 1)` components, minus any null
/// directions. Each component is flipped so that its largest-magnitude entry
/// is positive. The result depends only on the input values and their order.
pub fn fit_pca_with<R: AsRef<[f64]> + Sync>(
    samples: &[R],
    n_components: usize,
    solver: PcaSolver,
) -> Result<PcaModel> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::invalid(format!(
            "PCA needs at least 2 samples, got {n}"
        )));
    }
    let d = samples[0].as_ref().len();
    if d == 0 {
        return Err(Error::invalid("PCA samples have zero dimension"));
    }
    if let Some((i, s)) = samples.iter().enumerate().find(|(_, s)| s.as_ref().len() != d) {
        return Err(Error::invalid(format!(
            "sample {i} has dimension {}, expected {d}",
            s.as_ref().len()
        )));
    }

    let mut mean = vec![0.0; d];
    for s in samples {
        for (m, &v) in mean.iter_mut().zip(s.as_ref()) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let centered = DMatrix::from_fn(n, d, |i, j| samples[i].as_ref()[j] - mean[j]);

    let keep = n_components.min(d).min(n - 1);
    let use_gram = match solver {
        PcaSolver::Auto => n < d,
        PcaSolver::Covariance => false,
        PcaSolver::Gram => true,
    };
    let denom = (n - 1) as f64;

    let (variances, mut rows): (Vec<f64>, Vec<Vec<f64>>) = if use_gram {
        let gram = gram_matrix(&centered) / denom;
        let (values, vectors) = sorted_eigen(gram)?;
        let kept = kept_count(&values, keep);
        let rows = (0..kept)
            .map(|k| {
                let u = vectors.column(k);
                let mut row: Vec<f64> = (0..d)
                    .map(|j| (0..n).map(|i| centered[(i, j)] * u[i]).sum())
                    .collect();
                let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
                row.iter_mut().for_each(|v| *v /= norm);
                row
            })
            .collect();
        (values[..kept].to_vec(), rows)
    } else {
        let cov = centered.tr_mul(&centered) / denom;
        let (values, vectors) = sorted_eigen(cov)?;
        let kept = kept_count(&values, keep);
        let rows = (0..kept)
            .map(|k| vectors.column(k).iter().copied().collect())
            .collect();
        (values[..kept].to_vec(), rows)
    };

    for row in &mut rows {
        orient(row);
    }
    Ok(PcaModel {
        input_dim: d,
        mean,
        components: rows.concat(),
        explained_variance: variances,
    })
}

/// `X X^T` with each entry summed in a fixed order.
fn gram_matrix(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| x.row(i).iter().copied().collect()).collect();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        upper[a][b - a]
    })
}

/// Eigenpairs of a symmetric matrix, eigenvalues descending. Eigenvectors are
/// the columns of the returned matrix in the same order.
fn sorted_eigen(m: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let dim = m.nrows();
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("symmetric eigen-decomposition did not converge".into()))?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(dim, dim, |i, k| eig.eigenvectors[(i, order[k])]);
    Ok((values, vectors))
}

fn kept_count(values: &[f64], keep: usize) -> usize {
    let largest = values.first().copied().unwrap_or(0.0);
    if largest <= 0.0 {
        return 0;
    }
    values
        .iter()
        .take(keep)
        .take_while(|&&v| v > largest * NULL_VARIANCE_RATIO)
        .count()
}

/// Flips `row` so that its largest-magnitude entry (first on ties) is
/// positive.
fn orient(row: &mut [f64]) {
    let mut pivot = 0;
    for (i, v) in row.iter().enumerate() {
        if v.abs() > row[pivot].abs() {
            pivot = i;
        }
    }
    if row[pivot] < 0.0 {
        row.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Coordinates of `sample` along each component of `model`.
pub fn project(model: &PcaModel, sample: &[f64]) -> Result<Vec<f64>> {
    if sample.len() != model.input_dim {
        return Err(Error::invalid(format!(
            "descriptor has dimension {}, PCA model expects {}",
            sample.len(),
            model.input_dim
        )));
    }
    let centered: Vec<f64> = sample.iter().zip(&model.mean).map(|(v, m)| v - m).collect();
    Ok((0..model.n_components())
        .map(|i| {
            model
                .component(i)
                .iter()
                .zip(&centered)
                .map(|(c, v)| c * v)
                .sum()
        })
        .collect())
}

/// Final descriptor of one sample: unit length, or all zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddedVector {
    pub sample_id: String,
    pub values: Vec<f64>,
}

/// Signed square root of every entry, then L2 normalization. The zero vector
/// maps to itself.
pub fn hellinger_l2(v: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = v.iter().map(|&x| x.signum() * x.abs().sqrt()).collect();
    for o in &mut out {
        if *o == 0.0 {
            *o = 0.0; // fold -0.0
        }
    }
    let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        out.iter_mut().for_each(|x| *x /= norm);
    }
    out
}

/// Projection followed by [`hellinger_l2`].
pub fn embed(model: &PcaModel, sample_id: &str, sample: &[f64]) -> Result<EmbeddedVector> {
    Ok(EmbeddedVector {
        sample_id: sample_id.to_string(),
        values: hellinger_l2(&project(model, sample)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn axis_points() -> Vec<Vec<f64>> {
        vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![3.0, 0.0], vec![-3.0, 0.0]]
    }

    #[test]
    fn single_axis_variance() {
        let model = fit_pca(&axis_points(), 1).unwrap();
        assert_eq!(model.n_components(), 1);
        assert_eq!(model.mean(), &[0.0, 0.0]);
        assert_abs_diff_eq!(model.component(0)[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(model.component(0)[1], 0.0, epsilon = 1e-12);
        let p = project(&model, &[3.0, 0.0]).unwrap();
        assert_abs_diff_eq!(p[0], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn null_directions_are_dropped() {
        let model = fit_pca(&axis_points(), 2).unwrap();
        assert_eq!(model.n_components(), 1);
    }

    #[test]
    fn projecting_the_mean_gives_zero() {
        let data: Vec<Vec<f64>> = (0..6)
            .map(|i| (0..4).map(|j| ((i * 7 + j * 3) % 5) as f64).collect())
            .collect();
        let model = fit_pca(&data, 3).unwrap();
        let p = project(&model, model.mean()).unwrap();
        assert!(p.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn input_validation() {
        assert!(fit_pca(&[vec![1.0, 2.0]], 1).is_err());
        assert!(fit_pca(&[vec![1.0, 2.0], vec![1.0]], 1).is_err());
        let model = fit_pca(&axis_points(), 1).unwrap();
        assert!(project(&model, &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn component_count_capped_by_samples() {
        let data: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..10).map(|j| ((i * 13 + j * 5) % 7) as f64 + (i * j) as f64).collect())
            .collect();
        let model = fit_pca(&data, 200).unwrap();
        assert!(model.n_components() <= 3);
    }

    #[test]
    fn hellinger_examples() {
        assert_eq!(hellinger_l2(&[4.0, 0.0, 0.0]), vec![1.0, 0.0, 0.0]);
        let v = hellinger_l2(&[-4.0, 4.0]);
        assert_abs_diff_eq!(v[0], -std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1], std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_eq!(hellinger_l2(&[0.0, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn sign_convention_makes_largest_entry_positive() {
        let mut row = vec![0.1, -0.9, 0.3];
        orient(&mut row);
        assert_eq!(row, vec![-0.1, 0.9, -0.3]);
    }

    #[test]
    fn from_parts_rejects_non_orthonormal_rows() {
        assert!(PcaModel::from_parts(vec![0.0, 0.0], vec![1.0, 1.0], vec![1.0]).is_err());
        assert!(PcaModel::from_parts(vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0]).is_ok());
        assert!(PcaModel::from_parts(vec![0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0]).is_err());
    }
}
