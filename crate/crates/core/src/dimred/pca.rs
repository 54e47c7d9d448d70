use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{DimredError, EmbeddingMatrix};

const EIGEN_TOLERANCE: f64 = 1e-10;

/// Result of [`pca`].
#[derive(Debug, Clone, PartialEq)]
pub struct Pca {
    /// Row-major N×k scores of the centered data.
    pub coords: Vec<f64>,
    /// Eigenvalues of the sample covariance, descending.
    pub explained_variance: Vec<f64>,
    /// k unit-length component directions, each of length D.
    pub components: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub k: usize,
}

impl Pca {
    pub fn score(&self, i: usize, c: usize) -> f64 {
        self.coords[i * self.k + c]
    }

    /// First two score columns as `(x, y)` pairs.
    pub fn xy(&self) -> Vec<[f64; 2]> {
        self.coords.chunks_exact(self.k).map(|r| [r[0], r[1]]).collect()
    }
}

/// Exact PCA on the sample covariance (divisor N-1).
///
/// With D ≤ N the D×D covariance is eigendecomposed directly; otherwise the
/// N×N Gram matrix of the centered rows is used and its eigenvectors mapped
/// back to feature space. Each component is signed so that its entry of
/// largest magnitude is positive.
pub fn pca(x: &EmbeddingMatrix, k: usize) -> Result<Pca, DimredError> {
    let (n, d) = (x.rows(), x.cols());
    if k < 2 || k > n.min(d) {
        return Err(DimredError::Input(format!(
            "k = {k} must lie in [2, min(N, D)] = [2, {}]",
            n.min(d)
        )));
    }
    if x.is_constant() {
        return Err(DimredError::ZeroVariance);
    }

    let mean: Vec<f64> = (0..d)
        .map(|j| (0..n).map(|i| x.get(i, j)).sum::<f64>() / n as f64)
        .collect();
    let centered = DMatrix::from_fn(n, d, |i, j| x.get(i, j) - mean[j]);
    let dof = (n - 1) as f64;

    let (values, vectors) = if d <= n {
        let cov = centered.transpose() * &centered / dof;
        let (values, vectors) = sorted_eigen(cov)?;
        (values, (0..k).map(|c| vectors.column(c).into_owned()).collect::<Vec<_>>())
    } else {
        let gram = &centered * centered.transpose() / dof;
        let (values, u) = sorted_eigen(gram)?;
        let mut vectors: Vec<DVector<f64>> = Vec::with_capacity(k);
        for c in 0..k {
            let v = centered.transpose() * u.column(c);
            let norm = v.norm();
            if values[c] > 0.0 && norm > 0.0 {
                vectors.push(v / norm);
            } else {
                vectors.push(orthogonal_completion(&vectors, d));
            }
        }
        (values, vectors)
    };

    let components: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| {
            let mut v: Vec<f64> = v.iter().copied().collect();
            fix_sign(&mut v);
            v
        })
        .collect();

    let mut coords = vec![0.0; n * k];
    for i in 0..n {
        let row = centered.row(i);
        for (c, comp) in components.iter().enumerate() {
            coords[i * k + c] = row.iter().zip(comp).map(|(a, b)| a * b).sum();
        }
    }

    Ok(Pca {
        coords,
        explained_variance: values[..k].iter().map(|&v| v.max(0.0)).collect(),
        components,
        mean,
        k,
    })
}

/// Eigenpairs sorted by eigenvalue, descending. Ties keep solver order.
fn sorted_eigen(m: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>), DimredError> {
    let eig = SymmetricEigen::try_new(m, EIGEN_TOLERANCE, 0).ok_or(DimredError::NoConvergence)?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    Ok((values, vectors))
}

/// Unit vector orthogonal to `basis`, found by Gram–Schmidt over the
/// standard basis in index order.
fn orthogonal_completion(basis: &[DVector<f64>], d: usize) -> DVector<f64> {
    for e in 0..d {
        let mut v = DVector::from_fn(d, |i, _| if i == e { 1.0 } else { 0.0 });
        for b in basis {
            v -= b * b.dot(&v);
        }
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
    unreachable!("k <= D leaves room for another basis vector")
}

fn fix_sign(v: &mut [f64]) {
    let pivot = v
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |best, (i, &x)| if x.abs() > best.1 { (i, x.abs()) } else { best })
        .0;
    if v[pivot] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}
