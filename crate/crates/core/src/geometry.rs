//! Embedding vectors and the small amount of linear algebra the simulator
//! needs: dot products, realizing a vector set from prescribed pairwise dot
//! products, and building padding directions orthogonal to a given set.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Absolute tolerance for the symmetry check on Gram matrices.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Eigenvalues in `[-PSD_TOL, 0)` are clamped to zero; anything lower is rejected.
pub const PSD_TOL: f64 = 1e-9;
/// Gram-Schmidt candidates whose residual falls below this norm are skipped.
pub const DEPENDENCE_TOL: f64 = 1e-9;

/// One token's position in embedding space. Components are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding(Vec<f64>);

impl Embedding {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("embedding must have at least one component"));
        }
        if let Some(i) = components.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!(
                "embedding component {i} is not finite ({})",
                components[i]
            )));
        }
        Ok(Embedding(components))
    }

    /// The all-zeros vector of dimension `dim`.
    pub fn zeros(dim: usize) -> Result<Self> {
        Embedding::new(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Embedding) -> Result<f64> {
        dot(self, other)
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    /// `self - other`, elementwise.
    pub fn sub(&self, other: &Embedding) -> Result<Embedding> {
        check_dims(self, other)?;
        Ok(Embedding(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, alpha: f64, other: &Embedding) -> Result<Embedding> {
        check_dims(self, other)?;
        Embedding::new(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + alpha * b)
                .collect(),
        )
    }

    pub fn scaled(&self, alpha: f64) -> Result<Embedding> {
        Embedding::new(self.0.iter().map(|x| alpha * x).collect())
    }

    /// Embeds the vector into a higher dimension by appending zeros.
    pub fn lifted(&self, dim: usize) -> Result<Embedding> {
        if dim < self.dim() {
            return Err(Error::invalid(format!(
                "cannot lift a {}-dimensional embedding to {dim} dimensions",
                self.dim()
            )));
        }
        let mut v = self.0.clone();
        v.resize(dim, 0.0);
        Ok(Embedding(v))
    }
}

impl TryFrom<Vec<f64>> for Embedding {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Embedding::new(v)
    }
}

fn check_dims(u: &Embedding, v: &Embedding) -> Result<()> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    Ok(())
}

/// Euclidean inner product `sum_k u_k v_k`.
pub fn dot(u: &Embedding, v: &Embedding) -> Result<f64> {
    check_dims(u, v)?;
    Ok(u.0.iter().zip(&v.0).map(|(a, b)| a * b).sum())
}

/// A symmetric positive-semidefinite matrix of target dot products.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl GramMatrix {
    /// Validates shape, finiteness and symmetry. Positive semidefiniteness is
    /// checked when the matrix is realized.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::invalid("gram matrix must be non-empty"));
        }
        let mut entries = Vec::with_capacity(size * size);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != size {
                return Err(Error::invalid(format!(
                    "gram matrix row {i} has {} entries, expected {size}",
                    row.len()
                )));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(format!("gram matrix row {i} has a non-finite entry")));
            }
            entries.extend(row);
        }
        for i in 0..size {
            for j in (i + 1)..size {
                let (a, b) = (entries[i * size + j], entries[j * size + i]);
                if (a - b).abs() > SYMMETRY_TOL {
                    return Err(Error::invalid(format!(
                        "gram matrix is not symmetric at ({i},{j}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(GramMatrix { size, entries })
    }

    /// Pairwise dot products of `vectors`.
    pub fn of(vectors: &[Embedding]) -> Result<Self> {
        let mut rows = Vec::with_capacity(vectors.len());
        for u in vectors {
            rows.push(vectors.iter().map(|v| dot(u, v)).collect::<Result<Vec<_>>>()?);
        }
        GramMatrix::new(rows)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    /// Sets entry `(i, j)` and its mirror `(j, i)`.
    pub fn set_symmetric(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.size + j] = value;
        self.entries[j * self.size + i] = value;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.size).map(<[f64]>::to_vec).collect()
    }
}

/// Builds `k` vectors in `k` dimensions whose pairwise dot products
/// reproduce `gram`.
///
/// Uses the symmetric eigendecomposition `G = V diag(l) V^T` and returns the
/// rows of `V diag(sqrt(l))`. Eigenpairs are ordered by descending eigenvalue
/// and each eigenvector is signed so its first nonzero component is positive,
/// which makes the output reproducible.
pub fn vectors_from_gram(gram: &GramMatrix) -> Result<Vec<Embedding>> {
    let k = gram.size;
    let sym = DMatrix::from_fn(k, k, |i, j| 0.5 * (gram.get(i, j) + gram.get(j, i)));
    let eig = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(k);
    for &c in &order {
        let lambda = eig.eigenvalues[c];
        if lambda < -PSD_TOL {
            return Err(Error::NotRealizable { eigenvalue: lambda });
        }
        let scale = lambda.max(0.0).sqrt();
        let mut col: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
        let sign = col
            .iter()
            .find(|x| x.abs() > 1e-12)
            .map_or(1.0, |x| x.signum());
        for x in &mut col {
            *x *= sign * scale;
        }
        columns.push(col);
    }

    (0..k)
        .map(|i| Embedding::new(columns.iter().map(|col| col[i]).collect()))
        .collect()
}

/// Returns `count` mutually orthogonal vectors of length `norm`, each
/// orthogonal to every vector in `existing`.
///
/// Gram-Schmidt over the canonical basis `e_1, e_2, ...`, skipping
/// candidates whose residual is below [`DEPENDENCE_TOL`].
pub fn orthogonal_pad(existing: &[Embedding], count: usize, norm: f64) -> Result<Vec<Embedding>> {
    let dim = existing
        .first()
        .map(Embedding::dim)
        .ok_or_else(|| Error::invalid("orthogonal_pad needs at least one existing embedding"))?;
    if count == 0 {
        return Err(Error::invalid("pad count must be at least 1"));
    }
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::invalid(format!("pad norm must be positive and finite, got {norm}")));
    }

    // orthonormal basis of span(existing)
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for e in existing {
        check_dims(&existing[0], e)?;
        if let Some(u) = residual_direction(e.as_slice(), &basis) {
            basis.push(u);
        }
    }
    let available = dim - basis.len();
    if available < count {
        return Err(Error::Capacity {
            requested: count,
            available,
        });
    }

    let mut pads = Vec::with_capacity(count);
    for axis in 0..dim {
        if pads.len() == count {
            break;
        }
        let mut candidate = vec![0.0; dim];
        candidate[axis] = 1.0;
        if let Some(u) = residual_direction(&candidate, &basis) {
            pads.push(Embedding::new(u.iter().map(|x| x * norm).collect())?);
            basis.push(u);
        }
    }
    if pads.len() < count {
        return Err(Error::Capacity {
            requested: count,
            available: pads.len(),
        });
    }
    Ok(pads)
}

/// Unit vector along the part of `v` orthogonal to the orthonormal `basis`,
/// or `None` if that part is negligible. Orthogonalizes twice for accuracy.
fn residual_direction(v: &[f64], basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    let mut r = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let proj: f64 = r.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in r.iter_mut().zip(b) {
                *x -= proj * y;
            }
        }
    }
    let len = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    if len < DEPENDENCE_TOL {
        return None;
    }
    Some(r.into_iter().map(|x| x / len).collect())
}
