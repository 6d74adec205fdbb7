//! Dense symmetric matrices in packed upper-triangular storage and a cyclic
//! Jacobi eigensolver.

use crate::error::{Error, Result};

/// `N x N` symmetric matrix; only the upper triangle (row-major, `i <= j`) is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    order: usize,
    packed: Vec<f64>,
}

#[inline]
fn packed_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            packed: vec![0.0; order * (order + 1) / 2],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds from a full row-major matrix; rejects asymmetric or non-finite input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Input("matrix is not square".into()));
        }
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let (a, b) = (rows[i][j], rows[j][i]);
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::Input(format!("non-finite entry at ({i}, {j})")));
                }
                let scale = 1.0 + a.abs().max(b.abs());
                if (a - b).abs() > 1e-12 * scale {
                    return Err(Error::Input(format!("matrix not symmetric at ({i}, {j})")));
                }
                m.set(i, j, 0.5 * (a + b));
            }
        }
        Ok(m)
    }

    /// Builds from packed upper-triangular entries.
    pub fn from_packed(order: usize, packed: Vec<f64>) -> Result<Self> {
        if packed.len() != order * (order + 1) / 2 {
            return Err(Error::Input(format!(
                "expected {} packed entries for order {order}, got {}",
                order * (order + 1) / 2,
                packed.len()
            )));
        }
        Ok(Self { order, packed })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn packed(&self) -> &[f64] {
        &self.packed
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[packed_index(self.order, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = packed_index(self.order, i, j);
        self.packed[k] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.packed.iter().all(|v| v.is_finite())
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.order {
            for j in 0..self.order {
                let v = self.get(i, j);
                s += v * v;
            }
        }
        s.sqrt()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            order: self.order,
            packed: self.packed.iter().map(|v| v * t).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scaled(-1.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order);
        Self {
            order: self.order,
            packed: self
                .packed
                .iter()
                .zip(&other.packed)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Symmetric rank-one matrix `v vᵀ`.
    pub fn outer(v: &[f64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, v[i] * v[j]);
            }
        }
        m
    }

    /// `Qᵀ X Q` for a square (row-major) `q`.
    pub fn congruence(&self, q: &[Vec<f64>]) -> Self {
        let n = self.order;
        let mut xq = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                xq[i][j] = (0..n).map(|k| self.get(i, k) * q[k][j]).sum();
            }
        }
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                out.set(i, j, (0..n).map(|k| q[k][i] * xq[k][j]).sum());
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.order)
            .map(|i| (0..self.order).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigen()?.values)
    }

    /// Eigen-decomposition by cyclic Jacobi rotations. Values ascend; column
    /// `k` of `vectors` pairs with `values[k]`.
    pub fn eigen(&self) -> Result<Eigen> {
        if !self.is_finite() {
            return Err(Error::Input("matrix has non-finite entries".into()));
        }
        let n = self.order;
        let mut a: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j)).collect())
            .collect();
        let mut v: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let target = 1e-14 * self.norm();

        for _sweep in 0..64 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i][j] * a[i][j])
                .sum::<f64>()
                .sqrt();
            if off <= target || off == 0.0 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p][q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                    for row in v.iter_mut() {
                        let vkp = row[p];
                        let vkq = row[q];
                        row[p] = c * vkp - s * vkq;
                        row[q] = s * vkp + c * vkq;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
        let values = order.iter().map(|&k| a[k][k]).collect();
        let vectors = (0..n)
            .map(|i| order.iter().map(|&k| v[i][k]).collect())
            .collect();
        Ok(Eigen { values, vectors })
    }
}

/// Output of [`SymMatrix::eigen`].
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Row-major orthogonal matrix whose columns are eigenvectors.
    pub vectors: Vec<Vec<f64>>,
}

impl Eigen {
    /// `Q diag(values) Qᵀ`.
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.values.len();
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let s = (0..n)
                    .map(|k| self.vectors[i][k] * self.values[k] * self.vectors[j][k])
                    .sum();
                m.set(i, j, s);
            }
        }
        m
    }
}
