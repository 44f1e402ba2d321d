//! Dense symmetric matrices and a cyclic Jacobi eigensolver.
//!
//! Rotations are skipped once `|a_pq| <= eps * sqrt(|a_pp a_qq|)`, the
//! relative criterion that lets Jacobi resolve the small eigenvalues of
//! graded matrices such as `D^{1/2} K D^{1/2}` well below `eps * ||A||`.

use crate::error::{Error, Result};

/// Sweep budget before [`jacobi_eigen`] gives up.
pub const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Builds the matrix from its upper triangle; `f(i, j)` is called once
    /// per pair `i <= j` and mirrored.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self.get(i, j).powi(2);
                }
            }
        }
        s.sqrt()
    }
}

/// Unsorted eigenpairs; `eigenvectors[i]` belongs to `eigenvalues[i]` and has
/// unit Euclidean norm.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub sweeps: usize,
    /// Off-diagonal Frobenius norm left in the rotated matrix.
    pub off_diagonal: f64,
}

pub fn jacobi_eigen(matrix: &SymMatrix) -> Result<SymmetricEigen> {
    jacobi_eigen_with_budget(matrix, MAX_SWEEPS)
}

pub fn jacobi_eigen_with_budget(matrix: &SymMatrix, max_sweeps: usize) -> Result<SymmetricEigen> {
    let n = matrix.n();
    let mut a = matrix.clone();
    // Columns of v are the eigenvectors; stored row-major as v[r][c].
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let eps = f64::EPSILON;
    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                if apq == 0.0 || apq.abs() <= eps * (app * aqq).abs().sqrt() {
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a.get(r, p);
                    let arq = a.get(r, q);
                    a.set(r, p, c * arp - s * arq);
                    a.set(r, q, s * arp + c * arq);
                }
                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
        sweeps += 1;
        if sweeps >= max_sweeps {
            return Err(Error::SolverNoConvergence { sweeps });
        }
    }
    let eigenvalues = (0..n).map(|i| a.get(i, i)).collect();
    let eigenvectors = (0..n)
        .map(|c| v.iter().map(|row| row[c]).collect())
        .collect();
    Ok(SymmetricEigen {
        eigenvalues,
        eigenvectors,
        sweeps,
        off_diagonal: a.off_diagonal_norm(),
    })
}
