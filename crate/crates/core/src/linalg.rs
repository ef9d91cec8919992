//! Dense matrix support sized for panels of a few hundred assets.
//!
//! Row-major storage, naive but cache-aware products, Householder QR for
//! sampling Haar orthogonal matrices, and a cyclic Jacobi eigensolver for
//! symmetric matrices. Jacobi is slower than tridiagonalization but its
//! rotations keep symmetric matrices exactly symmetric and its convergence
//! check is a direct bound on the off-diagonal mass, which is the guarantee
//! the estimators need.

use crate::error::Error;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length mismatch");
        Mat { rows, cols, data }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] += v;
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.at(i, j));
            }
        }
        t
    }

    /// self * rhs.
    pub fn matmul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.at(i, k);
                if aik == 0.0 {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = out.row_mut(i);
                for j in 0..rhs.cols {
                    orow[j] += aik * rrow[j];
                }
            }
        }
        out
    }

    /// self * rhs^T, contracting over matching column counts.
    pub fn matmul_transb(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.cols, "column counts must agree");
        let mut out = Mat::zeros(self.rows, rhs.rows);
        for i in 0..self.rows {
            let arow = self.row(i);
            for j in 0..rhs.rows {
                let brow = rhs.row(j);
                let mut acc = 0.0;
                for k in 0..self.cols {
                    acc += arow[k] * brow[k];
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Mat {
        let mut m = self.clone();
        for v in &mut m.data {
            *v *= c;
        }
        m
    }

    pub fn trace(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.at(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest |A_ij - A_ji|.
    pub fn max_asymmetry(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.at(i, j) - self.at(j, i)).abs());
            }
        }
        worst
    }

    pub fn symmetrized(&self) -> Mat {
        assert_eq!(self.rows, self.cols);
        let mut s = Mat::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                s.set(i, j, 0.5 * (self.at(i, j) + self.at(j, i)));
            }
        }
        s
    }

    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.at(i, j).is_finite() {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// Draw a Haar-distributed orthogonal matrix: QR of an iid standard normal
/// matrix with the R diagonal forced positive so the factorization is unique.
pub fn haar_orthogonal(p: usize, rng: &mut ChaCha8Rng) -> Mat {
    assert!(p >= 1);
    let mut a = Mat::from_fn(p, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut q = Mat::identity(p);

    // Householder sweep; reflectors are applied to q on the right as they are
    // produced, so q ends as the orthogonal factor.
    let mut v = vec![0.0; p];
    for col in 0..p {
        let mut norm2 = 0.0;
        for i in col..p {
            let x = a.at(i, col);
            v[i] = x;
            norm2 += x * x;
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if v[col] >= 0.0 { -norm } else { norm };
        v[col] -= alpha;
        let vnorm2: f64 = (col..p).map(|i| v[i] * v[i]).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;

        for j in col..p {
            let mut dot = 0.0;
            for i in col..p {
                dot += v[i] * a.at(i, j);
            }
            let scale = beta * dot;
            for i in col..p {
                a.add_at(i, j, -scale * v[i]);
            }
        }
        for i in 0..p {
            let mut dot = 0.0;
            for k in col..p {
                dot += q.at(i, k) * v[k];
            }
            let scale = beta * dot;
            for k in col..p {
                q.add_at(i, k, -scale * v[k]);
            }
        }
    }

    for j in 0..p {
        if a.at(j, j) < 0.0 {
            for i in 0..p {
                let x = q.at(i, j);
                q.set(i, j, -x);
            }
        }
    }
    q
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
///
/// Terminates when the off-diagonal Frobenius norm falls below
/// `rel_tol * ||A||_F` (of the input). The input must already be symmetric;
/// callers that tolerate roundoff asymmetry should symmetrize first.
pub fn jacobi_eigenvalues(mat: &Mat, rel_tol: f64) -> Result<Vec<f64>, Error> {
    assert_eq!(mat.nrows(), mat.ncols());
    let n = mat.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if let Some((i, j)) = mat.first_non_finite() {
        return Err(Error::NonFiniteEntry { row: i, col: j });
    }
    let mut a = mat.clone();
    let fro = a.frobenius_norm();
    if fro == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = rel_tol * fro;

    let off_norm = |a: &Mat| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let v = a.at(i, j);
                    s += v * v;
                }
            }
        }
        s.sqrt()
    };

    let max_sweeps = 100;
    for _ in 0..max_sweeps {
        if off_norm(&a) <= target {
            let mut eig: Vec<f64> = (0..n).map(|i| a.at(i, i)).collect();
            eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
            return Ok(eig);
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a.at(p, q);
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a.at(p, p);
                let aqq = a.at(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a.at(r, p);
                    let arq = a.at(r, q);
                    let new_rp = c * arp - s * arq;
                    let new_rq = s * arp + c * arq;
                    a.set(r, p, new_rp);
                    a.set(p, r, new_rp);
                    a.set(r, q, new_rq);
                    a.set(q, r, new_rq);
                }
                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: max_sweeps,
        residual: off_norm(&a) / fro,
    })
}
