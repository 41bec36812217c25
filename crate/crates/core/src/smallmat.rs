//! Dense complex linear algebra for small matrices.
//!
//! The functional algebra only ever needs r×r solves where r is the total
//! low-rank count of a star product (a handful), plus dense materialization
//! on few-node verification grids. Hand-rolled LU and Jacobi keep the crate
//! dependency-free.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major square complex matrix.
#[derive(Debug, Clone)]
pub struct CMat {
    pub n: usize,
    pub a: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat {
            n,
            a: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        CMat {
            n: self.n,
            a: self
                .a
                .iter()
                .zip(&other.a)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        self.a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.a[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.a[i * self.n + j]
    }
}

/// LU factorization with partial pivoting.
pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    piv: Vec<usize>,
    det: Complex64,
}

impl Lu {
    pub fn factor(m: &CMat) -> Result<Lu> {
        let n = m.n;
        let mut lu = m.a.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let mut p = col;
            let mut best = lu[col * n + col].norm();
            for r in col + 1..n {
                let mag = lu[r * n + col].norm();
                if mag > best {
                    best = mag;
                    p = r;
                }
            }
            if best == 0.0 {
                return Err(Error::IllPosedStar { margin: 0.0 });
            }
            if p != col {
                for j in 0..n {
                    lu.swap(col * n + j, p * n + j);
                }
                piv.swap(col, p);
                det = -det;
            }
            let pivot = lu[col * n + col];
            det *= pivot;
            for r in col + 1..n {
                let f = lu[r * n + col] / pivot;
                lu[r * n + col] = f;
                for j in col + 1..n {
                    let sub = f * lu[col * n + j];
                    lu[r * n + j] -= sub;
                }
            }
        }
        Ok(Lu { n, lu, piv, det })
    }

    pub fn det(&self) -> Complex64 {
        self.det
    }

    /// Solves A x = b.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let sub = self.lu[i * n + j] * x[j];
                x[i] -= sub;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let sub = self.lu[i * n + j] * x[j];
                x[i] -= sub;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }

    /// Solves A† x = b using the factorization of A.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        // P A = L U  ⇒  A† = U† L† P, so solve U† z = b, L† w = z, x = P† w
        let n = self.n;
        let mut z = b.to_vec();
        for i in 0..n {
            for j in 0..i {
                let sub = self.lu[j * n + i].conj() * z[j];
                z[i] -= sub;
            }
            z[i] /= self.lu[i * n + i].conj();
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let sub = self.lu[j * n + i].conj() * z[j];
                z[i] -= sub;
            }
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (i, &p) in self.piv.iter().enumerate() {
            x[p] = z[i];
        }
        x
    }
}

/// Eigenvalues and eigenvectors of a Hermitian matrix by cyclic Jacobi.
///
/// Returns eigenvalues ascending with matching eigenvector columns.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.n;
    let mut a = m.clone();
    let mut v = CMat::identity(n);
    let scale = 1.0 + frob(&a);
    for _sweep in 0..100 {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() < 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag < 1e-300 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // phase factor e^{iφ} of the pivot and the real rotation angle
                let phase = apq / mag;
                let theta = 0.5 * (2.0 * mag).atan2(app - aqq);
                let (s, c) = theta.sin_cos();
                // unitary U: U[p][p] = c, U[p][q] = −s, U[q][p] = s·e^{−iφ},
                // U[q][q] = c·e^{−iφ}; A ← U†AU annihilates a_pq
                let epm = phase.conj(); // e^{−iφ}
                // rows: A ← U†A
                for j in 0..n {
                    let ap = a[(p, j)];
                    let aq = a[(q, j)];
                    a[(p, j)] = c * ap + s * phase * aq;
                    a[(q, j)] = -s * ap + c * phase * aq;
                }
                // columns: A ← A·U
                for r in 0..n {
                    let ap = a[(r, p)];
                    let aq = a[(r, q)];
                    a[(r, p)] = c * ap + s * epm * aq;
                    a[(r, q)] = -s * ap + c * epm * aq;
                }
                for r in 0..n {
                    let vp = v[(r, p)];
                    let vq = v[(r, q)];
                    v[(r, p)] = c * vp + s * epm * vq;
                    v[(r, q)] = -s * vp + c * epm * vq;
                }
            }
        }
    }
    let vals_raw: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&x, &y| vals_raw[x].partial_cmp(&vals_raw[y]).unwrap());
    let vals: Vec<f64> = idx.iter().map(|&i| vals_raw[i]).collect();
    let mut vv = CMat::zeros(n);
    for (new_col, &old_col) in idx.iter().enumerate() {
        for r in 0..n {
            vv[(r, new_col)] = v[(r, old_col)];
        }
    }
    (vals, vv)
}

fn frob(m: &CMat) -> f64 {
    m.a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
