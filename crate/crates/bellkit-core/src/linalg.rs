//! Small dense complex matrices and a cyclic Jacobi eigensolver for
//! Hermitian input.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Off-diagonal Frobenius norm (relative to `max(1, ‖A‖_F)`) at which the
/// Jacobi iteration stops.
pub const JACOBI_TOLERANCE: f64 = 1e-13;
/// Maximum number of full sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Row-major square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> CMatrix {
        CMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> CMatrix {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries. `data.len()` must be a square.
    pub fn from_rows(dim: usize, data: Vec<Complex64>) -> Result<CMatrix> {
        if data.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(CMatrix { dim, data })
    }

    pub fn from_real_rows(dim: usize, data: &[f64]) -> Result<CMatrix> {
        Self::from_rows(dim, data.iter().map(|x| Complex64::new(*x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// `self += scale · other`.
    pub fn add_scaled(&mut self, other: &CMatrix, scale: f64) {
        debug_assert_eq!(self.dim, other.dim);
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += y * scale;
        }
    }

    pub fn scaled(&self, scale: f64) -> CMatrix {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|x| x * scale).collect(),
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn adjoint(&self) -> CMatrix {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// `‖M − M†‖_max`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    fn frobenius(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x.norm_sqr()).sum())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: CMatrix,
    pub sweeps: usize,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.dim())
            .map(|i| self.vectors[(i, k)])
            .collect()
    }
}

/// Cyclic Jacobi on a Hermitian matrix. The upper triangle is trusted; the
/// caller is responsible for Hermiticity.
pub fn jacobi_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    let n = m.dim();
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);
    let sweeps = jacobi_sweeps(&mut a, Some(&mut v))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok(HermitianEigen {
        values,
        vectors,
        sweeps,
    })
}

/// Eigenvalues only, ascending.
pub fn jacobi_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    let mut a = m.clone();
    jacobi_sweeps(&mut a, None)?;
    let mut values: Vec<f64> = (0..a.dim()).map(|i| a[(i, i)].re).collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn jacobi_sweeps(a: &mut CMatrix, mut v: Option<&mut CMatrix>) -> Result<usize> {
    let n = a.dim();
    let scale = a.frobenius().max(1.0);
    let threshold = JACOBI_TOLERANCE * scale;
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }
    for sweep in 0..=JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[(i, j)].norm_sqr();
                }
            }
        }
        if libm::sqrt(off) < threshold {
            return Ok(sweep);
        }
        if sweep == JACOBI_MAX_SWEEPS {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(a, v.as_deref_mut(), p, q);
            }
        }
    }
    Err(Error::Numerical(format!(
        "Jacobi did not converge within {JACOBI_MAX_SWEEPS} sweeps"
    )))
}

/// Annihilates `a[p][q]` with `A ← U†AU`, where `U = diag(1, w̄)·R(θ)` on the
/// `(p, q)` plane and `w` is the phase of `a[p][q]`.
fn rotate(a: &mut CMatrix, v: Option<&mut CMatrix>, p: usize, q: usize) {
    let n = a.dim();
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let w = apq / mag;
    let wc = w.conj();
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0))
    };
    let c = 1.0 / libm::sqrt(t * t + 1.0);
    let s = t * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * wc * s;
        a[(k, q)] = akp * s + akq * wc * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * w * s;
        a[(q, k)] = apk * s + aqk * w * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = vkp * c - vkq * wc * s;
            v[(k, q)] = vkp * s + vkq * wc * c;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_y_spectrum() {
        let y = CMatrix::from_rows(2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap();
        let e = jacobi_eigen(&y).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let v = e.vector(1);
        let hv = y.mul_vec(&v);
        for (x, y) in hv.iter().zip(&v) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn diagonal_input_needs_no_sweep() {
        let d = CMatrix::from_real_rows(3, &[3., 0., 0., 0., -1., 0., 0., 0., 2.]).unwrap();
        let e = jacobi_eigen(&d).unwrap();
        assert_eq!(e.sweeps, 0);
        assert_eq!(e.values, vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn kron_dimensions_and_entries() {
        let x = CMatrix::from_real_rows(2, &[0., 1., 1., 0.]).unwrap();
        let z = CMatrix::from_real_rows(2, &[1., 0., 0., -1.]).unwrap();
        let xz = x.kron(&z);
        assert_eq!(xz.dim(), 4);
        assert_eq!(xz[(0, 2)], c(1., 0.));
        assert_eq!(xz[(1, 3)], c(-1., 0.));
        assert_eq!(xz[(0, 0)], c(0., 0.));
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(CMatrix::from_real_rows(2, &[1., 2., 3.]).is_err());
    }
}
