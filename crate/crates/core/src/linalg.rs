//! Small dense complex linear algebra used throughout the crate.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// `‖M − M†‖_F`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// Eigenvalues (ascending) and matching eigenvectors of the Hermitian part of `m`.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let n = m.nrows();
    let mut vecs = CMatrix::zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for (col, &i) in order.iter().enumerate() {
        vals.push(eig.eigenvalues[i]);
        vecs.set_column(col, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    eigh(m).0[0]
}

/// Applies `f` to the spectrum of the Hermitian matrix `m`.
pub fn spectral_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = eigh(m);
    let diag = DVector::from_iterator(vals.len(), vals.iter().map(|&v| c(f(v), 0.0)));
    &vecs * CMatrix::from_diagonal(&diag) * vecs.adjoint()
}

/// Rank-1 projector `|ψ⟩⟨ψ|`.
pub fn projector(psi: &DVector<C64>) -> CMatrix {
    psi * psi.adjoint()
}

/// Unnormalized maximally entangled vector `Σ_k |kk⟩`.
pub fn phi_plus(dim: usize) -> DVector<C64> {
    let mut v = DVector::zeros(dim * dim);
    for k in 0..dim {
        v[k * dim + k] = c(1.0, 0.0);
    }
    v
}

/// Matrix of the transposition map's Choi operator, i.e. the swap on `C^n ⊗ C^n`.
pub fn swap(n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            m[(i * n + j, j * n + i)] = c(1.0, 0.0);
        }
    }
    m
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

/// Partial trace over the second factor of `C^{da} ⊗ C^{db}`.
pub fn partial_trace_second(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    let mut out = CMatrix::zeros(da, da);
    for i in 0..da {
        for j in 0..da {
            let mut s = c(0.0, 0.0);
            for k in 0..db {
                s += m[(i * db + k, j * db + k)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_row_slice(rows, cols, &data.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_has_negative_eigenvalue() {
        let (vals, _) = eigh(&swap(2));
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigh_reconstructs() {
        let m = real_matrix(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let back = spectral_map(&m, |x| x);
        assert!((back - m).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = real_matrix(2, 2, &[1.0, 2.0, 2.0, 5.0]);
        let b = real_matrix(3, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]);
        let pt = partial_trace_second(&kron(&a, &b), 2, 3);
        assert!((pt - a.scale(6.0)).norm() < 1e-12);
    }
}
