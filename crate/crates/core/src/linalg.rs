//! Dense complex-matrix helpers shared by all modules.
//!
//! Everything here operates on small matrices (d <= 64, or d^M <= 27 for the
//! Schur machinery), so plain `DMatrix<Complex64>` with eigendecompositions
//! is the right tool.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// (A + A^dag) / 2. Used to scrub the anti-Hermitian drift that accumulates
/// in products before an eigendecomposition.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

pub fn max_abs_entry(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    max_abs_entry(&(m - m.adjoint())) <= tol
}

pub fn trace_re(m: &CMat) -> f64 {
    m.trace().re
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted in
/// nonincreasing order with matching eigenvector columns.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMat) -> f64 {
    let (values, _) = eigh(m);
    *values.last().expect("nonempty matrix")
}

/// Projector onto the span of the given eigenvector columns.
pub fn projector_from_columns(vectors: &CMat, columns: &[usize]) -> CMat {
    let n = vectors.nrows();
    let mut p = CMat::zeros(n, n);
    for &c in columns {
        let v = vectors.column(c);
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    p
}

fn standard_complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) / 2f64.sqrt()
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// the R diagonal folded back into Q.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| standard_complex_normal(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random Hermitian matrix with iid Gaussian entries (GUE-type, not scaled).
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| standard_complex_normal(rng));
    hermitian_part(&g)
}
