//! Shared test support: an independent brute-force oracle for the
//! Schur-Weyl outcome distribution, and random-state helpers.
//!
//! The oracle computes P(lambda) = dim(U_lambda) * s_lambda(spectrum) with
//! the symmetric-group dimension from the hook length formula and the Schur
//! polynomial from explicit semistandard-tableau enumeration. It never
//! touches the RSK sampling path it is used to check.

#![allow(dead_code)]

use incoherent_core::linalg::CMat;
use incoherent_core::statemodel::{depolarize, random_density_matrix, DensityMatrix};
use rand::Rng;

/// All partitions of m, for m <= 4, in a fixed order.
pub fn partitions(m: usize) -> Vec<Vec<usize>> {
    match m {
        1 => vec![vec![1]],
        2 => vec![vec![2], vec![1, 1]],
        3 => vec![vec![3], vec![2, 1], vec![1, 1, 1]],
        4 => vec![
            vec![4],
            vec![3, 1],
            vec![2, 2],
            vec![2, 1, 1],
            vec![1, 1, 1, 1],
        ],
        _ => panic!("oracle covers m <= 4"),
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Number of standard Young tableaux of the given shape (hook lengths).
pub fn syt_count(shape: &[usize]) -> f64 {
    let m: usize = shape.iter().sum();
    let mut hooks_product = 1.0;
    for (i, &row_len) in shape.iter().enumerate() {
        for j in 0..row_len {
            let arm = row_len - j - 1;
            let leg = shape.iter().skip(i + 1).filter(|&&r| r > j).count();
            hooks_product *= (arm + leg + 1) as f64;
        }
    }
    factorial(m) / hooks_product
}

/// Schur polynomial s_shape(x_1..x_r) by enumerating semistandard Young
/// tableaux with entries in 1..=r: rows weakly increasing, columns strictly
/// increasing.
pub fn schur_polynomial(shape: &[usize], x: &[f64]) -> f64 {
    let cells: Vec<(usize, usize)> = shape
        .iter()
        .enumerate()
        .flat_map(|(i, &len)| (0..len).map(move |j| (i, j)))
        .collect();
    let mut filling = vec![vec![0usize; shape[0]]; shape.len()];
    fn recurse(
        cells: &[(usize, usize)],
        idx: usize,
        filling: &mut Vec<Vec<usize>>,
        x: &[f64],
        weight: f64,
        total: &mut f64,
    ) {
        if idx == cells.len() {
            *total += weight;
            return;
        }
        let (i, j) = cells[idx];
        let min_row = if j > 0 { filling[i][j - 1] } else { 1 };
        let min_col = if i > 0 { filling[i - 1][j] + 1 } else { 1 };
        let lo = min_row.max(min_col);
        for value in lo..=x.len() {
            filling[i][j] = value;
            recurse(cells, idx + 1, filling, x, weight * x[value - 1], total);
        }
        filling[i][j] = 0;
    }
    let mut total = 0.0;
    recurse(&cells, 0, &mut filling, x, 1.0, &mut total);
    total
}

/// Schur-Weyl outcome probability of the shape for an iid word of length m.
pub fn schur_weyl_probability(shape: &[usize], spectrum: &[f64]) -> f64 {
    syt_count(shape) * schur_polynomial(shape, spectrum)
}

/// Random full-rank state with the spectrum floored away from zero.
pub fn random_floored_state<R: Rng + ?Sized>(d: usize, floor: f64, rng: &mut R) -> DensityMatrix {
    let base = random_density_matrix(d, d, rng);
    depolarize(&base, floor).expect("floor in [0, 1]")
}

/// Hermitian traceless difference of two states, as a raw matrix.
pub fn state_difference(a: &DensityMatrix, b: &DensityMatrix) -> CMat {
    a.entries() - b.entries()
}

#[cfg(test)]
mod oracle_self_checks {
    use super::*;

    #[test]
    fn oracle_distribution_normalizes() {
        // sum_lambda f_lambda s_lambda(x) = (sum x)^m = 1 for a spectrum.
        for m in 1..=4 {
            for spectrum in [vec![0.7, 0.3], vec![0.5, 0.3, 0.2]] {
                let total: f64 = partitions(m)
                    .iter()
                    .map(|p| schur_weyl_probability(p, &spectrum))
                    .sum();
                assert!((total - 1.0).abs() <= 1e-12, "m={m}: total {total}");
            }
        }
    }

    #[test]
    fn oracle_known_values() {
        // (1/2, 1/2), m = 2: symmetric 3/4, antisymmetric 1/4.
        assert!((schur_weyl_probability(&[2], &[0.5, 0.5]) - 0.75).abs() <= 1e-12);
        assert!((schur_weyl_probability(&[1, 1], &[0.5, 0.5]) - 0.25).abs() <= 1e-12);
        // Shapes taller than the rank are impossible.
        assert_eq!(schur_polynomial(&[1, 1, 1], &[0.5, 0.5]), 0.0);
        // Hook lengths: f^(2,1) = 2, f^(2,2) = 2, f^(3,1) = 3.
        assert_eq!(syt_count(&[2, 1]), 2.0);
        assert_eq!(syt_count(&[2, 2]), 2.0);
        assert_eq!(syt_count(&[3, 1]), 3.0);
    }
}
