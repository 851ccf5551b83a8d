//! Classically simulated weak Schur sampling and the small-instance Schur
//! projector machinery.
//!
//! The outcome distribution of weak Schur sampling on M copies depends only
//! on M and the spectrum, so the measurement is simulated exactly by drawing
//! an iid word from the spectrum and taking the shape of its RSK insertion
//! tableau. Shapes are partitions of M with at most `rank` rows, which makes
//! the rank test one-sided by construction.
//!
//! For M, d in {2, 3} the isotypic Schur projectors are built explicitly and
//! the permutation + Haar twirl of a measurement operator is carried out as
//! an orthogonal projection onto the span of permutation operators, followed
//! by a decomposition into the projectors.

use crate::error::{Error, Result};
use crate::linalg::{eigh, hermitian_part, is_hermitian, CMat};
use crate::seeding;
use crate::statemodel::Spectrum;
use crate::{Decision, RANK_TOL};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// A partition of M: the outcome label of weak Schur sampling.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct YoungDiagram {
    rows: Vec<usize>,
    m: usize,
}

impl YoungDiagram {
    pub fn new(rows: Vec<usize>) -> Result<Self> {
        if rows.is_empty() || rows.contains(&0) {
            return Err(Error::Invalid {
                what: "Young diagram",
                detail: "rows must be positive".into(),
            });
        }
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invalid {
                what: "Young diagram",
                detail: "rows must be nonincreasing".into(),
            });
        }
        let m = rows.iter().sum();
        Ok(Self { rows, m })
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    /// Total number of boxes M.
    pub fn boxes(&self) -> usize {
        self.m
    }

    /// Number of rows (the rank witness).
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

impl std::fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.rows.iter().map(|r| r.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Shape of the RSK insertion tableau of a word, via row insertion with a
/// binary search per row. Rows stay weakly increasing, so the shape has at
/// most as many rows as the alphabet has distinct letters.
fn rsk_shape<I: IntoIterator<Item = usize>>(letters: I) -> Vec<usize> {
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for letter in letters {
        let mut carry = letter as u32;
        let mut placed = false;
        for row in rows.iter_mut() {
            let pos = row.partition_point(|&e| e <= carry);
            if pos == row.len() {
                row.push(carry);
                placed = true;
                break;
            }
            std::mem::swap(&mut row[pos], &mut carry);
        }
        if !placed {
            rows.push(vec![carry]);
        }
    }
    rows.iter().map(|r| r.len()).collect()
}

/// Draw one weak-Schur-sampling outcome for M copies of a state with the
/// given spectrum. Deterministic given the seed.
pub fn sample_young_diagram(spectrum: &Spectrum, m: usize, seed: u64) -> Result<YoungDiagram> {
    if m == 0 {
        return Err(Error::OutOfRange {
            name: "m",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let mut rng = seeding::rng_from(seed, &[]);
    Ok(sample_young_diagram_rng(spectrum, m, &mut rng))
}

pub(crate) fn sample_young_diagram_rng<R: Rng + ?Sized>(
    spectrum: &Spectrum,
    m: usize,
    rng: &mut R,
) -> YoungDiagram {
    let cumulative = spectrum.cumulative();
    let last = cumulative.len() - 1;
    let letters = (0..m).map(|_| {
        let u: f64 = rng.random();
        cumulative.partition_point(|&c| c <= u).min(last)
    });
    let rows = rsk_shape(letters);
    YoungDiagram::new(rows).expect("RSK shape is a valid partition")
}

/// Empirical Young diagram estimator: row lengths over M.
pub fn estimate_spectrum(diagram: &YoungDiagram) -> Spectrum {
    let m = diagram.boxes() as f64;
    let values: Vec<f64> = diagram.rows().iter().map(|&r| r as f64 / m).collect();
    Spectrum::new(values, RANK_TOL).expect("row lengths form a spectrum")
}

/// Declare the signal present when the diagram has more rows than the known
/// noise rank. Purity testing is the r_n = 1 case. The type-1 error is zero
/// by construction: a word over r_n letters never produces more than r_n
/// rows.
pub fn rank_test(diagram: &YoungDiagram, r_n: usize) -> Decision {
    if diagram.len() > r_n {
        Decision::H1
    } else {
        Decision::H0
    }
}

/// Spectral-gap decision with explicit band edges: H1 when any estimated
/// eigenvalue lies in `[band_lo, band_hi)`.
pub fn spectral_gap_test_with_band(
    diagram: &YoungDiagram,
    band_lo: f64,
    band_hi: f64,
) -> Decision {
    let estimated = estimate_spectrum(diagram);
    if estimated
        .values()
        .iter()
        .any(|&v| v >= band_lo && v < band_hi)
    {
        Decision::H1
    } else {
        Decision::H0
    }
}

/// Spectral-gap test with the default band `[theta0/2, theta0 + lambda/2)`:
/// estimated eigenvalues above the band are attributed to the noise, below
/// it to estimation dust.
pub fn spectral_gap_test(diagram: &YoungDiagram, theta0: f64, lambda_gap: f64) -> Decision {
    spectral_gap_test_with_band(diagram, theta0 / 2.0, theta0 + lambda_gap / 2.0)
}

/// Count of estimated eigenvalues at noise scale, used by the hybrid test's
/// first phase.
fn noise_rank_estimate(diagram: &YoungDiagram, theta0: f64, lambda_gap: f64) -> usize {
    let cut = theta0 + lambda_gap / 2.0;
    estimate_spectrum(diagram)
        .values()
        .iter()
        .filter(|&&v| v >= cut)
        .count()
}

/// Two-phase test: phase 1 estimates the noise rank from its diagrams by
/// strict majority vote, phase 2 runs the rank test against that estimate.
pub fn hybrid_gap_test(
    phase1: &[YoungDiagram],
    phase2: &YoungDiagram,
    theta0: f64,
    lambda_gap: f64,
) -> Result<Decision> {
    if phase1.is_empty() {
        return Err(Error::Invalid {
            what: "hybrid test",
            detail: "phase 1 needs at least one diagram".into(),
        });
    }
    let estimates: Vec<usize> = phase1
        .iter()
        .map(|d| noise_rank_estimate(d, theta0, lambda_gap))
        .collect();
    let mut best = (estimates[0], 0usize);
    for &candidate in &estimates {
        let count = estimates.iter().filter(|&&e| e == candidate).count();
        if count > best.1 {
            best = (candidate, count);
        }
    }
    if 2 * best.1 <= estimates.len() {
        return Err(Error::RankEstimationUnstable);
    }
    Ok(rank_test(phase2, best.0))
}

/// One isotypic component of the Schur-Weyl decomposition.
#[derive(Debug, Clone)]
pub struct SchurProjector {
    pub partition: YoungDiagram,
    pub projector: CMat,
    pub rank: usize,
}

/// Isotypic projectors of the S(M) x U(d) action on (C^d)^(tensor M).
#[derive(Debug, Clone)]
pub struct SchurBasis {
    m: usize,
    d: usize,
    projectors: Vec<SchurProjector>,
}

impl SchurBasis {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn projectors(&self) -> &[SchurProjector] {
        &self.projectors
    }

    pub fn space_dim(&self) -> usize {
        self.d.pow(self.m as u32)
    }
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn recurse(current: &mut Vec<usize>, remaining: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining.is_empty() {
            out.push(current.clone());
            return;
        }
        for i in 0..remaining.len() {
            let v = remaining.remove(i);
            current.push(v);
            recurse(current, remaining, out);
            current.pop();
            remaining.insert(i, v);
        }
    }
    let mut out = Vec::new();
    recurse(&mut Vec::new(), &mut (0..m).collect(), &mut out);
    out
}

fn cycle_type(perm: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; perm.len()];
    let mut lengths = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        lengths.push(len);
    }
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    lengths
}

/// Irreducible character of S(m) at a conjugacy class, for m in {2, 3}.
fn character(partition: &[usize], cycle: &[usize]) -> f64 {
    let sign = |cycle: &[usize]| -> f64 {
        let m: usize = cycle.iter().sum();
        if (m - cycle.len()).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    };
    match partition {
        [2] | [3] => 1.0,
        [1, 1] | [1, 1, 1] => sign(cycle),
        [2, 1] => match cycle {
            [1, 1, 1] => 2.0,
            [2, 1] => 0.0,
            [3] => -1.0,
            _ => unreachable!("cycle type of S(3)"),
        },
        _ => unreachable!("partition outside the supported grid"),
    }
}

fn irrep_dimension(partition: &[usize]) -> f64 {
    match partition {
        [2] | [1, 1] | [3] | [1, 1, 1] => 1.0,
        [2, 1] => 2.0,
        _ => unreachable!("partition outside the supported grid"),
    }
}

fn partitions_of(m: usize) -> Vec<Vec<usize>> {
    match m {
        2 => vec![vec![2], vec![1, 1]],
        3 => vec![vec![3], vec![2, 1], vec![1, 1, 1]],
        _ => unreachable!("supported grid only"),
    }
}

/// Matrix of the permutation `perm` acting on (C^d)^(tensor m): the factor
/// at position k moves to position perm[k].
pub fn permutation_operator(perm: &[usize], d: usize) -> CMat {
    let m = perm.len();
    let dim = d.pow(m as u32);
    let mut op = CMat::zeros(dim, dim);
    let mut digits = vec![0usize; m];
    for input in 0..dim {
        let mut rem = input;
        for k in (0..m).rev() {
            digits[k] = rem % d;
            rem /= d;
        }
        let mut out_digits = vec![0usize; m];
        for k in 0..m {
            out_digits[perm[k]] = digits[k];
        }
        let output = out_digits.iter().fold(0usize, |acc, &dig| acc * d + dig);
        op[(output, input)] = Complex64::new(1.0, 0.0);
    }
    op
}

/// Build the isotypic projectors for (m, d) in {2, 3} x {2, 3}. Partitions
/// whose isotypic component vanishes at the given local dimension (more rows
/// than d) are omitted.
pub fn build_schur_basis(m: usize, d: usize) -> Result<SchurBasis> {
    if !(2..=3).contains(&m) || !(2..=3).contains(&d) {
        return Err(Error::UnsupportedSchurGrid { m, d });
    }
    let perms = permutations(m);
    let ops: Vec<CMat> = perms.iter().map(|p| permutation_operator(p, d)).collect();
    let order = perms.len() as f64;

    let mut projectors = Vec::new();
    for partition in partitions_of(m) {
        let dim_irrep = irrep_dimension(&partition);
        let mut proj = CMat::zeros(d.pow(m as u32), d.pow(m as u32));
        for (perm, op) in perms.iter().zip(&ops) {
            let chi = character(&partition, &cycle_type(perm));
            if chi != 0.0 {
                proj += op.scale(chi * dim_irrep / order);
            }
        }
        let rank = proj.trace().re.round();
        if rank < 0.5 {
            continue;
        }
        projectors.push(SchurProjector {
            partition: YoungDiagram::new(partition)?,
            projector: hermitian_part(&proj),
            rank: rank as usize,
        });
    }
    Ok(SchurBasis { m, d, projectors })
}

/// Result of the permutation + Haar twirl of a measurement operator.
#[derive(Debug, Clone)]
pub struct TwirlOutcome {
    /// The doubly twirled operator, an element of span{Pi_lambda}.
    pub twirled: CMat,
    /// Acceptance coefficient per partition.
    pub coeffs: Vec<(YoungDiagram, f64)>,
    /// Normalized Frobenius distance between the twirled operator and its
    /// reconstruction from the Schur projectors.
    pub span_residual: f64,
}

/// Average `op` over all permutation conjugations, then apply the exact Haar
/// twirl as the orthogonal projection (trace inner product) onto the span of
/// permutation operators, and decompose the result over the Schur
/// projectors.
///
/// Requires 0 <= op <= I within 1e-8, as for a POVM element.
pub fn twirl(op: &CMat, m: usize, d: usize) -> Result<TwirlOutcome> {
    let basis = build_schur_basis(m, d)?;
    let dim = basis.space_dim();
    if op.shape() != (dim, dim) {
        return Err(Error::DimensionMismatch {
            left: op.nrows(),
            right: dim,
        });
    }
    if !is_hermitian(op, 1e-8) {
        return Err(Error::Invalid {
            what: "twirl input",
            detail: "not Hermitian".into(),
        });
    }
    let (eigs, _) = eigh(op);
    if eigs.iter().any(|&e| !(-1e-8..=1.0 + 1e-8).contains(&e)) {
        return Err(Error::Invalid {
            what: "twirl input",
            detail: format!(
                "eigenvalues outside [0, 1]: min {:.3e}, max {:.3e}",
                eigs.last().unwrap(),
                eigs[0]
            ),
        });
    }

    let perms = permutations(m);
    let ops: Vec<CMat> = perms.iter().map(|p| permutation_operator(p, d)).collect();

    // Average over permutation conjugations.
    let mut averaged = CMat::zeros(dim, dim);
    for u in &ops {
        averaged += u.adjoint() * op * u;
    }
    averaged = averaged.unscale(ops.len() as f64);

    // Orthogonal projection onto span{U_pi} in the trace inner product.
    let k = ops.len();
    let mut gram = CMat::zeros(k, k);
    let mut rhs = DVector::<Complex64>::zeros(k);
    for s in 0..k {
        for t in 0..k {
            gram[(s, t)] = (ops[s].adjoint() * &ops[t]).trace();
        }
        rhs[s] = (ops[s].adjoint() * &averaged).trace();
    }
    // The permutation operators can be linearly dependent (d < m), so solve
    // in the least-squares sense.
    let coeffs = gram
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::Invalid {
            what: "twirl projection",
            detail: e.to_string(),
        })?;
    let mut twirled = CMat::zeros(dim, dim);
    for (a, u) in coeffs.iter().zip(&ops) {
        twirled += u.map(|z| z * a);
    }
    let twirled = hermitian_part(&twirled);

    // Decompose over the Schur projectors and measure the leftover.
    let mut reconstruction = CMat::zeros(dim, dim);
    let mut out = Vec::new();
    for p in basis.projectors() {
        let c = (&p.projector * &twirled).trace().re / p.rank as f64;
        reconstruction += p.projector.scale(c);
        out.push((p.partition.clone(), c));
    }
    let scale = twirled.norm().max(1e-12);
    let span_residual = (&twirled - reconstruction).norm() / scale;

    Ok(TwirlOutcome {
        twirled,
        coeffs: out,
        span_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, max_abs_entry};
    use crate::statemodel::Spectrum;
    use approx::assert_relative_eq;

    fn spectrum(values: &[f64]) -> Spectrum {
        Spectrum::new(values.to_vec(), RANK_TOL).unwrap()
    }

    #[test]
    fn pure_spectrum_gives_single_row() {
        let s = spectrum(&[1.0]);
        for seed in 0..20 {
            let d = sample_young_diagram(&s, 17, seed).unwrap();
            assert_eq!(d.rows(), &[17]);
        }
    }

    #[test]
    fn sampling_depends_only_on_the_spectrum() {
        // The sampler takes nothing but (spectrum, M, seed), so unitary
        // invariance holds at the interface: a rotated state has the same
        // spectrum and therefore the same outcome stream.
        let mut rng = seeding::rng_from(3, &[]);
        let state = crate::statemodel::random_density_matrix(3, 2, &mut rng);
        let u = haar_unitary(3, &mut rng);
        let rotated = crate::statemodel::DensityMatrix::new(
            &u * state.entries() * u.adjoint(),
        )
        .unwrap();
        let a = state.spectrum(RANK_TOL);
        let b = rotated.spectrum(RANK_TOL);
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() <= 1e-10);
        }
        let d1 = sample_young_diagram(&a, 50, 9).unwrap();
        let d2 = sample_young_diagram(&a, 50, 9).unwrap();
        assert_eq!(d1, d2);
    }

    #[test]
    fn row_count_never_exceeds_rank() {
        let s = spectrum(&[0.5, 0.3, 0.2]);
        for seed in 0..500 {
            let d = sample_young_diagram(&s, 40, seed).unwrap();
            assert!(d.len() <= 3);
            assert_eq!(d.boxes(), 40);
        }
    }

    #[test]
    fn two_copy_probabilities_match_schur_weyl() {
        // spectrum (1/2, 1/2), M = 2: P(rows = (2)) = 3/4, P(rows = (1,1)) = 1/4.
        let s = spectrum(&[0.5, 0.5]);
        let n = 40_000;
        let mut sym = 0usize;
        for seed in 0..n {
            let d = sample_young_diagram(&s, 2, seed as u64).unwrap();
            if d.len() == 1 {
                sym += 1;
            }
        }
        let p = sym as f64 / n as f64;
        let sigma = (0.75f64 * 0.25 / n as f64).sqrt();
        assert!((p - 0.75).abs() <= 3.0 * sigma, "p = {p}");
    }

    #[test]
    fn rsk_shape_of_known_words() {
        // Word 1,0 has a strictly decreasing pair: two rows.
        assert_eq!(rsk_shape(vec![1, 0]), vec![1, 1]);
        assert_eq!(rsk_shape(vec![0, 1]), vec![2]);
        assert_eq!(rsk_shape(vec![2, 1, 0]), vec![1, 1, 1]);
        assert_eq!(rsk_shape(vec![0, 1, 2, 0]), vec![3, 1]);
    }

    #[test]
    fn estimate_spectrum_cases() {
        let d = YoungDiagram::new(vec![7, 3]).unwrap();
        let s = estimate_spectrum(&d);
        assert_relative_eq!(s.values()[0], 0.7, epsilon = 1e-12);
        assert_relative_eq!(s.values()[1], 0.3, epsilon = 1e-12);

        let d = YoungDiagram::new(vec![12]).unwrap();
        assert_eq!(estimate_spectrum(&d).values(), &[1.0]);
    }

    #[test]
    fn rank_test_cases() {
        let d = YoungDiagram::new(vec![5, 3, 2]).unwrap();
        assert_eq!(rank_test(&d, 2), Decision::H1);
        let d = YoungDiagram::new(vec![10]).unwrap();
        assert_eq!(rank_test(&d, 1), Decision::H0);
    }

    #[test]
    fn rank_test_type1_error_is_structurally_zero() {
        let s = spectrum(&[0.6, 0.4]);
        for seed in 0..2_000 {
            let d = sample_young_diagram(&s, 60, seed).unwrap();
            assert_eq!(rank_test(&d, 2), Decision::H0);
        }
    }

    #[test]
    fn spectral_gap_band_cases() {
        let d = YoungDiagram::new(vec![55, 35, 10]).unwrap();
        assert_eq!(spectral_gap_test(&d, 0.1, 0.4), Decision::H1);

        let d = YoungDiagram::new(vec![60, 40]).unwrap();
        assert_eq!(spectral_gap_test(&d, 0.1, 0.4), Decision::H0);

        let d = YoungDiagram::new(vec![50]).unwrap();
        assert_eq!(spectral_gap_test(&d, 0.1, 0.4), Decision::H0);
    }

    #[test]
    fn hybrid_test_composition() {
        let phase1: Vec<YoungDiagram> = (0..5)
            .map(|_| YoungDiagram::new(vec![60, 40]).unwrap())
            .collect();
        let phase2 = YoungDiagram::new(vec![50, 30, 2]).unwrap();
        assert_eq!(
            hybrid_gap_test(&phase1, &phase2, 0.1, 0.4).unwrap(),
            Decision::H1
        );

        let phase2 = YoungDiagram::new(vec![55, 45]).unwrap();
        assert_eq!(
            hybrid_gap_test(&phase1, &phase2, 0.1, 0.4).unwrap(),
            Decision::H0
        );
    }

    #[test]
    fn hybrid_misestimate_forces_false_alarm() {
        // Phase 1 sees only one large eigenvalue, true noise rank is 2:
        // phase 2 then flags rank > 1.
        let phase1 = vec![YoungDiagram::new(vec![100]).unwrap()];
        let phase2 = YoungDiagram::new(vec![55, 45]).unwrap();
        assert_eq!(
            hybrid_gap_test(&phase1, &phase2, 0.1, 0.4).unwrap(),
            Decision::H1
        );
    }

    #[test]
    fn hybrid_flags_unstable_rank_votes() {
        let phase1 = vec![
            YoungDiagram::new(vec![60, 40]).unwrap(),
            YoungDiagram::new(vec![100]).unwrap(),
        ];
        let phase2 = YoungDiagram::new(vec![50, 50]).unwrap();
        assert!(matches!(
            hybrid_gap_test(&phase1, &phase2, 0.1, 0.4),
            Err(Error::RankEstimationUnstable)
        ));
    }

    #[test]
    fn schur_basis_ranks() {
        let basis = build_schur_basis(2, 2).unwrap();
        let ranks: Vec<usize> = basis.projectors().iter().map(|p| p.rank).collect();
        assert_eq!(ranks, vec![3, 1]);

        let basis = build_schur_basis(3, 2).unwrap();
        let ranks: Vec<usize> = basis.projectors().iter().map(|p| p.rank).collect();
        assert_eq!(ranks, vec![4, 4]);
        assert!(basis
            .projectors()
            .iter()
            .all(|p| p.partition.rows() != [1, 1, 1]));

        let basis = build_schur_basis(3, 3).unwrap();
        let ranks: Vec<usize> = basis.projectors().iter().map(|p| p.rank).collect();
        assert_eq!(ranks, vec![10, 16, 1]);

        assert!(matches!(
            build_schur_basis(4, 2),
            Err(Error::UnsupportedSchurGrid { .. })
        ));
    }

    #[test]
    fn schur_projectors_are_a_resolution_of_identity() {
        for (m, d) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let basis = build_schur_basis(m, d).unwrap();
            let dim = basis.space_dim();
            let mut sum = CMat::zeros(dim, dim);
            for p in basis.projectors() {
                assert!(is_hermitian(&p.projector, 1e-10));
                let idem = &p.projector * &p.projector - &p.projector;
                assert!(max_abs_entry(&idem) <= 1e-10);
                for q in basis.projectors() {
                    if p.partition != q.partition {
                        assert!(max_abs_entry(&(&p.projector * &q.projector)) <= 1e-10);
                    }
                }
                sum += &p.projector;
            }
            assert!(max_abs_entry(&(sum - CMat::identity(dim, dim))) <= 1e-10);
        }
    }

    #[test]
    fn schur_projectors_commute_with_both_actions() {
        let mut rng = seeding::rng_from(17, &[]);
        for (m, d) in [(2, 2), (3, 2), (3, 3)] {
            let basis = build_schur_basis(m, d).unwrap();
            let u = haar_unitary(d, &mut rng);
            // U tensor ... tensor U
            let dim = basis.space_dim();
            let mut u_tensor = CMat::zeros(dim, dim);
            for row in 0..dim {
                for col in 0..dim {
                    let mut val = Complex64::new(1.0, 0.0);
                    let (mut r, mut c) = (row, col);
                    for _ in 0..m {
                        val *= u[(r % d, c % d)];
                        r /= d;
                        c /= d;
                    }
                    u_tensor[(row, col)] = val;
                }
            }
            for p in basis.projectors() {
                for perm in permutations(m) {
                    let op = permutation_operator(&perm, d);
                    assert!(max_abs_entry(&(&op * &p.projector - &p.projector * &op)) <= 1e-10);
                }
                assert!(
                    max_abs_entry(&(&u_tensor * &p.projector - &p.projector * &u_tensor)) <= 1e-10
                );
            }
        }
    }

    #[test]
    fn twirl_fixed_points() {
        let id = CMat::identity(4, 4);
        let outcome = twirl(&id, 2, 2).unwrap();
        for (_, c) in &outcome.coeffs {
            assert_relative_eq!(*c, 1.0, epsilon = 1e-10);
        }
        assert!(outcome.span_residual <= 1e-10);

        let basis = build_schur_basis(2, 2).unwrap();
        let sym = basis.projectors()[0].projector.clone();
        let outcome = twirl(&sym, 2, 2).unwrap();
        assert_relative_eq!(outcome.coeffs[0].1, 1.0, epsilon = 1e-10);
        assert!(outcome.coeffs[1].1.abs() <= 1e-10);
    }

    #[test]
    fn twirl_of_zero_zero_projector() {
        // |00><00| twirls to Pi_sym / 3 for two qubits.
        let mut op = CMat::zeros(4, 4);
        op[(0, 0)] = Complex64::new(1.0, 0.0);
        let outcome = twirl(&op, 2, 2).unwrap();
        assert_relative_eq!(outcome.coeffs[0].1, 1.0 / 3.0, epsilon = 1e-10);
        assert!(outcome.coeffs[1].1.abs() <= 1e-10);
        let basis = build_schur_basis(2, 2).unwrap();
        let expected = basis.projectors()[0].projector.scale(1.0 / 3.0);
        assert!(max_abs_entry(&(&outcome.twirled - expected)) <= 1e-10);
    }

    #[test]
    fn twirl_rejects_out_of_range_operators() {
        let op = CMat::identity(4, 4).scale(1.5);
        assert!(twirl(&op, 2, 2).is_err());
    }

    #[test]
    fn twirl_preserves_trace_and_is_idempotent() {
        let mut rng = seeding::rng_from(23, &[]);
        let u = haar_unitary(8, &mut rng);
        let mut diag = CMat::zeros(8, 8);
        for i in 0..8 {
            diag[(i, i)] = Complex64::new(rng.random::<f64>(), 0.0);
        }
        let op = &u * diag * u.adjoint();
        let op = hermitian_part(&op);
        let outcome = twirl(&op, 3, 2).unwrap();
        assert!((outcome.twirled.trace().re - op.trace().re).abs() <= 1e-9);
        let again = twirl(&outcome.twirled, 3, 2).unwrap();
        assert!(max_abs_entry(&(&again.twirled - &outcome.twirled)) <= 1e-10);
        // PSD is preserved.
        let (eigs, _) = eigh(&outcome.twirled);
        assert!(eigs.iter().all(|&e| e >= -1e-9));
    }
}
