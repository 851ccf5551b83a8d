//! Density matrices, spectra, and sensing scenarios.
//!
//! A [`SensingScenario`] bundles a noise state, a signal state, the known
//! signal strength `theta0`, and an optional spectral gap, together with the
//! derived objects every test consumes: the perturbation `Delta`, the
//! projector onto the orthogonal complement of the noise support, and the
//! ranks. All values are immutable after construction.

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, haar_unitary, hermitian_part, is_hermitian, max_abs_entry, projector_from_columns,
    trace_re, CMat, CVec,
};
use crate::seeding;
use crate::RANK_TOL;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

/// Default validation tolerance for density-matrix invariants.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Unit-trace, Hermitian, positive semidefinite complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMat,
    dim: usize,
    tol: f64,
}

impl DensityMatrix {
    /// Validate and wrap a matrix. Fails if the matrix is not square,
    /// Hermitian within `tol`, positive semidefinite within `tol`, or unit
    /// trace within `tol`.
    pub fn with_tol(entries: CMat, tol: f64) -> Result<Self> {
        if tol < 0.0 {
            return Err(Error::OutOfRange {
                name: "tol",
                value: tol,
                range: "[0, inf)",
            });
        }
        let (rows, cols) = entries.shape();
        if rows != cols {
            return Err(Error::DimensionMismatch {
                left: rows,
                right: cols,
            });
        }
        if rows == 0 {
            return Err(Error::Invalid {
                what: "density matrix",
                detail: "empty matrix".into(),
            });
        }
        let herm_dev = max_abs_entry(&(&entries - entries.adjoint()));
        if herm_dev > tol {
            return Err(Error::Invalid {
                what: "density matrix",
                detail: format!("not Hermitian: max deviation {herm_dev:.3e}"),
            });
        }
        let trace_dev = (entries.trace() - Complex64::new(1.0, 0.0)).norm();
        if trace_dev > tol {
            return Err(Error::Invalid {
                what: "density matrix",
                detail: format!("trace differs from 1 by {trace_dev:.3e}"),
            });
        }
        let (values, _) = eigh(&entries);
        let min_eig = *values.last().expect("nonempty");
        if min_eig < -tol {
            return Err(Error::Invalid {
                what: "density matrix",
                detail: format!("negative eigenvalue {min_eig:.3e}"),
            });
        }
        Ok(Self {
            entries,
            dim: rows,
            tol,
        })
    }

    pub fn new(entries: CMat) -> Result<Self> {
        Self::with_tol(entries, DEFAULT_TOL)
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        let entries = CMat::from_diagonal(&CVec::from_iterator(
            values.len(),
            values.iter().map(|&v| Complex64::new(v, 0.0)),
        ));
        Self::new(entries)
    }

    /// Pure state |psi><psi| from a (not necessarily normalized) vector.
    pub fn pure(state: &CVec) -> Result<Self> {
        let norm = state.norm();
        if norm == 0.0 {
            return Err(Error::Invalid {
                what: "pure state",
                detail: "zero vector".into(),
            });
        }
        let psi = state.unscale(norm);
        let entries = CMat::from_fn(psi.len(), psi.len(), |i, j| psi[i] * psi[j].conj());
        Self::new(entries)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let entries = CMat::identity(dim, dim).scale(1.0 / dim as f64);
        Self::new(entries).expect("identity/d is a valid state")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Eigendecomposition, eigenvalues nonincreasing.
    pub fn eigh(&self) -> (Vec<f64>, CMat) {
        eigh(&self.entries)
    }

    /// Sorted eigenvalues with tiny negatives clipped to zero. The clipped
    /// values are renormalized so the unit-sum invariant survives inputs
    /// that sit at the validation tolerance.
    pub fn spectrum(&self, rank_tol: f64) -> Spectrum {
        let (values, _) = self.eigh();
        let mut clipped: Vec<f64> = values.iter().map(|&v| v.max(0.0)).collect();
        let sum: f64 = clipped.iter().sum();
        for v in &mut clipped {
            *v /= sum;
        }
        Spectrum::new(clipped, rank_tol).expect("valid state yields a valid spectrum")
    }

    pub fn rank(&self, rank_tol: f64) -> usize {
        self.spectrum(rank_tol).rank()
    }
}

/// Sorted point spectrum of a state: nonincreasing, nonnegative, unit sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    rank: usize,
}

impl Spectrum {
    pub fn new(values: Vec<f64>, rank_tol: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Invalid {
                what: "spectrum",
                detail: "empty".into(),
            });
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invalid {
                what: "spectrum",
                detail: "not sorted nonincreasing".into(),
            });
        }
        if values.iter().any(|&v| v < 0.0) {
            return Err(Error::Invalid {
                what: "spectrum",
                detail: "negative entry".into(),
            });
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::Invalid {
                what: "spectrum",
                detail: format!("sum {sum} differs from 1"),
            });
        }
        let rank = values.iter().filter(|&&v| v > rank_tol).count();
        Ok(Self { values, rank })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Cumulative distribution over eigenvalue indices, for sampling.
    pub(crate) fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.values
            .iter()
            .map(|&v| {
                acc += v;
                acc
            })
            .collect()
    }
}

/// One instance of the detection problem: noise state, signal state, signal
/// strength, optional spectral gap, and the derived perturbation objects.
#[derive(Debug, Clone)]
pub struct SensingScenario {
    rho_n: DensityMatrix,
    rho_s: DensityMatrix,
    theta0: f64,
    lambda_gap: Option<f64>,
    seed: Option<u64>,
    delta: CMat,
    pi_perp: CMat,
    r_n: usize,
    r_s: usize,
}

impl SensingScenario {
    pub fn new(
        rho_n: DensityMatrix,
        rho_s: DensityMatrix,
        theta0: f64,
        lambda_gap: Option<f64>,
    ) -> Result<Self> {
        if rho_n.dim() != rho_s.dim() {
            return Err(Error::DimensionMismatch {
                left: rho_n.dim(),
                right: rho_s.dim(),
            });
        }
        if !(theta0 > 0.0 && theta0 < 1.0) {
            return Err(Error::OutOfRange {
                name: "theta0",
                value: theta0,
                range: "(0, 1)",
            });
        }
        if let Some(gap) = lambda_gap {
            if gap < 0.0 {
                return Err(Error::OutOfRange {
                    name: "lambda_gap",
                    value: gap,
                    range: "[0, inf)",
                });
            }
        }
        let delta = rho_s.entries() - rho_n.entries();
        let (_, pi_perp) = support_projectors(&rho_n, RANK_TOL);
        let scenario = Self {
            r_n: rho_n.rank(RANK_TOL),
            r_s: rho_s.rank(RANK_TOL),
            rho_n,
            rho_s,
            theta0,
            lambda_gap,
            seed: None,
            delta,
            pi_perp,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<()> {
        if !is_hermitian(&self.delta, 1e-10) || self.delta.trace().norm() > 1e-10 {
            return Err(Error::Invalid {
                what: "scenario",
                detail: "Delta is not Hermitian traceless".into(),
            });
        }
        let p = &self.pi_perp;
        if !is_hermitian(p, 1e-10) || max_abs_entry(&(p * p - p)) > 1e-10 {
            return Err(Error::Invalid {
                what: "scenario",
                detail: "Pi_perp is not an orthogonal projector".into(),
            });
        }
        let leak = max_abs_entry(&(p * self.rho_n.entries() * p));
        if leak > RANK_TOL {
            return Err(Error::Invalid {
                what: "scenario",
                detail: format!("Pi_perp does not annihilate rho_n: leak {leak:.3e}"),
            });
        }
        if let Some(gap) = self.lambda_gap {
            let floor = (self.theta0 + gap) / (1.0 - self.theta0);
            let spectrum = self.rho_n.spectrum(RANK_TOL);
            for &v in spectrum.values().iter().take(spectrum.rank()) {
                if v < floor - 1e-10 {
                    return Err(Error::Infeasible(format!(
                        "noise eigenvalue {v:.6} below the gap floor {floor:.6}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn rho_n(&self) -> &DensityMatrix {
        &self.rho_n
    }

    pub fn rho_s(&self) -> &DensityMatrix {
        &self.rho_s
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn lambda_gap(&self) -> Option<f64> {
        self.lambda_gap
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Delta = rho_s - rho_n.
    pub fn delta(&self) -> &CMat {
        &self.delta
    }

    /// Orthogonal projector onto the complement of supp(rho_n).
    pub fn pi_perp(&self) -> &CMat {
        &self.pi_perp
    }

    pub fn r_n(&self) -> usize {
        self.r_n
    }

    pub fn r_s(&self) -> usize {
        self.r_s
    }

    pub fn total_rank(&self) -> usize {
        self.r_n + self.r_s
    }

    pub fn dim(&self) -> usize {
        self.rho_n.dim()
    }

    /// tr(rho_s Pi_perp), the weight of the signal outside the noise support.
    pub fn signal_overlap_perp(&self) -> f64 {
        trace_re(&(self.rho_s.entries() * &self.pi_perp))
    }

    pub fn is_orthogonal(&self, tol: f64) -> bool {
        trace_re(&(self.rho_n.entries() * self.rho_s.entries())).abs() <= tol
    }

    /// The mixed state rho(theta) = (1 - theta) rho_n + theta rho_s.
    pub fn mixed_state(&self, theta: f64) -> Result<DensityMatrix> {
        mix_state(&self.rho_n, &self.rho_s, theta)
    }

    pub fn to_json(&self) -> Result<String> {
        let dto = ScenarioJson::from(self);
        serde_json::to_string_pretty(&dto).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dto: ScenarioJson =
            serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        dto.try_into()
    }
}

/// JSON wire format: row-major complex entry pairs, exact seed echo.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioJson {
    dim: usize,
    rho_n: Vec<[f64; 2]>,
    rho_s: Vec<[f64; 2]>,
    theta0: f64,
    lambda_gap: Option<f64>,
    seed: Option<u64>,
}

fn mat_to_pairs(m: &CMat) -> Vec<[f64; 2]> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

fn pairs_to_mat(dim: usize, pairs: &[[f64; 2]]) -> Result<CMat> {
    if pairs.len() != dim * dim {
        return Err(Error::Serialization(format!(
            "expected {} entries, found {}",
            dim * dim,
            pairs.len()
        )));
    }
    Ok(CMat::from_fn(dim, dim, |i, j| {
        let [re, im] = pairs[i * dim + j];
        Complex64::new(re, im)
    }))
}

impl From<&SensingScenario> for ScenarioJson {
    fn from(s: &SensingScenario) -> Self {
        Self {
            dim: s.dim(),
            rho_n: mat_to_pairs(s.rho_n.entries()),
            rho_s: mat_to_pairs(s.rho_s.entries()),
            theta0: s.theta0,
            lambda_gap: s.lambda_gap,
            seed: s.seed,
        }
    }
}

impl TryFrom<ScenarioJson> for SensingScenario {
    type Error = Error;

    fn try_from(dto: ScenarioJson) -> Result<Self> {
        let rho_n = DensityMatrix::new(pairs_to_mat(dto.dim, &dto.rho_n)?)?;
        let rho_s = DensityMatrix::new(pairs_to_mat(dto.dim, &dto.rho_s)?)?;
        let mut scenario = SensingScenario::new(rho_n, rho_s, dto.theta0, dto.lambda_gap)?;
        scenario.seed = dto.seed;
        Ok(scenario)
    }
}

/// (1 - theta) rho_n + theta rho_s.
pub fn mix_state(rho_n: &DensityMatrix, rho_s: &DensityMatrix, theta: f64) -> Result<DensityMatrix> {
    if rho_n.dim() != rho_s.dim() {
        return Err(Error::DimensionMismatch {
            left: rho_n.dim(),
            right: rho_s.dim(),
        });
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            range: "[0, 1]",
        });
    }
    let entries = rho_n.entries().scale(1.0 - theta) + rho_s.entries().scale(theta);
    DensityMatrix::new(entries)
}

/// Replace a support-extending signal by its component orthogonal to the
/// noise: returns the reduced signal `theta0 = vartheta0 tr(rho_s Pi_perp)`
/// and the renormalized orthogonal signal state.
pub fn orthogonal_reduction(
    rho_n: &DensityMatrix,
    rho_s: &DensityMatrix,
    vartheta0: f64,
) -> Result<(f64, DensityMatrix)> {
    if rho_n.dim() != rho_s.dim() {
        return Err(Error::DimensionMismatch {
            left: rho_n.dim(),
            right: rho_s.dim(),
        });
    }
    let (_, pi_perp) = support_projectors(rho_n, RANK_TOL);
    let overlap = trace_re(&(rho_s.entries() * &pi_perp));
    if overlap <= RANK_TOL {
        return Err(Error::FullySupportPreserving { overlap });
    }
    let projected = hermitian_part(&(&pi_perp * rho_s.entries() * &pi_perp)).unscale(overlap);
    let rho_s_perp = DensityMatrix::new(projected)?;
    Ok((vartheta0 * overlap, rho_s_perp))
}

/// (1 - gamma) rho + gamma I/d.
pub fn depolarize(rho: &DensityMatrix, gamma: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::OutOfRange {
            name: "gamma",
            value: gamma,
            range: "[0, 1]",
        });
    }
    let d = rho.dim();
    let entries =
        rho.entries().scale(1.0 - gamma) + CMat::identity(d, d).scale(gamma / d as f64);
    DensityMatrix::new(entries)
}

/// Projectors onto the support of `rho` (eigenvalues above `rank_tol`) and
/// its orthogonal complement. `pi_par + pi_perp = I`.
pub fn support_projectors(rho: &DensityMatrix, rank_tol: f64) -> (CMat, CMat) {
    let (values, vectors) = rho.eigh();
    let support: Vec<usize> = (0..values.len()).filter(|&i| values[i] > rank_tol).collect();
    let pi_par = projector_from_columns(&vectors, &support);
    let pi_perp = CMat::identity(rho.dim(), rho.dim()) - &pi_par;
    (pi_par, pi_perp)
}

/// Build the noise/signal pair selected by a canonical Kraus representation
/// and return the reduced signal together with the scenario.
///
/// The first `n_noise + 1` operators are attributed to the noise channel and
/// the remaining `n_signal` to the signal. The scenario carries the raw
/// mixing weight `vartheta`; the returned scalar is the reduced signal
/// `theta = sum_j tr(Pi_perp K_j rho_i K_j^dag)` over the signal operators.
pub fn kraus_reduced_signal(
    kraus_ops: &[CMat],
    n_noise: usize,
    n_signal: usize,
    rho_i: &DensityMatrix,
    rank_tol: f64,
) -> Result<(f64, SensingScenario)> {
    let d = rho_i.dim();
    if kraus_ops.len() != n_noise + n_signal + 1 {
        return Err(Error::Invalid {
            what: "Kraus set",
            detail: format!(
                "expected {} operators, found {}",
                n_noise + n_signal + 1,
                kraus_ops.len()
            ),
        });
    }
    for k in kraus_ops {
        if k.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                left: k.nrows(),
                right: d,
            });
        }
    }
    let mut completeness = CMat::zeros(d, d);
    for k in kraus_ops {
        completeness += k.adjoint() * k;
    }
    let deviation = max_abs_entry(&(completeness - CMat::identity(d, d)));
    if deviation > 1e-8 {
        return Err(Error::KrausNotNormalized { deviation });
    }

    let apply = |k: &CMat| -> CMat { k * rho_i.entries() * k.adjoint() };
    let mut noise_sum = CMat::zeros(d, d);
    for k in &kraus_ops[..=n_noise] {
        noise_sum += apply(k);
    }
    let mut signal_sum = CMat::zeros(d, d);
    for k in &kraus_ops[n_noise + 1..] {
        signal_sum += apply(k);
    }
    let vartheta = trace_re(&signal_sum);
    if vartheta <= rank_tol {
        return Err(Error::ZeroSignalWeight { weight: vartheta });
    }
    if vartheta >= 1.0 {
        return Err(Error::OutOfRange {
            name: "vartheta",
            value: vartheta,
            range: "(0, 1)",
        });
    }
    let rho_n = DensityMatrix::new(hermitian_part(&noise_sum).unscale(1.0 - vartheta))?;
    let rho_s = DensityMatrix::new(hermitian_part(&signal_sum).unscale(vartheta))?;
    let scenario = SensingScenario::new(rho_n, rho_s, vartheta, None)?;
    let theta = trace_re(&(scenario.pi_perp() * &signal_sum));
    Ok((theta.max(0.0), scenario))
}

fn dissipator(l: &CMat, rho: &CMat) -> CMat {
    let ldl = l.adjoint() * l;
    l * rho * l.adjoint() - (&ldl * rho + rho * ldl).scale(0.5)
}

/// Short-time reduced signal for Lindblad jump-operator detection.
///
/// Evolves `rho_i` to first order in `t` under the Hamiltonian and all
/// dissipators, validates positivity of the short-time state, and returns
/// `theta0 = sum_{j > n_noise} kappa_j t tr(Pi_perp L_j[rho_i])` with
/// `Pi_perp` taken from the noise-only evolved state.
pub fn lindblad_reduced_signal(
    hamiltonian: &CMat,
    lindblad_ops: &[CMat],
    kappas: &[f64],
    n_noise: usize,
    n_signal: usize,
    rho_i: &DensityMatrix,
    t: f64,
) -> Result<f64> {
    let d = rho_i.dim();
    if lindblad_ops.len() != n_noise + n_signal || kappas.len() != lindblad_ops.len() {
        return Err(Error::Invalid {
            what: "Lindblad set",
            detail: format!(
                "expected {} operators with matching kappas, found {} ops and {} kappas",
                n_noise + n_signal,
                lindblad_ops.len(),
                kappas.len()
            ),
        });
    }
    if hamiltonian.shape() != (d, d) || !is_hermitian(hamiltonian, 1e-10) {
        return Err(Error::Invalid {
            what: "Hamiltonian",
            detail: "not a Hermitian d x d matrix".into(),
        });
    }
    if t < 0.0 {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            range: "[0, inf)",
        });
    }
    if kappas.iter().any(|&k| k < 0.0) {
        return Err(Error::OutOfRange {
            name: "kappa",
            value: *kappas.iter().find(|&&k| k < 0.0).unwrap(),
            range: "[0, inf)",
        });
    }

    let rho = rho_i.entries();
    let i = Complex64::new(0.0, 1.0);
    let commutator = (hamiltonian * rho - rho * hamiltonian).map(|z| -i * z);

    let mut noise_drift = commutator.clone();
    for (l, &kappa) in lindblad_ops.iter().zip(kappas).take(n_noise) {
        noise_drift += dissipator(l, rho).scale(kappa);
    }
    let mut full_drift = noise_drift.clone();
    for (l, &kappa) in lindblad_ops.iter().zip(kappas).skip(n_noise) {
        full_drift += dissipator(l, rho).scale(kappa);
    }

    // First-order formula is invalid when positivity fails, so validate
    // rather than clip.
    let short_time = hermitian_part(&(rho + full_drift.scale(t)));
    let full_state = DensityMatrix::new(short_time).map_err(|_| Error::TTooLarge {
        min_eig: crate::linalg::min_eigenvalue(&(rho + full_drift.scale(t))),
    })?;
    let _ = full_state;
    let noise_state =
        DensityMatrix::new(hermitian_part(&(rho + noise_drift.scale(t)))).map_err(|_| {
            Error::TTooLarge {
                min_eig: crate::linalg::min_eigenvalue(&(rho + noise_drift.scale(t))),
            }
        })?;

    let (_, pi_perp) = support_projectors(&noise_state, RANK_TOL);
    let mut theta0 = 0.0;
    for (l, &kappa) in lindblad_ops.iter().zip(kappas).skip(n_noise) {
        theta0 += kappa * t * trace_re(&(&pi_perp * dissipator(l, rho)));
    }
    Ok(theta0.max(0.0))
}

/// Uniform sample from the probability simplex (normalized iid exponentials).
fn simplex_sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut draws: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let sum: f64 = draws.iter().sum();
    for v in &mut draws {
        *v /= sum;
    }
    draws.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    draws
}

/// Random density matrix of the given rank: Haar-random eigenframe with a
/// uniform-simplex spectrum.
pub fn random_density_matrix<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    assert!(rank >= 1 && rank <= d, "rank must lie in 1..=d");
    let u = haar_unitary(d, rng);
    let spectrum = simplex_sample(rank, rng);
    let mut entries = CMat::zeros(d, d);
    for (k, &lam) in spectrum.iter().enumerate() {
        let v = u.column(k);
        for i in 0..d {
            for j in 0..d {
                entries[(i, j)] += v[i] * v[j].conj() * Complex64::new(lam, 0.0);
            }
        }
    }
    DensityMatrix::new(hermitian_part(&entries)).expect("construction preserves invariants")
}

/// Draw a random scenario with orthogonal noise and signal supports.
///
/// Noise eigenvalues are uniform on the simplex, shifted above the gap floor
/// `(theta0 + lambda) / (1 - theta0)` when a gap is requested. Deterministic
/// given the seed.
pub fn random_scenario(
    d: usize,
    r_n: usize,
    r_s: usize,
    theta0: f64,
    lambda_gap: Option<f64>,
    seed: u64,
) -> Result<SensingScenario> {
    if r_n < 1 || r_s < 1 || r_n + r_s > d {
        return Err(Error::Infeasible(format!(
            "need 1 <= r_n, 1 <= r_s, r_n + r_s <= d; got r_n={r_n}, r_s={r_s}, d={d}"
        )));
    }
    if !(theta0 > 0.0 && theta0 < 1.0) {
        return Err(Error::OutOfRange {
            name: "theta0",
            value: theta0,
            range: "(0, 1)",
        });
    }
    let mut rng = seeding::rng_from(seed, &[]);
    let frame = haar_unitary(d, &mut rng);

    let noise_spectrum = match lambda_gap {
        Some(gap) => {
            let floor = (theta0 + gap) / (1.0 - theta0);
            if r_n as f64 * floor > 1.0 + 1e-12 {
                return Err(Error::Infeasible(format!(
                    "r_n = {r_n} exceeds floor((1 - theta0)/(theta0 + lambda)) = {}",
                    ((1.0 - theta0) / (theta0 + gap)).floor()
                )));
            }
            let slack = 1.0 - r_n as f64 * floor;
            simplex_sample(r_n, &mut rng)
                .into_iter()
                .map(|s| floor + slack * s)
                .collect::<Vec<_>>()
        }
        None => simplex_sample(r_n, &mut rng),
    };
    let signal_spectrum = simplex_sample(r_s, &mut rng);

    let build = |spectrum: &[f64], offset: usize| -> DensityMatrix {
        let mut entries = CMat::zeros(d, d);
        for (k, &lam) in spectrum.iter().enumerate() {
            let v = frame.column(offset + k);
            for i in 0..d {
                for j in 0..d {
                    entries[(i, j)] += v[i] * v[j].conj() * Complex64::new(lam, 0.0);
                }
            }
        }
        DensityMatrix::new(hermitian_part(&entries)).expect("orthonormal frame keeps invariants")
    };
    let rho_n = build(&noise_spectrum, 0);
    let rho_s = build(&signal_spectrum, r_n);

    let mut scenario = SensingScenario::new(rho_n, rho_s, theta0, lambda_gap)?;
    scenario.seed = Some(seed);
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn diag(values: &[f64]) -> DensityMatrix {
        DensityMatrix::from_diagonal(values).unwrap()
    }

    #[test]
    fn mix_state_identity_cases() {
        let rho_n = diag(&[1.0, 0.0]);
        let rho_s = diag(&[0.0, 1.0]);
        assert_eq!(mix_state(&rho_n, &rho_s, 0.0).unwrap(), rho_n);
        assert_eq!(mix_state(&rho_n, &rho_s, 1.0).unwrap(), rho_s);
        let mixed = mix_state(&rho_n, &rho_s, 0.1).unwrap();
        assert_relative_eq!(mixed.entries()[(0, 0)].re, 0.9, epsilon = 1e-15);
        assert_relative_eq!(mixed.entries()[(1, 1)].re, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn mix_state_rejects_bad_inputs() {
        let rho_n = diag(&[1.0, 0.0]);
        let rho_s = diag(&[0.0, 0.0, 1.0]);
        assert!(matches!(
            mix_state(&rho_n, &rho_s, 0.5),
            Err(Error::DimensionMismatch { .. })
        ));
        let rho_s2 = diag(&[0.0, 1.0]);
        assert!(matches!(
            mix_state(&rho_n, &rho_s2, 1.5),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn mix_state_is_affine() {
        let mut rng = seeding::rng_from(11, &[]);
        let rho_n = random_density_matrix(4, 2, &mut rng);
        let rho_s = random_density_matrix(4, 3, &mut rng);
        let theta = 0.37;
        let mixed = mix_state(&rho_n, &rho_s, theta).unwrap();
        let affine = rho_n.entries() + (rho_s.entries() - rho_n.entries()).scale(theta);
        assert!(max_abs_entry(&(mixed.entries() - affine)) <= 1e-12);
    }

    #[test]
    fn orthogonal_reduction_identity_when_already_orthogonal() {
        let rho_n = diag(&[1.0, 0.0]);
        let rho_s = diag(&[0.0, 1.0]);
        let (theta0, reduced) = orthogonal_reduction(&rho_n, &rho_s, 0.05).unwrap();
        assert_relative_eq!(theta0, 0.05, epsilon = 1e-12);
        assert!(max_abs_entry(&(reduced.entries() - rho_s.entries())) <= 1e-12);
    }

    #[test]
    fn orthogonal_reduction_rejects_support_preserving() {
        let rho = diag(&[0.6, 0.4]);
        assert!(matches!(
            orthogonal_reduction(&rho, &rho, 0.1),
            Err(Error::FullySupportPreserving { .. })
        ));
    }

    #[test]
    fn orthogonal_reduction_qutrit_case() {
        let rho_n = diag(&[1.0, 0.0, 0.0]);
        let rho_s = diag(&[0.5, 0.25, 0.25]);
        let (theta0, reduced) = orthogonal_reduction(&rho_n, &rho_s, 0.1).unwrap();
        assert_relative_eq!(theta0, 0.05, epsilon = 1e-12);
        let expected = diag(&[0.0, 0.5, 0.5]);
        assert!(max_abs_entry(&(reduced.entries() - expected.entries())) <= 1e-12);
    }

    #[test]
    fn depolarize_cases() {
        let rho = diag(&[1.0, 0.0]);
        assert_eq!(depolarize(&rho, 0.0).unwrap(), rho);
        let fully = depolarize(&rho, 1.0).unwrap();
        assert!(max_abs_entry(&(fully.entries() - DensityMatrix::maximally_mixed(2).entries())) <= 1e-15);
        let partial = depolarize(&rho, 0.2).unwrap();
        assert_relative_eq!(partial.entries()[(0, 0)].re, 0.9, epsilon = 1e-15);
        assert_relative_eq!(partial.entries()[(1, 1)].re, 0.1, epsilon = 1e-15);
        assert!(depolarize(&rho, -0.1).is_err());
    }

    #[test]
    fn support_projectors_cases() {
        let rho = diag(&[1.0, 0.0]);
        let (par, perp) = support_projectors(&rho, RANK_TOL);
        assert!(max_abs_entry(&(&par - diag(&[1.0, 0.0]).entries())) <= 1e-12);
        assert!(max_abs_entry(&(&perp - diag(&[0.0, 1.0]).entries().clone())) <= 1e-12);

        let full = diag(&[0.6, 0.4]);
        let (par, perp) = support_projectors(&full, RANK_TOL);
        assert!(max_abs_entry(&(&par - CMat::identity(2, 2))) <= 1e-12);
        assert!(max_abs_entry(&perp) <= 1e-12);

        let rho3 = diag(&[0.7, 0.3, 0.0]);
        let (par, _) = support_projectors(&rho3, RANK_TOL);
        let expected = CMat::from_diagonal(&CVec::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]));
        assert!(max_abs_entry(&(&par - expected)) <= 1e-12);
    }

    fn qubit_jump(p: f64) -> Vec<CMat> {
        // K0 = diag(sqrt(1-p), 1), K1 = sqrt(p) |1><0|
        let k0 = CMat::from_diagonal(&CVec::from_vec(vec![
            Complex64::new((1.0 - p).sqrt(), 0.0),
            Complex64::new(1.0, 0.0),
        ]));
        let mut k1 = CMat::zeros(2, 2);
        k1[(1, 0)] = Complex64::new(p.sqrt(), 0.0);
        vec![k0, k1]
    }

    #[test]
    fn kraus_reduced_signal_jump_channel() {
        let p = 0.05;
        let rho_i = diag(&[1.0, 0.0]);
        let (theta, scenario) = kraus_reduced_signal(&qubit_jump(p), 0, 1, &rho_i, RANK_TOL).unwrap();
        assert_relative_eq!(theta, p, epsilon = 1e-12);
        assert_relative_eq!(scenario.theta0(), p, epsilon = 1e-12);
        // rho_n = |0><0|, rho_s = |1><1|
        assert!(max_abs_entry(&(scenario.rho_n().entries() - diag(&[1.0, 0.0]).entries())) <= 1e-12);
        assert!(max_abs_entry(&(scenario.rho_s().entries() - diag(&[0.0, 1.0]).entries())) <= 1e-12);
    }

    #[test]
    fn kraus_reduced_signal_rejects_vanishing_signal() {
        // Signal operator annihilates rho_i: K1 = sqrt(p) |0><1| acting on |0><0|.
        let p: f64 = 0.05;
        let k0 = CMat::from_diagonal(&CVec::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new((1.0 - p).sqrt(), 0.0),
        ]));
        let mut k1 = CMat::zeros(2, 2);
        k1[(0, 1)] = Complex64::new(p.sqrt(), 0.0);
        let rho_i = diag(&[1.0, 0.0]);
        assert!(matches!(
            kraus_reduced_signal(&[k0, k1], 0, 1, &rho_i, RANK_TOL),
            Err(Error::ZeroSignalWeight { .. })
        ));
    }

    #[test]
    fn kraus_reduced_signal_zero_when_inside_noise_support() {
        // Noise fills the whole space, signal output lands inside it.
        let p: f64 = 0.1;
        let q: f64 = 0.2;
        // K0 = sqrt(1-p-q) I, K1 (noise) = sqrt(q) X, K2 (signal) = sqrt(p) X.
        let x = {
            let mut m = CMat::zeros(2, 2);
            m[(0, 1)] = Complex64::new(1.0, 0.0);
            m[(1, 0)] = Complex64::new(1.0, 0.0);
            m
        };
        let k0 = CMat::identity(2, 2).scale((1.0 - p - q).sqrt());
        let k1 = x.scale(q.sqrt());
        let k2 = x.scale(p.sqrt());
        let rho_i = DensityMatrix::new(CMat::from_fn(2, 2, |i, j| {
            // |+><+| so both noise and signal outputs are full rank.
            let _ = (i, j);
            Complex64::new(0.5, 0.0)
        }))
        .unwrap();
        let (theta, _) = kraus_reduced_signal(&[k0, k1, k2], 1, 1, &rho_i, RANK_TOL).unwrap();
        assert!(theta.abs() <= 1e-10);
    }

    #[test]
    fn kraus_requires_normalization() {
        let mut k1 = CMat::zeros(2, 2);
        k1[(1, 0)] = Complex64::new(0.3, 0.0);
        let ops = vec![CMat::identity(2, 2), k1];
        let rho_i = diag(&[1.0, 0.0]);
        assert!(matches!(
            kraus_reduced_signal(&ops, 0, 1, &rho_i, RANK_TOL),
            Err(Error::KrausNotNormalized { .. })
        ));
    }

    #[test]
    fn lindblad_zero_kappa_gives_zero() {
        let h = CMat::zeros(2, 2);
        let mut l = CMat::zeros(2, 2);
        l[(1, 0)] = Complex64::new(1.0, 0.0);
        let rho_i = diag(&[1.0, 0.0]);
        let theta0 =
            lindblad_reduced_signal(&h, &[l], &[0.0], 0, 1, &rho_i, 0.01).unwrap();
        assert_eq!(theta0, 0.0);
    }

    #[test]
    fn lindblad_pure_initial_state_single_jump() {
        let h = CMat::zeros(2, 2);
        let mut l = CMat::zeros(2, 2);
        l[(1, 0)] = Complex64::new(1.0, 0.0);
        let rho_i = diag(&[1.0, 0.0]);
        let theta0 =
            lindblad_reduced_signal(&h, &[l], &[1.0], 0, 1, &rho_i, 0.01).unwrap();
        assert_relative_eq!(theta0, 0.01, epsilon = 1e-12);
    }

    #[test]
    fn lindblad_rejects_large_t() {
        let h = CMat::zeros(2, 2);
        let mut l = CMat::zeros(2, 2);
        l[(1, 0)] = Complex64::new(1.0, 0.0);
        let rho_i = diag(&[1.0, 0.0]);
        assert!(matches!(
            lindblad_reduced_signal(&h, &[l], &[1.0], 0, 1, &rho_i, 2.0),
            Err(Error::TTooLarge { .. })
        ));
    }

    #[test]
    fn lindblad_signal_inside_noise_support_is_zero() {
        // Noise dissipator spreads the state over the full space; the signal
        // dephasing operator keeps it there.
        let h = CMat::zeros(2, 2);
        let mut raise = CMat::zeros(2, 2);
        raise[(1, 0)] = Complex64::new(1.0, 0.0);
        let z = CMat::from_diagonal(&CVec::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ]));
        let rho_i = diag(&[1.0, 0.0]);
        let theta0 =
            lindblad_reduced_signal(&h, &[raise, z], &[1.0, 1.0], 1, 1, &rho_i, 0.01).unwrap();
        assert!(theta0.abs() <= 1e-10);
    }

    #[test]
    fn random_scenario_shapes_and_determinism() {
        let scenario = random_scenario(2, 1, 1, 0.1, None, 42).unwrap();
        assert_eq!(scenario.r_n(), 1);
        assert_eq!(scenario.r_s(), 1);
        assert_eq!(scenario.dim(), 2);

        let again = random_scenario(2, 1, 1, 0.1, None, 42).unwrap();
        assert_eq!(scenario.to_json().unwrap(), again.to_json().unwrap());
    }

    #[test]
    fn random_scenario_respects_gap_floor() {
        let scenario = random_scenario(4, 2, 1, 0.05, Some(0.2), 3).unwrap();
        let floor = (0.05 + 0.2) / 0.95;
        let spectrum = scenario.rho_n().spectrum(RANK_TOL);
        for &v in spectrum.values().iter().take(spectrum.rank()) {
            assert!(v >= floor - 1e-10, "eigenvalue {v} below floor {floor}");
        }
    }

    #[test]
    fn random_scenario_infeasible_gap() {
        // floor = (0.16 + 0.4)/0.84 = 0.667, r_n = 2 needs 1.33 > 1.
        assert!(matches!(
            random_scenario(4, 2, 1, 0.16, Some(0.4), 5),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn random_scenario_orthogonality_and_block_spectrum() {
        let scenario = random_scenario(6, 2, 2, 0.1, None, 9).unwrap();
        assert!(scenario.is_orthogonal(1e-10));

        let mixed = scenario.mixed_state(0.1).unwrap();
        let mut expected: Vec<f64> = scenario
            .rho_n()
            .spectrum(RANK_TOL)
            .values()
            .iter()
            .map(|&v| 0.9 * v)
            .chain(
                scenario
                    .rho_s()
                    .spectrum(RANK_TOL)
                    .values()
                    .iter()
                    .map(|&v| 0.1 * v),
            )
            .collect();
        expected.sort_by(|a, b| b.partial_cmp(a).unwrap());
        expected.resize(6, 0.0);
        let got = mixed.spectrum(RANK_TOL);
        for (g, e) in got.values().iter().zip(&expected) {
            assert_relative_eq!(g, e, epsilon = 1e-10);
        }
    }

    #[test]
    fn scenario_json_round_trip() {
        let scenario = random_scenario(3, 1, 1, 0.07, Some(0.3), 123).unwrap();
        let json = scenario.to_json().unwrap();
        let back = SensingScenario::from_json(&json).unwrap();
        assert_eq!(back.seed(), Some(123));
        assert!(max_abs_entry(&(back.rho_n().entries() - scenario.rho_n().entries())) <= 1e-15);
        assert!(max_abs_entry(&(back.rho_s().entries() - scenario.rho_s().entries())) <= 1e-15);
        assert_eq!(back.theta0(), scenario.theta0());
        assert_eq!(back.lambda_gap(), scenario.lambda_gap());
    }

    #[test]
    fn scenario_json_rejects_unknown_fields() {
        let scenario = random_scenario(2, 1, 1, 0.1, None, 1).unwrap();
        let mut value: serde_json::Value =
            serde_json::from_str(&scenario.to_json().unwrap()).unwrap();
        value["extra"] = serde_json::json!(1);
        assert!(SensingScenario::from_json(&value.to_string()).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        // Non-Hermitian
        let mut m = CMat::identity(2, 2).scale(0.5);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        // Wrong trace
        assert!(DensityMatrix::from_diagonal(&[0.5, 0.6]).is_err());
        // Negative eigenvalue
        assert!(DensityMatrix::from_diagonal(&[1.2, -0.2]).is_err());
    }

    #[test]
    fn kraus_reduction_lossless_when_orthogonal() {
        // Signal output already orthogonal to the noise: reduced theta
        // reproduces vartheta.
        let p = 0.07;
        let rho_i = diag(&[1.0, 0.0]);
        let (theta, scenario) = kraus_reduced_signal(&qubit_jump(p), 0, 1, &rho_i, RANK_TOL).unwrap();
        assert_relative_eq!(theta, scenario.theta0(), epsilon = 1e-12);
    }
}
