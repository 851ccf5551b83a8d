//! Information quantities for the detection problem and the asymptotic
//! sample-complexity calculator.
//!
//! The quantum relative entropy is computed by eigendecomposition with an
//! explicit infinite branch: when the support of `rho` leaks outside the
//! support of `sigma` the divergence is tagged [`Divergence::Infinite`]
//! rather than overflowing through a log of zero.

use crate::error::{Error, Result};
use crate::linalg::{is_hermitian, trace_re, CMat};
use crate::statemodel::{DensityMatrix, SensingScenario};
use crate::RANK_TOL;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Extended-real value of a relative entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Divergence::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Divergence::Finite(v) => Some(*v),
            Divergence::Infinite => None,
        }
    }

    /// Finite value, panicking on the infinite branch. For call sites that
    /// have already established mutual support.
    pub fn expect_finite(&self) -> f64 {
        self.finite().expect("divergence is finite")
    }
}

/// Quantum relative entropy D(rho || sigma) = tr rho (log rho - log sigma),
/// evaluated on the support of sigma. Returns the infinite branch when rho
/// has weight on the kernel of sigma.
pub fn kl_divergence(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Divergence> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    let (mu, u) = sigma.eigh();
    // Weight of rho on ker(sigma).
    let mut kernel_overlap = 0.0;
    for (j, &m) in mu.iter().enumerate() {
        if m <= RANK_TOL {
            let col = u.column(j);
            let expectation = (col.adjoint() * rho.entries() * col)[(0, 0)].re;
            kernel_overlap += expectation;
        }
    }
    if kernel_overlap > RANK_TOL {
        return Ok(Divergence::Infinite);
    }

    let (lam, _) = rho.eigh();
    let entropy_term: f64 = lam
        .iter()
        .filter(|&&l| l > RANK_TOL)
        .map(|&l| l * l.ln())
        .sum();

    let mut cross_term = 0.0;
    for (j, &m) in mu.iter().enumerate() {
        if m > RANK_TOL {
            let col = u.column(j);
            let expectation = (col.adjoint() * rho.entries() * col)[(0, 0)].re;
            cross_term += expectation * m.ln();
        }
    }
    Ok(Divergence::Finite(entropy_term - cross_term))
}

fn matrix_power(state: &DensityMatrix, exponent: f64) -> CMat {
    let (values, vectors) = state.eigh();
    let d = state.dim();
    let mut out = CMat::zeros(d, d);
    for (k, &v) in values.iter().enumerate() {
        let p = if v > 0.0 { v.powf(exponent) } else { 0.0 };
        let col = vectors.column(k);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] += col[i] * col[j].conj() * num_complex::Complex64::new(p, 0.0);
            }
        }
    }
    out
}

/// Quantum Tsallis relative entropy (1 - tr rho^q sigma^(1-q)) / (1 - q) for
/// q in (0, 1). Converges to [`kl_divergence`] as q -> 1.
pub fn tsallis_divergence(rho: &DensityMatrix, sigma: &DensityMatrix, q: f64) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::OutOfRange {
            name: "q",
            value: q,
            range: "(0, 1)",
        });
    }
    let a = matrix_power(rho, q);
    let b = matrix_power(sigma, 1.0 - q);
    let overlap = trace_re(&(a * b));
    Ok((1.0 - overlap) / (1.0 - q))
}

/// First-order divergence of a support-extending perturbation:
/// `vartheta0 * tr(Delta_perp)`. Errors on support-preserving scenarios,
/// where the expansion starts at second order instead.
pub fn kl_first_order(scenario: &SensingScenario, vartheta0: f64) -> Result<f64> {
    let tr_delta_perp = scenario.signal_overlap_perp();
    if tr_delta_perp <= RANK_TOL {
        return Err(Error::SupportPreserving);
    }
    Ok(vartheta0 * tr_delta_perp)
}

/// Scalar function whose first divided differences fill the table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    /// Natural logarithm; requires strictly positive eigenvalues.
    Log,
    /// x^p for the Tsallis exponent p = 1 - q in (0, 1).
    Pow { exponent: f64 },
}

impl Generator {
    fn eval(&self, x: f64) -> f64 {
        match self {
            Generator::Log => x.ln(),
            Generator::Pow { exponent } => x.powf(*exponent),
        }
    }

    fn derivative(&self, x: f64) -> f64 {
        match self {
            Generator::Log => 1.0 / x,
            Generator::Pow { exponent } => exponent * x.powf(exponent - 1.0),
        }
    }
}

/// Table of first divided differences of a generator function over a list of
/// eigenvalues, with the extended convention (value 1 at a pair of zero
/// eigenvalues) available for power functions.
#[derive(Debug, Clone)]
pub struct DividedDifferenceTable {
    lambda: Vec<f64>,
    entries: DMatrix<f64>,
    extended: bool,
}

impl DividedDifferenceTable {
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn extended(&self) -> bool {
        self.extended
    }
}

const EQUAL_EIGENVALUE_TOL: f64 = 1e-12;

/// First divided differences of `generator` at the points `lambda`.
///
/// Case analysis: (f(a) - f(b)) / (a - b) for distinct points, f'(a) for
/// coincident positive points, and 1 for a coincident pair of zeros when the
/// extended convention is active.
pub fn divided_difference(
    generator: Generator,
    lambda: &[f64],
    extended: bool,
) -> Result<DividedDifferenceTable> {
    if lambda.is_empty() {
        return Err(Error::Invalid {
            what: "divided difference",
            detail: "empty eigenvalue list".into(),
        });
    }
    if lambda.iter().any(|&l| l < 0.0) {
        return Err(Error::Invalid {
            what: "divided difference",
            detail: "negative eigenvalue".into(),
        });
    }
    let has_zero = lambda.iter().any(|&l| l <= 0.0);
    if has_zero && !extended {
        return Err(Error::Invalid {
            what: "divided difference",
            detail: "zero eigenvalue requires the extended convention".into(),
        });
    }
    if has_zero && matches!(generator, Generator::Log) {
        return Err(Error::Invalid {
            what: "divided difference",
            detail: "log has no extended convention at zero eigenvalues".into(),
        });
    }
    let n = lambda.len();
    let mut entries = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let (a, b) = (lambda[j], lambda[k]);
            entries[(j, k)] = if (a - b).abs() > EQUAL_EIGENVALUE_TOL {
                (generator.eval(a) - generator.eval(b)) / (a - b)
            } else if a > 0.0 {
                generator.derivative(a)
            } else {
                // Coincident zeros under the extended convention.
                1.0
            };
        }
    }
    Ok(DividedDifferenceTable {
        lambda: lambda.to_vec(),
        entries,
        extended,
    })
}

/// Kubo-Mori-Bogoliubov quantum Fisher information of a support-preserving
/// perturbation `delta` at the state `rho_n`:
/// `sum_{j,k} [log]^{[1]}_{jk} |<j| delta |k>|^2` in the eigenbasis of
/// `rho_n`, restricted to its support.
pub fn kmb_fisher_information(rho_n: &DensityMatrix, delta: &CMat) -> Result<f64> {
    let d = rho_n.dim();
    if delta.shape() != (d, d) {
        return Err(Error::DimensionMismatch {
            left: delta.nrows(),
            right: d,
        });
    }
    if !is_hermitian(delta, 1e-8) {
        return Err(Error::Invalid {
            what: "perturbation",
            detail: "not Hermitian".into(),
        });
    }
    if delta.trace().norm() > 1e-8 {
        return Err(Error::Invalid {
            what: "perturbation",
            detail: format!("trace {:.3e} is not zero", delta.trace().norm()),
        });
    }
    let (values, vectors) = rho_n.eigh();
    let tilde = vectors.adjoint() * delta * &vectors;

    let support: Vec<usize> = (0..d).filter(|&i| values[i] > RANK_TOL).collect();
    for j in 0..d {
        for k in 0..d {
            let outside = values[j] <= RANK_TOL || values[k] <= RANK_TOL;
            if outside && tilde[(j, k)].norm() > 1e-8 {
                return Err(Error::SupportExtending);
            }
        }
    }

    let positive: Vec<f64> = support.iter().map(|&i| values[i]).collect();
    if positive.is_empty() {
        return Ok(0.0);
    }
    let table = divided_difference(Generator::Log, &positive, false)?;
    let mut fisher = 0.0;
    for (tj, &j) in support.iter().enumerate() {
        for (tk, &k) in support.iter().enumerate() {
            fisher += table.entries()[(tj, tk)] * tilde[(j, k)].norm_sqr();
        }
    }
    Ok(fisher)
}

/// KL divergence between Bernoulli(n) and Bernoulli(n + theta0), the
/// classical composite error exponent for a signal on a known background.
/// The n = 0 term is taken as zero; the boundary n + theta0 = 1 diverges.
pub fn bernoulli_kl(n: f64, theta0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&n) {
        return Err(Error::OutOfRange {
            name: "n",
            value: n,
            range: "[0, 1]",
        });
    }
    if theta0 < 0.0 || n + theta0 > 1.0 + 1e-15 {
        return Err(Error::OutOfRange {
            name: "theta0",
            value: theta0,
            range: "[0, 1 - n]",
        });
    }
    if theta0 == 0.0 {
        return Ok(0.0);
    }
    let first = if 1.0 - n - theta0 > 0.0 {
        (1.0 - n) * ((1.0 - n) / (1.0 - n - theta0)).ln()
    } else if n < 1.0 {
        return Ok(f64::INFINITY);
    } else {
        0.0
    };
    let second = if n > 0.0 { n * (n / (n + theta0)).ln() } else { 0.0 };
    Ok(first + second)
}

/// Composite error exponent of the DME-QSP Bernoulli statistics with an
/// unknown background in `(delta + mu_eps - sigma_eps, delta + mu_eps +
/// sigma_eps)`:
/// `theta0 + (delta + mu_eps + sigma_eps) log[(delta + mu_eps)/theta0] -
/// sigma_eps`.
///
/// Valid in the regime sigma_eps <= delta + mu_eps < theta0; outside it the
/// asymptotic expression has no meaning and an error is returned.
pub fn qsp_composite_exponent(
    theta0: f64,
    delta: f64,
    mu_eps: f64,
    sigma_eps: f64,
) -> Result<f64> {
    if !(theta0 > 0.0 && theta0 < 1.0) {
        return Err(Error::OutOfRange {
            name: "theta0",
            value: theta0,
            range: "(0, 1)",
        });
    }
    if delta < 0.0 || mu_eps < 0.0 || sigma_eps < 0.0 {
        return Err(Error::OutOfRange {
            name: "delta/mu_eps/sigma_eps",
            value: delta.min(mu_eps).min(sigma_eps),
            range: "[0, inf)",
        });
    }
    let background = delta + mu_eps;
    if sigma_eps > background || background >= theta0 {
        return Err(Error::AsymptoticRegimeViolated);
    }
    let log_term = if background + sigma_eps > 0.0 {
        (background + sigma_eps) * (background / theta0).ln()
    } else {
        0.0
    };
    Ok(theta0 + log_term - sigma_eps)
}

/// Cramer-Rao bound on the signal-to-noise ratio after M Bernoulli samples
/// with background n: `theta0 sqrt(M / [(n + theta0)(1 - n - theta0)])`.
pub fn snr_bound(n: f64, theta0: f64, m: u64) -> Result<f64> {
    if n < 0.0 || theta0 < 0.0 {
        return Err(Error::OutOfRange {
            name: "n/theta0",
            value: n.min(theta0),
            range: "[0, inf)",
        });
    }
    let p = n + theta0;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRange {
            name: "n + theta0",
            value: p,
            range: "(0, 1)",
        });
    }
    Ok(theta0 * (m as f64 / (p * (1.0 - p))).sqrt())
}

/// The asymptotic sample-complexity expressions. Absolute constants are not
/// fixed by the theory, so every formula is evaluated with a caller-supplied
/// prefactor (default 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexityFormula {
    LowerBound,
    Tomography,
    RankWss,
    PurityWss,
    GapWss,
    GapHybrid,
    DmeQsp,
}

impl std::str::FromStr for ComplexityFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lower_bound" => Ok(Self::LowerBound),
            "tomography" => Ok(Self::Tomography),
            "rank_wss" => Ok(Self::RankWss),
            "purity_wss" => Ok(Self::PurityWss),
            "gap_wss" => Ok(Self::GapWss),
            "gap_hybrid" => Ok(Self::GapHybrid),
            "dme_qsp" => Ok(Self::DmeQsp),
            other => Err(Error::Invalid {
                what: "complexity formula",
                detail: format!("unknown formula `{other}`"),
            }),
        }
    }
}

impl std::fmt::Display for ComplexityFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Self::LowerBound => "lower_bound",
            Self::Tomography => "tomography",
            Self::RankWss => "rank_wss",
            Self::PurityWss => "purity_wss",
            Self::GapWss => "gap_wss",
            Self::GapHybrid => "gap_hybrid",
            Self::DmeQsp => "dme_qsp",
        };
        write!(f, "{name}")
    }
}

/// A sample-complexity query: formula, named parameters, prefactor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexityQuery {
    pub formula: ComplexityFormula,
    pub params: BTreeMap<String, f64>,
    #[serde(default = "default_constant")]
    pub constant: f64,
}

fn default_constant() -> f64 {
    1.0
}

impl ComplexityQuery {
    pub fn new(formula: ComplexityFormula, params: BTreeMap<String, f64>) -> Self {
        Self {
            formula,
            params,
            constant: 1.0,
        }
    }
}

fn fetch(params: &BTreeMap<String, f64>, key: &'static str) -> Result<f64> {
    params.get(key).copied().ok_or(Error::MissingParameter(key))
}

fn fetch_unit_interval(params: &BTreeMap<String, f64>, key: &'static str) -> Result<f64> {
    let v = fetch(params, key)?;
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::OutOfRange {
            name: key,
            value: v,
            range: "(0, 1)",
        });
    }
    Ok(v)
}

fn fetch_positive(params: &BTreeMap<String, f64>, key: &'static str) -> Result<f64> {
    let v = fetch(params, key)?;
    if v <= 0.0 {
        return Err(Error::OutOfRange {
            name: key,
            value: v,
            range: "(0, inf)",
        });
    }
    Ok(v)
}

/// Evaluate the asymptotic sample complexity of the queried strategy with
/// unit constants times the query's prefactor.
pub fn sample_complexity(query: &ComplexityQuery) -> Result<f64> {
    if query.constant <= 0.0 {
        return Err(Error::OutOfRange {
            name: "constant",
            value: query.constant,
            range: "(0, inf)",
        });
    }
    let p = &query.params;
    let value = match query.formula {
        ComplexityFormula::LowerBound => {
            let theta0 = fetch_unit_interval(p, "theta0")?;
            let beta = fetch_unit_interval(p, "beta")?;
            (1.0 / beta).ln() / theta0
        }
        ComplexityFormula::Tomography => {
            let theta0 = fetch_unit_interval(p, "theta0")?;
            let beta = fetch_unit_interval(p, "beta")?;
            let r = fetch_positive(p, "r")?;
            let d = fetch_positive(p, "d")?;
            r * d * (1.0 / beta).ln() / (theta0 * theta0)
        }
        ComplexityFormula::RankWss => {
            let theta0 = fetch_unit_interval(p, "theta0")?;
            let beta = fetch_unit_interval(p, "beta")?;
            let r_n = fetch_positive(p, "r_n")?;
            r_n * r_n * (1.0 / beta).ln() / theta0
        }
        ComplexityFormula::PurityWss => {
            let theta0 = fetch_unit_interval(p, "theta0")?;
            let beta = fetch_unit_interval(p, "beta")?;
            (1.0 / beta).ln() / theta0
        }
        ComplexityFormula::GapWss => {
            let theta0 = fetch_unit_interval(p, "theta0")?;
            let beta = fetch_unit_interval(p, "beta")?;
            let r = fetch_positive(p, "r")?;
            let lambda = fetch_positive(p, "lambda")?;
            let scale = theta0.min(lambda);
            r * r * (1.0 / beta).ln() / (scale * scale)
        }
        ComplexityFormula::GapHybrid => {
            let theta0 = fetch_unit_interval(p, "theta0")?;
            let beta = fetch_unit_interval(p, "beta")?;
            let r = fetch_positive(p, "r")?;
            let r_n = fetch_positive(p, "r_n")?;
            let lambda = fetch_positive(p, "lambda")?;
            let log_beta = (1.0 / beta).ln();
            r * r * log_beta / (lambda * lambda) + r_n * r_n * log_beta / theta0
        }
        ComplexityFormula::DmeQsp => {
            let theta0 = fetch_unit_interval(p, "theta0")?;
            let beta = fetch_unit_interval(p, "beta")?;
            let delta = fetch_unit_interval(p, "delta")?;
            let lambda = fetch_positive(p, "lambda")?;
            let epsilon = fetch_positive(p, "epsilon")?;
            let log_delta = (1.0 / delta).ln();
            log_delta * log_delta * (1.0 / beta).ln() / (lambda * lambda * epsilon * theta0)
        }
    };
    Ok(query.constant * value)
}
