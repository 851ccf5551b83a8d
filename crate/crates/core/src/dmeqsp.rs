//! Eigenvalue-filter model of the DME-QSP channel.
//!
//! The channel is simulated at the level of the induced statistics: a filter
//! pair (f, g) with |f|^2 + |g|^2 = 1 acts on each eigenvalue `lambda` of
//! the state at the DME evolution scale `y = lambda x`, and the ancilla
//! flips to |1> with probability `sum_j lambda_j |g(lambda_j x)|^2`. Cross
//! terms between eigenspaces never affect the flag statistics and are not
//! represented.
//!
//! Two filter modes exist: an ideal step with failure level `delta` outside
//! the spectral gap, and a trigonometric-polynomial approximant (an
//! error-function step fitted by a cosine series) whose achieved failure
//! level is measured on a grid and reported.

use crate::error::{Error, Result};
use crate::seeding;
use crate::statemodel::SensingScenario;
use crate::{Decision, RANK_TOL};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterMode {
    Ideal,
    Polynomial,
}

/// Eigenvalue step-filter. `threshold` and `gap` live in eigenvalue space;
/// the polynomial mode evaluates its cosine series at `y = lambda * x`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterSpec {
    pub mode: FilterMode,
    /// Step location in eigenvalue space.
    pub threshold: f64,
    /// Worst-case filter failure outside the gap (achieved value for the
    /// polynomial mode).
    pub delta: f64,
    /// DME evolution parameter.
    pub x: f64,
    pub degree: Option<usize>,
    /// Cosine-series coefficients of the signal-flag amplitude g.
    pub coefficients: Option<Vec<f64>>,
    /// Trace-distance error budget estimate.
    pub epsilon: f64,
    /// Eigenvalue interval with no accuracy guarantee.
    pub gap: (f64, f64),
}

impl FilterSpec {
    /// |g(lambda x)|^2, the probability that an eigenvector at `lambda` is
    /// flagged as signal.
    pub fn g_sq(&self, lambda: f64) -> f64 {
        match self.mode {
            FilterMode::Ideal => {
                if lambda < self.threshold {
                    1.0 - self.delta
                } else {
                    self.delta
                }
            }
            FilterMode::Polynomial => {
                let y = lambda * self.x;
                let coeffs = self
                    .coefficients
                    .as_ref()
                    .expect("polynomial filter carries coefficients");
                let amp: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, &a)| a * (k as f64 * y).cos())
                    .sum();
                amp.clamp(0.0, 1.0).powi(2)
            }
        }
    }

    /// |f(lambda x)|^2 = 1 - |g(lambda x)|^2.
    pub fn f_sq(&self, lambda: f64) -> f64 {
        1.0 - self.g_sq(lambda)
    }
}

/// Ideal step filter for a scenario with signal scale `theta0` and spectral
/// gap `lambda_gap`: flags eigenvalues below the gap midpoint with
/// probability 1 - delta and above it with probability delta.
pub fn build_ideal_filter(theta0: f64, lambda_gap: f64, delta: f64) -> Result<FilterSpec> {
    if !(theta0 > 0.0 && theta0 < 1.0) {
        return Err(Error::OutOfRange {
            name: "theta0",
            value: theta0,
            range: "(0, 1)",
        });
    }
    if lambda_gap <= 0.0 {
        return Err(Error::OutOfRange {
            name: "lambda_gap",
            value: lambda_gap,
            range: "(0, inf)",
        });
    }
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "[0, 1/2)",
        });
    }
    Ok(FilterSpec {
        mode: FilterMode::Ideal,
        threshold: theta0 + lambda_gap / 2.0,
        delta,
        x: 1.0,
        degree: None,
        coefficients: None,
        epsilon: 0.0,
        gap: (theta0, theta0 + lambda_gap),
    })
}

/// Number of quadrature intervals for the cosine-coefficient integrals.
const FIT_INTERVALS: usize = 4096;
/// Grid used to measure the achieved failure level.
const DELTA_GRID: usize = 4000;

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Smoothed-step approximant of the given degree: an error-function step
/// centered mid-gap, projected onto the cosine basis on [0, pi].
///
/// The eigenvalue-space gap is fixed to (lambda_gap / 8, lambda_gap): the
/// signal plateau extends to an eighth of the gap, matching the min/8
/// resolution convention of the gap tests, and the noise floor sits at the
/// gap itself. The achieved failure level is measured on a grid and stored
/// in `delta`; the trace-distance estimate is `log(1/delta) x / lambda_gap`.
pub fn build_poly_filter(lambda_gap: f64, x: f64, degree: usize) -> Result<FilterSpec> {
    if degree < 1 {
        return Err(Error::OutOfRange {
            name: "degree",
            value: degree as f64,
            range: "[1, inf)",
        });
    }
    if lambda_gap <= 0.0 || lambda_gap > 1.0 {
        return Err(Error::OutOfRange {
            name: "lambda_gap",
            value: lambda_gap,
            range: "(0, 1]",
        });
    }
    let product = lambda_gap * x;
    if !(product > 0.0 && product < std::f64::consts::FRAC_PI_2) {
        return Err(Error::OutOfRange {
            name: "lambda_gap * x",
            value: product,
            range: "(0, pi/2)",
        });
    }
    if x > std::f64::consts::PI {
        return Err(Error::OutOfRange {
            name: "x",
            value: x,
            range: "(0, pi]",
        });
    }

    let gap = (lambda_gap / 8.0, lambda_gap);
    let threshold = lambda_gap / 2.0;
    let y_threshold = threshold * x;
    // Distance from the step to the nearest guaranteed plateau, in y.
    let reach = (threshold - gap.0) * x;
    // Balance the Gaussian tail at the plateau edge against the cosine
    // truncation at the requested degree.
    let width = (2.0 * reach / degree as f64).sqrt();
    let target = |y: f64| 0.5 * (1.0 + erf((y_threshold - y) / width));

    let pi = std::f64::consts::PI;
    let mut coefficients = Vec::with_capacity(degree + 1);
    coefficients.push(simpson(target, 0.0, pi, FIT_INTERVALS) / pi);
    for k in 1..=degree {
        let integral = simpson(|y| target(y) * (k as f64 * y).cos(), 0.0, pi, FIT_INTERVALS);
        coefficients.push(2.0 * integral / pi);
    }

    let mut spec = FilterSpec {
        mode: FilterMode::Polynomial,
        threshold,
        delta: 0.0,
        x,
        degree: Some(degree),
        coefficients: Some(coefficients),
        epsilon: 0.0,
        gap,
    };
    let achieved = achieved_delta(&spec);
    if achieved >= 0.5 {
        return Err(Error::FilterIneffective { achieved, degree });
    }
    spec.delta = achieved;
    spec.epsilon = (1.0 / achieved).ln() * x / lambda_gap;
    Ok(spec)
}

/// Max deviation of |g|^2 from {1, 0} over eigenvalues outside the gap.
fn achieved_delta(spec: &FilterSpec) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..=DELTA_GRID {
        let lambda = i as f64 / DELTA_GRID as f64;
        if lambda <= spec.gap.0 {
            worst = worst.max((1.0 - spec.g_sq(lambda)).abs());
        } else if lambda >= spec.gap.1 {
            worst = worst.max(spec.g_sq(lambda).abs());
        }
    }
    worst
}

/// Probability of the ancilla flag |1> when the channel acts on the
/// scenario's state at mixing parameter `theta`:
/// `p = sum_j lambda_j |g(lambda_j x)|^2`.
///
/// Requires an orthogonal (block-diagonal) scenario, and every nonzero
/// eigenvalue must stay clear of the filter's declared gap.
pub fn apply_qsp_channel(
    scenario: &SensingScenario,
    theta: f64,
    filter: &FilterSpec,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            range: "[0, 1]",
        });
    }
    if !scenario.is_orthogonal(1e-10) {
        return Err(Error::Invalid {
            what: "scenario",
            detail: "DME-QSP channel requires orthogonal noise and signal".into(),
        });
    }
    let mixed = scenario.mixed_state(theta)?;
    let spectrum = mixed.spectrum(RANK_TOL);
    let (lo, hi) = filter.gap;
    for &lambda in spectrum.values() {
        if lambda > RANK_TOL && lambda > lo + 1e-9 && lambda < hi - 1e-9 {
            return Err(Error::ScaleMismatch {
                eigenvalue: lambda,
                lo,
                hi,
            });
        }
    }
    let p: f64 = spectrum
        .values()
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * filter.g_sq(l))
        .sum();
    Ok(p.clamp(0.0, 1.0))
}

/// One batch of ancilla measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernoulliRun {
    pub p_true: f64,
    pub m_ber: usize,
    pub successes: usize,
    pub seed: u64,
}

/// Binomial draw of the flag counts, deterministic given the seed.
pub fn sample_flag_counts(p: f64, m_ber: usize, seed: u64) -> Result<BernoulliRun> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    let mut rng = seeding::rng_from(seed, &[]);
    let successes = sample_binomial(p, m_ber, &mut rng);
    Ok(BernoulliRun {
        p_true: p,
        m_ber,
        successes,
        seed,
    })
}

pub(crate) fn sample_binomial<R: rand::Rng + ?Sized>(p: f64, m: usize, rng: &mut R) -> usize {
    (0..m).filter(|_| rng.random::<f64>() < p).count()
}

/// Count threshold at the midpoint of the expected counts under the two
/// hypotheses; the binomial likelihood-ratio test reduces to such a count
/// threshold.
pub fn midpoint_decision(run: &BernoulliRun, p0: f64, p1: f64) -> Decision {
    if (run.successes as f64) > run.m_ber as f64 * 0.5 * (p0 + p1) {
        Decision::H1
    } else {
        Decision::H0
    }
}

/// Resource budget of the DME-QSP strategy at unit constants.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QspBudget {
    /// Copies consumed per Bernoulli measurement.
    pub m_qsp: f64,
    /// Trace-distance error of the filtered channel.
    pub epsilon: f64,
    /// Number of Bernoulli measurements.
    pub m_ber: f64,
    /// Total copies.
    pub m_tot: f64,
}

/// `epsilon = log(1/delta) x / lambda`, `M_qsp = log(1/delta)^2 /
/// (lambda^2 epsilon)`, `M_ber = log(1/beta) / theta0`, `M_tot = M_ber
/// M_qsp`. Absolute constants are not specified by the asymptotic theory;
/// everything is reported at unit constants.
pub fn qsp_budget(
    delta: f64,
    lambda_gap: f64,
    x: f64,
    beta: f64,
    theta0: f64,
) -> Result<QspBudget> {
    for (name, value) in [("delta", delta), ("beta", beta), ("theta0", theta0)] {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::OutOfRange {
                name: match name {
                    "delta" => "delta",
                    "beta" => "beta",
                    _ => "theta0",
                },
                value,
                range: "(0, 1)",
            });
        }
    }
    if lambda_gap <= 0.0 {
        return Err(Error::OutOfRange {
            name: "lambda_gap",
            value: lambda_gap,
            range: "(0, inf)",
        });
    }
    if x <= 0.0 {
        return Err(Error::OutOfRange {
            name: "x",
            value: x,
            range: "(0, inf)",
        });
    }
    let log_delta = (1.0 / delta).ln();
    let epsilon = log_delta * x / lambda_gap;
    let m_qsp = log_delta * log_delta / (lambda_gap * lambda_gap * epsilon);
    let m_ber = (1.0 / beta).ln() / theta0;
    Ok(QspBudget {
        m_qsp,
        epsilon,
        m_ber,
        m_tot: m_ber * m_qsp,
    })
}
