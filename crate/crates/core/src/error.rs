use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid {what}: {detail}")]
    Invalid { what: &'static str, detail: String },

    #[error("fully support-preserving signal: tr(rho_s Pi_perp) = {overlap:.3e}")]
    FullySupportPreserving { overlap: f64 },

    #[error("support-preserving perturbation: the first-order divergence vanishes, use kmb_fisher_information")]
    SupportPreserving,

    #[error("support-extending perturbation: KMB Fisher information is undefined, use kl_first_order")]
    SupportExtending,

    #[error("Kraus set not normalized: max |sum K^dag K - I| = {deviation:.3e}")]
    KrausNotNormalized { deviation: f64 },

    #[error("signal weight {weight:.3e} below rank tolerance: no detectable signal channel")]
    ZeroSignalWeight { weight: f64 },

    #[error("t too large: short-time state has eigenvalue {min_eig:.3e} < 0")]
    TTooLarge { min_eig: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),

    #[error("asymptotic regime violated: require sigma_eps <= delta + mu_eps < theta0")]
    AsymptoticRegimeViolated,

    #[error("unsupported (m, d) = ({m}, {d}): Schur basis covers m, d in {{2, 3}}")]
    UnsupportedSchurGrid { m: usize, d: usize },

    #[error("filter ineffective: achieved delta {achieved:.3} >= 0.5 at degree {degree}")]
    FilterIneffective { achieved: f64, degree: usize },

    #[error(
        "filter/scenario scale mismatch: eigenvalue {eigenvalue:.6} falls inside the declared gap ({lo:.6}, {hi:.6})"
    )]
    ScaleMismatch { eigenvalue: f64, lo: f64, hi: f64 },

    #[error("rank estimation unstable: no strict majority across phase-1 diagrams")]
    RankEstimationUnstable,

    #[error("no trials")]
    NoTrials,

    #[error("target unreachable at desk scale: exceeded the copy budget of {cap}")]
    TargetUnreachable { cap: u64 },

    #[error("degenerate spread: need at least 3 points spanning a factor of 4 in the control")]
    DegenerateSpread,

    #[error("serialization: {0}")]
    Serialization(String),
}
