use thiserror::Error;

/// Errors surfaced by the numerical kernels.
///
/// Failures are split so callers can map them onto distinct exit codes:
/// configuration misuse versus genuine numeric aborts (blow-up, sampler
/// starvation, step-budget exhaustion).
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty factor list passed to integral_product")]
    EmptyFactorList,

    #[error("coefficient vector has length {got}, band {band} requires {want}")]
    BadCoefficientCount { band: usize, got: usize, want: usize },

    #[error("explicit formula not available for k = {k} (only k = 2 is implemented)")]
    FormulaUnavailable { k: u32 },

    #[error("imaginary residue {residue:.3e} exceeds tolerance {tolerance:.3e} in {context}")]
    ImaginaryResidue { residue: f64, tolerance: f64, context: &'static str },

    #[error("solution blew up (non-finite coefficients) at t = {t}")]
    BlowUp {
        t: f64,
        /// The last finite state before the overflow, for post-mortems.
        last_state: Box<crate::spectral::SpectralState>,
    },

    #[error("adaptive integrator exhausted its budget of {max_steps} steps at alpha = {alpha}")]
    StepBudgetExhausted { max_steps: usize, alpha: f64 },

    #[error("adaptive integrator step size underflowed at alpha = {alpha} (tolerance unreachable)")]
    StepSizeUnderflow { alpha: f64 },

    #[error("rejection sampler starved: acceptance {acceptance:.3e} below 1%")]
    RejectionStarvation { acceptance: f64 },

    #[error("effective sample size collapsed: {ess:.1} of {m} members")]
    EssCollapse { ess: f64, m: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("serialization: {0}")]
    Serialization(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the computation itself (as opposed to misuse of
    /// the API); the CLI maps these to exit code 3.
    pub fn is_numeric_abort(&self) -> bool {
        matches!(
            self,
            Error::BlowUp { .. }
                | Error::StepBudgetExhausted { .. }
                | Error::StepSizeUnderflow { .. }
                | Error::RejectionStarvation { .. }
                | Error::EssCollapse { .. }
        )
    }
}
