use thiserror::Error;

/// Failures raised by the solver, the spectra tools and the lamp propagator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {requirement}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The trace-constrained steady-state system has no unique solution.
    #[error("steady-state system is singular (condition estimate {condition:.3e})")]
    SingularSystem { condition: f64 },

    #[error("velocity node {node}: {source}")]
    AtNode { node: usize, source: Box<Error> },

    #[error("detuning index {index}: {source}")]
    AtDetuning { index: usize, source: Box<Error> },

    #[error("probe Rabi frequency is zero; the susceptibility is only defined for a driven probe")]
    ZeroProbe,

    #[error("no absorption dip inside the central detuning window")]
    NoDip,

    #[error("integration step {step:.3e} m fell below the minimum {minimum:.3e} m")]
    StepUnderflow { step: f64, minimum: f64 },

    #[error("density matrix is not physical: {what} = {value:.3e}")]
    NonPhysicalState { what: &'static str, value: f64 },
}

impl Error {
    pub(crate) fn at_node(self, node: usize) -> Self {
        Error::AtNode {
            node,
            source: Box::new(self),
        }
    }

    pub(crate) fn at_detuning(self, index: usize) -> Self {
        Error::AtDetuning {
            index,
            source: Box::new(self),
        }
    }

    /// Strips the node/detuning location wrappers.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::AtNode { source, .. } | Error::AtDetuning { source, .. } => source.root_cause(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require(
    ok: bool,
    name: &'static str,
    value: f64,
    requirement: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            requirement,
        })
    }
}
