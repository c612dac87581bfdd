use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("not a diffeomorphism: minimal derivative {min_derivative:.3e}")]
    NotADiffeomorphism { min_derivative: f64 },
    #[error("refit needs more than {cap} modes")]
    ModeOverflow { cap: usize },
    #[error("root solve failed to converge near target {target}")]
    ConvergenceFailure { target: f64 },
    #[error("shrunken intervals leave the circle uncovered near angle {angle}")]
    CoverageGap { angle: f64 },
    #[error("outside the admissible neighbourhood: displacement {displacement:.3e} >= bound {bound:.3e}")]
    OutsideNeighborhood { displacement: f64, bound: f64 },
    #[error("slicing did not reach the neighbourhood with {slices} slices")]
    SlicingFailure { slices: usize },
    #[error("intervals already fit inside one proper interval")]
    NotApplicable,
    #[error("no admissible three-interval covering: {0}")]
    Infeasible(String),
    #[error("step {step} is too large for the admissible neighbourhood")]
    StepTooLarge { step: f64 },
    #[error("word would exceed {cap} factors")]
    WordTooLong { cap: usize },
    #[error("matrix is not in PSL(2,R): {0}")]
    NotInPsl(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Errors caused by malformed or out-of-contract input, as opposed to
    /// numerical failures on valid input.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::CoverageGap { .. }
                | Error::OutsideNeighborhood { .. }
                | Error::StepTooLarge { .. }
                | Error::NotApplicable
                | Error::NotInPsl(_)
                | Error::InvalidArgument(_)
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotADiffeomorphism { .. } => "NotADiffeomorphism",
            Error::ModeOverflow { .. } => "ModeOverflow",
            Error::ConvergenceFailure { .. } => "ConvergenceFailure",
            Error::CoverageGap { .. } => "CoverageGap",
            Error::OutsideNeighborhood { .. } => "OutsideNeighborhood",
            Error::SlicingFailure { .. } => "SlicingFailure",
            Error::NotApplicable => "NotApplicable",
            Error::Infeasible(_) => "Infeasible",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::WordTooLong { .. } => "WordTooLong",
            Error::NotInPsl(_) => "NotInPsl",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}
