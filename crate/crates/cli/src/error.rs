use std::fmt;

use theta_opers::curve::CurveError;
use theta_opers::kernels::KernelError;
use theta_opers::parse::ParseError;
use theta_opers::theta::ThetaError;

pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;
pub const EXIT_ON_THETA: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn theta_code(e: &ThetaError) -> i32 {
    match e {
        ThetaError::PointOnTheta { .. } => EXIT_ON_THETA,
        ThetaError::ToleranceTooSmall { .. } => EXIT_CONVERGENCE,
        _ => EXIT_INPUT,
    }
}

fn curve_code(e: &CurveError) -> i32 {
    match e {
        CurveError::QuadratureNonConvergent { .. } | CurveError::RiemannRelations | CurveError::RootFinding => {
            EXIT_CONVERGENCE
        }
        CurveError::Theta(t) => theta_code(t),
        _ => EXIT_INPUT,
    }
}

impl From<ThetaError> for CliError {
    fn from(e: ThetaError) -> Self {
        Self {
            code: theta_code(&e),
            message: e.to_string(),
        }
    }
}

impl From<CurveError> for CliError {
    fn from(e: CurveError) -> Self {
        Self {
            code: curve_code(&e),
            message: e.to_string(),
        }
    }
}

impl From<KernelError> for CliError {
    fn from(e: KernelError) -> Self {
        let code = match &e {
            _ if e.is_on_theta() => EXIT_ON_THETA,
            KernelError::Curve(c) => curve_code(c),
            KernelError::Theta(t) => theta_code(t),
            KernelError::SquareRootBranchUnresolvable { .. } => EXIT_CONVERGENCE,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        match e {
            ParseError::Curve(c) => c.into(),
            other => Self::input(other.to_string()),
        }
    }
}
