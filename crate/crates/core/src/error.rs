use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("polynomial contexts differ ({left} vs {right} variables)")]
    ContextMismatch { left: usize, right: usize },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("f must not involve u or v")]
    InvolvesUv,
}

/// Parse failure with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }

    /// Re-anchors an error from a single-line parse at `line`, offset by `col_offset`.
    pub fn at_line(self, line: usize, col_offset: usize) -> Self {
        Self {
            line,
            column: self.column + col_offset,
            message: self.message,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error("interior product of a 0-form")]
    DegreeZero,
    #[error("volume form must have top degree {expected}, got {found}")]
    NotTopDegree { expected: usize, found: usize },
    #[error("volume form has zero coefficient")]
    DegenerateVolume,
    #[error("divergence is not a polynomial for this volume form")]
    NonPolynomialDivergence,
    #[error("field has nonzero divergence {0}")]
    NonzeroDivergence(String),
    #[error("variable context mismatch: {0} vs {1}")]
    ContextMismatch(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuspensionError {
    #[error("f is constant")]
    ConstantF,
    #[error("f must not involve u or v")]
    FInvolvesUv,
    #[error("f lives in {found} variables, expected {expected}")]
    WrongContext { expected: usize, found: usize },
    #[error("field is not tangent: remainder {0}")]
    NotTangent(String),
    #[error("point is not on the surface: residual {0}")]
    OffSurface(String),
    #[error("singular point: d(uv - f) vanishes")]
    SingularPoint,
    #[error("empty sampling region")]
    EmptyRegion,
    #[error("sampling gave up after {0} attempts")]
    SamplingExhausted(usize),
    #[error("zero-fiber parametrization does not map into f = 0")]
    BadParametrization,
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("base field coefficient involves u or v")]
    BaseInvolvesUv,
    #[error("base field must have {expected} coefficients, got {found}")]
    WrongArity { expected: usize, found: usize },
    #[error("no symbolic flow: the field is not a shear chain")]
    NoSymbolicFlow,
    #[error("shear pullback requires g(p) = 0, got {0}")]
    GNonzeroAtPoint(String),
    #[error("shear pullback requires g in the kernel of the field, got {0}")]
    GNotInKernel(String),
    #[error("numeric flow blew up at t = {0}")]
    BlowUp(String),
    #[error("bad basepoint: {0}")]
    BadBasepoint(String),
    #[error(transparent)]
    Suspension(#[from] SuspensionError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriterionError {
    #[error("generator {index} ({generator}) is not in the kernel: field maps it to {image}")]
    NotInKernel { index: usize, generator: String, image: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("ideal generators must be nonzero")]
    EmptyIdeal,
    #[error(transparent)]
    Suspension(#[from] SuspensionError),
    #[error(transparent)]
    Lift(#[from] LiftError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApproxError {
    #[error("empty dictionary")]
    EmptyDictionary,
    #[error("no sample points")]
    NoSamples,
    #[error("dictionary entry {index} ({label}) has nonzero divergence {divergence}")]
    DivergentEntry { index: usize, label: String, divergence: String },
    #[error("target field has nonzero divergence {0}")]
    DivergentTarget(String),
    #[error(transparent)]
    Suspension(#[from] SuspensionError),
    #[error(transparent)]
    Lift(#[from] LiftError),
}
