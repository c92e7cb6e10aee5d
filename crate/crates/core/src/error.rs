use thiserror::Error;

/// Failures surfaced by the arithmetic layers and the counting pipeline.
///
/// Several variants are not bugs but signals: `NotInvertible`,
/// `ResolventNotInvertible`, `NormalBasisFailure`, `BasisDegenerate` and
/// `DegenerateFrobenius` tell the driver to fall back to another method.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element is not invertible (common factor with the modulus of degree {factor_degree:?})")]
    NotInvertible { factor_degree: Option<usize> },
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("no primitive {0}-th root of unity exists: the characteristic divides the order")]
    BadOrder(u64),
    #[error("element has no {0}-th root")]
    NoRoot(u64),
    #[error("resolvent system is singular")]
    SingularSystem,
    #[error("denominator of the multiplication map is not invertible (common factor of degree {factor_degree:?})")]
    DenominatorNotInvertible { factor_degree: Option<usize> },
    #[error("brute-force count is limited to p <= {limit}, got p = {p}")]
    OracleBudgetExceeded { p: u64, limit: u64 },
    #[error("degenerate ray polynomial: {0}")]
    DegenerateRay(String),
    #[error("field of definition mismatch: ray polynomial gives r = {ray}, modular polynomial factor degrees {modular:?}")]
    Mismatch { ray: usize, modular: Vec<usize> },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("precondition violated: {0}")]
    PrecondViolated(String),
    #[error("Lagrange resolvent is not invertible")]
    ResolventNotInvertible,
    #[error("conjugates of the root of unity do not form a normal basis")]
    NormalBasisFailure,
    #[error("recovered map fails the isomorphism check")]
    IsoCheckFailed,
    #[error("powers of the partial trace do not span the fixed subalgebra")]
    BasisDegenerate,
    #[error("coefficient is not invariant under the subgroup")]
    CoefficientNotInvariant,
    #[error("Frobenius squared acts as +-p on the ray")]
    DegenerateFrobenius,
    #[error("no trace candidate satisfies the characteristic equation")]
    NoCandidate,
    #[error("no Frobenius eigenvalue found on the ray")]
    NoEigenvalue,
    #[error("trace is ambiguous after sign resolution, survivors {survivors:?}")]
    Ambiguous { survivors: Vec<i64> },
    #[error("Legendre symbol of the discriminant contradicts the classification at l = {ell}")]
    ClassificationMismatch { ell: u64 },
    #[error("curve is singular (4a^3 + 27b^2 = 0)")]
    SingularCurve,
    #[error("curve is supersingular (trace 0)")]
    SupersingularCurve,
    #[error("pipeline count {got} disagrees with brute-force count {expected}")]
    OracleMismatch { expected: u64, got: u64 },
    #[error("method inapplicable: {0}")]
    MethodInapplicable(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Whether the error asks for a fallback rather than reporting a bug.
    pub fn is_fallback_signal(&self) -> bool {
        matches!(
            self,
            Error::NotInvertible { .. }
                | Error::DenominatorNotInvertible { .. }
                | Error::ResolventNotInvertible
                | Error::NormalBasisFailure
                | Error::IsoCheckFailed
                | Error::BasisDegenerate
                | Error::DegenerateFrobenius
                | Error::DegenerateRay(_)
                | Error::NotSquarefree
        )
    }
}
