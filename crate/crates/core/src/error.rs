use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("jet index at byte {offset} has {found} entries, expected {expected}")]
    JetLength { expected: usize, found: usize, offset: usize },
    #[error("singular substitution: {0}")]
    SingularSubstitution(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("rank condition fails for the module")]
    RankDeficient,
    #[error("module is not involutive (residual {0})")]
    NotInvolutive(String),
    #[error("degenerate invariant: the derivative with respect to u vanishes identically")]
    DegenerateInvariant,
    #[error("an inverse map is required to re-express the result")]
    MissingInverse,
    #[error("the family-reduced function does not depend on the solved derivative")]
    SingularPhi,
    #[error("cannot solve for the leading derivative: {0}")]
    NotSolvable(String),
    #[error("the shift module is not a reduction module of the equation")]
    NotReductionModule,
    #[error("degenerate Jacobian: the pair of invariants is functionally dependent in (t, u)")]
    DegenerateJacobian,
    #[error("the eiconal equation is violated (residual {0})")]
    EiconalViolated(String),
    #[error("elliptic equation carries no positivity certificate")]
    PositivityCertificateMissing,
    #[error("positive definiteness fails at a sample point: {0}")]
    NotPositiveDefinite(String),
    #[error("change of jet coordinates failed: {0}")]
    ChangeOfJetCoordinatesFailed(String),
    #[error("the expression vanishes identically; no meta-singular co-order")]
    NotMetaSingular,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal error: {0}")]
    Internal(String),
}
