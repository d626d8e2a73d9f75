use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square or has the wrong number of entries: {0}")]
    Shape(String),
    #[error("matrix has a non-finite entry")]
    NonFinite,
    #[error("matrix is not self-adjoint (asymmetry {0:e})")]
    NotSelfAdjoint(f64),
    #[error("matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),
    #[error("matrix is not skew-Hermitian (defect {0:e})")]
    NotSkewHermitian(f64),
    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("unsupported norm order {0}: only even integers >= 2 and infinity are allowed")]
    OddOrUnsupportedP(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("endpoints are antipodal; the minimal geodesic is not unique")]
    NonUniqueGeodesic,
    #[error("parameter {t} outside the segment range [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },
    #[error("consecutive points {0} and {1} are antipodal")]
    ConsecutivePointsAntipodal(usize, usize),
    #[error("a curve needs at least two points")]
    TooFewPoints,
    #[error("sample at t = {0} hits the antipodal set of the base point")]
    BranchCrossing(f64),
    #[error("segment leaves the ball (excess {0:e})")]
    SegmentOutsideBall(f64),
    #[error("segment is constant")]
    ConstantSegment,
    #[error("spectrum hits -1 at t = {0}")]
    SpectrumHitsMinusOne(f64),
    #[error("endpoint violates the numerical-range floor (min eigenvalue {0})")]
    EndpointViolatesFloor(f64),
    #[error("direction has operator norm {0} >= pi")]
    DirectionTooLong(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("solver did not converge after {iterations} iterations (objective {objective})")]
    NotConverged { iterations: usize, objective: f64 },
    #[error("points {0} and {1} are antipodal for the current iterate")]
    AntipodalPair(usize, usize),
    #[error("orbit exceeds {0} elements")]
    OrbitTooLarge(usize),
    #[error("orbit radius {radius} is not below the bound {bound}")]
    RadiusTooLarge { radius: f64, bound: f64 },
    #[error("group closure exceeds {0} elements")]
    ClosureBudgetExceeded(usize),
    #[error("matrix is not an orthogonal projection (defect {0:e})")]
    NotAProjection(f64),
    #[error("unitary is not a symmetry")]
    NotASymmetry,
    #[error("endpoint is not in the subspace {0}")]
    EndpointsNotInSubspace(String),
    #[error("endpoints are antipodal")]
    AntipodalEndpoints,
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
    #[error("map is not a homomorphism (defect {0:e})")]
    NotHomomorphism(f64),
    #[error("image does not lie in subspace {0}")]
    NotInSubspace(String),
    #[error("parse error: {0}")]
    Parse(String),
}
