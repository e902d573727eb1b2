use thiserror::Error;

/// Failures of the exact primitives and of input validation.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("sites {0} and {1} coincide")]
    IdenticalSites(usize, usize),
    #[error("sites {0}, {1}, {2} are collinear")]
    Collinear(usize, usize, usize),
    #[error("ray lies inside the line")]
    RayInLine,
    #[error("need at least 3 sites, got {0}")]
    TooFewSites(usize),
    #[error("DuplicateSite({0},{1})")]
    DuplicateSite(usize, usize),
    #[error("CollinearTriple({0},{1},{2})")]
    CollinearTriple(usize, usize, usize),
    #[error("CocircularQuadruple({0},{1},{2},{3})")]
    CocircularQuadruple(usize, usize, usize, usize),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("workspace budget exceeded: {requested} words requested, {budget} allowed")]
    ModelViolation { requested: usize, budget: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("index {index} out of range for {len} sites")]
    OutOfRange { index: usize, len: usize },
    #[error("no bisector crosses the ray from site {0}")]
    NoIntersection(usize),
    #[error("site {0} has an empty farthest-site cell")]
    FarthestCellEmpty(usize),
    #[error("order regression: record of order {got} after order {last}")]
    OrderRegression { last: usize, got: usize },
    #[error("half-edge has no head vertex")]
    UnboundedHead,
    #[error("inconsistent walk: {0}")]
    Inconsistent(String),
    #[error("output sink is closed")]
    ClosedSink,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Process exit code for an error: 1 I/O, 2 degenerate input, 3 parse,
/// 4 workspace violation, 5 configuration, 1 for internal failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 1,
        Error::Geometry(_) => 2,
        Error::Parse { .. } => 3,
        Error::ModelViolation { .. } => 4,
        Error::Config(_) => 5,
        _ => 1,
    }
}
