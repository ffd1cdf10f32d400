use thiserror::Error;

/// Everything that can go wrong across the library.
///
/// Element and gamma positions are reported as dense indices; callers that
/// hold a [`GammaSemigroup`](crate::structure::GammaSemigroup) can map them
/// back to names.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("carrier set is empty")]
    EmptyCarrier,
    #[error("gamma set is empty")]
    EmptyGammaSet,
    #[error("cayley cube has {actual} cells, expected {expected}")]
    CubeShape { expected: usize, actual: usize },
    #[error("cube cell ({x}, {gamma}, {y}) holds {value}, not an element index below {n}")]
    OutOfRangeEntry {
        x: usize,
        gamma: usize,
        y: usize,
        value: usize,
        n: usize,
    },
    #[error("associativity fails at x={x} beta={beta} y={y} gamma={gamma} z={z}: (x beta y) gamma z = {left}, x beta (y gamma z) = {right}")]
    AssociativityViolation {
        x: usize,
        beta: usize,
        y: usize,
        gamma: usize,
        z: usize,
        left: usize,
        right: usize,
    },
    #[error("element index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("unknown gamma `{0}`")]
    UnknownGamma(String),
    #[error("carrier of size {n} exceeds the subset-enumeration bound {limit}")]
    CarrierTooLarge { n: usize, limit: usize },
    #[error("source and target do not share the same gamma set")]
    GammaMismatch,
    #[error("map has {actual} entries, source has {expected} elements")]
    MapNotTotal { expected: usize, actual: usize },
    #[error("homomorphism fails at x={x} gamma={gamma} y={y}: f(x gamma y) = {image_of_product}, f(x) gamma f(y) = {product_of_images}")]
    HomomorphismViolation {
        x: usize,
        gamma: usize,
        y: usize,
        image_of_product: usize,
        product_of_images: usize,
    },
    #[error("threshold {0} is not in (0,1]")]
    InvalidThreshold(String),
    #[error("grade {0} is not a rational in [0,1]")]
    BadRational(String),
    #[error("fuzzy point value must be in (0,1]")]
    InvalidPointValue,
    #[error("fuzzy subsets live over different structures")]
    StructureMismatch,
    #[error("empty family of fuzzy subsets")]
    EmptyFamily,
    #[error("fuzzy subset is identically zero")]
    EmptyFuzzySubset,
    #[error("alpha may not be the in-and-q relation")]
    InvalidAlpha,
    #[error("sample {0} is not an (in, in-or-q)-fuzzy bi-ideal")]
    SampleNotBiIdeal(usize),
    #[error("generator gave up after {0} search steps")]
    BudgetExhausted(u64),
    #[error("unknown predicate name `{0}`")]
    UnknownPredicateName(String),
    #[error("malformed predicate expression: {0}")]
    BadExpression(String),
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("line {line}: {message}")]
    SyntaxError { line: usize, message: String },
    #[error("line {line}: duplicate {kind} name `{name}`")]
    DuplicateName {
        line: usize,
        kind: &'static str,
        name: String,
    },
    #[error("missing or incomplete table: {0}")]
    MissingTable(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
