use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live in different quadratic fields (sqrt {0} vs sqrt {1})")]
    IncompatibleFields(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("round_half is undefined on integers")]
    HalfPointUndefined,
    #[error("input is not rational or quadratic")]
    NonQuadraticInput,
    #[error("empty continued fraction")]
    EmptyExpansion,
    #[error("value out of domain: {0}")]
    Domain(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("slope out of range [0,1]")]
    SlopeOutOfRange,
    #[error("{0} and {1} are not coprime")]
    NotCoprime(i64, i64),
    #[error("degenerate slope")]
    DegenerateSlope,
    #[error("rational slope needs an explicit variant")]
    RationalSlopeNeedsVariant,
    #[error("direction is strictly 3-colour; no binary corridor word")]
    ThreeColorDirection,
    #[error("slope zero has no wider corridors")]
    SlopeZero,
    #[error("continued fraction is not purely periodic")]
    NotPurelyPeriodic,
    #[error("not a unit of a real quadratic field")]
    NotAUnit,
    #[error("Beatty-type criterion violated at m = {0}")]
    CriterionViolated(i64),
    #[error("empty region")]
    EmptyRegion,
    #[error("density mismatch: lambda*mu*n != 1")]
    DensityMismatch,
    #[error("cross correspondence needs lambda*mu <= 1")]
    ShapeViolated,
    #[error("rational input where an irrational quadratic was required")]
    RationalInput,
    #[error("degenerate linear system")]
    DegenerateSystem,
    #[error("tile-set shape not handled")]
    UnhandledShape,
    #[error("rational slope: arrangement breakpoints collide")]
    RationalSlope,
    #[error("not a quadratic irrational")]
    NotQuadratic,
    #[error("coverage gap at cell ({0}, {1})")]
    CoverageGap(i64, i64),
}

pub type Result<T> = std::result::Result<T, Error>;
