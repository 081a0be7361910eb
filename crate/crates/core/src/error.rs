use alloc::string::String;
use core::fmt;

/// A violated clause of the extension-parameter constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamClause {
    NotPrime(u64),
    DegreeDivides { d: u64, p: u64 },
    TRange { t: i64, e: u64 },
    TCoprime { t: i64, e: u64 },
    BCoprime { b: i64, p: u64 },
    RamPositive,
    CharZeroBound,
    Characteristic { kappa: u64, p: u64 },
    GammaUnit,
    MuUnit,
    MuOrder { order: u64, f: u64 },
    BetaValuation { found: i64, b: i64 },
    FieldMismatch,
    Other(String),
}

impl fmt::Display for ParamClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamClause::NotPrime(p) => write!(f, "p = {p} is not prime"),
            ParamClause::DegreeDivides { d, p } => write!(f, "d = e*f = {d} must divide p-1 = {}", p - 1),
            ParamClause::TRange { t, e } => write!(f, "0 <= t < e violated (t = {t}, e = {e})"),
            ParamClause::TCoprime { t, e } => write!(f, "gcd(t, e) = 1 violated (t = {t}, e = {e})"),
            ParamClause::BCoprime { b, p } => write!(f, "gcd(b, p) = 1 violated (b = {b}, p = {p})"),
            ParamClause::RamPositive => write!(f, "ell = b + p*t/e must be positive"),
            ParamClause::CharZeroBound => write!(f, "ell < v_L(p)/(p-1) violated in characteristic 0"),
            ParamClause::Characteristic { kappa, p } => {
                write!(f, "residue field characteristic {kappa} differs from p = {p}")
            }
            ParamClause::GammaUnit => write!(f, "gamma must be a unit"),
            ParamClause::MuUnit => write!(f, "mu must be a unit"),
            ParamClause::MuOrder { order, f: ff } => write!(
                f,
                "residue of mu has order {order} in kappa^x/(kappa^x)^f, expected f = {ff}"
            ),
            ParamClause::BetaValuation { found, b } => {
                write!(f, "v_K(beta) = {found}, expected -b = {}", -b)
            }
            ParamClause::FieldMismatch => write!(f, "series are defined over different fields"),
            ParamClause::Other(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootFailure {
    /// The valuation is not divisible by the root degree.
    Valuation,
    /// The leading coefficient has no root of the requested degree in the residue field.
    LeadingCoefficient,
    /// The root degree is divisible by the characteristic.
    Wild,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("precision exhausted: value known only modulo pi^{bound}")]
    Precision { bound: i64 },
    #[error("invalid parameter: {0}")]
    Param(ParamClause),
    #[error("no root of degree {degree}: {kind:?}")]
    Root { degree: u64, kind: RootFailure },
    #[error("element does not lie in the requested subfield")]
    Subfield,
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("action left the field L")]
    Support,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub fn is_precision(&self) -> bool {
        matches!(self, Error::Precision { .. })
    }
}

impl From<ParamClause> for Error {
    fn from(c: ParamClause) -> Self {
        Error::Param(c)
    }
}
