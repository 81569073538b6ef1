use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::point::CubePoint;

/// Relative slack allowed before an asserted inequality counts as violated.
pub const REL_TOL: f64 = 1e-9;

/// The inequality families the library can check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    Inductive,
    SmallVariance,
    PositiveCorrelation,
    CountGoodY,
    SetLipschitz,
    Alpha,
    Tail,
    Talagrand,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::Inductive,
        Check::SmallVariance,
        Check::PositiveCorrelation,
        Check::CountGoodY,
        Check::SetLipschitz,
        Check::Alpha,
        Check::Tail,
        Check::Talagrand,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Check::Inductive => "inductive",
            Check::SmallVariance => "smallvar",
            Check::PositiveCorrelation => "pc",
            Check::CountGoodY => "count",
            Check::SetLipschitz => "set",
            Check::Alpha => "alpha",
            Check::Tail => "tail",
            Check::Talagrand => "talagrand",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Check::ALL
            .into_iter()
            .find(|c| c.as_str() == s.trim())
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown check {s:?}; expected one of inductive, smallvar, pc, count, set, alpha, tail, talagrand"
                ))
            })
    }
}

/// One evaluated inequality `lhs <= bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub check: Check,
    pub y: Option<CubePoint>,
    pub t: f64,
    pub lhs: f64,
    pub bound: f64,
    /// `(bound - lhs) / bound`; negative when the inequality fails.
    pub slack: f64,
    /// False when the hypotheses of the inequality do not hold; such
    /// reports never count as failures.
    pub applicable: bool,
    pub holds: bool,
}

impl BoundReport {
    pub fn new(check: Check, y: Option<CubePoint>, t: f64, lhs: f64, bound: f64) -> Self {
        let slack = relative_slack(lhs, bound);
        BoundReport {
            check,
            y,
            t,
            lhs,
            bound,
            slack,
            applicable: true,
            holds: slack >= -REL_TOL,
        }
    }

    pub fn not_applicable(
        check: Check,
        y: Option<CubePoint>,
        t: f64,
        lhs: f64,
        bound: f64,
    ) -> Self {
        let mut report = Self::new(check, y, t, lhs, bound);
        report.applicable = false;
        report
    }

    /// True when the report is an applicable inequality that failed.
    pub fn violated(&self) -> bool {
        self.applicable && !self.holds
    }
}

pub(crate) fn relative_slack(lhs: f64, bound: f64) -> f64 {
    if bound == f64::INFINITY {
        return 1.0;
    }
    let scale = bound.abs().max(f64::MIN_POSITIVE);
    (bound - lhs) / scale
}
