use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Number of stance classes.
pub const NUM_LABELS: usize = 4;

/// Stance of an article body towards a headline.
///
/// Integer codes are fixed: agree=0, disagree=1, discuss=2, unrelated=3.
/// They index the rows and columns of every confusion matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StanceLabel {
    Agree = 0,
    Disagree = 1,
    Discuss = 2,
    Unrelated = 3,
}

impl StanceLabel {
    pub const ALL: [StanceLabel; NUM_LABELS] = [
        StanceLabel::Agree,
        StanceLabel::Disagree,
        StanceLabel::Discuss,
        StanceLabel::Unrelated,
    ];

    pub fn code(self) -> usize {
        self as usize
    }

    pub fn from_code(code: usize) -> Option<Self> {
        Self::ALL.get(code).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StanceLabel::Agree => "agree",
            StanceLabel::Disagree => "disagree",
            StanceLabel::Discuss => "discuss",
            StanceLabel::Unrelated => "unrelated",
        }
    }

    /// True for agree, disagree and discuss.
    pub fn is_related(self) -> bool {
        self != StanceLabel::Unrelated
    }
}

impl fmt::Display for StanceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StanceLabel {
    type Err = Error;

    /// Case-insensitive, surrounding whitespace ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        Self::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}
