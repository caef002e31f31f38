//! Tri-state answers for predicates that finite data cannot always settle.

use alloc::string::String;
use alloc::vec::Vec;

/// A concrete counterexample: where the predicate broke and with which values.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub index: Option<u64>,
    pub values: Vec<f64>,
    pub detail: String,
}

impl Witness {
    pub fn new(detail: impl Into<String>) -> Self {
        Witness { index: None, values: Vec::new(), detail: detail.into() }
    }

    pub fn at(index: u64, values: Vec<f64>, detail: impl Into<String>) -> Self {
        Witness { index: Some(index), values, detail: detail.into() }
    }
}

/// Numeric trail behind an undecided answer, as `(n, value)` pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Evidence {
    pub trace: Vec<(u64, f64)>,
    pub note: String,
}

impl Evidence {
    pub fn note(note: impl Into<String>) -> Self {
        Evidence { trace: Vec::new(), note: note.into() }
    }

    pub fn with_trace(trace: Vec<(u64, f64)>, note: impl Into<String>) -> Self {
        Evidence { trace, note: note.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Holds,
    Fails(Witness),
    Inconclusive(Evidence),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails(_))
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Verdict::Inconclusive(_))
    }

    pub fn fail(detail: impl Into<String>) -> Self {
        Verdict::Fails(Witness::new(detail))
    }

    pub fn inconclusive(note: impl Into<String>) -> Self {
        Verdict::Inconclusive(Evidence::note(note))
    }

    pub fn from_bool(ok: bool, detail: impl Into<String>) -> Self {
        if ok {
            Verdict::Holds
        } else {
            Verdict::fail(detail)
        }
    }

    /// Conjunction: the first failure wins, then the first inconclusive.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (f @ Verdict::Fails(_), _) => f,
            (_, f @ Verdict::Fails(_)) => f,
            (i @ Verdict::Inconclusive(_), _) => i,
            (_, i @ Verdict::Inconclusive(_)) => i,
            _ => Verdict::Holds,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails(_) => "fails",
            Verdict::Inconclusive(_) => "inconclusive",
        }
    }
}

impl FromIterator<Verdict> for Verdict {
    fn from_iter<I: IntoIterator<Item = Verdict>>(iter: I) -> Self {
        iter.into_iter().fold(Verdict::Holds, Verdict::and)
    }
}
