//! Machine-readable pass/fail ledgers keyed by paper proposition.

use alloc::string::String;
use alloc::vec::Vec;

/// Outcome of one verified statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        }
    }
}

/// One checked identity or axiom instance.
#[derive(Debug, Clone)]
pub struct ReportEntry {
    /// Stable machine id, e.g. `"a2.cyclic"` or `"axiom.u_dim.a"`.
    pub id: String,
    /// The proposition the check instantiates, e.g. `"prop 5.9"`.
    pub paper_ref: String,
    pub status: Status,
    /// A witness for failures (the offending tuple), empty on pass.
    pub witness: String,
}

/// An ordered list of checked statements; ordering is deterministic
/// (construction order, lexicographic in the underlying tuples).
#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub entries: Vec<ReportEntry>,
}

impl VerificationReport {
    pub fn new() -> Self {
        VerificationReport { entries: Vec::new() }
    }

    pub fn record(&mut self, id: &str, paper_ref: &str, ok: bool, witness: String) {
        self.entries.push(ReportEntry {
            id: String::from(id),
            paper_ref: String::from(paper_ref),
            status: if ok { Status::Pass } else { Status::Fail },
            witness: if ok { String::new() } else { witness },
        });
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| e.status == Status::Fail)
    }

    /// Merge another report into this one, preserving order.
    pub fn extend(&mut self, other: VerificationReport) {
        self.entries.extend(other.entries);
    }
}
