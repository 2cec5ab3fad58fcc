//! Verification reports shared by the theorem diffs and auxiliary checks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::sequence::GSequence;
use crate::spec::GroupSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Cyclic,
    Dihedral,
    Dicyclic,
    Metacyclic,
    Weighted,
    CyclicStructure,
    Minzero,
}

impl Target {
    pub const ALL: [Target; 7] = [
        Target::Cyclic,
        Target::Dihedral,
        Target::Dicyclic,
        Target::Metacyclic,
        Target::Weighted,
        Target::CyclicStructure,
        Target::Minzero,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Target::Cyclic => "cyclic",
            Target::Dihedral => "dihedral",
            Target::Dicyclic => "dicyclic",
            Target::Metacyclic => "metacyclic",
            Target::Weighted => "weighted",
            Target::CyclicStructure => "cyclic-structure",
            Target::Minzero => "minzero",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Target::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown target `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ExactMatch,
    DocumentedDiscrepancy,
    Failure,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ExactMatch => "exact-match",
            Verdict::DocumentedDiscrepancy => "documented-discrepancy",
            Verdict::Failure => "failure",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Diff between what was enumerated and what a closed-form statement predicts.
///
/// For theorem diffs, `missing` holds predicted sequences that are not
/// extremal free sequences and `extra` holds extremal free sequences that are
/// not predicted. For the auxiliary checks, `extra` holds counterexamples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "ReportJson", try_from = "ReportJson")]
pub struct VerificationReport {
    pub target: Target,
    pub group: GroupSpec,
    pub davenport: Option<usize>,
    pub enumerated_count: usize,
    pub predicted_count: usize,
    pub missing: Vec<GSequence>,
    pub extra: Vec<GSequence>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    pub nodes: u64,
    pub millis: u64,
}

impl VerificationReport {
    /// Verdict for a theorem diff: missing predictions fail, unpredicted
    /// extremal sequences are a documented discrepancy.
    pub fn theorem_verdict(missing: &[GSequence], extra: &[GSequence]) -> Verdict {
        if !missing.is_empty() {
            Verdict::Failure
        } else if !extra.is_empty() {
            Verdict::DocumentedDiscrepancy
        } else {
            Verdict::ExactMatch
        }
    }

    /// Verdict for an auxiliary check: any counterexample fails.
    pub fn check_verdict(missing: &[GSequence], extra: &[GSequence]) -> Verdict {
        if missing.is_empty() && extra.is_empty() {
            Verdict::ExactMatch
        } else {
            Verdict::Failure
        }
    }

    pub fn is_exact(&self) -> bool {
        self.verdict == Verdict::ExactMatch
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportJson {
    pub target: Target,
    pub group: GroupSpec,
    pub davenport: Option<usize>,
    pub enumerated_count: usize,
    pub predicted_count: usize,
    pub missing: Vec<String>,
    pub extra: Vec<String>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    pub nodes: u64,
    pub millis: u64,
}

impl From<VerificationReport> for ReportJson {
    fn from(r: VerificationReport) -> Self {
        ReportJson {
            target: r.target,
            group: r.group,
            davenport: r.davenport,
            enumerated_count: r.enumerated_count,
            predicted_count: r.predicted_count,
            missing: r.missing.iter().map(ToString::to_string).collect(),
            extra: r.extra.iter().map(ToString::to_string).collect(),
            verdict: r.verdict,
            notes: r.notes,
            nodes: r.nodes,
            millis: r.millis,
        }
    }
}

impl TryFrom<ReportJson> for VerificationReport {
    type Error = String;

    fn try_from(j: ReportJson) -> Result<Self, Self::Error> {
        let parse = |list: &[String]| -> Result<Vec<GSequence>, String> {
            list.iter()
                .map(|s| GSequence::parse_canonical(&j.group, s).map_err(|e| e.to_string()))
                .collect()
        };
        let missing = parse(&j.missing)?;
        let extra = parse(&j.extra)?;
        if (j.verdict == Verdict::ExactMatch) != (missing.is_empty() && extra.is_empty()) {
            return Err(format!("verdict {} contradicts the missing/extra lists", j.verdict));
        }
        Ok(VerificationReport {
            target: j.target,
            group: j.group,
            davenport: j.davenport,
            enumerated_count: j.enumerated_count,
            predicted_count: j.predicted_count,
            missing,
            extra,
            verdict: j.verdict,
            notes: j.notes,
            nodes: j.nodes,
            millis: j.millis,
        })
    }
}
