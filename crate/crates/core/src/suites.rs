//! Uniform entry point over the verification suites.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::catalog::{self, DynkinLabel};
use crate::coeffring::RingError;
use crate::confluence::{self, ConfluenceError};
use crate::dynamics::{self, DynamicsError};
use crate::qtorus::TorusError;
use crate::report::VerificationReport;
use crate::{quantise, shear, unfolding};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Confluence(#[from] ConfluenceError),
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Suite {
    Catalog,
    Shear,
    Dynamics,
    Confluence,
    Quantum,
    Unfolding,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Catalog, Suite::Shear, Suite::Dynamics, Suite::Confluence, Suite::Quantum, Suite::Unfolding];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Catalog => "catalog",
            Suite::Shear => "shear",
            Suite::Dynamics => "dynamics",
            Suite::Confluence => "confluence",
            Suite::Quantum => "quantum",
            Suite::Unfolding => "unfolding",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown suite `{0}`")]
pub struct UnknownSuite(pub String);

impl FromStr for Suite {
    type Err = UnknownSuite;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| UnknownSuite(s.to_string()))
    }
}

/// An independent unit of work. Label-free jobs cover checks that span
/// several families (cascade edges, Table 1 metadata).
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Job {
    PerLabel(Suite, DynkinLabel),
    Global(Suite),
}

pub fn jobs(suites: &[Suite], labels: &[DynkinLabel]) -> Vec<Job> {
    let everything = DynkinLabel::ALL.iter().all(|l| labels.contains(l));
    let mut out = Vec::new();
    for &s in suites {
        match s {
            Suite::Confluence => out.push(Job::Global(s)),
            _ => out.extend(labels.iter().map(|&l| Job::PerLabel(s, l))),
        }
        if s == Suite::Unfolding && everything {
            out.push(Job::Global(s));
        }
    }
    out
}

fn touches(report_label: &str, labels: &[DynkinLabel]) -> bool {
    report_label.split(':').any(|part| labels.iter().any(|l| l.name() == part))
}

pub fn run_job(job: Job, labels: &[DynkinLabel], seed: u64) -> Result<Vec<VerificationReport>, EngineError> {
    Ok(match job {
        Job::PerLabel(s, l) => {
            let one = [l];
            match s {
                Suite::Catalog => catalog::suite(&one),
                Suite::Shear => shear::suite(&one, seed)?,
                Suite::Dynamics => dynamics::suite(&one, seed)?,
                Suite::Quantum => quantise::suite(&one)?,
                Suite::Unfolding => unfolding::suite(&one)?,
                Suite::Confluence => Vec::new(),
            }
        }
        Job::Global(Suite::Confluence) => {
            let all = confluence::suite()?;
            if DynkinLabel::ALL.iter().all(|l| labels.contains(l)) {
                all
            } else {
                all.into_iter().filter(|r| touches(&r.label, labels)).collect()
            }
        }
        Job::Global(Suite::Unfolding) => vec![unfolding::table_metadata_check()],
        Job::Global(_) => Vec::new(),
    })
}

/// Orders reports by (suite, label, check).
pub fn sort_reports(reports: &mut [VerificationReport]) {
    reports.sort_by_key(|r| r.key());
}

/// Runs every job sequentially and returns the reports in canonical order.
pub fn run(suites: &[Suite], labels: &[DynkinLabel], seed: u64) -> Result<Vec<VerificationReport>, EngineError> {
    let mut out = Vec::new();
    for job in jobs(suites, labels) {
        out.extend(run_job(job, labels, seed)?);
    }
    sort_reports(&mut out);
    Ok(out)
}
