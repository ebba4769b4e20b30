//! Verification reports: one record per checked identity.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::error::Result;
use crate::polycore::{format_rational, rational, PolyMap, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The checker could not construct a certificate; nothing was refuted.
    CannotCertify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Overall {
    Pass,
    Fail,
    Inconclusive,
}

/// Where two maps first disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub component: usize,
    pub monomial: String,
    pub lhs_coeff: String,
    pub rhs_coeff: String,
    /// A point at which the two sides evaluate differently.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub name: String,
    /// The axiom or statement label this record checks, e.g. `"C.5"`.
    pub anchor: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub subject: String,
    pub records: Vec<Record>,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    subject: &'a str,
    overall: Overall,
    records: &'a [Record],
}

impl Report {
    pub fn new(subject: impl Into<String>) -> Self {
        Report {
            subject: subject.into(),
            records: Vec::new(),
        }
    }

    /// Fail if any record fails; otherwise inconclusive if any could not be
    /// certified; otherwise pass.
    pub fn overall(&self) -> Overall {
        if self.records.iter().any(|r| r.verdict == Verdict::Fail) {
            Overall::Fail
        } else if self
            .records
            .iter()
            .any(|r| r.verdict == Verdict::CannotCertify)
        {
            Overall::Inconclusive
        } else {
            Overall::Pass
        }
    }

    pub fn passed(&self) -> bool {
        self.overall() == Overall::Pass
    }

    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    pub fn record(&mut self, name: &str, anchor: &str, verdict: Verdict, note: Option<String>) {
        self.records.push(Record {
            name: name.to_string(),
            anchor: anchor.to_string(),
            verdict,
            witness: None,
            note,
        });
    }

    pub fn pass(&mut self, name: &str, anchor: &str) {
        self.record(name, anchor, Verdict::Pass, None);
    }

    pub fn fail(&mut self, name: &str, anchor: &str, note: impl Into<String>) {
        self.record(name, anchor, Verdict::Fail, Some(note.into()));
    }

    pub fn cannot_certify(&mut self, name: &str, anchor: &str, note: impl Into<String>) {
        self.record(name, anchor, Verdict::CannotCertify, Some(note.into()));
    }

    /// Records whether `lhs = rhs` holds exactly. Construction errors on
    /// either side count as failure of the identity.
    pub fn check_eq(
        &mut self,
        name: &str,
        anchor: &str,
        lhs: Result<PolyMap>,
        rhs: Result<PolyMap>,
    ) -> bool {
        let (lhs, rhs) = match (lhs, rhs) {
            (Ok(l), Ok(r)) => (l, r),
            (Err(e), _) | (_, Err(e)) => {
                self.fail(name, anchor, e.to_string());
                return false;
            }
        };
        match lhs.diff(&rhs) {
            Err(e) => {
                self.fail(name, anchor, e.to_string());
                false
            }
            Ok(None) => {
                self.pass(name, anchor);
                true
            }
            Ok(Some(d)) => {
                let point = differing_point(&lhs, &rhs, d.component)
                    .map(|p| p.iter().map(format_rational).collect());
                self.records.push(Record {
                    name: name.to_string(),
                    anchor: anchor.to_string(),
                    verdict: Verdict::Fail,
                    witness: Some(Witness {
                        component: d.component,
                        monomial: d.monomial.display(),
                        lhs_coeff: format_rational(&d.left),
                        rhs_coeff: format_rational(&d.right),
                        point,
                    }),
                    note: None,
                });
                false
            }
        }
    }

    /// Appends another report's records, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut r in other.records {
            if !prefix.is_empty() {
                r.name = format!("{prefix}: {}", r.name);
            }
            self.records.push(r);
        }
    }

    pub fn find(&self, name: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn first_failure(&self) -> Option<&Record> {
        self.records.iter().find(|r| r.verdict != Verdict::Pass)
    }

    pub fn to_json(&self) -> String {
        let view = ReportJson {
            subject: &self.subject,
            overall: self.overall(),
            records: &self.records,
        };
        serde_json::to_string_pretty(&view).expect("report serialization is infallible")
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::CannotCertify => "CANNOT-CERTIFY",
        })
    }
}

impl fmt::Display for Overall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Overall::Pass => "PASS",
            Overall::Fail => "FAIL",
            Overall::Inconclusive => "INCONCLUSIVE",
        })
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.subject)?;
        for r in &self.records {
            write!(f, "  [{}] {} ({})", r.verdict, r.name, r.anchor)?;
            if let Some(w) = &r.witness {
                write!(
                    f,
                    " -- component {}, {}: {} vs {}",
                    w.component, w.monomial, w.lhs_coeff, w.rhs_coeff
                )?;
                if let Some(p) = &w.point {
                    write!(f, " at ({})", p.join(", "))?;
                }
            }
            if let Some(n) = &r.note {
                write!(f, " -- {n}")?;
            }
            writeln!(f)?;
        }
        write!(f, "overall: {}", self.overall())
    }
}

/// Deterministic search for a point separating two maps on one component.
fn differing_point(lhs: &PolyMap, rhs: &PolyMap, component: usize) -> Option<Vec<Rational>> {
    let diff = lhs.component(component) - rhs.component(component);
    let n = lhs.dom();
    for k in 0..64i64 {
        let p: Vec<Rational> = (0..n as i64)
            .map(|i| rational((k * 7 + i * 3 + 1) % 11 - 5))
            .collect();
        if !diff.eval(&p).ok()?.is_zero() {
            return Some(p);
        }
    }
    None
}
