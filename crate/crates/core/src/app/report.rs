//! Run reports: checks with witnesses, computed tables, and exact rationals
//! rendered as `"p/q"` strings.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::enveloping::Label;
use crate::error::Error;
use crate::exterior::mask_indices;
use crate::graded::{GradedSpace, Vector};
use crate::scalar::Scalar;
use crate::sections::Check;
use crate::transfer::StasheffReport;

/// A basis element `ξ^{form} ⊗ word`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisLabel {
    pub form: Vec<usize>,
    pub word: Vec<usize>,
}

impl BasisLabel {
    pub fn new(l: &Label) -> Self {
        BasisLabel { form: mask_indices(l.0), word: l.1.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub label: BasisLabel,
    pub coeff: Scalar,
}

pub fn terms(space: &GradedSpace<Label>, v: &Vector) -> Vec<Term> {
    v.iter().map(|(i, c)| Term { label: BasisLabel::new(space.label(i)), coeff: c.clone() }).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub inputs: Vec<BasisLabel>,
    pub output: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub entries: Vec<TableEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl From<Check> for CheckRecord {
    fn from(c: Check) -> Self {
        CheckRecord { name: c.name, pass: c.pass, witness: c.witness }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Note {
    pub name: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub degree: i32,
    pub weight: usize,
    pub representative: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductRecord {
    pub left: usize,
    pub right: usize,
    pub result: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyRecord {
    pub classes: Vec<ClassRecord>,
    pub products: Vec<ProductRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<String>,
    pub input_digest: String,
    pub truncation: usize,
    pub max_arity: usize,
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<Note>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stasheff: Vec<StasheffReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tables: Vec<Table>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cohomology: Vec<CohomologyRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
}

pub fn digest(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidInput(_) => "invalid-input",
        Error::Parse(_) => "parse",
        Error::NotAComplex { .. } => "not-a-complex",
        Error::TruncationOverflow { .. } => "truncation-overflow",
        Error::NotInvertible => "not-invertible",
        Error::NotNilpotent(_) => "not-nilpotent",
        Error::Construction(_) => "construction",
    }
}

impl RunReport {
    pub fn new(command: &str, pair: Option<String>, input_digest: String, truncation: usize, max_arity: usize) -> Self {
        RunReport {
            command: command.to_string(),
            pair,
            input_digest,
            truncation,
            max_arity,
            pass: true,
            checks: Vec::new(),
            notes: Vec::new(),
            stasheff: Vec::new(),
            tables: Vec::new(),
            cohomology: Vec::new(),
            error: None,
        }
    }

    pub fn check(&mut self, c: Check) {
        self.pass &= c.pass;
        self.checks.push(c.into());
    }

    pub fn checks(&mut self, cs: impl IntoIterator<Item = Check>) {
        for c in cs {
            self.check(c);
        }
    }

    pub fn note(&mut self, name: impl Into<String>, value: impl ToString) {
        self.notes.push(Note { name: name.into(), value: value.to_string() });
    }

    pub fn fail_with(&mut self, e: &Error) {
        self.pass = false;
        self.error = Some(ErrorRecord { kind: error_kind(e).to_string(), message: e.to_string() });
    }

    pub fn exit_code(&self) -> i32 {
        if let Some(e) = &self.error {
            return match e.kind.as_str() {
                "invalid-input" | "parse" | "not-invertible" => 2,
                "truncation-overflow" => 3,
                _ => 1,
            };
        }
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn to_text(&self) -> String {
        let mut s = self.command.clone();
        if let Some(p) = &self.pair {
            s += &format!(" {p}");
        }
        s += &format!(" N={} arity={} digest={}\n", self.truncation, self.max_arity, &self.input_digest[..16]);
        for c in &self.checks {
            let mark = if c.pass { "PASS" } else { "FAIL" };
            match &c.witness {
                Some(w) => s += &format!("{mark} {}: {w}\n", c.name),
                None => s += &format!("{mark} {}\n", c.name),
            }
        }
        for r in &self.stasheff {
            s += &format!("stasheff arity {}: {} tuples, max defect {}\n", r.arity, r.tuples, r.max_defect);
        }
        for n in &self.notes {
            s += &format!("{}: {}\n", n.name, n.value);
        }
        for t in &self.tables {
            s += &format!("table {}: {} entries\n", t.name, t.entries.len());
        }
        for c in &self.cohomology {
            s += &format!("cohomology: {} classes, {} products\n", c.classes.len(), c.products.len());
        }
        if let Some(e) = &self.error {
            s += &format!("error ({}): {}\n", e.kind, e.message);
        }
        s += if self.pass { "result: pass\n" } else { "result: fail\n" };
        s
    }
}
