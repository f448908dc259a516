//! Command pipelines behind the command-line front end.

pub mod catalog;
pub mod document;
pub mod report;

use std::collections::BTreeMap;

use crate::compare::{cohomology_algebra, compare_structures, CohomologyAlgebra};
use crate::enveloping::Label;
use crate::error::{Error, Result};
use crate::graded::{GradedSpace, Vector};
use crate::hpl::build_main_contraction;
use crate::lie_pair::check_connection_identities;
use crate::sections::{darwin_check, frame_relations, nap_uniqueness, verify_contraction0, Check, Frame};
use crate::transfer::transfer;
use document::PairDocument;
use report::{terms, BasisLabel, ClassRecord, CohomologyRecord, ProductRecord, RunReport, Table, TableEntry};

pub const DEFAULT_TRUNCATION: usize = 3;
pub const DEFAULT_ARITY: usize = 4;
/// Largest supported filtration weight.
pub const MAX_TRUNCATION: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Contraction,
    Transfer,
    Stasheff,
    Cohomology,
    Compare,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Contraction => "contraction",
            Command::Transfer => "transfer",
            Command::Stasheff => "stasheff",
            Command::Cohomology => "cohomology",
            Command::Compare => "compare",
        }
    }
}

/// Truncation and arity cap: explicit values, then the document, then the
/// defaults.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub truncation: usize,
    pub max_arity: usize,
}

impl RunOptions {
    pub fn resolve(doc: &PairDocument, truncation: Option<usize>, max_arity: Option<usize>) -> Self {
        RunOptions {
            truncation: truncation.or(doc.truncation).unwrap_or(DEFAULT_TRUNCATION),
            max_arity: max_arity.or(doc.max_arity).unwrap_or(DEFAULT_ARITY),
        }
    }
}

/// Run a command; errors become part of the report.
pub fn run(cmd: Command, doc: &PairDocument, opts: RunOptions) -> RunReport {
    let input = format!("{}|N={}|K={}", doc.canonical_json(), opts.truncation, opts.max_arity);
    let mut r = RunReport::new(cmd.name(), doc.name.clone(), report::digest(&input), opts.truncation, opts.max_arity);
    let res = if opts.truncation > MAX_TRUNCATION {
        Err(Error::TruncationOverflow { weight: opts.truncation, cap: MAX_TRUNCATION })
    } else {
        Ok(())
    };
    let res = res.and_then(|()| match cmd {
        Command::Validate => cmd_validate(doc, &mut r),
        Command::Contraction => cmd_contraction(doc, opts, &mut r),
        Command::Transfer => cmd_transfer(doc, opts, &mut r),
        Command::Stasheff => cmd_stasheff(doc, opts, &mut r),
        Command::Cohomology => cmd_cohomology(doc, opts, &mut r),
        Command::Compare => cmd_compare(doc, opts, &mut r),
    });
    if let Err(e) = res {
        r.fail_with(&e);
    }
    r
}

pub fn cmd_validate(doc: &PairDocument, r: &mut RunReport) -> Result<()> {
    let v = doc.pair()?.validate();
    let w = |xs: &[(usize, usize, usize)]| xs.first().map(|t| format!("indices {t:?}"));
    r.check(Check::new("antisymmetry", v.antisymmetry.is_empty(), w(&v.antisymmetry)));
    r.check(Check::new("Jacobi identity", v.jacobi.is_empty(), v.jacobi.first().map(|t| format!("triple {t:?}"))));
    r.check(Check::new("subalgebra closure", v.closure.is_empty(), w(&v.closure)));
    Ok(())
}

pub fn cmd_contraction(doc: &PairDocument, opts: RunOptions, r: &mut RunReport) -> Result<()> {
    let pair = doc.valid_pair()?;
    let choices = doc.choices()?;
    let (split, conn) = choices.apply(&pair)?;
    let bad = check_connection_identities(&split, &conn);
    r.check(Check::new("connection identities", bad.is_empty(), bad.first().cloned()));
    let frame = Frame::new(split, conn);
    let ext = frame.ext();
    let (italo, at) = ext.italo_defect();
    r.check(Check::new("d = Σ ξ^k L_k − (dξ^k) ι_k", italo.is_zero(), at.map(|m| format!("mask {m:#b}"))));
    let (rats, at) = ext.rats_defect();
    r.check(Check::new("Σ ξ^k ι_k = form degree", rats.is_zero(), at.map(|m| format!("mask {m:#b}"))));
    r.checks(verify_contraction0(&frame)?);
    r.checks(frame_relations(&frame)?);
    r.check(darwin_check(&frame));
    r.check(nap_uniqueness(&frame)?);
    let mc = build_main_contraction(&pair, &choices, opts.truncation)?;
    r.checks(mc.symmetric.checks("symmetric")?);
    r.checks(mc.conjugated.checks("conjugated")?);
    r.checks(mc.pbw_checks());
    r.checks(mc.projection_checks()?);
    r.checks(mc.perturbation_checks()?);
    r.note("perturbation series terms", mc.perturbed.terms);
    Ok(())
}

fn table(name: String, space: &GradedSpace<Label>, entries: &BTreeMap<Vec<usize>, Vector>) -> Table {
    Table {
        name,
        entries: entries
            .iter()
            .map(|(t, v)| TableEntry {
                inputs: t.iter().map(|&i| BasisLabel::new(space.label(i))).collect(),
                output: terms(space, v),
            })
            .collect(),
    }
}

pub fn cmd_transfer(doc: &PairDocument, opts: RunOptions, r: &mut RunReport) -> Result<()> {
    let mc = build_main_contraction(&doc.valid_pair()?, &doc.choices()?, opts.truncation)?;
    let t = transfer(&mc, opts.max_arity)?;
    r.check(t.unit_check());
    r.check(t.inclusion_morphism_check()?);
    r.check(t.projection_morphism_check(opts.max_arity)?);
    let (left, right) = t.exterior_linearity();
    r.note("m2 left exterior-linear", left);
    r.note("m2 right exterior-linear", right);
    for n in 1..=opts.max_arity {
        r.tables.push(table(format!("m{n}"), &t.small, &t.m_table(n)));
    }
    Ok(())
}

pub fn cmd_stasheff(doc: &PairDocument, opts: RunOptions, r: &mut RunReport) -> Result<()> {
    let mc = build_main_contraction(&doc.valid_pair()?, &doc.choices()?, opts.truncation)?;
    let t = transfer(&mc, opts.max_arity)?;
    for n in 1..=opts.max_arity {
        let s = t.stasheff_defect(n);
        r.check(s.check());
        r.stasheff.push(s);
    }
    Ok(())
}

fn cohomology_record(space: &GradedSpace<Label>, alg: &CohomologyAlgebra) -> CohomologyRecord {
    CohomologyRecord {
        classes: alg
            .classes
            .iter()
            .map(|c| ClassRecord { degree: c.degree, weight: c.weight, representative: terms(space, &c.representative) })
            .collect(),
        products: alg
            .table
            .iter()
            .map(|(&(left, right), v)| ProductRecord { left, right, result: v.clone() })
            .collect(),
    }
}

pub fn cmd_cohomology(doc: &PairDocument, opts: RunOptions, r: &mut RunReport) -> Result<()> {
    let mc = build_main_contraction(&doc.valid_pair()?, &doc.choices()?, opts.truncation)?;
    let arity = opts.max_arity.clamp(2, 3);
    let t = transfer(&mc, arity)?;
    for n in 1..=arity {
        r.check(t.stasheff_defect(n).check());
    }
    let alg = cohomology_algebra(&t)?;
    r.check(alg.associativity_check());
    r.cohomology.push(cohomology_record(&t.small, &alg));
    Ok(())
}

pub fn cmd_compare(doc: &PairDocument, opts: RunOptions, r: &mut RunReport) -> Result<()> {
    let pair = doc.valid_pair()?;
    let cmp = compare_structures(&pair, &doc.choices()?, &doc.alternative_choices()?, opts.truncation, opts.max_arity)?;
    r.checks(cmp.checks.iter().cloned());
    for (n, count) in cmp.higher_coefficients() {
        r.note(format!("nonzero entries of f{n}"), count);
    }
    for n in 1..cmp.taylor.len() {
        r.tables.push(table(format!("f{n}"), &cmp.first.small, &cmp.taylor[n]));
    }
    r.cohomology.push(cohomology_record(&cmp.first.small, &cmp.algebra1));
    r.cohomology.push(cohomology_record(&cmp.second.small, &cmp.algebra2));
    Ok(())
}

/// Names of the catalog entries.
pub fn cmd_catalog() -> Vec<String> {
    catalog::catalog().into_iter().filter_map(|d| d.name).collect()
}
