//! Published reference levels and their matching against computed branches.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QesError, Result};
use crate::models::{H2Spec, H4Spec, Mode, ModelSpec};
use crate::solve::SolverConfig;
use crate::spectra::{enumerate_levels, Branch, SpectrumReport};

/// Largest accepted `|Δ|` between a computed and a printed value.
pub const TABLE_TOL: f64 = 1e-4;

const DATA: &str = include_str!("../data/reference_tables.csv");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableId {
    Table1,
    Table2,
    Table3,
}

impl TableId {
    pub const ALL: [TableId; 3] = [TableId::Table1, TableId::Table2, TableId::Table3];

    pub fn name(self) -> &'static str {
        match self {
            TableId::Table1 => "table1",
            TableId::Table2 => "table2",
            TableId::Table3 => "table3",
        }
    }

    /// The model a row of this table is computed from.
    pub fn model(self, ell: i32) -> ModelSpec {
        match self {
            TableId::Table1 => ModelSpec::H2(H2Spec { omega: 0.1, ell, n: 1 }),
            TableId::Table2 => ModelSpec::H2(H2Spec { omega: 0.1, ell, n: 2 }),
            TableId::Table3 => ModelSpec::H4(H4Spec { gamma: 0.1, rho: 0.0, ell, n: 0 }),
        }
    }

    pub fn mode(self) -> Mode {
        match self {
            TableId::Table3 => Mode::Table,
            _ => Mode::Fixed,
        }
    }

    pub fn ells(self) -> std::ops::RangeInclusive<i32> {
        1..=10
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TableId {
    type Err = QesError;

    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| QesError::Parse(format!("unknown table {s:?} (expected table1, table2 or table3)")))
    }
}

/// One printed entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub table: TableId,
    pub ell: i32,
    pub branch: String,
    pub nu: f64,
    pub energy: f64,
    pub rho: Option<f64>,
    pub kappa: Option<f64>,
}

fn parse_opt(s: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        s.parse().map(Some).map_err(|_| QesError::Parse(format!("bad number {s:?} in reference data")))
    }
}

/// Every printed entry of `table`, in file order.
pub fn references(table: TableId) -> Result<Vec<Reference>> {
    let mut out = Vec::new();
    let rows = DATA.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    for line in rows.skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(QesError::Parse(format!("reference row {line:?} has {} fields", f.len())));
        }
        let t: TableId = f[0].parse()?;
        if t != table {
            continue;
        }
        let num = |s: &str| parse_opt(s)?.ok_or_else(|| QesError::Parse(format!("missing value in {line:?}")));
        out.push(Reference {
            table: t,
            ell: f[1].parse().map_err(|_| QesError::Parse(format!("bad ell in {line:?}")))?,
            branch: f[2].to_string(),
            nu: num(f[3])?,
            energy: num(f[4])?,
            rho: parse_opt(f[5])?,
            kappa: parse_opt(f[6])?,
        });
    }
    Ok(out)
}

/// Branches eligible to appear in a table: real parameters, real roots and
/// admissible `ν`.
pub fn candidates(report: &SpectrumReport) -> Vec<&Branch> {
    report.branches.iter().filter(|b| b.is_real() && b.flags.roots_real && b.flags.nu_admissible).collect()
}

/// Largest `|Δ|` over the printed columns.
pub fn delta(r: &Reference, b: &Branch) -> f64 {
    let mut d = (b.nu - r.nu).abs().max((b.energy - r.energy).abs());
    if let Some(rho) = r.rho {
        d = d.max((b.rho.unwrap_or(f64::NAN) - rho).abs());
    }
    if let Some(kappa) = r.kappa {
        d = d.max((b.kappa.unwrap_or(f64::NAN) - kappa).abs());
    }
    if d.is_nan() {
        f64::INFINITY
    } else {
        d
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TableEntry {
    pub reference: Reference,
    pub computed: Option<Branch>,
    pub delta: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub table: TableId,
    pub entries: Vec<TableEntry>,
    pub max_delta: f64,
    pub missing: Vec<(i32, String)>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.missing.is_empty() && self.max_delta <= TABLE_TOL
    }
}

/// Pairs printed entries of one row with computed branches, closest pairs
/// first, each branch used at most once.
pub fn match_row(refs: &[Reference], branches: &[&Branch]) -> Vec<Option<usize>> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, r) in refs.iter().enumerate() {
        for (j, b) in branches.iter().enumerate() {
            pairs.push((delta(r, b), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = vec![None; refs.len()];
    let mut used = vec![false; branches.len()];
    for (_, i, j) in pairs {
        if out[i].is_none() && !used[j] {
            out[i] = Some(j);
            used[j] = true;
        }
    }
    out
}

/// Recomputes the rows `ells` of `table` and compares them with the printed
/// values.
pub fn compare_table(table: TableId, ells: &[i32], cfg: &SolverConfig) -> Result<TableReport> {
    let refs = references(table)?;
    let mut entries = Vec::new();
    let mut missing = Vec::new();
    let mut max_delta: f64 = 0.0;
    for &ell in ells {
        let row: Vec<Reference> = refs.iter().filter(|r| r.ell == ell).cloned().collect();
        if row.is_empty() {
            return Err(QesError::Domain(format!("{table} has no row for ell = {ell}")));
        }
        let report = enumerate_levels(&table.model(ell), table.mode(), cfg)?;
        let cands = candidates(&report);
        let matched = match_row(&row, &cands);
        for (r, m) in row.into_iter().zip(matched) {
            match m {
                Some(j) => {
                    let d = delta(&r, cands[j]);
                    max_delta = max_delta.max(d);
                    entries.push(TableEntry { reference: r, computed: Some(cands[j].clone()), delta: Some(d) });
                }
                None => {
                    missing.push((ell, r.branch.clone()));
                    entries.push(TableEntry { reference: r, computed: None, delta: None });
                }
            }
        }
    }
    Ok(TableReport { table, entries, max_delta, missing })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_data_shape() {
        assert_eq!(references(TableId::Table1).unwrap().len(), 40);
        assert_eq!(references(TableId::Table2).unwrap().len(), 30);
        let t3 = references(TableId::Table3).unwrap();
        assert_eq!(t3.len(), 10);
        assert!(t3.iter().all(|r| r.rho.is_some() && r.kappa.is_some()));
    }

    #[test]
    fn table_names_round_trip() {
        for t in TableId::ALL {
            assert_eq!(t.name().parse::<TableId>().unwrap(), t);
        }
        assert!("table4".parse::<TableId>().is_err());
    }
}
