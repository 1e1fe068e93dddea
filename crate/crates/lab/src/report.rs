//! Experiment reports.
//!
//! A report is a set of tables plus checks. Every check is a rule over the
//! report's own tables, so the verdict can be recomputed from the tables
//! alone. Wall-clock timings are kept out of reports (see [`crate::run`]) so
//! that identical inputs give byte-identical files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{io_err, usage, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// A table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Num(f64),
    Text(String),
}

impl Value {
    /// Non-finite numbers are stored as text so the JSON stays valid.
    pub fn num(x: f64) -> Self {
        if x.is_finite() {
            Value::Num(x)
        } else {
            Value::Text(format!("{x}"))
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Num(x) => Some(x),
            Value::Int(i) => Some(i as f64),
            _ => None,
        }
    }

    fn csv_field(&self) -> String {
        match self {
            Value::Bool(b) => b.to_string(),
            Value::Int(i) => i.to_string(),
            Value::Num(x) => format!("{x:?}"),
            Value::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::num(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<i64> for Value {
    fn from(x: i64) -> Self {
        Value::Int(x)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_owned())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width differs from table {}", self.name);
        self.rows.push(row);
    }

    pub fn column_index(&self, column: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == column)
    }

    pub fn column(&self, column: &str) -> Option<Vec<&Value>> {
        let k = self.column_index(column)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }

    pub fn numbers(&self, column: &str) -> Option<Vec<f64>> {
        self.column(column)?.into_iter().map(Value::as_f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// A machine-checkable statement about one table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    /// Every value of `column` is `>= bound`.
    AtLeast { table: String, column: String, bound: f64 },
    /// Every value of `column` is `<= bound`.
    AtMost { table: String, column: String, bound: f64 },
    /// Every value of `column` is `< bound`.
    Below { table: String, column: String, bound: f64 },
    /// Row by row, `|value - target| <= tol`, all three being columns.
    Within { table: String, value: String, target: String, tol: String },
    /// Values of `column`, in row order, are monotone. With `group`, rows are
    /// split by the value of that column first.
    Monotone { table: String, column: String, group: Option<String>, direction: Direction, strict: bool },
}

impl Rule {
    pub fn table(&self) -> &str {
        match self {
            Rule::AtLeast { table, .. }
            | Rule::AtMost { table, .. }
            | Rule::Below { table, .. }
            | Rule::Within { table, .. }
            | Rule::Monotone { table, .. } => table,
        }
    }

    pub fn evaluate(&self, tables: &[Table]) -> Result<bool> {
        let t = tables
            .iter()
            .find(|t| t.name == self.table())
            .ok_or_else(|| usage(format!("check refers to missing table {}", self.table())))?;
        let nums = |c: &str| t.numbers(c).ok_or_else(|| usage(format!("column {}.{c} is missing or not numeric", t.name)));
        Ok(match self {
            Rule::AtLeast { column, bound, .. } => nums(column)?.iter().all(|v| v >= bound),
            Rule::AtMost { column, bound, .. } => nums(column)?.iter().all(|v| v <= bound),
            Rule::Below { column, bound, .. } => nums(column)?.iter().all(|v| v < bound),
            Rule::Within { value, target, tol, .. } => {
                let (v, g, e) = (nums(value)?, nums(target)?, nums(tol)?);
                v.iter().zip(&g).zip(&e).all(|((v, g), e)| (v - g).abs() <= *e)
            }
            Rule::Monotone { column, group, direction, strict, .. } => {
                let values = nums(column)?;
                let keys: Vec<String> = match group {
                    Some(g) => t
                        .column(g)
                        .ok_or_else(|| usage(format!("group column {g} missing")))?
                        .into_iter()
                        .map(|v| v.csv_field())
                        .collect(),
                    None => vec![String::new(); values.len()],
                };
                let mut ok = true;
                for (i, key) in keys.iter().enumerate() {
                    if let Some(j) = (0..i).rev().find(|&j| &keys[j] == key) {
                        let (a, b) = (values[j], values[i]);
                        ok &= match (direction, strict) {
                            (Direction::Decreasing, true) => b < a,
                            (Direction::Decreasing, false) => b <= a,
                            (Direction::Increasing, true) => b > a,
                            (Direction::Increasing, false) => b >= a,
                        };
                    }
                }
                ok
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub rule: Rule,
    pub passed: bool,
    /// Reported but not part of the verdict.
    pub informational: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub experiment: String,
    pub config: serde_json::Value,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    /// Wording of the verdict, e.g. "consistent with infinite speed".
    pub label: String,
    pub notes: Vec<String>,
}

/// Collects tables and checks, then evaluates them into a [`Report`].
#[derive(Debug, Default)]
pub struct ReportBuilder {
    experiment: String,
    config: serde_json::Value,
    tables: Vec<Table>,
    checks: Vec<(String, Rule, bool)>,
    notes: Vec<String>,
    pass_label: Option<String>,
}

impl ReportBuilder {
    pub fn new(experiment: &str, config: &impl Serialize) -> Result<Self> {
        Ok(Self { experiment: experiment.into(), config: serde_json::to_value(config)?, ..Default::default() })
    }

    pub fn table(&mut self, table: Table) -> &mut Self {
        self.tables.push(table);
        self
    }

    pub fn check(&mut self, name: &str, rule: Rule) -> &mut Self {
        self.checks.push((name.into(), rule, false));
        self
    }

    pub fn info(&mut self, name: &str, rule: Rule) -> &mut Self {
        self.checks.push((name.into(), rule, true));
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    /// Label used instead of "PASS" when all checks pass.
    pub fn pass_label(&mut self, label: &str) -> &mut Self {
        self.pass_label = Some(label.into());
        self
    }

    pub fn finish(self) -> Result<Report> {
        let mut checks = Vec::with_capacity(self.checks.len());
        for (name, rule, informational) in self.checks {
            let passed = rule.evaluate(&self.tables)?;
            checks.push(Check { name, rule, passed, informational });
        }
        let verdict = if checks.iter().all(|c| c.passed || c.informational) { Verdict::Pass } else { Verdict::Fail };
        let label = match verdict {
            Verdict::Pass => self.pass_label.unwrap_or_else(|| "PASS".into()),
            Verdict::Fail => "FAIL".into(),
        };
        Ok(Report {
            schema_version: SCHEMA_VERSION,
            experiment: self.experiment,
            config: self.config,
            tables: self.tables,
            checks,
            verdict,
            label,
            notes: self.notes,
        })
    }
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write_json(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let path = dir.join("report.json");
        fs::write(&path, self.to_json()?).map_err(io_err(&path))
    }

    /// One CSV per table, plus `checks.csv` with each rule as a JSON cell.
    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        for t in &self.tables {
            let path = dir.join(format!("{}.csv", t.name));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(&t.columns)?;
            for row in &t.rows {
                w.write_record(row.iter().map(Value::csv_field))?;
            }
            w.flush().map_err(io_err(&path))?;
        }
        let path = dir.join("checks.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["name", "rule", "passed", "informational"])?;
        for c in &self.checks {
            w.write_record([
                c.name.clone(),
                serde_json::to_string(&c.rule)?,
                c.passed.to_string(),
                c.informational.to_string(),
            ])?;
        }
        w.write_record(["verdict", "", &format!("{:?}", self.verdict).to_uppercase(), &self.label])?;
        w.flush().map_err(io_err(&path))
    }
}
