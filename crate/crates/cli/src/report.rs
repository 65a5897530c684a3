//! Report shapes shared by every subcommand.

use std::path::PathBuf;

use qcf_core::CycloElem;
use rug::{Complex, Float, Integer, Rational};
use serde::Serialize;

pub const TOOL: &str = "qcf";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A binary float rendered in decimal, with the precision it was computed at.
#[derive(Debug, Clone, Serialize)]
pub struct Decimal {
    pub value: String,
    pub precision_bits: u32,
}

impl Decimal {
    pub fn of(x: &Float) -> Self {
        let bits = x.prec();
        let digits = ((bits as f64) * std::f64::consts::LOG10_2).floor().max(1.0) as usize;
        Decimal { value: x.to_string_radix(10, Some(digits)), precision_bits: bits }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexValue {
    pub re: Decimal,
    pub im: Decimal,
}

impl ComplexValue {
    pub fn of(z: &Complex) -> Self {
        ComplexValue { re: Decimal::of(z.real()), im: Decimal::of(z.imag()) }
    }
}

pub fn int(x: &Integer) -> String {
    x.to_string()
}

pub fn rational(x: &Rational) -> String {
    x.to_string()
}

/// Coefficients of the reduced representative, constant term first.
pub fn residue(x: &CycloElem) -> Vec<String> {
    x.rep().coeffs().iter().map(|c| c.to_string()).collect()
}

/// The resolved configuration of a run.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub command: &'static str,
    pub families: Vec<String>,
    pub m_min: Option<u64>,
    pub m_max: Option<u64>,
    pub stages: Option<usize>,
    pub precision: Option<u32>,
    pub digits: Option<usize>,
    pub q: Vec<String>,
    pub j_max: Option<usize>,
    pub format: &'static str,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub items: usize,
    pub passed: usize,
    pub failed: usize,
    pub all_passed: bool,
}

impl Summary {
    pub fn from_flags(flags: impl IntoIterator<Item = bool>) -> Self {
        let (mut items, mut passed) = (0, 0);
        for f in flags {
            items += 1;
            passed += f as usize;
        }
        Summary { items, passed, failed: items - passed, all_passed: passed == items }
    }
}

/// Wall-clock data. Everything outside this object is a function of the configuration.
#[derive(Debug, Clone, Serialize)]
pub struct Timestamp {
    pub started_utc: String,
    pub elapsed_ms: u128,
    pub item_elapsed_ms: Vec<u128>,
}

#[derive(Debug, Serialize)]
pub struct Report<T: Serialize, X: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub banner: Option<&'static str>,
    pub config: ConfigEcho,
    pub results: Vec<T>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<X>,
    pub timestamp: Timestamp,
}

/// Header plus rows, all cells already rendered as strings.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
