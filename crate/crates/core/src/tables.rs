//! The two reference tables: largest fidelities at a given energy ratio, and
//! largest energy ratios at a given fidelity.
//!
//! Cells carry the number of decimals they are conventionally printed with;
//! rendering with `full` prints every cell at 6 decimals instead.

use serde::Serialize;
use std::fmt::Write as _;

use crate::bounds::{f_max, y_max, BoundFamily};
use crate::fidelity::{ratio_to_y, y_to_max_ratio};

/// Energy ratios `E2/E1` listed in table 1.
pub const TABLE1_RATIOS: [f64; 4] = [3.0, 2.0, 1.5, 1.1];
/// Fidelities listed in table 2.
pub const TABLE2_FIDELITIES: [f64; 4] = [0.999, 0.99, 0.95, 0.9];

/// Decimals used by `full` rendering.
pub const FULL_DECIMALS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub value: f64,
    #[serde(skip)]
    pub decimals: usize,
}

impl Cell {
    fn new(value: f64, decimals: usize) -> Self {
        Self { value, decimals }
    }

    /// The value at its own precision, or at [`FULL_DECIMALS`].
    pub fn format(&self, full: bool) -> String {
        let d = if full { FULL_DECIMALS } else { self.decimals };
        format!("{:.*}", d, self.value)
    }
}

/// `E2/E1 → (Y, F_coh, F_δ, F_smix, F_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Row {
    pub ratio: f64,
    pub y: Cell,
    pub f_coh: Cell,
    pub f_delta: Cell,
    pub f_smix: Cell,
    pub f_max: Cell,
}

impl Table1Row {
    pub fn cells(&self) -> [Cell; 5] {
        [self.y, self.f_coh, self.f_delta, self.f_smix, self.f_max]
    }
}

/// `F → (Y_m, (E2/E1)_m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table2Row {
    pub fidelity: f64,
    pub y_m: Cell,
    pub ratio_m: Cell,
}

impl Table2Row {
    pub fn cells(&self) -> [Cell; 2] {
        [self.y_m, self.ratio_m]
    }
}

pub fn table1_row(ratio: f64) -> Table1Row {
    let y = ratio_to_y(ratio);
    // near-unit ratios need more digits to be distinguishable
    let (dy, df, dmax) = if ratio < 1.2 { (3, 4, 6) } else { (3, 2, 2) };
    let f = |fam: BoundFamily| f_max(&fam, y).expect("y > 0 for ratio != 1");
    Table1Row {
        ratio,
        y: Cell::new(y, dy),
        f_coh: Cell::new(f(BoundFamily::Coherent), df),
        f_delta: Cell::new(f(BoundFamily::DisplacedEqualShape), df),
        f_smix: Cell::new(f(BoundFamily::Supermixed), df),
        f_max: Cell::new(f(BoundFamily::PureGeneral), dmax),
    }
}

pub fn table2_row(fidelity: f64) -> Table2Row {
    let y = y_max(&BoundFamily::PureGeneral, fidelity).expect("fidelity in (0,1)");
    Table2Row {
        fidelity,
        y_m: Cell::new(y, 2),
        ratio_m: Cell::new(y_to_max_ratio(y), 2),
    }
}

pub fn table1() -> Vec<Table1Row> {
    TABLE1_RATIOS.iter().map(|&r| table1_row(r)).collect()
}

pub fn table2() -> Vec<Table2Row> {
    TABLE2_FIDELITIES.iter().map(|&f| table2_row(f)).collect()
}

fn render(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: Vec<&str>| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", parts.join(" | ").trim_end());
    };
    line(&mut out, header.to_vec());
    for row in &rows {
        line(&mut out, row.iter().map(String::as_str).collect());
    }
    out
}

/// Plain-text rendering of table 1.
pub fn render_table1(full: bool) -> String {
    let rows = table1()
        .iter()
        .map(|r| {
            let mut v = vec![format!("{}", r.ratio)];
            v.extend(r.cells().iter().map(|c| c.format(full)));
            v
        })
        .collect();
    render(&["E2/E1", "Y", "F_coh", "F_delta", "F_smix", "F_max"], rows)
}

/// Plain-text rendering of table 2.
pub fn render_table2(full: bool) -> String {
    let rows = table2()
        .iter()
        .map(|r| {
            let mut v = vec![format!("{}", r.fidelity)];
            v.extend(r.cells().iter().map(|c| c.format(full)));
            v
        })
        .collect();
    render(&["F", "Y_m", "(E2/E1)_m"], rows)
}
