//! Published comparison grid of expert-rule vs expert-net classifications
//! (count scheme, pcm 0.11) over 2437 students, frozen as a fixture.

use super::ComparisonGrid;
use crate::model::FineClass;

/// Row/column order of the published grid.
pub const TABLE2_ORDER: [FineClass; 12] = [
    FineClass::Lwh,
    FineClass::Lze,
    FineClass::Lrv,
    FineClass::Lu,
    FineClass::Sdf,
    FineClass::Srn,
    FineClass::Su,
    FineClass::Ate,
    FineClass::Amo,
    FineClass::Mis,
    FineClass::Au,
    FineClass::Un,
];

/// Rows are the expert rule, columns the network, both in [`TABLE2_ORDER`].
pub const TABLE2_CELLS: [[u64; 12]; 12] = [
    [386, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 98, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [10, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [6, 9, 0, 54, 0, 0, 0, 0, 0, 0, 0, 6],
    [0, 0, 0, 0, 83, 0, 4, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 159, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 2, 22, 40, 3, 0, 0, 0, 2],
    [0, 0, 0, 0, 0, 0, 0, 1050, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 79, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 6, 0, 0],
    [9, 0, 0, 0, 0, 0, 0, 63, 8, 0, 0, 1],
    [43, 6, 0, 15, 35, 14, 11, 119, 26, 2, 0, 66],
];

/// The published grid re-indexed into canonical class order.
pub fn table2_grid() -> ComparisonGrid<FineClass> {
    let mut grid = ComparisonGrid::new();
    for (r, row) in TABLE2_CELLS.iter().enumerate() {
        for (c, &n) in row.iter().enumerate() {
            grid.add_count(TABLE2_ORDER[r], TABLE2_ORDER[c], n);
        }
    }
    grid
}

/// Expert-rule class frequencies, in canonical order.
pub fn table2_row_totals() -> [u64; 12] {
    let mut totals = [0; 12];
    for (r, row) in TABLE2_CELLS.iter().enumerate() {
        totals[TABLE2_ORDER[r].index()] = row.iter().sum();
    }
    totals
}

/// Per-student label lists that reproduce the published grid.
pub fn table2_label_lists() -> (Vec<FineClass>, Vec<FineClass>) {
    let mut reference = Vec::new();
    let mut model = Vec::new();
    for (r, row) in TABLE2_CELLS.iter().enumerate() {
        for (c, &n) in row.iter().enumerate() {
            for _ in 0..n {
                reference.push(TABLE2_ORDER[r]);
                model.push(TABLE2_ORDER[c]);
            }
        }
    }
    (reference, model)
}
