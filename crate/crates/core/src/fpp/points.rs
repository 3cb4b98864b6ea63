//! Departure and entry points of horizontal-model geodesics.

use crate::env::EdgeWeights;
use crate::error::Result;
use crate::weight::{Weight, REAL_REL_TOL};

use super::{first_passage_grid, StorageMode, Variant};

/// Backward values `G(0, k) = F_H(0, k; m, n)` for `k = 0..=n`, from one
/// reverse sweep starting at `(m, n)`.
pub fn departure_profile<W: Weight>(env: &impl EdgeWeights<W>, m: usize, n: usize) -> Vec<W> {
    // row[i] holds G(i, j) for the current j, swept from j = n downwards.
    let mut row = vec![W::ZERO; m + 1];
    for i in (0..m).rev() {
        row[i] = row[i + 1] + env.pair(i + 1, n).horizontal;
    }
    let mut column = vec![W::ZERO; n + 1];
    column[n] = row[0];
    for j in (0..n).rev() {
        // G(m, j) = 0: climbing is free.
        for i in (0..m).rev() {
            let via_right = row[i + 1] + env.pair(i + 1, j).horizontal;
            row[i] = via_right.min_of(row[i]);
        }
        column[j] = row[0];
    }
    column
}

/// `D(m, n) = max{k ≥ 0 : F_H(0, k; m, n) = F_H(m, n)}`, the top-most point
/// at which a horizontal-model geodesic can leave the y-axis. Depends on
/// the horizontal weights only.
pub fn departure_point<W: Weight>(env: &impl EdgeWeights<W>, m: usize, n: usize) -> usize {
    let profile = departure_profile(env, m, n);
    let base = profile[0];
    profile.iter().rposition(|&v| v.close_to(base, REAL_REL_TOL)).unwrap_or(0)
}

/// `E(m, n) = max{k ≥ 0 : F_H(m, n - k) = F_H(m, n)}` from the values
/// `F_H(m, 0..=n)` of column `m`.
pub fn entry_from_column<W: Weight>(column: &[W]) -> usize {
    let n = column.len() - 1;
    let top = column[n];
    column.iter().rev().take_while(|&&v| v.close_to(top, REAL_REL_TOL)).count() - 1
}

/// The bottom-most entry point of horizontal-model geodesics to the line
/// through `(m, ·)`.
pub fn entry_point<W: Weight>(env: &impl EdgeWeights<W>, m: usize, n: usize) -> Result<usize> {
    let grid = first_passage_grid(env, Variant::Horizontal, m, n, StorageMode::Rolling)?;
    Ok(entry_from_column(&grid.last_column()))
}
