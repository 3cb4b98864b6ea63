//! Min-plus dynamic programming for first-passage values.
//!
//! A value at `(i, j)` depends only on `(i-1, j)` and `(i, j-1)`, so the grid
//! is swept row by row (`j` outer, `i` inner). Rolling storage keeps a
//! single row in memory plus the traces that downstream statistics need.

mod fused;
mod increments;
mod oracle;
mod points;

pub use fused::{passage_triple, PassageTriple};
pub use increments::{increments, IncrementGrids};
pub use oracle::{brute_force_value, BRUTE_FORCE_MAX_STEPS};
pub use points::{departure_point, departure_profile, entry_point, entry_from_column};

use serde::{Deserialize, Serialize};

use crate::env::{EdgePair, EdgeWeights};
use crate::error::{Error, Result};
use crate::weight::Weight;

/// Which edge weights a first-passage value sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Both horizontal and vertical weights.
    Full,
    /// Horizontal weights only; all vertical edges are free.
    Horizontal,
    /// Vertical weights only; all horizontal edges are free.
    Vertical,
    /// Horizontal weights plus the vertical weights on the y-axis `i = 0`.
    /// This is the comparison model of the boundary-flip identity and is
    /// distinct from [`Variant::Horizontal`].
    HorizontalWithAxis,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Full, Variant::Horizontal, Variant::Vertical];

    /// Weights seen by this variant at vertex `(i, j)` (absolute coordinates).
    #[inline(always)]
    pub fn select<W: Weight>(self, pair: EdgePair<W>, i: usize) -> EdgePair<W> {
        match self {
            Variant::Full => pair,
            Variant::Horizontal => EdgePair { horizontal: pair.horizontal, vertical: W::ZERO },
            Variant::Vertical => EdgePair { horizontal: W::ZERO, vertical: pair.vertical },
            Variant::HorizontalWithAxis => EdgePair {
                horizontal: pair.horizontal,
                vertical: if i == 0 { pair.vertical } else { W::ZERO },
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StorageMode {
    Full,
    Rolling,
}

/// Default cap on the number of cells of a fully stored grid.
pub const FULL_GRID_CELL_BUDGET: usize = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
enum Storage<W> {
    Full(Vec<W>),
    Rolling { first_row: Vec<W>, last_row: Vec<W>, last_column: Vec<W> },
}

/// First-passage values from `origin` to every point of the rectangle
/// `[origin.0, end.0] × [origin.1, end.1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueGrid<W> {
    variant: Variant,
    origin: (usize, usize),
    end: (usize, usize),
    storage: Storage<W>,
}

impl<W: Weight> ValueGrid<W> {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn origin(&self) -> (usize, usize) {
        self.origin
    }

    pub fn end(&self) -> (usize, usize) {
        self.end
    }

    pub fn storage_mode(&self) -> StorageMode {
        match self.storage {
            Storage::Full(_) => StorageMode::Full,
            Storage::Rolling { .. } => StorageMode::Rolling,
        }
    }

    fn width(&self) -> usize {
        self.end.0 - self.origin.0 + 1
    }

    /// Value at the absolute point `(i, j)`, if it is retained.
    pub fn get(&self, i: usize, j: usize) -> Option<W> {
        let (a, b) = self.origin;
        let (m, n) = self.end;
        if i < a || j < b || i > m || j > n {
            return None;
        }
        let (di, dj) = (i - a, j - b);
        match &self.storage {
            Storage::Full(values) => Some(values[dj * self.width() + di]),
            Storage::Rolling { first_row, last_row, last_column } => {
                if j == n {
                    Some(last_row[di])
                } else if j == b {
                    Some(first_row[di])
                } else if i == m {
                    Some(last_column[dj])
                } else {
                    None
                }
            }
        }
    }

    /// Value at `(i, j)` for a full grid. Panics outside the rectangle or on
    /// a rolling grid.
    pub fn at(&self, i: usize, j: usize) -> W {
        self.get(i, j).unwrap_or_else(|| panic!("value at ({i}, {j}) not retained"))
    }

    /// Value at the far corner.
    pub fn endpoint(&self) -> W {
        self.at(self.end.0, self.end.1)
    }

    /// Values along the last column, indexed from `origin.1` to `end.1`.
    pub fn last_column(&self) -> Vec<W> {
        match &self.storage {
            Storage::Rolling { last_column, .. } => last_column.clone(),
            Storage::Full(_) => (self.origin.1..=self.end.1).map(|j| self.at(self.end.0, j)).collect(),
        }
    }

    pub fn last_row(&self) -> Vec<W> {
        (self.origin.0..=self.end.0).map(|i| self.at(i, self.end.1)).collect()
    }

    pub fn first_row(&self) -> Vec<W> {
        (self.origin.0..=self.end.0).map(|i| self.at(i, self.origin.1)).collect()
    }

    pub fn is_full(&self) -> bool {
        matches!(self.storage, Storage::Full(_))
    }
}

/// First-passage values from `(0, 0)` over `[0, m] × [0, n]`.
pub fn first_passage_grid<W: Weight>(
    env: &impl EdgeWeights<W>,
    variant: Variant,
    m: usize,
    n: usize,
    storage: StorageMode,
) -> Result<ValueGrid<W>> {
    sweep(env, variant, (0, 0), (m, n), storage, FULL_GRID_CELL_BUDGET)
}

/// `F(a, b; m, n)`.
pub fn first_passage_between<W: Weight>(
    env: &impl EdgeWeights<W>,
    variant: Variant,
    a: usize,
    b: usize,
    m: usize,
    n: usize,
) -> Result<W> {
    if a > m || b > n {
        return Err(Error::Domain(format!(
            "first-passage value from ({a}, {b}) to ({m}, {n}) is undefined: paths only go up and right"
        )));
    }
    Ok(sweep(env, variant, (a, b), (m, n), StorageMode::Rolling, FULL_GRID_CELL_BUDGET)?.endpoint())
}

/// Row-by-row min-plus sweep over the rectangle `origin..=end`.
pub fn sweep<W: Weight>(
    env: &impl EdgeWeights<W>,
    variant: Variant,
    origin: (usize, usize),
    end: (usize, usize),
    storage: StorageMode,
    cell_budget: usize,
) -> Result<ValueGrid<W>> {
    let (a, b) = origin;
    let (m, n) = end;
    let (max_m, max_n) = env.extent();
    if m > max_m || n > max_n {
        return Err(Error::Bounds { i: m, j: n, m: max_m, n: max_n });
    }
    if a > m || b > n {
        return Err(Error::Domain(format!("origin ({a}, {b}) is not below-left of ({m}, {n})")));
    }
    let width = m - a + 1;
    let height = n - b + 1;
    let mut full = match storage {
        StorageMode::Full => {
            let cells = width.saturating_mul(height);
            if cells > cell_budget {
                return Err(Error::Resource { cells, budget: cell_budget });
            }
            Some(Vec::with_capacity(cells))
        }
        StorageMode::Rolling => None,
    };

    let mut row = vec![W::ZERO; width];
    for k in 1..width {
        let w = variant.select(env.pair(a + k, b), a + k);
        row[k] = row[k - 1] + w.horizontal;
    }
    let first_row = row.clone();
    let mut last_column = Vec::with_capacity(if full.is_some() { 0 } else { height });
    if let Some(values) = full.as_mut() {
        values.extend_from_slice(&row);
    } else {
        last_column.push(row[width - 1]);
    }

    for j in b + 1..=n {
        let w = variant.select(env.pair(a, j), a);
        row[0] = row[0] + w.vertical;
        let mut left = row[0];
        for (k, cell) in row.iter_mut().enumerate().skip(1) {
            let w = variant.select(env.pair(a + k, j), a + k);
            let value = (left + w.horizontal).min_of(*cell + w.vertical);
            *cell = value;
            left = value;
        }
        if let Some(values) = full.as_mut() {
            values.extend_from_slice(&row);
        } else {
            last_column.push(row[width - 1]);
        }
    }

    let storage = match full {
        Some(values) => Storage::Full(values),
        None => Storage::Rolling { first_row, last_row: row, last_column },
    };
    Ok(ValueGrid { variant, origin, end, storage })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    Right,
    Up,
}

/// A minimising up-right path with its weight decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic<W> {
    pub variant: Variant,
    pub vertices: Vec<(usize, usize)>,
    pub steps: Vec<Step>,
    pub edge_weights: Vec<W>,
    pub total: W,
}

impl<W: Weight> Geodesic<W> {
    /// Every step moves exactly one unit right or up.
    pub fn is_up_right(&self) -> bool {
        self.vertices.windows(2).all(|w| {
            let (p, q) = (w[0], w[1]);
            (q.0 == p.0 + 1 && q.1 == p.1) || (q.0 == p.0 && q.1 == p.1 + 1)
        })
    }
}

/// Geodesic from `(0, 0)` to `(m, n)`, preferring the horizontal
/// predecessor when both achieve the minimum.
pub fn geodesic<W: Weight>(env: &impl EdgeWeights<W>, variant: Variant, m: usize, n: usize) -> Result<Geodesic<W>> {
    let grid = first_passage_grid(env, variant, m, n, StorageMode::Full)?;
    geodesic_from_grid(env, &grid)
}

pub fn geodesic_from_grid<W: Weight>(env: &impl EdgeWeights<W>, grid: &ValueGrid<W>) -> Result<Geodesic<W>> {
    if !grid.is_full() {
        return Err(Error::Precondition("geodesic backtracking needs a full-storage grid".into()));
    }
    let variant = grid.variant();
    let (a, b) = grid.origin();
    let (mut i, mut j) = grid.end();
    let mut vertices = vec![(i, j)];
    let mut steps = Vec::new();
    let mut edge_weights = Vec::new();
    while (i, j) != (a, b) {
        let w = variant.select(env.pair(i, j), i);
        let here = grid.at(i, j);
        // Values were produced by exactly these sums, so equality is exact.
        let horizontal = i > a && (j == b || grid.at(i - 1, j) + w.horizontal == here);
        if horizontal {
            steps.push(Step::Right);
            edge_weights.push(w.horizontal);
            i -= 1;
        } else {
            if j == b || grid.at(i, j - 1) + w.vertical != here {
                return Err(Error::Consistency(format!("no predecessor of ({i}, {j}) achieves its value")));
            }
            steps.push(Step::Up);
            edge_weights.push(w.vertical);
            j -= 1;
        }
        vertices.push((i, j));
    }
    vertices.reverse();
    steps.reverse();
    edge_weights.reverse();
    let total = edge_weights.iter().fold(W::ZERO, |acc, &w| acc + w);
    Ok(Geodesic { variant, vertices, steps, edge_weights, total })
}
