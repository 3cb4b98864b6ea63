use crate::env::EdgeWeights;
use crate::error::{Error, Result};
use crate::weight::{Weight, REAL_REL_TOL};

use super::ValueGrid;

/// Horizontal increments `X(i,j) = F(i,j) - F(i-1,j)` (for `i ≥ 1`) and
/// vertical increments `Y(i,j) = F(i,j-1) - F(i,j)` (for `j ≥ 1`), stored
/// over the whole rectangle with unused entries left at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementGrids<W> {
    origin: (usize, usize),
    end: (usize, usize),
    x: Vec<W>,
    y: Vec<W>,
}

impl<W: Weight> IncrementGrids<W> {
    fn index(&self, i: usize, j: usize) -> usize {
        (j - self.origin.1) * (self.end.0 - self.origin.0 + 1) + (i - self.origin.0)
    }

    pub fn x(&self, i: usize, j: usize) -> W {
        self.x[self.index(i, j)]
    }

    pub fn y(&self, i: usize, j: usize) -> W {
        self.y[self.index(i, j)]
    }

    /// Rebuilds `F(m, n)` by walking the bottom row and then down column
    /// `m`: `Σ_i X(i, b) - Σ_j Y(m, j)`.
    pub fn reconstruct(&self, m: usize, n: usize) -> W {
        let (a, b) = self.origin;
        let along = (a + 1..=m).fold(W::ZERO, |acc, i| acc + self.x(i, b));
        (b + 1..=n).fold(along, |acc, j| acc - self.y(m, j))
    }

    pub fn all_nonnegative(&self) -> bool {
        self.x.iter().chain(self.y.iter()).all(|&v| v >= W::ZERO)
    }
}

/// Increments of a full grid, checked against the increment recursions
///
/// `X(i,j) = min(ω, X(i,j-1) + Y(i-1,j) + ω̃)`,
/// `Y(i,j) = max(X(i,j-1) + Y(i-1,j) - ω, -ω̃)`
///
/// at every interior point, with the weights the grid's variant sees.
pub fn increments<W: Weight>(grid: &ValueGrid<W>, env: &impl EdgeWeights<W>) -> Result<IncrementGrids<W>> {
    if !grid.is_full() {
        return Err(Error::Precondition("increments need a full-storage grid".into()));
    }
    let (a, b) = grid.origin();
    let (m, n) = grid.end();
    let cells = (m - a + 1) * (n - b + 1);
    let mut out = IncrementGrids { origin: (a, b), end: (m, n), x: vec![W::ZERO; cells], y: vec![W::ZERO; cells] };
    let mut scale = 0.0f64;
    for j in b..=n {
        for i in a..=m {
            let k = out.index(i, j);
            let here = grid.at(i, j);
            scale = scale.max(here.to_f64().abs());
            if i > a {
                out.x[k] = here - grid.at(i - 1, j);
            }
            if j > b {
                out.y[k] = grid.at(i, j - 1) - here;
            }
        }
    }

    let variant = grid.variant();
    for j in b + 1..=n {
        for i in a + 1..=m {
            let w = variant.select(env.pair(i, j), i);
            let s = out.x(i, j - 1) + out.y(i - 1, j);
            let x_rec = w.horizontal.min_of(s + w.vertical);
            let y_rec = (s - w.horizontal).max_of(-w.vertical);
            if !out.x(i, j).close_within(x_rec, scale, REAL_REL_TOL)
                || !out.y(i, j).close_within(y_rec, scale, REAL_REL_TOL)
            {
                return Err(Error::Consistency(format!(
                    "increment recursion fails at ({i}, {j}): X = {} vs {x_rec}, Y = {} vs {y_rec}",
                    out.x(i, j),
                    out.y(i, j)
                )));
            }
        }
    }
    Ok(out)
}
