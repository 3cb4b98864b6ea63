//! Exact checks of the boundary-flip identity: when the vertical weights
//! on the y-axis are made non-positive, the full first-passage value equals
//! the value of the model that keeps only horizontal weights and those
//! axis weights.

use serde::Serialize;

use crate::env::{ArithmeticMode, EdgePair, EdgeWeights, WeightEnvironment};
use crate::error::{Error, Result};
use crate::fpp::{departure_point, first_passage_grid, StorageMode, Variant};
use crate::weight::{relative_difference, Weight, REAL_REL_TOL};

/// An environment whose y-axis vertical weights are negated. This is the
/// only weight source in the crate that carries negative weights.
#[derive(Debug, Clone, Copy)]
pub struct SignedBoundaryView<E> {
    inner: E,
}

pub fn negate_boundary<E>(env: E) -> SignedBoundaryView<E> {
    SignedBoundaryView { inner: env }
}

impl<E> SignedBoundaryView<E> {
    pub fn inner(&self) -> &E {
        &self.inner
    }
}

impl<W: Weight, E: EdgeWeights<W>> EdgeWeights<W> for SignedBoundaryView<E> {
    fn extent(&self) -> (usize, usize) {
        self.inner.extent()
    }

    #[inline(always)]
    fn pair(&self, i: usize, j: usize) -> EdgePair<W> {
        let p = self.inner.pair(i, j);
        if i == 0 {
            EdgePair { horizontal: p.horizontal, vertical: -p.vertical }
        } else {
            p
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub extent: (usize, usize),
    pub max_abs_discrepancy: f64,
    pub max_rel_discrepancy: f64,
    /// Points where the two values differ beyond tolerance (exactly, in
    /// integer mode).
    pub violations: usize,
    pub mode: ArithmeticMode,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks the sign pattern: horizontal weights ≥ 0, vertical weights ≥ 0
/// off the y-axis and ≤ 0 on it.
pub fn check_sign_pattern<W: Weight>(env: &impl EdgeWeights<W>, m: usize, n: usize) -> Result<()> {
    for j in 0..=n {
        for i in 0..=m {
            let w = env.pair(i, j);
            if i >= 1 && w.horizontal < W::ZERO {
                return Err(Error::Precondition(format!("negative horizontal weight at ({i}, {j})")));
            }
            if j >= 1 {
                let ok = if i == 0 { w.vertical <= W::ZERO } else { w.vertical >= W::ZERO };
                if !ok {
                    return Err(Error::Precondition(format!(
                        "vertical weight {} at ({i}, {j}) breaks the boundary sign pattern",
                        w.vertical
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Compares the full recursion with the horizontal-plus-axis recursion at
/// every point of `[0, m] × [0, n]`.
pub fn verify_identity<W: Weight>(view: &impl EdgeWeights<W>, m: usize, n: usize) -> Result<IdentityReport> {
    check_sign_pattern(view, m, n)?;
    let full = first_passage_grid(view, Variant::Full, m, n, StorageMode::Full)?;
    let axis = first_passage_grid(view, Variant::HorizontalWithAxis, m, n, StorageMode::Full)?;
    let mut report = IdentityReport {
        extent: (m, n),
        max_abs_discrepancy: 0.0,
        max_rel_discrepancy: 0.0,
        violations: 0,
        mode: if std::any::TypeId::of::<W>() == std::any::TypeId::of::<i64>() {
            ArithmeticMode::Integer
        } else {
            ArithmeticMode::Real
        },
    };
    for j in 0..=n {
        for i in 0..=m {
            let (a, b) = (full.at(i, j), axis.at(i, j));
            let (af, bf) = (a.to_f64(), b.to_f64());
            report.max_abs_discrepancy = report.max_abs_discrepancy.max((af - bf).abs());
            report.max_rel_discrepancy = report.max_rel_discrepancy.max(relative_difference(af, bf));
            if !a.close_to(b, REAL_REL_TOL) {
                report.violations += 1;
            }
        }
    }
    Ok(report)
}

/// The four numbers of the sandwich `F_H ≤ F ≤ F_H + Σ_{j ≤ D} η(0, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundWitness<W> {
    pub full: W,
    pub horizontal: W,
    pub departure: usize,
    pub boundary_sum: W,
    pub holds: bool,
}

impl<W: Weight> BoundWitness<W> {
    pub fn strict_both_sides(&self) -> bool {
        self.horizontal < self.full && self.full < self.horizontal + self.boundary_sum
    }
}

pub fn upper_bound_check<W: Weight>(env: &WeightEnvironment, m: usize, n: usize) -> Result<BoundWitness<W>> {
    let full: W = first_passage_grid(env, Variant::Full, m, n, StorageMode::Rolling)?.endpoint();
    let horizontal: W = first_passage_grid(env, Variant::Horizontal, m, n, StorageMode::Rolling)?.endpoint();
    let departure = departure_point::<W>(env, m, n);
    let boundary_sum = (1..=departure).fold(W::ZERO, |acc, j| acc + W::from_sample(env.eta(0, j)));
    let holds = horizontal <= full && full <= horizontal + boundary_sum;
    Ok(BoundWitness { full, horizontal, departure, boundary_sum, holds })
}
