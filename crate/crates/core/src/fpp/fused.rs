use crate::env::EdgeWeights;
use crate::error::{Error, Result};
use crate::weight::Weight;

use super::entry_from_column;

/// `F`, `F_H`, `F_V` and `E` at one endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassageTriple<W> {
    pub full: W,
    pub horizontal: W,
    pub vertical: W,
    pub entry: usize,
}

/// All three variants in a single rolling sweep, reading each vertex's
/// weights once.
pub fn passage_triple<W: Weight>(env: &impl EdgeWeights<W>, m: usize, n: usize) -> Result<PassageTriple<W>> {
    let (max_m, max_n) = env.extent();
    if m > max_m || n > max_n {
        return Err(Error::Bounds { i: m, j: n, m: max_m, n: max_n });
    }
    let width = m + 1;
    let mut full = vec![W::ZERO; width];
    let mut hor = vec![W::ZERO; width];
    let mut ver = vec![W::ZERO; width];
    for i in 1..width {
        let w = env.pair(i, 0).horizontal;
        full[i] = full[i - 1] + w;
        hor[i] = hor[i - 1] + w;
    }
    let mut column = Vec::with_capacity(n + 1);
    column.push(hor[m]);

    for j in 1..=n {
        let v = env.pair(0, j).vertical;
        full[0] = full[0] + v;
        ver[0] = ver[0] + v;
        let (mut lf, mut lh, mut lv) = (full[0], hor[0], ver[0]);
        for i in 1..width {
            let w = env.pair(i, j);
            lf = (lf + w.horizontal).min_of(full[i] + w.vertical);
            lh = (lh + w.horizontal).min_of(hor[i]);
            lv = lv.min_of(ver[i] + w.vertical);
            full[i] = lf;
            hor[i] = lh;
            ver[i] = lv;
        }
        column.push(hor[m]);
    }
    Ok(PassageTriple { full: full[m], horizontal: hor[m], vertical: ver[m], entry: entry_from_column(&column) })
}
