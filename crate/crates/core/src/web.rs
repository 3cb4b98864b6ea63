//! The subgraph of zero-weight edges. At an interior vertex exactly one
//! incoming edge has weight zero whenever ξ and η are positive: the
//! horizontal one if `B = 0`, the vertical one if `B = 1`. Followed
//! backwards these edges form coalescing south-west random walks.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::env::{DistributionSpec, WeightEnvironment};
use crate::error::{Error, Result};
use crate::fpp::{first_passage_grid, StorageMode, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WebDirection {
    #[serde(rename = "H")]
    Horizontal,
    #[serde(rename = "V")]
    Vertical,
}

impl fmt::Display for WebDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Horizontal => "H",
            Self::Vertical => "V",
        })
    }
}

impl FromStr for WebDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" => Ok(Self::Horizontal),
            "V" => Ok(Self::Vertical),
            other => Err(Error::Config(format!("unknown web direction '{other}'"))),
        }
    }
}

/// Kept incoming edge of every vertex `(i, j)` with `1 ≤ i ≤ M`, `1 ≤ j ≤ N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WebGraph {
    m: usize,
    n: usize,
    dirs: Vec<WebDirection>,
}

#[derive(Debug, Serialize, Deserialize)]
struct WebRow {
    i: usize,
    j: usize,
    dir: WebDirection,
}

impl WebGraph {
    pub fn extent(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    fn index(&self, i: usize, j: usize) -> usize {
        (j - 1) * self.m + (i - 1)
    }

    pub fn direction(&self, i: usize, j: usize) -> WebDirection {
        assert!(i >= 1 && j >= 1 && i <= self.m && j <= self.n, "({i}, {j}) is not an interior vertex");
        self.dirs[self.index(i, j)]
    }

    /// Vertices visited by following kept edges backwards from `(i, j)`
    /// until an axis is reached.
    pub fn trace_back(&self, mut i: usize, mut j: usize) -> Vec<(usize, usize)> {
        let mut path = vec![(i, j)];
        while i >= 1 && j >= 1 {
            match self.direction(i, j) {
                WebDirection::Horizontal => i -= 1,
                WebDirection::Vertical => j -= 1,
            }
            path.push((i, j));
        }
        path
    }

    /// CSV with header `i,j,dir`, one row per interior vertex, rows ordered
    /// by `j` then `i`.
    pub fn write_csv<Wr: Write>(&self, out: Wr) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        for j in 1..=self.n {
            for i in 1..=self.m {
                writer.serialize(WebRow { i, j, dir: self.direction(i, j) })?;
            }
        }
        writer.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rows = Vec::new();
        for row in csv::Reader::from_reader(input).deserialize() {
            let row: WebRow = row?;
            rows.push(row);
        }
        let m = rows.iter().map(|r| r.i).max().unwrap_or(0);
        let n = rows.iter().map(|r| r.j).max().unwrap_or(0);
        if rows.len() != m * n || rows.iter().any(|r| r.i == 0 || r.j == 0) {
            return Err(Error::Config(format!("web CSV with {} rows does not cover a {m}x{n} grid", rows.len())));
        }
        let mut web = WebGraph { m, n, dirs: vec![WebDirection::Horizontal; m * n] };
        let mut seen = vec![false; m * n];
        for r in rows {
            let k = web.index(r.i, r.j);
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::Config(format!("duplicate web row ({}, {})", r.i, r.j)));
            }
            web.dirs[k] = r.dir;
        }
        Ok(web)
    }
}

/// Builds the web over `[1, M] × [1, N]` from the switch field alone.
pub fn build_web(env: &WeightEnvironment) -> WebGraph {
    let (m, n) = crate::env::EdgeWeights::<f64>::extent(env);
    let mut dirs = Vec::with_capacity(m * n);
    for j in 1..=n {
        for i in 1..=m {
            dirs.push(if env.switch(i, j) { WebDirection::Vertical } else { WebDirection::Horizontal });
        }
    }
    WebGraph { m, n, dirs }
}

pub fn export_web<Wr: Write>(web: &WebGraph, destination: Wr) -> Result<()> {
    web.write_csv(destination)
}

/// Smallest number of removed edges crossed on an up-right path to `(m, n)`
/// when every removed edge costs one.
pub fn jump_distance(env_unit: &WeightEnvironment, m: usize, n: usize) -> Result<u64> {
    let unit = DistributionSpec::Constant { c: 1.0 };
    let config = env_unit.config();
    if config.xi != unit || config.eta != unit {
        return Err(Error::Precondition(format!(
            "jump distance needs unit weights, got xi = {}, eta = {}",
            config.xi, config.eta
        )));
    }
    let value: i64 = first_passage_grid(env_unit, Variant::Full, m, n, StorageMode::Rolling)?.endpoint();
    Ok(value as u64)
}
