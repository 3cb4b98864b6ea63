//! Tracy–Widom GUE reference distribution function.
//!
//! The embedded table is `F2(s) = det(I − K_Airy)` on `L²(s, ∞)` sampled on
//! `[-8, 6]` with step 0.01, produced by `tools/gen_tw_table.py`. Its
//! moments reproduce the published values (mean −1.7710868,
//! variance 0.8131948).

use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const EMBEDDED: &str = include_str!("../../data/tw_gue_cdf.csv");

/// Environment variable naming a replacement table file.
pub const TW_TABLE_ENV: &str = "SJPERC_TW_TABLE";

/// Published mean and standard deviation of TW-GUE.
pub const TW_GUE_MEAN: f64 = -1.771087;
pub const TW_GUE_SD: f64 = 0.901773;

#[derive(Debug, Clone, PartialEq)]
pub struct TwTable {
    abscissae: Vec<f64>,
    values: Vec<f64>,
}

impl TwTable {
    /// Parses `s,cdf` rows; `#` lines and a header row are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut abscissae = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("s,") {
                continue;
            }
            let (s, v) = line
                .split_once(',')
                .ok_or_else(|| Error::TableLoad(format!("line {}: expected 's,cdf'", lineno + 1)))?;
            let parse = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::TableLoad(format!("line {}: bad number '{t}'", lineno + 1)))
            };
            abscissae.push(parse(s)?);
            values.push(parse(v)?);
        }
        let table = Self { abscissae, values };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        if self.abscissae.len() < 2 {
            return Err(Error::TableLoad("table needs at least two rows".into()));
        }
        if self.abscissae.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::TableLoad("abscissae must be strictly increasing".into()));
        }
        if self.values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::TableLoad("CDF values must lie in [0, 1]".into()));
        }
        if self.values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::TableLoad("CDF values must be nondecreasing".into()));
        }
        Ok(())
    }

    pub fn embedded() -> Self {
        Self::parse(EMBEDDED).expect("embedded TW table is valid")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The table named by `SJPERC_TW_TABLE`, or the embedded one.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(TW_TABLE_ENV) {
            Some(path) => Self::from_path(path),
            None => Ok(Self::embedded()),
        }
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Linear interpolation between nodes, clamped to the end values.
    pub fn cdf(&self, x: f64) -> f64 {
        let s = &self.abscissae;
        if x <= s[0] {
            return self.values[0];
        }
        if x >= s[s.len() - 1] {
            return self.values[s.len() - 1];
        }
        let k = s.partition_point(|&t| t <= x);
        let (x0, x1) = (s[k - 1], s[k]);
        let (y0, y1) = (self.values[k - 1], self.values[k]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Smallest tabulated-interpolated `x` with `cdf(x) = level`.
    pub fn quantile(&self, level: f64) -> f64 {
        let v = &self.values;
        let k = v.partition_point(|&c| c < level).clamp(1, v.len() - 1);
        let (c0, c1) = (v[k - 1], v[k]);
        let (x0, x1) = (self.abscissae[k - 1], self.abscissae[k]);
        if c1 == c0 {
            x0
        } else {
            x0 + (x1 - x0) * ((level - c0) / (c1 - c0)).clamp(0.0, 1.0)
        }
    }

    /// Mean and standard deviation of the tabulated law (midpoint rule).
    pub fn moments(&self) -> (f64, f64) {
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for k in 1..self.abscissae.len() {
            let mid = 0.5 * (self.abscissae[k] + self.abscissae[k - 1]);
            let mass = self.values[k] - self.values[k - 1];
            m1 += mid * mass;
            m2 += mid * mid * mass;
        }
        (m1, (m2 - m1 * m1).sqrt())
    }
}

/// The embedded TW-GUE table.
pub fn tw_reference() -> &'static TwTable {
    static TABLE: OnceLock<TwTable> = OnceLock::new();
    TABLE.get_or_init(TwTable::embedded)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tails() {
        let t = tw_reference();
        assert!(t.cdf(-6.0) <= 0.001);
        assert!(t.cdf(4.0) >= 0.999);
        assert!(t.cdf(-100.0) >= 0.0 && t.cdf(100.0) <= 1.0);
    }

    #[test]
    fn grid_covers_range_finely() {
        let t = tw_reference();
        let s = t.abscissae();
        assert!(s[0] <= -6.0 && *s.last().unwrap() >= 4.0);
        assert!(s.windows(2).all(|w| w[1] - w[0] <= 0.05 + 1e-12));
        assert!(t.values().windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn median_and_moments() {
        let t = tw_reference();
        // GUE median.
        assert!((t.quantile(0.5) - (-1.8049)).abs() < 0.005);
        let (mean, sd) = t.moments();
        assert!((mean - TW_GUE_MEAN).abs() < 1e-4);
        assert!((sd - TW_GUE_SD).abs() < 1e-4);
    }

    #[test]
    fn corrupt_tables_rejected() {
        assert!(TwTable::parse("s,cdf\n0,0.1\n").is_err());
        assert!(TwTable::parse("0,0.1\n-1,0.2\n").is_err());
        assert!(TwTable::parse("0,0.3\n1,0.2\n").is_err());
        assert!(TwTable::parse("0,0.3\n1,1.2\n").is_err());
        assert!(TwTable::parse("0;0.3\n1,0.4\n").is_err());
        let ok = TwTable::parse("# c\ns,cdf\n0,0.25\n1,0.75\n").unwrap();
        assert_eq!(ok.cdf(0.5), 0.5);
        assert_eq!(ok.quantile(0.5), 0.5);
    }
}
