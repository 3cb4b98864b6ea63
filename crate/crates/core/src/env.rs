//! Weight laws and reproducible weight environments on the quadrant.
//!
//! At every vertex `(i, j)` three independent variables are drawn: the
//! switch `B(i,j) ∈ {0,1}`, the horizontal magnitude `ξ(i,j)` and the
//! vertical magnitude `η(i,j)`. The horizontal edge `(i-1,j) → (i,j)` then
//! carries `ω = B·ξ` and the vertical edge `(i,j-1) → (i,j)` carries
//! `ω̃ = (1-B)·η`, so at most one incoming edge of a vertex has positive
//! weight.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{CounterRng, StreamTag};
use crate::weight::Weight;

/// Law of a nonnegative weight magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DistributionSpec {
    /// Value 1 with probability `q`, else 0.
    Bernoulli { q: f64 },
    Constant { c: f64 },
    /// Failures before the first success: `P(Z = k) = q (1-q)^k`, `k ≥ 0`.
    Geometric { q: f64 },
    Exponential { rate: f64 },
    /// `scale` with probability `q`, else 0.
    ScaledBernoulli { scale: f64, q: f64 },
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        let prob = |q: f64, name: &str| {
            if (0.0..=1.0).contains(&q) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} probability {q} outside [0, 1]")))
            }
        };
        let nonneg = |c: f64, name: &str| {
            if c.is_finite() && c >= 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} value {c} must be finite and nonnegative")))
            }
        };
        match *self {
            Self::Bernoulli { q } => prob(q, "bernoulli"),
            Self::Constant { c } => nonneg(c, "constant"),
            Self::Geometric { q } => {
                if q > 0.0 && q <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!("geometric success probability {q} outside (0, 1]")))
                }
            }
            Self::Exponential { rate } => {
                if rate.is_finite() && rate > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!("exponential rate {rate} must be positive")))
                }
            }
            Self::ScaledBernoulli { scale, q } => {
                nonneg(scale, "scaled bernoulli scale")?;
                prob(q, "scaled bernoulli")
            }
        }
    }

    /// Exact `P(value = 0)`.
    pub fn zero_probability(&self) -> f64 {
        match *self {
            Self::Bernoulli { q } => 1.0 - q,
            Self::Constant { c } => {
                if c == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Geometric { q } => q,
            Self::Exponential { .. } => 0.0,
            Self::ScaledBernoulli { scale, q } => {
                if scale == 0.0 {
                    1.0
                } else {
                    1.0 - q
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Bernoulli { q } => q,
            Self::Constant { c } => c,
            Self::Geometric { q } => (1.0 - q) / q,
            Self::Exponential { rate } => 1.0 / rate,
            Self::ScaledBernoulli { scale, q } => scale * q,
        }
    }

    /// Whether every sample is an integer, which integer mode requires.
    pub fn is_integral(&self) -> bool {
        match *self {
            Self::Bernoulli { .. } | Self::Geometric { .. } => true,
            Self::Constant { c } => c.fract() == 0.0,
            Self::ScaledBernoulli { scale, .. } => scale.fract() == 0.0,
            Self::Exponential { .. } => false,
        }
    }

    /// `Some((scale, prob))` when the law is `scale · Bernoulli(prob)`.
    pub fn as_scaled_bernoulli(&self) -> Option<(f64, f64)> {
        match *self {
            Self::Bernoulli { q } => Some((1.0, q)),
            Self::Constant { c } => Some((c, 1.0)),
            Self::ScaledBernoulli { scale, q } => Some((scale, q)),
            Self::Geometric { q: 1.0 } => Some((0.0, 1.0)),
            _ => None,
        }
    }

    #[inline]
    pub fn sample(&self, draw: f64) -> f64 {
        sample_value(self, draw)
    }
}

/// Inverse-transform sample of `spec` from a uniform draw in `[0, 1)`.
#[inline]
pub fn sample_value(spec: &DistributionSpec, draw: f64) -> f64 {
    match *spec {
        DistributionSpec::Bernoulli { q } => {
            if draw < q {
                1.0
            } else {
                0.0
            }
        }
        DistributionSpec::Constant { c } => c,
        DistributionSpec::Geometric { q } => {
            if q >= 1.0 {
                0.0
            } else {
                ((1.0 - draw).ln() / (1.0 - q).ln()).floor()
            }
        }
        DistributionSpec::Exponential { rate } => -(1.0 - draw).ln() / rate,
        DistributionSpec::ScaledBernoulli { scale, q } => {
            if draw < q {
                scale
            } else {
                0.0
            }
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bernoulli { q } => write!(f, "bernoulli:{q}"),
            Self::Constant { c } => write!(f, "const:{c}"),
            Self::Geometric { q } => write!(f, "geom:{q}"),
            Self::Exponential { rate } => write!(f, "exp:{rate}"),
            Self::ScaledBernoulli { scale, q } => write!(f, "sbern:{scale},{q}"),
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("distribution '{s}' is not of the form kind:params")))?;
        let params = args
            .split(',')
            .map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad number '{a}' in distribution '{s}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        let want = |k: usize| {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::Config(format!("distribution '{s}' expects {k} parameter(s)")))
            }
        };
        let spec = match kind.trim() {
            "bernoulli" | "bern" => {
                want(1)?;
                Self::Bernoulli { q: params[0] }
            }
            "const" | "constant" => {
                want(1)?;
                Self::Constant { c: params[0] }
            }
            "geom" | "geometric" => {
                want(1)?;
                Self::Geometric { q: params[0] }
            }
            "exp" | "exponential" => {
                want(1)?;
                Self::Exponential { rate: params[0] }
            }
            "sbern" => {
                want(2)?;
                Self::ScaledBernoulli { scale: params[0], q: params[1] }
            }
            other => return Err(Error::Config(format!("unknown distribution kind '{other}'"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl TryFrom<String> for DistributionSpec {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl From<DistributionSpec> for String {
    fn from(value: DistributionSpec) -> Self {
        value.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithmeticMode {
    #[serde(alias = "int")]
    Integer,
    Real,
}

impl FromStr for ArithmeticMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "int" | "integer" => Ok(Self::Integer),
            "real" => Ok(Self::Real),
            other => Err(Error::Config(format!("unknown arithmetic mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentConfig {
    /// `P(B = 1)`, the probability that a vertex puts its weight on the
    /// horizontal incoming edge.
    pub p_bern: f64,
    pub xi: DistributionSpec,
    pub eta: DistributionSpec,
    pub mode: ArithmeticMode,
}

impl EnvironmentConfig {
    pub fn new(p_bern: f64, xi: DistributionSpec, eta: DistributionSpec, mode: ArithmeticMode) -> Result<Self> {
        let config = Self { p_bern, xi, eta, mode };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_bern) {
            return Err(Error::Config(format!("switch probability {} outside [0, 1]", self.p_bern)));
        }
        self.xi.validate()?;
        self.eta.validate()?;
        if self.mode == ArithmeticMode::Integer {
            for (name, spec) in [("xi", &self.xi), ("eta", &self.eta)] {
                if !spec.is_integral() {
                    return Err(Error::Config(format!(
                        "integer mode requires integer-valued {name} law, got {spec}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Exact `P(edge weight = 0)` for the given orientation.
    pub fn weight_zero_probability(&self, orientation: Orientation) -> f64 {
        match orientation {
            Orientation::Horizontal => (1.0 - self.p_bern) + self.p_bern * self.xi.zero_probability(),
            Orientation::Vertical => self.p_bern + (1.0 - self.p_bern) * self.eta.zero_probability(),
        }
    }

    /// `(scale, prob)` such that the edge weight of this orientation is
    /// distributed as `scale · Bernoulli(prob)`.
    pub fn scaled_bernoulli_law(&self, orientation: Orientation) -> Result<(f64, f64)> {
        let (switch_on, spec) = match orientation {
            Orientation::Horizontal => (self.p_bern, self.xi),
            Orientation::Vertical => (1.0 - self.p_bern, self.eta),
        };
        if switch_on == 0.0 {
            return Ok((0.0, 1.0));
        }
        let (scale, prob) = spec
            .as_scaled_bernoulli()
            .ok_or_else(|| Error::UnsupportedClosedForm(format!("{orientation:?} weights with law {spec}")))?;
        Ok((scale, switch_on * prob))
    }

    /// Bernoulli parameter of the horizontal weight `B·ξ` when it is exactly
    /// a `{0, 1}`-valued Bernoulli variable.
    pub fn effective_horizontal_bernoulli(&self) -> Result<f64> {
        match self.scaled_bernoulli_law(Orientation::Horizontal)? {
            (1.0, prob) => Ok(prob),
            (_, 0.0) => Ok(0.0),
            (scale, _) => Err(Error::Config(format!(
                "horizontal weights are {scale} x Bernoulli, not Bernoulli"
            ))),
        }
    }
}

/// Weights of the two incoming edges of a vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePair<W> {
    pub horizontal: W,
    pub vertical: W,
}

/// Read access to the incoming edge weights of a rectangle of the quadrant.
pub trait EdgeWeights<W: Weight>: Sync {
    /// Largest valid `(i, j)`.
    fn extent(&self) -> (usize, usize);

    /// Weights of `(i-1,j) → (i,j)` and `(i,j-1) → (i,j)`. Callers stay
    /// within `extent`; the edge leaving an axis is never read.
    fn pair(&self, i: usize, j: usize) -> EdgePair<W>;
}

impl<W: Weight, E: EdgeWeights<W> + ?Sized> EdgeWeights<W> for &E {
    fn extent(&self) -> (usize, usize) {
        (**self).extent()
    }

    #[inline(always)]
    fn pair(&self, i: usize, j: usize) -> EdgePair<W> {
        (**self).pair(i, j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub orientation: Orientation,
    /// Head of the edge.
    pub i: usize,
    pub j: usize,
}

impl Edge {
    pub fn horizontal(i: usize, j: usize) -> Self {
        Self { orientation: Orientation::Horizontal, i, j }
    }

    pub fn vertical(i: usize, j: usize) -> Self {
        Self { orientation: Orientation::Vertical, i, j }
    }
}

/// A seeded random environment. Values are computed on demand.
#[derive(Debug, Clone)]
pub struct WeightEnvironment {
    config: EnvironmentConfig,
    seed: u64,
    extent: (usize, usize),
    rng: CounterRng,
    // B = 1 iff the top 53 bits of the switch stream are below this.
    switch_threshold: u64,
}

pub fn sample_environment(config: EnvironmentConfig, seed: u64, extent: (usize, usize)) -> Result<WeightEnvironment> {
    WeightEnvironment::new(config, seed, extent)
}

impl WeightEnvironment {
    pub fn new(config: EnvironmentConfig, seed: u64, extent: (usize, usize)) -> Result<Self> {
        config.validate()?;
        if extent.0 >= u32::MAX as usize || extent.1 >= u32::MAX as usize {
            return Err(Error::Config(format!("extent {extent:?} too large")));
        }
        // u < p  <=>  k < p 2^53  <=>  k < ceil(p 2^53) for integer k = u 2^53.
        let switch_threshold = (config.p_bern * (1u64 << 53) as f64).ceil() as u64;
        Ok(Self { config, seed, extent, rng: CounterRng::new(seed), switch_threshold })
    }

    pub fn config(&self) -> &EnvironmentConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Same randomness, different law for η.
    pub fn with_eta(&self, eta: DistributionSpec) -> Result<Self> {
        let config = EnvironmentConfig { eta, ..self.config };
        Self::new(config, self.seed, self.extent)
    }

    #[inline(always)]
    pub fn switch(&self, i: usize, j: usize) -> bool {
        (self.rng.bits(StreamTag::Switch, i, j) >> 11) < self.switch_threshold
    }

    #[inline(always)]
    fn draw(&self, spec: &DistributionSpec, tag: StreamTag, i: usize, j: usize) -> f64 {
        match *spec {
            DistributionSpec::Constant { c } => c,
            _ => spec.sample(self.rng.uniform(tag, i, j)),
        }
    }

    #[inline(always)]
    pub fn xi(&self, i: usize, j: usize) -> f64 {
        self.draw(&self.config.xi, StreamTag::Horizontal, i, j)
    }

    #[inline(always)]
    pub fn eta(&self, i: usize, j: usize) -> f64 {
        self.draw(&self.config.eta, StreamTag::Vertical, i, j)
    }

    pub fn check_bounds(&self, i: usize, j: usize) -> Result<()> {
        let (m, n) = self.extent;
        if i > m || j > n {
            Err(Error::Bounds { i, j, m, n })
        } else {
            Ok(())
        }
    }

    /// Weight of a single edge identified by its head vertex.
    pub fn edge_weight(&self, edge: Edge) -> Result<f64> {
        self.check_bounds(edge.i, edge.j)?;
        let (m, n) = self.extent;
        match edge.orientation {
            Orientation::Horizontal => {
                if edge.i == 0 {
                    return Err(Error::Bounds { i: 0, j: edge.j, m, n });
                }
                Ok(if self.switch(edge.i, edge.j) { self.xi(edge.i, edge.j) } else { 0.0 })
            }
            Orientation::Vertical => {
                if edge.j == 0 {
                    return Err(Error::Bounds { i: edge.i, j: 0, m, n });
                }
                Ok(if self.switch(edge.i, edge.j) { 0.0 } else { self.eta(edge.i, edge.j) })
            }
        }
    }
}

impl<W: Weight> EdgeWeights<W> for WeightEnvironment {
    fn extent(&self) -> (usize, usize) {
        self.extent
    }

    #[inline(always)]
    fn pair(&self, i: usize, j: usize) -> EdgePair<W> {
        debug_assert!(i <= self.extent.0 && j <= self.extent.1);
        // Only the magnitude on the active side is drawn.
        if self.switch(i, j) {
            EdgePair { horizontal: W::from_sample(self.xi(i, j)), vertical: W::ZERO }
        } else {
            EdgePair { horizontal: W::ZERO, vertical: W::from_sample(self.eta(i, j)) }
        }
    }
}

/// Explicit table of edge weights, row-major in `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable<W> {
    m: usize,
    n: usize,
    horizontal: Vec<W>,
    vertical: Vec<W>,
}

impl<W: Weight> WeightTable<W> {
    pub fn zeros(m: usize, n: usize) -> Self {
        let len = (m + 1) * (n + 1);
        Self { m, n, horizontal: vec![W::ZERO; len], vertical: vec![W::ZERO; len] }
    }

    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(usize, usize) -> EdgePair<W>) -> Self {
        let mut table = Self::zeros(m, n);
        for j in 0..=n {
            for i in 0..=m {
                table.set(i, j, f(i, j));
            }
        }
        table
    }

    /// Materialises any weight source over `[0, m] × [0, n]`.
    pub fn capture(source: &impl EdgeWeights<W>, m: usize, n: usize) -> Self {
        Self::from_fn(m, n, |i, j| source.pair(i, j))
    }

    #[inline(always)]
    fn index(&self, i: usize, j: usize) -> usize {
        j * (self.m + 1) + i
    }

    pub fn set(&mut self, i: usize, j: usize, pair: EdgePair<W>) {
        let k = self.index(i, j);
        self.horizontal[k] = pair.horizontal;
        self.vertical[k] = pair.vertical;
    }

    pub fn set_horizontal(&mut self, i: usize, j: usize, w: W) {
        let k = self.index(i, j);
        self.horizontal[k] = w;
    }

    pub fn set_vertical(&mut self, i: usize, j: usize, w: W) {
        let k = self.index(i, j);
        self.vertical[k] = w;
    }
}

impl<W: Weight> EdgeWeights<W> for WeightTable<W> {
    fn extent(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    #[inline(always)]
    fn pair(&self, i: usize, j: usize) -> EdgePair<W> {
        let k = self.index(i, j);
        EdgePair { horizontal: self.horizontal[k], vertical: self.vertical[k] }
    }
}
