//! Parameter spaces, configurations and their neighborhoods.
//!
//! Parameters are always tuned through 1-based integer indices `1..=φ`.
//! Real-valued grids are recovered through an affine decode map
//! `value = offset + index * step`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One tunable parameter: `count` values decoded as `offset + index * step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterDim {
    name: String,
    count: usize,
    offset: f64,
    step: f64,
}

impl ParameterDim {
    pub fn new(name: impl Into<String>, count: usize, offset: f64, step: f64) -> Result<Self> {
        let name = name.into();
        if count < 2 {
            return Err(Error::config(format!(
                "parameter `{name}` needs at least 2 values, got {count}"
            )));
        }
        if !offset.is_finite() || !step.is_finite() || step == 0.0 {
            return Err(Error::config(format!(
                "parameter `{name}` needs a finite non-zero step and finite offset"
            )));
        }
        Ok(Self {
            name,
            count,
            offset,
            step,
        })
    }

    /// A parameter whose values are its indices `1..=count`.
    pub fn indexed(name: impl Into<String>, count: usize) -> Result<Self> {
        Self::new(name, count, 0.0, 1.0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The range φ of this parameter.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn decode(&self, index: usize) -> f64 {
        self.offset + index as f64 * self.step
    }

    /// The index whose decoded value is closest to `value`.
    pub fn index_of(&self, value: f64) -> Option<usize> {
        let raw = ((value - self.offset) / self.step).round();
        if raw < 1.0 || raw > self.count as f64 {
            return None;
        }
        let index = raw as usize;
        let tolerance = 1e-9 * self.step.abs().max(1.0);
        ((self.decode(index) - value).abs() <= tolerance).then_some(index)
    }

    /// The same parameter restricted to its first `count` values.
    pub fn truncated(&self, count: usize) -> Result<Self> {
        if count > self.count {
            return Err(Error::config(format!(
                "cannot grow parameter `{}` from {} to {count} values by truncation",
                self.name, self.count
            )));
        }
        Self::new(self.name.clone(), count, self.offset, self.step)
    }
}

/// A point of a parameter space: one 1-based index per dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration(Vec<usize>);

impl Configuration {
    pub fn new(indices: Vec<usize>) -> Self {
        Self(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, dim: usize) -> usize {
        self.0[dim]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// A copy with dimension `dim` set to `index`.
    pub fn with(&self, dim: usize, index: usize) -> Self {
        let mut indices = self.0.clone();
        indices[dim] = index;
        Self(indices)
    }
}

impl From<Vec<usize>> for Configuration {
    fn from(indices: Vec<usize>) -> Self {
        Self(indices)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, index) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{index}")?;
        }
        write!(f, ")")
    }
}

/// The grid of all configurations over D parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSpace {
    dims: Vec<ParameterDim>,
}

impl ParameterSpace {
    pub fn new(dims: Vec<ParameterDim>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::config(
                "a parameter space needs at least one dimension",
            ));
        }
        Ok(Self { dims })
    }

    /// A one-parameter space with values `1..=count`.
    pub fn single(name: impl Into<String>, count: usize) -> Result<Self> {
        Self::new(vec![ParameterDim::indexed(name, count)?])
    }

    /// A space with the given ranges φ_i and identity decoding.
    pub fn with_ranges(ranges: &[usize]) -> Result<Self> {
        let dims = ranges
            .iter()
            .enumerate()
            .map(|(i, &count)| ParameterDim::indexed(format!("p{}", i + 1), count))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims)
    }

    pub fn dims(&self) -> &[ParameterDim] {
        &self.dims
    }

    pub fn dim(&self, i: usize) -> &ParameterDim {
        &self.dims[i]
    }

    /// D, the number of parameters.
    pub fn num_dims(&self) -> usize {
        self.dims.len()
    }

    pub fn ranges(&self) -> Vec<usize> {
        self.dims.iter().map(ParameterDim::count).collect()
    }

    /// M = Σ φ_i.
    pub fn total_range(&self) -> usize {
        self.dims.iter().map(ParameterDim::count).sum()
    }

    /// Π φ_i, the number of configurations.
    pub fn cardinality(&self) -> usize {
        self.dims.iter().map(ParameterDim::count).product()
    }

    pub fn contains(&self, config: &Configuration) -> bool {
        config.len() == self.dims.len()
            && config
                .indices()
                .iter()
                .zip(&self.dims)
                .all(|(&index, dim)| (1..=dim.count).contains(&index))
    }

    pub fn validate(&self, config: &Configuration) -> Result<()> {
        if config.len() != self.dims.len() {
            return Err(Error::contract(format!(
                "configuration {config} has {} dimensions, space has {}",
                config.len(),
                self.dims.len()
            )));
        }
        if !self.contains(config) {
            return Err(Error::contract(format!(
                "configuration {config} is out of bounds for ranges {:?}",
                self.ranges()
            )));
        }
        Ok(())
    }

    pub fn decode(&self, config: &Configuration) -> Vec<f64> {
        config
            .indices()
            .iter()
            .zip(&self.dims)
            .map(|(&index, dim)| dim.decode(index))
            .collect()
    }

    /// All configurations differing from `config` in exactly one index.
    /// The result has M − D elements.
    pub fn neighborhood(&self, config: &Configuration) -> Vec<Configuration> {
        let mut out = Vec::with_capacity(self.total_range() - self.num_dims());
        for (d, dim) in self.dims.iter().enumerate() {
            let current = config.get(d);
            for value in (1..=dim.count).filter(|&v| v != current) {
                out.push(config.with(d, value));
            }
        }
        out
    }

    /// A configuration drawn uniformly from all Π φ_i configurations.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Configuration {
        Configuration(
            self.dims
                .iter()
                .map(|dim| rng.gen_range(1..=dim.count))
                .collect(),
        )
    }

    /// Row-major position of `config` (last dimension fastest), 0-based.
    pub fn linear_index(&self, config: &Configuration) -> usize {
        config
            .indices()
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&index, dim)| acc * dim.count + (index - 1))
    }

    pub fn configuration_at(&self, mut linear: usize) -> Configuration {
        let mut indices = vec![0; self.dims.len()];
        for (slot, dim) in indices.iter_mut().zip(&self.dims).rev() {
            *slot = linear % dim.count + 1;
            linear /= dim.count;
        }
        Configuration(indices)
    }

    /// Every configuration in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = Configuration> + '_ {
        (0..self.cardinality()).map(|i| self.configuration_at(i))
    }
}

/// Σ_i |a_i − b_i|.
pub fn l1_distance(a: &Configuration, b: &Configuration) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::contract(format!(
            "cannot measure distance between {a} and {b}: dimension mismatch"
        )));
    }
    Ok(a.indices()
        .iter()
        .zip(b.indices())
        .map(|(&x, &y)| x.abs_diff(y))
        .sum())
}
