use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nonnegative mass vector over source or target atoms.
///
/// The total is tracked rather than normalized to one; the uniform-weight
/// objectives use masses like `k/n` per target atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marginal {
    mass: Vec<f64>,
    total: f64,
}

impl Marginal {
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::Empty("marginal"));
        }
        if let Some((index, &value)) = mass
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidValue { index, value });
        }
        let total = mass.iter().sum();
        Ok(Self { mass, total })
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }
}

impl std::ops::Index<usize> for Marginal {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.mass[i]
    }
}

/// `size` atoms carrying `total_mass / size` each.
pub fn uniform_marginal(size: usize, total_mass: f64) -> Result<Marginal> {
    if size == 0 {
        return Err(Error::Empty("uniform marginal of size 0"));
    }
    if !(total_mass > 0.0 && total_mass.is_finite()) {
        return Err(Error::InvalidConfig(format!("total mass {total_mass} must be positive")));
    }
    Marginal::new(vec![total_mass / size as f64; size])
}
