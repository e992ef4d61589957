//! Gaussian-integer sequences (elements of ℤ + jℤ).

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

pub type GaussianInt = Complex<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GaussianIntegerSeq(Vec<GaussianInt>);

impl GaussianIntegerSeq {
    pub fn new(values: Vec<GaussianInt>) -> Self {
        GaussianIntegerSeq(values)
    }

    pub fn zeros(n: usize) -> Self {
        GaussianIntegerSeq(vec![GaussianInt::new(0, 0); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[GaussianInt] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [GaussianInt] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<GaussianInt> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|v| v.re == 0 && v.im == 0)
    }

    /// max(‖Re‖∞, ‖Im‖∞).
    pub fn max_component(&self) -> i64 {
        self.0.iter().map(|v| v.re.abs().max(v.im.abs())).max().unwrap_or(0)
    }

    /// True when every component lies in {−v, …, v}.
    pub fn within(&self, v: i64) -> bool {
        self.max_component() <= v
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.0.iter().map(|v| Complex64::new(v.re as f64, v.im as f64)).collect()
    }

    /// Componentwise sum; panics on length mismatch.
    pub fn add(&self, other: &GaussianIntegerSeq) -> GaussianIntegerSeq {
        assert_eq!(self.len(), other.len(), "length mismatch");
        GaussianIntegerSeq(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Adds the same Gaussian integer to every entry.
    pub fn offset(&self, c: GaussianInt) -> GaussianIntegerSeq {
        GaussianIntegerSeq(self.0.iter().map(|v| v + c).collect())
    }

    /// Count of nonzero entries.
    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|v| v.re != 0 || v.im != 0).count()
    }
}

impl From<Vec<GaussianInt>> for GaussianIntegerSeq {
    fn from(v: Vec<GaussianInt>) -> Self {
        GaussianIntegerSeq(v)
    }
}

/// Rounds each component to the nearest integer.
pub fn round_to_lattice(v: Complex64) -> GaussianInt {
    GaussianInt::new(v.re.round() as i64, v.im.round() as i64)
}
