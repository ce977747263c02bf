use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Paired clean / corrupted samples stored as two row-major blocks.
///
/// Training always maps `corrupted -> clean`; a sample flagged noise-free
/// carries `corrupted == clean`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    dim: usize,
    shape: (usize, usize),
    clean: Vec<f64>,
    corrupted: Vec<f64>,
    noisy: Vec<bool>,
}

impl SampleSet {
    pub fn new(dim: usize) -> Self {
        SampleSet { dim, shape: (1, dim), clean: Vec::new(), corrupted: Vec::new(), noisy: Vec::new() }
    }

    /// Empty set whose samples are `rows x cols` patches flattened row-major.
    pub fn with_shape(rows: usize, cols: usize) -> Self {
        SampleSet { shape: (rows, cols), ..SampleSet::new(rows * cols) }
    }

    pub fn from_parts(dim: usize, clean: Vec<f64>, corrupted: Vec<f64>, noisy: Vec<bool>) -> Result<Self> {
        if dim == 0 && !clean.is_empty() {
            return Err(Error::shape("sample dimension must be >= 1"));
        }
        let n = noisy.len();
        if clean.len() != n * dim || corrupted.len() != n * dim {
            return Err(Error::shape(format!(
                "{n} samples of dim {dim} need {} values per block, got {} clean and {} corrupted",
                n * dim,
                clean.len(),
                corrupted.len()
            )));
        }
        Ok(SampleSet { dim, shape: (1, dim), clean, corrupted, noisy })
    }

    /// Autoencoding pairs where input and target coincide.
    pub fn identity(dim: usize, values: Vec<f64>) -> Result<Self> {
        let n = values.len().checked_div(dim).unwrap_or(0);
        SampleSet::from_parts(dim, values.clone(), values, alloc::vec![false; n])
    }

    pub fn reshaped(mut self, rows: usize, cols: usize) -> Result<Self> {
        if rows * cols != self.dim {
            return Err(Error::shape(format!("{rows}x{cols} does not match sample dim {}", self.dim)));
        }
        self.shape = (rows, cols);
        Ok(self)
    }

    pub fn push(&mut self, clean: &[f64], corrupted: &[f64], noisy: bool) -> Result<()> {
        if clean.len() != self.dim || corrupted.len() != self.dim {
            return Err(Error::shape(format!(
                "sample has {}/{} values, set dim is {}",
                clean.len(),
                corrupted.len(),
                self.dim
            )));
        }
        self.clean.extend_from_slice(clean);
        self.corrupted.extend_from_slice(corrupted);
        self.noisy.push(noisy);
        Ok(())
    }

    pub fn extend(&mut self, other: &SampleSet) -> Result<()> {
        if other.dim != self.dim {
            return Err(Error::shape("cannot merge sample sets of different dims"));
        }
        self.clean.extend_from_slice(&other.clean);
        self.corrupted.extend_from_slice(&other.corrupted);
        self.noisy.extend_from_slice(&other.noisy);
        Ok(())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.noisy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.noisy.is_empty()
    }

    pub fn clean(&self, i: usize) -> &[f64] {
        &self.clean[i * self.dim..(i + 1) * self.dim]
    }

    pub fn corrupted(&self, i: usize) -> &[f64] {
        &self.corrupted[i * self.dim..(i + 1) * self.dim]
    }

    pub fn is_noisy(&self, i: usize) -> bool {
        self.noisy[i]
    }

    pub fn clean_block(&self) -> &[f64] {
        &self.clean
    }

    pub fn corrupted_block(&self) -> &[f64] {
        &self.corrupted
    }

    pub fn noisy_flags(&self) -> &[bool] {
        &self.noisy
    }

    pub fn noisy_count(&self) -> usize {
        self.noisy.iter().filter(|&&f| f).count()
    }

    pub fn subset(&self, indices: &[usize]) -> SampleSet {
        let mut out = SampleSet { shape: self.shape, ..SampleSet::new(self.dim) };
        for &i in indices {
            out.clean.extend_from_slice(self.clean(i));
            out.corrupted.extend_from_slice(self.corrupted(i));
            out.noisy.push(self.noisy[i]);
        }
        out
    }

    /// Splits off the first `round(fraction * len)` samples.
    pub fn split(&self, fraction: f64) -> (SampleSet, SampleSet) {
        let cut = libm::round(fraction.clamp(0.0, 1.0) * self.len() as f64) as usize;
        let head: Vec<usize> = (0..cut).collect();
        let tail: Vec<usize> = (cut..self.len()).collect();
        (self.subset(&head), self.subset(&tail))
    }

    /// Same samples with every noise-free flagged pair rewritten as `(clean, clean)`.
    pub fn with_clean_pairs_enforced(&self) -> SampleSet {
        let mut out = self.clone();
        for i in 0..self.len() {
            if !self.noisy[i] {
                let (a, b) = (i * self.dim, (i + 1) * self.dim);
                out.corrupted[a..b].copy_from_slice(&self.clean[a..b]);
            }
        }
        out
    }
}
