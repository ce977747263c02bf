//! Sliding-window patch extraction and coverage-averaged recombination.
//!
//! Windows start at `0, s, 2s, ...`; when the stride does not tile the axis
//! exactly, one extra window is snapped to the far edge so every cell is
//! covered. Recombination averages all contributions to a cell.

use alloc::format;
use alloc::vec::Vec;

use crate::nn::{predict_block, Network};
use crate::{Error, Matrix, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub patch_rows: usize,
    pub patch_cols: usize,
    pub stride: usize,
}

impl WindowSpec {
    pub fn new(patch_rows: usize, patch_cols: usize, stride: usize) -> Result<Self> {
        let spec = WindowSpec { patch_rows, patch_cols, stride };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.patch_rows == 0 || self.patch_cols == 0 || self.stride == 0 {
            return Err(Error::argument(format!(
                "window {}x{} with stride {} must have positive extents",
                self.patch_rows, self.patch_cols, self.stride
            )));
        }
        Ok(())
    }

    pub fn patch_len(&self) -> usize {
        self.patch_rows * self.patch_cols
    }

    fn check_fits(&self, rows: usize, cols: usize) -> Result<()> {
        self.validate()?;
        if self.patch_rows > rows || self.patch_cols > cols {
            return Err(Error::argument(format!(
                "{}x{} window does not fit a {rows}x{cols} section",
                self.patch_rows, self.patch_cols
            )));
        }
        Ok(())
    }
}

/// Window starts along one axis of length `len`. Empty if the window is
/// longer than the axis.
pub fn window_origins(len: usize, window: usize, stride: usize) -> Vec<usize> {
    if window == 0 || stride == 0 || window > len {
        return Vec::new();
    }
    let last = len - window;
    let mut out: Vec<usize> = (0..=last).step_by(stride).collect();
    if out.last() != Some(&last) {
        out.push(last);
    }
    out
}

/// Number of windows [`slice`] produces for a `rows x cols` section.
pub fn patch_count(rows: usize, cols: usize, spec: &WindowSpec) -> usize {
    window_origins(rows, spec.patch_rows, spec.stride).len() * window_origins(cols, spec.patch_cols, spec.stride).len()
}

/// Patches stored back to back, each flattened row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchSet {
    spec: WindowSpec,
    source: (usize, usize),
    origins: Vec<(usize, usize)>,
    data: Vec<f64>,
}

impl PatchSet {
    pub fn spec(&self) -> WindowSpec {
        self.spec
    }

    pub fn source_shape(&self) -> (usize, usize) {
        self.source
    }

    pub fn origins(&self) -> &[(usize, usize)] {
        &self.origins
    }

    pub fn len(&self) -> usize {
        self.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origins.is_empty()
    }

    pub fn patch(&self, i: usize) -> &[f64] {
        let n = self.spec.patch_len();
        &self.data[i * n..(i + 1) * n]
    }

    pub fn patch_matrix(&self, i: usize) -> Matrix {
        Matrix::from_fn(self.spec.patch_rows, self.spec.patch_cols, |r, c| self.patch(i)[r * self.spec.patch_cols + c])
    }

    /// All patches as one `len x (patch_rows * patch_cols)` row-major block.
    pub fn as_block(&self) -> &[f64] {
        &self.data
    }

    /// Same layout with new patch contents (e.g. network outputs).
    pub fn with_values(&self, block: Vec<f64>) -> Result<PatchSet> {
        if block.len() != self.data.len() {
            return Err(Error::shape(format!("expected {} patch values, got {}", self.data.len(), block.len())));
        }
        Ok(PatchSet { data: block, ..self.clone() })
    }

    /// Arbitrary patches at explicit origins; used when the windows do not
    /// come from [`slice`].
    pub fn from_parts(
        spec: WindowSpec,
        source: (usize, usize),
        origins: Vec<(usize, usize)>,
        data: Vec<f64>,
    ) -> Result<Self> {
        spec.check_fits(source.0, source.1)?;
        if data.len() != origins.len() * spec.patch_len() {
            return Err(Error::shape(format!(
                "{} values do not make {} patches of {}",
                data.len(),
                origins.len(),
                spec.patch_len()
            )));
        }
        if let Some(&(r, c)) =
            origins.iter().find(|&&(r, c)| r + spec.patch_rows > source.0 || c + spec.patch_cols > source.1)
        {
            return Err(Error::argument(format!("patch at ({r}, {c}) extends past the section")));
        }
        Ok(PatchSet { spec, source, origins, data })
    }
}

/// Extracts every window in row-major origin order.
pub fn slice(section: &Matrix, spec: &WindowSpec) -> Result<PatchSet> {
    let (rows, cols) = section.shape();
    spec.check_fits(rows, cols)?;
    let row_origins = window_origins(rows, spec.patch_rows, spec.stride);
    let col_origins = window_origins(cols, spec.patch_cols, spec.stride);
    let mut origins = Vec::with_capacity(row_origins.len() * col_origins.len());
    let mut data = Vec::with_capacity(row_origins.len() * col_origins.len() * spec.patch_len());
    for &r0 in &row_origins {
        for &c0 in &col_origins {
            origins.push((r0, c0));
            for r in r0..r0 + spec.patch_rows {
                data.extend_from_slice(&section.row(r)[c0..c0 + spec.patch_cols]);
            }
        }
    }
    Ok(PatchSet { spec: *spec, source: (rows, cols), origins, data })
}

/// How many patches cover each cell.
pub fn coverage(patches: &PatchSet) -> Matrix {
    let (rows, cols) = patches.source;
    let mut counts = Matrix::zeros(rows, cols);
    for &(r0, c0) in &patches.origins {
        for r in r0..r0 + patches.spec.patch_rows {
            for v in &mut counts.row_mut(r)[c0..c0 + patches.spec.patch_cols] {
                *v += 1.0;
            }
        }
    }
    counts
}

/// Per-cell mean of all patch values covering the cell.
pub fn recombine(patches: &PatchSet) -> Result<Matrix> {
    let (rows, cols) = patches.source;
    let (pr, pc) = (patches.spec.patch_rows, patches.spec.patch_cols);
    let mut sum = Matrix::zeros(rows, cols);
    for (i, &(r0, c0)) in patches.origins.iter().enumerate() {
        let p = patches.patch(i);
        for r in 0..pr {
            let dst = &mut sum.row_mut(r0 + r)[c0..c0 + pc];
            for (d, s) in dst.iter_mut().zip(&p[r * pc..(r + 1) * pc]) {
                *d += s;
            }
        }
    }
    let counts = coverage(patches);
    let uncovered: Vec<(usize, usize)> =
        (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).filter(|&(r, c)| counts.get(r, c) == 0.0).collect();
    if !uncovered.is_empty() {
        return Err(Error::Coverage(uncovered));
    }
    Ok(Matrix::from_fn(rows, cols, |r, c| sum.get(r, c) / counts.get(r, c)))
}

/// Slices `section`, passes every patch through `net` (raw units in and
/// out) and recombines the outputs.
pub fn denoise_section(section: &Matrix, spec: &WindowSpec, net: &Network) -> Result<Matrix> {
    if net.input_dim() != spec.patch_len() || net.output_dim() != spec.patch_len() {
        return Err(Error::shape(format!(
            "network maps {} -> {} values but a window holds {}",
            net.input_dim(),
            net.output_dim(),
            spec.patch_len()
        )));
    }
    let patches = slice(section, spec)?;
    let out = predict_block(net, patches.as_block())?;
    recombine(&patches.with_values(out)?)
}
