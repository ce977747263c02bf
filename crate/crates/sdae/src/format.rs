//! Binary model and dataset files plus CSV exports.
//!
//! All numbers are little-endian. Model files:
//!
//! ```text
//! b"GDAE" | format_version u32 | layers u32 | dims (layers + 1) x u32
//!        | activations layers x u8 (0 sigmoid, 1 linear)
//!        | input shift, input scale, output shift, output scale (f64)
//!        | per layer: weights row-major (out x in) f64, then biases f64
//! ```
//!
//! Dataset files:
//!
//! ```text
//! b"GDDS" | schema_version u32 | sample_dim u64 | n_samples u64 | sample_rows u64
//!        | noisy flags n_samples x u8 | clean block f64 | corrupted block f64
//! ```

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use sdae_core::nn::{Activation, Affine, DenseLayer, Network, SampleSet};

use crate::error::{Error, Result};

pub const MODEL_MAGIC: &[u8; 4] = b"GDAE";
pub const MODEL_FORMAT_VERSION: u32 = 1;
pub const DATASET_MAGIC: &[u8; 4] = b"GDDS";
pub const DATASET_SCHEMA_VERSION: u32 = 1;

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        let end = self.pos.checked_add(n).filter(|e| *e <= self.buf.len()).ok_or_else(|| {
            format!("truncated: wanted {n} bytes at offset {}, file has {}", self.pos, self.buf.len())
        })?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> std::result::Result<u8, String> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> std::result::Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> std::result::Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn usize(&mut self) -> std::result::Result<usize, String> {
        usize::try_from(self.u64()?).map_err(|_| "size does not fit in memory".to_string())
    }

    fn f64s(&mut self, n: usize) -> std::result::Result<Vec<f64>, String> {
        let bytes = self.take(n.checked_mul(8).ok_or("block size overflows")?)?;
        Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }

    fn finish(&self) -> std::result::Result<(), String> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(format!("{} trailing bytes", self.buf.len() - self.pos))
        }
    }
}

fn put_f64s(out: &mut Vec<u8>, values: &[f64]) {
    out.reserve(values.len() * 8);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

pub fn encode_model(net: &Network) -> Vec<u8> {
    let dims = net.dims();
    let mut out = Vec::with_capacity(64 + net.parameter_count() * 8);
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&MODEL_FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(net.layers().len() as u32).to_le_bytes());
    for d in &dims {
        out.extend_from_slice(&(*d as u32).to_le_bytes());
    }
    for layer in net.layers() {
        out.push(match layer.activation() {
            Activation::Sigmoid => 0,
            Activation::Linear => 1,
        });
    }
    put_f64s(&mut out, net.input_norm().shift());
    put_f64s(&mut out, net.input_norm().scale());
    put_f64s(&mut out, net.output_norm().shift());
    put_f64s(&mut out, net.output_norm().scale());
    for layer in net.layers() {
        put_f64s(&mut out, layer.weights());
        put_f64s(&mut out, layer.biases());
    }
    out
}

pub fn decode_model(bytes: &[u8]) -> std::result::Result<Network, String> {
    let mut r = Reader::new(bytes);
    if r.take(4)? != MODEL_MAGIC {
        return Err("not a model file (bad magic)".into());
    }
    let version = r.u32()?;
    if version != MODEL_FORMAT_VERSION {
        return Err(format!("unsupported model format version {version}"));
    }
    let n_layers = r.u32()? as usize;
    if n_layers == 0 {
        return Err("model has no layers".into());
    }
    let dims = (0..=n_layers).map(|_| r.u32().map(|d| d as usize)).collect::<std::result::Result<Vec<_>, _>>()?;
    let activations = (0..n_layers)
        .map(|_| match r.u8()? {
            0 => Ok(Activation::Sigmoid),
            1 => Ok(Activation::Linear),
            k => Err(format!("unknown activation code {k}")),
        })
        .collect::<std::result::Result<Vec<_>, String>>()?;
    let (d_in, d_out) = (dims[0], dims[n_layers]);
    let in_shift = r.f64s(d_in)?;
    let in_scale = r.f64s(d_in)?;
    let out_shift = r.f64s(d_out)?;
    let out_scale = r.f64s(d_out)?;
    let mut layers = Vec::with_capacity(n_layers);
    for (l, act) in activations.into_iter().enumerate() {
        let (i, o) = (dims[l], dims[l + 1]);
        let weights = r.f64s(i.checked_mul(o).ok_or("layer size overflows")?)?;
        let biases = r.f64s(o)?;
        layers.push(DenseLayer::from_parts(i, o, weights, biases, act).map_err(|e| e.to_string())?);
    }
    r.finish()?;
    let input_norm = Affine::new(in_shift, in_scale).map_err(|e| e.to_string())?;
    let output_norm = Affine::new(out_shift, out_scale).map_err(|e| e.to_string())?;
    Network::with_norms(layers, input_norm, output_norm).map_err(|e| e.to_string())
}

pub fn encode_dataset(set: &SampleSet) -> Vec<u8> {
    let mut out = Vec::with_capacity(40 + set.len() * (1 + 16 * set.dim()));
    out.extend_from_slice(DATASET_MAGIC);
    out.extend_from_slice(&DATASET_SCHEMA_VERSION.to_le_bytes());
    out.extend_from_slice(&(set.dim() as u64).to_le_bytes());
    out.extend_from_slice(&(set.len() as u64).to_le_bytes());
    out.extend_from_slice(&(set.shape().0 as u64).to_le_bytes());
    out.extend(set.noisy_flags().iter().map(|&f| f as u8));
    put_f64s(&mut out, set.clean_block());
    put_f64s(&mut out, set.corrupted_block());
    out
}

pub fn decode_dataset(bytes: &[u8]) -> std::result::Result<SampleSet, String> {
    let mut r = Reader::new(bytes);
    if r.take(4)? != DATASET_MAGIC {
        return Err("not a dataset file (bad magic)".into());
    }
    let version = r.u32()?;
    if version != DATASET_SCHEMA_VERSION {
        return Err(format!("unsupported dataset schema version {version}"));
    }
    let dim = r.usize()?;
    let n = r.usize()?;
    let rows = r.usize()?;
    let noisy = r
        .take(n)?
        .iter()
        .map(|&b| match b {
            0 => Ok(false),
            1 => Ok(true),
            k => Err(format!("bad noisy flag {k}")),
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let values = n.checked_mul(dim).ok_or("block size overflows")?;
    let clean = r.f64s(values)?;
    let corrupted = r.f64s(values)?;
    r.finish()?;
    let set = SampleSet::from_parts(dim, clean, corrupted, noisy).map_err(|e| e.to_string())?;
    if rows == 0 || dim % rows != 0 {
        return Err(format!("sample rows {rows} do not divide sample dim {dim}"));
    }
    set.reshaped(rows, dim / rows).map_err(|e| e.to_string())
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn save_model(path: impl AsRef<Path>, net: &Network) -> Result<()> {
    write_bytes(path.as_ref(), &encode_model(net))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Network> {
    let path = path.as_ref();
    decode_model(&read_bytes(path)?).map_err(|e| Error::format(path, e))
}

pub fn save_dataset(path: impl AsRef<Path>, set: &SampleSet) -> Result<()> {
    write_bytes(path.as_ref(), &encode_dataset(set))
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<SampleSet> {
    let path = path.as_ref();
    decode_dataset(&read_bytes(path)?).map_err(|e| Error::format(path, e))
}

/// Writes rows of `header` columns; values use the shortest round-trip form.
pub fn write_csv<I, R>(path: impl AsRef<Path>, header: &[String], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: AsRef<[f64]>,
{
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(w, "{}", header.join(",")).map_err(io)?;
    for row in rows {
        let line = row.as_ref().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        writeln!(w, "{line}").map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Reads a numeric CSV written by [`write_csv`]: header plus rows.
pub fn read_csv(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header: Vec<String> =
        lines.next().ok_or_else(|| Error::format(path, "empty file"))?.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::format(path, format!("line {}: {e}", n + 2)))?;
        if row.len() != header.len() {
            return Err(Error::format(
                path,
                format!("line {}: {} fields, header has {}", n + 2, row.len(), header.len()),
            ));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

/// One row per sample: index, noisy flag, clean values, corrupted values.
pub fn export_dataset_csv(path: impl AsRef<Path>, set: &SampleSet) -> Result<()> {
    let d = set.dim();
    let mut header = vec!["sample".to_string(), "noisy".to_string()];
    header.extend((0..d).map(|j| format!("clean_{j}")));
    header.extend((0..d).map(|j| format!("corrupted_{j}")));
    let rows = (0..set.len()).map(|i| {
        let mut row = Vec::with_capacity(2 + 2 * d);
        row.push(i as f64);
        row.push(if set.is_noisy(i) { 1.0 } else { 0.0 });
        row.extend_from_slice(set.clean(i));
        row.extend_from_slice(set.corrupted(i));
        row
    });
    write_csv(path, &header, rows)
}
