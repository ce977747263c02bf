//! Hot loops for the dense layers.
//!
//! Every reduction uses a fixed lane layout so results do not depend on batch
//! composition: `dot` and `dot4` produce bit-identical values for the same
//! pair of slices.

const LANES: usize = 8;

#[inline]
fn fold_lanes(acc: &[f64; LANES]) -> f64 {
    ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]))
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len() / LANES * LANES;
    let mut acc = [0.0; LANES];
    for (ca, cb) in a[..n].chunks_exact(LANES).zip(b[..n].chunks_exact(LANES)) {
        for j in 0..LANES {
            acc[j] += ca[j] * cb[j];
        }
    }
    let mut tail = 0.0;
    for i in n..a.len() {
        tail += a[i] * b[i];
    }
    fold_lanes(&acc) + tail
}

/// Four dot products against a shared row `w`, reading `w` once.
#[inline]
pub(crate) fn dot4(w: &[f64], a: [&[f64]; 4]) -> [f64; 4] {
    let len = w.len();
    let n = len / LANES * LANES;
    let mut acc = [[0.0; LANES]; 4];
    let mut i = 0;
    while i < n {
        let wc = &w[i..i + LANES];
        for s in 0..4 {
            let ac = &a[s][i..i + LANES];
            for j in 0..LANES {
                acc[s][j] += wc[j] * ac[j];
            }
        }
        i += LANES;
    }
    let mut out = [0.0; 4];
    for s in 0..4 {
        let mut tail = 0.0;
        for k in n..len {
            tail += w[k] * a[s][k];
        }
        out[s] = fold_lanes(&acc[s]) + tail;
    }
    out
}

/// `out[s, o] = W[o, :] . input[s, :] + b[o]` for a row-major batch.
pub(crate) fn affine_batch(weights: &[f64], biases: &[f64], in_dim: usize, input: &[f64], out: &mut [f64]) {
    let out_dim = biases.len();
    let batch = input.len() / in_dim;
    let quads = batch / 4 * 4;
    let mut s = 0;
    while s < quads {
        let rows = [
            &input[s * in_dim..(s + 1) * in_dim],
            &input[(s + 1) * in_dim..(s + 2) * in_dim],
            &input[(s + 2) * in_dim..(s + 3) * in_dim],
            &input[(s + 3) * in_dim..(s + 4) * in_dim],
        ];
        for o in 0..out_dim {
            let d = dot4(&weights[o * in_dim..(o + 1) * in_dim], rows);
            for k in 0..4 {
                out[(s + k) * out_dim + o] = d[k] + biases[o];
            }
        }
        s += 4;
    }
    for s in quads..batch {
        let row = &input[s * in_dim..(s + 1) * in_dim];
        for o in 0..out_dim {
            out[s * out_dim + o] = dot(&weights[o * in_dim..(o + 1) * in_dim], row) + biases[o];
        }
    }
}

/// Accumulates `gw += delta^T . input` and `gb += sum_s delta[s]`.
pub(crate) fn accumulate_grads(
    delta: &[f64],
    input: &[f64],
    in_dim: usize,
    out_dim: usize,
    gw: &mut [f64],
    gb: &mut [f64],
) {
    let batch = delta.len() / out_dim;
    let quads = batch / 4 * 4;
    let mut s = 0;
    while s < quads {
        let a0 = &input[s * in_dim..(s + 1) * in_dim];
        let a1 = &input[(s + 1) * in_dim..(s + 2) * in_dim];
        let a2 = &input[(s + 2) * in_dim..(s + 3) * in_dim];
        let a3 = &input[(s + 3) * in_dim..(s + 4) * in_dim];
        for o in 0..out_dim {
            let d0 = delta[s * out_dim + o];
            let d1 = delta[(s + 1) * out_dim + o];
            let d2 = delta[(s + 2) * out_dim + o];
            let d3 = delta[(s + 3) * out_dim + o];
            gb[o] += ((d0 + d1) + d2) + d3;
            let row = &mut gw[o * in_dim..(o + 1) * in_dim];
            for i in 0..in_dim {
                row[i] += ((d0 * a0[i] + d1 * a1[i]) + d2 * a2[i]) + d3 * a3[i];
            }
        }
        s += 4;
    }
    for s in quads..batch {
        let a = &input[s * in_dim..(s + 1) * in_dim];
        for o in 0..out_dim {
            let d = delta[s * out_dim + o];
            gb[o] += d;
            let row = &mut gw[o * in_dim..(o + 1) * in_dim];
            for i in 0..in_dim {
                row[i] += d * a[i];
            }
        }
    }
}

/// `prev[s, :] = sum_o delta[s, o] * W[o, :]`, overwriting `prev`.
pub(crate) fn propagate_delta(delta: &[f64], weights: &[f64], in_dim: usize, out_dim: usize, prev: &mut [f64]) {
    prev.fill(0.0);
    let batch = delta.len() / out_dim;
    let quads = batch / 4 * 4;
    let mut s = 0;
    while s < quads {
        let (p0, rest) = prev[s * in_dim..(s + 4) * in_dim].split_at_mut(in_dim);
        let (p1, rest) = rest.split_at_mut(in_dim);
        let (p2, p3) = rest.split_at_mut(in_dim);
        for o in 0..out_dim {
            let d0 = delta[s * out_dim + o];
            let d1 = delta[(s + 1) * out_dim + o];
            let d2 = delta[(s + 2) * out_dim + o];
            let d3 = delta[(s + 3) * out_dim + o];
            let w = &weights[o * in_dim..(o + 1) * in_dim];
            for i in 0..in_dim {
                p0[i] += d0 * w[i];
                p1[i] += d1 * w[i];
                p2[i] += d2 * w[i];
                p3[i] += d3 * w[i];
            }
        }
        s += 4;
    }
    for s in quads..batch {
        let p = &mut prev[s * in_dim..(s + 1) * in_dim];
        for o in 0..out_dim {
            let d = delta[s * out_dim + o];
            let w = &weights[o * in_dim..(o + 1) * in_dim];
            for i in 0..in_dim {
                p[i] += d * w[i];
            }
        }
    }
}
