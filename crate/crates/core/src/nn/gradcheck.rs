//! Central finite-difference audit of [`backprop`](super::backprop).
//!
//! The numerical gradient here is built from [`Network::forward`] alone, so it
//! shares no code with the analytic backward pass it checks.

use alloc::vec::Vec;

use super::backprop::backprop;
use super::network::Network;
use crate::Result;

/// Magnitude below which gradient entries are compared absolutely.
pub const RELATIVE_FLOOR: f64 = 1e-4;

/// Step for [`audit_gradients`]. The extrapolated difference has fourth-order
/// truncation error, so the step can be large enough to keep the objective's
/// rounding noise (which grows like `1 / step`) far below the tolerance.
pub const AUDIT_STEP: f64 = 2e-3;

fn objective(net: &Network, x: &[f64], target: &[f64]) -> Result<f64> {
    let z = net.forward(x)?;
    let zn = net.output_norm().normalize(&z);
    let tn = net.output_norm().normalize(target);
    Ok(zn.iter().zip(&tn).map(|(a, b)| (a - b) * (a - b)).sum())
}

fn param_mut(net: &mut Network, layer: usize, bias: bool, i: usize) -> &mut f64 {
    let layer = &mut net.layers_mut()[layer];
    if bias {
        &mut layer.biases_mut()[i]
    } else {
        &mut layer.weights_mut()[i]
    }
}

/// Numerical gradient of the per-sample squared error, flattened per layer as
/// weights then biases.
pub fn finite_difference_gradient(net: &Network, x: &[f64], target: &[f64], step: f64) -> Result<Vec<f64>> {
    let mut probe = net.clone();
    let mut out = Vec::with_capacity(net.parameter_count());
    for l in 0..net.layers().len() {
        for bias in [false, true] {
            let count = if bias { net.layers()[l].biases().len() } else { net.layers()[l].weights().len() };
            for i in 0..count {
                let orig = *param_mut(&mut probe, l, bias, i);
                *param_mut(&mut probe, l, bias, i) = orig + step;
                let up = objective(&probe, x, target)?;
                *param_mut(&mut probe, l, bias, i) = orig - step;
                let down = objective(&probe, x, target)?;
                *param_mut(&mut probe, l, bias, i) = orig;
                out.push((up - down) / (2.0 * step));
            }
        }
    }
    Ok(out)
}

/// Richardson extrapolation of two central differences,
/// `(4 D(step / 2) - D(step)) / 3`.
pub fn extrapolated_gradient(net: &Network, x: &[f64], target: &[f64], step: f64) -> Result<Vec<f64>> {
    let coarse = finite_difference_gradient(net, x, target, step)?;
    let fine = finite_difference_gradient(net, x, target, 0.5 * step)?;
    Ok(coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientAudit {
    pub max_relative_error: f64,
    pub entries: usize,
}

/// `|a - n| / max(|a|, |n|, RELATIVE_FLOOR)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(RELATIVE_FLOOR)
}

/// Compares analytic gradients with [`extrapolated_gradient`] entry by entry.
pub fn audit_gradients(net: &Network, x: &[f64], target: &[f64], step: f64) -> Result<GradientAudit> {
    let analytic = backprop(net, x, target)?.flatten();
    let numeric = extrapolated_gradient(net, x, target, step)?;
    let max_relative_error = analytic.iter().zip(&numeric).map(|(&a, &n)| relative_error(a, n)).fold(0.0, f64::max);
    Ok(GradientAudit { max_relative_error, entries: analytic.len() })
}
