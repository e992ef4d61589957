//! Higher-order-difference unfolding baseline. Real and imaginary parts are
//! processed independently.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::{fold, ComplexSignal};
use crate::transform::{anti_difference, first_difference};

fn difference_n(v: &[f64], order: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    for _ in 0..order {
        if out.len() < 2 {
            return Vec::new();
        }
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    out
}

/// Integer fold counts ε̂ (ε̂[0] = 0) for one real channel.
fn unfold_channel(y: &[f64], lambda: f64, order: usize) -> Vec<i64> {
    let two_l = 2.0 * lambda;
    let dy = difference_n(y, order);
    let mut eps: Vec<i64> = dy.iter().map(|&d| ((fold(d, lambda) - d) / two_l).round() as i64).collect();
    for level in (0..order).rev() {
        let mut integrated = anti_difference(&eps);
        if level > 0 {
            // integer constant keeping the mean of the level-th difference of ĝ closest to zero
            let dyl = difference_n(y, level);
            let mean: f64 =
                dyl.iter().zip(&integrated).map(|(a, &e)| a + two_l * e as f64).sum::<f64>() / dyl.len() as f64;
            let c = (-mean / two_l).round() as i64;
            for v in integrated.iter_mut() {
                *v += c;
            }
        }
        eps = integrated;
    }
    eps
}

/// Unfold `y` with D-th order differences; returns ĝ = y + 2λε̂ with ε̂[0] = 0.
pub fn usalg(y: &ComplexSignal, lambda: f64, order: usize) -> Result<ComplexSignal> {
    if order < 1 {
        return Err(Error::InvalidArgument("difference order must be >= 1".into()));
    }
    if order >= y.len() {
        return Err(Error::InvalidArgument(format!("order {order} needs more than {} samples", y.len())));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} must be positive")));
    }
    let re: Vec<f64> = y.samples().iter().map(|s| s.re).collect();
    let im: Vec<f64> = y.samples().iter().map(|s| s.im).collect();
    let er = unfold_channel(&re, lambda, order);
    let ei = unfold_channel(&im, lambda, order);
    let two_l = 2.0 * lambda;
    ComplexSignal::new(
        y.samples()
            .iter()
            .zip(er.iter().zip(&ei))
            .map(|(s, (&a, &b))| s + Complex64::new(two_l * a as f64, two_l * b as f64))
            .collect(),
    )
}

/// D ∈ 1..=d_max minimizing max(‖ΔᴰRe‖∞, ‖ΔᴰIm‖∞); ties go to the smaller D.
pub fn select_usalg_order(g: &ComplexSignal, d_max: usize) -> Result<usize> {
    if d_max < 1 {
        return Err(Error::InvalidArgument("d_max must be >= 1".into()));
    }
    let mut current = g.samples().to_vec();
    let mut best = (1usize, f64::INFINITY);
    for d in 1..=d_max.min(g.len() - 1) {
        current = first_difference(&current)?;
        let norm = current.iter().map(|v| v.re.abs().max(v.im.abs())).fold(0.0, f64::max);
        if norm < best.1 {
            best = (d, norm);
        }
    }
    Ok(best.0)
}
