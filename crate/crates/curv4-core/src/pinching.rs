//! Pointwise pinching functionals on curvature operators: the isotropic
//! positivity predicate, the pinching ratios, the nonnegative drop term E,
//! and the gradient rewriting identity used alongside it.

use crate::curvature::{ricci_data, CurvatureBlocks, SpectralData};
use crate::error::{CurvError, Result};
use crate::invariants::p_direct;
use serde::{Deserialize, Serialize};

/// Pointwise pinching summary.
///
/// Fields that are undefined on part of the cone (`upic_delta`, `wpic_ratio`,
/// `e`) are represented as an explicit absent value, never as NaN or 0, so
/// downstream sweeps cannot silently treat degenerate cones as data.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PinchingReport {
    /// A₁+A₂ > 0 and C₁+C₂ > 0.
    pub pic: bool,
    /// min(A₁/A₃, C₁/C₃); defined when A₃ > 0 and C₃ > 0.
    pub upic_delta: Option<f64>,
    /// A₁C₁ − B₃².
    pub upic_margin: f64,
    /// B₃² / ((A₁+A₂)(C₁+C₂)); defined when the denominator is positive.
    pub wpic_ratio: Option<f64>,
    /// The drop term; defined on the pic cone.
    #[serde(rename = "E")]
    pub e: Option<f64>,
    /// The classification quantity.
    #[serde(rename = "P")]
    pub p: f64,
}

fn e_from_spectral(sd: &SpectralData) -> Result<f64> {
    let [a1, a2, _] = sd.a_eigs;
    let [c1, c2, _] = sd.c_eigs;
    let [b1, b2, b3] = sd.b_sv;
    if a1 + a2 <= 0.0 || c1 + c2 <= 0.0 {
        return Err(CurvError::domain(
            "drop term undefined outside the pic cone (needs A₁+A₂ > 0 and C₁+C₂ > 0)",
        ));
    }
    // B₃ = 0 forces B₁ = B₂ = 0, so the limit value of the first term is 0.
    let t1 = if b3 == 0.0 {
        0.0
    } else {
        2.0 * b1 * (b3 - b2) / b3
    };
    let t2 = ((a1 - b1).powi(2) + (a2 - b2).powi(2) + 2.0 * a2 * (b2 - b1)) / (a1 + a2);
    let t3 = ((c1 - b1).powi(2) + (c2 - b2).powi(2) + 2.0 * c2 * (b2 - b1)) / (c1 + c2);
    Ok(t1 + t2 + t3)
}

/// The nonnegative drop term
///
///   E = 2B₁(B₃−B₂)/B₃
///     + [(A₁−B₁)² + (A₂−B₂)² + 2A₂(B₂−B₁)] / (A₁+A₂)
///     + [(C₁−B₁)² + (C₂−B₂)² + 2C₂(B₂−B₁)] / (C₁+C₂)
///
/// defined on the pic cone, where every term is nonnegative. E = 0 forces
/// A₁ = A₂ = C₁ = C₂ = B₁ = B₂ = B₃.
pub fn e_functional(b: &CurvatureBlocks) -> Result<f64> {
    e_from_spectral(&ricci_data(b))
}

/// Full pinching report for one operator.
pub fn report(b: &CurvatureBlocks) -> PinchingReport {
    let sd = ricci_data(b);
    report_from_spectral(b, &sd)
}

pub(crate) fn report_from_spectral(b: &CurvatureBlocks, sd: &SpectralData) -> PinchingReport {
    let [a1, a2, a3] = sd.a_eigs;
    let [c1, c2, c3] = sd.c_eigs;
    let b3 = sd.b_sv[2];
    let pic = a1 + a2 > 0.0 && c1 + c2 > 0.0;
    let upic_delta = if a3 > 0.0 && c3 > 0.0 {
        Some((a1 / a3).min(c1 / c3))
    } else {
        None
    };
    let denom = (a1 + a2) * (c1 + c2);
    let wpic_ratio = if denom > 0.0 {
        Some(b3 * b3 / denom)
    } else {
        None
    };
    PinchingReport {
        pic,
        upic_delta,
        upic_margin: a1 * c1 - b3 * b3,
        wpic_ratio,
        e: e_from_spectral(sd).ok(),
        p: p_direct(b),
    }
}

/// Residual of the quadratic-form identity used to rewrite the gradient
/// terms: for any vectors u, v, w of equal length,
///
///   4|u|² − 2|v|² − 2|w|² − 4|2u−v−w|²
///     = −2|(u−v)+(u−w)|² − 2|u−v|² − 2|u−w|² + 2⟨2u−v−w, v+w⟩.
///
/// Returns the absolute difference between the two sides.
pub fn gradient_identity_residual(u: &[f64], v: &[f64], w: &[f64]) -> Result<f64> {
    if u.len() != v.len() || u.len() != w.len() || u.is_empty() {
        return Err(CurvError::invalid(
            "gradient identity needs three vectors of equal nonzero length",
        ));
    }
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let nsq = |x: &[f64]| dot(x, x);
    let n = u.len();
    let mut two_umvw = vec![0.0; n]; // 2u − v − w
    let mut umv = vec![0.0; n];
    let mut umw = vec![0.0; n];
    let mut vpw = vec![0.0; n];
    let mut sum_dev = vec![0.0; n]; // (u−v) + (u−w)
    for i in 0..n {
        two_umvw[i] = 2.0 * u[i] - v[i] - w[i];
        umv[i] = u[i] - v[i];
        umw[i] = u[i] - w[i];
        vpw[i] = v[i] + w[i];
        sum_dev[i] = umv[i] + umw[i];
    }
    let first = 4.0 * nsq(u) - 2.0 * nsq(v) - 2.0 * nsq(w) - 4.0 * nsq(&two_umvw);
    let last = -2.0 * nsq(&sum_dev) - 2.0 * nsq(&umv) - 2.0 * nsq(&umw)
        + 2.0 * dot(&two_umvw, &vpw);
    Ok((first - last).abs())
}
