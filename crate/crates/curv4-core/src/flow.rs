//! The pointwise curvature reaction ODE dR/dt = R² + R^# and trajectory
//! monitors for the eigenvalue differential inequalities and the pinching
//! ratio.
//!
//! No spatial domain is represented: this is the reaction part of the
//! evolution, which is exactly the setting in which the monitored
//! inequalities have their algebraic content.

use crate::curvature::{ricci_data, CurvatureBlocks};
use crate::error::{CurvError, Result};
use crate::invariants::reaction_matrix;
use crate::mat3::eigen_sym3;
use crate::pinching::{report_from_spectral, PinchingReport};
use std::io::Write;

/// Step-halving acceptance tolerance: the two-half-step vs full-step
/// discrepancy must stay below STEP_TOL·(1 + ‖R‖).
pub const STEP_TOL: f64 = 1e-8;

/// Derivatives of sorted-eigenvalue functionals are taken by central finite
/// differences with step FD_STEP·(1 + ‖R‖) along the exact reaction
/// direction; sorted eigenvalues are only one-sidedly differentiable at
/// crossings, so nearby samples are flagged rather than trusted.
pub const FD_STEP: f64 = 1e-6;

/// Hard cap on accepted steps per trajectory.
const MAX_STEPS: usize = 50_000_000;

/// Integration controls.
#[derive(Clone, Copy, Debug)]
pub struct FlowConfig {
    /// Integration horizon.
    pub t_max: f64,
    /// Initial step; the integrator halves it on accuracy failures and may
    /// grow it back when the local error is far below tolerance.
    pub dt_init: f64,
    /// Operator-norm cutoff at which the trajectory is declared blown up.
    pub blowup_threshold: f64,
    /// Rescale each accepted state to the initial Frobenius norm. The
    /// Frobenius norm is used because it is strictly positive on nonzero
    /// operators, unlike the scalar curvature.
    pub normalize: bool,
    /// Accepted steps between monitor evaluations.
    pub monitor_stride: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            t_max: 0.1,
            dt_init: 1e-3,
            blowup_threshold: 1e6,
            normalize: false,
            monitor_stride: 1,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0 && self.dt_init > 0.0 && self.blowup_threshold > 0.0) {
            return Err(CurvError::invalid(
                "flow config requires t_max > 0, dt_init > 0, blowup_threshold > 0",
            ));
        }
        if self.monitor_stride == 0 {
            return Err(CurvError::invalid("monitor_stride must be at least 1"));
        }
        Ok(())
    }
}

/// Residuals of the three eigenvalue differential inequalities at one state.
/// Nonnegative up to finite-difference noise.
#[derive(Clone, Copy, Debug)]
pub struct InequalityResiduals {
    /// D_t(A₁+A₂) − [A₁² + A₂² + 2(A₁+A₂)A₃ + B₁² + B₂²]
    pub r_a: f64,
    /// D_t(C₁+C₂) − [C₁² + C₂² + 2(C₁+C₂)C₃ + B₁² + B₂²]
    pub r_c: f64,
    /// [A₃B₃ + C₃B₃ + 2B₁B₂] − D_t(B₃)
    pub r_b: f64,
}

impl InequalityResiduals {
    pub fn min(&self) -> f64 {
        self.r_a.min(self.r_c).min(self.r_b)
    }
}

/// Monitor values attached to a trajectory sample.
#[derive(Clone, Copy, Debug)]
pub struct Monitors {
    pub inequalities: InequalityResiduals,
    /// D_t log(B₃² / ((A₁+A₂)(C₁+C₂))) along the reaction direction;
    /// absent outside the pic cone.
    pub ratio_derivative: Option<f64>,
    /// Set when an eigenvalue or singular-value gap is comparable to the
    /// finite-difference step, where sorted functionals lose smoothness.
    pub near_crossing: bool,
}

/// One accepted state on a trajectory.
#[derive(Clone, Debug)]
pub struct FlowSample {
    pub t: f64,
    pub blocks: CurvatureBlocks,
    pub report: PinchingReport,
    pub monitors: Option<Monitors>,
}

/// Time-ordered trajectory of the reaction ODE.
#[derive(Clone, Debug, Default)]
pub struct FlowTrajectory {
    pub samples: Vec<FlowSample>,
    /// Set when the operator norm crossed the blow-up threshold; the last
    /// sample is the detection state.
    pub blowup_time: Option<f64>,
}

/// Right-hand side of the reaction ODE in block form.
///
/// The output satisfies the trace identity whenever the input does: the
/// diagonal-block traces of R² + R^# are (tr A)² + tr BBᵀ and
/// (tr C)² + tr BᵀB.
pub fn rhs(b: &CurvatureBlocks) -> CurvatureBlocks {
    CurvatureBlocks::from_assembled6(&reaction_matrix(b))
}

fn rk4_step(y: &CurvatureBlocks, dt: f64) -> CurvatureBlocks {
    let k1 = rhs(y);
    let k2 = rhs(&y.axpy(dt / 2.0, &k1));
    let k3 = rhs(&y.axpy(dt / 2.0, &k2));
    let k4 = rhs(&y.axpy(dt, &k3));
    y.axpy(
        dt / 6.0,
        &k1.add(&k2.scale(2.0)).add(&k3.scale(2.0)).add(&k4),
    )
}

/// Sum of the two smallest eigenvalues.
fn low_pair_sum(m: &crate::mat3::Sym3) -> f64 {
    let (e, _) = eigen_sym3(m);
    e[0] + e[1]
}

fn top_singular_value(m: &crate::mat3::Mat3) -> f64 {
    crate::mat3::singular_values3(m)[2]
}

/// Residuals of the differential inequalities at `b`, with the derivative of
/// each sorted-eigenvalue functional taken by central differences along the
/// exact reaction direction.
pub fn inequality_residuals(b: &CurvatureBlocks) -> InequalityResiduals {
    let v = rhs(b);
    let h = FD_STEP * (1.0 + b.frobenius());
    let plus = b.axpy(h, &v);
    let minus = b.axpy(-h, &v);

    let dt_a = (low_pair_sum(&plus.a) - low_pair_sum(&minus.a)) / (2.0 * h);
    let dt_c = (low_pair_sum(&plus.c) - low_pair_sum(&minus.c)) / (2.0 * h);
    let dt_b3 = (top_singular_value(&plus.b) - top_singular_value(&minus.b)) / (2.0 * h);

    let sd = ricci_data(b);
    let [a1, a2, a3] = sd.a_eigs;
    let [c1, c2, c3] = sd.c_eigs;
    let [b1, b2, b3] = sd.b_sv;

    InequalityResiduals {
        r_a: dt_a - (a1 * a1 + a2 * a2 + 2.0 * (a1 + a2) * a3 + b1 * b1 + b2 * b2),
        r_c: dt_c - (c1 * c1 + c2 * c2 + 2.0 * (c1 + c2) * c3 + b1 * b1 + b2 * b2),
        r_b: (a3 * b3 + c3 * b3 + 2.0 * b1 * b2) - dt_b3,
    }
}

fn log_ratio(b: &CurvatureBlocks) -> Option<f64> {
    let sd = ricci_data(b);
    let denom = (sd.a_eigs[0] + sd.a_eigs[1]) * (sd.c_eigs[0] + sd.c_eigs[1]);
    let b3 = sd.b_sv[2];
    if denom > 0.0 && b3 > 0.0 {
        Some((b3 * b3 / denom).ln())
    } else {
        None
    }
}

fn evaluate_monitors(b: &CurvatureBlocks) -> Monitors {
    let inequalities = inequality_residuals(b);
    let v = rhs(b);
    let h = FD_STEP * (1.0 + b.frobenius());
    let ratio_derivative = match (log_ratio(&b.axpy(h, &v)), log_ratio(&b.axpy(-h, &v))) {
        (Some(p), Some(m)) => Some((p - m) / (2.0 * h)),
        _ => None,
    };
    let sd = ricci_data(b);
    let gap_tol = 10.0 * h * (1.0 + v.frobenius());
    let near_crossing = (sd.a_eigs[2] - sd.a_eigs[1]) <= gap_tol
        || (sd.c_eigs[2] - sd.c_eigs[1]) <= gap_tol
        || (sd.b_sv[2] - sd.b_sv[1]) <= gap_tol;
    Monitors {
        inequalities,
        ratio_derivative,
        near_crossing,
    }
}

fn make_sample(t: f64, blocks: CurvatureBlocks, with_monitors: bool) -> FlowSample {
    let sd = ricci_data(&blocks);
    FlowSample {
        t,
        report: report_from_spectral(&blocks, &sd),
        monitors: with_monitors.then(|| evaluate_monitors(&blocks)),
        blocks,
    }
}

/// Integrates the reaction ODE from `b0` with classical RK4 and step
/// halving: a step is accepted only when the discrepancy between one full
/// step and two half steps is at most [`STEP_TOL`]·(1 + ‖R‖). Terminates at
/// `t_max` or when the operator norm crosses the blow-up threshold.
pub fn integrate(b0: &CurvatureBlocks, cfg: &FlowConfig) -> Result<FlowTrajectory> {
    cfg.validate()?;
    b0.validate()?;

    let mut traj = FlowTrajectory::default();
    let target_norm = b0.frobenius();
    let mut state = *b0;
    let mut t = 0.0;
    let mut dt = cfg.dt_init;
    let mut accepted: usize = 0;

    traj.samples.push(make_sample(0.0, state, true));
    if state.operator_norm() >= cfg.blowup_threshold {
        traj.blowup_time = Some(0.0);
        return Ok(traj);
    }

    while t < cfg.t_max {
        if accepted >= MAX_STEPS {
            return Err(CurvError::IntegrationFailure {
                t,
                detail: format!("step limit {MAX_STEPS} reached"),
                last: Box::new(traj),
            });
        }
        let last_step = t + dt >= cfg.t_max;
        let dt_eff = if last_step { cfg.t_max - t } else { dt };

        let full = rk4_step(&state, dt_eff);
        let mid = rk4_step(&state, dt_eff / 2.0);
        let halves = rk4_step(&mid, dt_eff / 2.0);

        if !halves.is_finite() || !full.is_finite() {
            return Err(CurvError::IntegrationFailure {
                t,
                detail: "non-finite state".into(),
                last: Box::new(traj),
            });
        }

        let err = full.sub(&halves).frobenius();
        let tol = STEP_TOL * (1.0 + state.frobenius());
        if err > tol {
            dt /= 2.0;
            if dt < 1e-15 * (1.0 + t) {
                return Err(CurvError::IntegrationFailure {
                    t,
                    detail: "step size underflow".into(),
                    last: Box::new(traj),
                });
            }
            continue;
        }

        state = halves;
        if cfg.normalize {
            let n = state.frobenius();
            if n > 0.0 {
                state = state.scale(target_norm / n);
            }
        }
        t = if last_step { cfg.t_max } else { t + dt_eff };
        accepted += 1;

        let with_monitors = accepted % cfg.monitor_stride == 0;
        traj.samples.push(make_sample(t, state, with_monitors));

        if state.operator_norm() >= cfg.blowup_threshold {
            traj.blowup_time = Some(t);
            break;
        }
        if err < tol / 64.0 {
            dt *= 2.0;
        }
    }
    Ok(traj)
}

/// Ratio-monotonicity summary of a trajectory.
#[derive(Clone, Copy, Debug, Default)]
pub struct RatioMonitorReport {
    /// Largest increase of the pinching ratio between consecutive samples on
    /// which it is defined; 0 when fewer than two such samples exist.
    pub max_jump: f64,
    /// Time of the first sample outside the pic cone, if any; monitoring
    /// stops there.
    pub cone_exit: Option<f64>,
}

/// Scans a trajectory for upward jumps of the pinching ratio. A sound
/// reaction trajectory inside the pic cone keeps `max_jump` at integration-
/// error level (≤ 1e−6 per step).
pub fn ratio_monitor(traj: &FlowTrajectory) -> RatioMonitorReport {
    let mut out = RatioMonitorReport::default();
    let mut prev: Option<f64> = None;
    for s in &traj.samples {
        if !s.report.pic {
            out.cone_exit = Some(s.t);
            break;
        }
        if let Some(r) = s.report.wpic_ratio {
            if let Some(p) = prev {
                out.max_jump = out.max_jump.max(r - p);
            }
            prev = Some(r);
        }
    }
    out
}

/// Streams a trajectory as CSV with the fixed header
/// `t,S,A1,A2,A3,C1,C2,C3,B1,B2,B3,wpic_ratio,E,P,rA,rC,rB`.
///
/// Floats are printed in shortest round-trip decimal form; undefined fields
/// become empty cells.
pub fn write_csv<W: Write>(traj: &FlowTrajectory, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "t,S,A1,A2,A3,C1,C2,C3,B1,B2,B3,wpic_ratio,E,P,rA,rC,rB")?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for s in &traj.samples {
        let sd = ricci_data(&s.blocks);
        let m = s.monitors.as_ref();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.t,
            sd.s,
            sd.a_eigs[0],
            sd.a_eigs[1],
            sd.a_eigs[2],
            sd.c_eigs[0],
            sd.c_eigs[1],
            sd.c_eigs[2],
            sd.b_sv[0],
            sd.b_sv[1],
            sd.b_sv[2],
            opt(s.report.wpic_ratio),
            opt(s.report.e),
            s.report.p,
            opt(m.map(|m| m.inequalities.r_a)),
            opt(m.map(|m| m.inequalities.r_c)),
            opt(m.map(|m| m.inequalities.r_b)),
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::mat3::{Mat3, Sym3};

    fn ray_constant(name: &str) -> f64 {
        let b = catalog::model(name).unwrap().blocks;
        let v = rhs(&b);
        // v = k·b on a fixed ray; recover k from the Frobenius pairing
        let k = (v.a.to_mat3().dot(&b.a.to_mat3())
            + v.c.to_mat3().dot(&b.c.to_mat3())
            + 2.0 * v.b.dot(&b.b))
            / b.frobenius_sq();
        let resid = v.sub(&b.scale(k)).frobenius();
        assert!(resid <= 1e-12 * (1.0 + v.frobenius()), "{name}: off-ray");
        k
    }

    #[test]
    fn fixed_ray_constants() {
        for (name, k) in [
            ("s4", 3.0),
            ("s3xr", 4.0),
            ("s2xs2", 1.0),
            ("s2xr2", 2.0),
            ("cp2", 3.0),
        ] {
            assert!((ray_constant(name) - k).abs() < 1e-12, "{name}");
        }
    }

    #[test]
    fn rhs_preserves_trace_identity() {
        let b = CurvatureBlocks::from_parts(
            Sym3::from_upper([[1.5, 0.2, -0.7], [0.0, 0.4, 0.3], [0.0, 0.0, 2.1]]),
            Mat3::new([[0.3, 1.0, -0.2], [0.5, -0.4, 0.6], [0.0, 0.8, 0.1]]),
            Sym3::from_upper([[2.0, -0.5, 0.1], [0.0, 1.0, 0.9], [0.0, 0.0, 1.0]]),
        );
        let v = rhs(&b);
        assert!(v.trace_gap() <= 1e-12 * (1.0 + b.frobenius_sq()));
    }

    #[test]
    fn sphere_ray_matches_closed_form() {
        let b0 = catalog::model("s4").unwrap().blocks;
        let cfg = FlowConfig {
            t_max: 0.3,
            dt_init: 1e-4,
            ..FlowConfig::default()
        };
        let traj = integrate(&b0, &cfg).unwrap();
        for s in &traj.samples {
            let want = 12.0 / (1.0 - 3.0 * s.t);
            let got = s.blocks.scalar_curvature();
            assert!(
                ((got - want) / want).abs() < 1e-6,
                "t = {}: S = {got}, closed form {want}",
                s.t
            );
        }
        let s_01 = traj
            .samples
            .iter()
            .min_by(|a, b| {
                (a.t - 0.1).abs().partial_cmp(&(b.t - 0.1).abs()).unwrap()
            })
            .unwrap();
        assert!((s_01.t - 0.1).abs() < 0.05);
        assert!(traj.blowup_time.is_none());
    }

    #[test]
    fn normalized_cylinder_ray_is_stationary() {
        let b0 = catalog::model("s3xr").unwrap().blocks;
        let cfg = FlowConfig {
            t_max: 0.5,
            dt_init: 1e-3,
            normalize: true,
            ..FlowConfig::default()
        };
        let traj = integrate(&b0, &cfg).unwrap();
        for s in &traj.samples {
            assert!(
                s.blocks.sub(&b0).frobenius() < 1e-8,
                "drifted at t = {}",
                s.t
            );
        }
    }

    #[test]
    fn blowup_detected_near_one_third() {
        let b0 = catalog::model("s4").unwrap().blocks;
        let cfg = FlowConfig {
            t_max: 0.4,
            dt_init: 1e-4,
            blowup_threshold: 1e3,
            ..FlowConfig::default()
        };
        let traj = integrate(&b0, &cfg).unwrap();
        let t_blow = traj.blowup_time.expect("should blow up before t_max");
        assert!((t_blow - 1.0 / 3.0).abs() < 1e-3, "t_blow = {t_blow}");
        assert_eq!(traj.samples.last().unwrap().t, t_blow);
    }

    #[test]
    fn inequality_residuals_vanish_on_rays() {
        for name in ["s4", "s3xr"] {
            let r = inequality_residuals(&catalog::model(name).unwrap().blocks);
            assert!(
                r.r_a.abs() < 1e-6 && r.r_c.abs() < 1e-6 && r.r_b.abs() < 1e-6,
                "{name}: {r:?}"
            );
        }
    }

    #[test]
    fn ratio_constant_on_cylinder_ray() {
        let b0 = catalog::model("s3xr").unwrap().blocks;
        let cfg = FlowConfig {
            t_max: 0.2,
            dt_init: 1e-3,
            ..FlowConfig::default()
        };
        let traj = integrate(&b0, &cfg).unwrap();
        let rep = ratio_monitor(&traj);
        assert!(rep.cone_exit.is_none());
        assert!(rep.max_jump <= 1e-9);
        for s in &traj.samples {
            assert!((s.report.wpic_ratio.unwrap() - 0.25).abs() < 1e-9);
        }
    }

    #[test]
    fn ratio_non_increasing_from_perturbed_start() {
        let b0 = CurvatureBlocks::from_parts(
            Sym3::identity(),
            Mat3::from_diag([0.9, 0.9, -0.9]),
            Sym3::identity(),
        );
        let first = crate::pinching::report(&b0).wpic_ratio.unwrap();
        assert!((first - 0.2025).abs() < 1e-12);
        let cfg = FlowConfig {
            t_max: 0.15,
            dt_init: 1e-3,
            ..FlowConfig::default()
        };
        let traj = integrate(&b0, &cfg).unwrap();
        let rep = ratio_monitor(&traj);
        assert!(rep.cone_exit.is_none());
        assert!(rep.max_jump <= 1e-6, "max jump {}", rep.max_jump);
    }

    #[test]
    fn ratio_zero_when_mixed_block_vanishes() {
        let b0 = catalog::model("s4").unwrap().blocks;
        let cfg = FlowConfig {
            t_max: 0.2,
            dt_init: 1e-3,
            ..FlowConfig::default()
        };
        let traj = integrate(&b0, &cfg).unwrap();
        for s in &traj.samples {
            assert_eq!(s.report.wpic_ratio, Some(0.0));
        }
        assert_eq!(ratio_monitor(&traj).max_jump, 0.0);
    }

    #[test]
    fn invalid_config_rejected() {
        let b0 = catalog::model("s4").unwrap().blocks;
        let cfg = FlowConfig {
            t_max: -1.0,
            ..FlowConfig::default()
        };
        assert!(integrate(&b0, &cfg).is_err());
    }

    #[test]
    fn sample_times_strictly_increase() {
        let b0 = catalog::model("s4").unwrap().blocks;
        let cfg = FlowConfig {
            t_max: 0.2,
            dt_init: 1e-3,
            ..FlowConfig::default()
        };
        let traj = integrate(&b0, &cfg).unwrap();
        for pair in traj.samples.windows(2) {
            assert!(pair[1].t > pair[0].t);
        }
        assert_eq!(traj.samples.last().unwrap().t, 0.2);
    }

    #[test]
    fn overflow_fails_with_last_good_sample() {
        // past the blow-up time with an unreachable threshold the state
        // eventually overflows; the error must carry the trajectory so far
        let b0 = catalog::model("s4").unwrap().blocks;
        let cfg = FlowConfig {
            t_max: 1.0,
            dt_init: 1e-3,
            blowup_threshold: f64::MAX,
            ..FlowConfig::default()
        };
        match integrate(&b0, &cfg) {
            Err(crate::CurvError::IntegrationFailure { t, last, .. }) => {
                assert!(t > 0.3 && t < 1.0 / 3.0 + 1e-3, "failed at t = {t}");
                let final_sample = last.samples.last().unwrap();
                assert!(final_sample.blocks.is_finite());
                assert!(final_sample.blocks.scalar_curvature() > 1e6);
            }
            other => panic!("expected integration failure, got {other:?}"),
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let b0 = catalog::model("s3xr").unwrap().blocks;
        let cfg = FlowConfig {
            t_max: 0.01,
            dt_init: 1e-3,
            ..FlowConfig::default()
        };
        let traj = integrate(&b0, &cfg).unwrap();
        let mut buf = Vec::new();
        write_csv(&traj, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,S,A1,A2,A3,C1,C2,C3,B1,B2,B3,wpic_ratio,E,P,rA,rC,rB"
        );
        let first = lines.next().unwrap();
        let fields: Vec<&str> = first.split(',').collect();
        assert_eq!(fields.len(), 17);
        assert_eq!(fields[0], "0");
        assert_eq!(fields[1], "12");
        // round-trip parse
        assert_eq!(fields[11].parse::<f64>().unwrap(), 0.25);
    }
}
