//! `curv4` — command-line surface of the curvature-operator toolkit.
//!
//! Every subcommand writes schema-versioned JSON to stdout and diagnostics
//! to stderr. Exit codes: 0 success, 2 invalid input, 3 domain error.
//! Seeded subcommands (`sweep`, `identities`) produce byte-identical output
//! for a fixed seed regardless of `--workers`.

use clap::{Args, Parser, Subcommand};
use curv4_core::catalog;
use curv4_core::checks::identities_check;
use curv4_core::curvature::{ricci_data, riemann_from_blocks, weyl_parts};
use curv4_core::extremal::{max_cubic_sum, max_square_sum, conformal_cone_sweep, sample_cone, ConeKind};
use curv4_core::flow::{integrate, ratio_monitor, write_csv, FlowConfig};
use curv4_core::invariants::{p_direct, p_via_expansion, trace_identities, tri};
use curv4_core::io;
use curv4_core::pinching::{e_functional, report};
use curv4_core::{CurvError, CurvatureBlocks};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "curv4", version, about = "Curvature-operator block algebra in dimension four")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Exactly one input source: a JSON file (blocks or Riemann schema) or a
/// catalog model name.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputSource {
    /// Path to a curv4.blocks.v1 or curv4.riemann.v1 JSON file
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,
    /// Catalog model name (s4, s3xr, s2xs2, s2xr2, cp2)
    #[arg(long, value_name = "NAME")]
    model: Option<String>,
}

impl InputSource {
    fn blocks(&self) -> Result<CurvatureBlocks, CurvError> {
        match (&self.input, &self.model) {
            (Some(path), None) => Ok(io::load_document(path)?.into_blocks()),
            (None, Some(name)) => Ok(catalog::model(name)?.blocks),
            _ => unreachable!("clap enforces exactly one source"),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Convert between Riemann-component and block representations
    Decompose {
        #[command(flatten)]
        source: InputSource,
        /// Output representation
        #[arg(long, value_parser = ["blocks", "riemann"], default_value = "blocks")]
        to: String,
    },
    /// Sharp-operator invariants: tri, P by both routes, trace identities
    Invariants {
        #[command(flatten)]
        source: InputSource,
    },
    /// Pinching report (pic predicate, ratios, drop term, P)
    Pinch {
        #[command(flatten)]
        source: InputSource,
    },
    /// Integrate the reaction ODE dR/dt = R² + R^# and monitor inequalities
    Flow {
        #[command(flatten)]
        source: InputSource,
        #[arg(long = "t-max", default_value_t = 0.1, allow_negative_numbers = true)]
        t_max: f64,
        /// Initial step size
        #[arg(long = "dt", default_value_t = 1e-3, allow_negative_numbers = true)]
        dt: f64,
        /// Rescale each accepted state to the initial Frobenius norm
        #[arg(long)]
        normalize: bool,
        /// Operator-norm cutoff for blow-up detection
        #[arg(long = "blowup-threshold", default_value_t = 1e6, allow_negative_numbers = true)]
        blowup_threshold: f64,
        /// Accepted steps between monitor evaluations
        #[arg(long = "monitor-stride", default_value_t = 1)]
        monitor_stride: usize,
        /// Write the trajectory as CSV to this path
        #[arg(long = "csv", value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Extremal constants: max Σa³ on the circle, max Σa² on the simplex
    Extremal {
        /// Grid resolution for the circle search
        #[arg(long, default_value_t = 2001)]
        grid: usize,
        /// Scalar-curvature normalization for the simplex maximum
        #[arg(long = "s-fixed", default_value_t = 12.0, allow_negative_numbers = true)]
        s_fixed: f64,
    },
    /// Model-space table (one entry, or all when no name is given)
    Catalog {
        /// Model name; omit to list all entries
        name: Option<String>,
    },
    /// Seeded sweeps: extremal verification (prop22) or cone monitors
    Sweep {
        /// Which cone to sweep
        #[arg(long, default_value = "prop22")]
        cone: String,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Thread count (default: all cores); results do not depend on it
        #[arg(long)]
        workers: Option<usize>,
        /// Local-ascent rounds for the best candidates (prop22 only)
        #[arg(long = "refine-steps", default_value_t = 50)]
        refine_steps: usize,
        #[arg(long = "s-fixed", default_value_t = 12.0, allow_negative_numbers = true)]
        s_fixed: f64,
    },
    /// Batch verification of the algebraic identities on random inputs
    Identities {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Thread count (default: all cores); results do not depend on it
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

fn catalog_entry_json(e: &catalog::CatalogEntry) -> serde_json::Value {
    json!({
        "name": e.model.name,
        "blocks": e.model.blocks,
        "expected_P": e.model.expected_p,
        "pic": e.model.pic,
        "notes": e.model.notes,
        "report": e.report,
    })
}

fn run(cli: Cli) -> Result<String, CurvError> {
    match cli.cmd {
        Cmd::Decompose { source, to } => {
            let blocks = source.blocks()?;
            match to.as_str() {
                "riemann" => Ok(io::riemann_to_json(&riemann_from_blocks(&blocks)?)),
                _ => Ok(io::blocks_to_json(&blocks)),
            }
        }
        Cmd::Invariants { source } => {
            let blocks = source.blocks()?;
            let sd = ricci_data(&blocks);
            let ti = trace_identities(&blocks);
            let (wp, wm) = weyl_parts(&blocks);
            let out = json!({
                "format": "curv4.invariants.v1",
                "S": sd.s,
                "tri": tri(&blocks),
                "P_direct": p_direct(&blocks),
                "P_expansion": p_via_expansion(&blocks)?,
                "trace_identity_residuals": {
                    "tsigma": ti.tsigma_residual,
                    "lambda_cubed": ti.lambda_cubed_residual,
                },
                "spectral": sd,
                "weyl": { "Wplus": wp, "Wminus": wm },
            });
            Ok(serde_json::to_string_pretty(&out).expect("json"))
        }
        Cmd::Pinch { source } => Ok(io::report_to_json(&report(&source.blocks()?))),
        Cmd::Flow {
            source,
            t_max,
            dt,
            normalize,
            blowup_threshold,
            monitor_stride,
            csv,
        } => {
            let blocks = source.blocks()?;
            let cfg = FlowConfig {
                t_max,
                dt_init: dt,
                blowup_threshold,
                normalize,
                monitor_stride,
            };
            let traj = integrate(&blocks, &cfg)?;
            if let Some(path) = &csv {
                let mut file = std::fs::File::create(path)?;
                write_csv(&traj, &mut file)?;
            }
            let ratio = ratio_monitor(&traj);
            let last = traj.samples.last().expect("trajectory is nonempty");
            let worst_inequality = traj
                .samples
                .iter()
                .filter_map(|s| s.monitors.as_ref())
                .map(|m| m.inequalities.min())
                .fold(f64::INFINITY, f64::min);
            let out = json!({
                "format": "curv4.flow.v1",
                "samples": traj.samples.len(),
                "t_end": last.t,
                "blowup_time": traj.blowup_time,
                "final_S": last.blocks.scalar_curvature(),
                "final_report": last.report,
                "max_ratio_jump": ratio.max_jump,
                "cone_exit": ratio.cone_exit,
                "min_inequality_residual": if worst_inequality.is_finite() { Some(worst_inequality) } else { None },
                "csv": csv.as_ref().map(|p| p.display().to_string()),
            });
            Ok(serde_json::to_string_pretty(&out).expect("json"))
        }
        Cmd::Extremal { grid, s_fixed } => {
            let cubic = max_cubic_sum(grid)?;
            let (square_max, square_arg) = max_square_sum(s_fixed)?;
            let out = json!({
                "format": "curv4.extremal.v1",
                "cubic_sum": { "grid": grid, "max": cubic.value, "argmax": cubic.argmax, "grid_max": cubic.grid_value },
                "square_sum": { "S": s_fixed, "max": square_max, "argmax": square_arg },
            });
            Ok(serde_json::to_string_pretty(&out).expect("json"))
        }
        Cmd::Catalog { name } => {
            let out = match name {
                Some(name) => {
                    let model = catalog::model(&name)?;
                    let rep = report(&model.blocks);
                    json!({
                        "format": "curv4.catalog.v1",
                        "entries": [catalog_entry_json(&catalog::CatalogEntry { model, report: rep })],
                    })
                }
                None => json!({
                    "format": "curv4.catalog.v1",
                    "entries": catalog::list().iter().map(catalog_entry_json).collect::<Vec<_>>(),
                }),
            };
            Ok(serde_json::to_string_pretty(&out).expect("json"))
        }
        Cmd::Sweep {
            cone,
            samples,
            seed,
            workers,
            refine_steps,
            s_fixed,
        } => {
            let kind: ConeKind = cone.parse()?;
            match kind {
                ConeKind::Conformal => {
                    let cfg = curv4_core::SweepConfig {
                        samples,
                        seed,
                        refine_steps,
                        s_fixed,
                    };
                    let result = with_workers(workers, || conformal_cone_sweep(&cfg))?;
                    Ok(io::sweep_to_json(&result))
                }
                ConeKind::Pic | ConeKind::Nonneg => {
                    let summary = with_workers(workers, || monitor_sweep(kind, seed, samples));
                    Ok(serde_json::to_string_pretty(&summary).expect("json"))
                }
            }
        }
        Cmd::Identities {
            samples,
            seed,
            workers,
        } => {
            let rep = with_workers(workers, || identities_check(samples, seed))?;
            let out = json!({ "format": "curv4.identities.v1", "report": rep });
            Ok(serde_json::to_string_pretty(&out).expect("json"))
        }
    }
}

/// Worst-case monitor values over a batch of cone samples: drop-term
/// nonnegativity on the pic cone, eigenvalue-inequality residuals on both.
fn monitor_sweep(kind: ConeKind, seed: u64, samples: usize) -> serde_json::Value {
    use rayon::prelude::*;
    let batch = sample_cone(kind, seed, samples);
    let (min_e, min_inequality) = batch
        .par_iter()
        .map(|b| {
            let e = match kind {
                ConeKind::Pic => e_functional(b).expect("pic samples are in the cone"),
                _ => f64::INFINITY,
            };
            let scale = 1.0 + b.frobenius_sq();
            (e, curv4_core::flow::inequality_residuals(b).min() / scale)
        })
        .reduce(
            || (f64::INFINITY, f64::INFINITY),
            |x, y| (x.0.min(y.0), x.1.min(y.1)),
        );
    json!({
        "format": "curv4.monitor-sweep.v1",
        "cone": kind,
        "samples": samples,
        "seed": seed,
        "min_drop_term": if min_e.is_finite() { Some(min_e) } else { None },
        "min_inequality_residual_scaled": min_inequality,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(payload) => {
            println!("{payload}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("curv4: {err}");
            let payload = json!({ "error": err.tag(), "detail": err.to_string() });
            println!("{}", serde_json::to_string_pretty(&payload).expect("json"));
            match err.tag() {
                "invalid-input" | "not-found" => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
