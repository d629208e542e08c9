//! Seeded batch verification of the algebraic identities: the two trace
//! identities, agreement of the two routes to the classification quantity,
//! and the gradient rewriting identity. Used by the CLI `identities`
//! subcommand and the acceptance suite.

use crate::error::Result;
use crate::invariants::{p_direct, p_via_expansion, trace_identities};
use crate::pinching::gradient_identity_residual;
use crate::sampling::{random_blocks, substream};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Worst residuals found over a seeded batch; all are scaled relative to the
/// size of the inputs.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IdentitiesReport {
    pub samples: usize,
    pub seed: u64,
    /// max of the two trace-identity residuals over the batch
    pub worst_trace_identity: f64,
    /// max |p_direct − p_expansion∘diagonalize| / (1 + ‖R‖⁴)
    pub worst_route_equivalence: f64,
    /// max gradient-identity residual / (1 + |u|² + |v|² + |w|²)
    pub worst_gradient_identity: f64,
}

/// Runs all identity checks over `samples` seeded random inputs.
pub fn identities_check(samples: usize, seed: u64) -> Result<IdentitiesReport> {
    if samples == 0 {
        return Err(crate::CurvError::invalid("identities check needs samples >= 1"));
    }
    let worst = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i);
            let blocks = random_blocks(&mut rng, 10.0);

            let trace = trace_identities(&blocks).worst();

            let norm = blocks.frobenius();
            let route = (p_direct(&blocks)
                - p_via_expansion(&blocks).expect("random blocks diagonalize cleanly"))
            .abs()
                / (1.0 + norm.powi(4));

            let dim = rng.gen_range(1..=8usize);
            let mut draw = |n: usize| -> Vec<f64> {
                (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect()
            };
            let (u, v, w) = (draw(dim), draw(dim), draw(dim));
            let nsq = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>();
            let grad = gradient_identity_residual(&u, &v, &w)
                .expect("equal-length vectors")
                / (1.0 + nsq(&u) + nsq(&v) + nsq(&w));

            [trace, route, grad]
        })
        .reduce(|| [0.0f64; 3], |a, b| [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2])]);

    Ok(IdentitiesReport {
        samples,
        seed,
        worst_trace_identity: worst[0],
        worst_route_equivalence: worst[1],
        worst_gradient_identity: worst[2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residuals_stay_at_roundoff() {
        let r = identities_check(1000, 1).unwrap();
        assert!(r.worst_trace_identity <= 1e-9, "{r:?}");
        assert!(r.worst_route_equivalence <= 1e-9, "{r:?}");
        assert!(r.worst_gradient_identity <= 1e-9, "{r:?}");
    }

    #[test]
    fn single_sample_report_shape() {
        let r = identities_check(1, 3).unwrap();
        assert_eq!(r.samples, 1);
        assert!(r.worst_trace_identity.is_finite());
        assert!(r.worst_route_equivalence.is_finite());
        assert!(r.worst_gradient_identity.is_finite());
    }

    #[test]
    fn same_seed_same_report() {
        let a = identities_check(500, 9).unwrap();
        let b = identities_check(500, 9).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(identities_check(0, 1).is_err());
    }
}
