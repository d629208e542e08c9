//! Deterministic random generation of curvature data.
//!
//! Every consumer draws from a per-index substream of a counter-mode stream
//! cipher, so batch output is a pure function of (seed, index) and in
//! particular independent of how work is split across threads.

use crate::curvature::CurvatureBlocks;
use crate::mat3::{eigen_sym3, Mat3, Sym3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// RNG for one (seed, index) cell of a batch.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn random_mat3<R: Rng>(rng: &mut R, scale: f64) -> Mat3 {
    let mut m = Mat3::ZERO;
    for i in 0..3 {
        for j in 0..3 {
            let g: f64 = rng.sample(StandardNormal);
            m.set(i, j, scale * g);
        }
    }
    m
}

pub fn random_sym3<R: Rng>(rng: &mut R, scale: f64) -> Sym3 {
    let mut m = Sym3::ZERO;
    for i in 0..3 {
        for j in i..3 {
            let g: f64 = rng.sample(StandardNormal);
            m.set(i, j, scale * g);
        }
    }
    m
}

/// Random valid curvature blocks: Gaussian entries with the C-block shifted
/// so the trace identity holds exactly, rescaled into ‖R‖ ≤ `max_norm`.
pub fn random_blocks<R: Rng>(rng: &mut R, max_norm: f64) -> CurvatureBlocks {
    let a = random_sym3(rng, 1.0);
    let mut c = random_sym3(rng, 1.0);
    c = c.shift((a.trace() - c.trace()) / 3.0);
    let b = random_mat3(rng, 1.0);
    let blocks = CurvatureBlocks::from_parts(a, b, c);
    let n = blocks.frobenius();
    let target: f64 = rng.gen_range(0.1..1.0) * max_norm;
    if n > 0.0 {
        blocks.scale(target / n.max(target / max_norm))
    } else {
        blocks
    }
}

/// Random orthogonal 3×3 matrix by repeated Gram-Schmidt of a Gaussian
/// matrix, with the determinant sign drawn explicitly so both branches of
/// the orthogonal group are covered evenly.
pub fn random_orthogonal<R: Rng>(rng: &mut R) -> Mat3 {
    let target_det: f64 = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    loop {
        let g = random_mat3(rng, 1.0);
        if let Some(mut q) = gram_schmidt(&g) {
            // second pass tightens orthogonality to machine precision
            if let Some(q2) = gram_schmidt(&q) {
                q = q2;
            }
            if q.det() * target_det < 0.0 {
                for i in 0..3 {
                    q.set(i, 2, -q.get(i, 2));
                }
            }
            return q;
        }
    }
}

fn gram_schmidt(m: &Mat3) -> Option<Mat3> {
    let mut cols = [[0.0f64; 3]; 3];
    for j in 0..3 {
        for i in 0..3 {
            cols[j][i] = m.get(i, j);
        }
        for k in 0..j {
            let d: f64 = (0..3).map(|i| cols[j][i] * cols[k][i]).sum();
            for i in 0..3 {
                cols[j][i] -= d * cols[k][i];
            }
        }
        let n: f64 = (0..3).map(|i| cols[j][i] * cols[j][i]).sum::<f64>().sqrt();
        if n < 1e-8 {
            return None;
        }
        for i in 0..3 {
            cols[j][i] /= n;
        }
    }
    let mut q = Mat3::ZERO;
    for j in 0..3 {
        for i in 0..3 {
            q.set(i, j, cols[j][i]);
        }
    }
    Some(q)
}

/// Uniform sample of the simplex {Σa = 0, aᵢ ≥ −s/12} by rejection from the
/// bounding square of its first two coordinates.
pub fn simplex_sample<R: Rng>(rng: &mut R, s: f64) -> [f64; 3] {
    let lo = -s / 12.0;
    let hi = s / 6.0;
    loop {
        let a1 = rng.gen_range(lo..hi);
        let a2 = rng.gen_range(lo..hi);
        let a3 = -a1 - a2;
        if a3 >= lo {
            return [a1, a2, a3];
        }
    }
}

fn low_pair(m: &Sym3) -> f64 {
    let (e, _) = eigen_sym3(m);
    e[0] + e[1]
}

/// Random blocks strictly inside the pic cone: rejection from the Gaussian
/// ensemble, falling back to a common diagonal shift of both blocks (which
/// preserves the trace identity) when rejection runs long.
pub fn random_pic_blocks<R: Rng>(rng: &mut R, max_norm: f64) -> CurvatureBlocks {
    for _ in 0..50 {
        let b = random_blocks(rng, max_norm);
        if low_pair(&b.a) > 0.0 && low_pair(&b.c) > 0.0 {
            return b;
        }
    }
    let b = random_blocks(rng, max_norm);
    let margin = 0.05 * (1.0 + b.frobenius());
    let need = (margin - low_pair(&b.a).min(low_pair(&b.c))) / 2.0;
    CurvatureBlocks::from_parts(b.a.shift(need), b.b, b.c.shift(need))
}

/// Random blocks whose 6×6 assembly is positive semi-definite: a Gram matrix
/// with the deficient diagonal block shifted up to restore the trace
/// identity (adding a nonnegative multiple of the identity to a diagonal
/// block of a PSD matrix keeps it PSD).
pub fn random_nonneg_blocks<R: Rng>(rng: &mut R, max_norm: f64) -> CurvatureBlocks {
    let mut g = [[0.0f64; 6]; 6];
    for row in g.iter_mut() {
        for v in row.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
    }
    let mut m = [[0.0f64; 6]; 6];
    for i in 0..6 {
        for j in 0..6 {
            let mut s = 0.0;
            for k in 0..6 {
                s += g[k][i] * g[k][j];
            }
            m[i][j] = s / 3.0;
        }
    }
    let mut b = CurvatureBlocks::from_assembled6(&m);
    let gap = (b.a.trace() - b.c.trace()) / 3.0;
    if gap > 0.0 {
        b.c = b.c.shift(gap);
    } else {
        b.a = b.a.shift(-gap);
    }
    let n = b.frobenius();
    if n > max_norm {
        b = b.scale(max_norm / n);
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat3::jacobi_eigen;

    #[test]
    fn substreams_are_deterministic_and_distinct() {
        let a: f64 = substream(7, 0).gen();
        let b: f64 = substream(7, 0).gen();
        let c: f64 = substream(7, 1).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn orthogonal_sampler_covers_both_branches() {
        let mut plus = 0;
        let mut minus = 0;
        for i in 0..200 {
            let q = random_orthogonal(&mut substream(3, i));
            let orth = q.transpose().mul(&q).sub(&Mat3::identity()).norm();
            assert!(orth < 1e-12, "not orthogonal: {orth}");
            if q.det() > 0.0 {
                plus += 1;
            } else {
                minus += 1;
            }
        }
        assert!(plus > 50 && minus > 50, "{plus} vs {minus}");
    }

    #[test]
    fn simplex_samples_are_feasible() {
        let mut rng = substream(11, 0);
        for _ in 0..500 {
            let a = simplex_sample(&mut rng, 12.0);
            assert!((a[0] + a[1] + a[2]).abs() < 1e-12);
            for v in a {
                assert!(v >= -1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn pic_samples_satisfy_cone_conditions() {
        for i in 0..200 {
            let b = random_pic_blocks(&mut substream(5, i), 10.0);
            let (ea, _) = eigen_sym3(&b.a);
            let (ec, _) = eigen_sym3(&b.c);
            assert!(ea[0] + ea[1] > 0.0);
            assert!(ec[0] + ec[1] > 0.0);
            b.validate().unwrap();
        }
    }

    #[test]
    fn nonneg_samples_are_psd() {
        for i in 0..200 {
            let b = random_nonneg_blocks(&mut substream(9, i), 10.0);
            let (vals, _) = jacobi_eigen(&b.assemble6());
            assert!(vals[0] > -1e-10, "min eigenvalue {}", vals[0]);
            b.validate().unwrap();
        }
    }
}
