//! Fixed-size 3×3 kernels: symmetric eigendecomposition by cyclic Jacobi,
//! singular values, and the cofactor adjugate.
//!
//! Everything here is closed-form or unconditionally convergent at this size,
//! so there are no tuning knobs and no external dependencies. The adjugate is
//! computed from 2×2 cofactors, never via an inverse, so singular matrices are
//! first-class inputs.

use serde::{Deserialize, Serialize};

/// Relative off-diagonal threshold at which Jacobi sweeps stop.
const JACOBI_TOL: f64 = 1e-14;
/// Hard cap on Jacobi sweeps; convergence is quadratic and 3×3..6×6 inputs
/// settle in well under ten.
const JACOBI_MAX_SWEEPS: usize = 50;

/// General real 3×3 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat3 {
    e: [[f64; 3]; 3],
}

impl Mat3 {
    pub const ZERO: Mat3 = Mat3 { e: [[0.0; 3]; 3] };

    pub fn new(rows: [[f64; 3]; 3]) -> Self {
        Mat3 { e: rows }
    }

    pub fn identity() -> Self {
        Mat3::from_diag([1.0, 1.0, 1.0])
    }

    pub fn from_diag(d: [f64; 3]) -> Self {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            m.e[i][i] = d[i];
        }
        m
    }

    pub fn rows(&self) -> &[[f64; 3]; 3] {
        &self.e
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.e[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.e[i][j] = v;
    }

    pub fn transpose(&self) -> Mat3 {
        let mut t = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                t.e[j][i] = self.e[i][j];
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Mat3) -> Mat3 {
        let mut out = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += self.e[i][k] * rhs.e[k][j];
                }
                out.e[i][j] = s;
            }
        }
        out
    }

    pub fn add(&self, rhs: &Mat3) -> Mat3 {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.e[i][j] += rhs.e[i][j];
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Mat3) -> Mat3 {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.e[i][j] -= rhs.e[i][j];
            }
        }
        out
    }

    pub fn scale(&self, t: f64) -> Mat3 {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.e[i][j] *= t;
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        self.e[0][0] + self.e[1][1] + self.e[2][2]
    }

    pub fn det(&self) -> f64 {
        let m = &self.e;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Frobenius inner product tr(selfᵀ·rhs).
    pub fn dot(&self, rhs: &Mat3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.e[i][j] * rhs.e[i][j];
            }
        }
        s
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.e.iter().flatten().all(|v| v.is_finite())
    }

    /// Symmetric part ½(M + Mᵀ).
    pub fn symmetric_part(&self) -> Sym3 {
        Sym3 {
            d: [
                self.e[0][0],
                self.e[1][1],
                self.e[2][2],
                0.5 * (self.e[0][1] + self.e[1][0]),
                0.5 * (self.e[0][2] + self.e[2][0]),
                0.5 * (self.e[1][2] + self.e[2][1]),
            ],
        }
    }

    /// Distance to the symmetric part, max-abs over entries.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in (i + 1)..3 {
                worst = worst.max((self.e[i][j] - self.e[j][i]).abs());
            }
        }
        worst
    }
}

/// Symmetric 3×3 matrix. Storage keeps one copy of each entry, so the
/// symmetry invariant holds exactly by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sym3 {
    // [m00, m11, m22, m01, m02, m12]
    d: [f64; 6],
}

impl Serialize for Sym3 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut rows = [[0.0; 3]; 3];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.get(i, j);
            }
        }
        rows.serialize(serializer)
    }
}

impl Sym3 {
    pub const ZERO: Sym3 = Sym3 { d: [0.0; 6] };

    pub fn identity() -> Self {
        Sym3::from_diag([1.0, 1.0, 1.0])
    }

    pub fn from_diag(v: [f64; 3]) -> Self {
        Sym3 {
            d: [v[0], v[1], v[2], 0.0, 0.0, 0.0],
        }
    }

    /// Builds from the upper triangle of `rows`, ignoring the lower one.
    pub fn from_upper(rows: [[f64; 3]; 3]) -> Self {
        Sym3 {
            d: [
                rows[0][0], rows[1][1], rows[2][2], rows[0][1], rows[0][2], rows[1][2],
            ],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match (i.min(j), i.max(j)) {
            (0, 0) => self.d[0],
            (1, 1) => self.d[1],
            (2, 2) => self.d[2],
            (0, 1) => self.d[3],
            (0, 2) => self.d[4],
            (1, 2) => self.d[5],
            _ => panic!("Sym3 index out of range: ({i}, {j})"),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        match (i.min(j), i.max(j)) {
            (0, 0) => self.d[0] = v,
            (1, 1) => self.d[1] = v,
            (2, 2) => self.d[2] = v,
            (0, 1) => self.d[3] = v,
            (0, 2) => self.d[4] = v,
            (1, 2) => self.d[5] = v,
            _ => panic!("Sym3 index out of range: ({i}, {j})"),
        }
    }

    pub fn to_mat3(&self) -> Mat3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.set(i, j, self.get(i, j));
            }
        }
        m
    }

    pub fn trace(&self) -> f64 {
        self.d[0] + self.d[1] + self.d[2]
    }

    pub fn add(&self, rhs: &Sym3) -> Sym3 {
        let mut out = *self;
        for k in 0..6 {
            out.d[k] += rhs.d[k];
        }
        out
    }

    pub fn sub(&self, rhs: &Sym3) -> Sym3 {
        let mut out = *self;
        for k in 0..6 {
            out.d[k] -= rhs.d[k];
        }
        out
    }

    pub fn scale(&self, t: f64) -> Sym3 {
        let mut out = *self;
        for k in 0..6 {
            out.d[k] *= t;
        }
        out
    }

    /// Adds t·id.
    pub fn shift(&self, t: f64) -> Sym3 {
        let mut out = *self;
        out.d[0] += t;
        out.d[1] += t;
        out.d[2] += t;
        out
    }

    pub fn norm_sq(&self) -> f64 {
        self.to_mat3().norm_sq()
    }

    pub fn is_finite(&self) -> bool {
        self.d.iter().all(|v| v.is_finite())
    }
}

/// Adjugate (classical adjoint) from explicit 2×2 cofactors.
///
/// Satisfies adj(M)·M = M·adj(M) = det(M)·id for every M, including singular
/// ones; for invertible M it equals det(M)·M⁻¹.
pub fn adjugate3(m: &Mat3) -> Mat3 {
    let e = m.rows();
    let cof = |i: usize, j: usize| -> f64 {
        let r = [(i + 1) % 3, (i + 2) % 3];
        let c = [(j + 1) % 3, (j + 2) % 3];
        e[r[0]][c[0]] * e[r[1]][c[1]] - e[r[0]][c[1]] * e[r[1]][c[0]]
    };
    // adj = cofactor-matrix transposed; the cyclic index choice above absorbs
    // the (-1)^{i+j} signs.
    let mut out = Mat3::ZERO;
    for i in 0..3 {
        for j in 0..3 {
            out.set(j, i, cof(i, j));
        }
    }
    out
}

/// Eigendecomposition of a symmetric 3×3 matrix.
///
/// Returns eigenvalues in ascending order and a special-orthogonal frame whose
/// columns are the matching eigenvectors: frameᵀ·m·frame = diag(eigenvalues),
/// det(frame) = +1.
pub fn eigen_sym3(m: &Sym3) -> ([f64; 3], Mat3) {
    let a = [
        [m.get(0, 0), m.get(0, 1), m.get(0, 2)],
        [m.get(1, 0), m.get(1, 1), m.get(1, 2)],
        [m.get(2, 0), m.get(2, 1), m.get(2, 2)],
    ];
    let (vals, vecs) = jacobi_eigen(&a);
    let mut frame = Mat3::ZERO;
    for i in 0..3 {
        for j in 0..3 {
            frame.set(i, j, vecs[i][j]);
        }
    }
    // Orientation matters downstream; flip one column if the frame is a
    // reflection.
    if frame.det() < 0.0 {
        for i in 0..3 {
            frame.set(i, 2, -frame.get(i, 2));
        }
    }
    (vals, frame)
}

/// Singular values of a 3×3 matrix, ascending and nonnegative.
///
/// Their squares are the eigenvalues of mᵀm.
pub fn singular_values3(m: &Mat3) -> [f64; 3] {
    let mtm = m.transpose().mul(m).symmetric_part();
    let (vals, _) = eigen_sym3(&mtm);
    // mᵀm is positive semi-definite; tiny negative eigenvalues are roundoff
    let mut sv = [0.0; 3];
    for i in 0..3 {
        sv[i] = vals[i].max(0.0).sqrt();
    }
    sv
}

/// Cyclic Jacobi for small symmetric matrices (shared by the 3×3, 4×4 and
/// 6×6 paths). Returns ascending eigenvalues and an orthogonal matrix whose
/// columns are eigenvectors in the same order.
pub(crate) fn jacobi_eigen<const N: usize>(m: &[[f64; N]; N]) -> ([f64; N], [[f64; N]; N]) {
    let mut a = *m;
    let mut v = [[0.0; N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    let norm: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let stop = JACOBI_TOL * (1.0 + norm);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..N {
                for q in (p + 1)..N {
                    s += 2.0 * a[p][q] * a[p][q];
                }
            }
            s.sqrt()
        };
        if off <= stop {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                if a[p][q].abs() <= JACOBI_TOL * norm * f64::EPSILON {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..N {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut idx: [usize; N] = [0; N];
    for (i, slot) in idx.iter_mut().enumerate() {
        *slot = i;
    }
    idx.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());

    let mut vals = [0.0; N];
    let mut vecs = [[0.0; N]; N];
    for (dst, &src) in idx.iter().enumerate() {
        vals[dst] = a[src][src];
        for r in 0..N {
            vecs[r][dst] = v[r][src];
        }
    }
    (vals, vecs)
}
