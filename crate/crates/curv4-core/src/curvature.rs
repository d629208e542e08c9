//! Curvature operators of a four-dimensional metric in two representations:
//! the dense Riemann component tensor and the block form on the self-dual /
//! anti-self-dual splitting of the bivector space.
//!
//! Conventions, fixed once and validated by tests:
//! - `{eᵢ∧eⱼ : i<j}` is an orthonormal basis of Λ², and the operator acts with
//!   ⟨R(eᵢ∧eⱼ), eₖ∧eₗ⟩ = R_{ijkl}, so the round metric of curvature one has
//!   R_{1212} = +1.
//! - The self-dual basis is φₖ = (eᵢ∧eⱼ + ⋆)/√2 and the anti-self-dual basis
//!   ψₖ = (eᵢ∧eⱼ − ⋆)/√2 over the pairs (12), (13), (14), with (e₁,…,e₄)
//!   positively oriented. In this basis the operator is [[A, B], [Bᵀ, C]].
//! - In particular B₁₁ = ½(R₁₂₁₂ − R₃₄₃₄), and the traceless Ricci tensor is
//!   recovered from B entrywise (see [`traceless_ricci_matrix`]).

use crate::error::{CurvError, Result};
use crate::mat3::{eigen_sym3, jacobi_eigen, singular_values3, Mat3, Sym3};

/// Input-validation tolerance: loose enough for hand-entered decimals, tight
/// enough to catch transposition mistakes.
pub const INPUT_TOL: f64 = 1e-9;

/// Index pairs of the ordered bivector basis (0-based).
const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Columns of the w → (φ, ψ) change of basis with the 1/√2 normalization
/// factored out: the true orthogonal change of basis is T₀/√2, so conjugation
/// is T₀·(·)·T₀ᵀ scaled by ½. Working with the integer matrix keeps dyadic
/// inputs (all catalog fixtures) bit-exact through the conversion.
/// Entry [w][col], columns ordered (φ₁, φ₂, φ₃, ψ₁, ψ₂, ψ₃); the signs
/// encode e₄∧e₂ = −e₂∧e₄.
fn basis_change_unnormalized() -> [[f64; 6]; 6] {
    let mut t = [[0.0; 6]; 6];
    // φ₁ = (w12 + w34)/√2   ψ₁ = (w12 − w34)/√2
    t[0][0] = 1.0;
    t[5][0] = 1.0;
    t[0][3] = 1.0;
    t[5][3] = -1.0;
    // φ₂ = (w13 − w24)/√2   ψ₂ = (w13 + w24)/√2
    t[1][1] = 1.0;
    t[4][1] = -1.0;
    t[1][4] = 1.0;
    t[4][4] = 1.0;
    // φ₃ = (w14 + w23)/√2   ψ₃ = (w14 − w23)/√2
    t[2][2] = 1.0;
    t[3][2] = 1.0;
    t[2][5] = 1.0;
    t[3][5] = -1.0;
    t
}

fn mat6_mul(a: &[[f64; 6]; 6], b: &[[f64; 6]; 6]) -> [[f64; 6]; 6] {
    let mut out = [[0.0; 6]; 6];
    for i in 0..6 {
        for j in 0..6 {
            let mut s = 0.0;
            for k in 0..6 {
                s += a[i][k] * b[k][j];
            }
            out[i][j] = s;
        }
    }
    out
}

fn mat6_transpose(a: &[[f64; 6]; 6]) -> [[f64; 6]; 6] {
    let mut out = [[0.0; 6]; 6];
    for i in 0..6 {
        for j in 0..6 {
            out[j][i] = a[i][j];
        }
    }
    out
}

/// Frobenius inner product of 6×6 matrices.
pub(crate) fn mat6_dot(a: &[[f64; 6]; 6], b: &[[f64; 6]; 6]) -> f64 {
    let mut s = 0.0;
    for i in 0..6 {
        for j in 0..6 {
            s += a[i][j] * b[i][j];
        }
    }
    s
}

/// Largest absolute eigenvalue of a symmetric 6×6 matrix.
pub(crate) fn mat6_operator_norm(a: &[[f64; 6]; 6]) -> f64 {
    let (vals, _) = jacobi_eigen(a);
    vals.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Dense Riemann curvature tensor of a 4-manifold point, all 256 components.
///
/// Constructors enforce the algebraic symmetries (antisymmetry in each index
/// pair, pair exchange) by symmetrizing, and reject inputs whose symmetry or
/// first-Bianchi residual exceeds [`INPUT_TOL`] relative to scale.
#[derive(Clone, Debug)]
pub struct RiemannTensor {
    c: Box<[f64; 256]>,
}

#[inline]
fn idx(i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * 4 + j) * 4 + k) * 4 + l
}

impl RiemannTensor {
    /// Builds from a dense component array indexed by `[i][j][k][l]`
    /// (0-based), symmetrizing over the algebraic symmetry group.
    pub fn from_dense(raw: &[f64; 256]) -> Result<Self> {
        let scale = 1.0 + raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !raw.iter().all(|v| v.is_finite()) {
            return Err(CurvError::invalid("Riemann components must be finite"));
        }
        let mut sym = Box::new([0.0; 256]);
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let v = (raw[idx(i, j, k, l)] - raw[idx(j, i, k, l)]
                            + raw[idx(j, i, l, k)]
                            - raw[idx(i, j, l, k)]
                            + raw[idx(k, l, i, j)]
                            - raw[idx(l, k, i, j)]
                            + raw[idx(l, k, j, i)]
                            - raw[idx(k, l, j, i)])
                            / 8.0;
                        worst = worst.max((v - raw[idx(i, j, k, l)]).abs());
                        sym[idx(i, j, k, l)] = v;
                    }
                }
            }
        }
        if worst > INPUT_TOL * scale {
            return Err(CurvError::invalid(format!(
                "Riemann symmetry violation {worst:.3e} exceeds {:.1e} relative tolerance",
                INPUT_TOL
            )));
        }
        let t = RiemannTensor { c: sym };
        let bianchi = t.bianchi_residual();
        if bianchi > INPUT_TOL * scale {
            return Err(CurvError::invalid(format!(
                "first Bianchi identity violated: residual {bianchi:.3e}"
            )));
        }
        Ok(t)
    }

    /// Builds from a sparse component list with 1-based indices; components
    /// not listed are completed by symmetry, and listing the same component
    /// twice (directly or through a symmetry image) with inconsistent values
    /// is an error.
    pub fn from_components(entries: &[([usize; 4], f64)]) -> Result<Self> {
        let mut c = Box::new([0.0f64; 256]);
        let mut set = [false; 256];
        for &(ijkl, value) in entries {
            if !value.is_finite() {
                return Err(CurvError::invalid("Riemann component must be finite"));
            }
            let [i1, j1, k1, l1] = ijkl;
            for v in ijkl {
                if !(1..=4).contains(&v) {
                    return Err(CurvError::invalid(format!(
                        "index {v} out of range 1..=4 in component {ijkl:?}"
                    )));
                }
            }
            let (i, j, k, l) = (i1 - 1, j1 - 1, k1 - 1, l1 - 1);
            if (i == j || k == l) && value != 0.0 {
                return Err(CurvError::invalid(format!(
                    "component {ijkl:?} must vanish by antisymmetry"
                )));
            }
            // all eight symmetry images of the entry
            let images = [
                (i, j, k, l, 1.0),
                (j, i, k, l, -1.0),
                (i, j, l, k, -1.0),
                (j, i, l, k, 1.0),
                (k, l, i, j, 1.0),
                (l, k, i, j, -1.0),
                (k, l, j, i, -1.0),
                (l, k, j, i, 1.0),
            ];
            for (a, b, d, e, sign) in images {
                let p = idx(a, b, d, e);
                let v = sign * value;
                if set[p] && (c[p] - v).abs() > 1e-12 * (1.0 + v.abs()) {
                    return Err(CurvError::invalid(format!(
                        "conflicting duplicate for component ({},{},{},{}): {} vs {}",
                        a + 1,
                        b + 1,
                        d + 1,
                        e + 1,
                        c[p],
                        v
                    )));
                }
                c[p] = v;
                set[p] = true;
            }
        }
        let t = RiemannTensor { c };
        let scale = 1.0 + t.max_abs();
        let bianchi = t.bianchi_residual();
        if bianchi > INPUT_TOL * scale {
            return Err(CurvError::invalid(format!(
                "first Bianchi identity violated: residual {bianchi:.3e}"
            )));
        }
        Ok(t)
    }

    /// Internal constructor for components already known to be symmetric.
    pub(crate) fn from_dense_unchecked(c: Box<[f64; 256]>) -> Self {
        RiemannTensor { c }
    }

    /// Component R_{ijkl}, 0-based indices.
    pub fn component(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.c[idx(i, j, k, l)]
    }

    /// Sparse view: the components with i<j, k<l, (i,j) ≤ (k,l), nonzero.
    pub fn canonical_components(&self) -> Vec<([usize; 4], f64)> {
        let mut out = Vec::new();
        for (p, &(i, j)) in PAIRS.iter().enumerate() {
            for &(k, l) in PAIRS.iter().skip(p) {
                let v = self.component(i, j, k, l);
                if v != 0.0 {
                    out.push(([i + 1, j + 1, k + 1, l + 1], v));
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Σ over all index quadruples of R_{ijkl}².
    pub fn component_norm_sq(&self) -> f64 {
        self.c.iter().map(|v| v * v).sum()
    }

    /// Worst |R_{ijkl} + R_{iklj} + R_{iljk}| over all quadruples.
    pub fn bianchi_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let s = self.component(i, j, k, l)
                            + self.component(i, k, l, j)
                            + self.component(i, l, j, k);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Ricci contraction R_{jl} = Σᵢ R_{ijil}.
    pub fn ricci(&self) -> [[f64; 4]; 4] {
        let mut ric = [[0.0; 4]; 4];
        for j in 0..4 {
            for l in 0..4 {
                let mut s = 0.0;
                for i in 0..4 {
                    s += self.component(i, j, i, l);
                }
                ric[j][l] = s;
            }
        }
        ric
    }

    /// The operator on Λ² in the ordered bivector basis.
    fn operator_matrix(&self) -> [[f64; 6]; 6] {
        let mut m = [[0.0; 6]; 6];
        for (p, &(i, j)) in PAIRS.iter().enumerate() {
            for (q, &(k, l)) in PAIRS.iter().enumerate() {
                m[p][q] = self.component(i, j, k, l);
            }
        }
        m
    }
}

/// Curvature operator in block form on Λ₊ ⊕ Λ₋.
///
/// `a` and `c` act on the self-dual and anti-self-dual parts; `b` is the
/// mixed block (the traceless Ricci curvature in disguise). The first Bianchi
/// identity forces tr A = tr C = S/4; [`CurvatureBlocks::new`] checks it.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct CurvatureBlocks {
    #[serde(rename = "A")]
    pub a: Sym3,
    #[serde(rename = "B")]
    pub b: Mat3,
    #[serde(rename = "C")]
    pub c: Sym3,
}

impl CurvatureBlocks {
    pub const ZERO: CurvatureBlocks = CurvatureBlocks {
        a: Sym3::ZERO,
        b: Mat3::ZERO,
        c: Sym3::ZERO,
    };

    /// Validating constructor: finite entries and tr A = tr C within
    /// [`INPUT_TOL`] relative tolerance.
    pub fn new(a: Sym3, b: Mat3, c: Sym3) -> Result<Self> {
        let blocks = CurvatureBlocks { a, b, c };
        blocks.validate()?;
        Ok(blocks)
    }

    /// Constructor for internally-produced values whose invariants hold by
    /// construction (or deliberately do not, e.g. sharp-operator blocks).
    pub fn from_parts(a: Sym3, b: Mat3, c: Sym3) -> Self {
        CurvatureBlocks { a, b, c }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite() && self.c.is_finite()) {
            return Err(CurvError::invalid("curvature blocks must be finite"));
        }
        let (ta, tc) = (self.a.trace(), self.c.trace());
        if (ta - tc).abs() > INPUT_TOL * (1.0 + ta.abs()) {
            return Err(CurvError::invalid(format!(
                "trace identity violated: tr A = {ta}, tr C = {tc}"
            )));
        }
        Ok(())
    }

    pub fn trace_gap(&self) -> f64 {
        (self.a.trace() - self.c.trace()).abs()
    }

    /// Scalar curvature S = 4 tr A.
    pub fn scalar_curvature(&self) -> f64 {
        4.0 * self.a.trace()
    }

    /// ⟨R, R⟩ = tr A² + tr C² + 2|B|², the Frobenius square of the assembled
    /// operator.
    pub fn frobenius_sq(&self) -> f64 {
        self.a.norm_sq() + self.c.norm_sq() + 2.0 * self.b.norm_sq()
    }

    pub fn frobenius(&self) -> f64 {
        self.frobenius_sq().sqrt()
    }

    /// Largest absolute eigenvalue of the assembled operator.
    pub fn operator_norm(&self) -> f64 {
        mat6_operator_norm(&self.assemble6())
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite()
    }

    /// The symmetric 6×6 matrix [[A, B], [Bᵀ, C]].
    pub fn assemble6(&self) -> [[f64; 6]; 6] {
        let mut m = [[0.0; 6]; 6];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.a.get(i, j);
                m[i][3 + j] = self.b.get(i, j);
                m[3 + i][j] = self.b.get(j, i);
                m[3 + i][3 + j] = self.c.get(i, j);
            }
        }
        m
    }

    /// Inverse of [`Self::assemble6`]; off-diagonal blocks are averaged.
    pub fn from_assembled6(m: &[[f64; 6]; 6]) -> Self {
        let mut a = Sym3::ZERO;
        let mut b = Mat3::ZERO;
        let mut c = Sym3::ZERO;
        for i in 0..3 {
            for j in i..3 {
                a.set(i, j, 0.5 * (m[i][j] + m[j][i]));
                c.set(i, j, 0.5 * (m[3 + i][3 + j] + m[3 + j][3 + i]));
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                b.set(i, j, 0.5 * (m[i][3 + j] + m[3 + j][i]));
            }
        }
        CurvatureBlocks { a, b, c }
    }

    pub fn scale(&self, t: f64) -> Self {
        CurvatureBlocks {
            a: self.a.scale(t),
            b: self.b.scale(t),
            c: self.c.scale(t),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        CurvatureBlocks {
            a: self.a.add(&rhs.a),
            b: self.b.add(&rhs.b),
            c: self.c.add(&rhs.c),
        }
    }

    /// self + t · rhs
    pub fn axpy(&self, t: f64, rhs: &Self) -> Self {
        self.add(&rhs.scale(t))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.axpy(-1.0, rhs)
    }

    /// Reversing the orientation of the underlying basis swaps the self-dual
    /// and anti-self-dual parts: (A, B, C) ↦ (C, Bᵀ, A). Exposed as a utility
    /// and never applied silently.
    pub fn orientation_flip(&self) -> Self {
        CurvatureBlocks {
            a: self.c,
            b: self.b.transpose(),
            c: self.a,
        }
    }
}

/// Eigen/singular data extracted from one curvature operator.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct SpectralData {
    /// Eigenvalues of A, ascending.
    pub a_eigs: [f64; 3],
    /// Eigenvalues of C, ascending.
    pub c_eigs: [f64; 3],
    /// Singular values of B, ascending and nonnegative.
    pub b_sv: [f64; 3],
    /// Scalar curvature S = 4 tr A.
    pub s: f64,
    /// |Ric|² = S²/4 + |Ric₀|².
    pub sigma2: f64,
    /// |Ric₀|² = Σ λᵢ².
    pub tsigma2: f64,
    /// Eigenvalues of the traceless Ricci tensor, ascending.
    pub lambda: [f64; 4],
}

/// The traceless Ricci tensor reconstructed entrywise from the mixed block.
pub fn traceless_ricci_matrix(b: &Mat3) -> [[f64; 4]; 4] {
    let e = |i: usize, j: usize| b.get(i, j);
    [
        [
            e(0, 0) + e(1, 1) + e(2, 2),
            e(2, 1) - e(1, 2),
            e(0, 2) - e(2, 0),
            e(1, 0) - e(0, 1),
        ],
        [
            e(2, 1) - e(1, 2),
            e(0, 0) - e(1, 1) - e(2, 2),
            e(1, 0) + e(0, 1),
            e(0, 2) + e(2, 0),
        ],
        [
            e(0, 2) - e(2, 0),
            e(1, 0) + e(0, 1),
            e(1, 1) - e(0, 0) - e(2, 2),
            e(1, 2) + e(2, 1),
        ],
        [
            e(1, 0) - e(0, 1),
            e(0, 2) + e(2, 0),
            e(1, 2) + e(2, 1),
            e(2, 2) - e(0, 0) - e(1, 1),
        ],
    ]
}

/// Eigenvalues of the traceless Ricci tensor of `b`, ascending.
pub fn ricci0_eigenvalues(b: &CurvatureBlocks) -> [f64; 4] {
    let (vals, _) = jacobi_eigen(&traceless_ricci_matrix(&b.b));
    vals
}

/// Full spectral extraction: block eigenvalues, singular values of the mixed
/// block, scalar curvature and the traceless-Ricci spectrum.
pub fn ricci_data(b: &CurvatureBlocks) -> SpectralData {
    let (a_eigs, _) = eigen_sym3(&b.a);
    let (c_eigs, _) = eigen_sym3(&b.c);
    let b_sv = singular_values3(&b.b);
    let lambda = ricci0_eigenvalues(b);
    let s = b.scalar_curvature();
    let tsigma2 = lambda.iter().map(|l| l * l).sum();
    SpectralData {
        a_eigs,
        c_eigs,
        b_sv,
        s,
        sigma2: s * s / 4.0 + tsigma2,
        tsigma2,
        lambda,
    }
}

/// Traceless parts of the diagonal blocks: the self-dual and anti-self-dual
/// Weyl curvature.
pub fn weyl_parts(b: &CurvatureBlocks) -> (Sym3, Sym3) {
    (
        b.a.shift(-b.a.trace() / 3.0),
        b.c.shift(-b.c.trace() / 3.0),
    )
}

/// Block form of a Riemann tensor.
pub fn blocks_from_riemann(r: &RiemannTensor) -> CurvatureBlocks {
    let t = basis_change_unnormalized();
    let mut m = mat6_mul(&mat6_transpose(&t), &mat6_mul(&r.operator_matrix(), &t));
    for row in m.iter_mut() {
        for v in row.iter_mut() {
            *v *= 0.5;
        }
    }
    CurvatureBlocks::from_assembled6(&m)
}

/// Riemann tensor of a block operator. Fails if the trace identity (first
/// Bianchi) is violated beyond the input tolerance, since the result could
/// not be a curvature tensor.
pub fn riemann_from_blocks(b: &CurvatureBlocks) -> Result<RiemannTensor> {
    b.validate()?;
    let t = basis_change_unnormalized();
    let m = mat6_mul(&t, &mat6_mul(&b.assemble6(), &mat6_transpose(&t)));
    let mut c = Box::new([0.0f64; 256]);
    for (p, &(i, j)) in PAIRS.iter().enumerate() {
        for (q, &(k, l)) in PAIRS.iter().enumerate() {
            let v = 0.25 * (m[p][q] + m[q][p]);
            c[idx(i, j, k, l)] = v;
            c[idx(j, i, k, l)] = -v;
            c[idx(i, j, l, k)] = -v;
            c[idx(j, i, l, k)] = v;
        }
    }
    Ok(RiemannTensor::from_dense_unchecked(c))
}

/// Simultaneous diagonalization of the diagonal blocks.
///
/// Returns blocks with A and C diagonal ascending together with the
/// special-orthogonal frames used: d.A = O₊ᵀ A O₊, d.C = O₋ᵀ C O₋,
/// d.B = O₊ᵀ B O₋.
pub fn diagonalize(b: &CurvatureBlocks) -> (CurvatureBlocks, Mat3, Mat3) {
    let (a_eigs, o_plus) = eigen_sym3(&b.a);
    let (c_eigs, o_minus) = eigen_sym3(&b.c);
    let d = CurvatureBlocks {
        a: Sym3::from_diag(a_eigs),
        b: o_plus.transpose().mul(&b.b).mul(&o_minus),
        c: Sym3::from_diag(c_eigs),
    };
    (d, o_plus, o_minus)
}
