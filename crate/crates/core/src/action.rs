//! The full and restricted group actions `A ↦ g·A·diag(d)` on
//! configuration matrices, together with the checks that separate them:
//! the scalar stabilizer that keeps the full action from being free, a
//! randomized falsification suite for freeness of the restricted action,
//! and a constructive witness that the full action is not proper.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, ConfigMatrix, Tolerances};
use crate::seeding::trial_seed;

/// A pair `(g, d)` with `g` in GL(4) and `d` the diagonal of an
/// invertible n×n diagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FullTransform {
    g: DMatrix<f64>,
    d: DVector<f64>,
}

impl FullTransform {
    /// Validating constructor: `g` must be an invertible 4×4 matrix and
    /// every diagonal entry of `d` must be bounded away from zero.
    pub fn new(g: DMatrix<f64>, d: DVector<f64>, tol: &Tolerances) -> Result<Self> {
        check_transform_parts(&g, &d, tol)?;
        Ok(Self { g, d })
    }

    /// The identity element for configurations with `n` columns.
    pub fn identity(n: usize) -> Self {
        Self {
            g: DMatrix::identity(4, 4),
            d: DVector::from_element(n, 1.0),
        }
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn d(&self) -> &DVector<f64> {
        &self.d
    }

    /// Group product `(g1, d1) ∘ (g2, d2) = (g1·g2, d1·d2)` with the
    /// diagonal parts multiplied componentwise.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.d.len() != other.d.len() {
            return Err(Error::InvalidInput(format!(
                "cannot compose transforms over {} and {} columns",
                self.d.len(),
                other.d.len()
            )));
        }
        Ok(Self {
            g: &self.g * &other.g,
            d: self.d.component_mul(&other.d),
        })
    }

    /// Group inverse `(g⁻¹, d⁻¹)`.
    pub fn inverse(&self) -> Result<Self> {
        let g_inv = self.g.clone().try_inverse().ok_or_else(|| {
            Error::InvalidInput("transform matrix is numerically singular".into())
        })?;
        Ok(Self {
            g: g_inv,
            d: self.d.map(|v| 1.0 / v),
        })
    }

    /// Max-norm distance from the identity over the entries of
    /// `(g - Id, d - ones)`.
    pub fn distance_to_identity(&self) -> f64 {
        let mut dist: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let id = if i == j { 1.0 } else { 0.0 };
                dist = dist.max((self.g[(i, j)] - id).abs());
            }
        }
        for v in self.d.iter() {
            dist = dist.max((v - 1.0).abs());
        }
        dist
    }
}

/// A transform whose matrix part is affine: the last row of `g` is
/// exactly `(0, 0, 0, 1)`. This is the group whose action on
/// configurations is free.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedTransform {
    inner: FullTransform,
}

impl RestrictedTransform {
    /// Validating constructor. Beyond the [`FullTransform`] invariants,
    /// the bottom row of `g` must equal `(0, 0, 0, 1)` exactly and the
    /// diagonal must have at least 4 entries.
    pub fn new(g: DMatrix<f64>, d: DVector<f64>, tol: &Tolerances) -> Result<Self> {
        if d.len() < 4 {
            return Err(Error::InvalidInput(format!(
                "restricted transforms act on n >= 4 columns, got {}",
                d.len()
            )));
        }
        if g.nrows() == 4 && g.ncols() == 4 {
            let row_ok =
                g[(3, 0)] == 0.0 && g[(3, 1)] == 0.0 && g[(3, 2)] == 0.0 && g[(3, 3)] == 1.0;
            if !row_ok {
                return Err(Error::InvalidInput(
                    "matrix part is not affine: last row must be exactly (0, 0, 0, 1)".into(),
                ));
            }
        }
        Ok(Self {
            inner: FullTransform::new(g, d, tol)?,
        })
    }

    /// Build from the free entries: the top three rows of `g` and the
    /// diagonal. The bottom row is pinned to `(0, 0, 0, 1)`.
    pub fn from_parts(top_rows: &[[f64; 4]; 3], d: DVector<f64>, tol: &Tolerances) -> Result<Self> {
        let mut g = DMatrix::zeros(4, 4);
        for (i, row) in top_rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                g[(i, j)] = v;
            }
        }
        g[(3, 3)] = 1.0;
        Self::new(g, d, tol)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: FullTransform::identity(n),
        }
    }

    pub fn as_full(&self) -> &FullTransform {
        &self.inner
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.inner.g
    }

    pub fn d(&self) -> &DVector<f64> {
        &self.inner.d
    }

    pub fn distance_to_identity(&self) -> f64 {
        self.inner.distance_to_identity()
    }

    /// Product of two restricted transforms. The affine constraint is
    /// preserved exactly: the bottom row of `g1·g2` is computed from
    /// exact zeros and ones.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let composed = self.inner.compose(&other.inner)?;
        Ok(Self { inner: composed })
    }

    /// Inverse with the affine constraint kept exact: the 3×3 linear
    /// block and translation column are inverted in block form instead
    /// of inverting the full 4×4 matrix.
    pub fn inverse(&self) -> Result<Self> {
        let g = &self.inner.g;
        let block = nalgebra::Matrix3::from_fn(|i, j| g[(i, j)]);
        let translation = nalgebra::Vector3::new(g[(0, 3)], g[(1, 3)], g[(2, 3)]);
        let block_inv = block.try_inverse().ok_or_else(|| {
            Error::InvalidInput("transform matrix is numerically singular".into())
        })?;
        let t_inv = -block_inv * translation;
        let mut g_inv = DMatrix::zeros(4, 4);
        for i in 0..3 {
            for j in 0..3 {
                g_inv[(i, j)] = block_inv[(i, j)];
            }
            g_inv[(i, 3)] = t_inv[i];
        }
        g_inv[(3, 3)] = 1.0;
        Ok(Self {
            inner: FullTransform {
                g: g_inv,
                d: self.inner.d.map(|v| 1.0 / v),
            },
        })
    }

    /// Draw a random restricted transform for `n` columns at max-norm
    /// distance at least `min_identity_distance` from the identity.
    ///
    /// Rejection keeps the draw usable downstream: diagonal entries and
    /// the matrix determinant stay above 1e-3 in magnitude and the
    /// matrix condition number below 1e4.
    pub fn sample<R: Rng>(
        rng: &mut R,
        n: usize,
        min_identity_distance: f64,
        tol: &Tolerances,
    ) -> Result<Self> {
        const ATTEMPTS: u32 = 10_000;
        for _ in 0..ATTEMPTS {
            let mut top = [[0.0; 4]; 3];
            for row in &mut top {
                for v in row.iter_mut() {
                    *v = rng.random_range(-1.0..=1.0);
                }
            }
            let mut d: DVector<f64> = DVector::from_fn(n, |_, _| rng.random_range(-1.0..=1.0));
            for v in d.iter_mut() {
                if (*v).abs() < 1e-3 {
                    *v = 1e-3_f64.copysign(*v + f64::MIN_POSITIVE);
                }
            }
            let Ok(candidate) = Self::from_parts(&top, d, tol) else {
                continue;
            };
            if candidate.distance_to_identity() < min_identity_distance {
                continue;
            }
            let sv = linalg::singular_values(candidate.g())?;
            if sv[3] / sv[0] < 1e-4 {
                continue;
            }
            return Ok(candidate);
        }
        Err(Error::SamplerFailure { attempts: ATTEMPTS })
    }
}

impl From<RestrictedTransform> for FullTransform {
    fn from(t: RestrictedTransform) -> Self {
        t.inner
    }
}

fn check_transform_parts(g: &DMatrix<f64>, d: &DVector<f64>, tol: &Tolerances) -> Result<()> {
    if g.nrows() != 4 || g.ncols() != 4 {
        return Err(Error::InvalidInput(format!(
            "matrix part must be 4x4, got {}x{}",
            g.nrows(),
            g.ncols()
        )));
    }
    for j in 0..4 {
        for i in 0..4 {
            if !g[(i, j)].is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    for (i, v) in d.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { row: 0, col: i });
        }
        if v.abs() <= tol.zero_tol {
            return Err(Error::InvalidInput(format!(
                "diagonal entry {i} is numerically zero ({v:.3e})"
            )));
        }
    }
    let det = g.determinant();
    if det.abs() <= tol.zero_tol {
        return Err(Error::InvalidInput(format!(
            "matrix part is numerically singular (det = {det:.3e})"
        )));
    }
    Ok(())
}

/// Apply the action: `act((g, d), A) = g · A · diag(d)`.
pub fn act(t: &FullTransform, a: &ConfigMatrix) -> Result<ConfigMatrix> {
    if t.d.len() != a.ncols() {
        return Err(Error::InvalidInput(format!(
            "transform is over {} columns but the configuration has {}",
            t.d.len(),
            a.ncols()
        )));
    }
    let mut out = &t.g * a.matrix();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col *= t.d[j];
    }
    ConfigMatrix::new(out)
}

/// Apply a restricted transform.
pub fn act_restricted(t: &RestrictedTransform, a: &ConfigMatrix) -> Result<ConfigMatrix> {
    act(t.as_full(), a)
}

/// The displayed 4×6 example configuration: an identity block followed
/// by the columns `(1,1,1,1)ᵀ` and `(1,2,3,5)ᵀ`.
pub fn example_configuration() -> ConfigMatrix {
    ConfigMatrix::from_row_slice(
        6,
        &[
            1.0, 0.0, 0.0, 0.0, 1.0, 1.0, //
            0.0, 1.0, 0.0, 0.0, 1.0, 2.0, //
            0.0, 0.0, 1.0, 0.0, 1.0, 3.0, //
            0.0, 0.0, 0.0, 1.0, 1.0, 5.0,
        ],
    )
    .expect("example configuration is well formed")
}

/// Check that `(λ·Id, λ⁻¹·ones)` fixes `A`.
///
/// This element is not the identity for λ ≠ 1 yet stabilizes every
/// configuration, which is exactly why the full action is not free.
pub fn scalar_stabilizer_check(lambda: f64, a: &ConfigMatrix, tol: &Tolerances) -> Result<bool> {
    if !lambda.is_finite() || lambda.abs() <= tol.zero_tol {
        return Err(Error::InvalidInput(format!(
            "scalar must be bounded away from zero, got {lambda:.3e}"
        )));
    }
    let n = a.ncols();
    let t = FullTransform::new(
        DMatrix::identity(4, 4) * lambda,
        DVector::from_element(n, 1.0 / lambda),
        tol,
    )?;
    let moved = act(&t, a)?;
    let diff = moved.matrix() - a.matrix();
    let scale = a.matrix().norm();
    let residual = if scale > 0.0 {
        diff.norm() / scale
    } else {
        diff.norm()
    };
    Ok(residual <= tol.residual_rel_tol)
}

/// Outcome of evaluating the printed diagonal-stabilizer example.
#[derive(Debug, Clone, Serialize)]
pub struct PrintedExampleReport {
    /// Whether `g·A·d = A` held within tolerance.
    pub holds: bool,
    /// Frobenius norm of `g·A·d - A`.
    pub residual: f64,
    /// 1-indexed columns where the identity fails.
    pub offending_columns: Vec<usize>,
}

/// Evaluate the printed example `g = diag(α,β,γ,δ)`,
/// `d = diag(α⁻¹,β⁻¹,γ⁻¹,δ⁻¹,1,1)` against the example configuration
/// and report whether `g·A·d = A`.
///
/// Direct expansion shows columns 5 and 6 of `g·A·d` equal
/// `(α,β,γ,δ)ᵀ` and `(α,2β,3γ,5δ)ᵀ`, so the identity can only hold when
/// all four parameters equal one; the report surfaces exactly where it
/// breaks otherwise.
pub fn printed_example_report(
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    tol: &Tolerances,
) -> Result<PrintedExampleReport> {
    for (name, v) in [
        ("alpha", alpha),
        ("beta", beta),
        ("gamma", gamma),
        ("delta", delta),
    ] {
        if !v.is_finite() || v == 0.0 {
            return Err(Error::InvalidInput(format!(
                "parameter {name} must be finite and nonzero, got {v}"
            )));
        }
    }
    let a = example_configuration();
    let g = DMatrix::from_diagonal(&DVector::from_vec(vec![alpha, beta, gamma, delta]));
    let d = DVector::from_vec(vec![
        1.0 / alpha,
        1.0 / beta,
        1.0 / gamma,
        1.0 / delta,
        1.0,
        1.0,
    ]);
    let t = FullTransform::new(g, d, tol)?;
    let moved = act(&t, &a)?;
    let diff = moved.matrix() - a.matrix();
    let residual = diff.norm();
    let scale = a.matrix().norm();
    let mut offending_columns = Vec::new();
    for j in 0..a.ncols() {
        if diff.column(j).norm() > tol.residual_rel_tol * scale {
            offending_columns.push(j + 1);
        }
    }
    Ok(PrintedExampleReport {
        holds: residual <= tol.residual_rel_tol * scale,
        residual,
        offending_columns,
    })
}

/// Outcome of the randomized freeness falsification suite.
#[derive(Debug, Clone, Serialize)]
pub struct FreeActionReport {
    /// True when every sampled non-identity transform moved `A`.
    pub all_moved: bool,
    /// Relative displacement of the sample that came closest to fixing
    /// `A`: the largest residual tolerance under which every sample
    /// still counts as moved.
    pub max_fixed_residual: f64,
}

/// Sample `trials` restricted transforms at max-norm distance at least
/// 0.1 from the identity and check that each one moves `A`.
///
/// Freeness of the restricted action means no sample may fix `A`;
/// moving is judged by relative Frobenius displacement against
/// `residual_rel_tol`. Per-trial seeds derive deterministically from
/// `seed`, so the outcome does not depend on evaluation order.
pub fn assert_free_restricted(
    a: &ConfigMatrix,
    trials: u32,
    seed: u64,
    tol: &Tolerances,
) -> Result<FreeActionReport> {
    if !linalg::in_m(a, tol)? {
        return Err(Error::InvalidInput(
            "freeness falsification requires a configuration in M".into(),
        ));
    }
    let scale = a.matrix().norm();
    let mut min_displacement = f64::INFINITY;
    let mut all_moved = true;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, trial as u64));
        let t = RestrictedTransform::sample(&mut rng, a.ncols(), 0.1, tol)?;
        let moved = act_restricted(&t, a)?;
        let displacement = (moved.matrix() - a.matrix()).norm() / scale;
        min_displacement = min_displacement.min(displacement);
        if displacement <= tol.residual_rel_tol {
            all_moved = false;
        }
    }
    Ok(FreeActionReport {
        all_moved,
        max_fixed_residual: min_displacement,
    })
}

/// Constructive output showing a group element that maps the compact
/// set `O(4) × {p}` back into itself.
#[derive(Debug, Clone)]
pub struct ProperWitness {
    /// Orthogonal matrix part of the witness configuration (the SVD
    /// factor `v` of `g`).
    pub k: DMatrix<f64>,
    /// The shared fixed unit vector.
    pub p: DVector<f64>,
    /// Diagonal compensation `(1/s₁, ..., 1/s₄, 1)`.
    pub d_prime: DVector<f64>,
    /// `g · [v | p] · diag(d_prime)`: four orthonormal columns followed
    /// by `p` itself.
    pub result: DMatrix<f64>,
}

/// Tolerance on the witness postconditions (orthonormality of the
/// result block and recovery of `p`).
pub const WITNESS_TOL: f64 = 1e-12;

/// Build the non-properness witness for an invertible `g` that fixes
/// the unit vector `p`.
///
/// With `g = u·s·vᵀ`, the configuration `[v | p]` lies in `O(4) × {p}`
/// and so does `g·[v|p]·diag(1/s₁,...,1/s₄, 1) = [u | p]`. Applying this
/// to the unbounded family `g_t = diag(t,1,1,1)` shows the set of group
/// elements returning `O(4) × {p}` to itself is not compact, so the full
/// action is not proper.
pub fn nonproper_witness(
    g: &DMatrix<f64>,
    p: &DVector<f64>,
    tol: &Tolerances,
) -> Result<ProperWitness> {
    if g.nrows() != 4 || g.ncols() != 4 {
        return Err(Error::InvalidInput(format!(
            "witness construction needs a 4x4 matrix, got {}x{}",
            g.nrows(),
            g.ncols()
        )));
    }
    if p.len() != 4 {
        return Err(Error::InvalidInput(format!(
            "fixed vector must have 4 entries, got {}",
            p.len()
        )));
    }
    for j in 0..4 {
        for i in 0..4 {
            if !g[(i, j)].is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    if (p.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "p must be a unit vector, got norm {:.12}",
            p.norm()
        )));
    }
    let fix_residual = (g * p - p).norm();
    if fix_residual > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "p must be fixed by g (eigenvalue 1): |g·p - p| = {fix_residual:.3e}"
        )));
    }

    let svd = crate::svd::thin_svd(g);
    let mut u = svd.u;
    let mut v = svd.v;
    let s = svd.singular_values;
    if s[3] <= tol.zero_tol {
        return Err(Error::InvalidInput(format!(
            "matrix is numerically singular (smallest singular value {:.3e})",
            s[3]
        )));
    }
    // Fix the SVD sign ambiguity so diagonal inputs reproduce identity
    // factors: make the dominant entry of each right-singular vector
    // positive, flipping the matching left column to keep g = u·s·vᵀ.
    for k in 0..4 {
        let col = v.column(k);
        let mut dominant = 0;
        for j in 1..4 {
            if col[j].abs() > col[dominant].abs() {
                dominant = j;
            }
        }
        if col[dominant] < 0.0 {
            v.column_mut(k).neg_mut();
            u.column_mut(k).neg_mut();
        }
    }

    let mut config = DMatrix::zeros(4, 5);
    config.view_mut((0, 0), (4, 4)).copy_from(&v);
    config.column_mut(4).copy_from(p);

    let d_prime = DVector::from_vec(vec![1.0 / s[0], 1.0 / s[1], 1.0 / s[2], 1.0 / s[3], 1.0]);

    let mut result = g * config.clone();
    for (j, mut col) in result.column_iter_mut().enumerate() {
        col *= d_prime[j];
    }

    let block = result.view((0, 0), (4, 4));
    let gram_residual = (block.transpose() * block - DMatrix::<f64>::identity(4, 4)).amax();
    let p_residual = (result.column(4) - p).norm();
    if gram_residual > WITNESS_TOL || p_residual > WITNESS_TOL {
        return Err(Error::Numerical(format!(
            "witness postcondition failed: orthonormality residual {gram_residual:.3e}, \
             p residual {p_residual:.3e}"
        )));
    }

    Ok(ProperWitness {
        k: v,
        p: p.clone(),
        d_prime,
        result,
    })
}
