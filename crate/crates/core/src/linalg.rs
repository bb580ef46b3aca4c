//! Dense 4×n configuration matrices, tolerance-based numerical rank,
//! and the membership predicates for the configuration classes `M`
//! (full rank, zero-free fourth row) and `M̃` (additionally zero-free
//! third row).

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Maximum column count accepted by the samplers.
pub const MAX_SAMPLER_COLS: usize = 10_000;

/// Maximum rejection-sampling attempts before giving up.
const MAX_SAMPLER_ATTEMPTS: u32 = 10_000;

/// Numerical tolerances used by every predicate and decision in the
/// crate.
///
/// * `rank_rel_tol` — relative singular-value cutoff for numerical rank;
/// * `residual_rel_tol` — relative residual bound for linear-system and
///   identity checks;
/// * `zero_tol` — absolute threshold below which an entry counts as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rank_rel_tol: f64,
    pub residual_rel_tol: f64,
    pub zero_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_rel_tol: 1e-9,
            residual_rel_tol: 1e-8,
            zero_tol: 1e-12,
        }
    }
}

impl Tolerances {
    /// Validating constructor: all thresholds strictly positive and
    /// `rank_rel_tol < 1`.
    pub fn new(rank_rel_tol: f64, residual_rel_tol: f64, zero_tol: f64) -> Result<Self> {
        let all_positive =
            rank_rel_tol > 0.0 && residual_rel_tol > 0.0 && zero_tol > 0.0;
        if !all_positive || !rank_rel_tol.is_finite() || rank_rel_tol >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "tolerances must be strictly positive with rank_rel_tol < 1, \
                 got rank={rank_rel_tol}, residual={residual_rel_tol}, zero={zero_tol}"
            )));
        }
        Ok(Self {
            rank_rel_tol,
            residual_rel_tol,
            zero_tol,
        })
    }
}

/// Configuration class requested from [`random_config`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigClass {
    /// Rank 4 with zero-free fourth row.
    M,
    /// `M` with a zero-free third row as well (no point in the focal plane).
    MTilde,
    /// `MTilde` with the fourth row forced to all ones (scene points with
    /// unit fourth coordinate, the convention that makes projection
    /// invertible).
    TOnes,
}

/// A 4×n matrix of homogeneous scene points; each column is
/// `(x_i, y_i, z_i, t_i)`.
///
/// Invariants enforced at construction: exactly 4 rows, at least 4
/// columns, all entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigMatrix {
    entries: DMatrix<f64>,
}

impl ConfigMatrix {
    /// Wrap a matrix, checking the class invariants.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != 4 {
            return Err(Error::InvalidInput(format!(
                "configuration matrices have exactly 4 rows, got {}",
                entries.nrows()
            )));
        }
        if entries.ncols() < 4 {
            return Err(Error::InvalidInput(format!(
                "configuration matrices need at least 4 columns, got {}",
                entries.ncols()
            )));
        }
        check_finite(&entries)?;
        Ok(Self { entries })
    }

    /// Build from a row-major slice of `4 * cols` entries.
    pub fn from_row_slice(cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != 4 * cols {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a 4x{} matrix, got {}",
                4 * cols,
                cols,
                data.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(4, cols, data))
    }

    /// Number of scene points (columns).
    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }
}

fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Descending singular values of `m`.
///
/// Errors on non-finite entries; otherwise the Jacobi SVD of a finite
/// dense matrix always succeeds.
pub fn singular_values(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_finite(m)?;
    Ok(crate::svd::singular_values(m))
}

/// Numerical rank: the number of singular values exceeding
/// `rank_rel_tol * sigma_max`. The zero matrix has rank 0.
pub fn numerical_rank(m: &DMatrix<f64>, tol: &Tolerances) -> Result<usize> {
    let sv = singular_values(m)?;
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return Ok(0);
    }
    let cutoff = tol.rank_rel_tol * sigma_max;
    Ok(sv.iter().filter(|&&s| s > cutoff).count())
}

/// Membership in `M`: numerical rank 4 and every fourth-row entry
/// bounded away from zero.
pub fn in_m(a: &ConfigMatrix, tol: &Tolerances) -> Result<bool> {
    let m = a.matrix();
    let fourth_row_ok = (0..m.ncols()).all(|j| m[(3, j)].abs() > tol.zero_tol);
    if !fourth_row_ok {
        return Ok(false);
    }
    Ok(numerical_rank(m, tol)? == 4)
}

/// Membership in `M̃`: in `M` and every third-row entry bounded away
/// from zero, so no point lies in the focal plane.
pub fn in_m_tilde(a: &ConfigMatrix, tol: &Tolerances) -> Result<bool> {
    let m = a.matrix();
    let third_row_ok = (0..m.ncols()).all(|j| m[(2, j)].abs() > tol.zero_tol);
    if !third_row_ok {
        return Ok(false);
    }
    in_m(a, tol)
}

/// Deterministic rejection sampler for configurations in a requested
/// class.
///
/// Entries are drawn i.i.d. uniform on [-1, 1] and the draw is rejected
/// until the class predicate holds with margin: row entries that must be
/// nonzero exceed `10 * zero_tol` in magnitude and the spectrum satisfies
/// `sigma_4 / sigma_1 > 10 * rank_rel_tol`. Class [`ConfigClass::TOnes`]
/// forces the fourth row to all ones after each draw.
pub fn random_config(
    n: usize,
    seed: u64,
    class: ConfigClass,
    tol: &Tolerances,
) -> Result<ConfigMatrix> {
    if n < 4 {
        return Err(Error::InvalidInput(format!(
            "need at least 4 points, got {n}"
        )));
    }
    if n > MAX_SAMPLER_COLS {
        return Err(Error::InvalidInput(format!(
            "sampler capped at {MAX_SAMPLER_COLS} columns, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_SAMPLER_ATTEMPTS {
        let mut m = DMatrix::from_fn(4, n, |_, _| rng.random_range(-1.0..=1.0));
        if class == ConfigClass::TOnes {
            for j in 0..n {
                m[(3, j)] = 1.0;
            }
        }
        if config_has_margin(&m, class, tol) {
            return Ok(ConfigMatrix { entries: m });
        }
    }
    Err(Error::SamplerFailure {
        attempts: MAX_SAMPLER_ATTEMPTS,
    })
}

fn config_has_margin(m: &DMatrix<f64>, class: ConfigClass, tol: &Tolerances) -> bool {
    let row_margin = 10.0 * tol.zero_tol;
    let fourth_ok = (0..m.ncols()).all(|j| m[(3, j)].abs() > row_margin);
    if !fourth_ok {
        return false;
    }
    if matches!(class, ConfigClass::MTilde | ConfigClass::TOnes) {
        let third_ok = (0..m.ncols()).all(|j| m[(2, j)].abs() > row_margin);
        if !third_ok {
            return false;
        }
    }
    let sv = crate::svd::singular_values(m);
    sv[0] > 0.0 && sv[3] / sv[0] > 10.0 * tol.rank_rel_tol
}
