//! The perspective map `ι`, which divides each homogeneous scene point
//! by its third coordinate, the closed-form diagonal that intertwines
//! `ι` with the restricted action, and a numerical verification of the
//! identity `g·ι(X)·d = ι(g·X)`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, ConfigMatrix, Tolerances};

/// A 4×n matrix whose third row is all ones: the image of `ι`, i.e. a
/// perspective view of a scene.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageMatrix {
    entries: DMatrix<f64>,
}

impl ImageMatrix {
    /// Wrap a matrix, checking shape, finiteness, and that the third
    /// row is exactly one.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != 4 || entries.ncols() < 4 {
            return Err(Error::InvalidInput(format!(
                "image matrices are 4xn with n >= 4, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        for j in 0..entries.ncols() {
            for i in 0..4 {
                if !entries[(i, j)].is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
            if entries[(2, j)] != 1.0 {
                return Err(Error::InvalidInput(format!(
                    "third row of an image matrix must be exactly 1, got {} at column {j}",
                    entries[(2, j)]
                )));
            }
        }
        Ok(Self { entries })
    }

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

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    /// Reinterpret the image as a configuration (every image is one:
    /// its third row is nonzero by construction).
    pub fn as_config(&self) -> ConfigMatrix {
        ConfigMatrix::new(self.entries.clone()).expect("an image matrix is a valid configuration")
    }
}

/// Perspective image formation: column `(x, y, z, t)` maps to
/// `(x/z, y/z, 1, t/z)`.
///
/// Errors with [`Error::FocalPlane`] if any third-row entry is within
/// `zero_tol` of zero — such a point lies in the focal plane and has no
/// perspective image. Idempotent: applying it to an image returns the
/// image unchanged.
pub fn iota(x: &ConfigMatrix, tol: &Tolerances) -> Result<ImageMatrix> {
    let m = x.matrix();
    let n = m.ncols();
    for j in 0..n {
        let z = m[(2, j)];
        if z.abs() <= tol.zero_tol {
            return Err(Error::FocalPlane { col: j, value: z });
        }
    }
    let mut out = DMatrix::zeros(4, n);
    for j in 0..n {
        let z = m[(2, j)];
        out[(0, j)] = m[(0, j)] / z;
        out[(1, j)] = m[(1, j)] / z;
        out[(2, j)] = 1.0;
        out[(3, j)] = m[(3, j)] / z;
    }
    ImageMatrix::new(out)
}

/// The unique diagonal making `g·ι(X)·d = ι(g·X)`:
/// `d_i = z_i / (g₃₁x_i + g₃₂y_i + g₃₃z_i + g₃₄t_i)`.
///
/// `g` must be affine (bottom row `(0,0,0,1)`), `X` must lie in `M̃`,
/// and the transformed scene must stay out of the focal plane — a
/// denominator within `zero_tol` of zero means `g·X` has no perspective
/// image and yields [`Error::DegenerateView`].
pub fn compatible_d(g: &DMatrix<f64>, x: &ConfigMatrix, tol: &Tolerances) -> Result<DVector<f64>> {
    check_affine(g)?;
    if !linalg::in_m_tilde(x, tol)? {
        return Err(Error::InvalidInput(
            "intertwining requires a configuration in M-tilde".into(),
        ));
    }
    let m = x.matrix();
    let n = m.ncols();
    let mut d = DVector::zeros(n);
    for j in 0..n {
        let denom = g[(2, 0)] * m[(0, j)]
            + g[(2, 1)] * m[(1, j)]
            + g[(2, 2)] * m[(2, j)]
            + g[(2, 3)] * m[(3, j)];
        if denom.abs() <= tol.zero_tol {
            return Err(Error::DegenerateView {
                col: j,
                value: denom,
            });
        }
        d[j] = m[(2, j)] / denom;
    }
    Ok(d)
}

fn check_affine(g: &DMatrix<f64>) -> Result<()> {
    if g.nrows() != 4 || g.ncols() != 4 {
        return Err(Error::InvalidInput(format!(
            "expected a 4x4 matrix, got {}x{}",
            g.nrows(),
            g.ncols()
        )));
    }
    let ok = g[(3, 0)] == 0.0 && g[(3, 1)] == 0.0 && g[(3, 2)] == 0.0 && g[(3, 3)] == 1.0;
    if !ok {
        return Err(Error::InvalidInput(
            "matrix is not affine: last row must be exactly (0, 0, 0, 1)".into(),
        ));
    }
    Ok(())
}

/// Outcome of checking `g·ι(X)·d = ι(g·X)` numerically.
#[derive(Debug, Clone, Serialize)]
pub struct IntertwiningReport {
    /// Relative Frobenius residual of the identity with the closed-form
    /// diagonal.
    pub residual: f64,
    /// True when the residual passes `residual_rel_tol` and every
    /// single-entry perturbation of the diagonal breaks the identity
    /// (the diagonal is unique).
    pub holds: bool,
}

/// Verify the intertwining identity for `(g, X)` with the closed-form
/// diagonal, and probe its uniqueness by perturbing each diagonal slot.
pub fn verify_intertwining(
    g: &DMatrix<f64>,
    x: &ConfigMatrix,
    tol: &Tolerances,
) -> Result<IntertwiningReport> {
    let d = compatible_d(g, x, tol)?;
    let image = iota(x, tol)?;
    let gx = ConfigMatrix::new(g * x.matrix())?;
    let target = iota(&gx, tol)?;

    let raw = g * image.matrix();
    let mut lhs = raw.clone();
    for (j, mut col) in lhs.column_iter_mut().enumerate() {
        col *= d[j];
    }
    let residual = (&lhs - target.matrix()).norm() / target.matrix().norm();

    let mut holds = residual <= tol.residual_rel_tol;
    if holds {
        // Uniqueness probe: bumping any one diagonal slot must visibly
        // change its column (the perturbed column differs in rows 1-3).
        let bump = 10.0 * tol.residual_rel_tol;
        for j in 0..d.len() {
            let perturbed = raw.column(j) * (d[j] + bump);
            let col_residual =
                (perturbed - target.matrix().column(j)).norm() / target.matrix().column(j).norm();
            if col_residual <= tol.residual_rel_tol {
                holds = false;
                break;
            }
        }
    }
    Ok(IntertwiningReport { residual, holds })
}
