use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::SymMatrix;
use crate::error::{Error, Result};

/// Relative threshold below which a spectral gap counts as zero.
pub const GAP_TOL: f64 = 1e-12;
const UNIT_TOL: f64 = 1e-10;

/// Descending eigenvalues with matching orthonormal eigenvectors (stored as
/// the columns of `eigenvectors`).
#[derive(Clone, Debug)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn of(a: &SymMatrix) -> Result<Self> {
        let d = a.dim();
        let eig = SymmetricEigen::try_new(a.as_dmatrix().clone(), f64::EPSILON, 1000 * d.max(30))
            .ok_or(Error::NonConvergence)?;
        if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonConvergence);
        }
        let mut order: Vec<usize> = (0..d).collect();
        // stable: ties keep solver order
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let eigenvectors = DMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(Spectrum {
            eigenvalues,
            eigenvectors,
        })
    }

    /// Builds a spectrum from descending eigenvalues and an orthonormal basis.
    pub fn from_parts(eigenvalues: Vec<f64>, eigenvectors: DMatrix<f64>) -> Result<Self> {
        let d = eigenvalues.len();
        if d == 0 {
            return Err(Error::invalid("eigenvalues", "must be nonempty"));
        }
        if eigenvectors.nrows() != d || eigenvectors.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: eigenvectors.ncols(),
            });
        }
        if eigenvalues.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("eigenvalues", "must be sorted in descending order"));
        }
        let gram = eigenvectors.transpose() * &eigenvectors;
        let dev = (gram - DMatrix::<f64>::identity(d, d)).amax();
        if dev > 1e-8 * d as f64 {
            return Err(Error::invalid("eigenvectors", format!("not orthonormal (deviation {dev:e})")));
        }
        Ok(Spectrum {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn vector(&self, j: usize) -> DVector<f64> {
        self.eigenvectors.column(j).into_owned()
    }

    /// `Σ_j λ_j u_j u_jᵀ`.
    pub fn reconstruct(&self) -> SymMatrix {
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |r, c| {
            self.eigenvectors[(r, c)] * self.eigenvalues[c]
        });
        SymMatrix::symmetrize_upper(scaled * self.eigenvectors.transpose())
    }

    /// Applies `f` to the eigenvalues: `Σ_j f(λ_j) u_j u_jᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.weighted(&weights)
    }

    pub(crate) fn weighted(&self, weights: &[f64]) -> SymMatrix {
        let d = self.dim();
        let scaled = DMatrix::from_fn(d, d, |r, c| self.eigenvectors[(r, c)] * weights[c]);
        SymMatrix::symmetrize_upper(scaled * self.eigenvectors.transpose())
    }

    fn scale(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }
}

/// Spectral gap `g_j` (0-based `j`): one-sided at both ends, the smaller
/// neighbouring distance in the interior.
pub fn spectral_gap(s: &Spectrum, j: usize) -> Result<f64> {
    let ev = s.eigenvalues();
    let d = ev.len();
    if j >= d {
        return Err(Error::invalid("j", format!("index {j} out of range for dimension {d}")));
    }
    let gap = if d == 1 {
        0.0
    } else if j == 0 {
        ev[0] - ev[1]
    } else if j == d - 1 {
        ev[d - 2] - ev[d - 1]
    } else {
        (ev[j - 1] - ev[j]).min(ev[j] - ev[j + 1])
    };
    if gap <= GAP_TOL * s.scale() || gap <= 0.0 {
        return Err(Error::GapDegenerate { index: j, gap });
    }
    Ok(gap)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeRank {
    pub gap: f64,
    /// `r_j = Σ_{i≠j} λ_i/|λ_i−λ_j| + λ_j/g_j`.
    pub rank: f64,
    /// `max_{i≠j} λ_i/|λ_i−λ_j| ∨ λ_j/g_j`, which equals `‖T_j Σ T_j‖` for PSD Σ.
    pub max_ratio: f64,
}

pub fn relative_rank(s: &Spectrum, j: usize) -> Result<RelativeRank> {
    let gap = spectral_gap(s, j)?;
    let ev = s.eigenvalues();
    let lj = ev[j];
    let mut rank = lj / gap;
    let mut max_ratio = lj / gap;
    for (i, &li) in ev.iter().enumerate() {
        if i != j {
            let ratio = li / (li - lj).abs();
            rank += ratio;
            max_ratio = max_ratio.max(ratio);
        }
    }
    Ok(RelativeRank {
        gap,
        rank,
        max_ratio,
    })
}

/// `T_j = Σ_{i≠j} |λ_i−λ_j|^{-1/2} u_i u_iᵀ + g_j^{-1/2} u_j u_jᵀ`.
pub fn tj_operator(s: &Spectrum, j: usize) -> Result<SymMatrix> {
    let gap = spectral_gap(s, j)?;
    let lj = s.eigenvalues()[j];
    let weights: Vec<f64> = s
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(i, &li)| if i == j { gap.powf(-0.5) } else { (li - lj).abs().powf(-0.5) })
        .collect();
    Ok(s.weighted(&weights))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectorDistance {
    /// `‖uuᵀ − vvᵀ‖_F`.
    pub projector: f64,
    /// `‖u − sign⟨u,v⟩ v‖₂`, never larger than `projector`.
    pub vector: f64,
    pub inner: f64,
}

pub fn projector_distance(u: &DVector<f64>, v: &DVector<f64>) -> Result<ProjectorDistance> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    for (name, x) in [("u", u), ("v", v)] {
        if (x.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::invalid(name, format!("not a unit vector (norm {})", x.norm())));
        }
    }
    let inner = u.dot(v);
    let sign = if inner >= 0.0 { 1.0 } else { -1.0 };
    let vector = (u - v * sign).norm();
    // 2(1-c²) = w²(2 - w²/2) with w the aligned distance; avoids cancellation near c = ±1
    let projector = vector * (2.0 - 0.5 * vector * vector).max(0.0).sqrt();
    Ok(ProjectorDistance {
        projector,
        vector,
        inner,
    })
}
