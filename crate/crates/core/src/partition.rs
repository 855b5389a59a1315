//! Uniform hypercube partitions of the joint context space `[0,1]^D`.
//!
//! Cells along each axis are half-open, `[j/h, (j+1)/h)`, except the last one
//! which is closed so that coordinate `1.0` belongs to cell `h-1`.

use crate::error::{Error, Result};

/// Cells per axis for horizon `T`: `ceil(T^(1/(3*alpha + D)))`.
pub fn cells_per_axis(horizon: usize, alpha: f64, dim: usize) -> Result<usize> {
    if horizon == 0 {
        return Err(Error::param("horizon", "must be at least 1"));
    }
    check_alpha(alpha)?;
    if dim == 0 {
        return Err(Error::param("dimension", "must be at least 1"));
    }
    let exponent = 1.0 / (3.0 * alpha + dim as f64);
    let raw = (horizon as f64).powf(exponent);
    // Exact powers such as 10000^(1/4) can land a hair above the integer.
    let rounded = raw.round();
    let h = if (raw - rounded).abs() < 1e-9 {
        rounded
    } else {
        raw.ceil()
    };
    Ok((h as usize).max(1))
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::param(
            "alpha",
            format!("must lie in (0, 1], got {alpha}"),
        ))
    }
}

/// Cell coordinates, one integer per axis in `0..h`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId(pub Vec<usize>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformPartition {
    dim: usize,
    cells_per_axis: usize,
}

impl UniformPartition {
    pub fn new(dim: usize, cells_per_axis: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dimension", "must be at least 1"));
        }
        if cells_per_axis == 0 {
            return Err(Error::param("cells_per_axis", "must be at least 1"));
        }
        cells_per_axis
            .checked_pow(dim as u32)
            .ok_or_else(|| Error::param("cells_per_axis", "cell count overflows"))?;
        Ok(Self {
            dim,
            cells_per_axis,
        })
    }

    /// Partition sized for a horizon as in the regret analysis.
    pub fn for_horizon(horizon: usize, alpha: f64, dim: usize) -> Result<Self> {
        Self::new(dim, cells_per_axis(horizon, alpha, dim)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells_per_axis
    }

    /// `h^D`.
    pub fn cell_count(&self) -> usize {
        self.cells_per_axis.pow(self.dim as u32)
    }

    fn axis_bin(&self, value: f64) -> usize {
        ((value * self.cells_per_axis as f64).floor() as usize).min(self.cells_per_axis - 1)
    }

    fn check(&self, ctx: &[f64]) -> Result<()> {
        if ctx.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: ctx.len(),
            });
        }
        for (index, &value) in ctx.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::CoordinateOutOfRange { index, value });
            }
        }
        Ok(())
    }

    pub fn locate(&self, ctx: &[f64]) -> Result<CellId> {
        self.check(ctx)?;
        Ok(CellId(ctx.iter().map(|&v| self.axis_bin(v)).collect()))
    }

    /// Flat (row-major, first axis most significant) index of the containing cell.
    pub fn locate_flat(&self, ctx: &[f64]) -> Result<usize> {
        self.check(ctx)?;
        Ok(ctx
            .iter()
            .fold(0, |acc, &v| acc * self.cells_per_axis + self.axis_bin(v)))
    }

    pub fn flatten(&self, cell: &CellId) -> Result<usize> {
        if cell.0.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: cell.0.len(),
            });
        }
        cell.0.iter().try_fold(0, |acc, &c| {
            if c >= self.cells_per_axis {
                Err(Error::param(
                    "cell",
                    format!("coordinate {c} outside 0..{}", self.cells_per_axis),
                ))
            } else {
                Ok(acc * self.cells_per_axis + c)
            }
        })
    }

    pub fn unflatten(&self, flat: usize) -> Result<CellId> {
        if flat >= self.cell_count() {
            return Err(Error::param(
                "cell",
                format!("flat index {flat} outside 0..{}", self.cell_count()),
            ));
        }
        let mut coords = vec![0; self.dim];
        let mut rest = flat;
        for slot in coords.iter_mut().rev() {
            *slot = rest % self.cells_per_axis;
            rest /= self.cells_per_axis;
        }
        Ok(CellId(coords))
    }
}
