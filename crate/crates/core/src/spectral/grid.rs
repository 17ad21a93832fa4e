//! Periodic box geometry and wavenumber layout.
//!
//! Physical samples live on `n^3` points `x_j = (j - n/2) * h`, `h = L/n`, so
//! the box is `[-L/2, L/2)^3` and is centred on the origin. Spectral arrays use
//! the real-to-complex layout `n x n x (n/2 + 1)`: the first two axes carry the
//! signed mode numbers `m in [-n/2, n/2)` in FFT order, the last axis carries
//! `m_z in [0, n/2]`.

use ndarray::Array3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default dealiasing cutoff (the 2/3 rule).
pub const TWO_THIRDS: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub box_length: f64,
    #[serde(default = "default_dealias")]
    pub dealias_fraction: f64,
}

fn default_dealias() -> f64 {
    TWO_THIRDS
}

impl GridSpec {
    pub fn new(n: usize, box_length: f64, dealias_fraction: f64) -> Result<Self> {
        let grid = GridSpec {
            n,
            box_length,
            dealias_fraction,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Grid with the default 2/3 dealiasing rule.
    pub fn cube(n: usize, box_length: f64) -> Result<Self> {
        Self::new(n, box_length, TWO_THIRDS)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 8 || !self.n.is_multiple_of(2) {
            return Err(Error::config("grid.n", format!("{} must be even and >= 8", self.n)));
        }
        if !(self.box_length.is_finite() && self.box_length > 0.0) {
            return Err(Error::config(
                "grid.box_length",
                format!("{} must be finite and positive", self.box_length),
            ));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::config(
                "grid.dealias_fraction",
                format!("{} must lie in (0, 1]", self.dealias_fraction),
            ));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(3)
    }

    /// Lowest nonzero wavenumber `2 pi / L`.
    pub fn fundamental(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.box_length
    }

    pub fn nz(&self) -> usize {
        self.n / 2 + 1
    }

    pub fn physical_shape(&self) -> (usize, usize, usize) {
        (self.n, self.n, self.n)
    }

    pub fn spectral_shape(&self) -> (usize, usize, usize) {
        (self.n, self.n, self.nz())
    }

    /// Physical coordinate of grid index `j` along any axis.
    pub fn coordinate(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.spacing()
    }

    /// Signed mode number of index `i` on a full (x or y) axis.
    pub fn mode_xy(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Index on a full axis holding signed mode `m` (inverse of [`mode_xy`]).
    ///
    /// [`mode_xy`]: GridSpec::mode_xy
    pub fn index_xy(&self, m: i64) -> usize {
        m.rem_euclid(self.n as i64) as usize
    }

    pub fn is_nyquist_xy(&self, i: usize) -> bool {
        i == self.n / 2
    }

    pub fn is_nyquist_z(&self, iz: usize) -> bool {
        iz == self.n / 2
    }

    /// Largest |m| kept by the dealiasing rule.
    pub fn kept_limit(&self) -> i64 {
        (self.dealias_fraction * (self.n / 2) as f64 + 1e-9).floor() as i64
    }

    /// Multiplicity of an r2c coefficient in the full spectrum: planes
    /// `m_z = 0` and `m_z = n/2` appear once, every other plane twice.
    pub fn hermitian_weight(&self, iz: usize) -> f64 {
        if iz == 0 || iz == self.n / 2 {
            1.0
        } else {
            2.0
        }
    }

    pub fn wavenumbers(&self) -> Wavenumbers {
        Wavenumbers::new(self)
    }

    /// Same physical resolution with a different box length.
    pub fn with_box_length(&self, box_length: f64) -> Result<Self> {
        let n = (box_length / self.spacing()).round() as usize;
        Self::new(n, box_length, self.dealias_fraction)
    }
}

/// Derivative wavenumbers per axis.
///
/// Nyquist entries are zero: the Nyquist coefficient is its own conjugate
/// partner, so an odd derivative there cannot stay real. Every operator
/// (gradient, divergence, Laplacian, projection, heat factor) uses the same
/// table, which keeps `div(grad) == laplacian` exact.
#[derive(Debug, Clone)]
pub struct Wavenumbers {
    pub kxy: Vec<f64>,
    pub kz: Vec<f64>,
}

impl Wavenumbers {
    fn new(grid: &GridSpec) -> Self {
        let k0 = grid.fundamental();
        let kxy = (0..grid.n)
            .map(|i| {
                if grid.is_nyquist_xy(i) {
                    0.0
                } else {
                    k0 * grid.mode_xy(i) as f64
                }
            })
            .collect();
        let kz = (0..grid.nz())
            .map(|iz| {
                if grid.is_nyquist_z(iz) {
                    0.0
                } else {
                    k0 * iz as f64
                }
            })
            .collect();
        Wavenumbers { kxy, kz }
    }

    #[inline]
    pub fn k(&self, ix: usize, iy: usize, iz: usize) -> [f64; 3] {
        [self.kxy[ix], self.kxy[iy], self.kz[iz]]
    }

    #[inline]
    pub fn k2(&self, ix: usize, iy: usize, iz: usize) -> f64 {
        self.kxy[ix].powi(2) + self.kxy[iy].powi(2) + self.kz[iz].powi(2)
    }
}

/// Boolean selection of spectral modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMask {
    grid: GridSpec,
    keep: Array3<bool>,
}

impl SpectralMask {
    /// Modes with every `|m_j| <= kept_limit`.
    pub fn dealias(grid: &GridSpec) -> Self {
        let limit = grid.kept_limit();
        let keep = Array3::from_shape_fn(grid.spectral_shape(), |(ix, iy, iz)| {
            grid.mode_xy(ix).abs() <= limit
                && grid.mode_xy(iy).abs() <= limit
                && (iz as i64) <= limit
        });
        SpectralMask { grid: *grid, keep }
    }

    /// Closed ball `0 <= |xi| <= radius` using true wavenumbers `2 pi m / L`.
    pub fn ball(grid: &GridSpec, radius: f64) -> Self {
        let k0 = grid.fundamental();
        let keep = Array3::from_shape_fn(grid.spectral_shape(), |(ix, iy, iz)| {
            let m2 = grid.mode_xy(ix).pow(2) + grid.mode_xy(iy).pow(2) + (iz as i64).pow(2);
            k0 * (m2 as f64).sqrt() <= radius
        });
        SpectralMask { grid: *grid, keep }
    }

    /// Keeps the modes `m = (mx, my, mz)` for which `keep(m)` holds.
    pub fn from_fn(grid: &GridSpec, keep: impl Fn([i64; 3]) -> bool) -> Self {
        let keep = Array3::from_shape_fn(grid.spectral_shape(), |(ix, iy, iz)| {
            keep([grid.mode_xy(ix), grid.mode_xy(iy), iz as i64])
        });
        SpectralMask { grid: *grid, keep }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn keeps(&self, ix: usize, iy: usize, iz: usize) -> bool {
        self.keep[[ix, iy, iz]]
    }

    pub fn kept_count(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }

    pub(crate) fn as_array(&self) -> &Array3<bool> {
        &self.keep
    }

    /// Checks that shrinking any |m_j| of a kept mode lands on a kept mode.
    pub fn is_radially_monotone(&self) -> bool {
        let g = &self.grid;
        let shrink_xy = |i: usize| {
            let m = g.mode_xy(i);
            g.index_xy(m - m.signum())
        };
        self.keep.indexed_iter().all(|((ix, iy, iz), &kept)| {
            if !kept {
                return true;
            }
            let neighbours = [
                (ix != 0).then(|| (shrink_xy(ix), iy, iz)),
                (iy != 0).then(|| (ix, shrink_xy(iy), iz)),
                (iz != 0).then(|| (ix, iy, iz - 1)),
            ];
            neighbours.into_iter().flatten().all(|idx| self.keep[idx])
        })
    }
}
