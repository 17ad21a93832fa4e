//! Scalar and vector fields on the periodic box.

use ndarray::{Array3, Zip};
use num_complex::Complex64;
use rayon::prelude::*;

use super::fft::plans;
use super::grid::GridSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Spectral,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Physical => "physical",
            Representation::Spectral => "spectral",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Samples {
    Physical(Array3<f64>),
    Spectral(Array3<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    samples: Samples,
}

const CHUNK: usize = 4096;

/// Sum with fixed chunking, so the result is independent of thread count.
pub(crate) fn det_sum<T: Sync>(values: &[T], f: impl Fn(usize, &T) -> f64 + Sync) -> f64 {
    let partial: Vec<f64> = values
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(c, chunk)| {
            chunk
                .iter()
                .enumerate()
                .map(|(i, v)| f(c * CHUNK + i, v))
                .sum::<f64>()
        })
        .collect();
    partial.iter().sum()
}

/// `integral |u|^2 dx` of a spectral array via Parseval.
pub(crate) fn spectral_l2_sq(grid: &GridSpec, coeffs: &Array3<Complex64>) -> f64 {
    let nz = grid.nz();
    let slice = coeffs.as_slice().expect("standard layout");
    grid.volume() * det_sum(slice, |i, c| grid.hermitian_weight(i % nz) * c.norm_sqr())
}

/// `integral |(-lap)^{power/2} u|^2 dx` via Parseval: `power = 1` gives
/// `||grad u||^2`, `power = 2` gives `||lap u||^2`.
pub(crate) fn spectral_moment(grid: &GridSpec, coeffs: &Array3<Complex64>, power: i32) -> f64 {
    let (n, nz) = (grid.n, grid.nz());
    let wn = grid.wavenumbers();
    let slice = coeffs.as_slice().expect("standard layout");
    grid.volume()
        * det_sum(slice, |i, c| {
            let (ix, iy, iz) = (i / (n * nz), (i / nz) % n, i % nz);
            grid.hermitian_weight(iz) * wn.k2(ix, iy, iz).powi(power) * c.norm_sqr()
        })
}

/// `integral |u|^2 dx` of a physical array by grid quadrature.
pub(crate) fn physical_l2_sq(grid: &GridSpec, values: &Array3<f64>) -> f64 {
    let slice = values.as_slice().expect("standard layout");
    grid.cell_volume() * det_sum(slice, |_, v| v * v)
}

fn check_finite_real(values: &Array3<f64>) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidField("non-finite physical sample".into()))
    }
}

fn check_finite_complex(values: &Array3<Complex64>) -> Result<()> {
    if values.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidField("non-finite spectral coefficient".into()))
    }
}

impl ScalarField {
    pub fn from_physical(grid: GridSpec, values: Array3<f64>) -> Result<Self> {
        if values.dim() != grid.physical_shape() {
            return Err(Error::InvalidField(format!(
                "physical shape {:?} does not match grid {:?}",
                values.dim(),
                grid.physical_shape()
            )));
        }
        Ok(ScalarField {
            grid,
            samples: Samples::Physical(values.as_standard_layout().into_owned()),
        })
    }

    pub fn from_spectral(grid: GridSpec, coeffs: Array3<Complex64>) -> Result<Self> {
        if coeffs.dim() != grid.spectral_shape() {
            return Err(Error::InvalidField(format!(
                "spectral shape {:?} does not match grid {:?}",
                coeffs.dim(),
                grid.spectral_shape()
            )));
        }
        Ok(ScalarField {
            grid,
            samples: Samples::Spectral(coeffs.as_standard_layout().into_owned()),
        })
    }

    /// Samples `f(x, y, z)` on the grid points.
    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> f64 + Sync) -> Self {
        let mut values = Array3::zeros(grid.physical_shape());
        Zip::indexed(&mut values).par_for_each(|(i, j, k), v| {
            *v = f([grid.coordinate(i), grid.coordinate(j), grid.coordinate(k)]);
        });
        ScalarField {
            grid,
            samples: Samples::Physical(values),
        }
    }

    pub fn constant(grid: GridSpec, value: f64) -> Self {
        ScalarField {
            grid,
            samples: Samples::Physical(Array3::from_elem(grid.physical_shape(), value)),
        }
    }

    pub fn zeros_spectral(grid: GridSpec) -> Self {
        ScalarField {
            grid,
            samples: Samples::Spectral(Array3::zeros(grid.spectral_shape())),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn samples(&self) -> &Samples {
        &self.samples
    }

    pub fn representation(&self) -> Representation {
        match self.samples {
            Samples::Physical(_) => Representation::Physical,
            Samples::Spectral(_) => Representation::Spectral,
        }
    }

    pub fn physical(&self) -> Result<&Array3<f64>> {
        match &self.samples {
            Samples::Physical(v) => Ok(v),
            Samples::Spectral(_) => Err(Error::Representation {
                expected: "physical",
                found: "spectral",
            }),
        }
    }

    pub fn spectral(&self) -> Result<&Array3<Complex64>> {
        match &self.samples {
            Samples::Spectral(c) => Ok(c),
            Samples::Physical(_) => Err(Error::Representation {
                expected: "spectral",
                found: "physical",
            }),
        }
    }

    pub fn into_samples(self) -> Samples {
        self.samples
    }

    pub fn forward(&self) -> Result<Self> {
        let values = self.physical()?;
        check_finite_real(values)?;
        let coeffs = plans(self.grid.n).forward(values);
        Ok(ScalarField {
            grid: self.grid,
            samples: Samples::Spectral(coeffs),
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        let coeffs = self.spectral()?;
        check_finite_complex(coeffs)?;
        let values = plans(self.grid.n).inverse(coeffs);
        Ok(ScalarField {
            grid: self.grid,
            samples: Samples::Physical(values),
        })
    }

    /// Spectral copy, transforming only when needed.
    pub fn to_spectral(&self) -> Result<Self> {
        match self.representation() {
            Representation::Spectral => Ok(self.clone()),
            Representation::Physical => self.forward(),
        }
    }

    pub fn to_physical(&self) -> Result<Self> {
        match self.representation() {
            Representation::Physical => Ok(self.clone()),
            Representation::Spectral => self.inverse(),
        }
    }

    /// `integral |v|^2 dx`, by grid quadrature or by Parseval.
    pub fn l2_norm_sq(&self) -> f64 {
        match &self.samples {
            Samples::Physical(v) => physical_l2_sq(&self.grid, v),
            Samples::Spectral(c) => spectral_l2_sq(&self.grid, c),
        }
    }

    pub fn is_finite(&self) -> bool {
        match &self.samples {
            Samples::Physical(v) => check_finite_real(v).is_ok(),
            Samples::Spectral(c) => check_finite_complex(c).is_ok(),
        }
    }
}

/// Three-component field; all components share grid and representation.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    comps: [ScalarField; 3],
}

impl VectorField {
    pub fn from_components(comps: [ScalarField; 3]) -> Result<Self> {
        let grid = comps[0].grid;
        let repr = comps[0].representation();
        if comps.iter().any(|c| c.grid != grid) {
            return Err(Error::GridMismatch);
        }
        if let Some(c) = comps.iter().find(|c| c.representation() != repr) {
            return Err(Error::Representation {
                expected: repr.name(),
                found: c.representation().name(),
            });
        }
        Ok(VectorField { comps })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> [f64; 3] + Sync) -> Self {
        let comps = [0, 1, 2].map(|a| ScalarField::from_fn(grid, |x| f(x)[a]));
        VectorField { comps }
    }

    pub fn constant(grid: GridSpec, value: [f64; 3]) -> Self {
        VectorField {
            comps: value.map(|v| ScalarField::constant(grid, v)),
        }
    }

    pub fn zeros_spectral(grid: GridSpec) -> Self {
        VectorField {
            comps: [(); 3].map(|_| ScalarField::zeros_spectral(grid)),
        }
    }

    pub(crate) fn from_spectral_arrays(grid: GridSpec, arrays: [Array3<Complex64>; 3]) -> Self {
        VectorField {
            comps: arrays.map(|c| ScalarField {
                grid,
                samples: Samples::Spectral(c),
            }),
        }
    }

    pub(crate) fn from_physical_arrays(grid: GridSpec, arrays: [Array3<f64>; 3]) -> Self {
        VectorField {
            comps: arrays.map(|v| ScalarField {
                grid,
                samples: Samples::Physical(v),
            }),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.comps[0].grid
    }

    pub fn representation(&self) -> Representation {
        self.comps[0].representation()
    }

    pub fn component(&self, a: usize) -> &ScalarField {
        &self.comps[a]
    }

    pub fn components(&self) -> &[ScalarField; 3] {
        &self.comps
    }

    pub fn into_components(self) -> [ScalarField; 3] {
        self.comps
    }

    pub fn spectral(&self) -> Result<[&Array3<Complex64>; 3]> {
        Ok([
            self.comps[0].spectral()?,
            self.comps[1].spectral()?,
            self.comps[2].spectral()?,
        ])
    }

    pub fn physical(&self) -> Result<[&Array3<f64>; 3]> {
        Ok([
            self.comps[0].physical()?,
            self.comps[1].physical()?,
            self.comps[2].physical()?,
        ])
    }

    pub fn forward(&self) -> Result<Self> {
        let [a, b, c] = &self.comps;
        Ok(VectorField {
            comps: [a.forward()?, b.forward()?, c.forward()?],
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        let [a, b, c] = &self.comps;
        Ok(VectorField {
            comps: [a.inverse()?, b.inverse()?, c.inverse()?],
        })
    }

    pub fn to_spectral(&self) -> Result<Self> {
        let [a, b, c] = &self.comps;
        Ok(VectorField {
            comps: [a.to_spectral()?, b.to_spectral()?, c.to_spectral()?],
        })
    }

    pub fn to_physical(&self) -> Result<Self> {
        let [a, b, c] = &self.comps;
        Ok(VectorField {
            comps: [a.to_physical()?, b.to_physical()?, c.to_physical()?],
        })
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.comps.iter().map(ScalarField::l2_norm_sq).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(ScalarField::is_finite)
    }

    /// Pointwise Euclidean magnitude of a physical field.
    pub fn magnitude(&self) -> Result<Array3<f64>> {
        let [a, b, c] = self.physical()?;
        let mut out = Array3::zeros(a.dim());
        Zip::from(&mut out)
            .and(a)
            .and(b)
            .and(c)
            .par_for_each(|o, &x, &y, &z| *o = (x * x + y * y + z * z).sqrt());
        Ok(out)
    }
}

pub trait Transform: Sized {
    fn transform(&self, direction: Direction) -> Result<Self>;
}

impl Transform for ScalarField {
    fn transform(&self, direction: Direction) -> Result<Self> {
        match direction {
            Direction::Forward => self.forward(),
            Direction::Inverse => self.inverse(),
        }
    }
}

impl Transform for VectorField {
    fn transform(&self, direction: Direction) -> Result<Self> {
        match direction {
            Direction::Forward => self.forward(),
            Direction::Inverse => self.inverse(),
        }
    }
}

/// Moves a field to the other representation.
pub fn transform<F: Transform>(field: &F, direction: Direction) -> Result<F> {
    field.transform(direction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(grid: GridSpec, seed: u64) -> ScalarField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = Array3::from_shape_simple_fn(grid.physical_shape(), || rng.gen_range(-1.0..1.0));
        ScalarField::from_physical(grid, values).unwrap()
    }

    #[test]
    fn constant_has_only_mean_mode() {
        let grid = GridSpec::cube(8, 3.0).unwrap();
        let s = ScalarField::constant(grid, 2.5).forward().unwrap();
        let c = s.spectral().unwrap();
        assert!((c[[0, 0, 0]].re - 2.5).abs() < 1e-15);
        let others: f64 = c.iter().skip(1).map(|z| z.norm()).fold(0.0, f64::max);
        assert!(others < 1e-15);
    }

    #[test]
    fn sine_is_two_conjugate_modes() {
        let grid = GridSpec::cube(16, 2.0).unwrap();
        let k = grid.fundamental();
        let s = ScalarField::from_fn(grid, |x| (k * x[0]).sin()).forward().unwrap();
        let c = s.spectral().unwrap();
        // Box starts at -L/2, so sin(k x) keeps amplitude 1/2 at m = +-1.
        let plus = c[[1, 0, 0]];
        let minus = c[[grid.index_xy(-1), 0, 0]];
        assert!((plus.norm() - 0.5).abs() < 1e-14);
        assert!((plus - minus.conj()).norm() < 1e-14);
        let rest: f64 = c
            .indexed_iter()
            .filter(|((i, j, l), _)| !((*i == 1 || *i == 15) && *j == 0 && *l == 0))
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max);
        assert!(rest < 1e-14, "{rest}");
    }

    #[test]
    fn round_trip_and_parseval() {
        for (n, seed) in [(8, 1), (12, 2), (16, 3)] {
            let grid = GridSpec::cube(n, 2.0 * PI).unwrap();
            let r = random_field(grid, seed);
            let spec = r.forward().unwrap();
            let back = spec.inverse().unwrap();
            let a = r.physical().unwrap();
            let b = back.physical().unwrap();
            let max = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let err = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            assert!(err <= 1e-12 * max, "n={n}: {err}");
            let (p, s) = (r.l2_norm_sq(), spec.l2_norm_sq());
            assert!((p - s).abs() <= 1e-12 * p, "parseval {p} vs {s}");
        }
    }

    #[test]
    fn non_finite_rejected() {
        let grid = GridSpec::cube(8, 1.0).unwrap();
        let mut values = Array3::zeros(grid.physical_shape());
        values[[1, 2, 3]] = f64::NAN;
        let f = ScalarField::from_physical(grid, values).unwrap();
        assert!(matches!(f.forward(), Err(Error::InvalidField(_))));
    }

    #[test]
    fn wrong_representation_rejected() {
        let grid = GridSpec::cube(8, 1.0).unwrap();
        let f = ScalarField::zeros_spectral(grid);
        assert!(matches!(
            transform(&f, Direction::Forward),
            Err(Error::Representation { .. })
        ));
    }
}
