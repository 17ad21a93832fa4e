//! Spectral differential operators, dealiasing and the Leray projection.
//!
//! All operators act on spectral fields and use the derivative wavenumbers of
//! [`Wavenumbers`], so they commute and `divergence(gradient(f)) ==
//! laplacian(f)` holds coefficient by coefficient.

use ndarray::{Array3, Zip};
use num_complex::Complex64;

use super::field::{ScalarField, VectorField};
use super::grid::{SpectralMask, Wavenumbers};
use crate::error::Result;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub(crate) fn partial_array(wn: &Wavenumbers, c: &Array3<Complex64>, axis: usize) -> Array3<Complex64> {
    let mut out = Array3::zeros(c.dim());
    Zip::indexed(&mut out).and(c).par_for_each(|(ix, iy, iz), o, &v| {
        *o = I * wn.k(ix, iy, iz)[axis] * v;
    });
    out
}

pub(crate) fn gradient_arrays(wn: &Wavenumbers, c: &Array3<Complex64>) -> [Array3<Complex64>; 3] {
    [0, 1, 2].map(|axis| partial_array(wn, c, axis))
}

pub(crate) fn divergence_array(wn: &Wavenumbers, v: [&Array3<Complex64>; 3]) -> Array3<Complex64> {
    let mut out = Array3::zeros(v[0].dim());
    Zip::indexed(&mut out)
        .and(v[0])
        .and(v[1])
        .and(v[2])
        .par_for_each(|(ix, iy, iz), o, &a, &b, &c| {
            let k = wn.k(ix, iy, iz);
            *o = I * (k[0] * a + k[1] * b + k[2] * c);
        });
    out
}

pub(crate) fn laplacian_array(wn: &Wavenumbers, c: &Array3<Complex64>) -> Array3<Complex64> {
    let mut out = Array3::zeros(c.dim());
    Zip::indexed(&mut out).and(c).par_for_each(|(ix, iy, iz), o, &v| {
        *o = -wn.k2(ix, iy, iz) * v;
    });
    out
}

/// In-place `v - k (k . v) / |k|^2`; the `k = 0` coefficient is left alone.
pub(crate) fn leray_in_place(wn: &Wavenumbers, v: &mut [Array3<Complex64>; 3]) {
    let [a, b, c] = v;
    Zip::indexed(a).and(b).and(c).par_for_each(|(ix, iy, iz), a, b, c| {
        let k = wn.k(ix, iy, iz);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            return;
        }
        let kv = (k[0] * *a + k[1] * *b + k[2] * *c) / k2;
        *a -= k[0] * kv;
        *b -= k[1] * kv;
        *c -= k[2] * kv;
    });
}

pub(crate) fn mask_in_place(mask: &SpectralMask, c: &mut Array3<Complex64>) {
    Zip::from(c).and(mask.as_array()).par_for_each(|v, &keep| {
        if !keep {
            *v = Complex64::default();
        }
    });
}

/// `d/dx_axis` of a spectral scalar.
pub fn partial(f: &ScalarField, axis: usize) -> Result<ScalarField> {
    let wn = f.grid().wavenumbers();
    ScalarField::from_spectral(*f.grid(), partial_array(&wn, f.spectral()?, axis))
}

pub fn gradient(f: &ScalarField) -> Result<VectorField> {
    let wn = f.grid().wavenumbers();
    Ok(VectorField::from_spectral_arrays(
        *f.grid(),
        gradient_arrays(&wn, f.spectral()?),
    ))
}

pub fn divergence(v: &VectorField) -> Result<ScalarField> {
    let wn = v.grid().wavenumbers();
    ScalarField::from_spectral(*v.grid(), divergence_array(&wn, v.spectral()?))
}

pub fn laplacian(f: &ScalarField) -> Result<ScalarField> {
    let wn = f.grid().wavenumbers();
    ScalarField::from_spectral(*f.grid(), laplacian_array(&wn, f.spectral()?))
}

/// Componentwise Laplacian.
pub fn vector_laplacian(v: &VectorField) -> Result<VectorField> {
    let wn = v.grid().wavenumbers();
    let c = v.spectral()?;
    Ok(VectorField::from_spectral_arrays(
        *v.grid(),
        c.map(|a| laplacian_array(&wn, a)),
    ))
}

/// Projection onto divergence-free fields; the mean is preserved.
pub fn leray_project(v: &VectorField) -> Result<VectorField> {
    let wn = v.grid().wavenumbers();
    let mut arrays = v.spectral()?.map(|a| a.clone());
    leray_in_place(&wn, &mut arrays);
    Ok(VectorField::from_spectral_arrays(*v.grid(), arrays))
}

/// Fields that can be truncated to the dealiased band of their grid.
pub trait Dealias: Sized {
    fn dealiased(&self) -> Result<Self>;
}

impl Dealias for ScalarField {
    fn dealiased(&self) -> Result<Self> {
        let mask = SpectralMask::dealias(self.grid());
        let mut c = self.spectral()?.clone();
        mask_in_place(&mask, &mut c);
        ScalarField::from_spectral(*self.grid(), c)
    }
}

impl Dealias for VectorField {
    fn dealiased(&self) -> Result<Self> {
        let mask = SpectralMask::dealias(self.grid());
        let mut arrays = self.spectral()?.map(|a| a.clone());
        for a in &mut arrays {
            mask_in_place(&mask, a);
        }
        Ok(VectorField::from_spectral_arrays(*self.grid(), arrays))
    }
}

/// Zeroes every mode with some `|m_j| > dealias_fraction * n/2`.
pub fn dealias<F: Dealias>(field: &F) -> Result<F> {
    field.dealiased()
}

/// Applies an arbitrary mask to a spectral vector field.
pub fn apply_mask(v: &VectorField, mask: &SpectralMask) -> Result<VectorField> {
    let mut arrays = v.spectral()?.map(|a| a.clone());
    for a in &mut arrays {
        mask_in_place(mask, a);
    }
    Ok(VectorField::from_spectral_arrays(*v.grid(), arrays))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::spectral::grid::GridSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn max_abs(c: &Array3<Complex64>) -> f64 {
        c.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    fn random_scalar(grid: GridSpec, seed: u64) -> ScalarField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = Array3::from_shape_simple_fn(grid.physical_shape(), || rng.gen_range(-1.0..1.0));
        ScalarField::from_physical(grid, v).unwrap().forward().unwrap()
    }

    fn random_vector(grid: GridSpec, seed: u64) -> VectorField {
        VectorField::from_components([0, 1, 2].map(|a| random_scalar(grid, seed * 3 + a))).unwrap()
    }

    fn inner(a: &VectorField, b: &VectorField) -> Complex64 {
        let grid = a.grid();
        let mut s = Complex64::default();
        for (x, y) in a.spectral().unwrap().iter().zip(b.spectral().unwrap()) {
            for ((idx, p), q) in x.indexed_iter().zip(y.iter()) {
                s += grid.hermitian_weight(idx.2) * p.conj() * q;
            }
        }
        s
    }

    #[test]
    fn laplacian_of_sine() {
        let grid = GridSpec::cube(16, 3.0).unwrap();
        let k = grid.fundamental();
        let f = ScalarField::from_fn(grid, |x| (k * x[0]).sin());
        let lap = laplacian(&f.forward().unwrap()).unwrap().inverse().unwrap();
        let expected = ScalarField::from_fn(grid, |x| -k * k * (k * x[0]).sin());
        let err = lap
            .physical()
            .unwrap()
            .iter()
            .zip(expected.physical().unwrap())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-12 * k * k, "{err}");
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let grid = GridSpec::cube(8, 1.0).unwrap();
        let g = gradient(&ScalarField::constant(grid, 4.0).forward().unwrap()).unwrap();
        for c in g.spectral().unwrap() {
            assert!(max_abs(c) < 1e-15);
        }
    }

    #[test]
    fn div_grad_equals_laplacian() {
        let grid = GridSpec::cube(12, 2.0 * PI).unwrap();
        let phi = random_scalar(grid, 9);
        let a = divergence(&gradient(&phi).unwrap()).unwrap();
        let b = laplacian(&phi).unwrap();
        let diff = a.spectral().unwrap() - b.spectral().unwrap();
        assert!(max_abs(&diff) <= 1e-13 * max_abs(b.spectral().unwrap()));
    }

    #[test]
    fn derivatives_commute() {
        let grid = GridSpec::cube(10, 5.0).unwrap();
        let f = random_scalar(grid, 4);
        let xy = partial(&partial(&f, 0).unwrap(), 1).unwrap();
        let yx = partial(&partial(&f, 1).unwrap(), 0).unwrap();
        let diff = xy.spectral().unwrap() - yx.spectral().unwrap();
        assert!(max_abs(&diff) <= 1e-14 * max_abs(xy.spectral().unwrap()));
    }

    #[test]
    fn leray_kills_gradients() {
        let grid = GridSpec::cube(12, 2.0 * PI).unwrap();
        let g = gradient(&random_scalar(grid, 5)).unwrap();
        let p = leray_project(&g).unwrap();
        for c in p.spectral().unwrap() {
            assert!(max_abs(c) < 1e-13);
        }
    }

    #[test]
    fn leray_fixes_taylor_green() {
        let grid = GridSpec::cube(16, 2.0 * PI).unwrap();
        let tg = VectorField::from_fn(grid, |[x, y, z]| {
            [x.sin() * y.cos() * z.cos(), -x.cos() * y.sin() * z.cos(), 0.0]
        })
        .forward()
        .unwrap();
        let p = leray_project(&tg).unwrap();
        for (a, b) in p.spectral().unwrap().iter().zip(tg.spectral().unwrap()) {
            assert!(max_abs(&(*a - b)) < 1e-13);
        }
    }

    #[test]
    fn leray_idempotent_self_adjoint_divergence_free() {
        let grid = GridSpec::cube(12, 3.0).unwrap();
        let v = random_vector(grid, 1);
        let w = random_vector(grid, 2);
        let pv = leray_project(&v).unwrap();
        let ppv = leray_project(&pv).unwrap();
        for (a, b) in ppv.spectral().unwrap().iter().zip(pv.spectral().unwrap()) {
            assert!(max_abs(&(*a - b)) <= 1e-13);
        }
        let div = divergence(&pv).unwrap();
        let scale = grid.fundamental() * grid.n as f64;
        assert!(max_abs(div.spectral().unwrap()) <= 1e-12 * scale);
        let pw = leray_project(&w).unwrap();
        let lhs = inner(&pv, &w);
        let rhs = inner(&v, &pw);
        assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn dealias_behaviour() {
        let grid = GridSpec::cube(16, 1.0).unwrap();
        let k = grid.fundamental();
        let high = ScalarField::from_fn(grid, |x| (7.0 * k * x[0]).cos()).forward().unwrap();
        assert!(max_abs(dealias(&high).unwrap().spectral().unwrap()) < 1e-15);
        let c = ScalarField::constant(grid, 1.5).forward().unwrap();
        assert_eq!(dealias(&c).unwrap(), c);

        let full = GridSpec::new(16, 1.0, 1.0).unwrap();
        let r = random_scalar(full, 3);
        assert_eq!(dealias(&r).unwrap(), r);
    }

    #[test]
    fn physical_input_rejected() {
        let grid = GridSpec::cube(8, 1.0).unwrap();
        let f = ScalarField::constant(grid, 1.0);
        assert!(matches!(gradient(&f), Err(Error::Representation { .. })));
    }
}
