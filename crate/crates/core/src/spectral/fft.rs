//! Three-dimensional real FFTs built from 1-D transforms along each axis.
//!
//! Forward transforms are normalised by `1/n^3`, so coefficients are Fourier
//! series amplitudes: `u(x) = sum_m c_m exp(i xi_m . x)`. Every 1-D line is
//! transformed independently, so results do not depend on the rayon thread
//! count.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use ndarray::{Array3, ArrayViewMut2, Axis, Zip};
use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

pub(crate) struct Fft3 {
    n: usize,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();

/// Shared plan set for an `n^3` grid.
pub(crate) fn plans(n: usize) -> Arc<Fft3> {
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().unwrap_or_else(|e| e.into_inner());
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut real = RealFftPlanner::<f64>::new();
            let mut complex = FftPlanner::<f64>::new();
            Arc::new(Fft3 {
                n,
                r2c: real.plan_fft_forward(n),
                c2r: real.plan_fft_inverse(n),
                forward: complex.plan_fft_forward(n),
                inverse: complex.plan_fft_inverse(n),
            })
        })
        .clone()
}

impl Fft3 {
    pub fn forward(&self, input: &Array3<f64>) -> Array3<Complex64> {
        let n = self.n;
        let nz = n / 2 + 1;
        debug_assert_eq!(input.dim(), (n, n, n));
        let mut out = Array3::<Complex64>::zeros((n, n, nz));

        Zip::from(out.axis_iter_mut(Axis(0)))
            .and(input.axis_iter(Axis(0)))
            .par_for_each(|mut plane_out, plane_in| {
                let mut line = vec![0.0; n];
                let mut scratch = self.r2c.make_scratch_vec();
                let mut spec = vec![Complex64::default(); nz];
                for iy in 0..n {
                    for (dst, src) in line.iter_mut().zip(plane_in.row(iy)) {
                        *dst = *src;
                    }
                    self.r2c
                        .process_with_scratch(&mut line, &mut spec, &mut scratch)
                        .expect("r2c length");
                    for (dst, src) in plane_out.row_mut(iy).iter_mut().zip(&spec) {
                        *dst = *src;
                    }
                }
                transform_columns(&self.forward, plane_out);
            });
        Zip::from(out.axis_iter_mut(Axis(1))).par_for_each(|plane| {
            transform_columns(&self.forward, plane);
        });

        let scale = 1.0 / (n * n * n) as f64;
        out.par_mapv_inplace(|c| c * scale);
        out
    }

    pub fn inverse(&self, input: &Array3<Complex64>) -> Array3<f64> {
        let n = self.n;
        let nz = n / 2 + 1;
        debug_assert_eq!(input.dim(), (n, n, nz));
        let mut work = input.clone();
        Zip::from(work.axis_iter_mut(Axis(1))).par_for_each(|plane| {
            transform_columns(&self.inverse, plane);
        });

        let mut out = Array3::<f64>::zeros((n, n, n));
        Zip::from(out.axis_iter_mut(Axis(0)))
            .and(work.axis_iter_mut(Axis(0)))
            .par_for_each(|mut plane_out, mut plane_work| {
                transform_columns(&self.inverse, plane_work.view_mut());
                let mut spec = vec![Complex64::default(); nz];
                let mut line = vec![0.0; n];
                let mut scratch = self.c2r.make_scratch_vec();
                for iy in 0..n {
                    for (dst, src) in spec.iter_mut().zip(plane_work.row(iy)) {
                        *dst = *src;
                    }
                    // The m_z = 0 and Nyquist entries of a real signal are real.
                    spec[0].im = 0.0;
                    spec[nz - 1].im = 0.0;
                    self.c2r
                        .process_with_scratch(&mut spec, &mut line, &mut scratch)
                        .expect("c2r length");
                    for (dst, src) in plane_out.row_mut(iy).iter_mut().zip(&line) {
                        *dst = *src;
                    }
                }
            });
        out
    }
}

/// Complex FFT along axis 0 of a 2-D view, one column at a time.
fn transform_columns(fft: &Arc<dyn Fft<f64>>, mut plane: ArrayViewMut2<'_, Complex64>) {
    let len = plane.len_of(Axis(0));
    let mut buf = vec![Complex64::default(); len];
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for mut column in plane.axis_iter_mut(Axis(1)) {
        for (dst, src) in buf.iter_mut().zip(column.iter()) {
            *dst = *src;
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for (dst, src) in column.iter_mut().zip(&buf) {
            *dst = *src;
        }
    }
}
