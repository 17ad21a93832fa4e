//! The pieces of the momentum equation: the Ericksen stress divergence of a
//! director field and the pressure of the Taylor-Green vortex, which has the
//! closed form `p = (cos 2x + cos 2y)(cos 2z + 2) / 16`.
//!
//! cargo run --release --example stress_and_pressure

use std::f64::consts::PI;

use nematic::lcd::{ericksen_stress_div, pressure_solve, ModelParams};
use nematic::spectral::{GridSpec, ScalarField, VectorField};

fn main() -> nematic::Result<()> {
    let grid = GridSpec::cube(32, 2.0 * PI)?;
    let params = ModelParams::new(1.0, 0.5, [0.0, 0.0, 1.0])?;

    let u = VectorField::from_fn(grid, |[x, y, z]| [x.sin() * y.cos() * z.cos(), -x.cos() * y.sin() * z.cos(), 0.0]);
    let rest = VectorField::constant(grid, [0.0, 0.0, 1.0]);
    let p = pressure_solve(&u.forward()?, &rest.forward()?, &params)?.to_physical()?;
    let exact = ScalarField::from_fn(grid, |[x, y, z]| ((2.0 * x).cos() + (2.0 * y).cos()) * ((2.0 * z).cos() + 2.0) / 16.0);
    let err = p
        .physical()?
        .iter()
        .zip(exact.physical()?.iter())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    println!("Taylor-Green pressure: max error {err:.2e}");

    let eps = 0.1;
    let d = VectorField::from_fn(grid, |[x, _, _]| [eps * x.sin(), 0.0, 1.0]).forward()?;
    let s = ericksen_stress_div(&d)?.to_physical()?;
    let sx = s.component(0).physical()?;
    let err = sx
        .indexed_iter()
        .map(|((i, _, _), v)| (v - (-eps * eps * (2.0 * grid.coordinate(i)).sin())).abs())
        .fold(0.0f64, f64::max);
    println!("stress divergence of d = (eps sin x, 0, 1): max error {err:.2e} against -eps^2 sin(2x)");
    Ok(())
}
