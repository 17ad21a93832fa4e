//! Transforms, derivatives, the Leray projection and 2/3-rule dealiasing on
//! a small periodic grid, plus a round trip through the snapshot format.
//!
//! cargo run --release --example spectral_operators

use std::f64::consts::PI;

use nematic::spectral::{
    dealias, divergence, gradient, laplacian, leray_project, snapshot, GridSpec, ScalarField, SpectralMask,
    VectorField,
};

fn max_abs(f: &ScalarField) -> f64 {
    f.to_physical().unwrap().physical().unwrap().iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn main() -> nematic::Result<()> {
    let grid = GridSpec::cube(32, 2.0 * PI)?;
    println!("grid n = {}, L = {}, h = {:.4}, kept |m_j| <= {}", grid.n, grid.box_length, grid.spacing(), grid.kept_limit());

    let f = ScalarField::from_fn(grid, |[x, y, z]| (2.0 * x).sin() * y.cos() + (3.0 * z).cos());
    let lap = laplacian(&f.forward()?)?;
    let exact = ScalarField::from_fn(grid, |[x, y, z]| -5.0 * (2.0 * x).sin() * y.cos() - 9.0 * (3.0 * z).cos());
    let err = ScalarField::from_physical(grid, lap.to_physical()?.physical()? - exact.physical()?)?;
    println!("laplacian of a trigonometric polynomial: max error {:.2e}", max_abs(&err));

    let g = gradient(&f.forward()?)?;
    println!("|| grad f ||^2 = {:.6} (Parseval)", g.l2_norm_sq());

    let v = VectorField::from_fn(grid, |[x, y, z]| [x.sin() * y.cos(), z.sin(), (x + y).cos() * z.sin()]).forward()?;
    let p = leray_project(&v)?;
    println!(
        "divergence before projection {:.3e}, after {:.3e}",
        max_abs(&divergence(&v)?),
        max_abs(&divergence(&p)?)
    );

    let kept = SpectralMask::dealias(&grid).kept_count();
    let total = grid.spectral_shape().0 * grid.spectral_shape().1 * grid.spectral_shape().2;
    println!("2/3 rule keeps {kept} of {total} stored modes");
    let rough = ScalarField::from_fn(grid, |[x, _, _]| (15.0 * x).cos() + x.cos()).forward()?;
    println!("energy before/after dealiasing a mode-15 signal: {:.4} / {:.4}", rough.l2_norm_sq(), dealias(&rough)?.l2_norm_sq());

    let bytes = snapshot::encode_vector(&p, snapshot::ByteOrder::Little);
    let header = snapshot::decode_header(&bytes)?;
    match snapshot::decode(&bytes)? {
        snapshot::Snapshot::Vector(back) => println!(
            "snapshot: {} bytes, {} components, {:?}, round trip exact: {}",
            bytes.len(),
            header.components,
            header.representation,
            back.spectral()? == p.spectral()?
        ),
        snapshot::Snapshot::Scalar(_) => unreachable!("encoded a vector field"),
    }
    Ok(())
}
