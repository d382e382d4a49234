//! Waring-type covering bounds for equivariant polynomial maps.
//!
//! For the twisted cubic (binary forms cubed into degree 3) the derivative
//! image at a base point has diameter 2 under the group action, so every
//! target is a sum of at most 2 * 2 = 4 image points.  The certified bound
//! replays through a stacked Jacobian rank check; a numeric search then
//! actually decomposes the hardest point.
//!
//!     cargo run --example waring_cubic

use addiam::eqmorph::{numeric_decompose, square_map, twisted_cubic, verify_waring, waring_bound, WaringOutcome};
use addiam::exactlin::rat;

fn main() -> addiam::Result<()> {
    let f = twisted_cubic()?;
    let base = [rat(1), rat(1)];
    let cert = match waring_bound(&f, &base, 6, 9)? {
        WaringOutcome::Bounded(c) => c,
        other => return Err(addiam::Error::Verification(format!("no bound: {other:?}"))),
    };
    verify_waring(&cert)?;
    println!("{}: every target is a sum of <= {} image points", f.name(), cert.bound);
    println!("  tangent diameter {} at base point (1, 1)", cert.k_jacobian);

    // x^2 y has rank 3: three cubes of linear forms reach it exactly, and
    // the residual of the recovered decomposition is numerically zero.
    let target = [0.0, 1.0, 0.0, 0.0];
    let points = numeric_decompose(&f, &target, 3, 71).expect("three points suffice");
    let mut total = vec![0.0; 4];
    for p in &points {
        for (t, v) in total.iter_mut().zip(f.eval_f64(p).iter()) {
            *t += v;
        }
    }
    let residual: f64 = total.iter().zip(target.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    assert!(residual < 1e-9);
    println!("  x^2 y decomposed into {} cubes, residual {residual:.2e}", points.len());

    // Matrix squaring: the identity is a smooth point and two translates
    // of the tangent space already fill, so the bound is 2.
    for n in [2usize, 3] {
        let f = square_map(n)?;
        let id: Vec<_> = (0..n * n).map(|i| rat((i % (n + 1) == 0) as i64)).collect();
        let cert = match waring_bound(&f, &id, 4, 9)? {
            WaringOutcome::Bounded(c) => c,
            other => return Err(addiam::Error::Verification(format!("no bound: {other:?}"))),
        };
        verify_waring(&cert)?;
        println!("square map n = {n}: bound {}", cert.bound);
        assert_eq!(cert.bound, 2);
    }
    Ok(())
}
