//! Group diameters of the tail windows of an irreducible SL2 action.
//!
//! For the (k+1)-dimensional space of binary forms of degree k and the
//! window spanned by the last k+1-j basis vectors, the diameter equals the
//! ceiling lower bound, witnessed by unipotent shift translates.
//!
//!     cargo run --example sl2_windows

use addiam::groupdiam::{diameter, lower_ceiling, verify, DiamValue, DiameterResult};
use addiam::spaces::upper_closed;
use addiam::repkit::Representation;

fn main() -> addiam::Result<()> {
    println!("{:>3} {:>3} {:>5} {:>9} {:>8}", "k", "j", "dim U", "ceiling", "diameter");
    for k in 1..=8usize {
        let rep = Representation::sl2_irrep(k);
        for j in 0..=k {
            let u = upper_closed(k, j)?;
            let ceiling = lower_ceiling(rep.dim_v(), u.dim())?;
            let res = diameter(&rep, &u, ceiling + 2, 11)?;
            let DiameterResult::Exact(cert) = &res else {
                return Err(addiam::Error::Verification(format!(
                    "k = {k}, j = {j}: no exact value"
                )));
            };
            verify(cert)?;
            assert_eq!(cert.value, DiamValue::Finite(ceiling), "optimal at the ceiling");
            println!("{:>3} {:>3} {:>5} {:>9} {:>8}", k, j, u.dim(), ceiling, ceiling);
        }
    }
    println!("every window is exact at the ceiling, all certificates replay");
    Ok(())
}
