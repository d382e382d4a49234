//! Certificates are self-contained JSON values: they replay from their own
//! content, round-trip through serialization, and any mutation is rejected.
//!
//! The digest binds the full content, so a tampered witness fails before
//! replay even when the perturbed set would still span; re-sealing a forged
//! certificate does not help because verification also replays the exact
//! rank computation.
//!
//!     cargo run --example certificate_roundtrip

use addiam::exactlin::rat;
use addiam::groupdiam::{diameter, verify, Certificate, DiamValue, DiameterResult};
use addiam::repkit::Representation;
use addiam::spaces::{named, NamedSpace};

fn main() -> addiam::Result<()> {
    let rep = Representation::conj_sln(4)?;
    let u = named(4, NamedSpace::Counterexample)?;
    let res = diameter(&rep, &u, 4, 3)?;
    let DiameterResult::Exact(cert) = res else {
        return Err(addiam::Error::Verification("expected an exact result".into()));
    };

    let json = cert.to_json();
    println!("{json}\n");

    let back: Certificate = serde_json::from_str(&json)?;
    verify(&back)?;
    println!("round-tripped certificate replays");

    let mut forged = back.clone();
    *forged.witnesses[1].at_mut(0, 0) = forged.witnesses[1].at(0, 0) + rat(1);
    match verify(&forged) {
        Err(e) => println!("tampered witness rejected: {e}"),
        Ok(()) => panic!("tampered certificate slipped through"),
    }

    // Re-sealing fixes the digest but cannot fake the replay: claiming
    // diameter 2 with the first two witnesses fails the exact rank check
    // (no pair covers this space), and the obstruction replay still
    // proves 3 regardless.
    let mut stronger = back.clone();
    stronger.value = DiamValue::Finite(2);
    stronger.witnesses.truncate(2);
    let resealed = stronger.seal();
    match verify(&resealed) {
        Err(e) => println!("re-sealed stronger claim rejected: {e}"),
        Ok(()) => panic!("re-sealed forgery slipped through"),
    }
    Ok(())
}
