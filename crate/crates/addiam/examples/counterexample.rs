//! The distinguished dimension-10 space where no pair of translates covers.
//!
//! Inside sl_n the space spanned by the first row, the diagonal differences,
//! and the subdiagonal needs three translates: an exhaustive scan over
//! permutation pairs (sound, since the space is Borel-stable) rules out
//! diameter 2, and the triple {I, F, long-cycle inverse} covers.
//!
//!     cargo run --example counterexample

use addiam::groupdiam::{
    diameter, translate_sum, verify, weyl_pair_search, DiamValue, DiameterResult,
    ExplicitStrategy, WeylOutcome,
};
use addiam::repkit::Representation;
use addiam::spaces::{named, NamedSpace};

fn main() -> addiam::Result<()> {
    for n in [4usize, 5] {
        let rep = Representation::conj_sln(n)?;
        let u = named(n, NamedSpace::Counterexample)?;
        println!("n = {n}: dim U = {} inside dim {}", u.dim(), rep.dim_v());

        match weyl_pair_search(n, &u)? {
            WeylOutcome::NoPermutationPair => println!("  no permutation pair covers"),
            WeylOutcome::Witness(p) => panic!("unexpected pair {p:?}"),
        }

        let triple = ExplicitStrategy::FlipLongCycle
            .witnesses(&rep, &u)?
            .expect("applies for n >= 3");
        assert!(translate_sum(&rep, &u, &triple)?.is_full(), "the quoted triple covers");
        println!("  I, F, long-cycle triple covers");

        let res = diameter(&rep, &u, 4, 3)?;
        let DiameterResult::Exact(cert) = &res else {
            return Err(addiam::Error::Verification("not resolved exactly".into()));
        };
        verify(cert)?;
        assert_eq!(cert.value, DiamValue::Finite(3));
        println!("  certified exact 3\n");
        if n == 4 {
            println!("certificate JSON for n = 4:\n{}\n", cert.to_json());
        }
    }
    Ok(())
}
