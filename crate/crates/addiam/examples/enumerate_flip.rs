//! Flip covering over all enumerated block-closed subspaces, with the one
//! genuine exception.
//!
//! For conjugation on sl_n and dim U strictly between (n-1)^2 and n^2 - 1,
//! U plus its flip conjugate is expected to fill sl_n.  Enumerating every
//! Borel-stable block-closed space at n = 3, 4, 5 confirms this except for
//! a single space at n = 4 (B21 + B43): its diagonal part is flip-invariant
//! and misses E22 - E33, and its diameter is genuinely 3.  The exhaustive
//! permutation scan is a sound lower bound for Borel-stable spaces, so the
//! triple found by the search is optimal.
//!
//!     cargo run --example enumerate_flip

use addiam::groupdiam::{diameter, translate_sum, verify, DiamValue, DiameterResult, WeylOutcome};
use addiam::groupdiam::weyl_pair_search;
use addiam::repkit::{flip_matrix, GroupElement, Representation};
use addiam::spaces::{block_B, enumerate_block_closed, DiagMode};

fn main() -> addiam::Result<()> {
    let mut covered = 0usize;
    let mut exceptions = Vec::new();
    for n in 3..=5usize {
        let rep = Representation::conj_sln(n)?;
        let gs = [GroupElement::identity(n), flip_matrix(n)];
        let lo = (n - 1) * (n - 1) + 1;
        let hi = n * n - 2;
        for dim in lo..=hi {
            for u in enumerate_block_closed(n, dim, DiagMode::Sampled { seed: 17, trials: 8 })? {
                if translate_sum(&rep, &u, &gs)?.is_full() {
                    covered += 1;
                } else {
                    println!("exception: n = {n}, dim U = {dim}");
                    exceptions.push((n, u));
                }
            }
        }
        println!("n = {n}: open range {lo}..={hi} scanned");
    }
    println!("{covered} spaces covered by U + FUF");

    let [(n, u)] = exceptions.as_slice() else {
        return Err(addiam::Error::Verification(format!(
            "{} exceptions, expected exactly one",
            exceptions.len()
        )));
    };
    assert_eq!(*n, 4);
    assert_eq!(*u, block_B(4, 2, 1)?.sum(&block_B(4, 4, 3)?), "the exception is B21 + B43");

    // Sound lower bound: the space is Borel-stable, so if no permutation
    // pair covers, no pair of group elements does.
    match weyl_pair_search(4, u)? {
        WeylOutcome::NoPermutationPair => println!("no permutation pair covers the exception"),
        WeylOutcome::Witness(p) => panic!("unexpected covering pair {p:?}"),
    }
    let res = diameter(&Representation::conj_sln(4)?, u, 4, 9)?;
    let DiameterResult::Exact(cert) = &res else {
        return Err(addiam::Error::Verification("exception not resolved exactly".into()));
    };
    verify(cert)?;
    assert_eq!(cert.value, DiamValue::Finite(3));
    println!("exception diameter: exact 3 ({} witnesses, certificate replays)", cert.witnesses.len());
    Ok(())
}
