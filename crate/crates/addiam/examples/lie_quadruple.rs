//! One subspace, four diameters: group 3, elementary 3, monomial 2,
//! associative 2 for the distinguished space inside sl_3.
//!
//! The elementary lower bound comes from the cap core (elements whose every
//! adjoint image stays inside U); the monomial witness needs a single
//! length-two word.  A proper tail window shows the elementary diameter can
//! be infinite while the monomial one stays finite.
//!
//!     cargo run --example lie_quadruple

use addiam::groupdiam::{diameter, verify, DiamValue, Variant};
use addiam::liediam::{cap_core, diameter_lie, lie_translate_sum, sl3_distinct_diameters_example};
use addiam::repkit::Representation;
use addiam::spaces::upper_closed;

fn check(
    label: &str,
    res: &addiam::groupdiam::DiameterResult,
    want: DiamValue,
) -> addiam::Result<()> {
    for c in res.certificates() {
        verify(c)?;
    }
    assert_eq!(res.exact_value(), Some(want), "{label}");
    println!("  {label:<12} {want:?}");
    Ok(())
}

fn main() -> addiam::Result<()> {
    let ex = sl3_distinct_diameters_example()?;
    println!("dim U = {} inside dim {}", ex.subspace.dim(), ex.rep.dim_v());

    check("group", &diameter(&ex.rep, &ex.subspace, 4, 7)?, DiamValue::Finite(3))?;
    check(
        "elementary",
        &diameter_lie(&ex.rep, &ex.subspace, Variant::LieElementary, 5, 7)?,
        DiamValue::Finite(3),
    )?;
    check(
        "monomial",
        &diameter_lie(&ex.rep, &ex.subspace, Variant::LieMonomial, 5, 7)?,
        DiamValue::Finite(2),
    )?;
    check(
        "associative",
        &diameter_lie(&ex.rep, &ex.subspace, Variant::LieAssociative, 5, 7)?,
        DiamValue::Finite(2),
    )?;

    // The shipped witnesses themselves cover.
    assert!(lie_translate_sum(&ex.rep, &ex.subspace, &ex.monomial)?.is_full());
    assert!(lie_translate_sum(&ex.rep, &ex.subspace, &ex.elementary)?.is_full());
    let core = cap_core(&ex.rep, &ex.subspace)?;
    assert!(core.contains_vector(&ex.rep.coordinatization().expect("sl3").vector_of(&ex.cap_element)?));
    println!("cap core dim {} drives the elementary lower bound", core.dim());

    // Tail window: one lie operator can never escape, the elementary
    // diameter is infinite, yet a two-step monomial still covers.
    let rep = Representation::sl2_irrep(4);
    let u = upper_closed(4, 2)?;
    let elem = diameter_lie(&rep, &u, Variant::LieElementary, 3, 5)?;
    assert_eq!(elem.exact_value(), Some(DiamValue::Infinite));
    println!("tail window k = 4, j = 2: elementary diameter infinite");
    Ok(())
}
