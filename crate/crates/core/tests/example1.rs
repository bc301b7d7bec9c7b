mod common;

use common::*;
use icext_core::*;

fn worked_spec() -> AbcSpec {
    let mut spec = AbcSpec::new(
        AbcSpec::parse_types("ABBC").unwrap(),
        InvolutoryPermutation::parse_cycles("(13)(2)", 3).unwrap(),
        GF2,
    )
    .unwrap();
    spec.set_choice(4, 1, TypeCChoice::Cond2).unwrap();
    spec.set_choice(4, 3, TypeCChoice::Cond2).unwrap();
    spec
}

fn widened_zero_based() -> Vec<(usize, usize)> {
    WIDENED.iter().map(|&(r, c)| (r - 1, c - 1)).collect()
}

#[test]
fn golden_files_parse_and_round_trip() {
    let (f, g) = example1();
    assert_eq!(f.to_string(), data("example1.fx"));
    assert_eq!(g.matrix().to_string(), data("example1.code"));
    let b: XPattern = data("example1_bxx.fx").parse().unwrap();
    assert_eq!(b.to_string(), data("example1_bxx.fx"));
}

#[test]
fn generated_problem_widens_to_the_golden_one() {
    let (f, g) = example1();
    let spec = worked_spec();
    let minimal = abc_problem(&spec);
    for &(r, c) in &WIDENED {
        assert_eq!(minimal.get(r - 1, c - 1), PatternEntry::Zero);
        assert_eq!(f.get(r - 1, c - 1), PatternEntry::Star);
    }
    assert_eq!(minimal.with_stars(&widened_zero_based()).unwrap(), f);
    assert_eq!(abc_code(&spec), g);
    assert!(verify_code(&g, &minimal).unwrap());
}

#[test]
fn type_c_choice_matters_for_the_golden_rows() {
    // With the first condition everywhere, rows 10 and 12 would need columns
    // 1, 6, 9 and 3, 4, 7 instead, which the golden matrix does not grant.
    let default = AbcSpec::new(
        AbcSpec::parse_types("ABBC").unwrap(),
        InvolutoryPermutation::parse_cycles("(13)(2)", 3).unwrap(),
        GF2,
    )
    .unwrap();
    let (f, _) = example1();
    let minimal = abc_problem(&default);
    let outside = (0..12)
        .flat_map(|r| (0..12).map(move |c| (r, c)))
        .filter(|&(r, c)| minimal.get(r, c) == PatternEntry::Star && f.get(r, c) != PatternEntry::Star)
        .count();
    assert!(outside > 0);
    assert!(verify_code(&abc_code(&default), &minimal).unwrap());
}

#[test]
fn structured_b_is_bit_exact() {
    let (f, _) = example1();
    let spec = worked_spec();
    let golden: XPattern = data("example1_bxx.fx").parse().unwrap();
    let ext = abc_extension(&spec, &f).unwrap();
    assert_eq!(ext.b.as_ref(), Some(&golden));
    assert_eq!(ext.f_ext.rows(), 24);
    assert!(verify_code(&ext.g_ext, &ext.f_ext).unwrap());

    let layout = BlockLayout::parse("1-3,4-6,7-9,10-12", 12).unwrap();
    assert_eq!(structured_bxx(&f, &layout, spec.sigma()).unwrap(), golden);
}

#[test]
fn general_construction_also_extends_the_example() {
    let (f, g) = example1();
    let c = InvolutoryPermutation::parse_cycles("(13)(2)", 3).unwrap().to_matrix(GF2);
    let ext = derive_bxx(&f, &g, &c).unwrap();
    assert!(verify_code(&ext.g_ext, &ext.f_ext).unwrap());
    assert!(certify_rank_invariance(&f, 3, &ext.f_ext, &ext.g_ext).unwrap());
}

#[test]
fn simulation_is_deterministic() {
    let (f, g) = example1();
    let a = simulate(&g, &f, 50, 7).unwrap();
    assert_eq!(a, simulate(&g, &f, 50, 7).unwrap());
    assert_eq!(a.failures, 0);
    assert_eq!(a.receivers, 12);
}

#[test]
fn length_two_is_impossible() {
    let (f, _) = example1();
    let cfg = MinrankConfig::default();
    assert_eq!(is_achievable(&f, GF2, 1, &cfg).unwrap(), None);
    assert_eq!(is_achievable(&f, GF2, 2, &cfg).unwrap(), None);
}
