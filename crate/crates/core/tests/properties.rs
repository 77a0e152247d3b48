//! Property tests over randomly generated presentations and morphisms.
//! Generation is delegated to the seeded generators so proptest shrinks over
//! seeds.

use proptest::prelude::*;

use dihom::flow::{compile_paths, FlowError, RawFlow};
use dihom::germs::{branching_homology, check_t_homotopy, les_report, merging_homology};
use dihom::ingest::{parse_flow, serialize_flow};
use dihom::linalg::AbelianGroup;
use dihom::randgen;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn compiled_complexes_are_valid_with_dd_zero(seed in any::<u64>()) {
        let mut rng = randgen::rng(seed);
        let p = randgen::random_presentation(&mut rng, 7, 10);
        let pc = compile_paths(&p, p.default_dim_cap()).unwrap();
        prop_assert!(pc.complex.validate().is_valid());
        let chains = pc.complex.chain_complex().unwrap();
        prop_assert!(chains.verify_dd().is_ok());
    }

    #[test]
    fn h0_is_free_on_final_states(seed in any::<u64>()) {
        let mut rng = randgen::rng(seed);
        let p = randgen::random_presentation(&mut rng, 8, 12);
        let h = branching_homology(&p).unwrap();
        prop_assert_eq!(h.group(0), AbelianGroup::free(p.final_states().len()));
        let hm = merging_homology(&p).unwrap();
        prop_assert_eq!(hm.group(0), AbelianGroup::free(p.initial_states().len()));
    }

    #[test]
    fn duality_and_involution(seed in any::<u64>()) {
        let mut rng = randgen::rng(seed);
        let p = randgen::random_presentation(&mut rng, 8, 12);
        let lhs = branching_homology(&p.opposite()).unwrap();
        let rhs = merging_homology(&p).unwrap();
        prop_assert!(lhs.table_equal(&rhs));
        let op = p.opposite();
        prop_assert_eq!(op.initial_states(), p.final_states());
        prop_assert_eq!(op.final_states(), p.initial_states());
        prop_assert_eq!(op.opposite(), p);
    }

    #[test]
    fn serialization_roundtrips(seed in any::<u64>()) {
        let mut rng = randgen::rng(seed);
        let p = randgen::random_presentation(&mut rng, 8, 12);
        let back = parse_flow(&serialize_flow(&p)).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn subdivisions_are_t_equivalences_with_equal_tables(seed in any::<u64>()) {
        let mut rng = randgen::rng(seed);
        let x = randgen::random_presentation(&mut rng, 6, 9);
        let f = randgen::random_subdivision(&mut rng, &x);
        prop_assert!(check_t_homotopy(&f).unwrap().pass());
        let hx = branching_homology(&f.x).unwrap();
        let hy = branching_homology(&f.y).unwrap();
        prop_assert!(hx.table_equal(&hy));
        let mx = merging_homology(&f.x).unwrap();
        let my = merging_homology(&f.y).unwrap();
        prop_assert!(mx.table_equal(&my));
    }

    #[test]
    fn random_les_is_exact(seed in any::<u64>()) {
        let mut rng = randgen::rng(seed);
        let f = randgen::random_morphism(&mut rng, 6, 9);
        let report = les_report(&f, None).unwrap();
        prop_assert!(report.exact);
    }
}

#[test]
fn non_composable_word_is_rejected_by_germ_reduce() {
    use dihom::germs::{germ_reduce, GermError, Side};
    use dihom::Word;
    let mut raw = RawFlow::new("two");
    raw.edge("a", "0", "1").edge("b", "2", "3");
    let p = raw.build().unwrap();
    let a = p.generator_id("a").unwrap();
    let b = p.generator_id("b").unwrap();
    match germ_reduce(&p, &Word(vec![a, b]), Side::Branching) {
        Err(GermError::NotAWord) => {}
        other => panic!("expected rejection, got {other:?}"),
    }
}

#[test]
fn out_of_range_forbidden_cell_is_rejected() {
    use dihom::ingest::{pv_grid, IngestError};
    let cells = [(5usize, 0usize)].into_iter().collect();
    match pv_grid(2, 2, &cells) {
        Err(IngestError::ForbiddenOutOfRange(5, 0, 2, 2)) => {}
        Err(other) => panic!("wrong error: {other}"),
        Ok(_) => panic!("expected an out-of-range error"),
    }
}

#[test]
fn cap_below_a_generator_dimension_errors() {
    let mut raw = RawFlow::new("sq");
    raw.edge("a", "0", "1").edge("b", "0", "1");
    raw.square("S", &["a"], &["b"]);
    let p = raw.build().unwrap();
    match compile_paths(&p, 0) {
        Err(FlowError::CapTooSmall { cap: 0, dim: 1, .. }) => {}
        Err(other) => panic!("wrong error: {other}"),
        Ok(_) => panic!("expected a cap error"),
    }
}
