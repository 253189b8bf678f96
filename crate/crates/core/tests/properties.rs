use std::collections::BTreeSet;

use bredon_core::charts::{Generator, ModulePresentation};
use bredon_core::ground::{point_dim, Bidegree};
use bredon_core::serre::{e2_identity, identity_family, identity_family_page, pathloop};
use bredon_core::spaces::{point_presentation, projective_presentation, sphere_presentation};
use bredon_core::spectra::{
    check_convergence, e_infinity, force_differentials, les_two_row, tensor_pages, turn_page, Abutment,
    DifferentialAssignment, Page, Pins,
};
use proptest::prelude::*;

fn page_strategy() -> impl Strategy<Value = Page> {
    (1usize..=5, 1usize..=5)
        .prop_flat_map(|(w, h)| proptest::collection::vec(proptest::collection::vec(0u32..=2, w), h))
        .prop_map(|rows| Page::from_rows(0, 2, &rows))
}

proptest! {
    #[test]
    fn zero_pages_can_be_interleaved(page in page_strategy(), extra in 0u32..3) {
        let d = DifferentialAssignment::new(2, page.cells().filter(|(_, c)| c.dim > 0).take(1).map(|(pos, _)| (pos, 0)));
        let plain = e_infinity(&page, std::slice::from_ref(&d)).unwrap();
        let mut padded = vec![d];
        for k in 0..extra {
            padded.push(DifferentialAssignment::zero(3 + k));
        }
        let interleaved = e_infinity(&page, &padded).unwrap();
        prop_assert!(interleaved.cells().eq(plain.cells()));
    }

    #[test]
    fn turning_never_goes_negative(page in page_strategy(), ranks in proptest::collection::vec(0u32..=2, 25)) {
        let d = DifferentialAssignment::new(
            2,
            page.cells().zip(ranks).map(|((pos, _), r)| (pos, r)),
        );
        if let Ok(next) = turn_page(&page, &d) {
            for (pos, cell) in page.cells() {
                prop_assert!(next.dim(pos) <= cell.dim);
            }
        }
    }

    #[test]
    fn self_convergence(page in page_strategy()) {
        let target = Abutment::of_page_totals(&page, page.max_degree());
        let report = force_differentials(&page, &target, &Pins::new());
        let sol = report.outcome.unique().expect("unique");
        prop_assert!(sol.is_zero());
    }
}

#[test]
fn unique_solutions_converge() {
    for (r, window) in [(2, 6), (3, 6), (4, 7)] {
        let run = pathloop(4, 2, r, window, &Pins::new()).unwrap();
        if let Some(sol) = run.report.outcome.unique() {
            let einf = e_infinity(&run.e2, &sol.diffs).unwrap();
            assert!(check_convergence(&einf, &run.target).passed(), "r={r}");
        }
    }
}

#[test]
fn identity_pages_converge_to_the_chart() {
    for (p, q) in [(4, 2), (5, 1), (6, 3), (3, 0)] {
        let s = sphere_presentation(p, q).unwrap();
        for r in 0..=4 {
            let fp = identity_family_page(&s, r, 8).unwrap();
            let einf = fp.e_infinity().unwrap();
            let target = Abutment::of_presentation(&s, r, 8);
            assert!(check_convergence(&einf, &target).passed(), "S^{{{p},{q}}} r={r}");
        }
    }
}

#[test]
fn tensor_with_point_is_identity() {
    let weights: BTreeSet<i64> = (0..=4).collect();
    let w: Vec<i64> = weights.iter().copied().collect();
    for base in [point_presentation(), sphere_presentation(4, 2).unwrap(), sphere_presentation(7, 2).unwrap()] {
        let family = identity_family(&base, &weights, 8).unwrap();
        assert_eq!(tensor_pages(&family, &point_presentation(), &w).unwrap(), family);
    }
}

#[test]
fn tensored_cells_sum_shifted_base_cells() {
    let s = sphere_presentation(4, 2).unwrap();
    let fiber = projective_presentation(4, 1).unwrap();
    let weights: BTreeSet<i64> = (0..=3).collect();
    let family = identity_family(&s, &weights, 6).unwrap();
    let out = tensor_pages(&family, &fiber, &[3]).unwrap();
    let page = &out.get(3).unwrap().e2;
    for p in 0..5 {
        for q in 0..7 {
            let expected: u32 = fiber
                .degrees()
                .filter(|g| q >= g.p)
                .map(|g| family.get(3 - g.w).unwrap().e2.dim((p, q - g.p)))
                .sum();
            assert_eq!(page.dim((p, q)), expected, "({p},{q})");
        }
    }
}

#[test]
fn les_matches_rows_when_differentials_vanish() {
    // Trivial action on S^3: the r = 1 page has no room for differentials.
    let s = sphere_presentation(3, 0).unwrap();
    let page = e2_identity(&s, 1, 6).unwrap();
    let rows_match = (0..=6).all(|n| {
        page.total(n) == s.fixed_dim(Bidegree::new(n, 1))
    });
    assert!(rows_match);
    assert!(les_two_row(&s, 6).feasible());
    assert!(les_two_row(&point_presentation(), 4).feasible());
}

#[test]
fn custom_presentation_through_json() {
    let m = ModulePresentation::new(
        "custom",
        vec![Generator::new("1", Bidegree::ZERO), Generator::new("y", Bidegree::new(5, 1))],
        vec![1, 0, 0, 0, 1],
        true,
        true,
    )
    .unwrap();
    let back = ModulePresentation::from_json(&m.to_json()).unwrap();
    assert_eq!(back, m);
    let page = e2_identity(&back, 0, 6).unwrap();
    assert_eq!(page.dim((0, 0)), point_dim(Bidegree::ZERO));
}
