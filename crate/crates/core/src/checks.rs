//! The reproduction suite behind `bredon verify`: each check recomputes a
//! published table or chart and compares it with frozen values.

use std::collections::BTreeMap;

use crate::ground::{orbit_dim, orbit_mul, point_dim, Bidegree, GroundElement, OrbitElement};
use crate::mackey::NamedFunctor;
use crate::serre::{e2_identity, exterior_check, pathloop, pathloop_page, pathloop_pinned, projective_bundle, SerreError};
use crate::spaces::{james_cells, loops_presentation, normalize_projective, projective_presentation, rp_infty_mul, sphere_presentation, ProjectiveClass};
use crate::spectra::{
    force_differentials, injection_check, les_two_row, turn_page, Abutment, DifferentialAssignment, Page, Pins, SolverOutcome,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = Result<String, String>;
type NamedCheck = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: SerreError) -> String {
    e.to_string()
}

fn column(page: &Page, p: i64, rows: std::ops::Range<i64>) -> Vec<u32> {
    rows.map(|q| page.dim((p, q))).collect()
}

fn ground_cones() -> Outcome {
    for p in -5..=5 {
        for w in -5..=5 {
            let top = 0 <= p && p <= w;
            let bottom = p <= 0 && w <= p - 2;
            let d = Bidegree::new(p, w);
            ensure(point_dim(d) == u32::from(top || bottom), || format!("dimension wrong at {d}"))?;
        }
    }
    let named = [
        (GroundElement::RHO, (1, 1)),
        (GroundElement::TAU, (0, 1)),
        (GroundElement::THETA, (0, -2)),
        (GroundElement::bottom(1, 0), (-1, -3)),
        (GroundElement::bottom(0, 1), (0, -3)),
    ];
    for (x, (p, w)) in named {
        ensure(x.bidegree() == Some(Bidegree::new(p, w)), || format!("{x} is not at ({p},{w})"))?;
    }
    for a in 0..=4 {
        for b in 0..=4 {
            let x = GroundElement::bottom(a, b);
            ensure(GroundElement::RHO.mul(GroundElement::bottom(a + 1, b)) == x, || format!("rho does not divide into {x}"))?;
            ensure(GroundElement::TAU.mul(GroundElement::bottom(a, b + 1)) == x, || format!("tau does not divide into {x}"))?;
        }
    }
    Ok("cones and divisibility on [-5,5]^2".into())
}

fn orbit_ring() -> Outcome {
    for p in -5..=5 {
        for w in -5..=5 {
            ensure(orbit_dim(Bidegree::new(p, w)) == u32::from(p == 0), || format!("orbit dimension wrong at ({p},{w})"))?;
        }
    }
    for j in -5..=5 {
        for k in -5..=5 {
            ensure(orbit_mul(OrbitElement::T(j), OrbitElement::T(k)) == OrbitElement::T(j + k), || format!("t^{j} t^{k}"))?;
        }
    }
    Ok("Laurent ring in p = 0".into())
}

fn mackey_catalog() -> Outcome {
    for f in NamedFunctor::ALL {
        f.shape()
            .check_axioms()
            .map_err(|bad| format!("{f} violates axioms {bad:?}"))?;
    }
    let c = NamedFunctor::Constant.shape();
    let res_tr = c.restriction().mul(c.transfer()).expect("square");
    let id_plus = crate::f2::F2Matrix::identity(1).add(c.involution()).expect("square");
    ensure(res_tr.is_zero() && id_plus.is_zero(), || "constant functor: res tr != 0 or id + invol != 0".into())?;
    Ok("five catalog functors".into())
}

fn projective_spaces() -> Outcome {
    let p = projective_presentation(4, 2).map_err(|e| e.to_string())?;
    let degrees: Vec<(i64, i64)> = p.degrees().map(|d| (d.p, d.w)).collect();
    ensure(degrees == [(0, 0), (1, 1), (2, 1), (3, 2)], || format!("P(R^4,2) generators {degrees:?}"))?;
    let sq = rp_infty_mul(ProjectiveClass::a(), ProjectiveClass::a()).map_err(|e| e.to_string())?;
    ensure(sq.to_string() == "rho a + tau b", || format!("a^2 = {sq}"))?;
    ensure(normalize_projective(4, 3) == Ok((4, 1)), || "normalize(4,3)".into())?;
    Ok("generators, a^2 = rho a + tau b, normalization".into())
}

fn loop_model() -> Outcome {
    let l = loops_presentation(4, 2, 9).map_err(|e| e.to_string())?;
    let degrees: Vec<(i64, i64)> = l.degrees().map(|d| (d.p, d.w)).collect();
    ensure(degrees == [(0, 0), (3, 2), (6, 4), (9, 6)], || format!("loop generators {degrees:?}"))?;
    let cells = james_cells(&[Bidegree::new(3, 2)], 9).map_err(|e| e.to_string())?;
    ensure(cells.counts().values().all(|&c| c == 1), || "James counts are not all 1".into())?;
    let wide = loops_presentation(4, 2, 18).map_err(|e| e.to_string())?;
    let got: Vec<NamedFunctor> = (0..=6)
        .map(|q| wide.mackey_eval(q, 2).to_named().ok().and_then(|d| d.as_single()).unwrap_or(NamedFunctor::Zero))
        .collect();
    use NamedFunctor::*;
    let want = [Constant, Bracket, Bracket, Constant, Zero, Zero, DualConstant];
    ensure(got == want, || format!("coefficients at weight 2: {got:?}"))?;
    Ok("generators, James counts, coefficient list".into())
}

fn weight_two() -> Outcome {
    let page = pathloop_page(4, 2, 2, 6).map_err(err)?;
    let cols = [
        (0, vec![1, 1, 1, 1, 0, 0]),
        (2, vec![0, 1, 1, 0, 0, 0]),
        (4, vec![1, 0, 0, 1, 0, 0]),
    ];
    for (p, want) in cols {
        ensure(column(&page, p, 0..6) == want, || format!("column {p}"))?;
    }
    ensure(page.is_unknown((0, 6)), || "(0,6) should be ??".into())?;
    let run = pathloop(4, 2, 2, 6, &Pins::new()).map_err(err)?;
    let sol = run.report.outcome.unique().ok_or("solver not unique")?;
    ensure(sol.rank(2, (0, 3)) == 1, || "d2 (0,3)->(2,2) is not rank 1".into())?;
    let einf = run.e_infinity.ok_or("no E_infinity")?;
    let totals: Vec<u32> = (0..6).map(|n| einf.total(n)).collect();
    ensure(totals == [1, 1, 1, 0, 0, 0], || format!("E_infinity totals {totals:?}"))?;
    Ok(format!("unique: {sol}"))
}

fn weight_four() -> Outcome {
    let page = pathloop_page(4, 2, 4, 7).map_err(err)?;
    let cols = [
        (0, vec![1, 1, 1, 2, 2, 1, 1]),
        (2, vec![0, 1, 1, 1, 2, 1, 0]),
        (4, vec![1, 0, 0, 1, 0, 0, 1]),
    ];
    for (p, want) in cols {
        ensure(column(&page, p, 0..7) == want, || format!("column {p}"))?;
    }
    let free = pathloop(4, 2, 4, 7, &Pins::new()).map_err(err)?;
    let n = match &free.report.outcome {
        SolverOutcome::Ambiguous(v) => v.len(),
        other => return Err(format!("unpinned outcome is {}", other.kind())),
    };
    ensure(n == 2, || format!("{n} unpinned solutions"))?;
    let pinned = pathloop_pinned(4, 2, 4, 7, 2).map_err(err)?;
    let sol = pinned.report.outcome.unique().ok_or("pinned solver not unique")?;
    ensure(sol.rank(2, (0, 6)) == 1, || "d2 (0,6)->(2,5) is not rank 1".into())?;
    ensure(exterior_check(4, 2).map_err(err)?.passed(), || "a1^2 = 0 not confirmed".into())?;
    Ok("2 solutions unpinned, unique with tau^2 pins, a1^2 = 0".into())
}

fn two_row_sequence() -> Outcome {
    let s42 = sphere_presentation(4, 2).map_err(|e| e.to_string())?;
    let page = e2_identity(&s42, 1, 4).map_err(err)?;
    let row = |q| (0..5).map(|p| page.dim((p, q))).collect::<Vec<u32>>();
    ensure(row(0) == [1, 0, 0, 0, 1] && row(1) == [1, 0, 1, 0, 0], || "identity rows".into())?;
    ensure(les_two_row(&s42, 6).feasible(), || "sequence infeasible".into())?;
    let mut broken = s42.clone();
    broken.fixed_betti[0] = 0;
    broken.fixed_connected = false;
    ensure(!les_two_row(&broken, 6).feasible(), || "corrupted Betti numbers accepted".into())?;
    Ok("rows, feasibility, negative control".into())
}

fn bundle_collapse() -> Outcome {
    let s42 = sphere_presentation(4, 2).map_err(|e| e.to_string())?;
    let window = 6;
    let bundle = projective_bundle(&s42, 3, 1, 1, window).map_err(err)?;
    let einf = bundle.family.get(1).and_then(|p| p.e_infinity()).map_err(|e| e.to_string())?;
    let fiber = projective_presentation(3, 1).map_err(|e| e.to_string())?;
    for n in 0..=window {
        let expected: u32 = s42
            .degrees()
            .flat_map(|g| fiber.degrees().map(move |h| g + h))
            .map(|d| point_dim(Bidegree::new(n, 1) - d))
            .sum();
        ensure(einf.total(n) == expected, || format!("degree {n}: {} vs {expected}", einf.total(n)))?;
    }
    let mut sub = crate::spectra::PageFamily::default();
    sub.insert(bundle.base_family.get(1).map_err(|e| e.to_string())?.clone());
    let inj = injection_check(&sub, &bundle.family).map_err(|e| e.to_string())?;
    ensure(inj.passed(), || format!("{inj:?}"))?;
    Ok("E_infinity matches the tensor product, injection holds".into())
}

fn engine_properties() -> Outcome {
    // Every d2 on every 3x3 page with cells of dimension at most 1.
    let mut pages = 0;
    for mask in 0u32..512 {
        let rows: Vec<Vec<u32>> = (0..3).map(|q| (0..3).map(|p| mask >> (3 * q + p) & 1).collect()).collect();
        let page = Page::from_rows(0, 2, &rows);
        for a in 0..=1 {
            for b in 0..=1 {
                let d = DifferentialAssignment::new(2, [((0, 1), a), ((0, 2), b)]);
                let Ok(next) = turn_page(&page, &d) else {
                    continue;
                };
                pages += 1;
                for (pos, _) in page.cells() {
                    let touched = d.arrows.iter().filter(|(&f, &r)| r > 0 && (f == pos || d.target(f) == pos)).count() as u32;
                    ensure(next.dim(pos) + touched == page.dim(pos), || format!("bookkeeping at {pos:?}"))?;
                }
            }
        }
    }
    let page = Page::from_rows(1, 2, &[vec![1, 0, 0, 0, 1], vec![1, 0, 1, 0, 0]]);
    let own = force_differentials(&page, &Abutment::of_page_totals(&page, 5), &Pins::new());
    ensure(own.outcome.unique().is_some_and(|s| s.is_zero()), || "self-convergence is not the zero solution".into())?;
    let runs: BTreeMap<String, usize> = (0..20)
        .map(|_| format!("{:?}", pathloop(4, 2, 4, 7, &Pins::new()).map(|r| r.report.outcome)))
        .fold(BTreeMap::new(), |mut m, s| {
            *m.entry(s).or_default() += 1;
            m
        });
    ensure(runs.len() == 1, || "solver output varies between runs".into())?;
    Ok(format!("{pages} feasible turns, self-convergence, 20 identical runs"))
}

/// Named checks in suite order.
pub fn suite() -> Vec<NamedCheck> {
    vec![
        ("ground ring cones", ground_cones as fn() -> Outcome),
        ("orbit ring", orbit_ring),
        ("Mackey functor catalog", mackey_catalog),
        ("projective spaces", projective_spaces),
        ("loop space model", loop_model),
        ("path-loop page, weight 2", weight_two),
        ("path-loop page, weight 4", weight_four),
        ("two-row exact sequence", two_row_sequence),
        ("projective bundle collapse", bundle_collapse),
        ("page engine properties", engine_properties),
    ]
}

pub fn run_suite() -> Vec<CheckResult> {
    suite()
        .into_iter()
        .map(|(name, f)| match f() {
            Ok(detail) => CheckResult { name, passed: true, detail },
            Err(detail) => CheckResult { name, passed: false, detail },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn suite_passes() {
        for r in super::run_suite() {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}
