//! `E_2` pages for the identity fibration, the path-loop fibration of a
//! representation sphere, and projective bundles, plus the solver runs
//! built on them.

use std::collections::BTreeSet;

use crate::charts::ModulePresentation;
use crate::ground::{point_dim, Bidegree, GroundElement};
use crate::mackey::NamedFunctor;
use crate::spaces::{loops_model, normalize_projective, projective_presentation, sphere_presentation, LoopRing, SpacesError};
use crate::spectra::{
    action_pins, e_infinity, force_differentials, tensor_pages, Abutment, Cell, CellLabel, FamilyPage, ForceReport, Page,
    PageFamily, Pins, Solution, SolvedPage, SolverOutcome, SpectraError,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SerreError {
    #[error("weight {0} is negative: coefficient rows from the negative cone are unsupported")]
    NegativeWeight(i64),
    #[error("base {0} is not equivariantly 1-connected; only constant coefficient systems are built")]
    NotOneConnected(String),
    #[error("spectral sequence at weight {weight} is not forced ({kind})")]
    NotForced { weight: i64, kind: &'static str },
    #[error(transparent)]
    Spaces(#[from] SpacesError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

impl SerreError {
    pub fn is_unsupported(&self) -> bool {
        matches!(self, SerreError::NegativeWeight(_) | SerreError::NotOneConnected(_))
    }
}

/// Width of the page box for a base: its top generator or top fixed-set degree.
fn base_width(base: &ModulePresentation) -> i64 {
    base.max_p().max(base.fixed_betti.len() as i64 - 1) + 1
}

fn check_base(base: &ModulePresentation, r: i64) -> Result<(), SerreError> {
    if r < 0 {
        return Err(SerreError::NegativeWeight(r));
    }
    if !base.one_connected {
        return Err(SerreError::NotOneConnected(base.name.clone()));
    }
    Ok(())
}

/// Labels of the Bredon cohomology `H^{p,0}(X)` with constant coefficients.
fn bredon_labels(base: &ModulePresentation, p: i64) -> Vec<String> {
    base.fixed_classes(Bidegree::new(p, 0))
        .into_iter()
        .map(|(i, c)| format!("{c}·{}", base.generators[i].label))
        .collect()
}

/// Labels of `H^p_sing(X^G)`.
fn fixed_set_labels(base: &ModulePresentation, p: i64) -> Vec<String> {
    let b = base.betti(p);
    (0..b)
        .map(|i| if b == 1 { format!("fix{p}") } else { format!("fix{p}_{i}") })
        .collect()
}

fn row_cells(base_labels: &[String], coeff: GroundElement, fiber: &str) -> Vec<CellLabel> {
    base_labels
        .iter()
        .map(|b| CellLabel::new(b.clone(), coeff, fiber))
        .collect()
}

/// The two-row page of `id: X -> X` at weight `r`: Bredon cohomology in row
/// 0, fixed-set cohomology in rows `1..=r`.
pub fn e2_identity(x: &ModulePresentation, r: i64, window: i64) -> Result<Page, SerreError> {
    check_base(x, r)?;
    let mut page = Page::new(r, 2, base_width(x), window.max(0) + 1);
    for p in 0..page.width() {
        for q in 0..page.height().min(r + 1) {
            let labels = if q == 0 {
                row_cells(&bredon_labels(x, p), GroundElement::tau_pow(r as u32), "1")
            } else {
                row_cells(&fixed_set_labels(x, p), GroundElement::top(q as u32, (r - q) as u32), "1")
            };
            page.set((p, q), Cell::labelled(labels));
        }
    }
    Ok(page)
}

/// `E_2^{p,q} = H^{p,0}(X; H^{q,r}(F))` for a constant coefficient system.
///
/// Each row is split into catalog summands: constant summands contribute
/// Bredon cohomology of the base, `<Z/2>` summands the cohomology of the
/// fixed set. Rows with any other summand are marked unknown.
pub fn e2_serre(base: &ModulePresentation, fiber: &ModulePresentation, r: i64, window: i64) -> Result<Page, SerreError> {
    check_base(base, r)?;
    let mut page = Page::new(r, 2, base_width(base), window.max(0) + 1);
    for q in 0..page.height() {
        let summands = fiber.coefficient_summands(q, r);
        let known = summands
            .as_ref()
            .is_ok_and(|s| s.iter().all(|s| matches!(s.functor, NamedFunctor::Constant | NamedFunctor::Bracket)));
        for p in 0..page.width() {
            if !known {
                page.set((p, q), Cell::unknown());
                continue;
            }
            let mut labels = Vec::new();
            for s in summands.as_ref().unwrap() {
                let (g, coeff) = s.class.expect("fixed-level summand");
                let gen = &fiber.generators[g].label;
                let base_labels = match s.functor {
                    NamedFunctor::Constant => bredon_labels(base, p),
                    _ => fixed_set_labels(base, p),
                };
                labels.extend(row_cells(&base_labels, coeff, gen));
            }
            page.set((p, q), Cell::labelled(labels));
        }
    }
    Ok(page)
}

/// `H^{n,r}(pt)` for `n = 0..=window`.
pub fn point_abutment(r: i64, window: i64) -> Abutment {
    Abutment::from_fn(r, window, |n| point_dim(Bidegree::new(n, r)))
}

/// Solve the identity spectral sequence of `x` at weight `r` against `H^{*,r}(X)`.
///
/// From weight 2 on, dimension counts alone leave a choice; ranks are carried
/// up from weight `r - 1` along multiplication by `tau`.
pub fn identity_family_page(x: &ModulePresentation, r: i64, window: i64) -> Result<FamilyPage, SerreError> {
    let e2 = e2_identity(x, r, window)?;
    let pins = if r >= 1 {
        let lower = identity_family_page(x, r - 1, window)?;
        let solved = SolvedPage {
            solution: Solution { diffs: lower.diffs },
            e2: lower.e2,
            window,
        };
        action_pins(&solved, GroundElement::TAU, &e2)?
    } else {
        Pins::new()
    };
    let target = Abutment::of_presentation(x, r, window);
    let report = force_differentials(&e2, &target, &pins);
    match report.outcome {
        SolverOutcome::Unique(sol) => Ok(FamilyPage { e2, diffs: sol.diffs }),
        other => Err(SerreError::NotForced {
            weight: r,
            kind: other.kind(),
        }),
    }
}

pub fn identity_family(x: &ModulePresentation, weights: &BTreeSet<i64>, window: i64) -> Result<PageFamily, SerreError> {
    let mut family = PageFamily::default();
    for &w in weights {
        family.insert(identity_family_page(x, w, window)?);
    }
    Ok(family)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectiveBundle {
    pub fiber: ModulePresentation,
    /// Identity pages of the base at every weight used, including `r`.
    pub base_family: PageFamily,
    /// The tensored page at weight `r`, with the base differentials carried along.
    pub family: PageFamily,
}

/// Spectral sequence of `P(E) -> X` for a bundle with fiber `P(R^{n,m})`.
pub fn projective_bundle(base: &ModulePresentation, n: i64, m: i64, r: i64, window: i64) -> Result<ProjectiveBundle, SerreError> {
    check_base(base, r)?;
    let (n, m) = normalize_projective(n, m)?;
    let fiber = projective_presentation(n, m)?;
    let mut weights: BTreeSet<i64> = fiber.degrees().map(|g| r - g.w).collect();
    weights.insert(r);
    if let Some(&w) = weights.iter().find(|&&w| w < 0) {
        return Err(SerreError::NegativeWeight(w));
    }
    let base_family = identity_family(base, &weights, window)?;
    let family = tensor_pages(&base_family, &fiber, &[r])?;
    Ok(ProjectiveBundle {
        fiber,
        base_family,
        family,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathLoop {
    pub e2: Page,
    pub target: Abutment,
    pub pins: Pins,
    pub report: ForceReport,
    /// Present when the solver output is unique.
    pub e_infinity: Option<Page>,
    pub window: i64,
}

impl PathLoop {
    pub fn solved(&self) -> Option<SolvedPage> {
        self.report.outcome.unique().map(|s| SolvedPage {
            e2: self.e2.clone(),
            solution: s.clone(),
            window: self.window,
        })
    }
}

fn loops_cutoff(p: i64, window: i64) -> i64 {
    window.max(1) * (p - 1)
}

fn pathloop_inputs(p: i64, q: i64, window: i64) -> Result<(ModulePresentation, ModulePresentation, LoopRing), SerreError> {
    let sphere = sphere_presentation(p, q)?;
    if !sphere.one_connected {
        return Err(SerreError::NotOneConnected(sphere.name));
    }
    let (loops, ring) = loops_model(p, q, loops_cutoff(p, window))?;
    Ok((sphere, loops, ring))
}

/// `E_2` page of `Omega S^{p,q} -> P S^{p,q} -> S^{p,q}` at weight `r`.
pub fn pathloop_page(p: i64, q: i64, r: i64, window: i64) -> Result<Page, SerreError> {
    let (sphere, loops, _) = pathloop_inputs(p, q, window)?;
    e2_serre(&sphere, &loops, r, window)
}

/// Build the path-loop page and force its differentials against `H^{*,r}(pt)`.
pub fn pathloop(p: i64, q: i64, r: i64, window: i64, pins: &Pins) -> Result<PathLoop, SerreError> {
    let e2 = pathloop_page(p, q, r, window)?;
    let target = point_abutment(r, window);
    let report = force_differentials(&e2, &target, pins);
    let e_infinity = match report.outcome.unique() {
        Some(sol) => Some(e_infinity(&e2, &sol.diffs)?),
        None => None,
    };
    Ok(PathLoop {
        e2,
        target,
        pins: pins.clone(),
        report,
        e_infinity,
        window,
    })
}

/// Solve at weight `from` first and carry its `d_2` ranks to weight `r` along
/// multiplication by `tau^(r - from)`.
pub fn pathloop_pinned(p: i64, q: i64, r: i64, window: i64, from: i64) -> Result<PathLoop, SerreError> {
    let lower = pathloop(p, q, from, window, &Pins::new())?;
    let Some(solved) = lower.solved() else {
        return Err(SerreError::NotForced {
            weight: from,
            kind: lower.report.outcome.kind(),
        });
    };
    let target_page = pathloop_page(p, q, r, window)?;
    let shift = u32::try_from(r - from).map_err(|_| SerreError::NegativeWeight(r - from))?;
    let pins = action_pins(&solved, GroundElement::tau_pow(shift), &target_page)?;
    pathloop(p, q, r, window, &pins)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExteriorReport {
    pub cell: (i64, i64),
    pub solutions: usize,
    /// `d_2` out of the cell is injective in every solution.
    pub deduction_holds: bool,
    pub ring_square_zero: bool,
}

impl ExteriorReport {
    pub fn passed(&self) -> bool {
        self.deduction_holds && self.ring_square_zero
    }
}

/// Check that `a_1^2 = 0` for `Omega S^{p,q}` using the loop ring built by `spaces`.
pub fn exterior_check(p: i64, q: i64) -> Result<ExteriorReport, SerreError> {
    let (_, _, ring) = pathloop_inputs(p, q, 2 * (p - 1) + 1)?;
    exterior_check_with_ring(p, q, &ring)
}

/// At weight `2q`, the cell `(0, 2(p-1))` holds `a_1^2` and `a_2`. Leibniz
/// gives `d_2(a_1^2) = 2 a_1 d_2(a_1) = 0`, so when the forced `d_2` out of
/// that cell is injective, `a_1^2` must vanish. The check passes when this
/// deduction goes through and `ring` agrees.
pub fn exterior_check_with_ring(p: i64, q: i64, ring: &LoopRing) -> Result<ExteriorReport, SerreError> {
    let window = 2 * (p - 1) + 1;
    let run = pathloop(p, q, 2 * q, window, &Pins::new())?;
    let cell = (0, 2 * (p - 1));
    let dim = run.e2.dim(cell);
    let solutions = run.report.outcome.solutions();
    let deduction_holds = dim > 0 && !solutions.is_empty() && solutions.iter().all(|s| s.rank(2, cell) == dim);
    Ok(ExteriorReport {
        cell,
        solutions: solutions.len(),
        deduction_holds,
        ring_square_zero: ring.mul(1, 1).is_none(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{point_presentation, projective_presentation};
    use crate::spectra::DifferentialAssignment;

    fn column(page: &Page, p: i64, rows: std::ops::Range<i64>) -> Vec<u32> {
        rows.map(|q| page.dim((p, q))).collect()
    }

    #[test]
    fn identity_rows() {
        let s42 = sphere_presentation(4, 2).unwrap();
        let page = e2_identity(&s42, 1, 4).unwrap();
        let row = |q| (0..5).map(|p| page.dim((p, q))).collect::<Vec<_>>();
        assert_eq!(row(0), vec![1, 0, 0, 0, 1]);
        assert_eq!(row(1), vec![1, 0, 1, 0, 0]);
        assert_eq!(row(2), vec![0; 5]);

        let pt = e2_identity(&point_presentation(), 3, 5).unwrap();
        assert_eq!(column(&pt, 0, 0..6), vec![1, 1, 1, 1, 0, 0]);

        let r0 = e2_identity(&s42, 0, 4).unwrap();
        assert!((1..5).all(|q| (0..5).all(|p| r0.dim((p, q)) == 0)));
        assert_eq!(r0.dim((4, 0)), 1);
    }

    #[test]
    fn builders_refuse_unsupported_input() {
        let s42 = sphere_presentation(4, 2).unwrap();
        assert!(e2_identity(&s42, -1, 4).unwrap_err().is_unsupported());
        let s11 = sphere_presentation(1, 1).unwrap();
        assert!(matches!(e2_identity(&s11, 1, 4), Err(SerreError::NotOneConnected(_))));
        assert!(e2_serre(&s11, &point_presentation(), 1, 4).is_err());
        assert!(pathloop(4, 3, 2, 6, &Pins::new()).is_err());
    }

    #[test]
    fn figure_four_grid() {
        let page = pathloop_page(4, 2, 2, 6).unwrap();
        assert_eq!(column(&page, 0, 0..6), vec![1, 1, 1, 1, 0, 0]);
        assert_eq!(column(&page, 2, 0..6), vec![0, 1, 1, 0, 0, 0]);
        assert_eq!(column(&page, 4, 0..6), vec![1, 0, 0, 1, 0, 0]);
        for p in [1, 3] {
            assert_eq!(column(&page, p, 0..6), vec![0; 6]);
        }
        assert!((0..5).all(|p| page.is_unknown((p, 6))));
    }

    #[test]
    fn figure_five_grid() {
        let page = pathloop_page(4, 2, 4, 7).unwrap();
        assert_eq!(column(&page, 0, 0..7), vec![1, 1, 1, 2, 2, 1, 1]);
        assert_eq!(column(&page, 2, 0..7), vec![0, 1, 1, 1, 2, 1, 0]);
        assert_eq!(column(&page, 4, 0..7), vec![1, 0, 0, 1, 0, 0, 1]);
        assert!(!page.has_unknown());
    }

    #[test]
    fn weight_two_is_forced() {
        let run = pathloop(4, 2, 2, 6, &Pins::new()).unwrap();
        let sol = run.report.outcome.unique().unwrap();
        assert_eq!(sol.diffs, vec![DifferentialAssignment::new(2, [((0, 3), 1), ((2, 1), 1)])]);
        let einf = run.e_infinity.unwrap();
        assert_eq!((0..6).map(|n| einf.total(n)).collect::<Vec<_>>(), vec![1, 1, 1, 0, 0, 0]);
    }

    #[test]
    fn weight_four_needs_the_tau_pin() {
        let free = pathloop(4, 2, 4, 7, &Pins::new()).unwrap();
        let SolverOutcome::Ambiguous(sols) = &free.report.outcome else {
            panic!("expected ambiguity, got {:?}", free.report.outcome);
        };
        assert_eq!(sols.len(), 2);
        for s in sols {
            assert_eq!(s.rank(2, (0, 6)), 1);
        }
        let pinned = pathloop_pinned(4, 2, 4, 7, 2).unwrap();
        assert_eq!(pinned.pins.get(&(2, (2, 1))), Some(&1));
        let sol = pinned.report.outcome.unique().expect("unique with pins");
        assert_eq!(sol.rank(2, (0, 6)), 1);
        assert_eq!(sol.rank(2, (2, 1)), 1);
        assert!(sols.contains(sol));
    }

    #[test]
    fn exterior_squares() {
        assert!(exterior_check(4, 2).unwrap().passed());
        assert!(exterior_check(3, 1).unwrap().passed());
        let mut ring = loops_model(4, 2, 9).unwrap().1;
        ring.squares[0] = Some(2);
        let report = exterior_check_with_ring(4, 2, &ring).unwrap();
        assert!(report.deduction_holds);
        assert!(!report.passed());
    }

    #[test]
    fn serre_with_point_fiber_is_identity() {
        let bases = [sphere_presentation(4, 2).unwrap(), sphere_presentation(5, 1).unwrap(), point_presentation()];
        for base in &bases {
            for r in 0..=4 {
                let a = e2_serre(base, &point_presentation(), r, 6).unwrap();
                let b = e2_identity(base, r, 6).unwrap();
                assert_eq!(a, b, "{} r={r}", base.name);
            }
        }
    }

    #[test]
    fn bundle_over_a_point_is_the_fiber_chart() {
        let pt = point_presentation();
        let bundle = projective_bundle(&pt, 3, 1, 1, 4).unwrap();
        let fiber = projective_presentation(3, 1).unwrap();
        let page = bundle.family.get(1).unwrap();
        assert!(page.diffs.is_empty());
        for n in 0..=4 {
            assert_eq!(page.e2.total(n), fiber.fixed_dim(Bidegree::new(n, 1)), "n={n}");
        }
    }
}
