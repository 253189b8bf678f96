//! Spectral sequence pages at the level of F2 dimensions.
//!
//! A [`Page`] is a finite box of cells `(p, q)` with `0 <= p < width` and
//! `0 <= q < height`. Differentials are recorded by rank only: on page `n`
//! the arrow out of `(p, q)` lands in `(p + n, q - n + 1)`. `d o d = 0` is
//! enforced through rank feasibility: the ranks into and out of a cell never
//! exceed its dimension.
//!
//! Unknown cells (coefficient functors outside the catalog) carry no
//! dimension. Every total degree an unknown cell touches is quarantined:
//! excluded from convergence checks and reported back.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::charts::ModulePresentation;
use crate::ground::{Bidegree, GroundElement};

pub type CellPos = (i64, i64);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpectraError {
    #[error("assignment is for page {assignment} but the page is E_{page}")]
    PageMismatch { page: u32, assignment: u32 },
    #[error("d_{page} out of {from:?} has rank {rank}, more than a cell dimension allows")]
    RankTooLarge { page: u32, from: CellPos, rank: u32 },
    #[error("d_{page} out of {from:?} leaves the page box")]
    OutOfBox { page: u32, from: CellPos },
    #[error("d_{page} out of {from:?} touches an unknown cell")]
    UnknownContact { page: u32, from: CellPos },
    #[error("ranks into and out of {cell:?} exceed its dimension {dim}")]
    Infeasible { cell: CellPos, dim: u32 },
    #[error("assignments must be ordered by page; saw d_{got} after reaching E_{at}")]
    Unordered { got: u32, at: u32 },
    #[error("family has no page at weight {0}")]
    MissingWeight(i64),
    #[error("action factor {factor} must be tau^{expected}")]
    PinFactor { factor: GroundElement, expected: i64 },
    #[error("malformed page document: {0}")]
    Json(String),
}

/// One basis class of an `E_2` cell: a base class tensored with a fiber class
/// `coeff * generator`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellLabel {
    pub base: String,
    pub coeff: GroundElement,
    pub fiber: String,
}

impl CellLabel {
    pub fn new(base: impl Into<String>, coeff: GroundElement, fiber: impl Into<String>) -> Self {
        Self {
            base: base.into(),
            coeff,
            fiber: fiber.into(),
        }
    }

    /// Multiply the fiber coefficient by a ground ring class.
    pub fn act(&self, factor: GroundElement) -> Option<CellLabel> {
        let coeff = factor.mul(self.coeff);
        (!coeff.is_zero()).then(|| CellLabel {
            coeff,
            ..self.clone()
        })
    }
}

impl fmt::Display for CellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ⊗ {}·{}", self.base, self.coeff, self.fiber)
    }
}

impl FromStr for CellLabel {
    type Err = SpectraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SpectraError::Json(format!("bad cell label {s:?}"));
        let (base, rest) = s.split_once(" ⊗ ").ok_or_else(bad)?;
        let (coeff, fiber) = rest.split_once('·').ok_or_else(bad)?;
        Ok(CellLabel {
            base: base.to_string(),
            coeff: coeff.parse().map_err(|_| bad())?,
            fiber: fiber.to_string(),
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cell {
    pub dim: u32,
    pub unknown: bool,
    /// Basis labels on `E_2`; dropped once a differential changes the cell.
    pub labels: Vec<CellLabel>,
}

impl Cell {
    pub fn known(dim: u32) -> Self {
        Self {
            dim,
            unknown: false,
            labels: Vec::new(),
        }
    }

    pub fn unknown() -> Self {
        Self {
            dim: 0,
            unknown: true,
            labels: Vec::new(),
        }
    }

    pub fn labelled(labels: Vec<CellLabel>) -> Self {
        Self {
            dim: labels.len() as u32,
            unknown: false,
            labels,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    weight: i64,
    index: u32,
    width: i64,
    height: i64,
    cells: BTreeMap<CellPos, Cell>,
}

impl Page {
    /// An all-zero page on the box `0 <= p < width`, `0 <= q < height`.
    pub fn new(weight: i64, index: u32, width: i64, height: i64) -> Self {
        let mut cells = BTreeMap::new();
        for p in 0..width.max(0) {
            for q in 0..height.max(0) {
                cells.insert((p, q), Cell::default());
            }
        }
        Self {
            weight,
            index,
            width: width.max(0),
            height: height.max(0),
            cells,
        }
    }

    /// Build from rows of dimensions, `rows[q][p]`.
    pub fn from_rows(weight: i64, index: u32, rows: &[Vec<u32>]) -> Self {
        let width = rows.iter().map(Vec::len).max().unwrap_or(0) as i64;
        let mut page = Page::new(weight, index, width, rows.len() as i64);
        for (q, row) in rows.iter().enumerate() {
            for (p, &dim) in row.iter().enumerate() {
                page.set((p as i64, q as i64), Cell::known(dim));
            }
        }
        page
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn width(&self) -> i64 {
        self.width
    }

    pub fn height(&self) -> i64 {
        self.height
    }

    pub fn contains(&self, (p, q): CellPos) -> bool {
        (0..self.width).contains(&p) && (0..self.height).contains(&q)
    }

    /// Panics if `pos` is outside the box.
    pub fn set(&mut self, pos: CellPos, cell: Cell) {
        assert!(self.contains(pos), "cell {pos:?} outside the page box");
        self.cells.insert(pos, cell);
    }

    pub fn cell(&self, pos: CellPos) -> Option<&Cell> {
        self.cells.get(&pos)
    }

    pub fn cells(&self) -> impl Iterator<Item = (CellPos, &Cell)> {
        self.cells.iter().map(|(&k, v)| (k, v))
    }

    /// Dimension of a known cell; zero outside the box and on unknown cells.
    pub fn dim(&self, pos: CellPos) -> u32 {
        self.cells.get(&pos).map_or(0, |c| if c.unknown { 0 } else { c.dim })
    }

    pub fn is_unknown(&self, pos: CellPos) -> bool {
        self.cells.get(&pos).is_some_and(|c| c.unknown)
    }

    pub fn has_unknown(&self) -> bool {
        self.cells.values().any(|c| c.unknown)
    }

    /// Sum of known dimensions on the antidiagonal `p + q = n`.
    pub fn total(&self, n: i64) -> u32 {
        self.cells
            .iter()
            .filter(|(&(p, q), _)| p + q == n)
            .map(|(_, c)| if c.unknown { 0 } else { c.dim })
            .sum()
    }

    pub fn max_degree(&self) -> i64 {
        self.width + self.height - 2
    }

    /// The last page on which some arrow can stay inside the box.
    pub fn last_possible_page(&self) -> u32 {
        (self.width - 1).min(self.height).max(1) as u32
    }

    pub fn with_weight(mut self, weight: i64) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_index(mut self, index: u32) -> Self {
        self.index = index;
        self
    }

    /// Grow the box to at least the given size, padding with zeros.
    pub fn padded(&self, width: i64, height: i64) -> Page {
        let mut out = Page::new(self.weight, self.index, width.max(self.width), height.max(self.height));
        for (&pos, cell) in &self.cells {
            out.cells.insert(pos, cell.clone());
        }
        out
    }

    /// Degrees excluded from comparison because an unknown cell can reach them.
    pub fn quarantined_degrees(&self) -> BTreeSet<i64> {
        let mut out = BTreeSet::new();
        let last = self.last_possible_page().max(2);
        for (&(p, q), cell) in &self.cells {
            if !cell.unknown {
                continue;
            }
            out.insert(p + q);
            for n in 2..=i64::from(last) {
                for other in [(p + n, q - n + 1), (p - n, q + n - 1)] {
                    if self.contains(other) && !self.is_unknown(other) && self.dim(other) > 0 {
                        out.insert(other.0 + other.1);
                    }
                }
            }
        }
        out
    }
}

/// Ranks of `d_n` on one page, keyed by source cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DifferentialAssignment {
    pub page: u32,
    pub arrows: BTreeMap<CellPos, u32>,
}

impl DifferentialAssignment {
    pub fn zero(page: u32) -> Self {
        Self {
            page,
            arrows: BTreeMap::new(),
        }
    }

    pub fn new(page: u32, arrows: impl IntoIterator<Item = (CellPos, u32)>) -> Self {
        Self {
            page,
            arrows: arrows.into_iter().collect(),
        }
    }

    pub fn target(&self, (p, q): CellPos) -> CellPos {
        let n = i64::from(self.page);
        (p + n, q - n + 1)
    }

    pub fn rank(&self, from: CellPos) -> u32 {
        self.arrows.get(&from).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.arrows.values().all(|&r| r == 0)
    }

    /// Same assignment with zero-rank arrows removed.
    pub fn normalized(&self) -> Self {
        Self {
            page: self.page,
            arrows: self.arrows.iter().filter(|(_, &r)| r > 0).map(|(&k, &v)| (k, v)).collect(),
        }
    }
}

impl fmt::Display for DifferentialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .arrows
            .iter()
            .map(|(&from, r)| {
                let to = self.target(from);
                format!("d{}({},{})->({},{}): {r}", self.page, from.0, from.1, to.0, to.1)
            })
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Apply one page of differentials.
pub fn turn_page(page: &Page, d: &DifferentialAssignment) -> Result<Page, SpectraError> {
    if d.page != page.index {
        return Err(SpectraError::PageMismatch {
            page: page.index,
            assignment: d.page,
        });
    }
    let mut used: BTreeMap<CellPos, u32> = BTreeMap::new();
    for (&from, &rank) in &d.arrows {
        if rank == 0 {
            continue;
        }
        let to = d.target(from);
        if !page.contains(from) || !page.contains(to) {
            return Err(SpectraError::OutOfBox { page: d.page, from });
        }
        if page.is_unknown(from) || page.is_unknown(to) {
            return Err(SpectraError::UnknownContact { page: d.page, from });
        }
        if rank > page.dim(from) || rank > page.dim(to) {
            return Err(SpectraError::RankTooLarge {
                page: d.page,
                from,
                rank,
            });
        }
        *used.entry(from).or_default() += rank;
        *used.entry(to).or_default() += rank;
    }
    let mut out = page.clone();
    out.index = page.index + 1;
    for (pos, n) in used {
        let dim = page.dim(pos);
        if n > dim {
            return Err(SpectraError::Infeasible { cell: pos, dim });
        }
        let cell = out.cells.get_mut(&pos).expect("checked in box");
        cell.dim = dim - n;
        cell.labels.clear();
    }
    Ok(out)
}

/// Run the assignments in page order and return the stable page.
pub fn e_infinity(page: &Page, diffs: &[DifferentialAssignment]) -> Result<Page, SpectraError> {
    let mut cur = page.clone();
    for d in diffs {
        if d.page < cur.index {
            return Err(SpectraError::Unordered {
                got: d.page,
                at: cur.index,
            });
        }
        cur.index = d.page;
        cur = turn_page(&cur, d)?;
    }
    cur.index = cur.index.max(page.last_possible_page() + 1);
    Ok(cur)
}

/// Target dimensions `H^{n,r}` of the abutment, keyed by `(n, r)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Abutment {
    dims: BTreeMap<(i64, i64), u32>,
}

impl Abutment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Degrees `0..=window` at weight `r`, dimensions from `f(n)`.
    pub fn from_fn(r: i64, window: i64, f: impl Fn(i64) -> u32) -> Self {
        let mut a = Abutment::new();
        for n in 0..=window {
            a.insert(n, r, f(n));
        }
        a
    }

    /// `H^{*,r}` of a free presentation.
    pub fn of_presentation(m: &ModulePresentation, r: i64, window: i64) -> Self {
        Self::from_fn(r, window, |n| m.fixed_dim(Bidegree::new(n, r)))
    }

    /// Totals of a page, as if it had already converged.
    pub fn of_page_totals(page: &Page, window: i64) -> Self {
        Self::from_fn(page.weight, window, |n| page.total(n))
    }

    pub fn insert(&mut self, n: i64, r: i64, dim: u32) {
        self.dims.insert((n, r), dim);
    }

    pub fn get(&self, n: i64, r: i64) -> Option<u32> {
        self.dims.get(&(n, r)).copied()
    }

    pub fn degrees(&self, r: i64) -> Vec<i64> {
        self.dims.keys().filter(|(_, w)| *w == r).map(|(n, _)| *n).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub degree: i64,
    pub found: u32,
    pub expected: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub weight: i64,
    pub checked: Vec<i64>,
    pub quarantined: Vec<i64>,
    pub mismatches: Vec<Mismatch>,
}

impl ConvergenceReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn checked_degrees(page: &Page, target: &Abutment) -> (Vec<i64>, Vec<i64>) {
    let quarantine = page.quarantined_degrees();
    let all = target.degrees(page.weight);
    let checked = all.iter().copied().filter(|n| !quarantine.contains(n)).collect();
    let quarantined = all.into_iter().filter(|n| quarantine.contains(n)).collect();
    (checked, quarantined)
}

/// Compare antidiagonal totals of `e_inf` with the abutment at the page's weight.
pub fn check_convergence(e_inf: &Page, target: &Abutment) -> ConvergenceReport {
    let (checked, quarantined) = checked_degrees(e_inf, target);
    let mismatches = checked
        .iter()
        .filter_map(|&n| {
            let expected = target.get(n, e_inf.weight).unwrap_or(0);
            let found = e_inf.total(n);
            (found != expected).then_some(Mismatch {
                degree: n,
                found,
                expected,
            })
        })
        .collect();
    ConvergenceReport {
        weight: e_inf.weight,
        checked,
        quarantined,
        mismatches,
    }
}

/// Required ranks keyed by `(page, source cell)`.
pub type Pins = BTreeMap<(u32, CellPos), u32>;

/// A full set of differentials, one nonzero assignment per page that has any.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Solution {
    pub diffs: Vec<DifferentialAssignment>,
}

impl Solution {
    fn from_raw(diffs: &[DifferentialAssignment]) -> Self {
        Self {
            diffs: diffs
                .iter()
                .map(DifferentialAssignment::normalized)
                .filter(|d| !d.arrows.is_empty())
                .collect(),
        }
    }

    pub fn rank(&self, page: u32, from: CellPos) -> u32 {
        self.diffs
            .iter()
            .find(|d| d.page == page)
            .map_or(0, |d| d.rank(from))
    }

    pub fn is_zero(&self) -> bool {
        self.diffs.is_empty()
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.diffs.is_empty() {
            return write!(f, "all differentials zero");
        }
        let parts: Vec<String> = self.diffs.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverOutcome {
    Unique(Solution),
    /// Every surviving solution, canonically ordered.
    Ambiguous(Vec<Solution>),
    Infeasible,
}

impl SolverOutcome {
    pub fn solutions(&self) -> Vec<&Solution> {
        match self {
            SolverOutcome::Unique(s) => vec![s],
            SolverOutcome::Ambiguous(v) => v.iter().collect(),
            SolverOutcome::Infeasible => vec![],
        }
    }

    pub fn unique(&self) -> Option<&Solution> {
        match self {
            SolverOutcome::Unique(s) => Some(s),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SolverOutcome::Unique(_) => "unique",
            SolverOutcome::Ambiguous(_) => "ambiguous",
            SolverOutcome::Infeasible => "infeasible",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForceReport {
    pub outcome: SolverOutcome,
    pub checked: Vec<i64>,
    pub quarantined: Vec<i64>,
}

struct Search<'a> {
    target: &'a Abutment,
    pins: &'a Pins,
    weight: i64,
    window: i64,
    checked: Vec<i64>,
    last_page: u32,
    found: BTreeSet<Solution>,
}

impl Search<'_> {
    fn candidate_arrows(&self, page: &Page) -> Vec<(CellPos, CellPos, u32)> {
        let n = i64::from(page.index);
        page.cells()
            .filter_map(|((p, q), cell)| {
                let to = (p + n, q - n + 1);
                if cell.unknown || cell.dim == 0 || p + q > self.window {
                    return None;
                }
                if !page.contains(to) || page.is_unknown(to) || page.dim(to) == 0 {
                    return None;
                }
                Some(((p, q), to, cell.dim.min(page.dim(to))))
            })
            .collect()
    }

    fn totals_can_match(&self, page: &Page) -> bool {
        self.checked
            .iter()
            .all(|&n| page.total(n) >= self.target.get(n, self.weight).unwrap_or(0))
    }

    fn run(&mut self, page: &Page, acc: &mut Vec<DifferentialAssignment>) {
        if !self.totals_can_match(page) {
            return;
        }
        if page.index > self.last_page {
            let ok = self
                .checked
                .iter()
                .all(|&n| page.total(n) == self.target.get(n, self.weight).unwrap_or(0));
            if ok {
                self.found.insert(Solution::from_raw(acc));
            }
            return;
        }
        let arrows = self.candidate_arrows(page);
        let index = page.index;
        let candidates: BTreeSet<CellPos> = arrows.iter().map(|a| a.0).collect();
        let unsatisfiable_pin = self
            .pins
            .iter()
            .any(|(&(pg, from), &r)| pg == index && r > 0 && !candidates.contains(&from));
        if unsatisfiable_pin {
            return;
        }
        let mut ranks = vec![0u32; arrows.len()];
        let mut used: BTreeMap<CellPos, u32> = BTreeMap::new();
        self.enumerate(page, &arrows, 0, &mut ranks, &mut used, acc);
    }

    fn enumerate(
        &mut self,
        page: &Page,
        arrows: &[(CellPos, CellPos, u32)],
        i: usize,
        ranks: &mut Vec<u32>,
        used: &mut BTreeMap<CellPos, u32>,
        acc: &mut Vec<DifferentialAssignment>,
    ) {
        if i == arrows.len() {
            let d = DifferentialAssignment::new(
                page.index,
                arrows.iter().zip(ranks.iter()).map(|(a, &r)| (a.0, r)),
            );
            let next = turn_page(page, &d).expect("enumerated ranks are feasible");
            acc.push(d);
            self.run(&next, acc);
            acc.pop();
            return;
        }
        let (from, to, max) = arrows[i];
        let pinned = self.pins.get(&(page.index, from)).copied();
        for r in 0..=max {
            if pinned.is_some_and(|want| want != r) {
                continue;
            }
            let from_used = used.get(&from).copied().unwrap_or(0);
            let to_used = used.get(&to).copied().unwrap_or(0);
            if from_used + r > page.dim(from) || to_used + r > page.dim(to) {
                break;
            }
            ranks[i] = r;
            *used.entry(from).or_default() += r;
            *used.entry(to).or_default() += r;
            self.enumerate(page, arrows, i + 1, ranks, used, acc);
            *used.get_mut(&from).unwrap() -= r;
            *used.get_mut(&to).unwrap() -= r;
        }
        ranks[i] = 0;
    }
}

/// Find every rank assignment, on every page, whose `E_infinity` matches the
/// abutment in all checked degrees.
///
/// Arrows are considered when both ends are known nonzero cells and the
/// source degree is at most the largest abutment degree. Solutions are
/// compared by their nonzero ranks.
pub fn force_differentials(e2: &Page, target: &Abutment, pins: &Pins) -> ForceReport {
    let (checked, quarantined) = checked_degrees(e2, target);
    let window = target.degrees(e2.weight).into_iter().max().unwrap_or(-1);
    let mut search = Search {
        target,
        pins,
        weight: e2.weight,
        window,
        checked: checked.clone(),
        last_page: e2.last_possible_page(),
        found: BTreeSet::new(),
    };
    search.run(e2, &mut Vec::new());
    let mut found: Vec<Solution> = search.found.into_iter().collect();
    let outcome = match found.len() {
        0 => SolverOutcome::Infeasible,
        1 => SolverOutcome::Unique(found.pop().unwrap()),
        _ => SolverOutcome::Ambiguous(found),
    };
    ForceReport {
        outcome,
        checked,
        quarantined,
    }
}

/// A page with a chosen solution, as produced by the solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolvedPage {
    pub e2: Page,
    pub solution: Solution,
    /// Largest total degree the solution was forced in.
    pub window: i64,
}

/// Transport solved `d_2` ranks along multiplication by a power of `tau`.
///
/// An arrow is pinned when multiplying the fiber coefficients by `factor`
/// carries the labels of both its source and target cell bijectively onto
/// the labels of the corresponding cells of `target`. Only `d_2` is pinned:
/// labels describe `E_2` cells, and later pages are subquotients.
pub fn action_pins(solved: &SolvedPage, factor: GroundElement, target: &Page) -> Result<Pins, SpectraError> {
    let shift = target.weight - solved.e2.weight;
    match factor {
        GroundElement::Top { rho: 0, tau } if i64::from(tau) == shift => {}
        _ => {
            return Err(SpectraError::PinFactor {
                factor,
                expected: shift,
            })
        }
    }
    let maps_onto = |pos: CellPos| -> bool {
        let (Some(src), Some(dst)) = (solved.e2.cell(pos), target.cell(pos)) else {
            return false;
        };
        if src.unknown || dst.unknown || src.labels.len() as u32 != src.dim || dst.labels.len() as u32 != dst.dim {
            return false;
        }
        let image: Option<BTreeSet<CellLabel>> = src.labels.iter().map(|l| l.act(factor)).collect();
        match image {
            Some(image) => image.len() == src.labels.len() && image == dst.labels.iter().cloned().collect(),
            None => false,
        }
    };
    let mut pins = Pins::new();
    let page = &solved.e2;
    for ((p, q), cell) in page.cells() {
        let to = (p + 2, q - 1);
        if cell.unknown || cell.dim == 0 || p + q > solved.window || page.dim(to) == 0 {
            continue;
        }
        if maps_onto((p, q)) && maps_onto(to) {
            pins.insert((2, (p, q)), solved.solution.rank(2, (p, q)));
        }
    }
    Ok(pins)
}

/// `E_2` page plus differentials at one weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyPage {
    pub e2: Page,
    pub diffs: Vec<DifferentialAssignment>,
}

impl FamilyPage {
    pub fn e_infinity(&self) -> Result<Page, SpectraError> {
        e_infinity(&self.e2, &self.diffs)
    }
}

/// Pages indexed by weight.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PageFamily {
    pub pages: BTreeMap<i64, FamilyPage>,
}

impl PageFamily {
    pub fn get(&self, weight: i64) -> Result<&FamilyPage, SpectraError> {
        self.pages.get(&weight).ok_or(SpectraError::MissingWeight(weight))
    }

    pub fn insert(&mut self, page: FamilyPage) {
        self.pages.insert(page.e2.weight, page);
    }
}

fn tensor_label(label: &CellLabel, generator: &str) -> CellLabel {
    let fiber = if label.fiber == "1" {
        generator.to_string()
    } else if generator == "1" {
        label.fiber.clone()
    } else {
        format!("{}{}", label.fiber, generator)
    };
    CellLabel {
        fiber,
        ..label.clone()
    }
}

/// Tensor a family with a free module: at weight `r` the output is the sum
/// over generators `g` of the base family at weight `r - g.w`, shifted up by
/// `g.p` rows, with the base differentials carried along.
pub fn tensor_pages(base: &PageFamily, fiber: &ModulePresentation, weights: &[i64]) -> Result<PageFamily, SpectraError> {
    let mut out = PageFamily::default();
    for &r in weights {
        let sources: Vec<(&FamilyPage, i64, &str)> = fiber
            .generators
            .iter()
            .map(|g| Ok((base.get(r - g.degree.w)?, g.degree.p, g.label.as_str())))
            .collect::<Result<_, SpectraError>>()?;
        let width = sources.iter().map(|s| s.0.e2.width).max().unwrap_or(0);
        let height = sources.iter().map(|s| s.0.e2.height).max().unwrap_or(0);
        let index = sources.iter().map(|s| s.0.e2.index).min().unwrap_or(2);
        let mut page = Page::new(r, index, width, height);
        let mut diffs: BTreeMap<u32, BTreeMap<CellPos, u32>> = BTreeMap::new();
        for (src, shift, gen_label) in &sources {
            for ((p, q), cell) in src.e2.cells() {
                let pos = (p, q + shift);
                if !page.contains(pos) {
                    continue;
                }
                let acc = page.cells.get_mut(&pos).unwrap();
                acc.unknown |= cell.unknown;
                acc.dim += cell.dim;
                acc.labels.extend(cell.labels.iter().map(|l| tensor_label(l, gen_label)));
            }
            for d in &src.diffs {
                for (&(p, q), &rank) in &d.arrows {
                    if rank > 0 && page.contains((p, q + shift)) {
                        *diffs.entry(d.page).or_default().entry((p, q + shift)).or_default() += rank;
                    }
                }
            }
        }
        for cell in page.cells.values_mut() {
            if cell.labels.len() as u32 != cell.dim || cell.unknown {
                cell.labels.clear();
            }
            if cell.unknown {
                cell.dim = 0;
            }
        }
        let diffs = diffs
            .into_iter()
            .map(|(n, arrows)| DifferentialAssignment { page: n, arrows })
            .collect();
        out.insert(FamilyPage { e2: page, diffs });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InjectionOutcome {
    Pass,
    CellViolation { weight: i64, cell: CellPos, sub: u32, big: u32 },
    DegreeViolation { weight: i64, degree: i64, sub: u32, big: u32 },
}

impl InjectionOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, InjectionOutcome::Pass)
    }
}

/// Dimension-level test that `sub` can inject into `big`: entrywise on
/// `E_infinity`, then on the antidiagonal totals (the abutment filtrations).
pub fn injection_check(sub: &PageFamily, big: &PageFamily) -> Result<InjectionOutcome, SpectraError> {
    for (&weight, small) in &sub.pages {
        let large = big.get(weight)?;
        let a = small.e_infinity()?;
        let b = large.e_infinity()?;
        for (pos, _) in a.cells() {
            let (x, y) = (a.dim(pos), b.dim(pos));
            if x > y {
                return Ok(InjectionOutcome::CellViolation {
                    weight,
                    cell: pos,
                    sub: x,
                    big: y,
                });
            }
        }
        for n in 0..=a.max_degree().max(b.max_degree()) {
            let (x, y) = (a.total(n), b.total(n));
            if x > y {
                return Ok(InjectionOutcome::DegreeViolation {
                    weight,
                    degree: n,
                    sub: x,
                    big: y,
                });
            }
        }
    }
    Ok(InjectionOutcome::Pass)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LesEntry {
    pub label: String,
    pub dim: u32,
}

/// Outcome of the greedy exactness check on the two-row long exact sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LesReport {
    pub entries: Vec<LesEntry>,
    /// Rank of the map leaving each entry, as far as the check got.
    pub ranks: Vec<i64>,
    pub first_failure: Option<usize>,
}

impl LesReport {
    pub fn feasible(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// The sequence `0 -> H^{0,0} -> H^{0,1} -> 0 -> H^{1,0} -> H^{1,1} -> H^0(X^G) -> H^{2,0} -> ...`.
pub fn les_entries(x: &ModulePresentation, window: i64) -> Vec<LesEntry> {
    let mut entries = Vec::new();
    for n in 0..=window {
        entries.push(LesEntry {
            label: format!("H^{{{n},0}}"),
            dim: x.fixed_dim(Bidegree::new(n, 0)),
        });
        entries.push(LesEntry {
            label: format!("H^{{{n},1}}"),
            dim: x.fixed_dim(Bidegree::new(n, 1)),
        });
        entries.push(if n == 0 {
            LesEntry { label: "0".into(), dim: 0 }
        } else {
            LesEntry {
                label: format!("H^{}_sing(X^G)", n - 1),
                dim: x.betti(n - 1),
            }
        });
    }
    entries
}

/// Greedy feasibility: the map out of entry `i` must have rank
/// `dim_i - rank_(i-1)`, which has to be nonnegative and fit in entry `i+1`;
/// the sequence must end with rank zero.
pub fn les_feasibility(entries: Vec<LesEntry>) -> LesReport {
    let mut ranks = Vec::new();
    let mut prev = 0i64;
    let mut first_failure = None;
    for (i, e) in entries.iter().enumerate() {
        let r = i64::from(e.dim) - prev;
        ranks.push(r);
        let next = entries.get(i + 1).map_or(0, |n| i64::from(n.dim));
        if r < 0 || r > next {
            first_failure = Some(i);
            break;
        }
        prev = r;
    }
    if first_failure.is_none() && prev != 0 {
        first_failure = Some(entries.len().saturating_sub(1));
    }
    LesReport {
        entries,
        ranks,
        first_failure,
    }
}

pub fn les_two_row(x: &ModulePresentation, window: i64) -> LesReport {
    les_feasibility(les_entries(x, window))
}

// JSON page documents:
// {"weight": r, "page": n, "cells": [{"p","q","dim","unknown","labels"}], "diffs": [{"page","from":[p,q],"rank"}]}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellJson {
    p: i64,
    q: i64,
    dim: u32,
    unknown: bool,
    #[serde(default)]
    labels: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiffJson {
    page: u32,
    from: [i64; 2],
    rank: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PageJson {
    weight: i64,
    page: u32,
    cells: Vec<CellJson>,
    #[serde(default)]
    diffs: Vec<DiffJson>,
}

/// A page with the differentials that act on it, in the JSON page schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageDocument {
    pub page: Page,
    pub diffs: Vec<DifferentialAssignment>,
}

impl PageDocument {
    pub fn to_json(&self) -> String {
        let cells = self
            .page
            .cells()
            .map(|((p, q), c)| CellJson {
                p,
                q,
                dim: c.dim,
                unknown: c.unknown,
                labels: c.labels.iter().map(ToString::to_string).collect(),
            })
            .collect();
        let diffs = self
            .diffs
            .iter()
            .flat_map(|d| {
                d.arrows.iter().map(move |(&(p, q), &rank)| DiffJson {
                    page: d.page,
                    from: [p, q],
                    rank,
                })
            })
            .collect();
        let doc = PageJson {
            weight: self.page.weight,
            page: self.page.index,
            cells,
            diffs,
        };
        serde_json::to_string_pretty(&doc).expect("page serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SpectraError> {
        let doc: PageJson = serde_json::from_str(text).map_err(|e| SpectraError::Json(e.to_string()))?;
        if doc.cells.iter().any(|c| c.p < 0 || c.q < 0) {
            return Err(SpectraError::Json("cells must lie in the first quadrant".into()));
        }
        let width = doc.cells.iter().map(|c| c.p + 1).max().unwrap_or(0);
        let height = doc.cells.iter().map(|c| c.q + 1).max().unwrap_or(0);
        let mut page = Page::new(doc.weight, doc.page, width, height);
        for c in doc.cells {
            let labels = c
                .labels
                .iter()
                .map(|l| l.parse())
                .collect::<Result<Vec<CellLabel>, _>>()?;
            page.set(
                (c.p, c.q),
                Cell {
                    dim: c.dim,
                    unknown: c.unknown,
                    labels,
                },
            );
        }
        let mut by_page: BTreeMap<u32, BTreeMap<CellPos, u32>> = BTreeMap::new();
        for d in doc.diffs {
            by_page.entry(d.page).or_default().insert((d.from[0], d.from[1]), d.rank);
        }
        let diffs = by_page
            .into_iter()
            .map(|(page, arrows)| DifferentialAssignment { page, arrows })
            .collect();
        Ok(PageDocument { page, diffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The r = 2 path-loop page for S^{4,2}, rows q = 0..6, columns p = 0..4.
    fn loop_page_r2() -> Page {
        let rows = vec![
            vec![1, 0, 0, 0, 1],
            vec![1, 0, 1, 0, 0],
            vec![1, 0, 1, 0, 0],
            vec![1, 0, 0, 0, 1],
            vec![0, 0, 0, 0, 0],
            vec![0, 0, 0, 0, 0],
            vec![0, 0, 0, 0, 0],
        ];
        let mut page = Page::from_rows(2, 2, &rows);
        for p in 0..5 {
            page.set((p, 6), Cell::unknown());
        }
        page
    }

    fn point_abutment(r: i64, window: i64) -> Abutment {
        Abutment::from_fn(r, window, |n| crate::ground::point_dim(Bidegree::new(n, r)))
    }

    #[test]
    fn zero_assignment_keeps_dims() {
        let page = loop_page_r2();
        let next = turn_page(&page, &DifferentialAssignment::zero(2)).unwrap();
        assert_eq!(next.index(), 3);
        for (pos, c) in page.cells() {
            assert_eq!(next.cell(pos).unwrap().dim, c.dim);
        }
    }

    #[test]
    fn forced_pair_kills_four_cells() {
        let page = loop_page_r2();
        let d = DifferentialAssignment::new(2, [((0, 3), 1), ((2, 1), 1)]);
        let e3 = turn_page(&page, &d).unwrap();
        for pos in [(0, 3), (2, 1), (2, 2), (4, 0)] {
            assert_eq!(e3.dim(pos), 0, "{pos:?}");
        }
        let einf = e_infinity(&page, &[d]).unwrap();
        let totals: Vec<u32> = (0..5).map(|n| einf.total(n)).collect();
        assert_eq!(totals, vec![1, 1, 1, 0, 0]);
        let report = check_convergence(&einf, &point_abutment(2, 6));
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.checked, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(report.quarantined, vec![6]);
    }

    #[test]
    fn turn_page_guards() {
        let page = loop_page_r2();
        let too_big = DifferentialAssignment::new(2, [((0, 3), 2)]);
        assert!(matches!(turn_page(&page, &too_big), Err(SpectraError::RankTooLarge { .. })));
        let wrong = DifferentialAssignment::new(3, [((0, 3), 1)]);
        assert!(matches!(turn_page(&page, &wrong), Err(SpectraError::PageMismatch { .. })));
        let unknown = DifferentialAssignment::new(4, [((0, 6), 1)]);
        let e4 = page.clone().with_index(4);
        assert!(matches!(turn_page(&e4, &unknown), Err(SpectraError::UnknownContact { .. })));
        let empty_target = Page::from_rows(0, 2, &[vec![0, 0, 0], vec![0, 0, 0], vec![1, 0, 0]]);
        let into_zero = DifferentialAssignment::new(2, [((0, 2), 1)]);
        assert!(matches!(turn_page(&empty_target, &into_zero), Err(SpectraError::RankTooLarge { .. })));
        let over = Page::from_rows(0, 2, &[vec![0, 0, 1, 0, 1], vec![0, 0, 1, 0, 0], vec![1, 0, 0, 0, 0]]);
        let through = DifferentialAssignment::new(2, [((0, 2), 1), ((2, 1), 1)]);
        assert!(matches!(turn_page(&over, &through), Err(SpectraError::Infeasible { cell: (2, 1), dim: 1 })));
    }

    #[test]
    fn no_differentials_misses_the_point() {
        let page = loop_page_r2();
        let report = check_convergence(&e_infinity(&page, &[]).unwrap(), &point_abutment(2, 6));
        let bad: Vec<i64> = report.mismatches.iter().map(|m| m.degree).collect();
        assert_eq!(bad, vec![3, 4]);
    }

    #[test]
    fn single_cell_is_stable() {
        let page = Page::from_rows(0, 2, &[vec![1]]);
        let einf = e_infinity(&page, &[]).unwrap();
        assert_eq!(einf.dim((0, 0)), 1);
    }

    #[test]
    fn solver_on_r2_loop_page() {
        let report = force_differentials(&loop_page_r2(), &point_abutment(2, 6), &Pins::new());
        let sol = report.outcome.unique().expect("unique");
        assert_eq!(sol.diffs, vec![DifferentialAssignment::new(2, [((0, 3), 1), ((2, 1), 1)])]);
    }

    #[test]
    fn self_convergence_is_unique_zero() {
        let page = Page::from_rows(1, 2, &[vec![1, 0, 0, 0, 1], vec![1, 0, 1, 0, 0]]);
        let target = Abutment::of_page_totals(&page, 6);
        let report = force_differentials(&page, &target, &Pins::new());
        assert_eq!(report.outcome, SolverOutcome::Unique(Solution::default()));
    }

    #[test]
    fn infeasible_target() {
        let page = Page::from_rows(0, 2, &[vec![1]]);
        let target = Abutment::from_fn(0, 0, |_| 2);
        assert_eq!(force_differentials(&page, &target, &Pins::new()).outcome, SolverOutcome::Infeasible);
    }

    #[test]
    fn pins_transport_only_bijective_cells() {
        let base = |coeff| vec![CellLabel::new("1·1", coeff, "1")];
        let mut low = Page::new(0, 2, 3, 2);
        low.set((0, 1), Cell::labelled(base(GroundElement::TAU)));
        low.set((2, 0), Cell::labelled(base(GroundElement::ONE)));
        let solved = SolvedPage {
            e2: low.clone(),
            solution: Solution {
                diffs: vec![DifferentialAssignment::new(2, [((0, 1), 1)])],
            },
            window: 2,
        };
        let mut high = Page::new(2, 2, 3, 2);
        high.set((0, 1), Cell::labelled(base(GroundElement::tau_pow(3))));
        high.set((2, 0), Cell::labelled(base(GroundElement::tau_pow(2))));
        let pins = action_pins(&solved, GroundElement::tau_pow(2), &high).unwrap();
        assert_eq!(pins.get(&(2, (0, 1))), Some(&1));

        let identity = action_pins(&solved, GroundElement::ONE, &low).unwrap();
        assert_eq!(identity.get(&(2, (0, 1))), Some(&1));

        // A negative-cone coefficient is killed by tau, so nothing is pinned.
        let mut neg = low.clone();
        neg.set((2, 0), Cell::labelled(base(GroundElement::THETA)));
        let solved_neg = SolvedPage { e2: neg, ..solved.clone() };
        let pins = action_pins(&solved_neg, GroundElement::tau_pow(2), &high).unwrap();
        assert!(pins.is_empty());

        assert!(action_pins(&solved, GroundElement::RHO, &high).is_err());
    }

    #[test]
    fn les_greedy() {
        let ok = les_feasibility(
            [1, 1, 0, 0, 1, 1, 0, 0, 0]
                .iter()
                .map(|&d| LesEntry { label: String::new(), dim: d })
                .collect(),
        );
        assert!(ok.feasible());
        let bad = les_feasibility(
            [1, 1, 0, 0, 1, 0, 0]
                .iter()
                .map(|&d| LesEntry { label: String::new(), dim: d })
                .collect(),
        );
        assert_eq!(bad.first_failure, Some(4));
        let dangling = les_feasibility(vec![LesEntry { label: String::new(), dim: 1 }]);
        assert!(!dangling.feasible());
    }

    #[test]
    fn page_json_round_trip() {
        let mut page = loop_page_r2();
        page.set((0, 0), Cell::labelled(vec![CellLabel::new("1·1", GroundElement::tau_pow(2), "1")]));
        let doc = PageDocument {
            page,
            diffs: vec![DifferentialAssignment::new(2, [((0, 3), 1), ((2, 1), 1)])],
        };
        let text = doc.to_json();
        assert_eq!(PageDocument::from_json(&text).unwrap(), doc);
        assert!(PageDocument::from_json(r#"{"weight":0,"page":2,"cells":[{"p":-1,"q":0,"dim":1,"unknown":false}]}"#).is_err());
    }

    #[test]
    fn label_text_round_trip() {
        let l = CellLabel::new("theta·s4", GroundElement::top(1, 2), "a1a2");
        assert_eq!(l.to_string().parse::<CellLabel>().unwrap(), l);
    }
}
