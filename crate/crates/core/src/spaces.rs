//! Built-in spaces: the point, representation spheres `S^{p,q}`, twisted
//! projective spaces `P(R^{p,q})`, and the cell models of `Omega S^{p,q}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::charts::{Generator, ModulePresentation};
use crate::ground::{Bidegree, GroundElement};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpacesError {
    #[error("need 0 <= q <= p and p >= 1, got P(R^{{{p},{q}}})")]
    ProjectiveRange { p: i64, q: i64 },
    #[error("need 0 <= q <= p, got S^{{{p},{q}}}")]
    SphereRange { p: i64, q: i64 },
    #[error("products involving c_k are only known through a c_k = tau c_(k+1)")]
    Unspecified,
    #[error("relation a c_{k} = tau c_{next} needs 2q <= k < p-1 for P(R^{{{p},{q}}})", next = k + 1)]
    RelationRange { p: i64, q: i64, k: i64 },
    #[error("cell {cell} violates the loop-model hypothesis (need p >= 2 and 0 <= w <= p-1)")]
    AdamsHilton { cell: Bidegree },
    #[error("cellular differentials not determined by degree for Omega S^{{{p},{q}}} (need p-1 >= 2 and q <= p-2)")]
    AdjacentCells { p: i64, q: i64 },
}

pub fn point_presentation() -> ModulePresentation {
    ModulePresentation::new("point", vec![Generator::new("1", Bidegree::ZERO)], vec![1], true, true)
        .expect("point presentation is valid")
}

/// Mod-2 Betti numbers of the ordinary sphere `S^k` (`k = -1` is empty).
fn sphere_betti(k: i64) -> Vec<u32> {
    match k {
        k if k < 0 => vec![],
        0 => vec![2],
        k => {
            let mut b = vec![0; k as usize + 1];
            b[0] = 1;
            b[k as usize] = 1;
            b
        }
    }
}

/// `S^{p,q}`: generators in degrees `(0,0)` and `(p,q)`, fixed set `S^{p-q}`.
pub fn sphere_presentation(p: i64, q: i64) -> Result<ModulePresentation, SpacesError> {
    if q < 0 || q > p {
        return Err(SpacesError::SphereRange { p, q });
    }
    let gens = vec![
        Generator::new("1", Bidegree::ZERO),
        Generator::new(format!("s{p}"), Bidegree::new(p, q)),
    ];
    let one_connected = p >= 2 && p - q >= 2;
    let fixed_connected = p - q >= 1;
    Ok(ModulePresentation::new(
        format!("S^{{{p},{q}}}"),
        gens,
        sphere_betti(p - q),
        one_connected,
        fixed_connected,
    )
    .expect("sphere presentation is valid"))
}

/// `P(R^{p,q}) = P(R^{p,p-q})`; returns the representative with `q <= p/2`.
pub fn normalize_projective(p: i64, q: i64) -> Result<(i64, i64), SpacesError> {
    if p < 1 || q < 0 || q > p {
        return Err(SpacesError::ProjectiveRange { p, q });
    }
    Ok((p, q.min(p - q)))
}

/// Free presentation of `P(R^{p,q})`: one generator in each degree
/// `(k, min(ceil(k/2), q))` for `k = 0..p-1`, after normalizing `q`.
pub fn projective_presentation(p: i64, q: i64) -> Result<ModulePresentation, SpacesError> {
    let (p, q) = normalize_projective(p, q)?;
    let gens = (0..p)
        .map(|k| Generator::new(format!("g{k}"), Bidegree::new(k, ((k + 1) / 2).min(q))))
        .collect();
    // Fixed set RP^{q-1} + RP^{p-q-1}.
    let len = (p - q).max(q) as usize;
    let betti: Vec<u32> = (0..len as i64)
        .map(|i| u32::from(i < q) + u32::from(i < p - q))
        .collect();
    Ok(ModulePresentation::new(format!("P(R^{{{p},{q}}})"), gens, betti, p == 1, q == 0)
        .expect("projective presentation is valid"))
}

/// A monomial `coeff * a^eps * b^k` in `H^{*,*}(RP^infty_tw)`, or an extra
/// generator `c_k` of a finite truncation.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjectiveClass {
    Monomial { coeff: GroundElement, a: bool, b: u32 },
    Extra { k: u32, q: u32 },
}

impl ProjectiveClass {
    pub fn a() -> Self {
        ProjectiveClass::Monomial {
            coeff: GroundElement::ONE,
            a: true,
            b: 0,
        }
    }

    pub fn b() -> Self {
        ProjectiveClass::Monomial {
            coeff: GroundElement::ONE,
            a: false,
            b: 1,
        }
    }

    pub fn monomial(coeff: GroundElement, a: bool, b: u32) -> Self {
        ProjectiveClass::Monomial { coeff, a, b }
    }

    pub fn bidegree(&self) -> Option<Bidegree> {
        match *self {
            ProjectiveClass::Monomial { coeff, a, b } => {
                let eps = i64::from(a);
                let b = b as i64;
                coeff.bidegree().map(|c| c + Bidegree::new(eps + 2 * b, eps + b))
            }
            ProjectiveClass::Extra { k, q } => Some(Bidegree::new(k as i64, q as i64)),
        }
    }
}

impl fmt::Display for ProjectiveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ProjectiveClass::Monomial { coeff, a, b } => {
                let mut parts = Vec::new();
                if coeff != GroundElement::ONE || (!a && b == 0) {
                    parts.push(coeff.to_string());
                }
                if a {
                    parts.push("a".to_string());
                }
                match b {
                    0 => {}
                    1 => parts.push("b".to_string()),
                    b => parts.push(format!("b^{b}")),
                }
                write!(f, "{}", parts.join(" "))
            }
            ProjectiveClass::Extra { k, .. } => write!(f, "c_{k}"),
        }
    }
}

/// An F2 linear combination of normal-form monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProjectiveSum {
    terms: BTreeSet<(GroundElement, bool, u32)>,
}

impl ProjectiveSum {
    pub fn from_class(x: ProjectiveClass) -> Result<Self, SpacesError> {
        let mut s = ProjectiveSum::default();
        match x {
            ProjectiveClass::Monomial { coeff, a, b } => s.toggle(coeff, a, b),
            ProjectiveClass::Extra { .. } => return Err(SpacesError::Unspecified),
        }
        Ok(s)
    }

    fn toggle(&mut self, coeff: GroundElement, a: bool, b: u32) {
        if coeff.is_zero() {
            return;
        }
        if !self.terms.remove(&(coeff, a, b)) {
            self.terms.insert((coeff, a, b));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ProjectiveClass> + '_ {
        self.terms
            .iter()
            .map(|&(coeff, a, b)| ProjectiveClass::Monomial { coeff, a, b })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiply, rewriting `a^2 = rho a + tau b`.
    pub fn mul(&self, other: &ProjectiveSum) -> ProjectiveSum {
        let mut out = ProjectiveSum::default();
        for &(c1, a1, b1) in &self.terms {
            for &(c2, a2, b2) in &other.terms {
                let c = c1.mul(c2);
                let b = b1 + b2;
                if a1 && a2 {
                    out.toggle(c.mul(GroundElement::RHO), true, b);
                    out.toggle(c.mul(GroundElement::TAU), false, b + 1);
                } else {
                    out.toggle(c, a1 || a2, b);
                }
            }
        }
        out
    }
}

impl fmt::Display for ProjectiveSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|&&(c, a, b)| (!a, b, c));
        let parts: Vec<String> = terms
            .into_iter()
            .map(|&(coeff, a, b)| ProjectiveClass::Monomial { coeff, a, b }.to_string())
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Product in `H^{*,*}(pt)[a,b]/(a^2 = rho a + tau b)`.
pub fn rp_infty_mul(x: ProjectiveClass, y: ProjectiveClass) -> Result<ProjectiveSum, SpacesError> {
    Ok(ProjectiveSum::from_class(x)?.mul(&ProjectiveSum::from_class(y)?))
}

/// The one product relation known for the extra generators: `a c_k = tau c_{k+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedRelation {
    pub k: i64,
    /// Degree of both sides.
    pub degree: Bidegree,
    /// `true` when `c_k` is the power `b^q` (`k = 2q`).
    pub source_is_b_power: bool,
}

impl fmt::Display for TruncatedRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a c_{} = tau c_{}", self.k, self.k + 1)
    }
}

pub fn truncated_relation(p: i64, q: i64, k: i64) -> Result<TruncatedRelation, SpacesError> {
    let (p, q) = normalize_projective(p, q)?;
    if k < 2 * q || k >= p - 1 {
        return Err(SpacesError::RelationRange { p, q, k });
    }
    let lhs = Bidegree::new(1, 1) + Bidegree::new(k, q);
    let rhs = Bidegree::new(0, 1) + Bidegree::new(k + 1, q);
    debug_assert_eq!(lhs, rhs);
    Ok(TruncatedRelation {
        k,
        degree: lhs,
        source_is_b_power: k == 2 * q,
    })
}

/// Cell counts of a free-monoid (tensor algebra) cell model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellModel {
    generators: Vec<Bidegree>,
    cutoff: i64,
    counts: BTreeMap<Bidegree, u64>,
}

impl CellModel {
    pub fn counts(&self) -> &BTreeMap<Bidegree, u64> {
        &self.counts
    }

    pub fn count(&self, d: Bidegree) -> u64 {
        self.counts.get(&d).copied().unwrap_or(0)
    }

    pub fn total_cells(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Every word with its degree, generators written `x1, x2, ...`.
    pub fn words(&self) -> Vec<(String, Bidegree)> {
        let mut out = vec![(String::new(), Bidegree::ZERO)];
        let mut frontier = vec![(String::new(), Bidegree::ZERO)];
        while let Some((word, d)) = frontier.pop() {
            for (i, &g) in self.generators.iter().enumerate() {
                let next = d + g;
                if next.p <= self.cutoff {
                    let w = format!("{word}x{}", i + 1);
                    out.push((w.clone(), next));
                    frontier.push((w, next));
                }
            }
        }
        out.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
        out
    }
}

/// Cells of `T(C)` on generating cells in the given degrees, up to topological degree `cutoff`.
pub fn james_cells(generators: &[Bidegree], cutoff: i64) -> Result<CellModel, SpacesError> {
    if let Some(&cell) = generators.iter().find(|g| g.p < 2 || g.w < 0 || g.w > g.p - 1) {
        return Err(SpacesError::AdamsHilton { cell });
    }
    let mut counts: BTreeMap<Bidegree, u64> = BTreeMap::new();
    if cutoff >= 0 {
        counts.insert(Bidegree::ZERO, 1);
    }
    // Words ending in each generator: count(d) = sum_g count(d - g). Process by p.
    let mut by_p: Vec<Vec<(Bidegree, u64)>> = vec![Vec::new(); (cutoff.max(0) + 1) as usize];
    if cutoff >= 0 {
        by_p[0].push((Bidegree::ZERO, 1));
    }
    for p in 0..=cutoff {
        let layer = std::mem::take(&mut by_p[p as usize]);
        let mut merged: BTreeMap<Bidegree, u64> = BTreeMap::new();
        for (d, n) in layer {
            *merged.entry(d).or_default() += n;
        }
        for (&d, &n) in &merged {
            if p > 0 {
                *counts.entry(d).or_default() += n;
            }
            for &g in generators {
                let next = d + g;
                if next.p <= cutoff {
                    by_p[next.p as usize].push((next, n));
                }
            }
        }
    }
    Ok(CellModel {
        generators: generators.to_vec(),
        cutoff,
        counts,
    })
}

/// Ring data of `H^{*,*}(Omega S^{p,q})`: generators `a_i` and their squares.
///
/// The module basis element `x_n` is the product of the `a_i` picked out by
/// the binary digits of `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopRing {
    pub generator_degrees: Vec<Bidegree>,
    /// `squares[i]` is the basis index `n` with `a_(i+1)^2 = x_n`, or `None` for zero.
    pub squares: Vec<Option<u64>>,
}

impl LoopRing {
    pub fn exterior(p: i64, q: i64, count: usize) -> Self {
        let generator_degrees = (0..count)
            .map(|i| Bidegree::new((p - 1) << i, q << i))
            .collect();
        LoopRing {
            generator_degrees,
            squares: vec![None; count],
        }
    }

    pub fn basis_degree(&self, n: u64) -> Bidegree {
        self.generator_degrees
            .iter()
            .enumerate()
            .filter(|(i, _)| n >> i & 1 == 1)
            .fold(Bidegree::ZERO, |acc, (_, &d)| acc + d)
    }

    pub fn is_exterior(&self) -> bool {
        self.squares.iter().all(Option::is_none)
    }

    /// `x_m * x_n` as a basis index, or `None` for zero.
    pub fn mul(&self, m: u64, n: u64) -> Option<u64> {
        let overlap = m & n;
        if overlap == 0 {
            return Some(m | n);
        }
        let i = overlap.trailing_zeros() as usize;
        let bit = 1u64 << i;
        let sq = (*self.squares.get(i)?)?;
        // x_m x_n = (x_{m-bit} x_{n-bit}) a_i^2
        let rest = self.mul(m & !bit, n & !bit)?;
        self.mul(rest, sq)
    }
}

pub fn basis_label(n: u64) -> String {
    if n == 0 {
        return "1".into();
    }
    (0..64)
        .filter(|i| n >> i & 1 == 1)
        .map(|i| format!("a{}", i + 1))
        .collect()
}

/// `Omega S^{p,q}` as a free module: `x_n` in degree `(n(p-1), nq)` for `n(p-1) <= cutoff`.
pub fn loops_presentation(p: i64, q: i64, cutoff: i64) -> Result<ModulePresentation, SpacesError> {
    Ok(loops_model(p, q, cutoff)?.0)
}

/// Presentation together with its exterior ring data.
pub fn loops_model(p: i64, q: i64, cutoff: i64) -> Result<(ModulePresentation, LoopRing), SpacesError> {
    if p - 1 < 2 || q < 0 || q > p - 2 {
        return Err(SpacesError::AdjacentCells { p, q });
    }
    let step = Bidegree::new(p - 1, q);
    let mut gens = Vec::new();
    let mut n = 0u64;
    while (n as i64) * step.p <= cutoff {
        let d = Bidegree::new(n as i64 * step.p, n as i64 * step.w);
        gens.push(Generator::new(basis_label(n), d));
        n += 1;
    }
    let ring_gens = n.checked_sub(1).map_or(0, |top| (64 - top.leading_zeros()) as usize);
    // Fixed set Omega S^{p-q}: one class in each degree divisible by p-q-1.
    let k = p - q - 1;
    let betti = (0..=cutoff.max(0)).map(|i| u32::from(i % k == 0)).collect();
    let pres = ModulePresentation::new(format!("Omega S^{{{p},{q}}}"), gens, betti, false, true)
        .expect("loop presentation is valid");
    Ok((pres, LoopRing::exterior(p, q, ring_gens)))
}
