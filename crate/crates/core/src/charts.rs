//! Free bigraded modules over `H^{*,*}(pt)` given by generator lists.
//!
//! A presentation records where the free generators sit, plus the mod-2
//! Betti numbers of the fixed set (supplied data; nothing here computes
//! fixed sets). From it we count dimensions at both orbit levels and
//! evaluate the coefficient Mackey functors `H^{q,r}(-)`.

use serde::{Deserialize, Serialize};

use crate::ground::{point_dim, Bidegree, GroundElement};
use crate::mackey::{Decomposition, MackeyShape, NamedFunctor, Unrecognized};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChartError {
    #[error("generator {label:?} has negative topological degree {p}")]
    NegativeDegree { label: String, p: i64 },
    #[error("fixed set is marked connected but its H^0 has dimension {0}")]
    FixedNotConnected(u32),
    #[error("only free modules are supported: {0}")]
    NotFree(String),
    #[error("malformed presentation: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub label: String,
    #[serde(flatten)]
    pub degree: Bidegree,
}

impl Generator {
    pub fn new(label: impl Into<String>, degree: Bidegree) -> Self {
        Self {
            label: label.into(),
            degree,
        }
    }
}

/// A space's cohomology as a free `H^{*,*}(pt)`-module.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModulePresentation {
    pub name: String,
    pub generators: Vec<Generator>,
    pub fixed_betti: Vec<u32>,
    pub one_connected: bool,
    pub fixed_connected: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PresentationJson {
    name: String,
    generators: Vec<Generator>,
    #[serde(default)]
    fixed_betti: Vec<u32>,
    #[serde(default)]
    one_connected: bool,
    #[serde(default)]
    fixed_connected: bool,
}

impl<'de> Deserialize<'de> for ModulePresentation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let j = PresentationJson::deserialize(deserializer)?;
        ModulePresentation::new(j.name, j.generators, j.fixed_betti, j.one_connected, j.fixed_connected)
            .map_err(serde::de::Error::custom)
    }
}

impl ModulePresentation {
    pub fn new(
        name: impl Into<String>,
        generators: Vec<Generator>,
        fixed_betti: Vec<u32>,
        one_connected: bool,
        fixed_connected: bool,
    ) -> Result<Self, ChartError> {
        if let Some(g) = generators.iter().find(|g| g.degree.p < 0) {
            return Err(ChartError::NegativeDegree {
                label: g.label.clone(),
                p: g.degree.p,
            });
        }
        let b0 = fixed_betti.first().copied().unwrap_or(0);
        if fixed_connected && b0 != 1 {
            return Err(ChartError::FixedNotConnected(b0));
        }
        Ok(Self {
            name: name.into(),
            generators,
            fixed_betti,
            one_connected,
            fixed_connected,
        })
    }

    /// Parse the JSON presentation schema. Any extra key (for instance a
    /// `relations` list) is refused, since only free modules are modelled.
    pub fn from_json(text: &str) -> Result<Self, ChartError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| ChartError::Json(e.to_string()))?;
        if let Some(obj) = value.as_object() {
            if obj.contains_key("relations") {
                return Err(ChartError::NotFree("presentation lists relations".into()));
            }
        }
        serde_json::from_value(value).map_err(|e| ChartError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("presentation serializes")
    }

    pub fn degrees(&self) -> impl Iterator<Item = Bidegree> + '_ {
        self.generators.iter().map(|g| g.degree)
    }

    pub fn max_p(&self) -> i64 {
        self.degrees().map(|d| d.p).max().unwrap_or(0)
    }

    pub fn betti(&self, i: i64) -> u32 {
        usize::try_from(i)
            .ok()
            .and_then(|i| self.fixed_betti.get(i))
            .copied()
            .unwrap_or(0)
    }

    /// Disjoint union of generator lists (the presentation of a wedge-like sum).
    pub fn disjoint_union(&self, other: &ModulePresentation) -> ModulePresentation {
        let len = self.fixed_betti.len().max(other.fixed_betti.len());
        let betti = (0..len as i64).map(|i| self.betti(i) + other.betti(i)).collect();
        let mut generators = self.generators.clone();
        generators.extend(other.generators.iter().cloned());
        ModulePresentation {
            name: format!("{}+{}", self.name, other.name),
            generators,
            fixed_betti: betti,
            one_connected: false,
            fixed_connected: false,
        }
    }

    /// Basis of the fixed level at `d`: each entry is `(generator index, coefficient)`.
    pub fn fixed_classes(&self, d: Bidegree) -> Vec<(usize, GroundElement)> {
        self.generators
            .iter()
            .enumerate()
            .filter_map(|(i, g)| {
                let c = GroundElement::basis_at(d - g.degree);
                (!c.is_zero()).then_some((i, c))
            })
            .collect()
    }

    pub fn fixed_dim(&self, d: Bidegree) -> u32 {
        self.degrees().map(|g| point_dim(d - g)).sum()
    }

    /// Free-orbit dimension in topological degree `p`, for any weight.
    pub fn free_dim(&self, p: i64) -> u32 {
        self.degrees().filter(|g| g.p == p).count() as u32
    }

    pub fn mackey_eval(&self, q: i64, r: i64) -> MackeyRank {
        let d = Bidegree::new(q, r);
        let classes = self.fixed_classes(d);
        let res_rank = self.degrees().filter(|g| g.p == q && r - g.w >= 0).count() as u32;
        let neg_cone_fixed = classes.iter().filter(|(_, c)| c.is_negative_cone()).count() as u32;
        MackeyRank {
            dim_fixed: classes.len() as u32,
            dim_free: self.free_dim(q),
            res_rank,
            neg_cone_fixed,
        }
    }

    /// The coefficient functor `H^{q,r}` split into catalog summands, each
    /// paired with the fixed-level class that spans it (`None` for free-only
    /// summands).
    pub fn coefficient_summands(&self, q: i64, r: i64) -> Result<Vec<Summand>, Unrecognized> {
        let rank = self.mackey_eval(q, r);
        let dec = rank.to_named()?;
        let classes = self.fixed_classes(Bidegree::new(q, r));
        let mut out = Vec::new();
        // Classes tau^k g with g in topological degree q restrict isomorphically.
        for &(i, c) in &classes {
            if matches!(c, GroundElement::Top { rho: 0, .. }) && self.generators[i].degree.p == q {
                out.push(Summand::new(NamedFunctor::Constant, Some((i, c))));
            }
        }
        for &(i, c) in &classes {
            if matches!(c, GroundElement::Top { rho, .. } if rho > 0) {
                out.push(Summand::new(NamedFunctor::Bracket, Some((i, c))));
            }
        }
        for &(i, c) in &classes {
            if c.is_negative_cone() {
                out.push(Summand::new(NamedFunctor::DualConstant, Some((i, c))));
            }
        }
        for _ in 0..dec.free_only {
            out.push(Summand::new(NamedFunctor::FreeOnly, None));
        }
        debug_assert_eq!(
            Decomposition::from_multiset(&out.iter().map(|s| s.functor).collect::<Vec<_>>()),
            dec
        );
        Ok(out)
    }
}

/// One catalog summand of a coefficient functor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Summand {
    pub functor: NamedFunctor,
    /// `(generator index, ground coefficient)` of the spanning fixed class.
    pub class: Option<(usize, GroundElement)>,
}

impl Summand {
    fn new(functor: NamedFunctor, class: Option<(usize, GroundElement)>) -> Self {
        Self { functor, class }
    }
}

/// Rank data of the coefficient functor `H^{q,r}` at both levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MackeyRank {
    pub dim_fixed: u32,
    pub dim_free: u32,
    pub res_rank: u32,
    pub neg_cone_fixed: u32,
}

impl MackeyRank {
    pub fn is_consistent(&self) -> bool {
        self.res_rank <= self.dim_fixed.min(self.dim_free)
            && self.res_rank + self.neg_cone_fixed <= self.dim_fixed
    }

    /// Allocate the counts to catalog functors.
    ///
    /// Restriction-isomorphic classes become constant summands, the other
    /// positive-cone fixed classes become `<Z/2>`, negative-cone classes are
    /// paired with the remaining free classes as dual-constant summands and any
    /// free class left over is free-only. A negative-cone class with no free
    /// partner cannot be placed and makes the whole functor unrecognized.
    pub fn to_named(&self) -> Result<Decomposition, Unrecognized> {
        if !self.is_consistent() {
            return Err(Unrecognized);
        }
        let spare_free = self.dim_free - self.res_rank;
        if self.neg_cone_fixed > spare_free {
            return Err(Unrecognized);
        }
        Ok(Decomposition {
            constant: self.res_rank as usize,
            bracket: (self.dim_fixed - self.res_rank - self.neg_cone_fixed) as usize,
            dual_constant: self.neg_cone_fixed as usize,
            free_only: (spare_free - self.neg_cone_fixed) as usize,
        })
    }

    /// A Mackey functor realizing this rank data, when it is recognized.
    pub fn assemble(&self) -> Result<MackeyShape, Unrecognized> {
        Ok(self.to_named()?.shape())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{loops_presentation, point_presentation, sphere_presentation};

    #[test]
    fn fixed_dim_examples() {
        let s42 = sphere_presentation(4, 2).unwrap();
        assert_eq!(s42.fixed_dim(Bidegree::new(4, 0)), 1);
        assert_eq!(s42.fixed_dim(Bidegree::new(0, 0)), 1);
        let l = loops_presentation(4, 2, 12).unwrap();
        assert_eq!(l.fixed_dim(Bidegree::new(4, 3)), 1);
    }

    #[test]
    fn free_dim_examples() {
        let l = loops_presentation(4, 2, 12).unwrap();
        assert_eq!(l.free_dim(3), 1);
        assert_eq!(l.free_dim(4), 0);
        assert_eq!(l.free_dim(0), 1);
        assert_eq!(sphere_presentation(4, 2).unwrap().free_dim(4), 1);
    }

    #[test]
    fn loop_coefficients_at_weight_two() {
        let l = loops_presentation(4, 2, 12).unwrap();
        let r = |dim_fixed, dim_free, res_rank, neg_cone_fixed| MackeyRank {
            dim_fixed,
            dim_free,
            res_rank,
            neg_cone_fixed,
        };
        assert_eq!(l.mackey_eval(1, 2), r(1, 0, 0, 0));
        assert_eq!(l.mackey_eval(0, 2), r(1, 1, 1, 0));
        assert_eq!(l.mackey_eval(6, 2), r(1, 1, 0, 1));
        let expected = [
            NamedFunctor::Constant,
            NamedFunctor::Bracket,
            NamedFunctor::Bracket,
            NamedFunctor::Constant,
            NamedFunctor::Zero,
            NamedFunctor::Zero,
            NamedFunctor::DualConstant,
        ];
        for (q, want) in expected.into_iter().enumerate() {
            let dec = l.mackey_eval(q as i64, 2).to_named().unwrap();
            assert_eq!(dec.as_single(), Some(want), "q = {q}");
        }
    }

    #[test]
    fn to_named_examples() {
        let r = |a, b, c, d| MackeyRank {
            dim_fixed: a,
            dim_free: b,
            res_rank: c,
            neg_cone_fixed: d,
        };
        assert_eq!(r(1, 1, 1, 0).to_named().unwrap().to_multiset(), vec![NamedFunctor::Constant]);
        assert_eq!(
            r(2, 0, 0, 0).to_named().unwrap().to_multiset(),
            vec![NamedFunctor::Bracket, NamedFunctor::Bracket]
        );
        assert_eq!(r(1, 1, 0, 1).to_named().unwrap().to_multiset(), vec![NamedFunctor::DualConstant]);
        assert_eq!(r(0, 1, 0, 0).to_named().unwrap().to_multiset(), vec![NamedFunctor::FreeOnly]);
        assert_eq!(r(1, 0, 0, 1).to_named(), Err(Unrecognized));
        assert_eq!(r(1, 2, 2, 0).to_named(), Err(Unrecognized));
    }

    #[test]
    fn every_evaluation_assembles_to_a_mackey_functor() {
        let spaces = [
            point_presentation(),
            sphere_presentation(4, 2).unwrap(),
            sphere_presentation(3, 1).unwrap(),
            sphere_presentation(1, 1).unwrap(),
            loops_presentation(4, 2, 20).unwrap(),
            loops_presentation(5, 1, 20).unwrap(),
            crate::spaces::projective_presentation(7, 3).unwrap(),
        ];
        for m in &spaces {
            for q in -2..12 {
                for r in -6..8 {
                    let rank = m.mackey_eval(q, r);
                    assert!(rank.is_consistent(), "{} at ({q},{r})", m.name);
                    if let Ok(shape) = rank.assemble() {
                        assert_eq!(shape.check_axioms(), Ok(()));
                        assert_eq!(shape.dim_fixed() as u32, rank.dim_fixed);
                        assert_eq!(shape.dim_free() as u32, rank.dim_free);
                        let summands = m.coefficient_summands(q, r).unwrap();
                        let multiset: Vec<_> = summands.iter().map(|s| s.functor).collect();
                        assert_eq!(Decomposition::from_multiset(&multiset), rank.to_named().unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn counts_are_additive_over_unions() {
        let a = sphere_presentation(4, 2).unwrap();
        let b = loops_presentation(3, 1, 9).unwrap();
        let u = a.disjoint_union(&b);
        for p in -3..10 {
            assert_eq!(u.free_dim(p), a.free_dim(p) + b.free_dim(p));
            for w in -5..8 {
                let d = Bidegree::new(p, w);
                assert_eq!(u.fixed_dim(d), a.fixed_dim(d) + b.fixed_dim(d));
            }
        }
    }

    #[test]
    fn json_schema_round_trip_and_guards() {
        let s = sphere_presentation(4, 2).unwrap();
        let text = s.to_json();
        assert!(text.contains(r#""p": 4"#));
        assert_eq!(ModulePresentation::from_json(&text).unwrap(), s);
        let negative = r#"{"name":"x","generators":[{"label":"g","p":-1,"w":0}],"fixed_betti":[1],"one_connected":true,"fixed_connected":true}"#;
        assert!(matches!(ModulePresentation::from_json(negative), Err(ChartError::Json(_))));
        let rel = r#"{"name":"x","generators":[],"relations":["a^2"]}"#;
        assert!(matches!(ModulePresentation::from_json(rel), Err(ChartError::NotFree(_))));
        assert!(matches!(
            ModulePresentation::new("x", vec![], vec![2], false, true),
            Err(ChartError::FixedNotConnected(2))
        ));
    }
}
