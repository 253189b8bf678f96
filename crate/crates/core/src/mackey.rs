//! F2 Mackey functors for Z/2.
//!
//! A Mackey functor has a fixed level `M(Z/2/Z/2)` and a free level `M(Z/2/e)`,
//! with restriction `res: fixed -> free`, transfer `tr: free -> fixed` and a
//! Weyl involution on the free level. Matrices act on column vectors, so
//! `res` is `free x fixed` and `tr` is `fixed x free`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::f2::F2Matrix;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MackeyError {
    #[error("{map} has shape {got:?}, expected {expected:?}")]
    Shape {
        map: &'static str,
        got: (usize, usize),
        expected: (usize, usize),
    },
    #[error("matrix entries must be 0 or 1 with rows of equal length")]
    BadMatrix,
}

/// One of the four defining conditions of a Z/2 Mackey functor.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    /// involution squared is the identity
    InvolutionSquare = 1,
    /// involution composed with restriction is restriction
    InvariantRestriction = 2,
    /// transfer composed with involution is transfer
    InvariantTransfer = 3,
    /// restriction after transfer is `id + involution`
    DoubleCoset = 4,
}

impl Axiom {
    pub const ALL: [Axiom; 4] = [
        Axiom::InvolutionSquare,
        Axiom::InvariantRestriction,
        Axiom::InvariantTransfer,
        Axiom::DoubleCoset,
    ];

    pub fn index(self) -> u8 {
        self as u8
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MackeyShape {
    dim_fixed: usize,
    dim_free: usize,
    invol: F2Matrix,
    res: F2Matrix,
    tr: F2Matrix,
}

impl MackeyShape {
    pub fn new(
        dim_fixed: usize,
        dim_free: usize,
        invol: F2Matrix,
        res: F2Matrix,
        tr: F2Matrix,
    ) -> Result<Self, MackeyError> {
        let check = |map, m: &F2Matrix, expected: (usize, usize)| {
            let got = (m.rows(), m.cols());
            if got == expected {
                Ok(())
            } else {
                Err(MackeyError::Shape { map, got, expected })
            }
        };
        check("involution", &invol, (dim_free, dim_free))?;
        check("restriction", &res, (dim_free, dim_fixed))?;
        check("transfer", &tr, (dim_fixed, dim_free))?;
        Ok(Self {
            dim_fixed,
            dim_free,
            invol,
            res,
            tr,
        })
    }

    pub fn zero() -> Self {
        NamedFunctor::Zero.shape()
    }

    pub fn dim_fixed(&self) -> usize {
        self.dim_fixed
    }

    pub fn dim_free(&self) -> usize {
        self.dim_free
    }

    pub fn involution(&self) -> &F2Matrix {
        &self.invol
    }

    pub fn restriction(&self) -> &F2Matrix {
        &self.res
    }

    pub fn transfer(&self) -> &F2Matrix {
        &self.tr
    }

    /// Which of the four axioms fail, in order. Empty means the shape is a Mackey functor.
    pub fn violated_axioms(&self) -> Vec<Axiom> {
        let id = F2Matrix::identity(self.dim_free);
        // Shapes are validated at construction, so products below never mismatch.
        let holds = |axiom| -> bool {
            match axiom {
                Axiom::InvolutionSquare => self.invol.mul(&self.invol).unwrap() == id,
                Axiom::InvariantRestriction => self.invol.mul(&self.res).unwrap() == self.res,
                Axiom::InvariantTransfer => self.tr.mul(&self.invol).unwrap() == self.tr,
                Axiom::DoubleCoset => {
                    self.res.mul(&self.tr).unwrap() == id.add(&self.invol).unwrap()
                }
            }
        };
        Axiom::ALL.into_iter().filter(|&a| !holds(a)).collect()
    }

    pub fn check_axioms(&self) -> Result<(), Vec<Axiom>> {
        let bad = self.violated_axioms();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(bad)
        }
    }

    pub fn direct_sum(&self, other: &MackeyShape) -> MackeyShape {
        MackeyShape {
            dim_fixed: self.dim_fixed + other.dim_fixed,
            dim_free: self.dim_free + other.dim_free,
            invol: self.invol.direct_sum(&other.invol),
            res: self.res.direct_sum(&other.res),
            tr: self.tr.direct_sum(&other.tr),
        }
    }

    /// Split into catalog summands.
    ///
    /// Works whenever the involution is trivial and `tr . res = 0` (with the
    /// fourth axiom this also forces `res . tr = 0`). Under those conditions the
    /// indecomposables are exactly the catalog functors and the multiplicities
    /// are read off from ranks. Anything else is `Unrecognized`.
    pub fn decompose(&self) -> Result<Decomposition, Unrecognized> {
        if self.check_axioms().is_err()
            || self.invol != F2Matrix::identity(self.dim_free)
            || !self.tr.mul(&self.res).unwrap().is_zero()
        {
            return Err(Unrecognized);
        }
        let res_rank = self.res.rank();
        let tr_rank = self.tr.rank();
        Ok(Decomposition {
            constant: res_rank,
            bracket: self.dim_fixed - res_rank - tr_rank,
            dual_constant: tr_rank,
            free_only: self.dim_free - res_rank - tr_rank,
        })
    }
}

/// JSON form: `{"fixed": n, "free": m, "invol": [[..]], "res": [[..]], "tr": [[..]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShapeJson {
    fixed: usize,
    free: usize,
    invol: Vec<Vec<u8>>,
    res: Vec<Vec<u8>>,
    tr: Vec<Vec<u8>>,
}

impl Serialize for MackeyShape {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ShapeJson {
            fixed: self.dim_fixed,
            free: self.dim_free,
            invol: self.invol.to_rows(),
            res: self.res.to_rows(),
            tr: self.tr.to_rows(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MackeyShape {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let j = ShapeJson::deserialize(deserializer)?;
        let bad = |_| D::Error::custom(MackeyError::BadMatrix);
        let mat = |rows: &[Vec<u8>], cols| F2Matrix::from_rows(rows, cols).ok_or(MackeyError::BadMatrix);
        let invol = mat(&j.invol, j.free).map_err(bad)?;
        let res = mat(&j.res, j.fixed).map_err(bad)?;
        let tr = mat(&j.tr, j.free).map_err(bad)?;
        MackeyShape::new(j.fixed, j.free, invol, res, tr).map_err(D::Error::custom)
    }
}

/// The catalog of Mackey functors that appear as coefficients.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedFunctor {
    /// The constant functor: restriction an isomorphism, transfer zero.
    Constant,
    /// `<Z/2>`: fixed level only.
    Bracket,
    /// Dual of the constant functor: restriction zero, transfer an isomorphism.
    DualConstant,
    /// Free level only.
    FreeOnly,
    Zero,
}

impl NamedFunctor {
    pub const ALL: [NamedFunctor; 5] = [
        NamedFunctor::Constant,
        NamedFunctor::Bracket,
        NamedFunctor::DualConstant,
        NamedFunctor::FreeOnly,
        NamedFunctor::Zero,
    ];

    pub fn shape(self) -> MackeyShape {
        let one = || F2Matrix::identity(1);
        let (fixed, free, res, tr) = match self {
            NamedFunctor::Constant => (1, 1, one(), F2Matrix::zeros(1, 1)),
            NamedFunctor::Bracket => (1, 0, F2Matrix::zeros(0, 1), F2Matrix::zeros(1, 0)),
            NamedFunctor::DualConstant => (1, 1, F2Matrix::zeros(1, 1), one()),
            NamedFunctor::FreeOnly => (0, 1, F2Matrix::zeros(1, 0), F2Matrix::zeros(0, 1)),
            NamedFunctor::Zero => (0, 0, F2Matrix::zeros(0, 0), F2Matrix::zeros(0, 0)),
        };
        MackeyShape::new(fixed, free, F2Matrix::identity(free), res, tr).expect("catalog shapes are consistent")
    }

    /// Short name as printed in charts.
    pub fn symbol(self) -> &'static str {
        match self {
            NamedFunctor::Constant => "Z/2",
            NamedFunctor::Bracket => "<Z/2>",
            NamedFunctor::DualConstant => "Z/2*",
            NamedFunctor::FreeOnly => "Z/2[free]",
            NamedFunctor::Zero => "0",
        }
    }
}

impl fmt::Display for NamedFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Marker for a functor outside the supported catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("Mackey functor is not a sum of catalog functors")]
pub struct Unrecognized;

/// Multiplicities of the catalog summands.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decomposition {
    pub constant: usize,
    pub bracket: usize,
    pub dual_constant: usize,
    pub free_only: usize,
}

impl Decomposition {
    pub fn from_multiset(items: &[NamedFunctor]) -> Self {
        let mut d = Decomposition::default();
        for f in items {
            match f {
                NamedFunctor::Constant => d.constant += 1,
                NamedFunctor::Bracket => d.bracket += 1,
                NamedFunctor::DualConstant => d.dual_constant += 1,
                NamedFunctor::FreeOnly => d.free_only += 1,
                NamedFunctor::Zero => {}
            }
        }
        d
    }

    /// Canonically ordered multiset; the empty sum is `[Zero]`.
    pub fn to_multiset(&self) -> Vec<NamedFunctor> {
        let mut out = Vec::new();
        out.extend(std::iter::repeat_n(NamedFunctor::Constant, self.constant));
        out.extend(std::iter::repeat_n(NamedFunctor::Bracket, self.bracket));
        out.extend(std::iter::repeat_n(NamedFunctor::DualConstant, self.dual_constant));
        out.extend(std::iter::repeat_n(NamedFunctor::FreeOnly, self.free_only));
        if out.is_empty() {
            out.push(NamedFunctor::Zero);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        *self == Decomposition::default()
    }

    /// A single catalog functor, if the sum has exactly one nonzero summand.
    pub fn as_single(&self) -> Option<NamedFunctor> {
        match self.to_multiset().as_slice() {
            [one] => Some(*one),
            _ => None,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (
            self.constant + self.bracket + self.dual_constant,
            self.constant + self.dual_constant + self.free_only,
        )
    }

    pub fn shape(&self) -> MackeyShape {
        direct_sum(&self.to_multiset())
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.to_multiset().iter().map(|n| n.to_string()).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn direct_sum(items: &[NamedFunctor]) -> MackeyShape {
    items
        .iter()
        .fold(MackeyShape::zero(), |acc, f| acc.direct_sum(&f.shape()))
}
