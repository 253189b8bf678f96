//! The bigraded coefficient rings of the two orbits of Z/2.
//!
//! `H^{*,*}(pt)` with constant F2 coefficients has dimension at most one in
//! every bidegree: a positive cone spanned by the monomials `rho^a tau^b` and a
//! negative cone spanned by `theta/(rho^a tau^b)`, where `theta` sits in
//! degree `(0,-2)`. The free orbit has the Laurent ring `F2[t, t^-1]`.
//!
//! Because every graded piece is at most one-dimensional, elements here are
//! basis elements (or zero). Sums live in the module charts.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A bidegree `(p, w)`: topological degree and weight.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bidegree {
    pub p: i64,
    pub w: i64,
}

impl Bidegree {
    pub const ZERO: Bidegree = Bidegree { p: 0, w: 0 };

    pub const fn new(p: i64, w: i64) -> Self {
        Self { p, w }
    }
}

impl Add for Bidegree {
    type Output = Bidegree;
    fn add(self, rhs: Bidegree) -> Bidegree {
        Bidegree::new(self.p + rhs.p, self.w + rhs.w)
    }
}

impl Sub for Bidegree {
    type Output = Bidegree;
    fn sub(self, rhs: Bidegree) -> Bidegree {
        Bidegree::new(self.p - rhs.p, self.w - rhs.w)
    }
}

impl Neg for Bidegree {
    type Output = Bidegree;
    fn neg(self) -> Bidegree {
        Bidegree::new(-self.p, -self.w)
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.w)
    }
}

impl From<(i64, i64)> for Bidegree {
    fn from((p, w): (i64, i64)) -> Self {
        Bidegree::new(p, w)
    }
}

/// A basis element of `H^{*,*}(pt; Z/2)`, or zero.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroundElement {
    Zero,
    /// `rho^rho tau^tau`, in degree `(rho, rho + tau)`.
    Top { rho: u32, tau: u32 },
    /// `theta / (rho^rho tau^tau)`, in degree `(-rho, -2 - rho - tau)`.
    Bottom { rho: u32, tau: u32 },
}

impl GroundElement {
    pub const ONE: GroundElement = GroundElement::Top { rho: 0, tau: 0 };
    pub const RHO: GroundElement = GroundElement::Top { rho: 1, tau: 0 };
    pub const TAU: GroundElement = GroundElement::Top { rho: 0, tau: 1 };
    pub const THETA: GroundElement = GroundElement::Bottom { rho: 0, tau: 0 };

    pub fn top(rho: u32, tau: u32) -> Self {
        GroundElement::Top { rho, tau }
    }

    pub fn bottom(rho: u32, tau: u32) -> Self {
        GroundElement::Bottom { rho, tau }
    }

    pub fn tau_pow(k: u32) -> Self {
        GroundElement::Top { rho: 0, tau: k }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, GroundElement::Zero)
    }

    pub fn is_negative_cone(&self) -> bool {
        matches!(self, GroundElement::Bottom { .. })
    }

    /// Bidegree of a nonzero element; `None` for zero.
    pub fn bidegree(&self) -> Option<Bidegree> {
        match *self {
            GroundElement::Zero => None,
            GroundElement::Top { rho, tau } => {
                let (a, b) = (rho as i64, tau as i64);
                Some(Bidegree::new(a, a + b))
            }
            GroundElement::Bottom { rho, tau } => {
                let (a, b) = (rho as i64, tau as i64);
                Some(Bidegree::new(-a, -2 - a - b))
            }
        }
    }

    /// The unique basis element in bidegree `d`, or zero if that group vanishes.
    pub fn basis_at(d: Bidegree) -> GroundElement {
        if 0 <= d.p && d.p <= d.w {
            GroundElement::Top {
                rho: d.p as u32,
                tau: (d.w - d.p) as u32,
            }
        } else if d.p <= 0 && d.w <= d.p - 2 {
            let rho = -d.p;
            GroundElement::Bottom {
                rho: rho as u32,
                tau: (-2 - rho - d.w) as u32,
            }
        } else {
            GroundElement::Zero
        }
    }

    /// Multiply in `H^{*,*}(pt)`.
    pub fn mul(self, other: GroundElement) -> GroundElement {
        use GroundElement::*;
        match (self, other) {
            (Zero, _) | (_, Zero) => Zero,
            (Top { rho: a, tau: b }, Top { rho: c, tau: d }) => Top {
                rho: a + c,
                tau: b + d,
            },
            (Top { rho: c, tau: d }, Bottom { rho: a, tau: b })
            | (Bottom { rho: a, tau: b }, Top { rho: c, tau: d }) => {
                if c <= a && d <= b {
                    Bottom {
                        rho: a - c,
                        tau: b - d,
                    }
                } else {
                    Zero
                }
            }
            // theta^2 = 0 and more generally the negative cone squares to zero.
            (Bottom { .. }, Bottom { .. }) => Zero,
        }
    }

    /// Restriction to the free orbit.
    pub fn restrict(self) -> OrbitElement {
        match self {
            GroundElement::Top { rho: 0, tau } => OrbitElement::T(tau as i64),
            // Negative-cone restriction is taken to vanish; see module docs of `ground`.
            _ => OrbitElement::Zero,
        }
    }
}

/// Dimension of `H^{p,w}(pt; Z/2)`.
pub fn point_dim(d: Bidegree) -> u32 {
    u32::from(!GroundElement::basis_at(d).is_zero())
}

/// Multiply two basis elements of `H^{*,*}(pt)`.
pub fn point_mul(x: GroundElement, y: GroundElement) -> GroundElement {
    x.mul(y)
}

fn write_monomial(f: &mut fmt::Formatter<'_>, rho: u32, tau: u32) -> fmt::Result {
    let mut parts = Vec::new();
    for (name, e) in [("rho", rho), ("tau", tau)] {
        match e {
            0 => {}
            1 => parts.push(name.to_string()),
            e => parts.push(format!("{name}^{e}")),
        }
    }
    if parts.is_empty() {
        write!(f, "1")
    } else {
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Display for GroundElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GroundElement::Zero => write!(f, "0"),
            GroundElement::Top { rho, tau } => write_monomial(f, rho, tau),
            GroundElement::Bottom { rho: 0, tau: 0 } => write!(f, "theta"),
            GroundElement::Bottom { rho, tau } => {
                write!(f, "theta/(")?;
                write_monomial(f, rho, tau)?;
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse ground ring element {0:?}")]
pub struct ParseGroundError(pub String);

fn parse_monomial(s: &str) -> Option<(u32, u32)> {
    let s = s.trim();
    if s == "1" {
        return Some((0, 0));
    }
    let (mut rho, mut tau) = (0u32, 0u32);
    for factor in s.split_whitespace() {
        let (name, exp) = match factor.split_once('^') {
            Some((n, e)) => (n, e.parse::<u32>().ok()?),
            None => (factor, 1),
        };
        match name {
            "rho" => rho += exp,
            "tau" => tau += exp,
            _ => return None,
        }
    }
    Some((rho, tau))
}

impl FromStr for GroundElement {
    type Err = ParseGroundError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseGroundError(s.to_string());
        let t = s.trim();
        if t == "0" {
            return Ok(GroundElement::Zero);
        }
        if t == "theta" {
            return Ok(GroundElement::THETA);
        }
        if let Some(rest) = t.strip_prefix("theta/") {
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .unwrap_or(rest);
            let (rho, tau) = parse_monomial(inner).ok_or_else(err)?;
            return Ok(GroundElement::Bottom { rho, tau });
        }
        let (rho, tau) = parse_monomial(t).ok_or_else(err)?;
        Ok(GroundElement::Top { rho, tau })
    }
}

impl Serialize for GroundElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroundElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A basis element of `H^{*,*}(Z/2; Z/2) = F2[t, t^-1]`, or zero.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrbitElement {
    Zero,
    T(i64),
}

impl OrbitElement {
    pub const ONE: OrbitElement = OrbitElement::T(0);

    pub fn bidegree(&self) -> Option<Bidegree> {
        match *self {
            OrbitElement::Zero => None,
            OrbitElement::T(k) => Some(Bidegree::new(0, k)),
        }
    }

    pub fn mul(self, other: OrbitElement) -> OrbitElement {
        match (self, other) {
            (OrbitElement::T(j), OrbitElement::T(k)) => OrbitElement::T(j + k),
            _ => OrbitElement::Zero,
        }
    }
}

impl fmt::Display for OrbitElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            OrbitElement::Zero => write!(f, "0"),
            OrbitElement::T(k) => write!(f, "t^{k}"),
        }
    }
}

/// Dimension of `H^{p,w}(Z/2; Z/2)`.
pub fn orbit_dim(d: Bidegree) -> u32 {
    u32::from(d.p == 0)
}

pub fn orbit_mul(x: OrbitElement, y: OrbitElement) -> OrbitElement {
    x.mul(y)
}

pub fn restrict(x: GroundElement) -> OrbitElement {
    x.restrict()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window_basis(lo: i64, hi: i64) -> Vec<GroundElement> {
        let mut out = Vec::new();
        for p in lo..=hi {
            for w in lo..=hi {
                let x = GroundElement::basis_at(Bidegree::new(p, w));
                if !x.is_zero() {
                    out.push(x);
                }
            }
        }
        out
    }

    #[test]
    fn dims_of_named_classes() {
        assert_eq!(point_dim(Bidegree::new(0, 0)), 1);
        assert_eq!(point_dim(Bidegree::new(1, 1)), 1);
        assert_eq!(point_dim(Bidegree::new(0, -2)), 1);
        assert_eq!(point_dim(Bidegree::new(-1, -3)), 1);
        assert_eq!(point_dim(Bidegree::new(1, 0)), 0);
        assert_eq!(point_dim(Bidegree::new(1, -1)), 0);
        assert_eq!(point_dim(Bidegree::new(-1, -1)), 0);
        assert_eq!(point_dim(Bidegree::new(0, -1)), 0);
    }

    #[test]
    fn products() {
        use GroundElement as G;
        assert_eq!(G::RHO.mul(G::TAU), G::top(1, 1));
        assert_eq!(G::RHO.mul(G::bottom(1, 0)), G::THETA);
        assert_eq!(G::TAU.mul(G::bottom(0, 1)), G::THETA);
        assert_eq!(G::top(2, 0).mul(G::bottom(1, 0)), G::Zero);
        assert_eq!(G::TAU.mul(G::THETA), G::Zero);
        assert_eq!(G::THETA.mul(G::THETA), G::Zero);
        assert_eq!(G::ONE.mul(G::bottom(3, 2)), G::bottom(3, 2));
    }

    #[test]
    fn orbit_ring() {
        assert_eq!(orbit_dim(Bidegree::new(0, 5)), 1);
        assert_eq!(orbit_dim(Bidegree::new(0, -3)), 1);
        assert_eq!(orbit_dim(Bidegree::new(1, 0)), 0);
        assert_eq!(orbit_mul(OrbitElement::T(2), OrbitElement::T(-2)), OrbitElement::ONE);
    }

    #[test]
    fn restriction_values() {
        assert_eq!(restrict(GroundElement::TAU), OrbitElement::T(1));
        assert_eq!(restrict(GroundElement::RHO), OrbitElement::Zero);
        assert_eq!(restrict(GroundElement::ONE), OrbitElement::ONE);
        assert_eq!(restrict(GroundElement::THETA), OrbitElement::Zero);
    }

    #[test]
    fn exhaustive_ring_laws_on_window() {
        let basis = window_basis(-6, 6);
        for &x in &basis {
            for &y in &basis {
                let xy = x.mul(y);
                assert_eq!(xy, y.mul(x));
                if let Some(d) = xy.bidegree() {
                    let expected = x.bidegree().unwrap() + y.bidegree().unwrap();
                    assert_eq!(d, expected);
                    assert_eq!(point_dim(d), 1, "{x} * {y} lands outside the cones");
                }
                assert_eq!(
                    xy.restrict(),
                    x.restrict().mul(y.restrict()),
                    "restriction fails to be multiplicative on {x}, {y}"
                );
                for &z in &basis {
                    assert_eq!(xy.mul(z), x.mul(y.mul(z)));
                }
            }
        }
    }

    #[test]
    fn divisibility() {
        for a in 0..8 {
            for b in 0..8 {
                assert_eq!(GroundElement::RHO.mul(GroundElement::bottom(a + 1, b)), GroundElement::bottom(a, b));
                assert_eq!(GroundElement::TAU.mul(GroundElement::bottom(a, b + 1)), GroundElement::bottom(a, b));
            }
        }
    }

    #[test]
    fn text_round_trip() {
        for x in window_basis(-6, 6) {
            let s = x.to_string();
            assert_eq!(s.parse::<GroundElement>().unwrap(), x, "{s}");
        }
        assert_eq!(GroundElement::top(2, 1).to_string(), "rho^2 tau");
        assert_eq!(GroundElement::bottom(1, 0).to_string(), "theta/(rho)");
        assert_eq!(GroundElement::ONE.to_string(), "1");
        assert!("sigma".parse::<GroundElement>().is_err());
    }
}
