//! Exact-rational fuzzy subsets over a finite Γ-semigroup.
//!
//! Grades are reduced fractions in `[0,1]`. The membership relations mix
//! strict and non-strict comparisons (`mu(x) >= t` against `mu(x) + t > 1`),
//! so floating point is never used.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::structure::{CrispSubset, GammaSemigroup};

/// Largest number of fractional digits accepted in a decimal literal.
const MAX_DECIMAL_DIGITS: usize = 15;

/// A membership grade: an exact rational in `[0,1]`, always reduced.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Grade(Ratio<i64>);

impl Grade {
    pub const ZERO: Grade = Grade(Ratio::new_raw(0, 1));
    pub const HALF: Grade = Grade(Ratio::new_raw(1, 2));
    pub const ONE: Grade = Grade(Ratio::new_raw(1, 1));

    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::BadRational(format!("{numer}/{denom}")));
        }
        Self::from_ratio(Ratio::new(numer, denom))
    }

    pub fn from_ratio(r: Ratio<i64>) -> Result<Self> {
        if r < Ratio::zero() || r > Ratio::one() {
            return Err(Error::BadRational(format!("{}/{}", r.numer(), r.denom())));
        }
        Ok(Grade(r))
    }

    pub fn ratio(self) -> Ratio<i64> {
        self.0
    }

    pub fn numer(self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    /// `1 - self`.
    pub fn complement(self) -> Grade {
        Grade(Ratio::one() - self.0)
    }

    /// `(self + other) / 2`.
    pub fn midpoint(self, other: Grade) -> Grade {
        Grade((self.0 + other.0) / 2)
    }

    /// `self + t > 1`, the quasi-coincidence test.
    pub fn exceeds_complement_of(self, t: Grade) -> bool {
        self.0 + t.0 > Ratio::one()
    }

    /// Approximate value, for display only.
    pub fn to_f64(self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Grade {
    type Err = Error;

    /// Accepts `p/q`, integers and decimal literals; decimals are read
    /// exactly (`0.78` is `39/50`).
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::BadRational(text.to_string());
        let s = text.trim();
        if s.is_empty() || s.starts_with('-') || s.starts_with('+') {
            return Err(bad());
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            return Grade::new(p, q).map_err(|_| bad());
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        let digits_ok = |d: &str| d.bytes().all(|b| b.is_ascii_digit());
        if (int.is_empty() && frac.is_empty())
            || !digits_ok(int)
            || !digits_ok(frac)
            || frac.len() > MAX_DECIMAL_DIGITS
            || int.len() > 3
        {
            return Err(bad());
        }
        let int: i64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let scale = 10i64.pow(frac.len() as u32);
        let frac: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        Grade::new(int * scale + frac, scale).map_err(|_| bad())
    }
}

/// A total map from carrier elements to grades.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FuzzySubset {
    structure: Arc<GammaSemigroup>,
    grades: Vec<Grade>,
}

impl FuzzySubset {
    pub fn new(structure: Arc<GammaSemigroup>, grades: Vec<Grade>) -> Result<Self> {
        if grades.len() != structure.size() {
            return Err(Error::MapNotTotal {
                expected: structure.size(),
                actual: grades.len(),
            });
        }
        Ok(Self { structure, grades })
    }

    /// Grades by element name; unnamed elements get `0`.
    pub fn from_named<'a>(
        structure: Arc<GammaSemigroup>,
        entries: impl IntoIterator<Item = (&'a str, Grade)>,
    ) -> Result<Self> {
        let mut grades = vec![Grade::ZERO; structure.size()];
        for (name, g) in entries {
            let i = structure
                .element_index(name)
                .ok_or_else(|| Error::UnknownElement(name.to_string()))?;
            grades[i] = g;
        }
        Ok(Self { structure, grades })
    }

    pub fn structure(&self) -> &Arc<GammaSemigroup> {
        &self.structure
    }

    pub fn grade(&self, x: usize) -> Grade {
        self.grades[x]
    }

    pub fn grades(&self) -> &[Grade] {
        &self.grades
    }

    /// `true` for the zero subset, which every predicate rejects.
    pub fn is_zero(&self) -> bool {
        self.grades.iter().all(|g| g.is_zero())
    }

    /// Pointwise `self <= other`.
    pub fn is_subset_of(&self, other: &FuzzySubset) -> Result<bool> {
        ensure_same(self, other)?;
        Ok(self.grades.iter().zip(&other.grades).all(|(a, b)| a <= b))
    }

    fn with_grades(&self, grades: Vec<Grade>) -> FuzzySubset {
        FuzzySubset {
            structure: self.structure.clone(),
            grades,
        }
    }

    /// Pointwise min with the constant `c`, i.e. `self ∩ c_S`.
    pub fn capped(&self, c: Grade) -> FuzzySubset {
        self.with_grades(self.grades.iter().map(|&g| g.min(c)).collect())
    }

    pub fn intersection(&self, other: &FuzzySubset) -> Result<FuzzySubset> {
        pointwise_family(FamilyOp::Min, [self, other])
    }

    pub fn union(&self, other: &FuzzySubset) -> Result<FuzzySubset> {
        pointwise_family(FamilyOp::Max, [self, other])
    }
}

impl fmt::Debug for FuzzySubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (i, g) in self.grades.iter().enumerate() {
            m.entry(&self.structure.element_name(i), g);
        }
        m.finish()
    }
}

/// Same structure by identity or by value.
pub fn same_structure(a: &GammaSemigroup, b: &GammaSemigroup) -> bool {
    std::ptr::eq(a, b) || a == b
}

fn ensure_same(a: &FuzzySubset, b: &FuzzySubset) -> Result<()> {
    if same_structure(&a.structure, &b.structure) {
        Ok(())
    } else {
        Err(Error::StructureMismatch)
    }
}

/// A fuzzy point `x_t` with `t` in `(0,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzyPoint {
    pub support: usize,
    pub value: Grade,
}

impl FuzzyPoint {
    pub fn new(support: usize, value: Grade) -> Result<Self> {
        if value.is_zero() {
            return Err(Error::InvalidPointValue);
        }
        Ok(Self { support, value })
    }
}

/// Relation between a fuzzy point and a fuzzy subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationKind {
    /// `mu(x) >= t`
    In,
    /// `mu(x) + t > 1`
    Q,
    InOrQ,
    InAndQ,
}

impl RelationKind {
    pub const ALL: [RelationKind; 4] = [
        RelationKind::In,
        RelationKind::Q,
        RelationKind::InOrQ,
        RelationKind::InAndQ,
    ];

    /// CLI spelling: `in`, `q`, `invq`, `inandq`.
    pub fn name(self) -> &'static str {
        match self {
            RelationKind::In => "in",
            RelationKind::Q => "q",
            RelationKind::InOrQ => "invq",
            RelationKind::InAndQ => "inandq",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        RelationKind::ALL.into_iter().find(|r| r.name() == s)
    }
}

/// A relation kind plus an optional negation (the overlined relations).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointRelation {
    pub kind: RelationKind,
    pub negated: bool,
}

impl PointRelation {
    pub const IN: PointRelation = PointRelation::plain(RelationKind::In);
    pub const Q: PointRelation = PointRelation::plain(RelationKind::Q);
    pub const IN_OR_Q: PointRelation = PointRelation::plain(RelationKind::InOrQ);
    pub const IN_AND_Q: PointRelation = PointRelation::plain(RelationKind::InAndQ);

    pub const fn plain(kind: RelationKind) -> Self {
        Self {
            kind,
            negated: false,
        }
    }

    pub const fn negate(self) -> Self {
        Self {
            kind: self.kind,
            negated: !self.negated,
        }
    }

    /// Whether `x_t rel mu` when `mu(x) = grade`.
    #[inline]
    pub fn holds(self, grade: Grade, t: Grade) -> bool {
        let belongs = grade >= t;
        let quasi = grade.exceeds_complement_of(t);
        let v = match self.kind {
            RelationKind::In => belongs,
            RelationKind::Q => quasi,
            RelationKind::InOrQ => belongs || quasi,
            RelationKind::InAndQ => belongs && quasi,
        };
        v != self.negated
    }

    pub fn name(self) -> String {
        if self.negated {
            format!("not-{}", self.kind.name())
        } else {
            self.kind.name().to_string()
        }
    }
}

pub fn point_satisfies(p: FuzzyPoint, mu: &FuzzySubset, rel: PointRelation) -> Result<bool> {
    if p.support >= mu.structure.size() {
        return Err(Error::IndexOutOfRange(p.support));
    }
    Ok(rel.holds(mu.grade(p.support), p.value))
}

/// `U(mu;t)`, `Q(mu;t)` and `[mu]_t = U ∪ Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSets {
    pub upper: CrispSubset,
    pub quasi: CrispSubset,
    pub bracket: CrispSubset,
}

pub fn level_sets(mu: &FuzzySubset, t: Grade) -> Result<LevelSets> {
    if t.is_zero() {
        return Err(Error::InvalidThreshold(t.to_string()));
    }
    let n = mu.structure.size();
    let upper = CrispSubset::from_indices(n, (0..n).filter(|&x| mu.grade(x) >= t))?;
    let quasi =
        CrispSubset::from_indices(n, (0..n).filter(|&x| mu.grade(x).exceeds_complement_of(t)))?;
    let bracket = upper.union(&quasi);
    Ok(LevelSets {
        upper,
        quasi,
        bracket,
    })
}

/// `U(mu;t) = { x : mu(x) >= t }` alone.
pub fn upper_level(mu: &FuzzySubset, t: Grade) -> CrispSubset {
    let n = mu.structure.size();
    let mut out = CrispSubset::empty(n);
    for x in (0..n).filter(|&x| mu.grade(x) >= t) {
        out.insert(x);
    }
    out
}

pub fn support(mu: &FuzzySubset) -> CrispSubset {
    let n = mu.structure.size();
    let mut out = CrispSubset::empty(n);
    for x in (0..n).filter(|&x| !mu.grade(x).is_zero()) {
        out.insert(x);
    }
    out
}

fn sup_min_product(lambda: &FuzzySubset, mu: &FuzzySubset, cap: Grade) -> Result<FuzzySubset> {
    ensure_same(lambda, mu)?;
    let s = &lambda.structure;
    let mut out = vec![Grade::ZERO; s.size()];
    for y in 0..s.size() {
        let ly = lambda.grade(y).min(cap);
        if ly.is_zero() {
            continue;
        }
        for z in 0..s.size() {
            let v = ly.min(mu.grade(z));
            for g in 0..s.gamma_count() {
                let a = s.op(y, g, z);
                if v > out[a] {
                    out[a] = v;
                }
            }
        }
    }
    Ok(lambda.with_grades(out))
}

/// `(lambda ∘ mu)(a) = max { min(lambda(y), mu(z)) : y gamma z = a }`, and
/// `0` when `a` has no factorization.
pub fn o_product(lambda: &FuzzySubset, mu: &FuzzySubset) -> Result<FuzzySubset> {
    sup_min_product(lambda, mu, Grade::ONE)
}

/// The 0.5-product: as [`o_product`] with every min also capped at `1/2`.
pub fn o05_product(mu1: &FuzzySubset, mu2: &FuzzySubset) -> Result<FuzzySubset> {
    sup_min_product(mu1, mu2, Grade::HALF)
}

/// `(mu1 ∩_0.5 mu2)(x) = min(mu1(x), mu2(x), 1/2)`.
pub fn cap05(mu1: &FuzzySubset, mu2: &FuzzySubset) -> Result<FuzzySubset> {
    ensure_same(mu1, mu2)?;
    Ok(mu1.with_grades(
        mu1.grades
            .iter()
            .zip(&mu2.grades)
            .map(|(&a, &b)| a.min(b).min(Grade::HALF))
            .collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyOp {
    /// Intersection.
    Min,
    /// Union.
    Max,
}

pub fn pointwise_family<'a>(
    op: FamilyOp,
    family: impl IntoIterator<Item = &'a FuzzySubset>,
) -> Result<FuzzySubset> {
    let mut iter = family.into_iter();
    let first = iter.next().ok_or(Error::EmptyFamily)?;
    let mut acc = first.grades.clone();
    for mu in iter {
        ensure_same(first, mu)?;
        for (a, &b) in acc.iter_mut().zip(&mu.grades) {
            *a = match op {
                FamilyOp::Min => (*a).min(b),
                FamilyOp::Max => (*a).max(b),
            };
        }
    }
    Ok(first.with_grades(acc))
}

/// `chi_A`: `1` on `A`, `0` elsewhere.
pub fn characteristic(s: &Arc<GammaSemigroup>, a: &CrispSubset) -> FuzzySubset {
    constant(s, Grade::ONE, a)
}

/// `c` on `X`, `0` elsewhere. Covers `0`, `1`, `0.5_S` and `0.5_{Supp(mu)}`.
pub fn constant(s: &Arc<GammaSemigroup>, c: Grade, on: &CrispSubset) -> FuzzySubset {
    FuzzySubset {
        structure: s.clone(),
        grades: (0..s.size())
            .map(|x| if on.contains(x) { c } else { Grade::ZERO })
            .collect(),
    }
}

/// `c` everywhere.
pub fn constant_everywhere(s: &Arc<GammaSemigroup>, c: Grade) -> FuzzySubset {
    constant(s, c, &s.carrier())
}

/// Representatives of every cell of `(0,1]` cut by the given breakpoints.
///
/// Breakpoints outside `(0,1]` are dropped and `1` is always added. The
/// result holds every breakpoint, the midpoint between consecutive
/// breakpoints and the midpoint of `(0, smallest)`, ascending. Any condition
/// built from `t <= c` and `t > c` with `c` among the breakpoints is constant
/// on each cell, so testing these representatives is exact.
pub fn cell_representatives(breakpoints: impl IntoIterator<Item = Grade>) -> Vec<Grade> {
    let mut pts: Vec<Grade> = breakpoints
        .into_iter()
        .filter(|g| !g.is_zero())
        .chain(std::iter::once(Grade::ONE))
        .collect();
    pts.sort_unstable();
    pts.dedup();
    let mut out = Vec::with_capacity(pts.len() * 2);
    let mut prev = Grade::ZERO;
    for p in pts {
        out.push(prev.midpoint(p));
        out.push(p);
        prev = p;
    }
    out
}

/// Cell representatives for `mu`: breakpoints `{mu(x)} ∪ {1 - mu(x)} ∪ {1/2, 1}`.
pub fn critical_thresholds(mu: &FuzzySubset) -> Vec<Grade> {
    cell_representatives(
        mu.grades
            .iter()
            .flat_map(|&g| [g, g.complement()])
            .chain([Grade::HALF, Grade::ONE]),
    )
}
