//! Decision procedures for the fuzzy predicates.
//!
//! Two families live here. The closed forms (`is_fuzzy_*`, `is_eq_*`) check
//! a single inequality per tuple. The generic `(alpha, beta)` deciders
//! quantify over thresholds `t, r` in `(0,1]`, and they do it exactly.
//! Every atomic test is `t <= c` or `t > c`, where `c` is a grade at one of
//! the involved elements or its complement. Each such test is constant on
//! every cell between consecutive breakpoints. `min(t, r)` of two cell
//! representatives lands in the cell of the smaller one. So it is enough to
//! test representatives of every cell; see [`cell_representatives`].
//!
//! All scans run in lexicographic tuple order and report the first failure,
//! also when evaluated in parallel.

use std::fmt;

use crate::error::{Error, Result};
use crate::fuzzy::{
    cell_representatives, o_product, FuzzySubset, Grade, PointRelation, RelationKind,
};
use crate::par;
use crate::structure::GammaSemigroup;

/// `(alpha, beta)` with `alpha` a plain `in`, `q` or `in-or-q` relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlphaBetaPair {
    alpha: PointRelation,
    beta: PointRelation,
}

impl AlphaBetaPair {
    pub fn new(alpha: PointRelation, beta: PointRelation) -> Result<Self> {
        if alpha.kind == RelationKind::InAndQ || alpha.negated {
            return Err(Error::InvalidAlpha);
        }
        Ok(Self { alpha, beta })
    }

    pub fn from_kinds(alpha: RelationKind, beta: RelationKind) -> Result<Self> {
        Self::new(PointRelation::plain(alpha), PointRelation::plain(beta))
    }

    /// The `(in, in-or-q)` pair.
    pub fn in_invq() -> Self {
        Self {
            alpha: PointRelation::IN,
            beta: PointRelation::IN_OR_Q,
        }
    }

    /// The `(in, in)` pair.
    pub fn in_in() -> Self {
        Self {
            alpha: PointRelation::IN,
            beta: PointRelation::IN,
        }
    }

    pub fn alpha(&self) -> PointRelation {
        self.alpha
    }

    pub fn beta(&self) -> PointRelation {
        self.beta
    }

    /// Every valid plain pair: 3 alphas by 4 betas.
    pub fn all_plain() -> Vec<AlphaBetaPair> {
        let mut out = Vec::new();
        for a in [RelationKind::In, RelationKind::Q, RelationKind::InOrQ] {
            for b in RelationKind::ALL {
                out.push(Self::from_kinds(a, b).expect("alpha is not in-and-q"));
            }
        }
        out
    }

    /// Parses `ALPHA,BETA`, e.g. `in,invq`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::UnknownPredicateName(s.to_string());
        let (a, b) = s.split_once(',').ok_or_else(bad)?;
        let a = RelationKind::parse(a.trim()).ok_or_else(bad)?;
        let b = RelationKind::parse(b.trim()).ok_or_else(bad)?;
        Self::from_kinds(a, b)
    }
}

impl fmt::Display for AlphaBetaPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.alpha.name(), self.beta.name())
    }
}

/// The tuple at which a predicate fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessTuple {
    /// `x gamma y`
    Pair { x: usize, y: usize, gamma: usize },
    /// `x gamma y delta z`
    Quintuple {
        x: usize,
        y: usize,
        z: usize,
        gamma: usize,
        delta: usize,
    },
}

impl WitnessTuple {
    /// The element whose grade the conclusion is about.
    pub fn product(&self, s: &GammaSemigroup) -> usize {
        match *self {
            WitnessTuple::Pair { x, y, gamma } => s.op(x, gamma, y),
            WitnessTuple::Quintuple {
                x,
                y,
                z,
                gamma,
                delta,
            } => s.op3(x, gamma, y, delta, z),
        }
    }

    /// The two elements the premise is about: `(x, y)` or `(x, z)`.
    pub fn premise_elements(&self) -> (usize, usize) {
        match *self {
            WitnessTuple::Pair { x, y, .. } => (x, y),
            WitnessTuple::Quintuple { x, z, .. } => (x, z),
        }
    }
}

/// A refuting tuple plus thresholds `t`, `r` for the two premise points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Witness {
    pub tuple: WitnessTuple,
    pub t: Grade,
    pub r: Grade,
}

impl Witness {
    /// Whether premise points `x_t`, `y_r` (or `x_t`, `z_r`) satisfy `alpha`
    /// while the product point at `min(t, r)` fails `beta`.
    pub fn refutes(&self, mu: &FuzzySubset, pair: AlphaBetaPair) -> bool {
        let s = mu.structure();
        let (a, b) = self.tuple.premise_elements();
        let p = self.tuple.product(s);
        pair.alpha.holds(mu.grade(a), self.t)
            && pair.alpha.holds(mu.grade(b), self.r)
            && !pair.beta.holds(mu.grade(p), self.t.min(self.r))
    }

    /// `key=value` rendering used in reports, e.g.
    /// `x=a y=b gamma=g t=39/50 r=33/50`.
    pub fn render(&self, s: &GammaSemigroup) -> String {
        let e = |i: usize| s.element_name(i);
        let g = |i: usize| s.gamma_name(i);
        let head = match self.tuple {
            WitnessTuple::Pair { x, y, gamma } => {
                format!("x={} y={} gamma={}", e(x), e(y), g(gamma))
            }
            WitnessTuple::Quintuple {
                x,
                y,
                z,
                gamma,
                delta,
            } => format!(
                "x={} y={} z={} gamma={} delta={}",
                e(x),
                e(y),
                e(z),
                g(gamma),
                g(delta)
            ),
        };
        format!("{head} t={} r={}", self.t, self.r)
    }
}

/// Outcome of a decider. `witness` is present exactly when `holds` is false.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredicateVerdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl PredicateVerdict {
    fn from_witness(witness: Option<Witness>) -> Self {
        Self {
            holds: witness.is_none(),
            witness,
        }
    }

    fn and_then(self, next: impl FnOnce() -> Result<Self>) -> Result<Self> {
        if self.holds {
            next()
        } else {
            Ok(self)
        }
    }
}

fn ensure_nonzero(mu: &FuzzySubset) -> Result<()> {
    if mu.is_zero() {
        Err(Error::EmptyFuzzySubset)
    } else {
        Ok(())
    }
}

/// First `Some` over `(x, y, gamma)` in lexicographic order.
fn scan_pairs<F>(s: &GammaSemigroup, check: F) -> Option<Witness>
where
    F: Fn(usize, usize, usize, usize) -> Option<Witness> + Sync + Send,
{
    let (n, k) = (s.size(), s.gamma_count());
    par::find_map_first(0..n * n, |i| {
        let (x, y) = (i / n, i % n);
        (0..k).find_map(|g| check(x, y, g, s.op(x, g, y)))
    })
}

/// First `Some` over `(x, y, z, gamma, delta)` in lexicographic order.
fn scan_quintuples<F>(s: &GammaSemigroup, check: F) -> Option<Witness>
where
    F: Fn(WitnessTuple, usize) -> Option<Witness> + Sync + Send,
{
    let (n, k) = (s.size(), s.gamma_count());
    par::find_map_first(0..n * n * n, |i| {
        let (x, y, z) = (i / (n * n), i / n % n, i % n);
        for gamma in 0..k {
            let xy = s.op(x, gamma, y);
            for delta in 0..k {
                let tuple = WitnessTuple::Quintuple {
                    x,
                    y,
                    z,
                    gamma,
                    delta,
                };
                if let Some(w) = check(tuple, s.op(xy, delta, z)) {
                    return Some(w);
                }
            }
        }
        None
    })
}

/// `mu(p) >= bound` or a witness at `t = r = bound`.
fn inequality(
    mu: &FuzzySubset,
    tuple: WitnessTuple,
    product: usize,
    bound: Grade,
) -> Option<Witness> {
    (mu.grade(product) < bound).then_some(Witness {
        tuple,
        t: bound,
        r: bound,
    })
}

/// `mu(x gamma y) >= min(mu(x), mu(y))` for all `x, y, gamma`.
pub fn is_fuzzy_subsemigroup(mu: &FuzzySubset) -> Result<PredicateVerdict> {
    ensure_nonzero(mu)?;
    Ok(PredicateVerdict::from_witness(scan_pairs(
        mu.structure(),
        |x, y, gamma, p| {
            let bound = mu.grade(x).min(mu.grade(y));
            inequality(mu, WitnessTuple::Pair { x, y, gamma }, p, bound)
        },
    )))
}

/// Fuzzy subsemigroup plus `mu(x alpha y beta z) >= min(mu(x), mu(z))`.
pub fn is_fuzzy_bi_ideal(mu: &FuzzySubset) -> Result<PredicateVerdict> {
    is_fuzzy_subsemigroup(mu)?.and_then(|| {
        Ok(PredicateVerdict::from_witness(scan_quintuples(
            mu.structure(),
            |tuple, p| {
                let (x, z) = tuple.premise_elements();
                inequality(mu, tuple, p, mu.grade(x).min(mu.grade(z)))
            },
        )))
    })
}

/// `(in, in-or-q)`-fuzzy subsemigroup via
/// `mu(x gamma y) >= min(mu(x), mu(y), 1/2)`.
///
/// Pairs outside the support are vacuous: the bound is `0` there.
pub fn is_eq_subsemigroup(mu: &FuzzySubset) -> Result<PredicateVerdict> {
    ensure_nonzero(mu)?;
    Ok(PredicateVerdict::from_witness(scan_pairs(
        mu.structure(),
        |x, y, gamma, p| {
            let bound = mu.grade(x).min(mu.grade(y)).min(Grade::HALF);
            inequality(mu, WitnessTuple::Pair { x, y, gamma }, p, bound)
        },
    )))
}

/// `(in, in-or-q)`-fuzzy bi-ideal: the subsemigroup inequality plus
/// `mu(x alpha y beta z) >= min(mu(x), mu(z), 1/2)`.
pub fn is_eq_bi_ideal(mu: &FuzzySubset) -> Result<PredicateVerdict> {
    is_eq_subsemigroup(mu)?.and_then(|| {
        Ok(PredicateVerdict::from_witness(scan_quintuples(
            mu.structure(),
            |tuple, p| {
                let (x, z) = tuple.premise_elements();
                let bound = mu.grade(x).min(mu.grade(z)).min(Grade::HALF);
                inequality(mu, tuple, p, bound)
            },
        )))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Left: `mu(x gamma y) >= min(mu(y), 1/2)`; right: `>= min(mu(x), 1/2)`.
pub fn is_eq_one_sided_ideal(mu: &FuzzySubset, side: Side) -> Result<PredicateVerdict> {
    ensure_nonzero(mu)?;
    Ok(PredicateVerdict::from_witness(scan_pairs(
        mu.structure(),
        |x, y, gamma, p| {
            let kept = match side {
                Side::Left => y,
                Side::Right => x,
            };
            let bound = mu.grade(kept).min(Grade::HALF);
            inequality(mu, WitnessTuple::Pair { x, y, gamma }, p, bound)
        },
    )))
}

/// Both one-sided conditions; the left-ideal witness wins when both fail.
pub fn is_eq_ideal(mu: &FuzzySubset) -> Result<PredicateVerdict> {
    is_eq_one_sided_ideal(mu, Side::Left)?.and_then(|| is_eq_one_sided_ideal(mu, Side::Right))
}

/// `nu ⊆ ∨q mu`: every `x_r` with `0 < r <= nu(x)` is `in-or-q` against `mu`.
///
/// A point `x_r` fails exactly when `mu(x) < r <= 1 - mu(x)`, so the
/// condition reduces to `mu(x) >= min(nu(x), 1 - mu(x))` at every `x`.
pub fn subset_or_q(nu: &FuzzySubset, mu: &FuzzySubset) -> Result<bool> {
    if !crate::fuzzy::same_structure(nu.structure(), mu.structure()) {
        return Err(Error::StructureMismatch);
    }
    Ok(nu
        .grades()
        .iter()
        .zip(mu.grades())
        .all(|(&v, &m)| m >= v.min(m.complement())))
}

/// Tests every pair of cell representatives for one tuple.
fn threshold_witness(
    pair: AlphaBetaPair,
    tuple: WitnessTuple,
    grade_a: Grade,
    grade_b: Grade,
    grade_p: Grade,
) -> Option<Witness> {
    let cands = cell_representatives([
        grade_a,
        grade_a.complement(),
        grade_b,
        grade_b.complement(),
        grade_p,
        grade_p.complement(),
    ]);
    for &t in &cands {
        if !pair.alpha.holds(grade_a, t) {
            continue;
        }
        for &r in &cands {
            if pair.alpha.holds(grade_b, r) && !pair.beta.holds(grade_p, t.min(r)) {
                return Some(Witness { tuple, t, r });
            }
        }
    }
    None
}

/// `x_t alpha mu, y_r alpha mu => (x gamma y)_{min(t,r)} beta mu` for all
/// `x, y, gamma` and all `t, r` in `(0,1]`, decided by cell sampling.
pub fn is_alpha_beta_subsemigroup(
    mu: &FuzzySubset,
    pair: AlphaBetaPair,
) -> Result<PredicateVerdict> {
    ensure_nonzero(mu)?;
    Ok(PredicateVerdict::from_witness(scan_pairs(
        mu.structure(),
        |x, y, gamma, p| {
            threshold_witness(
                pair,
                WitnessTuple::Pair { x, y, gamma },
                mu.grade(x),
                mu.grade(y),
                mu.grade(p),
            )
        },
    )))
}

/// The `(alpha, beta)` subsemigroup condition plus
/// `x_t alpha mu, z_r alpha mu => (x gamma y delta z)_{min(t,r)} beta mu`.
pub fn is_alpha_beta_bi_ideal(mu: &FuzzySubset, pair: AlphaBetaPair) -> Result<PredicateVerdict> {
    is_alpha_beta_subsemigroup(mu, pair)?.and_then(|| {
        Ok(PredicateVerdict::from_witness(scan_quintuples(
            mu.structure(),
            |tuple, p| {
                let (x, z) = tuple.premise_elements();
                threshold_witness(pair, tuple, mu.grade(x), mu.grade(z), mu.grade(p))
            },
        )))
    })
}

/// Whether the min-inequality definitions agree with the `(in, in)` threshold
/// definitions, for both subsemigroups and bi-ideals.
pub fn consistency_eq_definitions(mu: &FuzzySubset) -> Result<bool> {
    let pair = AlphaBetaPair::in_in();
    Ok(
        is_fuzzy_subsemigroup(mu)?.holds == is_alpha_beta_subsemigroup(mu, pair)?.holds
            && is_fuzzy_bi_ideal(mu)?.holds == is_alpha_beta_bi_ideal(mu, pair)?.holds,
    )
}

/// `mu ∘ mu ⊆ ∨q mu`.
pub fn square_subset_or_q(mu: &FuzzySubset) -> Result<bool> {
    subset_or_q(&o_product(mu, mu)?, mu)
}

/// A named predicate, as used by the CLI and the witness search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Predicate {
    FuzzySubsemigroup,
    FuzzyBiIdeal,
    EqSubsemigroup,
    EqBiIdeal,
    EqLeftIdeal,
    EqRightIdeal,
    EqIdeal,
    AlphaBetaSubsemigroup(AlphaBetaPair),
    AlphaBetaBiIdeal(AlphaBetaPair),
}

impl Predicate {
    pub fn evaluate(&self, mu: &FuzzySubset) -> Result<PredicateVerdict> {
        match *self {
            Predicate::FuzzySubsemigroup => is_fuzzy_subsemigroup(mu),
            Predicate::FuzzyBiIdeal => is_fuzzy_bi_ideal(mu),
            Predicate::EqSubsemigroup => is_eq_subsemigroup(mu),
            Predicate::EqBiIdeal => is_eq_bi_ideal(mu),
            Predicate::EqLeftIdeal => is_eq_one_sided_ideal(mu, Side::Left),
            Predicate::EqRightIdeal => is_eq_one_sided_ideal(mu, Side::Right),
            Predicate::EqIdeal => is_eq_ideal(mu),
            Predicate::AlphaBetaSubsemigroup(p) => is_alpha_beta_subsemigroup(mu, p),
            Predicate::AlphaBetaBiIdeal(p) => is_alpha_beta_bi_ideal(mu, p),
        }
    }

    /// CLI spelling: `eq-subsemigroup`, `ab-bi-ideal:in,invq`, ...
    pub fn parse_cli(s: &str) -> Result<Self> {
        let fixed = match s {
            "fuzzy-subsemigroup" => Some(Predicate::FuzzySubsemigroup),
            "fuzzy-bi-ideal" => Some(Predicate::FuzzyBiIdeal),
            "eq-subsemigroup" => Some(Predicate::EqSubsemigroup),
            "eq-bi-ideal" => Some(Predicate::EqBiIdeal),
            "eq-left-ideal" => Some(Predicate::EqLeftIdeal),
            "eq-right-ideal" => Some(Predicate::EqRightIdeal),
            "eq-ideal" => Some(Predicate::EqIdeal),
            _ => None,
        };
        if let Some(p) = fixed {
            return Ok(p);
        }
        if let Some(rest) = s.strip_prefix("ab-subsemigroup:") {
            return Ok(Predicate::AlphaBetaSubsemigroup(AlphaBetaPair::parse(
                rest,
            )?));
        }
        if let Some(rest) = s.strip_prefix("ab-bi-ideal:") {
            return Ok(Predicate::AlphaBetaBiIdeal(AlphaBetaPair::parse(rest)?));
        }
        Err(Error::UnknownPredicateName(s.to_string()))
    }

    /// Identifier spelling used in search expressions: `eq_subsemigroup`,
    /// `in_in_subsemigroup`, `invq_q_bi_ideal`, ...
    pub fn parse_ident(s: &str) -> Result<Self> {
        let fixed = match s {
            "fuzzy_subsemigroup" => Some(Predicate::FuzzySubsemigroup),
            "fuzzy_bi_ideal" => Some(Predicate::FuzzyBiIdeal),
            "eq_subsemigroup" => Some(Predicate::EqSubsemigroup),
            "eq_bi_ideal" => Some(Predicate::EqBiIdeal),
            "eq_left_ideal" => Some(Predicate::EqLeftIdeal),
            "eq_right_ideal" => Some(Predicate::EqRightIdeal),
            "eq_ideal" => Some(Predicate::EqIdeal),
            _ => None,
        };
        if let Some(p) = fixed {
            return Ok(p);
        }
        let unknown = || Error::UnknownPredicateName(s.to_string());
        let (head, bi) = if let Some(h) = s.strip_suffix("_bi_ideal") {
            (h, true)
        } else if let Some(h) = s.strip_suffix("_subsemigroup") {
            (h, false)
        } else {
            return Err(unknown());
        };
        let (a, b) = head.split_once('_').ok_or_else(unknown)?;
        let a = RelationKind::parse(a).ok_or_else(unknown)?;
        let b = RelationKind::parse(b).ok_or_else(unknown)?;
        let pair = AlphaBetaPair::from_kinds(a, b)?;
        Ok(if bi {
            Predicate::AlphaBetaBiIdeal(pair)
        } else {
            Predicate::AlphaBetaSubsemigroup(pair)
        })
    }

    pub fn cli_name(&self) -> String {
        match self {
            Predicate::FuzzySubsemigroup => "fuzzy-subsemigroup".into(),
            Predicate::FuzzyBiIdeal => "fuzzy-bi-ideal".into(),
            Predicate::EqSubsemigroup => "eq-subsemigroup".into(),
            Predicate::EqBiIdeal => "eq-bi-ideal".into(),
            Predicate::EqLeftIdeal => "eq-left-ideal".into(),
            Predicate::EqRightIdeal => "eq-right-ideal".into(),
            Predicate::EqIdeal => "eq-ideal".into(),
            Predicate::AlphaBetaSubsemigroup(p) => format!("ab-subsemigroup:{p}"),
            Predicate::AlphaBetaBiIdeal(p) => format!("ab-bi-ideal:{p}"),
        }
    }
}
