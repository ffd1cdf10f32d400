//! Machine checks of the equivalence and characterization theorems.
//!
//! Each check evaluates every listed condition through its own code path and
//! packs the flags into a [`TheoremReport`]. For equivalences, a report
//! agrees when all flags are equal. For implication checks (homomorphic
//! images), every flag is itself an implication and agreement means all of
//! them hold.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fuzzy::{
    cap05, characteristic, constant_everywhere, critical_thresholds, level_sets, o05_product,
    o_product, upper_level, FuzzySubset, Grade,
};
use crate::par;
use crate::predicates::{
    is_alpha_beta_bi_ideal, is_alpha_beta_subsemigroup, is_eq_bi_ideal, is_eq_subsemigroup,
    square_subset_or_q, subset_or_q, AlphaBetaPair,
};
use crate::structure::{
    classify_subset, gamma_product, is_intra_regular, is_regular, scan_masks, CrispKind,
    CrispSubset, GammaSemigroup, Homomorphism, DEFAULT_SUBSET_SCAN_LIMIT,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    /// All conditions are claimed equivalent.
    Equivalence,
    /// Every flag is an implication that should hold.
    Implications,
}

/// Where flags disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    /// Condition indices (0-based) whose flag differs from the first flag,
    /// or that are false for an implication report.
    pub conditions: Vec<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremReport {
    pub theorem: String,
    pub kind: ReportKind,
    pub labels: Vec<String>,
    pub flags: Vec<bool>,
    pub agree: bool,
    pub discrepancy: Option<Discrepancy>,
    /// Sample provenance and similar remarks.
    pub notes: Vec<String>,
}

impl TheoremReport {
    fn build(
        theorem: &str,
        kind: ReportKind,
        conditions: Vec<(&str, bool)>,
        detail: impl FnOnce(&[usize]) -> String,
    ) -> Self {
        let (labels, flags): (Vec<String>, Vec<bool>) = conditions
            .into_iter()
            .map(|(l, f)| (l.to_string(), f))
            .unzip();
        let off: Vec<usize> = match kind {
            ReportKind::Equivalence => (1..flags.len()).filter(|&i| flags[i] != flags[0]).collect(),
            ReportKind::Implications => (0..flags.len()).filter(|&i| !flags[i]).collect(),
        };
        let agree = off.is_empty();
        let discrepancy = (!agree).then(|| Discrepancy {
            detail: detail(&off),
            conditions: off,
        });
        Self {
            theorem: theorem.to_string(),
            kind,
            labels,
            flags,
            agree,
            discrepancy,
            notes: Vec::new(),
        }
    }

    fn equivalence(theorem: &str, conditions: Vec<(&str, bool)>) -> Self {
        Self::build(theorem, ReportKind::Equivalence, conditions, |off| {
            format!("conditions {off:?} differ from condition 0")
        })
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.agree { "agree" } else { "DISAGREE" };
        writeln!(f, "{}: {verdict}", self.theorem)?;
        for (label, flag) in self.labels.iter().zip(&self.flags) {
            writeln!(f, "{}.{label}: {flag}", self.theorem)?;
        }
        if let Some(d) = &self.discrepancy {
            writeln!(f, "{}.discrepancy: {}", self.theorem, d.detail)?;
        }
        for note in &self.notes {
            writeln!(f, "{}.note: {note}", self.theorem)?;
        }
        Ok(())
    }
}

fn ensure_nonzero(mu: &FuzzySubset) -> Result<()> {
    if mu.is_zero() {
        Err(Error::EmptyFuzzySubset)
    } else {
        Ok(())
    }
}

/// Nonempty level subsets `mu_r` for critical `r` in `(0, 1/2]`.
fn low_level_subsets(mu: &FuzzySubset) -> Vec<CrispSubset> {
    critical_thresholds(mu)
        .into_iter()
        .filter(|&r| r <= Grade::HALF)
        .map(|r| upper_level(mu, r))
        .filter(|set| !set.is_empty())
        .collect()
}

/// `mu ∘ chi_S ∘ mu`.
fn sandwich_with_carrier(mu: &FuzzySubset) -> Result<FuzzySubset> {
    let chi = constant_everywhere(mu.structure(), Grade::ONE);
    o_product(&o_product(mu, &chi)?, mu)
}

/// `(nu ∩ 0.5_S) ⊆ mu`.
fn capped_within(nu: &FuzzySubset, mu: &FuzzySubset) -> Result<bool> {
    nu.capped(Grade::HALF).is_subset_of(mu)
}

/// The five equivalent conditions for an `(in, in-or-q)`-fuzzy subsemigroup:
/// threshold definition, capped inequality, `mu∘mu ⊆ ∨q mu`,
/// `mu∘mu ∩ 0.5 ⊆ mu`, and closure of every nonempty level subset `mu_r`
/// with `r <= 1/2`.
pub fn report_subsemigroup_equivalences(mu: &FuzzySubset) -> Result<TheoremReport> {
    ensure_nonzero(mu)?;
    let s = mu.structure();
    let square = o_product(mu, mu)?;
    let levels = low_level_subsets(mu);
    let mut level_flag = true;
    for set in &levels {
        level_flag &= classify_subset(s, set)?.subsemigroup;
    }
    Ok(TheoremReport::equivalence(
        "thm3.2",
        vec![
            (
                "threshold-definition",
                is_alpha_beta_subsemigroup(mu, AlphaBetaPair::in_invq())?.holds,
            ),
            ("capped-inequality", is_eq_subsemigroup(mu)?.holds),
            ("square-subset-or-q", subset_or_q(&square, mu)?),
            ("capped-square-below", capped_within(&square, mu)?),
            ("level-subsets-closed", level_flag),
        ],
    ))
}

/// The bi-ideal analogue, with `mu ∘ chi_S ∘ mu` as the middle product.
/// Conditions (3)–(5) also carry the subsemigroup part so the report is
/// meaningful for every nonzero `mu`.
pub fn report_bi_ideal_equivalences(mu: &FuzzySubset) -> Result<TheoremReport> {
    ensure_nonzero(mu)?;
    let s = mu.structure();
    let square = o_product(mu, mu)?;
    let sandwich = sandwich_with_carrier(mu)?;
    let mut level_flag = true;
    for set in &low_level_subsets(mu) {
        level_flag &= classify_subset(s, set)?.bi_ideal;
    }
    Ok(TheoremReport::equivalence(
        "thm3.5",
        vec![
            (
                "threshold-definition",
                is_alpha_beta_bi_ideal(mu, AlphaBetaPair::in_invq())?.holds,
            ),
            ("capped-inequality", is_eq_bi_ideal(mu)?.holds),
            (
                "sandwich-subset-or-q",
                square_subset_or_q(mu)? && subset_or_q(&sandwich, mu)?,
            ),
            (
                "capped-sandwich-below",
                capped_within(&square, mu)? && capped_within(&sandwich, mu)?,
            ),
            ("level-subsets-bi-ideals", level_flag),
        ],
    ))
}

/// `[mu]_t` characterizations: subsemigroup (first report) and bi-ideal
/// (second report), over every critical `t` in `(0,1]`.
pub fn report_level_characterization(mu: &FuzzySubset) -> Result<Vec<TheoremReport>> {
    ensure_nonzero(mu)?;
    let s = mu.structure();
    let mut sub_ok = true;
    let mut bi_ok = true;
    for t in critical_thresholds(mu) {
        let bracket = level_sets(mu, t)?.bracket;
        if bracket.is_empty() {
            continue;
        }
        let class = classify_subset(s, &bracket)?;
        sub_ok &= class.subsemigroup;
        bi_ok &= class.bi_ideal;
    }
    Ok(vec![
        TheoremReport::equivalence(
            "thm4.23",
            vec![
                ("eq-subsemigroup", is_eq_subsemigroup(mu)?.holds),
                ("brackets-subsemigroups", sub_ok),
            ],
        ),
        TheoremReport::equivalence(
            "thm4.24",
            vec![
                ("eq-bi-ideal", is_eq_bi_ideal(mu)?.holds),
                ("brackets-bi-ideals", bi_ok),
            ],
        ),
    ])
}

/// `mu ∘_0.5 1 ∘_0.5 mu`.
pub fn o05_sandwich(mu: &FuzzySubset) -> Result<FuzzySubset> {
    let one = constant_everywhere(mu.structure(), Grade::ONE);
    o05_product(mu, &o05_product(&one, mu)?)
}

/// 0.5-product characterizations: `mu∘_0.5 mu ⊆ mu` for subsemigroups, plus
/// `mu ∘_0.5 1 ∘_0.5 mu ⊆ mu` for bi-ideals.
pub fn report_product_characterization(mu: &FuzzySubset) -> Result<Vec<TheoremReport>> {
    ensure_nonzero(mu)?;
    let square_below = o05_product(mu, mu)?.is_subset_of(mu)?;
    let sandwich_below = o05_sandwich(mu)?.is_subset_of(mu)?;
    Ok(vec![
        TheoremReport::equivalence(
            "thm4.25",
            vec![
                ("eq-subsemigroup", is_eq_subsemigroup(mu)?.holds),
                ("o05-square-below", square_below),
            ],
        ),
        TheoremReport::equivalence(
            "thm4.26",
            vec![
                ("eq-bi-ideal", is_eq_bi_ideal(mu)?.holds),
                (
                    "o05-square-and-sandwich-below",
                    square_below && sandwich_below,
                ),
            ],
        ),
    ])
}

/// `f(mu)(x') = max { mu(x) : f(x) = x' }`, `0` off the image.
pub fn image(f: &Homomorphism, mu: &FuzzySubset) -> Result<FuzzySubset> {
    if !crate::fuzzy::same_structure(f.source(), mu.structure()) {
        return Err(Error::StructureMismatch);
    }
    let mut grades = vec![Grade::ZERO; f.target().size()];
    for (x, &fx) in f.map().iter().enumerate() {
        grades[fx] = grades[fx].max(mu.grade(x));
    }
    FuzzySubset::new(f.target().clone(), grades)
}

/// `f^{-1}(mu')(x) = mu'(f(x))`.
pub fn preimage(f: &Homomorphism, mu: &FuzzySubset) -> Result<FuzzySubset> {
    if !crate::fuzzy::same_structure(f.target(), mu.structure()) {
        return Err(Error::StructureMismatch);
    }
    FuzzySubset::new(
        f.source().clone(),
        f.map().iter().map(|&fx| mu.grade(fx)).collect(),
    )
}

/// Constant on every fiber of `f`.
pub fn is_f_invariant(mu: &FuzzySubset, f: &Homomorphism) -> Result<bool> {
    if !crate::fuzzy::same_structure(f.source(), mu.structure()) {
        return Err(Error::StructureMismatch);
    }
    let mut seen: Vec<Option<Grade>> = vec![None; f.target().size()];
    for (x, &fx) in f.map().iter().enumerate() {
        match seen[fx] {
            Some(g) if g != mu.grade(x) => return Ok(false),
            _ => seen[fx] = Some(mu.grade(x)),
        }
    }
    Ok(true)
}

/// Homomorphic image and preimage preserve the `(in, in-or-q)` predicates.
///
/// `mu` lives on the source and `mu_target` on the target. Only surjective
/// maps are accepted.
pub fn report_homomorphism(
    f: &Homomorphism,
    mu: &FuzzySubset,
    mu_target: &FuzzySubset,
) -> Result<TheoremReport> {
    if !f.is_surjective() {
        return Err(Error::InvalidConfig(
            "homomorphism theorems need a surjective map".into(),
        ));
    }
    let img = image(f, mu)?;
    let pre = preimage(f, mu_target)?;
    let implies = |hyp: bool, concl: bool| !hyp || concl;
    let sub_src = is_eq_subsemigroup(mu)?.holds;
    let bi_src = is_eq_bi_ideal(mu)?.holds;
    let sub_tgt = is_eq_subsemigroup(mu_target)?.holds;
    let bi_tgt = is_eq_bi_ideal(mu_target)?.holds;
    Ok(TheoremReport::build(
        "thm3.8-3.9",
        ReportKind::Implications,
        vec![
            (
                "image-subsemigroup",
                implies(sub_src, is_eq_subsemigroup(&img)?.holds),
            ),
            (
                "preimage-subsemigroup",
                implies(sub_tgt, is_eq_subsemigroup(&pre)?.holds),
            ),
            (
                "image-bi-ideal",
                implies(bi_src, is_eq_bi_ideal(&img)?.holds),
            ),
            (
                "preimage-bi-ideal",
                implies(bi_tgt, is_eq_bi_ideal(&pre)?.holds),
            ),
        ],
        |off| format!("implications {off:?} fail"),
    ))
}

/// Characteristic functions of every crisp bi-ideal of `s`.
pub fn characteristic_bi_ideals(s: &Arc<GammaSemigroup>) -> Result<Vec<FuzzySubset>> {
    Ok(
        scan_masks(s, CrispKind::BiIdeal, DEFAULT_SUBSET_SCAN_LIMIT)?
            .into_iter()
            .map(|bits| characteristic(s, &CrispSubset::from_bits(s.size(), bits)))
            .collect(),
    )
}

/// Checks that every sample is an `(in, in-or-q)`-fuzzy bi-ideal of `s`, then
/// appends the characteristic bi-ideals.
fn bi_ideal_corpus(s: &Arc<GammaSemigroup>, samples: &[FuzzySubset]) -> Result<Vec<FuzzySubset>> {
    for (i, mu) in samples.iter().enumerate() {
        if !crate::fuzzy::same_structure(s, mu.structure()) {
            return Err(Error::StructureMismatch);
        }
        if mu.is_zero() || !is_eq_bi_ideal(mu)?.holds {
            return Err(Error::SampleNotBiIdeal(i));
        }
    }
    let mut corpus = samples.to_vec();
    corpus.extend(characteristic_bi_ideals(s)?);
    Ok(corpus)
}

fn provenance(samples: usize, corpus: usize) -> String {
    format!(
        "{samples} supplied bi-ideal samples + {} characteristic bi-ideals",
        corpus - samples
    )
}

/// First index where `pred` fails, or `None`.
fn first_failure(len: usize, pred: impl Fn(usize) -> bool + Sync + Send) -> Option<usize> {
    par::find_map_first(0..len, |i| (!pred(i)).then_some(i))
}

/// Regularity against `mu ∘_0.5 1 ∘_0.5 mu = mu ∩ 0.5_S` on the supplied
/// bi-ideals plus every characteristic bi-ideal.
pub fn report_regularity_characterization(
    s: &Arc<GammaSemigroup>,
    samples: &[FuzzySubset],
) -> Result<TheoremReport> {
    let corpus = bi_ideal_corpus(s, samples)?;
    let failure = first_failure(corpus.len(), |i| {
        let mu = &corpus[i];
        o05_sandwich(mu)
            .map(|l| l == mu.capped(Grade::HALF))
            .unwrap_or(false)
    });
    let report = TheoremReport::build(
        "thm4.28",
        ReportKind::Equivalence,
        vec![
            ("regular", is_regular(s)),
            ("sandwich-equals-cap", failure.is_none()),
        ],
        |_| match failure {
            Some(i) => format!("equality fails for corpus member {i}: {:?}", corpus[i]),
            None => "structure is not regular but every sample satisfies the equality".into(),
        },
    );
    Ok(report.with_note(provenance(samples.len(), corpus.len())))
}

/// Regular and intra-regular against `mu ∘_0.5 mu = mu ∩ 0.5_S` and
/// `mu ∩_0.5 nu = (mu ∘_0.5 nu) ∩_0.5 (nu ∘_0.5 mu)` over the sample corpus
/// (all ordered pairs for the second).
pub fn report_regular_intra_characterization(
    s: &Arc<GammaSemigroup>,
    samples: &[FuzzySubset],
) -> Result<TheoremReport> {
    let corpus = bi_ideal_corpus(s, samples)?;
    let m = corpus.len();
    let square_fail = first_failure(m, |i| {
        let mu = &corpus[i];
        o05_product(mu, mu)
            .map(|p| p == mu.capped(Grade::HALF))
            .unwrap_or(false)
    });
    let pair_fail = first_failure(m * m, |idx| {
        let (mu, nu) = (&corpus[idx / m], &corpus[idx % m]);
        let check = || -> Result<bool> {
            let right = cap05(&o05_product(mu, nu)?, &o05_product(nu, mu)?)?;
            Ok(cap05(mu, nu)? == right)
        };
        check().unwrap_or(false)
    });
    let report = TheoremReport::build(
        "thm4.29",
        ReportKind::Equivalence,
        vec![
            (
                "regular-and-intra-regular",
                is_regular(s) && is_intra_regular(s),
            ),
            ("square-equals-cap", square_fail.is_none()),
            ("meet-equals-product-meet", pair_fail.is_none()),
        ],
        |off| {
            let mut parts = vec![format!("conditions {off:?} differ from condition 0")];
            if let Some(i) = square_fail {
                parts.push(format!("square fails for corpus member {i}"));
            }
            if let Some(idx) = pair_fail {
                parts.push(format!("meet fails for pair ({}, {})", idx / m, idx % m));
            }
            parts.join("; ")
        },
    );
    Ok(report.with_note(provenance(samples.len(), corpus.len())))
}

/// `P ∩ Q = PΓQ ∩ QΓP` for every pair of crisp bi-ideals.
pub fn crisp_bi_ideal_meet_identity(s: &GammaSemigroup, scan_limit: usize) -> Result<bool> {
    let n = s.size();
    let bis: Vec<CrispSubset> = scan_masks(s, CrispKind::BiIdeal, scan_limit)?
        .into_iter()
        .map(|b| CrispSubset::from_bits(n, b))
        .collect();
    let m = bis.len();
    Ok(first_failure(m * m, |idx| {
        let (p, q) = (&bis[idx / m], &bis[idx % m]);
        p.intersection(q) == gamma_product(s, p, q).intersection(&gamma_product(s, q, p))
    })
    .is_none())
}
