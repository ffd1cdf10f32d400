//! Finite Γ-semigroups, crisp subsets and the crisp structural predicates.
//!
//! A structure over `n` elements and `k` gamma symbols stores its operation as
//! a flat `n * k * n` cube indexed `(x * k + gamma) * n + y`. Names are kept
//! only for reporting; every computation works on dense indices.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::par;

/// Default upper bound on the carrier size for `2^n` subset scans.
pub const DEFAULT_SUBSET_SCAN_LIMIT: usize = 16;

/// Hard ceiling for subset scans; masks are `u64`.
const MAX_MASK_BITS: usize = 63;

/// A validated finite Γ-semigroup. Immutable once built.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GammaSemigroup {
    elements: Vec<String>,
    gammas: Vec<String>,
    cube: Vec<usize>,
}

impl GammaSemigroup {
    /// Validates closure and mixed associativity of `cube`.
    ///
    /// On failure the error carries the first offending cell, or the first
    /// quintuple `(x, beta, y, gamma, z)` in lexicographic order where
    /// `(x beta y) gamma z != x beta (y gamma z)`.
    pub fn new(elements: Vec<String>, gammas: Vec<String>, cube: Vec<usize>) -> Result<Self> {
        let n = elements.len();
        let k = gammas.len();
        if n == 0 {
            return Err(Error::EmptyCarrier);
        }
        if k == 0 {
            return Err(Error::EmptyGammaSet);
        }
        if cube.len() != n * k * n {
            return Err(Error::CubeShape {
                expected: n * k * n,
                actual: cube.len(),
            });
        }
        if let Some(pos) = cube.iter().position(|&v| v >= n) {
            let (x, rest) = (pos / (k * n), pos % (k * n));
            return Err(Error::OutOfRangeEntry {
                x,
                gamma: rest / n,
                y: rest % n,
                value: cube[pos],
                n,
            });
        }
        if let Some(v) = first_associativity_violation(n, k, &cube) {
            return Err(v);
        }
        Ok(Self {
            elements,
            gammas,
            cube,
        })
    }

    /// Builds a structure with generated names (`a, b, c, ...` and `g` or
    /// `g1, g2, ...`).
    pub fn from_cube(n: usize, k: usize, cube: Vec<usize>) -> Result<Self> {
        Self::new(default_element_names(n), default_gamma_names(k), cube)
    }

    /// Builds the cube from a closure `(x, gamma, y) -> x gamma y`.
    pub fn from_fn(
        elements: Vec<String>,
        gammas: Vec<String>,
        op: impl Fn(usize, usize, usize) -> usize,
    ) -> Result<Self> {
        let (n, k) = (elements.len(), gammas.len());
        let mut cube = Vec::with_capacity(n * k * n);
        for x in 0..n {
            for g in 0..k {
                for y in 0..n {
                    cube.push(op(x, g, y));
                }
            }
        }
        Self::new(elements, gammas, cube)
    }

    /// Skips validation. Only for cubes already proven associative.
    pub(crate) fn from_trusted_cube(n: usize, k: usize, cube: Vec<usize>) -> Self {
        debug_assert!(first_associativity_violation(n, k, &cube).is_none());
        Self {
            elements: default_element_names(n),
            gammas: default_gamma_names(k),
            cube,
        }
    }

    /// Carrier size `n`.
    pub fn size(&self) -> usize {
        self.elements.len()
    }

    /// Number of gamma symbols `k`.
    pub fn gamma_count(&self) -> usize {
        self.gammas.len()
    }

    /// `x gamma y`.
    #[inline]
    pub fn op(&self, x: usize, gamma: usize, y: usize) -> usize {
        let (n, k) = (self.size(), self.gamma_count());
        self.cube[(x * k + gamma) * n + y]
    }

    /// `(x gamma y) delta z`.
    #[inline]
    pub fn op3(&self, x: usize, gamma: usize, y: usize, delta: usize, z: usize) -> usize {
        self.op(self.op(x, gamma, y), delta, z)
    }

    pub fn cube(&self) -> &[usize] {
        &self.cube
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn gammas(&self) -> &[String] {
        &self.gammas
    }

    pub fn element_name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn gamma_name(&self, g: usize) -> &str {
        &self.gammas[g]
    }

    pub fn element_index(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn gamma_index(&self, name: &str) -> Option<usize> {
        self.gammas.iter().position(|g| g == name)
    }

    /// Same structure with new names.
    pub fn renamed(&self, elements: Vec<String>, gammas: Vec<String>) -> Result<Self> {
        if elements.len() != self.size() || gammas.len() != self.gamma_count() {
            return Err(Error::CubeShape {
                expected: self.cube.len(),
                actual: elements.len() * gammas.len() * elements.len(),
            });
        }
        Ok(Self {
            elements,
            gammas,
            cube: self.cube.clone(),
        })
    }

    /// Full carrier as a crisp subset.
    pub fn carrier(&self) -> CrispSubset {
        CrispSubset::full(self.size())
    }
}

impl fmt::Debug for GammaSemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GammaSemigroup")
            .field("elements", &self.elements)
            .field("gammas", &self.gammas)
            .field("cube", &self.cube)
            .finish()
    }
}

pub(crate) fn default_element_names(n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n)
            .map(|i| ((b'a' + i as u8) as char).to_string())
            .collect()
    } else {
        (0..n).map(|i| format!("e{i}")).collect()
    }
}

pub(crate) fn default_gamma_names(k: usize) -> Vec<String> {
    if k == 1 {
        vec!["g".to_string()]
    } else {
        (1..=k).map(|i| format!("g{i}")).collect()
    }
}

/// First associativity failure in `(x, beta, y, gamma, z)` lexicographic order.
pub fn first_associativity_violation(n: usize, k: usize, cube: &[usize]) -> Option<Error> {
    let at = |x: usize, g: usize, y: usize| cube[(x * k + g) * n + y];
    par::find_map_first(0..n, |x| {
        for beta in 0..k {
            for y in 0..n {
                let xy = at(x, beta, y);
                for gamma in 0..k {
                    for z in 0..n {
                        let left = at(xy, gamma, z);
                        let right = at(x, beta, at(y, gamma, z));
                        if left != right {
                            return Some(Error::AssociativityViolation {
                                x,
                                beta,
                                y,
                                gamma,
                                z,
                                left,
                                right,
                            });
                        }
                    }
                }
            }
        }
        None
    })
}

/// A subset of a structure's carrier, stored as a membership mask.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CrispSubset {
    mask: Vec<bool>,
}

impl CrispSubset {
    pub fn empty(n: usize) -> Self {
        Self {
            mask: vec![false; n],
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            mask: vec![true; n],
        }
    }

    pub fn from_indices(n: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(n);
        for i in members {
            if i >= n {
                return Err(Error::IndexOutOfRange(i));
            }
            s.mask[i] = true;
        }
        Ok(s)
    }

    /// Looks members up by element name.
    pub fn from_names<'a>(
        s: &GammaSemigroup,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self> {
        let mut out = Self::empty(s.size());
        for name in names {
            let i = s
                .element_index(name)
                .ok_or_else(|| Error::UnknownElement(name.to_string()))?;
            out.mask[i] = true;
        }
        Ok(out)
    }

    /// Bit `i` of `bits` is element `i`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        Self {
            mask: (0..n).map(|i| bits >> i & 1 == 1).collect(),
        }
    }

    /// Membership as a bit mask. Only meaningful for `universe() <= 64`.
    pub fn to_bits(&self) -> u64 {
        self.iter().fold(0, |acc, i| acc | 1 << i)
    }

    /// Size of the ambient carrier.
    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask.get(i).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, i: usize) {
        self.mask[i] = true;
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self {
            mask: self
                .mask
                .iter()
                .zip(&other.mask)
                .map(|(a, b)| *a || *b)
                .collect(),
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self {
            mask: self
                .mask
                .iter()
                .zip(&other.mask)
                .map(|(a, b)| *a && *b)
                .collect(),
        }
    }

    /// Member names, in carrier order.
    pub fn names<'a>(&self, s: &'a GammaSemigroup) -> Vec<&'a str> {
        self.iter().map(|i| s.element_name(i)).collect()
    }
}

impl fmt::Debug for CrispSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

fn check_subset(s: &GammaSemigroup, a: &CrispSubset) -> Result<()> {
    if a.universe() != s.size() {
        return Err(Error::IndexOutOfRange(a.universe().max(s.size())));
    }
    Ok(())
}

/// `A Γ B = { a gamma b : a in A, b in B, gamma in Γ }`.
pub fn gamma_product(s: &GammaSemigroup, a: &CrispSubset, b: &CrispSubset) -> CrispSubset {
    let mut out = CrispSubset::empty(s.size());
    for x in a.iter() {
        for y in b.iter() {
            for g in 0..s.gamma_count() {
                out.insert(s.op(x, g, y));
            }
        }
    }
    out
}

/// Crisp flags for one subset. The empty set gets every flag `false` and
/// `empty = true`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SubsetClass {
    pub empty: bool,
    pub subsemigroup: bool,
    pub left_ideal: bool,
    pub right_ideal: bool,
    pub bi_ideal: bool,
}

impl SubsetClass {
    pub fn ideal(&self) -> bool {
        self.left_ideal && self.right_ideal
    }
}

pub fn classify_subset(s: &GammaSemigroup, a: &CrispSubset) -> Result<SubsetClass> {
    check_subset(s, a)?;
    if a.is_empty() {
        return Ok(SubsetClass {
            empty: true,
            ..SubsetClass::default()
        });
    }
    let whole = s.carrier();
    let subsemigroup = gamma_product(s, a, a).is_subset_of(a);
    let left_ideal = gamma_product(s, &whole, a).is_subset_of(a);
    let right_ideal = gamma_product(s, a, &whole).is_subset_of(a);
    let bi_ideal =
        subsemigroup && gamma_product(s, &gamma_product(s, a, &whole), a).is_subset_of(a);
    Ok(SubsetClass {
        empty: false,
        subsemigroup,
        left_ideal,
        right_ideal,
        bi_ideal,
    })
}

/// Which crisp family a scan looks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CrispKind {
    Subsemigroup,
    LeftIdeal,
    RightIdeal,
    Ideal,
    BiIdeal,
}

impl CrispKind {
    pub fn name(self) -> &'static str {
        match self {
            CrispKind::Subsemigroup => "subsemigroup",
            CrispKind::LeftIdeal => "left",
            CrispKind::RightIdeal => "right",
            CrispKind::Ideal => "ideal",
            CrispKind::BiIdeal => "bi_ideal",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name.replace('-', "_").as_str() {
            "subsemigroup" => Some(CrispKind::Subsemigroup),
            "left" | "left_ideal" => Some(CrispKind::LeftIdeal),
            "right" | "right_ideal" => Some(CrispKind::RightIdeal),
            "ideal" => Some(CrispKind::Ideal),
            "bi_ideal" | "bi" => Some(CrispKind::BiIdeal),
            _ => None,
        }
    }
}

/// Bit-mask closure tables used by the `2^n` scans.
pub(crate) struct MaskTables {
    n: usize,
    /// `pair[x * n + y]` = `{ x gamma y : gamma }`.
    pair: Vec<u64>,
    /// `left[x]` = `S Γ x`.
    left: Vec<u64>,
    /// `right[x]` = `x Γ S`.
    right: Vec<u64>,
    /// `sandwich[x * n + z]` = `x Γ S Γ z`.
    sandwich: Vec<u64>,
}

impl MaskTables {
    pub(crate) fn new(s: &GammaSemigroup) -> Self {
        let (n, k) = (s.size(), s.gamma_count());
        let mut pair = vec![0u64; n * n];
        let mut left = vec![0u64; n];
        let mut right = vec![0u64; n];
        let mut sandwich = vec![0u64; n * n];
        for x in 0..n {
            for y in 0..n {
                for g in 0..k {
                    let p = 1u64 << s.op(x, g, y);
                    pair[x * n + y] |= p;
                    left[y] |= p;
                    right[x] |= p;
                    for d in 0..k {
                        for z in 0..n {
                            sandwich[x * n + z] |= 1u64 << s.op3(x, g, y, d, z);
                        }
                    }
                }
            }
        }
        Self {
            n,
            pair,
            left,
            right,
            sandwich,
        }
    }

    fn members(&self, bits: u64) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |i| bits >> i & 1 == 1)
    }

    pub(crate) fn is_subsemigroup(&self, bits: u64) -> bool {
        self.members(bits).all(|x| {
            self.members(bits)
                .all(|y| self.pair[x * self.n + y] & !bits == 0)
        })
    }

    pub(crate) fn is_left_ideal(&self, bits: u64) -> bool {
        self.members(bits).all(|x| self.left[x] & !bits == 0)
    }

    pub(crate) fn is_right_ideal(&self, bits: u64) -> bool {
        self.members(bits).all(|x| self.right[x] & !bits == 0)
    }

    pub(crate) fn is_bi_ideal(&self, bits: u64) -> bool {
        self.is_subsemigroup(bits)
            && self.members(bits).all(|x| {
                self.members(bits)
                    .all(|z| self.sandwich[x * self.n + z] & !bits == 0)
            })
    }

    pub(crate) fn is_kind(&self, kind: CrispKind, bits: u64) -> bool {
        match kind {
            CrispKind::Subsemigroup => self.is_subsemigroup(bits),
            CrispKind::LeftIdeal => self.is_left_ideal(bits),
            CrispKind::RightIdeal => self.is_right_ideal(bits),
            CrispKind::Ideal => self.is_left_ideal(bits) && self.is_right_ideal(bits),
            CrispKind::BiIdeal => self.is_bi_ideal(bits),
        }
    }
}

/// Masks of all nonempty subsets of the given kind, ascending.
pub(crate) fn scan_masks(s: &GammaSemigroup, kind: CrispKind, limit: usize) -> Result<Vec<u64>> {
    let n = s.size();
    let limit = limit.min(MAX_MASK_BITS);
    if n > limit {
        return Err(Error::CarrierTooLarge { n, limit });
    }
    let tables = MaskTables::new(s);
    let total = 1u64 << n;
    // Chunk the mask space so the parallel path stays ordered.
    const CHUNK: u64 = 1 << 12;
    let chunks = total.div_ceil(CHUNK) as usize;
    let found = par::map_collect(0..chunks, |c| {
        let lo = (c as u64 * CHUNK).max(1);
        let hi = ((c as u64 + 1) * CHUNK).min(total);
        (lo..hi)
            .filter(|&bits| tables.is_kind(kind, bits))
            .collect::<Vec<_>>()
    });
    Ok(found.into_iter().flatten().collect())
}

/// Structure-level flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructureClass {
    pub regular: bool,
    pub intra_regular: bool,
    pub left_duo: bool,
    pub right_duo: bool,
    pub duo: bool,
}

/// `a = a alpha x beta a` for some `x, alpha, beta`.
pub fn is_regular_element(s: &GammaSemigroup, a: usize) -> bool {
    let k = s.gamma_count();
    (0..s.size()).any(|x| {
        (0..k).any(|alpha| {
            let ax = s.op(a, alpha, x);
            (0..k).any(|beta| s.op(ax, beta, a) == a)
        })
    })
}

/// `a = x alpha a beta a gamma y` for some `x, y, alpha, beta, gamma`.
pub fn is_intra_regular_element(s: &GammaSemigroup, a: usize) -> bool {
    let (n, k) = (s.size(), s.gamma_count());
    // Collect the distinct values of `x alpha a beta a`, then try every tail.
    let mut heads = HashSet::new();
    for x in 0..n {
        for alpha in 0..k {
            let xa = s.op(x, alpha, a);
            for beta in 0..k {
                heads.insert(s.op(xa, beta, a));
            }
        }
    }
    heads
        .into_iter()
        .any(|h| (0..k).any(|gamma| (0..n).any(|y| s.op(h, gamma, y) == a)))
}

pub fn is_regular(s: &GammaSemigroup) -> bool {
    par::all(0..s.size(), |a| is_regular_element(s, a))
}

pub fn is_intra_regular(s: &GammaSemigroup) -> bool {
    par::all(0..s.size(), |a| is_intra_regular_element(s, a))
}

/// Regularity flags plus duo flags. Duo needs a `2^n` scan over one-sided
/// ideals, so carriers above `scan_limit` are refused.
pub fn classify_structure(s: &GammaSemigroup, scan_limit: usize) -> Result<StructureClass> {
    let lefts = scan_masks(s, CrispKind::LeftIdeal, scan_limit)?;
    let rights = scan_masks(s, CrispKind::RightIdeal, scan_limit)?;
    let tables = MaskTables::new(s);
    let left_duo = lefts.iter().all(|&b| tables.is_right_ideal(b));
    let right_duo = rights.iter().all(|&b| tables.is_left_ideal(b));
    Ok(StructureClass {
        regular: is_regular(s),
        intra_regular: is_intra_regular(s),
        left_duo,
        right_duo,
        duo: left_duo && right_duo,
    })
}

/// A validated structure-preserving map between two structures over the
/// same gamma names.
#[derive(Debug, Clone)]
pub struct Homomorphism {
    source: Arc<GammaSemigroup>,
    target: Arc<GammaSemigroup>,
    map: Vec<usize>,
}

impl Homomorphism {
    /// Checks `f(x gamma y) = f(x) gamma f(y)` for all `x, gamma, y`.
    /// Gammas are matched by name, so the two structures may list them in
    /// different orders.
    pub fn new(
        source: Arc<GammaSemigroup>,
        target: Arc<GammaSemigroup>,
        map: Vec<usize>,
    ) -> Result<Self> {
        let gamma_map = gamma_correspondence(&source, &target)?;
        if map.len() != source.size() {
            return Err(Error::MapNotTotal {
                expected: source.size(),
                actual: map.len(),
            });
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= target.size()) {
            return Err(Error::IndexOutOfRange(bad));
        }
        let n = source.size();
        let violation = par::find_map_first(0..n, |x| {
            for (g, &tg) in gamma_map.iter().enumerate() {
                for y in 0..n {
                    let image_of_product = map[source.op(x, g, y)];
                    let product_of_images = target.op(map[x], tg, map[y]);
                    if image_of_product != product_of_images {
                        return Some(Error::HomomorphismViolation {
                            x,
                            gamma: g,
                            y,
                            image_of_product,
                            product_of_images,
                        });
                    }
                }
            }
            None
        });
        match violation {
            Some(e) => Err(e),
            None => Ok(Self {
                source,
                target,
                map,
            }),
        }
    }

    pub fn source(&self) -> &Arc<GammaSemigroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GammaSemigroup> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.size()];
        for &v in &self.map {
            hit[v] = true;
        }
        hit.into_iter().all(|h| h)
    }
}

/// Source gamma index -> target gamma index, by name.
fn gamma_correspondence(source: &GammaSemigroup, target: &GammaSemigroup) -> Result<Vec<usize>> {
    if source.gamma_count() != target.gamma_count() {
        return Err(Error::GammaMismatch);
    }
    source
        .gammas()
        .iter()
        .map(|g| target.gamma_index(g).ok_or(Error::GammaMismatch))
        .collect()
}

/// Every surjective homomorphism `source -> target`, by brute force over all
/// `m^n` maps. Intended for tiny carriers.
pub fn surjective_homomorphisms(
    source: &Arc<GammaSemigroup>,
    target: &Arc<GammaSemigroup>,
) -> Vec<Homomorphism> {
    let (n, m) = (source.size(), target.size());
    if gamma_correspondence(source, target).is_err() || m > n {
        return Vec::new();
    }
    let total = (m as u64).pow(n as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let map: Vec<usize> = (0..n)
            .map(|_| {
                let v = (c % m as u64) as usize;
                c /= m as u64;
                v
            })
            .collect();
        if let Ok(h) = Homomorphism::new(source.clone(), target.clone(), map) {
            if h.is_surjective() {
                out.push(h);
            }
        }
    }
    out
}
