//! Generators, fixtures and separating-witness search.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)` (rand_chacha);
//! integers are drawn with rand 0.8's `gen_range`, so streams are stable
//! across platforms for a given seed.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fuzzy::{o05_product, FuzzySubset, Grade};
use crate::par;
use crate::predicates::{is_eq_bi_ideal, is_eq_subsemigroup, Predicate, PredicateVerdict};
use crate::structure::{scan_masks, CrispKind, CrispSubset, GammaSemigroup};
use crate::theorems::o05_sandwich;

/// Default node budget for one randomized structure.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    /// Grades are drawn from `{0, 1/grid, ..., 1}`.
    pub grid: u32,
    pub count: usize,
    /// Backtracking nodes allowed per random structure.
    pub budget: u64,
}

impl GeneratorConfig {
    pub fn new(n: usize, k: usize, seed: u64, grid: u32, count: usize) -> Self {
        Self {
            n,
            k,
            seed,
            grid,
            count,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k == 0 || self.grid == 0 {
            return Err(Error::InvalidConfig(format!(
                "n, k and grid must be positive (n={}, k={}, grid={})",
                self.n, self.k, self.grid
            )));
        }
        Ok(())
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenerationMode {
    /// Seeded randomized backtracking, `count` structures, duplicates allowed.
    Random,
    /// Every associative cube, lexicographic. Only for `n <= 3`, `k <= 2`.
    Exhaustive,
}

const UNSET: usize = usize::MAX;

/// Partial cube with incremental associativity checks.
struct PartialCube {
    n: usize,
    k: usize,
    cells: Vec<usize>,
}

impl PartialCube {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            cells: vec![UNSET; n * k * n],
        }
    }

    fn get(&self, x: usize, g: usize, y: usize) -> usize {
        self.cells[(x * self.k + g) * self.n + y]
    }

    /// False only if both sides of `(x b y) g z = x b (y g z)` are known and differ.
    fn equation_ok(&self, x: usize, b: usize, y: usize, g: usize, z: usize) -> bool {
        let u = self.get(x, b, y);
        let v = self.get(y, g, z);
        if u == UNSET || v == UNSET {
            return true;
        }
        let (l, r) = (self.get(u, g, z), self.get(x, b, v));
        l == UNSET || r == UNSET || l == r
    }

    /// Checks every equation that mentions `cell`, which was just assigned.
    fn consistent_at(&self, cell: usize) -> bool {
        let (n, k) = (self.n, self.k);
        let q = cell % n;
        let h = (cell / n) % k;
        let p = cell / (n * k);
        for g in 0..k {
            for z in 0..n {
                if !self.equation_ok(p, h, q, g, z) {
                    return false;
                }
            }
        }
        for x in 0..n {
            for b in 0..k {
                if !self.equation_ok(x, b, p, h, q) {
                    return false;
                }
                for y in 0..n {
                    // cell as the outer left product (u g z) with u = x b y = p
                    if self.get(x, b, y) == p && !self.equation_ok(x, b, y, h, q) {
                        return false;
                    }
                }
            }
        }
        for y in 0..n {
            for g in 0..k {
                for z in 0..n {
                    // cell as the outer right product (x b v) with v = y g z = q
                    if self.get(y, g, z) == q && !self.equation_ok(p, h, y, g, z) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Depth-first fill of the cube. `order` yields the candidate values for a
/// cell; `emit` returns `false` to stop.
fn backtrack(
    n: usize,
    k: usize,
    budget: Option<u64>,
    mut order: impl FnMut(usize) -> Vec<usize>,
    mut emit: impl FnMut(&[usize]) -> bool,
) -> Result<()> {
    let len = n * k * n;
    let mut cube = PartialCube::new(n, k);
    let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(len);
    let mut cursor: Vec<usize> = Vec::with_capacity(len);
    let mut nodes = 0u64;
    candidates.push(order(0));
    cursor.push(0);
    while let Some(depth) = cursor.len().checked_sub(1) {
        let pos = cursor[depth];
        if pos == candidates[depth].len() {
            cube.cells[depth] = UNSET;
            cursor.pop();
            candidates.pop();
            continue;
        }
        cursor[depth] += 1;
        nodes += 1;
        if let Some(limit) = budget {
            if nodes > limit {
                return Err(Error::BudgetExhausted(limit));
            }
        }
        cube.cells[depth] = candidates[depth][pos];
        if !cube.consistent_at(depth) {
            continue;
        }
        if depth + 1 == len {
            if !emit(&cube.cells) {
                return Ok(());
            }
            continue;
        }
        candidates.push(order(depth + 1));
        cursor.push(0);
    }
    Ok(())
}

/// Associative structures for `config`, with default element and gamma names.
pub fn generate_structures(
    config: &GeneratorConfig,
    mode: GenerationMode,
) -> Result<Vec<GammaSemigroup>> {
    config.validate()?;
    let (n, k) = (config.n, config.k);
    match mode {
        GenerationMode::Exhaustive => {
            if n > 3 || k > 2 {
                return Err(Error::InvalidConfig(format!(
                    "exhaustive generation needs n <= 3 and k <= 2 (got n={n}, k={k})"
                )));
            }
            let mut out = Vec::new();
            backtrack(
                n,
                k,
                None,
                |_| (0..n).collect(),
                |cube| {
                    out.push(GammaSemigroup::from_trusted_cube(n, k, cube.to_vec()));
                    true
                },
            )?;
            Ok(out)
        }
        GenerationMode::Random => {
            let mut rng = config.rng();
            let mut out = Vec::with_capacity(config.count);
            for _ in 0..config.count {
                out.push(GammaSemigroup::from_trusted_cube(
                    n,
                    k,
                    random_cube(n, k, config.budget, &mut rng)?,
                ));
            }
            Ok(out)
        }
    }
}

/// Nodes per randomized attempt before restarting with fresh value orders.
/// Dead subtrees near the root are heavy-tailed; restarts avoid them.
const RESTART_NODES: u64 = 4096;

fn random_cube(n: usize, k: usize, budget: u64, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    let mut remaining = budget;
    while remaining > 0 {
        let cap = remaining.min(RESTART_NODES);
        remaining -= cap;
        let mut found = None;
        let attempt = backtrack(
            n,
            k,
            Some(cap),
            |_| {
                let mut v: Vec<usize> = (0..n).collect();
                v.shuffle(rng);
                v
            },
            |cube| {
                found = Some(cube.to_vec());
                false
            },
        );
        match attempt {
            Ok(()) => {
                if let Some(cube) = found {
                    return Ok(cube);
                }
            }
            Err(Error::BudgetExhausted(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Err(Error::BudgetExhausted(budget))
}

/// Exhaustive structures of every size `1..=n`, in size order.
pub fn exhaustive_up_to(n: usize, k: usize) -> Result<Vec<Arc<GammaSemigroup>>> {
    let mut out = Vec::new();
    for size in 1..=n {
        let config = GeneratorConfig::new(size, k, 0, 1, 0);
        out.extend(
            generate_structures(&config, GenerationMode::Exhaustive)?
                .into_iter()
                .map(Arc::new),
        );
    }
    Ok(out)
}

fn grid_grade(i: u32, grid: u32) -> Grade {
    Grade::new(i64::from(i), i64::from(grid)).expect("grid point lies in [0,1]")
}

fn random_grades(rng: &mut ChaCha8Rng, n: usize, grid: u32) -> Vec<Grade> {
    loop {
        let g: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=grid)).collect();
        if g.iter().any(|&v| v > 0) {
            return g.into_iter().map(|v| grid_grade(v, grid)).collect();
        }
    }
}

/// `count` nonzero fuzzy subsets with grades uniform on the grid.
pub fn random_fuzzy(s: &Arc<GammaSemigroup>, config: &GeneratorConfig) -> Result<Vec<FuzzySubset>> {
    config.validate()?;
    let mut rng = config.rng();
    (0..config.count)
        .map(|_| FuzzySubset::new(s.clone(), random_grades(&mut rng, s.size(), config.grid)))
        .collect()
}

/// Nonempty crisp subsets of `kind`, ascending by bitmask.
pub fn enumerate_crisp(
    s: &GammaSemigroup,
    kind: CrispKind,
    scan_limit: usize,
) -> Result<Vec<CrispSubset>> {
    Ok(scan_masks(s, kind, scan_limit)?
        .into_iter()
        .map(|bits| CrispSubset::from_bits(s.size(), bits))
        .collect())
}

/// Builds `mu` from a random descending chain `B1 ⊇ B2 ⊇ ...` of crisp
/// subsets of `kind`, graded by increasing levels in `(0, 1/2]`. When the top
/// level is `1/2` the innermost set may climb anywhere in `[1/2, 1]`.
fn chain_sample(
    s: &Arc<GammaSemigroup>,
    masks: &[u64],
    rng: &mut ChaCha8Rng,
    grid: u32,
) -> Result<FuzzySubset> {
    let n = s.size();
    let half_steps = grid / 2;
    let pick_within = |rng: &mut ChaCha8Rng, outer: u64| -> u64 {
        let inside: Vec<u64> = masks.iter().copied().filter(|m| m & !outer == 0).collect();
        *inside
            .choose(rng)
            .expect("a nonempty kind set contains itself")
    };
    let mut grades = vec![Grade::ZERO; n];
    let full = (1u64 << n) - 1;
    if half_steps == 0 {
        let b = pick_within(rng, full);
        for (x, g) in grades.iter_mut().enumerate() {
            if b >> x & 1 == 1 {
                *g = Grade::ONE;
            }
        }
        return FuzzySubset::new(s.clone(), grades);
    }
    let depth = rng.gen_range(1..=3u32).min(half_steps) as usize;
    let mut steps: Vec<u32> = (1..=half_steps).collect();
    steps.shuffle(rng);
    steps.truncate(depth);
    steps.sort_unstable();
    let mut current = full;
    for &step in &steps {
        current = pick_within(rng, current);
        for (x, g) in grades.iter_mut().enumerate() {
            if current >> x & 1 == 1 {
                *g = grid_grade(step, grid);
            }
        }
    }
    if 2 * steps[depth - 1] == grid {
        for (x, g) in grades.iter_mut().enumerate() {
            if current >> x & 1 == 1 {
                *g = grid_grade(rng.gen_range(half_steps..=grid), grid);
            }
        }
    }
    FuzzySubset::new(s.clone(), grades)
}

fn chain_samples(
    s: &Arc<GammaSemigroup>,
    config: &GeneratorConfig,
    kind: CrispKind,
) -> Result<Vec<FuzzySubset>> {
    config.validate()?;
    let masks = scan_masks(s, kind, 63)?;
    let mut rng = config.rng();
    (0..config.count)
        .map(|_| chain_sample(s, &masks, &mut rng, config.grid))
        .collect()
}

/// `count` seeded `(in, in-or-q)`-fuzzy bi-ideals of `s`.
pub fn sample_eq_bi_ideals(
    s: &Arc<GammaSemigroup>,
    config: &GeneratorConfig,
) -> Result<Vec<FuzzySubset>> {
    let out = chain_samples(s, config, CrispKind::BiIdeal)?;
    for (i, mu) in out.iter().enumerate() {
        if !is_eq_bi_ideal(mu)?.holds {
            return Err(Error::SampleNotBiIdeal(i));
        }
    }
    Ok(out)
}

/// `count` seeded `(in, in-or-q)`-fuzzy subsemigroups of `s`.
pub fn sample_eq_subsemigroups(
    s: &Arc<GammaSemigroup>,
    config: &GeneratorConfig,
) -> Result<Vec<FuzzySubset>> {
    let out = chain_samples(s, config, CrispKind::Subsemigroup)?;
    debug_assert!(out.iter().all(|mu| is_eq_subsemigroup(mu).unwrap().holds));
    Ok(out)
}

/// Mixed corpus of `count` samples over random structures with `n <= max_n`,
/// `k <= max_k`: a third uniform grid subsets, a third chain-built
/// subsemigroups and a third chain-built bi-ideals.
pub fn mixed_corpus(
    seed: u64,
    count: usize,
    max_n: usize,
    max_k: usize,
    grid: u32,
) -> Result<Vec<FuzzySubset>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let n = rng.gen_range(1..=max_n);
        let k = rng.gen_range(1..=max_k);
        let sub_seed: u64 = rng.gen();
        let config = GeneratorConfig::new(n, k, sub_seed, grid, 1);
        let s = Arc::new(
            generate_structures(&config, GenerationMode::Random)?
                .pop()
                .expect("count is 1"),
        );
        let mu = match i % 3 {
            0 => random_fuzzy(&s, &config)?,
            1 => sample_eq_subsemigroups(&s, &config)?,
            _ => sample_eq_bi_ideals(&s, &config)?,
        };
        out.extend(mu);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Fixtures

/// A computed grade checked by a fixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Grade,
    O05Square,
    O05Sandwich,
}

impl Quantity {
    pub fn label(self) -> &'static str {
        match self {
            Quantity::Grade => "mu",
            Quantity::O05Square => "(mu o05 mu)",
            Quantity::O05Sandwich => "(mu o05 1 o05 mu)",
        }
    }

    pub fn evaluate(self, mu: &FuzzySubset, x: usize) -> Result<Grade> {
        Ok(match self {
            Quantity::Grade => mu.grade(x),
            Quantity::O05Square => o05_product(mu, mu)?.grade(x),
            Quantity::O05Sandwich => o05_sandwich(mu)?.grade(x),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expectation {
    Verdict {
        fuzzy: String,
        predicate: Predicate,
        holds: bool,
    },
    Value {
        fuzzy: String,
        quantity: Quantity,
        element: String,
        value: Grade,
    },
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expectation::Verdict {
                fuzzy,
                predicate,
                holds,
            } => write!(f, "{fuzzy} {}: {holds}", predicate.cli_name()),
            Expectation::Value {
                fuzzy,
                quantity,
                element,
                value,
            } => write!(
                f,
                "{}({element}): {value}",
                quantity.label().replace("mu", fuzzy)
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub id: String,
    pub structure: Arc<GammaSemigroup>,
    pub fuzzy: Vec<(String, FuzzySubset)>,
    pub expected: Vec<Expectation>,
}

impl Fixture {
    pub fn fuzzy_named(&self, name: &str) -> Option<&FuzzySubset> {
        self.fuzzy.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    /// Re-evaluates every expectation; returns the mismatches.
    pub fn self_test(&self) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for e in &self.expected {
            let fuzzy = match e {
                Expectation::Verdict { fuzzy, .. } | Expectation::Value { fuzzy, .. } => fuzzy,
            };
            let mu = self
                .fuzzy_named(fuzzy)
                .ok_or_else(|| Error::UnknownElement(fuzzy.clone()))?;
            match e {
                Expectation::Verdict {
                    predicate, holds, ..
                } => {
                    let got = predicate.evaluate(mu)?.holds;
                    if got != *holds {
                        bad.push(format!("{e} (got {got})"));
                    }
                }
                Expectation::Value {
                    quantity,
                    element,
                    value,
                    ..
                } => {
                    let x = self
                        .structure
                        .element_index(element)
                        .ok_or_else(|| Error::UnknownElement(element.clone()))?;
                    let got = quantity.evaluate(mu, x)?;
                    if got != *value {
                        bad.push(format!("{e} (got {got})"));
                    }
                }
            }
        }
        Ok(bad)
    }
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn grades(v: &[&str]) -> Vec<Grade> {
    v.iter()
        .map(|s| s.parse().expect("fixture grade literal"))
        .collect()
}

fn verdict(predicate: &str, holds: bool) -> Expectation {
    Expectation::Verdict {
        fuzzy: "mu".into(),
        predicate: Predicate::parse_cli(predicate).expect("fixture predicate name"),
        holds,
    }
}

fn value(quantity: Quantity, element: &str, v: &str) -> Expectation {
    Expectation::Value {
        fuzzy: "mu".into(),
        quantity,
        element: element.into(),
        value: v.parse().expect("fixture grade literal"),
    }
}

fn fixture(id: &str, s: GammaSemigroup, mu: &[&str], expected: Vec<Expectation>) -> Fixture {
    let s = Arc::new(s);
    let mu = FuzzySubset::new(s.clone(), grades(mu)).expect("fixture grades match carrier");
    Fixture {
        id: id.into(),
        structure: s,
        fuzzy: vec![("mu".into(), mu)],
        expected,
    }
}

/// The `(alpha, beta)` pairs that fail on the five-element example.
pub const EX46_FAILING_PAIRS: [&str; 11] = [
    "in,in",
    "q,in",
    "in,q",
    "q,invq",
    "q,inandq",
    "invq,inandq",
    "invq,in",
    "in,inandq",
    "q,q",
    "invq,q",
    "invq,invq",
];

/// `Z_n` with `Γ = {5, 7}` and `x γ y = x·γ·y mod n`. `mu` is `3/5` on the
/// even residues and `1/5` on the odd ones.
pub fn mod_n_fixture(n: usize) -> Result<Fixture> {
    if n == 0 {
        return Err(Error::EmptyCarrier);
    }
    let gammas = [5usize, 7];
    let s = GammaSemigroup::from_fn(
        (0..n).map(|x| x.to_string()).collect(),
        gammas.iter().map(|g| g.to_string()).collect(),
        |x, g, y| x * gammas[g] * y % n,
    )?;
    let mu: Vec<&str> = (0..n)
        .map(|x| if x % 2 == 0 { "3/5" } else { "1/5" })
        .collect();
    Ok(fixture(
        "ex2.1-mod-n",
        s,
        &mu,
        vec![
            verdict("eq-subsemigroup", true),
            verdict("eq-bi-ideal", true),
        ],
    ))
}

fn ex34() -> Fixture {
    let s = GammaSemigroup::new(
        names(&["e", "a", "b"]),
        names(&["g"]),
        vec![0, 0, 0, 0, 1, 0, 0, 0, 2],
    )
    .expect("valid table");
    fixture(
        "ex3.4",
        s,
        &["1/2", "3/5", "3/5"],
        vec![
            verdict("eq-subsemigroup", true),
            verdict("fuzzy-subsemigroup", false),
        ],
    )
}

fn ex46() -> Fixture {
    #[rustfmt::skip]
    let table = vec![
        0, 3, 0, 3, 3,
        0, 1, 0, 3, 3,
        0, 3, 2, 3, 4,
        0, 3, 0, 3, 3,
        0, 3, 2, 3, 4,
    ];
    let s = GammaSemigroup::new(names(&["a", "b", "c", "d", "e"]), names(&["g"]), table)
        .expect("valid table");
    let mut expected = vec![
        verdict("eq-subsemigroup", true),
        verdict("eq-bi-ideal", true),
    ];
    for pair in EX46_FAILING_PAIRS {
        expected.push(verdict(&format!("ab-subsemigroup:{pair}"), false));
        expected.push(verdict(&format!("ab-bi-ideal:{pair}"), false));
    }
    fixture("ex4.6", s, &["4/5", "7/10", "3/10", "1/2", "3/5"], expected)
}

fn ex427() -> Fixture {
    let s = GammaSemigroup::from_fn(names(&["a", "b", "c"]), names(&["g"]), |x, _, _| x)
        .expect("left projection is associative");
    fixture(
        "ex4.27",
        s,
        &["4/5", "7/10", "3/5"],
        vec![
            verdict("eq-subsemigroup", true),
            verdict("eq-bi-ideal", true),
            value(Quantity::O05Square, "a", "1/2"),
            value(Quantity::Grade, "a", "4/5"),
            value(Quantity::O05Sandwich, "a", "1/2"),
        ],
    )
}

/// Default size of the modular fixture.
pub const MOD_N_DEFAULT: usize = 12;

pub fn fixtures() -> Vec<Fixture> {
    vec![
        mod_n_fixture(MOD_N_DEFAULT).expect("n is positive"),
        ex34(),
        ex46(),
        ex427(),
    ]
}

pub fn fixture_by_id(id: &str) -> Option<Fixture> {
    fixtures().into_iter().find(|f| f.id == id)
}

// ---------------------------------------------------------------------------
// Witness search

/// Which fuzzy subset an atom inspects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    Mu,
    Nu,
    /// Pointwise max of `mu` and `nu`.
    Union,
    /// Pointwise min of `mu` and `nu`.
    Meet,
}

impl Scope {
    fn prefix(self) -> &'static str {
        match self {
            Scope::Mu => "mu",
            Scope::Nu => "nu",
            Scope::Union => "union",
            Scope::Meet => "meet",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Atom(Scope, Predicate),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

/// Named expressions accepted wherever an expression is.
pub const PRESETS: [(&str, &str); 1] = [(
    "union-counterexample",
    "mu.eq_subsemigroup AND nu.eq_subsemigroup AND NOT union.eq_subsemigroup",
)];

impl Expr {
    /// Parses `AND`/`OR`/`NOT`/parentheses over atoms `[scope.]ident`, where
    /// scope is `mu` (default), `nu`, `union` or `meet`. The macro
    /// `union_of_two_P` stands for `mu.P AND nu.P`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = PRESETS
            .iter()
            .find(|(name, _)| *name == text.trim())
            .map_or(text, |(_, body)| body);
        let tokens = tokenize(text)?;
        let mut parser = Parser { tokens, pos: 0 };
        let expr = parser.or()?;
        if parser.pos != parser.tokens.len() {
            return Err(Error::BadExpression(format!(
                "unexpected token `{}`",
                parser.tokens[parser.pos]
            )));
        }
        Ok(expr)
    }

    /// True if any atom looks beyond `mu`.
    pub fn needs_pair(&self) -> bool {
        match self {
            Expr::Atom(scope, _) => *scope != Scope::Mu,
            Expr::Not(e) => e.needs_pair(),
            Expr::And(a, b) | Expr::Or(a, b) => a.needs_pair() || b.needs_pair(),
        }
    }

    fn atoms(&self, out: &mut Vec<(Scope, Predicate)>) {
        match self {
            Expr::Atom(s, p) => {
                if !out.contains(&(*s, *p)) {
                    out.push((*s, *p));
                }
            }
            Expr::Not(e) => e.atoms(out),
            Expr::And(a, b) | Expr::Or(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }

    fn eval(&self, env: &Env) -> Result<bool> {
        Ok(match self {
            Expr::Atom(scope, p) => p.evaluate(env.get(*scope))?.holds,
            Expr::Not(e) => !e.eval(env)?,
            Expr::And(a, b) => a.eval(env)? && b.eval(env)?,
            Expr::Or(a, b) => a.eval(env)? || b.eval(env)?,
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Atom(scope, p) => write!(
                f,
                "{}.{}",
                scope.prefix(),
                p.cli_name().replace([':', ',', '-'], "_")
            ),
            Expr::Not(e) => write!(f, "NOT {e}"),
            Expr::And(a, b) => write!(f, "({a} AND {b})"),
            Expr::Or(a, b) => write!(f, "({a} OR {b})"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut word = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() || c == '_' || c == '.' || c == '-' || c == ':' || c == ',' {
            word.push(c);
            continue;
        }
        if !word.is_empty() {
            out.push(std::mem::take(&mut word));
        }
        match c {
            '(' | ')' => out.push(c.to_string()),
            c if c.is_whitespace() => {}
            _ => return Err(Error::BadExpression(format!("unexpected character `{c}`"))),
        }
    }
    if !word.is_empty() {
        out.push(word);
    }
    if out.is_empty() {
        return Err(Error::BadExpression("empty expression".into()));
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<String>,
    pos: usize,
}

impl Parser {
    fn peek_keyword(&self, kw: &str) -> bool {
        self.tokens
            .get(self.pos)
            .is_some_and(|t| t.eq_ignore_ascii_case(kw))
    }

    fn or(&mut self) -> Result<Expr> {
        let mut lhs = self.and()?;
        while self.peek_keyword("OR") {
            self.pos += 1;
            lhs = Expr::Or(Box::new(lhs), Box::new(self.and()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr> {
        let mut lhs = self.not()?;
        while self.peek_keyword("AND") {
            self.pos += 1;
            lhs = Expr::And(Box::new(lhs), Box::new(self.not()?));
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Expr> {
        if self.peek_keyword("NOT") {
            self.pos += 1;
            return Ok(Expr::Not(Box::new(self.not()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::BadExpression("expression ends early".into()))?;
        self.pos += 1;
        if tok == "(" {
            let inner = self.or()?;
            if self.tokens.get(self.pos).map(String::as_str) != Some(")") {
                return Err(Error::BadExpression("missing `)`".into()));
            }
            self.pos += 1;
            return Ok(inner);
        }
        if tok == ")"
            || ["AND", "OR", "NOT"]
                .iter()
                .any(|k| tok.eq_ignore_ascii_case(k))
        {
            return Err(Error::BadExpression(format!("unexpected `{tok}`")));
        }
        if let Some(rest) = tok.strip_prefix("union_of_two_") {
            let p = parse_atom_predicate(&singular(rest))?;
            return Ok(Expr::And(
                Box::new(Expr::Atom(Scope::Mu, p)),
                Box::new(Expr::Atom(Scope::Nu, p)),
            ));
        }
        let (scope, name) = match tok.split_once('.') {
            Some(("mu", n)) => (Scope::Mu, n),
            Some(("nu", n)) => (Scope::Nu, n),
            Some(("union", n)) => (Scope::Union, n),
            Some(("meet", n)) => (Scope::Meet, n),
            Some((other, _)) => {
                return Err(Error::BadExpression(format!("unknown scope `{other}`")))
            }
            None => (Scope::Mu, tok.as_str()),
        };
        Ok(Expr::Atom(scope, parse_atom_predicate(name)?))
    }
}

fn singular(s: &str) -> String {
    s.strip_suffix('s').unwrap_or(s).to_string()
}

fn parse_atom_predicate(name: &str) -> Result<Predicate> {
    Predicate::parse_ident(name).or_else(|_| Predicate::parse_cli(name))
}

struct Env {
    mu: FuzzySubset,
    nu: Option<FuzzySubset>,
    union: Option<FuzzySubset>,
    meet: Option<FuzzySubset>,
}

impl Env {
    fn new(mu: FuzzySubset, nu: Option<FuzzySubset>) -> Result<Self> {
        let (union, meet) = match &nu {
            Some(nu) => (Some(mu.union(nu)?), Some(mu.intersection(nu)?)),
            None => (None, None),
        };
        Ok(Self {
            mu,
            nu,
            union,
            meet,
        })
    }

    fn get(&self, scope: Scope) -> &FuzzySubset {
        let pick = match scope {
            Scope::Mu => Some(&self.mu),
            Scope::Nu => self.nu.as_ref(),
            Scope::Union => self.union.as_ref(),
            Scope::Meet => self.meet.as_ref(),
        };
        pick.expect("pair scopes only occur in pair searches")
    }
}

/// The `index`-th nonzero grid subset in lexicographic order (element 0 most
/// significant, grades ascending).
fn grid_subset(s: &Arc<GammaSemigroup>, grid: u32, index: u64) -> FuzzySubset {
    let base = u64::from(grid) + 1;
    let mut rest = index + 1;
    let mut grades = vec![Grade::ZERO; s.size()];
    for x in (0..s.size()).rev() {
        grades[x] = grid_grade((rest % base) as u32, grid);
        rest /= base;
    }
    FuzzySubset::new(s.clone(), grades).expect("length matches")
}

fn grid_count(n: usize, grid: u32) -> Result<u64> {
    u64::from(grid + 1)
        .checked_pow(n as u32)
        .map(|c| c - 1)
        .ok_or_else(|| Error::InvalidConfig("grid space too large".into()))
}

#[derive(Debug, Clone)]
pub struct WitnessFound {
    pub structure_index: usize,
    pub structure: Arc<GammaSemigroup>,
    pub mu: FuzzySubset,
    pub nu: Option<FuzzySubset>,
    /// Verdict of every atom, in first-appearance order.
    pub atoms: Vec<(String, PredicateVerdict)>,
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found(WitnessFound),
    Exhausted { structures: usize, candidates: u64 },
}

/// Scans `structures` in order and, within each, nonzero grid subsets (or
/// ordered pairs of them) in lexicographic order; returns the first match.
pub fn find_witness(
    structures: &[Arc<GammaSemigroup>],
    grid: u32,
    want: &Expr,
) -> Result<SearchOutcome> {
    if grid == 0 {
        return Err(Error::InvalidConfig("grid must be positive".into()));
    }
    let pair = want.needs_pair();
    let mut candidates = 0u64;
    for (si, s) in structures.iter().enumerate() {
        let m = grid_count(s.size(), grid)?;
        let total = if pair {
            m.checked_mul(m)
                .ok_or_else(|| Error::InvalidConfig("pair space too large".into()))?
        } else {
            m
        };
        let env_at = |idx: u64| -> Result<Env> {
            if pair {
                Env::new(
                    grid_subset(s, grid, idx / m),
                    Some(grid_subset(s, grid, idx % m)),
                )
            } else {
                Env::new(grid_subset(s, grid, idx), None)
            }
        };
        let total_usize = usize::try_from(total)
            .map_err(|_| Error::InvalidConfig("search space too large".into()))?;
        let hit = par::find_map_first(0..total_usize, |idx| {
            match env_at(idx as u64).and_then(|env| want.eval(&env)) {
                Ok(true) => Some(Ok(idx as u64)),
                Ok(false) => None,
                Err(e) => Some(Err(e)),
            }
        });
        match hit {
            Some(Err(e)) => return Err(e),
            Some(Ok(idx)) => {
                let env = env_at(idx)?;
                let mut atoms = Vec::new();
                want.atoms(&mut atoms);
                let atoms = atoms
                    .into_iter()
                    .map(|(scope, p)| {
                        let v = p.evaluate(env.get(scope))?;
                        Ok((format!("{}.{}", scope.prefix(), p.cli_name()), v))
                    })
                    .collect::<Result<Vec<_>>>()?;
                return Ok(SearchOutcome::Found(WitnessFound {
                    structure_index: si,
                    structure: s.clone(),
                    mu: env.mu,
                    nu: env.nu,
                    atoms,
                }));
            }
            None => candidates += total,
        }
    }
    Ok(SearchOutcome::Exhausted {
        structures: structures.len(),
        candidates,
    })
}
