//! The `.gsf` document format and the `gsf` command surface.
//!
//! ```text
//! elements e a b
//! gammas g
//! table g
//! e e e
//! e a e
//! e e b
//! fuzzy mu e=1/2 a=3/5 b=3/5
//! subset A e a
//! map f -> other.gsf : e=e a=a b=b
//! ```
//!
//! Row `i`, column `j` of `table g` is `element_i g element_j`. Fuzzy entries
//! that are left out have grade `0`. Map targets are paths relative to the
//! document.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzySubset, Grade};
use crate::predicates::Predicate;
use crate::search::{
    enumerate_crisp, exhaustive_up_to, find_witness, fixture_by_id, fixtures, generate_structures,
    sample_eq_bi_ideals, Expr, Fixture, GenerationMode, GeneratorConfig, SearchOutcome,
};
use crate::structure::{
    classify_structure, classify_subset, CrispKind, CrispSubset, GammaSemigroup, Homomorphism,
    DEFAULT_SUBSET_SCAN_LIMIT,
};
use crate::theorems::{
    image, report_bi_ideal_equivalences, report_homomorphism, report_level_characterization,
    report_product_characterization, report_regular_intra_characterization,
    report_regularity_characterization, report_subsemigroup_equivalences,
};

/// Environment override for the `2^n` scan bound.
pub const SCAN_LIMIT_VAR: &str = "GSF_MAX_SUBSET_SCAN";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapDecl {
    pub name: String,
    pub target: String,
    /// `(source element, target element)` in the order written.
    pub pairs: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureDocument {
    pub elements: Vec<String>,
    pub gammas: Vec<String>,
    /// Flat cube, `(x * k + gamma) * n + y`; not yet checked for associativity.
    pub cube: Vec<usize>,
    pub fuzzy: Vec<(String, Vec<Grade>)>,
    pub subsets: Vec<(String, CrispSubset)>,
    pub maps: Vec<MapDecl>,
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::SyntaxError {
        line,
        message: message.into(),
    }
}

fn check_unique(
    seen: &mut HashSet<String>,
    line: usize,
    kind: &'static str,
    name: &str,
) -> Result<()> {
    if !seen.insert(name.to_string()) {
        return Err(Error::DuplicateName {
            line,
            kind,
            name: name.to_string(),
        });
    }
    Ok(())
}

fn is_keyword(word: &str) -> bool {
    matches!(
        word,
        "elements" | "gammas" | "table" | "fuzzy" | "subset" | "map"
    )
}

impl StructureDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let lines: Vec<(usize, Vec<&str>)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| {
                let l = l.split('#').next().unwrap_or("");
                (i + 1, l.split_whitespace().collect::<Vec<_>>())
            })
            .filter(|(_, words)| !words.is_empty())
            .collect();

        let mut elements: Option<Vec<String>> = None;
        let mut gammas: Option<Vec<String>> = None;
        let mut tables: Vec<Option<Vec<usize>>> = Vec::new();
        let mut fuzzy = Vec::new();
        let mut subsets = Vec::new();
        let mut maps = Vec::new();
        let mut fuzzy_names = HashSet::new();
        let mut subset_names = HashSet::new();
        let mut map_names = HashSet::new();

        let element_index = |elements: &Option<Vec<String>>, line: usize, name: &str| {
            elements
                .as_ref()
                .and_then(|e| e.iter().position(|x| x == name))
                .ok_or_else(|| syntax(line, format!("unknown element `{name}`")))
        };

        let mut i = 0;
        while i < lines.len() {
            let (line, ref words) = lines[i];
            i += 1;
            let needs_header = |what: &str| -> Result<()> {
                if elements.is_none() || gammas.is_none() {
                    Err(syntax(
                        line,
                        format!("`{what}` before `elements` and `gammas`"),
                    ))
                } else {
                    Ok(())
                }
            };
            match words[0] {
                "elements" | "gammas" => {
                    let kind = if words[0] == "elements" {
                        "element"
                    } else {
                        "gamma"
                    };
                    let slot = if kind == "element" {
                        &mut elements
                    } else {
                        &mut gammas
                    };
                    if slot.is_some() {
                        return Err(syntax(line, format!("second `{}` line", words[0])));
                    }
                    if words.len() == 1 {
                        return Err(syntax(
                            line,
                            format!("`{}` needs at least one name", words[0]),
                        ));
                    }
                    let mut seen = HashSet::new();
                    for w in &words[1..] {
                        if w.contains('=') || is_keyword(w) {
                            return Err(syntax(line, format!("invalid name `{w}`")));
                        }
                        check_unique(&mut seen, line, kind, w)?;
                    }
                    *slot = Some(words[1..].iter().map(|w| w.to_string()).collect());
                    if let Some(g) = &gammas {
                        tables.resize(g.len(), None);
                    }
                }
                "table" => {
                    needs_header("table")?;
                    let (els, gs) = (elements.as_ref().unwrap(), gammas.as_ref().unwrap());
                    if words.len() != 2 {
                        return Err(syntax(line, "expected `table <gamma>`"));
                    }
                    let g = gs
                        .iter()
                        .position(|x| x == words[1])
                        .ok_or_else(|| syntax(line, format!("unknown gamma `{}`", words[1])))?;
                    if tables[g].is_some() {
                        return Err(Error::DuplicateName {
                            line,
                            kind: "table",
                            name: words[1].to_string(),
                        });
                    }
                    let n = els.len();
                    let mut rows = Vec::with_capacity(n * n);
                    for r in 0..n {
                        match lines.get(i) {
                            Some((row_line, row)) if !is_keyword(row[0]) => {
                                if row.len() != n {
                                    return Err(syntax(
                                        *row_line,
                                        format!(
                                            "table row has {} entries, expected {n}",
                                            row.len()
                                        ),
                                    ));
                                }
                                for w in row {
                                    rows.push(element_index(&elements, *row_line, w)?);
                                }
                                i += 1;
                            }
                            _ => {
                                return Err(Error::MissingTable(format!(
                                    "table {} has {r} of {n} rows",
                                    words[1]
                                )))
                            }
                        }
                    }
                    tables[g] = Some(rows);
                }
                "fuzzy" => {
                    needs_header("fuzzy")?;
                    let name = words
                        .get(1)
                        .ok_or_else(|| syntax(line, "fuzzy needs a name"))?;
                    check_unique(&mut fuzzy_names, line, "fuzzy", name)?;
                    let n = elements.as_ref().unwrap().len();
                    let mut grades = vec![Grade::ZERO; n];
                    let mut given = vec![false; n];
                    for entry in &words[2..] {
                        let (el, val) = entry.split_once('=').ok_or_else(|| {
                            syntax(line, format!("expected `element=grade`, got `{entry}`"))
                        })?;
                        let x = element_index(&elements, line, el)?;
                        if given[x] {
                            return Err(syntax(line, format!("element `{el}` graded twice")));
                        }
                        given[x] = true;
                        grades[x] = val.parse().map_err(|e| match e {
                            Error::BadRational(m) => {
                                Error::BadRational(format!("line {line}: {m}"))
                            }
                            other => other,
                        })?;
                    }
                    fuzzy.push((name.to_string(), grades));
                }
                "subset" => {
                    needs_header("subset")?;
                    let name = words
                        .get(1)
                        .ok_or_else(|| syntax(line, "subset needs a name"))?;
                    check_unique(&mut subset_names, line, "subset", name)?;
                    let n = elements.as_ref().unwrap().len();
                    let mut set = CrispSubset::empty(n);
                    for w in &words[2..] {
                        set.insert(element_index(&elements, line, w)?);
                    }
                    subsets.push((name.to_string(), set));
                }
                "map" => {
                    needs_header("map")?;
                    // map NAME -> TARGET : a=b ...
                    if words.len() < 5 || words[2] != "->" || words[4] != ":" {
                        return Err(syntax(line, "expected `map <name> -> <target> : x=y ...`"));
                    }
                    check_unique(&mut map_names, line, "map", words[1])?;
                    let mut pairs = Vec::new();
                    for entry in &words[5..] {
                        let (a, b) = entry.split_once('=').ok_or_else(|| {
                            syntax(line, format!("expected `x=y`, got `{entry}`"))
                        })?;
                        element_index(&elements, line, a)?;
                        pairs.push((a.to_string(), b.to_string()));
                    }
                    maps.push(MapDecl {
                        name: words[1].to_string(),
                        target: words[3].to_string(),
                        pairs,
                    });
                }
                other => return Err(syntax(line, format!("unexpected `{other}`"))),
            }
        }

        let elements = elements.ok_or_else(|| syntax(0, "missing `elements` line"))?;
        let gammas = gammas.ok_or_else(|| syntax(0, "missing `gammas` line"))?;
        let mut cube = Vec::with_capacity(elements.len() * gammas.len() * elements.len());
        let n = elements.len();
        let blocks: Vec<Vec<usize>> = tables
            .into_iter()
            .zip(&gammas)
            .map(|(t, g)| t.ok_or_else(|| Error::MissingTable(format!("no table for gamma {g}"))))
            .collect::<Result<_>>()?;
        for x in 0..n {
            for block in &blocks {
                cube.extend_from_slice(&block[x * n..(x + 1) * n]);
            }
        }
        Ok(Self {
            elements,
            gammas,
            cube,
            fuzzy,
            subsets,
            maps,
        })
    }

    pub fn print(&self) -> String {
        let (n, k) = (self.elements.len(), self.gammas.len());
        let mut out = String::new();
        let _ = writeln!(out, "elements {}", self.elements.join(" "));
        let _ = writeln!(out, "gammas {}", self.gammas.join(" "));
        for (g, gname) in self.gammas.iter().enumerate() {
            let _ = writeln!(out, "table {gname}");
            for x in 0..n {
                let row: Vec<&str> = (0..n)
                    .map(|y| self.elements[self.cube[(x * k + g) * n + y]].as_str())
                    .collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
        for (name, grades) in &self.fuzzy {
            let entries: Vec<String> = self
                .elements
                .iter()
                .zip(grades)
                .map(|(e, g)| format!("{e}={g}"))
                .collect();
            let _ = writeln!(out, "fuzzy {name} {}", entries.join(" "));
        }
        for (name, set) in &self.subsets {
            let mut line = format!("subset {name}");
            for x in set.iter() {
                line.push(' ');
                line.push_str(&self.elements[x]);
            }
            let _ = writeln!(out, "{line}");
        }
        for m in &self.maps {
            let pairs: Vec<String> = m.pairs.iter().map(|(a, b)| format!("{a}={b}")).collect();
            let _ = writeln!(out, "map {} -> {} : {}", m.name, m.target, pairs.join(" "));
        }
        out
    }

    pub fn structure(&self) -> Result<GammaSemigroup> {
        GammaSemigroup::new(
            self.elements.clone(),
            self.gammas.clone(),
            self.cube.clone(),
        )
    }

    pub fn fuzzy_subset(&self, s: &Arc<GammaSemigroup>, name: &str) -> Result<FuzzySubset> {
        let grades = self
            .fuzzy
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| g.clone())
            .ok_or_else(|| Error::InvalidConfig(format!("no fuzzy subset named `{name}`")))?;
        FuzzySubset::new(s.clone(), grades)
    }

    pub fn from_structure(s: &GammaSemigroup) -> Self {
        Self {
            elements: s.elements().to_vec(),
            gammas: s.gammas().to_vec(),
            cube: s.cube().to_vec(),
            fuzzy: Vec::new(),
            subsets: Vec::new(),
            maps: Vec::new(),
        }
    }

    pub fn from_fixture(f: &Fixture) -> Self {
        let mut doc = Self::from_structure(&f.structure);
        doc.fuzzy = f
            .fuzzy
            .iter()
            .map(|(n, m)| (n.clone(), m.grades().to_vec()))
            .collect();
        doc
    }
}

/// The document for an `@fixture` reference or a file path, plus the
/// directory map targets are resolved against.
fn load(file: &str) -> Result<(StructureDocument, PathBuf), String> {
    if let Some(id) = file.strip_prefix('@') {
        let f = fixture_by_id(id).ok_or_else(|| format!("unknown fixture `{id}`"))?;
        return Ok((StructureDocument::from_fixture(&f), PathBuf::from(".")));
    }
    let text = std::fs::read_to_string(file).map_err(|e| format!("{file}: {e}"))?;
    let doc = StructureDocument::parse(&text).map_err(|e| format!("{file}: {e}"))?;
    let dir = Path::new(file)
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Ok((doc, dir))
}

pub fn scan_limit() -> usize {
    std::env::var(SCAN_LIMIT_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_SUBSET_SCAN_LIMIT)
}

#[derive(Parser, Debug)]
#[command(
    name = "gsf",
    version,
    about = "Exact checks for fuzzy ideals of finite Γ-semigroups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check closure and mixed associativity.
    Validate { file: String },
    /// Structure flags and crisp flags of every named subset.
    Classify { file: String },
    /// Decide a predicate for a named fuzzy subset.
    Check {
        file: String,
        #[arg(long)]
        fuzzy: String,
        #[arg(long)]
        pred: String,
        #[arg(long)]
        expect: Option<bool>,
    },
    /// Run every theorem harness on a named fuzzy subset.
    Theorems {
        file: String,
        #[arg(long)]
        fuzzy: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        grid: u32,
    },
    /// List crisp subsets of a kind.
    Enumerate {
        file: String,
        #[arg(long)]
        kind: String,
    },
    /// Look for a separating witness.
    Search {
        #[arg(long)]
        want: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        grid: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Every structure with 1..=n elements instead of random ones.
        #[arg(long)]
        exhaustive: bool,
        /// Random structures to scan.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Search only this structure (file or @fixture).
        #[arg(long)]
        on: Option<String>,
    },
    /// Built-in example structures.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Subcommand, Debug)]
enum FixtureAction {
    List,
    Show { id: String },
    Write { id: String, path: PathBuf },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, stderr: impl Into<String>) -> Self {
        Self {
            code,
            stdout: String::new(),
            stderr: stderr.into(),
        }
    }
}

fn is_structure_error(e: &Error) -> bool {
    matches!(
        e,
        Error::EmptyCarrier
            | Error::EmptyGammaSet
            | Error::CubeShape { .. }
            | Error::OutOfRangeEntry { .. }
            | Error::AssociativityViolation { .. }
    )
}

fn from_error(e: Error) -> Outcome {
    let code = if is_structure_error(&e) { 3 } else { 2 };
    Outcome::fail(code, format!("error: {e}\n"))
}

fn structure_of(doc: &StructureDocument) -> Result<Arc<GammaSemigroup>, Outcome> {
    doc.structure().map(Arc::new).map_err(from_error)
}

/// Runs `gsf` with `args` (without the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv =
        std::iter::once(std::ffi::OsString::from("gsf")).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome::fail(2, text)
            } else {
                Outcome::ok(text)
            };
        }
    };
    match dispatch(cli.command) {
        Ok(o) | Err(o) => o,
    }
}

fn dispatch(command: Command) -> Result<Outcome, Outcome> {
    match command {
        Command::Validate { file } => {
            let (doc, _) = load(&file).map_err(|e| Outcome::fail(2, e + "\n"))?;
            match doc.structure() {
                Ok(s) => Ok(Outcome::ok(format!(
                    "valid: true\nelements: {}\ngammas: {}\n",
                    s.size(),
                    s.gamma_count()
                ))),
                Err(e) if is_structure_error(&e) => Ok(Outcome {
                    code: 3,
                    stdout: format!("valid: false\nerror: {e}\n"),
                    stderr: String::new(),
                }),
                Err(e) => Err(from_error(e)),
            }
        }
        Command::Classify { file } => {
            let (doc, _) = load(&file).map_err(|e| Outcome::fail(2, e + "\n"))?;
            let s = structure_of(&doc)?;
            let class = classify_structure(&s, scan_limit()).map_err(from_error)?;
            let mut out = String::new();
            let _ = writeln!(out, "regular: {}", class.regular);
            let _ = writeln!(out, "intra-regular: {}", class.intra_regular);
            let _ = writeln!(out, "left-duo: {}", class.left_duo);
            let _ = writeln!(out, "right-duo: {}", class.right_duo);
            let _ = writeln!(out, "duo: {}", class.duo);
            for (name, set) in &doc.subsets {
                let c = classify_subset(&s, set).map_err(from_error)?;
                let _ = writeln!(out, "subset.{name}.subsemigroup: {}", c.subsemigroup);
                let _ = writeln!(out, "subset.{name}.left-ideal: {}", c.left_ideal);
                let _ = writeln!(out, "subset.{name}.right-ideal: {}", c.right_ideal);
                let _ = writeln!(out, "subset.{name}.ideal: {}", c.ideal());
                let _ = writeln!(out, "subset.{name}.bi-ideal: {}", c.bi_ideal);
            }
            Ok(Outcome::ok(out))
        }
        Command::Check {
            file,
            fuzzy,
            pred,
            expect,
        } => {
            let (doc, _) = load(&file).map_err(|e| Outcome::fail(2, e + "\n"))?;
            let s = structure_of(&doc)?;
            let predicate = Predicate::parse_cli(&pred).map_err(from_error)?;
            let mu = doc.fuzzy_subset(&s, &fuzzy).map_err(from_error)?;
            let verdict = predicate.evaluate(&mu).map_err(from_error)?;
            let mut out = String::new();
            let _ = writeln!(out, "predicate: {}", predicate.cli_name());
            let _ = writeln!(out, "fuzzy: {fuzzy}");
            let _ = writeln!(out, "holds: {}", verdict.holds);
            if let Some(w) = &verdict.witness {
                let _ = writeln!(out, "witness: {}", w.render(&s));
            }
            let mut code = 0;
            if let Some(want) = expect {
                let _ = writeln!(out, "expected: {want}");
                if want != verdict.holds {
                    code = 1;
                }
            }
            Ok(Outcome {
                code,
                stdout: out,
                stderr: String::new(),
            })
        }
        Command::Theorems {
            file,
            fuzzy,
            samples,
            seed,
            grid,
        } => {
            let (doc, dir) = load(&file).map_err(|e| Outcome::fail(2, e + "\n"))?;
            let s = structure_of(&doc)?;
            let mu = doc.fuzzy_subset(&s, &fuzzy).map_err(from_error)?;
            theorems(&doc, &dir, &s, &mu, &fuzzy, samples, seed, grid).map_err(from_error)
        }
        Command::Enumerate { file, kind } => {
            let (doc, _) = load(&file).map_err(|e| Outcome::fail(2, e + "\n"))?;
            let s = structure_of(&doc)?;
            let kind = CrispKind::parse(&kind)
                .ok_or_else(|| Outcome::fail(2, format!("error: unknown kind `{kind}`\n")))?;
            let sets = enumerate_crisp(&s, kind, scan_limit()).map_err(from_error)?;
            let mut out = format!("kind: {}\ncount: {}\n", kind.name(), sets.len());
            for set in &sets {
                let _ = writeln!(out, "subset: {}", set.names(&s).join(" "));
            }
            Ok(Outcome::ok(out))
        }
        Command::Search {
            want,
            n,
            k,
            grid,
            seed,
            exhaustive,
            count,
            on,
        } => {
            let expr = Expr::parse(&want).map_err(from_error)?;
            let structures = match on {
                Some(file) => {
                    let (doc, _) = load(&file).map_err(|e| Outcome::fail(2, e + "\n"))?;
                    vec![structure_of(&doc)?]
                }
                None if exhaustive => exhaustive_up_to(n, k).map_err(from_error)?,
                None => {
                    let config = GeneratorConfig::new(n, k, seed, grid, count);
                    generate_structures(&config, GenerationMode::Random)
                        .map_err(from_error)?
                        .into_iter()
                        .map(Arc::new)
                        .collect()
                }
            };
            let outcome = find_witness(&structures, grid, &expr).map_err(from_error)?;
            Ok(Outcome::ok(render_search(&expr, outcome)))
        }
        Command::Fixtures { action } => fixtures_command(action),
    }
}

fn render_search(expr: &Expr, outcome: SearchOutcome) -> String {
    let mut out = format!("want: {expr}\n");
    match outcome {
        SearchOutcome::Exhausted {
            structures,
            candidates,
        } => {
            let _ = writeln!(out, "outcome: exhausted");
            let _ = writeln!(out, "structures: {structures}");
            let _ = writeln!(out, "candidates: {candidates}");
        }
        SearchOutcome::Found(w) => {
            let _ = writeln!(out, "outcome: found");
            let _ = writeln!(out, "structure-index: {}", w.structure_index);
            let s = &w.structure;
            for (verdict_name, v) in &w.atoms {
                let _ = writeln!(out, "{verdict_name}: {}", v.holds);
                if let Some(wit) = &v.witness {
                    let _ = writeln!(out, "{verdict_name}.witness: {}", wit.render(s));
                }
            }
            let mut doc = StructureDocument::from_structure(s);
            doc.fuzzy.push(("mu".into(), w.mu.grades().to_vec()));
            if let Some(nu) = &w.nu {
                doc.fuzzy.push(("nu".into(), nu.grades().to_vec()));
            }
            out.push_str("document:\n");
            for line in doc.print().lines() {
                let _ = writeln!(out, "  {line}");
            }
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn theorems(
    doc: &StructureDocument,
    dir: &Path,
    s: &Arc<GammaSemigroup>,
    mu: &FuzzySubset,
    name: &str,
    samples: usize,
    seed: u64,
    grid: u32,
) -> Result<Outcome> {
    let mut out = format!("fuzzy: {name}\n");
    let mut reports = vec![
        report_subsemigroup_equivalences(mu)?,
        report_bi_ideal_equivalences(mu)?,
    ];
    reports.extend(report_level_characterization(mu)?);
    reports.extend(report_product_characterization(mu)?);
    let config = GeneratorConfig::new(s.size(), s.gamma_count(), seed, grid, samples);
    let corpus = sample_eq_bi_ideals(s, &config)?;
    reports.push(report_regularity_characterization(s, &corpus)?);
    reports.push(report_regular_intra_characterization(s, &corpus)?);
    for m in &doc.maps {
        let target_path = dir.join(&m.target);
        let text = std::fs::read_to_string(&target_path).map_err(|e| {
            Error::InvalidConfig(format!("map {}: {}: {e}", m.name, target_path.display()))
        })?;
        let target_doc = StructureDocument::parse(&text)?;
        let target = Arc::new(target_doc.structure()?);
        let mut images = vec![0; s.size()];
        let mut given = vec![false; s.size()];
        for (a, b) in &m.pairs {
            let x = s
                .element_index(a)
                .ok_or_else(|| Error::UnknownElement(a.clone()))?;
            images[x] = target
                .element_index(b)
                .ok_or_else(|| Error::UnknownElement(b.clone()))?;
            given[x] = true;
        }
        if given.iter().any(|g| !g) {
            return Err(Error::MapNotTotal {
                expected: s.size(),
                actual: given.iter().filter(|&&g| g).count(),
            });
        }
        let f = Homomorphism::new(s.clone(), target.clone(), images)?;
        let mu_target = match target_doc.fuzzy_subset(&target, name) {
            Ok(m) => m,
            Err(_) => image(&f, mu)?,
        };
        let mut r = report_homomorphism(&f, mu, &mu_target)?;
        r.theorem = format!("{}[{}]", r.theorem, m.name);
        reports.push(r);
    }
    let all_agree = reports.iter().all(|r| r.agree);
    for r in &reports {
        out.push_str(&r.to_string());
    }
    let _ = writeln!(out, "all-agree: {all_agree}");
    Ok(Outcome::ok(out))
}

fn fixtures_command(action: FixtureAction) -> Result<Outcome, Outcome> {
    let find = |id: &str| {
        fixture_by_id(id)
            .ok_or_else(|| Outcome::fail(2, format!("error: unknown fixture `{id}`\n")))
    };
    match action {
        FixtureAction::List => {
            let mut out = String::new();
            for f in fixtures() {
                let _ = writeln!(
                    out,
                    "{}: {} elements, {} gammas",
                    f.id,
                    f.structure.size(),
                    f.structure.gamma_count()
                );
            }
            Ok(Outcome::ok(out))
        }
        FixtureAction::Show { id } => {
            let f = find(&id)?;
            let mut out = StructureDocument::from_fixture(&f).print();
            for e in &f.expected {
                let _ = writeln!(out, "# expect {e}");
            }
            Ok(Outcome::ok(out))
        }
        FixtureAction::Write { id, path } => {
            let f = find(&id)?;
            std::fs::write(&path, StructureDocument::from_fixture(&f).print())
                .map_err(|e| Outcome::fail(2, format!("error: {}: {e}\n", path.display())))?;
            Ok(Outcome::ok(format!("wrote: {}\n", path.display())))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX34: &str = "\
# three elements
elements e a b
gammas g
table g
e e e
e a e
e e b
fuzzy mu e=1/2 a=3/5 b=0.6
subset A e a
";

    #[test]
    fn parses_and_validates() {
        let doc = StructureDocument::parse(EX34).unwrap();
        assert_eq!(doc.cube, vec![0, 0, 0, 0, 1, 0, 0, 0, 2]);
        assert!(doc.structure().is_ok());
        assert_eq!(doc.fuzzy[0].1[2], "3/5".parse().unwrap());
        assert_eq!(
            doc.subsets[0].1,
            CrispSubset::from_indices(3, [0, 1]).unwrap()
        );
    }

    #[test]
    fn round_trip() {
        let doc = StructureDocument::parse(EX34).unwrap();
        assert_eq!(StructureDocument::parse(&doc.print()).unwrap(), doc);
        for f in fixtures() {
            let doc = StructureDocument::from_fixture(&f);
            assert_eq!(
                StructureDocument::parse(&doc.print()).unwrap(),
                doc,
                "{}",
                f.id
            );
        }
    }

    #[test]
    fn parse_errors() {
        let bad_grade = EX34.replace("e=1/2", "e=3/2");
        assert!(matches!(
            StructureDocument::parse(&bad_grade),
            Err(Error::BadRational(_))
        ));
        let short = EX34.replace("e e b\n", "");
        assert!(matches!(
            StructureDocument::parse(&short),
            Err(Error::MissingTable(_))
        ));
        let dup = EX34.replace("elements e a b", "elements e a a");
        assert_eq!(
            StructureDocument::parse(&dup),
            Err(Error::DuplicateName {
                line: 2,
                kind: "element",
                name: "a".into()
            })
        );
        let unknown = EX34.replace("e a e", "e z e");
        assert!(matches!(
            StructureDocument::parse(&unknown),
            Err(Error::SyntaxError { line: 6, .. })
        ));
        let no_table = "elements a\ngammas g h\ntable g\na\n";
        assert!(matches!(
            StructureDocument::parse(no_table),
            Err(Error::MissingTable(_))
        ));
    }

    #[test]
    fn exit_codes() {
        let ok = run([
            "check",
            "@ex3.4",
            "--fuzzy",
            "mu",
            "--pred",
            "eq-subsemigroup",
        ]);
        assert_eq!(ok.code, 0);
        assert!(ok.stdout.contains("holds: true\n"));
        let mismatch = run([
            "check",
            "@ex3.4",
            "--fuzzy",
            "mu",
            "--pred",
            "eq-subsemigroup",
            "--expect",
            "false",
        ]);
        assert_eq!(mismatch.code, 1);
        assert_eq!(run(["check", "@ex3.4"]).code, 2);
        assert_eq!(
            run([
                "check",
                "@nope",
                "--fuzzy",
                "mu",
                "--pred",
                "eq-subsemigroup"
            ])
            .code,
            2
        );
        assert_eq!(run(["--help"]).code, 0);
    }
}
