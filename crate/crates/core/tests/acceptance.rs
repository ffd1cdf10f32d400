//! Acceptance gate. Runs every criterion in sequence, prints one PASS/FAIL
//! line each, then fails if any criterion failed.
//!
//! Every comparison is exact (rational equality, zero tolerance). Time
//! bounds are checked per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use gamma_fuzzy::cli::run;
use gamma_fuzzy::fuzzy::{cap05, characteristic, constant, o05_product, o_product};
use gamma_fuzzy::predicates::{
    is_alpha_beta_bi_ideal, is_alpha_beta_subsemigroup, is_eq_bi_ideal, is_eq_subsemigroup,
    is_fuzzy_subsemigroup, subset_or_q, AlphaBetaPair,
};
use gamma_fuzzy::search::{
    exhaustive_up_to, fixture_by_id, mixed_corpus, random_fuzzy, sample_eq_bi_ideals,
    sample_eq_subsemigroups, GeneratorConfig, EX46_FAILING_PAIRS,
};
use gamma_fuzzy::structure::{classify_subset, gamma_product, surjective_homomorphisms};
use gamma_fuzzy::theorems::{
    image, o05_sandwich, preimage, report_bi_ideal_equivalences, report_level_characterization,
    report_product_characterization, report_regular_intra_characterization,
    report_regularity_characterization, report_subsemigroup_equivalences,
};
use gamma_fuzzy::{CrispSubset, FuzzySubset, GammaSemigroup, Grade};

/// Exact agreement everywhere; recorded in the output for the record.
const TOLERANCE: &str = "exact (0)";
const CORPUS_SEED: u64 = 0x5eed_2024;
const CORPUS_SIZE: usize = 1200;
const GRID: u32 = 10;
const SAMPLE_SEED: u64 = 77;
const SAMPLES: usize = 100;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn g(s: &str) -> Grade {
    s.parse().unwrap()
}

fn criterion_1() -> Outcome {
    let eq = run([
        "check",
        "@ex3.4",
        "--fuzzy",
        "mu",
        "--pred",
        "eq-subsemigroup",
    ]);
    ensure(eq.code == 0 && eq.stdout.contains("holds: true\n"), || {
        format!("eq-subsemigroup: {eq:?}")
    })?;
    let fs = run([
        "check",
        "@ex3.4",
        "--fuzzy",
        "mu",
        "--pred",
        "fuzzy-subsemigroup",
    ]);
    ensure(fs.code == 0 && fs.stdout.contains("holds: false\n"), || {
        format!("fuzzy-subsemigroup: {fs:?}")
    })?;
    let line = fs
        .stdout
        .lines()
        .find(|l| l.starts_with("witness: "))
        .ok_or("no witness line")?;
    let f = fixture_by_id("ex3.4").unwrap();
    let mu = f.fuzzy_named("mu").unwrap();
    let w = is_fuzzy_subsemigroup(mu)
        .unwrap()
        .witness
        .ok_or("no witness")?;
    ensure(
        line == format!("witness: {}", w.render(&f.structure)),
        || format!("witness line {line} does not match the decider"),
    )?;
    let product_grade = mu.grade(w.tuple.product(&f.structure));
    ensure(product_grade == Grade::HALF, || {
        format!("product grade {product_grade}")
    })?;
    Ok(format!("{line}, product grade {product_grade}"))
}

fn criterion_2() -> Outcome {
    for pred in ["eq-subsemigroup", "eq-bi-ideal"] {
        let o = run([
            "check", "@ex4.6", "--fuzzy", "mu", "--pred", pred, "--expect", "true",
        ]);
        ensure(o.code == 0 && o.stdout.contains("holds: true\n"), || {
            format!("{pred}: {o:?}")
        })?;
    }
    let mut checked = 0;
    for pair in EX46_FAILING_PAIRS {
        for kind in ["ab-subsemigroup", "ab-bi-ideal"] {
            let pred = format!("{kind}:{pair}");
            let o = run([
                "check", "@ex4.6", "--fuzzy", "mu", "--pred", &pred, "--expect", "false",
            ]);
            ensure(o.code == 0 && o.stdout.contains("holds: false\n"), || {
                format!("{pred}: {o:?}")
            })?;
            ensure(o.stdout.contains("witness: "), || {
                format!("{pred}: no witness")
            })?;
            checked += 1;
        }
    }
    Ok(format!("2 true, {checked} (alpha,beta) verdicts false"))
}

fn criterion_3() -> Outcome {
    let f = fixture_by_id("ex4.27").unwrap();
    let mu = f.fuzzy_named("mu").unwrap();
    let a = f.structure.element_index("a").unwrap();
    let square = o05_product(mu, mu).unwrap().grade(a);
    let sandwich = o05_sandwich(mu).unwrap().grade(a);
    ensure(square == Grade::HALF, || {
        format!("(mu o05 mu)(a) = {square}")
    })?;
    ensure(mu.grade(a) == g("4/5"), || {
        format!("mu(a) = {}", mu.grade(a))
    })?;
    ensure(sandwich == Grade::HALF, || {
        format!("sandwich(a) = {sandwich}")
    })?;
    ensure(square < mu.grade(a), || "containment not strict".into())?;
    Ok(format!(
        "(mu o05 mu)(a)={square} < mu(a)={}, sandwich(a)={sandwich}",
        mu.grade(a)
    ))
}

fn criterion_4(corpus: &[FuzzySubset]) -> Outcome {
    let mut true_sub = 0;
    let mut true_bi = 0;
    for (i, mu) in corpus.iter().enumerate() {
        let sub = report_subsemigroup_equivalences(mu).unwrap();
        let bi = report_bi_ideal_equivalences(mu).unwrap();
        ensure(sub.agree && sub.flags.len() == 5, || {
            format!("sample {i}: {sub}")
        })?;
        ensure(bi.agree && bi.flags.len() == 5, || {
            format!("sample {i}: {bi}")
        })?;
        true_sub += sub.flags[0] as usize;
        true_bi += bi.flags[0] as usize;
    }
    ensure(true_sub > 0 && true_sub < corpus.len(), || {
        "corpus does not exercise both verdicts".into()
    })?;
    Ok(format!(
        "{} samples, {true_sub} subsemigroups, {true_bi} bi-ideals",
        corpus.len()
    ))
}

fn criterion_5(corpus: &[FuzzySubset]) -> Outcome {
    for (i, mu) in corpus.iter().enumerate() {
        let mut reports = report_level_characterization(mu).unwrap();
        reports.extend(report_product_characterization(mu).unwrap());
        for r in reports {
            ensure(r.agree, || format!("sample {i}: {r}"))?;
        }
    }
    Ok(format!("{} samples x 4 theorems", corpus.len()))
}

fn criterion_6(structures: &[Arc<GammaSemigroup>]) -> Outcome {
    let mut subsets = 0;
    for s in structures {
        let n = s.size();
        for bits in 1..(1u64 << n) {
            let a = CrispSubset::from_bits(n, bits);
            let class = classify_subset(s, &a).unwrap();
            let chi = characteristic(s, &a);
            ensure(
                class.subsemigroup == is_eq_subsemigroup(&chi).unwrap().holds,
                || format!("subsemigroup mismatch on {:?} for {bits:b}", s.cube()),
            )?;
            ensure(
                class.bi_ideal == is_eq_bi_ideal(&chi).unwrap().holds,
                || format!("bi-ideal mismatch on {:?} for {bits:b}", s.cube()),
            )?;
            ensure(class.subsemigroup == naive_is_subsemigroup(s, bits), || {
                format!("crisp oracle disagrees on {:?} for {bits:b}", s.cube())
            })?;
            ensure(class.bi_ideal == naive_is_bi_ideal(s, bits), || {
                format!(
                    "crisp bi-ideal oracle disagrees on {:?} for {bits:b}",
                    s.cube()
                )
            })?;
            subsets += 1;
        }
    }
    Ok(format!(
        "{} structures, {subsets} subsets",
        structures.len()
    ))
}

fn criterion_7(structures: &[Arc<GammaSemigroup>]) -> Outcome {
    let half = q(1, 2);
    let mut pairs = 0;
    for s in structures {
        let n = s.size();
        let full = CrispSubset::full(n);
        for a in 0..(1u64 << n) {
            for b in 0..(1u64 << n) {
                let (sa, sb) = (CrispSubset::from_bits(n, a), CrispSubset::from_bits(n, b));
                let (ca, cb) = (characteristic(s, &sa), characteristic(s, &sb));
                let meet = cap05(&ca, &cb).unwrap();
                let expect_meet = constant(s, Grade::HALF, &sa.intersection(&sb));
                ensure(meet == expect_meet, || {
                    format!("meet identity fails for {a:b},{b:b}")
                })?;
                let prod = o05_product(&ca, &cb).unwrap();
                let ab = gamma_product(s, &sa, &sb);
                let expect_prod =
                    characteristic(s, &ab).intersection(&constant(s, Grade::HALF, &full));
                ensure(Ok(prod.clone()) == expect_prod, || {
                    format!("product identity fails for {a:b},{b:b}")
                })?;
                // independent oracle on both sides
                let oracle = capped(&chi(n, naive_gamma_product(s, a, b)), half);
                ensure(grades(&prod) == oracle, || {
                    format!("oracle disagrees for {a:b},{b:b}")
                })?;
                ensure(grades(&meet) == capped(&chi(n, a & b), half), || {
                    format!("meet oracle disagrees for {a:b},{b:b}")
                })?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} (A,B) pairs"))
}

fn bi_ideal_samples(s: &Arc<GammaSemigroup>) -> Vec<FuzzySubset> {
    let config = GeneratorConfig::new(s.size(), s.gamma_count(), SAMPLE_SEED, GRID, SAMPLES);
    sample_eq_bi_ideals(s, &config).unwrap()
}

fn criterion_8(structures: &[Arc<GammaSemigroup>]) -> Outcome {
    let (mut regular, mut irregular) = (0, 0);
    for s in structures {
        let r = report_regularity_characterization(s, &bi_ideal_samples(s)).unwrap();
        ensure(r.agree, || format!("{:?}: {r}", s.cube()))?;
        ensure(r.flags[0] == naive_regular(s), || {
            format!("{:?}: regular flag disagrees with the oracle", s.cube())
        })?;
        if r.flags[0] {
            regular += 1;
        } else {
            irregular += 1;
        }
    }
    ensure(regular > 0 && irregular > 0, || {
        "corpus lacks variety".into()
    })?;
    Ok(format!("{regular} regular, {irregular} not regular"))
}

fn criterion_9(structures: &[Arc<GammaSemigroup>]) -> Outcome {
    let mut both = 0;
    for s in structures {
        let r = report_regular_intra_characterization(s, &bi_ideal_samples(s)).unwrap();
        ensure(r.agree, || format!("{:?}: {r}", s.cube()))?;
        ensure(
            r.flags[0] == (naive_regular(s) && naive_intra_regular(s)),
            || format!("{:?}: flag A disagrees with the oracle", s.cube()),
        )?;
        both += r.flags[0] as usize;
    }
    ensure(both > 0 && both < structures.len(), || {
        "corpus lacks variety".into()
    })?;
    Ok(format!(
        "{} structures, {both} regular and intra-regular",
        structures.len()
    ))
}

fn hom_samples(s: &Arc<GammaSemigroup>) -> Vec<FuzzySubset> {
    let third = SAMPLES / 3;
    let config = |count| GeneratorConfig::new(s.size(), s.gamma_count(), SAMPLE_SEED, GRID, count);
    let mut out = sample_eq_subsemigroups(s, &config(third)).unwrap();
    out.extend(sample_eq_bi_ideals(s, &config(third)).unwrap());
    out.extend(random_fuzzy(s, &config(SAMPLES - 2 * third)).unwrap());
    out
}

fn criterion_10(structures: &[Arc<GammaSemigroup>]) -> Outcome {
    let samples: Vec<Vec<FuzzySubset>> = structures.iter().map(hom_samples).collect();
    let (mut homs, mut checks) = (0usize, 0usize);
    for (i, src) in structures.iter().enumerate() {
        for (j, tgt) in structures.iter().enumerate() {
            if tgt.size() > src.size() {
                continue;
            }
            for f in surjective_homomorphisms(src, tgt) {
                homs += 1;
                for mu in &samples[i] {
                    let img = image(&f, mu).unwrap();
                    if is_eq_subsemigroup(mu).unwrap().holds {
                        ensure(is_eq_subsemigroup(&img).unwrap().holds, || {
                            format!("image of subsemigroup fails: {i}->{j} {:?}", f.map())
                        })?;
                        checks += 1;
                    }
                    if is_eq_bi_ideal(mu).unwrap().holds {
                        ensure(is_eq_bi_ideal(&img).unwrap().holds, || {
                            format!("image of bi-ideal fails: {i}->{j} {:?}", f.map())
                        })?;
                        checks += 1;
                    }
                }
                for nu in &samples[j] {
                    let pre = preimage(&f, nu).unwrap();
                    if is_eq_subsemigroup(nu).unwrap().holds {
                        ensure(is_eq_subsemigroup(&pre).unwrap().holds, || {
                            format!("preimage of subsemigroup fails: {i}->{j} {:?}", f.map())
                        })?;
                        checks += 1;
                    }
                    if is_eq_bi_ideal(nu).unwrap().holds {
                        ensure(is_eq_bi_ideal(&pre).unwrap().holds, || {
                            format!("preimage of bi-ideal fails: {i}->{j} {:?}", f.map())
                        })?;
                        checks += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "{homs} surjective homomorphisms, {checks} implications"
    ))
}

fn criterion_11(corpus: &[FuzzySubset]) -> Outcome {
    let d = i64::from(GRID);
    let in_invq = AlphaBetaPair::in_invq();
    for (i, mu) in corpus.iter().enumerate() {
        let s = mu.structure();
        let m = grades(mu);
        let closed = is_eq_subsemigroup(mu).unwrap().holds;
        let generic = is_alpha_beta_subsemigroup(mu, in_invq).unwrap().holds;
        let sweep = eq_sub_sweep(s, &m, d);
        ensure(closed == generic && generic == sweep, || {
            format!("sample {i}: subsemigroup closed={closed} generic={generic} sweep={sweep}")
        })?;
        let closed = is_eq_bi_ideal(mu).unwrap().holds;
        let generic = is_alpha_beta_bi_ideal(mu, in_invq).unwrap().holds;
        let sweep = eq_bi_sweep(s, &m, d);
        ensure(closed == generic && generic == sweep, || {
            format!("sample {i}: bi-ideal closed={closed} generic={generic} sweep={sweep}")
        })?;
        let square = o_product(mu, mu).unwrap();
        let sq = grades(&square);
        for (nu, nv, label) in [(&square, &sq, "square"), (mu, &m, "self")] {
            ensure(
                subset_or_q(nu, mu).unwrap() == subset_or_q_sweep(nv, &m, d),
                || format!("sample {i}: subset_or_q({label}) disagrees"),
            )?;
        }
        ensure(
            subset_or_q(mu, &square).unwrap() == subset_or_q_sweep(&m, &sq, d),
            || format!("sample {i}: subset_or_q(mu, square) disagrees"),
        )?;
        ensure(sq == naive_product(s, &m, &m, q(1, 1)), || {
            format!("sample {i}: product oracle disagrees")
        })?;
    }
    Ok(format!("{} samples, three-way agreement", corpus.len()))
}

struct Gate {
    failures: Vec<u32>,
}

impl Gate {
    fn check(&mut self, id: u32, bound: Duration, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>())));
        let elapsed = start.elapsed();
        let (status, detail) = match result {
            Ok(d) if elapsed < bound => ("PASS", d),
            Ok(d) => ("FAIL", format!("over time bound; {d}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            self.failures.push(id);
        }
        println!(
            "criterion {id:>2}: {status}  tolerance={TOLERANCE}  time={:.2}s (bound {}s)  {detail}",
            elapsed.as_secs_f64(),
            bound.as_secs()
        );
    }
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let mut gate = Gate {
        failures: Vec::new(),
    };

    gate.check(1, secs(1), criterion_1);
    gate.check(2, secs(5), criterion_2);
    gate.check(3, secs(1), criterion_3);

    // Corpus construction is charged to criterion 4.
    let mut corpus = Vec::new();
    gate.check(4, secs(120), || {
        corpus = mixed_corpus(CORPUS_SEED, CORPUS_SIZE, 4, 2, GRID).map_err(|e| e.to_string())?;
        ensure(corpus.len() >= 1000, || "corpus too small".into())?;
        ensure(
            corpus
                .iter()
                .all(|m| m.structure().size() <= 4 && m.structure().gamma_count() <= 2),
            || "corpus exceeds n <= 4, k <= 2".into(),
        )?;
        criterion_4(&corpus)
    });
    gate.check(5, secs(120), || criterion_5(&corpus));

    let mut structures = Vec::new();
    gate.check(6, secs(120), || {
        structures = exhaustive_up_to(3, 1).map_err(|e| e.to_string())?;
        ensure(structures.len() == 122, || {
            format!("{} structures", structures.len())
        })?;
        criterion_6(&structures)
    });
    gate.check(7, secs(60), || criterion_7(&structures));
    gate.check(8, secs(300), || criterion_8(&structures));
    gate.check(9, secs(300), || criterion_9(&structures));
    gate.check(10, secs(300), || criterion_10(&structures));
    gate.check(11, secs(120), || criterion_11(&corpus));

    assert!(
        gate.failures.is_empty(),
        "failed criteria: {:?}",
        gate.failures
    );
}
