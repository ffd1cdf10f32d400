mod common;

use std::sync::Arc;

use common::{eq_sub_sweep, grades, q, Q};
use gamma_fuzzy::search::{
    exhaustive_up_to, find_witness, fixture_by_id, generate_structures, random_fuzzy, Expr,
    GenerationMode, GeneratorConfig, SearchOutcome,
};
use gamma_fuzzy::GammaSemigroup;

/// Counts associative n×k×n cubes by plain enumeration of all tables.
fn brute_force_count(n: usize, k: usize) -> usize {
    let cells = n * k * n;
    let total = n.pow(cells as u32);
    let mut cube = vec![0usize; cells];
    let mut count = 0;
    for code in 0..total {
        let mut c = code;
        for v in cube.iter_mut() {
            *v = c % n;
            c /= n;
        }
        let op = |x: usize, g: usize, y: usize| cube[(x * k + g) * n + y];
        let assoc = (0..n).all(|x| {
            (0..k).all(|g| {
                (0..n).all(|y| {
                    (0..k).all(|h| (0..n).all(|z| op(op(x, g, y), h, z) == op(x, g, op(y, h, z))))
                })
            })
        });
        if assoc {
            count += 1;
        }
    }
    count
}

#[test]
fn exhaustive_counts() {
    let expected = [
        ((1, 1), 1),
        ((2, 1), 8),
        ((3, 1), 113),
        ((1, 2), 1),
        ((2, 2), 14),
        ((3, 2), 413),
    ];
    for ((n, k), want) in expected {
        let config = GeneratorConfig::new(n, k, 0, 1, 0);
        let got = generate_structures(&config, GenerationMode::Exhaustive).unwrap();
        assert_eq!(got.len(), want, "n={n} k={k}");
    }
    for (n, k) in [(2, 1), (3, 1), (2, 2)] {
        let config = GeneratorConfig::new(n, k, 0, 1, 0);
        let got = generate_structures(&config, GenerationMode::Exhaustive).unwrap();
        assert_eq!(got.len(), brute_force_count(n, k), "n={n} k={k}");
    }
    assert_eq!(exhaustive_up_to(3, 1).unwrap().len(), 1 + 8 + 113);
}

#[test]
fn exhaustive_order_is_lexicographic() {
    let config = GeneratorConfig::new(2, 1, 0, 1, 0);
    let cubes: Vec<Vec<usize>> = generate_structures(&config, GenerationMode::Exhaustive)
        .unwrap()
        .iter()
        .map(|s| s.cube().to_vec())
        .collect();
    let mut sorted = cubes.clone();
    sorted.sort();
    assert_eq!(cubes, sorted);
    assert_eq!(cubes[0], vec![0, 0, 0, 0]);
    assert_eq!(cubes[7], vec![1, 1, 1, 1]);
}

#[test]
fn seeded_structures() {
    let config = GeneratorConfig::new(3, 1, 42, 10, 5);
    let cubes: Vec<Vec<usize>> = generate_structures(&config, GenerationMode::Random)
        .unwrap()
        .iter()
        .map(|s| s.cube().to_vec())
        .collect();
    assert_eq!(
        cubes,
        vec![
            vec![2, 2, 0, 2, 2, 0, 0, 0, 2],
            vec![0, 0, 0, 1, 1, 1, 2, 2, 2],
            vec![0, 0, 2, 1, 1, 2, 2, 2, 2],
            vec![1, 2, 1, 2, 1, 2, 1, 2, 1],
            vec![2, 1, 1, 1, 1, 1, 1, 1, 1],
        ]
    );
    let again: Vec<Vec<usize>> = generate_structures(&config, GenerationMode::Random)
        .unwrap()
        .iter()
        .map(|s| s.cube().to_vec())
        .collect();
    assert_eq!(cubes, again);
}

#[test]
fn seeded_fuzzy_subsets() {
    let ex = fixture_by_id("ex3.4").unwrap();
    let config = GeneratorConfig::new(3, 1, 7, 10, 3);
    let got: Vec<Vec<String>> = random_fuzzy(&ex.structure, &config)
        .unwrap()
        .iter()
        .map(|m| m.grades().iter().map(|g| g.to_string()).collect())
        .collect();
    assert_eq!(
        got,
        vec![
            vec!["1/10", "1/5", "0/1"],
            vec!["3/5", "1/5", "9/10"],
            vec!["2/5", "1/2", "1/2"],
        ]
    );
}

#[test]
fn union_of_two_eq_subsemigroups_can_fail() {
    let structures = exhaustive_up_to(3, 1).unwrap();
    let want = Expr::parse("union-counterexample").unwrap();
    let SearchOutcome::Found(found) = find_witness(&structures, 4, &want).unwrap() else {
        panic!("expected a counterexample");
    };
    assert_eq!(found.structure_index, 17);
    assert_eq!(found.structure.cube(), &[0, 0, 0, 0, 1, 0, 0, 0, 2]);
    let mu = grades(&found.mu);
    let nu = grades(found.nu.as_ref().unwrap());
    assert_eq!(mu, vec![q(0, 1), q(0, 1), q(1, 4)]);
    assert_eq!(nu, vec![q(0, 1), q(1, 4), q(0, 1)]);

    let s = &found.structure;
    let union: Vec<Q> = mu.iter().zip(&nu).map(|(a, b)| *a.max(b)).collect();
    assert!(eq_sub_sweep(s, &mu, 4));
    assert!(eq_sub_sweep(s, &nu, 4));
    assert!(!eq_sub_sweep(s, &union, 4));
}

#[test]
fn union_failure_needs_three_elements() {
    let structures = exhaustive_up_to(2, 2).unwrap();
    let want = Expr::parse("union-counterexample").unwrap();
    assert!(matches!(
        find_witness(&structures, 4, &want).unwrap(),
        SearchOutcome::Exhausted { .. }
    ));
}

#[test]
fn fuzzy_subsemigroups_are_eq_subsemigroups_on_small_structures() {
    let structures = exhaustive_up_to(3, 1).unwrap();
    let want = Expr::parse("fuzzy_subsemigroup AND NOT eq_subsemigroup").unwrap();
    match find_witness(&structures, 4, &want).unwrap() {
        SearchOutcome::Exhausted {
            structures,
            candidates,
        } => {
            assert_eq!(structures, 122);
            // Nonzero grades on {0, 1/4, ..., 1}: 5^n - 1 per structure.
            assert_eq!(candidates, 4 + 8 * 24 + 113 * 124);
        }
        SearchOutcome::Found(f) => panic!("unexpected witness at {}", f.structure_index),
    }
}

#[test]
fn ex34_has_eq_subsemigroup_that_is_not_fuzzy_subsemigroup() {
    let ex = fixture_by_id("ex3.4").unwrap();
    let want = Expr::parse("eq_subsemigroup AND NOT fuzzy_subsemigroup").unwrap();
    let SearchOutcome::Found(found) =
        find_witness(std::slice::from_ref(&ex.structure), 10, &want).unwrap()
    else {
        panic!("expected a witness");
    };
    assert!(eq_sub_sweep(&ex.structure, &grades(&found.mu), 10));
}

#[test]
fn single_element_grid_two() {
    let s = Arc::new(GammaSemigroup::from_cube(1, 1, vec![0]).unwrap());
    let want = Expr::parse("NOT eq_subsemigroup").unwrap();
    // Grades 1/2 and 1 both give eq-subsemigroups.
    assert!(matches!(
        find_witness(std::slice::from_ref(&s), 2, &want).unwrap(),
        SearchOutcome::Exhausted {
            structures: 1,
            candidates: 2
        }
    ));
    let want = Expr::parse("eq_subsemigroup").unwrap();
    let SearchOutcome::Found(found) = find_witness(&[s], 2, &want).unwrap() else {
        panic!("expected a witness");
    };
    assert_eq!(grades(&found.mu), vec![q(1, 2)]);
}
