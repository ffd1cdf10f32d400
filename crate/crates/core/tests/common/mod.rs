//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's deciders or products.
#![allow(dead_code)]

use gamma_fuzzy::{FuzzySubset, GammaSemigroup};
use num_rational::Ratio;

pub type Q = Ratio<i64>;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn grades(mu: &FuzzySubset) -> Vec<Q> {
    mu.grades().iter().map(|g| g.ratio()).collect()
}

/// `{1/(2d), 2/(2d), ..., 1}`. For grades on the `d`-grid every breakpoint
/// `mu(x)`, `1 - mu(x)` and `1/2` lies on this half-grid, as does a point
/// strictly inside every cell between them.
pub fn half_grid(d: i64) -> Vec<Q> {
    (1..=2 * d).map(|j| q(j, 2 * d)).collect()
}

pub fn assert_on_grid(mu: &[Q], d: i64) {
    for g in mu {
        assert_eq!((g * d).fract(), q(0, 1), "grade {g} is off the 1/{d} grid");
    }
}

fn in_or_q(v: Q, t: Q) -> bool {
    v >= t || v + t > q(1, 1)
}

/// The `(in, in-or-q)` subsemigroup definition, swept over the half-grid.
pub fn eq_sub_sweep(s: &GammaSemigroup, mu: &[Q], d: i64) -> bool {
    assert_on_grid(mu, d);
    let ts = half_grid(d);
    let (n, k) = (s.size(), s.gamma_count());
    for x in 0..n {
        for y in 0..n {
            for g in 0..k {
                let p = mu[s.op(x, g, y)];
                for &t in &ts {
                    for &r in &ts {
                        if mu[x] >= t && mu[y] >= r && !in_or_q(p, t.min(r)) {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

/// Subsemigroup sweep plus the outer-position condition on `x g y d z`.
pub fn eq_bi_sweep(s: &GammaSemigroup, mu: &[Q], d: i64) -> bool {
    if !eq_sub_sweep(s, mu, d) {
        return false;
    }
    let ts = half_grid(d);
    let (n, k) = (s.size(), s.gamma_count());
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for g in 0..k {
                    for h in 0..k {
                        let p = mu[s.op(s.op(x, g, y), h, z)];
                        for &t in &ts {
                            for &r in &ts {
                                if mu[x] >= t && mu[z] >= r && !in_or_q(p, t.min(r)) {
                                    return false;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    true
}

/// `nu ⊆ ∨q mu`: every point of `nu` is in-or-q `mu`, swept over the half-grid.
pub fn subset_or_q_sweep(nu: &[Q], mu: &[Q], d: i64) -> bool {
    assert_on_grid(nu, d);
    assert_on_grid(mu, d);
    let ts = half_grid(d);
    nu.iter()
        .zip(mu)
        .all(|(&a, &b)| ts.iter().all(|&t| a < t || in_or_q(b, t)))
}

/// `(l ∘ m)(a)` with every min capped at `cap`; `0` without factorization.
#[allow(clippy::needless_range_loop)]
pub fn naive_product(s: &GammaSemigroup, l: &[Q], m: &[Q], cap: Q) -> Vec<Q> {
    let n = s.size();
    (0..n)
        .map(|a| {
            let mut best = q(0, 1);
            for y in 0..n {
                for z in 0..n {
                    for g in 0..s.gamma_count() {
                        if s.op(y, g, z) == a {
                            best = best.max(l[y].min(m[z]).min(cap));
                        }
                    }
                }
            }
            best
        })
        .collect()
}

pub fn capped(v: &[Q], cap: Q) -> Vec<Q> {
    v.iter().map(|&g| g.min(cap)).collect()
}

pub fn chi(n: usize, bits: u64) -> Vec<Q> {
    (0..n).map(|x| q((bits >> x & 1) as i64, 1)).collect()
}

/// `a = a alpha x beta a` for some `x`, `alpha`, `beta`.
pub fn naive_regular(s: &GammaSemigroup) -> bool {
    let (n, k) = (s.size(), s.gamma_count());
    (0..n)
        .all(|a| (0..n).any(|x| (0..k).any(|al| (0..k).any(|be| s.op(s.op(a, al, x), be, a) == a))))
}

/// `a = x alpha a beta a gamma y` for some `x`, `y` and gammas.
pub fn naive_intra_regular(s: &GammaSemigroup) -> bool {
    let (n, k) = (s.size(), s.gamma_count());
    (0..n).all(|a| {
        (0..n).any(|x| {
            (0..n).any(|y| {
                (0..k).any(|al| {
                    (0..k).any(|be| (0..k).any(|ga| s.op(s.op(s.op(x, al, a), be, a), ga, y) == a))
                })
            })
        })
    })
}

/// `A Γ B` as a bitmask.
pub fn naive_gamma_product(s: &GammaSemigroup, a: u64, b: u64) -> u64 {
    let n = s.size();
    let mut out = 0;
    for x in (0..n).filter(|x| a >> x & 1 == 1) {
        for y in (0..n).filter(|y| b >> y & 1 == 1) {
            for g in 0..s.gamma_count() {
                out |= 1 << s.op(x, g, y);
            }
        }
    }
    out
}

pub fn naive_is_subsemigroup(s: &GammaSemigroup, a: u64) -> bool {
    a != 0 && naive_gamma_product(s, a, a) & !a == 0
}

pub fn naive_is_bi_ideal(s: &GammaSemigroup, a: u64) -> bool {
    let full = (1u64 << s.size()) - 1;
    naive_is_subsemigroup(s, a)
        && naive_gamma_product(s, naive_gamma_product(s, a, full), a) & !a == 0
}
