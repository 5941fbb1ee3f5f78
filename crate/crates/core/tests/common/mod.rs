//! Independent oracles. Everything here works from the structure constants
//! alone; none of it calls the library's complexes, linear algebra or action.
#![allow(dead_code)]

use itertools::Itertools;
use schord::frobenius::{Element, FrobeniusAlgebra};
use schord::Q;

pub const P: u64 = 2_147_483_629;

fn to_p(x: &Q) -> u64 {
    x.mod_p(P).expect("denominator prime to P")
}

/// Rank mod `P` by plain row reduction.
pub fn rank_mod_p(mut m: Vec<Vec<u64>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, piv);
        let inv = pow(m[rank][c], P - 2);
        for x in m[rank].iter_mut() {
            *x = *x * inv % P;
        }
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[c] != 0 {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + P - f * y % P) % P;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    r
}

fn index(args: &[usize], b: usize, d: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * d + a) * d + b
}

/// The bar-complex differential `C^n → C^{n+1}` on all of `Hom(A^{⊗n}, A)`.
pub fn bar_differential(alg: &FrobeniusAlgebra, n: usize) -> Vec<Vec<u64>> {
    let d = alg.dim();
    let cols = d.pow(n as u32) * d;
    let mut rows = Vec::new();
    for a in (0..n + 1).map(|_| 0..d).multi_cartesian_product() {
        for b in 0..d {
            let mut row = vec![0u64; cols];
            let mut add = |args: &[usize], c: usize, x: Q| {
                let k = index(args, c, d);
                row[k] = (row[k] + to_p(&x)) % P;
            };
            for c in 0..d {
                add(&a[1..], c, alg.mu(a[0], c, b).clone());
            }
            for i in 0..n {
                for e in 0..d {
                    let mut args = a[..i].to_vec();
                    args.push(e);
                    args.extend_from_slice(&a[i + 2..]);
                    let s = if (i + 1) % 2 == 0 { Q::one() } else { -Q::one() };
                    add(&args, b, s * alg.mu(a[i], a[i + 1], e).clone());
                }
            }
            let s = if (n + 1) % 2 == 0 { Q::one() } else { -Q::one() };
            for c in 0..d {
                add(&a[..n], c, s.clone() * alg.mu(c, a[n], b).clone());
            }
            rows.push(row);
        }
    }
    rows
}

/// `dim HH^n(A, A)` from the unnormalized bar complex.
pub fn hh_dimension(alg: &FrobeniusAlgebra, n: usize) -> usize {
    let d = alg.dim();
    let cn = d.pow(n as u32) * d;
    let out = rank_mod_p(bar_differential(alg, n));
    let inc = if n == 0 { 0 } else { rank_mod_p(bar_differential(alg, n - 1)) };
    cn - out - inc
}

pub type Fun<'a> = &'a dyn Fn(&[usize], usize) -> Q;

fn elem(alg: &FrobeniusAlgebra, f: Fun, args: &[usize]) -> Element {
    Element((0..alg.dim()).map(|b| f(args, b)).collect())
}

fn basis(alg: &FrobeniusAlgebra, a: usize) -> Element {
    Element::basis(alg.dim(), a)
}

fn linear(alg: &FrobeniusAlgebra, f: Fun, args: &[usize], slot: usize, x: &Element) -> Element {
    let mut out = vec![Q::zero(); alg.dim()];
    for (c, coeff) in x.0.iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        let mut ys = args.to_vec();
        ys[slot] = c;
        for (b, o) in out.iter_mut().enumerate() {
            *o += &(coeff.clone() * f(&ys, b));
        }
    }
    Element(out)
}

fn sub(x: &Element, y: &Element) -> Element {
    Element(x.0.iter().zip(&y.0).map(|(a, b)| a.clone() - b.clone()).collect())
}

/// `(f⌣g)(a_1..a_{p+q})_b = Σ f(a_1..a_p)_c g(a_{p+1}..)_e μ(c, e, b)`.
pub fn cup(alg: &FrobeniusAlgebra, f: Fun, p: usize, g: Fun, args: &[usize], b: usize) -> Q {
    let x = elem(alg, f, &args[..p]);
    let y = elem(alg, g, &args[p..]);
    alg.multiply(&x, &y).0[b].clone()
}

/// The chain-map defect of the reversal on `f ∈ C^n`, at `(a_1..a_{n+1})`:
/// `ε_n[(a_1F − Fa_1) + Σ_j (−1)^j f(a_{n+1},…,[a_j,a_{j+1}],…,a_1) + (−1)^{n+1}(Ga_{n+1} − a_{n+1}G)]`.
pub fn reverse_defect(alg: &FrobeniusAlgebra, f: Fun, n: usize, a: &[usize]) -> Element {
    let eps = if (n * (n + 1) / 2) % 2 == 0 { Q::one() } else { -Q::one() };
    let rev: Vec<usize> = a.iter().rev().copied().collect();
    let big_f = elem(alg, f, &rev[..n]);
    let big_g = elem(alg, f, &rev[1..]);
    let a1 = basis(alg, a[0]);
    let last = basis(alg, a[n]);
    let mut total = sub(&alg.multiply(&a1, &big_f), &alg.multiply(&big_f, &a1));
    let edge = sub(&alg.multiply(&big_g, &last), &alg.multiply(&last, &big_g));
    let s_edge = if (n + 1) % 2 == 0 { Q::one() } else { -Q::one() };
    for j in 1..=n {
        let (x, y) = (basis(alg, a[j - 1]), basis(alg, a[j]));
        let comm = sub(&alg.multiply(&x, &y), &alg.multiply(&y, &x));
        // reversed list with the pair a_{j+1}, a_j collapsed to one slot
        let mut args: Vec<usize> = rev.clone();
        let at = n - j;
        args.remove(at + 1);
        let v = linear(alg, f, &args, at, &comm);
        let s = if j % 2 == 0 { Q::one() } else { -Q::one() };
        for (t, vv) in total.0.iter_mut().zip(&v.0) {
            *t += &(s.clone() * vv.clone());
        }
    }
    for (t, e) in total.0.iter_mut().zip(&edge.0) {
        *t += &(s_edge.clone() * e.clone());
    }
    Element(total.0.into_iter().map(|t| eps.clone() * t).collect())
}

/// Inversion count of a sequence of distinct keys.
pub fn inversions<T: Ord>(v: &[T]) -> usize {
    (0..v.len()).map(|i| (i + 1..v.len()).filter(|&j| v[i] > v[j]).count()).sum()
}
