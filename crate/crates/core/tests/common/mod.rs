#![allow(dead_code)]

use nf_core::handlebody::{Handlebody, Letter, TwoHandle, Word};
use nf_core::legendrian::{FrontDiagram, LegendrianData, ZigZag};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A stabilised standard front with the given number of zig-zags.
pub fn random_front(rng: &mut impl Rng) -> FrontDiagram {
    let mut f = if rng.gen_bool(0.5) { FrontDiagram::unknot() } else { FrontDiagram::trefoil() };
    for _ in 0..rng.gen_range(0..4) {
        let dir = if rng.gen_bool(0.5) { ZigZag::Up } else { ZigZag::Down };
        f = f.stabilize(dir).expect("stabilising a closed front");
    }
    f
}

/// Up to 4 one-handles and 6 two-handles with random words, framings,
/// linking and Legendrian data. Handles running over no 1-handle sometimes
/// carry a front.
pub fn random_handlebody(rng: &mut impl Rng) -> Handlebody {
    let ones: Vec<String> = (0..rng.gen_range(0..=4)).map(|i| format!("a{i}")).collect();
    let twos: Vec<String> = (0..rng.gen_range(1..=6)).map(|i| format!("h{i}")).collect();
    let mut x = Handlebody { one_handles: ones.iter().cloned().collect(), ..Handlebody::default() };
    for name in &twos {
        let mut letters = Vec::new();
        if !ones.is_empty() {
            for _ in 0..rng.gen_range(0..=4) {
                letters.push(Letter::new(ones.choose(rng).unwrap().clone(), rng.gen_bool(0.5)));
            }
        }
        let attaching_word = Word::from_letters(letters);
        let mut h = TwoHandle { attaching_word, framing: rng.gen_range(-4..=4), ..TwoHandle::default() };
        if h.attaching_word.is_empty() && rng.gen_bool(0.5) {
            let f = random_front(rng);
            h.legendrian = Some(f.invariants().unwrap());
            h.front = Some(f);
        } else if rng.gen_bool(0.8) {
            let tb: i64 = rng.gen_range(-3..=3);
            let r: i64 = rng.gen_range(-2..=2) * 2 + (tb + 1).rem_euclid(2);
            h.legendrian = Some(LegendrianData { tb, r });
        }
        x.two_handles.insert(name.clone(), h);
    }
    for (i, a) in twos.iter().enumerate() {
        for b in &twos[i + 1..] {
            if rng.gen_bool(0.4) {
                let v = *[-2, -1, 1, 2].choose(rng).unwrap();
                x.set_linking(a, b, v);
            }
        }
    }
    x.validate().expect("generated diagram is valid");
    x
}

pub fn random_matrix(rng: &mut impl Rng, n: usize, bound: i64) -> Vec<Vec<i64>> {
    (0..n).map(|_| (0..n).map(|_| rng.gen_range(-bound..=bound)).collect()).collect()
}

/// Laplace expansion along the first row.
pub fn cofactor_det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut det = 0;
    for j in 0..n {
        if m[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i128>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| *v).collect()).collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        det += sign * m[0][j] * cofactor_det(&minor);
    }
    det
}

pub fn matmul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    (0..n).map(|i| (0..m).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect()).collect()
}

/// Log-family conditions evaluated directly, returning the ids of the ones
/// that fail: `(i)`, `(ii)` against each `(u·u, g(u))`, `(iii)` with
/// `g(S_{p_{n−1}})` from `genus`, `(iv)` and, for an even form with odd
/// divisor, `(v)`.
pub fn failing_log_conditions(
    ps: &[i64],
    divisor: i64,
    s_square: i64,
    complement: &[(String, i64, i64)],
    even_form: bool,
    genus: impl Fn(i64) -> i64,
) -> Vec<String> {
    let gcd = |mut a: i64, mut b: i64| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.abs()
    };
    let mut out = Vec::new();
    if ps.first() != Some(&1) {
        out.push("p1".to_string());
    }
    for n in 2..=ps.len() {
        let (prev, p) = (ps[n - 2], ps[n - 1]);
        if p <= prev {
            out.push(format!("i[n={n}]"));
        }
        if n == 2 {
            for (label, sq, g) in complement {
                if divisor * (p - 1) + sq <= 2 * g - 2 {
                    out.push(format!("ii[n=2,{label}]"));
                }
            }
        }
        if divisor * (p - 1) + s_square <= 2 * genus(prev) - 2 {
            out.push(format!("iii[n={n}]"));
        }
        if gcd(p, divisor) != 1 {
            out.push(format!("iv[n={n}]"));
        }
        if even_form && divisor % 2 == 1 && p % 2 == 0 {
            out.push(format!("v[n={n}]"));
        }
    }
    out
}

/// Least `p > prev` meeting every condition in [`failing_log_conditions`]
/// for position `n`, by plain upward scan.
pub fn scan_next_p(
    prefix: &[i64],
    divisor: i64,
    s_square: i64,
    complement: &[(String, i64, i64)],
    even_form: bool,
    genus: impl Fn(i64) -> i64 + Copy,
) -> i64 {
    let prev = *prefix.last().unwrap();
    (prev + 1..)
        .find(|&p| {
            let mut ps = prefix.to_vec();
            ps.push(p);
            failing_log_conditions(&ps, divisor, s_square, complement, even_form, genus).is_empty()
        })
        .unwrap()
}

/// Polynomial in `t` as coefficients from `t⁰` up.
pub type Poly = Vec<i128>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &Poly, b: &Poly, sign: i128) -> Poly {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += sign * y;
    }
    out
}

fn poly_det(m: &[Vec<Poly>]) -> Poly {
    if m.is_empty() {
        return vec![1];
    }
    let mut det = Vec::new();
    for j in 0..m.len() {
        let minor: Vec<Vec<Poly>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| v.clone()).collect()).collect();
        let term = poly_mul(&m[0][j], &poly_det(&minor));
        det = poly_add(&det, &term, if j % 2 == 0 { 1 } else { -1 });
    }
    det
}

/// `det(V − t·Vᵀ)`, shifted to be symmetric about `t⁰` and signed so that
/// the value at 1 is positive, as `(exponent, coefficient)` pairs.
pub fn alexander_oracle(v: &[Vec<i64>]) -> Vec<(i64, i64)> {
    let n = v.len();
    let m: Vec<Vec<Poly>> =
        (0..n).map(|i| (0..n).map(|j| vec![v[i][j] as i128, -(v[j][i] as i128)]).collect()).collect();
    let det = poly_det(&m);
    let low = det.iter().position(|c| *c != 0).unwrap() as i64;
    let high = det.iter().rposition(|c| *c != 0).unwrap() as i64;
    let centre = (low + high) / 2;
    let sign = if det.iter().sum::<i128>() < 0 { -1 } else { 1 };
    (low..=high).filter(|e| det[*e as usize] != 0).map(|e| (e - centre, (sign * det[e as usize]) as i64)).collect()
}
