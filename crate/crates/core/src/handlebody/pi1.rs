use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{Handlebody, Letter, Word};
use crate::intlat::{cokernel, IntMatrix};

/// Rewrite budget used when none is given explicitly.
pub const DEFAULT_TIETZE_BUDGET: usize = 10_000;

/// `NF_TIETZE_BUDGET` if set to a number, else [`DEFAULT_TIETZE_BUDGET`].
pub fn default_tietze_budget() -> usize {
    std::env::var("NF_TIETZE_BUDGET")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_TIETZE_BUDGET)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pi1Verdict {
    Trivial,
    NontrivialAbelianization,
    Unknown,
}

pub fn pi1_presentation(x: &Handlebody) -> Presentation {
    Presentation {
        generators: x.one_handles.iter().cloned().collect(),
        relators: x.two_handles.values().map(|h| h.attaching_word.clone()).collect(),
    }
}

fn abelianization_trivial(p: &Presentation) -> bool {
    let mut m = IntMatrix::zeros(p.generators.len(), p.relators.len());
    for (j, r) in p.relators.iter().enumerate() {
        for (g, e) in r.abelianization() {
            if let Some(i) = p.generators.iter().position(|x| *x == g) {
                m.set(i, j, BigInt::from(e));
            }
        }
    }
    cokernel(&m).is_trivial()
}

/// Tietze simplification: free and cyclic reduction, merging of pure power
/// relators, and elimination of generators occurring once in some relator.
/// Each pass and each substituted letter costs one step of `budget`.
pub fn simplify_presentation(p: &Presentation, budget: usize) -> Pi1Verdict {
    if !abelianization_trivial(p) {
        return Pi1Verdict::NontrivialAbelianization;
    }
    let mut gens: BTreeSet<String> = p.generators.iter().cloned().collect();
    let mut rels: Vec<Vec<Letter>> = p.relators.iter().map(|w| w.letters().to_vec()).collect();
    let mut steps = 0usize;

    loop {
        rels = rels.into_iter().map(cyclic_reduce).filter(|r| !r.is_empty()).collect();
        rels.sort();
        rels.dedup();
        if gens.is_empty() {
            return Pi1Verdict::Trivial;
        }
        steps += 1;
        if steps > budget {
            return Pi1Verdict::Unknown;
        }
        if merge_powers(&mut gens, &mut rels) {
            continue;
        }
        match eliminate_once(&mut gens, &mut rels) {
            Some(cost) => steps += cost,
            None => break,
        }
    }
    if gens.is_empty() {
        Pi1Verdict::Trivial
    } else {
        Pi1Verdict::Unknown
    }
}

fn cyclic_reduce(r: Vec<Letter>) -> Vec<Letter> {
    let mut w = Word::from_letters(r).letters().to_vec();
    while w.len() >= 2 {
        let (first, last) = (&w[0], &w[w.len() - 1]);
        if first.generator == last.generator && first.inverse != last.inverse {
            w.pop();
            w.remove(0);
        } else {
            break;
        }
    }
    w
}

/// `g^a = 1` and `g^b = 1` together are `g^gcd(a,b) = 1`; `g = 1` kills `g`.
fn merge_powers(gens: &mut BTreeSet<String>, rels: &mut Vec<Vec<Letter>>) -> bool {
    for g in gens.clone() {
        let powers: Vec<usize> = rels
            .iter()
            .enumerate()
            .filter(|(_, r)| r.iter().all(|l| l.generator == g))
            .map(|(i, _)| i)
            .collect();
        if powers.is_empty() {
            continue;
        }
        let d = powers.iter().fold(0i64, |acc, &i| acc.gcd(&(rels[i].len() as i64)));
        if d == 1 {
            gens.remove(&g);
            for r in rels.iter_mut() {
                r.retain(|l| l.generator != g);
            }
            return true;
        }
        if powers.len() > 1 {
            for &i in powers.iter().rev() {
                rels.remove(i);
            }
            rels.push(Word::power(&g, d).letters().to_vec());
            return true;
        }
    }
    false
}

/// Solves a relator `g^ε w` for `g` and substitutes it everywhere. Returns
/// the number of letters written, or `None` when no relator qualifies.
fn eliminate_once(gens: &mut BTreeSet<String>, rels: &mut Vec<Vec<Letter>>) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    for (ri, r) in rels.iter().enumerate() {
        for (pos, l) in r.iter().enumerate() {
            if r.iter().filter(|m| m.generator == l.generator).count() == 1
                && best.is_none_or(|(bi, _)| r.len() < rels[bi].len())
            {
                best = Some((ri, pos));
            }
        }
    }
    let (ri, pos) = best?;
    let r = rels.remove(ri);
    let letter = r[pos].clone();
    // rotate to g^ε · rest, so g^ε = rest⁻¹
    let rest: Vec<Letter> = r[pos + 1..].iter().chain(&r[..pos]).cloned().collect();
    let rest = Word::from_letters(rest);
    let value = if letter.inverse { rest } else { rest.inverse() };
    let value_inv = value.inverse();
    let mut cost = 0;
    for other in rels.iter_mut() {
        if !other.iter().any(|l| l.generator == letter.generator) {
            continue;
        }
        let mut out = Vec::new();
        for l in other.drain(..) {
            if l.generator == letter.generator {
                let sub = if l.inverse { &value_inv } else { &value };
                cost += sub.len();
                out.extend(sub.letters().iter().cloned());
            } else {
                out.push(l);
            }
        }
        *other = Word::from_letters(out).letters().to_vec();
    }
    gens.remove(&letter.generator);
    Some(cost)
}
