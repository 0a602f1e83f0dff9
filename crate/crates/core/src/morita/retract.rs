use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::Value;

use super::Idempotent;
use crate::error::{Error, Result};
use crate::kernel::setmaps::{self, Carrier};
use crate::kernel::{Morphism, MorphismData, Rank, TheoryHandle, Variance};

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum PseudoInverse {
    /// `q ∘ u_k ∘ p = id(T_1)`.
    Witness { k: Rank, p: Value, q: Value },
    NotFoundUpTo { k_max: Rank },
}

impl PseudoInverse {
    pub fn witness_rank(&self) -> Option<Rank> {
        match self {
            PseudoInverse::Witness { k, .. } => Some(*k),
            PseudoInverse::NotFoundUpTo { .. } => None,
        }
    }
}

/// Least `k <= k_max` such that the identity of `T_1` factors through `u_k`.
pub fn pseudo_invertible(u: &Idempotent, k_max: Rank, cutoff: u64) -> Result<PseudoInverse> {
    let t = u.theory();
    let id = t.identity(1)?;
    for k in 1..=k_max {
        let uk = u.power(k)?;
        let found = match t.theory().variance() {
            Some(v) => factor_through_sets(t, v, &uk, &id, cutoff)?,
            None => factor_by_search(t, &uk, &id, cutoff)?,
        };
        if let Some((p, q)) = found {
            debug_assert_eq!(t.compose_all(&[&q, &uk, &p])?, id);
            return Ok(PseudoInverse::Witness {
                k,
                p: p.to_json(),
                q: q.to_json(),
            });
        }
    }
    Ok(PseudoInverse::NotFoundUpTo { k_max })
}

/// For set-map theories the composite is the identity exactly when the leg
/// mapping `carrier(1)` into `carrier(k)` stays injective after `u_k`; the
/// other leg is then a left inverse.
fn factor_through_sets(
    t: &TheoryHandle,
    variance: Variance,
    uk: &Morphism,
    id: &Morphism,
    cutoff: u64,
) -> Result<Option<(Morphism, Morphism)>> {
    let k = uk.src;
    let (c1, ck) = (t.theory().carrier(1)?, t.theory().carrier(k)?);
    let ut = uk.table()?;
    // Legs whose table maps carrier(1) into carrier(k).
    let (legs_src, legs_dst) = match variance {
        Variance::Covariant => (1, k),
        Variance::Contravariant => (k, 1),
    };
    let size = t.hom_size(legs_src, legs_dst, None)?;
    if size > BigUint::from(cutoff) {
        return Err(Error::cutoff(format!("{} hom({legs_src},{legs_dst})", t.id()), size, cutoff));
    }
    for leg in t.hom(legs_src, legs_dst, None)? {
        let lt = leg.table()?;
        let through: Vec<usize> = c1.image.iter().map(|&x| ut[lt[x]]).collect();
        let mut back = vec![usize::MAX; ck.size];
        let mut injective = true;
        for (&x, &y) in c1.image.iter().zip(&through) {
            if back[y] != usize::MAX {
                injective = false;
                break;
            }
            back[y] = x;
        }
        if !injective {
            continue;
        }
        let other = left_inverse(&ck, &c1, &back);
        let other = match variance {
            Variance::Covariant => t.morphism(k, 1, MorphismData::Table(other))?,
            Variance::Contravariant => t.morphism(1, k, MorphismData::Table(other))?,
        };
        let (p, q) = match variance {
            Variance::Covariant => (leg, other),
            Variance::Contravariant => (other, leg),
        };
        if t.compose_all(&[&q, uk, &p])? == *id {
            return Ok(Some((p, q)));
        }
    }
    Ok(None)
}

/// Table on `ck` sending the marked points back and everything else to the
/// first image point of `c1`, factored through the frame of `ck`.
fn left_inverse(ck: &Carrier, c1: &Carrier, back: &[usize]) -> Vec<usize> {
    let default = c1.image.first().copied().unwrap_or(0);
    (0..ck.size)
        .map(|y| {
            let y = ck.project(y);
            if back[y] != usize::MAX {
                back[y]
            } else {
                default
            }
        })
        .collect()
}

fn factor_by_search(t: &TheoryHandle, uk: &Morphism, id: &Morphism, cutoff: u64) -> Result<Option<(Morphism, Morphism)>> {
    let k = uk.src;
    let bound = t.theory().default_bound();
    let ps = t.hom_vec(1, k, bound, cutoff)?;
    let qs = t.hom_vec(k, 1, bound, cutoff)?;
    if (ps.len() as u64).saturating_mul(qs.len() as u64) > cutoff {
        return Err(Error::cutoff("pseudo-inverse pairs", ps.len() as u64 * qs.len() as u64, cutoff));
    }
    for p in &ps {
        let up = t.compose(uk, p)?;
        for q in &qs {
            if t.compose(q, &up)? == *id {
                return Ok(Some((p.clone(), q.clone())));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct FingerprintClass {
    pub rank: Rank,
    pub class_invariant: u64,
    pub class_size: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FingerprintMode {
    /// Every idempotent enumerated and paired with its class representative.
    Exhaustive,
    /// Class sizes from the idempotent count formula.
    Counted,
    /// Classes found by searching splittings in the hom-sets.
    Searched,
}

#[derive(Clone, Debug, Serialize)]
pub struct RetractFingerprint {
    pub theory: String,
    pub max_rank: Rank,
    pub mode: FingerprintMode,
    /// `"image-cardinality"` or `"class-index"`.
    pub invariant_kind: &'static str,
    pub classes: Vec<FingerprintClass>,
    /// Distinct class invariants across all ranks.
    pub class_invariants: Vec<u64>,
    pub witnesses_checked: u64,
    pub equivalence_verified: bool,
}

impl RetractFingerprint {
    /// Class-for-class agreement.
    pub fn matches(&self, other: &RetractFingerprint) -> bool {
        self.invariant_kind == other.invariant_kind && self.classes == other.classes
    }

    /// First rank at which the two fingerprints differ.
    pub fn first_mismatch(&self, other: &RetractFingerprint) -> Option<Rank> {
        let max = self.max_rank.max(other.max_rank);
        (0..=max).find(|&r| {
            let a: Vec<_> = self.classes.iter().filter(|c| c.rank == r).collect();
            let b: Vec<_> = other.classes.iter().filter(|c| c.rank == r).collect();
            a != b
        })
    }
}

/// Classify idempotents of `T_r`, `r <= max_rank`, up to `e ≈ e'` iff
/// `e = g∘f` and `e' = f∘g` for some `f`, `g`.
pub fn retract_fingerprint(t: &TheoryHandle, max_rank: Rank, cutoff: u64) -> Result<RetractFingerprint> {
    match t.theory().variance() {
        Some(_) => fingerprint_sets(t, max_rank, cutoff, None),
        None => fingerprint_search(t, max_rank, cutoff),
    }
}

/// Like [`retract_fingerprint`], stopping after the first rank at which the
/// result departs from `reference`.
pub fn retract_fingerprint_against(
    t: &TheoryHandle,
    max_rank: Rank,
    cutoff: u64,
    reference: &RetractFingerprint,
) -> Result<RetractFingerprint> {
    match t.theory().variance() {
        Some(_) => fingerprint_sets(t, max_rank, cutoff, Some(reference)),
        None => fingerprint_search(t, max_rank, cutoff),
    }
}

struct Rep {
    rank: Rank,
    table: Vec<usize>,
    image: Vec<usize>,
}

/// Set-map theories: idempotents split through their images, so the class is
/// the image cardinality. Each member is paired with its class representative
/// through explicit `f`, `g` built from a bijection of images.
fn fingerprint_sets(
    t: &TheoryHandle,
    max_rank: Rank,
    cutoff: u64,
    reference: Option<&RetractFingerprint>,
) -> Result<RetractFingerprint> {
    let mut classes = Vec::new();
    let mut reps: BTreeMap<usize, Rep> = BTreeMap::new();
    let mut mode = FingerprintMode::Exhaustive;
    let mut checked = 0u64;
    let mut verified = true;
    for r in 0..=max_rank {
        let c = t.theory().carrier(r)?;
        let n = c.image.len();
        let total = setmaps::idempotent_count(n);
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        if total <= BigUint::from(cutoff) {
            let idems = t
                .theory()
                .idempotents(r)
                .ok_or_else(|| Error::EnumerationUnavailable(t.id().to_string()))??;
            for e in idems {
                let table = e.table()?.to_vec();
                let image: Vec<usize> = c.image.iter().copied().filter(|&x| table[x] == x).collect();
                let k = image.len();
                *counts.entry(k).or_default() += 1;
                match reps.get(&k) {
                    None => {
                        verified &= verify_splitting(t, r, &table, &image, r, &table, &image)?;
                        reps.insert(k, Rep { rank: r, table, image });
                    }
                    Some(rep) => {
                        verified &= verify_splitting(t, rep.rank, &rep.table, &rep.image, r, &table, &image)?;
                    }
                }
                checked += 1;
            }
        } else {
            mode = FingerprintMode::Counted;
            for k in 0..=n {
                let size = class_count(n, k);
                if size > 0 {
                    counts.insert(k, size);
                }
            }
        }
        for (k, size) in counts {
            classes.push(FingerprintClass {
                rank: r,
                class_invariant: k as u64,
                class_size: size,
            });
        }
        if let Some(reference) = reference {
            let mine: Vec<_> = classes.iter().filter(|c| c.rank == r).collect();
            let theirs: Vec<_> = reference.classes.iter().filter(|c| c.rank == r).collect();
            if mine != theirs {
                return Ok(finish(t, r, mode, "image-cardinality", classes, checked, verified));
            }
        }
    }
    Ok(finish(t, max_rank, mode, "image-cardinality", classes, checked, verified))
}

fn finish(
    t: &TheoryHandle,
    max_rank: Rank,
    mode: FingerprintMode,
    kind: &'static str,
    classes: Vec<FingerprintClass>,
    checked: u64,
    verified: bool,
) -> RetractFingerprint {
    let mut invariants: Vec<u64> = classes.iter().map(|c| c.class_invariant).collect();
    invariants.sort_unstable();
    invariants.dedup();
    RetractFingerprint {
        theory: t.id().to_string(),
        max_rank,
        mode,
        invariant_kind: kind,
        classes,
        class_invariants: invariants,
        witnesses_checked: checked,
        equivalence_verified: verified,
    }
}

/// `C(n,k) k^(n-k)`: idempotents of an `n`-set with a `k`-point image.
fn class_count(n: usize, k: usize) -> u64 {
    let binom = (0..k).fold(BigUint::from(1u32), |acc, i| acc * BigUint::from(n - i) / BigUint::from(i + 1));
    let size = if n == k {
        binom
    } else {
        binom * num_traits::Pow::pow(BigUint::from(k), n - k)
    };
    size.to_u64().unwrap_or(u64::MAX)
}

/// Build `f: T_a -> T_b`, `g: T_b -> T_a` from a bijection between the images
/// and check `g∘f = e` and `f∘g = e'`.
fn verify_splitting(
    t: &TheoryHandle,
    a: Rank,
    e: &[usize],
    ie: &[usize],
    b: Rank,
    e2: &[usize],
    ie2: &[usize],
) -> Result<bool> {
    if ie.len() != ie2.len() {
        return Ok(false);
    }
    let beta = |x: usize| ie2[ie.binary_search(&x).expect("image point")];
    let beta_inv = |y: usize| ie[ie2.binary_search(&y).expect("image point")];
    // Tables on the carriers: F = β∘e, G = β⁻¹∘e'.
    let big_f: Vec<usize> = e.iter().map(|&x| beta(x)).collect();
    let big_g: Vec<usize> = e2.iter().map(|&y| beta_inv(y)).collect();
    let covariant = t.theory().variance() == Some(Variance::Covariant);
    let (f, g) = if covariant {
        (
            t.morphism(a, b, MorphismData::Table(big_f))?,
            t.morphism(b, a, MorphismData::Table(big_g))?,
        )
    } else {
        (
            t.morphism(b, a, MorphismData::Table(big_f))?,
            t.morphism(a, b, MorphismData::Table(big_g))?,
        )
    };
    let me = t.morphism(a, a, MorphismData::Table(e.to_vec()))?;
    let me2 = t.morphism(b, b, MorphismData::Table(e2.to_vec()))?;
    let (gf, fg) = (t.compose(&g, &f)?, t.compose(&f, &g)?);
    Ok(if covariant {
        gf == me && fg == me2
    } else {
        fg == me && gf == me2
    })
}

/// Other theories: idempotents filtered from `hom(r,r)` and merged by
/// exhaustive search for splittings.
fn fingerprint_search(t: &TheoryHandle, max_rank: Rank, cutoff: u64) -> Result<RetractFingerprint> {
    let bound = t.theory().default_bound();
    let mut idems: Vec<Morphism> = Vec::new();
    for r in 0..=max_rank {
        for e in t.hom_vec(r, r, bound, cutoff)? {
            if t.compose(&e, &e)? == e {
                idems.push(e);
            }
        }
    }
    let mut class_of: Vec<usize> = Vec::with_capacity(idems.len());
    let mut reps: Vec<usize> = Vec::new();
    let mut checked = 0u64;
    for (i, e) in idems.iter().enumerate() {
        let mut found = None;
        for (c, &j) in reps.iter().enumerate() {
            checked += 1;
            if splits(t, &idems[j], e, bound, cutoff)? {
                found = Some(c);
                break;
            }
        }
        let c = found.unwrap_or_else(|| {
            reps.push(i);
            reps.len() - 1
        });
        class_of.push(c);
    }
    let mut counts: BTreeMap<(Rank, usize), u64> = BTreeMap::new();
    for (e, &c) in idems.iter().zip(&class_of) {
        *counts.entry((e.src, c)).or_default() += 1;
    }
    let classes = counts
        .into_iter()
        .map(|((rank, c), size)| FingerprintClass {
            rank,
            class_invariant: c as u64,
            class_size: size,
        })
        .collect();
    Ok(finish(t, max_rank, FingerprintMode::Searched, "class-index", classes, checked, true))
}

/// Whether `g∘f = e` and `f∘g = e2` for some `f: T_a -> T_b`, `g: T_b -> T_a`.
fn splits(t: &TheoryHandle, e: &Morphism, e2: &Morphism, bound: Option<usize>, cutoff: u64) -> Result<bool> {
    let (a, b) = (e.src, e2.src);
    let fs = t.hom_vec(a, b, bound, cutoff)?;
    let gs = t.hom_vec(b, a, bound, cutoff)?;
    if (fs.len() as u64).saturating_mul(gs.len() as u64) > cutoff {
        return Err(Error::cutoff("splitting search", fs.len() as u64 * gs.len() as u64, cutoff));
    }
    for f in &fs {
        for g in &gs {
            if t.compose(g, f)? == *e && t.compose(f, g)? == *e2 {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
