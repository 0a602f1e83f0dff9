//! Free theories whose morphisms are tuples of terms in normal form.

use num_bigint::BigUint;
use num_traits::Pow;
use rand::RngCore;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::kernel::setmaps::{self, Odometer};
use crate::kernel::{Capabilities, Morphism, MorphismData, Rank, Side, Theory, TheoryHandle, TheoryId, Tree};
use crate::perm::Perm;

pub const MONOID_DEFAULT_BOUND: usize = 3;
pub const MAGMA_DEFAULT_BOUND: usize = 2;

/// Free monoids: generator images are words, composition is substitution.
#[derive(Debug)]
pub struct MonoidTermTheory {
    id: TheoryId,
}

impl MonoidTermTheory {
    pub fn new() -> Self {
        MonoidTermTheory { id: "monoid".into() }
    }

    /// Words over `s` letters of length at most `bound`, shortest first.
    pub fn words(s: usize, bound: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        let mut layer = vec![vec![]];
        for _ in 0..bound {
            let next: Vec<Vec<usize>> = layer
                .iter()
                .flat_map(|w: &Vec<usize>| {
                    (0..s).map(move |x| {
                        let mut w = w.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    fn words_of(m: &Morphism) -> &[Vec<usize>] {
        match &m.data {
            MorphismData::Words(w) => w,
            _ => unreachable!("checked by the handle"),
        }
    }

    fn morphism(&self, src: Rank, dst: Rank, w: Vec<Vec<usize>>) -> Morphism {
        Morphism::new(self.id.clone(), src, dst, MorphismData::Words(w))
    }
}

impl Default for MonoidTermTheory {
    fn default() -> Self {
        MonoidTermTheory::new()
    }
}

fn word_count(s: usize, bound: usize) -> BigUint {
    (0..=bound).map(|k| Pow::pow(BigUint::from(s), k)).sum()
}

impl Theory for MonoidTermTheory {
    fn id(&self) -> &TheoryId {
        &self.id
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::BOUNDED
    }

    fn check_data(&self, src: Rank, dst: Rank, data: &MorphismData) -> Result<()> {
        let MorphismData::Words(w) = data else {
            return Err(Error::InvalidMorphism("monoid morphisms are lists of words".into()));
        };
        if w.len() != src {
            return Err(Error::InvalidMorphism(format!("{} words for {src} generators", w.len())));
        }
        if w.iter().flatten().any(|&x| x >= dst) {
            return Err(Error::InvalidMorphism(format!("letter out of range for {dst} generators")));
        }
        Ok(())
    }

    fn decode_data(&self, value: &Value) -> Result<MorphismData> {
        let w: Vec<Vec<usize>> = serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidMorphism(format!("expected a list of words: {e}")))?;
        Ok(MorphismData::Words(w))
    }

    fn identity(&self, r: Rank) -> Result<Morphism> {
        Ok(self.morphism(r, r, (0..r).map(|i| vec![i]).collect()))
    }

    fn raw_compose(&self, g: &Morphism, f: &Morphism) -> Morphism {
        let gw = Self::words_of(g);
        let w = Self::words_of(f)
            .iter()
            .map(|word| word.iter().flat_map(|&x| gw[x].iter().copied()).collect())
            .collect();
        self.morphism(f.src, g.dst, w)
    }

    fn injection(&self, r: Rank, s: Rank, side: Side) -> Result<Morphism> {
        Ok(match side {
            Side::Left => self.morphism(r, r + s, (0..r).map(|i| vec![i]).collect()),
            Side::Right => self.morphism(s, r + s, (r..r + s).map(|i| vec![i]).collect()),
        })
    }

    fn raw_copair(&self, f: &Morphism, g: &Morphism) -> Morphism {
        let mut w = Self::words_of(f).to_vec();
        w.extend_from_slice(Self::words_of(g));
        self.morphism(f.src + g.src, f.dst, w)
    }

    fn default_bound(&self) -> Option<usize> {
        Some(MONOID_DEFAULT_BOUND)
    }

    fn hom_size(&self, r: Rank, s: Rank, bound: Option<usize>) -> Result<BigUint> {
        Ok(Pow::pow(word_count(s, bound.unwrap_or(MONOID_DEFAULT_BOUND)), r))
    }

    fn hom_enumerate<'a>(
        &'a self,
        r: Rank,
        s: Rank,
        bound: Option<usize>,
    ) -> Result<Box<dyn Iterator<Item = Morphism> + Send + 'a>> {
        let words = Self::words(s, bound.unwrap_or(MONOID_DEFAULT_BOUND));
        let mut odo = Odometer::new(r, words.len());
        Ok(Box::new(std::iter::from_fn(move || {
            let d = odo.next()?;
            Some(self.morphism(r, s, d.iter().map(|&i| words[i].clone()).collect()))
        })))
    }

    fn random_hom(&self, r: Rank, s: Rank, bound: Option<usize>, rng: &mut dyn RngCore) -> Result<Morphism> {
        let words = Self::words(s, bound.unwrap_or(MONOID_DEFAULT_BOUND));
        let w = (0..r)
            .map(|_| words[(rng.next_u64() % words.len() as u64) as usize].clone())
            .collect();
        Ok(self.morphism(r, s, w))
    }

    fn aut_domain(&self, r: Rank) -> Result<BigUint> {
        Ok(BigUint::from(r))
    }

    fn aut_generators(&self, r: Rank) -> Result<Vec<Perm>> {
        Ok(setmaps::symmetric_generators(r))
    }

    fn to_perm(&self, u: &Morphism) -> Result<Perm> {
        let images = Self::words_of(u)
            .iter()
            .map(|w| match w[..] {
                [x] => Ok(x),
                _ => Err(Error::NotAutomorphism(format!("{u:?} does not permute the basis"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Perm::from_images(images).map_err(|_| Error::NotAutomorphism(format!("{u:?} does not permute the basis")))
    }

    fn from_perm(&self, r: Rank, p: &Perm) -> Result<Morphism> {
        if p.degree() != r {
            return Err(Error::DomainMismatch(format!("permutation of {} points, expected {r}", p.degree())));
        }
        Ok(self.morphism(r, r, p.images().iter().map(|&j| vec![j]).collect()))
    }

    fn iso_invariant(&self, r: Rank) -> Option<(&'static str, BigUint)> {
        Some(("basis size", BigUint::from(r)))
    }
}

/// The free theory `T_[a]` on one `a`-ary operation; terms are full `a`-ary
/// trees with generator-labelled leaves.
#[derive(Debug)]
pub struct MagmaTermTheory {
    id: TheoryId,
    arity: usize,
}

impl MagmaTermTheory {
    pub fn new(arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::UnsupportedParameter("magma arity must be at least 1".into()));
        }
        Ok(MagmaTermTheory {
            id: format!("magma:{arity}").into(),
            arity,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Trees over `s` generators of height at most `bound`.
    pub fn trees(&self, s: usize, bound: usize) -> Vec<Tree> {
        let leaves: Vec<Tree> = (0..s).map(Tree::Leaf).collect();
        if bound == 0 {
            return vec![];
        }
        let mut all = leaves.clone();
        for _ in 1..bound {
            let mut next = leaves.clone();
            let mut odo = Odometer::new(self.arity, all.len());
            while let Some(d) = odo.next() {
                next.push(Tree::Node(d.iter().map(|&i| all[i].clone()).collect()));
            }
            all = next;
        }
        all
    }

    fn tree_count(&self, s: usize, bound: usize) -> BigUint {
        if bound == 0 {
            return BigUint::from(0u32);
        }
        let mut n = BigUint::from(s);
        for _ in 1..bound {
            n = BigUint::from(s) + Pow::pow(n, self.arity);
        }
        n
    }

    fn well_formed(&self, t: &Tree, s: usize) -> bool {
        match t {
            Tree::Leaf(x) => *x < s,
            Tree::Node(c) => c.len() == self.arity && c.iter().all(|t| self.well_formed(t, s)),
        }
    }

    fn trees_of(m: &Morphism) -> &[Tree] {
        match &m.data {
            MorphismData::Trees(t) => t,
            _ => unreachable!("checked by the handle"),
        }
    }

    fn morphism(&self, src: Rank, dst: Rank, t: Vec<Tree>) -> Morphism {
        Morphism::new(self.id.clone(), src, dst, MorphismData::Trees(t))
    }
}

fn substitute(t: &Tree, images: &[Tree]) -> Tree {
    match t {
        Tree::Leaf(x) => images[*x].clone(),
        Tree::Node(c) => Tree::Node(c.iter().map(|t| substitute(t, images)).collect()),
    }
}

impl Theory for MagmaTermTheory {
    fn id(&self) -> &TheoryId {
        &self.id
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::BOUNDED
    }

    fn check_data(&self, src: Rank, dst: Rank, data: &MorphismData) -> Result<()> {
        let MorphismData::Trees(t) = data else {
            return Err(Error::InvalidMorphism(format!("{} morphisms are lists of trees", self.id)));
        };
        if t.len() != src {
            return Err(Error::InvalidMorphism(format!("{} trees for {src} generators", t.len())));
        }
        match t.iter().find(|t| !self.well_formed(t, dst)) {
            Some(bad) => Err(Error::InvalidMorphism(format!(
                "{bad:?} is not a full {}-ary tree over {dst} generators",
                self.arity
            ))),
            None => Ok(()),
        }
    }

    fn decode_data(&self, value: &Value) -> Result<MorphismData> {
        let t: Vec<Tree> = serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidMorphism(format!("expected a list of trees: {e}")))?;
        Ok(MorphismData::Trees(t))
    }

    fn identity(&self, r: Rank) -> Result<Morphism> {
        Ok(self.morphism(r, r, (0..r).map(Tree::Leaf).collect()))
    }

    fn raw_compose(&self, g: &Morphism, f: &Morphism) -> Morphism {
        let images = Self::trees_of(g);
        let t = Self::trees_of(f).iter().map(|t| substitute(t, images)).collect();
        self.morphism(f.src, g.dst, t)
    }

    fn injection(&self, r: Rank, s: Rank, side: Side) -> Result<Morphism> {
        Ok(match side {
            Side::Left => self.morphism(r, r + s, (0..r).map(Tree::Leaf).collect()),
            Side::Right => self.morphism(s, r + s, (r..r + s).map(Tree::Leaf).collect()),
        })
    }

    fn raw_copair(&self, f: &Morphism, g: &Morphism) -> Morphism {
        let mut t = Self::trees_of(f).to_vec();
        t.extend_from_slice(Self::trees_of(g));
        self.morphism(f.src + g.src, f.dst, t)
    }

    fn default_bound(&self) -> Option<usize> {
        Some(MAGMA_DEFAULT_BOUND)
    }

    fn hom_size(&self, r: Rank, s: Rank, bound: Option<usize>) -> Result<BigUint> {
        Ok(Pow::pow(self.tree_count(s, bound.unwrap_or(MAGMA_DEFAULT_BOUND)), r))
    }

    fn hom_enumerate<'a>(
        &'a self,
        r: Rank,
        s: Rank,
        bound: Option<usize>,
    ) -> Result<Box<dyn Iterator<Item = Morphism> + Send + 'a>> {
        let trees = self.trees(s, bound.unwrap_or(MAGMA_DEFAULT_BOUND));
        let mut odo = Odometer::new(r, trees.len());
        Ok(Box::new(std::iter::from_fn(move || {
            let d = odo.next()?;
            Some(self.morphism(r, s, d.iter().map(|&i| trees[i].clone()).collect()))
        })))
    }

    fn random_hom(&self, r: Rank, s: Rank, bound: Option<usize>, rng: &mut dyn RngCore) -> Result<Morphism> {
        let trees = self.trees(s, bound.unwrap_or(MAGMA_DEFAULT_BOUND));
        if trees.is_empty() && r > 0 {
            return Err(Error::InvalidMorphism(format!("hom({r},{s}) is empty")));
        }
        let t = (0..r)
            .map(|_| trees[(rng.next_u64() % trees.len() as u64) as usize].clone())
            .collect();
        Ok(self.morphism(r, s, t))
    }

    fn aut_domain(&self, r: Rank) -> Result<BigUint> {
        Ok(BigUint::from(r))
    }

    fn aut_generators(&self, r: Rank) -> Result<Vec<Perm>> {
        Ok(setmaps::symmetric_generators(r))
    }

    fn to_perm(&self, u: &Morphism) -> Result<Perm> {
        let images = Self::trees_of(u)
            .iter()
            .map(|t| match t {
                Tree::Leaf(x) => Ok(*x),
                _ => Err(Error::NotAutomorphism(format!("{u:?} does not permute the basis"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Perm::from_images(images).map_err(|_| Error::NotAutomorphism(format!("{u:?} does not permute the basis")))
    }

    fn from_perm(&self, r: Rank, p: &Perm) -> Result<Morphism> {
        if p.degree() != r {
            return Err(Error::DomainMismatch(format!("permutation of {} points, expected {r}", p.degree())));
        }
        Ok(self.morphism(r, r, p.images().iter().map(|&j| Tree::Leaf(j)).collect()))
    }

    fn iso_invariant(&self, r: Rank) -> Option<(&'static str, BigUint)> {
        Some(("basis size", BigUint::from(r)))
    }
}

/// Automorphisms of `T_r` found among the bounded hom-set by pairing mutual
/// inverses. Only as strong as the bound.
pub fn bounded_automorphisms(t: &TheoryHandle, r: Rank, bound: usize, cutoff: u64) -> Result<Vec<Morphism>> {
    let homs = t.hom_vec(r, r, Some(bound), cutoff)?;
    let id = t.identity(r)?;
    let mut found = Vec::new();
    for f in &homs {
        for g in &homs {
            if t.compose(g, f)? == id && t.compose(f, g)? == id {
                found.push(f.clone());
                break;
            }
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_letter_words_up_to_three() {
        let t = TheoryHandle::new(MonoidTermTheory::new());
        let homs: Vec<Morphism> = t.hom(1, 1, Some(3)).unwrap().collect();
        let words: Vec<Vec<usize>> = homs
            .iter()
            .map(|m| match &m.data {
                MorphismData::Words(w) => w[0].clone(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(words, vec![vec![], vec![0], vec![0, 0], vec![0, 0, 0]]);
    }

    #[test]
    fn substitution_composes() {
        let t = TheoryHandle::new(MonoidTermTheory::new());
        let f = t.morphism(1, 2, MorphismData::Words(vec![vec![0, 1, 0]])).unwrap();
        let g = t.morphism(2, 1, MorphismData::Words(vec![vec![0, 0], vec![]])).unwrap();
        assert_eq!(t.compose(&g, &f).unwrap().data, MorphismData::Words(vec![vec![0, 0, 0, 0]]));
    }

    #[test]
    fn monoid_automorphisms_permute_the_basis() {
        let t = TheoryHandle::new(MonoidTermTheory::new());
        for (r, expected) in [(0usize, 1usize), (1, 1), (2, 2), (3, 6)] {
            let bound = if r == 3 { 1 } else { 2 };
            assert_eq!(bounded_automorphisms(&t, r, bound, 1 << 20).unwrap().len(), expected);
        }
    }

    #[test]
    fn magma_tree_counts() {
        let m = MagmaTermTheory::new(2).unwrap();
        assert_eq!(m.trees(2, 2).len(), 6);
        assert_eq!(m.tree_count(2, 3), BigUint::from(38u32));
        assert_eq!(m.trees(2, 3).len(), 38);
        let t = TheoryHandle::new(m);
        assert_eq!(bounded_automorphisms(&t, 2, 2, 1 << 20).unwrap().len(), 2);
        let bad = Tree::Node(vec![Tree::Leaf(0)]);
        assert!(t.morphism(1, 1, MorphismData::Trees(vec![bad])).is_err());
        let node = Tree::Node(vec![Tree::Leaf(0), Tree::Leaf(0)]);
        assert_eq!(node.height(), 2);
    }
}
