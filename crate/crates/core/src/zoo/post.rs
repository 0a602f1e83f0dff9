use serde_json::Value;

use crate::error::{Error, Result};
use crate::kernel::setmaps;
use crate::kernel::{Capabilities, Carrier, Morphism, MorphismData, Rank, Side, Theory, TheoryId, Variance};

/// Post algebras of valence `v`, realized as the opposite of the category of
/// finite sets `Map(r, v)`.
///
/// A function `φ: r -> v` is the base-`v` numeral `Σ φ(i) v^i`. A morphism
/// `T_r -> T_s` is a table of length `v^s` with values below `v^r`.
#[derive(Debug)]
pub struct PostTheory {
    id: TheoryId,
    valence: usize,
}

/// Largest rank whose carrier `v^r` fits a table.
const MAX_POINTS: u128 = 1 << 26;

impl PostTheory {
    pub fn new(valence: usize) -> Result<Self> {
        Self::with_id(valence, format!("post:{valence}"))
    }

    /// Boolean algebras: valence two under their own name.
    pub fn boole() -> Self {
        Self::with_id(2, "boole".into()).expect("valence 2")
    }

    fn with_id(valence: usize, id: String) -> Result<Self> {
        if valence < 2 {
            return Err(Error::UnsupportedParameter(format!("post valence must be at least 2, got {valence}")));
        }
        Ok(PostTheory { id: id.into(), valence })
    }

    pub fn valence(&self) -> usize {
        self.valence
    }

    /// `v^r`, refusing carriers that cannot be tabulated.
    pub fn points(&self, r: Rank) -> Result<usize> {
        let p = (self.valence as u128).checked_pow(r as u32).filter(|&p| p <= MAX_POINTS);
        p.map(|p| p as usize).ok_or_else(|| Error::RankTooLarge {
            rank: r,
            domain: format!("{}^{r}", self.valence),
            cap: MAX_POINTS as usize,
        })
    }

    fn table(&self, src: Rank, dst: Rank, t: Vec<usize>) -> Morphism {
        Morphism::new(self.id.clone(), src, dst, MorphismData::Table(t))
    }

    /// The morphism induced by a set map `α: r -> s`, precomposition `φ ↦ φ∘α`.
    pub fn from_set_map(&self, alpha: &[usize], s: Rank) -> Result<Morphism> {
        let r = alpha.len();
        if alpha.iter().any(|&j| j >= s) {
            return Err(Error::InvalidMorphism(format!("{alpha:?} is not a map into {s}")));
        }
        let v = self.valence;
        let n = self.points(s)?;
        let table = (0..n)
            .map(|x| {
                let digits = digits(x, v, s);
                (0..r).rev().fold(0, |acc, i| acc * v + digits[alpha[i]])
            })
            .collect();
        Ok(self.table(r, s, table))
    }
}

/// Base-`v` digits of `x`, least significant first.
pub fn digits(mut x: usize, v: usize, len: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(x % v);
        x /= v;
    }
    out
}

impl Theory for PostTheory {
    fn id(&self) -> &TheoryId {
        &self.id
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::FINITE
    }

    fn check_data(&self, src: Rank, dst: Rank, data: &MorphismData) -> Result<()> {
        setmaps::check_data(self, src, dst, data)
    }

    fn decode_data(&self, value: &Value) -> Result<MorphismData> {
        setmaps::decode_table(value)
    }

    fn identity(&self, r: Rank) -> Result<Morphism> {
        Ok(self.table(r, r, (0..self.points(r)?).collect()))
    }

    fn raw_compose(&self, g: &Morphism, f: &Morphism) -> Morphism {
        let t = setmaps::compose_tables(Variance::Contravariant, g.table().expect("table"), f.table().expect("table"));
        self.table(f.src, g.dst, t)
    }

    fn injection(&self, r: Rank, s: Rank, side: Side) -> Result<Morphism> {
        let n = self.points(r + s)?;
        let low = self.points(r)?;
        Ok(match side {
            Side::Left => self.table(r, r + s, (0..n).map(|x| x % low).collect()),
            Side::Right => self.table(s, r + s, (0..n).map(|x| x / low).collect()),
        })
    }

    fn raw_copair(&self, f: &Morphism, g: &Morphism) -> Morphism {
        let scale = self.points(f.src).expect("carrier exists");
        let t = f
            .table()
            .expect("table")
            .iter()
            .zip(g.table().expect("table"))
            .map(|(&a, &b)| a + scale * b)
            .collect();
        self.table(f.src + g.src, f.dst, t)
    }

    fn variance(&self) -> Option<Variance> {
        Some(Variance::Contravariant)
    }

    fn carrier(&self, r: Rank) -> Result<Carrier> {
        Ok(Carrier::full(self.points(r)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::TheoryHandle;
    use crate::perm::Perm;

    fn post(v: usize) -> TheoryHandle {
        TheoryHandle::new(PostTheory::new(v).unwrap())
    }

    fn m(t: &TheoryHandle, src: Rank, dst: Rank, table: &[usize]) -> Morphism {
        t.morphism(src, dst, MorphismData::Table(table.to_vec())).unwrap()
    }

    #[test]
    fn valence_one_is_rejected() {
        assert!(matches!(PostTheory::new(1), Err(Error::UnsupportedParameter(_))));
    }

    #[test]
    fn contravariant_composition_on_hom_1_1() {
        let t = post(2);
        let homs: Vec<Morphism> = t.hom(1, 1, None).unwrap().collect();
        assert_eq!(homs.len(), 4);
        for f in &homs {
            for g in &homs {
                let gf = t.compose(g, f).unwrap();
                let (ft, gt) = (f.table().unwrap(), g.table().unwrap());
                let expected: Vec<usize> = gt.iter().map(|&x| ft[x]).collect();
                assert_eq!(gf.table().unwrap(), &expected[..]);
            }
        }
    }

    #[test]
    fn injections_by_hand() {
        let t = post(2);
        // Functions 2 -> 2 are 0b(φ1 φ0); the left injection reads φ0.
        assert_eq!(t.injection(1, 1, Side::Left).unwrap(), m(&t, 1, 2, &[0, 1, 0, 1]));
        assert_eq!(t.injection(1, 1, Side::Right).unwrap(), m(&t, 1, 2, &[0, 0, 1, 1]));
    }

    #[test]
    fn swap_fixes_constants() {
        let t = post(2);
        let swap = t.swap(1).unwrap();
        assert_eq!(swap.underlying, m(&t, 2, 2, &[0, 2, 1, 3]));
        assert_eq!(t.compose(&swap.underlying, &swap.underlying).unwrap(), t.identity(2).unwrap());
    }

    #[test]
    fn stabilization_is_a_block_sum() {
        for v in [2usize, 3] {
            let t = post(v);
            let real = t.aut_realization(1, 100).unwrap();
            for g in &real.generators {
                let u = t.from_perm(1, g).unwrap();
                let st = t.stabilize(&u, 1).unwrap();
                let p = t.to_perm(&st).unwrap();
                let block = (1..v).fold(g.clone(), |acc, _| acc.direct_sum(g));
                assert_eq!(p, block);
            }
        }
    }

    #[test]
    fn set_maps_embed_functorially() {
        let p = PostTheory::new(2).unwrap();
        // Transposition of two generators acts on Map(2,2) by swapping 1 and 2.
        let sigma = p.from_set_map(&[1, 0], 2).unwrap();
        assert_eq!(sigma.table().unwrap(), &[0, 2, 1, 3]);
        let t = TheoryHandle::new(p);
        let u = t.automorphism(&sigma).unwrap();
        assert_eq!(t.to_perm(&u).unwrap(), Perm::from_cycles(4, &[&[1, 2]]).unwrap());
    }
}
