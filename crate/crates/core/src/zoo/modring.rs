use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Pow;
use rand::RngCore;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::kernel::setmaps::Odometer;
use crate::kernel::{Capabilities, Morphism, MorphismData, Rank, Side, Theory, TheoryId};
use crate::perm::Perm;

/// Free modules over `Z/m`; a morphism `T_r -> T_s` is an `s × r` matrix.
#[derive(Debug)]
pub struct ModRingTheory {
    id: TheoryId,
    modulus: u64,
}

const MAX_POINTS: u128 = 1 << 24;

impl ModRingTheory {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::UnsupportedParameter("modulus must be at least 1".into()));
        }
        Ok(ModRingTheory {
            id: format!("mod:{modulus}").into(),
            modulus,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Number of vectors in `(Z/m)^r`.
    pub fn points(&self, r: Rank) -> Result<usize> {
        (self.modulus as u128)
            .checked_pow(r as u32)
            .filter(|&p| p <= MAX_POINTS)
            .map(|p| p as usize)
            .ok_or_else(|| Error::RankTooLarge {
                rank: r,
                domain: format!("{}^{r}", self.modulus),
                cap: MAX_POINTS as usize,
            })
    }

    pub fn matrix(&self, src: Rank, dst: Rank, rows: Vec<Vec<u64>>) -> Morphism {
        Morphism::new(self.id.clone(), src, dst, MorphismData::Matrix(rows))
    }

    fn rows(m: &Morphism) -> &[Vec<u64>] {
        match &m.data {
            MorphismData::Matrix(a) => a,
            _ => unreachable!("checked by the handle"),
        }
    }

    fn from_entries(&self, src: Rank, dst: Rank, entries: &[usize]) -> Morphism {
        let rows = (0..dst)
            .map(|i| (0..src).map(|j| entries[i * src + j] as u64).collect())
            .collect();
        self.matrix(src, dst, rows)
    }

    fn units(&self) -> Vec<u64> {
        (1..self.modulus).filter(|u| u.gcd(&self.modulus) == 1).collect()
    }

    /// Vector with index `Σ v_i m^i`.
    pub fn vector(&self, mut x: usize, r: Rank) -> Vec<u64> {
        let m = self.modulus as usize;
        (0..r)
            .map(|_| {
                let d = x % m;
                x /= m;
                d as u64
            })
            .collect()
    }

    pub fn vector_index(&self, v: &[u64]) -> usize {
        let m = self.modulus as usize;
        v.iter().rev().fold(0, |acc, &d| acc * m + d as usize)
    }
}

impl Theory for ModRingTheory {
    fn id(&self) -> &TheoryId {
        &self.id
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::FINITE
    }

    fn check_data(&self, src: Rank, dst: Rank, data: &MorphismData) -> Result<()> {
        let MorphismData::Matrix(a) = data else {
            return Err(Error::InvalidMorphism(format!("{} expects a matrix", self.id)));
        };
        if a.len() != dst || a.iter().any(|row| row.len() != src) {
            return Err(Error::InvalidMorphism(format!("expected a {dst}×{src} matrix")));
        }
        if a.iter().flatten().any(|&x| x >= self.modulus) {
            return Err(Error::InvalidMorphism(format!("entries must be reduced mod {}", self.modulus)));
        }
        Ok(())
    }

    fn decode_data(&self, value: &Value) -> Result<MorphismData> {
        let a: Vec<Vec<u64>> = serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidMorphism(format!("expected a matrix: {e}")))?;
        Ok(MorphismData::Matrix(a))
    }

    fn identity(&self, r: Rank) -> Result<Morphism> {
        let one = 1 % self.modulus;
        let rows = (0..r)
            .map(|i| (0..r).map(|j| if i == j { one } else { 0 }).collect())
            .collect();
        Ok(self.matrix(r, r, rows))
    }

    fn raw_compose(&self, g: &Morphism, f: &Morphism) -> Morphism {
        let (a, b) = (Self::rows(g), Self::rows(f));
        let m = self.modulus as u128;
        let rows = a
            .iter()
            .map(|row| {
                (0..f.src)
                    .map(|j| {
                        let s: u128 = row.iter().zip(b).map(|(&x, brow)| x as u128 * brow[j] as u128).sum();
                        (s % m) as u64
                    })
                    .collect()
            })
            .collect();
        self.matrix(f.src, g.dst, rows)
    }

    fn injection(&self, r: Rank, s: Rank, side: Side) -> Result<Morphism> {
        let one = 1 % self.modulus;
        let (src, offset) = match side {
            Side::Left => (r, 0),
            Side::Right => (s, r),
        };
        let rows = (0..r + s)
            .map(|i| (0..src).map(|j| if i == j + offset { one } else { 0 }).collect())
            .collect();
        Ok(self.matrix(src, r + s, rows))
    }

    fn raw_copair(&self, f: &Morphism, g: &Morphism) -> Morphism {
        let rows = Self::rows(f)
            .iter()
            .zip(Self::rows(g))
            .map(|(a, b)| a.iter().chain(b).copied().collect())
            .collect();
        self.matrix(f.src + g.src, f.dst, rows)
    }

    fn hom_size(&self, r: Rank, s: Rank, _bound: Option<usize>) -> Result<BigUint> {
        Ok(Pow::pow(BigUint::from(self.modulus), r * s))
    }

    fn hom_enumerate<'a>(
        &'a self,
        r: Rank,
        s: Rank,
        _bound: Option<usize>,
    ) -> Result<Box<dyn Iterator<Item = Morphism> + Send + 'a>> {
        let mut odo = Odometer::new(r * s, self.modulus as usize);
        Ok(Box::new(std::iter::from_fn(move || {
            odo.next().map(|e| self.from_entries(r, s, &e))
        })))
    }

    fn random_hom(&self, r: Rank, s: Rank, _bound: Option<usize>, rng: &mut dyn RngCore) -> Result<Morphism> {
        let e: Vec<usize> = (0..r * s).map(|_| (rng.next_u64() % self.modulus) as usize).collect();
        Ok(self.from_entries(r, s, &e))
    }

    fn aut_domain(&self, r: Rank) -> Result<BigUint> {
        Ok(Pow::pow(BigUint::from(self.modulus), r))
    }

    /// Elementary transvections and unit scalings of the first coordinate.
    fn aut_generators(&self, r: Rank) -> Result<Vec<Perm>> {
        let mut gens = Vec::new();
        if self.modulus == 1 {
            return Ok(gens);
        }
        for i in 0..r {
            for j in (0..r).filter(|&j| j != i) {
                let mut e = self.identity(r)?;
                if let MorphismData::Matrix(a) = &mut e.data {
                    a[i][j] = 1;
                }
                gens.push(self.to_perm(&e)?);
            }
        }
        if r > 0 {
            for u in self.units().into_iter().filter(|&u| u != 1) {
                let mut d = self.identity(r)?;
                if let MorphismData::Matrix(a) = &mut d.data {
                    a[0][0] = u;
                }
                gens.push(self.to_perm(&d)?);
            }
        }
        Ok(gens)
    }

    /// Action on `(Z/m)^r`, vectors numbered `Σ v_i m^i`.
    fn to_perm(&self, u: &Morphism) -> Result<Perm> {
        let r = u.src;
        let n = self.points(r)?;
        let a = Self::rows(u);
        let m = self.modulus;
        let images = (0..n)
            .map(|x| {
                let v = self.vector(x, r);
                let w: Vec<u64> = a
                    .iter()
                    .map(|row| row.iter().zip(&v).map(|(&p, &q)| p * q % m).sum::<u64>() % m)
                    .collect();
                self.vector_index(&w)
            })
            .collect();
        Perm::from_images(images).map_err(|_| Error::NotAutomorphism(format!("{u:?} is singular")))
    }

    fn from_perm(&self, r: Rank, p: &Perm) -> Result<Morphism> {
        let n = self.points(r)?;
        if p.degree() != n {
            return Err(Error::DomainMismatch(format!("permutation of {} points, expected {n}", p.degree())));
        }
        let m = self.modulus as usize;
        let columns: Vec<Vec<u64>> = (0..r).map(|j| self.vector(p.apply(m.pow(j as u32) % n), r)).collect();
        let rows = (0..r).map(|i| (0..r).map(|j| columns[j][i]).collect()).collect();
        let u = self.matrix(r, r, rows);
        if self.to_perm(&u)? != *p {
            return Err(Error::NotAutomorphism(format!("{p:?} is not linear")));
        }
        Ok(u)
    }

    fn iso_invariant(&self, r: Rank) -> Option<(&'static str, BigUint)> {
        Some(("module cardinality", Pow::pow(BigUint::from(self.modulus), r)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::TheoryHandle;
    use crate::perm::PermGroup;

    fn gl_order(m: u64, r: u32) -> u64 {
        // Only used for prime m.
        (0..r).map(|i| m.pow(r) - m.pow(i)).product()
    }

    #[test]
    fn general_linear_orders() {
        for (m, r) in [(2u64, 1u32), (2, 2), (2, 3), (3, 2), (5, 1)] {
            let t = TheoryHandle::new(ModRingTheory::new(m).unwrap());
            let real = t.aut_realization(r as usize, 1 << 20).unwrap();
            let g = PermGroup::new(real.domain, real.generators).unwrap();
            assert_eq!(g.order_u64(), Some(gl_order(m, r)), "m={m} r={r}");
        }
        let t = TheoryHandle::new(ModRingTheory::new(4).unwrap());
        let real = t.aut_realization(1, 100).unwrap();
        assert_eq!(PermGroup::new(real.domain, real.generators).unwrap().order_u64(), Some(2));
    }

    #[test]
    fn trivial_ring_has_singleton_homs() {
        let t = TheoryHandle::new(ModRingTheory::new(1).unwrap());
        for r in 0..=3 {
            for s in 0..=3 {
                assert_eq!(t.hom(r, s, None).unwrap().count(), 1);
            }
            assert_eq!(t.aut_realization(r, 10).unwrap().domain, 1);
        }
    }

    #[test]
    fn block_matrices() {
        let t = TheoryHandle::new(ModRingTheory::new(3).unwrap());
        let a = t.morphism(1, 1, MorphismData::Matrix(vec![vec![2]])).unwrap();
        let b = t.morphism(1, 1, MorphismData::Matrix(vec![vec![1]])).unwrap();
        assert_eq!(t.copair(&a, &b).unwrap().data, MorphismData::Matrix(vec![vec![2, 1]]));
        assert_eq!(
            t.sum(&a, &b).unwrap().data,
            MorphismData::Matrix(vec![vec![2, 0], vec![0, 1]])
        );
        assert_eq!(
            t.swap(1).unwrap().underlying.data,
            MorphismData::Matrix(vec![vec![0, 1], vec![1, 0]])
        );
        assert_eq!(
            t.injection(1, 1, Side::Right).unwrap().data,
            MorphismData::Matrix(vec![vec![0], vec![1]])
        );
    }

    #[test]
    fn perm_round_trip() {
        let t = TheoryHandle::new(ModRingTheory::new(3).unwrap());
        let a = t.morphism(2, 2, MorphismData::Matrix(vec![vec![1, 2], vec![0, 2]])).unwrap();
        let u = t.automorphism(&a).unwrap();
        let p = t.to_perm(&u).unwrap();
        assert_eq!(t.from_perm(2, &p).unwrap().underlying, a);
    }
}
