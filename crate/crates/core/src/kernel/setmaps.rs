//! Shared machinery for theories whose morphisms are maps between finite sets.
//!
//! Each rank carries a finite set together with an idempotent "frame" whose
//! fixed points form the image. A morphism is a map between images, stored as
//! a table on the whole carrier that factors through the frame.

use num_bigint::BigUint;
use num_traits::{One, Pow};
use rand::RngCore;

use super::{Morphism, MorphismData, Rank, Theory};
use crate::error::{Error, Result};
use crate::perm::Perm;

/// Direction of the function table of a morphism `T_r -> T_s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    /// Table on `carrier(r)` with values in `carrier(s)`; `(g∘f).table = g.table ∘ f.table`.
    Covariant,
    /// Table on `carrier(s)` with values in `carrier(r)`; `(g∘f).table = f.table ∘ g.table`.
    Contravariant,
}

/// The finite set attached to a rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Carrier {
    pub size: usize,
    /// Idempotent self-map; `None` means the identity.
    pub frame: Option<Vec<usize>>,
    /// Fixed points of the frame, ascending.
    pub image: Vec<usize>,
    /// Position of each image point in `image`, `usize::MAX` elsewhere.
    pub index: Vec<usize>,
}

impl Carrier {
    pub fn full(size: usize) -> Self {
        Carrier {
            size,
            frame: None,
            image: (0..size).collect(),
            index: (0..size).collect(),
        }
    }

    /// Carrier framed by an idempotent table.
    pub fn framed(frame: Vec<usize>) -> Self {
        let size = frame.len();
        let image: Vec<usize> = (0..size).filter(|&x| frame[x] == x).collect();
        let mut index = vec![usize::MAX; size];
        for (i, &x) in image.iter().enumerate() {
            index[x] = i;
        }
        Carrier {
            size,
            frame: Some(frame),
            image,
            index,
        }
    }

    #[inline]
    pub fn project(&self, x: usize) -> usize {
        match &self.frame {
            Some(f) => f[x],
            None => x,
        }
    }

    /// Extend a map `image(self) -> points` (indexed by image position) to a table on the carrier.
    pub fn extend(&self, on_image: &[usize]) -> Vec<usize> {
        (0..self.size)
            .map(|x| on_image[self.index[self.project(x)]])
            .collect()
    }

    pub fn is_fixed(&self, x: usize) -> bool {
        x < self.size && self.project(x) == x
    }
}

/// Table of `g ∘ f`.
pub fn compose_tables(variance: Variance, g: &[usize], f: &[usize]) -> Vec<usize> {
    match variance {
        Variance::Covariant => f.iter().map(|&x| g[x]).collect(),
        Variance::Contravariant => g.iter().map(|&x| f[x]).collect(),
    }
}

/// Decode a JSON array of indices.
pub fn decode_table(value: &serde_json::Value) -> Result<MorphismData> {
    let table: Vec<usize> = serde_json::from_value(value.clone())
        .map_err(|e| Error::InvalidMorphism(format!("expected a function table: {e}")))?;
    Ok(MorphismData::Table(table))
}

/// Validate table data for a morphism `T_r -> T_s` of a set-like theory.
pub fn check_data<T: Theory + ?Sized>(t: &T, r: Rank, s: Rank, data: &MorphismData) -> Result<()> {
    let table = data
        .table()
        .ok_or_else(|| Error::InvalidMorphism(format!("{} expects a function table", t.id())))?;
    let (dom, cod) = table_sides(t, r, s)?;
    check_table(&dom, &cod, table)
}

/// Carriers of the table's domain and codomain for a morphism `T_r -> T_s`.
pub fn table_sides<T: Theory + ?Sized>(t: &T, r: Rank, s: Rank) -> Result<(Carrier, Carrier)> {
    let (a, b) = (t.carrier(r)?, t.carrier(s)?);
    Ok(match t.variance() {
        Some(Variance::Contravariant) => (b, a),
        _ => (a, b),
    })
}

/// Check that `table` is a valid morphism table between the given carriers.
pub fn check_table(dom: &Carrier, cod: &Carrier, table: &[usize]) -> Result<()> {
    if table.len() != dom.size {
        return Err(Error::InvalidMorphism(format!(
            "table of length {} on a carrier of {} points",
            table.len(),
            dom.size
        )));
    }
    for (x, &y) in table.iter().enumerate() {
        if !cod.is_fixed(y) {
            return Err(Error::InvalidMorphism(format!(
                "value {y} at {x} is outside the codomain image"
            )));
        }
        if table[dom.project(x)] != y {
            return Err(Error::InvalidMorphism(format!("table does not factor through the frame at {x}")));
        }
    }
    Ok(())
}

pub fn hom_size<T: Theory + ?Sized>(t: &T, r: Rank, s: Rank) -> Result<BigUint> {
    let (dom, cod) = table_sides(t, r, s)?;
    Ok(Pow::pow(BigUint::from(cod.image.len()), dom.image.len()))
}

/// Counter over `len` digits in base `base`, first digit fastest.
pub(crate) struct Odometer {
    digits: Vec<usize>,
    base: usize,
    done: bool,
}

impl Odometer {
    pub(crate) fn new(len: usize, base: usize) -> Self {
        Odometer {
            digits: vec![0; len],
            base,
            done: base == 0 && len > 0,
        }
    }

    pub(crate) fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.digits.clone();
        let mut i = 0;
        loop {
            if i == self.digits.len() {
                self.done = true;
                break;
            }
            self.digits[i] += 1;
            if self.digits[i] < self.base {
                break;
            }
            self.digits[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

/// All morphisms `T_r -> T_s`, first image point varying fastest.
pub fn enumerate<'a, T: Theory + ?Sized>(
    t: &'a T,
    r: Rank,
    s: Rank,
) -> Result<Box<dyn Iterator<Item = Morphism> + Send + 'a>> {
    let (dom, cod) = table_sides(t, r, s)?;
    let id = t.id().clone();
    let mut odo = Odometer::new(dom.image.len(), cod.image.len());
    Ok(Box::new(std::iter::from_fn(move || {
        let digits = odo.next()?;
        let on_image: Vec<usize> = digits.iter().map(|&d| cod.image[d]).collect();
        Some(Morphism::new(
            id.clone(),
            r,
            s,
            MorphismData::Table(dom.extend(&on_image)),
        ))
    })))
}

pub fn random<T: Theory + ?Sized>(t: &T, r: Rank, s: Rank, rng: &mut dyn RngCore) -> Result<Morphism> {
    let (dom, cod) = table_sides(t, r, s)?;
    if cod.image.is_empty() && !dom.image.is_empty() {
        return Err(Error::InvalidMorphism(format!("hom({r},{s}) is empty")));
    }
    let on_image: Vec<usize> = dom
        .image
        .iter()
        .map(|_| cod.image[(rng.next_u64() % cod.image.len() as u64) as usize])
        .collect();
    Ok(Morphism::new(
        t.id().clone(),
        r,
        s,
        MorphismData::Table(dom.extend(&on_image)),
    ))
}

/// Realization of an automorphism on the image of its carrier.
pub fn to_perm<T: Theory + ?Sized>(t: &T, u: &Morphism) -> Result<Perm> {
    let c = t.carrier(u.src)?;
    let table = u.table()?;
    let images: Vec<usize> = c.image.iter().map(|&x| c.index[table[x]]).collect();
    let p = Perm::from_images(images)
        .map_err(|_| Error::NotAutomorphism(format!("{u:?} is not a bijection on its carrier")))?;
    Ok(match t.variance() {
        Some(Variance::Contravariant) => p.inverse(),
        _ => p,
    })
}

pub fn from_perm<T: Theory + ?Sized>(t: &T, r: Rank, p: &Perm) -> Result<Morphism> {
    let c = t.carrier(r)?;
    if p.degree() != c.image.len() {
        return Err(Error::DomainMismatch(format!(
            "permutation of {} points for a carrier image of {}",
            p.degree(),
            c.image.len()
        )));
    }
    let q = match t.variance() {
        Some(Variance::Contravariant) => p.inverse(),
        _ => p.clone(),
    };
    let on_image: Vec<usize> = (0..c.image.len()).map(|i| c.image[q.apply(i)]).collect();
    Ok(Morphism::new(
        t.id().clone(),
        r,
        r,
        MorphismData::Table(c.extend(&on_image)),
    ))
}

/// Number of idempotent self-maps of an `n`-point set: `Σ_k C(n,k) k^(n-k)`.
pub fn idempotent_count(n: usize) -> BigUint {
    let mut total = BigUint::from(0u32);
    let mut binom = BigUint::one();
    for k in 0..=n {
        if k > 0 {
            binom = binom * BigUint::from(n - k + 1) / BigUint::from(k);
        }
        let n_k = n - k;
        let term: BigUint = if n_k == 0 {
            BigUint::one()
        } else {
            Pow::pow(BigUint::from(k), n_k)
        };
        total += &binom * term;
    }
    total
}

/// Idempotent endomorphisms of `T_r`: a fixed subset of the image together
/// with a retraction of the remaining image points onto it.
pub fn idempotents<'a, T: Theory + ?Sized>(
    t: &'a T,
    r: Rank,
) -> Result<Box<dyn Iterator<Item = Morphism> + Send + 'a>> {
    let c = t.carrier(r)?;
    let n = c.image.len();
    if n >= usize::BITS as usize - 1 {
        return Err(Error::cutoff("idempotent enumeration", n, 62));
    }
    let id = t.id().clone();
    let masks = (0u64..(1u64 << n)).filter(move |&m| m != 0 || n == 0);
    Ok(Box::new(masks.flat_map(move |mask| {
        let fixed: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let free: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 0).collect();
        let mut odo = Odometer::new(free.len(), fixed.len());
        let c = c.clone();
        let id = id.clone();
        std::iter::from_fn(move || {
            let digits = odo.next()?;
            let mut on_image: Vec<usize> = (0..n).map(|i| c.image[i]).collect();
            for (&i, &d) in free.iter().zip(&digits) {
                on_image[i] = c.image[fixed[d]];
            }
            Some(Morphism::new(
                id.clone(),
                r,
                r,
                MorphismData::Table(c.extend(&on_image)),
            ))
        })
    })))
}

/// A transposition and a long cycle, generating `Sym(n)`.
pub fn symmetric_generators(n: usize) -> Vec<Perm> {
    let mut gens = Vec::new();
    if n >= 2 {
        let mut t: Vec<usize> = (0..n).collect();
        t.swap(0, 1);
        gens.push(Perm::from_images_unchecked(t));
        if n > 2 {
            gens.push(Perm::from_images_unchecked((0..n).map(|i| (i + 1) % n).collect()));
        }
    }
    gens
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idempotent_counts() {
        let expected = [1u64, 1, 3, 10, 41, 196];
        for (n, &e) in expected.iter().enumerate() {
            assert_eq!(idempotent_count(n), BigUint::from(e));
        }
        assert_eq!(idempotent_count(9), BigUint::from(293_608u64));
    }

    #[test]
    fn odometer_counts() {
        let mut o = Odometer::new(3, 2);
        let mut k = 0;
        while o.next().is_some() {
            k += 1;
        }
        assert_eq!(k, 8);
        let mut o = Odometer::new(0, 0);
        assert_eq!(o.next(), Some(vec![]));
        assert_eq!(o.next(), None);
        let mut o = Odometer::new(2, 0);
        assert_eq!(o.next(), None);
    }

    #[test]
    fn framed_extension() {
        let c = Carrier::framed(vec![0, 0, 2, 2]);
        assert_eq!(c.image, vec![0, 2]);
        assert_eq!(c.extend(&[5, 7]), vec![5, 5, 7, 7]);
    }
}
