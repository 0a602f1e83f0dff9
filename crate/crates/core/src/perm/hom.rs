use num_bigint::BigUint;
use serde::Serialize;

use super::{Perm, PermGroup};
use crate::error::{Error, Result};

/// A homomorphism between permutation groups given on generators.
///
/// Verification is exact at every size: the assignment extends to a
/// homomorphism iff the subgroup `⟨(s_i, φ(s_i))⟩` of `source × target`
/// projects isomorphically onto `source`, i.e. has the same order.
#[derive(Clone, Debug)]
pub struct GroupHom {
    source: PermGroup,
    target: PermGroup,
    images: Vec<Perm>,
    graph: PermGroup,
}

#[derive(Serialize)]
struct Repr<'a> {
    source: &'a PermGroup,
    target: &'a PermGroup,
    images: &'a [Perm],
}

impl Serialize for GroupHom {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        Repr {
            source: &self.source,
            target: &self.target,
            images: &self.images,
        }
        .serialize(serializer)
    }
}

impl GroupHom {
    pub fn new(source: PermGroup, target: PermGroup, images: Vec<Perm>) -> Result<Self> {
        if images.len() != source.generators().len() {
            return Err(Error::NotHomomorphism(format!(
                "{} images for {} generators",
                images.len(),
                source.generators().len()
            )));
        }
        if let Some(bad) = images.iter().find(|p| !target.contains(p)) {
            return Err(Error::NotHomomorphism(format!("image {bad:?} is not in the target")));
        }
        let n = source.degree();
        let graph_gens: Vec<Perm> = source
            .generators()
            .iter()
            .zip(&images)
            .map(|(s, t)| s.direct_sum(t))
            .collect();
        let graph = PermGroup::new(n + target.degree(), graph_gens)?;
        if graph.order() != source.order() {
            return Err(Error::NotHomomorphism(format!(
                "graph subgroup has order {} but the source has order {}",
                graph.order(),
                source.order()
            )));
        }
        Ok(GroupHom {
            source,
            target,
            images,
            graph,
        })
    }

    pub fn source(&self) -> &PermGroup {
        &self.source
    }

    pub fn target(&self) -> &PermGroup {
        &self.target
    }

    pub fn images(&self) -> &[Perm] {
        &self.images
    }

    /// `φ(g)` for `g` in the source.
    pub fn apply(&self, g: &Perm) -> Result<Perm> {
        let n = self.source.degree();
        let m = self.target.degree();
        let reps = self
            .graph
            .factor_prefix(g)
            .ok_or_else(|| Error::DomainMismatch(format!("{g:?} is not in the source group")))?;
        let mut acc = Perm::identity(m);
        for rep in reps {
            let tail = Perm::from_images_unchecked((0..m).map(|y| rep.apply(n + y) - n).collect());
            acc = acc.compose(&tail);
        }
        Ok(acc)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GroupHom) -> Result<GroupHom> {
        if other.target.degree() != self.source.degree() || !other.target.is_subgroup_of(&self.source) {
            return Err(Error::NotHomomorphism("target of the first map is not in the source of the second".into()));
        }
        let images = other
            .images
            .iter()
            .map(|x| self.apply(x))
            .collect::<Result<Vec<_>>>()?;
        GroupHom::new(other.source.clone(), self.target.clone(), images)
    }

    /// Order of the image subgroup.
    pub fn image_order(&self) -> Result<BigUint> {
        Ok(PermGroup::new(self.target.degree(), self.images.clone())?.order().clone())
    }

    pub fn is_injective(&self) -> Result<bool> {
        Ok(self.image_order()? == *self.source.order())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sign_hom(n: usize) -> GroupHom {
        let s = PermGroup::symmetric(n);
        let c2 = PermGroup::symmetric(2);
        let images = s
            .generators()
            .iter()
            .map(|g| if g.sign() < 0 { Perm::from_cycles(2, &[&[0, 1]]).unwrap() } else { Perm::identity(2) })
            .collect();
        GroupHom::new(s, c2, images).unwrap()
    }

    #[test]
    fn sign_is_a_homomorphism() {
        let h = sign_hom(5);
        let g = Perm::from_cycles(5, &[&[0, 1, 2], &[3, 4]]).unwrap();
        assert!(!h.apply(&g).unwrap().is_identity());
        let g = Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap();
        assert!(h.apply(&g).unwrap().is_identity());
        assert!(!h.is_injective().unwrap());
    }

    #[test]
    fn rejects_non_homomorphism() {
        let s = PermGroup::symmetric(3);
        // Sending the 3-cycle to a transposition is not multiplicative.
        let images = vec![Perm::identity(2), Perm::from_cycles(2, &[&[0, 1]]).unwrap()];
        assert!(matches!(
            GroupHom::new(s, PermGroup::symmetric(2), images),
            Err(Error::NotHomomorphism(_))
        ));
    }

    #[test]
    fn block_sum_embedding_and_composition() {
        let s3 = PermGroup::symmetric(3);
        let double = |g: &Perm| g.direct_sum(g);
        let s6 = PermGroup::symmetric(6);
        let phi = GroupHom::new(s3.clone(), s6.clone(), s3.generators().iter().map(double).collect()).unwrap();
        assert!(phi.is_injective().unwrap());
        for g in s3.elements(10).unwrap() {
            assert_eq!(phi.apply(&g).unwrap(), double(&g));
        }
        let sign6 = sign_hom(6);
        let comp = sign6.compose(&phi).unwrap();
        // Doubling kills the sign.
        for g in s3.elements(10).unwrap() {
            assert!(comp.apply(&g).unwrap().is_identity());
        }
    }
}
