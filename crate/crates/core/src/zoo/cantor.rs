use serde_json::Value;

use crate::error::{Error, Result};
use crate::kernel::{Capabilities, IsoCongruence, Morphism, MorphismData, Rank, Side, Theory, TheoryId};

/// Cantor algebras of arity `a`: a set `X` with a bijection `X^a -> X`.
///
/// Free models are infinite, so only the isomorphisms `T_r ≅ T_{r+a-1}`
/// (for `r >= 1`) are recorded; no morphism can be built.
#[derive(Debug)]
pub struct CantorDescriptor {
    id: TheoryId,
    arity: usize,
}

impl CantorDescriptor {
    pub fn new(arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::UnsupportedParameter("cantor arity must be at least 1".into()));
        }
        Ok(CantorDescriptor {
            id: format!("cantor:{arity}").into(),
            arity,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    fn unavailable(&self) -> Error {
        Error::EnumerationUnavailable(format!("{} is a descriptor without morphisms", self.id))
    }
}

impl Theory for CantorDescriptor {
    fn id(&self) -> &TheoryId {
        &self.id
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::DESCRIPTOR
    }

    fn check_data(&self, _src: Rank, _dst: Rank, _data: &MorphismData) -> Result<()> {
        Err(self.unavailable())
    }

    fn decode_data(&self, _value: &Value) -> Result<MorphismData> {
        Err(self.unavailable())
    }

    fn identity(&self, _r: Rank) -> Result<Morphism> {
        Err(self.unavailable())
    }

    fn raw_compose(&self, _g: &Morphism, _f: &Morphism) -> Morphism {
        unreachable!("no morphism of a descriptor passes validation")
    }

    fn injection(&self, _r: Rank, _s: Rank, _side: Side) -> Result<Morphism> {
        Err(self.unavailable())
    }

    fn raw_copair(&self, _f: &Morphism, _g: &Morphism) -> Morphism {
        unreachable!("no morphism of a descriptor passes validation")
    }

    fn declared_relations(&self) -> Option<IsoCongruence> {
        Some(IsoCongruence {
            start: 1,
            period: self.arity - 1,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{IsoVerdict, TheoryHandle};

    #[test]
    fn declared_relation_makes_ranks_possibly_iso() {
        let t = TheoryHandle::new(CantorDescriptor::new(5).unwrap());
        assert_eq!(t.iso_obstruction(1, 5), IsoVerdict::PossiblyIso);
        assert_eq!(t.iso_obstruction(3, 3), IsoVerdict::PossiblyIso);
        assert!(t.identity(1).is_err());
        assert!(t.hom(1, 1, None).is_err());
        assert!(t.capabilities().k0_descriptor_only);
    }
}
