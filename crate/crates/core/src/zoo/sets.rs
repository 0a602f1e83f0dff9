use serde_json::Value;

use crate::error::Result;
use crate::kernel::setmaps;
use crate::kernel::{Capabilities, Carrier, Morphism, MorphismData, Rank, Side, Theory, TheoryId, Variance};

/// Finite sets: `T_r` is the set `{0, .., r-1}` and morphisms are functions.
#[derive(Debug)]
pub struct SetsTheory {
    id: TheoryId,
}

impl SetsTheory {
    pub fn new() -> Self {
        SetsTheory { id: "sets".into() }
    }
}

impl Default for SetsTheory {
    fn default() -> Self {
        SetsTheory::new()
    }
}

impl Theory for SetsTheory {
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
        Ok(self.table(r, r, (0..r).collect()))
    }

    fn raw_compose(&self, g: &Morphism, f: &Morphism) -> Morphism {
        let t = setmaps::compose_tables(Variance::Covariant, g.table().expect("table"), f.table().expect("table"));
        self.table(f.src, g.dst, t)
    }

    fn injection(&self, r: Rank, s: Rank, side: Side) -> Result<Morphism> {
        Ok(match side {
            Side::Left => self.table(r, r + s, (0..r).collect()),
            Side::Right => self.table(s, r + s, (r..r + s).collect()),
        })
    }

    fn raw_copair(&self, f: &Morphism, g: &Morphism) -> Morphism {
        let mut t = f.table().expect("table").to_vec();
        t.extend_from_slice(g.table().expect("table"));
        self.table(f.src + g.src, f.dst, t)
    }

    fn variance(&self) -> Option<Variance> {
        Some(Variance::Covariant)
    }

    fn carrier(&self, r: Rank) -> Result<Carrier> {
        Ok(Carrier::full(r))
    }
}

impl SetsTheory {
    fn table(&self, src: Rank, dst: Rank, t: Vec<usize>) -> Morphism {
        Morphism::new(self.id.clone(), src, dst, MorphismData::Table(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::TheoryHandle;

    fn sets() -> TheoryHandle {
        TheoryHandle::new(SetsTheory::new())
    }

    fn m(t: &TheoryHandle, src: Rank, dst: Rank, table: &[usize]) -> Morphism {
        t.morphism(src, dst, MorphismData::Table(table.to_vec())).unwrap()
    }

    #[test]
    fn composition_by_hand() {
        let t = sets();
        let f = m(&t, 2, 1, &[0, 0]);
        let g = m(&t, 1, 2, &[1]);
        assert_eq!(t.compose(&g, &f).unwrap(), m(&t, 2, 2, &[1, 1]));
    }

    #[test]
    fn sums_swaps_and_stabilization() {
        let t = sets();
        let s = t.sum(&m(&t, 2, 2, &[1, 0]), &m(&t, 1, 1, &[0])).unwrap();
        assert_eq!(s, m(&t, 3, 3, &[1, 0, 2]));
        assert_eq!(t.swap(1).unwrap().underlying, m(&t, 2, 2, &[1, 0]));
        let fold = t.copair(&t.identity(2).unwrap(), &t.identity(2).unwrap()).unwrap();
        assert_eq!(fold, m(&t, 4, 2, &[0, 1, 0, 1]));
        assert_eq!(t.injection(2, 1, Side::Left).unwrap(), m(&t, 2, 3, &[0, 1]));
    }

    #[test]
    fn hom_sizes() {
        let t = sets();
        assert_eq!(t.hom(2, 3, None).unwrap().count(), 9);
        assert_eq!(t.hom(1, 0, None).unwrap().count(), 0);
        assert_eq!(t.hom(0, 0, None).unwrap().count(), 1);
        assert!(t.morphism(2, 1, MorphismData::Table(vec![0, 1])).is_err());
    }
}
