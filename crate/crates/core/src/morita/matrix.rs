use num_bigint::BigUint;
use num_integer::Integer;
use rand::RngCore;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::kernel::{
    Capabilities, Carrier, IsoCongruence, Morphism, MorphismData, Rank, Side, Theory, TheoryHandle, TheoryId,
    Variance,
};
use crate::perm::Perm;

/// `M_n(T)`: rank `r` is the rank `n·r` free model of `T`, with the same encodings.
#[derive(Debug)]
pub struct MatrixTheory {
    id: TheoryId,
    base: TheoryHandle,
    n: usize,
}

/// Build `M_n(T)`. `M_1(T)` is `T` and `M_m(M_k(T))` is `M_{mk}(T)`.
pub fn matrix_theory(t: &TheoryHandle, n: usize) -> Result<TheoryHandle> {
    if n == 0 {
        return Err(Error::UnsupportedParameter("matrix size must be at least 1".into()));
    }
    if n == 1 {
        return Ok(t.clone());
    }
    if let Some((base, k)) = t.theory().matrix_parts() {
        return matrix_theory(base, n * k);
    }
    Ok(TheoryHandle::new(MatrixTheory {
        id: format!("matrix:{n}({})", t.id()).into(),
        base: t.clone(),
        n,
    }))
}

impl MatrixTheory {
    fn wrap(&self, m: Morphism) -> Morphism {
        Morphism::new(self.id.clone(), m.src / self.n, m.dst / self.n, m.data)
    }

    fn unwrap(&self, m: &Morphism) -> Morphism {
        Morphism::new(
            self.base.theory().id().clone(),
            m.src * self.n,
            m.dst * self.n,
            m.data.clone(),
        )
    }

    fn inner(&self) -> &dyn Theory {
        self.base.theory()
    }
}

impl Theory for MatrixTheory {
    fn id(&self) -> &TheoryId {
        &self.id
    }

    fn capabilities(&self) -> Capabilities {
        self.inner().capabilities()
    }

    fn check_data(&self, src: Rank, dst: Rank, data: &MorphismData) -> Result<()> {
        self.inner().check_data(self.n * src, self.n * dst, data)
    }

    fn decode_data(&self, value: &Value) -> Result<MorphismData> {
        self.inner().decode_data(value)
    }

    fn identity(&self, r: Rank) -> Result<Morphism> {
        Ok(self.wrap(self.inner().identity(self.n * r)?))
    }

    fn raw_compose(&self, g: &Morphism, f: &Morphism) -> Morphism {
        self.wrap(self.inner().raw_compose(&self.unwrap(g), &self.unwrap(f)))
    }

    fn injection(&self, r: Rank, s: Rank, side: Side) -> Result<Morphism> {
        Ok(self.wrap(self.inner().injection(self.n * r, self.n * s, side)?))
    }

    fn raw_copair(&self, f: &Morphism, g: &Morphism) -> Morphism {
        self.wrap(self.inner().raw_copair(&self.unwrap(f), &self.unwrap(g)))
    }

    fn variance(&self) -> Option<Variance> {
        self.inner().variance()
    }

    fn carrier(&self, r: Rank) -> Result<Carrier> {
        self.inner().carrier(self.n * r)
    }

    fn default_bound(&self) -> Option<usize> {
        self.inner().default_bound()
    }

    fn hom_size(&self, r: Rank, s: Rank, bound: Option<usize>) -> Result<BigUint> {
        self.inner().hom_size(self.n * r, self.n * s, bound)
    }

    fn hom_enumerate<'a>(
        &'a self,
        r: Rank,
        s: Rank,
        bound: Option<usize>,
    ) -> Result<Box<dyn Iterator<Item = Morphism> + Send + 'a>> {
        let it = self.inner().hom_enumerate(self.n * r, self.n * s, bound)?;
        Ok(Box::new(it.map(move |m| self.wrap(m))))
    }

    fn random_hom(&self, r: Rank, s: Rank, bound: Option<usize>, rng: &mut dyn RngCore) -> Result<Morphism> {
        Ok(self.wrap(self.inner().random_hom(self.n * r, self.n * s, bound, rng)?))
    }

    fn aut_domain(&self, r: Rank) -> Result<BigUint> {
        self.inner().aut_domain(self.n * r)
    }

    fn aut_generators(&self, r: Rank) -> Result<Vec<Perm>> {
        self.inner().aut_generators(self.n * r)
    }

    fn to_perm(&self, u: &Morphism) -> Result<Perm> {
        self.inner().to_perm(&self.unwrap(u))
    }

    fn from_perm(&self, r: Rank, p: &Perm) -> Result<Morphism> {
        Ok(self.wrap(self.inner().from_perm(self.n * r, p)?))
    }

    fn idempotents<'a>(&'a self, r: Rank) -> Option<Result<Box<dyn Iterator<Item = Morphism> + Send + 'a>>> {
        let inner = self.inner().idempotents(self.n * r)?;
        Some(inner.map(|it| Box::new(it.map(move |m| self.wrap(m))) as Box<dyn Iterator<Item = Morphism> + Send>))
    }

    fn iso_invariant(&self, r: Rank) -> Option<(&'static str, BigUint)> {
        self.inner().iso_invariant(self.n * r)
    }

    /// `T_{nr} ≅ T_{ns}` for `nr, ns >= start` and `n(r-s) ≡ 0 mod p`.
    fn declared_relations(&self) -> Option<IsoCongruence> {
        let c = self.inner().declared_relations()?;
        let period = if c.period == 0 { 0 } else { c.period / c.period.gcd(&self.n) };
        Some(IsoCongruence {
            start: c.start.div_ceil(self.n),
            period,
        })
    }

    fn matrix_parts(&self) -> Option<(&TheoryHandle, usize)> {
        Some((&self.base, self.n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::PermGroup;
    use crate::zoo::make_theory;

    #[test]
    fn matrix_of_sets_at_rank_one() {
        let t = matrix_theory(&make_theory("sets").unwrap(), 2).unwrap();
        assert_eq!(t.id(), "matrix:2(sets)");
        let real = t.aut_realization(1, 100).unwrap();
        let g = PermGroup::new(real.domain, real.generators).unwrap();
        assert_eq!(g.order_u64(), Some(2));
        assert_eq!(t.hom(1, 1, None).unwrap().count(), 4);
    }

    #[test]
    fn size_one_and_nesting_collapse() {
        let sets = make_theory("sets").unwrap();
        assert_eq!(matrix_theory(&sets, 1).unwrap().id(), "sets");
        let m = matrix_theory(&matrix_theory(&sets, 2).unwrap(), 3).unwrap();
        assert_eq!(m.id(), "matrix:6(sets)");
        assert!(matrix_theory(&sets, 0).is_err());
    }

    #[test]
    fn homs_are_base_homs() {
        let post = make_theory("post:2").unwrap();
        let m = matrix_theory(&post, 2).unwrap();
        let a: Vec<MorphismData> = m.hom(1, 1, None).unwrap().map(|f| f.data).collect();
        let b: Vec<MorphismData> = post.hom(2, 2, None).unwrap().map(|f| f.data).collect();
        assert_eq!(a, b);
        let f = m.morphism(1, 1, a[77].clone()).unwrap();
        let g = m.morphism(1, 1, a[200].clone()).unwrap();
        let fb = post.morphism(2, 2, a[77].clone()).unwrap();
        let gb = post.morphism(2, 2, a[200].clone()).unwrap();
        assert_eq!(m.compose(&g, &f).unwrap().data, post.compose(&gb, &fb).unwrap().data);
    }

    #[test]
    fn cantor_period_shrinks() {
        let c = make_theory("cantor:5").unwrap();
        let m = matrix_theory(&c, 2).unwrap();
        assert_eq!(
            m.theory().declared_relations(),
            Some(IsoCongruence { start: 1, period: 2 })
        );
    }
}
