use std::collections::HashSet;
use std::sync::RwLock;

use num_bigint::BigUint;
use rand::RngCore;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::kernel::{
    Capabilities, Carrier, Morphism, MorphismData, Rank, Side, Theory, TheoryHandle, TheoryId, Variance,
};

/// An idempotent `u: T_1 -> T_1` of a theory.
#[derive(Clone, Debug)]
pub struct Idempotent {
    theory: TheoryHandle,
    u: Morphism,
}

pub fn is_idempotent(t: &TheoryHandle, u: &Morphism) -> Result<bool> {
    if u.src != 1 || u.dst != 1 {
        return Err(Error::RankMismatch(format!("idempotents live in hom(1,1), got {}->{}", u.src, u.dst)));
    }
    Ok(t.compose(u, u)? == *u)
}

impl Idempotent {
    pub fn new(t: &TheoryHandle, u: Morphism) -> Result<Self> {
        t.check(&u)?;
        if !is_idempotent(t, &u)? {
            return Err(Error::NotIdempotent);
        }
        Ok(Idempotent { theory: t.clone(), u })
    }

    pub fn identity(t: &TheoryHandle) -> Result<Self> {
        Self::new(t, t.identity(1)?)
    }

    pub fn theory(&self) -> &TheoryHandle {
        &self.theory
    }

    pub fn morphism(&self) -> &Morphism {
        &self.u
    }

    /// The `n`-fold sum `u_n`.
    pub fn power(&self, n: Rank) -> Result<Morphism> {
        let mut acc = self.theory.identity(0)?;
        for _ in 0..n {
            acc = self.theory.sum(&acc, &self.u)?;
        }
        Ok(acc)
    }

    /// `u_0, .., u_max`.
    pub fn powers(&self, max: Rank) -> Result<Vec<Morphism>> {
        let mut out = vec![self.theory.identity(0)?];
        for n in 1..=max {
            let next = self.theory.sum(&out[n - 1], &self.u)?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> Result<bool> {
        Ok(self.u == self.theory.identity(1)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionPath {
    /// Exhaustive search over the hom-set.
    Search,
    /// Hom-set above the cutoff; decided by the equivalent condition (2).
    ViaConditionTwo,
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionCheck {
    pub holds: bool,
    pub path: ConditionPath,
}

/// Condition `which` for `f: T_r -> T_s`:
/// (1) `f = u_s g u_r` for some `g`; (2) `u_s f = f = f u_r`; (3) `u_s f = f u_r`.
pub fn condition(f: &Morphism, u: &Idempotent, which: u8, cutoff: u64) -> Result<ConditionCheck> {
    let t = &u.theory;
    t.check(f)?;
    let (us, ur) = (u.power(f.dst)?, u.power(f.src)?);
    let left = t.compose(&us, f)?;
    let right = t.compose(f, &ur)?;
    let direct = |holds| ConditionCheck {
        holds,
        path: ConditionPath::Direct,
    };
    match which {
        1 => {
            let bound = t.theory().default_bound();
            let size = t.hom_size(f.src, f.dst, bound)?;
            if size > BigUint::from(cutoff) {
                return Ok(ConditionCheck {
                    holds: left == *f && right == *f,
                    path: ConditionPath::ViaConditionTwo,
                });
            }
            for g in t.hom(f.src, f.dst, bound)? {
                if t.compose(&us, &t.compose(&g, &ur)?)? == *f {
                    return Ok(ConditionCheck {
                        holds: true,
                        path: ConditionPath::Search,
                    });
                }
            }
            Ok(ConditionCheck {
                holds: false,
                path: ConditionPath::Search,
            })
        }
        2 => Ok(direct(left == *f && right == *f)),
        3 => Ok(direct(left == right)),
        _ => Err(Error::UnsupportedParameter(format!("condition ({which}) does not exist"))),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaRankRow {
    pub src: Rank,
    pub dst: Rank,
    pub morphisms: u64,
    pub condition1: u64,
    pub condition2: u64,
    pub condition3: u64,
    pub one_iff_two: bool,
    pub two_implies_three: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaAudit {
    pub theory: String,
    pub idempotent: Value,
    pub is_identity: bool,
    pub max_rank: Rank,
    pub rows: Vec<LemmaRankRow>,
    pub one_iff_two: bool,
    pub two_implies_three: bool,
    /// `(3) => (2)` on every checked hom-set.
    pub three_implies_two: bool,
    /// A morphism satisfying (3) but not (2), when one exists.
    pub counterexample: Option<Value>,
    pub passed: bool,
}

/// Exhaustive check of `(1) <=> (2) => (3)` on all ranks `<= max_rank`, and of
/// `(3) => (2)` exactly when `u` is the identity.
pub fn lemma_audit(u: &Idempotent, max_rank: Rank, cutoff: u64) -> Result<LemmaAudit> {
    let t = &u.theory;
    let bound = t.theory().default_bound();
    let powers = u.powers(max_rank)?;
    let mut rows = Vec::new();
    let mut counterexample = None;
    for r in 0..=max_rank {
        for s in 0..=max_rank {
            let homs = t.hom_vec(r, s, bound, cutoff)?;
            let (ur, us) = (&powers[r], &powers[s]);
            // Condition (1) holds exactly on the image of g ↦ u_s g u_r.
            let compressed: HashSet<Morphism> = homs
                .iter()
                .map(|g| t.compose(us, &t.compose(g, ur)?))
                .collect::<Result<_>>()?;
            let mut row = LemmaRankRow {
                src: r,
                dst: s,
                morphisms: homs.len() as u64,
                condition1: 0,
                condition2: 0,
                condition3: 0,
                one_iff_two: true,
                two_implies_three: true,
            };
            for f in &homs {
                let left = t.compose(us, f)?;
                let right = t.compose(f, ur)?;
                let c1 = compressed.contains(f);
                let c2 = left == *f && right == *f;
                let c3 = left == right;
                row.condition1 += c1 as u64;
                row.condition2 += c2 as u64;
                row.condition3 += c3 as u64;
                row.one_iff_two &= c1 == c2;
                row.two_implies_three &= !c2 || c3;
                if c3 && !c2 && counterexample.is_none() {
                    counterexample = Some(f.to_json());
                }
            }
            rows.push(row);
        }
    }
    let is_identity = u.is_identity()?;
    let one_iff_two = rows.iter().all(|r| r.one_iff_two);
    let two_implies_three = rows.iter().all(|r| r.two_implies_three);
    let three_implies_two = counterexample.is_none();
    Ok(LemmaAudit {
        theory: t.id().to_string(),
        idempotent: u.u.to_json(),
        is_identity,
        max_rank,
        rows,
        one_iff_two,
        two_implies_three,
        three_implies_two,
        counterexample,
        passed: one_iff_two && two_implies_three && three_implies_two == is_identity,
    })
}

/// The theory `uTu`: morphisms `f` with `u_s f = f = f u_r`, identities `u_r`,
/// injections `u_{r+s}∘inj`.
#[derive(Debug)]
pub struct IdempotentModification {
    id: TheoryId,
    base: TheoryHandle,
    u: Idempotent,
    set_like: bool,
    powers: RwLock<Vec<Morphism>>,
}

/// Largest base hom-set counted by filtering when the base has no set carrier.
const FILTER_CAP: u64 = 10_000_000;

pub fn idempotent_modification(u: &Idempotent) -> Result<TheoryHandle> {
    let data = serde_json::to_string(&u.u.data)?;
    idempotent_modification_named(u, format!("idem({},{data})", u.theory.id()))
}

/// As [`idempotent_modification`], under a caller-chosen id.
pub fn idempotent_modification_named(u: &Idempotent, id: String) -> Result<TheoryHandle> {
    let base = u.theory.clone();
    let set_like = base.theory().variance().is_some() && u.u.data.table().is_some();
    Ok(TheoryHandle::new(IdempotentModification {
        id: id.into(),
        base,
        u: u.clone(),
        set_like,
        powers: RwLock::new(Vec::new()),
    }))
}

impl IdempotentModification {
    fn power(&self, n: Rank) -> Result<Morphism> {
        if let Some(p) = self.powers.read().expect("lock").get(n) {
            return Ok(p.clone());
        }
        let all = self.u.powers(n)?;
        let p = all[n].clone();
        let mut cache = self.powers.write().expect("lock");
        if cache.len() < all.len() {
            *cache = all;
        }
        Ok(p)
    }

    fn wrap(&self, m: Morphism) -> Morphism {
        Morphism::new(self.id.clone(), m.src, m.dst, m.data)
    }

    fn unwrap(&self, m: &Morphism) -> Morphism {
        Morphism::new(self.base.theory().id().clone(), m.src, m.dst, m.data.clone())
    }

    fn inner(&self) -> &dyn Theory {
        self.base.theory()
    }

    fn compressed(&self, f: &Morphism) -> Result<bool> {
        let us = self.power(f.dst)?;
        let ur = self.power(f.src)?;
        Ok(self.inner().raw_compose(&us, f) == *f && self.inner().raw_compose(f, &ur) == *f)
    }

    fn filtered<'a>(&'a self, r: Rank, s: Rank, bound: Option<usize>) -> Result<impl Iterator<Item = Morphism> + Send + 'a> {
        let size = self.inner().hom_size(r, s, bound)?;
        if size > BigUint::from(FILTER_CAP) {
            return Err(Error::cutoff(format!("{} hom({r},{s}) filter", self.id), size, FILTER_CAP));
        }
        let (us, ur) = (self.power(s)?, self.power(r)?);
        let it = self.inner().hom_enumerate(r, s, bound)?;
        Ok(it.filter_map(move |f| {
            let keep = self.inner().raw_compose(&us, &f) == f && self.inner().raw_compose(&f, &ur) == f;
            keep.then(|| self.wrap(f))
        }))
    }
}

impl Theory for IdempotentModification {
    fn id(&self) -> &TheoryId {
        &self.id
    }

    fn capabilities(&self) -> Capabilities {
        self.inner().capabilities()
    }

    fn check_data(&self, src: Rank, dst: Rank, data: &MorphismData) -> Result<()> {
        self.inner().check_data(src, dst, data)?;
        let f = Morphism::new(self.base.theory().id().clone(), src, dst, data.clone());
        if !self.compressed(&f)? {
            return Err(Error::InvalidMorphism(format!("{f:?} is not fixed by u on both sides")));
        }
        Ok(())
    }

    fn decode_data(&self, value: &Value) -> Result<MorphismData> {
        self.inner().decode_data(value)
    }

    fn identity(&self, r: Rank) -> Result<Morphism> {
        Ok(self.wrap(self.power(r)?))
    }

    fn raw_compose(&self, g: &Morphism, f: &Morphism) -> Morphism {
        self.wrap(self.inner().raw_compose(&self.unwrap(g), &self.unwrap(f)))
    }

    fn injection(&self, r: Rank, s: Rank, side: Side) -> Result<Morphism> {
        let inj = self.inner().injection(r, s, side)?;
        Ok(self.wrap(self.inner().raw_compose(&self.power(r + s)?, &inj)))
    }

    fn raw_copair(&self, f: &Morphism, g: &Morphism) -> Morphism {
        self.wrap(self.inner().raw_copair(&self.unwrap(f), &self.unwrap(g)))
    }

    fn variance(&self) -> Option<Variance> {
        if self.set_like {
            self.inner().variance()
        } else {
            None
        }
    }

    fn carrier(&self, r: Rank) -> Result<Carrier> {
        if !self.set_like {
            return Err(Error::EnumerationUnavailable(format!("{} has no set carrier", self.id)));
        }
        Ok(Carrier::framed(self.power(r)?.table()?.to_vec()))
    }

    fn default_bound(&self) -> Option<usize> {
        self.inner().default_bound()
    }

    fn hom_size(&self, r: Rank, s: Rank, bound: Option<usize>) -> Result<BigUint> {
        if self.set_like {
            return crate::kernel::setmaps::hom_size(self, r, s);
        }
        Ok(BigUint::from(self.filtered(r, s, bound)?.count()))
    }

    fn hom_enumerate<'a>(
        &'a self,
        r: Rank,
        s: Rank,
        bound: Option<usize>,
    ) -> Result<Box<dyn Iterator<Item = Morphism> + Send + 'a>> {
        if self.set_like {
            return crate::kernel::setmaps::enumerate(self, r, s);
        }
        Ok(Box::new(self.filtered(r, s, bound)?))
    }

    fn random_hom(&self, r: Rank, s: Rank, bound: Option<usize>, rng: &mut dyn RngCore) -> Result<Morphism> {
        if self.set_like {
            return crate::kernel::setmaps::random(self, r, s, rng);
        }
        let f = self.inner().random_hom(r, s, bound, rng)?;
        let (us, ur) = (self.power(s)?, self.power(r)?);
        let g = self.inner().raw_compose(&us, &self.inner().raw_compose(&f, &ur));
        Ok(self.wrap(g))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZigzagRow {
    pub src: Rank,
    pub dst: Rank,
    pub base_morphisms: u64,
    /// Morphisms with `u_s f = f u_r`, the domain of the restriction functor.
    pub commuting: u64,
    pub restriction_image: u64,
    pub modified_morphisms: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZigzagReport {
    pub theory: String,
    pub modified: String,
    pub max_rank: Rank,
    pub rows: Vec<ZigzagRow>,
    pub preserves_identities: bool,
    pub preserves_composition: bool,
    pub composites_checked: u64,
    pub passed: bool,
}

/// Check that `f ↦ u∘f∘u` (on morphisms commuting with `u`) and the inclusion
/// of those morphisms into `T` are functors, on all ranks `<= max_rank`.
pub fn zigzag_functors(u: &Idempotent, max_rank: Rank, cutoff: u64) -> Result<ZigzagReport> {
    let t = &u.theory;
    let m = idempotent_modification(u)?;
    let bound = t.theory().default_bound();
    let powers = u.powers(max_rank)?;
    let restrict = |f: &Morphism| -> Result<Morphism> {
        let g = t.compose(&powers[f.dst], &t.compose(f, &powers[f.src])?)?;
        m.morphism(g.src, g.dst, g.data)
    };
    let mut rows = Vec::new();
    let mut commuting: Vec<Vec<Vec<Morphism>>> = vec![vec![Vec::new(); max_rank + 1]; max_rank + 1];
    for r in 0..=max_rank {
        for s in 0..=max_rank {
            let homs = t.hom_vec(r, s, bound, cutoff)?;
            let mut image = HashSet::new();
            for f in &homs {
                image.insert(restrict(f)?);
                if t.compose(&powers[s], f)? == t.compose(f, &powers[r])? {
                    commuting[r][s].push(f.clone());
                }
            }
            let modified = m.hom_size(r, s, bound)?;
            rows.push(ZigzagRow {
                src: r,
                dst: s,
                base_morphisms: homs.len() as u64,
                commuting: commuting[r][s].len() as u64,
                restriction_image: image.len() as u64,
                modified_morphisms: u64::try_from(&modified).unwrap_or(u64::MAX),
            });
        }
    }
    let mut preserves_identities = true;
    for r in 0..=max_rank {
        preserves_identities &= restrict(&t.identity(r)?)? == m.identity(r)?;
    }
    let mut preserves_composition = true;
    let mut checked = 0u64;
    const PAIR_BUDGET: usize = 1 << 16;
    'outer: for r in 0..=max_rank {
        for s in 0..=max_rank {
            for q in 0..=max_rank {
                let (fs, gs) = (&commuting[r][s], &commuting[s][q]);
                let step = (fs.len() * gs.len() / PAIR_BUDGET).max(1);
                for (i, f) in fs.iter().enumerate() {
                    for (j, g) in gs.iter().enumerate() {
                        if (i * gs.len() + j) % step != 0 {
                            continue;
                        }
                        checked += 1;
                        let lhs = restrict(&t.compose(g, f)?)?;
                        let rhs = m.compose(&restrict(g)?, &restrict(f)?)?;
                        if lhs != rhs {
                            preserves_composition = false;
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    Ok(ZigzagReport {
        theory: t.id().to_string(),
        modified: m.id().to_string(),
        max_rank,
        rows,
        preserves_identities,
        preserves_composition,
        composites_checked: checked,
        passed: preserves_identities && preserves_composition,
    })
}
