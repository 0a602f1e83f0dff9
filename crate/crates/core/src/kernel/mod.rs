//! The morphism algebra shared by every concretely realized theory.
//!
//! A theory is a category whose objects are the ranks `0, 1, 2, ...`, object
//! `r + s` being the coproduct of `r` and `s` with fixed canonical injections.
//! Concrete theories implement [`Theory`]; callers work with the checked
//! operations on [`TheoryHandle`].

pub mod setmaps;
pub mod validate;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::perm::Perm;

pub use setmaps::{Carrier, Variance};
pub use validate::{validate_theory, CheckOutcome, ValidateConfig, ValidationReport};

/// Index of the free model `T_r`.
pub type Rank = usize;

/// Identifier of a theory: its canonical spec string.
pub type TheoryId = Arc<str>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Capabilities {
    pub finite_homs: bool,
    pub bounded_homs_only: bool,
    pub k0_descriptor_only: bool,
}

impl Capabilities {
    pub const FINITE: Capabilities = Capabilities {
        finite_homs: true,
        bounded_homs_only: false,
        k0_descriptor_only: false,
    };
    pub const BOUNDED: Capabilities = Capabilities {
        finite_homs: false,
        bounded_homs_only: true,
        k0_descriptor_only: false,
    };
    pub const DESCRIPTOR: Capabilities = Capabilities {
        finite_homs: false,
        bounded_homs_only: false,
        k0_descriptor_only: true,
    };
}

/// A leaf-labelled tree; leaves carry generator indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Tree {
    Leaf(usize),
    Node(Vec<Tree>),
}

impl Tree {
    /// Height with leaves counted as height one.
    pub fn height(&self) -> usize {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Node(children) => 1 + children.iter().map(Tree::height).max().unwrap_or(0),
        }
    }
}

/// Theory-specific finite encoding of a morphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum MorphismData {
    /// Function table of a set map (covariant or contravariant, see [`Variance`]).
    Table(Vec<usize>),
    /// Images of generators in a free G-set: `(orbit, group element)`.
    Orbits(Vec<(usize, usize)>),
    /// Row-major matrix with `dst` rows and `src` columns.
    Matrix(Vec<Vec<u64>>),
    /// Images of generators as words.
    Words(Vec<Vec<usize>>),
    /// Images of generators as trees.
    Trees(Vec<Tree>),
}

impl MorphismData {
    pub fn table(&self) -> Option<&[usize]> {
        match self {
            MorphismData::Table(t) => Some(t),
            _ => None,
        }
    }
}

/// An arrow `T_src -> T_dst` of a concrete theory.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub theory: TheoryId,
    pub src: Rank,
    pub dst: Rank,
    pub data: MorphismData,
}

impl Morphism {
    pub fn new(theory: TheoryId, src: Rank, dst: Rank, data: MorphismData) -> Self {
        Morphism {
            theory,
            src,
            dst,
            data,
        }
    }

    /// The function table, for theories whose morphisms are set maps.
    pub fn table(&self) -> Result<&[usize]> {
        self.data
            .table()
            .ok_or_else(|| Error::InvalidMorphism(format!("{self:?} carries no function table")))
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(MorphismRef {
            theory: &self.theory,
            src: self.src,
            dst: self.dst,
            data: &self.data,
        })
        .expect("morphism data serializes")
    }
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}->{} {:?}", self.theory, self.src, self.dst, self.data)
    }
}

impl Serialize for Morphism {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MorphismRef {
            theory: &self.theory,
            src: self.src,
            dst: self.dst,
            data: &self.data,
        }
        .serialize(serializer)
    }
}

#[derive(Serialize)]
struct MorphismRef<'a> {
    theory: &'a str,
    src: Rank,
    dst: Rank,
    data: &'a MorphismData,
}

/// Serialized form of a morphism; the data is decoded by the owning theory.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MorphismJson {
    pub theory: String,
    pub src: Rank,
    pub dst: Rank,
    pub data: Value,
}

/// An automorphism together with a stored inverse witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    pub underlying: Morphism,
    pub inverse: Morphism,
}

impl Automorphism {
    pub fn rank(&self) -> Rank {
        self.underlying.src
    }

    pub fn inverted(&self) -> Automorphism {
        Automorphism {
            underlying: self.inverse.clone(),
            inverse: self.underlying.clone(),
        }
    }
}

/// Declared isomorphisms `T_r ~ T_{r+period}` for all `r >= start`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IsoCongruence {
    pub start: Rank,
    pub period: Rank,
}

/// Faithful permutation realization of `Aut(T_r)`.
#[derive(Clone, Debug)]
pub struct AutRealization {
    pub rank: Rank,
    pub domain: usize,
    pub generators: Vec<Perm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "reason")]
pub enum IsoVerdict {
    PossiblyIso,
    NotIso(String),
}

/// A concretely realized Lawvere theory.
///
/// The `raw_*` operations assume their inputs were already checked by
/// [`TheoryHandle`]; they never see morphisms of another theory or with
/// mismatched ranks.
pub trait Theory: Send + Sync + fmt::Debug {
    fn id(&self) -> &TheoryId;

    fn capabilities(&self) -> Capabilities;

    /// Validate the data of a morphism `T_src -> T_dst`.
    fn check_data(&self, src: Rank, dst: Rank, data: &MorphismData) -> Result<()>;

    fn decode_data(&self, value: &Value) -> Result<MorphismData>;

    fn identity(&self, r: Rank) -> Result<Morphism>;

    fn raw_compose(&self, g: &Morphism, f: &Morphism) -> Morphism;

    fn injection(&self, r: Rank, s: Rank, side: Side) -> Result<Morphism>;

    fn raw_copair(&self, f: &Morphism, g: &Morphism) -> Morphism;

    /// Set-map view of the morphisms, when the theory has one.
    fn variance(&self) -> Option<Variance> {
        None
    }

    fn carrier(&self, _r: Rank) -> Result<Carrier> {
        Err(Error::EnumerationUnavailable(format!("{} has no set carrier", self.id())))
    }

    /// Default bound for bounded-homs-only theories.
    fn default_bound(&self) -> Option<usize> {
        None
    }

    fn hom_size(&self, r: Rank, s: Rank, _bound: Option<usize>) -> Result<BigUint> {
        match self.variance() {
            Some(_) => setmaps::hom_size(self, r, s),
            None => Err(Error::EnumerationUnavailable(self.id().to_string())),
        }
    }

    fn hom_enumerate<'a>(
        &'a self,
        r: Rank,
        s: Rank,
        _bound: Option<usize>,
    ) -> Result<Box<dyn Iterator<Item = Morphism> + Send + 'a>> {
        match self.variance() {
            Some(_) => setmaps::enumerate(self, r, s),
            None => Err(Error::EnumerationUnavailable(self.id().to_string())),
        }
    }

    fn random_hom(&self, r: Rank, s: Rank, _bound: Option<usize>, rng: &mut dyn RngCore) -> Result<Morphism> {
        match self.variance() {
            Some(_) => setmaps::random(self, r, s, rng),
            None => Err(Error::EnumerationUnavailable(self.id().to_string())),
        }
    }

    /// Number of points of the permutation realization of `Aut(T_r)`.
    fn aut_domain(&self, r: Rank) -> Result<BigUint> {
        match self.variance() {
            Some(_) => Ok(BigUint::from(self.carrier(r)?.image.len())),
            None => Err(Error::EnumerationUnavailable(self.id().to_string())),
        }
    }

    fn aut_generators(&self, r: Rank) -> Result<Vec<Perm>> {
        match self.variance() {
            Some(_) => Ok(setmaps::symmetric_generators(self.carrier(r)?.image.len())),
            None => Err(Error::EnumerationUnavailable(self.id().to_string())),
        }
    }

    /// The realization of an automorphism as a permutation; must be a group
    /// homomorphism `Aut(T_r) -> Sym(aut_domain(r))`.
    fn to_perm(&self, u: &Morphism) -> Result<Perm> {
        match self.variance() {
            Some(_) => setmaps::to_perm(self, u),
            None => Err(Error::EnumerationUnavailable(self.id().to_string())),
        }
    }

    fn from_perm(&self, r: Rank, p: &Perm) -> Result<Morphism> {
        match self.variance() {
            Some(_) => setmaps::from_perm(self, r, p),
            None => Err(Error::EnumerationUnavailable(self.id().to_string())),
        }
    }

    /// Idempotent endomorphisms of `T_r`, if they can be listed without
    /// filtering the whole hom-set.
    fn idempotents<'a>(&'a self, r: Rank) -> Option<Result<Box<dyn Iterator<Item = Morphism> + Send + 'a>>> {
        match self.variance() {
            Some(_) => Some(setmaps::idempotents(self, r)),
            None => None,
        }
    }

    /// A cardinality that isomorphic objects share.
    fn iso_invariant(&self, r: Rank) -> Option<(&'static str, BigUint)> {
        match self.variance() {
            Some(_) => self
                .carrier(r)
                .ok()
                .map(|c| ("carrier cardinality", BigUint::from(c.image.len()))),
            None => None,
        }
    }

    fn declared_relations(&self) -> Option<IsoCongruence> {
        None
    }

    /// `(T, n)` when this theory is the matrix theory `M_n(T)`.
    fn matrix_parts(&self) -> Option<(&TheoryHandle, usize)> {
        None
    }
}

/// Shared, immutable handle to a theory with checked operations.
#[derive(Clone)]
pub struct TheoryHandle(Arc<dyn Theory>);

impl fmt::Debug for TheoryHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TheoryHandle({})", self.id())
    }
}

impl TheoryHandle {
    pub fn new<T: Theory + 'static>(theory: T) -> Self {
        TheoryHandle(Arc::new(theory))
    }

    pub fn id(&self) -> &str {
        self.0.id()
    }

    pub fn theory(&self) -> &dyn Theory {
        &*self.0
    }

    pub fn capabilities(&self) -> Capabilities {
        self.0.capabilities()
    }

    fn owns(&self, m: &Morphism) -> Result<()> {
        if Arc::ptr_eq(&m.theory, self.0.id()) || *m.theory == **self.0.id() {
            Ok(())
        } else {
            Err(Error::TheoryMismatch {
                expected: self.id().to_string(),
                found: m.theory.to_string(),
            })
        }
    }

    /// Full validation of a morphism built outside this handle.
    pub fn check(&self, m: &Morphism) -> Result<()> {
        self.owns(m)?;
        self.0.check_data(m.src, m.dst, &m.data)
    }

    pub fn morphism(&self, src: Rank, dst: Rank, data: MorphismData) -> Result<Morphism> {
        self.0.check_data(src, dst, &data)?;
        Ok(Morphism::new(self.0.id().clone(), src, dst, data))
    }

    pub fn decode(&self, json: &MorphismJson) -> Result<Morphism> {
        if json.theory != self.id() {
            return Err(Error::TheoryMismatch {
                expected: self.id().to_string(),
                found: json.theory.clone(),
            });
        }
        let data = self.0.decode_data(&json.data)?;
        self.morphism(json.src, json.dst, data)
    }

    pub fn decode_value(&self, value: &Value) -> Result<Morphism> {
        let json: MorphismJson = serde_json::from_value(value.clone())?;
        self.decode(&json)
    }

    pub fn identity(&self, r: Rank) -> Result<Morphism> {
        self.0.identity(r)
    }

    /// `g ∘ f`.
    pub fn compose(&self, g: &Morphism, f: &Morphism) -> Result<Morphism> {
        self.owns(g)?;
        self.owns(f)?;
        if f.dst != g.src {
            return Err(Error::RankMismatch(format!(
                "cannot compose {}->{} after {}->{}",
                g.src, g.dst, f.src, f.dst
            )));
        }
        Ok(self.0.raw_compose(g, f))
    }

    /// Composite of a chain given in application order reversed: `ms[0] ∘ ms[1] ∘ ...`.
    pub fn compose_all(&self, ms: &[&Morphism]) -> Result<Morphism> {
        let (last, rest) = ms
            .split_last()
            .ok_or_else(|| Error::RankMismatch("empty composition".into()))?;
        let mut acc = (*last).clone();
        for m in rest.iter().rev() {
            acc = self.compose(m, &acc)?;
        }
        Ok(acc)
    }

    pub fn injection(&self, r: Rank, s: Rank, side: Side) -> Result<Morphism> {
        self.0.injection(r, s, side)
    }

    pub fn copair(&self, f: &Morphism, g: &Morphism) -> Result<Morphism> {
        self.owns(f)?;
        self.owns(g)?;
        if f.dst != g.dst {
            return Err(Error::RankMismatch(format!(
                "copair needs a common codomain, got {} and {}",
                f.dst, g.dst
            )));
        }
        Ok(self.0.raw_copair(f, g))
    }

    /// `f + g : T_{a+c} -> T_{b+d}`.
    pub fn sum(&self, f: &Morphism, g: &Morphism) -> Result<Morphism> {
        self.owns(f)?;
        self.owns(g)?;
        let left = self.injection(f.dst, g.dst, Side::Left)?;
        let right = self.injection(f.dst, g.dst, Side::Right)?;
        let lf = self.0.raw_compose(&left, f);
        let rg = self.0.raw_compose(&right, g);
        Ok(self.0.raw_copair(&lf, &rg))
    }

    /// The symmetry of `T_r + T_r`.
    pub fn swap(&self, r: Rank) -> Result<Automorphism> {
        let left = self.injection(r, r, Side::Left)?;
        let right = self.injection(r, r, Side::Right)?;
        let swap = self.0.raw_copair(&right, &left);
        Ok(Automorphism {
            underlying: swap.clone(),
            inverse: swap,
        })
    }

    /// `u + id(T_s)`, read as an automorphism of `T_{r+s}`.
    pub fn stabilize(&self, u: &Automorphism, s: Rank) -> Result<Automorphism> {
        let id = self.identity(s)?;
        Ok(Automorphism {
            underlying: self.sum(&u.underlying, &id)?,
            inverse: self.sum(&u.inverse, &id)?,
        })
    }

    pub fn sum_aut(&self, a: &Automorphism, b: &Automorphism) -> Result<Automorphism> {
        Ok(Automorphism {
            underlying: self.sum(&a.underlying, &b.underlying)?,
            inverse: self.sum(&a.inverse, &b.inverse)?,
        })
    }

    pub fn compose_aut(&self, a: &Automorphism, b: &Automorphism) -> Result<Automorphism> {
        Ok(Automorphism {
            underlying: self.compose(&a.underlying, &b.underlying)?,
            inverse: self.compose(&b.inverse, &a.inverse)?,
        })
    }

    pub fn identity_aut(&self, r: Rank) -> Result<Automorphism> {
        let id = self.identity(r)?;
        Ok(Automorphism {
            underlying: id.clone(),
            inverse: id,
        })
    }

    /// Pair a morphism with its inverse, found through the permutation realization.
    pub fn automorphism(&self, u: &Morphism) -> Result<Automorphism> {
        self.owns(u)?;
        if u.src != u.dst {
            return Err(Error::NotAutomorphism(format!("{u:?} is not an endomorphism")));
        }
        let p = self.0.to_perm(u)?;
        let inverse = self.0.from_perm(u.src, &p.inverse())?;
        let id = self.identity(u.src)?;
        if self.0.raw_compose(u, &inverse) != id || self.0.raw_compose(&inverse, u) != id {
            return Err(Error::NotAutomorphism(format!("{u:?} has no two-sided inverse")));
        }
        Ok(Automorphism {
            underlying: u.clone(),
            inverse,
        })
    }

    pub fn hom_size(&self, r: Rank, s: Rank, bound: Option<usize>) -> Result<BigUint> {
        self.0.hom_size(r, s, bound)
    }

    /// Deterministic enumeration of `hom(T_r, T_s)` (up to `bound` for term theories).
    pub fn hom(&self, r: Rank, s: Rank, bound: Option<usize>) -> Result<Box<dyn Iterator<Item = Morphism> + Send + '_>> {
        self.0.hom_enumerate(r, s, bound)
    }

    /// Collect a hom-set, refusing when it exceeds `cutoff` elements.
    pub fn hom_vec(&self, r: Rank, s: Rank, bound: Option<usize>, cutoff: u64) -> Result<Vec<Morphism>> {
        let size = self.hom_size(r, s, bound)?;
        if size > BigUint::from(cutoff) {
            return Err(Error::cutoff(format!("{} hom({r},{s})", self.id()), size, cutoff));
        }
        Ok(self.hom(r, s, bound)?.collect())
    }

    pub fn random_hom(&self, r: Rank, s: Rank, bound: Option<usize>, rng: &mut dyn RngCore) -> Result<Morphism> {
        self.0.random_hom(r, s, bound, rng)
    }

    /// Faithful permutation realization of `Aut(T_r)`, refused above `cap` points.
    pub fn aut_realization(&self, r: Rank, cap: usize) -> Result<AutRealization> {
        let domain = self.0.aut_domain(r)?;
        if domain > BigUint::from(cap) {
            return Err(Error::RankTooLarge {
                rank: r,
                domain: domain.to_string(),
                cap,
            });
        }
        let domain = usize::try_from(&domain).expect("domain below cap");
        Ok(AutRealization {
            rank: r,
            domain,
            generators: self.0.aut_generators(r)?,
        })
    }

    pub fn to_perm(&self, u: &Automorphism) -> Result<Perm> {
        self.owns(&u.underlying)?;
        self.0.to_perm(&u.underlying)
    }

    pub fn from_perm(&self, r: Rank, p: &Perm) -> Result<Automorphism> {
        Ok(Automorphism {
            underlying: self.0.from_perm(r, p)?,
            inverse: self.0.from_perm(r, &p.inverse())?,
        })
    }

    /// Rules out `T_r ≅ T_s` when a computed cardinality invariant differs.
    pub fn iso_obstruction(&self, r: Rank, s: Rank) -> IsoVerdict {
        if r == s {
            return IsoVerdict::PossiblyIso;
        }
        if let Some(c) = self.0.declared_relations() {
            let related = c.period == 0 && r == s
                || c.period > 0 && r >= c.start && s >= c.start && r.abs_diff(s) % c.period == 0;
            if related {
                return IsoVerdict::PossiblyIso;
            }
        }
        match (self.0.iso_invariant(r), self.0.iso_invariant(s)) {
            (Some((name, a)), Some((_, b))) if a != b => {
                IsoVerdict::NotIso(format!("{name} differs: {a} != {b}"))
            }
            _ => IsoVerdict::PossiblyIso,
        }
    }
}
