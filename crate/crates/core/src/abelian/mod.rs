//! Finitely generated abelian groups in invariant-factor form and the maps
//! between them.

mod snf;
mod telescope;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use snf::{smith_normal_form, IntMatrix, SmithForm};
pub use telescope::{telescope_colimit, telescope_colimit_labelled, Pattern, TelescopeColimitReport, DEFAULT_WINDOW};

/// `Z^free_rank ⊕ Z/d_1 ⊕ ... ⊕ Z/d_k` with `2 <= d_1 | d_2 | ... | d_k`.
///
/// Coordinates of elements list the torsion summands first, then the free ones.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FGAbelianGroup {
    free_rank: usize,
    invariant_factors: Vec<BigUint>,
}

impl FGAbelianGroup {
    pub fn trivial() -> Self {
        FGAbelianGroup {
            free_rank: 0,
            invariant_factors: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        FGAbelianGroup {
            free_rank: rank,
            invariant_factors: Vec::new(),
        }
    }

    /// `Z/n`; `n = 0` gives `Z`, `n = 1` the trivial group.
    pub fn cyclic(n: u64) -> Self {
        match n {
            0 => FGAbelianGroup::free(1),
            1 => FGAbelianGroup::trivial(),
            _ => FGAbelianGroup {
                free_rank: 0,
                invariant_factors: vec![BigUint::from(n)],
            },
        }
    }

    /// `Z/m_1 ⊕ ... ⊕ Z/m_k` for arbitrary moduli (0 meaning `Z`), normalized.
    pub fn from_moduli<T: Into<BigUint> + Clone>(moduli: &[T]) -> Self {
        let k = moduli.len();
        let mut m = IntMatrix::zeros(k, k);
        for (i, x) in moduli.iter().enumerate() {
            m.set(i, i, BigInt::from(x.clone().into()));
        }
        cokernel(&m)
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[BigUint] {
        &self.invariant_factors
    }

    /// Number of coordinates of an element.
    pub fn ngens(&self) -> usize {
        self.invariant_factors.len() + self.free_rank
    }

    /// Modulus of each coordinate, `0` for free ones.
    pub fn moduli(&self) -> Vec<BigUint> {
        let mut out = self.invariant_factors.clone();
        out.extend(std::iter::repeat_n(BigUint::zero(), self.free_rank));
        out
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_cyclic(&self) -> bool {
        self.ngens() <= 1
    }

    pub fn order(&self) -> Option<BigUint> {
        self.is_finite()
            .then(|| self.invariant_factors.iter().product())
    }

    pub fn direct_sum(&self, other: &FGAbelianGroup) -> FGAbelianGroup {
        let mut moduli = self.moduli();
        moduli.extend(other.moduli());
        FGAbelianGroup::from_moduli(&moduli)
    }

    /// Reduce a coordinate vector into canonical representatives.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.ngens(), "coordinate vector length");
        v.iter()
            .zip(self.moduli())
            .map(|(x, m)| reduce_mod(x, &m))
            .collect()
    }
}

pub(crate) fn reduce_mod(x: &BigInt, m: &BigUint) -> BigInt {
    if m.is_zero() {
        x.clone()
    } else {
        x.mod_floor(&BigInt::from(m.clone()))
    }
}

pub(crate) fn big_to_json(x: &BigUint) -> serde_json::Value {
    match x.to_u64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::String(x.to_string()),
    }
}

impl Serialize for FGAbelianGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let factors: Vec<serde_json::Value> = self.invariant_factors.iter().map(big_to_json).collect();
        let mut s = serializer.serialize_struct("FGAbelianGroup", 2)?;
        s.serialize_field("free_rank", &self.free_rank)?;
        s.serialize_field("invariant_factors", &factors)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for FGAbelianGroup {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            free_rank: usize,
            invariant_factors: Vec<serde_json::Value>,
        }
        let r = Repr::deserialize(deserializer)?;
        let mut moduli: Vec<BigUint> = Vec::new();
        for v in r.invariant_factors {
            let parsed = match &v {
                serde_json::Value::Number(n) => n.as_u64().map(BigUint::from),
                serde_json::Value::String(s) => s.parse().ok(),
                _ => None,
            };
            moduli.push(parsed.ok_or_else(|| serde::de::Error::custom(format!("bad invariant factor {v}")))?);
        }
        moduli.extend(std::iter::repeat_n(BigUint::zero(), r.free_rank));
        Ok(FGAbelianGroup::from_moduli(&moduli))
    }
}

impl fmt::Display for FGAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            n => parts.push(format!("Z^{n}")),
        }
        parts.extend(self.invariant_factors.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

impl fmt::Debug for FGAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Cokernel of an integer matrix: generators are rows, relations are columns.
pub fn cokernel(m: &IntMatrix) -> FGAbelianGroup {
    let s = smith_normal_form(m);
    let diag = s.diagonal();
    let invariant_factors = diag
        .iter()
        .take(s.rank)
        .filter(|d| !d.is_one())
        .map(|d| d.magnitude().clone())
        .collect();
    FGAbelianGroup {
        free_rank: m.rows() - s.rank,
        invariant_factors,
    }
}

/// Quotient of `Z^generators` by the listed relation vectors.
pub fn quotient_of_presentation(generators: usize, relations: &[Vec<i64>]) -> FGAbelianGroup {
    let mut m = IntMatrix::zeros(generators, relations.len());
    for (j, rel) in relations.iter().enumerate() {
        assert_eq!(rel.len(), generators, "relation length");
        for (i, &x) in rel.iter().enumerate() {
            m.set(i, j, BigInt::from(x));
        }
    }
    cokernel(&m)
}

/// A homomorphism given on coordinates: column `j` is the image of the
/// `j`-th source generator.
#[derive(Clone, PartialEq, Eq)]
pub struct AbelianMap {
    source: FGAbelianGroup,
    target: FGAbelianGroup,
    matrix: IntMatrix,
}

impl fmt::Debug for AbelianMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} {:?}", self.source, self.target, self.matrix)
    }
}

impl AbelianMap {
    /// Reduces entries and checks that source relations map to zero.
    pub fn new(source: FGAbelianGroup, target: FGAbelianGroup, matrix: IntMatrix) -> Result<Self> {
        if matrix.rows() != target.ngens() || matrix.cols() != source.ngens() {
            return Err(Error::RankMismatch(format!(
                "matrix {}x{} for a map {} -> {}",
                matrix.rows(),
                matrix.cols(),
                source,
                target
            )));
        }
        let tmod = target.moduli();
        let smod = source.moduli();
        let mut reduced = IntMatrix::zeros(matrix.rows(), matrix.cols());
        for i in 0..matrix.rows() {
            for j in 0..matrix.cols() {
                let x = reduce_mod(matrix.get(i, j), &tmod[i]);
                if !smod[j].is_zero() {
                    let img = reduce_mod(&(&x * BigInt::from(smod[j].clone())), &tmod[i]);
                    if !img.is_zero() {
                        return Err(Error::InvalidMorphism(format!(
                            "generator {j} of order {} does not map to an element of dividing order",
                            smod[j]
                        )));
                    }
                }
                reduced.set(i, j, x);
            }
        }
        Ok(AbelianMap {
            source,
            target,
            matrix: reduced,
        })
    }

    pub fn identity(a: &FGAbelianGroup) -> Self {
        AbelianMap {
            source: a.clone(),
            target: a.clone(),
            matrix: IntMatrix::identity(a.ngens()),
        }
    }

    pub fn zero(source: &FGAbelianGroup, target: &FGAbelianGroup) -> Self {
        AbelianMap {
            source: source.clone(),
            target: target.clone(),
            matrix: IntMatrix::zeros(target.ngens(), source.ngens()),
        }
    }

    /// Multiplication by `k` on a group.
    pub fn scalar(a: &FGAbelianGroup, k: i64) -> Self {
        let mut m = IntMatrix::zeros(a.ngens(), a.ngens());
        for i in 0..a.ngens() {
            m.set(i, i, BigInt::from(k));
        }
        AbelianMap::new(a.clone(), a.clone(), m).expect("scalar maps are well defined")
    }

    pub fn source(&self) -> &FGAbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &FGAbelianGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.target.reduce(&self.matrix.mul_vec(v))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AbelianMap) -> Result<AbelianMap> {
        if other.target != self.source {
            return Err(Error::RankMismatch(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.source, self.target, other.source, other.target
            )));
        }
        AbelianMap::new(
            other.source.clone(),
            self.target.clone(),
            self.matrix.mul(&other.matrix),
        )
    }

    pub fn is_zero(&self) -> bool {
        (0..self.matrix.rows()).all(|i| (0..self.matrix.cols()).all(|j| self.matrix.get(i, j).is_zero()))
    }

    /// Surjective onto the target.
    pub fn is_surjective(&self) -> bool {
        let rows = self.target.ngens();
        let tmod = self.target.moduli();
        let extra = tmod.iter().filter(|m| !m.is_zero()).count();
        let mut m = IntMatrix::zeros(rows, self.matrix.cols() + extra);
        for i in 0..rows {
            for j in 0..self.matrix.cols() {
                m.set(i, j, self.matrix.get(i, j).clone());
            }
        }
        let mut col = self.matrix.cols();
        for (i, d) in tmod.iter().enumerate() {
            if !d.is_zero() {
                m.set(i, col, BigInt::from(d.clone()));
                col += 1;
            }
        }
        cokernel(&m).is_trivial()
    }

    /// Isomorphism test. Finitely generated abelian groups are Hopfian, so a
    /// surjective endomorphism is bijective.
    pub fn is_iso(&self) -> bool {
        self.source == self.target && self.is_surjective()
    }

    /// Human-readable classification used in reports.
    pub fn classify(&self) -> &'static str {
        if self.is_zero() {
            "zero"
        } else if self.is_iso() {
            if *self == AbelianMap::identity(&self.source) {
                "identity"
            } else {
                "iso"
            }
        } else {
            "other"
        }
    }
}

impl Serialize for AbelianMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.matrix.rows())
            .map(|i| self.matrix.row(i).iter().map(ToString::to_string).collect())
            .collect();
        let rows: Vec<Vec<serde_json::Value>> = rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| match x.parse::<i64>() {
                        Ok(v) => serde_json::Value::from(v),
                        Err(_) => serde_json::Value::String(x),
                    })
                    .collect()
            })
            .collect();
        let mut s = serializer.serialize_struct("AbelianMap", 4)?;
        s.serialize_field("source", &self.source)?;
        s.serialize_field("target", &self.target)?;
        s.serialize_field("matrix", &rows)?;
        s.serialize_field("kind", self.classify())?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64) -> FGAbelianGroup {
        FGAbelianGroup::cyclic(n)
    }

    #[test]
    fn cokernels() {
        assert_eq!(quotient_of_presentation(1, &[vec![4]]), z(4));
        assert_eq!(quotient_of_presentation(1, &[]), FGAbelianGroup::free(1));
        assert_eq!(quotient_of_presentation(1, &[vec![1]]), FGAbelianGroup::trivial());
        assert_eq!(quotient_of_presentation(1, &[vec![4], vec![6]]), z(2));
    }

    #[test]
    fn normal_form_merges_coprime_parts() {
        let g = FGAbelianGroup::from_moduli(&[2u64, 3]);
        assert_eq!(g, z(6));
        let g = FGAbelianGroup::from_moduli(&[4u64, 6, 0]);
        assert_eq!(g.to_string(), "Z ⊕ Z/2 ⊕ Z/12");
        assert_eq!(g.moduli().len(), 3);
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_value(z(4)).unwrap();
        assert_eq!(v, serde_json::json!({"free_rank": 0, "invariant_factors": [4]}));
        let back: FGAbelianGroup = serde_json::from_value(v).unwrap();
        assert_eq!(back, z(4));
    }

    #[test]
    fn maps_on_z2() {
        let a = z(2);
        assert!(AbelianMap::scalar(&a, 2).is_zero());
        assert!(AbelianMap::scalar(&a, 3).is_iso());
        assert_eq!(AbelianMap::scalar(&a, 3), AbelianMap::identity(&a));
        let bad = AbelianMap::new(z(2), z(3), IntMatrix::from_rows(&[vec![1]], 1));
        assert!(bad.is_err());
        let into_z4 = AbelianMap::new(z(2), z(4), IntMatrix::from_rows(&[vec![2]], 1)).unwrap();
        assert!(!into_z4.is_iso() && !into_z4.is_zero());
    }

    #[test]
    fn free_isomorphisms() {
        let zz = FGAbelianGroup::free(1);
        assert!(AbelianMap::scalar(&zz, -1).is_iso());
        assert!(!AbelianMap::scalar(&zz, 2).is_iso());
    }
}
