use std::path::Path;

use num_bigint::BigUint;
use num_traits::Pow;
use rand::RngCore;
use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::kernel::setmaps::{self, Odometer};
use crate::kernel::{Capabilities, Morphism, MorphismData, Rank, Side, Theory, TheoryId};
use crate::perm::Perm;

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupTable {
    pub name: String,
    pub order: usize,
    /// `table[a][b]` is the product `a·b`.
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    pub inverse: Vec<usize>,
    pub names: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct GroupFile {
    order: usize,
    table: Vec<Vec<usize>>,
    names: Option<Vec<String>>,
}

impl FiniteGroupTable {
    /// Check the group laws and derive identity and inverses.
    pub fn new(name: impl Into<String>, table: Vec<Vec<usize>>, names: Option<Vec<String>>) -> Result<Self> {
        let n = table.len();
        let bad = |msg: String| Err(Error::InvalidGroupTable(msg));
        if n == 0 {
            return bad("empty table".into());
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return bad(format!("row {a} has length {}, expected {n}", row.len()));
            }
            if let Some(&x) = row.iter().find(|&&x| x >= n) {
                return bad(format!("entry {x} in row {a} out of range"));
            }
        }
        if let Some(names) = &names {
            if names.len() != n {
                return bad(format!("{} names for {n} elements", names.len()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad(format!("not associative at ({a},{b},{c})"));
                    }
                }
            }
        }
        let Some(identity) = (0..n).find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a)) else {
            return bad("no identity element".into());
        };
        let mut inverse = Vec::with_capacity(n);
        for a in 0..n {
            match (0..n).find(|&b| table[a][b] == identity && table[b][a] == identity) {
                Some(b) => inverse.push(b),
                None => return bad(format!("element {a} has no inverse")),
            }
        }
        Ok(FiniteGroupTable {
            name: name.into(),
            order: n,
            table,
            identity,
            inverse,
            names,
        })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnsupportedParameter("cyclic group of order 0".into()));
        }
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::new(format!("c{n}"), table, None)
    }

    /// Σ(3) on its six elements in lexicographic order of image lists.
    pub fn s3() -> Self {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let idx = |p: [usize; 3]| perms.iter().position(|&q| q == p).expect("closed");
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect();
        let names = perms.iter().map(|p| format!("{}{}{}", p[0], p[1], p[2])).collect();
        Self::new("s3", table, Some(names)).expect("s3 is a group")
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "c2" => Self::cyclic(2),
            "c3" => Self::cyclic(3),
            "c4" => Self::cyclic(4),
            "s3" => Ok(Self::s3()),
            _ => Err(Error::Parse(format!("unknown group {name:?}; built-ins are c2, c3, c4, s3"))),
        }
    }

    pub fn from_json(name: impl Into<String>, value: &Value) -> Result<Self> {
        let file: GroupFile = serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidGroupTable(format!("malformed group file: {e}")))?;
        if file.order != file.table.len() {
            return Err(Error::InvalidGroupTable(format!(
                "declared order {} but table has {} rows",
                file.order,
                file.table.len()
            )));
        }
        Self::new(name, file.table, file.names)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)?;
        Self::from_json(format!("@{}", path.display()), &value)
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    /// Right multiplication by `a` as a permutation of the elements.
    fn right_mul(&self, a: usize) -> Perm {
        Perm::from_images_unchecked((0..self.order).map(|h| self.mul(h, a)).collect())
    }
}

/// Free `G`-sets `∐_r G`; a morphism sends generator `i` to `(orbit, element)`.
#[derive(Debug)]
pub struct GSetsTheory {
    id: TheoryId,
    group: FiniteGroupTable,
}

impl GSetsTheory {
    pub fn new(group: FiniteGroupTable) -> Self {
        GSetsTheory {
            id: format!("gsets:{}", group.name).into(),
            group,
        }
    }

    pub fn group(&self) -> &FiniteGroupTable {
        &self.group
    }

    fn orbits(&self, src: Rank, dst: Rank, o: Vec<(usize, usize)>) -> Morphism {
        Morphism::new(self.id.clone(), src, dst, MorphismData::Orbits(o))
    }

    fn data(m: &Morphism) -> &[(usize, usize)] {
        match &m.data {
            MorphismData::Orbits(o) => o,
            _ => unreachable!("checked by the handle"),
        }
    }

    fn from_digits(&self, src: Rank, dst: Rank, digits: &[usize]) -> Morphism {
        let n = self.group.order;
        self.orbits(src, dst, digits.iter().map(|&d| (d / n, d % n)).collect())
    }
}

impl Theory for GSetsTheory {
    fn id(&self) -> &TheoryId {
        &self.id
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::FINITE
    }

    fn check_data(&self, src: Rank, dst: Rank, data: &MorphismData) -> Result<()> {
        let MorphismData::Orbits(o) = data else {
            return Err(Error::InvalidMorphism(format!("{} expects (orbit, element) pairs", self.id)));
        };
        if o.len() != src {
            return Err(Error::InvalidMorphism(format!("{} pairs for {src} generators", o.len())));
        }
        match o.iter().find(|&&(j, a)| j >= dst || a >= self.group.order) {
            Some(p) => Err(Error::InvalidMorphism(format!("pair {p:?} out of range"))),
            None => Ok(()),
        }
    }

    fn decode_data(&self, value: &Value) -> Result<MorphismData> {
        let o: Vec<(usize, usize)> = serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidMorphism(format!("expected [[orbit, element], ..]: {e}")))?;
        Ok(MorphismData::Orbits(o))
    }

    fn identity(&self, r: Rank) -> Result<Morphism> {
        Ok(self.orbits(r, r, (0..r).map(|i| (i, self.group.identity)).collect()))
    }

    fn raw_compose(&self, g: &Morphism, f: &Morphism) -> Morphism {
        let gd = Self::data(g);
        let o = Self::data(f)
            .iter()
            .map(|&(j, a)| {
                let (k, b) = gd[j];
                (k, self.group.mul(a, b))
            })
            .collect();
        self.orbits(f.src, g.dst, o)
    }

    fn injection(&self, r: Rank, s: Rank, side: Side) -> Result<Morphism> {
        let e = self.group.identity;
        Ok(match side {
            Side::Left => self.orbits(r, r + s, (0..r).map(|i| (i, e)).collect()),
            Side::Right => self.orbits(s, r + s, (r..r + s).map(|i| (i, e)).collect()),
        })
    }

    fn raw_copair(&self, f: &Morphism, g: &Morphism) -> Morphism {
        let mut o = Self::data(f).to_vec();
        o.extend_from_slice(Self::data(g));
        self.orbits(f.src + g.src, f.dst, o)
    }

    fn hom_size(&self, r: Rank, s: Rank, _bound: Option<usize>) -> Result<BigUint> {
        Ok(Pow::pow(BigUint::from(s * self.group.order), r))
    }

    fn hom_enumerate<'a>(
        &'a self,
        r: Rank,
        s: Rank,
        _bound: Option<usize>,
    ) -> Result<Box<dyn Iterator<Item = Morphism> + Send + 'a>> {
        let mut odo = Odometer::new(r, s * self.group.order);
        Ok(Box::new(std::iter::from_fn(move || {
            odo.next().map(|d| self.from_digits(r, s, &d))
        })))
    }

    fn random_hom(&self, r: Rank, s: Rank, _bound: Option<usize>, rng: &mut dyn RngCore) -> Result<Morphism> {
        let base = (s * self.group.order) as u64;
        if base == 0 && r > 0 {
            return Err(Error::InvalidMorphism(format!("hom({r},{s}) is empty")));
        }
        let digits: Vec<usize> = (0..r).map(|_| (rng.next_u64() % base) as usize).collect();
        Ok(self.from_digits(r, s, &digits))
    }

    fn aut_domain(&self, r: Rank) -> Result<BigUint> {
        Ok(BigUint::from(r * self.group.order))
    }

    /// Permutations of the orbits together with each non-identity element
    /// acting on the first orbit.
    fn aut_generators(&self, r: Rank) -> Result<Vec<Perm>> {
        let g = &self.group;
        let mut gens = Vec::new();
        for sigma in setmaps::symmetric_generators(r) {
            let o: Vec<(usize, usize)> = (0..r).map(|i| (sigma.apply(i), g.identity)).collect();
            gens.push(self.to_perm(&self.orbits(r, r, o))?);
        }
        if r > 0 {
            for a in (0..g.order).filter(|&a| a != g.identity) {
                let mut o: Vec<(usize, usize)> = (0..r).map(|i| (i, g.identity)).collect();
                o[0] = (0, a);
                gens.push(self.to_perm(&self.orbits(r, r, o))?);
            }
        }
        Ok(gens)
    }

    /// Action on the `r·|G|` points `(i, h)`, numbered `i·|G| + h`.
    fn to_perm(&self, u: &Morphism) -> Result<Perm> {
        let n = self.group.order;
        let o = Self::data(u);
        let mut images = Vec::with_capacity(o.len() * n);
        for &(j, a) in o {
            images.extend(self.group.right_mul(a).images().iter().map(|&h| j * n + h));
        }
        Perm::from_images(images).map_err(|_| Error::NotAutomorphism(format!("{u:?} is not bijective")))
    }

    fn from_perm(&self, r: Rank, p: &Perm) -> Result<Morphism> {
        let n = self.group.order;
        if p.degree() != r * n {
            return Err(Error::DomainMismatch(format!("permutation of {} points, expected {}", p.degree(), r * n)));
        }
        let o: Vec<(usize, usize)> = (0..r)
            .map(|i| {
                let y = p.apply(i * n + self.group.identity);
                (y / n, y % n)
            })
            .collect();
        let u = self.orbits(r, r, o);
        if self.to_perm(&u)? != *p {
            return Err(Error::NotAutomorphism(format!("{p:?} is not G-equivariant")));
        }
        Ok(u)
    }

    fn iso_invariant(&self, r: Rank) -> Option<(&'static str, BigUint)> {
        Some(("free G-set cardinality", BigUint::from(r * self.group.order)))
    }
}
