use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{GroupHom, Perm, PermGroup};
use crate::abelian::{smith_normal_form, AbelianMap, FGAbelianGroup, IntMatrix};
use crate::error::{Error, Result};

pub const DEFAULT_QUOTIENT_CAP: u64 = 1_000_000;

/// `G / [G, G]` with an explicit projection onto invariant-factor coordinates.
#[derive(Clone, Debug)]
pub struct Abelianization {
    group: FGAbelianGroup,
    derived: PermGroup,
    reps: Vec<Perm>,
    coords: Vec<Vec<BigInt>>,
    basis_preimages: Vec<Perm>,
}

/// Coset enumeration of `G / [G, G]` followed by a Smith normal form of the
/// relations read off the coset graph.
pub fn abelianization(g: &PermGroup, cap: u64) -> Result<Abelianization> {
    let derived = g.derived_subgroup();
    let index = g.order() / derived.order();
    let index_u = index.to_u64().unwrap_or(u64::MAX);
    if index_u > cap {
        return Err(Error::QuotientTooLarge { index: index_u, cap });
    }
    let gens = g.generators();
    let k = gens.len();
    let n = g.degree();

    // Spanning tree of the coset graph; `paths[c]` counts generator steps from the root.
    let mut reps = vec![Perm::identity(n)];
    let mut rep_inv = vec![Perm::identity(n)];
    let mut paths: Vec<Vec<i64>> = vec![vec![0; k]];
    let mut relations: Vec<Vec<i64>> = Vec::new();
    let mut head = 0;
    while head < reps.len() {
        for (i, s) in gens.iter().enumerate() {
            let y = s.compose(&reps[head]);
            let found = (0..reps.len()).find(|&j| derived.contains(&rep_inv[j].compose(&y)));
            let mut step = paths[head].clone();
            step[i] += 1;
            match found {
                Some(j) => {
                    let rel: Vec<i64> = step.iter().zip(&paths[j]).map(|(a, b)| a - b).collect();
                    if rel.iter().any(|&x| x != 0) {
                        relations.push(rel);
                    }
                }
                None => {
                    rep_inv.push(y.inverse());
                    reps.push(y);
                    paths.push(step);
                }
            }
        }
        head += 1;
    }
    debug_assert_eq!(reps.len() as u64, index_u);

    let mut m = IntMatrix::zeros(k, relations.len());
    for (j, rel) in relations.iter().enumerate() {
        for (i, &x) in rel.iter().enumerate() {
            m.set(i, j, BigInt::from(x));
        }
    }
    let snf = smith_normal_form(&m);
    let diag: Vec<BigInt> = (0..k)
        .map(|i| if i < snf.rank { snf.d.get(i, i).clone() } else { BigInt::zero() })
        .collect();
    let kept: Vec<usize> = (0..k).filter(|&i| !diag[i].is_one()).collect();
    if kept.iter().any(|&i| diag[i].is_zero()) {
        return Err(Error::NotHomomorphism("finite group with an infinite abelianization".into()));
    }
    let moduli: Vec<num_bigint::BigUint> = kept.iter().map(|&i| diag[i].magnitude().clone()).collect();
    let group = FGAbelianGroup::from_moduli(&moduli);
    debug_assert_eq!(group.invariant_factors(), &moduli[..]);

    let coords = paths
        .iter()
        .map(|p| {
            let v: Vec<BigInt> = p.iter().map(|&x| BigInt::from(x)).collect();
            let y = snf.u.mul_vec(&v);
            kept.iter().map(|&i| y[i].mod_floor(&diag[i])).collect()
        })
        .collect();
    let basis_preimages = kept
        .iter()
        .map(|&i| {
            let col = snf.u_inv.column(i);
            let mut acc = Perm::identity(n);
            for (s, e) in gens.iter().zip(col) {
                let e = e.mod_floor(&BigInt::from(s.order())).to_i64().expect("small exponent");
                acc = acc.compose(&s.pow(e));
            }
            acc
        })
        .collect();
    Ok(Abelianization {
        group,
        derived,
        reps,
        coords,
        basis_preimages,
    })
}

impl Abelianization {
    pub fn group(&self) -> &FGAbelianGroup {
        &self.group
    }

    pub fn derived(&self) -> &PermGroup {
        &self.derived
    }

    pub fn index(&self) -> usize {
        self.reps.len()
    }

    /// Coordinates of the image of `x` in `G / [G, G]`.
    pub fn project(&self, x: &Perm) -> Result<Vec<BigInt>> {
        for (rep, c) in self.reps.iter().zip(&self.coords) {
            if self.derived.contains(&rep.inverse().compose(x)) {
                return Ok(c.clone());
            }
        }
        Err(Error::DomainMismatch(format!("{x:?} is not in the group")))
    }

    /// An element projecting onto the `i`-th basis vector.
    pub fn basis_preimage(&self, i: usize) -> &Perm {
        &self.basis_preimages[i]
    }
}

/// The map on abelianizations induced by `phi`.
pub fn induce_ab_map(phi: &GroupHom, source: &Abelianization, target: &Abelianization) -> Result<AbelianMap> {
    let k = source.group.ngens();
    let rows = target.group.ngens();
    let mut m = IntMatrix::zeros(rows, k);
    for j in 0..k {
        let img = phi.apply(&source.basis_preimages[j])?;
        for (i, x) in target.project(&img)?.into_iter().enumerate() {
            m.set(i, j, x);
        }
    }
    AbelianMap::new(source.group.clone(), target.group.clone(), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::naive;

    fn census(g: &PermGroup) -> Vec<u64> {
        let els = naive::closure(g.degree(), g.generators());
        let d = naive::derived_closure(g.degree(), &els);
        naive::abelian_quotient_by_census(&els, &d)
    }

    fn factors(a: &Abelianization) -> Vec<u64> {
        a.group().invariant_factors().iter().map(|d| d.to_u64().unwrap()).collect()
    }

    #[test]
    fn symmetric_groups_have_sign() {
        for n in 2..7 {
            let s = PermGroup::symmetric(n);
            let ab = abelianization(&s, DEFAULT_QUOTIENT_CAP).unwrap();
            assert_eq!(factors(&ab), vec![2]);
            let t = Perm::from_cycles(n, &[&[0, 1]]).unwrap();
            assert_eq!(ab.project(&t).unwrap(), vec![BigInt::one()]);
            assert_eq!(ab.project(&Perm::identity(n)).unwrap(), vec![BigInt::zero()]);
        }
    }

    #[test]
    fn wreath_product_c3_s2() {
        // C3 ≀ S2 on 6 points.
        let rot = Perm::from_cycles(6, &[&[0, 1, 2]]).unwrap();
        let swap = Perm::from_cycles(6, &[&[0, 3], &[1, 4], &[2, 5]]).unwrap();
        let g = PermGroup::new(6, vec![rot, swap]).unwrap();
        assert_eq!(g.order_u64(), Some(18));
        let ab = abelianization(&g, DEFAULT_QUOTIENT_CAP).unwrap();
        assert_eq!(factors(&ab), vec![6]);
        assert_eq!(factors(&ab), census(&g));
    }

    #[test]
    fn projection_is_additive_and_kills_commutators() {
        let a = Perm::from_cycles(4, &[&[0, 1]]).unwrap();
        let b = Perm::from_cycles(4, &[&[2, 3]]).unwrap();
        let c = Perm::from_cycles(4, &[&[0, 2, 1, 3]]).unwrap();
        let g = PermGroup::new(4, vec![a.clone(), b.clone(), c]).unwrap();
        let ab = abelianization(&g, DEFAULT_QUOTIENT_CAP).unwrap();
        assert_eq!(factors(&ab), census(&g));
        let els = g.elements(100).unwrap();
        for x in &els {
            for y in &els {
                let px = ab.project(x).unwrap();
                let py = ab.project(y).unwrap();
                let sum: Vec<BigInt> = px.iter().zip(&py).map(|(p, q)| p + q).collect();
                assert_eq!(ab.group().reduce(&sum), ab.project(&x.compose(y)).unwrap());
                assert!(ab.project(&x.commutator(y)).unwrap().iter().all(Zero::is_zero));
            }
        }
    }

    #[test]
    fn quotient_cap() {
        let c = Perm::from_cycles(7, &[&[0, 1, 2, 3, 4, 5, 6]]).unwrap();
        let g = PermGroup::new(7, vec![c]).unwrap();
        assert!(matches!(abelianization(&g, 5), Err(Error::QuotientTooLarge { index: 7, cap: 5 })));
    }

    #[test]
    fn doubling_kills_sign_tripling_keeps_it() {
        for (copies, zero) in [(2usize, true), (3, false)] {
            let s = PermGroup::symmetric(3);
            let big = PermGroup::symmetric(3 * copies);
            let images = s
                .generators()
                .iter()
                .map(|g| (1..copies).fold(g.clone(), |acc, _| acc.direct_sum(g)))
                .collect();
            let phi = GroupHom::new(s.clone(), big.clone(), images).unwrap();
            let a = abelianization(&s, DEFAULT_QUOTIENT_CAP).unwrap();
            let b = abelianization(&big, DEFAULT_QUOTIENT_CAP).unwrap();
            let m = induce_ab_map(&phi, &a, &b).unwrap();
            assert_eq!(m.is_zero(), zero);
            assert_eq!(m.is_iso(), !zero);
        }
    }

    #[test]
    fn trivial_group() {
        let g = PermGroup::trivial(3);
        let ab = abelianization(&g, DEFAULT_QUOTIENT_CAP).unwrap();
        assert!(ab.group().is_trivial());
    }
}
