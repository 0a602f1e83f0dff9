use num_bigint::BigUint;
use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::k1::{k1, K1Report};
use super::{aut_group, stabilization_hom, KConfig};
use crate::abelian::{big_to_json, FGAbelianGroup};
use crate::error::Result;
use crate::kernel::{Automorphism, Rank, TheoryHandle};
use crate::morita::matrix_theory;
use crate::perm::PermGroup;

fn ser_big<S: Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    big_to_json(x).serialize(s)
}

fn groups(t: &TheoryHandle, max_rank: Rank, cfg: &KConfig) -> Result<Vec<PermGroup>> {
    (0..=max_rank)
        .into_par_iter()
        .map(|r| aut_group(t, r, cfg.domain_cap))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationStep {
    pub from: Rank,
    pub to: Rank,
    #[serde(serialize_with = "ser_big")]
    pub source_order: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub image_order: BigUint,
    pub injective: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationAudit {
    pub theory: String,
    pub steps: Vec<StabilizationStep>,
    pub passed: bool,
}

/// Check that every stabilization `Aut(T_r) -> Aut(T_{r+1})`, `r < max_rank`, is injective.
pub fn stabilization_audit(t: &TheoryHandle, max_rank: Rank, cfg: &KConfig) -> Result<StabilizationAudit> {
    let gs = groups(t, max_rank, cfg)?;
    let steps = (0..max_rank)
        .into_par_iter()
        .map(|r| {
            let phi = stabilization_hom(t, r, &gs[r], &gs[r + 1])?;
            let image_order = phi.image_order()?;
            Ok(StabilizationStep {
                from: r,
                to: r + 1,
                source_order: gs[r].order().clone(),
                injective: image_order == *gs[r].order(),
                image_order,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilizationAudit {
        theory: t.id().to_string(),
        passed: steps.iter().all(|s| s.injective),
        steps,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PerfectnessRow {
    pub rank: Rank,
    #[serde(serialize_with = "ser_big")]
    pub aut_order: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub derived_order: BigUint,
    pub aut_perfect: bool,
    pub derived_perfect: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PerfectnessReport {
    pub theory: String,
    pub rows: Vec<PerfectnessRow>,
}

/// Per rank: is `Aut(T_r)` perfect, and is its commutator subgroup perfect?
pub fn perfectness_probe(t: &TheoryHandle, max_rank: Rank, cfg: &KConfig) -> Result<PerfectnessReport> {
    let gs = groups(t, max_rank, cfg)?;
    let rows = gs
        .par_iter()
        .enumerate()
        .map(|(r, g)| {
            let d = g.derived_subgroup();
            let dd = d.derived_subgroup();
            PerfectnessRow {
                rank: r,
                aut_order: g.order().clone(),
                aut_perfect: d.order() == g.order(),
                derived_perfect: dd.order() == d.order(),
                derived_order: d.order().clone(),
            }
        })
        .collect();
    Ok(PerfectnessReport {
        theory: t.id().to_string(),
        rows,
    })
}

/// A uniformly random element of `Aut(T_r)`.
pub fn random_automorphism<R: Rng + ?Sized>(
    t: &TheoryHandle,
    r: Rank,
    cfg: &KConfig,
    rng: &mut R,
) -> Result<Automorphism> {
    let g = aut_group(t, r, cfg.domain_cap)?;
    t.from_perm(r, &g.random_element(rng))
}

fn commutator(t: &TheoryHandle, a: &Automorphism, b: &Automorphism) -> Result<Automorphism> {
    let ab = t.compose_aut(a, b)?;
    let ab_ai = t.compose_aut(&ab, &a.inverted())?;
    t.compose_aut(&ab_ai, &b.inverted())
}

#[derive(Clone, Debug)]
pub struct WhiteheadWitness {
    pub rank: Rank,
    /// `w + id`.
    pub a: Automorphism,
    /// The symmetry of `T_r + T_r`.
    pub b: Automorphism,
    /// Whether `a b a⁻¹ b⁻¹ = w + w⁻¹` holds on the nose.
    pub verified: bool,
}

/// Exhibit `w + w⁻¹` as the commutator of `w + id` with the swap.
pub fn whitehead_witness(t: &TheoryHandle, w: &Automorphism) -> Result<WhiteheadWitness> {
    let r = w.rank();
    let a = t.stabilize(w, r)?;
    let b = t.swap(r)?;
    let lhs = commutator(t, &a, &b)?;
    let rhs = t.sum_aut(w, &w.inverted())?;
    Ok(WhiteheadWitness {
        rank: r,
        verified: lhs.underlying == rhs.underlying && lhs.inverse == rhs.inverse,
        a,
        b,
    })
}

/// `[u, v] + id_{2r} = [u + u⁻¹ + id_r, v + id_r + v⁻¹]` for `u, v` in `Aut(T_r)`.
pub fn thrice_space_check(t: &TheoryHandle, u: &Automorphism, v: &Automorphism) -> Result<bool> {
    let r = u.rank();
    let lhs = t.stabilize(&commutator(t, u, v)?, 2 * r)?;
    let id = t.identity_aut(r)?;
    let uu = t.sum_aut(&t.sum_aut(u, &u.inverted())?, &id)?;
    let vv = t.sum_aut(&t.sum_aut(v, &id)?, &v.inverted())?;
    let rhs = commutator(t, &uu, &vv)?;
    Ok(lhs.underlying == rhs.underlying)
}

#[derive(Clone, Debug, Serialize)]
pub struct MatrixInvarianceRow {
    pub rank: Rank,
    pub base_rank: Rank,
    #[serde(serialize_with = "ser_big")]
    pub matrix_aut_order: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub base_aut_order: BigUint,
    pub abelianizations_equal: bool,
    /// The map to the next stage agrees with the composite of `n` base maps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map_equal: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MatrixInvarianceReport {
    pub theory: String,
    pub matrix_theory: String,
    pub n: usize,
    pub base_value: Option<FGAbelianGroup>,
    pub matrix_value: Option<FGAbelianGroup>,
    pub rows: Vec<MatrixInvarianceRow>,
    pub colimits_equal: bool,
    pub passed: bool,
    #[serde(skip)]
    pub base: K1Report,
    #[serde(skip)]
    pub matrix: K1Report,
}

/// Compare `K_1(T)` on ranks `0..=max_rank` with `K_1(M_n T)` on ranks
/// `0..=max_rank/n`, stage by stage and map by map.
pub fn matrix_invariance_check(
    t: &TheoryHandle,
    n: usize,
    max_rank: Rank,
    window: usize,
    cfg: &KConfig,
) -> Result<MatrixInvarianceReport> {
    let m = matrix_theory(t, n)?;
    let base = k1(t, max_rank, window, cfg)?;
    let top = max_rank / n;
    let mat = k1(&m, top, window.min(top + 1), cfg)?;
    let mut rows = Vec::new();
    for r in 0..=top {
        let ms = &mat.stages[r];
        let bs = &base.stages[n * r];
        let map_equal = if r < top {
            let mut acc = base.maps()[n * r].clone();
            for f in &base.maps()[n * r + 1..n * r + n] {
                acc = f.compose(&acc)?;
            }
            Some(acc == mat.maps()[r])
        } else {
            None
        };
        rows.push(MatrixInvarianceRow {
            rank: r,
            base_rank: n * r,
            matrix_aut_order: ms.aut_order.clone(),
            base_aut_order: bs.aut_order.clone(),
            abelianizations_equal: ms.abelianization == bs.abelianization,
            map_equal,
        });
    }
    let colimits_equal = base.value.is_some() && base.value == mat.value;
    let passed = colimits_equal
        && rows.iter().all(|row| {
            row.matrix_aut_order == row.base_aut_order && row.abelianizations_equal && row.map_equal != Some(false)
        });
    Ok(MatrixInvarianceReport {
        theory: t.id().to_string(),
        matrix_theory: m.id().to_string(),
        n,
        base_value: base.value.clone(),
        matrix_value: mat.value.clone(),
        rows,
        colimits_equal,
        passed,
        base,
        matrix: mat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::make_theory;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sets_stabilization_injective() {
        let a = stabilization_audit(&make_theory("sets").unwrap(), 5, &KConfig::default()).unwrap();
        assert!(a.passed);
        assert_eq!(a.steps.len(), 5);
    }

    #[test]
    fn symmetric_group_perfectness() {
        let p = perfectness_probe(&make_theory("sets").unwrap(), 5, &KConfig::default()).unwrap();
        assert!(!p.rows[5].aut_perfect);
        assert!(p.rows[5].derived_perfect);
        assert!(!p.rows[4].derived_perfect);
        assert!(p.rows[1].aut_perfect);
    }

    #[test]
    fn whitehead_and_thrice_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cfg = KConfig::default();
        for spec in ["sets", "post:2", "mod:3", "gsets:s3"] {
            let t = make_theory(spec).unwrap();
            for _ in 0..4 {
                let w = random_automorphism(&t, 2, &cfg, &mut rng).unwrap();
                let v = random_automorphism(&t, 2, &cfg, &mut rng).unwrap();
                assert!(whitehead_witness(&t, &w).unwrap().verified, "{spec}");
                assert!(thrice_space_check(&t, &w, &v).unwrap(), "{spec}");
            }
        }
    }

    #[test]
    fn matrix_sets() {
        let rep = matrix_invariance_check(&make_theory("sets").unwrap(), 2, 6, 3, &KConfig::default()).unwrap();
        assert!(rep.passed, "{rep:?}");
    }
}
