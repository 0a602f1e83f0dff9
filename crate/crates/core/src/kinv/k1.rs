use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::{aut_group, kill_torsion, stabilization_hom, KConfig, ReferenceStems};
use crate::abelian::{big_to_json, telescope_colimit_labelled, AbelianMap, FGAbelianGroup, TelescopeColimitReport};
use crate::error::Result;
use crate::kernel::{Rank, TheoryHandle};
use crate::perm::{abelianization, induce_ab_map, Abelianization, PermGroup};

fn ser_big<S: Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    big_to_json(x).serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct StageRow {
    pub rank: Rank,
    pub domain: usize,
    #[serde(serialize_with = "ser_big")]
    pub aut_order: BigUint,
    pub abelianization: FGAbelianGroup,
    /// Classification of the induced map to the next stage.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map_to_next: Option<&'static str>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheck {
    pub label: String,
    pub expected: FGAbelianGroup,
    pub agrees: bool,
    pub source: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct K1Report {
    pub theory: String,
    pub invariant: &'static str,
    pub value: Option<FGAbelianGroup>,
    pub pattern: String,
    pub window: [usize; 2],
    pub stages: Vec<StageRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crosscheck: Option<CrossCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hint: Option<String>,
    #[serde(skip)]
    pub telescope: TelescopeColimitReport,
    #[serde(skip)]
    pub groups: Vec<PermGroup>,
    pub evidence: String,
}

impl K1Report {
    pub fn maps(&self) -> &[AbelianMap] {
        &self.telescope.maps
    }
}

pub(crate) struct Stage {
    pub group: PermGroup,
    pub ab: Abelianization,
}

pub(crate) fn stages(t: &TheoryHandle, max_rank: Rank, cfg: &KConfig) -> Result<Vec<Stage>> {
    (0..=max_rank)
        .into_par_iter()
        .map(|r| {
            let group = aut_group(t, r, cfg.domain_cap)?;
            let ab = abelianization(&group, cfg.quotient_cap)?;
            Ok(Stage { group, ab })
        })
        .collect()
}

pub(crate) fn stage_maps(t: &TheoryHandle, st: &[Stage]) -> Result<Vec<AbelianMap>> {
    (0..st.len().saturating_sub(1))
        .into_par_iter()
        .map(|r| {
            let phi = stabilization_hom(t, r, &st[r].group, &st[r + 1].group)?;
            induce_ab_map(&phi, &st[r].ab, &st[r + 1].ab)
        })
        .collect()
}

/// `K_1(T) = colim_r Aut(T_r)^ab` along stabilization, with the colimit read
/// off the last `window` stages of ranks `0..=max_rank`.
pub fn k1(t: &TheoryHandle, max_rank: Rank, window: usize, cfg: &KConfig) -> Result<K1Report> {
    let st = stages(t, max_rank, cfg)?;
    let maps = stage_maps(t, &st)?;
    let tel = telescope_colimit_labelled(st.iter().map(|s| s.ab.group().clone()).collect(), maps, window, 0)?;
    let rows = st
        .iter()
        .enumerate()
        .map(|(r, s)| StageRow {
            rank: r,
            domain: s.group.degree(),
            aut_order: s.group.order().clone(),
            abelianization: s.ab.group().clone(),
            map_to_next: tel.maps.get(r).map(AbelianMap::classify),
        })
        .collect();
    let crosscheck = cross_check(t.id(), &st, tel.colimit.as_ref());
    let hint = post_arity(t.id()).map(|v| {
        format!("stabilization acts as a {v}-fold block sum, so the stage maps look like multiplication by {v}")
    });
    Ok(K1Report {
        theory: t.id().to_string(),
        invariant: "k1",
        value: tel.colimit.clone(),
        pattern: tel.pattern.name().to_string(),
        window: tel.window,
        stages: rows,
        crosscheck,
        hint,
        evidence: tel.evidence.clone(),
        groups: st.into_iter().map(|s| s.group).collect(),
        telescope: tel,
    })
}

/// Stable `H_1` of the automorphism groups; the same colimit as [`k1`].
pub fn stable_h1(t: &TheoryHandle, max_rank: Rank, window: usize, cfg: &KConfig) -> Result<K1Report> {
    let mut rep = k1(t, max_rank, window, cfg)?;
    rep.invariant = "h1";
    Ok(rep)
}

fn post_arity(id: &str) -> Option<u64> {
    if id == "boole" {
        return Some(2);
    }
    id.strip_prefix("post:")?.parse().ok()
}

fn cross_check(id: &str, st: &[Stage], value: Option<&FGAbelianGroup>) -> Option<CrossCheck> {
    let stems = ReferenceStems::get();
    let (label, expected) = if id == "sets" {
        ("pi_1 of the sphere spectrum".to_string(), stems.pi1.clone())
    } else if let Some(v) = post_arity(id) {
        (
            format!("pi_1 of the sphere spectrum with {v}-power torsion removed"),
            kill_torsion(&stems.pi1, v),
        )
    } else if id.starts_with("gsets:") && st.len() > 1 {
        let g_ab = st[1].ab.group().clone();
        (
            format!("pi_1 of the sphere spectrum plus G^ab = {g_ab}"),
            stems.pi1.direct_sum(&g_ab),
        )
    } else {
        return None;
    };
    Some(CrossCheck {
        label,
        agrees: value == Some(&expected),
        expected,
        source: stems.provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::make_theory;

    fn run(spec: &str, r: Rank) -> K1Report {
        k1(&make_theory(spec).unwrap(), r, 3, &KConfig::default()).unwrap()
    }

    #[test]
    fn sets_small() {
        let rep = run("sets", 5);
        assert_eq!(rep.value, Some(FGAbelianGroup::cyclic(2)));
        assert_eq!(rep.pattern, "EventuallyIso");
        assert!(rep.crosscheck.unwrap().agrees);
        assert_eq!(rep.stages[4].aut_order, BigUint::from(24u32));
        assert_eq!(rep.stages[0].map_to_next, Some("zero"));
        assert_eq!(rep.stages[1].map_to_next, Some("zero"));
        assert_eq!(rep.stages[2].map_to_next, Some("identity"));
    }

    #[test]
    fn boole_is_zero() {
        let rep = run("post:2", 3);
        assert_eq!(rep.value, Some(FGAbelianGroup::trivial()));
        assert!(rep.crosscheck.unwrap().agrees);
        assert!(rep.hint.is_some());
    }

    #[test]
    fn h1_label() {
        let rep = stable_h1(&make_theory("sets").unwrap(), 4, 3, &KConfig::default()).unwrap();
        assert_eq!(rep.invariant, "h1");
    }

    #[test]
    fn window_too_large() {
        assert!(k1(&make_theory("sets").unwrap(), 1, 3, &KConfig::default()).is_err());
    }
}
