use num_bigint::BigUint;
use serde::Serialize;

use crate::abelian::{quotient_of_presentation, FGAbelianGroup};
use crate::error::{Error, Result};
use crate::kernel::{IsoCongruence, IsoVerdict, Rank, TheoryHandle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum K0Mode {
    /// Relations found by explicit isomorphism search only.
    Searched,
    /// Relations taken from the theory's declared congruence only.
    Declared,
    Mixed,
}

#[derive(Clone, Debug, Serialize)]
pub struct K0Report {
    pub theory: String,
    pub invariant: &'static str,
    pub value: FGAbelianGroup,
    pub mode: K0Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub declared: Option<IsoCongruence>,
    /// Pairs `(r, s)` with an explicit isomorphism `T_r ≅ T_s`.
    pub isomorphic_pairs: Vec<[Rank; 2]>,
    /// Pairs left undecided because the search exceeded the cutoff.
    pub skipped_pairs: Vec<[Rank; 2]>,
    pub search_bound: Rank,
    pub partial: bool,
    pub evidence: String,
}

/// `K_0(T)`: the group completion of free models under `+`, i.e. `Z` modulo
/// `(s - r)` for every isomorphism `T_r ≅ T_s`. Ranks up to `max_rank` are
/// searched; hom-set products above `cutoff` are skipped and reported.
pub fn k0(t: &TheoryHandle, max_rank: Rank, cutoff: u64) -> Result<K0Report> {
    let declared = t.theory().declared_relations().filter(|c| c.period > 0);
    let implied = |r: Rank, s: Rank| {
        declared.is_some_and(|c| r >= c.start && s >= c.start && (s - r) % c.period == 0)
    };
    let mut relations: Vec<Vec<i64>> = Vec::new();
    if let Some(c) = declared {
        relations.push(vec![c.period as i64]);
    }
    let mut found = Vec::new();
    let mut skipped = Vec::new();
    let descriptor = t.capabilities().k0_descriptor_only;
    for r in 0..max_rank {
        if descriptor {
            break;
        }
        for s in r + 1..=max_rank {
            if implied(r, s) || matches!(t.iso_obstruction(r, s), IsoVerdict::NotIso(_)) {
                continue;
            }
            match find_iso(t, r, s, cutoff) {
                Ok(true) => {
                    found.push([r, s]);
                    relations.push(vec![(s - r) as i64]);
                }
                Ok(false) => {}
                Err(e) if e.is_resource_limit() || matches!(e, Error::EnumerationUnavailable(_)) => {
                    skipped.push([r, s])
                }
                Err(e) => return Err(e),
            }
        }
    }
    let value = quotient_of_presentation(1, &relations);
    debug_assert!(value.is_cyclic() || value.is_trivial());
    let mode = match (declared.is_some(), found.is_empty()) {
        (true, true) => K0Mode::Declared,
        (true, false) => K0Mode::Mixed,
        (false, _) => K0Mode::Searched,
    };
    let mut evidence = if descriptor {
        "descriptor theory: no hom-sets to search".to_string()
    } else {
        format!("ranks 0..={max_rank} searched for isomorphisms")
    };
    if let Some(c) = declared {
        evidence.push_str(&format!(
            "; declared T_r ≅ T_(r+{}) for r >= {}",
            c.period, c.start
        ));
    }
    if !found.is_empty() {
        evidence.push_str(&format!("; explicit isomorphisms for {found:?}"));
    }
    if !skipped.is_empty() {
        evidence.push_str(&format!("; undecided above cutoff {cutoff}: {skipped:?}"));
    }
    Ok(K0Report {
        theory: t.id().to_string(),
        invariant: "k0",
        value,
        mode,
        declared,
        isomorphic_pairs: found,
        partial: !skipped.is_empty(),
        skipped_pairs: skipped,
        search_bound: max_rank,
        evidence,
    })
}

/// Brute-force search for mutually inverse `f: T_r -> T_s`, `g: T_s -> T_r`.
fn find_iso(t: &TheoryHandle, r: Rank, s: Rank, cutoff: u64) -> Result<bool> {
    let bound = t.theory().default_bound();
    let a = t.hom_size(r, s, bound)?;
    let b = t.hom_size(s, r, bound)?;
    let work = &a * &b;
    if work > BigUint::from(cutoff) {
        return Err(Error::cutoff(format!("{} iso search {r}<->{s}", t.id()), work, cutoff));
    }
    let id_r = t.identity(r)?;
    let id_s = t.identity(s)?;
    let back: Vec<_> = t.hom(s, r, bound)?.collect();
    for f in t.hom(r, s, bound)? {
        for g in &back {
            if t.compose(g, &f)? == id_r && t.compose(&f, g)? == id_s {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::make_theory;

    fn run(spec: &str, r: Rank) -> K0Report {
        k0(&make_theory(spec).unwrap(), r, 10_000_000).unwrap()
    }

    #[test]
    fn sets_is_z() {
        let rep = run("sets", 3);
        assert_eq!(rep.value, FGAbelianGroup::free(1));
        assert_eq!(rep.mode, K0Mode::Searched);
        assert!(!rep.partial);
    }

    #[test]
    fn trivial_ring_is_zero() {
        let rep = run("mod:1", 3);
        assert!(rep.value.is_trivial());
        assert!(rep.isomorphic_pairs.contains(&[0, 1]));
    }

    #[test]
    fn cantor_declared() {
        let rep = run("cantor:5", 3);
        assert_eq!(rep.value, FGAbelianGroup::cyclic(4));
        assert_eq!(rep.mode, K0Mode::Declared);
        assert!(!rep.partial);
    }
}
