use serde::Serialize;

use super::{AbelianMap, FGAbelianGroup};
use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: usize = 3;

/// Behaviour of the chain inside the checked window. Stage positions are
/// reported with the caller's labels (usually ranks).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Pattern {
    EventuallyIso { from: usize },
    EventuallyZero { from: usize },
    PeriodicIso { period: usize },
    Inconclusive,
}

impl Pattern {
    pub fn name(&self) -> &'static str {
        match self {
            Pattern::EventuallyIso { .. } => "EventuallyIso",
            Pattern::EventuallyZero { .. } => "EventuallyZero",
            Pattern::PeriodicIso { .. } => "PeriodicIso",
            Pattern::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TelescopeColimitReport {
    /// Label of `stages[0]`.
    pub first: usize,
    pub stages: Vec<FGAbelianGroup>,
    pub maps: Vec<AbelianMap>,
    pub pattern: Pattern,
    pub colimit: Option<FGAbelianGroup>,
    /// Labels of the first and last stage inside the window.
    pub window: [usize; 2],
    pub evidence: String,
}

/// Classify `stages[0] -> stages[1] -> ...` on its last `window` stages.
pub fn telescope_colimit(
    stages: Vec<FGAbelianGroup>,
    maps: Vec<AbelianMap>,
    window: usize,
) -> Result<TelescopeColimitReport> {
    telescope_colimit_labelled(stages, maps, window, 0)
}

/// As [`telescope_colimit`], with stage `i` labelled `first + i`.
pub fn telescope_colimit_labelled(
    stages: Vec<FGAbelianGroup>,
    maps: Vec<AbelianMap>,
    window: usize,
    first: usize,
) -> Result<TelescopeColimitReport> {
    let n = stages.len();
    if window == 0 || window > n {
        return Err(Error::WindowLargerThanChain { window, stages: n });
    }
    if maps.len() + 1 != n {
        return Err(Error::RankMismatch(format!("{} maps for {n} stages", maps.len())));
    }
    for (i, m) in maps.iter().enumerate() {
        if *m.source() != stages[i] || *m.target() != stages[i + 1] {
            return Err(Error::RankMismatch(format!("map {i} does not join stages {i} and {}", i + 1)));
        }
    }
    let lo = n - window;
    let window_maps = &maps[lo..];
    let last = stages[n - 1].clone();

    let run_start = |pred: &dyn Fn(&AbelianMap) -> bool| {
        let mut k = n - 1;
        while k > 0 && pred(&maps[k - 1]) {
            k -= 1;
        }
        k
    };

    let (pattern, colimit) = if window_maps.iter().all(AbelianMap::is_iso) {
        let from = run_start(&AbelianMap::is_iso);
        (Pattern::EventuallyIso { from: first + from }, Some(last))
    } else if window_maps.iter().all(AbelianMap::is_zero) {
        let from = run_start(&AbelianMap::is_zero);
        (Pattern::EventuallyZero { from: first + from }, Some(FGAbelianGroup::trivial()))
    } else {
        match periodic(window_maps) {
            Some(p) => (Pattern::PeriodicIso { period: p }, Some(last)),
            None => (Pattern::Inconclusive, None),
        }
    };
    let window_labels = [first + lo, first + n - 1];
    let evidence = match &colimit {
        Some(c) => format!(
            "{} verified on stages [{}, {}]; colimit under this pattern is {c}",
            pattern.name(),
            window_labels[0],
            window_labels[1]
        ),
        None => format!("no pattern on stages [{}, {}]", window_labels[0], window_labels[1]),
    };
    Ok(TelescopeColimitReport {
        first,
        stages,
        maps,
        pattern,
        colimit,
        window: window_labels,
        evidence,
    })
}

/// Least `p >= 2` such that every length-`p` composite inside the window is an isomorphism.
fn periodic(maps: &[AbelianMap]) -> Option<usize> {
    (2..=maps.len()).find(|&p| {
        (0..=maps.len() - p).all(|i| {
            let mut acc = maps[i].clone();
            for m in &maps[i + 1..i + p] {
                match m.compose(&acc) {
                    Ok(c) => acc = c,
                    Err(_) => return false,
                }
            }
            acc.is_iso()
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::IntMatrix;

    fn z2() -> FGAbelianGroup {
        FGAbelianGroup::cyclic(2)
    }

    #[test]
    fn doubled_block_sums_die() {
        let zero = AbelianMap::scalar(&z2(), 2);
        let r = telescope_colimit(vec![z2(); 3], vec![zero.clone(), zero], 3).unwrap();
        assert_eq!(r.pattern, Pattern::EventuallyZero { from: 0 });
        assert!(r.colimit.unwrap().is_trivial());
    }

    #[test]
    fn tripled_block_sums_survive() {
        let id = AbelianMap::scalar(&z2(), 3);
        let r = telescope_colimit(vec![z2(); 3], vec![id.clone(), id], 3).unwrap();
        assert_eq!(r.pattern, Pattern::EventuallyIso { from: 0 });
        assert_eq!(r.colimit.unwrap(), z2());
    }

    #[test]
    fn single_stage() {
        let r = telescope_colimit(vec![FGAbelianGroup::cyclic(5)], vec![], 1).unwrap();
        assert_eq!(r.colimit.unwrap(), FGAbelianGroup::cyclic(5));
    }

    #[test]
    fn window_too_large() {
        assert!(matches!(
            telescope_colimit(vec![z2()], vec![], 2),
            Err(Error::WindowLargerThanChain { window: 2, stages: 1 })
        ));
    }

    #[test]
    fn projection_is_inconclusive() {
        let g = FGAbelianGroup::from_moduli(&[2u64, 2]);
        let p = AbelianMap::new(g.clone(), g.clone(), IntMatrix::from_rows(&[vec![1, 0], vec![0, 0]], 2)).unwrap();
        let r = telescope_colimit(vec![g.clone(); 3], vec![p.clone(), p], 3).unwrap();
        assert_eq!(r.pattern, Pattern::Inconclusive);
        assert!(r.colimit.is_none());
    }

    #[test]
    fn retract_through_a_bigger_group_is_periodic() {
        let g = FGAbelianGroup::from_moduli(&[2u64, 2]);
        let inc = AbelianMap::new(z2(), g.clone(), IntMatrix::from_rows(&[vec![1], vec![0]], 1)).unwrap();
        let proj = AbelianMap::new(g.clone(), z2(), IntMatrix::from_rows(&[vec![1, 0]], 2)).unwrap();
        let r = telescope_colimit(vec![z2(), g, z2()], vec![inc, proj], 3).unwrap();
        assert_eq!(r.pattern, Pattern::PeriodicIso { period: 2 });
        assert_eq!(r.colimit.unwrap(), z2());
    }

    #[test]
    fn labels_shift_with_prefix() {
        let triv = FGAbelianGroup::trivial();
        let id = AbelianMap::identity(&z2());
        let stages = vec![triv.clone(), z2(), z2(), z2()];
        let maps = vec![AbelianMap::zero(&triv, &z2()), id.clone(), id.clone()];
        let full = telescope_colimit_labelled(stages.clone(), maps.clone(), 3, 1).unwrap();
        let cut = telescope_colimit_labelled(stages[1..].to_vec(), maps[1..].to_vec(), 3, 2).unwrap();
        assert_eq!(full.pattern, Pattern::EventuallyIso { from: 2 });
        assert_eq!(full.pattern, cut.pattern);
        assert_eq!(full.colimit, cut.colimit);
    }
}
