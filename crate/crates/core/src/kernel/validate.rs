//! Exhaustive or sampled verification of the category and coproduct laws.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{Morphism, Rank, Side, TheoryHandle};
use crate::error::{Error, Result};

/// Largest hom-set that is materialized as a list.
const LIST_CAP: u64 = 1 << 17;
/// Largest composition table built for the associativity check.
const TABLE_CAP: u64 = 1 << 22;
/// Tuple budget for checks that compose morphisms directly.
const DIRECT_BUDGET: u64 = 1 << 16;
const FUNCTORIALITY_BUDGET: u64 = 1 << 12;

#[derive(Clone, Debug, Serialize)]
pub struct ValidateConfig {
    pub hom_cutoff: u64,
    /// Largest tuple count checked exhaustively per rank combination.
    pub budget: u64,
    /// Samples drawn per rank combination when a product is too large.
    pub samples: usize,
    pub seed: u64,
    /// Term bound for theories with infinite hom-sets.
    pub bound: Option<usize>,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            hom_cutoff: 10_000_000,
            budget: 1 << 24,
            samples: 2000,
            seed: 0,
            bound: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub exhaustive_cases: u64,
    pub sampled_cases: u64,
    pub failure: Option<String>,
}

impl CheckOutcome {
    fn new(name: &'static str) -> Self {
        CheckOutcome {
            name,
            passed: true,
            exhaustive_cases: 0,
            sampled_cases: 0,
            failure: None,
        }
    }

    fn fail(&mut self, msg: String) {
        if self.passed {
            self.passed = false;
            self.failure = Some(msg);
        }
    }

    fn absorb(&mut self, run: Run) {
        if run.exhaustive {
            self.exhaustive_cases += run.cases;
        } else {
            self.sampled_cases += run.cases;
        }
        if let Some(msg) = run.failure {
            self.fail(msg);
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub theory: String,
    pub max_rank: Rank,
    pub bound: Option<usize>,
    pub sampled: bool,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

struct Homs {
    size: BigUint,
    list: Option<Vec<Morphism>>,
    index: Option<HashMap<Morphism, u32>>,
}

struct Run {
    exhaustive: bool,
    cases: u64,
    failure: Option<String>,
}

type Table = Option<Arc<Vec<u32>>>;

struct Validator<'a> {
    t: &'a TheoryHandle,
    max_rank: Rank,
    bound: Option<usize>,
    cfg: &'a ValidateConfig,
    homs: Vec<Vec<Homs>>,
    tables: RefCell<HashMap<(Rank, Rank, Rank), Table>>,
}

/// Check associativity, unitality, the coproduct universal property and
/// functoriality of sums on all ranks `<= max_rank`.
pub fn validate_theory(t: &TheoryHandle, max_rank: Rank, cfg: &ValidateConfig) -> Result<ValidationReport> {
    if t.capabilities().k0_descriptor_only {
        return Err(Error::EnumerationUnavailable(t.id().to_string()));
    }
    let bound = cfg.bound.or(t.theory().default_bound());
    let mut homs = Vec::with_capacity(max_rank + 1);
    for r in 0..=max_rank {
        let mut row = Vec::with_capacity(max_rank + 1);
        for s in 0..=max_rank {
            let size = t.hom_size(r, s, bound)?;
            let listable = size <= BigUint::from(LIST_CAP.min(cfg.hom_cutoff));
            let list = if listable {
                Some(t.hom(r, s, bound)?.collect::<Vec<_>>())
            } else {
                None
            };
            let index = list
                .as_ref()
                .map(|l| l.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect());
            row.push(Homs { size, list, index });
        }
        homs.push(row);
    }
    let v = Validator {
        t,
        max_rank,
        bound,
        cfg,
        homs,
        tables: RefCell::new(HashMap::new()),
    };
    let checks = vec![
        v.unitality()?,
        v.associativity()?,
        v.coproduct()?,
        v.sum_functoriality()?,
    ];
    Ok(ValidationReport {
        theory: t.id().to_string(),
        max_rank,
        bound,
        sampled: checks.iter().any(|c| c.sampled_cases > 0),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

impl Validator<'_> {
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
    }

    fn pick(&self, r: Rank, s: Rank, rng: &mut ChaCha8Rng) -> Result<Morphism> {
        match &self.homs[r][s].list {
            Some(l) => Ok(l[rng.gen_range(0..l.len())].clone()),
            None => self.t.random_hom(r, s, self.bound, rng),
        }
    }

    /// Run `check` on every tuple of the product of hom-sets, or on a sample.
    fn tuples(
        &self,
        dims: &[(Rank, Rank)],
        limit: u64,
        samples: usize,
        rng: &mut ChaCha8Rng,
        mut check: impl FnMut(&[&Morphism]) -> Result<Option<String>>,
    ) -> Result<Run> {
        let sizes: Vec<&BigUint> = dims.iter().map(|&(r, s)| &self.homs[r][s].size).collect();
        if sizes.iter().any(|s| s.is_zero()) {
            return Ok(Run {
                exhaustive: true,
                cases: 0,
                failure: None,
            });
        }
        let product: BigUint = sizes.iter().copied().product();
        let lists: Option<Vec<&Vec<Morphism>>> = dims.iter().map(|&(r, s)| self.homs[r][s].list.as_ref()).collect();
        if let (Some(lists), true) = (lists, product <= BigUint::from(limit)) {
            let total = product.to_u64().expect("below limit");
            let mut idx = vec![0usize; dims.len()];
            for _ in 0..total {
                let tuple: Vec<&Morphism> = lists.iter().zip(&idx).map(|(l, &i)| &l[i]).collect();
                if let Some(msg) = check(&tuple)? {
                    return Ok(Run {
                        exhaustive: true,
                        cases: total,
                        failure: Some(msg),
                    });
                }
                for (k, i) in idx.iter_mut().enumerate() {
                    *i += 1;
                    if *i < lists[k].len() {
                        break;
                    }
                    *i = 0;
                }
            }
            return Ok(Run {
                exhaustive: true,
                cases: total,
                failure: None,
            });
        }
        for _ in 0..samples {
            let owned: Vec<Morphism> = dims
                .iter()
                .map(|&(r, s)| self.pick(r, s, rng))
                .collect::<Result<_>>()?;
            let tuple: Vec<&Morphism> = owned.iter().collect();
            if let Some(msg) = check(&tuple)? {
                return Ok(Run {
                    exhaustive: false,
                    cases: samples as u64,
                    failure: Some(msg),
                });
            }
        }
        Ok(Run {
            exhaustive: false,
            cases: samples as u64,
            failure: None,
        })
    }

    fn unitality(&self) -> Result<CheckOutcome> {
        let mut out = CheckOutcome::new("unitality");
        let mut rng = self.rng(1);
        for r in 0..=self.max_rank {
            for s in 0..=self.max_rank {
                let (id_r, id_s) = (self.t.identity(r)?, self.t.identity(s)?);
                let run = self.tuples(&[(r, s)], self.cfg.budget, self.cfg.samples, &mut rng, |m| {
                    let f = m[0];
                    let ok = self.t.compose(&id_s, f)? == *f && self.t.compose(f, &id_r)? == *f;
                    Ok((!ok).then(|| format!("identity not neutral for {f:?}")))
                })?;
                out.absorb(run);
            }
        }
        Ok(out)
    }

    /// Composition table of `hom(s,t) × hom(r,s) -> hom(r,t)`, indexed `g * |hom(r,s)| + f`.
    fn table(&self, r: Rank, s: Rank, t: Rank) -> Table {
        if let Some(tab) = self.tables.borrow().get(&(r, s, t)) {
            return tab.clone();
        }
        let built = self.build_table(r, s, t).map(Arc::new);
        self.tables.borrow_mut().insert((r, s, t), built.clone());
        built
    }

    fn build_table(&self, r: Rank, s: Rank, t: Rank) -> Option<Vec<u32>> {
        let fs = self.homs[r][s].list.as_ref()?;
        let gs = self.homs[s][t].list.as_ref()?;
        let index = self.homs[r][t].index.as_ref()?;
        if (fs.len() as u64) * (gs.len() as u64) > TABLE_CAP {
            return None;
        }
        let th = self.t;
        let rows: Option<Vec<Vec<u32>>> = gs
            .par_iter()
            .map(|g| {
                fs.iter()
                    .map(|f| th.compose(g, f).ok().and_then(|gf| index.get(&gf).copied()))
                    .collect()
            })
            .collect();
        Some(rows?.concat())
    }

    fn associativity(&self) -> Result<CheckOutcome> {
        let mut out = CheckOutcome::new("associativity");
        let mut rng = self.rng(2);
        let n = self.max_rank;
        for r in 0..=n {
            for s in 0..=n {
                for t in 0..=n {
                    for u in 0..=n {
                        if let Some(run) = self.associativity_by_tables(r, s, t, u) {
                            out.absorb(run);
                            continue;
                        }
                        let run = self.tuples(
                            &[(r, s), (s, t), (t, u)],
                            DIRECT_BUDGET,
                            self.cfg.samples,
                            &mut rng,
                            |m| {
                                let (f, g, h) = (m[0], m[1], m[2]);
                                let lhs = self.t.compose(h, &self.t.compose(g, f)?)?;
                                let rhs = self.t.compose(&self.t.compose(h, g)?, f)?;
                                Ok((lhs != rhs).then(|| format!("h∘(g∘f) != (h∘g)∘f for f={f:?} g={g:?} h={h:?}")))
                            },
                        )?;
                        out.absorb(run);
                    }
                }
            }
        }
        Ok(out)
    }

    fn associativity_by_tables(&self, r: Rank, s: Rank, t: Rank, u: Rank) -> Option<Run> {
        let nf = self.homs[r][s].list.as_ref()?.len();
        let ng = self.homs[s][t].list.as_ref()?.len();
        let nh = self.homs[t][u].list.as_ref()?.len();
        let nrt = self.homs[r][t].list.as_ref()?.len();
        let total = (nf as u64) * (ng as u64) * (nh as u64);
        if total > self.cfg.budget {
            return None;
        }
        let rst = self.table(r, s, t)?;
        let rtu = self.table(r, t, u)?;
        let stu = self.table(s, t, u)?;
        let rsu = self.table(r, s, u)?;
        let bad = (0..nh).into_par_iter().find_map_first(|h| {
            for g in 0..ng {
                let hg = stu[h * ng + g] as usize;
                for f in 0..nf {
                    let gf = rst[g * nf + f] as usize;
                    if rtu[h * nrt + gf] != rsu[hg * nf + f] {
                        return Some((h, g, f));
                    }
                }
            }
            None
        });
        Some(Run {
            exhaustive: true,
            cases: total,
            failure: bad.map(|(h, g, f)| format!("associativity fails at ranks {r},{s},{t},{u} for indices h={h} g={g} f={f}")),
        })
    }

    fn coproduct(&self) -> Result<CheckOutcome> {
        let mut out = CheckOutcome::new("coproduct");
        let mut rng = self.rng(3);
        let n = self.max_rank;
        for r in 0..=n {
            for s in 0..=n - r {
                let il = self.t.injection(r, s, Side::Left)?;
                let ir = self.t.injection(r, s, Side::Right)?;
                for t in 0..=n {
                    let run = self.tuples(&[(r, t), (s, t)], DIRECT_BUDGET, self.cfg.samples, &mut rng, |m| {
                        let (f, g) = (m[0], m[1]);
                        let c = self.t.copair(f, g)?;
                        let ok = self.t.compose(&c, &il)? == *f && self.t.compose(&c, &ir)? == *g;
                        Ok((!ok).then(|| format!("copair does not restrict to f={f:?} g={g:?}")))
                    })?;
                    out.absorb(run);
                    let run = self.tuples(&[(r + s, t)], DIRECT_BUDGET, self.cfg.samples, &mut rng, |m| {
                        let h = m[0];
                        let c = self.t.copair(&self.t.compose(h, &il)?, &self.t.compose(h, &ir)?)?;
                        Ok((c != *h).then(|| format!("{h:?} is not the copair of its restrictions")))
                    })?;
                    out.absorb(run);
                    let pairs = &self.homs[r][t].size * &self.homs[s][t].size;
                    if pairs != self.homs[r + s][t].size {
                        out.fail(format!(
                            "|hom({r},{t})|·|hom({s},{t})| = {pairs} but |hom({},{t})| = {}",
                            r + s,
                            self.homs[r + s][t].size
                        ));
                    }
                }
            }
        }
        Ok(out)
    }

    fn sum_functoriality(&self) -> Result<CheckOutcome> {
        let mut out = CheckOutcome::new("sum functoriality");
        let mut rng = self.rng(4);
        let n = self.max_rank;
        let samples = self.cfg.samples.min(64);
        for a in 0..=n {
            for d in 0..=n - a {
                for c in 0..=n {
                    for h in 0..=n - c {
                        for b in 0..=n {
                            for e in 0..=n {
                                let dims = [(a, b), (b, c), (d, e), (e, h)];
                                let run = self.tuples(&dims, FUNCTORIALITY_BUDGET, samples, &mut rng, |m| {
                                    let (f, f2, g, g2) = (m[0], m[1], m[2], m[3]);
                                    let lhs = self.t.sum(&self.t.compose(f2, f)?, &self.t.compose(g2, g)?)?;
                                    let rhs = self.t.compose(&self.t.sum(f2, g2)?, &self.t.sum(f, g)?)?;
                                    Ok((lhs != rhs).then(|| {
                                        format!("sum not functorial at f={f:?} f'={f2:?} g={g:?} g'={g2:?}")
                                    }))
                                })?;
                                out.absorb(run);
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}
