//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use lawk_core::abelian::{FGAbelianGroup, Pattern};
use lawk_core::kernel::{MorphismData, TheoryHandle};
use lawk_core::kinv::{
    aut_group, k0, k1, kill_torsion, matrix_invariance_check, morava_factorization, random_automorphism,
    stabilization_audit, stable_h1, thrice_space_check, whitehead_witness, KConfig,
};
use lawk_core::morita::{idempotent_modification, is_idempotent, lemma_audit, matrix_theory, Idempotent};
use lawk_core::perm::{abelianization, naive, Perm, PermGroup};
use lawk_core::zoo::make_theory;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

fn th(spec: &str) -> Result<TheoryHandle, String> {
    make_theory(spec).map_err(|e| e.to_string())
}

fn z(n: u64) -> FGAbelianGroup {
    FGAbelianGroup::cyclic(n)
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn show(g: &Option<FGAbelianGroup>) -> String {
    g.as_ref().map(ToString::to_string).unwrap_or_else(|| "undetermined".into())
}

fn cfg() -> KConfig {
    KConfig::default()
}

fn c01() -> Outcome {
    let t = th("post:2")?;
    let mut orders = Vec::new();
    for r in 1..=3 {
        orders.push(aut_group(&t, r, 200_000).map_err(|e| e.to_string())?.order().to_string());
    }
    ensure(orders == ["2", "24", "40320"], format!("orders {orders:?}"))?;
    Ok(format!("|Aut(post:2 at r)| = {}", orders.join(", ")))
}

fn c02() -> Outcome {
    let mut out = Vec::new();
    for a in 2..=6u64 {
        let rep = k0(&th(&format!("cantor:{a}"))?, 3, 1000).map_err(|e| e.to_string())?;
        let expect = if a == 2 { FGAbelianGroup::trivial() } else { z(a - 1) };
        ensure(rep.value == expect, format!("cantor:{a} gave {}", rep.value))?;
        out.push(format!("cantor:{a} -> {}", rep.value));
    }
    Ok(out.join(", "))
}

fn c03() -> Outcome {
    let c = th("cantor:5")?;
    let m = matrix_theory(&c, 2).map_err(|e| e.to_string())?;
    let a = k0(&m, 3, 1000).map_err(|e| e.to_string())?.value;
    let b = k0(&c, 3, 1000).map_err(|e| e.to_string())?.value;
    ensure(a == z(2) && b == z(4), format!("{a} vs {b}"))?;
    ensure(a.order() < b.order(), "not strictly smaller")?;
    Ok(format!("K0(matrix:2(cantor:5)) = {a}, K0(cantor:5) = {b}"))
}

fn c04() -> Outcome {
    let mut out = Vec::new();
    for v in [2, 3] {
        let rep = k0(&th(&format!("post:{v}"))?, 3, 10_000_000).map_err(|e| e.to_string())?;
        ensure(rep.value == FGAbelianGroup::free(1), format!("post:{v} gave {}", rep.value))?;
        ensure(rep.search_bound == 3 && rep.evidence.contains("0..=3"), "bound not disclosed")?;
        ensure(!rep.partial, format!("post:{v} search partial"))?;
        out.push(format!("post:{v} -> {} (searched to rank {})", rep.value, rep.search_bound));
    }
    Ok(out.join(", "))
}

fn c05() -> Outcome {
    let rep = k1(&th("sets")?, 8, 3, &cfg()).map_err(|e| e.to_string())?;
    ensure(rep.value == Some(z(2)), format!("value {}", show(&rep.value)))?;
    ensure(
        rep.telescope.pattern == Pattern::EventuallyIso { from: 2 },
        format!("pattern {:?}", rep.telescope.pattern),
    )?;
    let cc = rep.crosscheck.as_ref().ok_or("no cross-check")?;
    ensure(cc.agrees, "literature cross-check disagrees")?;
    Ok(format!(
        "K1(sets) = Z/2, EventuallyIso from r = 2 on ranks <= 8; literature pi_1 = {} [{}]",
        cc.expected, cc.source
    ))
}

fn c06() -> Outcome {
    let a = k1(&th("post:2")?, 4, 3, &cfg()).map_err(|e| e.to_string())?;
    ensure(a.value == Some(FGAbelianGroup::trivial()), format!("post:2 {}", show(&a.value)))?;
    ensure(matches!(a.telescope.pattern, Pattern::EventuallyZero { .. }), "post:2 pattern")?;
    ensure(a.stages.iter().all(|s| s.domain <= 16), "post:2 domain above 16")?;
    ensure(a.value == Some(kill_torsion(&z(2), 2)), "post:2 vs kill_torsion")?;
    let b = k1(&th("post:3")?, 3, 3, &cfg()).map_err(|e| e.to_string())?;
    ensure(b.value == Some(z(2)), format!("post:3 {}", show(&b.value)))?;
    ensure(matches!(b.telescope.pattern, Pattern::EventuallyIso { .. }), "post:3 pattern")?;
    ensure(b.stages.iter().all(|s| s.domain <= 27), "post:3 domain above 27")?;
    ensure(b.value == Some(kill_torsion(&z(2), 3)), "post:3 vs kill_torsion")?;
    Ok(format!(
        "K1(post:2) = {} ({}), K1(post:3) = {} ({})",
        show(&a.value),
        a.pattern,
        show(&b.value),
        b.pattern
    ))
}

fn c07() -> Outcome {
    let rep = k1(&th("boole")?, 4, 3, &cfg()).map_err(|e| e.to_string())?;
    ensure(rep.value == Some(FGAbelianGroup::trivial()), format!("value {}", show(&rep.value)))?;
    Ok(format!("K1(boole) = {}", show(&rep.value)))
}

fn c08() -> Outcome {
    let rep = k1(&th("gsets:c3")?, 5, 3, &cfg()).map_err(|e| e.to_string())?;
    ensure(rep.value == Some(z(6)), format!("value {}", show(&rep.value)))?;
    let cc = rep.crosscheck.as_ref().ok_or("no cross-check")?;
    ensure(cc.agrees, "cross-check disagrees")?;
    Ok(format!("K1(gsets:c3) = {}; Z/2 + H1(C3) = {}", show(&rep.value), cc.expected))
}

fn c09() -> Outcome {
    let sets = th("sets")?;
    let rep = matrix_invariance_check(&sets, 2, 8, 3, &cfg()).map_err(|e| e.to_string())?;
    ensure(rep.passed, "stage or map comparison failed")?;
    let h_base = stable_h1(&sets, 8, 3, &cfg()).map_err(|e| e.to_string())?;
    let m = matrix_theory(&sets, 2).map_err(|e| e.to_string())?;
    let h_mat = stable_h1(&m, 4, 3, &cfg()).map_err(|e| e.to_string())?;
    ensure(h_base.value == Some(z(2)) && h_mat.value == h_base.value, "stable H1 differs")?;
    for (r, s) in h_mat.stages.iter().enumerate() {
        let f: u64 = (1..=2 * r as u64).product();
        ensure(s.aut_order.to_string() == f.to_string(), format!("rank {r}: |Aut| = {}", s.aut_order))?;
    }
    Ok(format!(
        "stable H1(matrix:2(sets)) = {} = stable H1(sets); |Aut| = (2r)! for r <= 4",
        show(&h_mat.value)
    ))
}

fn c10() -> Outcome {
    let out = lawk::run(["lawk", "demo", "--emit", "json"]);
    ensure(out.code == 0, format!("exit {}: {}", out.code, out.stderr.trim()))?;
    let v: Value = serde_json::from_str(&out.stdout).map_err(|e| e.to_string())?;
    ensure(v["status"] == "morita-failure-exhibited", format!("status {}", v["status"]))?;
    let st = v["stages"].as_array().ok_or("no stages")?;
    ensure(st.len() == 4 && st.iter().all(|s| s["passed"] == true), "a stage failed")?;
    ensure(st[1]["pseudo_inverse"]["k"] == 2, "witness not at k = 2")?;
    ensure(st[2]["compare"] == "post:3" && st[2]["matches"] == true, "fingerprint mismatch with post:3")?;
    let zero = serde_json::json!({"free_rank": 0, "invariant_factors": []});
    let z2 = serde_json::json!({"free_rank": 0, "invariant_factors": [2]});
    ensure(st[3]["k1_post2"] == zero && st[3]["k1_modification"] == z2, "K1 values")?;
    Ok("witness at k = 2; fingerprint = post:3 on ranks <= 2; K1 0 vs Z/2".into())
}

fn c11() -> Outcome {
    let t = th("post:2")?;
    let mut ids = Vec::new();
    for u in t.hom(1, 1, None).map_err(|e| e.to_string())? {
        if is_idempotent(&t, &u).map_err(|e| e.to_string())? {
            ids.push(Idempotent::new(&t, u).map_err(|e| e.to_string())?);
        }
    }
    ensure(ids.len() == 3, format!("{} idempotents", ids.len()))?;
    let mut counterexamples = 0;
    for u in &ids {
        let a = lemma_audit(u, 2, 10_000_000).map_err(|e| e.to_string())?;
        ensure(a.one_iff_two && a.two_implies_three, "(1)<=>(2)=>(3) fails")?;
        if a.is_identity {
            ensure(a.three_implies_two, "(3)=>(2) fails for the identity")?;
        } else {
            ensure(a.counterexample.is_some() && !a.three_implies_two, "no (3)=>(2) counterexample")?;
            counterexamples += 1;
        }
    }
    Ok(format!("3 idempotents, ranks <= 2, {counterexamples} counterexamples to (3)=>(2)"))
}

fn c12() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut out = Vec::new();
    for spec in ["sets", "post:2", "mod:3", "gsets:c3"] {
        let t = th(spec)?;
        for i in 0..100 {
            let r = 1 + i % 3;
            let w = random_automorphism(&t, r, &cfg(), &mut rng).map_err(|e| e.to_string())?;
            ensure(whitehead_witness(&t, &w).map_err(|e| e.to_string())?.verified, format!("{spec} rank {r}"))?;
        }
        for i in 0..25 {
            let r = 1 + i % 3;
            let u = random_automorphism(&t, r, &cfg(), &mut rng).map_err(|e| e.to_string())?;
            let v = random_automorphism(&t, r, &cfg(), &mut rng).map_err(|e| e.to_string())?;
            ensure(thrice_space_check(&t, &u, &v).map_err(|e| e.to_string())?, format!("{spec} thrice rank {r}"))?;
        }
        out.push(spec);
    }
    Ok(format!("100 commutator witnesses and 25 thrice-space pairs each for {}", out.join(", ")))
}

const ZOO: [&str; 13] = [
    "sets", "boole", "post:2", "post:3", "mod:1", "mod:2", "mod:3", "gsets:c2", "gsets:c3", "gsets:c4", "gsets:s3",
    "monoid", "magma:2",
];

fn c13() -> Outcome {
    let mut steps = 0;
    for spec in ZOO {
        let a = stabilization_audit(&th(spec)?, 3, &cfg()).map_err(|e| format!("{spec}: {e}"))?;
        ensure(a.passed, format!("{spec} not injective"))?;
        steps += a.steps.len();
    }
    Ok(format!("{} theories, {steps} stabilization steps, all injective (cantor has no automorphism realization)", ZOO.len()))
}

fn c14() -> Outcome {
    for p in [2, 3] {
        let rep = morava_factorization(p, 3, &cfg()).map_err(|e| e.to_string())?;
        ensure(rep.passed && rep.rows.len() == 3, format!("p = {p} square fails"))?;
    }
    let a = k1(&th("mod:2")?, 4, 3, &cfg()).map_err(|e| e.to_string())?;
    let b = k1(&th("mod:3")?, 4, 3, &cfg()).map_err(|e| e.to_string())?;
    ensure(a.value == Some(FGAbelianGroup::trivial()), format!("K1(mod:2) = {}", show(&a.value)))?;
    ensure(b.value == Some(z(2)), format!("K1(mod:3) = {}", show(&b.value)))?;
    Ok(format!(
        "square commutes for r <= 3, p in {{2,3}}; K1(mod:2) = {}, K1(mod:3) = {}",
        show(&a.value),
        show(&b.value)
    ))
}

/// Normal closure of `seeds` in the group with element set `g` and generators `gens`, by brute force.
fn naive_normal_closure(degree: usize, gens: &[Perm], seeds: Vec<Perm>) -> HashSet<Perm> {
    let mut n = naive::closure(degree, &seeds);
    loop {
        let extra: Vec<Perm> = n
            .iter()
            .flat_map(|x| gens.iter().map(move |g| x.conjugate_by(g)))
            .filter(|y| !n.contains(y))
            .collect();
        if extra.is_empty() {
            return n;
        }
        let mut all: Vec<Perm> = n.iter().cloned().collect();
        all.extend(extra);
        n = naive::closure(degree, &all);
    }
}

fn c15() -> Outcome {
    let mut groups: Vec<(String, PermGroup)> = Vec::new();
    let mut theories: Vec<TheoryHandle> = ZOO.iter().map(|s| th(s)).collect::<Result<_, _>>()?;
    theories.push(matrix_theory(&th("sets")?, 2).map_err(|e| e.to_string())?);
    let m = matrix_theory(&th("post:2")?, 2).map_err(|e| e.to_string())?;
    let e = m
        .morphism(1, 1, MorphismData::Table(vec![0, 1, 2, 2]))
        .and_then(|e| Idempotent::new(&m, e))
        .and_then(|e| idempotent_modification(&e))
        .map_err(|e| e.to_string())?;
    theories.push(e);
    for t in &theories {
        for r in 0..=5 {
            let Ok(g) = aut_group(t, r, 200_000) else { break };
            if g.order_u64().is_none_or(|o| o > 10_000) {
                break;
            }
            groups.push((format!("Aut({} at {r})", t.id()), g));
        }
    }
    for n in 1..=7 {
        groups.push((format!("Sym({n})"), PermGroup::symmetric(n)));
    }
    let mut checked = 0;
    let mut quotients = 0;
    for (name, g) in &groups {
        let els = naive::closure(g.degree(), g.generators());
        ensure(els.len() as u64 == g.order_u64().unwrap_or(0), format!("{name}: order {} vs {}", g.order(), els.len()))?;
        let d = g.derived_subgroup();
        let mut seeds = Vec::new();
        for (i, a) in g.generators().iter().enumerate() {
            for b in &g.generators()[i + 1..] {
                seeds.push(a.commutator(b));
            }
        }
        let nd = naive_normal_closure(g.degree(), g.generators(), seeds);
        ensure(nd.len() as u64 == d.order_u64().unwrap_or(0), format!("{name}: derived order"))?;
        checked += 2;
        let index = els.len() / nd.len();
        if index <= 1000 {
            let ab = abelianization(g, 1000).map_err(|e| e.to_string())?;
            let census = naive::abelian_quotient_by_census(&els, &nd);
            let expect = FGAbelianGroup::from_moduli(&census);
            ensure(*ab.group() == expect, format!("{name}: {} vs census {expect}", ab.group()))?;
            quotients += 1;
        }
    }
    Ok(format!("{checked} orders against naive closure, {quotients} abelianizations against census"))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<u64>,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "automorphism orders of post:2", limit: Some(5), run: c01 },
        Criterion { id: 2, name: "K0(cantor:a) = Z/(a-1)", limit: None, run: c02 },
        Criterion { id: 3, name: "K0 of matrix:2(cantor:5) strictly smaller", limit: None, run: c03 },
        Criterion { id: 4, name: "K0(post:v) = Z at bound 3", limit: None, run: c04 },
        Criterion { id: 5, name: "K1(sets) = Z/2 to rank 8", limit: Some(30), run: c05 },
        Criterion { id: 6, name: "K1(post:v) with v-power torsion removed", limit: Some(60), run: c06 },
        Criterion { id: 7, name: "K1(boole) = 0", limit: None, run: c07 },
        Criterion { id: 8, name: "K1(gsets:c3) = Z/6", limit: Some(60), run: c08 },
        Criterion { id: 9, name: "matrix invariance of stable H1", limit: None, run: c09 },
        Criterion { id: 10, name: "Morita failure demo", limit: Some(120), run: c10 },
        Criterion { id: 11, name: "idempotent lemma audit on post:2", limit: None, run: c11 },
        Criterion { id: 12, name: "commutator identities", limit: None, run: c12 },
        Criterion { id: 13, name: "stabilization injectivity", limit: None, run: c13 },
        Criterion { id: 14, name: "Morava factorization and K1(mod:p)", limit: None, run: c14 },
        Criterion { id: 15, name: "oracle equivalence", limit: None, run: c15 },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(c.run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let over = c.limit.is_some_and(|l| took > Duration::from_secs(l));
        let limit = c.limit.map(|l| format!(" / {l}s")).unwrap_or_default();
        let (tag, detail) = match (&result, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over time limit: {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("{tag} {:>2} {} [{:.2}s{limit}] {detail}", c.id, c.name, took.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
