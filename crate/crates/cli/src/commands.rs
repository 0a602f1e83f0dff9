use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use lawk_core::kernel::{validate_theory, MorphismData, TheoryHandle, ValidateConfig};
use lawk_core::kinv::{
    self, k0, matrix_invariance_check, morava_factorization, perfectness_probe, random_automorphism,
    stabilization_audit, thrice_space_check, whitehead_witness, K1Report, KConfig,
};
use lawk_core::morita::{
    idempotent_modification, is_idempotent, lemma_audit, matrix_theory, pseudo_invertible, retract_fingerprint,
    retract_fingerprint_against, zigzag_functors, Idempotent, PseudoInverse, RetractFingerprint,
};
use lawk_core::zoo::{load_idempotent, make_theory};
use lawk_core::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::emit::group_text;
use crate::{AuditKind, Cli, Command, Report};

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn theory(cli: &Cli) -> Result<TheoryHandle> {
    let spec = cli
        .theory
        .as_deref()
        .ok_or_else(|| Error::Parse("this command needs --theory".into()))?;
    make_theory(spec)
}

fn kcfg(cli: &Cli) -> KConfig {
    KConfig {
        hom_cutoff: cli.cutoff,
        ..KConfig::default()
    }
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn group_or_none(v: &Value) -> String {
    group_text(v).unwrap_or_else(|| "undetermined".into())
}

pub(crate) fn dispatch(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Validate => validate(cli),
        Command::K0 => cmd_k0(cli),
        Command::K1 => cmd_k1(cli, false),
        Command::H1 => cmd_k1(cli, true),
        Command::Audit {
            kind,
            n,
            idempotent,
            samples,
            pairs,
        } => match kind {
            AuditKind::Stabilization => audit_stabilization(cli),
            AuditKind::Perfectness => audit_perfectness(cli),
            AuditKind::Lemma => audit_idempotents(cli, idempotent.as_deref(), false),
            AuditKind::Zigzag => audit_idempotents(cli, idempotent.as_deref(), true),
            AuditKind::Whitehead => audit_whitehead(cli, *samples, *pairs),
            AuditKind::Matrix => audit_matrix(cli, *n),
        },
        Command::Fingerprint { compare } => fingerprint(cli, compare.as_deref()),
        Command::Morava { p } => morava(cli, *p),
        Command::Demo { idempotent, compare } => demo(cli, idempotent.as_deref(), compare.as_deref()),
    }
}

fn validate(cli: &Cli) -> Result<Report> {
    let t = theory(cli)?;
    let cfg = ValidateConfig {
        hom_cutoff: cli.cutoff,
        seed: cli.seed,
        ..ValidateConfig::default()
    };
    let rep = validate_theory(&t, cli.max_rank, &cfg)?;
    let mut text = format!("validate {} on ranks <= {}: {}\n", rep.theory, rep.max_rank, pass(rep.passed));
    for c in &rep.checks {
        let _ = writeln!(
            text,
            "  {:<28} {}  exhaustive={} sampled={}{}",
            c.name,
            pass(c.passed),
            c.exhaustive_cases,
            c.sampled_cases,
            c.failure.as_ref().map(|f| format!("  ({f})")).unwrap_or_default()
        );
    }
    let mut value = to_value(&rep)?;
    value["invariant"] = json!("validate");
    Ok(Report {
        failure: (!rep.passed).then(|| "theory laws failed".to_string()),
        value,
        text,
    })
}

fn cmd_k0(cli: &Cli) -> Result<Report> {
    let t = theory(cli)?;
    let rep = k0(&t, cli.max_rank, cli.cutoff)?;
    let mut text = format!(
        "K0({}) = {}  [mode {}, isomorphisms searched up to rank {}]\n",
        rep.theory,
        rep.value,
        serde_json::to_value(rep.mode)?.as_str().unwrap_or(""),
        rep.search_bound
    );
    let _ = writeln!(text, "  {}", rep.evidence);
    if rep.partial {
        text.push_str("  partial: some pairs exceeded the cutoff\n");
    }
    Ok(Report {
        value: to_value(&rep)?,
        text,
        failure: None,
    })
}

fn k1_text(rep: &K1Report) -> String {
    let label = if rep.invariant == "h1" { "stable H1" } else { "K1" };
    let mut text = format!(
        "{label}({}) = {}  [{} on ranks {}..{}]\n",
        rep.theory,
        rep.value.as_ref().map(ToString::to_string).unwrap_or_else(|| "undetermined".into()),
        rep.pattern,
        rep.window[0],
        rep.window[1]
    );
    text.push_str("  rank  domain  |Aut|  H1  map\n");
    for s in &rep.stages {
        let _ = writeln!(
            text,
            "  {}  {}  {}  {}  {}",
            s.rank,
            s.domain,
            s.aut_order,
            s.abelianization,
            s.map_to_next.unwrap_or("-")
        );
    }
    if let Some(c) = &rep.crosscheck {
        let _ = writeln!(
            text,
            "  cross-check [{}]: {}: expected {}, computed {}: {}",
            c.source,
            c.label,
            c.expected,
            rep.value.as_ref().map(ToString::to_string).unwrap_or_else(|| "undetermined".into()),
            if c.agrees { "agrees" } else { "DIFFERS" }
        );
    }
    if let Some(h) = &rep.hint {
        let _ = writeln!(text, "  note: {h}");
    }
    text
}

fn cmd_k1(cli: &Cli, h1: bool) -> Result<Report> {
    let t = theory(cli)?;
    let rep = if h1 {
        kinv::stable_h1(&t, cli.max_rank, cli.window, &kcfg(cli))?
    } else {
        kinv::k1(&t, cli.max_rank, cli.window, &kcfg(cli))?
    };
    Ok(Report {
        value: to_value(&rep)?,
        text: k1_text(&rep),
        failure: None,
    })
}

fn audit_stabilization(cli: &Cli) -> Result<Report> {
    let t = theory(cli)?;
    let rep = stabilization_audit(&t, cli.max_rank, &kcfg(cli))?;
    let mut text = format!("stabilization audit {}: {}\n", rep.theory, pass(rep.passed));
    for s in &rep.steps {
        let _ = writeln!(
            text,
            "  {} -> {}: |Aut| = {}, image = {}, injective: {}",
            s.from, s.to, s.source_order, s.image_order, s.injective
        );
    }
    let mut value = to_value(&rep)?;
    value["invariant"] = json!("audit:stabilization");
    Ok(Report {
        failure: (!rep.passed).then(|| "a stabilization map is not injective".to_string()),
        value,
        text,
    })
}

fn audit_perfectness(cli: &Cli) -> Result<Report> {
    let t = theory(cli)?;
    let rep = perfectness_probe(&t, cli.max_rank, &kcfg(cli))?;
    let mut text = format!("perfectness probe {}\n", rep.theory);
    for r in &rep.rows {
        let _ = writeln!(
            text,
            "  rank {}: |Aut| = {}, |[Aut,Aut]| = {}, Aut perfect: {}, commutator subgroup perfect: {}",
            r.rank, r.aut_order, r.derived_order, r.aut_perfect, r.derived_perfect
        );
    }
    let mut value = to_value(&rep)?;
    value["invariant"] = json!("audit:perfectness");
    Ok(Report {
        value,
        text,
        failure: None,
    })
}

/// The given idempotent, or every idempotent of `hom(1, 1)`.
fn idempotents(t: &TheoryHandle, file: Option<&Path>, cutoff: u64) -> Result<Vec<Idempotent>> {
    if let Some(path) = file {
        return Ok(vec![load_idempotent(t, path)?]);
    }
    let mut out = Vec::new();
    for u in t.hom_vec(1, 1, t.theory().default_bound(), cutoff)? {
        if is_idempotent(t, &u)? {
            out.push(Idempotent::new(t, u)?);
        }
    }
    Ok(out)
}

fn audit_idempotents(cli: &Cli, file: Option<&Path>, zigzag: bool) -> Result<Report> {
    let t = theory(cli)?;
    let us = idempotents(&t, file, cli.cutoff)?;
    let mut reports = Vec::new();
    let mut text = String::new();
    let mut passed = true;
    for u in &us {
        let data = serde_json::to_string(&u.morphism().data)?;
        if zigzag {
            let z = zigzag_functors(u, cli.max_rank, cli.cutoff)?;
            passed &= z.passed;
            let _ = writeln!(
                text,
                "zigzag {} u = {data}: identities {}, composition {} ({} composites): {}",
                t.id(),
                z.preserves_identities,
                z.preserves_composition,
                z.composites_checked,
                pass(z.passed)
            );
            reports.push(to_value(&z)?);
        } else {
            let a = lemma_audit(u, cli.max_rank, cli.cutoff)?;
            passed &= a.passed;
            let _ = writeln!(
                text,
                "lemma audit {} u = {data}: (1)<=>(2) {}, (2)=>(3) {}, (3)=>(2) {}{}: {}",
                t.id(),
                a.one_iff_two,
                a.two_implies_three,
                a.three_implies_two,
                a.counterexample
                    .as_ref()
                    .map(|c| format!(" (counterexample {c})"))
                    .unwrap_or_default(),
                pass(a.passed)
            );
            reports.push(to_value(&a)?);
        }
    }
    let kind = if zigzag { "audit:zigzag" } else { "audit:lemma" };
    Ok(Report {
        value: json!({
            "theory": t.id(),
            "invariant": kind,
            "max_rank": cli.max_rank,
            "idempotents": us.len(),
            "audits": reports,
            "passed": passed,
        }),
        text,
        failure: (!passed).then(|| format!("{kind} failed")),
    })
}

fn audit_whitehead(cli: &Cli, samples: usize, pairs: usize) -> Result<Report> {
    let t = theory(cli)?;
    let cfg = kcfg(cli);
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let ranks = cli.max_rank;
    let mut rows = Vec::new();
    let mut passed = true;
    for r in 1..=ranks {
        let n_w = samples / ranks + usize::from(r <= samples % ranks);
        let n_t = pairs / ranks + usize::from(r <= pairs % ranks);
        let mut w_ok = 0;
        for _ in 0..n_w {
            let w = random_automorphism(&t, r, &cfg, &mut rng)?;
            w_ok += usize::from(whitehead_witness(&t, &w)?.verified);
        }
        let mut t_ok = 0;
        for _ in 0..n_t {
            let u = random_automorphism(&t, r, &cfg, &mut rng)?;
            let v = random_automorphism(&t, r, &cfg, &mut rng)?;
            t_ok += usize::from(thrice_space_check(&t, &u, &v)?);
        }
        passed &= w_ok == n_w && t_ok == n_t;
        rows.push(json!({
            "rank": r,
            "whitehead_samples": n_w,
            "whitehead_verified": w_ok,
            "thrice_space_pairs": n_t,
            "thrice_space_verified": t_ok,
        }));
    }
    let mut text = format!("whitehead audit {} (seed {}): {}\n", t.id(), cli.seed, pass(passed));
    for row in &rows {
        let _ = writeln!(
            text,
            "  rank {}: commutator identity {}/{}, thrice-space identity {}/{}",
            row["rank"], row["whitehead_verified"], row["whitehead_samples"], row["thrice_space_verified"], row["thrice_space_pairs"]
        );
    }
    Ok(Report {
        value: json!({
            "theory": t.id(),
            "invariant": "audit:whitehead",
            "seed": cli.seed,
            "rows": rows,
            "passed": passed,
        }),
        text,
        failure: (!passed).then(|| "a commutator identity failed".to_string()),
    })
}

fn audit_matrix(cli: &Cli, n: usize) -> Result<Report> {
    let t = theory(cli)?;
    let rep = matrix_invariance_check(&t, n, cli.max_rank, cli.window, &kcfg(cli))?;
    let show = |g: &Option<lawk_core::abelian::FGAbelianGroup>| {
        g.as_ref().map(ToString::to_string).unwrap_or_else(|| "undetermined".into())
    };
    let mut text = format!(
        "matrix invariance {} vs {}: {} = {}, {} = {}: {}\n",
        rep.theory,
        rep.matrix_theory,
        rep.theory,
        show(&rep.base_value),
        rep.matrix_theory,
        show(&rep.matrix_value),
        pass(rep.passed)
    );
    for r in &rep.rows {
        let _ = writeln!(
            text,
            "  rank {} (base rank {}): |Aut| {} vs {}, H1 equal {}, map equal {}",
            r.rank,
            r.base_rank,
            r.matrix_aut_order,
            r.base_aut_order,
            r.abelianizations_equal,
            r.map_equal.map(|b| b.to_string()).unwrap_or_else(|| "-".into())
        );
    }
    let mut value = to_value(&rep)?;
    value["invariant"] = json!("audit:matrix");
    Ok(Report {
        failure: (!rep.passed).then(|| "matrix invariance failed".to_string()),
        value,
        text,
    })
}

fn fp_line(fp: &RetractFingerprint) -> String {
    let mut by_rank: Vec<String> = Vec::new();
    for r in 0..=fp.max_rank {
        let cls: Vec<String> = fp
            .classes
            .iter()
            .filter(|c| c.rank == r)
            .map(|c| format!("{}x{}", c.class_invariant, c.class_size))
            .collect();
        by_rank.push(format!("r{r}: {}", cls.join(" ")));
    }
    format!("{} [{}]: {}", fp.theory, serde_json::to_value(fp.mode).unwrap_or_default(), by_rank.join("; "))
}

fn fingerprint(cli: &Cli, compare: Option<&str>) -> Result<Report> {
    let t = theory(cli)?;
    match compare {
        None => {
            let fp = retract_fingerprint(&t, cli.max_rank, cli.cutoff)?;
            let mut value = to_value(&fp)?;
            value["invariant"] = json!("fingerprint");
            Ok(Report {
                text: format!("retract fingerprint {}\n", fp_line(&fp)),
                value,
                failure: None,
            })
        }
        Some(spec) => {
            let other = make_theory(spec)?;
            let reference = retract_fingerprint(&other, cli.max_rank, cli.cutoff)?;
            let fp = retract_fingerprint_against(&t, cli.max_rank, cli.cutoff, &reference)?;
            let matches = fp.matches(&reference);
            let mismatch = fp.first_mismatch(&reference);
            let text = format!(
                "retract fingerprint {}\n  vs {}\n  {}\n",
                fp_line(&fp),
                fp_line(&reference),
                if matches {
                    "classes agree".to_string()
                } else {
                    format!("first difference at rank {}", mismatch.unwrap_or(0))
                }
            );
            Ok(Report {
                value: json!({
                    "theory": t.id(),
                    "invariant": "fingerprint",
                    "compare": other.id(),
                    "matches": matches,
                    "first_mismatch": mismatch,
                    "fingerprint": fp,
                    "reference": reference,
                }),
                text,
                failure: None,
            })
        }
    }
}

fn morava(cli: &Cli, p: u64) -> Result<Report> {
    let rep = morava_factorization(p, cli.max_rank, &kcfg(cli))?;
    let mut text = format!("Morava factorization p = {}: {}\n", rep.p, pass(rep.passed));
    for r in &rep.rows {
        let _ = writeln!(
            text,
            "  r = {}: square commutes on generators: {}; H1: {} -> {} -> {} ({}, {}; direct {}; composite equal {})",
            r.rank,
            r.generators_agree,
            r.sym_ab,
            r.gl_ab,
            r.post_ab,
            r.sym_to_gl,
            r.gl_to_post,
            r.sym_to_post,
            r.composite_equal
        );
    }
    let mut value = to_value(&rep)?;
    value["invariant"] = json!("morava");
    Ok(Report {
        failure: (!rep.passed).then(|| "Morava square does not commute".to_string()),
        value,
        text,
    })
}

fn demo(cli: &Cli, file: Option<&Path>, compare: Option<&str>) -> Result<Report> {
    let base = matrix_theory(&make_theory("post:2")?, 2)?;
    let e = match file {
        Some(path) => load_idempotent(&base, path)?,
        None => Idempotent::new(&base, base.morphism(1, 1, MorphismData::Table(vec![0, 1, 2, 2]))?)?,
    };
    let image: BTreeSet<usize> = e.morphism().table()?.iter().copied().collect();
    let k = image.len();
    let modified = idempotent_modification(&e)?;
    let cfg = kcfg(cli);
    let mut stages = Vec::new();
    let mut text = String::from("Morita failure demo on matrix:2(post:2)\n");
    let mut failure: Option<String> = None;

    // (i)
    let aut1 = kinv::aut_group(&modified, 1, cfg.domain_cap)?;
    let ok1 = e.theory().compose(e.morphism(), e.morphism())? == *e.morphism();
    let _ = writeln!(
        text,
        "(i) e = {:?}: idempotent with {k}-point image; |Aut| of the modification at rank 1 = {}: {}",
        e.morphism().table()?,
        aut1.order(),
        pass(ok1)
    );
    stages.push(json!({
        "stage": "i",
        "idempotent": e.morphism().data,
        "image_size": k,
        "modified_aut_order_rank1": aut1.order().to_string(),
        "passed": ok1,
    }));
    if !ok1 {
        failure.get_or_insert_with(|| "stage (i): e is not idempotent".into());
    }

    // (ii)
    let pi = pseudo_invertible(&e, 3, cli.cutoff)?;
    let ok2 = pi.witness_rank().is_some();
    let _ = writeln!(
        text,
        "(ii) identity of T_1 factors through e_k: {}: {}",
        match &pi {
            PseudoInverse::Witness { k, .. } => format!("witness at k = {k}"),
            PseudoInverse::NotFoundUpTo { k_max } => format!("none up to k = {k_max}"),
        },
        pass(ok2)
    );
    stages.push(json!({"stage": "ii", "pseudo_inverse": pi, "passed": ok2}));
    if !ok2 {
        failure.get_or_insert_with(|| "stage (ii): e is not pseudo-invertible".into());
    }

    // (iii)
    let target = compare.map(str::to_string).unwrap_or_else(|| format!("post:{k}"));
    let other = make_theory(&target)?;
    let r_fp = 2;
    let reference = retract_fingerprint(&other, r_fp, cli.cutoff)?;
    let fp = retract_fingerprint_against(&modified, r_fp, cli.cutoff, &reference)?;
    let ok3 = fp.matches(&reference);
    let mismatch = fp.first_mismatch(&reference);
    let _ = writeln!(
        text,
        "(iii) retract fingerprints of the modification and {target} on ranks <= {r_fp}: {}: {}",
        match mismatch {
            None => "agree".to_string(),
            Some(r) => format!("differ at rank {r}"),
        },
        pass(ok3)
    );
    stages.push(json!({
        "stage": "iii",
        "compare": other.id(),
        "matches": ok3,
        "first_mismatch": mismatch,
        "fingerprint": fp,
        "reference": reference,
        "passed": ok3,
    }));
    if !ok3 {
        failure.get_or_insert_with(|| format!("stage (iii): fingerprint mismatch with {target} at rank {}", mismatch.unwrap_or(0)));
    }

    // (iv)
    let k1_base = kinv::k1(&make_theory("post:2")?, cli.max_rank, cli.window, &cfg)?;
    let k1_mod = kinv::k1(&modified, cli.max_rank, cli.window, &cfg)?;
    let vb = to_value(&k1_base.value)?;
    let vm = to_value(&k1_mod.value)?;
    let discrepancy = k1_base.value.is_some() && k1_mod.value.is_some() && k1_base.value != k1_mod.value;
    let _ = writeln!(
        text,
        "(iv) K1(post:2) = {}, K1(modification) = {}: {}",
        group_or_none(&vb),
        group_or_none(&vm),
        if discrepancy { "differ" } else { "no discrepancy" }
    );
    stages.push(json!({
        "stage": "iv",
        "k1_post2": vb,
        "k1_modification": vm,
        "pattern_post2": k1_base.pattern,
        "pattern_modification": k1_mod.pattern,
        "window": k1_mod.window,
        "discrepancy": discrepancy,
        "passed": true,
    }));

    let status = match (&failure, discrepancy) {
        (Some(_), _) => "stage-failed",
        (None, true) => "morita-failure-exhibited",
        (None, false) => "no-discrepancy",
    };
    let _ = writeln!(text, "status: {status}");
    Ok(Report {
        value: json!({
            "theory": modified.id(),
            "invariant": "demo",
            "status": status,
            "stages": stages,
        }),
        text,
        failure,
    })
}
