use lawk_core::kernel::{MorphismData, TheoryHandle};
use lawk_core::kinv::{aut_group, k1, KConfig};
use lawk_core::morita::{
    condition, idempotent_modification, is_idempotent, lemma_audit, matrix_theory, pseudo_invertible,
    retract_fingerprint, retract_fingerprint_against, zigzag_functors, ConditionPath, Idempotent, PseudoInverse,
};
use lawk_core::zoo::make_theory;
use lawk_core::abelian::FGAbelianGroup;

const CUTOFF: u64 = 10_000_000;

fn post2_idempotent(table: Vec<usize>) -> Idempotent {
    let t = make_theory("post:2").unwrap();
    let u = t.morphism(1, 1, MorphismData::Table(table)).unwrap();
    Idempotent::new(&t, u).unwrap()
}

fn flagship() -> (TheoryHandle, Idempotent) {
    let m = matrix_theory(&make_theory("post:2").unwrap(), 2).unwrap();
    let e = m.morphism(1, 1, MorphismData::Table(vec![0, 1, 2, 2])).unwrap();
    let e = Idempotent::new(&m, e).unwrap();
    (m, e)
}

#[test]
fn idempotent_recognition() {
    let t = make_theory("post:2").unwrap();
    let id = t.identity(1).unwrap();
    assert!(is_idempotent(&t, &id).unwrap());
    let c = t.morphism(1, 1, MorphismData::Table(vec![0, 0])).unwrap();
    assert!(is_idempotent(&t, &c).unwrap());
    let swap = t.morphism(1, 1, MorphismData::Table(vec![1, 0])).unwrap();
    assert!(!is_idempotent(&t, &swap).unwrap());
    assert!(is_idempotent(&t, &t.identity(2).unwrap()).is_err());
}

#[test]
fn conditions_on_constant() {
    let u = post2_idempotent(vec![0, 0]);
    let t = u.theory().clone();
    let f = u.morphism().clone();
    for which in 1..=3 {
        assert!(condition(&f, &u, which, CUTOFF).unwrap().holds);
    }
    let id = t.identity(1).unwrap();
    assert!(!condition(&id, &u, 2, CUTOFF).unwrap().holds);
    assert!(condition(&id, &u, 3, CUTOFF).unwrap().holds);
    let c1 = condition(&id, &u, 1, CUTOFF).unwrap();
    assert!(!c1.holds);
    assert_eq!(c1.path, ConditionPath::Search);
}

#[test]
fn lemma_audit_post2() {
    for table in [vec![0, 1], vec![0, 0], vec![1, 1]] {
        let u = post2_idempotent(table.clone());
        let a = lemma_audit(&u, 2, CUTOFF).unwrap();
        assert!(a.passed, "{table:?}");
        assert_eq!(a.is_identity, table == [0, 1]);
        assert_eq!(a.counterexample.is_some(), table != [0, 1]);
    }
}

#[test]
fn lemma_audit_mod2_zero() {
    let t = make_theory("mod:2").unwrap();
    let z = t.morphism(1, 1, MorphismData::Matrix(vec![vec![0]])).unwrap();
    let u = Idempotent::new(&t, z).unwrap();
    let a = lemma_audit(&u, 2, CUTOFF).unwrap();
    assert!(a.passed);
    assert!(a.rows.iter().all(|r| r.condition2 == 1));
}

#[test]
fn modification_by_constant_is_singletons() {
    let u = post2_idempotent(vec![0, 0]);
    let m = idempotent_modification(&u).unwrap();
    for r in 0..=2 {
        for s in 0..=2 {
            assert_eq!(m.hom(r, s, None).unwrap().count(), 1);
        }
    }
}

#[test]
fn modification_by_identity_is_base() {
    let t = make_theory("post:2").unwrap();
    let u = Idempotent::identity(&t).unwrap();
    let m = idempotent_modification(&u).unwrap();
    for r in 0..=2 {
        for s in 0..=2 {
            let a: Vec<_> = m.hom(r, s, None).unwrap().map(|f| f.data).collect();
            let b: Vec<_> = t.hom(r, s, None).unwrap().map(|f| f.data).collect();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn flagship_modification() {
    let (_, e) = flagship();
    let m = idempotent_modification(&e).unwrap();
    assert_eq!(m.hom(1, 1, None).unwrap().count(), 27);
    assert_eq!(aut_group(&m, 1, 1000).unwrap().order_u64(), Some(6));
    let rep = k1(&m, 3, 3, &KConfig::default()).unwrap();
    assert_eq!(rep.value, Some(FGAbelianGroup::cyclic(2)));
}

#[test]
fn pseudo_invertibility() {
    let t = make_theory("post:2").unwrap();
    let id = Idempotent::identity(&t).unwrap();
    assert_eq!(pseudo_invertible(&id, 3, CUTOFF).unwrap().witness_rank(), Some(1));
    let c = post2_idempotent(vec![0, 0]);
    assert!(matches!(
        pseudo_invertible(&c, 3, CUTOFF).unwrap(),
        PseudoInverse::NotFoundUpTo { k_max: 3 }
    ));
    let (_, e) = flagship();
    let w = pseudo_invertible(&e, 3, CUTOFF).unwrap();
    assert_eq!(w.witness_rank(), Some(2));
    for k in 3..=4 {
        assert_eq!(pseudo_invertible(&e, k, CUTOFF).unwrap().witness_rank(), Some(2));
    }
}

fn invariants(fp: &lawk_core::morita::RetractFingerprint, r: usize) -> Vec<u64> {
    fp.classes.iter().filter(|c| c.rank == r).map(|c| c.class_invariant).collect()
}

#[test]
fn fingerprints() {
    let p2 = retract_fingerprint(&make_theory("post:2").unwrap(), 2, CUTOFF).unwrap();
    assert_eq!(invariants(&p2, 2), vec![1, 2, 3, 4]);
    assert!(p2.equivalence_verified);
    let p3 = retract_fingerprint(&make_theory("post:3").unwrap(), 1, CUTOFF).unwrap();
    assert_eq!(invariants(&p3, 1), vec![1, 2, 3]);
    let sets = retract_fingerprint(&make_theory("sets").unwrap(), 2, CUTOFF).unwrap();
    assert_eq!(invariants(&sets, 0), vec![0]);
    assert_eq!(invariants(&sets, 2), vec![1, 2]);
}

#[test]
fn flagship_fingerprint_matches_post3() {
    let (_, e) = flagship();
    let m = idempotent_modification(&e).unwrap();
    let p3 = retract_fingerprint(&make_theory("post:3").unwrap(), 2, CUTOFF).unwrap();
    let fm = retract_fingerprint_against(&m, 2, CUTOFF, &p3).unwrap();
    assert!(fm.matches(&p3), "{fm:?}");
    let p4 = retract_fingerprint(&make_theory("post:4").unwrap(), 2, CUTOFF).unwrap();
    let fm4 = retract_fingerprint_against(&m, 2, CUTOFF, &p4).unwrap();
    assert_eq!(fm4.first_mismatch(&p4), Some(1));
}

#[test]
fn zigzag() {
    let t = make_theory("post:2").unwrap();
    let z = zigzag_functors(&Idempotent::identity(&t).unwrap(), 2, CUTOFF).unwrap();
    assert!(z.passed);
    assert!(z.rows.iter().all(|r| r.base_morphisms == r.restriction_image));
    let c = zigzag_functors(&post2_idempotent(vec![0, 0]), 2, CUTOFF).unwrap();
    assert!(c.passed);
    assert!(c.rows.iter().all(|r| r.restriction_image == 1));
    let (_, e) = flagship();
    let f = zigzag_functors(&e, 1, CUTOFF).unwrap();
    assert!(f.passed);
    let row = f.rows.iter().find(|r| r.src == 1 && r.dst == 1).unwrap();
    assert_eq!(row.base_morphisms, 256);
    assert_eq!(row.restriction_image, 27);
}
