use serde::Serialize;

use super::{aut_group, KConfig};
use crate::abelian::FGAbelianGroup;
use crate::error::{Error, Result};
use crate::kernel::{Rank, TheoryHandle};
use crate::perm::{abelianization, induce_ab_map, GroupHom, PermGroup};
use crate::zoo::{ModRingTheory, PostTheory};

#[derive(Clone, Debug, Serialize)]
pub struct MoravaRow {
    pub rank: Rank,
    pub sym_ab: FGAbelianGroup,
    pub gl_ab: FGAbelianGroup,
    pub post_ab: FGAbelianGroup,
    /// `post_free(σ)` equals the permutation of `F_p^r` induced by the matrix of `σ`, on generators.
    pub generators_agree: bool,
    pub sym_to_gl: &'static str,
    pub gl_to_post: &'static str,
    pub sym_to_post: &'static str,
    pub composite_equal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MoravaReport {
    pub p: u64,
    pub rows: Vec<MoravaRow>,
    pub passed: bool,
}

/// Factor `Σ_r -> Aut(Post_p T_r) = Σ_{p^r}` through `GL_r(F_p)`, rank by rank.
pub fn morava_factorization(p: u64, max_rank: Rank, cfg: &KConfig) -> Result<MoravaReport> {
    let ring = ModRingTheory::new(p)?;
    let pv = usize::try_from(p).map_err(|_| Error::UnsupportedParameter(format!("p = {p}")))?;
    let post_theory = PostTheory::new(pv)?;
    let rt = TheoryHandle::new(ModRingTheory::new(p)?);
    let post = TheoryHandle::new(PostTheory::new(pv)?);
    let mut rows = Vec::new();
    for r in 1..=max_rank {
        let sym = PermGroup::symmetric(r);
        let gl = aut_group(&rt, r, cfg.domain_cap)?;
        let big = aut_group(&post, r, cfg.domain_cap)?;
        let mut via_gl = Vec::new();
        let mut direct = Vec::new();
        for s in sym.generators() {
            let mut rows_m = vec![vec![0u64; r]; r];
            for i in 0..r {
                rows_m[s.apply(i)][i] = 1;
            }
            let m = rt.automorphism(&ring.matrix(r, r, rows_m))?;
            via_gl.push(rt.to_perm(&m)?);
            let f = post.automorphism(&post_theory.from_set_map(s.images(), r)?)?;
            direct.push(post.to_perm(&f)?);
        }
        let generators_agree = via_gl == direct;
        let sym_to_gl = GroupHom::new(sym.clone(), gl.clone(), via_gl)?;
        let gl_to_post = GroupHom::new(gl.clone(), big.clone(), gl.generators().to_vec())?;
        let sym_to_post = GroupHom::new(sym.clone(), big.clone(), direct)?;
        let a_sym = abelianization(&sym, cfg.quotient_cap)?;
        let a_gl = abelianization(&gl, cfg.quotient_cap)?;
        let a_big = abelianization(&big, cfg.quotient_cap)?;
        let m1 = induce_ab_map(&sym_to_gl, &a_sym, &a_gl)?;
        let m2 = induce_ab_map(&gl_to_post, &a_gl, &a_big)?;
        let m3 = induce_ab_map(&sym_to_post, &a_sym, &a_big)?;
        rows.push(MoravaRow {
            rank: r,
            sym_ab: a_sym.group().clone(),
            gl_ab: a_gl.group().clone(),
            post_ab: a_big.group().clone(),
            generators_agree,
            sym_to_gl: m1.classify(),
            gl_to_post: m2.classify(),
            sym_to_post: m3.classify(),
            composite_equal: m2.compose(&m1)? == m3,
        });
    }
    Ok(MoravaReport {
        p,
        passed: rows.iter().all(|r| r.generators_agree && r.composite_equal),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_mod_two_and_three() {
        for p in [2, 3] {
            let rep = morava_factorization(p, 3, &KConfig::default()).unwrap();
            assert!(rep.passed, "{rep:?}");
        }
    }

    #[test]
    fn sign_survives_for_odd_p() {
        let rep = morava_factorization(3, 2, &KConfig::default()).unwrap();
        let row = &rep.rows[1];
        assert!(matches!(row.sym_to_gl, "iso" | "identity"));
        assert_ne!(row.sym_to_post, "zero");
        let rep = morava_factorization(2, 2, &KConfig::default()).unwrap();
        assert_eq!(rep.rows[1].gl_ab, FGAbelianGroup::cyclic(2));
    }
}
