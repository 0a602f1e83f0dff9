//! K₀ from iso-classes of free models, K₁ (equivalently stable H₁) from
//! abelianized automorphism groups, and the audits around them.

mod audits;
mod k0;
mod k1;
mod morava;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::abelian::FGAbelianGroup;
use crate::error::Result;
use crate::kernel::{Rank, TheoryHandle};
use crate::perm::{GroupHom, PermGroup, DEFAULT_QUOTIENT_CAP};

pub use audits::{
    matrix_invariance_check, perfectness_probe, random_automorphism, stabilization_audit, thrice_space_check,
    whitehead_witness, MatrixInvarianceReport, MatrixInvarianceRow, PerfectnessReport, PerfectnessRow,
    StabilizationAudit, StabilizationStep, WhiteheadWitness,
};
pub use k0::{k0, K0Mode, K0Report};
pub use k1::{k1, stable_h1, CrossCheck, K1Report, StageRow};
pub use morava::{morava_factorization, MoravaReport, MoravaRow};

/// Largest permutation domain for automorphism realizations.
pub const DEFAULT_DOMAIN_CAP: usize = 200_000;
pub const DEFAULT_HOM_CUTOFF: u64 = 10_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct KConfig {
    pub domain_cap: usize,
    pub quotient_cap: u64,
    pub hom_cutoff: u64,
}

impl Default for KConfig {
    fn default() -> Self {
        KConfig {
            domain_cap: DEFAULT_DOMAIN_CAP,
            quotient_cap: DEFAULT_QUOTIENT_CAP,
            hom_cutoff: DEFAULT_HOM_CUTOFF,
        }
    }
}

/// Stable stems in degrees 0 and 1. These are literature values used only
/// for cross-checks, never as input to a computation.
#[derive(Clone, Debug, Serialize)]
pub struct ReferenceStems {
    pub pi0: FGAbelianGroup,
    pub pi1: FGAbelianGroup,
    pub provenance: &'static str,
}

impl ReferenceStems {
    pub const PROVENANCE: &'static str = "external literature, not computed";

    pub fn get() -> Self {
        ReferenceStems {
            pi0: FGAbelianGroup::free(1),
            pi1: FGAbelianGroup::cyclic(2),
            provenance: Self::PROVENANCE,
        }
    }
}

/// `A / (v-power torsion)`: strip from each invariant factor every prime dividing `v`.
pub fn kill_torsion(a: &FGAbelianGroup, v: u64) -> FGAbelianGroup {
    let v = BigUint::from(v);
    let mut moduli: Vec<BigUint> = Vec::new();
    for d in a.invariant_factors() {
        let mut d = d.clone();
        if v.is_zero() {
            moduli.push(d);
            continue;
        }
        loop {
            let g = d.gcd(&v);
            if g.is_one() {
                break;
            }
            d /= g;
        }
        moduli.push(d);
    }
    moduli.extend(std::iter::repeat_n(BigUint::zero(), a.free_rank()));
    FGAbelianGroup::from_moduli(&moduli)
}

/// `Aut(T_r)` as a permutation group through the theory's realization.
pub fn aut_group(t: &TheoryHandle, r: Rank, domain_cap: usize) -> Result<PermGroup> {
    let real = t.aut_realization(r, domain_cap)?;
    PermGroup::new(real.domain, real.generators)
}

/// The stabilization `Aut(T_r) -> Aut(T_{r+1})`, `u ↦ u + id(T_1)`.
pub fn stabilization_hom(t: &TheoryHandle, r: Rank, source: &PermGroup, target: &PermGroup) -> Result<GroupHom> {
    let images = source
        .generators()
        .iter()
        .map(|g| {
            let u = t.from_perm(r, g)?;
            t.to_perm(&t.stabilize(&u, 1)?)
        })
        .collect::<Result<Vec<_>>>()?;
    GroupHom::new(source.clone(), target.clone(), images)
}
