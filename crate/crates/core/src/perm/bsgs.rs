use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use super::Perm;
use crate::error::{Error, Result};

/// Consecutive trivial sifts that end the random phase.
const RANDOM_QUIET: usize = 24;

/// Product replacement generator of (nearly) uniform random elements.
struct ProductReplacement {
    state: Vec<Perm>,
    acc: Perm,
}

impl ProductReplacement {
    fn new(gens: &[Perm], rng: &mut ChaCha8Rng) -> Self {
        let len = gens.len().max(10);
        let state = (0..len).map(|i| gens[i % gens.len()].clone()).collect();
        let mut pr = ProductReplacement {
            state,
            acc: Perm::identity(gens[0].degree()),
        };
        for _ in 0..50 {
            pr.next(rng);
        }
        pr
    }

    fn next(&mut self, rng: &mut ChaCha8Rng) -> Perm {
        let n = self.state.len();
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let sj = if rng.gen() { self.state[j].clone() } else { self.state[j].inverse() };
        self.state[i] = if rng.gen() { self.state[i].compose(&sj) } else { sj.compose(&self.state[i]) };
        self.acc = self.acc.compose(&self.state[i]);
        self.acc.clone()
    }
}

#[derive(Clone, Debug)]
struct Transversal {
    point: usize,
    orbit: Vec<usize>,
    // reps[b] maps `point` to `b`; inv[b] is its inverse.
    reps: Vec<Option<Perm>>,
    inv: Vec<Option<Perm>>,
}

impl Transversal {
    fn build(point: usize, degree: usize, gens: &[&Perm]) -> Self {
        let mut reps: Vec<Option<Perm>> = vec![None; degree];
        reps[point] = Some(Perm::identity(degree));
        let mut orbit = vec![point];
        let mut head = 0;
        while head < orbit.len() {
            let beta = orbit[head];
            head += 1;
            for s in gens {
                let gamma = s.apply(beta);
                if reps[gamma].is_none() {
                    let u = s.compose(reps[beta].as_ref().expect("orbit point has a rep"));
                    reps[gamma] = Some(u);
                    orbit.push(gamma);
                }
            }
        }
        let inv = reps.iter().map(|r| r.as_ref().map(Perm::inverse)).collect();
        Transversal {
            point,
            orbit,
            reps,
            inv,
        }
    }
}

/// A permutation group with a base and strong generating set. Seeded random
/// sifting builds most of the chain; deterministic Schreier–Sims then checks
/// every Schreier generator, so order and membership are exact.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    strong: Vec<Perm>,
    levels: Vec<Transversal>,
    order: BigUint,
}

impl Serialize for PermGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            domain: usize,
            generators: &'a [Perm],
        }
        Repr {
            domain: self.degree,
            generators: &self.generators,
        }
        .serialize(serializer)
    }
}

impl PermGroup {
    /// Build the stabilizer chain of `⟨generators⟩` on `degree` points.
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(Error::DomainMismatch(format!(
                "generator of degree {} in a group on {degree} points",
                g.degree()
            )));
        }
        let mut group = PermGroup {
            degree,
            generators,
            strong: Vec::new(),
            levels: Vec::new(),
            order: BigUint::one(),
        };
        let mut strong: Vec<Perm> = Vec::new();
        for g in &group.generators {
            if !g.is_identity() && !strong.contains(g) {
                strong.push(g.clone());
            }
        }
        group.strong = strong;
        group.schreier_sims();
        Ok(group)
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup::new(degree, Vec::new()).expect("trivial group")
    }

    /// The full symmetric group, generated by a transposition and a long cycle.
    pub fn symmetric(degree: usize) -> Self {
        let mut gens = Vec::new();
        if degree >= 2 {
            let mut t: Vec<usize> = (0..degree).collect();
            t.swap(0, 1);
            gens.push(Perm::from_images_unchecked(t));
            if degree > 2 {
                gens.push(Perm::from_images_unchecked((0..degree).map(|i| (i + 1) % degree).collect()));
            }
        }
        PermGroup::new(degree, gens).expect("symmetric group")
    }

    fn base_fixers<'a>(strong: &'a [Perm], base: &[usize]) -> Vec<&'a Perm> {
        strong
            .iter()
            .filter(|s| base.iter().all(|&b| s.apply(b) == b))
            .collect()
    }

    fn schreier_sims(&mut self) {
        self.random_phase();
        self.verify_phase();
    }

    fn rebuild_level(&mut self, base: &[usize], l: usize) {
        self.levels[l] = Transversal::build(base[l], self.degree, &Self::base_fixers(&self.strong, &base[..l]));
    }

    fn update_order(&mut self) {
        self.order = self
            .levels
            .iter()
            .fold(BigUint::one(), |acc, t| acc * BigUint::from(t.orbit.len()));
    }

    /// Record a non-identity residue that stopped sifting at level `j`.
    fn add_residue(&mut self, base: &mut Vec<usize>, residue: Perm, j: usize) {
        if j == base.len() {
            let b = residue.first_moved().expect("non-identity residue");
            base.push(b);
            self.levels.push(Transversal::build(b, self.degree, &[]));
        }
        self.strong.push(residue);
    }

    /// Seeded random sifting: grows a chain that is usually complete. Every
    /// element added lies in the group, so the result is always a valid
    /// partial chain; completeness is left to [`Self::verify_phase`].
    fn random_phase(&mut self) {
        let mut base: Vec<usize> = Vec::new();
        for g in &self.strong {
            if base.iter().all(|&b| g.apply(b) == b) {
                base.push(g.first_moved().expect("non-identity generator"));
            }
        }
        self.levels = Vec::with_capacity(base.len());
        for (i, &b) in base.iter().enumerate() {
            self.levels
                .push(Transversal::build(b, self.degree, &Self::base_fixers(&self.strong, &base[..i])));
        }
        self.random_sift(&mut base);
        self.update_order();
    }

    fn random_sift(&mut self, base: &mut Vec<usize>) {
        if self.strong.is_empty() || self.degree <= 8 {
            return;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ self.degree as u64 ^ (self.strong.len() as u64) << 32);
        let mut pr = ProductReplacement::new(&self.strong, &mut rng);
        let mut quiet = 0;
        while quiet < RANDOM_QUIET {
            let g = pr.next(&mut rng);
            let (residue, j) = self.sift_from(&g, 0);
            if residue.is_identity() {
                quiet += 1;
                continue;
            }
            quiet = 0;
            self.add_residue(base, residue, j);
            for l in 0..=j {
                self.rebuild_level(base, l);
            }
        }
    }

    /// Deterministic Schreier–Sims: every Schreier generator at every level
    /// must sift to the identity through the levels below it.
    fn verify_phase(&mut self) {
        let mut base = self.base();
        let mut level = base.len();
        while level > 0 {
            let i = level - 1;
            self.rebuild_level(&base, i);
            let mut added_at = None;
            let gens: Vec<Perm> = Self::base_fixers(&self.strong, &base[..i])
                .into_iter()
                .cloned()
                .collect();
            'check: for &beta in &self.levels[i].orbit.clone() {
                for s in &gens {
                    let gamma = s.apply(beta);
                    let t = &self.levels[i];
                    let h = t.inv[gamma]
                        .as_ref()
                        .expect("orbit closed")
                        .compose(s)
                        .compose(t.reps[beta].as_ref().expect("orbit point"));
                    if h.is_identity() {
                        continue;
                    }
                    let (residue, j) = self.sift_from(&h, i + 1);
                    if residue.is_identity() {
                        continue;
                    }
                    self.add_residue(&mut base, residue, j);
                    added_at = Some(j);
                    break 'check;
                }
            }
            match added_at {
                Some(j) => {
                    // Levels below j are rebuilt as the loop walks back down.
                    for l in (i + 1)..=j {
                        self.rebuild_level(&base, l);
                    }
                    level = j + 1;
                }
                None => level -= 1,
            }
        }
        self.update_order();
    }

    /// Strip `g` through the chain from `level`; returns the residue and the
    /// level where sifting stopped (`base.len()` when it ran through).
    fn sift_from(&self, g: &Perm, level: usize) -> (Perm, usize) {
        let mut h = g.clone();
        for (l, t) in self.levels.iter().enumerate().skip(level) {
            let beta = h.apply(t.point);
            match &t.inv[beta] {
                Some(inv) => h = inv.compose(&h),
                None => return (h, l),
            }
        }
        let len = self.levels.len();
        (h, len)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.strong
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|t| t.point).collect()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|t| t.orbit.len()).collect()
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.order.to_u64()
    }

    pub fn is_trivial(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.sift_from(g, 0).0.is_identity()
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.generators.iter().all(|g| other.contains(g))
    }

    /// Factor over the transversals using only the first `g.degree()` points.
    /// Valid when every base point lies in that prefix and group elements
    /// preserve it.
    pub(crate) fn factor_prefix(&self, g: &Perm) -> Option<Vec<&Perm>> {
        let n = g.degree();
        let mut h = g.clone();
        let mut out = Vec::with_capacity(self.levels.len());
        for t in &self.levels {
            if t.point >= n {
                return None;
            }
            let beta = h.apply(t.point);
            let (rep, inv) = (t.reps[beta].as_ref()?, t.inv[beta].as_ref()?);
            h = Perm::from_images_unchecked(h.images().iter().map(|&x| inv.apply(x)).collect());
            out.push(rep);
        }
        h.is_identity().then_some(out)
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Perm {
        let mut g = Perm::identity(self.degree);
        for t in &self.levels {
            let beta = t.orbit[rng.gen_range(0..t.orbit.len())];
            g = g.compose(t.reps[beta].as_ref().expect("orbit point"));
        }
        g
    }

    /// All elements, in transversal order. Refuses groups larger than `cap`.
    pub fn elements(&self, cap: u64) -> Result<Vec<Perm>> {
        if self.order > BigUint::from(cap) {
            return Err(Error::cutoff("group element list", &self.order, cap));
        }
        let mut out = vec![Perm::identity(self.degree)];
        for t in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * t.orbit.len());
            for &b in &t.orbit {
                let u = t.reps[b].as_ref().expect("orbit point");
                next.extend(out.iter().map(|g| u.compose(g)));
            }
            out = next;
        }
        Ok(out)
    }

    /// The group generated by these generators and `g`.
    pub fn with_generator(&self, g: Perm) -> Result<PermGroup> {
        let mut gens = self.generators.clone();
        gens.push(g);
        PermGroup::new(self.degree, gens)
    }

    /// Like [`PermGroup::new`] without the verification pass: orders are lower
    /// bounds and a positive membership answer is still exact.
    fn new_partial(degree: usize, generators: Vec<Perm>) -> PermGroup {
        let mut strong: Vec<Perm> = Vec::new();
        for g in &generators {
            if !g.is_identity() && !strong.contains(g) {
                strong.push(g.clone());
            }
        }
        let mut group = PermGroup {
            degree,
            generators,
            strong,
            levels: Vec::new(),
            order: BigUint::one(),
        };
        group.random_phase();
        group
    }

    /// Normal closure of `gens` under conjugation by this group's generators.
    pub fn normal_closure(&self, gens: Vec<Perm>) -> Result<PermGroup> {
        if let Some(g) = gens.iter().find(|g| g.degree() != self.degree) {
            return Err(Error::DomainMismatch(format!(
                "generator of degree {} in a group on {} points",
                g.degree(),
                self.degree
            )));
        }
        let mut closure = PermGroup::new_partial(self.degree, gens);
        let mut verified = false;
        loop {
            let mut grew = false;
            let mut i = 0;
            while i < closure.generators.len() {
                for g in &self.generators {
                    let x = closure.generators[i].conjugate_by(g);
                    if closure.absorb(&x) {
                        closure.generators.push(x);
                        grew = true;
                    }
                }
                i += 1;
            }
            if grew {
                let mut base = closure.base();
                closure.random_sift(&mut base);
                closure.update_order();
                verified = false;
            } else if verified {
                return Ok(closure);
            } else {
                closure.verify_phase();
                verified = true;
            }
        }
    }

    /// Sift `x` and, if it is not yet covered by the chain, add its residue.
    /// Each absorption strictly enlarges one basic orbit.
    fn absorb(&mut self, x: &Perm) -> bool {
        let (residue, j) = self.sift_from(x, 0);
        if residue.is_identity() {
            return false;
        }
        let mut base = self.base();
        self.add_residue(&mut base, residue, j);
        for l in 0..=j {
            self.rebuild_level(&base, l);
        }
        self.update_order();
        true
    }

    /// `[G, G]`: normal closure of the pairwise generator commutators.
    pub fn derived_subgroup(&self) -> PermGroup {
        let mut comms = Vec::new();
        for (i, a) in self.generators.iter().enumerate() {
            for b in &self.generators[i + 1..] {
                let c = a.commutator(b);
                if !c.is_identity() && !comms.contains(&c) {
                    comms.push(c);
                }
            }
        }
        self.normal_closure(comms).expect("same degree")
    }

    pub fn is_perfect(&self) -> bool {
        self.derived_subgroup().order() == self.order()
    }
}
