//! Brute-force reference computations used to cross-check the stabilizer-chain
//! machinery on small groups. Nothing here touches [`super::PermGroup`].

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use super::Perm;

/// Every element of `⟨gens⟩`, by breadth-first closure.
pub fn closure(degree: usize, gens: &[Perm]) -> HashSet<Perm> {
    let id = Perm::identity(degree);
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.compose(&x);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// `[G, G]` as the closure of all commutators of elements.
pub fn derived_closure(degree: usize, elements: &HashSet<Perm>) -> HashSet<Perm> {
    let mut comms: Vec<Perm> = Vec::new();
    let mut seen = HashSet::new();
    for a in elements {
        for b in elements {
            let c = a.commutator(b);
            if seen.insert(c.clone()) {
                comms.push(c);
            }
        }
    }
    closure(degree, &comms)
}

/// Invariant factors of `G/N` (`N` normal) from the census of element orders
/// in the quotient: for each prime `p` the counts `#{x : p^j x = 0}` fix the
/// partition of the `p`-part.
pub fn abelian_quotient_by_census(elements: &HashSet<Perm>, normal: &HashSet<Perm>) -> Vec<u64> {
    // Label cosets.
    let mut label: HashMap<Perm, usize> = HashMap::new();
    let mut reps: Vec<Perm> = Vec::new();
    for g in elements {
        if label.contains_key(g) {
            continue;
        }
        let idx = reps.len();
        reps.push(g.clone());
        for n in normal {
            label.insert(g.compose(n), idx);
        }
    }
    let index = reps.len() as u64;
    if index == 1 {
        return vec![];
    }
    // Order of each coset in the quotient.
    let orders: Vec<u64> = reps
        .iter()
        .map(|r| {
            let mut x = r.clone();
            let mut k = 1u64;
            while !normal.contains(&x) {
                x = x.compose(r);
                k += 1;
            }
            k
        })
        .collect();
    let mut primes = Vec::new();
    let mut m = index;
    let mut p = 2;
    while m > 1 {
        if m % p == 0 {
            primes.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    // For each prime, exponents of the cyclic p-factors, largest first.
    let mut pparts: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &p in &primes {
        // c[j] = log_p #{x : x^{p^j} = 1}
        let mut logs = vec![0u32];
        let mut j = 1u32;
        loop {
            let pj = p.pow(j);
            let count = orders.iter().filter(|&&o| pj % o == 0).count() as u64;
            let mut l = 0u32;
            let mut c = count;
            while c > 1 {
                c /= p;
                l += 1;
            }
            logs.push(l);
            if logs[j as usize] == logs[j as usize - 1] {
                break;
            }
            j += 1;
        }
        // Number of cyclic factors of order >= p^j is logs[j] - logs[j-1].
        let mut exps = Vec::new();
        let ge: Vec<u32> = (1..logs.len()).map(|j| logs[j] - logs[j - 1]).collect();
        for (j, &cnt) in ge.iter().enumerate() {
            let next = ge.get(j + 1).copied().unwrap_or(0);
            for _ in 0..(cnt - next) {
                exps.push(j as u32 + 1);
            }
        }
        exps.sort_unstable_by(|a, b| b.cmp(a));
        pparts.insert(p, exps);
    }
    let len = pparts.values().map(Vec::len).max().unwrap_or(0);
    let mut factors: Vec<u64> = (0..len)
        .map(|i| {
            pparts
                .iter()
                .map(|(&p, exps)| exps.get(i).map_or(1, |&e| p.pow(e)))
                .product()
        })
        .collect();
    factors.reverse();
    factors
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_of_klein_four_and_cyclic() {
        let a = Perm::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap();
        let b = Perm::from_cycles(4, &[&[0, 2], &[1, 3]]).unwrap();
        let v4 = closure(4, &[a, b]);
        let triv = closure(4, &[]);
        assert_eq!(abelian_quotient_by_census(&v4, &triv), vec![2, 2]);
        let c = Perm::from_cycles(6, &[&[0, 1, 2, 3, 4, 5]]).unwrap();
        let c6 = closure(6, &[c]);
        assert_eq!(abelian_quotient_by_census(&c6, &closure(6, &[])), vec![6]);
    }

    #[test]
    fn census_of_s4_abelianization() {
        let a = Perm::from_cycles(4, &[&[0, 1]]).unwrap();
        let b = Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
        let s4 = closure(4, &[a, b]);
        let d = derived_closure(4, &s4);
        assert_eq!(d.len(), 12);
        assert_eq!(abelian_quotient_by_census(&s4, &d), vec![2]);
    }
}
