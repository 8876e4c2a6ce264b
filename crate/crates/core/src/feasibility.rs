//! The independence system over (user, ad) assignment pairs induced by the
//! attention constraints: a set of pairs is independent when every user
//! stays within their per-user limit and the total stays within the overall
//! limit. This is a laminar matroid (per-user groups nested under the
//! global cap); [`verify_matroid_axioms`] checks the two matroid axioms
//! exhaustively at small scale rather than taking that on faith.

use crate::model::AttentionConstraints;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// Largest ground set (users x ads) the exhaustive axiom verifier accepts.
pub const MAX_AXIOM_GROUND_SET: usize = 12;

#[derive(Debug, Error)]
pub enum FeasibilityError {
    #[error("ground set of {size} pairs exceeds the exhaustive-check cap of {max}")]
    GroundSetTooLarge { size: usize, max: usize },
    #[error("candidate pair (user {user}, ad {ad}) is already in the set")]
    CandidateAlreadyPresent { user: usize, ad: usize },
}

/// One cell of the allocation matrix: user `user` assigned to ad `ad`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AssignmentPair {
    pub user: usize,
    pub ad: usize,
}

/// True iff every user's pair count is within their limit and the total
/// pair count is within the overall limit.
pub fn is_independent(
    pairs: &BTreeSet<AssignmentPair>,
    constraints: &AttentionConstraints,
) -> bool {
    if pairs.len() > constraints.overall() {
        return false;
    }
    let mut count = vec![0usize; constraints.num_users()];
    for p in pairs {
        count[p.user] += 1;
        if count[p.user] > constraints.kappa(p.user) {
            return false;
        }
    }
    true
}

/// True iff `pairs` stays independent after adding `candidate`.
///
/// Expects `pairs` to already be independent; errors if the candidate is
/// already present.
pub fn can_add(
    pairs: &BTreeSet<AssignmentPair>,
    candidate: AssignmentPair,
    constraints: &AttentionConstraints,
) -> Result<bool, FeasibilityError> {
    if pairs.contains(&candidate) {
        return Err(FeasibilityError::CandidateAlreadyPresent {
            user: candidate.user,
            ad: candidate.ad,
        });
    }
    if pairs.len() + 1 > constraints.overall() {
        return Ok(false);
    }
    let user_count = pairs.iter().filter(|p| p.user == candidate.user).count();
    Ok(user_count < constraints.kappa(candidate.user))
}

/// Exhaustively verify the two matroid axioms for the attention-constraint
/// independence system over a `num_users` x `num_ads` ground set.
pub fn verify_matroid_axioms(
    constraints: &AttentionConstraints,
    num_users: usize,
    num_ads: usize,
) -> Result<bool, FeasibilityError> {
    verify_axioms_with(num_users, num_ads, |pairs| {
        is_independent(pairs, constraints)
    })
}

/// Exhaustive axiom check against an arbitrary independence oracle.
///
/// Checks downward closure (every one-element-removed subset of an
/// independent set is independent, which closes downward by induction) and
/// the exchange property over *all* pairs of independent sets of differing
/// cardinality. Public so that a deliberately corrupted oracle can be shown
/// to fail.
pub fn verify_axioms_with<F>(
    num_users: usize,
    num_ads: usize,
    oracle: F,
) -> Result<bool, FeasibilityError>
where
    F: Fn(&BTreeSet<AssignmentPair>) -> bool,
{
    let ground: Vec<AssignmentPair> = (0..num_users)
        .flat_map(|user| (0..num_ads).map(move |ad| AssignmentPair { user, ad }))
        .collect();
    let n = ground.len();
    if n > MAX_AXIOM_GROUND_SET {
        return Err(FeasibilityError::GroundSetTooLarge {
            size: n,
            max: MAX_AXIOM_GROUND_SET,
        });
    }

    let set_of = |mask: usize| -> BTreeSet<AssignmentPair> {
        ground
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, p)| *p)
            .collect()
    };
    let indep: Vec<bool> = (0..1usize << n).map(|mask| oracle(&set_of(mask))).collect();

    // (I1) downward closure.
    for mask in 0..1usize << n {
        if !indep[mask] {
            continue;
        }
        let mut rest = mask;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            if !indep[mask ^ bit] {
                return Ok(false);
            }
            rest ^= bit;
        }
    }

    // (I2) exchange: for all independent X, Y with |Y| > |X| some element
    // of Y \ X extends X.
    let mut by_size: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for mask in 0..1usize << n {
        if indep[mask] {
            by_size[mask.count_ones() as usize].push(mask);
        }
    }
    for small in 0..n {
        for large in (small + 1)..=n {
            for &x in &by_size[small] {
                for &y in &by_size[large] {
                    let mut extra = y & !x;
                    let mut extended = false;
                    while extra != 0 {
                        let bit = extra & extra.wrapping_neg();
                        if indep[x | bit] {
                            extended = true;
                            break;
                        }
                        extra ^= bit;
                    }
                    if !extended {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(user: usize, ad: usize) -> AssignmentPair {
        AssignmentPair { user, ad }
    }

    fn pairs(list: &[(usize, usize)]) -> BTreeSet<AssignmentPair> {
        list.iter().map(|&(u, a)| pair(u, a)).collect()
    }

    #[test]
    fn empty_set_is_independent() {
        let c = AttentionConstraints::uniform(3, 0, 0);
        assert!(is_independent(&BTreeSet::new(), &c));
    }

    #[test]
    fn per_user_limit_binds() {
        let c = AttentionConstraints::new(vec![1, 5], 10);
        assert!(!is_independent(&pairs(&[(0, 0), (0, 1)]), &c));
        assert!(is_independent(&pairs(&[(0, 0), (1, 1)]), &c));
    }

    #[test]
    fn overall_limit_binds() {
        let c = AttentionConstraints::uniform(3, 5, 2);
        assert!(!is_independent(&pairs(&[(0, 0), (1, 0), (2, 0)]), &c));
        assert!(is_independent(&pairs(&[(0, 0), (1, 0)]), &c));
    }

    #[test]
    fn can_add_checks_both_limits() {
        let c = AttentionConstraints::new(vec![1, 2], 2);
        let base = pairs(&[(0, 0)]);
        assert!(!can_add(&base, pair(0, 1), &c).unwrap()); // user 0 at kappa
        assert!(can_add(&base, pair(1, 0), &c).unwrap());
        let full = pairs(&[(0, 0), (1, 0)]);
        assert!(!can_add(&full, pair(1, 1), &c).unwrap()); // total at K
        assert!(matches!(
            can_add(&base, pair(0, 0), &c),
            Err(FeasibilityError::CandidateAlreadyPresent { .. })
        ));
        assert!(can_add(&BTreeSet::new(), pair(0, 0), &c).unwrap());
    }

    #[test]
    fn attention_system_satisfies_the_axioms() {
        let c = AttentionConstraints::uniform(4, 1, 4);
        assert!(verify_matroid_axioms(&c, 4, 3).unwrap());
        // Uniform matroid: only the overall limit binds.
        let c = AttentionConstraints::uniform(4, 100, 3);
        assert!(verify_matroid_axioms(&c, 4, 3).unwrap());
    }

    #[test]
    fn corrupted_oracle_fails_the_axioms() {
        // Checking the overall limit as equality breaks downward closure.
        let c = AttentionConstraints::uniform(3, 2, 2);
        let corrupted = |pairs: &BTreeSet<AssignmentPair>| {
            let mut count = [0usize; 3];
            for p in pairs {
                count[p.user] += 1;
                if count[p.user] > c.kappa(p.user) {
                    return false;
                }
            }
            pairs.len() == c.overall()
        };
        assert!(!verify_axioms_with(3, 2, corrupted).unwrap());
    }

    #[test]
    fn ground_set_cap_is_enforced() {
        let c = AttentionConstraints::uniform(5, 1, 5);
        assert!(matches!(
            verify_matroid_axioms(&c, 5, 3),
            Err(FeasibilityError::GroundSetTooLarge { .. })
        ));
    }

    #[test]
    fn maximal_independent_sets_share_cardinality() {
        // With every kappa <= num_ads the common size is min(K, sum kappa).
        for (kappa, overall, users, ads) in [
            (vec![1, 2, 1], 3, 3, 2),
            (vec![2, 2], 5, 2, 2),
            (vec![1, 1, 1], 2, 3, 3),
        ] {
            let c = AttentionConstraints::new(kappa.clone(), overall);
            let expected = overall.min(kappa.iter().sum());
            let ground: Vec<AssignmentPair> = (0..users)
                .flat_map(|user| (0..ads).map(move |ad| AssignmentPair { user, ad }))
                .collect();
            let n = ground.len();
            for mask in 0..1usize << n {
                let set: BTreeSet<AssignmentPair> = ground
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, p)| *p)
                    .collect();
                if !is_independent(&set, &c) {
                    continue;
                }
                let maximal = ground
                    .iter()
                    .filter(|p| !set.contains(p))
                    .all(|p| !can_add(&set, *p, &c).unwrap());
                if maximal {
                    assert_eq!(set.len(), expected, "maximal set {:?}", set);
                }
            }
        }
    }
}
