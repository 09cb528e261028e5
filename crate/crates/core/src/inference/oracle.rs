use super::{candidate_set, support_operator, BearingSet, ClassifyParams, InferenceError};
use crate::kb::KnowledgeBase;

/// Largest candidate set the exhaustive oracle will enumerate.
pub const ORACLE_LIMIT: usize = 20;

/// Greatest fixpoint by exhaustive enumeration: the union of every subset
/// `S` of the candidates with `S ⊆ F(S)`. By Knaster-Tarski this is the
/// greatest fixpoint of the monotone operator `F`. Exponential; for testing.
pub fn brute_force_biological(
    kb: &KnowledgeBase,
    params: &ClassifyParams,
) -> Result<BearingSet, InferenceError> {
    let candidates: Vec<_> = candidate_set(kb, params).into_iter().collect();
    if candidates.len() > ORACLE_LIMIT {
        return Err(InferenceError::TooLargeForOracle(candidates.len()));
    }
    let mut union = BearingSet::new();
    for mask in 0u32..(1 << candidates.len()) {
        let subset: BearingSet = candidates
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &b)| b)
            .collect();
        if subset.is_subset(&support_operator(kb, &subset, params)) {
            union.extend(subset);
        }
    }
    Ok(union)
}
