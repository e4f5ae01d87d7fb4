//! Turning the last table into an edit set.

use std::collections::BTreeSet;

use crate::graph::{EdgePair, Vertex};
use crate::instance::{EditSet, EditingInstance};

use super::separation::SeparationProfile;
use super::table::{realize, DeficiencyTable};
use super::SolveError;

/// Reads a colorful solution off the final table.
///
/// A zero record is used as is. Otherwise, when edge deletion is allowed,
/// the first sequence (in table order) with an even sum `r` and
/// `3r/2 + |U| + |A| <= k` is closed off by deleting a matching of `r/2`
/// edges away from the deficient vertices and wiring its endpoints to them.
/// `Ok(None)` means this coloring yields nothing.
pub fn extract_colorful(
    table: &DeficiencyTable,
    inst: &EditingInstance,
    profile: &SeparationProfile,
) -> Result<Option<EditSet>, SolveError> {
    let records = match table {
        DeficiencyTable::Empty => return Ok(None),
        DeficiencyTable::Zero(entry) => {
            if !entry.deleted.is_superset(&profile.classes[0]) {
                return Err(SolveError::InternalInconsistency(
                    "zero record does not delete the zero class".into(),
                ));
            }
            return Ok(Some(EditSet::new(entry.deleted.iter().copied(), [], entry.added.iter().copied())));
        }
        DeficiencyTable::Records(records) => records,
    };
    if !inst.ops().edge_deletion() {
        return Ok(None);
    }
    let k = inst.k() as usize;
    let Some((seq, entry)) = records.iter().find(|(seq, entry)| {
        let r = seq.sum() as usize;
        r.is_multiple_of(2) && 3 * r / 2 + entry.cost() <= k
    }) else {
        return Ok(None);
    };
    if !entry.deleted.is_superset(&profile.classes[0]) {
        return Err(SolveError::InternalInconsistency(
            "record does not delete the zero class".into(),
        ));
    }

    let holders = realize(inst, seq, entry)?;
    let remaining = inst.graph().without_vertices(&entry.deleted);
    let holder_set: BTreeSet<Vertex> = holders.iter().copied().collect();
    let mut avoid = holder_set.clone();
    avoid.extend(inst.graph().open_neighborhood(&entry.deleted));
    for e in &entry.added {
        if holder_set.contains(&e.u()) || holder_set.contains(&e.v()) {
            avoid.extend(e.endpoints());
        }
    }
    let h = seq.sum() as usize / 2;
    let Some(matching) = remaining.greedy_matching_avoiding(&avoid, &holder_set, h) else {
        return Ok(None);
    };

    let mut endpoints = matching.iter().flat_map(|e| e.endpoints());
    let mut added = entry.added.clone();
    for (&need, &u) in seq.values().iter().zip(&holders) {
        for _ in 0..need {
            let w = endpoints.next().expect("matching covers the total deficiency");
            added.insert(EdgePair::new(u, w).expect("endpoints avoid holders"));
        }
    }
    Ok(Some(EditSet::new(entry.deleted.iter().copied(), matching, added)))
}
