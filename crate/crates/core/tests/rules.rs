use std::collections::BTreeSet;

use degedit::fpt::{
    apply_isolates_rule, apply_vertex_deletion_rule, branch_children, compute_separation,
    reduce_instance, solve_colorful, table_size_bound, Coloring, ReductionOutcome,
};
use degedit::hardgen::random_instance;
use degedit::oracle::{all_solutions, is_minimal, solve_exact, DEFAULT_WORK_LIMIT};
use degedit::{verify, EditingInstance, OperationSet, Vertex};
use proptest::prelude::*;

fn any_ops() -> impl Strategy<Value = OperationSet> {
    prop::sample::select(vec!["V", "D", "A", "VD", "VA", "DA", "VDA"])
        .prop_map(|s| OperationSet::from_letters(s).unwrap())
}

fn small_instance() -> impl Strategy<Value = EditingInstance> {
    (1u32..=8, 1u32..=4, 0u32..=3, 0.1f64..0.7, any_ops(), any::<u64>()).prop_map(
        |(n, d, k, p, ops, seed)| random_instance(n, d, k, p, ops, seed).unwrap(),
    )
}

fn yes(inst: &EditingInstance) -> bool {
    solve_exact(inst).unwrap().is_some()
}

/// An instance without overfull vertices and a coloring of it.
fn colored_instance() -> impl Strategy<Value = (EditingInstance, Coloring)> {
    let va = prop::sample::select(vec!["VA", "VDA"]).prop_map(|s| OperationSet::from_letters(s).unwrap());
    (small_instance(), va, any::<u64>()).prop_filter_map("has overfull vertices", |(inst, ops, mask)| {
        let inst = inst.with_ops(ops);
        let g = inst.graph();
        let full: BTreeSet<Vertex> =
            g.vertices().filter(|&v| g.degree(v) > inst.target(v) as usize).collect();
        let inst = inst.derive(g.without_vertices(&full), inst.k());
        let g = inst.graph();
        if g.vertices().any(|v| g.degree(v) > inst.target(v) as usize) {
            return None;
        }
        let vertices: Vec<Vertex> = g.vertices().collect();
        let coloring = Coloring::from_bits(&vertices, mask);
        Some((inst, coloring))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn vertex_deletion_rule_is_safe(inst in small_instance()) {
        match apply_vertex_deletion_rule(&inst) {
            None => prop_assert!(!yes(&inst)),
            Some((reduced, deleted)) => {
                prop_assert_eq!(reduced.k() as usize + deleted.len(), inst.k() as usize);
                prop_assert_eq!(yes(&reduced), yes(&inst));
            }
        }
    }

    #[test]
    fn very_heavy_vertices_are_in_every_solution(inst in small_instance()) {
        let g = inst.graph();
        let heavy: BTreeSet<Vertex> =
            g.vertices().filter(|&v| g.degree(v) > (inst.target(v) + inst.k()) as usize).collect();
        for sol in all_solutions(&inst, DEFAULT_WORK_LIMIT).unwrap() {
            prop_assert!(heavy.is_subset(&sol.deleted_vertices));
        }
    }

    #[test]
    fn isolates_rule_is_safe(inst in small_instance()) {
        prop_assert_eq!(yes(&apply_isolates_rule(&inst)), yes(&inst));
    }

    #[test]
    fn too_many_underfull_vertices_means_no(inst in small_instance()) {
        let (under, _) = inst.deviation_sets();
        if under.len() > 2 * inst.k() as usize {
            prop_assert!(!yes(&inst));
        }
    }

    #[test]
    fn reduction_outcomes_are_sound(inst in small_instance()) {
        let expected = yes(&inst);
        match reduce_instance(&inst) {
            ReductionOutcome::Yes(lift) => {
                prop_assert!(expected);
                prop_assert!(verify(&inst, &lift).is_valid());
            }
            ReductionOutcome::No => prop_assert!(!expected),
            ReductionOutcome::NeedsBranching { inst: reduced, lift, vertex } => {
                prop_assert_eq!(reduced.k() as usize + lift.cost(), inst.k() as usize);
                let children = branch_children(&reduced, vertex).unwrap();
                prop_assert_eq!(children.iter().any(|(c, _)| yes(c)), expected);
            }
            ReductionOutcome::RouteToOracle { inst: reduced, lift }
            | ReductionOutcome::ReadyForSeparation { inst: reduced, lift } => {
                prop_assert_eq!(reduced.k() as usize + lift.cost(), inst.k() as usize);
                prop_assert_eq!(yes(&reduced), expected);
            }
        }
    }

    #[test]
    fn separation_profile_invariants((inst, coloring) in colored_instance()) {
        let g = inst.graph();
        let p = compute_separation(&inst, &coloring).unwrap();
        let red = coloring.red();
        let union: BTreeSet<Vertex> = p.classes.iter().flatten().copied().collect();
        prop_assert_eq!(&union, &red);
        prop_assert_eq!(p.classes.iter().map(BTreeSet::len).sum::<usize>(), red.len());
        prop_assert!(p.classes[1..].iter().all(|c| !c.is_empty()));

        let (under, _) = inst.deviation_sets();
        for (i, class) in p.classes.iter().enumerate() {
            let near = g.distances_from(class.iter(), 3);
            for (j, other) in p.classes.iter().enumerate() {
                if i != j {
                    prop_assert!(other.iter().all(|v| !near.contains_key(v)));
                }
            }
            prop_assert!(p.boundaries[i].iter().all(|v| !coloring.is_red(*v)));
            if i > 0 {
                let close = g.distances_from(class.iter(), 2);
                prop_assert!(under.iter().all(|z| !close.contains_key(z)));
            }
        }
        prop_assert!(under.iter().filter(|z| !coloring.is_red(**z)).all(|z| p.boundaries[0].contains(z)));
        for (&v, &def) in &p.def {
            let blue = g.neighbors(v).filter(|w| !coloring.is_red(*w)).count() as u32;
            prop_assert_eq!(def + blue, inst.target(v));
        }
    }

    #[test]
    fn tables_stay_within_bound((inst, coloring) in colored_instance()) {
        let run = solve_colorful(&inst, &coloring).unwrap();
        let bound = table_size_bound(inst.k());
        prop_assert!(run.table_lens.iter().all(|&len| len as u64 <= bound), "{:?} > {}", run.table_lens, bound);
        if let Some(sol) = run.solution {
            prop_assert!(verify(&inst, &sol).is_valid());
            let p = compute_separation(&inst, &coloring).unwrap();
            prop_assert!(sol.deleted_vertices.is_subset(&coloring.red()));
            prop_assert!(sol.deleted_vertices.is_superset(&p.classes[0]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    /// Coloring exactly the deleted vertices of a known minimal solution red
    /// must let the per-coloring pipeline find some solution.
    #[test]
    fn correct_colorings_are_found((inst, _) in colored_instance()) {
        let g = inst.graph();
        for sol in all_solutions(&inst, DEFAULT_WORK_LIMIT).unwrap() {
            if !is_minimal(&inst, &sol).unwrap() {
                continue;
            }
            let around = g.open_neighborhood(&sol.deleted_vertices);
            if sol.deleted_edges.iter().any(|e| around.contains(&e.u()) || around.contains(&e.v())) {
                continue;
            }
            let coloring = Coloring::from_red_set(g.vertices(), &sol.deleted_vertices);
            let run = solve_colorful(&inst, &coloring).unwrap();
            let found = run.solution.expect("colorful solution exists");
            prop_assert!(verify(&inst, &found).is_valid());
        }
    }
}

#[test]
fn every_operation_set_with_vertex_deletion_and_addition_is_accepted() {
    let inst = random_instance(5, 2, 2, 0.4, OperationSet::ALL, 1).unwrap();
    for letters in ["VA", "VDA"] {
        let ops = OperationSet::from_letters(letters).unwrap();
        let res = degedit::fpt::solve(&inst.with_ops(ops), &degedit::fpt::DriverConfig::exhaustive());
        assert!(res.is_ok());
    }
}
