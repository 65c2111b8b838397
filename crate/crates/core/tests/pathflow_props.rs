use std::collections::{BTreeMap, BTreeSet};

use pathlens_core::ingest::{
    build_paths, generate_synthetic, label_cohorts, mixed_theme_structure, summarize_cohorts, CompletionThreshold,
    SynthConfig,
};
use pathlens_core::pathflow::{build_flow_network, extract_transitions, Granularity, NodeId, TransitionKind};
use pathlens_core::themes::{catchup_theme_matrix, dropouts_by_last_theme, ThemeOptions};
use pathlens_core::{ActivityEvent, CohortLabel, CourseStructure, LearnerPath, StepId, Timestamp};
use proptest::prelude::*;

const START: i64 = 1_500_000_000;

fn structure(weeks: u32, per_week: u32) -> CourseStructure {
    mixed_theme_structure("prop", weeks, per_week, Timestamp(START)).unwrap()
}

/// Raw events: (learner, step index, seconds after start), steps possibly
/// repeated and unordered in time.
fn raw_events() -> impl Strategy<Value = (u32, u32, Vec<(u8, usize, i64)>)> {
    (1u32..5, 2u32..7).prop_flat_map(|(weeks, per_week)| {
        let n = (weeks * per_week) as usize;
        let events = prop::collection::vec((0u8..50, 0..n, 0i64..7 * 24 * 3600), 0..300);
        (Just(weeks), Just(per_week), events)
    })
}

fn to_events(course: &CourseStructure, raw: &[(u8, usize, i64)]) -> Vec<ActivityEvent> {
    raw.iter()
        .map(|&(l, i, t)| {
            let step = course.steps()[i];
            ActivityEvent {
                learner_id: format!("u{l:02}"),
                step: step.id,
                theme: step.theme,
                first_visited_at: Timestamp(START + t),
            }
        })
        .collect()
}

fn synth_cohort(
    seed: u64,
    weeks: u32,
    per_week: u32,
    completers: usize,
    dropouts: usize,
) -> (
    CourseStructure,
    BTreeMap<String, LearnerPath>,
    BTreeMap<String, CohortLabel>,
) {
    let course = structure(weeks, per_week);
    let config = SynthConfig {
        n_completers: completers,
        n_dropouts: dropouts,
        seed,
        ..SynthConfig::default()
    };
    let events = generate_synthetic(&config, &course).unwrap();
    let paths = build_paths(&events, &course).paths;
    let labels = label_cohorts(&paths, std::iter::empty(), &course, config.completion_threshold);
    (course, paths, labels)
}

/// Week-level network computed directly from paths and the step network.
fn week_quotient(
    paths: &BTreeMap<String, LearnerPath>,
    fisheye: &pathlens_core::pathflow::FlowNetwork,
) -> (BTreeMap<u32, u64>, BTreeMap<(u32, u32), u64>) {
    let mut access = BTreeMap::new();
    for p in paths.values() {
        let weeks: BTreeSet<u32> = p.steps().map(|s| s.week()).collect();
        for w in weeks {
            *access.entry(w).or_insert(0) += 1;
        }
    }
    let mut edges = BTreeMap::new();
    for e in &fisheye.edges {
        let (NodeId::Step(a), NodeId::Step(b)) = (e.src, e.dst) else {
            panic!("step network has non-step node")
        };
        *edges.entry((a.week(), b.week())).or_insert(0) += e.learner_count;
    }
    (access, edges)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn paths_are_first_access_sequences((weeks, per_week, raw) in raw_events()) {
        let course = structure(weeks, per_week);
        let set = build_paths(&to_events(&course, &raw), &course);
        for p in set.paths.values() {
            let steps: BTreeSet<StepId> = p.steps().collect();
            prop_assert_eq!(steps.len(), p.len());
            prop_assert!(p.visits().windows(2).all(|w| w[0].at <= w[1].at));
            prop_assert!(!p.is_empty());
        }
        let learners: BTreeSet<String> = raw.iter().map(|r| format!("u{:02}", r.0)).collect();
        prop_assert_eq!(learners.len(), set.paths.len());
    }

    #[test]
    fn labels_partition_enrolment((weeks, per_week, raw) in raw_events(), extra in 0usize..10) {
        let course = structure(weeks, per_week);
        let paths = build_paths(&to_events(&course, &raw), &course).paths;
        let mut enrolled: Vec<String> = (0..extra).map(|i| format!("x{i}")).collect();
        enrolled.extend(paths.keys().take(3).cloned());
        let labels = label_cohorts(&paths, enrolled.iter().map(String::as_str), &course, CompletionThreshold::DEFAULT);
        let ids: BTreeSet<&String> = enrolled.iter().chain(paths.keys()).collect();
        prop_assert_eq!(labels.len(), ids.len());
        let s = summarize_cohorts(&labels);
        prop_assert_eq!(s.enrolled, ids.len());
        prop_assert_eq!(s.accessed_at_least_one, s.dropout + s.completers);
        prop_assert_eq!(s.accessed_at_least_one, paths.len());
    }

    #[test]
    fn raising_threshold_never_creates_completers(
        (weeks, per_week, raw) in raw_events(),
        a in 0.05f64..1.0,
        b in 0.05f64..1.0,
    ) {
        let course = structure(weeks, per_week);
        let paths = build_paths(&to_events(&course, &raw), &course).paths;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let low = label_cohorts(&paths, std::iter::empty(), &course, CompletionThreshold::new(lo).unwrap());
        let high = label_cohorts(&paths, std::iter::empty(), &course, CompletionThreshold::new(hi).unwrap());
        for (id, l) in &low {
            if *l == CohortLabel::Dropout {
                prop_assert_eq!(high[id], CohortLabel::Dropout);
            }
        }
    }

    #[test]
    fn transition_kinds_partition_hops((weeks, per_week, raw) in raw_events()) {
        let course = structure(weeks, per_week);
        let paths = build_paths(&to_events(&course, &raw), &course).paths;
        for p in paths.values() {
            let ts = extract_transitions(p, &course).unwrap();
            let count = |k| ts.iter().filter(|t| t.kind == k).count();
            prop_assert_eq!(
                count(TransitionKind::Linear) + count(TransitionKind::JumpForward) + count(TransitionKind::JumpBackward),
                p.len() - 1
            );
        }
    }

    #[test]
    fn fisheye_conservation_and_bounds((weeks, per_week, raw) in raw_events()) {
        prop_assume!(!raw.is_empty());
        let course = structure(weeks, per_week);
        let paths = build_paths(&to_events(&course, &raw), &course).paths;
        let net = build_flow_network(paths.values(), &course, Granularity::FishEye).unwrap();
        let mut terminating: BTreeMap<NodeId, u64> = BTreeMap::new();
        for p in paths.values() {
            *terminating.entry(NodeId::Step(p.last().unwrap().step)).or_insert(0) += 1;
        }
        for node in &net.nodes {
            let out: u64 = net.outgoing(node.id).map(|e| e.learner_count).sum();
            prop_assert_eq!(out + terminating.get(&node.id).copied().unwrap_or(0), node.access_count);
            let pct: f64 = net.outgoing(node.id).map(|e| e.percentage).sum();
            prop_assert!(pct <= 100.0 + 1e-9);
        }
        for e in &net.edges {
            prop_assert!(e.percentage > 0.0 && e.percentage <= 100.0);
        }
    }

    #[test]
    fn birdeye_is_week_quotient((weeks, per_week, raw) in raw_events()) {
        prop_assume!(!raw.is_empty());
        let course = structure(weeks, per_week);
        let paths = build_paths(&to_events(&course, &raw), &course).paths;
        let fish = build_flow_network(paths.values(), &course, Granularity::FishEye).unwrap();
        let bird = build_flow_network(paths.values(), &course, Granularity::BirdEye).unwrap();
        let (access, edges) = week_quotient(&paths, &fish);
        let got_access: BTreeMap<u32, u64> = bird
            .nodes
            .iter()
            .map(|n| match n.id { NodeId::Week(w) => (w, n.access_count), other => panic!("{other}") })
            .collect();
        let got_edges: BTreeMap<(u32, u32), u64> = bird
            .edges
            .iter()
            .map(|e| match (e.src, e.dst) {
                (NodeId::Week(a), NodeId::Week(b)) => ((a, b), e.learner_count),
                _ => panic!("non-week edge"),
            })
            .collect();
        prop_assert_eq!(got_access, access);
        prop_assert_eq!(got_edges, edges);
    }

    #[test]
    fn synthetic_cohorts_conserve_flow(seed in any::<u64>(), dropouts in 1usize..40) {
        let (course, paths, labels) = synth_cohort(seed, 3, 5, 50 - dropouts, dropouts);
        let s = summarize_cohorts(&labels);
        prop_assert_eq!(s.completers + s.dropout, 50);
        let net = build_flow_network(paths.values(), &course, Granularity::FishEye).unwrap();
        for node in &net.nodes {
            let out: u64 = net.outgoing(node.id).map(|e| e.learner_count).sum();
            let ends = paths.values().filter(|p| NodeId::Step(p.last().unwrap().step) == node.id).count() as u64;
            prop_assert_eq!(out + ends, node.access_count);
        }
    }

    #[test]
    fn theme_counts_cross_check(seed in any::<u64>(), merge in any::<bool>()) {
        let (course, paths, labels) = synth_cohort(seed, 3, 8, 15, 30);
        let options = ThemeOptions { merge_assessment: merge };
        let dropouts: Vec<&LearnerPath> = paths
            .iter()
            .filter(|(id, _)| labels[*id] == CohortLabel::Dropout)
            .map(|(_, p)| p)
            .collect();
        let report = dropouts_by_last_theme(dropouts.iter().copied(), &course, options).unwrap();
        prop_assert_eq!(report.total(), dropouts.len() as u64);

        let matrix = catchup_theme_matrix(dropouts.iter().copied(), &course, options).unwrap();
        let catch_ups: u64 = dropouts
            .iter()
            .flat_map(|p| extract_transitions(p, &course).unwrap())
            .filter(|t| t.kind.is_catch_up())
            .count() as u64;
        prop_assert_eq!(matrix.total(), catch_ups);

        let doubled: Vec<&LearnerPath> = dropouts.iter().chain(&dropouts).copied().collect();
        let twice = catchup_theme_matrix(doubled, &course, options).unwrap();
        prop_assert_eq!(twice.total(), 2 * matrix.total());
        let (a, b) = (matrix.percentages(), twice.percentages());
        for (ra, rb) in a.iter().zip(&b) {
            for (x, y) in ra.iter().zip(rb) {
                prop_assert!((x - y).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn networks_are_deterministic(seed in any::<u64>()) {
        let (course, paths, _) = synth_cohort(seed, 2, 6, 10, 20);
        let (_, again, _) = synth_cohort(seed, 2, 6, 10, 20);
        prop_assert_eq!(
            build_flow_network(paths.values(), &course, Granularity::BirdEye).unwrap(),
            build_flow_network(again.values(), &course, Granularity::BirdEye).unwrap()
        );
    }
}
