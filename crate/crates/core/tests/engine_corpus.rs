mod common;

use purify_core::corpus::{case, CASES};
use purify_core::engine::{replay, run, run_batch, Exec, ReductionTrace, Verdict, DEFAULT_MAX_STEPS};
use purify_core::frontend::parse_entailment;
use purify_core::logic::entailment_equiv;

fn traces(name: &str) -> Vec<ReductionTrace> {
    let loaded = case(name).unwrap().load().unwrap();
    run_batch(
        &loaded.program,
        &loaded.entailments,
        DEFAULT_MAX_STEPS,
        Exec::Sequential,
    )
}

#[test]
fn strategy_sequences() {
    let names = |name: &str| -> Vec<Vec<String>> {
        traces(name)
            .iter()
            .map(|t| t.strategy_names().into_iter().map(String::from).collect())
            .collect()
    };
    assert_eq!(names("sll_concat"), [["S1", "S0", "S2"]]);
    assert_eq!(names("array_frame"), [["S3", "S3", "S5", "S5", "S6", "S6"]]);
    assert_eq!(
        names("array_loop"),
        vec![
            vec!["S8", "S6", "S8", "S5", "S6"],
            vec!["S4", "S4", "S5", "S6", "S7", "S5", "S6", "S7", "S5", "S6"],
            vec!["S8", "S6", "S8", "S5", "S6"],
        ]
    );
}

#[test]
fn reading_a_cell_then_writing_it_back() {
    let loaded = case("array_access").unwrap().load().unwrap();
    let ts = run_batch(
        &loaded.program,
        &loaded.entailments,
        DEFAULT_MAX_STEPS,
        Exec::Sequential,
    );
    let frame = parse_entailment(
        "forall i n p l, 0 <= i && i < n && store_array_hole(p, 0, n, i, l) |-- emp",
        &loaded.sig,
    )
    .unwrap();
    assert!(
        entailment_equiv(ts[0].final_entailment(), &frame),
        "{}",
        ts[0].final_entailment()
    );
    assert_eq!(ts[1].verdict, Verdict::Purified);
}

#[test]
fn cells_swap() {
    let t = &traces("cells")[0];
    assert_eq!(t.verdict, Verdict::Purified);
    // both orderings of the disequality are introduced before cancelling
    assert_eq!(&t.strategy_names()[..2], ["intro_neq", "intro_neq"]);
}

#[test]
fn every_corpus_run_replays() {
    for c in CASES {
        let loaded = c.load().unwrap();
        for e in &loaded.entailments {
            let t = run(&loaded.program, e, DEFAULT_MAX_STEPS);
            replay(&loaded.program, &t).unwrap_or_else(|err| panic!("{}: {err}", c.name));
            let back = ReductionTrace::from_json(&t.to_json(), &loaded.sig).unwrap();
            assert_eq!(back, [t]);
        }
    }
}

#[test]
fn side_conditions_are_recorded() {
    let t = &traces("array_frame")[0];
    let s3 = &t.steps[0];
    assert_eq!(s3.side_conditions.len(), 2);
    assert!(s3
        .side_conditions
        .iter()
        .all(|c| c.status == purify_core::smt::Status::Proven));
    assert_eq!(s3.side_conditions[0].goal.to_string(), "0 <= i");
}

#[test]
fn sequential_and_parallel_batches_agree() {
    let sig = common::full_sig();
    let prog = common::full_program(&sig);
    let mut ents = Vec::new();
    for c in CASES {
        ents.extend(c.load().unwrap().entailments);
    }
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
    ents.extend((0..100).map(|_| common::random_entailment(&mut rng)));
    let seq = run_batch(&prog, &ents, 200, Exec::Sequential);
    let par = run_batch(&prog, &ents, 200, Exec::Parallel);
    assert_eq!(seq, par);
}

#[test]
fn step_limit_is_reported() {
    let loaded = case("array_loop").unwrap().load().unwrap();
    let t = run(&loaded.program, &loaded.entailments[1], 3);
    assert_eq!(t.steps.len(), 3);
    assert_eq!(t.verdict, Verdict::StepLimit);
    replay(&loaded.program, &t).unwrap();
}
