mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::random_dataset;
use gikt::data::{
    batch_iterator, build_sequences, load_dataset, parse_reader, save_dataset, split_train_test, write_log, FormatSpec,
    InteractionRecord, MIN_SEQUENCE_LEN_EXCLUSIVE,
};
use gikt::GiktError;
use proptest::prelude::*;

type Key = (String, String, i64);

fn project(records: &[InteractionRecord]) -> BTreeMap<Key, (BTreeSet<String>, u8)> {
    records
        .iter()
        .map(|r| ((r.student.clone(), r.question.clone(), r.order), (r.skills.clone(), r.correct)))
        .collect()
}

fn records_strategy() -> impl Strategy<Value = Vec<InteractionRecord>> {
    let one = (0u32..6, 0u32..12, proptest::collection::btree_set(0u32..8, 1..4), 0u8..2, -50i64..50);
    proptest::collection::vec(one, 0..60).prop_map(|rows| {
        let mut seen = BTreeSet::new();
        rows.into_iter()
            .filter(|(s, q, _, _, o)| seen.insert((*s, *q, *o)))
            .enumerate()
            .map(|(i, (s, q, skills, correct, order))| InteractionRecord {
                student: format!("u{s}"),
                question: q.to_string(),
                skills: skills.iter().map(|k| format!("sk{k}")).collect(),
                correct,
                order,
                line: i + 2,
            })
            .collect()
    })
}

fn round_trip(records: &[InteractionRecord], spec: &FormatSpec) -> Vec<InteractionRecord> {
    let mut buf = Vec::new();
    write_log(records, spec, &mut buf).unwrap();
    parse_reader(&buf[..], spec).unwrap().0
}

proptest! {
    #[test]
    fn write_then_parse_preserves_records(records in records_strategy()) {
        let spec = FormatSpec { skill_delimiter: Some(';'), ..FormatSpec::default() };
        prop_assert_eq!(project(&round_trip(&records, &spec)), project(&records));
    }

    #[test]
    fn one_row_per_skill_merges_back(records in records_strategy()) {
        let spec = FormatSpec { delimiter: b'\t', ..FormatSpec::default() };
        prop_assert_eq!(project(&round_trip(&records, &spec)), project(&records));
    }

    #[test]
    fn sequences_are_dense_ordered_and_long_enough(records in records_strategy()) {
        let d = build_sequences("p", &records);
        d.validate().unwrap();
        prop_assert!(d.sequences.iter().all(|s| s.len() > MIN_SEQUENCE_LEN_EXCLUSIVE));
        let used: BTreeSet<usize> = d.sequences.iter().flat_map(|s| s.steps.iter().map(|x| x.question)).collect();
        prop_assert_eq!(used.len(), d.question_count);
        let skills: BTreeSet<usize> = d.question_skills.iter().flatten().copied().collect();
        prop_assert_eq!(skills.len(), d.skill_count);
        // Steps follow the order column.
        let lookup = project(&records);
        for seq in &d.sequences {
            let student = &d.student_ids[seq.student];
            let orders: Vec<i64> = records.iter().filter(|r| &r.student == student).map(|r| r.order).collect();
            let mut sorted = orders.clone();
            sorted.sort_unstable();
            for (step, order) in seq.steps.iter().zip(&sorted) {
                let key = (student.clone(), d.question_ids[step.question].clone(), *order);
                prop_assert_eq!(lookup[&key].1, step.correct);
            }
        }
    }

    #[test]
    fn split_partitions_sequences(seed in any::<u64>(), ratio in 0.1f64..0.9) {
        let d = random_dataset(seed, 12, 6, 3, 4..=8);
        let (train, test) = split_train_test(&d, ratio, seed).unwrap();
        prop_assert_eq!(train.sequences.len() + test.sequences.len(), 12);
        prop_assert!(!train.sequences.is_empty() && !test.sequences.is_empty());
        let a: BTreeSet<usize> = train.sequences.iter().map(|s| s.student).collect();
        let b: BTreeSet<usize> = test.sequences.iter().map(|s| s.student).collect();
        prop_assert!(a.is_disjoint(&b));
        let again = split_train_test(&d, ratio, seed).unwrap();
        prop_assert_eq!(again.0.sequences, train.sequences);
    }

    #[test]
    fn batches_cover_every_step_once(seed in any::<u64>(), batch in 1usize..6, max_len in 1usize..7) {
        let d = random_dataset(seed, 7, 6, 3, 2..=15);
        let total: usize = batch_iterator(&d, batch, max_len, Some(seed))
            .map(|b| {
                assert!(b.size() <= batch && b.max_len() <= max_len);
                for (row, &len) in b.lens.iter().enumerate() {
                    assert_eq!(b.mask[row].iter().filter(|&&m| m).count(), len);
                }
                b.lens.iter().sum::<usize>()
            })
            .sum();
        prop_assert_eq!(total, d.exercise_count());
        let a: Vec<_> = batch_iterator(&d, batch, max_len, Some(seed)).collect();
        let b: Vec<_> = batch_iterator(&d, batch, max_len, Some(seed)).collect();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn duplicates_and_conflicts_are_reported() {
    let text = "student,question,skill,correct,order\n\
                1,10,a,1,1\n1,10,a,1,1\n1,10,b,0,1\n1,11,a,x,2\n1,12,,1,3\n2,10,a,1,1\n";
    let (records, report) = parse_reader(text.as_bytes(), &FormatSpec::default()).unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(report.duplicate_rows, 1);
    assert_eq!(report.skill_rows_merged, 1);
    assert_eq!(report.conflicting_correct, 1);
    assert_eq!(report.skipped_bad_correct, 1);
    assert_eq!(report.skipped_missing_skill, 1);
    assert_eq!(records[0].correct, 1);
    assert_eq!(records[0].skills.len(), 2);
}

#[test]
fn empty_input_and_missing_columns_are_format_errors() {
    assert!(matches!(parse_reader(&b""[..], &FormatSpec::default()), Err(GiktError::Format(_))));
    assert!(matches!(parse_reader(&b"student,question\n1,2\n"[..], &FormatSpec::default()), Err(GiktError::Format(_))));
}

#[test]
fn scaffold_rows_are_filtered() {
    let text = "student,question,skill,correct,order,orig\n1,1,a,1,1,1\n1,2,a,1,2,0\n";
    let spec = FormatSpec { scaffold_column: Some("orig".into()), ..FormatSpec::default() };
    let (records, report) = parse_reader(text.as_bytes(), &spec).unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(report.skipped_scaffold, 1);
}

#[test]
fn stored_dataset_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.json");
    let d = random_dataset(4, 5, 6, 3, 4..=9);
    save_dataset(&d, &path).unwrap();
    assert_eq!(load_dataset(&path).unwrap(), d);
    std::fs::write(&path, "{\"format\": 1}").unwrap();
    assert!(load_dataset(&path).is_err());
}

#[test]
fn stats_by_hand() {
    let d = random_dataset(2, 3, 4, 2, 4..=4);
    let s = d.stats();
    assert_eq!((s.students, s.questions, s.skills, s.exercises), (3, 4, 2, 12));
    let edges: usize = d.question_skills.iter().map(Vec::len).sum();
    assert_eq!(s.skills_per_question, edges as f64 / 4.0);
    assert_eq!(s.attempts_per_question, 3.0);
}
