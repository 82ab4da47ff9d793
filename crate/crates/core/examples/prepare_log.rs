//! Parse a raw interaction log into student sequences and print dataset statistics.
//!
//! `cargo run --example prepare_log [raw.csv]`
//! Without an argument a small inline log is used.

use gikt::data::{build_sequences, parse_log, parse_reader, split_train_test, FormatSpec};

const INLINE: &str = "\
student,question,skill,correct,order
7,101,fractions,1,1
7,102,fractions,0,2
7,102,decimals,0,2
7,103,decimals,1,3
7,101,fractions,1,4
7,101,fractions,1,4
8,103,decimals,0,1
8,104,geometry,1,2
8,101,fractions,maybe,3
8,102,fractions,1,4
8,104,geometry,1,5
9,101,fractions,1,1
";

fn main() -> gikt::Result<()> {
    let spec = FormatSpec::default();
    let (records, report) = match std::env::args().nth(1) {
        Some(path) => parse_log(path.as_ref(), &spec)?,
        None => parse_reader(INLINE.as_bytes(), &spec)?,
    };
    println!(
        "{} rows -> {} records ({} duplicates, {} multi-skill merges, {} bad correctness)",
        report.rows_read, report.records, report.duplicate_rows, report.skill_rows_merged, report.skipped_bad_correct
    );
    for w in &report.warnings {
        println!("warning: {w}");
    }
    let dataset = build_sequences("inline", &records);
    println!("{}", dataset.stats());
    for seq in &dataset.sequences {
        let steps: Vec<String> = seq
            .steps
            .iter()
            .map(|s| format!("{}:{}", dataset.question_ids[s.question], s.correct))
            .collect();
        println!("student {}: {}", dataset.student_ids[seq.student], steps.join(" "));
    }
    if dataset.sequences.len() >= 2 {
        let (train, test) = split_train_test(&dataset, 0.5, 0)?;
        println!("split: {} train, {} test sequences", train.sequences.len(), test.sequences.len());
    }
    Ok(())
}
