use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GiktError, Result};

const MAX_WARNINGS: usize = 20;

/// Column mapping for a raw interaction log, read from a flat key=value file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormatSpec {
    pub delimiter: u8,
    pub student: String,
    pub question: String,
    pub skill: String,
    pub correct: String,
    pub order: String,
    /// Splits several skills packed in one cell, e.g. `s2;s7`.
    pub skill_delimiter: Option<char>,
    /// Rows whose value in this column differs from `scaffold_keep` are dropped.
    pub scaffold_column: Option<String>,
    pub scaffold_keep: String,
}

impl Default for FormatSpec {
    fn default() -> Self {
        FormatSpec {
            delimiter: b',',
            student: "student".into(),
            question: "question".into(),
            skill: "skill".into(),
            correct: "correct".into(),
            order: "order".into(),
            skill_delimiter: None,
            scaffold_column: None,
            scaffold_keep: "1".into(),
        }
    }
}

fn parse_delimiter(v: &str) -> Result<u8> {
    match v {
        "tab" | "\\t" => Ok(b'\t'),
        "comma" => Ok(b','),
        "semicolon" => Ok(b';'),
        s if s.len() == 1 => Ok(s.as_bytes()[0]),
        s => Err(GiktError::Format(format!("delimiter must be one byte, got {s:?}"))),
    }
}

impl FormatSpec {
    pub fn from_str_config(text: &str) -> Result<Self> {
        let mut spec = FormatSpec::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                GiktError::Format(format!("format spec line {}: expected key=value", lineno + 1))
            })?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "delimiter" => spec.delimiter = parse_delimiter(v)?,
                "student" => spec.student = v.into(),
                "question" => spec.question = v.into(),
                "skill" => spec.skill = v.into(),
                "correct" => spec.correct = v.into(),
                "order" => spec.order = v.into(),
                "skill_delimiter" => {
                    let mut chars = v.chars();
                    match (chars.next(), chars.next()) {
                        (Some(c), None) => spec.skill_delimiter = Some(c),
                        _ => {
                            return Err(GiktError::Format(format!(
                                "skill_delimiter must be one character, got {v:?}"
                            )))
                        }
                    }
                }
                "scaffold_column" => spec.scaffold_column = Some(v.into()),
                "scaffold_keep" => spec.scaffold_keep = v.into(),
                other => {
                    return Err(GiktError::Format(format!("unknown format spec key {other:?}")))
                }
            }
        }
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| GiktError::io(path, e))?;
        FormatSpec::from_str_config(&text)
    }
}

/// One merged interaction: a student's answer to a question at a position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub student: String,
    pub question: String,
    pub skills: BTreeSet<String>,
    pub correct: u8,
    pub order: i64,
    /// 1-based data line of the first row contributing to this record.
    pub line: usize,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ParseReport {
    pub rows_read: usize,
    pub records: usize,
    pub duplicate_rows: usize,
    pub skill_rows_merged: usize,
    pub skipped_unparseable: usize,
    pub skipped_missing_skill: usize,
    pub skipped_bad_correct: usize,
    pub skipped_scaffold: usize,
    pub conflicting_correct: usize,
    pub warnings: Vec<String>,
}

impl ParseReport {
    fn warn(&mut self, msg: String) {
        if self.warnings.len() < MAX_WARNINGS {
            self.warnings.push(msg);
        }
    }
}

pub fn parse_log(path: &Path, spec: &FormatSpec) -> Result<(Vec<InteractionRecord>, ParseReport)> {
    let file = fs::File::open(path).map_err(|e| GiktError::io(path, e))?;
    parse_reader(file, spec)
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| GiktError::Format(format!("missing column {name:?}")))
}

fn parse_correct(raw: &str) -> Option<u8> {
    match raw.trim() {
        "0" => Some(0),
        "1" => Some(1),
        s => match s.parse::<f64>() {
            Ok(0.0) => Some(0),
            Ok(1.0) => Some(1),
            _ => None,
        },
    }
}

pub fn parse_reader(
    reader: impl Read,
    spec: &FormatSpec,
) -> Result<(Vec<InteractionRecord>, ParseReport)> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| GiktError::Format(format!("cannot read header row: {e}")))?
        .clone();
    if headers.is_empty() {
        return Err(GiktError::Format("empty input: no header row".into()));
    }
    let c_student = column(&headers, &spec.student)?;
    let c_question = column(&headers, &spec.question)?;
    let c_skill = column(&headers, &spec.skill)?;
    let c_correct = column(&headers, &spec.correct)?;
    let c_order = column(&headers, &spec.order)?;
    let c_scaffold = spec
        .scaffold_column
        .as_deref()
        .map(|name| column(&headers, name))
        .transpose()?;

    let mut report = ParseReport::default();
    let mut records: Vec<InteractionRecord> = Vec::new();
    let mut index: HashMap<(String, String, i64), usize> = HashMap::new();

    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        report.rows_read += 1;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                report.skipped_unparseable += 1;
                report.warn(format!("line {line}: {e}"));
                continue;
            }
        };
        let field = |c: usize| row.get(c).map(str::trim);
        let (Some(student), Some(question), Some(skill), Some(correct), Some(order)) = (
            field(c_student),
            field(c_question),
            field(c_skill),
            field(c_correct),
            field(c_order),
        ) else {
            report.skipped_unparseable += 1;
            report.warn(format!("line {line}: too few fields"));
            continue;
        };
        if let Some(c) = c_scaffold {
            if field(c) != Some(spec.scaffold_keep.as_str()) {
                report.skipped_scaffold += 1;
                continue;
            }
        }
        if student.is_empty() || question.is_empty() {
            report.skipped_unparseable += 1;
            report.warn(format!("line {line}: empty student or question id"));
            continue;
        }
        let Ok(order) = order.parse::<i64>() else {
            report.skipped_unparseable += 1;
            report.warn(format!("line {line}: unparseable order value {order:?}"));
            continue;
        };
        let Some(correct) = parse_correct(correct) else {
            report.skipped_bad_correct += 1;
            report.warn(format!("line {line}: correctness {correct:?} is not 0 or 1"));
            continue;
        };
        let skills: BTreeSet<String> = match spec.skill_delimiter {
            Some(d) => skill
                .split(d)
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from)
                .collect(),
            None if skill.is_empty() => BTreeSet::new(),
            None => BTreeSet::from([skill.to_string()]),
        };
        if skills.is_empty() {
            report.skipped_missing_skill += 1;
            continue;
        }

        let key = (student.to_string(), question.to_string(), order);
        match index.get(&key) {
            Some(&at) => {
                let rec = &mut records[at];
                if rec.correct != correct {
                    report.conflicting_correct += 1;
                    report.warn(format!(
                        "line {line}: correctness conflicts with line {}, keeping the first",
                        rec.line
                    ));
                }
                if skills.is_subset(&rec.skills) {
                    report.duplicate_rows += 1;
                } else {
                    report.skill_rows_merged += 1;
                    rec.skills.extend(skills);
                }
            }
            None => {
                index.insert(key, records.len());
                records.push(InteractionRecord {
                    student: student.to_string(),
                    question: question.to_string(),
                    skills,
                    correct,
                    order,
                    line,
                });
            }
        }
    }
    report.records = records.len();
    Ok((records, report))
}

/// Write records back in a column layout `parse_reader` accepts with `spec`.
///
/// Multi-skill records need `spec.skill_delimiter`; without it they are
/// emitted as one row per skill, which re-parsing merges again.
pub fn write_log(records: &[InteractionRecord], spec: &FormatSpec, out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(spec.delimiter)
        .from_writer(out);
    let csv_err = |e: csv::Error| GiktError::Format(format!("write failed: {e}"));
    let mut header = vec![
        spec.student.as_str(),
        spec.question.as_str(),
        spec.skill.as_str(),
        spec.correct.as_str(),
        spec.order.as_str(),
    ];
    if let Some(c) = &spec.scaffold_column {
        header.push(c);
    }
    w.write_record(&header).map_err(csv_err)?;
    for r in records {
        let correct = r.correct.to_string();
        let order = r.order.to_string();
        let cells: Vec<String> = match spec.skill_delimiter {
            Some(d) => vec![r.skills.iter().cloned().collect::<Vec<_>>().join(&d.to_string())],
            None => r.skills.iter().cloned().collect(),
        };
        for skill in cells {
            let mut row = vec![
                r.student.as_str(),
                r.question.as_str(),
                skill.as_str(),
                correct.as_str(),
                order.as_str(),
            ];
            if spec.scaffold_column.is_some() {
                row.push(&spec.scaffold_keep);
            }
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| GiktError::Format(format!("write failed: {e}")))?;
    Ok(())
}
