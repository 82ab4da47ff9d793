use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{GiktError, Result};

pub const DATASET_FORMAT: &str = "gikt-dataset";
pub const DATASET_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct DatasetFile {
    format: String,
    version: u32,
    dataset: Dataset,
}

pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| GiktError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let doc = DatasetFile {
        format: DATASET_FORMAT.into(),
        version: DATASET_VERSION,
        dataset: dataset.clone(),
    };
    serde_json::to_writer(&mut w, &doc)?;
    w.write_all(b"\n").map_err(|e| GiktError::io(path, e))?;
    w.flush().map_err(|e| GiktError::io(path, e))
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let file = fs::File::open(path).map_err(|e| GiktError::io(path, e))?;
    let doc: DatasetFile = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| GiktError::Load(format!("{}: {e}", path.display())))?;
    if doc.format != DATASET_FORMAT || doc.version != DATASET_VERSION {
        return Err(GiktError::Load(format!(
            "{}: expected {DATASET_FORMAT} v{DATASET_VERSION}, found {} v{}",
            path.display(),
            doc.format,
            doc.version
        )));
    }
    doc.dataset.validate()?;
    Ok(doc.dataset)
}
