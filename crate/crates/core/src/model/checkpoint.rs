//! Binary parameter container.
//!
//! Layout: the 8-byte magic, a little-endian `u32` version, a little-endian
//! `u64` header length, a JSON header (config, id-space sizes, tensor names
//! and shapes), then every tensor's values as little-endian `f64` in header
//! order.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GiktParams, ModelConfig};
use crate::error::{GiktError, Result};
use crate::numerics::Tensor;
use crate::rng;

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"GIKTCKPT";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    shape: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    config: serde_json::Value,
    question_count: usize,
    skill_count: usize,
    tensors: Vec<TensorEntry>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub config: serde_json::Value,
    pub question_count: usize,
    pub skill_count: usize,
    pub tensors: Vec<(String, Tensor)>,
}

impl Checkpoint {
    pub fn from_params(params: &GiktParams, config: serde_json::Value) -> Self {
        Checkpoint {
            config,
            question_count: params.question_embed.rows(),
            skill_count: params.skill_embed.rows(),
            tensors: params
                .named()
                .into_iter()
                .map(|(n, t)| (n, t.clone()))
                .collect(),
        }
    }

    /// Rebuild parameters for `model`, failing on any missing, extra or
    /// mis-shaped tensor.
    pub fn into_params(self, model: &ModelConfig) -> Result<GiktParams> {
        let mut params = GiktParams::init(
            model,
            self.question_count,
            self.skill_count,
            &mut rng::stream(0, "checkpoint-skeleton", &[]),
        );
        let names: Vec<(String, Vec<usize>)> = params
            .named()
            .into_iter()
            .map(|(n, t)| (n, t.shape().to_vec()))
            .collect();
        if names.len() != self.tensors.len() {
            return Err(GiktError::Load(format!(
                "checkpoint has {} tensors, the configured model needs {}",
                self.tensors.len(),
                names.len()
            )));
        }
        for ((slot, (name, shape)), (found, tensor)) in
            params.tensors_mut().into_iter().zip(&names).zip(self.tensors)
        {
            if *name != found {
                return Err(GiktError::Load(format!(
                    "expected tensor {name:?}, checkpoint has {found:?}"
                )));
            }
            if tensor.shape() != shape.as_slice() {
                return Err(GiktError::Load(format!(
                    "tensor {name:?}: checkpoint shape {:?}, model expects {shape:?}",
                    tensor.shape()
                )));
            }
            *slot = tensor;
        }
        Ok(params)
    }
}

pub fn save_checkpoint(checkpoint: &Checkpoint, path: &Path) -> Result<()> {
    let header = Header {
        config: checkpoint.config.clone(),
        question_count: checkpoint.question_count,
        skill_count: checkpoint.skill_count,
        tensors: checkpoint
            .tensors
            .iter()
            .map(|(n, t)| TensorEntry {
                name: n.clone(),
                shape: t.shape().to_vec(),
            })
            .collect(),
    };
    let header = serde_json::to_vec(&header)?;
    let values: usize = checkpoint.tensors.iter().map(|(_, t)| t.len()).sum();
    let mut buf = Vec::with_capacity(20 + header.len() + values * 8);
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(header.len() as u64).to_le_bytes());
    buf.extend_from_slice(&header);
    for (_, t) in &checkpoint.tensors {
        for v in t.data() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut f = fs::File::create(path).map_err(|e| GiktError::io(path, e))?;
    f.write_all(&buf).map_err(|e| GiktError::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| GiktError::io(path, e))?;
    let fail = |m: &str| GiktError::Load(format!("{}: {m}", path.display()));
    if bytes.len() < 20 || &bytes[..8] != CHECKPOINT_MAGIC {
        return Err(fail("not a checkpoint file"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(fail(&format!("unsupported checkpoint version {version}")));
    }
    let hlen = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
    let body = bytes.get(20..20 + hlen).ok_or_else(|| fail("truncated header"))?;
    let header: Header = serde_json::from_slice(body).map_err(|e| fail(&e.to_string()))?;
    let mut at = 20 + hlen;
    let mut tensors = Vec::with_capacity(header.tensors.len());
    for entry in header.tensors {
        let n: usize = entry.shape.iter().product();
        let raw = bytes
            .get(at..at + n * 8)
            .ok_or_else(|| fail(&format!("truncated data for {}", entry.name)))?;
        let data = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        at += n * 8;
        tensors.push((entry.name, Tensor::new(entry.shape, data)?));
    }
    if at != bytes.len() {
        return Err(fail("trailing bytes after tensor data"));
    }
    Ok(Checkpoint {
        config: header.config,
        question_count: header.question_count,
        skill_count: header.skill_count,
        tensors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ModelConfig {
        ModelConfig {
            embed_dim: 3,
            lstm_sizes: vec![4, 3],
            ..ModelConfig::default()
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let cfg = small();
        let p = GiktParams::init(&cfg, 5, 2, &mut rng::stream(4, "init", &[]));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.ckpt");
        let ck = Checkpoint::from_params(&p, serde_json::json!({"k": 1}));
        save_checkpoint(&ck, &path).unwrap();
        let back = load_checkpoint(&path).unwrap();
        assert_eq!(back, ck);
        assert_eq!(back.into_params(&cfg).unwrap(), p);
    }

    #[test]
    fn shape_mismatch_fails_loudly() {
        let cfg = small();
        let p = GiktParams::init(&cfg, 5, 2, &mut rng::stream(4, "init", &[]));
        let ck = Checkpoint::from_params(&p, serde_json::Value::Null);
        let wider = ModelConfig {
            embed_dim: 4,
            lstm_sizes: vec![4, 4],
            ..small()
        };
        match ck.clone().into_params(&wider) {
            Err(GiktError::Load(m)) => assert!(m.contains("shape"), "{m}"),
            other => panic!("expected load error, got {other:?}"),
        }
        let fewer_layers = ModelConfig {
            gcn: crate::graph::GcnConfig { layers: 1, ..Default::default() },
            ..small()
        };
        assert!(ck.into_params(&fewer_layers).is_err());
    }

    #[test]
    fn garbage_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad");
        fs::write(&path, b"hello world, not a checkpoint").unwrap();
        assert!(matches!(load_checkpoint(&path), Err(GiktError::Load(_))));
    }
}
