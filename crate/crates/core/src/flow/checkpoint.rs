//! Checkpoints: one JSON header line, then the parameters as little-endian f64.

use super::VelocityModel;
use serde::{Deserialize, Serialize};
use std::io::{self, BufRead, Write};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointHeader {
    pub data_dim: usize,
    pub cond_dim: usize,
    pub hidden: usize,
    pub n_params: usize,
    pub seed: u64,
    pub steps: usize,
}

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("bad checkpoint header: {0}")]
    Header(#[from] serde_json::Error),
    #[error("header declares {declared} parameters but the architecture needs {expected}")]
    ParamCount { declared: usize, expected: usize },
    #[error("checkpoint holds non-finite parameters")]
    NonFinite,
}

pub fn write_checkpoint(mut w: impl Write, model: &VelocityModel, seed: u64, steps: usize) -> io::Result<()> {
    use super::VelocityField;
    let header = CheckpointHeader {
        data_dim: model.data_dim(),
        cond_dim: model.cond_dim(),
        hidden: model.hidden(),
        n_params: model.n_params(),
        seed,
        steps,
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for p in model.params() {
        w.write_all(&p.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_checkpoint(mut r: impl BufRead) -> Result<(VelocityModel, CheckpointHeader), CheckpointError> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: CheckpointHeader = serde_json::from_str(line.trim_end())?;
    let expected = VelocityModel::param_count(header.data_dim, header.cond_dim, header.hidden);
    if expected != header.n_params || header.data_dim == 0 || header.hidden == 0 {
        return Err(CheckpointError::ParamCount { declared: header.n_params, expected });
    }
    let mut params = Vec::with_capacity(expected);
    let mut buf = [0u8; 8];
    for _ in 0..header.n_params {
        r.read_exact(&mut buf)?;
        params.push(f64::from_le_bytes(buf));
    }
    let model = VelocityModel::from_params(header.data_dim, header.cond_dim, header.hidden, params)
        .expect("parameter count checked above");
    if !model.is_finite() {
        return Err(CheckpointError::NonFinite);
    }
    Ok((model, header))
}
