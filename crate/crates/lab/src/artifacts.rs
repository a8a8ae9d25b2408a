//! Checkpoint files and small file helpers shared by the other formats.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use pommer_core::nn::{decode_checkpoint, encode_checkpoint, Checkpoint, Network};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = tmp_path(path);
    let res = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if res.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    res.map_err(LabError::io(path))
}

pub(crate) fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(LabError::io(dir))
}

/// Hex sha256 of the checkpoint payload: identical for identical networks
/// whatever run produced them.
pub fn checkpoint_hash(ckpt: &Checkpoint) -> String {
    hex::encode(Sha256::digest(ckpt.payload()))
}

pub fn save_checkpoint(path: &Path, network: &Network<f32>, provenance: &str) -> Result<String> {
    let ckpt = Checkpoint {
        provenance: provenance.to_string(),
        network: network.clone(),
    };
    write_atomic(path, &encode_checkpoint(&ckpt))?;
    Ok(checkpoint_hash(&ckpt))
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let bytes = fs::read(path).map_err(LabError::io(path))?;
    decode_checkpoint(&bytes).map_err(|e| LabError::corrupt(path, e.to_string()))
}
