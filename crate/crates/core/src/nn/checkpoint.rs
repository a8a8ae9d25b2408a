//! Binary checkpoint layout (all integers little-endian):
//!
//! ```text
//! magic "PMCK" | version u32 | provenance len u16 + utf8 bytes
//! | payload: in_channels u32, size u32, conv count u32, (filters u32, pool u8)*,
//!   hidden u32, outputs u32, dropout f32, mode u8, param count u64, params f32*
//! ```

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;

use super::{ConvSpec, Mode, NetSpec, Network, NnError};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"PMCK";
const VERSION: u32 = 1;

/// A network plus the provenance string (the producing run's config hash).
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub provenance: String,
    pub network: Network<f32>,
}

impl Checkpoint {
    /// Spec, mode and parameters, without the header. Two checkpoints with
    /// equal payloads hold the same network.
    pub fn payload(&self) -> Vec<u8> {
        let net = &self.network;
        let spec = net.spec();
        let mut out = Vec::with_capacity(64 + 4 * net.params.len());
        let u32le = |out: &mut Vec<u8>, v: usize| out.extend_from_slice(&(v as u32).to_le_bytes());
        u32le(&mut out, spec.in_channels);
        u32le(&mut out, spec.size);
        u32le(&mut out, spec.convs.len());
        for c in &spec.convs {
            u32le(&mut out, c.filters);
            out.push(c.pool as u8);
        }
        u32le(&mut out, spec.hidden);
        u32le(&mut out, spec.outputs);
        out.extend_from_slice(&spec.dropout.to_le_bytes());
        out.push(match net.mode {
            Mode::Train => 1,
            Mode::Eval => 0,
        });
        out.extend_from_slice(&(net.params.len() as u64).to_le_bytes());
        for p in &net.params {
            out.extend_from_slice(&p.to_le_bytes());
        }
        out
    }
}

pub fn encode_checkpoint(ckpt: &Checkpoint) -> Vec<u8> {
    let prov = ckpt.provenance.as_bytes();
    let mut out = Vec::new();
    out.extend_from_slice(CHECKPOINT_MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(prov.len().min(u16::MAX as usize) as u16).to_le_bytes());
    out.extend_from_slice(&prov[..prov.len().min(u16::MAX as usize)]);
    out.extend_from_slice(&ckpt.payload());
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], NnError> {
        if self.buf.len() - self.pos < n {
            return Err(NnError::Corrupt("truncated".to_owned()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, NnError> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16, NnError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<u32, NnError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn usize(&mut self) -> Result<usize, NnError> {
        let v = self.u32()? as usize;
        if v > 1 << 20 {
            return Err(NnError::Corrupt(alloc::format!(
                "implausible dimension {v}"
            )));
        }
        Ok(v)
    }
    fn u64(&mut self) -> Result<u64, NnError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f32(&mut self) -> Result<f32, NnError> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<Checkpoint, NnError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4)? != CHECKPOINT_MAGIC {
        return Err(NnError::Corrupt("bad magic".to_owned()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(NnError::Corrupt(alloc::format!(
            "unsupported version {version}"
        )));
    }
    let plen = r.u16()? as usize;
    let provenance = String::from_utf8(r.take(plen)?.to_vec())
        .map_err(|_| NnError::Corrupt("provenance is not utf-8".to_owned()))?;
    let in_channels = r.usize()?;
    let size = r.usize()?;
    let n_conv = r.usize()?;
    if n_conv > 64 {
        return Err(NnError::Corrupt(alloc::format!("{n_conv} conv layers")));
    }
    let mut convs = Vec::with_capacity(n_conv);
    for _ in 0..n_conv {
        let filters = r.usize()?;
        let pool = match r.u8()? {
            0 => false,
            1 => true,
            v => return Err(NnError::Corrupt(alloc::format!("pool flag {v}"))),
        };
        convs.push(ConvSpec { filters, pool });
    }
    let hidden = r.usize()?;
    let outputs = r.usize()?;
    let dropout = r.f32()?;
    let mode = match r.u8()? {
        0 => Mode::Eval,
        1 => Mode::Train,
        v => return Err(NnError::Corrupt(alloc::format!("mode {v}"))),
    };
    let spec = NetSpec {
        in_channels,
        size,
        convs,
        hidden,
        outputs,
        dropout,
    };
    let count = r.u64()? as usize;
    if count != spec.param_count() {
        return Err(NnError::Corrupt(alloc::format!(
            "{count} parameters stored, spec needs {}",
            spec.param_count()
        )));
    }
    let mut params = Vec::with_capacity(count);
    for _ in 0..count {
        params.push(r.f32()?);
    }
    if r.pos != bytes.len() {
        return Err(NnError::Corrupt("trailing bytes".to_owned()));
    }
    let network = Network::from_params(spec, params, mode)?;
    Ok(Checkpoint {
        provenance,
        network,
    })
}
