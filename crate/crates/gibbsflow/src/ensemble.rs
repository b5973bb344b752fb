//! Binary ensemble files.
//!
//! Layout, all little-endian:
//!
//! ```text
//! 0   magic "GFE1"
//! 4   model code (u8), three zero bytes
//! 8   cutoff N (u32)
//! 12  seed (u64)
//! 20  count (u64)
//! 28  config fingerprint (u64)
//! 36  count blocks of basis-length (re, im) f64 pairs
//! ..  count weights (f64)
//! ..  count sample indices (u64)
//! ```

use std::path::Path;

use gibbsflow_core::gibbs::{effective_sample_size, WeightedEnsemble, WeightedSample};
use gibbsflow_core::{Basis, Complex, Model, SpectralField};

use crate::error::{CliError, Result};
use crate::output::write_atomic;

pub const MAGIC: &[u8; 4] = b"GFE1";
pub const HEADER_LEN: usize = 36;

pub fn encode(e: &WeightedEnsemble) -> Vec<u8> {
    let len = e.samples.first().map_or(0, |s| s.field.coeffs().len());
    let mut out = Vec::with_capacity(HEADER_LEN + e.samples.len() * (16 * len + 16));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[e.model.code(), 0, 0, 0]);
    out.extend_from_slice(&(e.cutoff as u32).to_le_bytes());
    out.extend_from_slice(&e.seed.to_le_bytes());
    out.extend_from_slice(&(e.samples.len() as u64).to_le_bytes());
    out.extend_from_slice(&e.fingerprint.to_le_bytes());
    for s in &e.samples {
        for c in s.field.coeffs() {
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    for s in &e.samples {
        out.extend_from_slice(&s.weight.to_le_bytes());
    }
    for s in &e.samples {
        out.extend_from_slice(&s.index.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize, what: &str) -> Result<&[u8]> {
        if self.buf.len() - self.pos < n {
            return Err(CliError::Format {
                offset: self.buf.len() as u64,
                detail: format!("file ends while reading {what} (needs {n} bytes at offset {})", self.pos),
            });
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<(usize, f64)> {
        let at = self.pos;
        Ok((at, f64::from_le_bytes(self.take(8, what)?.try_into().unwrap())))
    }
}

fn bad(offset: usize, detail: impl Into<String>) -> CliError {
    CliError::Format { offset: offset as u64, detail: detail.into() }
}

/// Parse an ensemble; any inconsistency fails without returning partial data.
pub fn decode(buf: &[u8]) -> Result<WeightedEnsemble> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        return Err(bad(0, "bad magic, expected GFE1"));
    }
    let tag = r.take(4, "model code")?;
    let model = Model::from_code(tag[0]).ok_or_else(|| bad(4, format!("unknown model code {}", tag[0])))?;
    if tag[1..] != [0, 0, 0] {
        return Err(bad(5, "reserved bytes are not zero"));
    }
    let cutoff = u32::from_le_bytes(r.take(4, "cutoff")?.try_into().unwrap()) as usize;
    let seed = r.u64("seed")?;
    let count = r.u64("count")?;
    let fingerprint = r.u64("fingerprint")?;
    let basis = Basis::new(model, cutoff).map_err(|e| bad(8, e.to_string()))?;
    let len = basis.len();
    let need = (count as u128) * (16 * len as u128 + 16);
    let have = (buf.len() - HEADER_LEN) as u128;
    if need != have {
        let offset = if have < need { buf.len() } else { HEADER_LEN + need as usize };
        return Err(bad(
            offset,
            format!("payload is {have} bytes, header implies {need} ({count} samples of {len} modes)"),
        ));
    }
    let count = count as usize;
    let mut fields = Vec::with_capacity(count);
    for _ in 0..count {
        let start = r.pos;
        let mut coeffs = Vec::with_capacity(len);
        for _ in 0..len {
            let (at, re) = r.f64("coefficient")?;
            let (_, im) = r.f64("coefficient")?;
            if !re.is_finite() || !im.is_finite() {
                return Err(bad(at, "non-finite coefficient"));
            }
            coeffs.push(Complex::new(re, im));
        }
        fields.push(SpectralField::new(&basis, coeffs).map_err(|e| bad(start, e.to_string()))?);
    }
    let mut weights = Vec::with_capacity(count);
    for _ in 0..count {
        let (at, w) = r.f64("weight")?;
        if !(w >= 0.0) || !w.is_finite() {
            return Err(bad(at, format!("invalid weight {w}")));
        }
        weights.push(w);
    }
    let mut samples = Vec::with_capacity(count);
    for (field, weight) in fields.into_iter().zip(weights) {
        let index = r.u64("sample index")?;
        samples.push(WeightedSample { field, weight, index });
    }
    let ess = effective_sample_size(samples.iter().map(|s| s.weight));
    Ok(WeightedEnsemble { model, cutoff, seed, fingerprint, samples, ess, low_ess: ess < 10.0 })
}

pub fn write(path: &Path, e: &WeightedEnsemble) -> Result<()> {
    write_atomic(path, &encode(e))
}

/// Read an ensemble and refuse it unless its fingerprint is `expected`.
pub fn read(path: &Path, expected: Option<u64>) -> Result<WeightedEnsemble> {
    let buf = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let e = decode(&buf)?;
    if let Some(fp) = expected {
        if fp != e.fingerprint {
            return Err(CliError::Fingerprint { file: e.fingerprint, requested: fp });
        }
    }
    Ok(e)
}
