//! On-disk container of encoded write blocks and its erasure sidecar.
//!
//! Header (24 bytes, integers little-endian):
//!
//! ```text
//! 0   magic "MBIC"
//! 4   version (1)
//! 5   p
//! 6   w
//! 7   modulus, coefficient c_i weighted by p^i (u16; the bit pattern when p = 2)
//! 9   n (u16)
//! 11  k (u16)
//! 13  t (u16)
//! 15  construction (1 = C3, 2 = K3)
//! 16  block count (u64)
//! ```
//!
//! Each block record is `3n` symbols, sub-blocks in order, one byte per symbol when
//! `q <= 256` and two bytes otherwise. The sidecar holds one `ceil(3n/8)`-byte
//! bitmap per block, bit `i % 8` of byte `i / 8` set when symbol `i` is erased.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::galois::{Elem, Field};
use crate::mbic::{
    global_decode, local_read, Construction, DecodePath, ErasurePattern, Layout, MbicParams,
    Message, WriteBlock, M,
};

pub const MAGIC: [u8; 4] = *b"MBIC";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContainerHeader {
    pub p: u8,
    pub w: u8,
    pub modulus: u16,
    pub n: u16,
    pub k: u16,
    pub t: u16,
    pub construction: Construction,
    pub block_count: u64,
}

fn narrow<T: TryFrom<usize>>(v: usize, what: &str) -> Result<T> {
    T::try_from(v).map_err(|_| Error::Format(format!("{what} {v} does not fit the header")))
}

impl ContainerHeader {
    pub fn from_params(params: &MbicParams, block_count: u64) -> Result<Self> {
        let f = params.field();
        let p = f.characteristic() as usize;
        let modulus = f
            .modulus()
            .iter()
            .rev()
            .try_fold(0usize, |acc, &c| {
                acc.checked_mul(p).and_then(|a| a.checked_add(c as usize))
            })
            .unwrap_or(usize::MAX);
        Ok(ContainerHeader {
            p: narrow(p, "characteristic")?,
            w: narrow(f.degree() as usize, "degree")?,
            modulus: narrow(modulus, "modulus")?,
            n: narrow(params.n(), "n")?,
            k: narrow(params.k(), "k")?,
            t: narrow(params.t(), "t")?,
            construction: params.construction(),
            block_count,
        })
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut b = [0u8; HEADER_LEN];
        b[0..4].copy_from_slice(&MAGIC);
        b[4] = VERSION;
        b[5] = self.p;
        b[6] = self.w;
        b[7..9].copy_from_slice(&self.modulus.to_le_bytes());
        b[9..11].copy_from_slice(&self.n.to_le_bytes());
        b[11..13].copy_from_slice(&self.k.to_le_bytes());
        b[13..15].copy_from_slice(&self.t.to_le_bytes());
        b[15] = self.construction.id();
        b[16..24].copy_from_slice(&self.block_count.to_le_bytes());
        b
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        if b.len() < HEADER_LEN {
            return Err(Error::Format(format!(
                "header is {} bytes, need {HEADER_LEN}",
                b.len()
            )));
        }
        if b[0..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        if b[4] != VERSION {
            return Err(Error::Format(format!("unsupported version {}", b[4])));
        }
        let u16_at = |i: usize| u16::from_le_bytes([b[i], b[i + 1]]);
        let construction = Construction::from_id(b[15])
            .ok_or_else(|| Error::Format(format!("unknown construction id {}", b[15])))?;
        let mut count = [0u8; 8];
        count.copy_from_slice(&b[16..24]);
        Ok(ContainerHeader {
            p: b[5],
            w: b[6],
            modulus: u16_at(7),
            n: u16_at(9),
            k: u16_at(11),
            t: u16_at(13),
            construction,
            block_count: u64::from_le_bytes(count),
        })
    }

    pub fn field(&self) -> Result<Field> {
        let p = self.p as u32;
        if p < 2 {
            return Err(Error::Format(format!("characteristic {p}")));
        }
        let mut m = self.modulus as u32;
        let coeffs: Vec<u32> = (0..=self.w)
            .map(|_| {
                let c = m % p;
                m /= p;
                c
            })
            .collect();
        if m != 0 {
            return Err(Error::Format(
                "modulus has more than w+1 coefficients".into(),
            ));
        }
        Field::new(p, self.w as u32, &coeffs)
    }

    /// Rebuilds and validates the code parameters.
    pub fn params(&self) -> Result<MbicParams> {
        MbicParams::new(
            Arc::new(self.field()?),
            self.n as usize,
            self.k as usize,
            self.t as usize,
            self.construction,
        )
    }
}

fn symbol_width(field: &Field) -> usize {
    if field.order() <= 256 {
        1
    } else {
        2
    }
}

fn encode_symbols(out: &mut Vec<u8>, symbols: &[Elem], width: usize) {
    for &s in symbols {
        if width == 1 {
            out.push(s as u8);
        } else {
            out.extend_from_slice(&s.to_le_bytes());
        }
    }
}

fn decode_symbols(bytes: &[u8], width: usize, field: &Field) -> Result<Vec<Elem>> {
    let symbols: Vec<Elem> = if width == 1 {
        bytes.iter().map(|&b| b as Elem).collect()
    } else {
        bytes
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]))
            .collect()
    };
    if let Some(&bad) = symbols.iter().find(|&&s| !field.contains(s as u32)) {
        return Err(Error::Format(format!(
            "symbol {bad} outside GF({})",
            field.order()
        )));
    }
    Ok(symbols)
}

/// Encodes `messages` and writes header plus block records. Returns the block count.
pub fn write_container(path: &Path, params: &MbicParams, messages: &[Message]) -> Result<u64> {
    let layout = Layout::new(params.clone())?;
    let blocks = messages
        .iter()
        .map(|m| layout.encode(m))
        .collect::<Result<Vec<_>>>()?;
    write_blocks(path, params, &blocks)
}

/// Writes already encoded blocks.
pub fn write_blocks(path: &Path, params: &MbicParams, blocks: &[WriteBlock]) -> Result<u64> {
    let header = ContainerHeader::from_params(params, blocks.len() as u64)?;
    let width = symbol_width(params.field());
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(&header.to_bytes())?;
    let mut buf = Vec::with_capacity(params.block_len() * width);
    for b in blocks {
        if b.n() != params.n() {
            return Err(Error::LengthMismatch {
                expected: params.n(),
                actual: b.n(),
            });
        }
        buf.clear();
        encode_symbols(&mut buf, b.symbols(), width);
        out.write_all(&buf)?;
    }
    out.flush()?;
    Ok(blocks.len() as u64)
}

/// Per-block erasure bitmaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasureSidecar {
    n: usize,
    patterns: Vec<ErasurePattern>,
}

impl ErasureSidecar {
    pub fn new(n: usize, patterns: Vec<ErasurePattern>) -> Result<Self> {
        if let Some(p) = patterns.iter().find(|p| p.n() != n) {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: p.n(),
            });
        }
        Ok(ErasureSidecar { n, patterns })
    }

    pub fn clean(n: usize, blocks: u64) -> Self {
        ErasureSidecar {
            n,
            patterns: (0..blocks).map(|_| ErasurePattern::none(n)).collect(),
        }
    }

    pub fn bitmap_len(n: usize) -> usize {
        (M * n).div_ceil(8)
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn pattern(&self, block: u64) -> Result<&ErasurePattern> {
        self.patterns
            .get(block as usize)
            .ok_or_else(|| Error::Format(format!("sidecar has no block {block}")))
    }

    pub fn patterns(&self) -> &[ErasurePattern] {
        &self.patterns
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let len = Self::bitmap_len(self.n);
        let mut out = vec![0u8; len * self.patterns.len()];
        for (b, p) in self.patterns.iter().enumerate() {
            for (i, &e) in p.mask().iter().enumerate() {
                if e {
                    out[b * len + i / 8] |= 1 << (i % 8);
                }
            }
        }
        out
    }

    /// Parses bitmaps for `blocks` blocks; padding bits must be zero.
    pub fn from_bytes(n: usize, blocks: u64, bytes: &[u8]) -> Result<Self> {
        let len = Self::bitmap_len(n);
        if bytes.len() as u64 != len as u64 * blocks {
            return Err(Error::Format(format!(
                "sidecar is {} bytes, expected {} for {blocks} blocks",
                bytes.len(),
                len as u64 * blocks
            )));
        }
        let patterns = bytes
            .chunks_exact(len.max(1))
            .take(blocks as usize)
            .map(|chunk| {
                let mask: Vec<bool> = (0..len * 8)
                    .map(|i| chunk[i / 8] >> (i % 8) & 1 == 1)
                    .collect();
                if mask[M * n..].iter().any(|&b| b) {
                    return Err(Error::Format("nonzero sidecar padding".into()));
                }
                ErasurePattern::from_mask(n, mask[..M * n].to_vec())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ErasureSidecar { n, patterns })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read(path: &Path, n: usize, blocks: u64) -> Result<Self> {
        Self::from_bytes(n, blocks, &std::fs::read(path)?)
    }
}

/// How a sub-unit was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReadPath {
    Local,
    /// Local read failed; the full block was decoded.
    Escalated(DecodePath),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubunitRead {
    pub data: Vec<Elem>,
    pub path: ReadPath,
    /// Erasure counts per sub-block, as seen by the read.
    pub profile: [usize; M],
}

/// Open container with a symbol-level I/O counter.
#[derive(Debug)]
pub struct Container {
    file: BufReader<File>,
    header: ContainerHeader,
    layout: Layout,
    width: usize,
    symbols_read: u64,
}

impl Container {
    pub fn open(path: &Path) -> Result<Self> {
        let mut file = BufReader::new(File::open(path)?);
        let mut raw = [0u8; HEADER_LEN];
        file.read_exact(&mut raw)
            .map_err(|_| Error::Format("truncated header".into()))?;
        let header = ContainerHeader::from_bytes(&raw)?;
        let params = header.params()?;
        let width = symbol_width(params.field());
        let expected = HEADER_LEN as u64 + header.block_count * (params.block_len() * width) as u64;
        let actual = file.get_ref().metadata()?.len();
        if actual != expected {
            return Err(Error::Format(format!(
                "file is {actual} bytes, header implies {expected}"
            )));
        }
        Ok(Container {
            file,
            header,
            layout: Layout::new(params)?,
            width,
            symbols_read: 0,
        })
    }

    pub fn header(&self) -> &ContainerHeader {
        &self.header
    }

    pub fn params(&self) -> &MbicParams {
        self.layout.params()
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn block_count(&self) -> u64 {
        self.header.block_count
    }

    /// Symbols read from the file since opening (or the last reset).
    pub fn symbols_read(&self) -> u64 {
        self.symbols_read
    }

    pub fn reset_counter(&mut self) {
        self.symbols_read = 0;
    }

    fn read_symbols(&mut self, block: u64, offset: usize, count: usize) -> Result<Vec<Elem>> {
        if block >= self.header.block_count {
            return Err(Error::InvalidParams(format!(
                "block {block} out of range ({} blocks)",
                self.header.block_count
            )));
        }
        let record = (self.params().block_len() * self.width) as u64;
        let pos = HEADER_LEN as u64 + block * record + (offset * self.width) as u64;
        self.file.seek(SeekFrom::Start(pos))?;
        let mut buf = vec![0u8; count * self.width];
        self.file.read_exact(&mut buf)?;
        self.symbols_read += count as u64;
        decode_symbols(&buf, self.width, self.layout.params().field())
    }

    pub fn read_block(&mut self, block: u64) -> Result<WriteBlock> {
        let n = self.params().n();
        let symbols = self.read_symbols(block, 0, M * n)?;
        WriteBlock::from_symbols(n, symbols)
    }

    pub fn read_sub_block(&mut self, block: u64, j: usize) -> Result<Vec<Elem>> {
        if j >= M {
            return Err(Error::InvalidParams(format!(
                "sub-block index {j} out of range"
            )));
        }
        let n = self.params().n();
        self.read_symbols(block, j * n, n)
    }

    /// Reads sub-unit `j` of `block` from its sub-block, escalating to a full-block
    /// decode when the local read cannot recover it.
    pub fn read_subunit(
        &mut self,
        block: u64,
        j: usize,
        sidecar: Option<&ErasureSidecar>,
    ) -> Result<SubunitRead> {
        let n = self.params().n();
        let pattern = match sidecar {
            Some(s) => s.pattern(block)?.clone(),
            None => ErasurePattern::none(n),
        };
        let profile = pattern.counts();
        let sub = self.read_sub_block(block, j)?;
        match local_read(&self.layout, j, &sub, pattern.sub_block(j)) {
            Ok(data) => Ok(SubunitRead {
                data,
                path: ReadPath::Local,
                profile,
            }),
            Err(Error::LocalReadFailure { .. }) => {
                let full = self.read_block(block)?;
                match global_decode(&self.layout, &full, &pattern) {
                    Ok(dec) => Ok(SubunitRead {
                        data: dec.message.sub_unit(j).to_vec(),
                        path: ReadPath::Escalated(dec.path),
                        profile,
                    }),
                    Err(_) => Err(Error::Unrecoverable {
                        block,
                        sub_block: j,
                        profile,
                    }),
                }
            }
            Err(e) => Err(e),
        }
    }

    /// Decodes the whole write unit of `block`.
    pub fn decode_full(
        &mut self,
        block: u64,
        sidecar: Option<&ErasureSidecar>,
    ) -> Result<(Message, DecodePath)> {
        let n = self.params().n();
        let pattern = match sidecar {
            Some(s) => s.pattern(block)?.clone(),
            None => ErasurePattern::none(n),
        };
        let full = self.read_block(block)?;
        global_decode(&self.layout, &full, &pattern)
            .map(|d| (d.message, d.path))
            .map_err(|_| Error::Unrecoverable {
                block,
                sub_block: M,
                profile: pattern.counts(),
            })
    }
}
