//! Bit-exact reader and writer for the NBT binary tag format.
//!
//! Wire layout: a named tag is `tag-id byte, u16 BE name length, name
//! bytes, payload`. Payloads are big-endian throughout. Compounds hold
//! named children terminated by a single End byte; lists hold an element
//! id, an i32 BE count, and that many unnamed payloads.
//!
//! The parser accepts raw or gzip-wrapped input (detected by the
//! `0x1F 0x8B` magic), consumes exactly the whole payload, and returns a
//! typed [`NbtError`] on any malformed input -- truncation, bad tag ids,
//! negative lengths, trailing bytes, invalid UTF-8, oversized nesting.
//! It never panics on untrusted bytes and never allocates more than the
//! input could justify.

mod schematic;

pub use schematic::{load_schematic, save_schematic, SchematicError};

use std::collections::BTreeMap;
use std::io::Read;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use thiserror::Error;

/// Nesting ceiling for compounds and lists. Legitimate map files are a
/// handful of levels deep; this only exists to turn hostile input into an
/// error instead of a stack overflow.
const MAX_DEPTH: usize = 512;

/// Ceiling on the decompressed size of a gzip payload (256 MiB), so a
/// tiny bomb input cannot exhaust memory.
const MAX_INFLATED: u64 = 256 * 1024 * 1024;

#[derive(Debug, Error, PartialEq)]
pub enum NbtError {
    #[error("unexpected end at offset {offset}")]
    UnexpectedEnd { offset: usize },
    #[error("invalid tag id {id} at offset {offset}")]
    InvalidTagId { id: u8, offset: usize },
    #[error("negative length {length} at offset {offset}")]
    NegativeLength { length: i32, offset: usize },
    #[error("{trailing} trailing byte(s) after the root tag")]
    TrailingData { trailing: usize },
    #[error("invalid UTF-8 in string at offset {offset}")]
    InvalidUtf8 { offset: usize },
    #[error("duplicate compound key {name:?} at offset {offset}")]
    DuplicateKey { name: String, offset: usize },
    #[error("list of End tags with non-zero count at offset {offset}")]
    EndListWithElements { offset: usize },
    #[error("nesting deeper than {MAX_DEPTH} levels at offset {offset}")]
    TooDeep { offset: usize },
    #[error("root tag must be a compound, found tag id {id}")]
    RootNotCompound { id: u8 },
    #[error("gzip payload is corrupt: {0}")]
    Gzip(String),
    #[error("gzip payload inflates past the {MAX_INFLATED} byte limit")]
    InflatedTooLarge,
    #[error("list declares element kind {declared:?} but holds a {found:?}")]
    MixedList { declared: TagKind, found: TagKind },
    #[error("an End tag is not writable as a value")]
    EndNotWritable,
    #[error("string of {len} bytes exceeds the u16 length prefix")]
    StringTooLong { len: usize },
    #[error("array of {len} elements exceeds the i32 length prefix")]
    ArrayTooLong { len: usize },
}

/// Tag kind discriminant, matching the wire ids 0..=12.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagKind {
    End = 0,
    Byte = 1,
    Short = 2,
    Int = 3,
    Long = 4,
    Float = 5,
    Double = 6,
    ByteArray = 7,
    String = 8,
    List = 9,
    Compound = 10,
    IntArray = 11,
    LongArray = 12,
}

impl TagKind {
    pub fn from_id(id: u8) -> Option<TagKind> {
        Some(match id {
            0 => TagKind::End,
            1 => TagKind::Byte,
            2 => TagKind::Short,
            3 => TagKind::Int,
            4 => TagKind::Long,
            5 => TagKind::Float,
            6 => TagKind::Double,
            7 => TagKind::ByteArray,
            8 => TagKind::String,
            9 => TagKind::List,
            10 => TagKind::Compound,
            11 => TagKind::IntArray,
            12 => TagKind::LongArray,
            _ => return None,
        })
    }

    pub fn id(self) -> u8 {
        self as u8
    }
}

/// A homogeneous list payload: the declared element kind plus elements.
/// The declared kind matters even when the list is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct NbtList {
    pub elem: TagKind,
    pub items: Vec<Tag>,
}

/// One NBT value.
///
/// `ByteArray` is kept as raw bytes; whether consumers treat them as
/// signed is their business (block ids treat them as 0..=255).
#[derive(Debug, Clone, PartialEq)]
pub enum Tag {
    End,
    Byte(i8),
    Short(i16),
    Int(i32),
    Long(i64),
    Float(f32),
    Double(f64),
    ByteArray(Vec<u8>),
    String(String),
    List(NbtList),
    Compound(BTreeMap<String, Tag>),
    IntArray(Vec<i32>),
    LongArray(Vec<i64>),
}

impl Tag {
    pub fn kind(&self) -> TagKind {
        match self {
            Tag::End => TagKind::End,
            Tag::Byte(_) => TagKind::Byte,
            Tag::Short(_) => TagKind::Short,
            Tag::Int(_) => TagKind::Int,
            Tag::Long(_) => TagKind::Long,
            Tag::Float(_) => TagKind::Float,
            Tag::Double(_) => TagKind::Double,
            Tag::ByteArray(_) => TagKind::ByteArray,
            Tag::String(_) => TagKind::String,
            Tag::List(_) => TagKind::List,
            Tag::Compound(_) => TagKind::Compound,
            Tag::IntArray(_) => TagKind::IntArray,
            Tag::LongArray(_) => TagKind::LongArray,
        }
    }
}

/// A parsed file: the root compound and its name.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedRoot {
    pub name: String,
    pub tag: Tag,
}

impl NamedRoot {
    /// The root compound's children. Panics only if constructed by hand
    /// with a non-compound tag, which `parse_nbt` never does.
    pub fn compound(&self) -> &BTreeMap<String, Tag> {
        match &self.tag {
            Tag::Compound(map) => map,
            _ => panic!("NamedRoot invariant violated: root is not a compound"),
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], NbtError> {
        if self.remaining() < n {
            return Err(NbtError::UnexpectedEnd { offset: self.pos });
        }
        let slice = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8, NbtError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, NbtError> {
        let b = self.take(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn i16(&mut self) -> Result<i16, NbtError> {
        Ok(self.u16()? as i16)
    }

    fn i32(&mut self) -> Result<i32, NbtError> {
        let b = self.take(4)?;
        Ok(i32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn i64(&mut self) -> Result<i64, NbtError> {
        let b = self.take(8)?;
        Ok(i64::from_be_bytes(b.try_into().unwrap()))
    }

    /// A non-negative i32 length prefix, checked against a per-element
    /// size so the declared payload must actually fit in the remaining
    /// input before anything is allocated.
    fn length(&mut self, elem_size: usize) -> Result<usize, NbtError> {
        let at = self.pos;
        let raw = self.i32()?;
        if raw < 0 {
            return Err(NbtError::NegativeLength { length: raw, offset: at });
        }
        let count = raw as usize;
        if count
            .checked_mul(elem_size)
            .is_none_or(|bytes| bytes > self.remaining())
        {
            return Err(NbtError::UnexpectedEnd { offset: self.pos });
        }
        Ok(count)
    }

    fn string(&mut self) -> Result<String, NbtError> {
        let len = self.u16()? as usize;
        let at = self.pos;
        let bytes = self.take(len)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| NbtError::InvalidUtf8 { offset: at })
    }

    fn payload(&mut self, kind: TagKind, depth: usize) -> Result<Tag, NbtError> {
        if depth > MAX_DEPTH {
            return Err(NbtError::TooDeep { offset: self.pos });
        }
        Ok(match kind {
            TagKind::End => Tag::End,
            TagKind::Byte => Tag::Byte(self.u8()? as i8),
            TagKind::Short => Tag::Short(self.i16()?),
            TagKind::Int => Tag::Int(self.i32()?),
            TagKind::Long => Tag::Long(self.i64()?),
            TagKind::Float => Tag::Float(f32::from_bits(self.i32()? as u32)),
            TagKind::Double => Tag::Double(f64::from_bits(self.i64()? as u64)),
            TagKind::ByteArray => {
                let n = self.length(1)?;
                Tag::ByteArray(self.take(n)?.to_vec())
            }
            TagKind::String => Tag::String(self.string()?),
            TagKind::List => {
                let elem_at = self.pos;
                let elem_id = self.u8()?;
                let elem = TagKind::from_id(elem_id)
                    .ok_or(NbtError::InvalidTagId { id: elem_id, offset: elem_at })?;
                let count_at = self.pos;
                // Every payload consumes at least one byte except the
                // empty compound's End, so one byte per element is a safe
                // lower bound for the fit check.
                let n = self.length(1)?;
                if elem == TagKind::End && n > 0 {
                    return Err(NbtError::EndListWithElements { offset: count_at });
                }
                let mut items = Vec::with_capacity(n.min(self.remaining()));
                for _ in 0..n {
                    items.push(self.payload(elem, depth + 1)?);
                }
                Tag::List(NbtList { elem, items })
            }
            TagKind::Compound => {
                let mut map = BTreeMap::new();
                loop {
                    let id_at = self.pos;
                    let id = self.u8()?;
                    let child_kind = TagKind::from_id(id)
                        .ok_or(NbtError::InvalidTagId { id, offset: id_at })?;
                    if child_kind == TagKind::End {
                        break;
                    }
                    let name = self.string()?;
                    let value = self.payload(child_kind, depth + 1)?;
                    if map.insert(name.clone(), value).is_some() {
                        return Err(NbtError::DuplicateKey { name, offset: id_at });
                    }
                }
                Tag::Compound(map)
            }
            TagKind::IntArray => {
                let n = self.length(4)?;
                let mut v = Vec::with_capacity(n);
                for _ in 0..n {
                    v.push(self.i32()?);
                }
                Tag::IntArray(v)
            }
            TagKind::LongArray => {
                let n = self.length(8)?;
                let mut v = Vec::with_capacity(n);
                for _ in 0..n {
                    v.push(self.i64()?);
                }
                Tag::LongArray(v)
            }
        })
    }
}

fn is_gzip(bytes: &[u8]) -> bool {
    bytes.len() >= 2 && bytes[0] == 0x1F && bytes[1] == 0x8B
}

fn inflate(bytes: &[u8]) -> Result<Vec<u8>, NbtError> {
    let mut out = Vec::new();
    let mut decoder = GzDecoder::new(bytes).take(MAX_INFLATED + 1);
    decoder
        .read_to_end(&mut out)
        .map_err(|e| NbtError::Gzip(e.to_string()))?;
    if out.len() as u64 > MAX_INFLATED {
        return Err(NbtError::InflatedTooLarge);
    }
    Ok(out)
}

/// Decode a full NBT document from raw or gzip-wrapped bytes.
///
/// The root must be a compound and the payload must be consumed exactly;
/// anything left over is a [`NbtError::TrailingData`].
pub fn parse_nbt(bytes: &[u8]) -> Result<NamedRoot, NbtError> {
    let inflated;
    let raw = if is_gzip(bytes) {
        inflated = inflate(bytes)?;
        &inflated[..]
    } else {
        bytes
    };

    let mut r = Reader::new(raw);
    let id = r.u8()?;
    let kind = TagKind::from_id(id).ok_or(NbtError::InvalidTagId { id, offset: 0 })?;
    if kind != TagKind::Compound {
        return Err(NbtError::RootNotCompound { id });
    }
    let name = r.string()?;
    let tag = r.payload(TagKind::Compound, 0)?;
    if r.remaining() > 0 {
        return Err(NbtError::TrailingData { trailing: r.remaining() });
    }
    Ok(NamedRoot { name, tag })
}

// ---------------------------------------------------------------------------
// Writing
// ---------------------------------------------------------------------------

struct Writer {
    out: Vec<u8>,
}

impl Writer {
    fn string(&mut self, s: &str) -> Result<(), NbtError> {
        let len = s.len();
        if len > u16::MAX as usize {
            return Err(NbtError::StringTooLong { len });
        }
        self.out.extend_from_slice(&(len as u16).to_be_bytes());
        self.out.extend_from_slice(s.as_bytes());
        Ok(())
    }

    fn array_len(&mut self, len: usize) -> Result<(), NbtError> {
        if len > i32::MAX as usize {
            return Err(NbtError::ArrayTooLong { len });
        }
        self.out.extend_from_slice(&(len as i32).to_be_bytes());
        Ok(())
    }

    fn payload(&mut self, tag: &Tag) -> Result<(), NbtError> {
        match tag {
            Tag::End => return Err(NbtError::EndNotWritable),
            Tag::Byte(v) => self.out.push(*v as u8),
            Tag::Short(v) => self.out.extend_from_slice(&v.to_be_bytes()),
            Tag::Int(v) => self.out.extend_from_slice(&v.to_be_bytes()),
            Tag::Long(v) => self.out.extend_from_slice(&v.to_be_bytes()),
            Tag::Float(v) => self.out.extend_from_slice(&v.to_bits().to_be_bytes()),
            Tag::Double(v) => self.out.extend_from_slice(&v.to_bits().to_be_bytes()),
            Tag::ByteArray(v) => {
                self.array_len(v.len())?;
                self.out.extend_from_slice(v);
            }
            Tag::String(s) => self.string(s)?,
            Tag::List(list) => {
                if list.elem == TagKind::End && !list.items.is_empty() {
                    return Err(NbtError::EndListWithElements { offset: self.out.len() });
                }
                for item in &list.items {
                    if item.kind() != list.elem {
                        return Err(NbtError::MixedList {
                            declared: list.elem,
                            found: item.kind(),
                        });
                    }
                }
                self.out.push(list.elem.id());
                self.array_len(list.items.len())?;
                for item in &list.items {
                    self.payload(item)?;
                }
            }
            Tag::Compound(map) => {
                // BTreeMap iteration is ascending lexicographic by name,
                // which is the serialization order this format fixes so
                // output bytes are deterministic.
                for (name, value) in map {
                    self.out.push(value.kind().id());
                    self.string(name)?;
                    self.payload(value)?;
                }
                self.out.push(TagKind::End.id());
            }
            Tag::IntArray(v) => {
                self.array_len(v.len())?;
                for x in v {
                    self.out.extend_from_slice(&x.to_be_bytes());
                }
            }
            Tag::LongArray(v) => {
                self.array_len(v.len())?;
                for x in v {
                    self.out.extend_from_slice(&x.to_be_bytes());
                }
            }
        }
        Ok(())
    }
}

/// Encode a document, optionally gzip-wrapped. Compound children are
/// emitted in ascending lexicographic name order, so uncompressed output
/// is byte-deterministic for a given tree.
pub fn write_nbt(root: &NamedRoot, compress: bool) -> Result<Vec<u8>, NbtError> {
    if root.tag.kind() != TagKind::Compound {
        return Err(NbtError::RootNotCompound { id: root.tag.kind().id() });
    }
    let mut w = Writer { out: Vec::new() };
    w.out.push(TagKind::Compound.id());
    w.string(&root.name)?;
    w.payload(&root.tag)?;
    if !compress {
        return Ok(w.out);
    }
    let mut encoder = GzEncoder::new(Vec::new(), Compression::default());
    std::io::Write::write_all(&mut encoder, &w.out).expect("write to Vec cannot fail");
    Ok(encoder.finish().expect("finish to Vec cannot fail"))
}
