//! Signal ingestion and decomposition records.
//!
//! Records are UTF-8, line oriented and versioned:
//!
//! ```text
//! afd-record 1
//! meta algorithm afd1d
//! initial-energy 1.0000000000000000e0
//! steps 1
//! step 1 a_re a_im m b_re b_im l c_re c_im residual r R
//! block 1 1 1 re im
//! end
//! ```
//!
//! Absent fields are written as `-`. Reals carry 17 significant digits, so
//! a save/load/save cycle is byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::afd2d::{PGARecord, ProductTmRecord};
use crate::error::{Error, Result};
use crate::hardy::{analytic_part, quadrant_split, FourierCoeffs1D, FourierCoeffs2D, QuadrantParts, Support, C64};
use crate::poga::{AtomLabel, PogaRecord};
use crate::tm::AFDRecord;

pub const RECORD_VERSION: u32 = 1;
const MAGIC: &str = "afd-record";

/// `key=value` tokens from the leading `#` lines of a CSV file.
pub fn csv_header(text: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for line in text.lines() {
        let Some(rest) = line.trim_start().strip_prefix('#') else { break };
        for tok in rest.split_whitespace() {
            if let Some((k, v)) = tok.split_once('=') {
                out.push((k.to_string(), v.to_string()));
            }
        }
    }
    out
}

/// Real samples from a one-per-line CSV. `#` lines and blank lines are skipped;
/// rows are counted from 1.
pub fn parse_samples(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let field = t.split(',').next().unwrap_or("").trim();
        let v: f64 = field
            .parse()
            .map_err(|_| Error::Ingest { row: i + 1, msg: format!("not a number: {field:?}") })?;
        if !v.is_finite() {
            return Err(Error::Ingest { row: i + 1, msg: format!("non-finite sample {field}") });
        }
        out.push(v);
    }
    Ok(out)
}

/// Analytic part `f⁺` of a real signal sampled uniformly over `[0, 2π)`.
pub fn signal_from_samples(samples: &[f64], order: usize) -> Result<FourierCoeffs1D> {
    let need = 2 * order + 2;
    if samples.len() < need {
        return Err(Error::Ingest {
            row: samples.len(),
            msg: format!("{} samples; order {order} needs at least {need}", samples.len()),
        });
    }
    let s: Vec<C64> = samples.iter().map(|&x| C64::new(x, 0.0)).collect();
    analytic_part(&FourierCoeffs1D::from_samples(&s, order, Support::Full)?)
}

/// `fs::read` with the path in the error message.
pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read_file(path)?).map_err(|e| Error::Ingest { row: 0, msg: format!("{}: {e}", path.display()) })
}

pub fn load_signal_1d(path: &Path, order: usize) -> Result<FourierCoeffs1D> {
    let text = read_text(path)?;
    signal_from_samples(&parse_samples(&text)?, order)
}

/// One sample per line under a `#` header line.
pub fn write_signal_csv(path: &Path, header: &[(String, String)], samples: &[f64]) -> Result<()> {
    let mut out = String::new();
    if !header.is_empty() {
        out.push('#');
        for (k, v) in header {
            let _ = write!(out, " {k}={v}");
        }
        out.push('\n');
    }
    for x in samples {
        let _ = writeln!(out, "{x:.16e}");
    }
    fs::write(path, out)?;
    Ok(())
}

fn pgm_token(bytes: &[u8], pos: &mut usize) -> Result<String> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::Ingest { row: 0, msg: "truncated PGM header".into() });
    }
    Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

/// Pixels of an 8-bit binary PGM, indexed `[row, column]`.
pub fn parse_pgm(bytes: &[u8]) -> Result<Array2<u8>> {
    let mut pos = 0;
    let magic = pgm_token(bytes, &mut pos)?;
    if magic != "P5" {
        return Err(Error::Ingest { row: 0, msg: format!("expected P5 magic, found {magic:?}") });
    }
    let mut dims = [0usize; 3];
    for (d, name) in dims.iter_mut().zip(["width", "height", "maxval"]) {
        let tok = pgm_token(bytes, &mut pos)?;
        *d = tok.parse().map_err(|_| Error::Ingest { row: 0, msg: format!("bad PGM {name} {tok:?}") })?;
    }
    let [w, h, maxval] = dims;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Ingest { row: 0, msg: format!("maxval {maxval} is not 8-bit") });
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let raster = bytes.get(pos..).unwrap_or(&[]);
    if raster.len() < w * h {
        return Err(Error::Ingest { row: raster.len() / w.max(1), msg: format!("raster holds {} of {} bytes", raster.len(), w * h) });
    }
    Ok(Array2::from_shape_vec((h, w), raster[..w * h].to_vec()).expect("raster length checked"))
}

pub fn write_pgm(path: &Path, pixels: &Array2<u8>) -> Result<()> {
    let (h, w) = pixels.dim();
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    out.extend(pixels.iter());
    fs::write(path, out)?;
    Ok(())
}

/// Image samples mapped to `[0, 1]`; rows run over the first variable.
pub fn image_from_pixels(pixels: &Array2<u8>, order: usize) -> Result<(FourierCoeffs2D, QuadrantParts)> {
    let (h, w) = pixels.dim();
    if h != w {
        return Err(Error::Ingest { row: 0, msg: format!("image is {w}×{h}, not square") });
    }
    let need = 2 * order + 2;
    if w < need {
        return Err(Error::Ingest { row: 0, msg: format!("side {w}; order {order} needs at least {need}") });
    }
    let s = pixels.mapv(|v| C64::new(v as f64 / 255.0, 0.0));
    let f = FourierCoeffs2D::from_samples(&s, order, Support::Full)?;
    let parts = quadrant_split(&f)?;
    Ok((f, parts))
}

pub fn load_image_2d(path: &Path, order: usize) -> Result<(FourierCoeffs2D, QuadrantParts)> {
    image_from_pixels(&parse_pgm(&read_file(path)?)?, order)
}

/// One atom of a stored decomposition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepEntry {
    pub a: C64,
    pub m: u32,
    pub b: Option<(C64, u32)>,
    /// Absent for block-valued steps.
    pub coefficient: Option<C64>,
    pub residual_energy: f64,
    pub r: Option<f64>,
    pub big_r: Option<f64>,
}

/// One entry `(k, l, c)` of a product-TM coefficient block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockEntry {
    pub step: usize,
    pub k: usize,
    pub l: usize,
    pub value: C64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RecordFile {
    pub meta: Vec<(String, String)>,
    pub initial_energy: f64,
    pub steps: Vec<StepEntry>,
    pub blocks: Vec<BlockEntry>,
}

impl RecordFile {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.meta.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = value,
            None => self.meta.push((key.to_string(), value)),
        }
    }

    /// Energy extracted at each step: `|c|²`, or the block energy.
    pub fn step_energies(&self) -> Vec<f64> {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, s)| match s.coefficient {
                Some(c) => c.norm_sqr(),
                None => self.blocks.iter().filter(|b| b.step == i + 1).map(|b| b.value.norm_sqr()).sum(),
            })
            .collect()
    }

    /// `|E_{n−1} − extracted_n − E_n|` per step.
    pub fn ledger_discrepancies(&self) -> Vec<f64> {
        let mut prev = self.initial_energy;
        self.step_energies()
            .into_iter()
            .zip(&self.steps)
            .map(|(x, s)| {
                let d = (prev - x - s.residual_energy).abs();
                prev = s.residual_energy;
                d
            })
            .collect()
    }

    pub fn labels(&self) -> Vec<AtomLabel> {
        self.steps.iter().map(|s| AtomLabel { a: s.a, m: s.m, b: s.b }).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{MAGIC} {RECORD_VERSION}\n");
        for (k, v) in &self.meta {
            let _ = writeln!(out, "meta {k} {v}");
        }
        let _ = writeln!(out, "initial-energy {}", num(self.initial_energy));
        let _ = writeln!(out, "steps {}", self.steps.len());
        for (i, s) in self.steps.iter().enumerate() {
            let (b, l) = match s.b {
                Some((b, l)) => (cnum(b), l.to_string()),
                None => ("- -".to_string(), "-".to_string()),
            };
            let c = s.coefficient.map(cnum).unwrap_or_else(|| "- -".into());
            let _ = writeln!(
                out,
                "step {} {} {} {b} {l} {c} {} {} {}",
                i + 1,
                cnum(s.a),
                s.m,
                num(s.residual_energy),
                opt(s.r),
                opt(s.big_r)
            );
        }
        for b in &self.blocks {
            let _ = writeln!(out, "block {} {} {} {}", b.step, b.k, b.l, cnum(b.value));
        }
        out.push_str("end\n");
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = Lines { text, pos: 0 };
        let (off, first) = lines.next_line()?;
        let mut head = first.split_whitespace();
        if head.next() != Some(MAGIC) {
            return Err(Error::Parse { offset: off, msg: format!("missing {MAGIC} header") });
        }
        let version = head.next().unwrap_or("");
        if version != RECORD_VERSION.to_string() {
            return Err(Error::Version { expected: RECORD_VERSION, found: version.to_string() });
        }
        let mut rec = RecordFile::default();
        let (mut off, mut line) = lines.next_line()?;
        while let Some(rest) = line.strip_prefix("meta ") {
            let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
            rec.meta.push((k.to_string(), v.to_string()));
            (off, line) = lines.next_line()?;
        }
        let mut f = Fields::new(line, off, "initial-energy")?;
        rec.initial_energy = f.real()?;
        f.done()?;
        let (off, line) = lines.next_line()?;
        let mut f = Fields::new(line, off, "steps")?;
        let n = f.count()?;
        f.done()?;
        for i in 0..n {
            let (off, line) = lines.next_line()?;
            let mut f = Fields::new(line, off, "step")?;
            if f.count()? != i + 1 {
                return Err(Error::Parse { offset: off, msg: format!("expected step {}", i + 1) });
            }
            let a = f.complex()?;
            let m = f.count()? as u32;
            let b = f.opt_complex()?;
            let l = f.opt_count()?;
            let b = match (b, l) {
                (Some(b), Some(l)) => Some((b, l as u32)),
                (None, None) => None,
                _ => return Err(Error::Parse { offset: off, msg: "second factor half present".into() }),
            };
            let coefficient = f.opt_complex()?;
            let residual_energy = f.real()?;
            let r = f.opt_real()?;
            let big_r = f.opt_real()?;
            f.done()?;
            rec.steps.push(StepEntry { a, m, b, coefficient, residual_energy, r, big_r });
        }
        loop {
            let (off, line) = lines.next_line()?;
            if line == "end" {
                break;
            }
            let mut f = Fields::new(line, off, "block")?;
            let step = f.count()?;
            let k = f.count()?;
            let l = f.count()?;
            let value = f.complex()?;
            f.done()?;
            rec.blocks.push(BlockEntry { step, k, l, value });
        }
        if lines.pos < text.len() {
            return Err(Error::Parse { offset: lines.pos, msg: "content after end".into() });
        }
        Ok(rec)
    }

    pub fn from_afd(record: &AFDRecord) -> Self {
        RecordFile {
            meta: Vec::new(),
            initial_energy: record.initial_energy,
            steps: record
                .atoms
                .iter()
                .map(|a| StepEntry {
                    a: a.param,
                    m: a.multiplicity,
                    b: None,
                    coefficient: Some(a.coefficient),
                    residual_energy: a.residual_energy,
                    r: None,
                    big_r: None,
                })
                .collect(),
            blocks: Vec::new(),
        }
    }

    pub fn from_product_tm(record: &ProductTmRecord) -> Self {
        let mut blocks = Vec::new();
        let mut steps = Vec::new();
        for (i, s) in record.steps.iter().enumerate() {
            steps.push(StepEntry {
                a: s.a,
                m: 1,
                b: Some((s.b, 1)),
                coefficient: None,
                residual_energy: s.residual_energy,
                r: None,
                big_r: None,
            });
            blocks.extend(s.block.iter().map(|&(k, l, value)| BlockEntry { step: i + 1, k, l, value }));
        }
        RecordFile { meta: Vec::new(), initial_energy: record.initial_energy, steps, blocks }
    }

    pub fn from_pga(record: &PGARecord) -> Self {
        RecordFile {
            meta: Vec::new(),
            initial_energy: record.initial_energy,
            steps: record
                .atoms
                .iter()
                .map(|a| StepEntry {
                    a: a.spec.left.a,
                    m: a.spec.left.m,
                    b: Some((a.spec.right.a, a.spec.right.m)),
                    coefficient: Some(a.coefficient),
                    residual_energy: a.residual_energy,
                    r: None,
                    big_r: None,
                })
                .collect(),
            blocks: Vec::new(),
        }
    }

    pub fn from_poga<P, O>(record: &PogaRecord<P, O>) -> Self {
        RecordFile {
            meta: Vec::new(),
            initial_energy: record.initial_energy,
            steps: record
                .steps
                .iter()
                .map(|s| StepEntry {
                    a: s.label.a,
                    m: s.label.m,
                    b: s.label.b,
                    coefficient: Some(s.coefficient),
                    residual_energy: s.residual_energy,
                    r: Some(s.r),
                    big_r: Some(s.big_r),
                })
                .collect(),
            blocks: Vec::new(),
        }
    }
}

pub fn save_record(record: &RecordFile, path: &Path) -> Result<()> {
    fs::write(path, record.to_text())?;
    Ok(())
}

pub fn load_record(path: &Path) -> Result<RecordFile> {
    let bytes = read_file(path)?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| Error::Parse { offset: e.valid_up_to(), msg: "invalid UTF-8".into() })?;
    RecordFile::parse(text)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn cnum(z: C64) -> String {
    format!("{} {}", num(z.re), num(z.im))
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "-".into())
}

struct Lines<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Lines<'a> {
    /// Next complete line and its byte offset. A line without its newline
    /// means the file was cut short.
    fn next_line(&mut self) -> Result<(usize, &'a str)> {
        let rest = &self.text[self.pos..];
        match rest.find('\n') {
            Some(i) => {
                let off = self.pos;
                self.pos += i + 1;
                Ok((off, &rest[..i]))
            }
            None => Err(Error::Parse { offset: self.text.len(), msg: "unexpected end of file".into() }),
        }
    }
}

struct Fields<'a> {
    it: std::str::SplitWhitespace<'a>,
    offset: usize,
}

impl<'a> Fields<'a> {
    fn new(line: &'a str, offset: usize, tag: &str) -> Result<Self> {
        let mut it = line.split_whitespace();
        if it.next() != Some(tag) {
            return Err(Error::Parse { offset, msg: format!("expected {tag} line") });
        }
        Ok(Fields { it, offset })
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse { offset: self.offset, msg: msg.to_string() }
    }

    fn token(&mut self) -> Result<&'a str> {
        self.it.next().ok_or_else(|| self.err("missing field"))
    }

    fn real(&mut self) -> Result<f64> {
        let t = self.token()?;
        t.parse().map_err(|_| self.err(&format!("bad number {t:?}")))
    }

    fn opt_real(&mut self) -> Result<Option<f64>> {
        let t = self.token()?;
        if t == "-" {
            return Ok(None);
        }
        t.parse().map(Some).map_err(|_| self.err(&format!("bad number {t:?}")))
    }

    fn count(&mut self) -> Result<usize> {
        let t = self.token()?;
        t.parse().map_err(|_| self.err(&format!("bad integer {t:?}")))
    }

    fn opt_count(&mut self) -> Result<Option<usize>> {
        let t = self.token()?;
        if t == "-" {
            return Ok(None);
        }
        t.parse().map(Some).map_err(|_| self.err(&format!("bad integer {t:?}")))
    }

    fn complex(&mut self) -> Result<C64> {
        Ok(C64::new(self.real()?, self.real()?))
    }

    fn opt_complex(&mut self) -> Result<Option<C64>> {
        match (self.opt_real()?, self.opt_real()?) {
            (Some(re), Some(im)) => Ok(Some(C64::new(re, im))),
            (None, None) => Ok(None),
            _ => Err(self.err("half of a complex pair missing")),
        }
    }

    fn done(mut self) -> Result<()> {
        match self.it.next() {
            None => Ok(()),
            Some(t) => Err(self.err(&format!("unexpected field {t:?}"))),
        }
    }
}
