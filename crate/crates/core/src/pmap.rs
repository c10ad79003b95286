//! PMAP: a line-oriented text format for phase operators.
//!
//! ```text
//! # comment
//! pmap lambda1
//! dim 2
//! entry 0 1 0+0i 1+0i 1+0i
//! end
//! ```
//!
//! `entry i j a b c` sets `W_ij = a·e^{iφ} + b·e^{−iφ} + c`; omitted entries are
//! zero. Complex literals are `<re>[+|-]<im>i` with decimal or `p/q` parts.
//! A triple is stored as the blocks `lambda12`, `lambda1` and `lambda2`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::operator::{OperatorError, PhaseOperator, UncorrelatedTriple};
use crate::trigpoly::{Complex, FirstOrderPoly};

pub const JOINT_BLOCK: &str = "lambda12";
pub const OUT1_BLOCK: &str = "lambda1";
pub const OUT2_BLOCK: &str = "lambda2";

/// Largest integer magnitude accepted in a `p/q` literal.
const MAX_EXACT: u64 = 1 << 53;
/// Denominators up to this power of two are written as fractions.
const MAX_DYADIC_DEN: u32 = 1024;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PmapError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("block `{block}` has dimension {got}, expected {expected}")]
    DimensionMismatch {
        block: String,
        expected: usize,
        got: usize,
    },
    #[error("line {line}: entry ({i}, {j}) given twice")]
    DuplicateEntry { line: usize, i: usize, j: usize },
    #[error("missing block `{0}`")]
    MissingBlock(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

fn parse_err(line: usize, message: impl Into<String>) -> PmapError {
    PmapError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub name: String,
    pub operator: PhaseOperator,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PmapDocument {
    pub blocks: Vec<Block>,
}

impl PmapDocument {
    pub fn from_operator(name: &str, op: &PhaseOperator) -> Self {
        Self {
            blocks: vec![Block {
                name: name.to_string(),
                operator: op.clone(),
            }],
        }
    }

    pub fn from_triple(t: &UncorrelatedTriple) -> Self {
        let block = |name: &str, op: &PhaseOperator| Block {
            name: name.to_string(),
            operator: op.clone(),
        };
        Self {
            blocks: vec![
                block(JOINT_BLOCK, t.joint().as_operator()),
                block(OUT1_BLOCK, t.out1()),
                block(OUT2_BLOCK, t.out2()),
            ],
        }
    }

    pub fn block(&self, name: &str) -> Option<&PhaseOperator> {
        self.blocks
            .iter()
            .find(|b| b.name == name)
            .map(|b| &b.operator)
    }

    pub fn is_triple(&self) -> bool {
        [JOINT_BLOCK, OUT1_BLOCK, OUT2_BLOCK]
            .iter()
            .all(|n| self.block(n).is_some())
    }

    pub fn to_triple(&self) -> Result<UncorrelatedTriple, PmapError> {
        let get = |n: &str| {
            self.block(n)
                .ok_or_else(|| PmapError::MissingBlock(n.to_string()))
        };
        let (joint, out1, out2) = (get(JOINT_BLOCK)?, get(OUT1_BLOCK)?, get(OUT2_BLOCK)?);
        let expected = out1.dim() * out2.dim();
        if joint.dim() != expected {
            return Err(PmapError::DimensionMismatch {
                block: JOINT_BLOCK.to_string(),
                expected,
                got: joint.dim(),
            });
        }
        Ok(UncorrelatedTriple::from_operators(
            joint.clone(),
            out1.clone(),
            out2.clone(),
        )?)
    }

    pub fn serialize(&self) -> String {
        let mut s = String::new();
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                s.push('\n');
            }
            let _ = writeln!(s, "pmap {}", b.name);
            let _ = writeln!(s, "dim {}", b.operator.dim());
            for (i, j, w) in b.operator.iter_indexed() {
                if w.coefficients().iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                    continue;
                }
                let _ = writeln!(
                    s,
                    "entry {i} {j} {} {} {}",
                    format_complex(w.a()),
                    format_complex(w.b()),
                    format_complex(w.c())
                );
            }
            s.push_str("end\n");
        }
        s
    }
}

pub fn serialize_triple(t: &UncorrelatedTriple) -> String {
    PmapDocument::from_triple(t).serialize()
}

fn format_real(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    let mut den = 1u32;
    while den <= MAX_DYADIC_DEN {
        let n = v * den as f64;
        if n.fract() == 0.0 && n.abs() <= MAX_EXACT as f64 {
            return if den == 1 {
                format!("{}", n as i64)
            } else {
                format!("{}/{}", n as i64, den)
            };
        }
        den *= 2;
    }
    let a = v.abs();
    if !(1e-4..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn format_complex(z: Complex) -> String {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    let (sign, mag) = if im < 0.0 { ('-', -im) } else { ('+', im) };
    format!("{}{}{}i", format_real(z.re), sign, format_real(mag))
}

fn parse_integer(s: &str) -> Option<i64> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let v: i64 = s.parse().ok()?;
    (v.unsigned_abs() <= MAX_EXACT).then_some(v)
}

/// Decimal or `p/q` literal.
pub fn parse_real(s: &str) -> Option<f64> {
    if let Some((p, q)) = s.split_once('/') {
        let (p, q) = (parse_integer(p)?, parse_integer(q)?);
        if q == 0 {
            return None;
        }
        return Some(p as f64 / q as f64);
    }
    let ok = !s.is_empty()
        && s.bytes().any(|b| b.is_ascii_digit())
        && s.bytes()
            .all(|b| b.is_ascii_digit() || b"+-.eE".contains(&b));
    if !ok {
        return None;
    }
    s.parse().ok().filter(|v: &f64| v.is_finite())
}

/// `<re>[+|-]<im>i`.
pub fn parse_complex(s: &str) -> Option<Complex> {
    let body = s.strip_suffix('i')?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))?;
    let re = parse_real(&body[..split])?;
    let im = parse_real(&body[split..])?;
    Some(Complex::new(re, im))
}

struct OpenBlock {
    name: String,
    start: usize,
    dim: Option<usize>,
    entries: Vec<Option<FirstOrderPoly>>,
}

fn parse_index(tok: &str, dim: usize, line: usize) -> Result<usize, PmapError> {
    let i: usize = tok
        .parse()
        .map_err(|_| parse_err(line, format!("expected an index, found `{tok}`")))?;
    if i >= dim {
        return Err(parse_err(
            line,
            format!("index {i} out of range for dim {dim}"),
        ));
    }
    Ok(i)
}

pub fn parse_pmap(text: &str) -> Result<PmapDocument, PmapError> {
    let mut doc = PmapDocument::default();
    let mut open: Option<OpenBlock> = None;

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match (toks[0], open.as_mut()) {
            ("pmap", None) => {
                let [_, name] = toks[..] else {
                    return Err(parse_err(line, "expected `pmap <name>`"));
                };
                if doc.block(name).is_some() {
                    return Err(parse_err(line, format!("block `{name}` defined twice")));
                }
                open = Some(OpenBlock {
                    name: name.to_string(),
                    start: line,
                    dim: None,
                    entries: Vec::new(),
                });
            }
            ("pmap", Some(_)) => return Err(parse_err(line, "expected `end` before a new block")),
            (_, None) => {
                return Err(parse_err(
                    line,
                    format!("expected `pmap <name>`, found `{}`", toks[0]),
                ))
            }
            ("dim", Some(b)) => {
                if b.dim.is_some() {
                    return Err(parse_err(line, "`dim` given twice"));
                }
                let d = match toks[..] {
                    [_, d] => d.parse::<usize>().ok().filter(|&d| d > 0),
                    _ => None,
                }
                .ok_or_else(|| parse_err(line, "expected `dim <d>` with d ≥ 1"))?;
                b.dim = Some(d);
                b.entries = vec![None; d * d];
            }
            ("entry", Some(b)) => {
                let d = b
                    .dim
                    .ok_or_else(|| parse_err(line, "expected `dim` before entries"))?;
                let [_, ti, tj, ta, tb, tc] = toks[..] else {
                    return Err(parse_err(line, "expected `entry <i> <j> <a> <b> <c>`"));
                };
                let (i, j) = (parse_index(ti, d, line)?, parse_index(tj, d, line)?);
                let mut coef = [Complex::new(0.0, 0.0); 3];
                for (slot, tok) in coef.iter_mut().zip([ta, tb, tc]) {
                    *slot = parse_complex(tok).ok_or_else(|| {
                        parse_err(line, format!("expected a complex literal, found `{tok}`"))
                    })?;
                }
                let cell = &mut b.entries[i * d + j];
                if cell.is_some() {
                    return Err(PmapError::DuplicateEntry { line, i, j });
                }
                *cell = Some(FirstOrderPoly::new(coef[0], coef[1], coef[2]));
            }
            ("end", Some(b)) => {
                if toks.len() != 1 {
                    return Err(parse_err(line, "unexpected tokens after `end`"));
                }
                let d = b.dim.ok_or_else(|| parse_err(line, "block has no `dim`"))?;
                let entries = b.entries.iter().map(|e| e.unwrap_or_default()).collect();
                doc.blocks.push(Block {
                    name: b.name.clone(),
                    operator: PhaseOperator::from_entries(d, entries)?,
                });
                open = None;
            }
            (tok, Some(_)) => {
                return Err(parse_err(
                    line,
                    format!("expected `dim`, `entry` or `end`, found `{tok}`"),
                ));
            }
        }
    }
    if let Some(b) = open {
        return Err(parse_err(
            b.start,
            format!("block `{}` is not closed with `end`", b.name),
        ));
    }
    Ok(doc)
}
