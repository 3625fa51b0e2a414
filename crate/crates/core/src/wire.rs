//! Line protocol for tag reads, allocation pushes and status summaries.
//!
//! Grammar (LF-framed, UTF-8, single spaces, no padding):
//!
//! ```text
//! TAG <tag_id> <node_id> <VIP|STD> <ts_ms>
//! ALLOC <node_id> <hz>          hz always carries exactly three decimals
//! STATUS <p> <q>                integer percentages 0-100
//! <tag_id>                      legacy bare read: node N0, STD, ts 0
//! ```
//!
//! Numeric fields are unsigned decimal digits with no leading zeros. The
//! three verbs are reserved: a bare `TAG` is a truncated line, not a tag id.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::domain::{
    validate_node_id, validate_tag_id, DomainError, PlanDelta, PriorityClass, TagEvent,
};

/// Ceiling on one protocol datagram; larger frames are split by the sender.
pub const MAX_DATAGRAM_BYTES: usize = 512;

/// Largest encodable allocation: 1 THz, i.e. 10^15 millihertz.
pub const MAX_ALLOC_MILLIHERTZ: u64 = 1_000_000_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Which field failed.
    pub field: &'static str,
    /// Byte offset into the line where the failure starts.
    pub offset: usize,
    pub reason: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "offset {}: {}: {}", self.offset, self.field, self.reason)
    }
}

/// An allocation push. The grant is stored in integer millihertz so the wire
/// form (`{}.{:03}`) round-trips without any float formatting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocMsg {
    pub node_id: String,
    pub millihertz: u64,
}

impl AllocMsg {
    /// Quantizes a grant to the nearest millihertz.
    pub fn new(node_id: impl Into<String>, hz: f64) -> Result<Self, DomainError> {
        let node_id = node_id.into();
        validate_node_id(&node_id)?;
        if !(hz >= 0.0 && hz.is_finite()) {
            return Err(DomainError::invalid("bandwidth_hz", "must be finite and non-negative"));
        }
        let mhz = libm::round(hz * 1000.0);
        if mhz > MAX_ALLOC_MILLIHERTZ as f64 {
            return Err(DomainError::invalid("bandwidth_hz", "exceeds 1 THz"));
        }
        Ok(AllocMsg { node_id, millihertz: mhz as u64 })
    }

    pub fn hz(&self) -> f64 {
        self.millihertz as f64 / 1000.0
    }
}

/// Plan summary percentages, both 0-100.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StatusMsg {
    pub bandwidth_optimized_pct: u8,
    pub load_reduced_pct: u8,
}

impl StatusMsg {
    /// Derives the readout from a tick's plan delta: pool usage on one side,
    /// relative reduction of mean overload excess on the other (zero when
    /// nothing was overloaded).
    pub fn from_delta(d: &PlanDelta) -> Self {
        let p = if d.b_avail_hz > 0.0 {
            pct_round_half_up(100.0 * d.sum_final_hz / d.b_avail_hz)
        } else {
            0
        };
        let q = if d.mean_excess_before > 0.0 {
            pct_round_half_up(
                100.0 * (d.mean_excess_before - d.mean_excess_after) / d.mean_excess_before,
            )
        } else {
            0
        };
        StatusMsg { bandwidth_optimized_pct: p, load_reduced_pct: q }
    }

    /// Human-facing summary, one metric per line.
    pub fn display_lines(&self) -> [String; 2] {
        [
            format!("Bandwidth Optimized: {}%", self.bandwidth_optimized_pct),
            format!("Load Reduced: {}%", self.load_reduced_pct),
        ]
    }
}

fn pct_round_half_up(x: f64) -> u8 {
    let rounded = libm::floor(x + 0.5);
    if rounded < 0.0 {
        0
    } else if rounded > 100.0 {
        100
    } else {
        rounded as u8
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Message {
    Tag(TagEvent),
    Alloc(AllocMsg),
    Status(StatusMsg),
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Message::Tag(t) => write!(
                f,
                "TAG {} {} {} {}",
                t.tag_id,
                t.node_id,
                t.class.as_str(),
                t.timestamp_ms
            ),
            Message::Alloc(a) => {
                write!(f, "ALLOC {} {}.{:03}", a.node_id, a.millihertz / 1000, a.millihertz % 1000)
            }
            Message::Status(s) => {
                write!(f, "STATUS {} {}", s.bandwidth_optimized_pct, s.load_reduced_pct)
            }
        }
    }
}

struct Tok<'a> {
    s: &'a str,
    off: usize,
}

/// Splits on single spaces, keeping byte offsets. Doubled, leading or
/// trailing spaces surface as empty fields.
fn tokenize(line: &str) -> Result<Vec<Tok<'_>>, ParseError> {
    let bytes = line.as_bytes();
    let mut toks = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i <= bytes.len() {
        if i == bytes.len() || bytes[i] == b' ' {
            if start == i {
                return Err(ParseError {
                    field: "line",
                    offset: i,
                    reason: String::from("empty field (check spacing)"),
                });
            }
            toks.push(Tok { s: &line[start..i], off: start });
            start = i + 1;
        }
        i += 1;
    }
    Ok(toks)
}

fn expect_fields(toks: &[Tok], n: usize, line_len: usize) -> Result<(), ParseError> {
    if toks.len() < n {
        return Err(ParseError {
            field: "line",
            offset: line_len,
            reason: format!("expected {n} fields, got {}", toks.len()),
        });
    }
    if toks.len() > n {
        return Err(ParseError {
            field: "line",
            offset: toks[n].off,
            reason: String::from("unexpected trailing field"),
        });
    }
    Ok(())
}

fn check_id(
    field: &'static str,
    tok: &Tok<'_>,
    validate: fn(&str) -> Result<(), DomainError>,
) -> Result<(), ParseError> {
    validate(tok.s).map_err(|e| {
        let reason = match e {
            DomainError::Invalid { reason, .. } => reason,
            other => format!("{other}"),
        };
        ParseError { field, offset: tok.off, reason }
    })
}

fn parse_u64_strict(field: &'static str, tok: &Tok<'_>) -> Result<u64, ParseError> {
    let err = |reason: &str| ParseError { field, offset: tok.off, reason: String::from(reason) };
    if tok.s.is_empty() || !tok.s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err("unsigned decimal digits only"));
    }
    if tok.s.len() > 1 && tok.s.starts_with('0') {
        return Err(err("leading zeros not allowed"));
    }
    tok.s.parse::<u64>().map_err(|_| err("out of range"))
}

fn parse_pct(field: &'static str, tok: &Tok<'_>) -> Result<u8, ParseError> {
    let v = parse_u64_strict(field, tok)?;
    if v > 100 {
        return Err(ParseError {
            field,
            offset: tok.off,
            reason: String::from("percentage above 100"),
        });
    }
    Ok(v as u8)
}

fn parse_millihertz(tok: &Tok<'_>) -> Result<u64, ParseError> {
    let field = "bandwidth_hz";
    let err = |reason: &str| ParseError { field, offset: tok.off, reason: String::from(reason) };
    let Some((int, frac)) = tok.s.split_once('.') else {
        return Err(err("expected <digits>.<three digits>"));
    };
    if int.is_empty()
        || frac.len() != 3
        || !int.bytes().all(|b| b.is_ascii_digit())
        || !frac.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(err("expected <digits>.<three digits>"));
    }
    if int.len() > 1 && int.starts_with('0') {
        return Err(err("leading zeros not allowed"));
    }
    let whole: u64 = int.parse().map_err(|_| err("out of range"))?;
    let milli: u64 = frac.parse().expect("three digits fit u64");
    let mhz = whole
        .checked_mul(1000)
        .and_then(|w| w.checked_add(milli))
        .ok_or_else(|| err("out of range"))?;
    if mhz > MAX_ALLOC_MILLIHERTZ {
        return Err(err("exceeds 1 THz"));
    }
    Ok(mhz)
}

fn parse_class(tok: &Tok<'_>) -> Result<PriorityClass, ParseError> {
    match tok.s {
        "VIP" => Ok(PriorityClass::Vip),
        "STD" => Ok(PriorityClass::Std),
        _ => Err(ParseError {
            field: "class",
            offset: tok.off,
            reason: String::from("expected VIP or STD"),
        }),
    }
}

/// Parses one line (no trailing newline). Total: every input maps to a
/// message or a positioned error.
pub fn parse_line(line: &str) -> Result<Message, ParseError> {
    let toks = tokenize(line)?;
    match toks[0].s {
        "TAG" => {
            expect_fields(&toks, 5, line.len())?;
            check_id("tag_id", &toks[1], validate_tag_id)?;
            check_id("node_id", &toks[2], validate_node_id)?;
            let class = parse_class(&toks[3])?;
            let ts = parse_u64_strict("ts_ms", &toks[4])?;
            Ok(Message::Tag(TagEvent {
                tag_id: String::from(toks[1].s),
                node_id: String::from(toks[2].s),
                class,
                timestamp_ms: ts,
            }))
        }
        "ALLOC" => {
            expect_fields(&toks, 3, line.len())?;
            check_id("node_id", &toks[1], validate_node_id)?;
            let mhz = parse_millihertz(&toks[2])?;
            Ok(Message::Alloc(AllocMsg { node_id: String::from(toks[1].s), millihertz: mhz }))
        }
        "STATUS" => {
            expect_fields(&toks, 3, line.len())?;
            let p = parse_pct("bandwidth_optimized_pct", &toks[1])?;
            let q = parse_pct("load_reduced_pct", &toks[2])?;
            Ok(Message::Status(StatusMsg { bandwidth_optimized_pct: p, load_reduced_pct: q }))
        }
        _ if toks.len() == 1 => {
            // Legacy reader firmware emits the bare tag id.
            check_id("tag_id", &toks[0], validate_tag_id)?;
            Ok(Message::Tag(TagEvent {
                tag_id: String::from(toks[0].s),
                node_id: String::from("N0"),
                class: PriorityClass::Std,
                timestamp_ms: 0,
            }))
        }
        _ => Err(ParseError {
            field: "verb",
            offset: toks[0].off,
            reason: format!("unknown verb {:?}", toks[0].s),
        }),
    }
}

/// Parses a raw frame: UTF-8-checks, strips at most one trailing LF, then
/// delegates to [`parse_line`].
pub fn parse_bytes(bytes: &[u8]) -> Result<Message, ParseError> {
    let text = core::str::from_utf8(bytes).map_err(|e| ParseError {
        field: "line",
        offset: e.valid_up_to(),
        reason: String::from("invalid UTF-8"),
    })?;
    parse_line(text.strip_suffix('\n').unwrap_or(text))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeedError {
    pub line_no: u64,
    pub error: ParseError,
}

impl fmt::Display for FeedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line_no, self.error)
    }
}

/// Streaming validator for tag feeds: only tag reads are allowed and
/// timestamps must never decrease. Blank lines are skipped.
#[derive(Debug, Default)]
pub struct FeedParser {
    line_no: u64,
    last_ts_ms: u64,
}

impl FeedParser {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_line(&mut self, line: &str) -> Result<Option<TagEvent>, FeedError> {
        self.line_no += 1;
        let line_no = self.line_no;
        if line.is_empty() {
            return Ok(None);
        }
        let msg = parse_line(line).map_err(|error| FeedError { line_no, error })?;
        match msg {
            Message::Tag(ev) => {
                if ev.timestamp_ms < self.last_ts_ms {
                    return Err(FeedError {
                        line_no,
                        error: ParseError {
                            field: "ts_ms",
                            offset: 0,
                            reason: format!(
                                "timestamp {} precedes {}",
                                ev.timestamp_ms, self.last_ts_ms
                            ),
                        },
                    });
                }
                self.last_ts_ms = ev.timestamp_ms;
                Ok(Some(ev))
            }
            _ => Err(FeedError {
                line_no,
                error: ParseError {
                    field: "verb",
                    offset: 0,
                    reason: String::from("feeds carry tag reads only"),
                },
            }),
        }
    }
}
