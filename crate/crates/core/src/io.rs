//! Line-oriented file grammars, a content-addressed pocset cache and run
//! configuration.
//!
//! ```text
//! pair a na          le a b              # pocset
//! gen r : a -> b, na -> nb               # action; unmapped halfspaces are fixed
//! map a -> x                             # map; complements follow
//! rel a b                                # relation; closed before checking
//! ```

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::action::{validate_action, ActionError, GroupAction, Permutation};
use crate::complex::{ComplexError, DEFAULT_VERTEX_CAP};
use crate::fold::FoldError;
use crate::maps::{MapError, PocsetMap};
use crate::pocset::{validate_pocset, HalfspaceId, Pocset, PocsetError, RawLe, RawPair, RawPocset};
use crate::quotient::{EquivalenceRelation, QuotientError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_LEMMA: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

pub const VERTEX_CAP_ENV: &str = "CUBEFOLD_VERTEX_CAP";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("{path}: {message}")]
    Read { path: String, message: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Pocset(#[from] PocsetError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Fold(#[from] FoldError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl IoError {
    pub fn exit_code(&self) -> i32 {
        match self {
            IoError::Fold(e) => e.exit_code(),
            IoError::Complex(ComplexError::TooLarge(_)) | IoError::Map(MapError::Complex(ComplexError::TooLarge(_))) => {
                EXIT_RESOURCE
            }
            IoError::Action(ActionError::GroupTooLarge(_)) => EXIT_RESOURCE,
            IoError::Quotient(QuotientError::LemmaViolation(_)) | IoError::Map(MapError::LemmaViolation(_)) => EXIT_LEMMA,
            _ => EXIT_INVALID,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token<'a> {
    Word(&'a str),
    Colon,
    Comma,
    Arrow,
}

/// Splits one line into tokens with 1-based columns, dropping comments.
fn tokenize(line: &str, line_no: usize) -> Result<Vec<(Token<'_>, usize)>, ParseError> {
    let line = line.split('#').next().unwrap_or("");
    let bytes = line.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let col = i + 1;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Token::Word(&line[start..i]), col));
        } else if c == b':' {
            out.push((Token::Colon, col));
            i += 1;
        } else if c == b',' {
            out.push((Token::Comma, col));
            i += 1;
        } else if c == b'-' && bytes.get(i + 1) == Some(&b'>') {
            out.push((Token::Arrow, col));
            i += 2;
        } else {
            let ch = line[i..].chars().next().unwrap_or('?');
            return Err(ParseError {
                line: line_no,
                column: col,
                message: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    tokens: Vec<(Token<'a>, usize)>,
    pos: usize,
    line: usize,
    end: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Result<Self, ParseError> {
        Ok(Cursor {
            tokens: tokenize(text, line)?,
            pos: 0,
            line,
            end: text.split('#').next().unwrap_or("").trim_end().len() + 1,
        })
    }

    fn error(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    fn word(&mut self, what: &str) -> Result<(&'a str, usize), ParseError> {
        match self.tokens.get(self.pos) {
            Some(&(Token::Word(w), col)) => {
                self.pos += 1;
                Ok((w, col))
            }
            _ => Err(self.error(self.column(), format!("expected {what}"))),
        }
    }

    fn expect(&mut self, tok: Token<'static>, what: &str) -> Result<(), ParseError> {
        match self.tokens.get(self.pos) {
            Some((t, _)) if *t == tok => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(self.column(), format!("expected {what}"))),
        }
    }

    fn eat(&mut self, tok: Token<'static>) -> bool {
        if matches!(self.tokens.get(self.pos), Some((t, _)) if *t == tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.tokens.len() {
            Err(self.error(self.column(), "unexpected trailing input"))
        } else {
            Ok(())
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let col = self.column();
        match self.word("a keyword")? {
            (w, _) if w == kw => Ok(()),
            (w, _) => Err(self.error(col, format!("expected `{kw}`, found `{w}`"))),
        }
    }
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l))
}

fn lookup(p: &Pocset, name: &str, line: usize, column: usize) -> Result<HalfspaceId, ParseError> {
    p.halfspace(name).ok_or_else(|| ParseError {
        line,
        column,
        message: format!("unknown halfspace `{name}`"),
    })
}

/// Parses the pocset grammar without validating it. Line numbers are kept
/// so validation errors point back into the file.
pub fn parse_pocset_raw(text: &str) -> Result<RawPocset, ParseError> {
    let mut raw = RawPocset::new();
    for (n, line) in lines(text) {
        let mut c = Cursor::new(line, n)?;
        if c.is_empty() {
            continue;
        }
        let col = c.column();
        let (kw, _) = c.word("`pair` or `le`")?;
        let (a, _) = c.word("a halfspace name")?;
        let (b, _) = c.word("a halfspace name")?;
        c.finish()?;
        match kw {
            "pair" => raw.pairs.push(RawPair {
                a: a.into(),
                b: b.into(),
                line: Some(n),
            }),
            "le" => raw.order.push(RawLe {
                lo: a.into(),
                hi: b.into(),
                line: Some(n),
            }),
            other => return Err(c.error(col, format!("expected `pair` or `le`, found `{other}`"))),
        }
    }
    Ok(raw)
}

pub fn parse_pocset(text: &str) -> Result<Pocset, IoError> {
    Ok(validate_pocset(&parse_pocset_raw(text)?)?)
}

/// Parses generators over a validated pocset and validates the action.
pub fn parse_action(text: &str, pocset: Arc<Pocset>) -> Result<GroupAction, IoError> {
    let n = pocset.num_halfspaces();
    let mut gens: Vec<(String, Permutation)> = Vec::new();
    for (ln, line) in lines(text) {
        let mut c = Cursor::new(line, ln)?;
        if c.is_empty() {
            continue;
        }
        c.keyword("gen")?;
        let (name, name_col) = c.word("a generator name")?;
        if gens.iter().any(|(g, _)| g == name) {
            return Err(c.error(name_col, format!("generator `{name}` declared twice")).into());
        }
        c.expect(Token::Colon, "`:`")?;
        let mut images: Vec<Option<usize>> = vec![None; n];
        loop {
            let (src, sc) = c.word("a halfspace name")?;
            c.expect(Token::Arrow, "`->`")?;
            let (dst, dc) = c.word("a halfspace name")?;
            let s = lookup(&pocset, src, ln, sc)?;
            let d = lookup(&pocset, dst, ln, dc)?;
            match images[s.0] {
                Some(prev) if prev != d.0 => {
                    return Err(c.error(sc, format!("`{src}` mapped twice")).into());
                }
                _ => images[s.0] = Some(d.0),
            }
            if !c.eat(Token::Comma) {
                break;
            }
        }
        c.finish()?;
        let images: Vec<usize> = images.iter().enumerate().map(|(i, x)| x.unwrap_or(i)).collect();
        let perm = Permutation::from_images(images).ok_or_else(|| ActionError::NotBijection {
            generator: name.to_owned(),
        })?;
        gens.push((name.to_owned(), perm));
    }
    Ok(validate_action(pocset, gens)?)
}

/// Parses `map a -> x` lines; complements of listed halfspaces follow.
pub fn parse_map(text: &str, domain: Arc<Pocset>, codomain: Arc<Pocset>) -> Result<PocsetMap, IoError> {
    let mut entries = Vec::new();
    for (ln, line) in lines(text) {
        let mut c = Cursor::new(line, ln)?;
        if c.is_empty() {
            continue;
        }
        c.keyword("map")?;
        let (src, sc) = c.word("a halfspace name")?;
        c.expect(Token::Arrow, "`->`")?;
        let (dst, dc) = c.word("a halfspace name")?;
        c.finish()?;
        entries.push((lookup(&domain, src, ln, sc)?, lookup(&codomain, dst, ln, dc)?));
    }
    Ok(PocsetMap::from_partial(domain, codomain, &entries)?)
}

/// Parses `rel a b` lines into the relation they generate under
/// complementation and transitivity.
pub fn parse_relation(text: &str, pocset: Arc<Pocset>) -> Result<EquivalenceRelation, IoError> {
    let mut pairs = Vec::new();
    for (ln, line) in lines(text) {
        let mut c = Cursor::new(line, ln)?;
        if c.is_empty() {
            continue;
        }
        c.keyword("rel")?;
        let (a, ac) = c.word("a halfspace name")?;
        let (b, bc) = c.word("a halfspace name")?;
        c.finish()?;
        pairs.push((lookup(&pocset, a, ln, ac)?, lookup(&pocset, b, ln, bc)?));
    }
    Ok(EquivalenceRelation::generated_by(pocset, &pairs))
}

/// Writes an action back in its grammar, listing only moved halfspaces.
pub fn action_to_grammar(action: &GroupAction) -> String {
    let p = action.pocset();
    let mut s = String::new();
    for (name, g) in action.generators() {
        let moved: Vec<String> = p
            .halfspaces()
            .filter(|&h| g.apply(h) != h)
            .map(|h| format!("{} -> {}", p.name(h), p.name(g.apply(h))))
            .collect();
        if moved.is_empty() {
            // a generator needs at least one entry; a fixed point says identity
            let h = p.halfspaces().next().expect("nonempty pocset");
            s.push_str(&format!("gen {name} : {} -> {}\n", p.name(h), p.name(h)));
        } else {
            s.push_str(&format!("gen {name} : {}\n", moved.join(", ")));
        }
    }
    s
}

/// Writes a relation back as one `rel` line per non-representative member.
pub fn relation_to_grammar(rel: &EquivalenceRelation) -> String {
    let p = rel.pocset();
    let mut s = String::new();
    for class in rel.classes() {
        for &h in &class[1..] {
            s.push_str(&format!("rel {} {}\n", p.name(class[0]), p.name(h)));
        }
    }
    s
}

/// JSON list of `[domain vertex, image vertex]` pairs.
pub fn vertex_map_json(f: &[usize]) -> Value {
    json!(f.iter().enumerate().map(|(i, &j)| [i, j]).collect::<Vec<_>>())
}

/// Content-addressed cache: byte-identical pocset files resolve to the
/// same shared object.
#[derive(Debug, Default)]
pub struct Workspace {
    pocsets: HashMap<[u8; 32], Arc<Pocset>>,
}

fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| IoError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pocset(&mut self, text: &str) -> Result<Arc<Pocset>, IoError> {
        let key: [u8; 32] = Sha256::digest(text.as_bytes()).into();
        if let Some(p) = self.pocsets.get(&key) {
            return Ok(p.clone());
        }
        let p = Arc::new(parse_pocset(text)?);
        self.pocsets.insert(key, p.clone());
        Ok(p)
    }

    pub fn cached(&self) -> usize {
        self.pocsets.len()
    }

    pub fn read_pocset(&mut self, path: &Path) -> Result<Arc<Pocset>, IoError> {
        self.pocset(&read(path)?)
    }

    pub fn read_action(&mut self, path: &Path, pocset: Arc<Pocset>) -> Result<GroupAction, IoError> {
        parse_action(&read(path)?, pocset)
    }

    /// A missing action file means the trivial action.
    pub fn read_action_or_trivial(&mut self, path: Option<&PathBuf>, pocset: Arc<Pocset>) -> Result<GroupAction, IoError> {
        match path {
            Some(p) => self.read_action(p, pocset),
            None => Ok(GroupAction::trivial(pocset)),
        }
    }

    pub fn read_map(&mut self, path: &Path, domain: Arc<Pocset>, codomain: Arc<Pocset>) -> Result<PocsetMap, IoError> {
        parse_map(&read(path)?, domain, codomain)
    }

    pub fn read_relation(&mut self, path: &Path, pocset: Arc<Pocset>) -> Result<EquivalenceRelation, IoError> {
        parse_relation(&read(path)?, pocset)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    Dot,
    Json,
    #[default]
    Text,
}

impl FromStr for Format {
    type Err = IoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(Format::Dot),
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(IoError::Config(format!("unknown format `{other}`"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Dot => "dot",
            Format::Json => "json",
            Format::Text => "text",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub vertex_cap: usize,
    pub verify: bool,
    pub seed: u64,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            vertex_cap: DEFAULT_VERTEX_CAP,
            verify: true,
            seed: 0,
            format: Format::Text,
        }
    }
}

impl RunConfig {
    /// Defaults with the vertex cap taken from the environment when set.
    pub fn from_env() -> Result<Self, IoError> {
        let mut cfg = RunConfig::default();
        if let Ok(v) = std::env::var(VERTEX_CAP_ENV) {
            cfg.vertex_cap = v
                .trim()
                .parse()
                .map_err(|_| IoError::Config(format!("{VERTEX_CAP_ENV} is not a count: `{v}`")))?;
        }
        cfg.validate()
    }

    pub fn validate(self) -> Result<Self, IoError> {
        if self.vertex_cap == 0 {
            return Err(IoError::Config("vertex cap must be at least 1".into()));
        }
        Ok(self)
    }

    pub fn fold_config(&self) -> crate::fold::FoldConfig {
        crate::fold::FoldConfig {
            verify: self.verify,
            vertex_cap: self.vertex_cap,
        }
    }
}
