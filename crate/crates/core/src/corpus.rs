//! Data model and reader/writer for chunk-annotated sentences.
//!
//! A corpus line is a `#`-separated list of chunks, optionally closed by the
//! sentence mark `။`:
//!
//! ```text
//! NC@PSubj[မမ/n.person]#PPC@SubjP[သည်/ppm.subj]#VC@Active[သွား/v.common]#SFC@Null[သည်/sf]။
//! ```
//!
//! Each chunk is `TYPE@TAG[surface/pos.category, ...]`; `@TAG` is absent in
//! untagged text and `.category` is absent for bare parts of speech such as
//! `sf`. Whitespace around delimiters is ignored. Input is NFC-normalized on
//! read, so byte offsets in parse errors refer to the normalized line.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use unicode_normalization::{is_nfc, UnicodeNormalization};

/// Sentence-final mark closing a terminated line.
pub const SENTENCE_MARK: char = '။';

/// Characters that cannot appear in a token surface.
pub const RESERVED_SURFACE_CHARS: [char; 6] = ['/', ',', '[', ']', '#', '@'];

/// NFC-normalizes `text`, borrowing when it is already normalized.
pub fn normalize(text: &str) -> Cow<'_, str> {
    if is_nfc(text) {
        Cow::Borrowed(text)
    } else {
        Cow::Owned(text.nfc().collect())
    }
}

macro_rules! function_tags {
    ($($name:ident),+ $(,)?) => {
        /// Function tag inventory. Declaration order is the canonical
        /// tie-break order used by the decoders; `Null` sorts last and is
        /// never a decoding candidate.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum FunctionTag { $($name),+ }

        impl FunctionTag {
            /// Every tag, including `Null`, in canonical order.
            pub const ALL: [FunctionTag; 40] = [$(FunctionTag::$name),+];

            /// Name as written in corpus and grammar files.
            pub fn name(self) -> &'static str {
                match self { $(FunctionTag::$name => stringify!($name)),+ }
            }

            /// Inverse of [`FunctionTag::name`].
            pub fn from_name(name: &str) -> Option<FunctionTag> {
                match name {
                    $(stringify!($name) => Some(FunctionTag::$name),)+
                    _ => None,
                }
            }
        }
    };
}

function_tags!(
    Active, Subj, PSubj, SubjP, Obj, PObj, ObjP, PIobj, IobjP, Pla, PPla, PlaP,
    Tim, PTim, TimP, PExt, ExtP, PSim, SimP, PCom, ComP, POwn, OwnP, Ada,
    PcomplS, PcomplP, PPcomplO, PcomplOP, PUse, UseP, PCau, CauP, PAim, AimP,
    CCS, CCM, CCC, CCP, CCA, Null,
);

impl FunctionTag {
    /// Number of decodable (non-`Null`) tags.
    pub const CANDIDATE_COUNT: usize = Self::ALL.len() - 1;

    /// The decodable tags, in canonical order.
    pub fn candidates() -> impl Iterator<Item = FunctionTag> {
        Self::ALL.into_iter().filter(|t| !t.is_null())
    }

    pub fn is_null(self) -> bool {
        self == FunctionTag::Null
    }
}

impl fmt::Display for FunctionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Error for a tag name outside the closed set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownTag(pub String);

impl fmt::Display for UnknownTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown function tag `{}`", self.0)
    }
}

impl std::error::Error for UnknownTag {}

impl FromStr for FunctionTag {
    type Err = UnknownTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_name(s).ok_or_else(|| UnknownTag(s.to_string()))
    }
}

impl serde::Serialize for FunctionTag {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> serde::Deserialize<'de> for FunctionTag {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        FunctionTag::from_name(&name)
            .ok_or_else(|| serde::de::Error::custom(UnknownTag(name).to_string()))
    }
}

macro_rules! chunk_types {
    ($($name:ident),+ $(,)?) => {
        /// The closed set of chunk types.
        #[allow(clippy::upper_case_acronyms)]
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum ChunkType { $($name),+ }

        impl ChunkType {
            pub const ALL: [ChunkType; 7] = [$(ChunkType::$name),+];

            pub fn name(self) -> &'static str {
                match self { $(ChunkType::$name => stringify!($name)),+ }
            }

            pub fn from_name(name: &str) -> Option<ChunkType> {
                match name {
                    $(stringify!($name) => Some(ChunkType::$name),)+
                    _ => None,
                }
            }
        }
    };
}

chunk_types!(NC, PPC, AC, RC, CC, SFC, VC);

impl ChunkType {
    /// Whether `pos` is this chunk type's characteristic part of speech,
    /// used to pick the head token.
    pub fn matches_head_pos(self, pos: &str) -> bool {
        match self {
            ChunkType::NC => pos == "n" || pos == "pron",
            ChunkType::PPC => pos == "ppm",
            ChunkType::AC => pos == "adj",
            ChunkType::RC => pos == "adv",
            ChunkType::CC => pos == "cc",
            ChunkType::SFC => pos == "sf",
            ChunkType::VC => pos == "v",
        }
    }
}

impl fmt::Display for ChunkType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChunkType {
    type Err = UnknownTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_name(s).ok_or_else(|| UnknownTag(s.to_string()))
    }
}

/// A coarse part of speech plus an optional fine category, e.g. `n.person`
/// or bare `sf`. The POS synonym `verb` normalizes to `v` on construction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PosFeature {
    pos: String,
    category: Option<String>,
}

/// Error for a feature that is empty, has empty parts, or contains
/// delimiter/whitespace characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvalidFeature(pub String);

impl fmt::Display for InvalidFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed part-of-speech feature `{}`", self.0)
    }
}

impl std::error::Error for InvalidFeature {}

fn valid_feature_part(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| !c.is_whitespace() && c != '.' && !RESERVED_SURFACE_CHARS.contains(&c))
}

impl PosFeature {
    pub fn new(pos: &str, category: Option<&str>) -> Result<PosFeature, InvalidFeature> {
        let rendered = || match category {
            Some(c) => format!("{pos}.{c}"),
            None => pos.to_string(),
        };
        if !valid_feature_part(pos) || !category.is_none_or(valid_feature_part) {
            return Err(InvalidFeature(rendered()));
        }
        let pos = if pos == "verb" { "v" } else { pos };
        Ok(PosFeature {
            pos: pos.to_string(),
            category: category.map(str::to_string),
        })
    }

    pub fn pos(&self) -> &str {
        &self.pos
    }

    pub fn category(&self) -> Option<&str> {
        self.category.as_deref()
    }
}

impl fmt::Display for PosFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.category {
            Some(category) => write!(f, "{}.{}", self.pos, category),
            None => f.write_str(&self.pos),
        }
    }
}

impl FromStr for PosFeature {
    type Err = InvalidFeature;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('.') {
            Some((pos, category)) => PosFeature::new(pos, Some(category)),
            None => PosFeature::new(s, None),
        }
    }
}

impl serde::Serialize for PosFeature {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for PosFeature {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Error for a surface form that is empty, contains a reserved delimiter or
/// newline, or has leading/trailing whitespace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvalidSurface(pub String);

impl fmt::Display for InvalidSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid token surface `{}`", self.0)
    }
}

impl std::error::Error for InvalidSurface {}

/// One surface word with its feature.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Token {
    surface: String,
    feature: PosFeature,
}

impl Token {
    pub fn new(surface: impl Into<String>, feature: PosFeature) -> Result<Token, InvalidSurface> {
        let surface = surface.into();
        let clean = !surface.is_empty()
            && surface.trim() == surface
            && !surface
                .chars()
                .any(|c| c == '\n' || c == '\r' || RESERVED_SURFACE_CHARS.contains(&c));
        if !clean {
            return Err(InvalidSurface(surface));
        }
        Ok(Token { surface, feature })
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn feature(&self) -> &PosFeature {
        &self.feature
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.surface, self.feature)
    }
}

/// Error building a [`Chunk`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvalidChunk {
    /// Chunks carry at least one token.
    NoTokens,
    /// An SFC chunk may only be gold-tagged `Null`.
    SfcTagNotNull(FunctionTag),
}

impl fmt::Display for InvalidChunk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidChunk::NoTokens => f.write_str("chunk has no tokens"),
            InvalidChunk::SfcTagNotNull(tag) => {
                write!(f, "SFC chunk tagged `{tag}` (only Null is allowed)")
            }
        }
    }
}

impl std::error::Error for InvalidChunk {}

/// A typed group of adjacent tokens: the unit that receives a function tag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chunk {
    chunk_type: ChunkType,
    gold_tag: Option<FunctionTag>,
    tokens: Vec<Token>,
}

impl Chunk {
    pub fn new(
        chunk_type: ChunkType,
        gold_tag: Option<FunctionTag>,
        tokens: Vec<Token>,
    ) -> Result<Chunk, InvalidChunk> {
        if tokens.is_empty() {
            return Err(InvalidChunk::NoTokens);
        }
        if chunk_type == ChunkType::SFC {
            if let Some(tag) = gold_tag {
                if !tag.is_null() {
                    return Err(InvalidChunk::SfcTagNotNull(tag));
                }
            }
        }
        Ok(Chunk {
            chunk_type,
            gold_tag,
            tokens,
        })
    }

    pub fn chunk_type(&self) -> ChunkType {
        self.chunk_type
    }

    pub fn gold_tag(&self) -> Option<FunctionTag> {
        self.gold_tag
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    /// Feature of the chunk's head token: the LAST token whose coarse POS is
    /// characteristic for the chunk type, falling back to the first token
    /// (with a warning) when none matches.
    pub fn head_feature(&self) -> &PosFeature {
        let matching = self
            .tokens
            .iter()
            .rev()
            .find(|t| self.chunk_type.matches_head_pos(t.feature().pos()));
        match matching {
            Some(token) => token.feature(),
            None => {
                let first = &self.tokens[0];
                log::warn!(
                    "no {}-head token in chunk `{}`; falling back to feature `{}`",
                    self.chunk_type,
                    self.surface(),
                    first.feature()
                );
                first.feature()
            }
        }
    }

    /// Concatenated token surfaces.
    pub fn surface(&self) -> String {
        self.tokens.iter().map(Token::surface).collect()
    }
}

/// Error building an [`AnnotatedSentence`]: sentences carry at least one chunk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmptySentence;

impl fmt::Display for EmptySentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("sentence has no chunks")
    }
}

impl std::error::Error for EmptySentence {}

/// One corpus line: a non-empty chunk sequence plus whether the line carries
/// the sentence mark `။`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotatedSentence {
    chunks: Vec<Chunk>,
    terminated: bool,
}

impl AnnotatedSentence {
    pub fn new(chunks: Vec<Chunk>, terminated: bool) -> Result<AnnotatedSentence, EmptySentence> {
        if chunks.is_empty() {
            return Err(EmptySentence);
        }
        Ok(AnnotatedSentence { chunks, terminated })
    }

    pub fn chunks(&self) -> &[Chunk] {
        &self.chunks
    }

    pub fn terminated(&self) -> bool {
        self.terminated
    }

    /// Gold tags of the non-SFC chunks, or None where a chunk is untagged.
    pub fn content_gold_tags(&self) -> Vec<Option<FunctionTag>> {
        self.chunks
            .iter()
            .filter(|c| c.chunk_type() != ChunkType::SFC)
            .map(Chunk::gold_tag)
            .collect()
    }
}

/// What went wrong at one point of a corpus line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LineErrorKind {
    EmptyLine,
    /// Structural damage: missing bracket, missing chunk type, unclosed chunk.
    MalformedBracketing,
    UnknownChunkType(String),
    UnknownFunctionTag(String),
    EmptyTokenList,
    /// A reserved delimiter appeared inside a surface form or feature.
    ReservedCharacter(char),
    /// A token without a `/` separator or with an empty surface.
    MalformedToken,
    MalformedFeature(String),
    /// An SFC chunk gold-tagged with something other than Null.
    InvalidSfcTag(FunctionTag),
    /// Text after the sentence mark.
    TrailingContent,
    /// Null in a context that only takes content tags (tagged-line input).
    NullNotAllowed,
}

impl fmt::Display for LineErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LineErrorKind::EmptyLine => f.write_str("empty line"),
            LineErrorKind::MalformedBracketing => f.write_str("malformed chunk bracketing"),
            LineErrorKind::UnknownChunkType(name) => write!(f, "unknown chunk type `{name}`"),
            LineErrorKind::UnknownFunctionTag(name) => write!(f, "unknown function tag `{name}`"),
            LineErrorKind::EmptyTokenList => f.write_str("empty token list"),
            LineErrorKind::ReservedCharacter(c) => {
                write!(f, "reserved character `{c}` inside a surface form")
            }
            LineErrorKind::MalformedToken => f.write_str("malformed token (expected surface/feature)"),
            LineErrorKind::MalformedFeature(text) => {
                write!(f, "malformed part-of-speech feature `{text}`")
            }
            LineErrorKind::InvalidSfcTag(tag) => {
                write!(f, "SFC chunk tagged `{tag}` (only Null is allowed)")
            }
            LineErrorKind::TrailingContent => f.write_str("trailing content after sentence mark"),
            LineErrorKind::NullNotAllowed => {
                f.write_str("Null is not a valid tag here (content chunks only)")
            }
        }
    }
}

/// A line parse error with the byte offset (into the NFC-normalized line)
/// where it was detected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseLineError {
    pub offset: usize,
    pub kind: LineErrorKind,
}

impl fmt::Display for ParseLineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at byte {}", self.kind, self.offset)
    }
}

impl std::error::Error for ParseLineError {}

fn line_err(offset: usize, kind: LineErrorKind) -> ParseLineError {
    ParseLineError { offset, kind }
}

struct LineParser<'a> {
    line: &'a str,
    pos: usize,
}

impl<'a> LineParser<'a> {
    fn peek(&self) -> Option<char> {
        self.line[self.pos..].chars().next()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += c.len_utf8();
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn at_end(&self) -> bool {
        self.pos == self.line.len()
    }

    /// Consumes a maximal run of name characters (anything that is not
    /// whitespace or a structural delimiter).
    fn take_name(&mut self) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(|c| {
            !c.is_whitespace()
                && c != SENTENCE_MARK
                && !RESERVED_SURFACE_CHARS.contains(&c)
        }) {
            self.bump();
        }
        &self.line[start..self.pos]
    }

    fn expect(&mut self, c: char) -> Result<(), ParseLineError> {
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(line_err(self.pos, LineErrorKind::MalformedBracketing))
        }
    }

    fn chunk(&mut self) -> Result<Chunk, ParseLineError> {
        let type_start = self.pos;
        let type_name = self.take_name();
        if type_name.is_empty() {
            return Err(line_err(self.pos, LineErrorKind::MalformedBracketing));
        }
        let chunk_type = ChunkType::from_name(type_name)
            .ok_or_else(|| line_err(type_start, LineErrorKind::UnknownChunkType(type_name.into())))?;
        self.skip_ws();

        let mut tag_offset = self.pos;
        let gold_tag = if self.peek() == Some('@') {
            self.bump();
            self.skip_ws();
            tag_offset = self.pos;
            let tag_name = self.take_name();
            if tag_name.is_empty() {
                return Err(line_err(self.pos, LineErrorKind::MalformedBracketing));
            }
            let tag = FunctionTag::from_name(tag_name).ok_or_else(|| {
                line_err(tag_offset, LineErrorKind::UnknownFunctionTag(tag_name.into()))
            })?;
            self.skip_ws();
            Some(tag)
        } else {
            None
        };

        let bracket_offset = self.pos;
        self.expect('[')?;
        self.skip_ws();
        if self.peek() == Some(']') {
            return Err(line_err(bracket_offset, LineErrorKind::EmptyTokenList));
        }

        let mut tokens = Vec::new();
        loop {
            tokens.push(self.token()?);
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.bump();
                    self.skip_ws();
                }
                Some(']') => {
                    self.bump();
                    break;
                }
                _ => return Err(line_err(self.pos, LineErrorKind::MalformedBracketing)),
            }
        }

        Chunk::new(chunk_type, gold_tag, tokens).map_err(|e| match e {
            InvalidChunk::NoTokens => line_err(bracket_offset, LineErrorKind::EmptyTokenList),
            InvalidChunk::SfcTagNotNull(tag) => {
                line_err(tag_offset, LineErrorKind::InvalidSfcTag(tag))
            }
        })
    }

    fn token(&mut self) -> Result<Token, ParseLineError> {
        let surface_start = self.pos;
        loop {
            match self.peek() {
                Some('/') => break,
                Some(',') | Some(']') | None => {
                    return Err(line_err(surface_start, LineErrorKind::MalformedToken))
                }
                Some(c @ ('[' | '#' | '@')) => {
                    return Err(line_err(self.pos, LineErrorKind::ReservedCharacter(c)))
                }
                Some(_) => self.bump(),
            }
        }
        let surface = self.line[surface_start..self.pos].trim_end();
        if surface.is_empty() {
            return Err(line_err(surface_start, LineErrorKind::MalformedToken));
        }
        self.bump(); // '/'
        self.skip_ws();

        let feature_start = self.pos;
        loop {
            match self.peek() {
                Some(',') | Some(']') | None => break,
                Some(c @ ('/' | '[' | '#' | '@')) => {
                    return Err(line_err(self.pos, LineErrorKind::ReservedCharacter(c)))
                }
                Some(_) => self.bump(),
            }
        }
        let feature_text = self.line[feature_start..self.pos].trim_end();
        let feature = feature_text.parse::<PosFeature>().map_err(|_| {
            line_err(feature_start, LineErrorKind::MalformedFeature(feature_text.into()))
        })?;

        Token::new(surface, feature)
            .map_err(|_| line_err(surface_start, LineErrorKind::MalformedToken))
    }
}

/// Parses one corpus line. The line is NFC-normalized first; error offsets
/// refer to the normalized text.
pub fn parse_sentence_line(line: &str) -> Result<AnnotatedSentence, ParseLineError> {
    let line = normalize(line);
    let mut p = LineParser { line: &line, pos: 0 };
    p.skip_ws();
    if p.at_end() {
        return Err(line_err(0, LineErrorKind::EmptyLine));
    }

    let mut chunks = vec![p.chunk()?];
    loop {
        p.skip_ws();
        match p.peek() {
            Some('#') => {
                p.bump();
                p.skip_ws();
                chunks.push(p.chunk()?);
            }
            Some(c) if c == SENTENCE_MARK => {
                p.bump();
                p.skip_ws();
                if !p.at_end() {
                    return Err(line_err(p.pos, LineErrorKind::TrailingContent));
                }
                return Ok(AnnotatedSentence { chunks, terminated: true });
            }
            None => return Ok(AnnotatedSentence { chunks, terminated: false }),
            Some(_) => return Err(line_err(p.pos, LineErrorKind::TrailingContent)),
        }
    }
}

/// Renders a sentence in canonical form: no inter-delimiter whitespace,
/// features with `v` for verbs, trailing `။` iff terminated.
pub fn serialize_sentence(s: &AnnotatedSentence) -> String {
    let mut out = String::new();
    for (i, chunk) in s.chunks().iter().enumerate() {
        if i > 0 {
            out.push('#');
        }
        out.push_str(chunk.chunk_type().name());
        if let Some(tag) = chunk.gold_tag() {
            out.push('@');
            out.push_str(tag.name());
        }
        out.push('[');
        for (j, token) in chunk.tokens().iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(token.surface());
            out.push('/');
            out.push_str(&token.feature().to_string());
        }
        out.push(']');
    }
    if s.terminated() {
        out.push(SENTENCE_MARK);
    }
    out
}

/// Counters accumulated while loading a corpus.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub sentences: usize,
    pub chunks: usize,
    /// Gold-tag histogram (untagged chunks contribute nothing).
    pub tag_counts: BTreeMap<FunctionTag, usize>,
    /// Feature histogram over every token of every chunk.
    pub feature_counts: BTreeMap<PosFeature, usize>,
}

impl CorpusStats {
    fn record(&mut self, sentence: &AnnotatedSentence) {
        self.sentences += 1;
        self.chunks += sentence.chunks().len();
        for chunk in sentence.chunks() {
            if let Some(tag) = chunk.gold_tag() {
                *self.tag_counts.entry(tag).or_insert(0) += 1;
            }
            for token in chunk.tokens() {
                *self.feature_counts.entry(token.feature().clone()).or_insert(0) += 1;
            }
        }
    }

    /// Key/value text rendering: `sentences`, `chunks`, `errors`, then
    /// `tag.<name>` and `feature.<feature>` rows, tab-separated.
    pub fn render(&self, errors: usize) -> String {
        let mut out = String::new();
        out.push_str(&format!("sentences\t{}\n", self.sentences));
        out.push_str(&format!("chunks\t{}\n", self.chunks));
        out.push_str(&format!("errors\t{errors}\n"));
        let mut tag_rows: Vec<_> = self
            .tag_counts
            .iter()
            .map(|(t, n)| (t.name().to_string(), *n))
            .collect();
        tag_rows.sort();
        for (name, n) in tag_rows {
            out.push_str(&format!("tag.{name}\t{n}\n"));
        }
        for (feature, n) in &self.feature_counts {
            out.push_str(&format!("feature.{feature}\t{n}\n"));
        }
        out
    }
}

/// A parse error annotated with its 1-based line number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub error: ParseLineError,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.error)
    }
}

impl std::error::Error for LineError {}

/// Error aborting a corpus load.
#[derive(Debug)]
pub enum CorpusError {
    Io(std::io::Error),
    Line(LineError),
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusError::Io(e) => write!(f, "corpus read failed: {e}"),
            CorpusError::Line(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for CorpusError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CorpusError::Io(e) => Some(e),
            CorpusError::Line(e) => Some(e),
        }
    }
}

impl From<std::io::Error> for CorpusError {
    fn from(e: std::io::Error) -> Self {
        CorpusError::Io(e)
    }
}

/// A loaded corpus: sentences with their 1-based line numbers, stats, and
/// (in lenient mode) the errors of skipped lines.
#[derive(Debug, Default)]
pub struct Corpus {
    pub sentences: Vec<(usize, AnnotatedSentence)>,
    pub stats: CorpusStats,
    pub errors: Vec<LineError>,
}

impl Corpus {
    pub fn into_sentences(self) -> Vec<AnnotatedSentence> {
        self.sentences.into_iter().map(|(_, s)| s).collect()
    }
}

/// Reads a corpus, one sentence per line. Blank lines and lines whose first
/// non-whitespace character is `%` are skipped. With `strict` set, the first
/// bad line aborts the load; otherwise bad lines are recorded in
/// [`Corpus::errors`] and skipped.
pub fn load_corpus<R: BufRead>(reader: R, strict: bool) -> Result<Corpus, CorpusError> {
    let mut corpus = Corpus::default();
    for (i, line) in reader.lines().enumerate() {
        let number = i + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        match parse_sentence_line(line) {
            Ok(sentence) => {
                corpus.stats.record(&sentence);
                corpus.sentences.push((number, sentence));
            }
            Err(error) => {
                let error = LineError { line: number, error };
                if strict {
                    return Err(CorpusError::Line(error));
                }
                corpus.errors.push(error);
            }
        }
    }
    Ok(corpus)
}
