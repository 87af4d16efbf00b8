//! Function-tag assignment for chunked sentences.
//!
//! Both decoders score a candidate tag `t` for a chunk by the chunk-head
//! prior P(t | feature) and the transition P(t | previous tag), in log space.
//! The greedy decoder commits left to right; the exact decoder runs Viterbi
//! over the same score and so never returns a lower-scoring sequence.
//!
//! Candidate tags for a chunk are those its head feature was seen with in
//! training. A chunk whose feature was never seen is forced to the model's
//! fallback tag: it scores the probability floor with no incoming-transition
//! term, and decoding continues from it normally.

use std::collections::BTreeMap;
use std::fmt;

use crate::corpus::{
    AnnotatedSentence, Chunk, ChunkType, FunctionTag, LineErrorKind, ParseLineError,
    SENTENCE_MARK,
};
use crate::model::Model;

/// Which decoder to run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DecodeMode {
    /// Commit to the best tag at each chunk, left to right.
    #[default]
    Greedy,
    /// Viterbi: the highest-scoring tag sequence overall.
    Exact,
}

impl DecodeMode {
    pub fn name(self) -> &'static str {
        match self {
            DecodeMode::Greedy => "greedy",
            DecodeMode::Exact => "exact",
        }
    }
}

impl fmt::Display for DecodeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Decoder configuration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DecodeOptions {
    pub mode: DecodeMode,
    /// Tag forced onto unseen-feature chunks; defaults to the model's
    /// most-frequent training tag.
    pub fallback: Option<FunctionTag>,
}

/// One tagged content chunk.
#[derive(Clone, Debug, PartialEq)]
pub struct TaggedItem {
    /// Position of the chunk in the original sentence, counting every chunk.
    pub index: usize,
    pub chunk: Chunk,
    pub tag: FunctionTag,
    /// This chunk's log-score contribution: log prior at the first position,
    /// log transition + log prior after it, log floor at fallback positions.
    pub score: f64,
}

/// A decoded sentence: tagged content chunks plus the chunks excluded from
/// tagging (sentence-final particles).
#[derive(Clone, Debug, PartialEq)]
pub struct TaggedSentence {
    pub items: Vec<TaggedItem>,
    pub dropped: Vec<(usize, Chunk)>,
    pub mode: DecodeMode,
    pub terminated: bool,
    total: f64,
}

impl TaggedSentence {
    pub fn tags(&self) -> Vec<FunctionTag> {
        self.items.iter().map(|item| item.tag).collect()
    }

    pub fn dropped_indices(&self) -> Vec<usize> {
        self.dropped.iter().map(|(index, _)| *index).collect()
    }

    /// Log score of the whole sequence, accumulated in decode order. Zero
    /// for a sentence with no content chunks.
    pub fn total_score(&self) -> f64 {
        self.total
    }
}

/// Candidate set for one position.
enum Position {
    /// Seen feature: candidate tags with their log priors.
    Seen(Vec<(FunctionTag, f64)>),
    /// Unseen feature: forced to the fallback tag at the log floor.
    Fallback(FunctionTag),
}

fn positions(model: &Model, content: &[(usize, &Chunk)], fallback: FunctionTag) -> Vec<Position> {
    content
        .iter()
        .map(|(_, chunk)| {
            let prior = model.prior(chunk.head_feature());
            if prior.is_empty() {
                Position::Fallback(fallback)
            } else {
                Position::Seen(prior.iter().map(|(tag, p)| (*tag, p.ln())).collect())
            }
        })
        .collect()
}

fn transition_ln(model: &Model, from: FunctionTag, to: FunctionTag) -> f64 {
    model
        .transition(from)
        .get(&to)
        .copied()
        .unwrap_or(model.floor_epsilon())
        .ln()
}

fn decode_greedy(model: &Model, positions: &[Position]) -> (Vec<(FunctionTag, f64)>, f64) {
    let floor_ln = model.floor_epsilon().ln();
    let mut chosen: Vec<(FunctionTag, f64)> = Vec::with_capacity(positions.len());
    let mut total = 0.0;

    for (i, position) in positions.iter().enumerate() {
        match position {
            Position::Fallback(fallback) => {
                total = if i == 0 { floor_ln } else { total + floor_ln };
                chosen.push((*fallback, floor_ln));
            }
            Position::Seen(candidates) => {
                let prev = (i > 0).then(|| chosen[i - 1].0);
                let mut best: Option<(FunctionTag, f64, f64)> = None;
                for &(tag, emit) in candidates {
                    let (candidate_total, item) = match prev {
                        None => (emit, emit),
                        Some(prev) => {
                            let trans = transition_ln(model, prev, tag);
                            ((total + trans) + emit, trans + emit)
                        }
                    };
                    // Candidates arrive in tag order, so strictly-greater
                    // keeps the smallest tag on ties.
                    if best.is_none_or(|(_, t, _)| candidate_total > t) {
                        best = Some((tag, candidate_total, item));
                    }
                }
                let (tag, candidate_total, item) =
                    best.expect("seen positions always have at least one candidate");
                total = candidate_total;
                chosen.push((tag, item));
            }
        }
    }
    (chosen, total)
}

fn decode_exact(model: &Model, positions: &[Position]) -> (Vec<(FunctionTag, f64)>, f64) {
    let floor_ln = model.floor_epsilon().ln();

    // Per-candidate cells: best score so far and the tag path that reached
    // it. Ties prefer the lexicographically smallest path, so results do not
    // depend on exploration order.
    let mut cells: BTreeMap<FunctionTag, (f64, Vec<FunctionTag>)> = BTreeMap::new();
    match &positions[0] {
        Position::Fallback(fallback) => {
            cells.insert(*fallback, (floor_ln, vec![*fallback]));
        }
        Position::Seen(candidates) => {
            for &(tag, emit) in candidates {
                cells.insert(tag, (emit, vec![tag]));
            }
        }
    }

    for position in &positions[1..] {
        let mut next: BTreeMap<FunctionTag, (f64, Vec<FunctionTag>)> = BTreeMap::new();
        match position {
            Position::Fallback(fallback) => {
                let (score, path) = cells
                    .values()
                    .map(|(score, path)| (score + floor_ln, path))
                    .fold(None::<(f64, &Vec<FunctionTag>)>, |best, candidate| {
                        match best {
                            Some(b) if candidate.0 < b.0 => Some(b),
                            Some(b) if candidate.0 == b.0 && candidate.1 >= b.1 => Some(b),
                            _ => Some(candidate),
                        }
                    })
                    .expect("cells are never empty");
                let mut path = path.clone();
                path.push(*fallback);
                next.insert(*fallback, (score, path));
            }
            Position::Seen(candidates) => {
                for &(tag, emit) in candidates {
                    let mut best: Option<(f64, Vec<FunctionTag>)> = None;
                    for (&prev, (prev_score, prev_path)) in &cells {
                        let trans = transition_ln(model, prev, tag);
                        let score = (prev_score + trans) + emit;
                        // Candidate paths here share the final tag, so
                        // comparing the previous-path prefixes orders them.
                        let replace = match &best {
                            None => true,
                            Some((b, best_path)) => {
                                score > *b
                                    || (score == *b
                                        && prev_path.as_slice() < &best_path[..best_path.len() - 1])
                            }
                        };
                        if replace {
                            let mut path = prev_path.clone();
                            path.push(tag);
                            best = Some((score, path));
                        }
                    }
                    next.insert(tag, best.expect("cells are never empty"));
                }
            }
        }
        cells = next;
    }

    let (total, path) = cells
        .into_values()
        .fold(None::<(f64, Vec<FunctionTag>)>, |best, candidate| match best {
            Some(b) if candidate.0 < b.0 => Some(b),
            Some(b) if candidate.0 == b.0 && candidate.1 >= b.1 => Some(b),
            _ => Some(candidate),
        })
        .expect("decoded sentences always have at least one position");

    // Item scores recomputed along the winning path.
    let mut items = Vec::with_capacity(path.len());
    for (i, (&tag, position)) in path.iter().zip(positions).enumerate() {
        let score = match position {
            Position::Fallback(_) => floor_ln,
            Position::Seen(candidates) => {
                let emit = candidates
                    .iter()
                    .find(|(t, _)| *t == tag)
                    .expect("path tags come from the candidate sets")
                    .1;
                if i == 0 {
                    emit
                } else {
                    transition_ln(model, path[i - 1], tag) + emit
                }
            }
        };
        items.push((tag, score));
    }
    (items, total)
}

/// Tags every content chunk of `sentence`, excluding sentence-final-particle
/// chunks from tagging. Gold tags on the input are ignored.
pub fn decode(model: &Model, sentence: &AnnotatedSentence, options: &DecodeOptions) -> TaggedSentence {
    let fallback = options.fallback.unwrap_or_else(|| model.fallback_tag());
    assert!(!fallback.is_null(), "the fallback must be a content tag, not Null");

    let mut content: Vec<(usize, &Chunk)> = Vec::new();
    let mut dropped: Vec<(usize, Chunk)> = Vec::new();
    for (index, chunk) in sentence.chunks().iter().enumerate() {
        if chunk.chunk_type() == ChunkType::SFC {
            dropped.push((index, chunk.clone()));
        } else {
            content.push((index, chunk));
        }
    }

    let (tagged, total) = if content.is_empty() {
        (Vec::new(), 0.0)
    } else {
        let positions = positions(model, &content, fallback);
        match options.mode {
            DecodeMode::Greedy => decode_greedy(model, &positions),
            DecodeMode::Exact => decode_exact(model, &positions),
        }
    };

    let items = content
        .iter()
        .zip(tagged)
        .map(|(&(index, chunk), (tag, score))| TaggedItem {
            index,
            chunk: chunk.clone(),
            tag,
            score,
        })
        .collect();

    TaggedSentence { items, dropped, mode: options.mode, terminated: sentence.terminated(), total }
}

/// Greedy decoding with default options.
pub fn tag_greedy(model: &Model, sentence: &AnnotatedSentence) -> TaggedSentence {
    decode(model, sentence, &DecodeOptions { mode: DecodeMode::Greedy, fallback: None })
}

/// Exact (Viterbi) decoding with default options.
pub fn tag_exact(model: &Model, sentence: &AnnotatedSentence) -> TaggedSentence {
    decode(model, sentence, &DecodeOptions { mode: DecodeMode::Exact, fallback: None })
}

/// Renders a tagged sentence as `TAG[surface]#TAG[surface]…`, closing with
/// the sentence mark when the input carried one. Dropped chunks contribute
/// their surface to the nearest preceding item (the following one at the
/// start of a sentence), so the text reads in original order.
pub fn render_tagged_line(sentence: &TaggedSentence) -> String {
    if sentence.items.is_empty() {
        let mut out: String = sentence.dropped.iter().map(|(_, c)| c.surface()).collect();
        if sentence.terminated {
            out.push(SENTENCE_MARK);
        }
        return out;
    }

    let mut surfaces: Vec<String> = sentence.items.iter().map(|item| item.chunk.surface()).collect();
    let mut leading = String::new();
    for (index, chunk) in &sentence.dropped {
        match sentence.items.iter().rposition(|item| item.index < *index) {
            Some(at) => surfaces[at].push_str(&chunk.surface()),
            None => leading.push_str(&chunk.surface()),
        }
    }
    surfaces[0] = format!("{leading}{}", surfaces[0]);

    let mut out = String::new();
    for (item, surface) in sentence.items.iter().zip(&surfaces) {
        if !out.is_empty() {
            out.push('#');
        }
        out.push_str(item.tag.name());
        out.push('[');
        out.push_str(surface);
        out.push(']');
    }
    if sentence.terminated {
        out.push(SENTENCE_MARK);
    }
    out
}

/// Serializes a tagged sentence as one JSON object (single line).
pub fn tagged_to_json(sentence: &TaggedSentence) -> String {
    let items: Vec<serde_json::Value> = sentence
        .items
        .iter()
        .map(|item| {
            serde_json::json!({
                "index": item.index,
                "tag": item.tag.name(),
                "score": item.score,
                "surface": item.chunk.surface(),
            })
        })
        .collect();
    serde_json::json!({
        "mode": sentence.mode.name(),
        "terminated": sentence.terminated,
        "total_score": sentence.total_score(),
        "dropped": sentence.dropped_indices(),
        "items": items,
    })
    .to_string()
}

/// Parses a line in the tagged-output format back into a tag sequence and a
/// termination flag. Bracketed surfaces are optional and their content is
/// not interpreted; items are separated by `#` or by whitespace alone, so
/// bare sequences like `Subj Active` work; `Null` is rejected because it
/// never tags a content chunk.
pub fn parse_tagged_line(line: &str) -> Result<(Vec<FunctionTag>, bool), ParseLineError> {
    let line = crate::corpus::normalize(line);
    let err = |offset: usize, kind: LineErrorKind| ParseLineError { offset, kind };

    let bytes: Vec<(usize, char)> = line.char_indices().collect();
    let mut pos = 0usize; // index into `bytes`
    let at = |pos: usize| bytes.get(pos).map(|&(_, c)| c);
    let offset_of = |pos: usize| bytes.get(pos).map_or(line.len(), |&(o, _)| o);

    let mut tags = Vec::new();
    loop {
        while at(pos).is_some_and(char::is_whitespace) {
            pos += 1;
        }
        let name_start = pos;
        while at(pos).is_some_and(|c| c.is_ascii_alphanumeric()) {
            pos += 1;
        }
        if pos == name_start {
            let kind = if tags.is_empty() && at(pos).is_none() {
                LineErrorKind::EmptyLine
            } else {
                LineErrorKind::MalformedBracketing
            };
            return Err(err(offset_of(pos), kind));
        }
        let name: String = bytes[name_start..pos].iter().map(|&(_, c)| c).collect();
        let Some(tag) = FunctionTag::from_name(&name) else {
            return Err(err(offset_of(name_start), LineErrorKind::UnknownFunctionTag(name)));
        };
        if tag.is_null() {
            return Err(err(offset_of(name_start), LineErrorKind::NullNotAllowed));
        }
        tags.push(tag);

        let mut separated = false;
        while at(pos).is_some_and(char::is_whitespace) {
            pos += 1;
            separated = true;
        }
        if at(pos) == Some('[') {
            pos += 1;
            while at(pos).is_some_and(|c| c != ']') {
                pos += 1;
            }
            if at(pos) != Some(']') {
                return Err(err(offset_of(pos), LineErrorKind::MalformedBracketing));
            }
            pos += 1;
            separated = false;
            while at(pos).is_some_and(char::is_whitespace) {
                pos += 1;
                separated = true;
            }
        }

        match at(pos) {
            Some('#') => {
                pos += 1;
            }
            // Whitespace alone also separates items: the next one starts here.
            Some(c) if separated && c.is_ascii_alphanumeric() => {}
            Some(SENTENCE_MARK) => {
                pos += 1;
                while at(pos).is_some_and(char::is_whitespace) {
                    pos += 1;
                }
                if at(pos).is_some() {
                    return Err(err(offset_of(pos), LineErrorKind::TrailingContent));
                }
                return Ok((tags, true));
            }
            None => return Ok((tags, false)),
            Some(_) => return Err(err(offset_of(pos), LineErrorKind::TrailingContent)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets::SAMPLE_CORPUS;
    use crate::corpus::{load_corpus, parse_sentence_line, PosFeature};
    use crate::model::{train, CountTables, Model, TrainOptions};

    const DEMO_INPUT_LINE: &str = "NC[မမ/n.person]#CC[နှင့်/cc.chunk]#NC[လှလှ/n.person]#PPC[သည်/ppm.subj]#NC[ကျောင်း/n.location]#PPC[သို့/ppm.place]#NC[စက်ဘီး/n.objects]#PPC[ဖြင့်/ppm.use]#VC[သွား/v.common]#SFC[သည်/sf]။";
    const DEMO_OUTPUT_LINE: &str = "PSubj[မမ]#CCC[နှင့်]#PSubj[လှလှ]#SubjP[သည်]#PPla[ကျောင်း]#PlaP[သို့]#PUse[စက်ဘီး]#UseP[ဖြင့်]#Active[သွားသည်]။";

    fn sample_model() -> Model {
        let corpus = load_corpus(SAMPLE_CORPUS.as_bytes(), true).unwrap();
        train(&corpus.into_sentences(), &TrainOptions::default()).unwrap()
    }

    fn tag_names(sentence: &TaggedSentence) -> Vec<&'static str> {
        sentence.tags().into_iter().map(FunctionTag::name).collect()
    }

    #[test]
    fn greedy_tags_the_demo_sentence() {
        let model = sample_model();
        let input = parse_sentence_line(DEMO_INPUT_LINE).unwrap();
        let tagged = tag_greedy(&model, &input);
        assert_eq!(
            tag_names(&tagged),
            ["PSubj", "CCC", "PSubj", "SubjP", "PPla", "PlaP", "PUse", "UseP", "Active"]
        );
        assert_eq!(tagged.dropped_indices(), [9]);
        assert!(tagged.terminated);
        assert!(tagged.total_score() < 0.0);
    }

    #[test]
    fn exact_agrees_with_greedy_on_the_demo_sentence() {
        let model = sample_model();
        let input = parse_sentence_line(DEMO_INPUT_LINE).unwrap();
        let greedy = tag_greedy(&model, &input);
        let exact = tag_exact(&model, &input);
        assert_eq!(exact.tags(), greedy.tags());
        assert!(exact.total_score() >= greedy.total_score());
    }

    #[test]
    fn transition_context_overrides_the_prior() {
        // n.objects favors PObj (3/5) over PUse (2/5), but after PlaP only
        // PUse has a trained transition, so both decoders pick PUse.
        let model = sample_model();
        let input = parse_sentence_line(DEMO_INPUT_LINE).unwrap();
        let prior = model.prior(&PosFeature::new("n", Some("objects")).unwrap());
        assert!(prior[&FunctionTag::PObj] > prior[&FunctionTag::PUse]);
        assert_eq!(tag_greedy(&model, &input).items[6].tag, FunctionTag::PUse);
        assert_eq!(tag_exact(&model, &input).items[6].tag, FunctionTag::PUse);
    }

    #[test]
    fn demo_rendering_absorbs_final_particles() {
        let model = sample_model();
        let input = parse_sentence_line(DEMO_INPUT_LINE).unwrap();
        let tagged = tag_greedy(&model, &input);
        assert_eq!(render_tagged_line(&tagged), DEMO_OUTPUT_LINE);
    }

    #[test]
    fn unseen_feature_takes_the_fallback_tag() {
        let model = sample_model();
        // Most frequent training tag in the bundled corpus.
        assert_eq!(model.fallback_tag(), FunctionTag::PSubj);

        let input = parse_sentence_line("NC[ခွေး/n.animal]#VC[သွား/v.common]").unwrap();
        let tagged = tag_greedy(&model, &input);
        assert_eq!(tag_names(&tagged), ["PSubj", "Active"]);
        assert_eq!(tagged.items[0].score, model.floor_epsilon().ln());
        assert!(!tagged.terminated);

        let forced = decode(
            &model,
            &input,
            &DecodeOptions { mode: DecodeMode::Greedy, fallback: Some(FunctionTag::Obj) },
        );
        assert_eq!(tag_names(&forced), ["Obj", "Active"]);

        let exact = tag_exact(&model, &input);
        assert_eq!(exact.tags(), tagged.tags());
        assert_eq!(exact.total_score(), tagged.total_score());
    }

    /// A model where the locally best first tag leads into an untrained
    /// transition, so the exact decoder finds a strictly better sequence.
    fn greedy_trap_model() -> Model {
        let mut counts = CountTables::default();
        let feat = |pos: &str, cat: &str| PosFeature::new(pos, Some(cat)).unwrap();
        let tag = |name: &str| -> FunctionTag { name.parse().unwrap() };

        counts.c_tag_feat.insert((tag("Subj"), feat("x", "one")), 3);
        counts.c_tag_feat.insert((tag("PSubj"), feat("x", "one")), 2);
        counts.c_tag_feat.insert((tag("SubjP"), feat("x", "two")), 5);
        counts.c_tag_feat.insert((tag("Active"), feat("x", "three")), 5);
        counts.c_feat.insert(feat("x", "one"), 5);
        counts.c_feat.insert(feat("x", "two"), 5);
        counts.c_feat.insert(feat("x", "three"), 5);
        counts.c_next_tag.insert((tag("Active"), tag("Subj")), 1);
        counts.c_next_tag.insert((tag("SubjP"), tag("PSubj")), 1);
        counts.c_next_tag.insert((tag("Active"), tag("SubjP")), 1);
        counts.c_tag.insert(tag("Subj"), 1);
        counts.c_tag.insert(tag("PSubj"), 1);
        counts.c_tag.insert(tag("SubjP"), 1);

        Model::from_counts(counts, &TrainOptions::default()).unwrap()
    }

    #[test]
    fn exact_decoding_beats_the_greedy_trap() {
        let model = greedy_trap_model();
        let input =
            parse_sentence_line("NC[က/x.one]#PPC[ခ/x.two]#VC[ဂ/x.three]").unwrap();

        let greedy = tag_greedy(&model, &input);
        assert_eq!(tag_names(&greedy), ["Subj", "SubjP", "Active"]);

        let exact = tag_exact(&model, &input);
        assert_eq!(tag_names(&exact), ["PSubj", "SubjP", "Active"]);
        assert!(exact.total_score() > greedy.total_score());

        // The exact items must sum (in decode order) to the reported total.
        let replayed = exact.items[1..]
            .iter()
            .fold(exact.items[0].score, |acc, item| acc + item.score);
        assert!((replayed - exact.total_score()).abs() < 1e-9);
    }

    #[test]
    fn score_ties_break_toward_the_smallest_tag_sequence() {
        let mut counts = CountTables::default();
        let feat = |pos: &str, cat: &str| PosFeature::new(pos, Some(cat)).unwrap();
        counts.c_tag_feat.insert((FunctionTag::Obj, feat("x", "a")), 1);
        counts.c_tag_feat.insert((FunctionTag::Subj, feat("x", "a")), 1);
        counts.c_tag_feat.insert((FunctionTag::Active, feat("x", "b")), 1);
        counts.c_feat.insert(feat("x", "a"), 2);
        counts.c_feat.insert(feat("x", "b"), 1);
        let model = Model::from_counts(counts, &TrainOptions::default()).unwrap();

        let input = parse_sentence_line("NC[က/x.a]#VC[ခ/x.b]").unwrap();
        // Subj and Obj tie at 1/2 each and every transition is floored, so
        // the canonical tag order decides: Subj precedes Obj.
        assert_eq!(tag_names(&tag_greedy(&model, &input)), ["Subj", "Active"]);
        assert_eq!(tag_names(&tag_exact(&model, &input)), ["Subj", "Active"]);
    }

    #[test]
    fn prior_scaling_leaves_tags_unchanged() {
        let mut model = sample_model();
        let input = parse_sentence_line(DEMO_INPUT_LINE).unwrap();
        let before_greedy = tag_greedy(&model, &input).tags();
        let before_exact = tag_exact(&model, &input).tags();

        for row in model.prior.values_mut() {
            for p in row.values_mut() {
                *p *= 0.5;
            }
        }
        assert_eq!(tag_greedy(&model, &input).tags(), before_greedy);
        assert_eq!(tag_exact(&model, &input).tags(), before_exact);
    }

    #[test]
    fn sentence_of_only_final_particles_renders_verbatim() {
        let model = sample_model();
        let input = parse_sentence_line("SFC[သည်/sf]။").unwrap();
        let tagged = tag_greedy(&model, &input);
        assert!(tagged.items.is_empty());
        assert_eq!(tagged.dropped_indices(), [0]);
        assert_eq!(tagged.total_score(), 0.0);
        assert_eq!(render_tagged_line(&tagged), "သည်။");
    }

    #[test]
    fn leading_particle_attaches_to_the_following_item() {
        let model = sample_model();
        let input = parse_sentence_line("SFC[သည်/sf]#VC[သွား/v.common]").unwrap();
        let tagged = tag_greedy(&model, &input);
        assert_eq!(render_tagged_line(&tagged), "Active[သည်သွား]");
    }

    #[test]
    fn tagged_output_parses_back() {
        let (tags, terminated) = parse_tagged_line(DEMO_OUTPUT_LINE).unwrap();
        assert_eq!(
            tags.iter().copied().map(FunctionTag::name).collect::<Vec<_>>(),
            ["PSubj", "CCC", "PSubj", "SubjP", "PPla", "PlaP", "PUse", "UseP", "Active"]
        );
        assert!(terminated);
    }

    #[test]
    fn bare_tag_sequences_parse() {
        let (tags, terminated) = parse_tagged_line(" Subj # Active ").unwrap();
        assert_eq!(tags, [FunctionTag::Subj, FunctionTag::Active]);
        assert!(!terminated);

        let (tags, terminated) = parse_tagged_line("Subj#Obj[x]#Active။").unwrap();
        assert_eq!(tags, [FunctionTag::Subj, FunctionTag::Obj, FunctionTag::Active]);
        assert!(terminated);
    }

    #[test]
    fn whitespace_alone_separates_items() {
        let (tags, terminated) = parse_tagged_line("Active Subj").unwrap();
        assert_eq!(tags, [FunctionTag::Active, FunctionTag::Subj]);
        assert!(!terminated);

        let (tags, terminated) = parse_tagged_line("Subj[x] Obj[y] Active ။").unwrap();
        assert_eq!(tags, [FunctionTag::Subj, FunctionTag::Obj, FunctionTag::Active]);
        assert!(terminated);

        // Items still need some separator: a bracket glued to a name is not
        // two items, and glued names read as one (unknown) name.
        assert_eq!(
            parse_tagged_line("Subj[x]Obj").unwrap_err().kind,
            LineErrorKind::TrailingContent
        );
        assert_eq!(
            parse_tagged_line("SubjObj").unwrap_err().kind,
            LineErrorKind::UnknownFunctionTag("SubjObj".to_string())
        );
    }

    #[test]
    fn tagged_line_errors() {
        assert_eq!(parse_tagged_line("").unwrap_err().kind, LineErrorKind::EmptyLine);
        assert_eq!(parse_tagged_line("   ").unwrap_err().kind, LineErrorKind::EmptyLine);
        assert_eq!(
            parse_tagged_line("Null[x]").unwrap_err().kind,
            LineErrorKind::NullNotAllowed
        );
        assert_eq!(
            parse_tagged_line("Bogus[x]").unwrap_err().kind,
            LineErrorKind::UnknownFunctionTag("Bogus".to_string())
        );
        assert_eq!(
            parse_tagged_line("Subj[x").unwrap_err().kind,
            LineErrorKind::MalformedBracketing
        );
        assert_eq!(
            parse_tagged_line("Subj[x] y").unwrap_err().kind,
            LineErrorKind::UnknownFunctionTag("y".to_string())
        );
        assert_eq!(
            parse_tagged_line("Subj။ x").unwrap_err().kind,
            LineErrorKind::TrailingContent
        );
        assert_eq!(
            parse_tagged_line("#Subj").unwrap_err().kind,
            LineErrorKind::MalformedBracketing
        );
    }

    #[test]
    fn json_output_shape() {
        let model = sample_model();
        let input = parse_sentence_line(DEMO_INPUT_LINE).unwrap();
        let tagged = tag_greedy(&model, &input);
        let value: serde_json::Value = serde_json::from_str(&tagged_to_json(&tagged)).unwrap();
        assert_eq!(value["mode"], "greedy");
        assert_eq!(value["terminated"], true);
        assert_eq!(value["dropped"], serde_json::json!([9]));
        assert_eq!(value["items"][0]["tag"], "PSubj");
        assert_eq!(value["items"][0]["index"], 0);
        assert_eq!(value["items"][0]["surface"], "မမ");
        assert_eq!(value["items"].as_array().unwrap().len(), 9);
        assert!(value["total_score"].as_f64().unwrap() < 0.0);
    }
}
