//! Naive Bayes count tables and probability model.
//!
//! Training counts (tag, head-feature) pairs for the prior table and
//! (next-tag, current-tag) pairs for the transition table. Chunks gold-tagged
//! `Null` (and SFC chunks generally) are dropped before counting, and
//! transitions pair only chunks adjacent after that drop, within one sentence.
//!
//! A [`Model`] stores plain probabilities; decoders take logarithms of them
//! and accumulate scores in log space.

use std::collections::BTreeMap;
use std::fmt;

use crate::corpus::{AnnotatedSentence, ChunkType, FunctionTag, PosFeature};

/// A probability distribution over function tags. Iteration order is the
/// canonical tag order.
pub type TagDistribution = BTreeMap<FunctionTag, f64>;

static EMPTY_DISTRIBUTION: TagDistribution = TagDistribution::new();

/// Raw occurrence counts backing the model.
///
/// `c_next_tag` is keyed `(next, current)`; `c_tag` counts only occurrences
/// that have a successor, so each transition row sums to at most `c_tag`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CountTables {
    pub c_tag_feat: BTreeMap<(FunctionTag, PosFeature), u64>,
    pub c_feat: BTreeMap<PosFeature, u64>,
    pub c_next_tag: BTreeMap<(FunctionTag, FunctionTag), u64>,
    pub c_tag: BTreeMap<FunctionTag, u64>,
}

impl CountTables {
    /// Checks the two table invariants: per-feature tag counts sum exactly to
    /// the feature count, and per-tag successor counts do not exceed the tag
    /// count.
    pub fn validate(&self) -> Result<(), ModelError> {
        let mut feat_sums: BTreeMap<&PosFeature, u64> = BTreeMap::new();
        for ((_, feature), count) in &self.c_tag_feat {
            *feat_sums.entry(feature).or_insert(0) += count;
        }
        for (feature, sum) in &feat_sums {
            if self.c_feat.get(feature).copied().unwrap_or(0) != *sum {
                return Err(ModelError::CountMismatch { feature: (*feature).clone() });
            }
        }
        for (feature, count) in &self.c_feat {
            if feat_sums.get(feature).copied().unwrap_or(0) != *count {
                return Err(ModelError::CountMismatch { feature: feature.clone() });
            }
        }

        let mut tag_sums: BTreeMap<FunctionTag, u64> = BTreeMap::new();
        for ((_, current), count) in &self.c_next_tag {
            *tag_sums.entry(*current).or_insert(0) += count;
        }
        for (tag, sum) in &tag_sums {
            if *sum > self.c_tag.get(tag).copied().unwrap_or(0) {
                return Err(ModelError::TransitionOverflow { tag: *tag });
            }
        }
        Ok(())
    }
}

/// Training parameters. `smoothing_alpha = 0` gives raw maximum-likelihood
/// ratios; `floor_epsilon` is the decode-time probability for unseen
/// transitions and is never baked into the stored distributions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainOptions {
    pub smoothing_alpha: f64,
    pub floor_epsilon: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions { smoothing_alpha: 0.0, floor_epsilon: 1e-9 }
    }
}

/// Errors from training, table validation, and the model file format.
#[derive(Debug, PartialEq)]
pub enum ModelError {
    EmptyCorpus,
    MissingGoldTag { sentence: usize, chunk: usize },
    InvalidParameter(&'static str),
    CountMismatch { feature: PosFeature },
    TransitionOverflow { tag: FunctionTag },
    MalformedHeader,
    UnknownVersion(String),
    UnknownSection(String),
    MalformedRow { line: usize, text: String },
    DuplicateRow { line: usize },
    Unnormalized { what: String, sum: f64 },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::EmptyCorpus => f.write_str("empty corpus"),
            ModelError::MissingGoldTag { sentence, chunk } => {
                write!(f, "missing gold tag on sentence {sentence}, chunk {chunk}")
            }
            ModelError::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            ModelError::CountMismatch { feature } => {
                write!(f, "tag counts for feature `{feature}` do not sum to its feature count")
            }
            ModelError::TransitionOverflow { tag } => {
                write!(f, "successor counts for tag `{tag}` exceed its tag count")
            }
            ModelError::MalformedHeader => f.write_str("malformed model file header"),
            ModelError::UnknownVersion(v) => write!(f, "unknown model format version `{v}`"),
            ModelError::UnknownSection(s) => write!(f, "unknown model file section `[{s}]`"),
            ModelError::MalformedRow { line, text } => {
                write!(f, "malformed model file row at line {line}: `{text}`")
            }
            ModelError::DuplicateRow { line } => {
                write!(f, "duplicate model file row at line {line}")
            }
            ModelError::Unnormalized { what, sum } => {
                write!(f, "distribution for {what} sums to {sum}, expected 1")
            }
        }
    }
}

impl std::error::Error for ModelError {}

/// The trained model: counts plus derived prior and transition tables.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub(crate) counts: CountTables,
    pub(crate) prior: BTreeMap<PosFeature, TagDistribution>,
    pub(crate) transition: BTreeMap<FunctionTag, TagDistribution>,
    pub(crate) smoothing_alpha: f64,
    pub(crate) floor_epsilon: f64,
}

fn check_options(options: &TrainOptions) -> Result<(), ModelError> {
    if !(options.smoothing_alpha >= 0.0 && options.smoothing_alpha.is_finite()) {
        return Err(ModelError::InvalidParameter("smoothing_alpha must be >= 0"));
    }
    if !(options.floor_epsilon > 0.0 && options.floor_epsilon.is_finite()) {
        return Err(ModelError::InvalidParameter("floor_epsilon must be > 0"));
    }
    Ok(())
}

/// Derives one smoothed or maximum-likelihood distribution row.
///
/// `observed` maps outcomes to counts for this condition; `total` is the
/// condition count. With `alpha > 0` the support is the whole candidate set.
fn derive_row(observed: &BTreeMap<FunctionTag, u64>, total: u64, alpha: f64) -> TagDistribution {
    let mut row = TagDistribution::new();
    if alpha > 0.0 {
        let denominator = total as f64 + alpha * FunctionTag::CANDIDATE_COUNT as f64;
        for tag in FunctionTag::candidates() {
            let count = observed.get(&tag).copied().unwrap_or(0);
            row.insert(tag, (count as f64 + alpha) / denominator);
        }
    } else if total > 0 {
        for (tag, &count) in observed {
            if count > 0 {
                row.insert(*tag, count as f64 / total as f64);
            }
        }
    }
    row
}

fn derive_tables(
    counts: &CountTables,
    alpha: f64,
) -> (BTreeMap<PosFeature, TagDistribution>, BTreeMap<FunctionTag, TagDistribution>) {
    let mut by_feature: BTreeMap<&PosFeature, BTreeMap<FunctionTag, u64>> = BTreeMap::new();
    for ((tag, feature), &count) in &counts.c_tag_feat {
        by_feature.entry(feature).or_default().insert(*tag, count);
    }
    let mut prior = BTreeMap::new();
    for (feature, &total) in &counts.c_feat {
        let observed = by_feature.get(feature).cloned().unwrap_or_default();
        let row = derive_row(&observed, total, alpha);
        if !row.is_empty() {
            prior.insert(feature.clone(), row);
        }
    }

    let mut by_current: BTreeMap<FunctionTag, BTreeMap<FunctionTag, u64>> = BTreeMap::new();
    for ((next, current), &count) in &counts.c_next_tag {
        by_current.entry(*current).or_default().insert(*next, count);
    }
    let mut transition = BTreeMap::new();
    for (current, &total) in &counts.c_tag {
        let observed = by_current.get(current).cloned().unwrap_or_default();
        let row = derive_row(&observed, total, alpha);
        if !row.is_empty() {
            transition.insert(*current, row);
        }
    }
    (prior, transition)
}

/// Trains a model from a fully annotated corpus.
pub fn train(corpus: &[AnnotatedSentence], options: &TrainOptions) -> Result<Model, ModelError> {
    check_options(options)?;
    if corpus.is_empty() {
        return Err(ModelError::EmptyCorpus);
    }

    let mut counts = CountTables::default();
    for (si, sentence) in corpus.iter().enumerate() {
        let mut content: Vec<(FunctionTag, PosFeature)> = Vec::new();
        for (ci, chunk) in sentence.chunks().iter().enumerate() {
            let tag = chunk
                .gold_tag()
                .ok_or(ModelError::MissingGoldTag { sentence: si, chunk: ci })?;
            if tag.is_null() || chunk.chunk_type() == ChunkType::SFC {
                continue;
            }
            content.push((tag, chunk.head_feature().clone()));
        }
        for (tag, feature) in &content {
            *counts.c_tag_feat.entry((*tag, feature.clone())).or_insert(0) += 1;
            *counts.c_feat.entry(feature.clone()).or_insert(0) += 1;
        }
        for pair in content.windows(2) {
            let (current, next) = (pair[0].0, pair[1].0);
            *counts.c_next_tag.entry((next, current)).or_insert(0) += 1;
            *counts.c_tag.entry(current).or_insert(0) += 1;
        }
    }
    Model::from_counts(counts, options)
}

impl Model {
    /// Builds a model from explicit count tables, validating them and
    /// deriving the probability tables under the declared smoothing.
    pub fn from_counts(counts: CountTables, options: &TrainOptions) -> Result<Model, ModelError> {
        check_options(options)?;
        counts.validate()?;
        let (prior, transition) = derive_tables(&counts, options.smoothing_alpha);
        Ok(Model {
            counts,
            prior,
            transition,
            smoothing_alpha: options.smoothing_alpha,
            floor_epsilon: options.floor_epsilon,
        })
    }

    /// Re-derives the probability tables from the stored counts under a new
    /// smoothing parameter.
    pub fn with_smoothing(&self, alpha: f64) -> Result<Model, ModelError> {
        Model::from_counts(
            self.counts.clone(),
            &TrainOptions { smoothing_alpha: alpha, floor_epsilon: self.floor_epsilon },
        )
    }

    pub fn counts(&self) -> &CountTables {
        &self.counts
    }

    pub fn smoothing_alpha(&self) -> f64 {
        self.smoothing_alpha
    }

    pub fn floor_epsilon(&self) -> f64 {
        self.floor_epsilon
    }

    pub fn set_floor_epsilon(&mut self, epsilon: f64) -> Result<(), ModelError> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(ModelError::InvalidParameter("floor_epsilon must be > 0"));
        }
        self.floor_epsilon = epsilon;
        Ok(())
    }

    /// P(tag | feature) row; empty for unknown features.
    pub fn prior(&self, feature: &PosFeature) -> &TagDistribution {
        self.prior.get(feature).unwrap_or(&EMPTY_DISTRIBUTION)
    }

    /// P(next | current) row; empty if `current` never had a successor.
    ///
    /// # Panics
    /// `current` must not be `Null` (it is never a decoding candidate).
    pub fn transition(&self, current: FunctionTag) -> &TagDistribution {
        assert!(!current.is_null(), "transition row requested for Null");
        self.transition.get(&current).unwrap_or(&EMPTY_DISTRIBUTION)
    }

    pub fn prior_table(&self) -> &BTreeMap<PosFeature, TagDistribution> {
        &self.prior
    }

    pub fn transition_table(&self) -> &BTreeMap<FunctionTag, TagDistribution> {
        &self.transition
    }

    /// The most frequent tag in `c_tag` (ties and an empty table resolve to
    /// the earliest tag in canonical order). Used for unseen features.
    pub fn fallback_tag(&self) -> FunctionTag {
        let mut best = FunctionTag::ALL[0];
        let mut best_count = 0u64;
        for tag in FunctionTag::candidates() {
            let count = self.counts.c_tag.get(&tag).copied().unwrap_or(0);
            if count > best_count {
                best = tag;
                best_count = count;
            }
        }
        best
    }

    /// Renders the versioned model file format.
    pub fn save(&self) -> String {
        let mut out = String::new();
        out.push_str("funtag-model v1\n");

        out.push_str("[params]\n");
        out.push_str(&format!("floor_epsilon\t{}\n", self.floor_epsilon));
        out.push_str(&format!("smoothing_alpha\t{}\n", self.smoothing_alpha));

        out.push_str("[counts.tag_feat]\n");
        let mut rows: Vec<(String, String, u64)> = self
            .counts
            .c_tag_feat
            .iter()
            .map(|((t, pc), n)| (t.name().to_string(), pc.to_string(), *n))
            .collect();
        rows.sort();
        for (tag, feature, count) in rows {
            out.push_str(&format!("{tag}\t{feature}\t{count}\n"));
        }

        out.push_str("[counts.feat]\n");
        let mut rows: Vec<(String, u64)> =
            self.counts.c_feat.iter().map(|(pc, n)| (pc.to_string(), *n)).collect();
        rows.sort();
        for (feature, count) in rows {
            out.push_str(&format!("{feature}\t{count}\n"));
        }

        out.push_str("[counts.next_tag]\n");
        let mut rows: Vec<(String, String, u64)> = self
            .counts
            .c_next_tag
            .iter()
            .map(|((n, c), k)| (n.name().to_string(), c.name().to_string(), *k))
            .collect();
        rows.sort();
        for (next, current, count) in rows {
            out.push_str(&format!("{next}\t{current}\t{count}\n"));
        }

        out.push_str("[counts.tag]\n");
        let mut rows: Vec<(String, u64)> =
            self.counts.c_tag.iter().map(|(t, n)| (t.name().to_string(), *n)).collect();
        rows.sort();
        for (tag, count) in rows {
            out.push_str(&format!("{tag}\t{count}\n"));
        }

        out.push_str("[prior]\n");
        let mut rows: Vec<(String, String, f64)> = Vec::new();
        for (feature, dist) in &self.prior {
            for (tag, p) in dist {
                rows.push((feature.to_string(), tag.name().to_string(), *p));
            }
        }
        rows.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        for (feature, tag, p) in rows {
            out.push_str(&format!("{feature}\t{tag}\t{p:.11e}\n"));
        }

        out.push_str("[transition]\n");
        let mut rows: Vec<(String, String, f64)> = Vec::new();
        for (current, dist) in &self.transition {
            for (next, p) in dist {
                rows.push((current.name().to_string(), next.name().to_string(), *p));
            }
        }
        rows.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        for (current, next, p) in rows {
            out.push_str(&format!("{current}\t{next}\t{p:.11e}\n"));
        }

        out
    }

    /// Parses the model file format. Probability sections, when present, are
    /// authoritative; when absent they are re-derived from the counts under
    /// the stored smoothing parameter.
    pub fn load(text: &str) -> Result<Model, ModelError> {
        let mut lines = text.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, line)) if line.trim().is_empty() => continue,
                Some((_, line)) => break line.trim(),
                None => return Err(ModelError::MalformedHeader),
            }
        };
        match header.strip_prefix("funtag-model ") {
            Some("v1") => {}
            Some(version) => return Err(ModelError::UnknownVersion(version.to_string())),
            None => return Err(ModelError::MalformedHeader),
        }

        #[derive(Clone, Copy, PartialEq)]
        enum Section {
            Params,
            TagFeat,
            Feat,
            NextTag,
            Tag,
            Prior,
            Transition,
        }

        let mut section = None;
        let mut saw_prior = false;
        let mut saw_transition = false;
        let mut counts = CountTables::default();
        let mut prior: BTreeMap<PosFeature, TagDistribution> = BTreeMap::new();
        let mut transition: BTreeMap<FunctionTag, TagDistribution> = BTreeMap::new();
        let mut options = TrainOptions::default();

        for (i, raw) in lines {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let number = i + 1;
            let malformed = || ModelError::MalformedRow { line: number, text: raw.to_string() };

            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = Some(match name {
                    "params" => Section::Params,
                    "counts.tag_feat" => Section::TagFeat,
                    "counts.feat" => Section::Feat,
                    "counts.next_tag" => Section::NextTag,
                    "counts.tag" => Section::Tag,
                    "prior" => {
                        saw_prior = true;
                        Section::Prior
                    }
                    "transition" => {
                        saw_transition = true;
                        Section::Transition
                    }
                    other => return Err(ModelError::UnknownSection(other.to_string())),
                });
                continue;
            }

            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            match section.ok_or_else(malformed)? {
                Section::Params => {
                    let [key, value] = fields[..] else { return Err(malformed()) };
                    let value: f64 = value.parse().map_err(|_| malformed())?;
                    match key {
                        "floor_epsilon" => options.floor_epsilon = value,
                        "smoothing_alpha" => options.smoothing_alpha = value,
                        _ => return Err(malformed()),
                    }
                }
                Section::TagFeat => {
                    let [tag, feature, count] = fields[..] else { return Err(malformed()) };
                    let tag: FunctionTag = tag.parse().map_err(|_| malformed())?;
                    let feature: PosFeature = feature.parse().map_err(|_| malformed())?;
                    let count: u64 = count.parse().map_err(|_| malformed())?;
                    if counts.c_tag_feat.insert((tag, feature), count).is_some() {
                        return Err(ModelError::DuplicateRow { line: number });
                    }
                }
                Section::Feat => {
                    let [feature, count] = fields[..] else { return Err(malformed()) };
                    let feature: PosFeature = feature.parse().map_err(|_| malformed())?;
                    let count: u64 = count.parse().map_err(|_| malformed())?;
                    if counts.c_feat.insert(feature, count).is_some() {
                        return Err(ModelError::DuplicateRow { line: number });
                    }
                }
                Section::NextTag => {
                    let [next, current, count] = fields[..] else { return Err(malformed()) };
                    let next: FunctionTag = next.parse().map_err(|_| malformed())?;
                    let current: FunctionTag = current.parse().map_err(|_| malformed())?;
                    let count: u64 = count.parse().map_err(|_| malformed())?;
                    if counts.c_next_tag.insert((next, current), count).is_some() {
                        return Err(ModelError::DuplicateRow { line: number });
                    }
                }
                Section::Tag => {
                    let [tag, count] = fields[..] else { return Err(malformed()) };
                    let tag: FunctionTag = tag.parse().map_err(|_| malformed())?;
                    let count: u64 = count.parse().map_err(|_| malformed())?;
                    if counts.c_tag.insert(tag, count).is_some() {
                        return Err(ModelError::DuplicateRow { line: number });
                    }
                }
                Section::Prior => {
                    let [feature, tag, p] = fields[..] else { return Err(malformed()) };
                    let feature: PosFeature = feature.parse().map_err(|_| malformed())?;
                    let tag: FunctionTag = tag.parse().map_err(|_| malformed())?;
                    let p: f64 = p.parse().map_err(|_| malformed())?;
                    if prior.entry(feature).or_default().insert(tag, p).is_some() {
                        return Err(ModelError::DuplicateRow { line: number });
                    }
                }
                Section::Transition => {
                    let [current, next, p] = fields[..] else { return Err(malformed()) };
                    let current: FunctionTag = current.parse().map_err(|_| malformed())?;
                    let next: FunctionTag = next.parse().map_err(|_| malformed())?;
                    let p: f64 = p.parse().map_err(|_| malformed())?;
                    if transition.entry(current).or_default().insert(next, p).is_some() {
                        return Err(ModelError::DuplicateRow { line: number });
                    }
                }
            }
        }

        check_options(&options)?;
        counts.validate()?;
        let (derived_prior, derived_transition) = derive_tables(&counts, options.smoothing_alpha);
        if !saw_prior {
            prior = derived_prior;
        }
        if !saw_transition {
            transition = derived_transition;
        }

        for (feature, dist) in &prior {
            let sum: f64 = dist.values().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(ModelError::Unnormalized { what: format!("feature `{feature}`"), sum });
            }
        }
        for (current, dist) in &transition {
            let sum: f64 = dist.values().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(ModelError::Unnormalized { what: format!("tag `{current}`"), sum });
            }
        }

        Ok(Model {
            counts,
            prior,
            transition,
            smoothing_alpha: options.smoothing_alpha,
            floor_epsilon: options.floor_epsilon,
        })
    }
}
