//! Scoring tagged-and-parsed output against gold annotations.
//!
//! Sentences are bucketed by the sentence-level conjunctions in their gold
//! tags, and each bucket accumulates three counts: actual sentences,
//! sentences whose predicted tag sequence the grammar recognized, and
//! recognized sentences that were also correct. Precision, recall, and F1
//! are percentages derived from those counts and rounded half-up to two
//! decimals, so the text and JSON reports carry identical numbers.

use std::fmt;

use crate::corpus::{AnnotatedSentence, ChunkType, FunctionTag};
use crate::grammar::Grammar;
use crate::model::Model;
use crate::parser::{classify_sentence_type, recognize, SentenceType};
use crate::tagger::{decode, DecodeMode, DecodeOptions};

/// What makes a recognized sentence count as correct.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Correctness {
    /// Recognition is enough: every accepted sentence is correct.
    Accept,
    /// The predicted tags must equal the gold tags exactly.
    #[default]
    Match,
}

impl Correctness {
    pub fn name(self) -> &'static str {
        match self {
            Correctness::Accept => "accept",
            Correctness::Match => "match",
        }
    }
}

impl fmt::Display for Correctness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Evaluation configuration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalOptions {
    pub mode: DecodeMode,
    pub correctness: Correctness,
}

/// Sentence counts for one bucket.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalCounts {
    pub actual: u64,
    pub recognized: u64,
    pub correct: u64,
}

/// Percentages rounded half-up to two decimals; `None` where the defining
/// ratio has a zero denominator.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Metrics {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

/// `100 * numerator / denominator` rounded half-up to two decimals, done in
/// integer arithmetic so display never depends on float rounding.
fn display_percent(numerator: u64, denominator: u64) -> Option<f64> {
    if denominator == 0 {
        return None;
    }
    let hundredths = (numerator * 20_000 + denominator) / (2 * denominator);
    Some(hundredths as f64 / 100.0)
}

/// Precision `correct/recognized`, recall `correct/actual`, and their
/// harmonic mean `200*correct/(actual+recognized)`, as display-rounded
/// percentages.
pub fn metrics(counts: &EvalCounts) -> Metrics {
    Metrics {
        precision: display_percent(counts.correct, counts.recognized),
        recall: display_percent(counts.correct, counts.actual),
        f1: display_percent(2 * counts.correct, counts.actual + counts.recognized),
    }
}

/// Problems in the gold annotations that make evaluation impossible.
/// Indices are zero-based positions in the evaluated slice and sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalError {
    MissingGoldTag { sentence: usize, chunk: usize },
    /// Null on a content chunk; it only ever tags sentence-final particles.
    UnexpectedNull { sentence: usize, chunk: usize },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::MissingGoldTag { sentence, chunk } => {
                write!(f, "sentence {sentence}, chunk {chunk}: missing gold tag")
            }
            EvalError::UnexpectedNull { sentence, chunk } => {
                write!(f, "sentence {sentence}, chunk {chunk}: Null gold tag on a content chunk")
            }
        }
    }
}

impl std::error::Error for EvalError {}

/// Per-bucket and overall counts for one evaluation run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalReport {
    /// One entry per sentence type, in declaration order, including empty
    /// buckets.
    pub rows: Vec<(SentenceType, EvalCounts)>,
    pub overall: EvalCounts,
}

fn type_label(sentence_type: SentenceType) -> &'static str {
    match sentence_type {
        SentenceType::Simple => "Simple",
        SentenceType::ComplexCcp => "Complex joined with CCP",
        SentenceType::ComplexCca => "Complex joined with CCA",
        SentenceType::ComplexCcs => "Complex joined with CCS",
        SentenceType::Other => "Other",
    }
}

fn percent_cell(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.2}%"),
        None => "-".to_string(),
    }
}

impl EvalReport {
    /// Buckets that saw at least one sentence, in declaration order.
    fn occupied(&self) -> impl Iterator<Item = &(SentenceType, EvalCounts)> {
        self.rows.iter().filter(|(_, counts)| counts.actual > 0)
    }

    /// Renders an aligned text table: one row per non-empty bucket plus an
    /// overall row.
    pub fn render_text(&self) -> String {
        let header =
            ["sentence type", "actual", "recognized", "correct", "precision", "recall", "f1"];
        let mut table: Vec<[String; 7]> = Vec::new();
        let mut push_row = |label: &str, counts: &EvalCounts| {
            let m = metrics(counts);
            table.push([
                label.to_string(),
                counts.actual.to_string(),
                counts.recognized.to_string(),
                counts.correct.to_string(),
                percent_cell(m.precision),
                percent_cell(m.recall),
                percent_cell(m.f1),
            ]);
        };
        for (sentence_type, counts) in self.occupied() {
            push_row(type_label(*sentence_type), counts);
        }
        push_row("Overall", &self.overall);

        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for row in &table {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }

        let mut out = String::new();
        let mut emit = |cells: [&str; 7]| {
            for (i, (cell, &width)) in cells.iter().zip(&widths).enumerate() {
                if i > 0 {
                    out.push_str("  ");
                }
                if i == 0 {
                    out.push_str(&format!("{cell:<width$}"));
                } else {
                    out.push_str(&format!("{cell:>width$}"));
                }
            }
            while out.ends_with(' ') {
                out.pop();
            }
            out.push('\n');
        };
        emit(header);
        for row in &table {
            emit([&row[0], &row[1], &row[2], &row[3], &row[4], &row[5], &row[6]]);
        }
        out
    }

    /// Renders the same rows and numbers as [`render_text`] as one JSON
    /// object; undefined metrics become null.
    pub fn render_json(&self) -> String {
        let row_value = |sentence_type: Option<SentenceType>, counts: &EvalCounts| {
            let m = metrics(counts);
            let mut value = serde_json::json!({
                "actual": counts.actual,
                "recognized": counts.recognized,
                "correct": counts.correct,
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
            });
            if let Some(t) = sentence_type {
                value["type"] = serde_json::Value::String(t.name().to_string());
            }
            value
        };
        let rows: Vec<serde_json::Value> = self
            .occupied()
            .map(|(sentence_type, counts)| row_value(Some(*sentence_type), counts))
            .collect();
        serde_json::json!({
            "rows": rows,
            "overall": row_value(None, &self.overall),
        })
        .to_string()
    }
}

/// Tags every gold sentence with `model`, checks the predicted tag sequence
/// against `grammar`, and scores the result per sentence type. A sentence is
/// recognized when the grammar accepts the predicted sequence, and correct
/// per [`Correctness`]. Buckets come from the gold tags, so every content
/// chunk must carry a non-Null gold tag.
pub fn evaluate(
    model: &Model,
    grammar: &Grammar,
    gold: &[AnnotatedSentence],
    options: &EvalOptions,
) -> Result<EvalReport, EvalError> {
    let mut buckets: Vec<(SentenceType, EvalCounts)> = SentenceType::ALL
        .iter()
        .map(|t| (*t, EvalCounts::default()))
        .collect();
    let mut overall = EvalCounts::default();

    for (sentence_index, sentence) in gold.iter().enumerate() {
        let mut gold_tags: Vec<FunctionTag> = Vec::new();
        for (chunk_index, chunk) in sentence.chunks().iter().enumerate() {
            if chunk.chunk_type() == ChunkType::SFC {
                continue;
            }
            match chunk.gold_tag() {
                None => {
                    return Err(EvalError::MissingGoldTag {
                        sentence: sentence_index,
                        chunk: chunk_index,
                    })
                }
                Some(tag) if tag.is_null() => {
                    return Err(EvalError::UnexpectedNull {
                        sentence: sentence_index,
                        chunk: chunk_index,
                    })
                }
                Some(tag) => gold_tags.push(tag),
            }
        }

        let tagged = decode(
            model,
            sentence,
            &DecodeOptions { mode: options.mode, fallback: None },
        );
        let predicted = tagged.tags();
        let recognized = recognize(grammar, &predicted);
        let correct = recognized
            && match options.correctness {
                Correctness::Accept => true,
                Correctness::Match => predicted == gold_tags,
            };

        let bucket = classify_sentence_type(&gold_tags);
        let counts = &mut buckets
            .iter_mut()
            .find(|(t, _)| *t == bucket)
            .expect("every sentence type has a bucket")
            .1;
        counts.actual += 1;
        overall.actual += 1;
        if recognized {
            counts.recognized += 1;
            overall.recognized += 1;
        }
        if correct {
            counts.correct += 1;
            overall.correct += 1;
        }
    }

    Ok(EvalReport { rows: buckets, overall })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{load_corpus, PosFeature};
    use crate::grammar::default_grammar;
    use crate::model::{train, CountTables, Model, TrainOptions};

    fn counts(actual: u64, recognized: u64, correct: u64) -> EvalCounts {
        EvalCounts { actual, recognized, correct }
    }

    #[test]
    fn metric_arithmetic_on_table_sized_counts() {
        let m = metrics(&counts(720, 693, 670));
        assert_eq!(m.precision, Some(96.68));
        assert_eq!(m.recall, Some(93.06));
        assert_eq!(m.f1, Some(94.83));

        let m = metrics(&counts(445, 420, 394));
        assert_eq!(m.precision, Some(93.81));
        assert_eq!(m.recall, Some(88.54));
        assert_eq!(m.f1, Some(91.10));

        let m = metrics(&counts(370, 351, 319));
        assert_eq!(m.precision, Some(90.88));
        assert_eq!(m.recall, Some(86.22));
        assert_eq!(m.f1, Some(88.49));

        let m = metrics(&counts(665, 640, 593));
        assert_eq!(m.precision, Some(92.66));
        assert_eq!(m.recall, Some(89.17));
        assert_eq!(m.f1, Some(90.88));
    }

    #[test]
    fn rounding_is_half_up_at_two_decimals() {
        // 1/8 = 12.5% exactly.
        assert_eq!(display_percent(1, 8), Some(12.50));
        // 1/800 = 0.125%: the third decimal is an exact 5, which rounds up.
        assert_eq!(display_percent(1, 800), Some(0.13));
        assert_eq!(display_percent(2, 3), Some(66.67));
        assert_eq!(display_percent(1, 3), Some(33.33));
        assert_eq!(display_percent(0, 7), Some(0.00));
        assert_eq!(display_percent(7, 7), Some(100.00));
    }

    #[test]
    fn zero_denominators_are_undefined() {
        let m = metrics(&counts(0, 0, 0));
        assert_eq!(m, Metrics { precision: None, recall: None, f1: None });

        let m = metrics(&counts(5, 0, 0));
        assert_eq!(m.precision, None);
        assert_eq!(m.recall, Some(0.00));
        assert_eq!(m.f1, Some(0.00));
    }

    /// Model whose priors are deterministic per feature: x.a tags Subj,
    /// x.b tags Active, x.c tags Obj.
    fn toy_model() -> Model {
        let mut tables = CountTables::default();
        let feat = |pos: &str, cat: &str| PosFeature::new(pos, Some(cat)).unwrap();
        tables.c_tag_feat.insert((FunctionTag::Subj, feat("x", "a")), 1);
        tables.c_tag_feat.insert((FunctionTag::Active, feat("x", "b")), 1);
        tables.c_tag_feat.insert((FunctionTag::Obj, feat("x", "c")), 1);
        tables.c_feat.insert(feat("x", "a"), 1);
        tables.c_feat.insert(feat("x", "b"), 1);
        tables.c_feat.insert(feat("x", "c"), 1);
        Model::from_counts(tables, &TrainOptions::default()).unwrap()
    }

    fn toy_gold() -> Vec<AnnotatedSentence> {
        let text = "\
NC@Subj[က/x.a]#VC@Active[ခ/x.b]။
NC@Subj[က/x.a]#VC@Active[ခ/x.b]။
NC@Subj[က/x.a]#VC@Active[ခ/x.b]။
NC@Subj[ဂ/x.c]#VC@Active[ခ/x.b]။
";
        load_corpus(text.as_bytes(), true).unwrap().into_sentences()
    }

    #[test]
    fn mistagged_sentences_lower_recall_not_precision() {
        // The fourth sentence's subject chunk carries feature x.c, which the
        // model has only seen tagged Obj; [Obj, Active] is rejected by the
        // grammar, so that sentence is neither recognized nor correct.
        let report = evaluate(
            &toy_model(),
            &default_grammar(),
            &toy_gold(),
            &EvalOptions::default(),
        )
        .unwrap();

        assert_eq!(report.overall, counts(4, 3, 3));
        let simple = report.rows.iter().find(|(t, _)| *t == SentenceType::Simple).unwrap().1;
        assert_eq!(simple, counts(4, 3, 3));
        for (sentence_type, bucket) in &report.rows {
            if *sentence_type != SentenceType::Simple {
                assert_eq!(*bucket, EvalCounts::default());
            }
        }

        let m = metrics(&report.overall);
        assert_eq!(m.precision, Some(100.00));
        assert_eq!(m.recall, Some(75.00));
        assert_eq!(m.f1, Some(85.71));
    }

    #[test]
    fn self_evaluation_on_unambiguous_data_is_perfect() {
        let text = "\
NC@Subj[နေ/n.a]#VC@Active[ထွက်/v.common]#SFC@Null[သည်/sf]။
NC@PSubj[လ/n.b]#PPC@SubjP[က/ppm.c]#AC@Ada[လှ/adj.x]။
NC@Subj[နေ/n.a]#VC@Active[ထွက်/v.common]#CC@CCS[၍/cc.sent]#NC@Subj[မိုး/n.a]#VC@Active[ရွာ/v.common]။
";
        let corpus = load_corpus(text.as_bytes(), true).unwrap();
        let sentences = corpus.into_sentences();
        let model = train(&sentences, &TrainOptions::default()).unwrap();

        for mode in [DecodeMode::Greedy, DecodeMode::Exact] {
            let report = evaluate(
                &model,
                &default_grammar(),
                &sentences,
                &EvalOptions { mode, correctness: Correctness::Match },
            )
            .unwrap();
            assert_eq!(report.overall, counts(3, 3, 3));
            let m = metrics(&report.overall);
            assert_eq!(m.precision, Some(100.00));
            assert_eq!(m.recall, Some(100.00));
            assert_eq!(m.f1, Some(100.00));

            let ccs = report.rows.iter().find(|(t, _)| *t == SentenceType::ComplexCcs).unwrap().1;
            assert_eq!(ccs, counts(1, 1, 1));
        }
    }

    #[test]
    fn accept_counts_in_language_mistags_as_correct() {
        // Predicted [Subj, Ada] is in the grammar but differs from the gold
        // [Subj, Active].
        let mut tables = CountTables::default();
        let feat = |pos: &str, cat: &str| PosFeature::new(pos, Some(cat)).unwrap();
        tables.c_tag_feat.insert((FunctionTag::Subj, feat("x", "a")), 1);
        tables.c_tag_feat.insert((FunctionTag::Ada, feat("x", "b")), 1);
        tables.c_feat.insert(feat("x", "a"), 1);
        tables.c_feat.insert(feat("x", "b"), 1);
        let model = Model::from_counts(tables, &TrainOptions::default()).unwrap();

        let gold = load_corpus("NC@Subj[က/x.a]#VC@Active[ခ/x.b]။".as_bytes(), true)
            .unwrap()
            .into_sentences();
        let grammar = default_grammar();

        let strict = evaluate(
            &model,
            &grammar,
            &gold,
            &EvalOptions { mode: DecodeMode::Greedy, correctness: Correctness::Match },
        )
        .unwrap();
        assert_eq!(strict.overall, counts(1, 1, 0));

        let lenient = evaluate(
            &model,
            &grammar,
            &gold,
            &EvalOptions { mode: DecodeMode::Greedy, correctness: Correctness::Accept },
        )
        .unwrap();
        assert_eq!(lenient.overall, counts(1, 1, 1));
    }

    #[test]
    fn gold_annotation_problems_are_reported() {
        let gold = load_corpus("NC@Subj[က/x.a]#VC[ခ/x.b]။".as_bytes(), true)
            .unwrap()
            .into_sentences();
        let err = evaluate(&toy_model(), &default_grammar(), &gold, &EvalOptions::default())
            .unwrap_err();
        assert_eq!(err, EvalError::MissingGoldTag { sentence: 0, chunk: 1 });

        let gold = load_corpus("NC@Null[က/x.a]#VC@Active[ခ/x.b]။".as_bytes(), true)
            .unwrap()
            .into_sentences();
        let err = evaluate(&toy_model(), &default_grammar(), &gold, &EvalOptions::default())
            .unwrap_err();
        assert_eq!(err, EvalError::UnexpectedNull { sentence: 0, chunk: 0 });
    }

    #[test]
    fn text_report_is_aligned_and_skips_empty_buckets() {
        let report = evaluate(
            &toy_model(),
            &default_grammar(),
            &toy_gold(),
            &EvalOptions::default(),
        )
        .unwrap();
        let text = report.render_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3, "header, one bucket, overall:\n{text}");
        assert!(lines[0].starts_with("sentence type"));
        assert!(lines[1].starts_with("Simple"));
        assert!(lines[2].starts_with("Overall"));
        assert!(lines[1].contains("100.00%"));
        assert!(lines[1].contains("75.00%"));
        assert!(lines[1].contains("85.71%"));
        assert!(!text.contains("Complex"));

        // Columns line up: every percent column ends at the same offset.
        assert_eq!(lines[1].len(), lines[2].len());
    }

    #[test]
    fn undefined_metrics_render_as_dashes_and_nulls() {
        let report = EvalReport {
            rows: SentenceType::ALL.iter().map(|t| (*t, EvalCounts::default())).collect(),
            overall: EvalCounts::default(),
        };
        let text = report.render_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2, "header and overall only:\n{text}");
        assert!(lines[1].contains('-'));

        let value: serde_json::Value = serde_json::from_str(&report.render_json()).unwrap();
        assert_eq!(value["rows"].as_array().unwrap().len(), 0);
        assert!(value["overall"]["precision"].is_null());
    }

    #[test]
    fn json_report_matches_text_numbers() {
        let report = evaluate(
            &toy_model(),
            &default_grammar(),
            &toy_gold(),
            &EvalOptions::default(),
        )
        .unwrap();
        let value: serde_json::Value = serde_json::from_str(&report.render_json()).unwrap();
        let rows = value["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0]["type"], "simple");
        assert_eq!(rows[0]["actual"], 4);
        assert_eq!(rows[0]["recognized"], 3);
        assert_eq!(rows[0]["correct"], 3);
        assert_eq!(rows[0]["precision"], 100.0);
        assert_eq!(rows[0]["recall"], 75.0);
        assert_eq!(rows[0]["f1"], 85.71);
        assert_eq!(value["overall"]["f1"], 85.71);
    }
}
