//! Recognition and parsing of function-tag sequences against a grammar.
//!
//! Recognition runs an Earley chart over the tag sequence (the grammars here
//! are epsilon-free, which keeps completion single-pass). Parse trees are
//! enumerated by recursive backtracking in a fixed order — production order
//! first, then ascending split points — so output is deterministic. Tree
//! enumeration is capped because ambiguous grammars can have exponentially
//! many (or, with unit cycles, infinitely many) trees for one input.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::FunctionTag;
use crate::grammar::{Grammar, Production, Symbol};

/// Default cap on the number of parse trees returned per input.
pub const DEFAULT_TREE_CAP: usize = 64;

/// A node in a parse tree. Leaves are terminals spanning one tag; internal
/// nodes are nonterminals whose children spell out one production.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseTree {
    #[serde(flatten)]
    pub symbol: Symbol,
    pub span: (usize, usize),
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ParseTree>,
}

impl ParseTree {
    pub fn leaf(tag: FunctionTag, position: usize) -> ParseTree {
        ParseTree { symbol: Symbol::Terminal(tag), span: (position, position + 1), children: Vec::new() }
    }

    pub fn node(name: impl Into<String>, span: (usize, usize), children: Vec<ParseTree>) -> ParseTree {
        ParseTree { symbol: Symbol::Nonterminal(name.into()), span, children }
    }

    /// The terminal sequence at the leaves, left to right.
    pub fn fringe(&self) -> Vec<FunctionTag> {
        let mut tags = Vec::new();
        self.collect_fringe(&mut tags);
        tags
    }

    fn collect_fringe(&self, out: &mut Vec<FunctionTag>) {
        match &self.symbol {
            Symbol::Terminal(tag) => out.push(*tag),
            Symbol::Nonterminal(_) => {
                for child in &self.children {
                    child.collect_fringe(out);
                }
            }
        }
    }
}

/// Everything `parse` produced for one input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseOutcome {
    /// Parse trees in enumeration order, at most the requested cap.
    pub trees: Vec<ParseTree>,
    /// True when trees were cut off, either by the cap or because a
    /// derivation cycle (infinite tree family) was detected.
    pub truncated: bool,
}

impl ParseOutcome {
    pub fn accepted(&self) -> bool {
        !self.trees.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Earley recognition
// ---------------------------------------------------------------------------

/// A dotted production instance: production index, dot offset, origin.
type Item = (usize, usize, usize);

/// Builds the full chart with every production predicted at position 0, so
/// completed items record every constituent that starts at the first tag.
fn earley_chart(grammar: &Grammar, tags: &[FunctionTag]) -> Vec<Vec<Item>> {
    let productions = grammar.productions();
    let n = tags.len();
    let mut chart: Vec<Vec<Item>> = vec![Vec::new(); n + 1];
    let mut seen: Vec<HashSet<Item>> = vec![HashSet::new(); n + 1];

    for p in 0..productions.len() {
        chart[0].push((p, 0, 0));
        seen[0].insert((p, 0, 0));
    }

    for i in 0..=n {
        let mut cursor = 0;
        while cursor < chart[i].len() {
            let (p, dot, origin) = chart[i][cursor];
            cursor += 1;
            let rhs = productions[p].rhs();
            match rhs.get(dot) {
                Some(Symbol::Nonterminal(name)) => {
                    for (q, candidate) in productions.iter().enumerate() {
                        if candidate.lhs() == name && seen[i].insert((q, 0, i)) {
                            chart[i].push((q, 0, i));
                        }
                    }
                }
                Some(Symbol::Terminal(tag)) => {
                    if i < n && tags[i] == *tag && seen[i + 1].insert((p, dot + 1, origin)) {
                        chart[i + 1].push((p, dot + 1, origin));
                    }
                }
                None => {
                    // Epsilon-free productions guarantee origin < i here, so
                    // chart[origin] is complete and safe to scan.
                    let lhs = productions[p].lhs();
                    let mut advanced = Vec::new();
                    for &(q, qdot, qorigin) in &chart[origin] {
                        if let Some(Symbol::Nonterminal(waiting)) = productions[q].rhs().get(qdot) {
                            if waiting == lhs {
                                advanced.push((q, qdot + 1, qorigin));
                            }
                        }
                    }
                    for item in advanced {
                        if seen[i].insert(item) {
                            chart[i].push(item);
                        }
                    }
                }
            }
        }
    }
    chart
}

/// Does the grammar's start symbol derive exactly this tag sequence?
pub fn recognize(grammar: &Grammar, tags: &[FunctionTag]) -> bool {
    if tags.is_empty() {
        return false;
    }
    let chart = earley_chart(grammar, tags);
    let productions = grammar.productions();
    chart[tags.len()].iter().any(|&(p, dot, origin)| {
        origin == 0 && dot == productions[p].rhs().len() && productions[p].lhs() == grammar.start()
    })
}

/// Length of the longest prefix of `tags` that forms a complete constituent
/// under any nonterminal. Zero means not even the first tag starts one; on
/// accepted inputs this is the full length. Useful as a rejection diagnostic.
pub fn longest_recognized_prefix(grammar: &Grammar, tags: &[FunctionTag]) -> usize {
    if tags.is_empty() {
        return 0;
    }
    let chart = earley_chart(grammar, tags);
    let productions = grammar.productions();
    (0..=tags.len())
        .rev()
        .find(|&j| {
            chart[j]
                .iter()
                .any(|&(p, dot, origin)| origin == 0 && dot == productions[p].rhs().len())
        })
        .unwrap_or(0)
}

// ---------------------------------------------------------------------------
// Tree enumeration
// ---------------------------------------------------------------------------

struct TreeSearch<'a> {
    by_lhs: BTreeMap<&'a str, Vec<&'a Production>>,
    tags: &'a [FunctionTag],
    limit: usize,
    cycle_cut: bool,
}

impl<'a> TreeSearch<'a> {
    fn new(grammar: &'a Grammar, tags: &'a [FunctionTag], limit: usize) -> TreeSearch<'a> {
        let mut by_lhs: BTreeMap<&str, Vec<&Production>> = BTreeMap::new();
        for production in grammar.productions() {
            by_lhs.entry(production.lhs()).or_default().push(production);
        }
        TreeSearch { by_lhs, tags, limit, cycle_cut: false }
    }

    /// Trees rooted at `name` spanning tags[i..j], in enumeration order,
    /// at most `limit` of them. `path` holds the (nonterminal, span) frames
    /// above us; revisiting one means a unit-production cycle.
    fn trees_for(
        &mut self,
        name: &str,
        i: usize,
        j: usize,
        path: &mut Vec<(String, usize, usize)>,
    ) -> Vec<ParseTree> {
        let frame = (name.to_string(), i, j);
        if path.contains(&frame) {
            self.cycle_cut = true;
            return Vec::new();
        }
        let Some(productions) = self.by_lhs.get(name) else {
            return Vec::new();
        };
        let productions: Vec<&Production> = productions.clone();

        path.push(frame);
        let mut trees = Vec::new();
        for production in productions {
            if trees.len() >= self.limit {
                break;
            }
            let remaining = self.limit - trees.len();
            for children in self.sequences(production.rhs(), i, j, path, remaining) {
                trees.push(ParseTree::node(name, (i, j), children));
            }
        }
        path.pop();
        trees
    }

    /// Ways to split tags[i..j] across `symbols`, ascending split points
    /// first, at most `limit` of them.
    fn sequences(
        &mut self,
        symbols: &[Symbol],
        i: usize,
        j: usize,
        path: &mut Vec<(String, usize, usize)>,
        limit: usize,
    ) -> Vec<Vec<ParseTree>> {
        if limit == 0 {
            return Vec::new();
        }
        let Some((first, rest)) = symbols.split_first() else {
            return if i == j { vec![Vec::new()] } else { Vec::new() };
        };
        // A suffix of k symbols needs at least k tags.
        if j - i < symbols.len() {
            return Vec::new();
        }

        let mut results = Vec::new();
        match first {
            Symbol::Terminal(tag) => {
                if self.tags[i] == *tag {
                    for mut tail in self.sequences(rest, i + 1, j, path, limit) {
                        tail.insert(0, ParseTree::leaf(*tag, i));
                        results.push(tail);
                    }
                }
            }
            Symbol::Nonterminal(name) => {
                let max_first_end = j - rest.len();
                for m in (i + 1)..=max_first_end {
                    if results.len() >= limit {
                        break;
                    }
                    let heads = self.trees_for(name, i, m, path);
                    if heads.is_empty() {
                        continue;
                    }
                    let tails = self.sequences(rest, m, j, path, limit - results.len());
                    'combine: for head in &heads {
                        for tail in &tails {
                            let mut children = Vec::with_capacity(1 + tail.len());
                            children.push(head.clone());
                            children.extend(tail.iter().cloned());
                            results.push(children);
                            if results.len() >= limit {
                                break 'combine;
                            }
                        }
                    }
                }
            }
        }
        results
    }
}

/// Parses with an explicit cap on returned trees.
pub fn parse_with_cap(grammar: &Grammar, tags: &[FunctionTag], cap: usize) -> ParseOutcome {
    if tags.is_empty() || cap == 0 {
        return ParseOutcome { trees: Vec::new(), truncated: false };
    }
    let mut search = TreeSearch::new(grammar, tags, cap + 1);
    let mut path = Vec::new();
    let mut trees = search.trees_for(grammar.start(), 0, tags.len(), &mut path);
    let over_cap = trees.len() > cap;
    trees.truncate(cap);
    ParseOutcome { trees, truncated: over_cap || search.cycle_cut }
}

/// Parses with [`DEFAULT_TREE_CAP`].
pub fn parse(grammar: &Grammar, tags: &[FunctionTag]) -> ParseOutcome {
    parse_with_cap(grammar, tags, DEFAULT_TREE_CAP)
}

// ---------------------------------------------------------------------------
// Tree validation
// ---------------------------------------------------------------------------

/// Why a tree failed validation against a grammar and tag sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeError {
    /// Root is not the start symbol spanning the whole input.
    Root,
    /// A leaf does not match the tag at its position.
    Terminal { position: usize },
    /// An internal node's children do not partition its span.
    Spans { span: (usize, usize) },
    /// An internal node does not correspond to any grammar production.
    Production { lhs: String, span: (usize, usize) },
}

impl fmt::Display for TreeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeError::Root => f.write_str("root is not the start symbol over the full input"),
            TreeError::Terminal { position } => {
                write!(f, "leaf at position {position} does not match the input tag")
            }
            TreeError::Spans { span } => {
                write!(f, "children do not partition the span {}..{}", span.0, span.1)
            }
            TreeError::Production { lhs, span } => write!(
                f,
                "node `{lhs}` over {}..{} matches no grammar production",
                span.0, span.1
            ),
        }
    }
}

impl std::error::Error for TreeError {}

/// Checks that `tree` is a valid parse of `tags` under `grammar`: correct
/// root, leaves spelling the input, spans partitioned, and every internal
/// node an instance of a grammar production.
pub fn validate_tree(
    grammar: &Grammar,
    tags: &[FunctionTag],
    tree: &ParseTree,
) -> Result<(), TreeError> {
    if tree.span != (0, tags.len()) || tree.symbol != Symbol::Nonterminal(grammar.start().to_string()) {
        return Err(TreeError::Root);
    }
    validate_node(grammar, tags, tree)
}

fn validate_node(grammar: &Grammar, tags: &[FunctionTag], node: &ParseTree) -> Result<(), TreeError> {
    let (start, end) = node.span;
    match &node.symbol {
        Symbol::Terminal(tag) => {
            if end != start + 1 || !node.children.is_empty() || tags.get(start) != Some(tag) {
                return Err(TreeError::Terminal { position: start });
            }
            Ok(())
        }
        Symbol::Nonterminal(name) => {
            let mut cursor = start;
            for child in &node.children {
                if child.span.0 != cursor || child.span.1 <= child.span.0 {
                    return Err(TreeError::Spans { span: node.span });
                }
                cursor = child.span.1;
            }
            if cursor != end || node.children.is_empty() {
                return Err(TreeError::Spans { span: node.span });
            }
            let rhs: Vec<Symbol> = node.children.iter().map(|c| c.symbol.clone()).collect();
            let matches = grammar
                .productions()
                .iter()
                .any(|p| p.lhs() == name && p.rhs() == rhs.as_slice());
            if !matches {
                return Err(TreeError::Production { lhs: name.clone(), span: node.span });
            }
            for child in &node.children {
                validate_node(grammar, tags, child)?;
            }
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Derivations
// ---------------------------------------------------------------------------

/// One leftmost-derivation step: the sentential form before the rewrite, the
/// production applied, and the index of the rewritten nonterminal (always the
/// leftmost one).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivationStep {
    pub sentential_form: Vec<Symbol>,
    pub rule_applied: Production,
    pub position: usize,
}

fn production_of(node: &ParseTree) -> Production {
    let Symbol::Nonterminal(name) = &node.symbol else {
        unreachable!("only internal nodes map to productions");
    };
    let rhs = node.children.iter().map(|c| c.symbol.clone()).collect();
    Production::new(name.clone(), rhs).expect("parse-tree nodes always have children")
}

fn preorder_internal<'t>(node: &'t ParseTree, out: &mut Vec<&'t ParseTree>) {
    if node.symbol.is_terminal() {
        return;
    }
    out.push(node);
    for child in &node.children {
        preorder_internal(child, out);
    }
}

/// The leftmost derivation encoded by a parse tree: internal nodes in
/// preorder, each rewriting the leftmost nonterminal of the current form.
pub fn derivation(tree: &ParseTree) -> Vec<DerivationStep> {
    let mut nodes = Vec::new();
    preorder_internal(tree, &mut nodes);

    let mut form = vec![tree.symbol.clone()];
    let mut steps = Vec::with_capacity(nodes.len());
    for node in nodes {
        let position = form
            .iter()
            .position(|s| !s.is_terminal())
            .expect("replay must find a nonterminal for every internal node");
        debug_assert_eq!(form[position].name(), node.symbol.name());
        let rule = production_of(node);
        steps.push(DerivationStep { sentential_form: form.clone(), rule_applied: rule.clone(), position });
        form.splice(position..=position, rule.rhs().iter().cloned());
    }
    steps
}

fn render_form(form: &[Symbol]) -> String {
    form.iter().map(Symbol::to_string).collect::<Vec<_>>().join(" ")
}

/// Renders a derivation as one line per sentential form:
/// the start symbol, then `=> form  [rule]` for each step.
pub fn render_derivation(tree: &ParseTree) -> String {
    let steps = derivation(tree);
    let mut out = tree.symbol.name().to_string();
    out.push('\n');
    let mut form = vec![tree.symbol.clone()];
    for step in &steps {
        form.splice(step.position..=step.position, step.rule_applied.rhs().iter().cloned());
        out.push_str("=> ");
        out.push_str(&render_form(&form));
        out.push_str("  [");
        out.push_str(&step.rule_applied.to_string());
        out.push_str("]\n");
    }
    out
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

/// Output formats for [`render_tree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeFormat {
    /// Indented outline, two spaces per level, terminals quoted.
    Ascii,
    /// Single-line JSON matching the `ParseTree` serde shape.
    Json,
    /// Graphviz digraph, terminals drawn as boxes.
    Dot,
}

fn render_ascii(node: &ParseTree, depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
    match &node.symbol {
        Symbol::Terminal(tag) => {
            out.push('\'');
            out.push_str(tag.name());
            out.push('\'');
        }
        Symbol::Nonterminal(name) => out.push_str(name),
    }
    out.push('\n');
    for child in &node.children {
        render_ascii(child, depth + 1, out);
    }
}

fn render_dot(node: &ParseTree, ids: &mut usize, out: &mut String) -> usize {
    let id = *ids;
    *ids += 1;
    match &node.symbol {
        Symbol::Terminal(tag) => {
            out.push_str(&format!("  n{id} [label=\"{}\", shape=box];\n", tag.name()));
        }
        Symbol::Nonterminal(name) => {
            out.push_str(&format!("  n{id} [label=\"{name}\"];\n"));
        }
    }
    for child in &node.children {
        let child_id = render_dot(child, ids, out);
        out.push_str(&format!("  n{id} -> n{child_id};\n"));
    }
    id
}

/// Renders a parse tree in the requested format.
pub fn render_tree(tree: &ParseTree, format: TreeFormat) -> String {
    match format {
        TreeFormat::Ascii => {
            let mut out = String::new();
            render_ascii(tree, 0, &mut out);
            out
        }
        TreeFormat::Json => {
            serde_json::to_string(tree).expect("parse trees always serialize")
        }
        TreeFormat::Dot => {
            let mut out = String::from("digraph parse {\n");
            let mut ids = 0;
            render_dot(tree, &mut ids, &mut out);
            out.push_str("}\n");
            out
        }
    }
}

// ---------------------------------------------------------------------------
// Sentence types
// ---------------------------------------------------------------------------

/// Structural class of a sentence, read off its conjunction tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SentenceType {
    Simple,
    ComplexCcp,
    ComplexCca,
    ComplexCcs,
    Other,
}

impl SentenceType {
    pub const ALL: [SentenceType; 5] = [
        SentenceType::Simple,
        SentenceType::ComplexCcp,
        SentenceType::ComplexCca,
        SentenceType::ComplexCcs,
        SentenceType::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SentenceType::Simple => "simple",
            SentenceType::ComplexCcp => "complex-CCP",
            SentenceType::ComplexCca => "complex-CCA",
            SentenceType::ComplexCcs => "complex-CCS",
            SentenceType::Other => "other",
        }
    }
}

impl fmt::Display for SentenceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Classifies a tag sequence by its sentence-joining conjunctions. CCS wins
/// over CCP over CCA when several appear; CCM alone lands in `Other`; no
/// sentence-level conjunction (chunk-level CCC does not count) means simple.
pub fn classify_sentence_type(tags: &[FunctionTag]) -> SentenceType {
    let has = |tag: FunctionTag| tags.contains(&tag);
    if has(FunctionTag::CCS) {
        SentenceType::ComplexCcs
    } else if has(FunctionTag::CCP) {
        SentenceType::ComplexCcp
    } else if has(FunctionTag::CCA) {
        SentenceType::ComplexCca
    } else if has(FunctionTag::CCM) {
        SentenceType::Other
    } else {
        SentenceType::Simple
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{default_grammar, load_grammar};

    fn tags(names: &[&str]) -> Vec<FunctionTag> {
        names.iter().map(|n| n.parse().unwrap()).collect()
    }

    #[test]
    fn recognizes_core_sentence_shapes() {
        let g = default_grammar();
        for accepted in [
            vec!["Subj", "Active"],
            vec!["Subj", "Obj", "Active"],
            vec!["PSubj", "SubjP", "PObj", "ObjP", "PPcomplO", "PcomplOP", "Active"],
            vec!["Subj", "Active", "CCP", "Subj", "Active"],
            vec!["Subj", "Active", "CCA", "PSubj", "SubjP", "Ada"],
            vec!["Subj", "Ada", "CCS", "PSubj", "SubjP", "PObj", "ObjP", "Active"],
            vec!["Subj", "PcomplS", "Active"],
            vec!["PCom", "ComP", "PPla", "PlaP", "Active"],
            vec!["Subj", "Obj", "PPla", "PlaP", "Active"],
            vec!["Ada"],
        ] {
            assert!(recognize(&g, &tags(&accepted)), "should accept {accepted:?}");
        }
    }

    #[test]
    fn rejects_out_of_language_sequences() {
        let g = default_grammar();
        for rejected in [
            vec!["Active", "Subj"],
            vec!["Subj", "PPla", "PlaP", "Active"],
            vec!["SubjP"],
            vec!["Subj", "Active", "CCP"],
        ] {
            assert!(!recognize(&g, &tags(&rejected)), "should reject {rejected:?}");
        }
        assert!(!recognize(&g, &[]));
    }

    #[test]
    fn simple_sentence_has_one_tree() {
        let g = default_grammar();
        let input = tags(&["Subj", "Active"]);
        let outcome = parse(&g, &input);
        assert_eq!(outcome.trees.len(), 1);
        assert!(!outcome.truncated);
        let tree = &outcome.trees[0];
        assert_eq!(tree.fringe(), input);
        validate_tree(&g, &input, tree).unwrap();
    }

    #[test]
    fn rejected_input_yields_no_trees() {
        let g = default_grammar();
        let input = tags(&["Active", "Subj"]);
        let outcome = parse(&g, &input);
        assert!(outcome.trees.is_empty());
        assert!(!outcome.truncated);
        assert_eq!(longest_recognized_prefix(&g, &input), 1);
    }

    #[test]
    fn prefix_diagnostics() {
        let g = default_grammar();
        assert_eq!(longest_recognized_prefix(&g, &tags(&["SubjP"])), 0);
        assert_eq!(longest_recognized_prefix(&g, &tags(&["Subj", "Active"])), 2);
        assert_eq!(
            longest_recognized_prefix(&g, &tags(&["Subj", "Active", "CCP"])),
            2
        );
        assert_eq!(longest_recognized_prefix(&g, &[]), 0);
    }

    #[test]
    fn ambiguity_is_capped_and_reported() {
        let g = load_grammar("Sentence -> Sentence Sentence | 'Active'\n").unwrap().grammar;
        let input = vec![FunctionTag::Active; 10];

        let capped = parse(&g, &input);
        assert_eq!(capped.trees.len(), DEFAULT_TREE_CAP);
        assert!(capped.truncated);

        // 10 leaves under a binary rule admit 4862 distinct trees.
        let full = parse_with_cap(&g, &input, 5000);
        assert_eq!(full.trees.len(), 4862);
        assert!(!full.truncated);
        for tree in &full.trees {
            validate_tree(&g, &input, tree).unwrap();
        }
    }

    #[test]
    fn unit_cycles_are_cut() {
        let g = load_grammar("Sentence -> A\nA -> Sentence | 'Active'\n").unwrap().grammar;
        let input = tags(&["Active"]);
        assert!(recognize(&g, &input));
        let outcome = parse(&g, &input);
        assert_eq!(outcome.trees.len(), 1);
        assert!(outcome.truncated, "cut cycles must be reported as truncation");
    }

    #[test]
    fn enumeration_order_is_deterministic() {
        let g = load_grammar("Sentence -> Sentence Sentence | 'Active'\n").unwrap().grammar;
        let input = vec![FunctionTag::Active; 4];
        let a = parse_with_cap(&g, &input, 100);
        let b = parse_with_cap(&g, &input, 100);
        assert_eq!(a, b);
        assert_eq!(a.trees.len(), 5);
        // Ascending split points: the first tree splits 1+3, the last 3+1.
        assert_eq!(a.trees[0].children[0].span, (0, 1));
        assert_eq!(a.trees[4].children[0].span, (0, 3));
    }

    #[test]
    fn derivation_is_leftmost() {
        let g = default_grammar();
        let input = tags(&["Subj", "Active", "CCP", "Subj", "Active"]);
        let outcome = parse(&g, &input);
        assert_eq!(outcome.trees.len(), 1);
        let steps = derivation(&outcome.trees[0]);
        assert_eq!(steps.len(), 7);
        assert_eq!(
            steps[0].rule_applied.to_string(),
            "Sentence -> I-sent 'CCP' I-sent"
        );
        assert_eq!(steps[0].sentential_form, vec![Symbol::nonterminal("Sentence")]);
        for step in &steps {
            let leftmost = step
                .sentential_form
                .iter()
                .position(|s| !s.is_terminal())
                .unwrap();
            assert_eq!(step.position, leftmost);
            assert_eq!(
                step.sentential_form[step.position].name(),
                step.rule_applied.lhs()
            );
        }
        // Replaying every step must spell out the input.
        let mut form = vec![Symbol::nonterminal("Sentence")];
        for step in &steps {
            assert_eq!(form, step.sentential_form);
            form.splice(step.position..=step.position, step.rule_applied.rhs().iter().cloned());
        }
        let spelled: Vec<FunctionTag> = form
            .iter()
            .map(|s| match s {
                Symbol::Terminal(tag) => *tag,
                Symbol::Nonterminal(_) => panic!("final form must be all terminals"),
            })
            .collect();
        assert_eq!(spelled, input);
    }

    #[test]
    fn derivation_rendering_shows_each_form() {
        let g = default_grammar();
        let outcome = parse(&g, &tags(&["Subj", "Active"]));
        let text = render_derivation(&outcome.trees[0]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "Sentence");
        assert_eq!(lines[1], "=> I-sent  [Sentence -> I-sent]");
        assert_eq!(lines[2], "=> Subj Active  [I-sent -> Subj Active]");
        assert_eq!(lines[3], "=> 'Subj' Active  [Subj -> 'Subj']");
        assert_eq!(lines[4], "=> 'Subj' 'Active'  [Active -> 'Active']");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn ascii_rendering_is_indented() {
        let g = default_grammar();
        let outcome = parse(&g, &tags(&["Subj", "Active"]));
        let text = render_tree(&outcome.trees[0], TreeFormat::Ascii);
        assert_eq!(
            text,
            "Sentence\n  I-sent\n    Subj\n      'Subj'\n    Active\n      'Active'\n"
        );
    }

    #[test]
    fn dot_rendering_boxes_terminals() {
        let g = default_grammar();
        let outcome = parse(&g, &tags(&["Subj", "Active"]));
        let text = render_tree(&outcome.trees[0], TreeFormat::Dot);
        assert!(text.starts_with("digraph parse {\n"));
        assert!(text.ends_with("}\n"));
        assert!(text.contains("n0 [label=\"Sentence\"];"));
        assert!(text.contains("shape=box"));
        assert!(text.contains("n0 -> n1;"));
    }

    #[test]
    fn json_rendering_round_trips() {
        let g = default_grammar();
        let input = tags(&["Subj", "Ada", "CCS", "PSubj", "SubjP", "PObj", "ObjP", "Active"]);
        let outcome = parse(&g, &input);
        assert_eq!(outcome.trees.len(), 1);
        let json = render_tree(&outcome.trees[0], TreeFormat::Json);
        let back: ParseTree = serde_json::from_str(&json).unwrap();
        assert_eq!(back, outcome.trees[0]);
        assert!(json.contains("\"kind\":\"nonterminal\""));
        assert!(json.contains("\"name\":\"Sentence\""));
    }

    #[test]
    fn validation_rejects_corrupt_trees() {
        let g = default_grammar();
        let input = tags(&["Subj", "Active"]);
        let good = parse(&g, &input).trees.remove(0);

        let mut wrong_leaf = good.clone();
        wrong_leaf.children[0].children[0].children[0] = ParseTree::leaf(FunctionTag::Obj, 0);
        assert_eq!(
            validate_tree(&g, &input, &wrong_leaf),
            Err(TreeError::Production { lhs: "Subj".to_string(), span: (0, 1) })
        );

        let mut wrong_span = good.clone();
        wrong_span.children[0].children[1].span = (1, 3);
        assert_eq!(
            validate_tree(&g, &input, &wrong_span),
            Err(TreeError::Spans { span: (0, 2) })
        );

        let not_start = good.children[0].clone();
        assert_eq!(validate_tree(&g, &input, &not_start), Err(TreeError::Root));

        let other_input = tags(&["Obj", "Active"]);
        assert_eq!(
            validate_tree(&g, &other_input, &good),
            Err(TreeError::Terminal { position: 0 })
        );
    }

    #[test]
    fn sentence_classification() {
        assert_eq!(classify_sentence_type(&tags(&["Subj", "Active"])), SentenceType::Simple);
        assert_eq!(
            classify_sentence_type(&tags(&["PSubj", "CCC", "PSubj", "SubjP", "Active"])),
            SentenceType::Simple
        );
        assert_eq!(
            classify_sentence_type(&tags(&["Subj", "Active", "CCP", "Subj", "Active"])),
            SentenceType::ComplexCcp
        );
        assert_eq!(
            classify_sentence_type(&tags(&["Subj", "Active", "CCA", "Subj", "Ada"])),
            SentenceType::ComplexCca
        );
        assert_eq!(
            classify_sentence_type(&tags(&["Subj", "Active", "CCS", "Subj", "Active"])),
            SentenceType::ComplexCcs
        );
        assert_eq!(
            classify_sentence_type(&tags(&["Subj", "Active", "CCP", "Subj", "Active", "CCS"])),
            SentenceType::ComplexCcs
        );
        assert_eq!(
            classify_sentence_type(&tags(&["Subj", "Active", "CCM", "Subj", "Active"])),
            SentenceType::Other
        );
    }

    #[test]
    fn length_bounded_language_enumeration() {
        // Every derivable string of length at most two, by brute force over
        // the tag alphabet actually used by the grammar.
        let g = default_grammar();
        let alphabet: Vec<FunctionTag> = g.terminals().iter().copied().collect();
        let mut derivable: Vec<Vec<FunctionTag>> = Vec::new();
        for &a in &alphabet {
            if recognize(&g, &[a]) {
                derivable.push(vec![a]);
            }
        }
        for &a in &alphabet {
            for &b in &alphabet {
                if recognize(&g, &[a, b]) {
                    derivable.push(vec![a, b]);
                }
            }
        }
        let expected = vec![
            tags(&["Ada"]),
            tags(&["Subj", "Active"]),
            tags(&["Subj", "Ada"]),
        ];
        assert_eq!(derivable, expected);
    }
}
