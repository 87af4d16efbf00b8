//! Context-free grammars over function tags.
//!
//! Terminals are function tags and may share a name with a nonterminal
//! (`Subj -> 'PSubj' 'SubjP' | 'Subj'`), so every symbol carries its kind.
//! Grammar files hold one rule set per line, `LHS -> alt | alt`, with
//! terminals in single quotes and `#` comments.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::assets;
use crate::corpus::FunctionTag;

/// A terminal (function tag) or nonterminal occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "name", rename_all = "lowercase")]
pub enum Symbol {
    Terminal(FunctionTag),
    Nonterminal(String),
}

impl Symbol {
    pub fn nonterminal(name: impl Into<String>) -> Symbol {
        Symbol::Nonterminal(name.into())
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, Symbol::Terminal(_))
    }

    pub fn name(&self) -> &str {
        match self {
            Symbol::Terminal(tag) => tag.name(),
            Symbol::Nonterminal(name) => name,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Terminal(tag) => write!(f, "'{tag}'"),
            Symbol::Nonterminal(name) => f.write_str(name),
        }
    }
}

/// Errors from grammar construction and the grammar file format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GrammarError {
    EmptyRhs { lhs: String },
    MissingStart(String),
    UndefinedNonterminal(String),
    UnknownTerminal(String),
    InvalidName(String),
    MalformedRule { line: usize, text: String },
    NoProductions,
}

impl fmt::Display for GrammarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrammarError::EmptyRhs { lhs } => {
                write!(f, "empty right-hand side in a production of `{lhs}`")
            }
            GrammarError::MissingStart(start) => {
                write!(f, "missing start symbol `{start}` (no production defines it)")
            }
            GrammarError::UndefinedNonterminal(name) => {
                write!(f, "nonterminal `{name}` is used but never defined")
            }
            GrammarError::UnknownTerminal(name) => {
                write!(f, "quoted terminal `{name}` is not a function tag")
            }
            GrammarError::InvalidName(name) => write!(f, "invalid symbol name `{name}`"),
            GrammarError::MalformedRule { line, text } => {
                write!(f, "malformed grammar rule at line {line}: `{text}`")
            }
            GrammarError::NoProductions => f.write_str("grammar has no productions"),
        }
    }
}

impl std::error::Error for GrammarError {}

/// One rewrite rule `lhs -> rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Production {
    lhs: String,
    rhs: Vec<Symbol>,
}

impl Production {
    pub fn new(lhs: impl Into<String>, rhs: Vec<Symbol>) -> Result<Production, GrammarError> {
        let lhs = lhs.into();
        if !valid_symbol_name(&lhs) {
            return Err(GrammarError::InvalidName(lhs));
        }
        if rhs.is_empty() {
            return Err(GrammarError::EmptyRhs { lhs });
        }
        Ok(Production { lhs, rhs })
    }

    pub fn lhs(&self) -> &str {
        &self.lhs
    }

    pub fn rhs(&self) -> &[Symbol] {
        &self.rhs
    }
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ->", self.lhs)?;
        for symbol in &self.rhs {
            write!(f, " {symbol}")?;
        }
        Ok(())
    }
}

fn valid_symbol_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| !c.is_whitespace() && !matches!(c, '\'' | '|' | '#' | '>' | '[' | ']'))
}

/// An immutable grammar: ordered productions, derived symbol sets, and the
/// start nonterminal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    nonterminals: BTreeSet<String>,
    terminals: BTreeSet<FunctionTag>,
    productions: Vec<Production>,
    start: String,
}

impl Grammar {
    /// Builds and validates a grammar. Duplicate productions are dropped
    /// (first occurrence wins); every rhs nonterminal must have a production
    /// and the start symbol must be defined.
    pub fn new(
        productions: Vec<Production>,
        start: impl Into<String>,
    ) -> Result<Grammar, GrammarError> {
        let start = start.into();
        if productions.is_empty() {
            return Err(GrammarError::NoProductions);
        }

        let mut deduped: Vec<Production> = Vec::with_capacity(productions.len());
        for production in productions {
            if !deduped.contains(&production) {
                deduped.push(production);
            }
        }

        let nonterminals: BTreeSet<String> =
            deduped.iter().map(|p| p.lhs().to_string()).collect();
        let mut terminals = BTreeSet::new();
        for production in &deduped {
            for symbol in production.rhs() {
                match symbol {
                    Symbol::Terminal(tag) => {
                        terminals.insert(*tag);
                    }
                    Symbol::Nonterminal(name) => {
                        if !nonterminals.contains(name) {
                            return Err(GrammarError::UndefinedNonterminal(name.clone()));
                        }
                    }
                }
            }
        }
        if !nonterminals.contains(&start) {
            return Err(GrammarError::MissingStart(start));
        }

        Ok(Grammar { nonterminals, terminals, productions: deduped, start })
    }

    pub fn nonterminals(&self) -> &BTreeSet<String> {
        &self.nonterminals
    }

    pub fn terminals(&self) -> &BTreeSet<FunctionTag> {
        &self.terminals
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    /// Nonterminals with no derivation path from the start symbol, sorted by
    /// name. The default grammar keeps `Sim` and `Use` even though nothing
    /// reaches them, so this is a lint, not an error.
    pub fn unreachable_nonterminals(&self) -> Vec<String> {
        let mut reachable = BTreeSet::new();
        let mut queue = vec![self.start.clone()];
        while let Some(name) = queue.pop() {
            if !reachable.insert(name.clone()) {
                continue;
            }
            for production in self.productions.iter().filter(|p| p.lhs() == name) {
                for symbol in production.rhs() {
                    if let Symbol::Nonterminal(child) = symbol {
                        if !reachable.contains(child) {
                            queue.push(child.clone());
                        }
                    }
                }
            }
        }
        self.nonterminals.difference(&reachable).cloned().collect()
    }
}

/// A non-fatal observation made while loading a grammar file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GrammarWarning {
    DuplicateProduction { line: usize, production: Production },
}

impl fmt::Display for GrammarWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrammarWarning::DuplicateProduction { line, production } => {
                write!(f, "duplicate production at line {line}: `{production}`")
            }
        }
    }
}

/// Result of [`load_grammar`]: the grammar plus any warnings.
#[derive(Clone, Debug)]
pub struct GrammarLoad {
    pub grammar: Grammar,
    pub warnings: Vec<GrammarWarning>,
}

fn parse_symbol(token: &str) -> Result<Symbol, GrammarError> {
    if let Some(inner) = token.strip_prefix('\'') {
        let name = inner
            .strip_suffix('\'')
            .filter(|n| !n.is_empty())
            .ok_or_else(|| GrammarError::InvalidName(token.to_string()))?;
        let tag = FunctionTag::from_name(name)
            .ok_or_else(|| GrammarError::UnknownTerminal(name.to_string()))?;
        Ok(Symbol::Terminal(tag))
    } else if valid_symbol_name(token) {
        Ok(Symbol::Nonterminal(token.to_string()))
    } else {
        Err(GrammarError::InvalidName(token.to_string()))
    }
}

/// Parses the grammar file format. The start symbol is `Sentence`.
pub fn load_grammar(text: &str) -> Result<GrammarLoad, GrammarError> {
    let mut productions: Vec<Production> = Vec::new();
    let mut warnings = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }

        let malformed = || GrammarError::MalformedRule { line: number, text: raw.trim().to_string() };
        let (lhs, rhs_text) = line.split_once("->").ok_or_else(malformed)?;
        let lhs = lhs.trim();
        if !valid_symbol_name(lhs) {
            return Err(GrammarError::InvalidName(lhs.to_string()));
        }

        for alternative in rhs_text.split('|') {
            let symbols: Vec<Symbol> = alternative
                .split_whitespace()
                .map(parse_symbol)
                .collect::<Result<_, _>>()?;
            if symbols.is_empty() {
                return Err(GrammarError::EmptyRhs { lhs: lhs.to_string() });
            }
            let production = Production::new(lhs, symbols)?;
            if productions.contains(&production) {
                warnings.push(GrammarWarning::DuplicateProduction { line: number, production });
            } else {
                productions.push(production);
            }
        }
    }

    let grammar = Grammar::new(productions, "Sentence")?;
    Ok(GrammarLoad { grammar, warnings })
}

/// Renders a grammar in the file format, joining consecutive productions of
/// the same lhs with `|` so that load(serialize(g)) == g.
pub fn serialize_grammar(grammar: &Grammar) -> String {
    let mut out = String::new();
    let mut i = 0;
    let productions = grammar.productions();
    while i < productions.len() {
        let lhs = productions[i].lhs();
        out.push_str(lhs);
        out.push_str(" ->");
        let mut first = true;
        while i < productions.len() && productions[i].lhs() == lhs {
            if !first {
                out.push_str(" |");
            }
            first = false;
            for symbol in productions[i].rhs() {
                out.push(' ');
                out.push_str(&symbol.to_string());
            }
            i += 1;
        }
        out.push('\n');
    }
    out
}

/// The built-in Myanmar function-tag grammar.
pub fn default_grammar() -> Grammar {
    let load = load_grammar(assets::DEFAULT_GRAMMAR)
        .expect("built-in grammar must be valid");
    debug_assert!(load.warnings.is_empty(), "built-in grammar must load cleanly");
    load.grammar
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term(name: &str) -> Symbol {
        Symbol::Terminal(name.parse().unwrap())
    }

    #[test]
    fn quoted_terminals_and_bare_nonterminals() {
        let load = load_grammar("Sentence -> Subj\nSubj -> 'PSubj' 'SubjP' | 'Subj'\n").unwrap();
        let g = load.grammar;
        assert_eq!(g.productions().len(), 3);
        assert_eq!(g.productions()[1].rhs(), &[term("PSubj"), term("SubjP")]);
        assert_eq!(g.productions()[2].rhs(), &[term("Subj")]);
        assert!(g.terminals().contains(&FunctionTag::Subj));
        assert!(g.nonterminals().contains("Subj"));
    }

    #[test]
    fn minimal_grammar_loads() {
        let load = load_grammar("Sentence -> 'Active'\n").unwrap();
        assert_eq!(load.grammar.productions().len(), 1);
        assert!(load.warnings.is_empty());
    }

    #[test]
    fn undefined_nonterminal_is_an_error() {
        assert_eq!(
            load_grammar("Sentence -> Foo\n").unwrap_err(),
            GrammarError::UndefinedNonterminal("Foo".to_string())
        );
    }

    #[test]
    fn unknown_terminal_is_an_error() {
        assert_eq!(
            load_grammar("Sentence -> 'Foo'\n").unwrap_err(),
            GrammarError::UnknownTerminal("Foo".to_string())
        );
    }

    #[test]
    fn empty_rhs_is_an_error() {
        assert_eq!(
            load_grammar("Sentence -> 'Active' | \n").unwrap_err(),
            GrammarError::EmptyRhs { lhs: "Sentence".to_string() }
        );
    }

    #[test]
    fn missing_start_is_an_error() {
        assert_eq!(
            load_grammar("Clause -> 'Active'\n").unwrap_err(),
            GrammarError::MissingStart("Sentence".to_string())
        );
    }

    #[test]
    fn duplicates_are_deduplicated_with_a_warning() {
        let load = load_grammar("Sentence -> 'Active'\nSentence -> 'Active'\n").unwrap();
        assert_eq!(load.grammar.productions().len(), 1);
        assert_eq!(load.warnings.len(), 1);
        assert!(load.warnings[0].to_string().contains("duplicate production"));
    }

    #[test]
    fn comments_are_stripped() {
        let load = load_grammar("# header\nSentence -> 'Active' # trailing\n").unwrap();
        assert_eq!(load.grammar.productions().len(), 1);
    }

    #[test]
    fn default_grammar_validates() {
        let g = default_grammar();
        assert_eq!(g.start(), "Sentence");
        let ccp_rule = Production::new(
            "Sentence",
            vec![
                Symbol::nonterminal("I-sent"),
                term("CCP"),
                Symbol::nonterminal("I-sent"),
            ],
        )
        .unwrap();
        assert!(g.productions().contains(&ccp_rule));
        let use_rule = Production::new("Use", vec![term("PUse"), term("UseP")]).unwrap();
        let sim_rule = Production::new("Sim", vec![term("PSim"), term("SimP")]).unwrap();
        assert!(g.productions().contains(&use_rule));
        assert!(g.productions().contains(&sim_rule));
    }

    #[test]
    fn default_grammar_round_trips() {
        let g = default_grammar();
        let text = serialize_grammar(&g);
        let reloaded = load_grammar(&text).unwrap();
        assert!(reloaded.warnings.is_empty());
        assert_eq!(reloaded.grammar, g);
    }

    #[test]
    fn unreachable_nonterminals_are_flagged() {
        assert_eq!(default_grammar().unreachable_nonterminals(), vec!["Sim", "Use"]);
        let load = load_grammar("Sentence -> 'Active'\n").unwrap();
        assert!(load.grammar.unreachable_nonterminals().is_empty());
    }

    #[test]
    fn production_display_quotes_terminals() {
        let p = Production::new("Subj", vec![term("PSubj"), term("SubjP")]).unwrap();
        assert_eq!(p.to_string(), "Subj -> 'PSubj' 'SubjP'");
    }
}
