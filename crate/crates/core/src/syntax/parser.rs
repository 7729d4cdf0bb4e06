//! Recursive-descent parser for the pure Horn-clause subset of Edinburgh
//! syntax, plus the relation and interpretation dump formats.
//!
//! ```text
//! program := clause*
//! clause  := atom '.' | atom ':-' atom (',' atom)* '.'
//! atom    := name | name '(' term (',' term)* ')'
//! term    := Var | name | name '(' term (',' term)* ')' | list
//! list    := '[' ']' | '[' term (',' term)* ('|' term)? ']'
//! ```
//!
//! Names are lowercase identifiers, digit strings or single-quoted atoms;
//! variables start with an uppercase letter or `_`. Each `_` is a fresh
//! variable. `%` starts a line comment. `[]` is read as `nil` and `[H|T]` as
//! `'.'(H,T)`.

use std::collections::{BTreeMap, BTreeSet};

use crate::relation::{IntRelation, RelationalInterpretation};
use crate::syntax::{Body, Call, ClausalSentence, HornClause};
use crate::term::{Sym, Term, TermTuple};

pub const LIST_CONS: &str = ".";
pub const LIST_NIL: &str = "nil";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: procedure {symbol} used with arity {found}, but earlier with arity {expected}")]
    ArityConflict {
        line: usize,
        column: usize,
        symbol: Sym,
        expected: usize,
        found: usize,
    },
    #[error("{line}:{column}: function symbol {symbol} used with arity {found}, but earlier with arity {expected}")]
    FunctorConflict {
        line: usize,
        column: usize,
        symbol: Sym,
        expected: usize,
        found: usize,
    },
}

/// A non-fatal observation about the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lint {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for Lint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}:{}: warning: {}",
            self.line, self.column, self.message
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Var(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Bar,
    Comma,
    Neck,
    Query,
    End,
    Slash,
    Colon,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("name '{n}'"),
            Tok::Var(v) => format!("variable {v}"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Bar => "'|'".into(),
            Tok::Comma => "','".into(),
            Tok::Neck => "':-'".into(),
            Tok::Query => "'?-'".into(),
            Tok::End => "'.'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Colon => "':'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, c);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                let ch = chars[i];
                advance(&mut i, &mut line, &mut col, ch);
            }
            continue;
        }
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '|' => Some(Tok::Bar),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::End),
            '/' => Some(Tok::Slash),
            _ => None,
        };
        if let Some(tok) = simple {
            advance(&mut i, &mut line, &mut col, c);
            out.push(Token {
                tok,
                line: l0,
                column: c0,
            });
            continue;
        }
        if c == ':' {
            advance(&mut i, &mut line, &mut col, c);
            let tok = if chars.get(i) == Some(&'-') {
                advance(&mut i, &mut line, &mut col, '-');
                Tok::Neck
            } else {
                Tok::Colon
            };
            out.push(Token {
                tok,
                line: l0,
                column: c0,
            });
            continue;
        }
        if c == '?' && chars.get(i + 1) == Some(&'-') {
            advance(&mut i, &mut line, &mut col, c);
            advance(&mut i, &mut line, &mut col, '-');
            out.push(Token {
                tok: Tok::Query,
                line: l0,
                column: c0,
            });
            continue;
        }
        if c == '\'' {
            advance(&mut i, &mut line, &mut col, c);
            let mut name = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(syntax(l0, c0, "unterminated quoted name")),
                    Some('\'') if chars.get(i + 1) == Some(&'\'') => {
                        name.push('\'');
                        advance(&mut i, &mut line, &mut col, '\'');
                        advance(&mut i, &mut line, &mut col, '\'');
                    }
                    Some('\'') => {
                        advance(&mut i, &mut line, &mut col, '\'');
                        break;
                    }
                    Some(&ch) => {
                        name.push(ch);
                        advance(&mut i, &mut line, &mut col, ch);
                    }
                }
            }
            out.push(Token {
                tok: Tok::Name(name),
                line: l0,
                column: c0,
            });
            continue;
        }
        if c.is_alphanumeric() || c == '_' {
            let mut word = String::new();
            while let Some(&ch) = chars.get(i) {
                if ch.is_alphanumeric() || ch == '_' {
                    word.push(ch);
                    advance(&mut i, &mut line, &mut col, ch);
                } else {
                    break;
                }
            }
            let first = word.chars().next().unwrap_or('a');
            let tok = if first.is_uppercase() || first == '_' {
                Tok::Var(word)
            } else if first.is_ascii_digit() && !word.chars().all(|ch| ch.is_ascii_digit()) {
                return Err(syntax(l0, c0, format!("malformed number '{word}'")));
            } else {
                Tok::Name(word)
            };
            out.push(Token {
                tok,
                line: l0,
                column: c0,
            });
            continue;
        }
        return Err(syntax(l0, c0, format!("unexpected character '{c}'")));
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    anon: usize,
    predicates: BTreeMap<Sym, usize>,
    functors: BTreeMap<Sym, usize>,
    lints: Vec<Lint>,
}

impl Parser {
    fn new(text: &str) -> Result<Parser, ParseError> {
        Ok(Parser {
            tokens: lex(text)?,
            pos: 0,
            anon: 0,
            predicates: BTreeMap::new(),
            functors: BTreeMap::new(),
            lints: Vec::new(),
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn at(&self, tok: &Tok) -> bool {
        &self.peek().tok == tok
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, ParseError> {
        let t = self.next();
        if t.tok == tok {
            Ok(t)
        } else {
            Err(syntax(
                t.line,
                t.column,
                format!("expected {}, found {}", tok.describe(), t.tok.describe()),
            ))
        }
    }

    fn fresh_anonymous(&mut self, used: &BTreeSet<String>) -> String {
        loop {
            self.anon += 1;
            let name = format!("_{}", self.anon);
            if !used.contains(&name) {
                return name;
            }
        }
    }

    fn record_functor(&mut self, at: &Token, symbol: &Sym, arity: usize) -> Result<(), ParseError> {
        match self.functors.get(symbol) {
            Some(&expected) if expected != arity => Err(ParseError::FunctorConflict {
                line: at.line,
                column: at.column,
                symbol: symbol.clone(),
                expected,
                found: arity,
            }),
            _ => {
                self.functors.insert(symbol.clone(), arity);
                Ok(())
            }
        }
    }

    fn record_predicate(
        &mut self,
        at: &Token,
        symbol: &Sym,
        arity: usize,
    ) -> Result<(), ParseError> {
        match self.predicates.get(symbol) {
            Some(&expected) if expected != arity => Err(ParseError::ArityConflict {
                line: at.line,
                column: at.column,
                symbol: symbol.clone(),
                expected,
                found: arity,
            }),
            _ => {
                self.predicates.insert(symbol.clone(), arity);
                Ok(())
            }
        }
    }

    fn term(&mut self, used: &BTreeSet<String>) -> Result<Term, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Var(v) if v == "_" => Ok(Term::var(&self.fresh_anonymous(used))),
            Tok::Var(v) => Ok(Term::var(v)),
            Tok::Name(n) => {
                let symbol = Sym::new(n);
                let args = if self.at(&Tok::LParen) {
                    self.arguments(used)?
                } else {
                    Vec::new()
                };
                self.record_functor(&t, &symbol, args.len())?;
                Ok(Term::App(symbol, args))
            }
            Tok::LBracket => self.list(&t, used),
            other => Err(syntax(
                t.line,
                t.column,
                format!("expected a term, found {}", other.describe()),
            )),
        }
    }

    fn arguments(&mut self, used: &BTreeSet<String>) -> Result<Vec<Term>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = vec![self.term(used)?];
        while self.at(&Tok::Comma) {
            self.next();
            args.push(self.term(used)?);
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn list(&mut self, open: &Token, used: &BTreeSet<String>) -> Result<Term, ParseError> {
        let nil = Term::constant(LIST_NIL);
        if self.at(&Tok::RBracket) {
            self.next();
            self.record_functor(open, &Sym::new(LIST_NIL), 0)?;
            return Ok(nil);
        }
        let mut items = vec![self.term(used)?];
        while self.at(&Tok::Comma) {
            self.next();
            items.push(self.term(used)?);
        }
        let tail = if self.at(&Tok::Bar) {
            self.next();
            self.term(used)?
        } else {
            self.record_functor(open, &Sym::new(LIST_NIL), 0)?;
            nil
        };
        self.expect(Tok::RBracket)?;
        self.record_functor(open, &Sym::new(LIST_CONS), 2)?;
        Ok(items
            .into_iter()
            .rev()
            .fold(tail, |acc, item| Term::app(LIST_CONS, vec![item, acc])))
    }

    fn atom(&mut self, used: &BTreeSet<String>) -> Result<Call, ParseError> {
        let t = self.next();
        let Tok::Name(n) = &t.tok else {
            return Err(syntax(
                t.line,
                t.column,
                format!("expected an atom, found {}", t.tok.describe()),
            ));
        };
        let symbol = Sym::new(n);
        let args = if self.at(&Tok::LParen) {
            self.arguments(used)?
        } else {
            Vec::new()
        };
        self.record_predicate(&t, &symbol, args.len())?;
        Ok(Call::new(symbol, TermTuple::new(args)))
    }

    // Variable names appearing in the tokens of the clause starting at the
    // cursor, so fresh names for `_` avoid them.
    fn clause_variables(&self) -> BTreeSet<String> {
        self.tokens[self.pos..]
            .iter()
            .take_while(|t| t.tok != Tok::End && t.tok != Tok::Eof)
            .filter_map(|t| match &t.tok {
                Tok::Var(v) if v != "_" => Some(v.clone()),
                _ => None,
            })
            .collect()
    }

    fn body(&mut self, used: &BTreeSet<String>) -> Result<Body, ParseError> {
        let mut calls = BTreeSet::new();
        loop {
            let start = self.peek().clone();
            let call = self.atom(used)?;
            if !calls.insert(call.clone()) {
                self.lints.push(Lint {
                    line: start.line,
                    column: start.column,
                    message: format!("duplicate body atom {call} collapsed"),
                });
            }
            if !self.at(&Tok::Comma) {
                break;
            }
            self.next();
        }
        Ok(Body::new(calls))
    }

    fn clause(&mut self) -> Result<HornClause, ParseError> {
        let used = self.clause_variables();
        let head = self.atom(&used)?;
        let body = if self.at(&Tok::Neck) {
            self.next();
            self.body(&used)?
        } else {
            Body::default()
        };
        self.expect(Tok::End)?;
        Ok(HornClause::new(head, body))
    }

    fn program(&mut self) -> Result<ClausalSentence, ParseError> {
        let mut clauses = BTreeSet::new();
        while !self.at(&Tok::Eof) {
            clauses.insert(self.clause()?);
        }
        Ok(ClausalSentence::new(clauses))
    }

    fn tuple(&mut self) -> Result<TermTuple, ParseError> {
        self.expect(Tok::LParen)?;
        let used = BTreeSet::new();
        let mut terms = Vec::new();
        if !self.at(&Tok::RParen) {
            terms.push(self.term(&used)?);
            while self.at(&Tok::Comma) {
                self.next();
                terms.push(self.term(&used)?);
            }
        }
        self.expect(Tok::RParen)?;
        Ok(TermTuple::new(terms))
    }

    fn relation_body(&mut self, order: Option<usize>) -> Result<IntRelation, ParseError> {
        let mut rows = Vec::new();
        let mut order = order;
        while self.at(&Tok::LParen) {
            let start = self.peek().clone();
            let row = self.tuple()?;
            if !row.is_ground() {
                return Err(syntax(
                    start.line,
                    start.column,
                    format!("relation tuple {row} is not ground"),
                ));
            }
            match order {
                Some(n) if n != row.order() => {
                    return Err(syntax(
                        start.line,
                        start.column,
                        format!("tuple {row} has order {}, expected {n}", row.order()),
                    ))
                }
                _ => order = Some(row.order()),
            }
            rows.push(row);
        }
        let mut rel = IntRelation::empty(order.unwrap_or(0));
        for row in rows {
            rel.insert_unchecked(row);
        }
        Ok(rel)
    }
}

pub fn parse_program(text: &str) -> Result<ClausalSentence, ParseError> {
    parse_program_linted(text).map(|(s, _)| s)
}

/// Like [`parse_program`], also returning warnings (currently: duplicate
/// body atoms that were collapsed).
pub fn parse_program_linted(text: &str) -> Result<(ClausalSentence, Vec<Lint>), ParseError> {
    let mut p = Parser::new(text)?;
    let s = p.program()?;
    Ok((s, p.lints))
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.term(&BTreeSet::new())?;
    p.expect(Tok::Eof)?;
    Ok(t)
}

/// Parses a goal: `[?-] atom (',' atom)* ['.']`.
pub fn parse_goal(text: &str) -> Result<Body, ParseError> {
    let mut p = Parser::new(text)?;
    if p.at(&Tok::Query) {
        p.next();
    }
    let used = p.clause_variables();
    let body = p.body(&used)?;
    if p.at(&Tok::End) {
        p.next();
    }
    p.expect(Tok::Eof)?;
    Ok(body)
}

/// Reads a relation file: ground parenthesized tuples separated by
/// whitespace (one per line by convention). An empty file yields the empty
/// relation of order `order`, or of order 0 when unknown.
pub fn parse_relation(text: &str, order: Option<usize>) -> Result<IntRelation, ParseError> {
    let mut p = Parser::new(text)?;
    let rel = p.relation_body(order)?;
    p.expect(Tok::Eof)?;
    Ok(rel)
}

/// Reads a sequence of `symbol/arity:` blocks, each followed by its tuples.
pub fn parse_interpretation(text: &str) -> Result<RelationalInterpretation, ParseError> {
    let mut p = Parser::new(text)?;
    let mut out = RelationalInterpretation::default();
    while !p.at(&Tok::Eof) {
        let t = p.next();
        let Tok::Name(name) = &t.tok else {
            return Err(syntax(
                t.line,
                t.column,
                format!("expected a symbol, found {}", t.tok.describe()),
            ));
        };
        p.expect(Tok::Slash)?;
        let n = p.next();
        let arity: usize = match &n.tok {
            Tok::Name(digits) => digits
                .parse()
                .map_err(|_| syntax(n.line, n.column, "expected an arity"))?,
            other => {
                return Err(syntax(
                    n.line,
                    n.column,
                    format!("expected an arity, found {}", other.describe()),
                ))
            }
        };
        p.expect(Tok::Colon)?;
        let rel = p.relation_body(Some(arity))?;
        out.set(Sym::new(name), rel);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Var;

    #[test]
    fn lexes_positions() {
        let toks = lex("p(X) :-\n  q('.').").unwrap();
        let neck = toks.iter().find(|t| t.tok == Tok::Neck).unwrap();
        assert_eq!((neck.line, neck.column), (1, 6));
        let quoted = toks
            .iter()
            .find(|t| t.tok == Tok::Name(".".into()))
            .unwrap();
        assert_eq!((quoted.line, quoted.column), (2, 5));
    }

    #[test]
    fn list_sugar() {
        let t = parse_term("[a,b|T]").unwrap();
        assert_eq!(t.to_string(), "'.'(a,'.'(b,T))");
        assert_eq!(parse_term("[]").unwrap(), Term::constant("nil"));
        assert_eq!(parse_term("[X]").unwrap().to_string(), "'.'(X,nil)");
    }

    #[test]
    fn anonymous_variables_are_distinct() {
        let s = parse_program("p(_, _, _1).").unwrap();
        let clause = s.clauses().iter().next().unwrap();
        let vars = clause.head.args.variables();
        assert_eq!(vars.len(), 3);
        assert!(vars.contains(&Var::new("_1")));
    }

    #[test]
    fn syntax_errors_have_positions() {
        let err = parse_program("p(a).\nq(b :- r.").unwrap_err();
        match err {
            ParseError::Syntax { line, column, .. } => assert_eq!((line, column), (2, 5)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_program("p(a)").is_err());
        assert!(parse_program("X :- p.").is_err());
        assert!(parse_program("p('abc).").is_err());
    }

    #[test]
    fn functor_conflicts() {
        assert!(matches!(
            parse_program("p(f(a)). p(f(a,b))."),
            Err(ParseError::FunctorConflict { .. })
        ));
        assert!(matches!(
            parse_program("p(f). p(f(a))."),
            Err(ParseError::FunctorConflict { .. })
        ));
    }

    #[test]
    fn goals() {
        let g = parse_goal("?- app(X, Y, [a]), mem(a, Y).").unwrap();
        assert_eq!(g.calls().len(), 2);
        assert!(parse_goal("app(X").is_err());
    }

    #[test]
    fn relations_and_interpretations() {
        let r = parse_relation("% comment\n(a,f(b))\n(f(a),b)\n", None).unwrap();
        assert_eq!(r.order(), 2);
        assert_eq!(r.len(), 2);
        assert!(parse_relation("(a)\n(a,b)\n", None).is_err());
        assert!(parse_relation("(X)\n", None).is_err());
        assert_eq!(parse_relation("", Some(3)).unwrap(), IntRelation::empty(3));

        let text = "p/2:\n(a,f(b))\nq/0:\n()\nr/1:\n";
        let i = parse_interpretation(text).unwrap();
        assert_eq!(i.dump(), text);
    }
}
