use std::collections::BTreeMap;

use super::lexer::{Tok, Token};
use super::{ErrorKind, ParseError, SourceSpan};
use crate::model::{
    build_model, Designations, Model, ModelError, Node, NodeTable, ObsKey, VarKind, VariableDecl,
};
use crate::rational::{parse_rational, Rational};

const STANZAS: [&str; 5] = ["dilemma", "var", "det", "utility", "designate"];

#[derive(Debug, Clone)]
pub(super) struct Spanned<T> {
    pub value: T,
    pub span: SourceSpan,
}

/// One CPT row: the parent tuple and its distribution.
type CptRow = (Spanned<Vec<String>>, Vec<(Spanned<String>, Rational)>);

#[derive(Debug)]
enum Rows {
    Cpt(Vec<CptRow>),
    Function(Vec<(Spanned<Vec<String>>, String)>),
    Utility(Vec<(Spanned<Vec<String>>, Rational)>),
}

#[derive(Debug)]
struct VarStanza {
    name: Spanned<String>,
    domain: Option<Vec<Spanned<String>>>,
    parents: Vec<Spanned<String>>,
    rows: Rows,
}

#[derive(Debug, Default)]
struct DesignateStanza {
    span: Option<SourceSpan>,
    act: Option<Spanned<String>>,
    obs: Option<Spanned<String>>,
    value: Option<Spanned<String>>,
    fdt: Vec<(Spanned<ObsKey>, Spanned<String>)>,
    self_fdt: Option<Spanned<String>>,
}

#[derive(Debug, Default)]
pub(super) struct File {
    name: Option<Spanned<String>>,
    vars: Vec<VarStanza>,
    designate: DesignateStanza,
    /// Errors that do not stop parsing, such as repeated stanzas.
    semantic: Vec<ParseError>,
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    eof: SourceSpan,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn span(&self) -> SourceSpan {
        self.peek().map_or(self.eof, |t| t.span)
    }

    fn found(&self) -> String {
        self.peek()
            .map_or("end of input".into(), |t| t.tok.describe())
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::new(
            self.span(),
            ErrorKind::Syntax,
            format!("expected {expected}, found {}", self.found()),
        )
    }

    fn at(&self, tok: &Tok) -> bool {
        self.peek().is_some_and(|t| &t.tok == tok)
    }

    fn at_word(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Atom(w), .. }) if w == word)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        let hit = self.at(tok);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect(&mut self, tok: Tok) -> PResult<SourceSpan> {
        let span = self.span();
        if self.eat(&tok) {
            Ok(span)
        } else {
            Err(self.error(&tok.describe()))
        }
    }

    fn keyword(&mut self, word: &str) -> PResult<SourceSpan> {
        let span = self.span();
        if self.at_word(word) {
            self.pos += 1;
            Ok(span)
        } else {
            Err(self.error(&format!("`{word}`")))
        }
    }

    /// A bare word or quoted string.
    fn name(&mut self, what: &str) -> PResult<Spanned<String>> {
        match self.peek() {
            Some(Token {
                tok: Tok::Atom(s) | Tok::Str(s),
                span,
                ..
            }) => {
                self.pos += 1;
                Ok(Spanned {
                    value: s.clone(),
                    span: *span,
                })
            }
            _ => Err(self.error(what)),
        }
    }

    fn rational(&mut self) -> PResult<Rational> {
        match self.peek() {
            Some(Token {
                tok: Tok::Atom(s),
                span,
                ..
            }) => {
                let r = parse_rational(s)
                    .map_err(|e| ParseError::new(*span, ErrorKind::Lex, e.to_string()))?;
                self.pos += 1;
                Ok(r)
            }
            _ => Err(self.error("a number")),
        }
    }

    /// `open item (sep item)* [sep] close`, where items are parsed by `f`.
    fn list<T>(
        &mut self,
        open: Tok,
        close: Tok,
        sep: Tok,
        mut f: impl FnMut(&mut Self) -> PResult<T>,
    ) -> PResult<Vec<T>> {
        self.expect(open)?;
        let mut out = Vec::new();
        loop {
            if self.eat(&close) {
                return Ok(out);
            }
            out.push(f(self)?);
            if self.eat(&close) {
                return Ok(out);
            }
            if !self.eat(&sep) {
                return Err(self.error(&format!("{} or {}", sep.describe(), close.describe())));
            }
        }
    }

    fn names(&mut self, open: Tok, close: Tok, what: &str) -> PResult<Vec<Spanned<String>>> {
        self.list(open, close, Tok::Comma, |p| p.name(what))
    }

    fn tuple(&mut self) -> PResult<Spanned<Vec<String>>> {
        let start = self.span();
        let items = self.names(Tok::LParen, Tok::RParen, "a parent value")?;
        Ok(Spanned {
            value: items.into_iter().map(|s| s.value).collect(),
            span: self.joined(start),
        })
    }

    /// Span from `start` to the end of the previous token, clipped to one line.
    fn joined(&self, start: SourceSpan) -> SourceSpan {
        let end = self.tokens[self.pos - 1].span;
        let length = if end.line == start.line {
            end.column + end.length - start.column
        } else {
            start.length
        };
        SourceSpan { length, ..start }
    }

    fn distribution(&mut self) -> PResult<Vec<(Spanned<String>, Rational)>> {
        self.list(Tok::LBrace, Tok::RBrace, Tok::Comma, |p| {
            let v = p.name("a value")?;
            p.expect(Tok::Colon)?;
            Ok((v, p.rational()?))
        })
    }

    fn stanza(&mut self, file: &mut File) -> PResult<()> {
        let start = self.span();
        let word = match self.peek() {
            Some(Token {
                tok: Tok::Atom(w), ..
            }) if STANZAS.contains(&w.as_str()) => w.as_str(),
            _ => return Err(self.error("a stanza keyword (dilemma, var, det, utility, designate)")),
        };
        self.pos += 1;
        match word {
            "dilemma" => {
                let name = match self.peek() {
                    Some(Token {
                        tok: Tok::Str(s),
                        span,
                        ..
                    }) => Spanned {
                        value: s.clone(),
                        span: *span,
                    },
                    _ => return Err(self.error("a quoted dilemma name")),
                };
                self.pos += 1;
                if file.name.is_some() {
                    file.semantic.push(ParseError::new(
                        start,
                        ErrorKind::Semantic,
                        "repeated `dilemma` stanza",
                    ));
                } else {
                    file.name = Some(name);
                }
            }
            "var" => {
                let name = self.name("a variable name")?;
                self.keyword("in")?;
                let domain = self.names(Tok::LBrace, Tok::RBrace, "a value")?;
                let (parents, rows) = if self.at_word("prior") {
                    self.pos += 1;
                    let span = self.span();
                    let dist = self.distribution()?;
                    let key = Spanned {
                        value: Vec::new(),
                        span: self.joined(span),
                    };
                    (Vec::new(), Rows::Cpt(vec![(key, dist)]))
                } else if self.at_word("cpt") {
                    self.pos += 1;
                    let parents = self.names(Tok::LParen, Tok::RParen, "a parent name")?;
                    let rows = self.list(Tok::LBrace, Tok::RBrace, Tok::Semi, |p| {
                        let key = p.tuple()?;
                        p.expect(Tok::Colon)?;
                        Ok((key, p.distribution()?))
                    })?;
                    (parents, Rows::Cpt(rows))
                } else {
                    return Err(self.error("`prior` or `cpt`"));
                };
                file.vars.push(VarStanza {
                    name,
                    domain: Some(domain),
                    parents,
                    rows,
                });
            }
            "det" => {
                let name = self.name("a variable name")?;
                let parents = self.names(Tok::LParen, Tok::RParen, "a parent name")?;
                let domain = if self.at_word("in") {
                    self.pos += 1;
                    Some(self.names(Tok::LBrace, Tok::RBrace, "a value")?)
                } else {
                    None
                };
                let rows = self.list(Tok::LBrace, Tok::RBrace, Tok::Semi, |p| {
                    let key = p.tuple()?;
                    p.expect(Tok::Arrow)?;
                    Ok((key, p.name("an output value")?.value))
                })?;
                file.vars.push(VarStanza {
                    name,
                    domain,
                    parents,
                    rows: Rows::Function(rows),
                });
            }
            "utility" => {
                let name = self.name("a variable name")?;
                let parents = self.names(Tok::LParen, Tok::RParen, "a parent name")?;
                let rows = self.list(Tok::LBrace, Tok::RBrace, Tok::Semi, |p| {
                    let key = p.tuple()?;
                    p.expect(Tok::Arrow)?;
                    Ok((key, p.rational()?))
                })?;
                file.vars.push(VarStanza {
                    name,
                    domain: None,
                    parents,
                    rows: Rows::Utility(rows),
                });
            }
            _ => self.designate(file, start)?,
        }
        Ok(())
    }

    fn designate(&mut self, file: &mut File, start: SourceSpan) -> PResult<()> {
        if file.designate.span.is_some() {
            file.semantic.push(ParseError::new(
                start,
                ErrorKind::Semantic,
                "repeated `designate` stanza",
            ));
        }
        let mut d = DesignateStanza {
            span: Some(start),
            ..Default::default()
        };
        loop {
            let role_span = self.span();
            let slot = if self.at_word("act") {
                &mut d.act
            } else if self.at_word("obs") {
                &mut d.obs
            } else if self.at_word("value") {
                &mut d.value
            } else if self.at_word("self") {
                &mut d.self_fdt
            } else if self.at_word("fdt") {
                self.pos += 1;
                let entries = self.list(Tok::LBrace, Tok::RBrace, Tok::Comma, |p| {
                    let span = p.span();
                    let key = if p.eat(&Tok::EmptySet) {
                        ObsKey::Empty
                    } else {
                        ObsKey::Value(p.name("an observation value or `∅`")?.value)
                    };
                    p.expect(Tok::Colon)?;
                    Ok((Spanned { value: key, span }, p.name("a node name")?))
                })?;
                d.fdt.extend(entries);
                continue;
            } else {
                break;
            };
            self.pos += 1;
            self.expect(Tok::Eq)?;
            let name = self.name("a variable name")?;
            if slot.is_some() {
                file.semantic.push(ParseError::new(
                    role_span,
                    ErrorKind::Semantic,
                    "role designated twice",
                ));
            }
            *slot = Some(name);
        }
        if file.designate.span.is_none() {
            file.designate = d;
        }
        Ok(())
    }

    /// Skips to the next stanza keyword that starts a line.
    fn recover(&mut self) {
        self.pos += 1;
        while let Some(t) = self.peek() {
            if t.line_start && matches!(&t.tok, Tok::Atom(w) if STANZAS.contains(&w.as_str())) {
                return;
            }
            self.pos += 1;
        }
    }
}

pub(super) fn parse_tokens(tokens: &[Token], eof: SourceSpan) -> Result<File, Vec<ParseError>> {
    let mut p = Parser {
        tokens,
        pos: 0,
        eof,
    };
    let mut file = File::default();
    let mut errors = Vec::new();
    if tokens.is_empty() {
        return Err(vec![p.error("a stanza")]);
    }
    while p.peek().is_some() {
        let before = p.pos;
        if let Err(e) = p.stanza(&mut file) {
            errors.push(e);
            p.pos = p.pos.max(before);
            p.recover();
        }
    }
    if errors.is_empty() {
        Ok(file)
    } else {
        Err(errors)
    }
}

/// Where each model-level name and row came from.
#[derive(Default)]
struct Spans {
    names: BTreeMap<String, SourceSpan>,
    parents: BTreeMap<(String, String), Vec<SourceSpan>>,
    rows: BTreeMap<(String, Vec<String>), SourceSpan>,
    values: BTreeMap<(String, String), Vec<SourceSpan>>,
    roles: BTreeMap<String, SourceSpan>,
    utilities: Vec<SourceSpan>,
}

pub(super) fn lower(file: File, eof: SourceSpan) -> Result<Model, Vec<ParseError>> {
    let mut errors = file.semantic;
    let semantic = |span, msg: String| ParseError::new(span, ErrorKind::Semantic, msg);
    let mut spans = Spans::default();
    let mut decls = Vec::new();
    let mut nodes = Vec::new();

    for var in file.vars {
        let name = var.name.value.clone();
        if spans.names.contains_key(&name) {
            errors.push(semantic(
                var.name.span,
                format!("variable `{name}` is defined twice"),
            ));
            continue;
        }
        spans.names.insert(name.clone(), var.name.span);
        for p in &var.parents {
            spans
                .parents
                .entry((name.clone(), p.value.clone()))
                .or_default()
                .push(p.span);
        }
        let parents: Vec<String> = var.parents.iter().map(|p| p.value.clone()).collect();
        let mut row_key = |key: &Spanned<Vec<String>>, errors: &mut Vec<ParseError>| -> bool {
            if key.value.len() != parents.len() {
                errors.push(semantic(
                    key.span,
                    format!(
                        "row ({}) of `{name}` has {} values for {} parents",
                        key.value.join(", "),
                        key.value.len(),
                        parents.len()
                    ),
                ));
                return false;
            }
            if spans
                .rows
                .insert((name.clone(), key.value.clone()), key.span)
                .is_some()
            {
                errors.push(semantic(
                    key.span,
                    format!("row ({}) of `{name}` appears twice", key.value.join(", ")),
                ));
                return false;
            }
            true
        };
        let (kind, table, mut domain) = match var.rows {
            Rows::Cpt(rows) => {
                let mut table = BTreeMap::new();
                for (key, dist) in rows {
                    if !row_key(&key, &mut errors) {
                        continue;
                    }
                    let mut row = BTreeMap::new();
                    for (v, p) in dist {
                        if row.insert(v.value.clone(), p).is_some() {
                            errors.push(semantic(
                                v.span,
                                format!(
                                    "value `{}` appears twice in row ({}) of `{name}`",
                                    v.value,
                                    key.value.join(", ")
                                ),
                            ));
                        }
                    }
                    table.insert(key.value, row);
                }
                (VarKind::Stochastic, NodeTable::Cpt(table), Vec::new())
            }
            Rows::Function(rows) => {
                let mut table = BTreeMap::new();
                let mut seen = Vec::new();
                for (key, out) in rows {
                    if !row_key(&key, &mut errors) {
                        continue;
                    }
                    if !seen.contains(&out) {
                        seen.push(out.clone());
                    }
                    table.insert(key.value, out);
                }
                (VarKind::Deterministic, NodeTable::Function(table), seen)
            }
            Rows::Utility(rows) => {
                spans.utilities.push(var.name.span);
                let mut table = BTreeMap::new();
                for (key, out) in rows {
                    if row_key(&key, &mut errors) {
                        table.insert(key.value, out);
                    }
                }
                (VarKind::Utility, NodeTable::Utility(table), Vec::new())
            }
        };
        if let Some(declared) = var.domain {
            for v in &declared {
                spans
                    .values
                    .entry((name.clone(), v.value.clone()))
                    .or_default()
                    .push(v.span);
            }
            domain = declared.into_iter().map(|v| v.value).collect();
        }
        decls.push(VariableDecl {
            name: name.clone(),
            domain,
            kind,
        });
        nodes.push(Node {
            variable: name,
            parents,
            table,
        });
    }

    let d = file.designate;
    let Some(designate_span) = d.span else {
        errors.push(semantic(eof, "missing `designate` stanza".into()));
        return Err(errors);
    };
    let mut required =
        |role: &str, slot: Option<Spanned<String>>, errors: &mut Vec<ParseError>| match slot {
            Some(s) => {
                spans.roles.insert(role.to_string(), s.span);
                Some(s.value)
            }
            None => {
                errors.push(semantic(
                    designate_span,
                    format!("`designate` has no `{role}=`"),
                ));
                None
            }
        };
    let act = required("act", d.act, &mut errors);
    let value = required("value", d.value, &mut errors);
    let mut designations = Designations::new(act.unwrap_or_default(), value.unwrap_or_default());
    if let Some(obs) = d.obs {
        spans.roles.insert("obs".into(), obs.span);
        designations.obs = Some(obs.value);
    }
    if let Some(s) = d.self_fdt {
        spans.roles.insert("self".into(), s.span);
        designations.self_fdt = Some(s.value);
    }
    for (key, node) in d.fdt {
        spans.roles.insert(format!("fdt[{}]", key.value), node.span);
        if designations
            .fdt
            .insert(key.value.clone(), node.value)
            .is_some()
        {
            errors.push(semantic(
                key.span,
                format!("observation `{}` mapped twice", key.value),
            ));
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }

    let name = file
        .name
        .map_or_else(|| "untitled".to_string(), |n| n.value);
    match build_model(decls, nodes, designations) {
        Ok(model) => Ok(model.with_name(name)),
        Err(errs) => Err(errs
            .0
            .into_iter()
            .map(|e| semantic(locate(&e, &spans, designate_span), e.to_string()))
            .collect()),
    }
}

fn locate(e: &ModelError, spans: &Spans, designate: SourceSpan) -> SourceSpan {
    use ModelError::*;
    let name = |v: &str| spans.names.get(v).copied();
    let row = |v: &str, r: &[String]| spans.rows.get(&(v.to_string(), r.to_vec())).copied();
    let last = |m: &BTreeMap<(String, String), Vec<SourceSpan>>, a: &str, b: &str| {
        m.get(&(a.to_string(), b.to_string()))
            .and_then(|s| s.last().copied())
    };
    let found = match e {
        UnknownParent { variable, parent }
        | DuplicateParent { variable, parent }
        | UtilityParent { variable, parent } => last(&spans.parents, variable, parent),
        DuplicateValue { variable, value } => last(&spans.values, variable, value),
        UnexpectedRow { variable, row: r }
        | ValueOutOfDomain {
            variable, row: r, ..
        }
        | ProbabilityOutOfRange {
            variable, row: r, ..
        }
        | NonNormalizedRow {
            variable, row: r, ..
        } => row(variable, r).or_else(|| name(variable)),
        BadDesignation { role, .. } => spans.roles.get(role).copied(),
        UtilityCount(_) => spans.utilities.get(1).copied(),
        other => other.variable().and_then(name),
    };
    found.unwrap_or(designate)
}
