//! Textual formats: terms, constraints, `.sem` semantics files, `.spec`
//! program specifications and `.cfg` configurations.
//!
//! Variables may be annotated `Name:Sort` (no spaces); unannotated variables
//! take the sort of the position they appear in, with the last element of a
//! `~>` chain defaulting to a sequence tail of sort `K`.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::constraint::{from_bool_term, CTerm, Constraint};
use crate::error::{Error, Result};
use crate::semantics::{
    CellDecl, OpDecl, ProgramSpec, Provenance, Rule, SameLoopPolicy, Semantics, Signature,
    SpecOptions, TerminalPolicy, KDOT, KSEQ, PRIORITY_HANDWRITTEN,
};
use crate::term::{sort_fits, CellBag, Ident, Sort, Term, TermRef};

// ------------------------------------------------------------------
// Lexer
// ------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    /// `name:Sort` written without spaces.
    Annot(String, String),
    Int(BigInt),
    Str(String),
    CellOpen(String),
    CellClose(String),
    Sym(&'static str),
    DotK,
    Comment(String),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: &[&str] = &[
    "==Int", "=/=Int", "<=Int", ">=Int", "<Int", ">Int", "+Int", "-Int", "*Int", "==K", "=/=K",
    "=/=", "==", "<=", ">=", "~>", "=>", "->", "<", ">", "+", "-", "*", ":", ";", "(", ")", "[",
    "]", ",",
];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '#' || c == '$'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '#' || c == '\''
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.src.get(self.pos).map(|&b| b as char)
    }

    fn peek_at(&self, off: usize) -> Option<char> {
        self.src.get(self.pos + off).map(|&b| b as char)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, self.col, msg)
    }

    fn lex(mut self) -> Result<Vec<Token>> {
        let mut out = Vec::new();
        loop {
            while matches!(self.peek(), Some(c) if c.is_whitespace()) {
                self.bump();
            }
            let (line, col) = (self.line, self.col);
            let c = match self.peek() {
                None => {
                    out.push(Token {
                        tok: Tok::Eof,
                        line,
                        col,
                    });
                    return Ok(out);
                }
                Some(c) => c,
            };
            let tok = if c == '/' && self.peek_at(1) == Some('/') {
                self.bump();
                self.bump();
                let mut text = String::new();
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    text.push(c);
                    self.bump();
                }
                Tok::Comment(text.trim().to_string())
            } else if c == '"' {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.error("unterminated string")),
                        Some('"') => break,
                        Some(c) => s.push(c),
                    }
                }
                Tok::Str(s)
            } else if c.is_ascii_digit() {
                Tok::Int(self.lex_int()?)
            } else if c == '-' && matches!(self.peek_at(1), Some(d) if d.is_ascii_digit()) {
                self.bump();
                Tok::Int(-self.lex_int()?)
            } else if c == '.'
                && matches!(self.peek_at(1), Some('K'))
                && !matches!(self.peek_at(2), Some(c) if is_ident_continue(c))
            {
                self.bump();
                self.bump();
                Tok::DotK
            } else if c == '<' && matches!(self.peek_at(1), Some(c) if is_ident_start(c)) {
                match self.try_cell_open() {
                    Some(label) => Tok::CellOpen(label),
                    None => self.lex_symbol()?,
                }
            } else if c == '<' && self.peek_at(1) == Some('/') {
                self.try_cell_close()?
            } else if is_ident_start(c) {
                self.lex_ident()
            } else {
                self.lex_symbol()?
            };
            out.push(Token { tok, line, col });
        }
    }

    fn lex_int(&mut self) -> Result<BigInt> {
        let mut s = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            s.push(self.bump().unwrap());
        }
        s.parse::<BigInt>()
            .map_err(|_| self.error("bad integer literal"))
    }

    fn lex_ident(&mut self) -> Tok {
        let mut s = String::new();
        s.push(self.bump().unwrap());
        loop {
            match self.peek() {
                Some(c) if is_ident_continue(c) => {
                    s.push(self.bump().unwrap());
                }
                // A dash continues the identifier only when followed by a
                // letter, so `a -Int b` still lexes as an operator.
                Some('-')
                    if matches!(self.peek_at(1), Some(c) if c.is_ascii_alphabetic())
                        && !self.rest_is_minus_int() =>
                {
                    s.push(self.bump().unwrap());
                }
                _ => break,
            }
        }
        // Immediate `:Sort` is a variable annotation.
        if self.peek() == Some(':') {
            if let Some(c) = self.peek_at(1) {
                if c.is_ascii_alphabetic() {
                    let save = (self.pos, self.line, self.col);
                    self.bump();
                    let mut sort = String::new();
                    while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric()) {
                        sort.push(self.bump().unwrap());
                    }
                    if sort.is_empty() {
                        (self.pos, self.line, self.col) = save;
                    } else {
                        return Tok::Annot(s, sort);
                    }
                }
            }
        }
        Tok::Ident(s)
    }

    fn rest_is_minus_int(&self) -> bool {
        self.peek_at(1) == Some('I')
            && self.peek_at(2) == Some('n')
            && self.peek_at(3) == Some('t')
            && !matches!(self.peek_at(4), Some(c) if is_ident_continue(c))
    }

    fn try_cell_open(&mut self) -> Option<String> {
        let save = (self.pos, self.line, self.col);
        self.bump(); // <
        let mut label = String::new();
        while matches!(self.peek(), Some(c) if is_ident_continue(c)) {
            label.push(self.bump().unwrap());
        }
        if !label.is_empty() && self.peek() == Some('>') {
            self.bump();
            Some(label)
        } else {
            (self.pos, self.line, self.col) = save;
            None
        }
    }

    fn try_cell_close(&mut self) -> Result<Tok> {
        self.bump(); // <
        self.bump(); // /
        let mut label = String::new();
        while matches!(self.peek(), Some(c) if is_ident_continue(c)) {
            label.push(self.bump().unwrap());
        }
        if label.is_empty() || self.peek() != Some('>') {
            return Err(self.error("malformed closing cell tag"));
        }
        self.bump();
        Ok(Tok::CellClose(label))
    }

    fn lex_symbol(&mut self) -> Result<Tok> {
        let rest = &self.src[self.pos..];
        for sym in SYMBOLS {
            if rest.starts_with(sym.as_bytes()) {
                // Int-suffixed operators must not swallow identifier heads.
                let after = rest.get(sym.len()).map(|&b| b as char);
                if sym.ends_with("Int") || sym.ends_with('K') {
                    if matches!(after, Some(c) if is_ident_continue(c)) {
                        continue;
                    }
                }
                for _ in 0..sym.len() {
                    self.bump();
                }
                return Ok(Tok::Sym(sym));
            }
        }
        Err(self.error(format!(
            "unexpected character `{}`",
            self.peek().unwrap_or('?')
        )))
    }
}

// ------------------------------------------------------------------
// Raw syntax tree
// ------------------------------------------------------------------

#[derive(Clone, Debug)]
enum Raw {
    Int(BigInt),
    Ident {
        name: String,
        annot: Option<String>,
        line: usize,
        col: usize,
    },
    App {
        name: String,
        args: Vec<Raw>,
        line: usize,
        col: usize,
    },
    Infix {
        sym: &'static str,
        lhs: Box<Raw>,
        rhs: Box<Raw>,
        line: usize,
        col: usize,
    },
    Not(Box<Raw>),
    Seq(Vec<Raw>),
    DotK,
    Cells {
        cells: Vec<(String, Raw)>,
        line: usize,
        col: usize,
    },
}

const BOOL_OPS: &[&str] = &["andBool", "orBool"];
const CMP_OPS: &[&str] = &[
    "==Int", "=/=Int", "<Int", "<=Int", ">Int", ">=Int", "==K", "=/=K", "==", "=/=", "<", "<=",
    ">", ">=",
];

// ------------------------------------------------------------------
// Parser
// ------------------------------------------------------------------

pub struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    sig: &'a Signature,
}

/// Variable sorts inferred so far; shared across the lhs, rhs and requires
/// of one rule, or across the init and final states of one spec.
#[derive(Default)]
struct Scope {
    vars: BTreeMap<Ident, Sort>,
    wildcards: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &str, sig: &'a Signature) -> Result<Parser<'a>> {
        let toks = Lexer::new(text).lex()?;
        let mut p = Parser { toks, pos: 0, sig };
        p.sync();
        Ok(p)
    }

    /// Comments are invisible to term and statement parsing.
    fn sync(&mut self) {
        while self.pos + 1 < self.toks.len() && matches!(self.toks[self.pos].tok, Tok::Comment(_)) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos.min(self.toks.len() - 1)];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        self.sync();
        t
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self.here();
        Error::parse(line, col, msg)
    }

    fn expect_sym(&mut self, sym: &str) -> Result<()> {
        match self.peek() {
            Tok::Sym(s) if *s == sym => {
                self.bump();
                Ok(())
            }
            other => Err(self.error(format!("expected `{sym}`, found {other:?}"))),
        }
    }

    fn expect_ident(&mut self) -> Result<String> {
        match self.bump() {
            Tok::Ident(s) => Ok(s),
            other => Err(self.error(format!("expected identifier, found {other:?}"))),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            other => Err(self.error(format!("expected `{kw}`, found {other:?}"))),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    // ---------------- raw expression grammar ----------------

    fn parse_kexpr(&mut self, stops: &[&str]) -> Result<Raw> {
        let first = self.parse_bexpr(stops)?;
        if matches!(self.peek(), Tok::Sym("~>")) {
            let mut items = vec![first];
            while matches!(self.peek(), Tok::Sym("~>")) {
                self.bump();
                items.push(self.parse_bexpr(stops)?);
            }
            Ok(Raw::Seq(items))
        } else {
            Ok(first)
        }
    }

    fn parse_bexpr(&mut self, stops: &[&str]) -> Result<Raw> {
        let lhs = self.parse_cexpr(stops)?;
        match self.peek() {
            Tok::Ident(s) if BOOL_OPS.contains(&s.as_str()) && !stops.contains(&s.as_str()) => {
                let sym: &'static str = if s == "andBool" { "andBool" } else { "orBool" };
                let (line, col) = self.here();
                self.bump();
                let rhs = self.parse_bexpr(stops)?;
                Ok(Raw::Infix {
                    sym,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                    line,
                    col,
                })
            }
            _ => Ok(lhs),
        }
    }

    fn parse_cexpr(&mut self, stops: &[&str]) -> Result<Raw> {
        if self.at_keyword("notBool") {
            self.bump();
            let arg = self.parse_cexpr(stops)?;
            return Ok(Raw::Not(Box::new(arg)));
        }
        let lhs = self.parse_iexpr(stops)?;
        match self.peek() {
            Tok::Sym(s) if CMP_OPS.contains(s) => {
                let sym = *s;
                let (line, col) = self.here();
                self.bump();
                let rhs = self.parse_iexpr(stops)?;
                Ok(Raw::Infix {
                    sym,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                    line,
                    col,
                })
            }
            _ => Ok(lhs),
        }
    }

    fn parse_iexpr(&mut self, stops: &[&str]) -> Result<Raw> {
        let lhs = self.parse_atom(stops)?;
        match self.peek() {
            Tok::Sym(s)
                if !matches!(*s, "~>" | "=>" | "->" | ")" | "," | "]" | "[" | "(")
                    && !CMP_OPS.contains(s) =>
            {
                let sym = *s;
                let (line, col) = self.here();
                self.bump();
                let rhs = self.parse_iexpr(stops)?;
                Ok(Raw::Infix {
                    sym,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                    line,
                    col,
                })
            }
            _ => Ok(lhs),
        }
    }

    fn parse_atom(&mut self, stops: &[&str]) -> Result<Raw> {
        let (line, col) = self.here();
        match self.bump() {
            Tok::Int(n) => Ok(Raw::Int(n)),
            Tok::DotK => Ok(Raw::DotK),
            Tok::Sym("(") => {
                let inner = self.parse_kexpr(stops)?;
                self.expect_sym(")")?;
                Ok(inner)
            }
            Tok::Annot(name, sort) => Ok(Raw::Ident {
                name,
                annot: Some(sort),
                line,
                col,
            }),
            Tok::Ident(name) => {
                if matches!(self.peek(), Tok::Sym("(")) {
                    self.bump();
                    let mut args = Vec::new();
                    if !matches!(self.peek(), Tok::Sym(")")) {
                        loop {
                            args.push(self.parse_kexpr(stops)?);
                            if matches!(self.peek(), Tok::Sym(",")) {
                                self.bump();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect_sym(")")?;
                    Ok(Raw::App {
                        name,
                        args,
                        line,
                        col,
                    })
                } else {
                    Ok(Raw::Ident {
                        name,
                        annot: None,
                        line,
                        col,
                    })
                }
            }
            other => Err(Error::parse(
                line,
                col,
                format!("expected a term, found {other:?}"),
            )),
        }
    }

    fn parse_cells(&mut self, stops: &[&str]) -> Result<Raw> {
        let (line, col) = self.here();
        let mut cells = Vec::new();
        while let Tok::CellOpen(label) = self.peek().clone() {
            self.bump();
            let body = self.parse_kexpr(stops)?;
            match self.bump() {
                Tok::CellClose(close) if close == label => {}
                other => return Err(self.error(format!("expected `</{label}>`, found {other:?}"))),
            }
            cells.push((label, body));
        }
        if cells.is_empty() {
            return Err(self.error("expected at least one cell"));
        }
        Ok(Raw::Cells { cells, line, col })
    }

    // ---------------- resolution ----------------

    fn resolve(&self, raw: &Raw, expected: Option<&Sort>, scope: &mut Scope) -> Result<TermRef> {
        let t = self.resolve_inner(raw, expected, scope)?;
        Ok(self.coerce(t, expected))
    }

    fn coerce(&self, t: TermRef, expected: Option<&Sort>) -> TermRef {
        if expected == Some(&Sort::k()) && t.sort() != Sort::k() {
            Term::app(KSEQ, Sort::k(), vec![t, Term::app(KDOT, Sort::k(), vec![])])
        } else {
            t
        }
    }

    fn fits(&self, raw_pos: (usize, usize), expected: Option<&Sort>, actual: &Sort) -> Result<()> {
        if let Some(exp) = expected {
            let ok = sort_fits(exp, actual) || (*exp == Sort::k() && *actual != Sort::cells());
            if !ok {
                return Err(Error::parse(
                    raw_pos.0,
                    raw_pos.1,
                    format!("expected sort {exp}, found {actual}"),
                ));
            }
        }
        Ok(())
    }

    fn resolve_inner(
        &self,
        raw: &Raw,
        expected: Option<&Sort>,
        scope: &mut Scope,
    ) -> Result<TermRef> {
        match raw {
            Raw::Int(n) => {
                self.fits((0, 0), expected, &Sort::int())?;
                Ok(Term::int(n.clone()))
            }
            Raw::DotK => Ok(Term::app(KDOT, Sort::k(), vec![])),
            Raw::Seq(items) => {
                let n = items.len();
                // The final element is a sequence tail when it resolves to
                // sort K; a bare unknown identifier there defaults to K.
                let tail_raw = &items[n - 1];
                let tail = match tail_raw {
                    Raw::Ident {
                        name, annot: None, ..
                    } if !scope.vars.contains_key(&Ident::new(name))
                        && !self.is_nullary_ctor(name)
                        && name != "true"
                        && name != "false" =>
                    {
                        self.resolve_inner(tail_raw, Some(&Sort::k()), scope)?
                    }
                    _ => {
                        let t = self.resolve_inner(tail_raw, None, scope)?;
                        if t.sort() == Sort::k() {
                            t
                        } else {
                            Term::app(KSEQ, Sort::k(), vec![t, Term::app(KDOT, Sort::k(), vec![])])
                        }
                    }
                };
                let mut out = tail;
                for item in items[..n - 1].iter().rev() {
                    let it = self.resolve_inner(item, Some(&Sort::k_item()), scope)?;
                    out = Term::app(KSEQ, Sort::k(), vec![it, out]);
                }
                Ok(out)
            }
            Raw::Ident {
                name,
                annot,
                line,
                col,
            } => {
                if name == "true" || name == "false" {
                    self.fits((*line, *col), expected, &Sort::bool())?;
                    return Ok(Term::boolean(name == "true"));
                }
                if annot.is_none() {
                    if let Some(decl) = self.sig.op(&Ident::new(name)) {
                        if decl.args.is_empty() {
                            self.fits((*line, *col), expected, &decl.result)?;
                            return Ok(Term::app(decl.name.clone(), decl.result.clone(), vec![]));
                        }
                    }
                }
                // Variable.
                let mut name = name.clone();
                if name == "_" {
                    name = format!("_{}", scope.wildcards);
                    scope.wildcards += 1;
                }
                let id = Ident::new(&name);
                let sort = if let Some(known) = scope.vars.get(&id) {
                    if let Some(a) = annot {
                        if Sort::new(a) != *known {
                            return Err(Error::parse(
                                *line,
                                *col,
                                format!(
                                    "variable `{name}` annotated {a} but already has sort {known}"
                                ),
                            ));
                        }
                    }
                    known.clone()
                } else {
                    let sort = match annot {
                        Some(a) => Sort::new(a),
                        // A bare variable at an item position is ambiguous
                        // (it would match any single item), so require an
                        // annotation there.
                        None => match expected {
                            Some(s) if *s != Sort::k_item() => s.clone(),
                            _ => {
                                return Err(Error::parse(
                                    *line,
                                    *col,
                                    format!("cannot infer sort of variable `{name}`; annotate as `{name}:Sort`"),
                                ))
                            }
                        },
                    };
                    if !self.sig.has_sort(&sort) {
                        return Err(Error::parse(*line, *col, format!("unknown sort `{sort}`")));
                    }
                    scope.vars.insert(id.clone(), sort.clone());
                    sort
                };
                self.fits((*line, *col), expected, &sort)?;
                Ok(Term::var(id, sort))
            }
            Raw::App {
                name,
                args,
                line,
                col,
            } => {
                let decl = self
                    .sig
                    .op(&Ident::new(name))
                    .ok_or_else(|| {
                        Error::parse(*line, *col, format!("unknown constructor `{name}`"))
                    })?
                    .clone();
                if decl.args.len() != args.len() {
                    return Err(Error::parse(
                        *line,
                        *col,
                        format!(
                            "constructor `{name}` expects {} arguments, found {}",
                            decl.args.len(),
                            args.len()
                        ),
                    ));
                }
                let mut resolved = Vec::with_capacity(args.len());
                for (arg, exp) in args.iter().zip(decl.args.iter()) {
                    resolved.push(self.resolve(arg, Some(exp), scope)?);
                }
                self.fits((*line, *col), expected, &decl.result)?;
                Ok(Term::app(decl.name, decl.result, resolved))
            }
            Raw::Not(inner) => {
                let arg = self.resolve(inner, Some(&Sort::bool()), scope)?;
                self.fits((0, 0), expected, &Sort::bool())?;
                Ok(Term::app("notBool", Sort::bool(), vec![arg]))
            }
            Raw::Infix {
                sym,
                lhs,
                rhs,
                line,
                col,
            } => {
                let ctor = match *sym {
                    "+" => Some(Ident::new("+Int")),
                    "-" => Some(Ident::new("-Int")),
                    "*" => Some(Ident::new("*Int")),
                    "==" | "=/=" | "<" | "<=" | ">" | ">=" => None,
                    s => Some(self.sig.infix.get(s).cloned().ok_or_else(|| {
                        Error::parse(*line, *col, format!("unknown infix operator `{s}`"))
                    })?),
                };
                match ctor {
                    Some(ctor) => {
                        let decl = self.sig.op(&ctor).expect("infix table consistent").clone();
                        let l = self.resolve(lhs, Some(&decl.args[0]), scope)?;
                        let r = self.resolve(rhs, Some(&decl.args[1]), scope)?;
                        self.fits((*line, *col), expected, &decl.result)?;
                        Ok(Term::app(decl.name, decl.result, vec![l, r]))
                    }
                    None => {
                        // Bare comparison: dispatch on operand sorts.
                        let l = self.resolve(lhs, None, scope)?;
                        let r = self.resolve(rhs, None, scope)?;
                        let int_side = l.sort() == Sort::int() || r.sort() == Sort::int();
                        let name = match (*sym, int_side) {
                            ("==", true) => "==Int",
                            ("=/=", true) => "=/=Int",
                            ("<", true) => "<Int",
                            ("<=", true) => "<=Int",
                            (">", true) => ">Int",
                            (">=", true) => ">=Int",
                            ("==", false) => "==K",
                            ("=/=", false) => "=/=K",
                            (op, false) => {
                                return Err(Error::parse(
                                    *line,
                                    *col,
                                    format!("comparison `{op}` needs integer operands"),
                                ))
                            }
                            _ => unreachable!(),
                        };
                        self.fits((*line, *col), expected, &Sort::bool())?;
                        Ok(Term::app(name, Sort::bool(), vec![l, r]))
                    }
                }
            }
            Raw::Cells { cells, line, col } => {
                let mut out = Vec::with_capacity(cells.len());
                for (label, body) in cells {
                    let id = Ident::new(label);
                    let decl = self
                        .sig
                        .cell(&id)
                        .ok_or_else(|| {
                            Error::parse(*line, *col, format!("undeclared cell `{label}`"))
                        })?
                        .clone();
                    let body = self.resolve(body, Some(&decl.body), scope)?;
                    out.push((id, body));
                }
                let bag =
                    CellBag::new(out).map_err(|e| Error::parse(*line, *col, e.to_string()))?;
                Ok(Term::cells(bag))
            }
        }
    }

    fn is_nullary_ctor(&self, name: &str) -> bool {
        self.sig
            .op(&Ident::new(name))
            .map(|d| d.args.is_empty())
            .unwrap_or(false)
    }
}

// ------------------------------------------------------------------
// Semantics files
// ------------------------------------------------------------------

const STMT_KEYWORDS: &[&str] = &[
    "module",
    "sort",
    "op",
    "configuration",
    "rule",
    "spec",
    "init",
    "final",
    "sameloop",
    "terminal",
    "requires",
    "priority",
];

/// Parse a `.sem` semantics file.
pub fn parse_semantics(text: &str) -> Result<Semantics> {
    let mut sig = Signature::new();
    // First pass collects declarations so rules can be resolved in a second
    // pass against the complete signature.
    let base = Parser::new(text, &sig)?;
    let toks = base.toks;

    let mut p = DeclWalker {
        toks: &toks,
        pos: 0,
    };
    p.skip_comments();
    p.expect_kw("module")?;
    let name = p.ident()?;
    let mut rule_spans: Vec<(Option<String>, usize)> = Vec::new();

    while !matches!(p.peek(), Tok::Eof) {
        let comments = p.skip_comments();
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::Ident(kw) if kw == "sort" => {
                p.bump();
                sig.declare_sort(Ident::new(&p.ident()?))?;
            }
            Tok::Ident(kw) if kw == "op" => {
                p.bump();
                let decl = p.op_decl()?;
                sig.declare_op(decl)?;
            }
            Tok::Ident(kw) if kw == "configuration" => {
                p.bump();
                let cells = p.config_decl(&sig)?;
                sig.cells = cells;
            }
            Tok::Ident(kw) if kw == "rule" => {
                let start = p.pos;
                p.skip_rule()?;
                let provenance = comments
                    .iter()
                    .rev()
                    .find(|c| c.starts_with("compiled:"))
                    .cloned();
                rule_spans.push((provenance, start));
            }
            other => {
                let (line, col) = p.here();
                return Err(Error::parse(
                    line,
                    col,
                    format!("expected a declaration, found {other:?}"),
                ));
            }
        }
    }

    // Second pass: parse rules with the full signature.
    let mut rules = Vec::new();
    for (provenance, start) in rule_spans {
        let mut rp = Parser {
            toks: toks.clone(),
            pos: start,
            sig: &sig,
        };
        rp.sync();
        let rule = parse_rule(&mut rp, provenance)?;
        rules.push(rule);
    }
    Semantics::new(Ident::new(&name), sig, rules)
}

/// Token walker for declarations (no term resolution needed).
struct DeclWalker<'a> {
    toks: &'a [Token],
    pos: usize,
}

impl<'a> DeclWalker<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos.min(self.toks.len() - 1)];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn skip_comments(&mut self) -> Vec<String> {
        let mut out = Vec::new();
        while let Tok::Comment(c) = self.peek() {
            out.push(c.clone());
            self.bump();
        }
        out
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self.here();
        Error::parse(line, col, msg)
    }

    fn expect_kw(&mut self, kw: &str) -> Result<()> {
        match self.bump() {
            Tok::Ident(s) if s == kw => Ok(()),
            other => Err(self.error(format!("expected `{kw}`, found {other:?}"))),
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.bump() {
            Tok::Ident(s) => Ok(s),
            other => Err(self.error(format!("expected identifier, found {other:?}"))),
        }
    }

    fn sym(&mut self, sym: &str) -> Result<()> {
        match self.bump() {
            Tok::Sym(s) if s == sym => Ok(()),
            other => Err(self.error(format!("expected `{sym}`, found {other:?}"))),
        }
    }

    /// `op NAME : S1 .. Sn -> S [attr, ...]`
    fn op_decl(&mut self) -> Result<OpDecl> {
        let name = match self.bump() {
            Tok::Ident(s) => s,
            other => return Err(self.error(format!("expected op name, found {other:?}"))),
        };
        self.sym(":")?;
        let mut args = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Sym("->") => {
                    self.bump();
                    break;
                }
                Tok::Ident(s) => {
                    self.bump();
                    args.push(Sort::new(&s));
                }
                other => return Err(self.error(format!("expected sort or `->`, found {other:?}"))),
            }
        }
        let result = Sort::new(&self.ident()?);
        let mut infix = None;
        let mut hook = None;
        if matches!(self.peek(), Tok::Sym("[")) {
            self.bump();
            loop {
                match self.bump() {
                    Tok::Ident(attr) if attr == "infix" => match self.bump() {
                        Tok::Str(s) => infix = Some(s),
                        other => {
                            return Err(self
                                .error(format!("expected infix symbol string, found {other:?}")))
                        }
                    },
                    Tok::Ident(attr) if attr == "hook" => match self.bump() {
                        Tok::Str(s) => hook = Some(s),
                        other => {
                            return Err(
                                self.error(format!("expected hook name string, found {other:?}"))
                            )
                        }
                    },
                    other => return Err(self.error(format!("unknown op attribute {other:?}"))),
                }
                match self.bump() {
                    Tok::Sym(",") => continue,
                    Tok::Sym("]") => break,
                    other => {
                        return Err(self.error(format!("expected `,` or `]`, found {other:?}")))
                    }
                }
            }
        }
        Ok(OpDecl {
            name: Ident::new(&name),
            args,
            result,
            infix,
            hook,
            builtin: false,
        })
    }

    /// `configuration (<label> Sort [pc]? </label>)+`
    fn config_decl(&mut self, sig: &Signature) -> Result<Vec<CellDecl>> {
        let mut cells = Vec::new();
        while let Tok::CellOpen(label) = self.peek().clone() {
            self.bump();
            let sort = Sort::new(&self.ident()?);
            if !sig.has_sort(&sort) {
                return Err(self.error(format!("undeclared sort `{sort}` in configuration")));
            }
            let mut pc = false;
            if matches!(self.peek(), Tok::Sym("[")) {
                self.bump();
                self.expect_kw("pc")?;
                self.sym("]")?;
                pc = true;
            }
            match self.bump() {
                Tok::CellClose(close) if close == label => {}
                other => return Err(self.error(format!("expected `</{label}>`, found {other:?}"))),
            }
            cells.push(CellDecl {
                label: Ident::new(&label),
                body: sort,
                pc,
            });
        }
        if cells.is_empty() {
            return Err(self.error("configuration declares no cells"));
        }
        Ok(cells)
    }

    /// Skip over one rule statement (used by the declaration pass). Stops
    /// before comments that introduce the next statement, so provenance
    /// comments stay available to the statement loop.
    fn skip_rule(&mut self) -> Result<()> {
        self.expect_kw("rule")?;
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return Ok(()),
                Tok::Comment(_) => {
                    let mut j = self.pos;
                    while matches!(self.toks[j].tok, Tok::Comment(_)) {
                        j += 1;
                    }
                    if matches!(
                        &self.toks[j].tok,
                        Tok::Ident(s) if matches!(s.as_str(), "rule" | "sort" | "op" | "configuration" | "module")
                    ) || matches!(self.toks[j].tok, Tok::Eof)
                    {
                        return Ok(());
                    }
                    self.bump();
                }
                Tok::Sym("(") | Tok::Sym("[") => {
                    depth += 1;
                    self.bump();
                }
                Tok::Sym(")") | Tok::Sym("]") => {
                    depth = depth.saturating_sub(1);
                    self.bump();
                }
                Tok::Ident(s)
                    if depth == 0
                        && matches!(
                            s.as_str(),
                            "rule" | "sort" | "op" | "configuration" | "module"
                        ) =>
                {
                    return Ok(());
                }
                _ => {
                    self.bump();
                }
            }
        }
    }
}

/// `rule NAME: CELLS => CELLS [requires EXPR] [priority INT]`
fn parse_rule(p: &mut Parser<'_>, provenance_comment: Option<String>) -> Result<Rule> {
    p.expect_keyword("rule")?;
    let name = p.expect_ident()?;
    p.expect_sym(":")?;
    let mut scope = Scope::default();
    let lhs_raw = p.parse_cells(STMT_KEYWORDS)?;
    p.expect_sym("=>")?;
    let rhs_raw = p.parse_cells(STMT_KEYWORDS)?;
    let lhs = p.resolve(&lhs_raw, None, &mut scope)?;
    let rhs = p.resolve(&rhs_raw, None, &mut scope)?;
    let mut requires = Constraint::tt();
    if p.at_keyword("requires") {
        p.bump();
        let raw = p.parse_kexpr(&["priority", "rule", "sort", "op", "configuration", "module"])?;
        let t = p.resolve(&raw, Some(&Sort::bool()), &mut scope)?;
        requires = from_bool_term(&t);
    }
    let mut priority = PRIORITY_HANDWRITTEN;
    if p.at_keyword("priority") {
        p.bump();
        match p.bump() {
            Tok::Int(n) => {
                priority = i64::try_from(&n).map_err(|_| p.error("priority out of range"))?;
            }
            other => return Err(p.error(format!("expected priority number, found {other:?}"))),
        }
    }
    let provenance = match provenance_comment {
        Some(c) => parse_provenance(&c)
            .ok_or_else(|| p.error(format!("malformed provenance comment `{c}`")))?,
        None => Provenance::Handwritten,
    };
    Ok(Rule {
        name: Ident::new(&name),
        priority,
        lhs,
        rhs,
        requires,
        provenance,
    })
}

/// `compiled: proof <id>, <path>, consolidates <n> rewrites`
pub fn parse_provenance(comment: &str) -> Option<Provenance> {
    let rest = comment.strip_prefix("compiled:")?.trim();
    let rest = rest.strip_prefix("proof ")?;
    let (proof, rest) = rest.split_once(", ")?;
    let (path, rest) = rest.split_once(", ")?;
    let n = rest
        .strip_prefix("consolidates ")?
        .strip_suffix(" rewrites")?;
    Some(Provenance::Compiled {
        proof: proof.to_string(),
        path: path.to_string(),
        consolidated: n.parse().ok()?,
    })
}

pub fn provenance_comment(proof: &str, path: &str, consolidated: usize) -> String {
    format!("compiled: proof {proof}, {path}, consolidates {consolidated} rewrites")
}

// ------------------------------------------------------------------
// Spec files and configurations
// ------------------------------------------------------------------

/// Parse a `.spec` program specification file against a semantics.
pub fn parse_spec(text: &str, sem: &Semantics) -> Result<ProgramSpec> {
    let mut p = Parser::new(text, &sem.sig)?;
    p.expect_keyword("spec")?;
    let name = p.expect_ident()?;
    let mut scope = Scope::default();

    p.expect_keyword("init")?;
    let init_raw = p.parse_cells(STMT_KEYWORDS)?;
    let init_config = p.resolve(&init_raw, None, &mut scope)?;
    let init_req = parse_opt_requires(&mut p, &mut scope)?;

    p.expect_keyword("final")?;
    let final_raw = p.parse_cells(STMT_KEYWORDS)?;
    let final_config = p.resolve(&final_raw, None, &mut scope)?;
    let final_req = parse_opt_requires(&mut p, &mut scope)?;

    let mut options = SpecOptions::default();
    loop {
        if p.at_keyword("sameloop") {
            p.bump();
            options.sameloop = match p.expect_ident()?.as_str() {
                "off" => SameLoopPolicy::Off,
                "head" => {
                    if p.at_keyword("cells") {
                        p.bump();
                        let mut cells = Vec::new();
                        while let Tok::Ident(s) = p.peek().clone() {
                            if STMT_KEYWORDS.contains(&s.as_str()) {
                                break;
                            }
                            p.bump();
                            cells.push(Ident::new(&s));
                        }
                        SameLoopPolicy::HeadAndCells(cells)
                    } else {
                        SameLoopPolicy::HeadAndCells(Vec::new())
                    }
                }
                other => return Err(p.error(format!("unknown sameloop policy `{other}`"))),
            };
        } else if p.at_keyword("terminal") {
            p.bump();
            options.terminal = match p.expect_ident()?.as_str() {
                "spec-final" => TerminalPolicy::SpecFinalOrStuck,
                "final-only" => TerminalPolicy::SpecFinalOnly,
                other => return Err(p.error(format!("unknown terminal policy `{other}`"))),
            };
        } else {
            break;
        }
    }
    match p.peek() {
        Tok::Eof => {}
        other => return Err(p.error(format!("unexpected trailing input {other:?}"))),
    }

    ProgramSpec::new(
        Ident::new(&name),
        CTerm::new(init_config, init_req),
        CTerm::new(final_config, final_req),
        options,
        sem,
    )
}

fn parse_opt_requires(p: &mut Parser<'_>, scope: &mut Scope) -> Result<Constraint> {
    if p.at_keyword("requires") {
        p.bump();
        let raw = p.parse_kexpr(STMT_KEYWORDS)?;
        let t = p.resolve(&raw, Some(&Sort::bool()), scope)?;
        Ok(from_bool_term(&t))
    } else {
        Ok(Constraint::tt())
    }
}

/// Parse a bare configuration (`.cfg` contents) against a semantics.
pub fn parse_config(text: &str, sem: &Semantics) -> Result<TermRef> {
    let mut p = Parser::new(text, &sem.sig)?;
    let raw = p.parse_cells(STMT_KEYWORDS)?;
    let mut scope = Scope::default();
    let config = p.resolve(&raw, None, &mut scope)?;
    match p.peek() {
        Tok::Eof => {}
        other => return Err(p.error(format!("unexpected trailing input {other:?}"))),
    }
    sem.sig.check_config(&config)?;
    Ok(config)
}

/// Parse a constrained term from separate configuration and constraint
/// texts, sharing one variable scope (used by proof serialization).
pub fn parse_cterm(config_text: &str, constraint_text: &str, sem: &Semantics) -> Result<CTerm> {
    let mut scope = Scope::default();
    let mut p = Parser::new(config_text, &sem.sig)?;
    let raw = p.parse_cells(STMT_KEYWORDS)?;
    let config = p.resolve(&raw, None, &mut scope)?;

    let mut pc = Parser::new(constraint_text, &sem.sig)?;
    let craw = pc.parse_kexpr(&[])?;
    let t = pc.resolve(&craw, Some(&Sort::bool()), &mut scope)?;
    Ok(CTerm::new(config, from_bool_term(&t)))
}

/// Parse a term of any sort in the context of a semantics (tests, tools).
pub fn parse_term(text: &str, sem: &Semantics) -> Result<TermRef> {
    let mut p = Parser::new(text, &sem.sig)?;
    let raw = p.parse_kexpr(&[])?;
    let mut scope = Scope::default();
    p.resolve(&raw, None, &mut scope)
}

/// Parse a constraint expression in the context of a semantics.
pub fn parse_constraint(text: &str, sem: &Semantics) -> Result<Constraint> {
    let mut p = Parser::new(text, &sem.sig)?;
    let raw = p.parse_kexpr(&[])?;
    let mut scope = Scope::default();
    let t = p.resolve(&raw, Some(&Sort::bool()), &mut scope)?;
    Ok(from_bool_term(&t))
}
