//! Recursive-descent parser for the `.hop` operator format.

use std::collections::BTreeMap;

use super::lexer::{lex, ParseError, Spanned, Tok};
use crate::expr::{Atom, Expr, RewriteTable};
use crate::operator::{FieldSpace, Mat, OperatorSpec};

/// Declarations and raw matrices of one source file, before conversion.
#[derive(Clone, Debug, Default)]
pub struct SourceUnit {
    pub fields: Vec<String>,
    pub dims: Vec<String>,
    pub params: Vec<String>,
    /// function name -> argument field indices
    pub funcs: BTreeMap<String, Vec<usize>>,
    /// leading matrices keyed by dimension index
    pub g: BTreeMap<usize, Vec<Vec<Expr>>>,
    pub tail: Option<Vec<Vec<Expr>>>,
    pub omega: Option<Vec<Vec<Expr>>>,
    pub rewrites: Vec<(Atom, Expr)>,
    pub perturb: BTreeMap<Atom, Expr>,
}

/// A parsed unit converted to an operator, with any perturbation bindings.
#[derive(Clone, Debug)]
pub struct ParsedUnit {
    pub unit: SourceUnit,
    pub spec: OperatorSpec,
}

/// Hard caps keeping the parser total on adversarial input.
const MAX_EXPR_DEPTH: u32 = 256;
const MAX_EXPONENT: i64 = 64;

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    depth: u32,
    unit: SourceUnit,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn advance(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_here<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError::at(t.line, t.col, msg))
    }

    fn expect(&mut self, tok: Tok) -> Result<Spanned, ParseError> {
        if self.peek().tok == tok {
            Ok(self.advance())
        } else {
            let found = self.peek().tok.clone();
            self.err_here(format!("expected {tok}, found {found}"))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, u32, u32), ParseError> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => {
                let t = self.advance();
                Ok((s, t.line, t.col))
            }
            other => self.err_here(format!("expected identifier, found {other}")),
        }
    }

    fn known(&self, name: &str) -> bool {
        self.unit.fields.iter().any(|f| f == name)
            || self.unit.dims.iter().any(|d| d == name)
            || self.unit.params.iter().any(|p| p == name)
            || self.unit.funcs.contains_key(name)
            || name == "fields"
            || name == "dims"
            || name == "param"
            || name == "func"
            || name == "rewrite"
            || name == "perturb"
            || name == "tail"
            || name == "omega"
    }

    fn declare(&mut self, name: &str, line: u32, col: u32) -> Result<(), ParseError> {
        if self.known(name) || self.unit.dims.iter().any(|d| format!("g{d}") == name) {
            return Err(ParseError::at(
                line,
                col,
                format!("`{name}` is already declared or reserved"),
            ));
        }
        Ok(())
    }

    fn unit(mut self) -> Result<SourceUnit, ParseError> {
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::Eof => break,
                Tok::Ident(word) => match word.as_str() {
                    "fields" => {
                        self.advance();
                        self.ident_list(|p, name, l, c| {
                            p.declare(&name, l, c)?;
                            p.unit.fields.push(name);
                            Ok(())
                        })?;
                    }
                    "dims" => {
                        self.advance();
                        self.ident_list(|p, name, l, c| {
                            p.declare(&name, l, c)?;
                            p.unit.dims.push(name);
                            Ok(())
                        })?;
                    }
                    "param" => {
                        self.advance();
                        self.ident_list(|p, name, l, c| {
                            p.declare(&name, l, c)?;
                            p.unit.params.push(name);
                            Ok(())
                        })?;
                    }
                    "func" => {
                        self.advance();
                        self.func_decl()?;
                    }
                    "rewrite" => {
                        self.advance();
                        self.rewrite_rule()?;
                    }
                    "perturb" => {
                        self.advance();
                        self.perturb_block()?;
                    }
                    "tail" => {
                        self.advance();
                        self.expect(Tok::Eq)?;
                        let m = self.matrix()?;
                        if self.unit.tail.replace(m).is_some() {
                            return Err(ParseError::at(t.line, t.col, "duplicate `tail`"));
                        }
                    }
                    "omega" => {
                        self.advance();
                        self.expect(Tok::Eq)?;
                        let m = self.matrix()?;
                        if self.unit.omega.replace(m).is_some() {
                            return Err(ParseError::at(t.line, t.col, "duplicate `omega`"));
                        }
                    }
                    other => {
                        if let Some(rest) = other.strip_prefix('g') {
                            if let Some(d) = self.unit.dims.iter().position(|x| x == rest) {
                                self.advance();
                                self.expect(Tok::Eq)?;
                                let m = self.matrix()?;
                                if self.unit.g.insert(d, m).is_some() {
                                    return Err(ParseError::at(
                                        t.line,
                                        t.col,
                                        format!("duplicate `{other}`"),
                                    ));
                                }
                                continue;
                            }
                        }
                        return self.err_here(format!(
                            "expected a declaration or matrix, found identifier `{other}`"
                        ));
                    }
                },
                other => {
                    let msg = format!("expected a declaration or matrix, found {other}");
                    return self.err_here(msg);
                }
            }
        }
        Ok(self.unit)
    }

    fn ident_list(
        &mut self,
        mut push: impl FnMut(&mut Parser, String, u32, u32) -> Result<(), ParseError>,
    ) -> Result<(), ParseError> {
        let (first, l, c) = self.expect_ident()?;
        push(self, first, l, c)?;
        loop {
            match self.peek().tok.clone() {
                Tok::Comma => {
                    self.advance();
                    let (name, l, c) = self.expect_ident()?;
                    push(self, name, l, c)?;
                }
                Tok::Ident(name) if !self.known(&name) && self.looks_like_list_item(&name) => {
                    let t = self.advance();
                    push(self, name, t.line, t.col)?;
                }
                _ => break,
            }
        }
        Ok(())
    }

    /// A bare identifier continues a declaration list only if it is not
    /// followed by `=` or `(` (which would start the next statement).
    fn looks_like_list_item(&self, _name: &str) -> bool {
        match self.toks.get(self.pos + 1).map(|t| &t.tok) {
            Some(Tok::Eq) | Some(Tok::LParen) => false,
            _ => true,
        }
    }

    fn func_decl(&mut self) -> Result<(), ParseError> {
        let (name, l, c) = self.expect_ident()?;
        self.declare(&name, l, c)?;
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        loop {
            let (arg, al, ac) = self.expect_ident()?;
            match self.unit.fields.iter().position(|f| *f == arg) {
                Some(ix) => args.push(ix),
                None => {
                    return Err(ParseError::at(
                        al,
                        ac,
                        format!("function argument `{arg}` is not a declared field"),
                    ))
                }
            }
            match self.peek().tok {
                Tok::Comma => {
                    self.advance();
                }
                _ => break,
            }
        }
        self.expect(Tok::RParen)?;
        self.unit.funcs.insert(name, args);
        Ok(())
    }

    fn rewrite_rule(&mut self) -> Result<(), ParseError> {
        let (name, l, c) = self.expect_ident()?;
        let atom = self.resolve_ident(&name, l, c)?;
        match &atom {
            Atom::FuncDeriv { deriv, .. } if !deriv.is_empty() => {}
            _ => {
                return Err(ParseError::at(
                    l,
                    c,
                    "rewrite keys must be derivative forms such as `G_w`",
                ))
            }
        }
        self.expect(Tok::Eq)?;
        let rhs = self.expr()?;
        self.unit.rewrites.push((atom, rhs));
        Ok(())
    }

    fn perturb_block(&mut self) -> Result<(), ParseError> {
        self.expect(Tok::LBrace)?;
        while self.peek().tok != Tok::RBrace {
            let (name, l, c) = self.expect_ident()?;
            let atom = self.resolve_ident(&name, l, c)?;
            match &atom {
                Atom::FuncDeriv { .. } | Atom::Param(_) => {}
                _ => {
                    return Err(ParseError::at(
                        l,
                        c,
                        "perturbations bind declared functions or parameters",
                    ))
                }
            }
            self.expect(Tok::Eq)?;
            let rhs = self.expr()?;
            self.unit.perturb.insert(atom, rhs);
        }
        self.expect(Tok::RBrace)?;
        Ok(())
    }

    fn matrix(&mut self) -> Result<Vec<Vec<Expr>>, ParseError> {
        self.expect(Tok::LBracket)?;
        let mut rows = Vec::new();
        loop {
            self.expect(Tok::LBracket)?;
            let mut row = Vec::new();
            loop {
                row.push(self.expr()?);
                match self.peek().tok {
                    Tok::Comma => {
                        self.advance();
                    }
                    _ => break,
                }
            }
            self.expect(Tok::RBracket)?;
            rows.push(row);
            match self.peek().tok {
                Tok::Comma => {
                    self.advance();
                }
                _ => break,
            }
        }
        self.expect(Tok::RBracket)?;
        Ok(rows)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.depth += 1;
        if self.depth > MAX_EXPR_DEPTH {
            self.depth -= 1;
            return self.err_here("expression nesting too deep");
        }
        let out = self.expr_inner();
        self.depth -= 1;
        out
    }

    fn expr_inner(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.advance();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.advance();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.advance();
                    acc = acc.mul(&self.factor()?);
                }
                Tok::Slash => {
                    let t = self.advance();
                    let rhs = self.factor()?;
                    acc = acc
                        .div(&rhs)
                        .map_err(|e| ParseError::at(t.line, t.col, e.to_string()))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let mut negate = false;
        loop {
            match self.peek().tok {
                Tok::Minus => {
                    self.advance();
                    negate = !negate;
                }
                Tok::Plus => {
                    self.advance();
                }
                _ => break,
            }
        }
        let e = self.power()?;
        Ok(if negate { e.neg() } else { e })
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek().tok == Tok::Caret {
            let t = self.advance();
            let neg = if self.peek().tok == Tok::Minus {
                self.advance();
                true
            } else {
                false
            };
            match self.peek().tok.clone() {
                Tok::Int(n) => {
                    self.advance();
                    if n > MAX_EXPONENT {
                        return Err(ParseError::at(t.line, t.col, "exponent too large"));
                    }
                    let exp = if neg { -n } else { n };
                    base.int_pow(exp)
                        .map_err(|e| ParseError::at(t.line, t.col, e.to_string()))
                }
                other => {
                    let msg = format!("exponent must be an integer literal, found {other}");
                    self.err_here(msg)
                }
            }
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(n) => {
                self.advance();
                Ok(Expr::int(n))
            }
            Tok::LParen => {
                self.advance();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.advance();
                let atom = self.resolve_ident(&name, t.line, t.col)?;
                // optional argument list after a base function atom
                if self.peek().tok == Tok::LParen {
                    if let Atom::FuncDeriv { args, deriv, .. } = &atom {
                        if deriv.is_empty() {
                            self.check_application(args.iter().map(|f| f.0 as usize).collect())?;
                            return Ok(Expr::atom(atom));
                        }
                    }
                    return Err(ParseError::at(
                        t.line,
                        t.col,
                        format!("`{name}` cannot take an argument list here"),
                    ));
                }
                Ok(Expr::atom(atom))
            }
            other => {
                let msg = format!("expected an expression, found {other}");
                self.err_here(msg)
            }
        }
    }

    fn check_application(&mut self, declared: Vec<usize>) -> Result<(), ParseError> {
        let open = self.expect(Tok::LParen)?;
        let mut seen = Vec::new();
        loop {
            let (arg, al, ac) = self.expect_ident()?;
            match self.unit.fields.iter().position(|f| *f == arg) {
                Some(ix) => seen.push(ix),
                None => {
                    return Err(ParseError::at(
                        al,
                        ac,
                        format!("`{arg}` is not a declared field"),
                    ))
                }
            }
            match self.peek().tok {
                Tok::Comma => {
                    self.advance();
                }
                _ => break,
            }
        }
        self.expect(Tok::RParen)?;
        if seen != declared {
            return Err(ParseError::at(
                open.line,
                open.col,
                "argument list does not match the function declaration",
            ));
        }
        Ok(())
    }

    /// Resolve an identifier to an atom: declared names first, then the
    /// `head_suffix` forms (jet `v_y`, derivative `F_vw`).
    fn resolve_ident(&self, name: &str, l: u32, c: u32) -> Result<Atom, ParseError> {
        if let Some(ix) = self.unit.fields.iter().position(|f| f == name) {
            return Ok(Atom::field(ix));
        }
        if self.unit.params.iter().any(|p| p == name) {
            return Ok(Atom::param(name));
        }
        if let Some(args) = self.unit.funcs.get(name) {
            return Ok(Atom::func(name, args));
        }
        if let Some((head, suffix)) = name.split_once('_') {
            if !suffix.is_empty() {
                if let Some(k) = self.unit.fields.iter().position(|f| f == head) {
                    if let Some(d) = self.unit.dims.iter().position(|x| x == suffix) {
                        return Ok(Atom::jet(k, d));
                    }
                    return Err(ParseError::at(
                        l,
                        c,
                        format!("`{suffix}` is not a declared dimension"),
                    ));
                }
                if let Some(args) = self.unit.funcs.get(head) {
                    let mut deriv = Vec::new();
                    for ch in suffix.chars().filter(|c| *c != '_') {
                        let fname = ch.to_string();
                        match self.unit.fields.iter().position(|f| *f == fname) {
                            Some(ix) if args.contains(&ix) => deriv.push(ix),
                            Some(_) => {
                                return Err(ParseError::at(
                                    l,
                                    c,
                                    format!("`{head}` does not depend on `{fname}`"),
                                ))
                            }
                            None => {
                                return Err(ParseError::at(
                                    l,
                                    c,
                                    format!("`{fname}` is not a declared field"),
                                ))
                            }
                        }
                    }
                    return Ok(Atom::func_deriv(head, args, &deriv));
                }
            }
        }
        Err(ParseError::at(
            l,
            c,
            format!("undeclared identifier `{name}`"),
        ))
    }
}

fn to_mat(rows: Option<Vec<Vec<Expr>>>, n: usize, what: &str) -> Result<Mat, ParseError> {
    match rows {
        None => Ok(Mat::zero(n)),
        Some(rows) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(ParseError::at(
                    0,
                    0,
                    format!("{what} must be a {n}x{n} matrix"),
                ));
            }
            Ok(Mat::from_rows(rows))
        }
    }
}

/// Parse a `.hop` source text into an operator.
pub fn parse(input: &str) -> Result<ParsedUnit, ParseError> {
    let toks = lex(input)?;
    let parser = Parser {
        toks,
        pos: 0,
        depth: 0,
        unit: SourceUnit::default(),
    };
    let unit = parser.unit()?;
    if unit.fields.is_empty() {
        return Err(ParseError::at(1, 1, "no `fields` declaration"));
    }
    if unit.dims.is_empty() {
        return Err(ParseError::at(1, 1, "no `dims` declaration"));
    }
    let n = unit.fields.len();
    let field_names: Vec<&str> = unit.fields.iter().map(|s| s.as_str()).collect();
    let dim_names: Vec<&str> = unit.dims.iter().map(|s| s.as_str()).collect();
    let space = FieldSpace::new(&field_names, &dim_names);
    let mut g = Vec::new();
    for d in 0..unit.dims.len() {
        g.push(to_mat(
            unit.g.get(&d).cloned(),
            n,
            &format!("g{}", unit.dims[d]),
        )?);
    }
    let tail = to_mat(unit.tail.clone(), n, "tail")?;
    let omega = to_mat(unit.omega.clone(), n, "omega")?;
    let rewrites = RewriteTable::new(unit.rewrites.clone())
        .map_err(|e| ParseError::at(0, 0, e.to_string()))?;
    let spec = OperatorSpec::from_parts(space, g, tail, omega, rewrites)
        .map_err(|e| ParseError::at(0, 0, e.to_string()))?;
    Ok(ParsedUnit { unit, spec })
}
