use super::lexer::{Tok, Token};
use super::Span;
use crate::{CmpOp, Domain, Expr, ModelError, TableExpr, VariableDecl, VariableKind};

pub(super) const KEYWORDS: &[&str] = &[
    "domain", "values", "exo", "endo", "table", "and", "or", "not", "if", "then", "else", "min",
    "max",
];

/// Source locations of an expression tree, shaped like the tree itself.
///
/// Binary operators are located at the operator token.
#[derive(Debug, Clone)]
pub(super) struct SpanTree {
    pub span: Span,
    pub children: Vec<SpanTree>,
}

impl SpanTree {
    fn leaf(span: Span) -> Self {
        SpanTree {
            span,
            children: Vec::new(),
        }
    }

    pub(super) fn locate(&self, path: &[usize]) -> Span {
        match path.split_first() {
            Some((&i, rest)) => self
                .children
                .get(i)
                .map_or(self.span, |c| c.locate(rest)),
            None => self.span,
        }
    }
}

pub(super) struct ParsedDomain {
    pub result: Result<Domain, ModelError>,
    pub span: Span,
}

pub(super) struct ParsedVariable {
    pub decl: VariableDecl,
    pub span: Span,
    pub body_spans: Option<SpanTree>,
}

#[derive(Default)]
pub(super) struct ParsedDocument {
    pub domains: Vec<ParsedDomain>,
    pub variables: Vec<ParsedVariable>,
}

pub(super) type SyntaxError = (String, Span);

pub(super) struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Parser<'a> {
    pub(super) fn new(tokens: &'a [Token]) -> Self {
        Parser { tokens, pos: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn prev_end(&self) -> usize {
        self.pos
            .checked_sub(1)
            .map_or(0, |p| self.tokens[p].span.end)
    }

    fn bump(&mut self) -> &Token {
        let t = &self.tokens[self.pos];
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T, SyntaxError> {
        Err((
            format!("expected {expected}, found {}", self.peek().describe()),
            self.span(),
        ))
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Span, SyntaxError> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            self.error(&tok.describe())
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Word(w) if w == kw)
    }

    fn keyword(&mut self, kw: &str) -> Result<Span, SyntaxError> {
        if self.is_keyword(kw) {
            Ok(self.bump().span)
        } else {
            self.error(&format!("`{kw}`"))
        }
    }

    /// A non-keyword word: identifier or value token.
    fn word(&mut self, what: &str) -> Result<(String, Span), SyntaxError> {
        match self.peek() {
            Tok::Word(w) if !KEYWORDS.contains(&w.as_str()) => {
                let w = w.clone();
                Ok((w, self.bump().span))
            }
            _ => self.error(what),
        }
    }

    pub(super) fn document(&mut self) -> Result<ParsedDocument, SyntaxError> {
        let mut doc = ParsedDocument::default();
        loop {
            let start = self.span().start;
            match self.peek() {
                Tok::Eof => return Ok(doc),
                Tok::Word(w) if w == "domain" => {
                    let result = self.domain()?;
                    doc.domains.push(ParsedDomain {
                        result,
                        span: Span::new(start, self.prev_end()),
                    });
                }
                Tok::Word(w) if w == "exo" || w == "endo" => {
                    let (decl, body_spans) = self.variable()?;
                    doc.variables.push(ParsedVariable {
                        decl,
                        span: Span::new(start, self.prev_end()),
                        body_spans,
                    });
                }
                _ => return self.error("`domain`, `exo` or `endo`"),
            }
        }
    }

    fn domain(&mut self) -> Result<Result<Domain, ModelError>, SyntaxError> {
        self.keyword("domain")?;
        let (name, _) = self.word("a domain name")?;
        self.expect(Tok::LBrace)?;
        self.keyword("values")?;
        let mut values: Vec<String> = Vec::new();
        let mut order = Vec::new();
        loop {
            let (first, _) = self.word("a value")?;
            if !values.contains(&first) {
                values.push(first.clone());
            }
            let mut prev = first;
            while self.eat(&Tok::Lt) {
                let (next, _) = self.word("a value")?;
                if !values.contains(&next) {
                    values.push(next.clone());
                }
                order.push((prev, next.clone()));
                prev = next;
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(Domain::new(name, values, &order))
    }

    fn variable(&mut self) -> Result<(VariableDecl, Option<SpanTree>), SyntaxError> {
        let kind = if self.is_keyword("exo") {
            VariableKind::Exogenous
        } else {
            VariableKind::Endogenous
        };
        self.bump();
        let (name, _) = self.word("a variable name")?;
        self.expect(Tok::Colon)?;
        let (domain, _) = self.word("a domain name")?;
        let (equation, spans) = match kind {
            VariableKind::Exogenous => (None, None),
            VariableKind::Endogenous => {
                self.expect(Tok::Assign)?;
                let (e, s) = self.expr()?;
                (Some(e), Some(s))
            }
        };
        Ok((
            VariableDecl {
                name,
                kind,
                domain,
                equation,
                parents: None,
            },
            spans,
        ))
    }

    fn expr(&mut self) -> Result<(Expr, SpanTree), SyntaxError> {
        if self.is_keyword("if") {
            let span = self.bump().span;
            let (c, cs) = self.expr()?;
            self.keyword("then")?;
            let (a, as_) = self.expr()?;
            self.keyword("else")?;
            let (b, bs) = self.expr()?;
            return Ok((
                Expr::ite(c, a, b),
                SpanTree {
                    span,
                    children: vec![cs, as_, bs],
                },
            ));
        }
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<(Expr, SpanTree), SyntaxError> {
        let (mut lhs, mut ls) = self.and_expr()?;
        while self.is_keyword("or") {
            let span = self.bump().span;
            let (rhs, rs) = self.and_expr()?;
            lhs = Expr::or(lhs, rhs);
            ls = SpanTree {
                span,
                children: vec![ls, rs],
            };
        }
        Ok((lhs, ls))
    }

    fn and_expr(&mut self) -> Result<(Expr, SpanTree), SyntaxError> {
        let (mut lhs, mut ls) = self.not_expr()?;
        while self.is_keyword("and") {
            let span = self.bump().span;
            let (rhs, rs) = self.not_expr()?;
            lhs = Expr::and(lhs, rhs);
            ls = SpanTree {
                span,
                children: vec![ls, rs],
            };
        }
        Ok((lhs, ls))
    }

    fn not_expr(&mut self) -> Result<(Expr, SpanTree), SyntaxError> {
        if self.is_keyword("not") {
            let span = self.bump().span;
            let (e, s) = self.not_expr()?;
            return Ok((
                Expr::not(e),
                SpanTree {
                    span,
                    children: vec![s],
                },
            ));
        }
        self.cmp_expr()
    }

    fn cmp_op(&self) -> Option<CmpOp> {
        Some(match self.peek() {
            Tok::EqEq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            _ => return None,
        })
    }

    fn cmp_expr(&mut self) -> Result<(Expr, SpanTree), SyntaxError> {
        let (lhs, ls) = self.primary()?;
        let Some(op) = self.cmp_op() else {
            return Ok((lhs, ls));
        };
        let span = self.bump().span;
        let (rhs, rs) = self.primary()?;
        if self.cmp_op().is_some() {
            return Err((
                "comparisons cannot be chained; add parentheses".into(),
                self.span(),
            ));
        }
        Ok((
            Expr::cmp(op, lhs, rhs),
            SpanTree {
                span,
                children: vec![ls, rs],
            },
        ))
    }

    fn primary(&mut self) -> Result<(Expr, SpanTree), SyntaxError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Word(w) if w == "min" || w == "max" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let mut args = Vec::new();
                let mut spans = Vec::new();
                loop {
                    let (e, s) = self.expr()?;
                    args.push(e);
                    spans.push(s);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::RParen)?;
                let e = if w == "min" {
                    Expr::Min(args)
                } else {
                    Expr::Max(args)
                };
                Ok((
                    e,
                    SpanTree {
                        span,
                        children: spans,
                    },
                ))
            }
            Tok::Word(w) if w == "table" => {
                self.bump();
                let t = self.table()?;
                Ok((Expr::Table(t), SpanTree::leaf(Span::new(span.start, self.prev_end()))))
            }
            Tok::Word(w) if !KEYWORDS.contains(&w.as_str()) => {
                self.bump();
                Ok((Expr::Var(w), SpanTree::leaf(span)))
            }
            _ => self.error("an expression"),
        }
    }

    fn word_list(&mut self, what: &str) -> Result<Vec<String>, SyntaxError> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                out.push(self.word(what)?.0);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen)?;
        }
        Ok(out)
    }

    fn table(&mut self) -> Result<TableExpr, SyntaxError> {
        let args = self.word_list("a variable name")?;
        self.expect(Tok::LBrace)?;
        let mut rows = Vec::new();
        while *self.peek() != Tok::RBrace {
            let key = self.word_list("a value")?;
            self.expect(Tok::Arrow)?;
            let (out, _) = self.word("a value")?;
            rows.push((key, out));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(TableExpr { args, rows })
    }
}
