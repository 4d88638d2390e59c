//! The `.cm` text format for causal models.
//!
//! ```text
//! # comments run to end of line
//! domain Bool  { values 0 < 1 }
//! domain Level { values low < mid < high }
//! domain Shape { values base < left, base < right }   # a partial order
//!
//! exo U1 : Bool
//! exo L  : Level
//! endo V1 : Bool = U1 and not (L == high)
//! endo V2 : Level = if V1 then max(L, mid) else low
//! endo V3 : Bool = table(V1, U1) {
//!   (0, 0) -> 0,
//!   (0, 1) -> 1,
//!   (1, 0) -> 1,
//!   (1, 1) -> 0
//! }
//! ```
//!
//! Parents of an endogenous variable are the variables its equation reads.
//! Names that are not variables but are declared values are literals.

mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

use crate::{CausalModel, ModelSpec, Violation};
use parser::{ParsedDocument, Parser, SpanTree};

/// Byte range into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    Syntax,
    Type,
    Validation,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosticKind::Syntax => "syntax error",
            DiagnosticKind::Type => "type error",
            DiagnosticKind::Validation => "invalid model",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
    pub span: Span,
    /// 1-based line of `span.start`.
    pub line: usize,
    /// 1-based column (in characters) of `span.start`.
    pub column: usize,
    pub violation: Option<Violation>,
}

impl Diagnostic {
    fn new(text: &str, kind: DiagnosticKind, message: String, span: Span) -> Self {
        let before = &text[..span.start.min(text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Diagnostic {
            kind,
            message,
            span,
            line,
            column,
            violation: None,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.kind, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", .diagnostics.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseError {
    pub fn is_syntax(&self) -> bool {
        self.diagnostics.iter().any(|d| d.kind == DiagnosticKind::Syntax)
    }
}

/// Where a declaration sits in the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclSpan {
    pub name: String,
    pub is_domain: bool,
    pub span: Span,
}

/// A parsed `.cm` source: the text, its declaration spans and the model.
#[derive(Debug, Clone)]
pub struct ModelDocument {
    pub text: String,
    pub spans: Vec<DeclSpan>,
    pub model: CausalModel,
}

impl ModelDocument {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let fail = |kind, message, span| ParseError {
            diagnostics: vec![Diagnostic::new(text, kind, message, span)],
        };
        let tokens = lexer::lex(text).map_err(|(m, s)| fail(DiagnosticKind::Syntax, m, s))?;
        let parsed = Parser::new(&tokens)
            .document()
            .map_err(|(m, s)| fail(DiagnosticKind::Syntax, m, s))?;
        build(text, parsed)
    }
}

fn build(text: &str, parsed: ParsedDocument) -> Result<ModelDocument, ParseError> {
    let mut diagnostics = Vec::new();
    let mut spans = Vec::new();
    let mut spec = ModelSpec::default();
    for d in parsed.domains {
        match d.result {
            Ok(domain) => {
                spans.push(DeclSpan {
                    name: domain.name().to_string(),
                    is_domain: true,
                    span: d.span,
                });
                spec.domains.push(domain);
            }
            Err(e) => {
                let mut diag =
                    Diagnostic::new(text, DiagnosticKind::Validation, e.to_string(), d.span);
                diag.violation = Some(Violation::InvalidDomain(e));
                diagnostics.push(diag);
            }
        }
    }
    let var_names: Vec<String> = parsed.variables.iter().map(|v| v.decl.name.clone()).collect();
    let is_var = |n: &str| var_names.iter().any(|v| v == n);
    let is_value = |n: &str| spec.domains.iter().any(|d| d.contains(n));
    let mut body_spans: Vec<(String, Option<SpanTree>)> = Vec::new();
    for mut v in parsed.variables {
        if let Some(e) = v.decl.equation.as_mut() {
            e.resolve_names(&is_var, &is_value);
        }
        spans.push(DeclSpan {
            name: v.decl.name.clone(),
            is_domain: false,
            span: v.span,
        });
        body_spans.push((v.decl.name.clone(), v.body_spans.take()));
        spec.variables.push(v.decl);
    }

    let model = match CausalModel::new(&spec) {
        Ok(m) if diagnostics.is_empty() => m,
        Ok(_) => return Err(ParseError { diagnostics }),
        Err(crate::ModelError::Invalid(violations)) => {
            for v in violations {
                let decl_span = v.subject().and_then(|name| {
                    spans
                        .iter()
                        .find(|s| s.name == name && s.is_domain == matches!(v, Violation::DuplicateDomain(_)))
                        .map(|s| s.span)
                });
                let (kind, span) = match &v {
                    Violation::Type { equation, path, .. } => {
                        let tree = body_spans
                            .iter()
                            .find(|(n, _)| n == equation)
                            .and_then(|(_, t)| t.as_ref());
                        (
                            DiagnosticKind::Type,
                            tree.map(|t| t.locate(path))
                                .or(decl_span)
                                .unwrap_or_default(),
                        )
                    }
                    _ => (DiagnosticKind::Validation, decl_span.unwrap_or_default()),
                };
                let mut diag = Diagnostic::new(text, kind, v.to_string(), span);
                diag.violation = Some(v);
                diagnostics.push(diag);
            }
            return Err(ParseError { diagnostics });
        }
        Err(other) => unreachable!("model construction only reports violations: {other}"),
    };
    Ok(ModelDocument {
        text: text.to_string(),
        spans,
        model,
    })
}

/// Parses and validates a `.cm` source.
pub fn parse_model(text: &str) -> Result<CausalModel, ParseError> {
    ModelDocument::parse(text).map(|d| d.model)
}

/// Canonical text for `model`: domains, then exogenous, then endogenous
/// variables, each sorted by name. Re-parses to an equal model.
pub fn serialize_model(model: &CausalModel) -> String {
    let mut out = String::new();
    for d in model.domains() {
        out.push_str("domain ");
        out.push_str(d.name());
        out.push_str(" { values ");
        if d.is_declared_chain() {
            out.push_str(&d.values().join(" < "));
        } else {
            let mut segments: Vec<String> = d.values().to_vec();
            segments.extend(d.covering_pairs().into_iter().map(|(a, b)| format!("{a} < {b}")));
            out.push_str(&segments.join(", "));
        }
        out.push_str(" }\n");
    }
    let exo: Vec<_> = model.exogenous().collect();
    if !exo.is_empty() {
        out.push('\n');
    }
    for v in exo {
        out.push_str(&format!("exo {} : {}\n", v.name, v.domain));
    }
    let endo: Vec<_> = model.endogenous().collect();
    if !endo.is_empty() {
        out.push('\n');
    }
    for v in endo {
        let body = model.equation(&v.name).expect("endogenous variables have equations");
        out.push_str(&format!("endo {} : {} = {}\n", v.name, v.domain, body));
    }
    out
}
