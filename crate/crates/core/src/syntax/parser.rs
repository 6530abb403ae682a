use super::lexer::{lex_line, Tok, Token};
use super::{
    is_sort_keyword, AbsFlavor, Dialect, ParseError, RawContent, RawLine, SourceLoc, SurfaceExpr, WILDCARD,
};

/// Parses a whole book. Blank lines and lines starting with `#` are skipped.
pub fn parse_book(text: &str, dialect: Dialect) -> Result<Vec<RawLine>, ParseError> {
    let mut lines = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        lines.push(parse_line(line, i + 1, dialect)?);
    }
    Ok(lines)
}

/// Parses one book line; `lineno` is used for locations.
pub fn parse_line(text: &str, lineno: usize, dialect: Dialect) -> Result<RawLine, ParseError> {
    let toks = lex_line(text, lineno)?;
    let mut p = Parser::new(&toks, lineno, dialect);
    let loc = SourceLoc { line: lineno, col: toks.first().map_or(1, |t| t.col) };
    let indicator = match p.peek() {
        Some(Tok::Star) => None,
        Some(Tok::Epsilon) => {
            p.bump();
            None
        }
        Some(Tok::Ident(_)) => Some(p.ident("indicator")?),
        _ => return Err(p.error("expected an indicator or `*`")),
    };
    p.expect(&Tok::Star)?;
    let identifier = p.ident("identifier")?;
    if is_sort_keyword(&identifier) || identifier == "PN" {
        return Err(p.error_before(format!("`{identifier}` is reserved and cannot be an identifier")));
    }
    p.expect(&Tok::Assign)?;
    let content_loc = p.loc();
    let content = match p.peek() {
        Some(Tok::Dash) => {
            p.bump();
            RawContent::Dash
        }
        Some(Tok::Ident(s)) if s == "PN" && matches!(p.peek_at(1), Some(Tok::Colon | Tok::Semi)) => {
            p.bump();
            RawContent::Primitive
        }
        _ => RawContent::Expr(p.expr()?),
    };
    match p.peek() {
        Some(Tok::Colon | Tok::Semi) => p.bump(),
        _ => return Err(p.error("expected `;` or `:` before the category")),
    }
    let category_loc = p.loc();
    let category = p.expr()?;
    p.finish()?;
    Ok(RawLine { indicator, identifier, content, category, loc, content_loc, category_loc })
}

/// Parses a standalone expression.
pub fn parse_expr(text: &str, dialect: Dialect) -> Result<SurfaceExpr, ParseError> {
    let toks = lex_line(text, 1)?;
    let mut p = Parser::new(&toks, 1, dialect);
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

pub(crate) struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    line: usize,
    dialect: Dialect,
}

impl<'t> Parser<'t> {
    pub(crate) fn new(toks: &'t [Token], line: usize, dialect: Dialect) -> Parser<'t> {
        Parser { toks, pos: 0, line, dialect }
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.peek_at(0)
    }

    pub(crate) fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    pub(crate) fn bump(&mut self) {
        self.pos += 1;
    }

    pub(crate) fn loc(&self) -> SourceLoc {
        let col = match self.toks.get(self.pos) {
            Some(t) => t.col,
            None => self.toks.last().map_or(1, |t| t.end),
        };
        SourceLoc { line: self.line, col }
    }

    pub(crate) fn error(&self, msg: impl Into<String>) -> ParseError {
        let found = match self.peek() {
            Some(t) => format!(", found {}", t.describe()),
            None => ", found end of line".to_string(),
        };
        let loc = self.loc();
        ParseError::new(loc.line, loc.col, format!("{}{}", msg.into(), found))
    }

    fn error_before(&self, msg: String) -> ParseError {
        let col = self.toks.get(self.pos.saturating_sub(1)).map_or(1, |t| t.col);
        ParseError::new(self.line, col, msg)
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> Result<(), ParseError> {
        if self.peek() == Some(tok) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {}", tok.describe())))
        }
    }

    pub(crate) fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    pub(crate) fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            Err(self.error("unexpected trailing input"))
        } else {
            Ok(())
        }
    }

    pub(crate) fn expr(&mut self) -> Result<SurfaceExpr, ParseError> {
        match self.dialect {
            Dialect::Original => self.original_expr(),
            Dialect::Modern => self.modern_expr(),
        }
    }

    /// `ident` or `ident(args)`; sort keywords are recognised here.
    fn name_or_inst(&mut self) -> Result<SurfaceExpr, ParseError> {
        let name_end = self.toks[self.pos].end;
        let name = self.ident("identifier")?;
        let adjacent_paren = matches!(self.toks.get(self.pos), Some(t) if t.tok == Tok::LParen && t.col == name_end);
        let opens = match self.dialect {
            Dialect::Original => self.peek() == Some(&Tok::LParen),
            Dialect::Modern => adjacent_paren,
        };
        if !opens {
            return Ok(if is_sort_keyword(&name) { SurfaceExpr::Sort(name) } else { SurfaceExpr::Ident(name) });
        }
        if is_sort_keyword(&name) {
            return Err(self.error(format!("sort `{name}` takes no parameters")));
        }
        self.bump();
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::RParen) {
            self.bump();
            return Ok(SurfaceExpr::Inst { name, args });
        }
        loop {
            args.push(self.expr()?);
            match self.peek() {
                Some(Tok::Comma) => self.bump(),
                Some(Tok::RParen) => {
                    self.bump();
                    break;
                }
                _ => return Err(self.error("expected `,` or `)` in parameter list")),
            }
        }
        Ok(SurfaceExpr::Inst { name, args })
    }

    fn original_expr(&mut self) -> Result<SurfaceExpr, ParseError> {
        match self.peek() {
            Some(Tok::LBrack) => {
                self.bump();
                let var = self.ident("abstraction variable")?;
                match self.peek() {
                    Some(Tok::Comma | Tok::Colon) => self.bump(),
                    _ => return Err(self.error("expected `,` after the abstraction variable")),
                }
                let ann = self.original_expr()?;
                self.expect(&Tok::RBrack)?;
                let body = self.original_expr()?;
                Ok(SurfaceExpr::Abs {
                    var,
                    ann: Box::new(ann),
                    body: Box::new(body),
                    flavor: AbsFlavor::Ambiguous,
                })
            }
            Some(Tok::LAngle) => {
                self.bump();
                let arg = self.original_expr()?;
                self.expect(&Tok::RAngle)?;
                let fun = self.original_expr()?;
                Ok(SurfaceExpr::RevApp { arg: Box::new(arg), fun: Box::new(fun) })
            }
            Some(Tok::LParen) => {
                self.bump();
                let e = self.original_expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(_)) => self.name_or_inst(),
            _ => Err(self.error("expected an expression")),
        }
    }

    fn modern_expr(&mut self) -> Result<SurfaceExpr, ParseError> {
        let flavor = match self.peek() {
            Some(Tok::Lambda) => Some(AbsFlavor::Lambda),
            Some(Tok::Pi) => Some(AbsFlavor::Pi),
            _ => None,
        };
        if let Some(flavor) = flavor {
            self.bump();
            let var = self.ident("binder variable")?;
            self.expect(&Tok::Colon)?;
            let ann = self.modern_expr()?;
            self.expect(&Tok::Dot)?;
            let body = self.modern_expr()?;
            return Ok(SurfaceExpr::Abs { var, ann: Box::new(ann), body: Box::new(body), flavor });
        }
        let lhs = self.modern_app()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let rhs = self.modern_expr()?;
            return Ok(SurfaceExpr::Abs {
                var: WILDCARD.to_string(),
                ann: Box::new(lhs),
                body: Box::new(rhs),
                flavor: AbsFlavor::Pi,
            });
        }
        Ok(lhs)
    }

    fn modern_app(&mut self) -> Result<SurfaceExpr, ParseError> {
        let mut e = self.modern_atom()?;
        while matches!(self.peek(), Some(Tok::Ident(_) | Tok::LParen | Tok::Star)) {
            let arg = self.modern_atom()?;
            e = SurfaceExpr::App { fun: Box::new(e), arg: Box::new(arg) };
        }
        Ok(e)
    }

    fn modern_atom(&mut self) -> Result<SurfaceExpr, ParseError> {
        match self.peek() {
            Some(Tok::Star) => {
                self.bump();
                Ok(SurfaceExpr::Sort("*".into()))
            }
            Some(Tok::LParen) => {
                self.bump();
                let e = self.modern_expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(_)) => self.name_or_inst(),
            _ => Err(self.error("expected an expression")),
        }
    }
}
