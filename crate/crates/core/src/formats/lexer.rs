//! Character cursor with line/column tracking and the shared symbol syntax.

use super::FormatError;
use crate::model::{make_atom, make_blank, GraphSymbol, Vocabulary};

#[derive(Debug, Clone)]
pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Self::at(src, 1, 1)
    }

    /// Cursor over a fragment that starts at the given position of a larger text.
    pub fn at(src: &'a str, line: usize, column: usize) -> Self {
        Self {
            src,
            pos: 0,
            line,
            column,
        }
    }

    pub fn position(&self) -> (usize, usize) {
        (self.line, self.column)
    }

    pub fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    /// Skips whitespace and `#` comments.
    pub fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c == '#' {
                while !matches!(self.peek(), None | Some('\n')) {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub fn error(&self, message: impl Into<String>) -> FormatError {
        FormatError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_str(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            for _ in s.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), FormatError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`, found {}", self.describe())))
        }
    }

    pub fn describe(&self) -> String {
        match self.peek() {
            None => "end of input".to_string(),
            Some(c) => format!("`{c}`"),
        }
    }

    pub fn ident(&mut self) -> Result<&'a str, FormatError> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return Err(self.error(format!("expected identifier, found {}", self.describe()))),
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
        }
        Ok(&self.src[start..self.pos])
    }

    pub fn number(&mut self) -> Result<usize, FormatError> {
        let (line, column) = self.position();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        let text = &self.src[start..self.pos];
        if text.is_empty() {
            return Err(self.error(format!("expected number, found {}", self.describe())));
        }
        text.parse().map_err(|_| FormatError::Syntax {
            line,
            column,
            message: format!("number `{text}` out of range"),
        })
    }

    /// Index sequence: `<>`, a digit string (one index per digit), or
    /// `{i,j,...}`.
    pub fn index_seq(&mut self) -> Result<Vec<usize>, FormatError> {
        if self.eat_str("<>") {
            return Ok(Vec::new());
        }
        if self.eat('{') {
            let mut out = Vec::new();
            if self.eat('}') {
                return Ok(out);
            }
            loop {
                out.push(self.number()?);
                if self.eat('}') {
                    return Ok(out);
                }
                self.expect(',')?;
            }
        }
        let mut out = Vec::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            self.bump();
            out.push(c as usize - '0' as usize);
        }
        if out.is_empty() {
            return Err(self.error(format!(
                "expected index sequence (`<>`, digits or `{{...}}`), found {}",
                self.describe()
            )));
        }
        Ok(out)
    }

    /// `label^F_R` or `<>^n_R`, validated against the vocabulary.
    pub fn symbol(&mut self, vocab: &Vocabulary) -> Result<GraphSymbol, FormatError> {
        let (line, column) = self.position();
        let semantic = |e: crate::model::ModelError| FormatError::Semantic {
            line,
            column,
            message: e.to_string(),
        };
        if self.eat_str("<>") {
            self.expect('^')?;
            let n = if self.eat_str("<>") { 0 } else { self.number()? };
            self.expect('_')?;
            let rear = self.index_seq()?;
            return make_blank(n, &rear).map(Into::into).map_err(semantic);
        }
        let label = self.ident()?;
        self.expect('^')?;
        let front = self.index_seq()?;
        self.expect('_')?;
        let rear = self.index_seq()?;
        make_atom(label, &front, &rear, vocab).map(Into::into).map_err(semantic)
    }

    /// `name(rank)` declarations separated by commas, optionally prefixed by `*`.
    pub fn decl_list(&mut self) -> Result<Vec<Decl<'a>>, FormatError> {
        let mut out = Vec::new();
        loop {
            self.skip_inline_ws();
            let (line, column) = self.position();
            let marked = self.eat('*');
            self.skip_inline_ws();
            let name = self.ident()?;
            self.skip_inline_ws();
            self.expect('(')?;
            self.skip_inline_ws();
            let rank = self.number()?;
            self.skip_inline_ws();
            self.expect(')')?;
            out.push(Decl {
                name,
                rank,
                marked,
                line,
                column,
            });
            self.skip_inline_ws();
            if !self.eat(',') {
                return Ok(out);
            }
        }
    }

    pub fn skip_inline_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c == ' ' || c == '\t' || c == '\r') {
            self.bump();
        }
    }

    /// Rejects anything but trailing blanks or a comment on the current line.
    pub fn expect_line_end(&mut self) -> Result<(), FormatError> {
        self.skip_inline_ws();
        match self.peek() {
            None | Some('\n') | Some('#') => Ok(()),
            _ => Err(self.error(format!("unexpected {}", self.describe()))),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Decl<'a> {
    pub name: &'a str,
    pub rank: usize,
    pub marked: bool,
    pub line: usize,
    pub column: usize,
}

/// Parses a single symbol written in the shared syntax.
pub fn parse_symbol(text: &str, vocab: &Vocabulary) -> Result<GraphSymbol, FormatError> {
    let mut c = Cursor::new(text.trim());
    let s = c.symbol(vocab)?;
    if !c.at_end() {
        return Err(c.error(format!("trailing input {}", c.describe())));
    }
    Ok(s)
}
