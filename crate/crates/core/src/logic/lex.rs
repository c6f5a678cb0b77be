use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Digit(char),
    LParen,
    RParen,
    Comma,
    Dot,
    Tilde,
    Amp,
    Bar,
    Arrow,
    Caret,
    Eq,
    End,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Digit(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Eq => "`=`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                    s.push(d);
                    bump(&mut chars);
                } else {
                    break;
                }
            }
            out.push(Spanned { tok: Tok::Ident(s), line: l, column: col });
            continue;
        } else if c == '-' {
            bump(&mut chars);
            if chars.peek() != Some(&'>') {
                return Err(Error::Syntax {
                    line: l,
                    column: col,
                    message: "expected `->`".into(),
                });
            }
            Tok::Arrow
        } else {
            match c {
                '0' | '1' => Tok::Digit(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                '~' => Tok::Tilde,
                '&' => Tok::Amp,
                '|' => Tok::Bar,
                '^' => Tok::Caret,
                '=' => Tok::Eq,
                other => {
                    return Err(Error::Syntax {
                        line: l,
                        column: col,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            }
        };
        bump(&mut chars);
        out.push(Spanned { tok, line: l, column: col });
    }
    out.push(Spanned { tok: Tok::End, line, column });
    Ok(out)
}

pub(crate) struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Result<Self> {
        Ok(Cursor { toks: lex(text)?, pos: 0 })
    }

    pub(crate) fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    pub(crate) fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.next();
            true
        } else {
            false
        }
    }

    pub(crate) fn error_here(&self, message: impl Into<String>) -> Error {
        let t = self.peek();
        Error::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> Result<Spanned> {
        if &self.peek().tok == tok {
            Ok(self.next())
        } else {
            Err(self.error_here(format!("expected {}, found {}", tok.describe(), self.peek().tok.describe())))
        }
    }

    pub(crate) fn expect_end(&self) -> Result<()> {
        match &self.peek().tok {
            Tok::End => Ok(()),
            t => Err(self.error_here(format!("unexpected {} after the end", t.describe()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_track_lines() {
        let toks = lex("a &\n  ~b").unwrap();
        let pos: Vec<_> = toks.iter().map(|t| (t.line, t.column)).collect();
        assert_eq!(pos, vec![(1, 1), (1, 3), (2, 3), (2, 4), (2, 5)]);
    }

    #[test]
    fn bad_characters() {
        assert!(matches!(lex("a $ b"), Err(Error::Syntax { line: 1, column: 3, .. })));
        assert!(matches!(lex("a - b"), Err(Error::Syntax { column: 3, .. })));
    }
}
