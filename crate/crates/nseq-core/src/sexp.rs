//! S-expression reader with source positions.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Atom(..) => None,
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(s, _) => write!(f, "{s}"),
            Sexp::List(items, _) => {
                write!(f, "(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{it}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
#[error("{pos}: {msg}")]
pub struct SexpError {
    pub pos: Pos,
    pub msg: String,
}

struct Reader<'a> {
    src: &'a [u8],
    i: usize,
    line: usize,
    col: usize,
}

impl<'a> Reader<'a> {
    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.i).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.i += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.bump();
                }
                b';' => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn read(&mut self) -> Result<Sexp, SexpError> {
        self.skip_trivia();
        let pos = self.pos();
        match self.peek() {
            None => Err(SexpError { pos, msg: "unexpected end of input".into() }),
            Some(b'(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        Some(b')') => {
                            self.bump();
                            return Ok(Sexp::List(items, pos));
                        }
                        None => {
                            return Err(SexpError { pos, msg: "unclosed '('".into() });
                        }
                        _ => items.push(self.read()?),
                    }
                }
            }
            Some(b')') => Err(SexpError { pos, msg: "unexpected ')'".into() }),
            Some(b'|') => {
                self.bump();
                let mut s = String::from("|");
                loop {
                    match self.bump() {
                        Some(b'|') => {
                            s.push('|');
                            return Ok(Sexp::Atom(s, pos));
                        }
                        Some(c) => s.push(c as char),
                        None => {
                            return Err(SexpError { pos, msg: "unclosed '|'".into() });
                        }
                    }
                }
            }
            Some(b'"') => {
                self.bump();
                let mut s = String::from("\"");
                loop {
                    match self.bump() {
                        Some(b'"') => {
                            if self.peek() == Some(b'"') {
                                self.bump();
                                s.push_str("\"\"");
                            } else {
                                s.push('"');
                                return Ok(Sexp::Atom(s, pos));
                            }
                        }
                        Some(c) => s.push(c as char),
                        None => {
                            return Err(SexpError { pos, msg: "unclosed string".into() });
                        }
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if matches!(c, b' ' | b'\t' | b'\r' | b'\n' | b'(' | b')' | b';') {
                        break;
                    }
                    s.push(c as char);
                    self.bump();
                }
                Ok(Sexp::Atom(s, pos))
            }
        }
    }
}

/// Read every top-level S-expression in `input`.
pub fn parse_sexps(input: &str) -> Result<Vec<Sexp>, SexpError> {
    let mut r = Reader { src: input.as_bytes(), i: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        r.skip_trivia();
        if r.peek().is_none() {
            return Ok(out);
        }
        out.push(r.read()?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists() {
        let s = parse_sexps("(assert (= x 1)) ; trailing\n(check-sat)").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].list().unwrap()[0].atom(), Some("assert"));
        assert_eq!(s[1].list().unwrap()[0].atom(), Some("check-sat"));
    }

    #[test]
    fn positions_track_lines() {
        let s = parse_sexps("(a)\n  (b)").unwrap();
        assert_eq!(s[1].pos(), Pos { line: 2, col: 3 });
    }

    #[test]
    fn unclosed_paren_is_an_error() {
        let e = parse_sexps("(assert (= x").unwrap_err();
        assert!(e.msg.contains("unclosed"));
    }

    #[test]
    fn quoted_symbols_keep_delimiters() {
        let s = parse_sexps("|a b|").unwrap();
        assert_eq!(s[0].atom(), Some("|a b|"));
    }
}
