use super::error::KrError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// Lowercase-initial identifier or keyword.
    Ident(String),
    Var(String),
    /// The anonymous variable `_`.
    Anon,
    Int(i64),
    LParen,
    RParen,
    Comma,
    Dot,
    And,
    Or,
    Eq,
    If,
    Implies,
    Equiv,
    Dollar,
    ColonColon,
    Arrow,
    Query,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Var(s) => format!("`{s}`"),
            Tok::Anon => "`_`".into(),
            Tok::Int(n) => format!("`{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`;`".into(),
            Tok::Eq => "`=`".into(),
            Tok::If => "`<-`".into(),
            Tok::Implies => "`=>`".into(),
            Tok::Equiv => "`<=>`".into(),
            Tok::Dollar => "`$`".into(),
            Tok::ColonColon => "`::`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Query => "`?-`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn rest_starts_with(&self, s: &str) -> bool {
        let mut it = self.chars.clone();
        s.chars().all(|c| it.next() == Some(c))
    }
}

/// Splits theory text into tokens. `%` starts a line comment and
/// `|phantom{...}` layout commands are skipped like whitespace.
pub fn tokenize(src: &str) -> Result<Vec<Spanned>, KrError> {
    let mut cur = Cursor { chars: src.chars().peekable(), line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        while let Some(c) = cur.peek() {
            if c.is_whitespace() {
                cur.bump();
            } else if c == '%' {
                while let Some(c) = cur.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c == '|' && cur.rest_starts_with("|phantom{") {
                let (line, col) = (cur.line, cur.col);
                for _ in 0.."|phantom{".len() {
                    cur.bump();
                }
                let mut depth = 1;
                while depth > 0 {
                    match cur.bump() {
                        Some('{') => depth += 1,
                        Some('}') => depth -= 1,
                        Some(_) => {}
                        None => return Err(KrError::syntax(line, col, "unterminated |phantom{")),
                    }
                }
            } else {
                break;
            }
        }
        let (line, col) = (cur.line, cur.col);
        let Some(c) = cur.bump() else {
            out.push(Spanned { tok: Tok::Eof, line, col });
            return Ok(out);
        };
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '&' => Tok::And,
            ';' => Tok::Or,
            '$' => Tok::Dollar,
            '=' if cur.eat('>') => Tok::Implies,
            '=' => Tok::Eq,
            '<' if cur.eat('-') => Tok::If,
            '<' if cur.rest_starts_with("=>") => {
                cur.bump();
                cur.bump();
                Tok::Equiv
            }
            ':' if cur.eat(':') => Tok::ColonColon,
            '-' if cur.eat('>') => Tok::Arrow,
            '?' if cur.eat('-') => Tok::Query,
            '-' if cur.peek().is_some_and(|d| d.is_ascii_digit()) => {
                let n = read_int(&mut cur, String::from("-"), line, col)?;
                Tok::Int(n)
            }
            d if d.is_ascii_digit() => Tok::Int(read_int(&mut cur, d.to_string(), line, col)?),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = c.to_string();
                while let Some(n) = cur.peek() {
                    if n.is_ascii_alphanumeric() || n == '_' {
                        s.push(n);
                        cur.bump();
                    } else {
                        break;
                    }
                }
                if s == "_" {
                    Tok::Anon
                } else if c == '_' || c.is_ascii_uppercase() {
                    Tok::Var(s)
                } else {
                    Tok::Ident(s)
                }
            }
            other => {
                return Err(KrError::syntax(line, col, format!("unexpected character `{other}`")))
            }
        };
        out.push(Spanned { tok, line, col });
    }
}

fn read_int(cur: &mut Cursor<'_>, mut s: String, line: usize, col: usize) -> Result<i64, KrError> {
    while let Some(d) = cur.peek() {
        if d.is_ascii_digit() {
            s.push(d);
            cur.bump();
        } else {
            break;
        }
    }
    if cur.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
        return Err(KrError::syntax(line, col, "identifier may not start with a digit"));
    }
    s.parse().map_err(|_| KrError::syntax(line, col, format!("integer literal `{s}` out of range")))
}
