use crate::model::NON_TOKEN;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Token {
    /// Identifier or keyword.
    Word(String),
    /// The reserved `Non-` token.
    Non,
    Str(String),
    Int(u32),
    LBrace,
    RBrace,
    Colon,
    Comma,
    Arrow,
    Eof,
}

impl Token {
    pub(crate) fn describe(&self) -> String {
        match self {
            Token::Word(w) => format!("`{w}`"),
            Token::Non => format!("`{NON_TOKEN}`"),
            Token::Str(_) => "string".into(),
            Token::Int(i) => format!("`{i}`"),
            Token::LBrace => "`{`".into(),
            Token::RBrace => "`}`".into(),
            Token::Colon => "`:`".into(),
            Token::Comma => "`,`".into(),
            Token::Arrow => "`->`".into(),
            Token::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Spanned {
    pub token: Token,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LexError {
    pub pos: Pos,
    pub message: String,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    rest: &'a str,
    pos: Pos,
}

impl<'a> Cursor<'a> {
    fn new(input: &'a str) -> Self {
        Cursor {
            chars: input.chars().peekable(),
            rest: input,
            pos: Pos { line: 1, col: 1 },
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        self.rest.starts_with(s)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        self.rest = &self.rest[c.len_utf8()..];
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }
}

pub(crate) fn tokenize(input: &str) -> Result<Vec<Spanned>, LexError> {
    let mut cur = Cursor::new(input);
    let mut out = Vec::new();
    loop {
        while let Some(c) = cur.peek() {
            if c.is_whitespace() {
                cur.bump();
            } else if c == '#' {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
            } else {
                break;
            }
        }

        let pos = cur.pos;
        let Some(c) = cur.peek() else {
            out.push(Spanned { token: Token::Eof, pos });
            return Ok(out);
        };

        let token = match c {
            '{' => {
                cur.bump();
                Token::LBrace
            }
            '}' => {
                cur.bump();
                Token::RBrace
            }
            ':' => {
                cur.bump();
                Token::Colon
            }
            ',' => {
                cur.bump();
                Token::Comma
            }
            '-' if cur.starts_with("->") => {
                cur.bump();
                cur.bump();
                Token::Arrow
            }
            '"' => {
                cur.bump();
                let mut text = String::new();
                loop {
                    match cur.bump() {
                        None => {
                            return Err(LexError {
                                pos,
                                message: "unterminated string".into(),
                            })
                        }
                        Some('"') => break,
                        Some('\\') => {
                            let at = cur.pos;
                            match cur.bump() {
                                Some(e @ ('"' | '\\')) => text.push(e),
                                _ => {
                                    return Err(LexError {
                                        pos: at,
                                        message: "unknown escape; only \\\" and \\\\ are allowed".into(),
                                    })
                                }
                            }
                        }
                        Some(other) => text.push(other),
                    }
                }
                Token::Str(text)
            }
            c if c.is_ascii_digit() => {
                let mut digits = String::new();
                while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                    digits.push(cur.bump().unwrap());
                }
                let value = digits.parse().map_err(|_| LexError {
                    pos,
                    message: format!("number {digits} is too large"),
                })?;
                Token::Int(value)
            }
            c if c.is_ascii_alphabetic() => {
                let mut word = String::new();
                while let Some(c) = cur.peek() {
                    let continues = c.is_ascii_alphanumeric() || c == '_' || (c == '-' && !cur.starts_with("->"));
                    if !continues {
                        break;
                    }
                    word.push(c);
                    cur.bump();
                }
                if word == NON_TOKEN {
                    Token::Non
                } else {
                    Token::Word(word)
                }
            }
            other => {
                return Err(LexError {
                    pos,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        out.push(Spanned { token, pos });
    }
}
