use thiserror::Error;

use crate::lattice::Label;
use crate::pos::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Let,
    In,
    Fn,
    If,
    Then,
    Else,
    Try,
    Catch,
    True,
    False,
    Label,
    Unlabel,
    LabelOf,
    ToLabeled,
    GetLabel,
    GetClearance,
    LowerClearance,
    NewRef,
    ReadRef,
    WriteRef,
    Throw,
    Secret,
}

impl Keyword {
    pub const ALL: [Keyword; 22] = [
        Keyword::Let,
        Keyword::In,
        Keyword::Fn,
        Keyword::If,
        Keyword::Then,
        Keyword::Else,
        Keyword::Try,
        Keyword::Catch,
        Keyword::True,
        Keyword::False,
        Keyword::Label,
        Keyword::Unlabel,
        Keyword::LabelOf,
        Keyword::ToLabeled,
        Keyword::GetLabel,
        Keyword::GetClearance,
        Keyword::LowerClearance,
        Keyword::NewRef,
        Keyword::ReadRef,
        Keyword::WriteRef,
        Keyword::Throw,
        Keyword::Secret,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Let => "let",
            Keyword::In => "in",
            Keyword::Fn => "fn",
            Keyword::If => "if",
            Keyword::Then => "then",
            Keyword::Else => "else",
            Keyword::Try => "try",
            Keyword::Catch => "catch",
            Keyword::True => "true",
            Keyword::False => "false",
            Keyword::Label => "label",
            Keyword::Unlabel => "unlabel",
            Keyword::LabelOf => "labelOf",
            Keyword::ToLabeled => "toLabeled",
            Keyword::GetLabel => "getLabel",
            Keyword::GetClearance => "getClearance",
            Keyword::LowerClearance => "lowerClearance",
            Keyword::NewRef => "newRef",
            Keyword::ReadRef => "readRef",
            Keyword::WriteRef => "writeRef",
            Keyword::Throw => "throw",
            Keyword::Secret => "secret",
        }
    }

    fn from_word(word: &str) -> Option<Keyword> {
        Keyword::ALL.into_iter().find(|k| k.as_str() == word)
    }
}

/// Whether `word` can be used as a variable or secret name.
pub fn is_reserved(word: &str) -> bool {
    Keyword::from_word(word).is_some() || word == "L" || word == "H"
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Punct {
    LParen,
    RParen,
    LBrace,
    RBrace,
    Eq,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    EqEq,
    Lt,
    AndAnd,
    OrOr,
    Semi,
}

impl Punct {
    pub fn as_str(self) -> &'static str {
        match self {
            Punct::LParen => "(",
            Punct::RParen => ")",
            Punct::LBrace => "{",
            Punct::RBrace => "}",
            Punct::Eq => "=",
            Punct::Arrow => "=>",
            Punct::Plus => "+",
            Punct::Minus => "-",
            Punct::Star => "*",
            Punct::Slash => "/",
            Punct::EqEq => "==",
            Punct::Lt => "<",
            Punct::AndAnd => "&&",
            Punct::OrOr => "||",
            Punct::Semi => ";",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(i64),
    Str(String),
    Keyword(Keyword),
    Punct(Punct),
    Label(Label),
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Int(n) => format!("integer {n}"),
            TokenKind::Str(_) => "string literal".to_string(),
            TokenKind::Keyword(k) => format!("`{}`", k.as_str()),
            TokenKind::Punct(p) => format!("`{}`", p.as_str()),
            TokenKind::Label(l) => format!("label {l}"),
            TokenKind::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Exact source text of the token.
    pub lexeme: String,
    pub pos: Pos,
    /// Byte offset of the first character.
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {message}")]
pub struct LexError {
    pub pos: Pos,
    pub message: String,
}

struct Lexer<'a> {
    src: &'a str,
    offset: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.offset..].chars().next()
    }

    fn peek_nth(&self, n: usize) -> Option<char> {
        self.src[self.offset..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }

    fn error(&self, pos: Pos, message: impl Into<String>) -> LexError {
        LexError { pos, message: message.into() }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    /// `<` opens a label literal when the next non-blank character is `{` or
    /// `*`; neither can follow `<` in an infix comparison.
    fn at_label_literal(&self) -> bool {
        self.src[self.offset + 1..]
            .chars()
            .find(|c| !c.is_whitespace())
            .is_some_and(|c| c == '{' || c == '*')
    }

    fn next_token(&mut self) -> Result<Token, LexError> {
        self.skip_trivia();
        let start = self.offset;
        let pos = self.pos();
        let Some(c) = self.peek() else {
            return Ok(Token { kind: TokenKind::Eof, lexeme: String::new(), pos, offset: start });
        };
        let kind = if c.is_ascii_digit() {
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
            }
            let text = &self.src[start..self.offset];
            let n = text.parse().map_err(|_| self.error(pos, format!("integer literal {text} out of range")))?;
            TokenKind::Int(n)
        } else if c.is_alphabetic() || c == '_' {
            while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                self.bump();
            }
            let word = &self.src[start..self.offset];
            match word {
                "L" => TokenKind::Label(Label::LOW),
                "H" => TokenKind::Label(Label::HIGH),
                _ => match Keyword::from_word(word) {
                    Some(k) => TokenKind::Keyword(k),
                    None => TokenKind::Ident(word.to_string()),
                },
            }
        } else if c == '"' {
            self.bump();
            let mut s = String::new();
            loop {
                match self.bump() {
                    None => return Err(self.error(pos, "unterminated string literal")),
                    Some('"') => break,
                    Some('\\') => {
                        let esc_pos = self.pos();
                        match self.bump() {
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            Some('\\') => s.push('\\'),
                            Some('"') => s.push('"'),
                            Some(other) => {
                                return Err(self.error(esc_pos, format!("unknown escape `\\{other}`")))
                            }
                            None => return Err(self.error(pos, "unterminated string literal")),
                        }
                    }
                    Some(c) => s.push(c),
                }
            }
            TokenKind::Str(s)
        } else if c == '<' && self.at_label_literal() {
            loop {
                match self.bump() {
                    None => return Err(self.error(pos, "unterminated label literal")),
                    Some('>') => break,
                    Some(_) => {}
                }
            }
            let text = &self.src[start..self.offset];
            let label = text.parse::<Label>().map_err(|e| self.error(pos, e.to_string()))?;
            TokenKind::Label(label)
        } else {
            let two = (c, self.peek_nth(1));
            let (p, len) = match two {
                ('=', Some('>')) => (Punct::Arrow, 2),
                ('=', Some('=')) => (Punct::EqEq, 2),
                ('&', Some('&')) => (Punct::AndAnd, 2),
                ('|', Some('|')) => (Punct::OrOr, 2),
                ('(', _) => (Punct::LParen, 1),
                (')', _) => (Punct::RParen, 1),
                ('{', _) => (Punct::LBrace, 1),
                ('}', _) => (Punct::RBrace, 1),
                ('=', _) => (Punct::Eq, 1),
                ('+', _) => (Punct::Plus, 1),
                ('-', _) => (Punct::Minus, 1),
                ('*', _) => (Punct::Star, 1),
                ('/', _) => (Punct::Slash, 1),
                ('<', _) => (Punct::Lt, 1),
                (';', _) => (Punct::Semi, 1),
                _ => return Err(self.error(pos, format!("unexpected character `{c}`"))),
            };
            for _ in 0..len {
                self.bump();
            }
            TokenKind::Punct(p)
        };
        Ok(Token { kind, lexeme: self.src[start..self.offset].to_string(), pos, offset: start })
    }
}

/// Splits `.lio` source into tokens, ending with an `Eof` token. Whitespace
/// and `#` line comments are skipped.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut lexer = Lexer { src: source, offset: 0, line: 1, col: 1 };
    let mut tokens = Vec::new();
    loop {
        let tok = lexer.next_token()?;
        let done = tok.kind == TokenKind::Eof;
        tokens.push(tok);
        if done {
            return Ok(tokens);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn let_binding() {
        use TokenKind::*;
        assert_eq!(
            kinds("let x = 1 in x"),
            vec![
                Keyword(super::Keyword::Let),
                Ident("x".into()),
                Punct(super::Punct::Eq),
                Int(1),
                Keyword(super::Keyword::In),
                Ident("x".into()),
                Eof
            ]
        );
    }

    #[test]
    fn unlabel_call() {
        use TokenKind::*;
        assert_eq!(
            kinds("unlabel(h)"),
            vec![
                Keyword(super::Keyword::Unlabel),
                Punct(super::Punct::LParen),
                Ident("h".into()),
                Punct(super::Punct::RParen),
                Eof
            ]
        );
    }

    #[test]
    fn label_literals() {
        let toks = kinds("<{A}|{}>");
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[0], TokenKind::Label("<{A}|{}>".parse().unwrap()));
        assert_eq!(kinds("< { A , B } | { } >")[0], TokenKind::Label("<{A,B}|{}>".parse().unwrap()));
        assert_eq!(kinds("<*|{}>")[0], TokenKind::Label("<*|{}>".parse().unwrap()));
        assert_eq!(kinds("H")[0], TokenKind::Label(Label::HIGH));
        // comparison is still a comparison
        assert_eq!(kinds("a < b")[1], TokenKind::Punct(Punct::Lt));
    }

    #[test]
    fn punctuation_and_strings() {
        let toks = kinds(r#"fn x => x == "a\"b" && y || z; 1 / 2 - 3 * 4"#);
        assert!(toks.contains(&TokenKind::Punct(Punct::Arrow)));
        assert!(toks.contains(&TokenKind::Str("a\"b".into())));
        assert!(toks.contains(&TokenKind::Punct(Punct::OrOr)));
    }

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("let x =\n  unlabel(s)").unwrap();
        assert_eq!(toks[0].pos, Pos::new(1, 1));
        assert_eq!(toks[3].pos, Pos::new(2, 3));
        assert_eq!(toks.last().unwrap().pos, Pos::new(2, 13));
    }

    #[test]
    fn lexemes_and_trivia_reproduce_input() {
        let src = "let x = <{A}|{B}> # note\n in  \"s\\n\" +\t42";
        let toks = tokenize(src).unwrap();
        let mut rebuilt = String::new();
        for t in &toks {
            rebuilt.push_str(&src[rebuilt.len()..t.offset]);
            rebuilt.push_str(&t.lexeme);
        }
        assert_eq!(rebuilt, src);
    }

    #[test]
    fn errors() {
        let e = tokenize("1 + \"abc").unwrap_err();
        assert_eq!(e.pos, Pos::new(1, 5));
        assert!(e.message.contains("unterminated string"));
        assert!(tokenize("<{A}|{}").unwrap_err().message.contains("unterminated label"));
        assert!(tokenize("x @ y").unwrap_err().message.contains('@'));
        assert!(tokenize("99999999999999999999").is_err());
        assert!(tokenize("<{A}|{B>").is_err());
    }
}
