//! FunC tokenizer.
//!
//! FunC identifiers are unusually permissive: any run of characters that are
//! not whitespace or one of `; , ( ) [ ] { } " .` forms a single word, so
//! `slice_empty?`, `op::withdraw` and even `a+b` are identifiers. Operators
//! must therefore be separated by whitespace, exactly as in the reference
//! compiler. `~` and `.` directly followed by an identifier start a method
//! call and are emitted as separate tokens.

use std::fmt;

use super::span::{SourceFile, Span};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Int,
    Cell,
    Slice,
    Builder,
    Cont,
    Tuple,
    Var,
    Global,
    Const,
    If,
    IfNot,
    Else,
    ElseIf,
    ElseIfNot,
    While,
    Repeat,
    Do,
    Until,
    Return,
    Impure,
    Inline,
    InlineRef,
    MethodId,
    Forall,
    Asm,
    Try,
    Catch,
}

impl Keyword {
    fn from_word(word: &str) -> Option<Keyword> {
        use Keyword::*;
        Some(match word {
            "int" => Int,
            "cell" => Cell,
            "slice" => Slice,
            "builder" => Builder,
            "cont" => Cont,
            "tuple" => Tuple,
            "var" => Var,
            "global" => Global,
            "const" => Const,
            "if" => If,
            "ifnot" => IfNot,
            "else" => Else,
            "elseif" => ElseIf,
            "elseifnot" => ElseIfNot,
            "while" => While,
            "repeat" => Repeat,
            "do" => Do,
            "until" => Until,
            "return" => Return,
            "impure" => Impure,
            "inline" => Inline,
            "inline_ref" => InlineRef,
            "method_id" => MethodId,
            "forall" => Forall,
            "asm" => Asm,
            "try" => Try,
            "catch" => Catch,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        use Keyword::*;
        match self {
            Int => "int",
            Cell => "cell",
            Slice => "slice",
            Builder => "builder",
            Cont => "cont",
            Tuple => "tuple",
            Var => "var",
            Global => "global",
            Const => "const",
            If => "if",
            IfNot => "ifnot",
            Else => "else",
            ElseIf => "elseif",
            ElseIfNot => "elseifnot",
            While => "while",
            Repeat => "repeat",
            Do => "do",
            Until => "until",
            Return => "return",
            Impure => "impure",
            Inline => "inline",
            InlineRef => "inline_ref",
            MethodId => "method_id",
            Forall => "forall",
            Asm => "asm",
            Try => "try",
            Catch => "catch",
        }
    }

    /// Keywords that start a type in declaration position.
    pub fn is_type(self) -> bool {
        use Keyword::*;
        matches!(self, Int | Cell | Slice | Builder | Cont | Tuple | Var)
    }
}

/// Operators. Each one is a whole whitespace-delimited word in the source.
pub const OPERATORS: &[&str] = &[
    "=", "+=", "-=", "*=", "/=", "~/=", "^/=", "%=", "~%=", "^%=", "<<=", ">>=", "~>>=", "^>>=", "&=", "|=",
    "^=", "==", "!=", "<", ">", "<=", ">=", "<=>", "+", "-", "*", "/", "%", "/%", "~/", "^/", "~%", "^%",
    "<<", ">>", "~>>", "^>>", "&", "|", "^", "?", ":", "!", "->", "~",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    /// Integer literal, kept as written (`42`, `-1`, `0xFFFFFFFF`).
    Int(String),
    /// String literal with its optional one-letter suffix (`"transfer"c`).
    Str { value: String, suffix: Option<char> },
    Keyword(Keyword),
    Op(&'static str),
    Include,
    Pragma,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Semi,
    Comma,
    Dot,
    Tilde,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "ident:{s}"),
            TokenKind::Int(s) => write!(f, "int:{s}"),
            TokenKind::Str { value, suffix } => match suffix {
                Some(c) => write!(f, "str:\"{value}\"{c}"),
                None => write!(f, "str:\"{value}\""),
            },
            TokenKind::Keyword(k) => write!(f, "kw:{}", k.as_str()),
            TokenKind::Op(o) => write!(f, "'{o}'"),
            TokenKind::Include => write!(f, "#include"),
            TokenKind::Pragma => write!(f, "#pragma"),
            TokenKind::LParen => write!(f, "'('"),
            TokenKind::RParen => write!(f, "')'"),
            TokenKind::LBracket => write!(f, "'['"),
            TokenKind::RBracket => write!(f, "']'"),
            TokenKind::LBrace => write!(f, "'{{'"),
            TokenKind::RBrace => write!(f, "'}}'"),
            TokenKind::Semi => write!(f, "';'"),
            TokenKind::Comma => write!(f, "','"),
            TokenKind::Dot => write!(f, "'.'"),
            TokenKind::Tilde => write!(f, "'~'"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LexError {
    #[error("illegal character {ch:?}")]
    IllegalChar { ch: char, span: Span },
    #[error("unterminated string literal")]
    UnterminatedString { span: Span },
    #[error("unterminated block comment")]
    UnterminatedComment { span: Span },
}

impl LexError {
    pub fn span(&self) -> Span {
        match self {
            LexError::IllegalChar { span, .. }
            | LexError::UnterminatedString { span }
            | LexError::UnterminatedComment { span } => *span,
        }
    }
}

fn is_special(c: char) -> bool {
    matches!(c, ';' | ',' | '(' | ')' | '[' | ']' | '{' | '}' | '"' | '.')
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_illegal(c: char) -> bool {
    c.is_control() && !matches!(c, '\n' | '\r' | '\t')
}

fn is_int_literal(word: &str) -> bool {
    let digits = word.strip_prefix('-').unwrap_or(word);
    if let Some(hex) = digits.strip_prefix("0x") {
        !hex.is_empty() && hex.chars().all(|c| c.is_ascii_hexdigit())
    } else if let Some(bin) = digits.strip_prefix("0b") {
        !bin.is_empty() && bin.chars().all(|c| c == '0' || c == '1')
    } else {
        !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())
    }
}

/// Parse an integer literal as produced by the lexer. Values that do not fit
/// in `i128` yield `None`.
pub fn parse_int_literal(text: &str) -> Option<i128> {
    let (neg, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let value = if let Some(hex) = digits.strip_prefix("0x") {
        i128::from_str_radix(hex, 16).ok()?
    } else if let Some(bin) = digits.strip_prefix("0b") {
        i128::from_str_radix(bin, 2).ok()?
    } else {
        digits.parse::<i128>().ok()?
    };
    Some(if neg { -value } else { value })
}

struct Lexer<'a> {
    file: &'a SourceFile,
    src: &'a str,
    pos: usize,
    tokens: Vec<Token>,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn push(&mut self, kind: TokenKind, lo: usize) {
        let span = self.file.span(lo, self.pos);
        self.tokens.push(Token { kind, span });
    }

    fn run(mut self) -> Result<Vec<Token>, LexError> {
        while let Some(c) = self.peek() {
            let lo = self.pos;
            match c {
                c if c.is_whitespace() => {
                    self.bump();
                }
                ';' if self.peek_at(1) == Some(';') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                '{' if self.peek_at(1) == Some('-') => self.block_comment()?,
                ';' | ',' | '(' | ')' | '[' | ']' | '{' | '}' => {
                    self.bump();
                    let kind = match c {
                        ';' => TokenKind::Semi,
                        ',' => TokenKind::Comma,
                        '(' => TokenKind::LParen,
                        ')' => TokenKind::RParen,
                        '[' => TokenKind::LBracket,
                        ']' => TokenKind::RBracket,
                        '{' => TokenKind::LBrace,
                        _ => TokenKind::RBrace,
                    };
                    self.push(kind, lo);
                }
                '"' => self.string()?,
                '.' => {
                    self.bump();
                    self.push(TokenKind::Dot, lo);
                }
                '~' if self.peek_at(1).is_some_and(is_ident_start) => {
                    self.bump();
                    self.push(TokenKind::Tilde, lo);
                }
                c if is_illegal(c) => {
                    self.bump();
                    return Err(LexError::IllegalChar { ch: c, span: self.file.span(lo, self.pos) });
                }
                _ => self.word()?,
            }
        }
        Ok(self.tokens)
    }

    fn block_comment(&mut self) -> Result<(), LexError> {
        let lo = self.pos;
        self.pos += 2;
        let mut depth = 1usize;
        while depth > 0 {
            match self.peek() {
                None => {
                    return Err(LexError::UnterminatedComment { span: self.file.span(lo, self.pos) });
                }
                Some('{') if self.peek_at(1) == Some('-') => {
                    self.pos += 2;
                    depth += 1;
                }
                Some('-') if self.peek_at(1) == Some('}') => {
                    self.pos += 2;
                    depth -= 1;
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
        Ok(())
    }

    fn string(&mut self) -> Result<(), LexError> {
        let lo = self.pos;
        self.bump();
        let start = self.pos;
        loop {
            match self.bump() {
                None | Some('\n') => {
                    return Err(LexError::UnterminatedString { span: self.file.span(lo, self.pos) });
                }
                Some('"') => break,
                Some(_) => {}
            }
        }
        let value = self.src[start..self.pos - 1].to_string();
        let suffix = match self.peek() {
            Some(c) if c.is_ascii_alphabetic() && !self.peek_at(1).is_some_and(|n| !is_word_end(n)) => {
                self.bump();
                Some(c)
            }
            _ => None,
        };
        self.push(TokenKind::Str { value, suffix }, lo);
        Ok(())
    }

    fn word(&mut self) -> Result<(), LexError> {
        let lo = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || is_special(c) {
                break;
            }
            if is_illegal(c) {
                break;
            }
            if c == '~' && self.pos > lo && self.peek_at(1).is_some_and(is_ident_start) {
                break;
            }
            self.bump();
        }
        let word = &self.src[lo..self.pos];
        let kind = if is_int_literal(word) {
            TokenKind::Int(word.to_string())
        } else if let Some(op) = OPERATORS.iter().find(|op| **op == word) {
            TokenKind::Op(op)
        } else if let Some(kw) = Keyword::from_word(word) {
            TokenKind::Keyword(kw)
        } else if word == "#include" {
            TokenKind::Include
        } else if word == "#pragma" {
            TokenKind::Pragma
        } else {
            TokenKind::Ident(word.to_string())
        };
        self.push(kind, lo);
        Ok(())
    }
}

fn is_word_end(c: char) -> bool {
    c.is_whitespace() || is_special(c)
}

/// Tokenize one source file. Comments and whitespace are dropped; every
/// token's span indexes the original text.
pub fn tokenize(file: &SourceFile) -> Result<Vec<Token>, LexError> {
    Lexer { file, src: &file.text, pos: 0, tokens: Vec::new() }.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::span::FileId;

    fn kinds(src: &str) -> Vec<String> {
        let f = SourceFile::new(FileId(0), "t.fc", src);
        tokenize(&f).unwrap().iter().map(|t| t.kind.to_string()).collect()
    }

    #[test]
    fn modifying_call_statement() {
        assert_eq!(
            kinds("int flags = cs~load_uint(4);"),
            [
                "kw:int",
                "ident:flags",
                "'='",
                "ident:cs",
                "'~'",
                "ident:load_uint",
                "'('",
                "int:4",
                "')'",
                "';'"
            ]
        );
    }

    #[test]
    fn empty_input() {
        assert!(kinds("").is_empty());
    }

    #[test]
    fn funky_identifiers_and_comments() {
        let k = kinds("if (in_msg_body.slice_empty?()) ;; tail\n{- block {- nested -} -} op::withdraw");
        assert_eq!(
            k,
            [
                "kw:if",
                "'('",
                "ident:in_msg_body",
                "'.'",
                "ident:slice_empty?",
                "'('",
                "')'",
                "')'",
                "ident:op::withdraw"
            ]
        );
    }

    #[test]
    fn operators_need_spaces() {
        assert_eq!(kinds("a+b"), ["ident:a+b"]);
        assert_eq!(kinds("a + b"), ["ident:a", "'+'", "ident:b"]);
        assert_eq!(kinds("x ~>> 2"), ["ident:x", "'~>>'", "int:2"]);
        assert_eq!(kinds("~ x"), ["'~'", "ident:x"]);
        assert_eq!(kinds("-1 0xFF"), ["int:-1", "int:0xFF"]);
    }

    #[test]
    fn string_suffix() {
        assert_eq!(kinds("\"transfer\"c;"), ["str:\"transfer\"c", "';'"]);
        assert_eq!(kinds("#include \"stdlib.fc\";"), ["#include", "str:\"stdlib.fc\"", "';'"]);
    }

    #[test]
    fn illegal_character_is_reported() {
        let f = SourceFile::new(FileId(0), "t.fc", "int x\u{7} = 1;");
        let err = tokenize(&f).unwrap_err();
        assert!(matches!(err, LexError::IllegalChar { ch: '\u{7}', .. }));
        assert_eq!(err.span().start_col, 6);
    }

    #[test]
    fn unterminated_comment() {
        let f = SourceFile::new(FileId(0), "t.fc", "{- open");
        assert!(matches!(tokenize(&f), Err(LexError::UnterminatedComment { .. })));
    }

    #[test]
    fn int_literals() {
        assert_eq!(parse_int_literal("0xFFFFFFFF"), Some(0xFFFF_FFFF));
        assert_eq!(parse_int_literal("-12"), Some(-12));
        assert_eq!(parse_int_literal("0b101"), Some(5));
    }
}
