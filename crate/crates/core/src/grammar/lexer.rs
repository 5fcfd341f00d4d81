use super::GrammarError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) enum Tok {
    Ident(String),
    /// `'...'`, used for surface forms that are not plain identifiers.
    Quoted(String),
    Arrow,
    Dot,
    Colon,
    Semi,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Pipe,
    Up,
    Down,
    Tilde,
    At,
    Eq,
    Question,
    Star,
    Plus,
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Quoted(s) => format!("'{s}'"),
            Tok::Arrow => "`->`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Semi => "`;`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Up => "`^`".into(),
            Tok::Down => "`!`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::At => "`@`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Question => "`?`".into(),
            Tok::Star => "`*`".into(),
            Tok::Plus => "`+`".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(super) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub(super) fn is_ident_start(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

pub(super) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

/// True if `s` lexes back as a single identifier.
pub(super) fn is_plain_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if is_ident_start(c) => {}
        _ => return false,
    }
    !s.contains("->") && chars.all(is_ident_char)
}

pub(super) fn tokenize(src: &str) -> Result<Vec<Spanned>, GrammarError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! advance {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
        if c.is_whitespace() {
            advance!();
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance!();
            }
            continue;
        }
        if c == '"' {
            advance!();
            while i < chars.len() && chars[i] != '"' {
                advance!();
            }
            if i == chars.len() {
                return Err(GrammarError::syntax(tline, tcol, "unterminated comment"));
            }
            advance!();
            continue;
        }
        if c == '\'' {
            advance!();
            let mut text = String::new();
            loop {
                if i == chars.len() || chars[i] == '\n' {
                    return Err(GrammarError::syntax(tline, tcol, "unterminated quoted token"));
                }
                match chars[i] {
                    '\'' => {
                        advance!();
                        break;
                    }
                    '\\' if i + 1 < chars.len() => {
                        advance!();
                        text.push(chars[i]);
                        advance!();
                    }
                    ch => {
                        text.push(ch);
                        advance!();
                    }
                }
            }
            if text.is_empty() {
                return Err(GrammarError::syntax(tline, tcol, "empty quoted token"));
            }
            out.push(Spanned {
                tok: Tok::Quoted(text),
                line: tline,
                column: tcol,
            });
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'>') {
            advance!();
            advance!();
            out.push(Spanned {
                tok: Tok::Arrow,
                line: tline,
                column: tcol,
            });
            continue;
        }
        if is_ident_start(c) {
            let mut text = String::new();
            while i < chars.len()
                && is_ident_char(chars[i])
                && !(chars[i] == '-' && chars.get(i + 1) == Some(&'>'))
            {
                text.push(chars[i]);
                advance!();
            }
            out.push(Spanned {
                tok: Tok::Ident(text),
                line: tline,
                column: tcol,
            });
            continue;
        }
        let tok = match c {
            '.' => Tok::Dot,
            ':' => Tok::Colon,
            ';' => Tok::Semi,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '|' => Tok::Pipe,
            '^' => Tok::Up,
            '!' => Tok::Down,
            '~' => Tok::Tilde,
            '@' => Tok::At,
            '=' => Tok::Eq,
            '?' => Tok::Question,
            '*' => Tok::Star,
            '+' => Tok::Plus,
            other => {
                return Err(GrammarError::syntax(
                    tline,
                    tcol,
                    format!("unexpected character `{other}`"),
                ))
            }
        };
        advance!();
        out.push(Spanned {
            tok,
            line: tline,
            column: tcol,
        });
    }
    Ok(out)
}
