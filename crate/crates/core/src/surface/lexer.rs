use super::{ParseError, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Backslash,
    Dot,
    Colon,
    Plus,
    Arrow,
    Pipe,
    Eq,
    LParen,
    RParen,
    LBrace,
    /// `}` with a hole name written directly after it.
    RBrace(Option<String>),
    /// `?` or `?name`.
    Question(Option<String>),
    Num(i64),
    Ident(String),
    C,
    B,
    NumTy,
    Inl,
    Inr,
    Case,
    Of,
    End,
    Let,
    In,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Backslash => "`\\`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Eq => "`=`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace(_) => "`}`".into(),
            Tok::Question(None) => "`?`".into(),
            Tok::Question(Some(u)) => format!("`?{u}`"),
            Tok::Num(n) => format!("number `{n}`"),
            Tok::Ident(x) => format!("identifier `{x}`"),
            Tok::C => "`c`".into(),
            Tok::B => "`b`".into(),
            Tok::NumTy => "`num`".into(),
            Tok::Inl => "`inl`".into(),
            Tok::Inr => "`inr`".into(),
            Tok::Case => "`case`".into(),
            Tok::Of => "`of`".into(),
            Tok::End => "`end`".into(),
            Tok::Let => "`let`".into(),
            Tok::In => "`in`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

pub fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "c" => Tok::C,
        "b" => Tok::B,
        "num" => Tok::NumTy,
        "inl" => Tok::Inl,
        "inr" => Tok::Inr,
        "case" => Tok::Case,
        "of" => Tok::Of,
        "end" => Tok::End,
        "let" => Tok::Let,
        "in" => Tok::In,
        _ => return None,
    })
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let at = |i: usize| chars.get(i).map(|&(_, c)| c);
    let offset = |i: usize| chars.get(i).map_or(src.len(), |&(o, _)| o);
    let name_from = |mut i: usize| {
        let start = i;
        while at(i).is_some_and(name_char) {
            i += 1;
        }
        (i, (i > start).then(|| src[offset(start)..offset(i)].to_owned()))
    };

    let mut out = Vec::new();
    let mut i = 0;
    while let Some(c) = at(i) {
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while at(i).is_some_and(|c| c != '\n') {
                i += 1;
            }
            continue;
        }
        let tok = match c {
            '\\' | 'λ' => {
                i += 1;
                Tok::Backslash
            }
            '.' => {
                i += 1;
                Tok::Dot
            }
            ':' => {
                i += 1;
                Tok::Colon
            }
            '+' => {
                i += 1;
                Tok::Plus
            }
            '|' => {
                i += 1;
                Tok::Pipe
            }
            '=' => {
                i += 1;
                Tok::Eq
            }
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            '{' => {
                i += 1;
                Tok::LBrace
            }
            '}' => {
                let (next, name) = name_from(i + 1);
                i = next;
                Tok::RBrace(name)
            }
            '?' => {
                let (next, name) = name_from(i + 1);
                i = next;
                Tok::Question(name)
            }
            '-' if at(i + 1) == Some('>') => {
                i += 2;
                Tok::Arrow
            }
            '-' | '0'..='9' => {
                let mut j = if c == '-' { i + 1 } else { i };
                if !at(j).is_some_and(|c| c.is_ascii_digit()) {
                    return Err(ParseError::new("unexpected `-`", Span::new(offset(i), offset(i + 1))));
                }
                while at(j).is_some_and(|c| c.is_ascii_digit()) {
                    j += 1;
                }
                let text = &src[offset(i)..offset(j)];
                let span = Span::new(offset(i), offset(j));
                if at(j).is_some_and(ident_start) {
                    return Err(ParseError::new(format!("malformed number `{text}`"), span));
                }
                let n = text
                    .parse::<i64>()
                    .map_err(|_| ParseError::new(format!("number `{text}` is out of range"), span))?;
                i = j;
                Tok::Num(n)
            }
            c if ident_start(c) => {
                let (next, name) = name_from(i);
                i = next;
                let word = name.unwrap_or_default();
                keyword(&word).unwrap_or(Tok::Ident(word))
            }
            other => {
                return Err(ParseError::new(
                    format!("unexpected character `{other}`"),
                    Span::new(offset(i), offset(i + 1)),
                ))
            }
        };
        out.push((tok, Span::new(offset(start), offset(i))));
    }
    out.push((Tok::Eof, Span::new(src.len(), src.len())));
    Ok(out)
}
