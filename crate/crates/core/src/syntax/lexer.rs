use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Star,
    Assign,
    Colon,
    Semi,
    Comma,
    LBrack,
    RBrack,
    LAngle,
    RAngle,
    LParen,
    RParen,
    Dash,
    Lambda,
    Pi,
    Dot,
    Arrow,
    Triangle,
    Epsilon,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Star => "`*`".into(),
            Tok::Assign => "`:=`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::LAngle => "`<`".into(),
            Tok::RAngle => "`>`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Dash => "`---`".into(),
            Tok::Lambda => "`\\`".into(),
            Tok::Pi => "`!`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Triangle => "`|>`".into(),
            Tok::Epsilon => "`ε`".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Token {
    pub tok: Tok,
    /// 1-based column of the first character.
    pub col: usize,
    /// Column just past the last character.
    pub end: usize,
}

fn is_ident_char(c: char) -> bool {
    !c.is_whitespace()
        && !matches!(
            c,
            '*' | ':' | ';' | ',' | '[' | ']' | '<' | '>' | '(' | ')' | '\\' | '!' | '.' | '|' | '#' | '-'
                | 'ε' | 'λ' | 'Π' | '∀' | '▷' | '→'
        )
}

pub(crate) fn lex_line(text: &str, line: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, width) = match c {
            '*' => (Tok::Star, 1),
            ':' if next == Some('=') => (Tok::Assign, 2),
            ':' => (Tok::Colon, 1),
            ';' => (Tok::Semi, 1),
            ',' => (Tok::Comma, 1),
            '[' => (Tok::LBrack, 1),
            ']' => (Tok::RBrack, 1),
            '<' => (Tok::LAngle, 1),
            '>' => (Tok::RAngle, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '.' => (Tok::Dot, 1),
            '\\' | 'λ' => (Tok::Lambda, 1),
            '!' | 'Π' | '∀' => (Tok::Pi, 1),
            '→' => (Tok::Arrow, 1),
            '▷' => (Tok::Triangle, 1),
            'ε' => (Tok::Epsilon, 1),
            '|' if next == Some('>') => (Tok::Triangle, 2),
            '-' if next == Some('>') => (Tok::Arrow, 2),
            '-' if next == Some('-') && chars.get(i + 2) == Some(&'-') => (Tok::Dash, 3),
            c if is_ident_char(c) => {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                (Tok::Ident(chars[i..j].iter().collect()), j - i)
            }
            c => return Err(ParseError::new(line, col, format!("unexpected character `{c}`"))),
        };
        out.push(Token { tok, col, end: col + width });
        i += width;
    }
    Ok(out)
}
