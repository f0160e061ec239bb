use super::{Span, SyntaxError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Type,
    Arrow,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Colon,
    Dot,
    Eof,
}

fn is_delim(c: char) -> bool {
    c.is_whitespace() || "{}[]():.%".contains(c)
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<(Tok, Span)>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize| {
        if chars[*i] == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
        *i += 1;
    };
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col);
            continue;
        }
        if c == '%' {
            let next = chars.get(i + 1).copied();
            match next {
                Some('{') => {
                    // block comment, closed by `}%`
                    loop {
                        if i + 1 >= chars.len() {
                            return Err(SyntaxError {
                                span,
                                message: "unterminated block comment".into(),
                            });
                        }
                        if chars[i] == '}' && chars[i + 1] == '%' {
                            advance(&mut i, &mut line, &mut col);
                            advance(&mut i, &mut line, &mut col);
                            break;
                        }
                        advance(&mut i, &mut line, &mut col);
                    }
                }
                None | Some('%') => skip_line(&chars, &mut i, &mut line, &mut col),
                Some(n) if n.is_whitespace() => skip_line(&chars, &mut i, &mut line, &mut col),
                Some(_) => {
                    let word: String = chars[i..].iter().take_while(|c| !c.is_whitespace()).collect();
                    return Err(SyntaxError {
                        span,
                        message: format!("directive `{word}` is not supported"),
                    });
                }
            }
            continue;
        }
        let single = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ':' => Some(Tok::Colon),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, span));
            advance(&mut i, &mut line, &mut col);
            continue;
        }
        let mut word = String::new();
        while i < chars.len() && !is_delim(chars[i]) {
            word.push(chars[i]);
            advance(&mut i, &mut line, &mut col);
        }
        let tok = match word.as_str() {
            "->" => Tok::Arrow,
            "type" => Tok::Type,
            "_" => {
                return Err(SyntaxError {
                    span,
                    message: "`_` is reserved".into(),
                })
            }
            _ => Tok::Ident(word),
        };
        out.push((tok, span));
    }
    out.push((Tok::Eof, Span { line, col }));
    Ok(out)
}

fn skip_line(chars: &[char], i: &mut usize, line: &mut usize, col: &mut usize) {
    while *i < chars.len() && chars[*i] != '\n' {
        *i += 1;
    }
    if *i < chars.len() {
        *i += 1;
        *line += 1;
        *col = 1;
    }
}
