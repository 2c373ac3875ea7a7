use crate::ast::Pos;
use crate::error::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
    /// Text of a block comment containing at least one `@` directive.
    Annotation(String),
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
    /// Position of the last character of the token.
    pub end: Pos,
}

const SYMBOLS: [&str; 26] = [
    ":=", "==", "!=", "<=", ">=", "&&", "||", "/\\", "\\/", "<", ">", "+", "-", "*", "/", "%", "!",
    "?", "~", ".", ",", ";", ":", "(", ")", "=",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let advance = |i: &mut usize, line: &mut u32, col: &mut u32, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos::new(line, col);
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let start = i + 2;
            let mut j = start;
            while j + 1 < chars.len() && !(chars[j] == '*' && chars[j + 1] == '/') {
                j += 1;
            }
            if j + 1 >= chars.len() {
                return Err(SyntaxError::new(pos, "unterminated comment"));
            }
            let text: String = chars[start..j].iter().collect();
            let n = j + 2 - i;
            advance(&mut i, &mut line, &mut col, n);
            if text.contains('@') {
                out.push(Token {
                    tok: Tok::Annotation(text),
                    pos,
                    end: Pos::new(line, col - 1),
                });
            }
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            let v = text.parse::<i64>().map_err(|_| {
                SyntaxError::new(pos, format!("integer literal `{text}` too large"))
            })?;
            let n = j - i;
            advance(&mut i, &mut line, &mut col, n);
            out.push(Token {
                tok: Tok::Int(v),
                pos,
                end: Pos::new(line, col - 1),
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            let n = j - i;
            advance(&mut i, &mut line, &mut col, n);
            out.push(Token {
                tok: Tok::Ident(text),
                pos,
                end: Pos::new(line, col - 1),
            });
            continue;
        }
        let sym = SYMBOLS.iter().find(|s| {
            let n = s.chars().count();
            i + n <= chars.len() && chars[i..i + n].iter().copied().eq(s.chars())
        });
        match sym {
            Some(s) => {
                advance(&mut i, &mut line, &mut col, s.chars().count());
                out.push(Token {
                    tok: Tok::Sym(s),
                    pos,
                    end: Pos::new(line, col - 1),
                });
            }
            None => return Err(SyntaxError::new(pos, format!("unexpected character `{c}`"))),
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos::new(line, col),
        end: Pos::new(line, col),
    });
    Ok(out)
}
