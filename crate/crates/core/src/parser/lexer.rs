use crate::diag::{Diagnostic, Span};

#[derive(Debug, Clone, PartialEq)]
pub enum TokKind {
    /// Identifier or keyword; `interpolated` is set when the text contains `{{var}}`.
    Ident { interpolated: bool },
    Int,
    Float,
    /// String literal; the token text keeps the quotes, `value` holds the unescaped content.
    Str(String),
    /// `#...#` documentation; the value excludes the hash marks.
    Doc(String),
    Punct,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokKind,
    pub text: String,
    pub span: Span,
}

impl Token {
    pub fn is_punct(&self, p: &str) -> bool {
        self.kind == TokKind::Punct && self.text == p
    }

    pub fn is_ident(&self) -> bool {
        matches!(self.kind, TokKind::Ident { .. })
    }

    pub fn is_word(&self, w: &str) -> bool {
        matches!(self.kind, TokKind::Ident { interpolated: false }) && self.text == w
    }
}

const PUNCT2: [&str; 9] = ["=>", "==", "!=", "<=", ">=", "<<", ">>", "&&", "||"];
const PUNCT1: &str = "+-*/%^!~&|<>=(){}[],;:.@`";

pub fn lex(file: &str, src: &str) -> Result<Vec<Token>, Diagnostic> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    let err = |s: usize, e: usize, m: String| Diagnostic::syntax(file, Span::new(s, e), m);
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if src[i..].starts_with("/*") {
            let Some(off) = src[i + 2..].find("*/") else {
                return Err(err(i, src.len(), "unterminated block comment".into()));
            };
            i = i + 2 + off + 2;
            continue;
        }
        let start = i;
        if c == b'#' {
            let Some(off) = src[i + 1..].find('#') else {
                return Err(err(i, src.len(), "unterminated documentation string".into()));
            };
            let end = i + 1 + off + 1;
            let value = src[i + 1..end - 1].trim().to_string();
            toks.push(Token { kind: TokKind::Doc(value), text: src[start..end].into(), span: Span::new(start, end) });
            i = end;
            continue;
        }
        if c == b'"' {
            let mut value = String::new();
            let mut j = i + 1;
            loop {
                let Some(ch) = src[j..].chars().next() else {
                    return Err(err(start, src.len(), "unterminated string literal".into()));
                };
                match ch {
                    '"' => {
                        j += 1;
                        break;
                    }
                    '\\' => {
                        match bytes.get(j + 1) {
                            Some(b'"') => value.push('"'),
                            Some(b'\\') => value.push('\\'),
                            _ => return Err(err(j, (j + 2).min(src.len()), "unsupported escape sequence in string literal".into())),
                        }
                        j += 2;
                    }
                    _ => {
                        value.push(ch);
                        j += ch.len_utf8();
                    }
                }
            }
            toks.push(Token { kind: TokKind::Str(value), text: src[start..j].into(), span: Span::new(start, j) });
            i = j;
            continue;
        }
        if c.is_ascii_digit() {
            let (kind, end) = lex_number(src, i).map_err(|(e, m)| err(start, e, m))?;
            toks.push(Token { kind, text: src[start..end].into(), span: Span::new(start, end) });
            i = end;
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut j = i;
            let mut interpolated = false;
            loop {
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                if src[j..].starts_with("{{") {
                    let Some(off) = src[j + 2..].find("}}") else {
                        return Err(err(j, src.len(), "unterminated `{{` in identifier".into()));
                    };
                    let inner = src[j + 2..j + 2 + off].trim();
                    if !is_plain_ident(inner) {
                        return Err(err(j, j + 4 + off, format!("invalid interpolation `{{{{{inner}}}}}`")));
                    }
                    interpolated = true;
                    j = j + 2 + off + 2;
                    continue;
                }
                break;
            }
            let text = &src[start..j];
            if text.contains("__") {
                return Err(err(start, j, format!("identifier `{text}` contains consecutive underscores")));
            }
            toks.push(Token { kind: TokKind::Ident { interpolated }, text: text.into(), span: Span::new(start, j) });
            i = j;
            continue;
        }
        if let Some(p) = PUNCT2.iter().find(|p| src[i..].starts_with(**p)) {
            toks.push(Token { kind: TokKind::Punct, text: (*p).into(), span: Span::new(i, i + 2) });
            i += 2;
            continue;
        }
        if PUNCT1.as_bytes().contains(&c) {
            toks.push(Token { kind: TokKind::Punct, text: (c as char).to_string(), span: Span::new(i, i + 1) });
            i += 1;
            continue;
        }
        let ch = src[i..].chars().next().unwrap_or('?');
        return Err(err(i, i + ch.len_utf8(), format!("unexpected character `{ch}`")));
    }
    toks.push(Token { kind: TokKind::Eof, text: String::new(), span: Span::new(src.len(), src.len()) });
    Ok(toks)
}

pub fn is_plain_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !s.contains("__")
}

fn lex_number(src: &str, i: usize) -> Result<(TokKind, usize), (usize, String)> {
    let bytes = src.as_bytes();
    let radix_digits = |j: usize, ok: fn(u8) -> bool| {
        let mut k = j;
        while k < bytes.len() && (ok(bytes[k]) || bytes[k] == b'_') {
            k += 1;
        }
        k
    };
    if bytes[i] == b'0' && i + 1 < bytes.len() {
        let ok: Option<fn(u8) -> bool> = match bytes[i + 1] {
            b'b' | b'B' => Some(|b| b == b'0' || b == b'1'),
            b'x' | b'X' => Some(|b: u8| b.is_ascii_hexdigit()),
            b'o' | b'O' => Some(|b| (b'0'..=b'7').contains(&b)),
            _ => None,
        };
        if let Some(ok) = ok {
            let end = radix_digits(i + 2, ok);
            if end == i + 2 {
                return Err((end, "missing digits after radix prefix".into()));
            }
            return Ok((TokKind::Int, end));
        }
    }
    let mut j = i;
    while j < bytes.len() && bytes[j].is_ascii_digit() {
        j += 1;
    }
    let mut float = false;
    if j + 1 < bytes.len() && bytes[j] == b'.' && bytes[j + 1].is_ascii_digit() {
        float = true;
        j += 1;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
    }
    if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
        let mut k = j + 1;
        if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
            k += 1;
        }
        if k < bytes.len() && bytes[k].is_ascii_digit() {
            while k < bytes.len() && bytes[k].is_ascii_digit() {
                k += 1;
            }
            float = true;
            j = k;
        }
    }
    Ok((if float { TokKind::Float } else { TokKind::Int }, j))
}

/// Value of an integer literal token in any supported radix.
pub fn parse_int_literal(text: &str) -> Option<i64> {
    let t = text.replace('_', "");
    let (digits, radix) = match t.get(..2) {
        Some("0b" | "0B") => (&t[2..], 2),
        Some("0x" | "0X") => (&t[2..], 16),
        Some("0o" | "0O") => (&t[2..], 8),
        _ => (&t[..], 10),
    };
    i64::from_str_radix(digits, radix).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<String> {
        lex("t", src).unwrap().into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn ranges_and_connections_split() {
        assert_eq!(texts("0=1=>4"), ["0", "=", "1", "=>", "4", ""]);
        assert_eq!(texts("a =2=> b"), ["a", "=", "2", "=>", "b", ""]);
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(texts("a // x\n/* y */ b"), ["a", "b", ""]);
    }

    #[test]
    fn radix_literals() {
        assert_eq!(parse_int_literal("0b0001"), Some(1));
        assert_eq!(parse_int_literal("0x01"), Some(1));
        assert_eq!(parse_int_literal("0o17"), Some(15));
        assert_eq!(parse_int_literal("99999999999999999999"), None);
        assert_eq!(lex("t", "1.5").unwrap()[0].kind, TokKind::Float);
        assert_eq!(lex("t", "2e3").unwrap()[0].kind, TokKind::Float);
    }

    #[test]
    fn consecutive_underscores_rejected_at_identifier() {
        let e = lex("t", "const a__b = 1;").unwrap_err();
        assert_eq!(e.span, Some(Span::new(6, 10)));
    }

    #[test]
    fn string_escapes() {
        let t = lex("t", r#""a\"b\\c""#).unwrap();
        assert_eq!(t[0].kind, TokKind::Str("a\"b\\c".into()));
        assert!(lex("t", r#""a\n""#).is_err());
    }

    #[test]
    fn interpolated_identifier() {
        let t = lex("t", "bypass_{{i}}").unwrap();
        assert_eq!(t[0].kind, TokKind::Ident { interpolated: true });
        assert_eq!(t[0].text, "bypass_{{i}}");
    }

    #[test]
    fn doc_string_token() {
        let t = lex("t", "#hello world# streamlet").unwrap();
        assert_eq!(t[0].kind, TokKind::Doc("hello world".into()));
    }
}
