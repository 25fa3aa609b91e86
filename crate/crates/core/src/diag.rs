use std::fmt;

/// Byte range into a source file, end exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    pub fn contains(self, other: Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Io,
    Syntax,
    Resolution,
    Type,
    Assertion,
    Drc,
    Internal,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Category::Io => "io",
            Category::Syntax => "syntax",
            Category::Resolution => "resolution",
            Category::Type => "type",
            Category::Assertion => "assertion",
            Category::Drc => "drc",
            Category::Internal => "internal",
        };
        f.write_str(s)
    }
}

/// A compile error with optional source location.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, thiserror::Error)]
#[error("{category} error: {message}")]
pub struct Diagnostic {
    pub file: Option<String>,
    pub span: Option<Span>,
    pub category: Category,
    pub message: String,
}

impl Diagnostic {
    pub fn new(category: Category, message: impl Into<String>) -> Self {
        Diagnostic { file: None, span: None, category, message: message.into() }
    }

    pub fn at(mut self, file: &str, span: Span) -> Self {
        if self.file.is_none() {
            self.file = Some(file.to_string());
            self.span = Some(span);
        }
        self
    }

    pub fn syntax(file: &str, span: Span, message: impl Into<String>) -> Self {
        Diagnostic::new(Category::Syntax, message).at(file, span)
    }

    pub fn resolution(message: impl Into<String>) -> Self {
        Diagnostic::new(Category::Resolution, message)
    }

    pub fn ty(message: impl Into<String>) -> Self {
        Diagnostic::new(Category::Type, message)
    }
}

pub type Result<T, E = Diagnostic> = std::result::Result<T, E>;

/// 1-based line and column of a byte offset.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(offset, |nl| offset - nl - 1) + 1;
    (line, col)
}

/// Sorted, de-duplicated report with file/line/column prefixes.
pub fn render_error_report(diags: &[Diagnostic], sources: &dyn Fn(&str) -> Option<String>) -> String {
    let mut sorted: Vec<&Diagnostic> = diags.iter().collect();
    sorted.sort_by(|a, b| {
        (a.file.as_deref(), a.span.map(|s| s.start), a.category, &a.message).cmp(&(
            b.file.as_deref(),
            b.span.map(|s| s.start),
            b.category,
            &b.message,
        ))
    });
    sorted.dedup();
    let mut out = String::new();
    let mut current_file: Option<&str> = None;
    for d in &sorted {
        if d.file.as_deref() != current_file {
            current_file = d.file.as_deref();
            out.push_str(&format!("== {} ==\n", current_file.unwrap_or("<project>")));
        }
        let loc = match (&d.file, d.span) {
            (Some(file), Some(span)) => match sources(file) {
                Some(text) => {
                    let (l, c) = line_col(&text, span.start);
                    format!("{file}:{l}:{c}")
                }
                None => format!("{file}:@{}", span.start),
            },
            (Some(file), None) => file.clone(),
            _ => "<project>".to_string(),
        };
        out.push_str(&format!("{loc}: {} error: {}\n", d.category, d.message));
    }
    out.push_str(&format!("{} error(s)\n", sorted.len()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_col_counts_from_one() {
        let text = "ab\ncd\nef";
        assert_eq!(line_col(text, 0), (1, 1));
        assert_eq!(line_col(text, 4), (2, 2));
        assert_eq!(line_col(text, 6), (3, 1));
    }

    #[test]
    fn report_groups_by_file() {
        let d1 = Diagnostic::syntax("b.td", Span::new(3, 4), "x");
        let d2 = Diagnostic::syntax("a.td", Span::new(0, 1), "y");
        let text = |_: &str| Some("abc\ndef".to_string());
        let r = render_error_report(&[d1.clone(), d2, d1], &text);
        let a = r.find("== a.td ==").unwrap();
        let b = r.find("== b.td ==").unwrap();
        assert!(a < b);
        assert!(r.contains("b.td:1:4: syntax error: x"));
        assert!(r.ends_with("2 error(s)\n"));
    }
}
