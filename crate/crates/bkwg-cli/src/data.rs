//! Reading observations from text: decimal literals separated by
//! whitespace or commas, `#` starting a comment.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub token: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: `{}` is not a number",
            self.line, self.column, self.token
        )
    }
}

pub fn parse_values(text: &str) -> Result<Vec<f64>, ParseError> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut start = None;
        // a trailing separator flushes the last token
        for (col, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
            let sep = ch.is_whitespace() || ch == ',';
            match (sep, start) {
                (false, None) => start = Some(col),
                (true, Some(s)) => {
                    let tok = &line[s..col];
                    match tok.parse::<f64>() {
                        Ok(v) if v.is_finite() => out.push(v),
                        _ => {
                            return Err(ParseError {
                                line: ln + 1,
                                column: line[..s].chars().count() + 1,
                                token: tok.to_string(),
                            })
                        }
                    }
                    start = None;
                }
                _ => {}
            }
        }
    }
    Ok(out)
}
