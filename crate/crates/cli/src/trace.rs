//! Trace files: whitespace-separated page ids, `#` comment lines, blank lines
//! ignored.

use std::fs;
use std::path::Path;

use fifo_anomaly::{Page, ReferenceString};

use crate::error::CliError;

const IDS_PER_LINE: usize = 20;

pub fn parse(text: &str, origin: &str) -> Result<ReferenceString, CliError> {
    let mut refs = ReferenceString::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_start();
        if line.starts_with('#') {
            continue;
        }
        for token in line.split_whitespace() {
            refs.push(
                parse_page(token)
                    .map_err(|msg| CliError::Parse(format!("{origin}:{}: {msg}", lineno + 1)))?,
            );
        }
    }
    Ok(refs)
}

fn parse_page(token: &str) -> Result<Page, String> {
    let id: u32 = token
        .parse()
        .map_err(|_| format!("`{token}` is not a page id"))?;
    Page::new(id).map_err(|e| e.to_string())
}

/// Inline lists accept commas as well as whitespace: `"1,2,3"` or `"1 2 3"`.
pub fn parse_list(text: &str) -> Result<Vec<Page>, CliError> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| parse_page(t).map_err(CliError::Parse))
        .collect()
}

pub fn read(path: &Path) -> Result<ReferenceString, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text, &path.display().to_string())
}

pub fn render(refs: &ReferenceString, header: &[String]) -> String {
    let mut out = String::new();
    for line in header {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    for chunk in refs.pages().chunks(IDS_PER_LINE) {
        let line: Vec<String> = chunk.iter().map(|p| p.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn write(path: &Path, refs: &ReferenceString, header: &[String]) -> Result<(), CliError> {
    fs::write(path, render(refs, header)).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let refs = parse("# header\n\n1 2  3\n   # indented comment\n4\t5\n", "t").unwrap();
        assert_eq!(refs.ids(), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn bad_tokens_report_their_line() {
        let err = parse("1 2\n3 x\n", "t").unwrap_err();
        assert_eq!(err.to_string(), "t:2: `x` is not a page id");
        assert!(parse("0\n", "t").is_err());
        assert!(parse("1,2\n", "t").is_err());
    }

    #[test]
    fn empty_trace_is_empty() {
        assert!(parse("", "t").unwrap().is_empty());
        assert!(parse("# nothing\n", "t").unwrap().is_empty());
    }

    #[test]
    fn inline_lists() {
        let ids: Vec<u32> = parse_list("7,3, 6 2,5")
            .unwrap()
            .iter()
            .map(|p| p.id())
            .collect();
        assert_eq!(ids, vec![7, 3, 6, 2, 5]);
        assert!(parse_list("1,-2").is_err());
    }

    #[test]
    fn rendered_traces_parse_back() {
        let refs = ReferenceString::cyclic(7, 5);
        let text = render(&refs, &["family".to_string()]);
        assert_eq!(parse(&text, "t").unwrap(), refs);
    }
}
