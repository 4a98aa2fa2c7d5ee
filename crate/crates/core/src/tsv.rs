//! Tab-separated table helpers shared by every report.
//!
//! Written tables start with a `# manifest: <hash>` comment line; readers
//! skip `#` lines and blank lines.

/// Fixed-point formatting with negative zero printed as zero.
pub fn fmt_fixed(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Replaces tabs and line breaks so a free-text value stays in one cell.
pub fn clean_field(s: &str) -> String {
    s.chars()
        .map(|c| if matches!(c, '\t' | '\n' | '\r') { ' ' } else { c })
        .collect()
}

pub fn render(manifest_hash: Option<&str>, header: &str, rows: &[String]) -> String {
    let mut out = String::new();
    if let Some(hash) = manifest_hash {
        out.push_str("# manifest: ");
        out.push_str(hash);
        out.push('\n');
    }
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    out
}

/// Non-comment, non-blank lines with 1-based line numbers.
pub fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

/// Splits a row and checks the column count.
pub fn split_row(line: &str, expected: usize) -> Result<Vec<&str>, String> {
    let cells: Vec<&str> = line.split('\t').collect();
    if cells.len() != expected {
        return Err(format!("expected {expected} columns, found {}", cells.len()));
    }
    Ok(cells)
}

/// Checks that the first data line is `header`; returns the remaining rows.
pub fn expect_header<'a>(text: &'a str, header: &str) -> Result<Vec<(usize, &'a str)>, String> {
    let mut lines = data_lines(text);
    match lines.next() {
        Some((_, first)) if first == header => Ok(lines.collect()),
        Some((n, first)) => Err(format!("line {n}: expected header {header:?}, found {first:?}")),
        None => Err("empty table".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_zero() {
        assert_eq!(fmt_fixed(-0.00001, 4), "0.0000");
        assert_eq!(fmt_fixed(-0.0, 2), "0.00");
        assert_eq!(fmt_fixed(-0.5, 2), "-0.50");
        assert_eq!(fmt_fixed(1.0 / 3.0, 4), "0.3333");
    }

    #[test]
    fn header_and_comments() {
        let t = render(Some("abc"), "a\tb", &["1\t2".into()]);
        assert_eq!(t, "# manifest: abc\na\tb\n1\t2\n");
        let rows = expect_header(&t, "a\tb").unwrap();
        assert_eq!(rows, vec![(3, "1\t2")]);
        assert!(expect_header(&t, "x").is_err());
        assert_eq!(split_row("1\t2", 2).unwrap(), vec!["1", "2"]);
        assert!(split_row("1", 2).is_err());
    }
}
