/// Renders rows as space-separated columns. Columns whose cells all parse
/// as numbers are right-aligned.
pub fn render(headers: &[&str], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    let mut numeric = vec![!rows.is_empty(); cols];
    for row in rows {
        for (i, cell) in row.iter().enumerate().take(cols) {
            widths[i] = widths[i].max(cell.chars().count());
            if cell.parse::<f64>().is_err() {
                numeric[i] = false;
            }
        }
    }
    let mut out = String::new();
    let mut line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut parts = Vec::with_capacity(cols);
        for (i, cell) in cells.enumerate().take(cols) {
            let pad = widths[i] - cell.chars().count();
            if numeric[i] {
                parts.push(format!("{}{cell}", " ".repeat(pad)));
            } else if i + 1 == cols {
                parts.push(cell.to_string());
            } else {
                parts.push(format!("{cell}{}", " ".repeat(pad)));
            }
        }
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(&mut headers.iter().copied());
    for row in rows {
        line(&mut row.iter().map(String::as_str));
    }
    out
}
