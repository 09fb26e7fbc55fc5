use std::fmt::Write;

use super::Layout;

/// Text chart of every page: one line per row, long-presses in braces and
/// blank keys as `[ ]`.
pub fn render_layout(layout: &Layout) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} ({}, {}, {:?}) v{}",
        layout.layout_id, layout.language_tag, layout.script, layout.base_grid, layout.version
    );
    for (p, page) in layout.pages.iter().enumerate() {
        let _ = writeln!(out, "page {p}:");
        let rows = page.keys.iter().map(|k| k.row + 1).max().unwrap_or(0);
        for row in 0..rows {
            let mut keys: Vec<_> = page.keys.iter().filter(|k| k.row == row).collect();
            keys.sort_by_key(|k| k.col);
            let cells: Vec<String> = keys
                .iter()
                .map(|k| {
                    let face = if k.is_blank() { " " } else { k.face.as_str() };
                    let mut cell = format!("[{face}]");
                    if let Some(t) = k.switch_to_page {
                        let _ = write!(cell, "→{t}");
                    }
                    if !k.long_press.is_empty() {
                        let _ = write!(cell, "{{{}}}", k.long_press.join(""));
                    }
                    cell
                })
                .collect();
            let _ = writeln!(out, "  {}", cells.join(" "));
        }
    }
    if !layout.dynamic_rules.is_empty() {
        let _ = writeln!(out, "dynamic rules: {}", layout.dynamic_rules.len());
    }
    out
}
