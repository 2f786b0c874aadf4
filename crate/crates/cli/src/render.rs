//! CSV, Markdown and SVG output. Everything here is deterministic.

use std::fmt::Write;

use cdf_compact::rational::to_f64;

use crate::report::{Document, Plot, Table};

fn csv_cell(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

fn csv_table(out: &mut String, t: &Table) {
    let line = |cells: &[String]| cells.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(",");
    out.push_str(&line(&t.header));
    out.push('\n');
    for row in &t.rows {
        out.push_str(&line(row));
        out.push('\n');
    }
}

/// Tables one after another, separated by a blank line; contracts last.
pub fn csv(doc: &Document) -> String {
    let mut out = String::new();
    for (i, t) in doc.tables.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        csv_table(&mut out, t);
    }
    if !doc.contracts.is_empty() {
        out.push('\n');
        csv_table(&mut out, &contract_table(doc));
    }
    out
}

fn contract_table(doc: &Document) -> Table {
    Table {
        title: "Contracts".into(),
        header: vec!["contract".into(), "status".into(), "detail".into()],
        rows: doc
            .contracts
            .iter()
            .map(|c| {
                vec![
                    c.name.clone(),
                    if c.passed { "PASS" } else { "FAIL" }.into(),
                    c.detail.clone(),
                ]
            })
            .collect(),
    }
}

fn md_table(out: &mut String, t: &Table) {
    let esc = |c: &String| c.replace('|', "\\|");
    let _ = writeln!(out, "## {}\n", t.title);
    let _ = writeln!(out, "| {} |", t.header.iter().map(esc).collect::<Vec<_>>().join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(t.header.len()));
    for row in &t.rows {
        let _ = writeln!(out, "| {} |", row.iter().map(esc).collect::<Vec<_>>().join(" | "));
    }
    out.push('\n');
}

/// Markdown with an inline SVG when the document has a plot.
pub fn markdown(doc: &Document) -> String {
    let mut out = format!("# {}\n\n", doc.title);
    for n in &doc.notes {
        let _ = writeln!(out, "- {n}");
    }
    if !doc.notes.is_empty() {
        out.push('\n');
    }
    for t in &doc.tables {
        md_table(&mut out, t);
    }
    if !doc.contracts.is_empty() {
        md_table(&mut out, &contract_table(doc));
    }
    if let Some(p) = &doc.plot {
        let _ = writeln!(out, "## {}\n", p.title);
        out.push_str(&svg(p));
        out.push('\n');
    }
    out
}

const PALETTE: [&str; 8] = [
    "#1b6ca8", "#d1495b", "#2e933c", "#edae49", "#6a4c93", "#00798c", "#8d6a9f", "#3d3b30",
];

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Line plot of every series against grid depth; values lie in `[0, 1]`.
pub fn svg(plot: &Plot) -> String {
    let (w, h) = (720.0, 420.0);
    let (left, right, top, bottom) = (60.0, 220.0, 40.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let max_depth = plot
        .series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .max()
        .unwrap_or(1)
        .max(2) as f64;
    let x = |d: usize| left + pw * (d as f64 - 1.0) / (max_depth - 1.0);
    let y = |v: f64| top + ph * (1.0 - v.clamp(0.0, 1.0));

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{left}" y="24" font-size="14">{}</text>"#,
        escape_xml(&plot.title)
    );
    let _ = writeln!(
        out,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="dimgray"/>"#
    );
    for k in 0..=4 {
        let v = k as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<line x1="{left}" y1="{yy:.2}" x2="{x2:.2}" y2="{yy:.2}" stroke="gainsboro"/><text x="{tx:.2}" y="{ty:.2}" text-anchor="end">{v:.2}</text>"#,
            yy = y(v),
            x2 = left + pw,
            tx = left - 6.0,
            ty = y(v) + 4.0
        );
    }
    let mut ticks: Vec<usize> = std::iter::successors(Some(1usize), |d| Some(d * 2))
        .take_while(|&d| (d as f64) <= max_depth)
        .collect();
    if ticks.last().map(|&t| t as f64) != Some(max_depth) {
        ticks.push(max_depth as usize);
    }
    for d in ticks {
        let _ = writeln!(
            out,
            r#"<text x="{xx:.2}" y="{ty:.2}" text-anchor="middle">{d}</text>"#,
            xx = x(d),
            ty = top + ph + 18.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{cx:.2}" y="{ty:.2}" text-anchor="middle">grid depth (1 / smallest alpha)</text>"#,
        cx = left + pw / 2.0,
        ty = h - 10.0
    );
    for (i, s) in plot.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let dash = if i % 2 == 1 { r#" stroke-dasharray="6 4""# } else { "" };
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|(d, v)| format!("{:.2},{:.2}", x(*d), y(to_f64(v))))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2"{dash} points="{}"/>"#,
            pts.join(" ")
        );
        let ly = top + 14.0 + 18.0 * i as f64;
        let lx = left + pw + 16.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{x2:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"{dash}/><text x="{tx:.2}" y="{ty:.2}">{}</text>"#,
            escape_xml(&s.label),
            x2 = lx + 24.0,
            tx = lx + 30.0,
            ty = ly + 4.0
        );
    }
    out.push_str("</svg>\n");
    out
}
