//! Text and SVG charts for pages and for windows of the ground ring.

use std::fmt::Write;

use bredon_core::ground::{point_dim, Bidegree, GroundElement};
use bredon_core::spectra::Page;

/// How a cell is printed in a grid.
pub fn cell_text(page: &Page, pos: (i64, i64)) -> String {
    if page.is_unknown(pos) {
        return "??".into();
    }
    match page.dim(pos) {
        0 => "0".into(),
        1 => "Z/2".into(),
        n => format!("(Z/2)^{n}"),
    }
}

fn pad(s: &str, width: usize) -> String {
    let n = s.chars().count();
    format!("{}{s}", " ".repeat(width.saturating_sub(n)))
}

/// Grid with `q` increasing upward and `p` left to right.
pub fn render_ascii(page: &Page) -> String {
    render_ascii_titled(page, &format!("E_{} page, weight r = {}", page.index(), page.weight()))
}

pub fn render_ascii_titled(page: &Page, title: &str) -> String {
    let mut out = String::new();
    writeln!(out, "{title}").unwrap();
    let cols = page.width();
    let rows = page.height();
    let mut width = 1;
    for p in 0..cols {
        width = width.max(p.to_string().len());
        for q in 0..rows {
            width = width.max(cell_text(page, (p, q)).chars().count());
        }
    }
    let label_w = (rows - 1).max(0).to_string().len().max(1);
    for q in (0..rows).rev() {
        let cells: Vec<String> = (0..cols).map(|p| pad(&cell_text(page, (p, q)), width)).collect();
        writeln!(out, "{} | {}", pad(&q.to_string(), label_w), cells.join("  ")).unwrap();
    }
    let rule_len = if cols == 0 { 1 } else { cols as usize * (width + 2) - 1 };
    writeln!(out, "{} +-{}", " ".repeat(label_w), "-".repeat(rule_len)).unwrap();
    let labels: Vec<String> = (0..cols).map(|p| pad(&p.to_string(), width)).collect();
    writeln!(out, "{}   {}   p", " ".repeat(label_w), labels.join("  ")).unwrap();
    out
}

fn svg_header(out: &mut String, w: i64, h: i64) {
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#).unwrap();
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

const CELL: i64 = 56;
const MARGIN: i64 = 40;

/// A page as an SVG grid, `q` upward.
pub fn render_svg(page: &Page) -> String {
    render_svg_titled(page, &format!("E_{} page, weight r = {}", page.index(), page.weight()))
}

pub fn render_svg_titled(page: &Page, title: &str) -> String {
    let (cols, rows) = (page.width(), page.height());
    let w = 2 * MARGIN + cols.max(1) * CELL;
    let h = 2 * MARGIN + rows.max(1) * CELL;
    let mut out = String::new();
    svg_header(&mut out, w, h);
    writeln!(
        out,
        r#"<text x="{MARGIN}" y="20" font-family="monospace" font-size="14">{}</text>"#,
        escape(title)
    )
    .unwrap();
    let bottom = h - MARGIN;
    for q in 0..rows {
        for p in 0..cols {
            let x = MARGIN + p * CELL;
            let y = bottom - (q + 1) * CELL;
            let text = cell_text(page, (p, q));
            let fill = match text.as_str() {
                "0" => "#ffffff",
                "??" => "#f4d4d4",
                _ => "#dde6f6",
            };
            writeln!(
                out,
                r##"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="#999999"/>"##
            )
            .unwrap();
            if text != "0" {
                writeln!(
                    out,
                    r#"<text x="{}" y="{}" font-family="monospace" font-size="12" text-anchor="middle">{}</text>"#,
                    x + CELL / 2,
                    y + CELL / 2 + 4,
                    escape(&text)
                )
                .unwrap();
            }
        }
    }
    for p in 0..cols {
        writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="12" text-anchor="middle">{p}</text>"#,
            MARGIN + p * CELL + CELL / 2,
            bottom + 16
        )
        .unwrap();
    }
    for q in 0..rows {
        writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="12" text-anchor="end">{q}</text>"#,
            MARGIN - 6,
            bottom - q * CELL - CELL / 2 + 4
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<line x1="{MARGIN}" y1="{bottom}" x2="{}" y2="{bottom}" stroke="black"/>"#,
        w - MARGIN
    )
    .unwrap();
    writeln!(out, r#"<line x1="{MARGIN}" y1="{bottom}" x2="{MARGIN}" y2="{MARGIN}" stroke="black"/>"#).unwrap();
    out.push_str("</svg>\n");
    out
}

/// Classes with a printed name in the cone chart, with their grid symbols.
pub fn named_classes() -> Vec<(&'static str, GroundElement)> {
    vec![
        ("1", GroundElement::ONE),
        ("ρ", GroundElement::RHO),
        ("τ", GroundElement::TAU),
        ("θ", GroundElement::THETA),
        ("θ/ρ", GroundElement::bottom(1, 0)),
        ("θ/τ", GroundElement::bottom(0, 1)),
    ]
}

fn ground_symbol(d: Bidegree) -> Option<String> {
    let x = GroundElement::basis_at(d);
    if x.is_zero() {
        return None;
    }
    Some(
        named_classes()
            .into_iter()
            .find(|(_, y)| *y == x)
            .map_or("*", |(name, _)| name)
            .to_string(),
    )
}

/// The ground ring on `lo..=hi` in both coordinates: `w` upward, `p` across.
pub fn render_ground_ascii(lo: i64, hi: i64) -> String {
    let mut out = String::new();
    writeln!(out, "H^{{p,w}}(pt; Z/2), p and w in [{lo},{hi}]").unwrap();
    let mut width = 2;
    for p in lo..=hi {
        width = width.max(p.to_string().len());
        for w in lo..=hi {
            if let Some(s) = ground_symbol(Bidegree::new(p, w)) {
                width = width.max(s.chars().count());
            }
        }
    }
    let label_w = lo.to_string().len().max(hi.to_string().len());
    for w in (lo..=hi).rev() {
        let cells: Vec<String> = (lo..=hi)
            .map(|p| pad(&ground_symbol(Bidegree::new(p, w)).unwrap_or_else(|| ".".into()), width))
            .collect();
        writeln!(out, "{} | {}", pad(&w.to_string(), label_w), cells.join(" ")).unwrap();
    }
    let n = (hi - lo + 1).max(0) as usize;
    writeln!(out, "{} +-{}", " ".repeat(label_w), "-".repeat((n * (width + 1)).max(1))).unwrap();
    let labels: Vec<String> = (lo..=hi).map(|p| pad(&p.to_string(), width)).collect();
    writeln!(out, "{}   {}  p", " ".repeat(label_w), labels.join(" ")).unwrap();
    for (symbol, x) in named_classes().into_iter().skip(1) {
        if let Some(d) = x.bidegree().filter(|d| (lo..=hi).contains(&d.p) && (lo..=hi).contains(&d.w)) {
            writeln!(out, "{symbol:>3} = {x} at {d}").unwrap();
        }
    }
    writeln!(out, "  * other nonzero classes, . zero").unwrap();
    out
}

/// The two cones as shaded triangles over the lattice `[lo,hi]^2`.
pub fn render_ground_svg(lo: i64, hi: i64) -> String {
    let step = 32;
    let n = (hi - lo).max(0);
    let size = 2 * MARGIN + n * step;
    let x = |p: i64| MARGIN + (p - lo) * step;
    let y = |w: i64| size - MARGIN - (w - lo) * step;
    let mut out = String::new();
    svg_header(&mut out, size, size);
    let clamp = |v: i64| v.clamp(lo, hi);
    // Positive cone 0 <= p <= w and negative cone p <= 0, w <= p - 2, cut to the window.
    if hi >= 0 {
        let a = clamp(0);
        writeln!(
            out,
            r##"<polygon points="{},{} {},{} {},{}" fill="#9bb7e0" fill-opacity="0.5" stroke="#4a6fa5"/>"##,
            x(a),
            y(a),
            x(a),
            y(hi),
            x(hi),
            y(hi)
        )
        .unwrap();
    }
    if lo <= -2 {
        let top = clamp(-2);
        let left = clamp(lo + 2);
        writeln!(
            out,
            r##"<polygon points="{},{} {},{} {},{}" fill="#e0a39b" fill-opacity="0.5" stroke="#a5584a"/>"##,
            x(0.min(hi)),
            y(top),
            x(0.min(hi)),
            y(lo),
            x(left),
            y(lo)
        )
        .unwrap();
    }
    for p in lo..=hi {
        for w in lo..=hi {
            let d = Bidegree::new(p, w);
            if point_dim(d) == 0 {
                continue;
            }
            writeln!(out, r#"<circle cx="{}" cy="{}" r="3" fill="black"/>"#, x(p), y(w)).unwrap();
            if let Some(name) = ground_symbol(d).filter(|s| s != "*") {
                writeln!(
                    out,
                    r#"<text x="{}" y="{}" font-family="serif" font-size="11">{}</text>"#,
                    x(p) + 5,
                    y(w) - 5,
                    escape(&name)
                )
                .unwrap();
            }
        }
    }
    if (lo..=hi).contains(&0) {
        writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, x(lo), y(0), x(hi), y(0)).unwrap();
        writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, x(0), y(lo), x(0), y(hi)).unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// The orbit ring `F2[t, t^-1]` on the window: a single column at `p = 0`.
pub fn render_orbit_ascii(lo: i64, hi: i64) -> String {
    let mut out = String::new();
    writeln!(out, "H^{{p,w}}(Z/2; Z/2), p and w in [{lo},{hi}]").unwrap();
    let label_w = lo.to_string().len().max(hi.to_string().len());
    for w in (lo..=hi).rev() {
        let cells: Vec<String> = (lo..=hi)
            .map(|p| pad(if p == 0 { "t" } else { "." }, 1))
            .collect();
        let power = if (lo..=hi).contains(&0) { format!("   t^{w}") } else { String::new() };
        writeln!(out, "{} | {}{power}", pad(&w.to_string(), label_w), cells.join(" ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_page_has_axes_only() {
        let text = render_ascii(&Page::new(0, 2, 0, 0));
        assert!(text.contains('+'));
        assert!(!text.contains("Z/2"));
    }

    #[test]
    fn unknown_cells_print_question_marks() {
        let mut page = Page::from_rows(2, 2, &[vec![1, 0], vec![2, 0]]);
        page.set((1, 1), bredon_core::spectra::Cell::unknown());
        let text = render_ascii(&page);
        assert!(text.contains("??"));
        assert!(text.contains("(Z/2)^2"));
        let first_row = text.lines().nth(1).unwrap();
        assert!(first_row.starts_with("1 |"), "{first_row}");
    }

    #[test]
    fn ground_chart_names_the_generators() {
        let text = render_ground_ascii(-5, 5);
        for name in ["ρ = rho", "τ = tau", "θ = theta", "θ/ρ = theta/(rho)", "θ/τ = theta/(tau)"] {
            assert!(text.contains(name), "{name}");
        }
        let svg = render_ground_svg(-5, 5);
        assert_eq!(svg.matches("<polygon").count(), 2);
    }
}
