//! Text summary and bar chart of an audit report.

use std::fmt::Write;

use pride_core::AuditReport;

pub fn summary(rep: &AuditReport) -> String {
    let mut s = String::new();
    for p in &rep.pairs {
        let top = p.top_driver.as_deref().unwrap_or("-");
        let _ = writeln!(s, "{}: {} -> {} rules, top driver {top}", p.label, p.unbiased.rules, p.biased.rules);
        for r in &p.increments {
            let inc = r.increment.map_or("undefined".to_string(), |x| format!("{x:+.3}"));
            let _ = writeln!(s, "  {:<4} {:>6} {:>6} {inc}", r.attribute, r.unbiased_frequency, r.biased_frequency);
        }
    }
    s
}

const BAR_H: f64 = 14.0;
const WIDTH: f64 = 480.0;
const LEFT: f64 = 60.0;

/// One horizontal bar per attribute and pair, centred on zero increment.
pub fn svg(rep: &AuditReport) -> String {
    let max = rep
        .pairs
        .iter()
        .flat_map(|p| p.increments.iter().filter_map(|r| r.increment))
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(1e-9);
    let rows: usize = rep.pairs.iter().map(|p| p.increments.len() + 2).sum();
    let height = rows as f64 * BAR_H + 10.0;
    let mid = LEFT + WIDTH / 2.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{height}" font-family="monospace" font-size="11">"#,
        LEFT + WIDTH + 10.0
    );
    let mut y = 5.0;
    for p in &rep.pairs {
        let _ = writeln!(s, r#"<text x="2" y="{:.1}">{}</text>"#, y + 11.0, escape(&p.label));
        y += BAR_H;
        for r in &p.increments {
            let _ = writeln!(s, r#"<text x="2" y="{:.1}">{}</text>"#, y + 11.0, escape(&r.attribute));
            if let Some(x) = r.increment {
                let w = x.abs() / max * WIDTH / 2.0;
                let x0 = if x < 0.0 { mid - w } else { mid };
                let fill = if p.top_driver.as_deref() == Some(r.attribute.as_str()) { "#c0392b" } else { "#7f8c8d" };
                let _ = writeln!(
                    s,
                    r#"<rect x="{x0:.1}" y="{:.1}" width="{w:.1}" height="{:.1}" fill="{fill}"/>"#,
                    y + 2.0,
                    BAR_H - 4.0
                );
            }
            y += BAR_H;
        }
        y += BAR_H;
    }
    let _ = writeln!(s, r#"<line x1="{mid}" y1="0" x2="{mid}" y2="{height}" stroke="black"/>"#);
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
