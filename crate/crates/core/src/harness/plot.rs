//! Static SVG line charts from CSV columns.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::HarnessError;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 56.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub type Series = Vec<(String, Vec<(f64, f64)>)>;

/// Groups `(x, y)` pairs by the optional `group` column. Rows with an empty
/// or non-numeric value in either column are skipped.
pub fn series_from_csv(text: &str, x: &str, y: &str, group: Option<&str>) -> Result<Series, HarnessError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(|e| HarnessError::Io(e.to_string()))?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| HarnessError::Io(format!("no column `{name}`")))
    };
    let (xi, yi) = (col(x)?, col(y)?);
    let gi = group.map(col).transpose()?;
    let mut out: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| HarnessError::Io(e.to_string()))?;
        let (Ok(xv), Ok(yv)) = (rec[xi].parse::<f64>(), rec[yi].parse::<f64>()) else {
            continue;
        };
        if !xv.is_finite() || !yv.is_finite() {
            continue;
        }
        let g = gi.map_or_else(|| y.to_string(), |g| rec[g].to_string());
        out.entry(g).or_default().push((xv, yv));
    }
    Ok(out
        .into_iter()
        .map(|(k, mut v)| {
            v.sort_by(|a, b| a.0.total_cmp(&b.0));
            (k, v)
        })
        .collect())
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn line_chart(series: &Series, title: &str, x_label: &str, y_label: &str, log_x: bool) -> String {
    let tx = |v: f64| if log_x { v.max(f64::MIN_POSITIVE).log2() } else { v };
    let pts = series.iter().flat_map(|(_, v)| v.iter());
    let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(tx(x));
        x1 = x1.max(tx(x));
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y1) = (0.0, 1.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    let y0 = 0.0;
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| PAD + (tx(x) - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#, W / 2.0, esc(title)).unwrap();
    writeln!(
        s,
        r#"<path d="M{PAD} {PAD} V{} H{}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD
    )
    .unwrap();
    for k in 0..=4 {
        let yv = y0 + (y1 - y0) * k as f64 / 4.0;
        let xv = x0 + (x1 - x0) * k as f64 / 4.0;
        let xlab = if log_x { 2f64.powf(xv) } else { xv };
        writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{:.3}</text>"#, PAD - 6.0, sy(yv) + 4.0, yv).unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            PAD + (W - 2.0 * PAD) * k as f64 / 4.0,
            H - PAD + 16.0,
            trim(xlab)
        )
        .unwrap();
    }
    writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, esc(x_label)).unwrap();
    writeln!(
        s,
        r#"<text x="14" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        esc(y_label)
    )
    .unwrap();
    for (i, (name, v)) in series.iter().enumerate() {
        let c = COLORS[i % COLORS.len()];
        let d: Vec<String> = v.iter().map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y))).collect();
        writeln!(s, r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="2"/>"#, d.join(" ")).unwrap();
        for &(x, y) in v {
            writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{c}"/>"#, sx(x), sy(y)).unwrap();
        }
        writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{c}">{}</text>"#,
            W - PAD + 4.0 - 120.0,
            PAD + 16.0 * i as f64,
            esc(name)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn trim(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v:.2}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_from_csv() {
        let csv = "m,ratio,algo\n4,1.5,a\n16,2,a\n64,2.5,a\n4,1,b\n16,,b\n";
        let s = series_from_csv(csv, "m", "ratio", Some("algo")).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].1, vec![(4.0, 1.5), (16.0, 2.0), (64.0, 2.5)]);
        assert_eq!(s[1].1, vec![(4.0, 1.0)]);
        let svg = line_chart(&s, "ratio vs m", "m", "ratio", true);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(series_from_csv(csv, "m", "nope", None).is_err());
    }
}
