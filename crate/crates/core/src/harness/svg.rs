use std::fmt::Write as _;

/// One line of a chart: `(match index, value)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartSeries {
    pub label: String,
    /// Picks the colour; series of the same condition share it.
    pub condition: String,
    pub points: Vec<(u32, f64)>,
}

const W: f64 = 720.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const DASHES: [&str; 4] = ["", "6 3", "2 3", "8 3 2 3"];

fn colour(condition: &str) -> &'static str {
    match condition {
        "genuine" => "#1f77b4",
        "naive" => "#d62728",
        "adaptive" => "#2ca02c",
        _ => "#7f7f7f",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Line chart over match index `1..=n_matches`. Output depends only on the
/// arguments; coordinates are written with two decimals.
pub fn render_chart(title: &str, provenance: &str, n_matches: u32, series: &[ChartSeries]) -> String {
    let plot_w = W - LEFT - RIGHT;
    let plot_h = H - TOP - BOTTOM;
    let values = series.iter().flat_map(|s| s.points.iter().map(|p| p.1));
    let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        (lo, hi) = (lo - pad, hi + pad);
    } else {
        let pad = (hi - lo) * 0.05;
        (lo, hi) = (lo - pad, hi + pad);
    }
    let x_of = |m: u32| {
        if n_matches <= 1 {
            LEFT + plot_w / 2.0
        } else {
            LEFT + plot_w * (m as f64 - 1.0) / (n_matches as f64 - 1.0)
        }
    };
    let y_of = |v: f64| TOP + plot_h * (hi - v) / (hi - lo);

    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(s, "<!-- {} -->", escape(provenance)).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title)).unwrap();

    let (x0, x1, y0, y1) = (LEFT, LEFT + plot_w, TOP, TOP + plot_h);
    writeln!(s, r#"<g stroke="black" stroke-width="1">"#).unwrap();
    writeln!(s, r#"<line x1="{x0:.2}" y1="{y1:.2}" x2="{x1:.2}" y2="{y1:.2}"/>"#).unwrap();
    writeln!(s, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}"/>"#).unwrap();
    writeln!(s, "</g>").unwrap();

    writeln!(s, r#"<g class="x-ticks" text-anchor="middle">"#).unwrap();
    for m in 1..=n_matches {
        let x = x_of(m);
        writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y1:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}">{m}</text>"#,
            y1 + 5.0,
            y1 + 18.0
        )
        .unwrap();
    }
    writeln!(s, "</g>").unwrap();
    writeln!(s, r#"<g class="y-ticks" text-anchor="end">"#).unwrap();
    for i in 0..=4 {
        let v = lo + (hi - lo) * i as f64 / 4.0;
        let y = y_of(v);
        writeln!(
            s,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}">{v:.4}</text>"##,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0
        )
        .unwrap();
    }
    writeln!(s, "</g>").unwrap();
    writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">match</text>"#, (x0 + x1) / 2.0, H - 10.0).unwrap();

    let mut dash_of: Vec<&str> = Vec::new();
    for (i, line) in series.iter().enumerate() {
        let player = line.label.split(' ').next().unwrap_or("");
        let di = match dash_of.iter().position(|p| *p == player) {
            Some(d) => d,
            None => {
                dash_of.push(player);
                dash_of.len() - 1
            }
        };
        let dash = DASHES[di % DASHES.len()];
        let c = colour(&line.condition);
        let mut pts = line.points.clone();
        pts.sort_by_key(|p| p.0);
        let coords: Vec<String> = pts.iter().map(|&(m, v)| format!("{:.2},{:.2}", x_of(m), y_of(v))).collect();
        let dash_attr = if dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{dash}""#)
        };
        writeln!(
            s,
            r#"<polyline class="series" fill="none" stroke="{c}" stroke-width="1.5"{dash_attr} points="{}"/>"#,
            coords.join(" ")
        )
        .unwrap();
        let ly = TOP + 10.0 + 18.0 * i as f64;
        writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{c}" stroke-width="1.5"{dash_attr}/><text x="{:.2}" y="{:.2}">{}</text>"#,
            x1 + 15.0,
            x1 + 40.0,
            x1 + 45.0,
            ly + 4.0,
            escape(&line.label)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}
