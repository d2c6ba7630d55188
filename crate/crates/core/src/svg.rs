//! Self-contained SVG heatmaps of sweep matrices.

use std::fmt::Write;

use crate::io::SweepMatrix;

const STOPS: [(f64, f64, f64); 9] = [
    (68.0, 1.0, 84.0),
    (71.0, 44.0, 122.0),
    (59.0, 81.0, 139.0),
    (44.0, 113.0, 142.0),
    (33.0, 144.0, 141.0),
    (39.0, 173.0, 129.0),
    (92.0, 200.0, 99.0),
    (170.0, 220.0, 50.0),
    (253.0, 231.0, 37.0),
];

/// Perceptually ordered dark-blue to yellow ramp, `x ∈ [0, 1]`.
pub fn color(x: f64) -> String {
    if !x.is_finite() {
        return "#bbbbbb".into();
    }
    let x = x.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (x.floor() as usize).min(STOPS.len() - 2);
    let f = x - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let mix = |p: f64, q: f64| (p + f * (q - p)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn range(m: &SweepMatrix) -> (f64, f64) {
    let finite = m.values.iter().flatten().copied().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if lo > hi {
        (0.0, 1.0)
    } else if hi - lo < 1e-300 {
        (lo, lo + 1.0)
    } else {
        (lo, hi)
    }
}

/// Rows are Γ (top = largest), columns are samples; the λ axis is labelled
/// separately on the up and down branches.
pub fn heatmap(m: &SweepMatrix, title: &str) -> String {
    let (cell_w, cell_h) = (2.0, 24.0);
    let cols = m.lambdas.len().max(1);
    let rows = m.gammas.len().max(1);
    let (left, top) = (70.0, 40.0);
    let (w, h) = (cols as f64 * cell_w, rows as f64 * cell_h);
    let (lo, hi) = range(m);
    let mut s = String::new();
    let total_w = left + w + 110.0;
    let total_h = top + h + 60.0;
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{total_h}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<text x="{left}" y="20" font-size="14">{title}</text>"#);
    let mut order: Vec<usize> = (0..m.gammas.len()).collect();
    order.sort_by(|&a, &b| m.gammas[b].total_cmp(&m.gammas[a]));
    for (r, &gi) in order.iter().enumerate() {
        let y = top + r as f64 * cell_h;
        for (c, v) in m.values[gi].iter().enumerate() {
            let x = left + c as f64 * cell_w;
            let fill = color((v - lo) / (hi - lo));
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{y}" width="{cell_w}" height="{cell_h}" fill="{fill}"/>"#
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            left - 6.0,
            y + cell_h * 0.65,
            m.gammas[gi]
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" transform="rotate(-90 14 {})">Γ = log₂ v</text>"#,
        top + h / 2.0,
        top + h / 2.0
    );
    // λ ticks: 0, 0.5, 1 on the way up and 0.5, 0 on the way down
    let turn = m
        .lambdas
        .iter()
        .enumerate()
        .fold(0, |b, (i, &l)| if l > m.lambdas[b] { i } else { b });
    let mut ticks = Vec::new();
    for target in [0.0, 0.5, 1.0] {
        if let Some(i) = nearest(&m.lambdas[..=turn.min(cols - 1)], target) {
            ticks.push((i, target));
        }
    }
    if turn + 1 < m.lambdas.len() {
        for target in [0.5, 0.0] {
            if let Some(i) = nearest(&m.lambdas[turn + 1..], target) {
                ticks.push((turn + 1 + i, target));
            }
        }
    }
    for (i, l) in ticks {
        let x = left + (i as f64 + 0.5) * cell_w;
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="black"/><text x="{x}" y="{}" text-anchor="middle">{l}</text>"#,
            top + h,
            top + h + 5.0,
            top + h + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">λ(t): up branch | down branch</text>"#,
        left + w / 2.0,
        top + h + 40.0
    );
    let bar_x = left + w + 20.0;
    let steps = 50;
    for k in 0..steps {
        let f = 1.0 - k as f64 / (steps - 1) as f64;
        let y = top + k as f64 * h / steps as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{bar_x}" y="{y}" width="16" height="{}" fill="{}"/>"#,
            h / steps as f64 + 0.5,
            color(f)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}">{hi:.3}</text><text x="{}" y="{}">{lo:.3}</text>"#,
        bar_x + 20.0,
        top + 10.0,
        bar_x + 20.0,
        top + h
    );
    s.push_str("</svg>\n");
    s
}

fn nearest(xs: &[f64], target: f64) -> Option<usize> {
    xs.iter()
        .enumerate()
        .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
        .map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colormap_endpoints_and_monotone_luminance() {
        assert_eq!(color(0.0), "#440154");
        assert_eq!(color(1.0), "#fde725");
        assert_eq!(color(f64::NAN), "#bbbbbb");
        let lum = |c: &str| {
            let v = |i| u8::from_str_radix(&c[i..i + 2], 16).unwrap() as f64;
            0.2126 * v(1) + 0.7152 * v(3) + 0.0722 * v(5)
        };
        let ls: Vec<f64> = (0..=20).map(|i| lum(&color(i as f64 / 20.0))).collect();
        assert!(ls.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn heatmap_has_one_rect_per_cell() {
        let m = SweepMatrix {
            column: "schmidt_gap".into(),
            lambdas: vec![0.0, 0.5, 1.0, 0.5, 0.0],
            gammas: vec![-2.0, -1.0],
            values: vec![vec![1.0, 0.5, 0.0, 0.5, 1.0], vec![f64::NAN; 5]],
        };
        let svg = heatmap(&m, "gap");
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<rect").count(), 10 + 50);
        assert!(svg.contains("#bbbbbb"));
    }
}
