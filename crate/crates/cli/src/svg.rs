//! Dependency-free SVG line chart for the entropy sweep.

/// Renders (p, estimate, stderr) rows as a line with a shaded error band.
/// Output is a self-contained SVG document with deterministic formatting.
pub fn sweep_chart(rows: &[(f64, f64, f64)], title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const ML: f64 = 60.0; // left margin
    const MR: f64 = 20.0;
    const MT: f64 = 40.0;
    const MB: f64 = 50.0;
    let y_max = rows
        .iter()
        .map(|(_, e, se)| e + 2.0 * se)
        .fold(0.0f64, f64::max)
        .max(1e-9)
        * 1.05;
    let x = |p: f64| ML + p * (W - ML - MR);
    let y = |v: f64| H - MB - (v / y_max) * (H - MT - MB);
    let fmt = |v: f64| format!("{v:.4}");
    let path_of = |pts: &mut dyn Iterator<Item = (f64, f64)>| {
        pts.map(|(px, py)| format!("{},{}", fmt(px), fmt(py)))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let line = path_of(&mut rows.iter().map(|&(p, e, _)| (x(p), y(e))));
    let band = {
        let upper = rows.iter().map(|&(p, e, se)| (x(p), y(e + 2.0 * se)));
        let lower = rows.iter().rev().map(|&(p, e, se)| (x(p), y((e - 2.0 * se).max(0.0))));
        path_of(&mut upper.chain(lower))
    };

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{title}</text>\n",
        W / 2.0
    ));
    // Axes.
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(ML), fmt(MT), fmt(ML), fmt(H - MB)
    ));
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(ML), fmt(H - MB), fmt(W - MR), fmt(H - MB)
    ));
    for i in 0..=5 {
        let p = i as f64 / 5.0;
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{p:.1}</text>\n",
            fmt(x(p)), fmt(H - MB + 18.0)
        ));
        let v = y_max * p;
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{v:.3}</text>\n",
            fmt(ML - 6.0), fmt(y(v) + 4.0)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">p</text>\n",
        fmt((ML + W - MR) / 2.0), fmt(H - 12.0)
    ));
    out.push_str(&format!("<polygon points=\"{band}\" fill=\"#aec6e8\" fill-opacity=\"0.5\"/>\n"));
    out.push_str(&format!(
        "<polyline points=\"{line}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n"
    ));
    for &(p, e, _) in rows {
        out.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"#1f77b4\"/>\n",
            fmt(x(p)), fmt(y(e))
        ));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_is_deterministic_and_well_formed() {
        let rows = vec![(0.0, 0.1, 0.01), (0.5, 0.3, 0.02), (1.0, 0.55, 0.01)];
        let a = sweep_chart(&rows, "t");
        let b = sweep_chart(&rows, "t");
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
        assert_eq!(a.matches("<circle").count(), 3);
    }
}
