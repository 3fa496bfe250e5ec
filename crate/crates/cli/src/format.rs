//! Number rendering and CSV output.

use std::fmt::Write as _;

/// `v` rounded to 15 significant digits.
pub fn round15(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.14e}").parse().expect("formatted float parses")
}

/// Shortest decimal that reads back as [`round15`]`(v)`.
pub fn fmt15(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    let r = round15(v);
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

/// Header line plus one line per row, each terminated by a single newline.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt15).collect();
        writeln!(out, "{}", cells.join(",")).expect("writing to a String");
    }
    out
}
