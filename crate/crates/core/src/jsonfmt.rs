//! Decimal rendering for JSON output: every float is written with 17
//! significant digits so that re-parsing reproduces the exact f64 bits and
//! identical inputs produce byte-identical files.

/// Renders `v` as a JSON-compatible number with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders a slice of floats as a JSON array.
pub fn fmt_f64_array(vs: &[f64]) -> String {
    let mut s = String::from("[");
    for (i, v) in vs.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push_str(&fmt_f64(*v));
    }
    s.push(']');
    s
}

/// Escapes a string for embedding in JSON (we only ever emit ASCII names).
pub fn fmt_str(s: &str) -> String {
    let mut out = String::from("\"");
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
