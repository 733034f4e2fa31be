//! Deterministic CSV formatting: `.` decimal separator, `,` field separator,
//! LF line endings, mandatory header, 17 significant digits.

/// One float at full round-trip precision (17 significant digits).
pub fn format_g17(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Assemble a CSV table from a header and numeric rows.
pub fn csv_table<I>(header: &str, rows: I) -> String
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let fields: Vec<String> = row.iter().map(|&x| format_g17(x)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_round_trips() {
        for x in [0.1, -3.5e-7, 1.0 / 3.0, 123456.789, 5e-324] {
            let s = format_g17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "round trip failed for {s}");
        }
    }

    #[test]
    fn table_layout() {
        let s = csv_table("a,b", vec![vec![1.0, 2.0]]);
        assert_eq!(s, "a,b\n1.0000000000000000e0,2.0000000000000000e0\n");
    }
}
