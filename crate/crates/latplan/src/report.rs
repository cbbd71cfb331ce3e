//! CSV tables and number formatting shared by the commands.

use latplan_core::ComplexityReport;

/// `%.12g`: 12 significant digits, trailing zeros trimmed, exponent form
/// outside `[1e-5, 1e12)`.
pub fn fmt_g(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    // Round first, then read the exponent, so 9.9999999999996 becomes 10.
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..DIGITS).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (DIGITS - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn opt_g(x: Option<f64>) -> String {
    x.map(fmt_g).unwrap_or_default()
}

/// Builds a CSV document in memory.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Table { writer }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(cells).expect("in-memory write");
    }

    pub fn finish(self) -> String {
        let bytes = self.writer.into_inner().expect("in-memory flush");
        String::from_utf8(bytes).expect("csv output is utf-8")
    }
}

pub const COMPLEXITY_HEADER: [&str; 12] = [
    "family",
    "d",
    "delta",
    "eps",
    "theta_bar",
    "leading",
    "exact",
    "residual",
    "cc_exact",
    "cc_naive",
    "cc_annuli",
    "zeta",
];

pub fn complexity_csv(rows: &[ComplexityReport]) -> String {
    let mut t = Table::new(&COMPLEXITY_HEADER);
    for r in rows {
        t.row([
            r.family.name().to_string(),
            r.d.to_string(),
            fmt_g(r.delta),
            fmt_g(r.eps),
            fmt_g(r.theta_bar),
            fmt_g(r.leading_sample_term),
            r.exact_count.map(|n| n.to_string()).unwrap_or_default(),
            opt_g(r.residual),
            opt_g(r.cc_exact),
            fmt_g(r.cc_naive_bound),
            fmt_g(r.cc_annuli_leading),
            fmt_g(r.zeta),
        ]);
    }
    t.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format_examples() {
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(1.0), "1");
        assert_eq!(fmt_g(2.5), "2.5");
        assert_eq!(fmt_g(-0.125), "-0.125");
        assert_eq!(fmt_g(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_g(2.0f64.sqrt()), "1.41421356237");
        assert_eq!(fmt_g(123456.0), "123456");
        assert_eq!(fmt_g(1e12), "1e+12");
        assert_eq!(fmt_g(1.5e-7), "1.5e-07");
        assert_eq!(fmt_g(0.0001), "0.0001");
        assert_eq!(fmt_g(9.9999999999996), "10");
        assert_eq!(opt_g(None), "");
    }

    #[test]
    fn csv_quotes_nothing_for_plain_cells() {
        let mut t = Table::new(&["a", "b"]);
        t.row(["1", ""]);
        assert_eq!(t.finish(), "a,b\n1,\n");
    }
}
