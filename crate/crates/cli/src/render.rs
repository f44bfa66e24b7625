//! Output rendering: aligned text tables or comma-delimited rows, with
//! probabilities at 4 decimal places (the reporting convention) or full
//! round-trip precision.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// Fixed decimal places.
    Digits(usize),
    /// Shortest representation that round-trips the f64 exactly.
    Full,
}

impl std::str::FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("full") {
            return Ok(Precision::Full);
        }
        s.parse::<usize>()
            .map(Precision::Digits)
            .map_err(|_| format!("precision must be a digit count or `full`, got {s:?}"))
    }
}

pub fn fmt_float(value: f64, precision: Precision) -> String {
    match precision {
        Precision::Digits(d) => format!("{value:.d$}"),
        Precision::Full => format!("{value}"),
    }
}

pub fn render_delimited(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn render_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut push_row = |cells: &[String]| {
        let line: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    };
    push_row(header);
    for row in rows {
        push_row(row);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_parsing() {
        assert_eq!("4".parse::<Precision>().unwrap(), Precision::Digits(4));
        assert_eq!("full".parse::<Precision>().unwrap(), Precision::Full);
        assert!("x".parse::<Precision>().is_err());
    }

    #[test]
    fn full_precision_round_trips() {
        let v = 0.016_969_949_652_566_416_f64;
        let s = fmt_float(v, Precision::Full);
        assert_eq!(s.parse::<f64>().unwrap(), v);
    }

    #[test]
    fn table_alignment() {
        let header = vec!["a".to_string(), "label".to_string()];
        let rows = vec![vec!["10".to_string(), "x".to_string()]];
        let table = render_table(&header, &rows);
        assert_eq!(table, " a  label\n10      x\n");
    }
}
