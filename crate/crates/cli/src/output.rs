//! Shared machine-readable output helpers for `--format csv|record`.

use crate::Format;

/// Prints a table either as CSV (header + rows) or as `key: value`
/// records separated by blank lines.
pub fn print_table(format: Format, header: &[&str], rows: &[Vec<String>]) {
    match format {
        Format::Csv => {
            println!("{}", header.join(","));
            for row in rows {
                println!("{}", row.join(","));
            }
        }
        Format::Record => {
            for (i, row) in rows.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                for (name, value) in header.iter().zip(row) {
                    println!("{name}: {value}");
                }
            }
        }
    }
}

/// Formats a float without trailing noise ("1" stays "1", "0.5" stays
/// "0.5").
pub fn num(value: f64) -> String {
    if value == value.trunc() && value.abs() < 1e15 {
        format!("{}", value as i64)
    } else {
        format!("{value}")
    }
}
