use std::io::IsTerminal;

use ellgenus_core::arith::rational_display;
use ellgenus_core::{QXSeries, Rational, Q_UNIT};
use num_traits::{One, Signed, Zero};

/// `1 + 240q + 2160q^2`, zero terms skipped.
pub fn q_polynomial(coeffs: &[Rational]) -> String {
    let mut out = String::new();
    for (n, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let var = match n {
            0 => String::new(),
            1 => "q".to_string(),
            _ => format!("q^{n}"),
        };
        let body = if n > 0 && mag.is_one() {
            var
        } else if mag.is_integer() || n == 0 {
            format!("{}{var}", rational_display(&mag))
        } else {
            format!("({}){var}", rational_display(&mag))
        };
        match (out.is_empty(), c.is_negative()) {
            (true, false) => out.push_str(&body),
            (true, true) => out.push_str(&format!("-{body}")),
            (false, false) => out.push_str(&format!(" + {body}")),
            (false, true) => out.push_str(&format!(" - {body}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn q_label(n: i64) -> String {
    if n % Q_UNIT == 0 {
        format!("q^{}", n / Q_UNIT)
    } else {
        format!("q^({n}/{Q_UNIT})")
    }
}

/// One line per nonzero q-power, then the truncation order.
pub fn series_lines(s: &QXSeries) -> Vec<String> {
    let mut out: Vec<String> = s.terms().map(|(n, c)| format!("{}: {c}", q_label(n))).collect();
    out.push(format!("O({})", q_label(s.cut())));
    out
}

pub fn color_enabled() -> bool {
    std::env::var_os("NO_COLOR").is_none() && std::io::stdout().is_terminal()
}

pub fn status(pass: bool) -> String {
    let word = if pass { "PASS" } else { "FAIL" };
    if !color_enabled() {
        return word.to_string();
    }
    let code = if pass { 32 } else { 31 };
    format!("\x1b[{code}m{word}\x1b[0m")
}
