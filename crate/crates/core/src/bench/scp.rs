//! The `.scp` profile file format.
//!
//! ```text
//! m n
//! <n lines: a permutation of 0..m-1, most preferred first>
//! order: i0 i1 ... i(n-1)        (optional single-crossing certificate)
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::domain::{Preference, Profile, VoterOrdering};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

fn numbers(line: usize, text: &str) -> Result<Vec<usize>, ParseError> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| err(line, format!("expected a non-negative integer, found {t:?}")))
        })
        .collect()
}

pub fn serialize(p: &Profile) -> String {
    let mut out = format!("{} {}\n", p.num_candidates(), p.num_voters());
    for pref in p.preferences() {
        let line: Vec<String> = pref.order().iter().map(|c| c.0.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    if let Some(o) = p.certificate() {
        out.push_str("order:");
        for v in o.voters() {
            let _ = write!(out, " {}", v.0);
        }
        out.push('\n');
    }
    out
}

pub fn parse(text: &str) -> Result<Profile, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or_else(|| err(1, "missing header `m n`"))?;
    let dims = numbers(hline, header)?;
    let [m, n] = dims[..] else {
        return Err(err(hline, "header must be `m n`"));
    };
    if m == 0 || n == 0 {
        return Err(err(hline, "m and n must be positive"));
    }
    let mut prefs = Vec::with_capacity(n);
    for k in 0..n {
        let (line, text) = lines
            .next()
            .ok_or_else(|| err(hline + k + 1, format!("expected {n} votes, found {k}")))?;
        if text.starts_with("order:") {
            return Err(err(line, format!("expected {n} votes, found {k}")));
        }
        let order = numbers(line, text)?;
        if order.len() != m {
            return Err(err(line, format!("vote has {} candidates, expected {m}", order.len())));
        }
        prefs.push(Preference::from_indices(&order).map_err(|e| err(line, e.to_string()))?);
    }
    let profile = Profile::new(m, prefs).map_err(|e| err(hline, e.to_string()))?;
    match lines.next() {
        None => Ok(profile),
        Some((line, text)) => {
            let rest = text
                .strip_prefix("order:")
                .ok_or_else(|| err(line, "unexpected trailing content"))?;
            let order = VoterOrdering::from_indices(&numbers(line, rest)?)
                .map_err(|e| err(line, e.to_string()))?;
            if let Some((extra, _)) = lines.next() {
                return Err(err(extra, "unexpected trailing content"));
            }
            profile
                .with_certificate(order)
                .map_err(|e| err(line, e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::gen_single_crossing;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn round_trip(m in 1usize..8, n in 1usize..15, seed in any::<u64>(), cert in any::<bool>()) {
            let (p, _) = gen_single_crossing(m, n, seed, false).unwrap();
            let p = if cert { p } else { p.without_certificate() };
            prop_assert_eq!(parse(&serialize(&p)).unwrap(), p);
        }
    }

    #[test]
    fn exact_text() {
        let p = Profile::new(
            3,
            vec![Preference::identity(3), Preference::from_indices(&[1, 0, 2]).unwrap()],
        )
        .unwrap()
        .with_certificate(VoterOrdering::identity(2))
        .unwrap();
        assert_eq!(serialize(&p), "3 2\n0 1 2\n1 0 2\norder: 0 1\n");
    }

    #[test]
    fn reports_line_numbers() {
        assert_eq!(parse("3 2\n0 1 2\n0 0 2\n").unwrap_err().line, 3);
        assert_eq!(parse("3 2\n0 1 2\n").unwrap_err().line, 3);
        assert_eq!(parse("3 x\n").unwrap_err().line, 1);
        assert_eq!(parse("2 1\n0 1\norder: 0 0\n").unwrap_err().line, 3);
        assert_eq!(parse("2 1\n0 1\nbogus\n").unwrap_err().line, 3);
        assert_eq!(parse("2 1\n0 1 2\n").unwrap_err().line, 2);
        assert_eq!(parse("").unwrap_err().line, 1);
    }
}
