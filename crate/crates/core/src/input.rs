//! Text input for FIB construction.
//!
//! One entry per line: a hex-encoded name, whitespace, and a decimal action.
//! Blank lines and lines starting with `#` are skipped.
//!
//! ```
//! let pairs = concise::input::parse_pairs("# mac  port\n0a1b2c3d4e5f 3\n\n001122334455 0\n").unwrap();
//! assert_eq!(pairs.len(), 2);
//! assert_eq!(pairs[0].1, 3);
//! ```

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::name::Name;

/// Parses every entry in `text`. Duplicate names are rejected with the line
/// number of the second occurrence.
pub fn parse_pairs(text: &str) -> Result<Vec<(Name, u64)>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let Some((name, action)) = parse_line(raw, line)? else {
            continue;
        };
        if !seen.insert(name.clone()) {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate name {name}"),
            });
        }
        out.push((name, action));
    }
    Ok(out)
}

/// Parses a single line; `Ok(None)` for blanks and comments.
pub fn parse_line(raw: &str, line: usize) -> Result<Option<(Name, u64)>> {
    let trimmed = raw.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let mut fields = trimmed.split_whitespace();
    let (Some(name), Some(action), None) = (fields.next(), fields.next(), fields.next()) else {
        return Err(Error::Parse {
            line,
            msg: "expected `<hex-name> <action>`".into(),
        });
    };
    let name = Name::from_hex(name).map_err(|e| Error::Parse {
        line,
        msg: e.to_string(),
    })?;
    let action = action.parse::<u64>().map_err(|e| Error::Parse {
        line,
        msg: format!("action {action:?}: {e}"),
    })?;
    Ok(Some((name, action)))
}

/// Inverse of [`parse_pairs`].
pub fn format_pairs<'a, I>(pairs: I) -> String
where
    I: IntoIterator<Item = (&'a Name, u64)>,
{
    let mut out = String::new();
    for (name, action) in pairs {
        out.push_str(&name.to_hex());
        out.push(' ');
        out.push_str(&action.to_string());
        out.push('\n');
    }
    out
}
