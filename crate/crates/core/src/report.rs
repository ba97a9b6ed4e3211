//! Versioned JSON envelope shared by every report.

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: &'a str,
    pub seed: Option<u64>,
    pub result: &'a T,
}

/// Pretty JSON with a trailing newline. Field order is fixed by the types, so
/// equal inputs give byte-identical output.
pub fn to_json<T: Serialize>(command: &str, seed: Option<u64>, result: &T) -> String {
    let env = Envelope { schema_version: SCHEMA_VERSION, tool_version: TOOL_VERSION, command, seed, result };
    let mut s = serde_json::to_string_pretty(&env).expect("reports serialize");
    s.push('\n');
    s
}

/// `# key: value` comment lines stamped at the top of CSV output.
pub fn csv_header(command: &str, seed: Option<u64>) -> String {
    let seed = seed.map_or_else(|| "none".to_string(), |s| s.to_string());
    format!("# schema_version: {SCHEMA_VERSION}\n# tool_version: {TOOL_VERSION}\n# command: {command}\n# seed: {seed}\n")
}

/// Inserts the same stamp as an XML comment after the opening `<svg>` tag.
pub fn stamp_svg(svg: &str, command: &str, seed: Option<u64>) -> String {
    let seed = seed.map_or_else(|| "none".to_string(), |s| s.to_string());
    let comment = format!(
        "<!-- schema_version: {SCHEMA_VERSION}; tool_version: {TOOL_VERSION}; command: {command}; seed: {seed} -->\n"
    );
    match svg.find('\n') {
        Some(i) => format!("{}{}{}", &svg[..=i], comment, &svg[i + 1..]),
        None => format!("{svg}\n{comment}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_fields() {
        let s = to_json("birch", Some(7), &vec![1.0, 2.0]);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["seed"], 7);
        assert_eq!(v["result"][1], 2.0);
        assert_eq!(s, to_json("birch", Some(7), &vec![1.0, 2.0]));
    }

    #[test]
    fn stamps() {
        assert!(csv_header("simulate", None).contains("# seed: none"));
        let svg = stamp_svg("<svg>\n</svg>\n", "scan", Some(1));
        assert!(svg.starts_with("<svg>\n<!-- schema_version"));
    }
}
