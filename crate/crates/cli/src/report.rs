//! Reports: per-command results with certification windows, and their
//! deterministic renderings.
//! - every numeric vector carries `valid_to`; entries past it are printed
//!   only together with an evidence note
//! - rendering is a pure function of the report, so identical jobs yield
//!   byte-identical output in every format
//! - the json-lines form round-trips through `parse_json_lines`

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA: u32 = 1;

/// Outcome of one command, ordered from best to worst for aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// an asserted identity or equivalence checked out
    Verified,
    /// an informational quantity was computed; nothing was asserted
    Computed,
    /// the window or truncation was too short to decide
    Inconclusive,
    /// a definitive counterexample or failed identity
    Refuted,
    /// an internal failure that validation should have caught
    Error,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Verified => "verified",
            Verdict::Computed => "computed",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Refuted => "refuted",
            Verdict::Error => "error",
        }
    }
}

/// A numeric vector with its certification window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedVector {
    pub label: String,
    pub values: Vec<usize>,
    /// last index backed by exact arithmetic within the window
    pub valid_to: usize,
    /// present exactly when entries past valid_to are included
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence: Option<String>,
}

impl AnnotatedVector {
    pub fn certified(label: impl Into<String>, values: Vec<usize>) -> AnnotatedVector {
        let valid_to = values.len().saturating_sub(1);
        AnnotatedVector { label: label.into(), values, valid_to, evidence: None }
    }

    pub fn windowed(
        label: impl Into<String>,
        values: Vec<usize>,
        valid_to: usize,
        note: &str,
    ) -> AnnotatedVector {
        let evidence =
            (valid_to + 1 < values.len()).then(|| format!("entries past index {valid_to}: {note}"));
        AnnotatedVector { label: label.into(), values, valid_to, evidence }
    }
}

/// A rendered matrix: polynomial or scalar entries as strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub label: String,
    pub entries: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandResult {
    pub command: String,
    pub target: String,
    pub verdict: Verdict,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vectors: Vec<AnnotatedVector>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub matrices: Vec<NamedMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub status: Verdict,
    pub results: Vec<CommandResult>,
}

impl Report {
    /// Aggregate result verdicts: worst one wins, computed counts as passed.
    pub fn assemble(results: Vec<CommandResult>) -> Report {
        let status = results
            .iter()
            .map(|r| r.verdict)
            .max()
            .map_or(Verdict::Verified, |v| if v == Verdict::Computed { Verdict::Verified } else { v });
        Report { schema: SCHEMA, status, results }
    }

    /// Process exit code: 0 passed, 1 refuted, 2 inconclusive, 3 error.
    pub fn exit_code(&self) -> u8 {
        match self.status {
            Verdict::Verified | Verdict::Computed => 0,
            Verdict::Refuted => 1,
            Verdict::Inconclusive => 2,
            Verdict::Error => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    JsonLines,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Format, String> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json-lines" => Ok(Format::JsonLines),
            other => Err(format!("unknown format '{other}'; use table, csv, or json-lines")),
        }
    }
}

#[derive(Debug, Error)]
pub enum ReportParseError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("missing header line")]
    MissingHeader,
}

/// Header carries everything except the per-line results.
#[derive(Serialize, Deserialize)]
struct Header {
    schema: u32,
    status: Verdict,
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Table => render_table(report),
        Format::Csv => render_csv(report),
        Format::JsonLines => render_json_lines(report),
    }
}

fn render_json_lines(report: &Report) -> String {
    let mut out = String::new();
    let header = Header { schema: report.schema, status: report.status };
    out.push_str(&serde_json::to_string(&header).expect("header serializes"));
    out.push('\n');
    for r in &report.results {
        out.push_str(&serde_json::to_string(r).expect("result serializes"));
        out.push('\n');
    }
    out
}

/// Inverse of the json-lines rendering.
pub fn parse_json_lines(text: &str) -> Result<Report, ReportParseError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or(ReportParseError::MissingHeader)?;
    let header: Header = serde_json::from_str(first)
        .map_err(|e| ReportParseError::Line { line: 1, msg: e.to_string() })?;
    let mut results = Vec::new();
    for (i, line) in lines {
        let r: CommandResult = serde_json::from_str(line)
            .map_err(|e| ReportParseError::Line { line: i + 1, msg: e.to_string() })?;
        results.push(r);
    }
    Ok(Report { schema: header.schema, status: header.status, results })
}

fn render_table(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!("schema {}\nstatus {}\n", report.schema, report.status.as_str()));
    for r in &report.results {
        out.push_str(&format!("\n== {} {}: {}\n", r.command, r.target, r.verdict.as_str()));
        if !r.detail.is_empty() {
            out.push_str(&format!("   {}\n", r.detail));
        }
        for v in &r.vectors {
            out.push_str(&format!("   {} (valid through n = {})\n", v.label, v.valid_to));
            for (n, value) in v.values.iter().enumerate() {
                let mark = if n > v.valid_to { " *" } else { "" };
                out.push_str(&format!("     {n:>4}  {value}{mark}\n"));
            }
            if let Some(e) = &v.evidence {
                out.push_str(&format!("     * {e}\n"));
            }
        }
        for m in &r.matrices {
            out.push_str(&format!("   {}\n", m.label));
            let widths: Vec<usize> = (0..m.entries.first().map_or(0, |row| row.len()))
                .map(|j| m.entries.iter().map(|row| row[j].len()).max().unwrap_or(0))
                .collect();
            for row in &m.entries {
                let cells: Vec<String> =
                    row.iter().zip(&widths).map(|(e, w)| format!("{e:>w$}")).collect();
                out.push_str(&format!("     [ {} ]\n", cells.join("  ")));
            }
        }
    }
    out
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_csv(report: &Report) -> String {
    let mut out = String::from("command,target,kind,label,i,j,value,window,note\n");
    for r in &report.results {
        out.push_str(&format!(
            "{},{},verdict,,,,{},,{}\n",
            csv_quote(&r.command),
            csv_quote(&r.target),
            r.verdict.as_str(),
            csv_quote(&r.detail)
        ));
        for v in &r.vectors {
            for (n, value) in v.values.iter().enumerate() {
                let note = if n > v.valid_to { "evidence" } else { "" };
                out.push_str(&format!(
                    "{},{},vector,{},{},,{},{},{}\n",
                    csv_quote(&r.command),
                    csv_quote(&r.target),
                    csv_quote(&v.label),
                    n,
                    value,
                    v.valid_to,
                    note
                ));
            }
        }
        for m in &r.matrices {
            for (i, row) in m.entries.iter().enumerate() {
                for (j, entry) in row.iter().enumerate() {
                    out.push_str(&format!(
                        "{},{},matrix,{},{},{},{},,\n",
                        csv_quote(&r.command),
                        csv_quote(&r.target),
                        csv_quote(&m.label),
                        i,
                        j,
                        csv_quote(entry)
                    ));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report::assemble(vec![
            CommandResult {
                command: "hf-local".into(),
                target: "m".into(),
                verdict: Verdict::Computed,
                detail: "non-decreasing on the window".into(),
                vectors: vec![AnnotatedVector::windowed(
                    "H",
                    vec![1, 3, 4, 5, 5, 6],
                    4,
                    "truncation evidence only",
                )],
                matrices: vec![NamedMatrix {
                    label: "alpha".into(),
                    entries: vec![vec!["1".into(), "0".into()], vec!["0".into(), "1".into()]],
                }],
            },
            CommandResult {
                command: "mf-check".into(),
                target: "node".into(),
                verdict: Verdict::Verified,
                detail: String::new(),
                vectors: vec![],
                matrices: vec![],
            },
        ])
    }

    #[test]
    fn aggregation_takes_the_worst_verdict() {
        let mut r = sample();
        assert_eq!(r.status, Verdict::Verified);
        assert_eq!(r.exit_code(), 0);
        r.results[0].verdict = Verdict::Inconclusive;
        let r = Report::assemble(r.results);
        assert_eq!((r.status, r.exit_code()), (Verdict::Inconclusive, 2));
        let mut worse = r.results;
        worse[1].verdict = Verdict::Refuted;
        let r = Report::assemble(worse);
        assert_eq!((r.status, r.exit_code()), (Verdict::Refuted, 1));
    }

    #[test]
    fn hilbert_vector_renders_one_table_row_per_degree() {
        let text = render(&sample(), Format::Table);
        for (n, h) in [1, 3, 4, 5, 5, 6].iter().enumerate() {
            assert!(text.contains(&format!("{n:>4}  {h}")), "missing row {n}: {text}");
        }
        assert!(text.contains("6 *"), "uncertified tail must be marked: {text}");
        assert!(text.contains("entries past index 4"), "{text}");
    }

    #[test]
    fn empty_report_renders_header_only() {
        let r = Report::assemble(vec![]);
        assert_eq!(render(&r, Format::Table), "schema 1\nstatus verified\n");
        assert_eq!(render(&r, Format::Csv).lines().count(), 1);
        assert_eq!(render(&r, Format::JsonLines).lines().count(), 1);
    }

    #[test]
    fn json_lines_round_trip_is_exact() {
        let r = sample();
        let text = render(&r, Format::JsonLines);
        let back = parse_json_lines(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(render(&back, Format::JsonLines), text);
    }

    #[test]
    fn csv_marks_uncertified_entries() {
        let text = render(&sample(), Format::Csv);
        assert!(text.contains("hf-local,m,vector,H,5,,6,4,evidence"), "{text}");
        assert!(text.contains("hf-local,m,vector,H,4,,5,4,\n"), "{text}");
    }

    #[test]
    fn rendering_is_deterministic() {
        let r = sample();
        for f in [Format::Table, Format::Csv, Format::JsonLines] {
            assert_eq!(render(&r, f), render(&r, f));
        }
    }
}
