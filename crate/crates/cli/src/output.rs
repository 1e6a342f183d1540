//! Output envelope: command, config echo, seed, result; rendered as JSON, CSV or text.

use std::time::{SystemTime, UNIX_EPOCH};

use clap::{ArgMatches, Command, ValueEnum};
use serde_json::{json, Map, Value};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Fixed-column table for CSV and text output.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub result: Value,
    pub table: Option<Table>,
}

impl Report {
    pub fn new(result: Value) -> Self {
        Report { result, table: None }
    }

    pub fn with_table(mut self, t: Table) -> Self {
        self.table = Some(t);
        self
    }
}

/// Command path and every argument value, defaults included.
#[derive(Clone, Debug)]
pub struct Echo {
    pub command: String,
    pub config: Map<String, Value>,
}

fn collect(cmd: &Command, m: &ArgMatches, into: &mut Map<String, Value>) {
    let args: Vec<&str> = cmd.get_arguments().map(|a| a.get_id().as_str()).collect();
    for id in m.ids().filter(|id| args.contains(&id.as_str())) {
        let Ok(Some(raw)) = m.try_get_raw(id.as_str()) else { continue };
        let vals: Vec<Value> = raw.map(|v| Value::String(v.to_string_lossy().into_owned())).collect();
        let v = match vals.len() {
            1 => vals.into_iter().next().unwrap(),
            _ => Value::Array(vals),
        };
        into.insert(id.as_str().to_string(), v);
    }
}

pub fn echo(cmd: &Command, matches: &ArgMatches) -> Echo {
    let mut config = Map::new();
    let mut path = Vec::new();
    let (mut c, mut m) = (cmd, matches);
    collect(c, m, &mut config);
    while let Some((name, sub)) = m.subcommand() {
        path.push(name.to_string());
        c = c.find_subcommand(name).expect("matched subcommands exist");
        collect(c, sub, &mut config);
        m = sub;
    }
    config.remove("config");
    Echo { command: path.join(" "), config }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub struct Envelope<'a> {
    pub echo: &'a Echo,
    pub seed: u64,
    pub timestamp: bool,
}

impl Envelope<'_> {
    fn head(&self) -> Map<String, Value> {
        let mut head = Map::new();
        head.insert("command".into(), json!(self.echo.command));
        head.insert("config".into(), Value::Object(self.echo.config.clone()));
        head.insert("seed".into(), json!(self.seed));
        if self.timestamp {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            head.insert("timestamp".into(), json!(secs));
        }
        head
    }

    fn comment_lines(&self, prefix: &str) -> String {
        let mut out = String::new();
        for (k, v) in self.head() {
            if k == "config" {
                let cfg: Vec<String> = self.echo.config.iter().map(|(k, v)| format!("{k}={}", scalar(v))).collect();
                out.push_str(&format!("{prefix}config: {}\n", cfg.join(" ")));
            } else {
                out.push_str(&format!("{prefix}{k}: {}\n", scalar(&v)));
            }
        }
        out
    }

    pub fn render(&self, format: Format, report: &Report) -> String {
        match format {
            Format::Json => {
                let mut head = self.head();
                head.insert("result".into(), report.result.clone());
                let mut s = serde_json::to_string_pretty(&Value::Object(head)).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut out = self.comment_lines("# ");
                match &report.table {
                    Some(t) => {
                        out.push_str(&t.header.join(","));
                        out.push('\n');
                        for row in &t.rows {
                            let cells: Vec<String> = row.iter().map(|c| csv_cell(c)).collect();
                            out.push_str(&cells.join(","));
                            out.push('\n');
                        }
                    }
                    None => {
                        out.push_str("key,value\n");
                        if let Value::Object(map) = &report.result {
                            for (k, v) in map {
                                out.push_str(&format!("{},{}\n", csv_cell(k), csv_cell(&scalar(v))));
                            }
                        }
                    }
                }
                out
            }
            Format::Text => {
                let mut out = self.comment_lines("");
                out.push('\n');
                if let Value::Object(map) = &report.result {
                    let width = map.keys().map(|k| k.len()).max().unwrap_or(0);
                    for (k, v) in map {
                        out.push_str(&format!("{k:<width$}  {}\n", scalar(v)));
                    }
                }
                if let Some(t) = &report.table {
                    out.push('\n');
                    let widths: Vec<usize> = (0..t.header.len())
                        .map(|j| t.rows.iter().map(|r| r[j].len()).chain([t.header[j].len()]).max().unwrap_or(0))
                        .collect();
                    let line = |cells: &[String]| {
                        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
                        padded.join("  ").trim_end().to_string() + "\n"
                    };
                    out.push_str(&line(&t.header));
                    for row in &t.rows {
                        out.push_str(&line(row));
                    }
                }
                out
            }
        }
    }

    /// Structured diagnostic for a failed command.
    pub fn render_error(&self, format: Format, kind: &str, message: &str, detail: Value) -> String {
        let err = json!({ "kind": kind, "message": message, "detail": detail });
        match format {
            Format::Json => {
                let mut head = self.head();
                head.insert("error".into(), err);
                let mut s = serde_json::to_string_pretty(&Value::Object(head)).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut out = self.comment_lines("# ");
                out.push_str("error,message\n");
                out.push_str(&format!("{},{}\n", csv_cell(kind), csv_cell(message)));
                out
            }
            Format::Text => format!("{}\nerror ({kind}): {message}\n", self.comment_lines("")),
        }
    }
}
