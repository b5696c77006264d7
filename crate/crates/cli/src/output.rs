use hyperlat::Error;
use serde_json::Value;

use crate::args::Format;

/// A command result in every output format.
pub struct Output {
    scalar: Option<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    json: Value,
    /// `(text, json, csv)` for results that render themselves.
    prerendered: Option<(String, String, String)>,
}

impl Output {
    /// A single value; text output is the value alone.
    pub fn scalar(text: String, json: Value) -> Self {
        let header = vec!["quantity".into(), "value".into()];
        let rows = vec![vec!["value".into(), text.clone()]];
        Self {
            scalar: Some(text),
            header,
            rows,
            json,
            prerendered: None,
        }
    }

    pub fn table(header: Vec<String>, rows: Vec<Vec<String>>, json: Value) -> Self {
        Self {
            scalar: None,
            header,
            rows,
            json,
            prerendered: None,
        }
    }

    pub fn prerendered(text: String, json: String, csv: String) -> Self {
        Self {
            scalar: None,
            header: Vec::new(),
            rows: Vec::new(),
            json: Value::Null,
            prerendered: Some((text, json, csv)),
        }
    }

    pub fn with_scalar(mut self, text: String) -> Self {
        self.scalar = Some(text);
        self
    }

    pub fn render(&self, format: Format) -> Result<String, Error> {
        if let Some((text, json, csv)) = &self.prerendered {
            let mut s = match format {
                Format::Text => text.clone(),
                Format::Json => json.clone(),
                Format::Csv => return Ok(csv.clone()),
            };
            s.push('\n');
            return Ok(s);
        }
        Ok(match format {
            Format::Text => match &self.scalar {
                Some(s) => format!("{s}\n"),
                None => {
                    let mut s = self.header.join("\t");
                    s.push('\n');
                    for row in &self.rows {
                        s.push_str(&row.join("\t"));
                        s.push('\n');
                    }
                    s
                }
            },
            Format::Json => format!("{}\n", serde_json::to_string_pretty(&self.json)?),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let err = |e: csv::Error| Error::Io(std::io::Error::other(e));
                w.write_record(&self.header).map_err(err)?;
                for row in &self.rows {
                    w.write_record(row).map_err(err)?;
                }
                let bytes = w
                    .into_inner()
                    .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
                String::from_utf8(bytes).expect("csv output is utf-8")
            }
        })
    }
}
