use std::io::Write;

use qmcast_core::{Error, Result};
use serde::Serialize;

use crate::{Common, Format};

fn render<T: Serialize>(rows: &[T], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row)
                    .map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
            }
            w.into_inner()
                .map_err(|e| Error::InvalidParameter(format!("csv: {e}")))
        }
        Format::Json => {
            let mut text = serde_json::to_vec_pretty(rows)
                .map_err(|e| Error::InvalidParameter(format!("json: {e}")))?;
            text.push(b'\n');
            Ok(text)
        }
    }
}

pub fn emit<T: Serialize>(rows: &[T], common: &Common) -> Result<()> {
    let bytes = render(rows, common.format)?;
    let written = match &common.out {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout()
            .lock()
            .write_all(&bytes)
            .map_err(|e| format!("stdout: {e}")),
    };
    written.map_err(Error::InvalidParameter)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        a: usize,
        b: Option<f64>,
    }

    #[test]
    fn csv_leaves_missing_values_empty() {
        let rows = [Row { a: 1, b: Some(0.5) }, Row { a: 2, b: None }];
        let text = String::from_utf8(render(&rows, Format::Csv).unwrap()).unwrap();
        assert_eq!(text, "a,b\n1,0.5\n2,\n");
        let json = String::from_utf8(render(&rows, Format::Json).unwrap()).unwrap();
        assert!(json.contains("null"));
    }
}
