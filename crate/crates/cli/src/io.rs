//! Flat-file output: every file starts with the same `#` provenance block.

use std::fs;
use std::path::Path;

use fracdiff_core::forward::{ObservationSeries, SolutionField};

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance written at the top of every output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub config_hash: String,
    pub seed: u64,
}

impl Header {
    pub fn render(&self, extra: &[(&str, String)]) -> String {
        let mut s = format!(
            "# fracdiff {VERSION}\n# config-sha256: {}\n# seed: {}\n",
            self.config_hash, self.seed
        );
        for (k, v) in extra {
            s.push_str(&format!("# {k}: {v}\n"));
        }
        s
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Header followed by a body that already carries its own column line.
pub fn write_with_header(
    path: &Path,
    header: &Header,
    extra: &[(&str, String)],
    body: &str,
) -> Result<(), CliError> {
    write_file(path, &(header.render(extra) + body))
}

pub fn observation_csv(series: &ObservationSeries) -> String {
    let mut s = String::from("t,h\n");
    for (t, h) in series.times().iter().zip(series.values()) {
        s.push_str(&format!("{t:?},{h:?}\n"));
    }
    s
}

/// Long form: one (x, t, u) row per grid point, time-major.
pub fn solution_csv(field: &SolutionField) -> String {
    let mut s = String::from("x,t,u\n");
    for (j, t) in field.grid().times().iter().enumerate() {
        for (x, u) in field.xs().iter().zip(field.row(j)) {
            s.push_str(&format!("{x:?},{t:?},{u:?}\n"));
        }
    }
    s
}

/// Reads a (t, h) CSV, skipping `#` lines.
pub fn read_observation(path: &Path, x0: f64) -> Result<ObservationSeries, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::Config(format!("cannot read observations {}: {e}", path.display()))
    })?;
    parse_observation(&text, x0).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn parse_observation(text: &str, x0: f64) -> Result<ObservationSeries, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
    if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "h" {
        return Err(format!(
            "expected columns t,h, found {:?}",
            headers.iter().collect::<Vec<_>>()
        ));
    }
    let (mut ts, mut hs) = (Vec::new(), Vec::new());
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let num = |i: usize| {
            rec[i]
                .parse::<f64>()
                .map_err(|e| format!("row {}: {e}", line + 1))
        };
        ts.push(num(0)?);
        hs.push(num(1)?);
    }
    ObservationSeries::new(x0, ts, hs).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn observation_round_trip_is_exact() {
        let s =
            ObservationSeries::new(0.3, vec![0.0, 0.1, 1.0 / 3.0], vec![1.0, 0.9, 1e-300]).unwrap();
        let h = Header {
            config_hash: "ab".into(),
            seed: 7,
        };
        let text = h.render(&[("x0", "0.3".into())]) + &observation_csv(&s);
        assert!(text.starts_with("# fracdiff "));
        let back = parse_observation(&text, 0.3).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_wrong_columns() {
        assert!(parse_observation("x,y\n1,2\n", 0.5).is_err());
        assert!(parse_observation("t,h\n0,abc\n", 0.5).is_err());
    }
}
