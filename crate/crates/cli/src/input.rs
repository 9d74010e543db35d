//! Reading field CSVs (`x, re_1, im_1, ...`) back onto a wave-operator grid.

use std::path::Path;

use scatter_core::field::{Domain, Field};
use scatter_core::linalg::C64;
use scatter_core::ScatterError;

/// Read a field CSV whose x column matches the nodes of the target grid exactly
/// (ascending, spacing h, 1e−9 tolerance). Errors name the file and line.
pub fn read_field_csv(path: &Path, domain: Domain, n: usize, h: f64, npos: usize) -> Result<Field, ScatterError> {
    let name = path.display().to_string();
    let at = |line: u64, msg: String| ScatterError::Config(format!("{name}:{line}: {msg}"));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| ScatterError::Io { path: name.clone(), message: e.to_string() })?;
    let width = rdr.headers().map_err(|e| at(1, e.to_string()))?.len();
    if width != 1 + 2 * n {
        return Err(at(1, format!("expected {} columns for {n} components, found {width}", 1 + 2 * n)));
    }
    let mut out = Field::zeros(domain, n, h, npos);
    let total = out.len();
    let mut count = 0;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| at(e.position().map(|p| p.line()).unwrap_or(0), e.to_string()))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let vals: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|_| at(line, format!("not a number: {s:?}"))))
            .collect::<Result<_, _>>()?;
        if count >= total {
            return Err(at(line, format!("more rows than the {total} grid nodes")));
        }
        if (vals[0] - out.x(count)).abs() > 1e-9 {
            return Err(at(line, format!("x = {} does not match grid node {}", vals[0], out.x(count))));
        }
        let row = out.at_mut(count);
        for c in 0..n {
            row[c] = C64::new(vals[1 + 2 * c], vals[2 + 2 * c]);
        }
        count += 1;
    }
    if count != total {
        return Err(at(count as u64 + 1, format!("expected {total} rows, found {count}")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emit::field_table;

    #[test]
    fn round_trip_through_csv() {
        let y = Field::from_fn(Domain::Line, 2, 0.25, 5, |x, o| {
            o[0] = C64::new(x, -x);
            o[1] = C64::new(1.0, x * x);
        });
        let p = std::env::temp_dir().join(format!("scatter-field-{}.csv", std::process::id()));
        field_table(&y).write(std::fs::File::create(&p).unwrap()).unwrap();
        let back = read_field_csv(&p, Domain::Line, 2, 0.25, 5).unwrap();
        assert!(back.distance(&y).unwrap() < 1e-15);
        let err = read_field_csv(&p, Domain::Line, 2, 0.5, 5).unwrap_err().to_string();
        assert!(err.contains(":2:"), "{err}");
    }
}
