//! CSV emission. Complex entries become paired `re_<name>`, `im_<name>` columns and rows
//! are written in the order given, which callers keep ascending in k or x.

use std::io::Write;
use std::path::Path;

use scatter_core::field::Field;
use scatter_core::linalg::{CMat, C64};
use scatter_core::ScatterError;

/// Column names for the entries of an n×n matrix labelled `label`: `S` for n = 1,
/// `S11, S12, ...` row-major otherwise. An empty label always uses the indices.
pub fn matrix_names(label: &str, n: usize) -> Vec<String> {
    if n == 1 && !label.is_empty() {
        return vec![label.to_string()];
    }
    let mut out = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            out.push(format!("{label}{i}{j}"));
        }
    }
    out
}

/// A table of real key columns followed by complex value columns.
pub struct Table {
    pub keys: Vec<String>,
    pub values: Vec<String>,
    rows: Vec<(Vec<f64>, Vec<C64>)>,
}

impl Table {
    pub fn new(keys: &[&str], values: Vec<String>) -> Self {
        Self { keys: keys.iter().map(|s| s.to_string()).collect(), values, rows: Vec::new() }
    }

    pub fn push(&mut self, keys: Vec<f64>, values: Vec<C64>) {
        debug_assert_eq!(keys.len(), self.keys.len());
        debug_assert_eq!(values.len(), self.values.len());
        self.rows.push((keys, values));
    }

    /// Append the entries of several matrices in row-major order.
    pub fn push_matrices(&mut self, keys: Vec<f64>, mats: &[&CMat]) {
        let mut vals = Vec::new();
        for m in mats {
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    vals.push(m[(i, j)]);
                }
            }
        }
        self.push(keys, vals);
    }

    fn header(&self) -> Vec<String> {
        let mut h = self.keys.clone();
        for v in &self.values {
            h.push(format!("re_{v}"));
            h.push(format!("im_{v}"));
        }
        h
    }

    pub fn write<W: Write>(&self, out: W) -> Result<(), ScatterError> {
        if self.rows.is_empty() {
            return Err(ScatterError::Config("refusing to write an empty table".into()));
        }
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| ScatterError::Io { path: "<csv>".into(), message: e.to_string() };
        w.write_record(self.header()).map_err(io)?;
        for (k, v) in &self.rows {
            let mut rec: Vec<String> = k.iter().map(|x| format!("{x:e}")).collect();
            for z in v {
                rec.push(format!("{:e}", z.re));
                rec.push(format!("{:e}", z.im));
            }
            w.write_record(&rec).map_err(io)?;
        }
        w.flush().map_err(|e| ScatterError::Io { path: "<csv>".into(), message: e.to_string() })
    }
}

/// Field samples: columns x, re_1, im_1, ..., re_n, im_n.
pub fn field_table(y: &Field) -> Table {
    let mut t = Table::new(&["x"], (1..=y.n).map(|c| c.to_string()).collect());
    for i in 0..y.len() {
        t.push(vec![y.x(i)], y.at(i).to_vec());
    }
    t
}

/// Write to `path`, or to stdout when `path` is None.
pub fn emit(table: &Table, path: Option<&Path>) -> Result<(), ScatterError> {
    match path {
        Some(p) => {
            let f = std::fs::File::create(p).map_err(|e| ScatterError::Io { path: p.display().to_string(), message: e.to_string() })?;
            table.write(std::io::BufWriter::new(f))
        }
        None => table.write(std::io::stdout().lock()),
    }
}

/// Write preformatted string records under `header`, to `path` or stdout.
pub fn emit_records(header: &[&str], rows: &[Vec<String>], path: Option<&Path>) -> Result<(), ScatterError> {
    let name = path.map(|p| p.display().to_string()).unwrap_or_else(|| "<stdout>".into());
    let io = |e: csv::Error| ScatterError::Io { path: name.clone(), message: e.to_string() };
    let out: Box<dyn Write> = match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p).map_err(|e| ScatterError::Io { path: name.clone(), message: e.to_string() })?)),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush().map_err(|e| ScatterError::Io { path: name.clone(), message: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use scatter_core::field::Domain;

    fn render(t: &Table) -> String {
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn scalar_s_table_header() {
        let mut t = Table::new(&["k"], matrix_names("S", 1));
        t.push(vec![1.0], vec![C64::new(0.5, -0.5)]);
        assert!(render(&t).starts_with("k,re_S,im_S\n"));
    }

    #[test]
    fn two_component_field_header() {
        let y = Field::from_fn(Domain::HalfLine, 2, 0.5, 3, |_, o| o.fill(C64::new(1.0, 0.0)));
        let s = render(&field_table(&y));
        assert!(s.starts_with("x,re_1,im_1,re_2,im_2\n"));
        assert_eq!(s.lines().count(), 4);
    }

    #[test]
    fn kernel_names_use_indices() {
        assert_eq!(matrix_names("", 1), vec!["11"]);
        assert_eq!(matrix_names("", 2), vec!["11", "12", "21", "22"]);
    }

    #[test]
    fn empty_table_is_rejected() {
        let t = Table::new(&["k"], matrix_names("S", 1));
        assert!(t.write(Vec::new()).is_err());
    }
}
