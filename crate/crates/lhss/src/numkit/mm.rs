//! Matrix Market I/O.
//!
//! Two kinds are supported: `matrix coordinate real symmetric` for the real
//! symmetric matrices (lower triangle stored, absent entries are zero) and
//! `matrix array complex general` with a single column for complex vectors.
//! Values are written in scientific notation with 17 significant digits so
//! that a round trip is bit-exact.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkit::matrix::{ComplexVector, RealSymMatrix};

/// Format a float with 17 significant digits (bit-exact round trip).
pub fn full_precision(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_matrix(m: &RealSymMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
    let entries = m.lower_entries();
    writeln!(w, "{} {} {}", m.n(), m.n(), entries.len())?;
    for (i, j, v) in entries {
        writeln!(w, "{} {} {}", i + 1, j + 1, full_precision(v))?;
    }
    Ok(())
}

pub fn write_vector(v: &ComplexVector, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "%%MatrixMarket matrix array complex general")?;
    writeln!(w, "{} 1", v.len())?;
    for z in v.iter() {
        writeln!(w, "{} {}", full_precision(z.re), full_precision(z.im))?;
    }
    Ok(())
}

struct Header {
    object: String,
    format: String,
    field: String,
    symmetry: String,
}

fn parse_header(line: &str, line_no: usize) -> Result<Header> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != 5 || !parts[0].eq_ignore_ascii_case("%%MatrixMarket") {
        return Err(Error::Parse {
            line: line_no,
            msg: "expected '%%MatrixMarket object format field symmetry' header".to_string(),
        });
    }
    Ok(Header {
        object: parts[1].to_ascii_lowercase(),
        format: parts[2].to_ascii_lowercase(),
        field: parts[3].to_ascii_lowercase(),
        symmetry: parts[4].to_ascii_lowercase(),
    })
}

/// Lines with a 1-based counter, comments (%) and blank lines skipped for
/// the data section but counted.
struct Lines {
    inner: std::io::Lines<BufReader<File>>,
    line_no: usize,
}

impl Lines {
    fn open(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Lines {
            inner: BufReader::new(File::open(path)?).lines(),
            line_no: 0,
        })
    }

    fn next_raw(&mut self) -> Result<Option<String>> {
        match self.inner.next() {
            None => Ok(None),
            Some(line) => {
                self.line_no += 1;
                Ok(Some(line?))
            }
        }
    }

    fn next_data(&mut self) -> Result<Option<String>> {
        loop {
            match self.next_raw()? {
                None => return Ok(None),
                Some(line) => {
                    let t = line.trim();
                    if t.is_empty() || t.starts_with('%') {
                        continue;
                    }
                    return Ok(Some(t.to_string()));
                }
            }
        }
    }
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid {what}: '{tok}'"),
    })
}

fn parse_f64(tok: &str, line: usize, what: &str) -> Result<f64> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid {what}: '{tok}'"),
    })
}

/// Read a real symmetric matrix in coordinate format. Entries must address
/// the lower triangle; absent entries are zero.
pub fn read_matrix(path: impl AsRef<Path>) -> Result<RealSymMatrix> {
    let mut lines = Lines::open(path)?;
    let first = lines.next_raw()?.ok_or(Error::Parse {
        line: 1,
        msg: "empty file".to_string(),
    })?;
    let header = parse_header(&first, lines.line_no)?;
    let found = format!(
        "{} {} {} {}",
        header.object, header.format, header.field, header.symmetry
    );
    if header.object != "matrix"
        || header.format != "coordinate"
        || header.field != "real"
        || header.symmetry != "symmetric"
    {
        return Err(Error::KindMismatch {
            expected: "matrix coordinate real symmetric".to_string(),
            found,
        });
    }

    let dims = lines.next_data()?.ok_or(Error::Parse {
        line: lines.line_no + 1,
        msg: "missing dimension line".to_string(),
    })?;
    let dim_line = lines.line_no;
    let toks: Vec<&str> = dims.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(Error::Parse {
            line: dim_line,
            msg: format!("expected 'rows cols nnz', got '{dims}'"),
        });
    }
    let rows = parse_usize(toks[0], dim_line, "row count")?;
    let cols = parse_usize(toks[1], dim_line, "column count")?;
    let nnz = parse_usize(toks[2], dim_line, "entry count")?;
    if rows != cols || rows == 0 {
        return Err(Error::Parse {
            line: dim_line,
            msg: format!("symmetric matrix must be square and nonempty, got {rows}x{cols}"),
        });
    }

    let mut entries = Vec::with_capacity(nnz);
    for k in 0..nnz {
        let data = lines.next_data()?.ok_or(Error::Parse {
            line: lines.line_no + 1,
            msg: format!("expected {nnz} entries, found {k}"),
        })?;
        let line_no = lines.line_no;
        let toks: Vec<&str> = data.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 'i j value', got '{data}'"),
            });
        }
        let i = parse_usize(toks[0], line_no, "row index")?;
        let j = parse_usize(toks[1], line_no, "column index")?;
        let v = parse_f64(toks[2], line_no, "value")?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("index ({i}, {j}) out of bounds for {rows}x{cols}"),
            });
        }
        if j > i {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("entry ({i}, {j}) lies above the diagonal; symmetric files store the lower triangle"),
            });
        }
        entries.push((i - 1, j - 1, v));
    }
    RealSymMatrix::from_coo(rows, &entries)
}

/// Read a complex vector in array format (one column).
pub fn read_vector(path: impl AsRef<Path>) -> Result<ComplexVector> {
    let mut lines = Lines::open(path)?;
    let first = lines.next_raw()?.ok_or(Error::Parse {
        line: 1,
        msg: "empty file".to_string(),
    })?;
    let header = parse_header(&first, lines.line_no)?;
    let found = format!(
        "{} {} {} {}",
        header.object, header.format, header.field, header.symmetry
    );
    if header.object != "matrix"
        || header.format != "array"
        || header.field != "complex"
        || header.symmetry != "general"
    {
        return Err(Error::KindMismatch {
            expected: "matrix array complex general".to_string(),
            found,
        });
    }

    let dims = lines.next_data()?.ok_or(Error::Parse {
        line: lines.line_no + 1,
        msg: "missing dimension line".to_string(),
    })?;
    let dim_line = lines.line_no;
    let toks: Vec<&str> = dims.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(Error::Parse {
            line: dim_line,
            msg: format!("expected 'rows cols', got '{dims}'"),
        });
    }
    let rows = parse_usize(toks[0], dim_line, "row count")?;
    let cols = parse_usize(toks[1], dim_line, "column count")?;
    if cols != 1 || rows == 0 {
        return Err(Error::Parse {
            line: dim_line,
            msg: format!("expected a single-column vector, got {rows}x{cols}"),
        });
    }

    let mut data = Vec::with_capacity(rows);
    for k in 0..rows {
        let line = lines.next_data()?.ok_or(Error::Parse {
            line: lines.line_no + 1,
            msg: format!("expected {rows} entries, found {k}"),
        })?;
        let line_no = lines.line_no;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 're im', got '{line}'"),
            });
        }
        let re = parse_f64(toks[0], line_no, "real part")?;
        let im = parse_f64(toks[1], line_no, "imaginary part")?;
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                msg: "non-finite vector entry".to_string(),
            });
        }
        data.push(Complex64::new(re, im));
    }
    Ok(ComplexVector::from_vec(data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;
    use tempfile::NamedTempFile;

    #[test]
    fn matrix_round_trip() {
        let m = RealSymMatrix::from_diagonal(&[1.0, 2.0]);
        let f = NamedTempFile::new().unwrap();
        write_matrix(&m, f.path()).unwrap();
        let back = read_matrix(f.path()).unwrap();
        assert!(m.value_eq(&back));
    }

    #[test]
    fn absent_entries_are_zero() {
        let mut f = NamedTempFile::new().unwrap();
        writeln!(f, "%%MatrixMarket matrix coordinate real symmetric").unwrap();
        writeln!(f, "2 2 2").unwrap();
        writeln!(f, "1 1 1.0").unwrap();
        writeln!(f, "2 1 3.0").unwrap();
        f.flush().unwrap();
        let m = read_matrix(f.path()).unwrap();
        assert_eq!(m.entry(0, 0), 1.0);
        assert_eq!(m.entry(1, 0), 3.0);
        assert_eq!(m.entry(0, 1), 3.0);
        assert_eq!(m.entry(1, 1), 0.0);
    }

    #[test]
    fn malformed_dimension_line_names_the_line() {
        let mut f = NamedTempFile::new().unwrap();
        writeln!(f, "%%MatrixMarket matrix coordinate real symmetric").unwrap();
        writeln!(f, "% a comment").unwrap();
        writeln!(f, "2 -2").unwrap();
        f.flush().unwrap();
        match read_matrix(f.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn kind_mismatch_on_general_matrix() {
        let mut f = NamedTempFile::new().unwrap();
        writeln!(f, "%%MatrixMarket matrix coordinate real general").unwrap();
        writeln!(f, "1 1 1").unwrap();
        writeln!(f, "1 1 5.0").unwrap();
        f.flush().unwrap();
        assert!(matches!(
            read_matrix(f.path()),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn upper_triangle_entry_rejected() {
        let mut f = NamedTempFile::new().unwrap();
        writeln!(f, "%%MatrixMarket matrix coordinate real symmetric").unwrap();
        writeln!(f, "2 2 1").unwrap();
        writeln!(f, "1 2 5.0").unwrap();
        f.flush().unwrap();
        assert!(matches!(read_matrix(f.path()), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn vector_round_trip() {
        let v = ComplexVector::from_vec(vec![
            Complex64::new(1.5, -2.25),
            Complex64::new(0.1, 1.0 / 3.0),
        ]);
        let f = NamedTempFile::new().unwrap();
        write_vector(&v, f.path()).unwrap();
        let back = read_vector(f.path()).unwrap();
        assert_eq!(v, back);
    }

    #[test]
    fn vector_kind_mismatch() {
        let mut f = NamedTempFile::new().unwrap();
        writeln!(f, "%%MatrixMarket matrix array real general").unwrap();
        writeln!(f, "1 1").unwrap();
        writeln!(f, "5.0").unwrap();
        f.flush().unwrap();
        assert!(matches!(
            read_vector(f.path()),
            Err(Error::KindMismatch { .. })
        ));
    }

    proptest::proptest! {
        #[test]
        fn round_trip_is_bit_exact(values in proptest::collection::vec(-1e100f64..1e100, 1..20)) {
            let n = values.len();
            let entries: Vec<_> = values.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
            let m = RealSymMatrix::from_coo(n, &entries).unwrap();
            let f = NamedTempFile::new().unwrap();
            write_matrix(&m, f.path()).unwrap();
            let back = read_matrix(f.path()).unwrap();
            for i in 0..n {
                proptest::prop_assert!(m.entry(i, i).to_bits() == back.entry(i, i).to_bits());
            }
        }
    }
}
