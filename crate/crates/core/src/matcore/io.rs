use std::fmt::Write;

use serde::Deserialize;

use super::HermitianMatrix;
use crate::error::{Error, Result};

/// Wire form of a matrix: `{"n": 2, "re": [[..],[..]], "im": [[..],[..]]}`
/// with `im` optional (zeros when absent).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn into_matrix(self) -> Result<HermitianMatrix> {
        let n = self.n;
        let re = flatten(n, &self.re)?;
        let im = match &self.im {
            Some(rows) => flatten(n, rows)?,
            None => vec![0.0; n * n],
        };
        HermitianMatrix::from_parts(n, &re, &im)
    }
}

fn flatten(n: usize, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    if rows.len() != n {
        return Err(Error::NotSquare {
            n,
            row: rows.len(),
            len: 0,
        });
    }
    let mut out = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::NotSquare {
                n,
                row: i,
                len: row.len(),
            });
        }
        out.extend_from_slice(row);
    }
    Ok(out)
}

pub fn parse_matrix(text: &str) -> Result<HermitianMatrix> {
    let raw: MatrixJson =
        serde_json::from_str(text).map_err(|e| Error::MalformedJson(e.to_string()))?;
    raw.into_matrix()
}

/// Serializes with 17 significant digits so that parsing restores the exact
/// bits. The `im` block is omitted when every imaginary part is zero.
pub fn serialize_matrix(h: &HermitianMatrix) -> String {
    let n = h.n();
    let mut s = String::new();
    write!(s, "{{\"n\":{n},\"re\":").unwrap();
    write_block(&mut s, n, |i, j| h.get(i, j).re);
    if h.data().iter().any(|z| z.im != 0.0) {
        s.push_str(",\"im\":");
        write_block(&mut s, n, |i, j| h.get(i, j).im);
    }
    s.push('}');
    s
}

fn write_block(s: &mut String, n: usize, entry: impl Fn(usize, usize) -> f64) {
    s.push('[');
    for i in 0..n {
        if i > 0 {
            s.push(',');
        }
        s.push('[');
        for j in 0..n {
            if j > 0 {
                s.push(',');
            }
            write!(s, "{:.16e}", entry(i, j)).unwrap();
        }
        s.push(']');
    }
    s.push(']');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{random_hermitian, rng_from_seed};
    use proptest::prelude::*;

    #[test]
    fn parses_real_diagonal() {
        let m = parse_matrix(r#"{"n":2,"re":[[1,0],[0,2]]}"#).unwrap();
        assert_eq!(m, HermitianMatrix::diag(&[1.0, 2.0]));
        assert!(m.data().iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn distinct_error_codes() {
        let malformed = parse_matrix("{\"n\":2,").unwrap_err();
        let not_square = parse_matrix(r#"{"n":2,"re":[[1,0],[0]]}"#).unwrap_err();
        let asym = parse_matrix(r#"{"n":2,"re":[[1,0.001],[0,2]]}"#).unwrap_err();
        assert_eq!(malformed.code(), "E_MALFORMED_JSON");
        assert_eq!(not_square.code(), "E_NOT_SQUARE");
        assert_eq!(asym.code(), "E_NOT_HERMITIAN");
    }

    #[test]
    fn complex_round_trip() {
        let h = random_hermitian(&mut rng_from_seed(2), 4);
        let text = serialize_matrix(&h);
        assert!(text.contains("\"im\""));
        assert_eq!(parse_matrix(&text).unwrap(), h);
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(seed in any::<u64>(), n in 1usize..8) {
            let h = random_hermitian(&mut rng_from_seed(seed), n);
            let back = parse_matrix(&serialize_matrix(&h)).unwrap();
            prop_assert_eq!(back, h);
        }
    }
}
