//! Flat-file artifacts: CSV tables, JSON summaries and the plain-text
//! test-function format. Floats are always written with 17 significant
//! digits so that a value survives a write/read round trip bit for bit.

use crate::error::{Error, Result};
use crate::evolve::chebyshev::ChebyshevApprox;
use crate::hilbert::{EuclideanTestFunction, GramMatrix, TimeProfile, WavePacket3};
use num_complex::Complex64;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

/// `x` with 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

struct PreciseFormatter;

impl serde_json::ser::Formatter for PreciseFormatter {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        if value.is_finite() {
            writer.write_all(fmt_f64(value).as_bytes())
        } else {
            // JSON has no infinities.
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Compact JSON with 17-digit floats and a trailing newline.
pub fn to_json(value: &impl Serialize) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, PreciseFormatter);
    value.serialize(&mut ser).map_err(|e| Error::Io(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    write_text(path, &to_json(value)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// CSV with a header row; every cell is a float.
pub fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Row-major Gram matrix; each entry becomes a `re,im` pair of columns.
pub fn gram_csv(g: &GramMatrix) -> String {
    let n = g.entries.nrows();
    let mut s = String::new();
    for i in 0..n {
        let cells: Vec<String> = (0..n)
            .map(|j| {
                let z = g.entries[(i, j)];
                format!("{},{}", fmt_f64(z.re), fmt_f64(z.im))
            })
            .collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub fn parse_gram_csv(text: &str) -> Result<Vec<Vec<Complex64>>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            let v: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Io(format!("gram row {}: {e}", i + 1)))?;
            if v.len() % 2 != 0 {
                return Err(Error::Io(format!("gram row {} has an odd number of columns", i + 1)));
            }
            Ok(v.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect())
        })
        .collect()
}

/// `# n=.. degree=.. sup_error=..` followed by `k,re,im` rows of the
/// monomial coefficients and the Chebyshev coefficients of `T_k(2x - 1)`.
pub fn chebyshev_csv(a: &ChebyshevApprox) -> String {
    let mut s = format!(
        "# n={} degree={} sup_error={}\nk,monomial_re,monomial_im,chebyshev_re,chebyshev_im\n",
        a.phase_parameter,
        a.degree,
        fmt_f64(a.sup_error)
    );
    for (k, (m, c)) in a.coefficients.iter().zip(&a.chebyshev).enumerate() {
        let _ = writeln!(s, "{k},{},{},{},{}", fmt_f64(m.re), fmt_f64(m.im), fmt_f64(c.re), fmt_f64(c.im));
    }
    s
}

/// One record per function:
///
/// ```text
/// function <rank>
/// point <cx> <cy> <cz> <width> <norm_re> <norm_im> <tau_center> <tau_half_width>
/// ```
///
/// Packets carry no position or energy modulation in this format.
pub fn family_text(family: &[EuclideanTestFunction]) -> String {
    let mut s = String::new();
    for f in family {
        let _ = writeln!(s, "function {}", f.rank());
        for (p, h) in &f.points {
            let cells = [
                p.center[0],
                p.center[1],
                p.center[2],
                p.width,
                p.normalization.re,
                p.normalization.im,
                h.center,
                h.half_width,
            ];
            let cells: Vec<String> = cells.iter().map(|&x| fmt_f64(x)).collect();
            let _ = writeln!(s, "point {}", cells.join(" "));
        }
    }
    s
}

pub fn parse_family_text(text: &str) -> Result<Vec<EuclideanTestFunction>> {
    let bad = |line: usize, msg: &str| Error::Io(format!("family line {line}: {msg}"));
    let mut out = Vec::new();
    let mut current: Option<(usize, usize, Vec<(WavePacket3, TimeProfile)>)> = None;
    let finish = |cur: Option<(usize, usize, Vec<(WavePacket3, TimeProfile)>)>,
                  out: &mut Vec<EuclideanTestFunction>|
     -> Result<()> {
        if let Some((line, rank, points)) = cur {
            if points.len() != rank {
                return Err(bad(line, &format!("declared rank {rank} but {} points follow", points.len())));
            }
            out.push(EuclideanTestFunction::new(points).map_err(|e| bad(line, &e.to_string()))?);
        }
        Ok(())
    };
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let mut words = line.split_whitespace();
        match words.next() {
            None => continue,
            Some("function") => {
                finish(current.take(), &mut out)?;
                let rank = words
                    .next()
                    .and_then(|w| w.parse::<usize>().ok())
                    .ok_or_else(|| bad(lineno, "expected `function <rank>`"))?;
                current = Some((lineno, rank, Vec::new()));
            }
            Some("point") => {
                let v: Vec<f64> = words
                    .map(|w| w.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad(lineno, "non-numeric field"))?;
                if v.len() != 8 {
                    return Err(bad(lineno, "a point has 8 fields"));
                }
                let cur = current.as_mut().ok_or_else(|| bad(lineno, "point before any function"))?;
                let p = WavePacket3::new([v[0], v[1], v[2]], v[3], Complex64::new(v[4], v[5]))
                    .map_err(|e| bad(lineno, &e.to_string()))?;
                let h = TimeProfile::new(v[6], v[7]).map_err(|e| bad(lineno, &e.to_string()))?;
                cur.2.push((p, h));
            }
            Some(other) => return Err(bad(lineno, &format!("unknown record `{other}`"))),
        }
    }
    finish(current, &mut out)?;
    Ok(out)
}
