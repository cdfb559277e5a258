//! Text formats for tensors and decompositions.
//!
//! Tensor files open with a header line `n_plus_1 m format` where format is
//! `uptri` or `terms`. An `uptri` body lists all binom(n+m, m) coefficients
//! as `re im` pairs in the canonical entry order; a `terms` body lists rows
//! `a_1 ... a_n re im` giving the coefficient at exponent (a_1, ..., a_n),
//! with missing exponents defaulting to zero. Decomposition files open with
//! `n_plus_1 m r error` and continue with r vectors, one per line, as n+1
//! `re im` pairs. Blank lines and `#` comments are skipped everywhere.

use std::collections::HashSet;
use std::fmt::Write as _;

use nalgebra::DVector;
use symdec::decompose::Decomposition;
use symdec::symtensor::{binomial, MonomialPower, SymTensor};
use symdec::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorFormat {
    Uptri,
    Terms,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            None
        } else {
            Some((i + 1, t))
        }
    })
}

fn bad<T>(line: usize, what: &str) -> Result<T> {
    Err(Error::Format(format!("line {line}: {what}")))
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Format(format!("line {line}: cannot parse {what} from `{s}`")))
}

pub fn parse_tensor(text: &str) -> Result<SymTensor> {
    let mut lines = content_lines(text);
    let Some((ln, header)) = lines.next() else {
        return Err(Error::Format("empty tensor file".into()));
    };
    let tok: Vec<&str> = header.split_whitespace().collect();
    if tok.len() != 3 {
        return bad(ln, "header must be `n_plus_1 m format`");
    }
    let n_plus_1: usize = parse_num(tok[0], ln, "n_plus_1")?;
    let m: u32 = parse_num(tok[1], ln, "order")?;
    if n_plus_1 == 0 || m == 0 {
        return bad(ln, "n_plus_1 and m must be positive");
    }
    let n = n_plus_1 - 1;
    match tok[2] {
        "uptri" => {
            let expect = binomial(n + m as usize, m as usize);
            let mut vals = Vec::with_capacity(expect);
            for (ln, line) in lines {
                let t: Vec<&str> = line.split_whitespace().collect();
                if t.len() != 2 {
                    return bad(ln, "expected `re im`");
                }
                vals.push(C64::new(
                    parse_num(t[0], ln, "re")?,
                    parse_num(t[1], ln, "im")?,
                ));
            }
            if vals.len() != expect {
                return Err(Error::Format(format!(
                    "expected {} coefficients, found {}",
                    expect,
                    vals.len()
                )));
            }
            SymTensor::from_uptri(n, m, &vals)
        }
        "terms" => {
            let mut out = SymTensor::zero(n, m);
            let mut seen = HashSet::new();
            for (ln, line) in lines {
                let t: Vec<&str> = line.split_whitespace().collect();
                if t.len() != n + 2 {
                    return bad(ln, &format!("expected {n} exponents then `re im`"));
                }
                let mut exps = Vec::with_capacity(n);
                for s in &t[..n] {
                    exps.push(parse_num::<u32>(s, ln, "exponent")?);
                }
                let alpha = MonomialPower::new(exps);
                if alpha.degree() > m {
                    return bad(ln, "exponents exceed the order");
                }
                if !seen.insert(alpha.clone()) {
                    return bad(ln, "duplicate entry");
                }
                let re: f64 = parse_num(t[n], ln, "re")?;
                let im: f64 = parse_num(t[n + 1], ln, "im")?;
                out.set_entry(&alpha, C64::new(re, im))?;
            }
            Ok(out)
        }
        other => bad(ln, &format!("unknown format `{other}`")),
    }
}

pub fn serialize_tensor(t: &SymTensor, format: TensorFormat) -> String {
    let mut out = String::new();
    let tag = match format {
        TensorFormat::Uptri => "uptri",
        TensorFormat::Terms => "terms",
    };
    writeln!(out, "{} {} {}", t.n_vars() + 1, t.order(), tag).unwrap();
    match format {
        TensorFormat::Uptri => {
            for v in t.uptri() {
                writeln!(out, "{:.16e} {:.16e}", v.re, v.im).unwrap();
            }
        }
        TensorFormat::Terms => {
            for alpha in t.monomials() {
                let v = t
                    .entry(alpha)
                    .expect("monomial from the tensor's own table");
                if v == C64::ZERO {
                    continue;
                }
                for e in alpha.exponents() {
                    write!(out, "{e} ").unwrap();
                }
                writeln!(out, "{:.16e} {:.16e}", v.re, v.im).unwrap();
            }
        }
    }
    out
}

/// Parses a decomposition file, returning the vectors and the stored error.
pub fn parse_decomposition(text: &str) -> Result<(Decomposition, f64)> {
    let mut lines = content_lines(text);
    let Some((ln, header)) = lines.next() else {
        return Err(Error::Format("empty decomposition file".into()));
    };
    let tok: Vec<&str> = header.split_whitespace().collect();
    if tok.len() != 4 {
        return bad(ln, "header must be `n_plus_1 m r error`");
    }
    let n_plus_1: usize = parse_num(tok[0], ln, "n_plus_1")?;
    let m: u32 = parse_num(tok[1], ln, "order")?;
    let r: usize = parse_num(tok[2], ln, "rank")?;
    let error: f64 = parse_num(tok[3], ln, "error")?;
    if n_plus_1 == 0 || m == 0 {
        return bad(ln, "n_plus_1 and m must be positive");
    }
    let mut vectors = Vec::with_capacity(r);
    for (ln, line) in lines {
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 2 * n_plus_1 {
            return bad(ln, &format!("expected {} numbers", 2 * n_plus_1));
        }
        let mut u = DVector::zeros(n_plus_1);
        for j in 0..n_plus_1 {
            u[j] = C64::new(
                parse_num(t[2 * j], ln, "re")?,
                parse_num(t[2 * j + 1], ln, "im")?,
            );
        }
        vectors.push(u);
    }
    if vectors.len() != r {
        return Err(Error::Format(format!(
            "expected {} vectors, found {}",
            r,
            vectors.len()
        )));
    }
    Ok((Decomposition::new(n_plus_1 - 1, m, vectors)?, error))
}

/// Writes a decomposition with the given (absolute) error in its header.
pub fn serialize_decomposition(dec: &Decomposition, error: f64) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{} {} {} {:.16e}",
        dec.n_vars() + 1,
        dec.order(),
        dec.len(),
        error
    )
    .unwrap();
    for u in dec.vectors() {
        let mut first = true;
        for x in u.iter() {
            if !first {
                out.push(' ');
            }
            write!(out, "{:.16e} {:.16e}", x.re, x.im).unwrap();
            first = false;
        }
        out.push('\n');
    }
    out
}
