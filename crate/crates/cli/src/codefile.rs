//! Text serialization of rank-metric codes.
//!
//! ```text
//! RMC 1
//! field p=2 tower=3
//! modulus 1,1,0,1
//! dims m=3 n=2 k=1
//! shape 2,3
//! delta 2
//!
//! matrix 0
//! 0 1
//! 1 0
//! 0 1
//! ```

use std::fmt::Write as _;

use ferro_core::gf::FieldCtx;
use ferro_core::{Elem, Error, FerrersDiagram, GfMatrix, RankMetricCode, Result};

const MAGIC: &str = "RMC 1";

fn field_header(f: &FieldCtx) -> String {
    let tower: Vec<String> = f.tower().iter().map(|d| d.to_string()).collect();
    let mut out = format!("field p={} tower={}\n", f.p(), tower.join(","));
    for m in f.moduli() {
        let c: Vec<String> = m.iter().map(|c| c.to_string()).collect();
        writeln!(out, "modulus {}", c.join(",")).unwrap();
    }
    out
}

/// Canonical serialization; `parse(serialize(c))` re-serializes byte-identically.
pub fn serialize(code: &RankMetricCode) -> String {
    let mut out = format!("{MAGIC}\n");
    out.push_str(&field_header(code.field()));
    writeln!(out, "dims m={} n={} k={}", code.m(), code.n(), code.dim()).unwrap();
    if let Some(s) = code.shape() {
        let c: Vec<String> = s.cols().iter().map(|c| c.to_string()).collect();
        writeln!(out, "shape {}", c.join(",")).unwrap();
    }
    if let Some(d) = code.delta() {
        writeln!(out, "delta {d}").unwrap();
    }
    for (i, a) in code.basis().iter().enumerate() {
        write!(out, "\nmatrix {i}\n").unwrap();
        for r in 0..a.rows() {
            let row: Vec<String> = (0..a.cols()).map(|c| a.get(r, c).0.to_string()).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
    }
    out
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn keyed<'a>(line: &'a str, key: &str) -> Result<&'a str> {
    line.strip_prefix(key)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| bad(format!("expected `{key} ...`, found `{line}`")))
}

fn kv(tok: &str, key: &str) -> Result<usize> {
    tok.strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| bad(format!("expected `{key}=`, found `{tok}`")))?
        .parse()
        .map_err(|_| bad(format!("bad integer in `{tok}`")))
}

fn int_list(s: &str) -> Result<Vec<u32>> {
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad(format!("bad integer `{t}`")))).collect()
}

/// A parsed file. The declared shape is kept apart from the code so that a file
/// whose matrices leave the shape can still be loaded and reported on.
#[derive(Clone, Debug)]
pub struct CodeFile {
    pub code: RankMetricCode,
    pub shape: Option<FerrersDiagram>,
    pub delta: Option<usize>,
}

impl CodeFile {
    /// The code with its declared shape attached.
    pub fn shaped(&self) -> Result<RankMetricCode> {
        match &self.shape {
            Some(s) => self.code.clone().with_shape(s.clone()),
            None => Ok(self.code.clone()),
        }
    }
}

pub fn parse(text: &str) -> Result<CodeFile> {
    let mut lines = text.lines().peekable();
    let mut next = || lines.next().ok_or_else(|| bad("unexpected end of file"));
    if next()? != MAGIC {
        return Err(bad("missing `RMC 1` header"));
    }
    let head = keyed(next()?, "field")?;
    let toks: Vec<&str> = head.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(bad("field line needs p= and tower="));
    }
    let p = kv(toks[0], "p")? as u32;
    let tower = toks[1].strip_prefix("tower=").ok_or_else(|| bad("missing tower="))?;
    let levels = int_list(tower)?;
    let mut moduli = Vec::new();
    for &deg in &levels {
        let m = int_list(keyed(next()?, "modulus")?)?;
        if m.len() != deg as usize + 1 {
            return Err(bad("modulus degree does not match tower"));
        }
        moduli.push(m);
    }
    let field = FieldCtx::from_moduli(p, &moduli)?;
    let dims: Vec<&str> = keyed(next()?, "dims")?.split_whitespace().collect();
    if dims.len() != 3 {
        return Err(bad("dims line needs m=, n=, k="));
    }
    let (m, n, k) = (kv(dims[0], "m")?, kv(dims[1], "n")?, kv(dims[2], "k")?);

    let mut rest: Vec<&str> = Vec::new();
    for l in lines.by_ref() {
        rest.push(l);
    }
    let mut it = rest.into_iter().peekable();
    let mut shape = None;
    let mut delta = None;
    if let Some(l) = it.peek().copied().filter(|l| l.starts_with("shape ")) {
        let cols = int_list(keyed(l, "shape")?)?.into_iter().map(|c| c as usize).collect();
        shape = Some(FerrersDiagram::new(m, cols)?);
        it.next();
    }
    if let Some(l) = it.peek().copied().filter(|l| l.starts_with("delta ")) {
        delta = Some(keyed(l, "delta")?.parse().map_err(|_| bad("bad delta"))?);
        it.next();
    }
    let mut basis = Vec::with_capacity(k);
    for i in 0..k {
        if it.next() != Some("") {
            return Err(bad(format!("expected blank line before matrix {i}")));
        }
        let idx: usize = keyed(it.next().unwrap_or(""), "matrix")?
            .parse()
            .map_err(|_| bad("bad matrix index"))?;
        if idx != i {
            return Err(bad(format!("matrix index {idx} out of order, expected {i}")));
        }
        let mut data = Vec::with_capacity(m * n);
        for r in 0..m {
            let row = it.next().ok_or_else(|| bad(format!("matrix {i} has fewer than {m} rows")))?;
            let vals: Vec<&str> = row.split_whitespace().collect();
            if vals.len() != n {
                return Err(bad(format!("matrix {i} row {r} has {} entries, expected {n}", vals.len())));
            }
            for v in vals {
                let e: u32 = v.parse().map_err(|_| bad(format!("bad entry `{v}`")))?;
                if e >= field.order() {
                    return Err(bad(format!("entry {e} outside the field")));
                }
                data.push(Elem(e));
            }
        }
        basis.push(GfMatrix::from_data(&field, m, n, data));
    }
    if it.any(|l| !l.trim().is_empty()) {
        return Err(bad("trailing content after the last matrix"));
    }
    let mut code = RankMetricCode::new(&field, m, n, basis)?;
    if let Some(d) = delta {
        code = code.with_delta(d);
    }
    Ok(CodeFile { code, shape, delta })
}
