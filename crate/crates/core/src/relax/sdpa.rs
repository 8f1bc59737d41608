//! Sparse SDPA exchange format with a `*` comment header carrying the
//! formulation tag, moment layout and constant offset.

use std::fmt::Write as _;
use std::path::Path;

use super::sdp::{
    BlockKind, BlockSpec, Encoding, Formulation, FormulationTag, MomentLayout, SdpInstance,
    SparseSym,
};
use crate::error::{Error, Result};
use crate::poly::parse_rational;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders `sdp` deterministically; entries are sorted by matrix, block, row, column.
pub fn to_sdpa_string(sdp: &SdpInstance) -> String {
    let mut s = String::new();
    let f = &sdp.formulation;
    let _ = writeln!(
        s,
        "* momsos formulation={} eps={} eta={}",
        f.tag, f.eps, f.eta
    );
    if let Some(l) = &sdp.layout {
        let _ = writeln!(
            s,
            "* layout n={} order={} encoding={} gram_blocks={}",
            l.nvars,
            l.order,
            l.encoding.name(),
            l.gram_blocks
        );
    }
    let _ = writeln!(s, "* offset={}", num(sdp.offset));
    let _ = writeln!(s, "{}", sdp.num_constraints());
    let _ = writeln!(s, "{}", sdp.blocks.len());
    let sizes: Vec<String> = sdp.block_sizes().iter().map(i64::to_string).collect();
    let _ = writeln!(s, "{}", sizes.join(" "));
    let c: Vec<String> = sdp.c.iter().map(|&v| num(v)).collect();
    let _ = writeln!(s, "{}", c.join(" "));
    for (k, m) in std::iter::once(&sdp.constant).chain(&sdp.constraints).enumerate() {
        let mut m = m.clone();
        m.normalize();
        for e in m.entries() {
            let _ = writeln!(
                s,
                "{} {} {} {} {}",
                k,
                e.block + 1,
                e.row + 1,
                e.col + 1,
                num(e.value)
            );
        }
    }
    s
}

pub fn export_sdpa(sdp: &SdpInstance, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_sdpa_string(sdp))?;
    Ok(())
}

pub fn import_sdpa(path: impl AsRef<Path>) -> Result<SdpInstance> {
    from_sdpa_str(&std::fs::read_to_string(path)?)
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Sdpa {
        line,
        msg: msg.into(),
    }
}

fn header_fields(text: &str) -> impl Iterator<Item = (&str, &str)> {
    text.split_whitespace().filter_map(|w| w.split_once('='))
}

fn parse_header(
    line: usize,
    text: &str,
    formulation: &mut Formulation,
    layout: &mut Option<MomentLayout>,
    offset: &mut f64,
) -> Result<()> {
    let body = text.trim_start_matches(['*', '"']).trim();
    if let Some(rest) = body.strip_prefix("momsos") {
        for (k, v) in header_fields(rest) {
            match k {
                "formulation" => formulation.tag = v.parse::<FormulationTag>()?,
                "eps" => formulation.eps = parse_rational(v).map_err(|e| err(line, e.to_string()))?,
                "eta" => formulation.eta = parse_rational(v).map_err(|e| err(line, e.to_string()))?,
                _ => {}
            }
        }
    } else if let Some(rest) = body.strip_prefix("layout") {
        let mut l = MomentLayout {
            nvars: 0,
            order: 0,
            encoding: Encoding::Moment,
            gram_blocks: 1,
        };
        for (k, v) in header_fields(rest) {
            let bad = |_| err(line, format!("bad layout field `{k}={v}`"));
            match k {
                "n" => l.nvars = v.parse().map_err(bad)?,
                "order" => l.order = v.parse().map_err(bad)?,
                "encoding" => l.encoding = v.parse()?,
                "gram_blocks" => l.gram_blocks = v.parse().map_err(bad)?,
                _ => {}
            }
        }
        if l.nvars == 0 || l.order == 0 {
            return Err(err(line, "layout needs positive n and order"));
        }
        *layout = Some(l);
    } else if let Some(v) = body.strip_prefix("offset=") {
        *offset = v
            .trim()
            .parse()
            .map_err(|_| err(line, format!("bad offset `{v}`")))?;
    }
    Ok(())
}

fn numbers<T: std::str::FromStr>(line: usize, text: &str) -> Result<Vec<T>> {
    text.replace([',', '{', '}', '(', ')'], " ")
        .split_whitespace()
        .map(|w| {
            w.parse::<T>()
                .map_err(|_| err(line, format!("cannot parse `{w}`")))
        })
        .collect()
}

/// First token of a count line; SDPA files often append `= mDIM` and the like.
fn leading_count(line: usize, text: &str) -> Result<usize> {
    let w = text.split_whitespace().next().unwrap_or("");
    w.parse()
        .map_err(|_| err(line, format!("expected a count, found `{w}`")))
}

/// Parses the sparse SDPA format. Quintuples must satisfy `i ≤ j`
/// (a lower-triangle entry is accepted only if its mirror is absent or equal).
pub fn from_sdpa_str(text: &str) -> Result<SdpInstance> {
    let mut formulation = Formulation::generic();
    let mut layout = None;
    let mut offset = 0.0;
    let mut body: Vec<(usize, &str)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if t.starts_with('*') || t.starts_with('"') {
            if body.is_empty() {
                parse_header(line, t, &mut formulation, &mut layout, &mut offset)?;
            }
            continue;
        }
        body.push((line, t));
    }
    let mut it = body.into_iter();
    let mut next = |what: &str| {
        it.next()
            .ok_or_else(|| err(text.lines().count(), format!("missing {what}")))
    };
    let (l1, t) = next("constraint count")?;
    let m: usize = leading_count(l1, t)?;
    let (l2, t) = next("block count")?;
    let nblocks: usize = leading_count(l2, t)?;
    let (l3, t) = next("block sizes")?;
    let sizes = numbers::<i64>(l3, t)?;
    if sizes.len() != nblocks {
        return Err(err(
            l3,
            format!("expected {nblocks} block sizes, found {}", sizes.len()),
        ));
    }
    let mut blocks = Vec::with_capacity(nblocks);
    for s in sizes {
        match s {
            0 => return Err(err(l3, "block size zero")),
            s if s > 0 => blocks.push(BlockSpec::dense(s as usize)),
            s => blocks.push(BlockSpec::diagonal(s.unsigned_abs() as usize)),
        }
    }
    let (l4, t) = next("objective vector")?;
    let c = numbers::<f64>(l4, t)?;
    if c.len() != m {
        return Err(err(l4, format!("expected {m} objective entries, found {}", c.len())));
    }
    let mut raw: Vec<std::collections::BTreeMap<(usize, usize, usize), f64>> =
        vec![Default::default(); m + 1];
    for (line, t) in it {
        let w: Vec<&str> = t.split_whitespace().collect();
        if w.len() != 5 {
            return Err(err(line, "expected `matno blockno i j value`"));
        }
        let idx = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| err(line, format!("bad index `{s}`")))
        };
        let (k, b, i, j) = (idx(w[0])?, idx(w[1])?, idx(w[2])?, idx(w[3])?);
        let v: f64 = w[4]
            .parse()
            .map_err(|_| err(line, format!("bad value `{}`", w[4])))?;
        if k > m {
            return Err(err(line, format!("matrix index {k} exceeds {m}")));
        }
        if b == 0 || b > nblocks {
            return Err(err(line, format!("block index {b} out of range")));
        }
        let spec = blocks[b - 1];
        if i == 0 || j == 0 || i > spec.size || j > spec.size {
            return Err(err(
                line,
                format!("entry ({i}, {j}) outside block {b} of size {}", spec.size),
            ));
        }
        if spec.kind == BlockKind::Diagonal && i != j {
            return Err(err(line, format!("off-diagonal entry in diagonal block {b}")));
        }
        let key = (b - 1, i.min(j) - 1, i.max(j) - 1);
        if let Some(prev) = raw[k].insert(key, v) {
            if prev != v {
                return Err(err(
                    line,
                    format!("non-symmetric or conflicting entry ({i}, {j}) in matrix {k}"),
                ));
            }
        }
    }
    let mut mats: Vec<SparseSym> = raw
        .into_iter()
        .map(|m| {
            let mut s = SparseSym::new();
            for ((b, r, c), v) in m {
                s.push(b, r, c, v);
            }
            s.normalize();
            s
        })
        .collect();
    let constant = mats.remove(0);
    let sdp = SdpInstance {
        formulation,
        layout,
        blocks,
        c,
        constant,
        constraints: mats,
        offset,
    };
    sdp.validate()?;
    Ok(sdp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;
    use crate::relax::{build_nominal, MomentProblem};

    fn one_by_one() -> SdpInstance {
        let mut f = SparseSym::new();
        f.push(0, 0, 0, 1.0);
        SdpInstance {
            formulation: Formulation::generic(),
            layout: None,
            blocks: vec![BlockSpec::dense(1)],
            c: vec![1.0],
            constant: SparseSym::new(),
            constraints: vec![f],
            offset: 0.0,
        }
    }

    #[test]
    fn small_instance_has_five_body_lines() {
        let s = to_sdpa_string(&one_by_one());
        let body: Vec<&str> = s.lines().filter(|l| !l.starts_with('*')).collect();
        assert_eq!(body.len(), 5);
        assert_eq!(body[4], "1 1 1 1 1.0000000000000000e0");
        assert_eq!(from_sdpa_str(&s).unwrap(), one_by_one());
    }

    #[test]
    fn motzkin_round_trip_is_identity() {
        let f = Polynomial::parse(2, "1/27 0 0\n1 4 2\n1 2 4\n-1 2 2").unwrap();
        let mp = MomentProblem::new(f, vec![], 3).unwrap();
        let (p, d) = build_nominal(&mp);
        for sdp in [p, d] {
            let s = to_sdpa_string(&sdp);
            let back = from_sdpa_str(&s).unwrap();
            assert_eq!(back, sdp);
            assert_eq!(to_sdpa_string(&back), s);
        }
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        let bad_block = "1\n1\n2\n1.0\n1 2 1 1 1.0\n";
        assert!(matches!(from_sdpa_str(bad_block), Err(Error::Sdpa { line: 5, .. })));
        let out_of_range = "1\n1\n2\n1.0\n1 1 1 3 1.0\n";
        assert!(from_sdpa_str(out_of_range).is_err());
        let asym = "1\n1\n2\n1.0\n1 1 1 2 1.0\n1 1 2 1 2.0\n";
        assert!(matches!(from_sdpa_str(asym), Err(Error::Sdpa { line: 6, .. })));
        let diag = "1\n1\n-2\n1.0\n1 1 1 2 1.0\n";
        assert!(from_sdpa_str(diag).is_err());
        assert!(from_sdpa_str("1\n1\n2\n").is_err());
    }

    #[test]
    fn accepts_sdpa_punctuation() {
        let s = "\"comment\n1 = mDIM\n1 = nBLOCK\n(2)\n{1.0}\n0 1 1 2 -1.0\n1 1 1 1 1.0\n";
        let sdp = from_sdpa_str(s).unwrap();
        assert_eq!(sdp.block_sizes(), vec![2]);
        assert_eq!(sdp.constant.entries().len(), 1);
    }
}
