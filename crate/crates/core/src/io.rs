//! Readers and canonical writers for the on-disk formats.
//!
//! Lattice and polarity files are JSON objects. Writers produce fixed
//! layouts by hand so that equal inputs give byte-identical files.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::logic::{parse_equation, parse_formula, Equation, Formula};
use crate::order::{FiniteLattice, LatticeBasedAlgebra, Operation, Radix};
use crate::polarity::Polarity;

fn json_err(e: serde_json::Error) -> Error {
    Error::Format(format!("{} at {}:{}", strip_position(&e.to_string()), e.line(), e.column()))
}

fn strip_position(msg: &str) -> &str {
    msg.split(" at line ").next().unwrap_or(msg)
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn index_names(names: &[String]) -> Result<HashMap<&str, usize>> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.as_str(), i).is_some() {
            return Err(Error::NameClash(n.clone()));
        }
    }
    Ok(index)
}

fn lookup(index: &HashMap<&str, usize>, name: &str) -> Result<usize> {
    index.get(name).copied().ok_or_else(|| Error::UnknownElement(name.to_string()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OpPayload {
    name: String,
    arity: usize,
    table: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticePayload {
    elements: Vec<String>,
    leq: Option<Vec<(String, String)>>,
    covers: Option<Vec<(String, String)>>,
    #[serde(default)]
    ops: Vec<OpPayload>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolarityPayload {
    #[serde(rename = "X")]
    x: Vec<String>,
    #[serde(rename = "Y")]
    y: Vec<String>,
    #[serde(rename = "R")]
    r: Vec<(String, String)>,
}

impl LatticePayload {
    fn build(self) -> Result<LatticeBasedAlgebra> {
        let index = index_names(&self.elements)?;
        let pairs = |ps: &[(String, String)]| -> Result<Vec<(usize, usize)>> {
            ps.iter().map(|(a, b)| Ok((lookup(&index, a)?, lookup(&index, b)?))).collect()
        };
        let n = self.elements.len();
        let lattice = match (&self.leq, &self.covers) {
            (Some(leq), None) => {
                // Reflexive pairs may be left out; everything else must be listed.
                let mut m = vec![vec![false; n]; n];
                for (a, row) in m.iter_mut().enumerate() {
                    row[a] = true;
                }
                for (a, b) in pairs(leq)? {
                    m[a][b] = true;
                }
                crate::order::validate_lattice(&m, self.elements.clone())?
            }
            (None, Some(covers)) => FiniteLattice::from_covers(self.elements.clone(), &pairs(covers)?)?,
            _ => return Err(Error::Format("a lattice needs exactly one of \"leq\" and \"covers\"".into())),
        };
        let ops = self
            .ops
            .iter()
            .map(|op| {
                let table = op.table.iter().map(|v| lookup(&index, v)).collect::<Result<Vec<_>>>()?;
                Ok(Operation {
                    name: op.name.clone(),
                    arity: op.arity,
                    table,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        LatticeBasedAlgebra::new(Arc::new(lattice), ops)
    }
}

impl PolarityPayload {
    fn build(self) -> Result<Polarity> {
        let xi = index_names(&self.x)?;
        let yi = index_names(&self.y)?;
        let pairs = self
            .r
            .iter()
            .map(|(a, b)| Ok((lookup(&xi, a)?, lookup(&yi, b)?)))
            .collect::<Result<Vec<_>>>()?;
        Polarity::new(self.x, self.y, &pairs)
    }
}

/// Reads a lattice file, ignoring any operations it declares.
pub fn read_lattice(text: &str) -> Result<FiniteLattice> {
    let a = read_algebra(text)?;
    Ok(Arc::try_unwrap(a.lattice).unwrap_or_else(|l| (*l).clone()))
}

/// Reads a lattice file together with its `"ops"` tables.
pub fn read_algebra(text: &str) -> Result<LatticeBasedAlgebra> {
    serde_json::from_str::<LatticePayload>(text).map_err(json_err)?.build()
}

fn write_string_list(out: &mut String, key: &str, items: &[&str]) {
    let body: Vec<String> = items.iter().map(|s| quote(s)).collect();
    write!(out, "  {}: [{}]", quote(key), body.join(", ")).expect("string write");
}

fn write_pair_list(out: &mut String, key: &str, pairs: &[(&str, &str)]) {
    if pairs.is_empty() {
        write!(out, "  {}: []", quote(key)).expect("string write");
        return;
    }
    writeln!(out, "  {}: [", quote(key)).expect("string write");
    let body: Vec<String> = pairs.iter().map(|(a, b)| format!("    [{}, {}]", quote(a), quote(b))).collect();
    write!(out, "{}\n  ]", body.join(",\n")).expect("string write");
}

/// Canonical lattice file: names sorted, cover pairs sorted.
pub fn write_lattice(l: &FiniteLattice) -> String {
    write_algebra(&LatticeBasedAlgebra::from(Arc::new(l.clone())))
}

/// Canonical lattice file with operation tables. Tables keep the lattice's
/// own argument order, so names are sorted only when there are no operations.
pub fn write_algebra(a: &LatticeBasedAlgebra) -> String {
    let l = &a.lattice;
    let mut names: Vec<&str> = l.names().iter().map(|s| s.as_str()).collect();
    if a.ops.is_empty() {
        names.sort_unstable();
    }
    let mut covers: Vec<(&str, &str)> = l.covers().into_iter().map(|(x, y)| (l.name(x), l.name(y))).collect();
    covers.sort_unstable();
    let mut out = String::from("{\n");
    write_string_list(&mut out, "elements", &names);
    out.push_str(",\n");
    write_pair_list(&mut out, "covers", &covers);
    if !a.ops.is_empty() {
        out.push_str(",\n  \"ops\": [\n");
        let ops: Vec<String> = a
            .ops
            .iter()
            .map(|op| {
                let table: Vec<String> = op.table.iter().map(|&v| quote(l.name(v))).collect();
                format!(
                    "    {{\"name\": {}, \"arity\": {}, \"table\": [{}]}}",
                    quote(&op.name),
                    op.arity,
                    table.join(", ")
                )
            })
            .collect();
        out.push_str(&ops.join(",\n"));
        out.push_str("\n  ]");
    }
    out.push_str("\n}\n");
    out
}

pub fn read_polarity(text: &str) -> Result<Polarity> {
    serde_json::from_str::<PolarityPayload>(text).map_err(json_err)?.build()
}

/// Canonical polarity file. Carriers keep their order so that conversion
/// to and from the context format is lossless; pairs are listed row by row.
pub fn write_polarity(p: &Polarity) -> String {
    let xs: Vec<&str> = p.x_names().iter().map(|s| s.as_str()).collect();
    let ys: Vec<&str> = p.y_names().iter().map(|s| s.as_str()).collect();
    let pairs: Vec<(&str, &str)> = p.pairs().into_iter().map(|(x, y)| (xs[x], ys[y])).collect();
    let mut out = String::from("{\n");
    write_string_list(&mut out, "X", &xs);
    out.push_str(",\n");
    write_string_list(&mut out, "Y", &ys);
    out.push_str(",\n");
    write_pair_list(&mut out, "R", &pairs);
    out.push_str("\n}\n");
    out
}

fn malformed(line: usize, message: impl Into<String>) -> Error {
    Error::MalformedContext {
        line,
        message: message.into(),
    }
}

struct Lines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Lines<'a> {
    /// The next line and its 1-based number.
    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let l = *self
            .lines
            .get(self.pos)
            .ok_or_else(|| malformed(self.pos + 1, format!("missing {what}")))?;
        self.pos += 1;
        Ok((self.pos, l))
    }

    fn next_is_blank(&self) -> bool {
        self.lines.get(self.pos).is_some_and(|l| l.trim().is_empty())
    }

    fn count(&mut self, what: &str) -> Result<usize> {
        let (n, l) = self.next(what)?;
        l.trim().parse().map_err(|_| malformed(n, format!("expected the {what}")))
    }
}

/// Reads a Burmeister context: `B`, a blank line, `|X|`, `|Y|`, a blank line,
/// the object and attribute names, then one `.`/`X` row per object. Both
/// blank lines are optional.
pub fn read_cxt(text: &str) -> Result<Polarity> {
    let mut src = Lines {
        lines: text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l)).collect(),
        pos: 0,
    };
    let (n, head) = src.next("header")?;
    if head.trim() != "B" {
        return Err(malformed(n, "expected `B`"));
    }
    if src.next_is_blank() {
        src.next("")?;
    }
    let nx = src.count("object count")?;
    let ny = src.count("attribute count")?;
    if src.next_is_blank() && nx + ny > 0 {
        src.next("")?;
    }
    let mut names = Vec::with_capacity(nx + ny);
    while names.len() < nx + ny {
        names.push(src.next("a name")?.1.to_string());
    }
    let y_names = names.split_off(nx);
    let mut rows = Vec::with_capacity(nx);
    for _ in 0..nx {
        let (n, row) = src.next("a relation row")?;
        let row = row.trim_end();
        if row.chars().count() != ny {
            return Err(malformed(n, format!("row has {} entries, expected {ny}", row.chars().count())));
        }
        let mut bits = crate::bitset::BitSet::new(ny);
        for (y, c) in row.chars().enumerate() {
            match c {
                'X' | 'x' => bits.insert(y),
                '.' => {}
                other => return Err(malformed(n, format!("unexpected `{other}` in a relation row"))),
            }
        }
        rows.push(bits);
    }
    while src.pos < src.lines.len() {
        let (n, l) = src.next("")?;
        if !l.trim().is_empty() {
            return Err(malformed(n, "unexpected text after the relation rows"));
        }
    }
    Polarity::from_rows(names, y_names, rows)
}

pub fn write_cxt(p: &Polarity) -> String {
    let mut out = format!("B\n\n{}\n{}\n\n", p.x_len(), p.y_len());
    for name in p.x_names().iter().chain(p.y_names()) {
        out.push_str(name);
        out.push('\n');
    }
    for x in 0..p.x_len() {
        out.extend((0..p.y_len()).map(|y| if p.related(x, y) { 'X' } else { '.' }));
        out.push('\n');
    }
    out
}

/// A family of structures with an optional principal index.
#[derive(Debug, Clone)]
pub enum Family {
    Polarities(Vec<Polarity>),
    Algebras(Vec<LatticeBasedAlgebra>),
}

#[derive(Debug, Clone)]
pub struct FamilyFile {
    pub family: Family,
    pub ultrafilter: Option<usize>,
}

impl Family {
    pub fn len(&self) -> usize {
        match self {
            Family::Polarities(v) => v.len(),
            Family::Algebras(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyPayload {
    members: Vec<serde_json::Value>,
    ultrafilter: Option<usize>,
}

pub fn read_family(text: &str) -> Result<FamilyFile> {
    let payload: FamilyPayload = serde_json::from_str(text).map_err(json_err)?;
    if payload.members.is_empty() {
        return Err(Error::InvalidContext("the family has no members".into()));
    }
    let is_polarity = |v: &serde_json::Value| v.get("X").is_some();
    let family = if payload.members.iter().all(is_polarity) {
        Family::Polarities(
            payload
                .members
                .into_iter()
                .map(|v| serde_json::from_value::<PolarityPayload>(v).map_err(json_err)?.build())
                .collect::<Result<_>>()?,
        )
    } else if payload.members.iter().any(is_polarity) {
        return Err(Error::Format("a family mixes polarities and lattices".into()));
    } else {
        Family::Algebras(
            payload
                .members
                .into_iter()
                .map(|v| serde_json::from_value::<LatticePayload>(v).map_err(json_err)?.build())
                .collect::<Result<_>>()?,
        )
    };
    if let Some(i) = payload.ultrafilter {
        if i >= family.len() {
            return Err(Error::InvalidContext(format!(
                "ultrafilter index {i} outside a family of {}",
                family.len()
            )));
        }
    }
    Ok(FamilyFile {
        family,
        ultrafilter: payload.ultrafilter,
    })
}

pub fn write_family(f: &FamilyFile) -> String {
    let members: Vec<String> = match &f.family {
        Family::Polarities(v) => v.iter().map(write_polarity).collect(),
        Family::Algebras(v) => v.iter().map(write_algebra).collect(),
    };
    let indented: Vec<String> = members
        .iter()
        .map(|m| m.trim_end().lines().map(|l| format!("    {l}")).collect::<Vec<_>>().join("\n"))
        .collect();
    let mut out = format!("{{\n  \"members\": [\n{}\n  ]", indented.join(",\n"));
    if let Some(i) = f.ultrafilter {
        write!(out, ",\n  \"ultrafilter\": {i}").expect("string write");
    }
    out.push_str("\n}\n");
    out
}

/// Lines holding content, with `#` comments and blank lines dropped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let body = l.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then_some((i + 1, body))
    })
}

fn at_line(e: Error, line: usize) -> Error {
    match e {
        Error::Syntax { column, message, .. } => Error::Syntax { line, column, message },
        Error::UnknownSymbol { name, column, .. } => Error::UnknownSymbol { name, line, column },
        other => other,
    }
}

/// One formula per line; `#` starts a comment.
pub fn read_formula_corpus(text: &str) -> Result<Vec<(usize, Formula)>> {
    content_lines(text)
        .map(|(n, l)| parse_formula(l).map(|f| (n, f)).map_err(|e| at_line(e, n)))
        .collect()
}

/// Lines of the form `s = t`; `#` starts a comment.
pub fn read_equations(text: &str) -> Result<Vec<(usize, Equation)>> {
    content_lines(text)
        .map(|(n, l)| parse_equation(l).map(|e| (n, e)).map_err(|e| at_line(e, n)))
        .collect()
}

/// Hasse diagram in DOT: covers only, bottom first, one rank per height.
pub fn write_dot(l: &FiniteLattice) -> String {
    let mut order: Vec<usize> = l.elements().collect();
    order.sort_by(|&a, &b| (l.height(a), l.name(a)).cmp(&(l.height(b), l.name(b))));
    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=plaintext];\n");
    let mut h = 0;
    let mut start = 0;
    while start < order.len() {
        let end = start + order[start..].iter().take_while(|&&a| l.height(a) == h).count();
        let rank: Vec<String> = order[start..end].iter().map(|&a| quote(l.name(a))).collect();
        if !rank.is_empty() {
            writeln!(out, "  {{ rank=same; {}; }}", rank.join("; ")).expect("string write");
        }
        start = end;
        h += 1;
    }
    let mut edges: Vec<(&str, &str)> = l.covers().into_iter().map(|(a, b)| (l.name(a), l.name(b))).collect();
    edges.sort_unstable();
    for (a, b) in edges {
        writeln!(out, "  {} -> {};", quote(a), quote(b)).expect("string write");
    }
    out.push_str("}\n");
    out
}

/// Operation tables in a lattice's argument order, for display.
pub fn operation_rows(a: &LatticeBasedAlgebra, op: &Operation) -> Vec<(Vec<String>, String)> {
    let n = a.lattice.len();
    let radix = Radix::new(vec![n; op.arity]);
    (0..op.table.len())
        .map(|i| {
            let args = radix.decode(i).iter().map(|&x| a.lattice.name(x).to_string()).collect();
            (args, a.lattice.name(op.table[i]).to_string())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::catalog::*;
    use crate::order::find_isomorphism;
    use crate::bounds::Bounds;

    const ID2: &str = "B\n\n2\n2\n\ng\nh\nm\nn\nX.\n.X\n";

    #[test]
    fn cxt_round_trip() {
        let p = read_cxt(ID2).unwrap();
        assert_eq!(p, Polarity::new(
            vec!["g".into(), "h".into()],
            vec!["m".into(), "n".into()],
            &[(0, 0), (1, 1)],
        )
        .unwrap());
        assert_eq!(write_cxt(&p), ID2);
        let json = write_polarity(&p);
        assert_eq!(write_cxt(&read_polarity(&json).unwrap()), ID2);
        assert_eq!(write_polarity(&read_polarity(&json).unwrap()), json);
    }

    #[test]
    fn cxt_errors() {
        let short = "B\n\n2\n2\n\ng\nh\nm\nn\nX\n.X\n";
        assert!(matches!(read_cxt(short), Err(Error::MalformedContext { line: 10, .. })));
        assert!(matches!(read_cxt("A\n"), Err(Error::MalformedContext { line: 1, .. })));
        assert!(matches!(read_cxt("B\n\n1\n1\n\na\nb\nZ\n"), Err(Error::MalformedContext { .. })));
        assert!(matches!(read_cxt("B\n\n2\n0\n\na\na\n\n\n"), Err(Error::NameClash(_))));
        assert!(matches!(read_cxt("B\n\n1\n1\n\na\nb\nX\nextra\n"), Err(Error::MalformedContext { line: 9, .. })));
    }

    #[test]
    fn cxt_without_blank_separator_and_crlf() {
        let p = read_cxt("B\r\n\r\n1\r\n2\r\na\r\nb\r\nc\r\n.X\r\n").unwrap();
        assert_eq!(p.x_names(), ["a"]);
        assert!(p.related(0, 1) && !p.related(0, 0));
    }

    #[test]
    fn empty_context() {
        let p = Polarity::from_fn(0, 0, |_, _| false);
        assert_eq!(read_cxt(&write_cxt(&p)).unwrap(), p);
    }

    #[test]
    fn polarity_json_errors() {
        let dup = r#"{"X": ["a", "a"], "Y": [], "R": []}"#;
        assert!(matches!(read_polarity(dup), Err(Error::NameClash(_))));
        let unknown = r#"{"X": ["a"], "Y": ["b"], "R": [["a", "c"]]}"#;
        assert!(matches!(read_polarity(unknown), Err(Error::UnknownElement(_))));
        assert!(matches!(read_polarity("{"), Err(Error::Format(_))));
    }

    #[test]
    fn lattice_files() {
        for l in [chain(3), m3(), n5(), boolean(3)] {
            let text = write_lattice(&l);
            let back = read_lattice(&text).unwrap();
            assert_eq!(write_lattice(&back), text);
            let (a, b) = (Arc::new(l), Arc::new(back));
            assert!(find_isomorphism(&a, &b, &Bounds::default()).unwrap().is_some());
        }
        let leq = r#"{"elements": ["1", "0"], "leq": [["0", "1"]]}"#;
        assert_eq!(write_lattice(&read_lattice(leq).unwrap()), write_lattice(&chain(2)));
        let both = r#"{"elements": ["0"], "leq": [], "covers": []}"#;
        assert!(matches!(read_lattice(both), Err(Error::Format(_))));
        let not_lattice = r#"{"elements": ["a", "b"], "covers": []}"#;
        assert!(read_lattice(not_lattice).is_err());
    }

    #[test]
    fn canonical_lattice_layout() {
        assert_eq!(
            write_lattice(&chain(2)),
            "{\n  \"elements\": [\"0\", \"1\"],\n  \"covers\": [\n    [\"0\", \"1\"]\n  ]\n}\n"
        );
    }

    #[test]
    fn algebra_files() {
        let l = Arc::new(chain(3));
        let neg = Operation::from_fn("neg", 1, 3, |x| 2 - x[0]);
        let a = LatticeBasedAlgebra::new(l, vec![neg]).unwrap();
        let text = write_algebra(&a);
        let back = read_algebra(&text).unwrap();
        assert_eq!(back.op("neg").unwrap().table, vec![2, 1, 0]);
        assert_eq!(write_algebra(&back), text);
    }

    #[test]
    fn families() {
        let f = FamilyFile {
            family: Family::Polarities(vec![Polarity::identity(2), Polarity::from_fn(1, 2, |_, y| y == 0)]),
            ultrafilter: Some(1),
        };
        let text = write_family(&f);
        let back = read_family(&text).unwrap();
        assert_eq!(back.ultrafilter, Some(1));
        assert_eq!(write_family(&back), text);
        let bad = r#"{"members": [{"X": [], "Y": [], "R": []}], "ultrafilter": 3}"#;
        assert!(read_family(bad).is_err());
        let mixed = r#"{"members": [{"X": [], "Y": [], "R": []}, {"elements": ["0"], "covers": []}]}"#;
        assert!(matches!(read_family(mixed), Err(Error::Format(_))));
    }

    #[test]
    fn corpus_lines() {
        let text = "# comment\nR(v0,v1)\n\nforall v0 . S(v0) # trailing\n";
        let fs = read_formula_corpus(text).unwrap();
        assert_eq!(fs.iter().map(|(n, _)| *n).collect::<Vec<_>>(), vec![2, 4]);
        assert!(matches!(read_formula_corpus("X(v0)\nR(v0,\n"), Err(Error::Syntax { line: 2, .. })));
        let eqs = read_equations("x ^ y = y ^ x\n# c\nx v 0 = x\n").unwrap();
        assert_eq!(eqs.len(), 2);
    }

    #[test]
    fn dot_output() {
        let d = write_dot(&chain(3));
        assert_eq!(d.matches("->").count(), 2);
        assert_eq!(d, write_dot(&chain(3)));
        assert!(d.contains("{ rank=same; \"0\"; }"));
        assert_eq!(write_dot(&m3()).matches("->").count(), 6);
    }
}
