//! Line-oriented text formats for specs, patterns, codes, layouts and
//! codecs.
//!
//! Every file starts with `# format v1`. Other lines starting with `#` are
//! comments; blank lines are ignored; tokens are separated by whitespace.
//! Errors carry 1-based line and column numbers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;
use std::str::FromStr;

use crate::conjugacy::SlidingBlockCode;
use crate::factor::{CodecDomain, DeterminedZoneLayout, MarkerParams, PsiCodec, Zone, ZoneCode};
use crate::geometry::{Region, Site};
use crate::pattern::{Alphabet, Pattern, Symbol};
use crate::sft::SftSpec;
use crate::{Error, Result};

pub const HEADER: &str = "# format v1";

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

struct Line<'a> {
    no: usize,
    tokens: Vec<(usize, &'a str)>,
}

impl<'a> Line<'a> {
    fn keyword(&self) -> &'a str {
        self.tokens[0].1
    }

    fn err(&self, i: usize, message: impl Into<String>) -> Error {
        let col = self.tokens.get(i).or(self.tokens.last()).map_or(1, |t| t.0);
        parse_err(self.no, col, message)
    }

    fn arity(&self, n: usize) -> Result<()> {
        if self.tokens.len() != n {
            return Err(self.err(self.tokens.len().min(n), format!("`{}` takes {} values", self.keyword(), n - 1)));
        }
        Ok(())
    }

    fn num<T: FromStr>(&self, i: usize, what: &str) -> Result<T> {
        let tok = self.tokens.get(i).ok_or_else(|| self.err(i, format!("missing {what}")))?.1;
        tok.parse().map_err(|_| self.err(i, format!("invalid {what} `{tok}`")))
    }

    fn nums<T: FromStr>(&self, from: usize, what: &str) -> Result<Vec<T>> {
        (from..self.tokens.len()).map(|i| self.num(i, what)).collect()
    }

    fn expect(&self, i: usize, word: &str) -> Result<()> {
        match self.tokens.get(i) {
            Some((_, t)) if *t == word => Ok(()),
            Some((_, t)) => Err(self.err(i, format!("expected `{word}`, found `{t}`"))),
            None => Err(self.err(i, format!("expected `{word}`"))),
        }
    }
}

struct Reader<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
    end: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Result<Self> {
        let mut raw = text.lines().enumerate();
        match raw.next() {
            Some((_, first)) if first.trim() == HEADER => {}
            Some((_, first)) if first.trim_start().starts_with("# format") => {
                return Err(parse_err(1, 1, format!("unsupported version `{}`", first.trim())));
            }
            _ => return Err(parse_err(1, 1, format!("missing `{HEADER}` header"))),
        }
        let mut lines = Vec::new();
        let mut end = 1;
        for (i, l) in raw {
            end = i + 1;
            if l.trim_start().starts_with('#') {
                continue;
            }
            let mut tokens = Vec::new();
            let mut start = None;
            for (c, ch) in l.char_indices().chain(std::iter::once((l.len(), ' '))) {
                match (ch.is_whitespace(), start) {
                    (false, None) => start = Some(c),
                    (true, Some(s)) => {
                        tokens.push((l[..s].chars().count() + 1, &l[s..c]));
                        start = None;
                    }
                    _ => {}
                }
            }
            if !tokens.is_empty() {
                lines.push(Line { no: i + 1, tokens });
            }
        }
        Ok(Reader { lines, pos: 0, end })
    }

    fn peek(&self) -> Option<&Line<'a>> {
        self.lines.get(self.pos)
    }

    fn next(&mut self, what: &str) -> Result<&Line<'a>> {
        let end = self.end;
        let line = self.lines.get(self.pos).ok_or_else(|| parse_err(end + 1, 1, format!("unexpected end of file, expected {what}")))?;
        self.pos += 1;
        Ok(line)
    }

    fn keyword_line(&mut self, kw: &str) -> Result<&Line<'a>> {
        let line = self.next(&format!("`{kw}`"))?;
        line.expect(0, kw)?;
        Ok(line)
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            Some(l) => Err(l.err(0, format!("unexpected `{}`", l.keyword()))),
            None => Ok(()),
        }
    }

    /// Cell lines `<c1> … <cd> <symbol>` up to `end`.
    fn pattern_block(&mut self, dim: usize, symbol: &dyn Fn(&str) -> Option<Symbol>) -> Result<Pattern> {
        let mut cells = BTreeMap::new();
        loop {
            let line = self.next("`end`")?;
            if line.keyword() == "end" {
                line.arity(1)?;
                break;
            }
            if line.tokens.len() != dim + 1 {
                return Err(line.err(line.tokens.len().min(dim), format!("cell needs {dim} coordinates and a symbol")));
            }
            let site = Site::new((0..dim).map(|i| line.num::<i64>(i, "coordinate")).collect::<Result<Vec<_>>>()?);
            let (col, tok) = line.tokens[dim];
            let a = symbol(tok).ok_or_else(|| parse_err(line.no, col, format!("undeclared symbol `{tok}`")))?;
            if cells.insert(site.clone(), a).is_some() {
                return Err(line.err(0, format!("duplicate site {site}")));
            }
        }
        if cells.is_empty() {
            return Err(parse_err(self.lines[self.pos - 1].no, 1, "empty pattern"));
        }
        Pattern::from_cells(dim, cells)
    }

    fn dim_line(&mut self) -> Result<usize> {
        let line = self.keyword_line("dim")?;
        line.arity(2)?;
        let d: usize = line.num(1, "dimension")?;
        if d == 0 {
            return Err(line.err(1, "dimension must be at least 1"));
        }
        Ok(d)
    }

    fn alphabet_line(&mut self, kw: &str) -> Result<Alphabet> {
        let line = self.keyword_line(kw)?;
        if line.tokens.len() < 2 {
            return Err(line.err(1, "alphabet needs at least one symbol"));
        }
        let mut seen = BTreeSet::new();
        for (i, (_, t)) in line.tokens.iter().enumerate().skip(1) {
            if !seen.insert(*t) {
                return Err(line.err(i, format!("duplicate symbol `{t}`")));
            }
        }
        Alphabet::new(line.tokens[1..].iter().map(|t| t.1))
    }
}

fn write_cells(out: &mut String, w: &Pattern, name: impl Fn(Symbol) -> String) {
    out.push_str("pattern\n");
    for (s, a) in w.iter() {
        for c in s.coords() {
            write!(out, "{c} ").unwrap();
        }
        writeln!(out, "{}", name(a)).unwrap();
    }
    out.push_str("end\n");
}

fn index_symbol(tok: &str) -> Option<Symbol> {
    tok.parse::<u16>().ok().map(Symbol)
}

/// `dim`, `alphabet`, an optional `extension <g>` certificate, then
/// `pattern` … `end` blocks of forbidden patterns.
pub fn parse_spec(text: &str) -> Result<SftSpec> {
    let mut r = Reader::new(text)?;
    let dim = r.dim_line()?;
    let alphabet = r.alphabet_line("alphabet")?;
    let mut extension = None;
    if let Some(line) = r.peek().filter(|l| l.keyword() == "extension") {
        line.arity(2)?;
        extension = Some(line.num::<u64>(1, "extension radius")?);
        r.pos += 1;
    }
    let mut forbidden = Vec::new();
    let lookup = |t: &str| alphabet.lookup(t);
    while let Some(line) = r.peek() {
        line.expect(0, "pattern")?;
        line.arity(1)?;
        r.pos += 1;
        forbidden.push(r.pattern_block(dim, &lookup)?);
    }
    let spec = SftSpec::new(dim, alphabet, forbidden)?;
    Ok(match extension {
        Some(g) => spec.with_extension_certificate(g),
        None => spec,
    })
}

pub fn print_spec(spec: &SftSpec) -> String {
    let mut out = format!("{HEADER}\ndim {}\nalphabet {}\n", spec.dim(), spec.alphabet().names().join(" "));
    if let Some(g) = spec.certified_extension() {
        writeln!(out, "extension {g}").unwrap();
    }
    for f in spec.forbidden() {
        write_cells(&mut out, f, |a| spec.alphabet().name(a).to_string());
    }
    out
}

/// `dim`, `alphabet`, and a single `pattern` block.
pub fn parse_pattern_file(text: &str) -> Result<(Alphabet, Pattern)> {
    let mut r = Reader::new(text)?;
    let dim = r.dim_line()?;
    let alphabet = r.alphabet_line("alphabet")?;
    r.keyword_line("pattern")?.arity(1)?;
    let w = r.pattern_block(dim, &|t| alphabet.lookup(t))?;
    r.finish()?;
    Ok((alphabet, w))
}

pub fn print_pattern_file(alphabet: &Alphabet, w: &Pattern) -> String {
    let mut out = format!("{HEADER}\ndim {}\nalphabet {}\n", w.dim(), alphabet.names().join(" "));
    write_cells(&mut out, w, |a| alphabet.name(a).to_string());
    out
}

/// `code n=<radius>`, `dim`, `source`, `target`, then one line
/// `<neighborhood symbols> -> <symbol>` per rule entry, with the
/// neighborhood listed in the order of [`SlidingBlockCode::offsets`].
pub fn parse_code(text: &str) -> Result<SlidingBlockCode> {
    let mut r = Reader::new(text)?;
    let head = r.keyword_line("code")?;
    head.arity(2)?;
    let radius: u64 = head.tokens[1]
        .1
        .strip_prefix("n=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| head.err(1, "expected `n=<radius>`"))?;
    let dim = r.dim_line()?;
    let source = r.alphabet_line("source")?;
    let target = r.alphabet_line("target")?;
    let width = (2 * radius as usize + 1).pow(dim as u32);
    let mut rule = BTreeMap::new();
    while let Some(line) = r.peek() {
        if line.tokens.len() != width + 2 || line.tokens[width].1 != "->" {
            return Err(line.err(line.tokens.len().min(width), format!("rule needs {width} symbols, `->` and an image")));
        }
        let mut key = Vec::with_capacity(width);
        for i in 0..width {
            let (col, t) = line.tokens[i];
            key.push(source.lookup(t).ok_or_else(|| parse_err(line.no, col, format!("undeclared source symbol `{t}`")))?);
        }
        let (col, t) = line.tokens[width + 1];
        let out = target.lookup(t).ok_or_else(|| parse_err(line.no, col, format!("undeclared target symbol `{t}`")))?;
        if rule.insert(key, out).is_some() {
            return Err(line.err(0, "duplicate neighborhood"));
        }
        r.pos += 1;
    }
    SlidingBlockCode::new(dim, source, target, radius, rule)
}

pub fn print_code(code: &SlidingBlockCode) -> String {
    let mut out = format!(
        "{HEADER}\ncode n={}\ndim {}\nsource {}\ntarget {}\n",
        code.radius(),
        code.dim(),
        code.source().names().join(" "),
        code.target().names().join(" ")
    );
    for (key, &img) in code.rule() {
        for &a in key {
            write!(out, "{} ", code.source().name(a)).unwrap();
        }
        writeln!(out, "-> {}", code.target().name(img)).unwrap();
    }
    out
}

fn parse_params(line: &Line, dim: usize) -> Result<MarkerParams> {
    let mode = line.tokens.get(1).map(|t| t.1).unwrap_or("");
    let mut values = BTreeMap::new();
    let mut i = 2;
    while i < line.tokens.len() {
        let key = line.tokens[i].1;
        if !["g", "p", "q", "m", "k"].contains(&key) {
            return Err(line.err(i, format!("unknown parameter `{key}`")));
        }
        if values.insert(key, line.num::<u64>(i + 1, key)?).is_some() {
            return Err(line.err(i, format!("parameter `{key}` given twice")));
        }
        i += 2;
    }
    let get = |k: &str| values.get(k).copied().ok_or_else(|| line.err(0, format!("missing parameter `{k}`")));
    let params = match mode {
        "synthetic" => MarkerParams::synthetic(dim, get("g")?, get("p")?, get("m")?, get("k")?),
        "real" => MarkerParams::real(dim, get("g")?, get("p")?, get("q")?, get("k")?),
        _ => return Err(line.err(1, "expected `synthetic` or `real`")),
    };
    params.map_err(|e| line.err(1, e.to_string()))
}

/// `layout dim <d>`, `params synthetic|real <key> <value> …`,
/// `window <origin> <extents>`, then zone lines
/// `zone <origin> digits <i_1> …`, `zone <origin> rank <r>` or
/// `zone <origin> pattern` followed by cells with symbol indices.
pub fn parse_layout(text: &str) -> Result<DeterminedZoneLayout> {
    let mut r = Reader::new(text)?;
    let head = r.keyword_line("layout")?;
    head.arity(3)?;
    head.expect(1, "dim")?;
    let dim: usize = head.num(2, "dimension")?;
    if dim == 0 {
        return Err(head.err(2, "dimension must be at least 1"));
    }
    let params = parse_params(r.keyword_line("params")?, dim)?;
    let wl = r.keyword_line("window")?;
    wl.arity(1 + 2 * dim)?;
    let origin = Site::new(wl.nums::<i64>(1, "coordinate")?.into_iter().take(dim));
    let extents: Vec<usize> = (0..dim).map(|i| wl.num(1 + dim + i, "extent")).collect::<Result<_>>()?;
    let window = Region::new(origin, extents);
    let mut zones = Vec::new();
    while r.peek().is_some() {
        let line = r.keyword_line("zone")?;
        if line.tokens.len() < dim + 2 {
            return Err(line.err(line.tokens.len(), "zone needs an origin and a code"));
        }
        let origin = Site::new((0..dim).map(|i| line.num::<i64>(1 + i, "coordinate")).collect::<Result<Vec<_>>>()?);
        let k = 1 + dim;
        let code = match line.tokens[k].1 {
            "digits" => ZoneCode::Digits(line.nums(k + 1, "digit")?),
            "rank" => {
                line.arity(k + 2)?;
                ZoneCode::Rank(line.num(k + 1, "rank")?)
            }
            "pattern" => {
                line.arity(k + 1)?;
                ZoneCode::Pattern(r.pattern_block(dim, &index_symbol)?)
            }
            other => return Err(line.err(k, format!("unknown zone code `{other}`"))),
        };
        zones.push(Zone { origin, code });
    }
    DeterminedZoneLayout::new(dim, params, zones, window)
}

pub fn print_layout(layout: &DeterminedZoneLayout) -> String {
    let p = &layout.params;
    let mut out = format!("{HEADER}\nlayout dim {}\n", layout.dim);
    if p.synthetic {
        writeln!(out, "params synthetic g {} p {} m {} k {}", p.g, p.p, p.m, p.k).unwrap();
    } else {
        writeln!(out, "params real g {} p {} q {} k {}", p.g, p.p, p.q, p.k).unwrap();
    }
    let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(" ");
    writeln!(
        out,
        "window {} {}",
        join(&mut layout.window.origin().coords().iter().map(i64::to_string)),
        join(&mut layout.window.extents().iter().map(usize::to_string))
    )
    .unwrap();
    for z in &layout.zones {
        write!(out, "zone {}", join(&mut z.origin.coords().iter().map(i64::to_string))).unwrap();
        match &z.code {
            ZoneCode::Digits(d) => writeln!(out, " digits {}", join(&mut d.iter().map(u128::to_string))).unwrap(),
            ZoneCode::Rank(r) => writeln!(out, " rank {r}").unwrap(),
            ZoneCode::Pattern(w) => {
                out.push(' ');
                write_cells(&mut out, w, |a| a.0.to_string());
            }
        }
    }
    out
}

/// `codec`, `ranges <R_1> …`, then `domain size <n>` or
/// `domain enumerated dim <d>` followed by pattern blocks with symbol
/// indices in increasing order.
pub fn parse_codec(text: &str) -> Result<PsiCodec> {
    let mut r = Reader::new(text)?;
    r.keyword_line("codec")?.arity(1)?;
    let rl = r.keyword_line("ranges")?;
    let ranges: Vec<u128> = rl.nums(1, "range")?;
    if ranges.is_empty() {
        return Err(rl.err(1, "missing ranges"));
    }
    let dl = r.keyword_line("domain")?;
    let domain = match dl.tokens.get(1).map(|t| t.1) {
        Some("size") => {
            dl.arity(3)?;
            CodecDomain::Size(dl.num(2, "domain size")?)
        }
        Some("enumerated") => {
            dl.arity(4)?;
            dl.expect(2, "dim")?;
            let dim: usize = dl.num(3, "dimension")?;
            let mut list = Vec::new();
            while r.peek().is_some() {
                r.keyword_line("pattern")?.arity(1)?;
                list.push(r.pattern_block(dim, &index_symbol)?);
            }
            CodecDomain::Enumerated(list)
        }
        _ => return Err(dl.err(1, "expected `size` or `enumerated`")),
    };
    r.finish()?;
    PsiCodec::new(ranges, domain)
}

pub fn print_codec(codec: &PsiCodec) -> String {
    let ranges: Vec<String> = codec.ranges().iter().map(u128::to_string).collect();
    let mut out = format!("{HEADER}\ncodec\nranges {}\n", ranges.join(" "));
    match codec.domain() {
        CodecDomain::Size(n) => writeln!(out, "domain size {n}").unwrap(),
        CodecDomain::Enumerated(list) => {
            let dim = list.first().map_or(1, Pattern::dim);
            writeln!(out, "domain enumerated dim {dim}").unwrap();
            for w in list {
                write_cells(&mut out, w, |a| a.0.to_string());
            }
        }
    }
    out
}
