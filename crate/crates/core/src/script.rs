//! Line-oriented construction DSL: parser with per-line error recovery and a
//! canonical formatter. `#` starts a comment; files use the `.lcy` extension.

use std::fmt::Write as _;

use num_traits::One;

use crate::ade::LabelSet;
use crate::lattice::{Int, Rat};
use crate::pairs::DualComplexType;

/// A parse error anchored to a position in the input text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub token: String,
}

impl std::fmt::Display for ScriptError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointDecl {
    pub name: String,
    pub over: Option<String>,
    pub on: Vec<String>,
    pub proximate: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveDecl {
    pub name: String,
    pub degree: u32,
    pub mults: Vec<(String, u32)>,
    pub nodes: Vec<String>,
}

/// Class reference in scripts: a curve name or `E<i>` (1-based ledger index).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassRef {
    Curve(String),
    Exceptional(usize),
}

impl std::fmt::Display for ClassRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassRef::Curve(name) => write!(f, "{}", name),
            ClassRef::Exceptional(i) => write!(f, "E{}", i + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepDecl {
    BlowUp(String),
    Contract(Vec<ClassRef>),
    Cremona([String; 3]),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TedOp {
    Eq,
    Le,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expectation {
    Singularities(LabelSet),
    Ted { op: TedOp, value: u64 },
    Complexity(Rat),
    Crepant,
    IndexOne,
    Coregularity(u8),
    DualComplex(DualComplexType),
    ATypeOnly(bool),
    CoverCharts(usize),
}

impl std::fmt::Display for Expectation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expectation::Singularities(l) => write!(f, "singularities {}", l),
            Expectation::Ted { op, value } => {
                let op = match op {
                    TedOp::Eq => "=",
                    TedOp::Le => "<=",
                };
                write!(f, "ted {} {}", op, value)
            }
            Expectation::Complexity(c) => write!(f, "complexity = {}", format_rat(c)),
            Expectation::Crepant => write!(f, "crepant"),
            Expectation::IndexOne => write!(f, "index-one"),
            Expectation::Coregularity(c) => write!(f, "coregularity {}", c),
            Expectation::DualComplex(d) => write!(f, "dual-complex {}", d),
            Expectation::ATypeOnly(b) => write!(f, "a-type-only {}", b),
            Expectation::CoverCharts(n) => write!(f, "cover charts {}", n),
        }
    }
}

/// Parsed construction script. Structural equality ignores source positions,
/// which live in the companion [`SourceMap`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstructionScript {
    pub points: Vec<PointDecl>,
    pub curves: Vec<CurveDecl>,
    pub boundary: Vec<(ClassRef, Rat)>,
    pub steps: Vec<StepDecl>,
    pub charts: Vec<Vec<ClassRef>>,
    pub expectations: Vec<Expectation>,
}

/// Source lines of the declarations, parallel to the script's vectors.
#[derive(Debug, Clone, Default)]
pub struct SourceMap {
    pub points: Vec<usize>,
    pub curves: Vec<usize>,
    pub boundary: usize,
    pub steps: Vec<usize>,
    pub charts: Vec<usize>,
    pub expectations: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Token {
    text: String,
    col: usize,
}

fn tokenize(line: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let bytes: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let col = i + 1;
        if c.is_alphabetic() || c == '_' {
            let mut j = i + 1;
            while j < bytes.len() {
                let d = bytes[j];
                if d.is_alphanumeric() || d == '_' {
                    j += 1;
                } else if d == '-' && j + 1 < bytes.len() && bytes[j + 1].is_alphabetic() {
                    // hyphenated keywords like `index-one`, `dual-complex`
                    j += 1;
                } else {
                    break;
                }
            }
            out.push(Token {
                text: bytes[i..j].iter().collect(),
                col,
            });
            i = j;
        } else if c.is_ascii_digit() || (c == '-' && i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit()) {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            out.push(Token {
                text: bytes[i..j].iter().collect(),
                col,
            });
            i = j;
        } else {
            out.push(Token {
                text: c.to_string(),
                col,
            });
            i += 1;
        }
    }
    out
}

struct LineParser<'a> {
    tokens: &'a [Token],
    pos: usize,
    line: usize,
}

impl<'a> LineParser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> ScriptError {
        let (col, token) = match self.tokens.get(self.pos) {
            Some(t) => (t.col, t.text.clone()),
            None => (
                self.tokens.last().map(|t| t.col + t.text.len()).unwrap_or(1),
                String::new(),
            ),
        };
        ScriptError {
            line: self.line,
            column: col,
            message: message.into(),
            token,
        }
    }

    fn expect_word(&mut self, word: &str) -> Result<(), ScriptError> {
        match self.peek() {
            Some(t) if t.text == word => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected `{}`", word))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ScriptError> {
        match self.peek() {
            Some(t)
                if t.text
                    .chars()
                    .next()
                    .map(|c| c.is_alphabetic() || c == '_')
                    .unwrap_or(false) =>
            {
                let text = t.text.clone();
                self.pos += 1;
                Ok(text)
            }
            _ => Err(self.err(format!("expected {}", what))),
        }
    }

    fn integer(&mut self, what: &str) -> Result<i64, ScriptError> {
        match self.peek() {
            Some(t) => match t.text.parse::<i64>() {
                Ok(v) => {
                    self.pos += 1;
                    Ok(v)
                }
                Err(_) => Err(self.err(format!("expected {}", what))),
            },
            None => Err(self.err(format!("expected {}", what))),
        }
    }

    fn rational(&mut self) -> Result<Rat, ScriptError> {
        let p = self.integer("a rational p or p/q")?;
        if self.peek().map(|t| t.text.as_str()) == Some("/") {
            self.pos += 1;
            let q = self.integer("denominator")?;
            if q == 0 {
                self.pos -= 1;
                return Err(self.err("zero denominator"));
            }
            Ok(Rat::new(Int::from(p), Int::from(q)))
        } else {
            Ok(Rat::from_integer(Int::from(p)))
        }
    }

    fn class_ref(&mut self) -> Result<ClassRef, ScriptError> {
        let name = self.ident("a class (curve name or E<i>)")?;
        Ok(parse_class_name(&name))
    }

    fn comma_list(&mut self, what: &str) -> Result<Vec<String>, ScriptError> {
        let mut out = vec![self.ident(what)?];
        while self.peek().map(|t| t.text.as_str()) == Some(",") {
            self.pos += 1;
            out.push(self.ident(what)?);
        }
        Ok(out)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn expect_end(&mut self) -> Result<(), ScriptError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing tokens"))
        }
    }
}

fn parse_class_name(name: &str) -> ClassRef {
    if let Some(rest) = name.strip_prefix('E') {
        if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
            if let Ok(i) = rest.parse::<usize>() {
                if i >= 1 {
                    return ClassRef::Exceptional(i - 1);
                }
            }
        }
    }
    ClassRef::Curve(name.to_string())
}

/// Parse a script. Every malformed line yields one error; parsing continues
/// line by line and never panics.
pub fn parse(text: &str) -> Result<(ConstructionScript, SourceMap), Vec<ScriptError>> {
    let mut script = ConstructionScript::default();
    let mut map = SourceMap::default();
    let mut errors = Vec::new();
    let mut saw_base = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let tokens = tokenize(raw);
        if tokens.is_empty() {
            continue;
        }
        let mut p = LineParser {
            tokens: &tokens,
            pos: 0,
            line: line_no,
        };
        let head = p.next().expect("nonempty").text.clone();
        let result = match head.as_str() {
            "base" => p.expect_word("P2").and_then(|_| {
                saw_base = true;
                p.expect_end()
            }),
            "point" => parse_point(&mut p).map(|d| {
                script.points.push(d);
                map.points.push(line_no);
            }),
            "curve" => parse_curve(&mut p).map(|d| {
                script.curves.push(d);
                map.curves.push(line_no);
            }),
            "boundary" => parse_boundary(&mut p).map(|terms| {
                script.boundary = terms;
                map.boundary = line_no;
            }),
            "blowup" => parse_blowup(&mut p).map(|points| {
                for pt in points {
                    script.steps.push(StepDecl::BlowUp(pt));
                    map.steps.push(line_no);
                }
            }),
            "contract" => parse_contract(&mut p).map(|ids| {
                script.steps.push(StepDecl::Contract(ids));
                map.steps.push(line_no);
            }),
            "cremona" => parse_cremona(&mut p).map(|c| {
                script.steps.push(StepDecl::Cremona(c));
                map.steps.push(line_no);
            }),
            "chart" => parse_chart(&mut p).map(|ids| {
                script.charts.push(ids);
                map.charts.push(line_no);
            }),
            "expect" => parse_expect(&mut p).map(|e| {
                script.expectations.push(e);
                map.expectations.push(line_no);
            }),
            _ => {
                p.pos = 0;
                Err(p.err(format!("unknown directive `{}`", head)))
            }
        };
        if let Err(e) = result {
            errors.push(e);
        }
    }
    if !saw_base && errors.is_empty() && text.lines().any(|l| !tokenize(l).is_empty()) {
        errors.push(ScriptError {
            line: 1,
            column: 1,
            message: "missing `base P2` declaration".into(),
            token: String::new(),
        });
    }
    if errors.is_empty() {
        Ok((script, map))
    } else {
        Err(errors)
    }
}

fn parse_point(p: &mut LineParser) -> Result<PointDecl, ScriptError> {
    let name = p.ident("a point name")?;
    if let ClassRef::Exceptional(_) = parse_class_name(&name) {
        p.pos -= 1;
        return Err(p.err("names of the form E<i> are reserved for exceptional classes"));
    }
    let mut decl = PointDecl {
        name,
        over: None,
        on: Vec::new(),
        proximate: Vec::new(),
    };
    while let Some(t) = p.peek() {
        match t.text.as_str() {
            "over" => {
                p.pos += 1;
                decl.over = Some(p.ident("a parent center")?);
            }
            "on" => {
                p.pos += 1;
                decl.on = p.comma_list("a curve name")?;
            }
            "proximate" => {
                p.pos += 1;
                decl.proximate = p.comma_list("a center name")?;
            }
            _ => return Err(p.err("expected `over`, `on` or `proximate`")),
        }
    }
    Ok(decl)
}

fn parse_curve(p: &mut LineParser) -> Result<CurveDecl, ScriptError> {
    let name = p.ident("a curve name")?;
    if let ClassRef::Exceptional(_) = parse_class_name(&name) {
        p.pos -= 1;
        return Err(p.err("names of the form E<i> are reserved for exceptional classes"));
    }
    p.expect_word("degree")?;
    let degree = p.integer("a positive degree")?;
    if degree <= 0 {
        p.pos -= 1;
        return Err(p.err("degree must be positive"));
    }
    let mut decl = CurveDecl {
        name,
        degree: degree as u32,
        mults: Vec::new(),
        nodes: Vec::new(),
    };
    while let Some(t) = p.peek() {
        match t.text.as_str() {
            "mult" => {
                p.pos += 1;
                let point = p.ident("a point name")?;
                p.expect_word(":")?;
                let m = p.integer("a nonnegative multiplicity")?;
                if m < 0 {
                    p.pos -= 1;
                    return Err(p.err("multiplicity must be nonnegative"));
                }
                decl.mults.push((point, m as u32));
            }
            "node" => {
                p.pos += 1;
                decl.nodes.push(p.ident("a point name")?);
            }
            _ => return Err(p.err("expected `mult` or `node`")),
        }
    }
    Ok(decl)
}

fn parse_boundary(p: &mut LineParser) -> Result<Vec<(ClassRef, Rat)>, ScriptError> {
    let mut terms = Vec::new();
    loop {
        let class = p.class_ref()?;
        p.expect_word(":")?;
        let coeff = p.rational()?;
        terms.push((class, coeff));
        if p.at_end() {
            break;
        }
        p.expect_word("+")?;
    }
    Ok(terms)
}

fn parse_blowup(p: &mut LineParser) -> Result<Vec<String>, ScriptError> {
    let mut out = vec![p.ident("a point name")?];
    while !p.at_end() {
        out.push(p.ident("a point name")?);
    }
    Ok(out)
}

fn parse_contract(p: &mut LineParser) -> Result<Vec<ClassRef>, ScriptError> {
    let mut out = vec![p.class_ref()?];
    while !p.at_end() {
        out.push(p.class_ref()?);
    }
    Ok(out)
}

fn parse_cremona(p: &mut LineParser) -> Result<[String; 3], ScriptError> {
    let a = p.ident("a point name")?;
    let b = p.ident("a point name")?;
    let c = p.ident("a point name")?;
    p.expect_end()?;
    Ok([a, b, c])
}

fn parse_chart(p: &mut LineParser) -> Result<Vec<ClassRef>, ScriptError> {
    let mut out = Vec::new();
    while !p.at_end() {
        out.push(p.class_ref()?);
    }
    Ok(out)
}

fn parse_expect(p: &mut LineParser) -> Result<Expectation, ScriptError> {
    let kind = p.ident("an expectation kind")?;
    let e = match kind.as_str() {
        "singularities" => {
            let mut parts = Vec::new();
            while !p.at_end() {
                let t = p.next().expect("checked");
                parts.push(t.text.clone());
            }
            let text = parts.join("");
            let labels: LabelSet = text.parse().map_err(|m: String| {
                p.pos = p.pos.saturating_sub(1);
                p.err(m)
            })?;
            Expectation::Singularities(labels)
        }
        "ted" => {
            let op = match p.next().map(|t| t.text.clone()).as_deref() {
                Some("=") => TedOp::Eq,
                Some("<") => {
                    p.expect_word("=")?;
                    TedOp::Le
                }
                _ => {
                    p.pos = p.pos.saturating_sub(1);
                    return Err(p.err("expected `=` or `<=`"));
                }
            };
            let value = p.integer("a nonnegative integer")?;
            if value < 0 {
                p.pos -= 1;
                return Err(p.err("ted bounds are nonnegative"));
            }
            Expectation::Ted {
                op,
                value: value as u64,
            }
        }
        "complexity" => {
            p.expect_word("=")?;
            Expectation::Complexity(p.rational()?)
        }
        "crepant" => Expectation::Crepant,
        "index-one" => Expectation::IndexOne,
        "coregularity" => {
            let v = p.integer("0, 1 or 2")?;
            if !(0..=2).contains(&v) {
                p.pos -= 1;
                return Err(p.err("coregularity is 0, 1 or 2"));
            }
            Expectation::Coregularity(v as u8)
        }
        "dual-complex" => {
            let word = p.ident("circle|interval|point|empty")?;
            let d = match word.as_str() {
                "circle" => DualComplexType::Circle,
                "interval" => DualComplexType::Interval,
                "point" => DualComplexType::Point,
                "empty" => DualComplexType::Empty,
                _ => {
                    p.pos -= 1;
                    return Err(p.err("expected circle, interval, point or empty"));
                }
            };
            Expectation::DualComplex(d)
        }
        "a-type-only" => {
            let word = p.ident("true|false")?;
            match word.as_str() {
                "true" => Expectation::ATypeOnly(true),
                "false" => Expectation::ATypeOnly(false),
                _ => {
                    p.pos -= 1;
                    return Err(p.err("expected true or false"));
                }
            }
        }
        "cover" => {
            p.expect_word("charts")?;
            let v = p.integer("a chart count")?;
            if v < 0 {
                p.pos -= 1;
                return Err(p.err("chart count is nonnegative"));
            }
            Expectation::CoverCharts(v as usize)
        }
        _ => {
            p.pos = p.pos.saturating_sub(1);
            return Err(p.err(format!("unknown expectation `{}`", kind)));
        }
    };
    p.expect_end()?;
    Ok(e)
}

fn format_rat(r: &Rat) -> String {
    if r.denom() == &Int::one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical pretty-printing; `parse(format(s))` is structurally equal to `s`.
pub fn format(script: &ConstructionScript) -> String {
    let mut out = String::from("base P2\n");
    for p in &script.points {
        write!(out, "point {}", p.name).unwrap();
        if let Some(over) = &p.over {
            write!(out, " over {}", over).unwrap();
        }
        if !p.on.is_empty() {
            write!(out, " on {}", p.on.join(",")).unwrap();
        }
        if !p.proximate.is_empty() {
            write!(out, " proximate {}", p.proximate.join(",")).unwrap();
        }
        out.push('\n');
    }
    for c in &script.curves {
        write!(out, "curve {} degree {}", c.name, c.degree).unwrap();
        for (pt, m) in &c.mults {
            write!(out, " mult {}:{}", pt, m).unwrap();
        }
        for n in &c.nodes {
            write!(out, " node {}", n).unwrap();
        }
        out.push('\n');
    }
    if !script.boundary.is_empty() {
        let terms: Vec<String> = script
            .boundary
            .iter()
            .map(|(c, r)| format!("{}:{}", c, format_rat(r)))
            .collect();
        writeln!(out, "boundary {}", terms.join(" + ")).unwrap();
    }
    for step in &script.steps {
        match step {
            StepDecl::BlowUp(p) => writeln!(out, "blowup {}", p).unwrap(),
            StepDecl::Contract(ids) => {
                let names: Vec<String> = ids.iter().map(|c| c.to_string()).collect();
                writeln!(out, "contract {}", names.join(" ")).unwrap();
            }
            StepDecl::Cremona([a, b, c]) => writeln!(out, "cremona {} {} {}", a, b, c).unwrap(),
        }
    }
    for chart in &script.charts {
        if chart.is_empty() {
            writeln!(out, "chart").unwrap();
        } else {
            let names: Vec<String> = chart.iter().map(|c| c.to_string()).collect();
            writeln!(out, "chart {}", names.join(" ")).unwrap();
        }
    }
    for e in &script.expectations {
        writeln!(out, "expect {}", e).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_simple_script() {
        let text = "\
base P2
# a comment
point P on C,L
point x2 over P on C
curve C degree 3 node N mult P:1
curve L degree 1
boundary C:1
blowup P x2
contract E1 L
expect singularities A1
expect ted <= 3
expect complexity = 1/2
";
        let (script, _) = parse(text).unwrap();
        assert_eq!(script.points.len(), 2);
        assert_eq!(script.curves.len(), 1 + 1);
        assert_eq!(script.steps.len(), 3); // two blowups + one contract
        assert_eq!(script.expectations.len(), 3);
        assert_eq!(
            script.steps[2],
            StepDecl::Contract(vec![ClassRef::Exceptional(0), ClassRef::Curve("L".into())])
        );
    }

    #[test]
    fn error_positions_point_into_input() {
        let text = "base P2\ncurve C degree -1\nblowup Q\n";
        let errs = parse(text).unwrap_err();
        assert_eq!(errs.len(), 1); // blowup names parse; resolution is later
        assert_eq!(errs[0].line, 2);
        assert!(errs[0].message.contains("degree must be positive"));
        let lines: Vec<&str> = text.lines().collect();
        for e in &errs {
            assert!(e.line >= 1 && e.line <= lines.len());
            assert!(e.column >= 1 && e.column <= lines[e.line - 1].len() + 2);
        }
    }

    #[test]
    fn recovery_collects_multiple_errors() {
        let text = "base P2\ncurve C degree -1\nexpect bogus\nboundary C:\n";
        let errs = parse(text).unwrap_err();
        assert_eq!(errs.len(), 3);
        assert_eq!(errs[0].line, 2);
        assert_eq!(errs[1].line, 3);
        assert_eq!(errs[2].line, 4);
    }

    #[test]
    fn format_parse_fixpoint() {
        let text = "\
base P2
point N
point P on C
curve C degree 3 node N
boundary C:1
cremona N P Q   # hmm Q undeclared: still parses
expect ted = 3
expect crepant
";
        let (script, _) = parse(text).unwrap();
        let printed = format(&script);
        let (reparsed, _) = parse(&printed).unwrap();
        assert_eq!(script, reparsed);
        // A second round is byte-stable.
        assert_eq!(printed, format(&reparsed));
    }

    #[test]
    fn empty_script_formats_to_base_only() {
        let script = ConstructionScript::default();
        assert_eq!(format(&script), "base P2\n");
    }

    #[test]
    fn expectation_syntax() {
        let (s, _) = parse("base P2\nexpect singularities D4+3A1\n").unwrap();
        assert_eq!(
            s.expectations[0],
            Expectation::Singularities("D4+3A1".parse().unwrap())
        );
        let (s, _) = parse("base P2\nexpect dual-complex circle\n").unwrap();
        assert_eq!(
            s.expectations[0],
            Expectation::DualComplex(DualComplexType::Circle)
        );
        let (s, _) = parse("base P2\nexpect cover charts 3\n").unwrap();
        assert_eq!(s.expectations[0], Expectation::CoverCharts(3));
        assert!(parse("base P2\nexpect ted = -1\n").is_err());
    }
}
