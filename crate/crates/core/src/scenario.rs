//! Scenario files: a line-based `key = value` format describing a
//! suspension, its base pairs, and sampling and certificate parameters.
//!
//! ```text
//! # comment
//! n = 2
//! f = z1
//! pair = nu=[1, 0]; mu=[0, 1]; ker_nu=[z2]; ker_mu=[z1]; ideal=[1]
//! seed = 7
//! samples = 50
//! region = -2 .. 2 step 1/2
//! exactness = exact
//! degree_bound = 4
//! cohomology = asserted
//! ```
//!
//! Optional keys: `name`, `basepoint = [..]` (exact ambient coordinates),
//! `zero_fiber = [..]` (images of `z1..zn` landing in `{f = 0}`),
//! `zero_fiber_fraction`, `twist` (a polynomial in `z`), and
//! `target = [..]` (an ambient field for `approx`).

use std::fmt::Write as _;
use std::str::FromStr;

use num::BigRational;

use crate::algebra::{parse_poly, GaussianRational, Poly};
use crate::criterion::{Cohomology, CriterionConfig};
use crate::error::ParseError;
use crate::lifting::{BaseField, BasePair};
use crate::suspension::{make_suspension, Exactness, Region, SampleSpec, SuspensionContext, ZeroFiberParam};

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: Option<String>,
    pub n: usize,
    pub f: Poly,
    pub pairs: Vec<BasePair>,
    pub seed: u64,
    pub samples: usize,
    pub region: Region,
    pub exactness: Exactness,
    pub degree_bound: u32,
    pub cohomology: Cohomology,
    pub basepoint: Option<Vec<GaussianRational>>,
    pub zero_fiber: Option<Vec<Poly>>,
    pub zero_fiber_fraction: f64,
    pub twist: Option<Poly>,
    pub target: Option<Vec<Poly>>,
}

pub const DEFAULT_DEGREE_BOUND: u32 = 4;
pub const DEFAULT_SAMPLES: usize = 50;

impl Scenario {
    /// A scenario with defaults for everything but `n` and `f`.
    pub fn new(n: usize, f: Poly) -> Self {
        Self {
            name: None,
            n,
            f,
            pairs: Vec::new(),
            seed: 0,
            samples: DEFAULT_SAMPLES,
            region: Region::symmetric(2, 2),
            exactness: Exactness::Exact,
            degree_bound: DEFAULT_DEGREE_BOUND,
            cohomology: Cohomology::Unknown,
            basepoint: None,
            zero_fiber: None,
            zero_fiber_fraction: 0.0,
            twist: None,
            target: None,
        }
    }

    pub fn context(&self) -> Result<SuspensionContext, crate::error::SuspensionError> {
        make_suspension(self.n, self.f.clone())
    }

    pub fn sample_spec(&self, ctx: &SuspensionContext) -> Result<SampleSpec, crate::error::SuspensionError> {
        let mut spec = SampleSpec::new(self.samples, self.seed, self.region.clone());
        spec.exactness = self.exactness;
        spec.zero_fiber_fraction = self.zero_fiber_fraction;
        if let Some(images) = &self.zero_fiber {
            spec.zero_fiber = Some(ZeroFiberParam::new(ctx, images.clone())?);
        }
        Ok(spec)
    }

    pub fn criterion_config(&self, ctx: &SuspensionContext) -> Result<CriterionConfig, crate::error::SuspensionError> {
        let mut cfg = CriterionConfig::new(self.degree_bound, self.sample_spec(ctx)?);
        cfg.twist = self.twist.clone();
        Ok(cfg)
    }

    /// Canonical text form; `Scenario::parse` inverts it exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(name) = &self.name {
            writeln!(s, "name = {name}").unwrap();
        }
        writeln!(s, "n = {}", self.n).unwrap();
        writeln!(s, "f = {}", self.f).unwrap();
        for p in &self.pairs {
            writeln!(
                s,
                "pair = nu={}; mu={}; ker_nu={}; ker_mu={}; ideal={}",
                list(p.alpha.coeffs()),
                list(p.beta.coeffs()),
                list(&p.ker_alpha),
                list(&p.ker_beta),
                list(&p.ideal)
            )
            .unwrap();
        }
        writeln!(s, "seed = {}", self.seed).unwrap();
        writeln!(s, "samples = {}", self.samples).unwrap();
        writeln!(s, "region = {} .. {} step {}", self.region.lo, self.region.hi, self.region.step).unwrap();
        let ex = match self.exactness {
            Exactness::Exact => "exact",
            Exactness::Float => "float",
        };
        writeln!(s, "exactness = {ex}").unwrap();
        writeln!(s, "degree_bound = {}", self.degree_bound).unwrap();
        writeln!(s, "cohomology = {}", cohomology_name(self.cohomology)).unwrap();
        if let Some(p) = &self.basepoint {
            writeln!(s, "basepoint = {}", list(p)).unwrap();
        }
        if let Some(z) = &self.zero_fiber {
            writeln!(s, "zero_fiber = {}", list(z)).unwrap();
        }
        if self.zero_fiber_fraction != 0.0 {
            writeln!(s, "zero_fiber_fraction = {}", self.zero_fiber_fraction).unwrap();
        }
        if let Some(t) = &self.twist {
            writeln!(s, "twist = {t}").unwrap();
        }
        if let Some(t) = &self.target {
            writeln!(s, "target = {}", list(t)).unwrap();
        }
        s
    }

    pub fn parse(src: &str) -> Result<Scenario, ParseError> {
        let mut entries = Vec::new();
        for (ln, raw) in src.lines().enumerate() {
            let line = ln + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let Some(eq) = content.find('=') else {
                return Err(ParseError::new(line, first_non_space(content), "expected `key = value`"));
            };
            let key = content[..eq].trim();
            if key.is_empty() {
                return Err(ParseError::new(line, first_non_space(content), "missing key"));
            }
            let value = Span::new(&content[eq + 1..], line, char_col(content, eq + 1)).trim();
            entries.push((line, char_col(content, first_byte(content)), key.to_string(), value));
        }

        let find = |k: &str| entries.iter().filter(|e| e.2 == k).collect::<Vec<_>>();
        let nline = find("n");
        let Some(&(_, _, _, ref nval)) = nline.first().copied() else {
            return Err(ParseError::new(1, 1, "missing key `n`"));
        };
        let n: usize = nval.parse_num("n")?;
        if n == 0 {
            return Err(nval.error("n must be at least 1"));
        }
        let Some(&(_, _, _, ref fval)) = find("f").first().copied() else {
            return Err(ParseError::new(1, 1, "missing key `f`"));
        };
        let f = fval.poly(n)?;
        let mut sc = Scenario::new(n, f);
        let mut seen = std::collections::HashSet::new();
        for (line, col, key, value) in &entries {
            if key != "pair" && !seen.insert(key.as_str()) {
                return Err(ParseError::new(*line, *col, format!("duplicate key `{key}`")));
            }
            match key.as_str() {
                "n" | "f" => {}
                "name" => sc.name = Some(value.text.to_string()),
                "pair" => sc.pairs.push(parse_pair(value, n)?),
                "seed" => sc.seed = value.parse_num("seed")?,
                "samples" => sc.samples = value.parse_num("samples")?,
                "degree_bound" => sc.degree_bound = value.parse_num("degree_bound")?,
                "region" => sc.region = parse_region(value)?,
                "exactness" => {
                    sc.exactness = match value.text {
                        "exact" => Exactness::Exact,
                        "float" => Exactness::Float,
                        _ => return Err(value.error("expected `exact` or `float`")),
                    }
                }
                "cohomology" => {
                    sc.cohomology = match value.text {
                        "asserted" => Cohomology::Asserted,
                        "unknown" => Cohomology::Unknown,
                        "refuted" => Cohomology::Refuted,
                        _ => return Err(value.error("expected `asserted`, `unknown` or `refuted`")),
                    }
                }
                "basepoint" => {
                    let polys = value.poly_list(n)?;
                    let mut pt = Vec::new();
                    for (p, item) in polys.iter().zip(value.items()?) {
                        if !p.is_constant() {
                            return Err(item.error("basepoint coordinates must be constants"));
                        }
                        pt.push(p.constant_term());
                    }
                    if pt.len() != n + 2 {
                        return Err(value.error(format!("basepoint needs {} coordinates (u, v, z1..)", n + 2)));
                    }
                    sc.basepoint = Some(pt);
                }
                "zero_fiber" => {
                    let z = value.poly_list(n)?;
                    if z.len() != n {
                        return Err(value.error(format!("zero_fiber needs {n} images")));
                    }
                    sc.zero_fiber = Some(z);
                }
                "zero_fiber_fraction" => {
                    let x: f64 = value.parse_num("zero_fiber_fraction")?;
                    if !(0.0..=1.0).contains(&x) {
                        return Err(value.error("fraction must lie in [0, 1]"));
                    }
                    sc.zero_fiber_fraction = x;
                }
                "twist" => sc.twist = Some(value.poly(n)?),
                "target" => {
                    let t = value.poly_list(n)?;
                    if t.len() != n + 2 {
                        return Err(value.error(format!("target needs {} components (u, v, z1..)", n + 2)));
                    }
                    sc.target = Some(t);
                }
                other => return Err(ParseError::new(*line, *col, format!("unknown key `{other}`"))),
            }
        }
        Ok(sc)
    }
}

impl FromStr for Scenario {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::parse(s)
    }
}

fn cohomology_name(c: Cohomology) -> &'static str {
    match c {
        Cohomology::Asserted => "asserted",
        Cohomology::Unknown => "unknown",
        Cohomology::Refuted => "refuted",
    }
}

fn list<T: std::fmt::Display>(items: &[T]) -> String {
    let parts: Vec<String> = items.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn first_byte(s: &str) -> usize {
    s.len() - s.trim_start().len()
}

fn first_non_space(s: &str) -> usize {
    char_col(s, first_byte(s))
}

/// 1-based column of byte offset `b`.
fn char_col(s: &str, b: usize) -> usize {
    s[..b].chars().count() + 1
}

/// A slice of the source with its position, for error reporting.
#[derive(Clone, Debug)]
struct Span<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl<'a> Span<'a> {
    fn new(text: &'a str, line: usize, column: usize) -> Self {
        Self { text, line, column }
    }

    fn trim(&self) -> Span<'a> {
        let lead = first_byte(self.text);
        Span::new(self.text.trim(), self.line, self.column + self.text[..lead].chars().count())
    }

    /// Subspan starting at byte `b`.
    fn sub(&self, b: usize, e: usize) -> Span<'a> {
        Span::new(&self.text[b..e], self.line, self.column + self.text[..b].chars().count()).trim()
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.column, msg)
    }

    fn parse_num<T: FromStr>(&self, what: &str) -> Result<T, ParseError> {
        self.text.parse().map_err(|_| self.error(format!("invalid value for `{what}`")))
    }

    fn poly(&self, n: usize) -> Result<Poly, ParseError> {
        if self.text.is_empty() {
            return Err(self.error("expected a polynomial"));
        }
        parse_poly(self.text, n).map_err(|e| ParseError::new(self.line, self.column + e.column - 1, e.message))
    }

    /// Items of a bracketed, comma-separated list.
    fn items(&self) -> Result<Vec<Span<'a>>, ParseError> {
        let t = self.text;
        if !t.starts_with('[') {
            return Err(self.error("expected `[`"));
        }
        if !t.ends_with(']') || t.len() < 2 {
            return Err(ParseError::new(self.line, self.column + t.chars().count(), "expected `]`"));
        }
        let inner = self.sub(1, t.len() - 1);
        if inner.text.is_empty() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let mut start = 0;
        for (i, ch) in inner.text.char_indices() {
            if ch == ',' {
                out.push(inner.sub(start, i));
                start = i + 1;
            }
        }
        out.push(inner.sub(start, inner.text.len()));
        Ok(out)
    }

    fn poly_list(&self, n: usize) -> Result<Vec<Poly>, ParseError> {
        self.items()?.iter().map(|s| s.poly(n)).collect()
    }
}

fn parse_pair(value: &Span, n: usize) -> Result<BasePair, ParseError> {
    let mut fields: [Option<Vec<Poly>>; 5] = Default::default();
    let names = ["nu", "mu", "ker_nu", "ker_mu", "ideal"];
    let mut start = 0;
    let text = value.text;
    let mut parts = Vec::new();
    for (i, ch) in text.char_indices() {
        if ch == ';' {
            parts.push(value.sub(start, i));
            start = i + 1;
        }
    }
    parts.push(value.sub(start, text.len()));
    for part in parts {
        if part.text.is_empty() {
            continue;
        }
        let Some(eq) = part.text.find('=') else {
            return Err(part.error("expected `name=[...]`"));
        };
        let key = part.text[..eq].trim();
        let Some(slot) = names.iter().position(|k| *k == key) else {
            return Err(part.error(format!("unknown pair field `{key}`")));
        };
        if fields[slot].is_some() {
            return Err(part.error(format!("duplicate pair field `{key}`")));
        }
        let items = part.sub(eq + 1, part.text.len());
        let polys = items.poly_list(n)?;
        if slot < 2 && polys.len() != n {
            return Err(items.error(format!("`{key}` needs {n} coefficients")));
        }
        fields[slot] = Some(polys);
    }
    let [nu, mu, ker_nu, ker_mu, ideal] = fields;
    let (Some(nu), Some(mu)) = (nu, mu) else {
        return Err(value.error("pair needs `nu` and `mu`"));
    };
    let alpha = BaseField::new(n, nu).map_err(|e| value.error(format!("nu: {e}")))?;
    let beta = BaseField::new(n, mu).map_err(|e| value.error(format!("mu: {e}")))?;
    Ok(BasePair {
        alpha,
        beta,
        ker_alpha: ker_nu.unwrap_or_default(),
        ker_beta: ker_mu.unwrap_or_default(),
        ideal: ideal.unwrap_or_else(|| vec![Poly::one(n + 2)]),
    })
}

fn parse_region(value: &Span) -> Result<Region, ParseError> {
    let t = value.text;
    let Some(dots) = t.find("..") else {
        return Err(value.error("expected `lo .. hi step s`"));
    };
    let Some(step_at) = t.find("step") else {
        return Err(value.error("expected `step`"));
    };
    if step_at < dots {
        return Err(value.error("expected `lo .. hi step s`"));
    }
    let rat = |s: Span| -> Result<BigRational, ParseError> { BigRational::from_str(s.text).map_err(|_| s.error("expected a rational number")) };
    let lo = rat(value.sub(0, dots))?;
    let hi = rat(value.sub(dots + 2, step_at))?;
    let step_span = value.sub(step_at + 4, t.len());
    let step = rat(step_span.clone())?;
    if step <= BigRational::from_integer(0.into()) {
        return Err(step_span.error("step must be positive"));
    }
    if lo > hi {
        return Err(value.error("empty region"));
    }
    Ok(Region::new(lo, hi, step))
}
