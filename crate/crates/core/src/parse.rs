//! Line-oriented network file format.
//!
//! ```text
//! # comment
//! species: A B
//! 2A <-> A + B   rate [1,2] [3,3]
//! B -> 0         rate [0.5, 1]
//! 0 -> 2B        rate [1, 1]
//! ```
//!
//! Coefficients are integers, fractions (`9/4`) or decimals (`0.25`, read
//! exactly), optionally followed by `*`.

use std::collections::HashMap;

use num::{BigInt, Zero};
use thiserror::Error;

use crate::geometry::linalg::Q;
use crate::network::{Complex, NetworkError, ReactionNetwork, Tempering};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: unknown species '{name}'")]
    UnknownSpecies { line: usize, column: usize, name: String },
    #[error("line {line}: invalid rate interval [{lo}, {hi}]")]
    BadInterval { line: usize, lo: f64, hi: f64 },
    #[error("line {line}: rate intervals must be given for every reaction or for none")]
    PartialRates { line: usize },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// A parsed file: the network plus its tempering when rates were given.
#[derive(Debug, Clone)]
pub struct ParsedNetwork {
    pub network: ReactionNetwork,
    pub tempering: Option<Tempering>,
}

pub fn parse_network(text: &str) -> Result<ParsedNetwork, ParseError> {
    Parser::default().run(text)
}

#[derive(Default)]
struct Parser {
    species: Vec<String>,
    index: HashMap<String, usize>,
    declared: bool,
    // each term list is (species, coefficient)
    reactions: Vec<(Vec<(usize, Q)>, Vec<(usize, Q)>)>,
    isolated: Vec<Vec<(usize, Q)>>,
    rates: Vec<Option<(f64, f64)>>,
    rate_lines: Vec<usize>,
}

impl Parser {
    fn run(mut self, text: &str) -> Result<ParsedNetwork, ParseError> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let mut cur = Cursor::new(content, line);
            cur.skip_ws();
            if cur.rest().starts_with("species:") {
                self.species_header(&mut cur)?;
            } else {
                self.reaction_line(&mut cur)?;
            }
        }
        let with_rates = self.rates.iter().filter(|r| r.is_some()).count();
        if with_rates != 0 && with_rates != self.rates.len() {
            let at = self.rates.iter().position(Option::is_none).expect("some rate missing");
            return Err(ParseError::PartialRates { line: self.rate_lines[at] });
        }
        let n = self.species.len();
        let build = |terms: &[(usize, Q)]| {
            let mut v = vec![Q::zero(); n];
            for (s, c) in terms {
                v[*s] += c;
            }
            Complex::new(v)
        };
        let reactions = self.reactions.iter().map(|(s, t)| (build(s), build(t))).collect();
        let isolated = self.isolated.iter().map(|c| build(c)).collect();
        let network = ReactionNetwork::new(self.species.clone(), reactions, isolated)?;
        let tempering = if with_rates > 0 {
            Some(Tempering::new(&network, self.rates.iter().map(|r| r.expect("all rates present")).collect())?)
        } else {
            None
        };
        Ok(ParsedNetwork { network, tempering })
    }

    fn species_header(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        if self.declared || !self.reactions.is_empty() || !self.isolated.is_empty() {
            return Err(cur.error("species header must appear once, before any reaction"));
        }
        cur.advance("species:".len());
        self.declared = true;
        loop {
            cur.skip_ws();
            if cur.peek() == Some(',') {
                cur.advance(1);
                continue;
            }
            if cur.at_end() {
                return Ok(());
            }
            let column = cur.column();
            let name = cur.name().ok_or_else(|| cur.error("expected species name"))?;
            if self.index.contains_key(&name) {
                return Err(ParseError::Syntax { line: cur.line, column, message: format!("duplicate species '{name}'") });
            }
            self.index.insert(name.clone(), self.species.len());
            self.species.push(name);
        }
    }

    fn reaction_line(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        let lhs = self.complex(cur)?;
        cur.skip_ws();
        let reversible = if cur.rest().starts_with("<->") {
            cur.advance(3);
            true
        } else if cur.rest().starts_with("->") {
            cur.advance(2);
            false
        } else if cur.at_end() {
            self.isolated.push(lhs);
            return Ok(());
        } else {
            return Err(cur.error("expected '->' or '<->'"));
        };
        let rhs = self.complex(cur)?;
        cur.skip_ws();
        let mut intervals = Vec::new();
        if cur.rest().starts_with("rate") {
            cur.advance(4);
            let wanted = if reversible { 2 } else { 1 };
            for _ in 0..wanted {
                intervals.push(interval(cur)?);
            }
            cur.skip_ws();
        }
        if !cur.at_end() {
            return Err(cur.error("unexpected trailing input"));
        }
        let rate = |k: usize| intervals.get(k).copied();
        self.reactions.push((lhs.clone(), rhs.clone()));
        self.rates.push(rate(0));
        self.rate_lines.push(cur.line);
        if reversible {
            self.reactions.push((rhs, lhs));
            self.rates.push(rate(1));
            self.rate_lines.push(cur.line);
        }
        Ok(())
    }

    fn complex(&mut self, cur: &mut Cursor) -> Result<Vec<(usize, Q)>, ParseError> {
        cur.skip_ws();
        let mut terms = Vec::new();
        // a lone `0` is the empty complex
        let save = cur.pos;
        if cur.peek() == Some('0') {
            cur.advance(1);
            cur.skip_ws();
            if cur.at_end() || cur.rest().starts_with("->") || cur.rest().starts_with("<->") || cur.rest().starts_with("rate") {
                return Ok(terms);
            }
            cur.pos = save;
        }
        loop {
            cur.skip_ws();
            let coeff = match cur.number() {
                Some(c) => {
                    cur.skip_ws();
                    if cur.peek() == Some('*') {
                        cur.advance(1);
                        cur.skip_ws();
                    }
                    c
                }
                None => Q::from_integer(1.into()),
            };
            let column = cur.column();
            let name = cur.name().ok_or_else(|| cur.error("expected species name"))?;
            let idx = match self.index.get(&name) {
                Some(&i) => i,
                None if self.declared => {
                    return Err(ParseError::UnknownSpecies { line: cur.line, column, name });
                }
                None => {
                    self.index.insert(name.clone(), self.species.len());
                    self.species.push(name);
                    self.species.len() - 1
                }
            };
            terms.push((idx, coeff));
            cur.skip_ws();
            if cur.peek() == Some('+') {
                cur.advance(1);
            } else {
                return Ok(terms);
            }
        }
    }
}

fn interval(cur: &mut Cursor) -> Result<(f64, f64), ParseError> {
    cur.skip_ws();
    if cur.peek() != Some('[') {
        return Err(cur.error("expected '[' opening a rate interval"));
    }
    cur.advance(1);
    let lo = cur.float().ok_or_else(|| cur.error("expected number"))?;
    cur.skip_ws();
    if cur.peek() != Some(',') {
        return Err(cur.error("expected ','"));
    }
    cur.advance(1);
    let hi = cur.float().ok_or_else(|| cur.error("expected number"))?;
    cur.skip_ws();
    if cur.peek() != Some(']') {
        return Err(cur.error("expected ']'"));
    }
    cur.advance(1);
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
        return Err(ParseError::BadInterval { line: cur.line, lo, hi });
    }
    Ok((lo, hi))
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Self { text, pos: 0, line }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn at_end(&self) -> bool {
        self.rest().trim().is_empty()
    }

    fn advance(&mut self, bytes: usize) {
        self.pos += bytes;
    }

    fn column(&self) -> usize {
        self.text[..self.pos].chars().count() + 1
    }

    fn error(&self, message: &str) -> ParseError {
        ParseError::Syntax { line: self.line, column: self.column(), message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let rest = self.rest();
        let end = rest.find(|c: char| !f(c)).unwrap_or(rest.len());
        self.pos += end;
        &rest[..end]
    }

    fn name(&mut self) -> Option<String> {
        let first = self.peek()?;
        if !(first.is_alphabetic() || first == '_') {
            return None;
        }
        Some(self.take_while(|c| c.is_alphanumeric() || c == '_').to_string())
    }

    /// Exact rational: `-?digits(.digits)?(/digits)?`.
    fn number(&mut self) -> Option<Q> {
        let start = self.pos;
        let negative = self.peek() == Some('-');
        if negative {
            self.advance(1);
        }
        let int = self.take_while(|c| c.is_ascii_digit());
        if int.is_empty() {
            self.pos = start;
            return None;
        }
        let mut value = Q::from_integer(int.parse::<BigInt>().ok()?);
        if self.peek() == Some('.') {
            self.advance(1);
            let frac = self.take_while(|c| c.is_ascii_digit());
            if frac.is_empty() {
                self.pos = start;
                return None;
            }
            let denom = BigInt::from(10).pow(frac.len() as u32);
            value += Q::new(frac.parse::<BigInt>().ok()?, denom);
        }
        if self.peek() == Some('/') {
            self.advance(1);
            let d = self.take_while(|c| c.is_ascii_digit());
            let d = d.parse::<BigInt>().ok().filter(|d| !d.is_zero());
            let Some(d) = d else {
                self.pos = start;
                return None;
            };
            value /= Q::from_integer(d);
        }
        Some(if negative { -value } else { value })
    }

    fn float(&mut self) -> Option<f64> {
        self.skip_ws();
        let s = self.take_while(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
        s.parse().ok()
    }
}
