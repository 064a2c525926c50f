//! Text grammar for noncommutative polynomials and the canonical printer.
//!
//! ```text
//! poly   := term (('+'|'-') term)*
//! term   := coeff? factor*
//! factor := ('a*'|'a') ('^' uint)? | '(' poly ')' ('^' uint)?
//! coeff  := float | '(' float (('+'|'-') float 'i')? ')'
//! ```
//!
//! Whitespace is insignificant. An empty factor list denotes a constant
//! term. The printer emits a canonical form that re-parses to the same
//! polynomial.

use super::{Letter, NcPoly, Word};
use num_complex::Complex64 as C64;
use std::fmt;

/// Largest accepted repetition count; beyond this the exponent field is
/// reported as overflowed.
const MAX_EXPONENT: u32 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset of the failure in the input.
    pub offset: usize,
    /// Tokens that would have been accepted at that position.
    pub expected: Vec<&'static str>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at byte {}: found {}, expected one of [{}]",
            self.offset,
            self.found,
            self.expected.join(", ")
        )
    }
}

impl std::error::Error for ParseError {}

/// Parse a polynomial expression.
pub fn parse(text: &str) -> Result<NcPoly, ParseError> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0 };
    let poly = p.poly()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(p.err(&["+", "-", "end of input"]));
    }
    Ok(poly)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn err(&self, expected: &[&'static str]) -> ParseError {
        let found = match self.bytes.get(self.pos) {
            Some(&b) => format!("{:?}", b as char),
            None => "end of input".to_string(),
        };
        ParseError { offset: self.pos, expected: expected.to_vec(), found }
    }

    fn poly(&mut self) -> Result<NcPoly, ParseError> {
        let mut acc = self.term(true)?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term(false)?;
                    acc = &acc + &t;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term(false)?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self, first: bool) -> Result<NcPoly, ParseError> {
        let mut acc = NcPoly::one();
        let mut any = false;
        if let Some(c) = self.coeff(first)? {
            acc = acc.scale(c);
            any = true;
        }
        loop {
            match self.peek() {
                Some(b'a') => {
                    let f = self.letter_factor()?;
                    acc = &acc * &f;
                    any = true;
                }
                Some(b'(') => {
                    let f = self.group_factor()?;
                    acc = &acc * &f;
                    any = true;
                }
                _ => break,
            }
        }
        if !any {
            return Err(self.err(&["number", "a", "a*", "("]));
        }
        Ok(acc)
    }

    /// Tentatively parse a leading coefficient; `None` when the term starts
    /// with a factor instead.
    fn coeff(&mut self, allow_sign: bool) -> Result<Option<C64>, ParseError> {
        match self.peek() {
            Some(b) if b.is_ascii_digit() || b == b'.' => {
                let re = self.float()?;
                Ok(Some(C64::new(re, 0.0)))
            }
            Some(b'+') | Some(b'-') if allow_sign => {
                let re = self.float()?;
                Ok(Some(C64::new(re, 0.0)))
            }
            Some(b'(') => {
                let save = self.pos;
                match self.complex_in_parens() {
                    Ok(c) => {
                        // a following '^' means this was a group factor
                        if self.peek() == Some(b'^') {
                            self.pos = save;
                            Ok(None)
                        } else {
                            Ok(Some(c))
                        }
                    }
                    Err(_) => {
                        self.pos = save;
                        Ok(None)
                    }
                }
            }
            _ => Ok(None),
        }
    }

    fn complex_in_parens(&mut self) -> Result<C64, ParseError> {
        self.skip_ws();
        debug_assert_eq!(self.bytes.get(self.pos), Some(&b'('));
        self.pos += 1;
        self.skip_ws();
        let re = self.float()?;
        let mut im = 0.0;
        match self.peek() {
            Some(b'+') | Some(b'-') => {
                let sign = if self.bytes[self.pos] == b'-' { -1.0 } else { 1.0 };
                self.pos += 1;
                self.skip_ws();
                im = sign * self.float()?;
                if self.peek() != Some(b'i') {
                    return Err(self.err(&["i"]));
                }
                self.pos += 1;
            }
            _ => {}
        }
        if self.peek() != Some(b')') {
            return Err(self.err(&[")"]));
        }
        self.pos += 1;
        Ok(C64::new(re, im))
    }

    fn float(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.bytes.get(self.pos), Some(b'+') | Some(b'-')) {
            self.pos += 1;
        }
        let mut digits = 0;
        while matches!(self.bytes.get(self.pos), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
            digits += 1;
        }
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            while matches!(self.bytes.get(self.pos), Some(b) if b.is_ascii_digit()) {
                self.pos += 1;
                digits += 1;
            }
        }
        if digits == 0 {
            self.pos = start;
            return Err(self.err(&["number"]));
        }
        if matches!(self.bytes.get(self.pos), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.bytes.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            let mut exp_digits = 0;
            while matches!(self.bytes.get(self.pos), Some(b) if b.is_ascii_digit()) {
                self.pos += 1;
                exp_digits += 1;
            }
            if exp_digits == 0 {
                self.pos = mark; // 'e' belonged to something else
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        text.parse::<f64>().map_err(|_| ParseError {
            offset: start,
            expected: vec!["number"],
            found: text.to_string(),
        })
    }

    fn uint(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.bytes.get(self.pos), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err(&["integer"]));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        match text.parse::<u32>() {
            Ok(v) if v <= MAX_EXPONENT => Ok(v),
            _ => Err(ParseError {
                offset: start,
                expected: vec!["exponent within range"],
                found: text.to_string(),
            }),
        }
    }

    fn letter_factor(&mut self) -> Result<NcPoly, ParseError> {
        self.skip_ws();
        debug_assert_eq!(self.bytes.get(self.pos), Some(&b'a'));
        self.pos += 1;
        self.skip_ws();
        let letter = if self.bytes.get(self.pos) == Some(&b'*') {
            self.pos += 1;
            Letter::AStar
        } else {
            Letter::A
        };
        let exp = self.exponent()?;
        Ok(NcPoly::word(Word::new(vec![letter; exp as usize])))
    }

    fn group_factor(&mut self) -> Result<NcPoly, ParseError> {
        self.skip_ws();
        debug_assert_eq!(self.bytes.get(self.pos), Some(&b'('));
        self.pos += 1;
        let inner = self.poly()?;
        if self.peek() != Some(b')') {
            return Err(self.err(&[")", "+", "-"]));
        }
        self.pos += 1;
        let exp = self.exponent()?;
        let mut acc = NcPoly::one();
        for _ in 0..exp {
            acc = &acc * &inner;
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.uint()
        } else {
            Ok(1)
        }
    }
}

fn format_f64(x: f64) -> String {
    format!("{x}")
}

fn format_coeff(c: C64) -> String {
    if c.im == 0.0 {
        format_f64(c.re)
    } else if c.im < 0.0 {
        format!("({}-{}i)", format_f64(c.re), format_f64(-c.im))
    } else {
        format!("({}+{}i)", format_f64(c.re), format_f64(c.im))
    }
}

pub(super) fn format_word(w: &Word) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut iter = w.letters().iter().peekable();
    while let Some(&b) = iter.next() {
        let mut run = 1usize;
        while iter.peek() == Some(&&b) {
            iter.next();
            run += 1;
        }
        let sym = match b {
            Letter::A => "a",
            Letter::AStar => "a*",
        };
        if run == 1 {
            parts.push(sym.to_string());
        } else {
            parts.push(format!("{sym}^{run}"));
        }
    }
    parts.join(" ")
}

/// Canonical text form; parsing it back reproduces the polynomial exactly.
pub fn canonical(p: &NcPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (w, &c)) in p.terms().enumerate() {
        let (sep, c_eff) = if c.im == 0.0 && c.re < 0.0 {
            // fold the sign of a real coefficient into the separator
            (if i == 0 { "-" } else { " - " }, C64::new(-c.re, 0.0))
        } else {
            (if i == 0 { "" } else { " + " }, c)
        };
        out.push_str(sep);
        if w.is_empty() {
            out.push_str(&format_coeff(c_eff));
        } else if c_eff == C64::new(1.0, 0.0) {
            out.push_str(&format_word(w));
        } else {
            out.push_str(&format_coeff(c_eff));
            out.push(' ');
            out.push_str(&format_word(w));
        }
    }
    out
}
