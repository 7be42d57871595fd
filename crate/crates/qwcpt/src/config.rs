//! Run configuration: a flat key-value file in JSON object notation.
//!
//! The file holds a single `{ ... }` object whose values are numbers,
//! strings, or booleans; nesting is not accepted. Phase-valued fields
//! (`phi`, and the sweep bounds `start`/`stop`) may be written as strings
//! with a `pi` multiplier, e.g. `"0.5pi"` or `"-pi"`. Unknown keys are
//! rejected with their position so typos cannot silently fall back to a
//! default.
//!
//! The parser is hand rolled: the accepted language is tiny, and reporting
//! the exact line and column of a mistake matters more here than JSON
//! generality.

use crate::error::{Error, Result};
use crate::model::{default_rates, detunings_from_delta, DriveParams, RateSet};
use crate::sweep::SweepParam;

/// Everything a run can configure. Sweep fields stay `None` when the file
/// does not mention them so the command line can fill its own defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub drive: DriveParams,
    pub rates: RateSet,
    pub eq13_consistent: bool,
    pub output_path: Option<String>,
    pub emit_svg: bool,
    pub param: Option<SweepParam>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            drive: DriveParams::default(),
            rates: default_rates(),
            eq13_consistent: false,
            output_path: None,
            emit_svg: false,
            param: None,
            start: None,
            stop: None,
            count: None,
        }
    }
}

/// Scalar that may carry a `pi` multiplier: "pi", "-pi", "0.5pi", "2pi",
/// or a plain numeric string.
pub fn parse_scalar_with_pi(s: &str) -> Option<f64> {
    let t = s.trim();
    if let Some(coeff) = t.strip_suffix("pi") {
        let c = match coeff {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other.parse::<f64>().ok()?,
        };
        return Some(c * std::f64::consts::PI);
    }
    t.parse::<f64>().ok()
}

#[derive(Debug, Clone, PartialEq)]
enum Val {
    Num(f64),
    Str(String),
    Bool(bool),
}

struct Cursor<'a> {
    rest: std::str::Chars<'a>,
    peeked: Option<char>,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { rest: text.chars(), peeked: None, line: 1, col: 1 }
    }

    fn peek(&mut self) -> Option<char> {
        if self.peeked.is_none() {
            self.peeked = self.rest.next();
        }
        self.peeked
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.peeked = None;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line, col: self.col, msg: msg.into() }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.err(format!("expected '{want}', found '{c}'"))),
            None => Err(self.err(format!("expected '{want}', found end of input"))),
        }
    }

    fn string(&mut self) -> Result<String> {
        self.expect('"')?;
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(out),
                Some('\\') => match self.bump() {
                    Some(c @ ('"' | '\\' | '/')) => out.push(c),
                    Some(c) => return Err(self.err(format!("unsupported escape '\\{c}'"))),
                    None => return Err(self.err("unterminated string")),
                },
                Some('\n') | None => return Err(self.err("unterminated string")),
                Some(c) => out.push(c),
            }
        }
    }

    fn value(&mut self) -> Result<Val> {
        match self.peek() {
            Some('"') => Ok(Val::Str(self.string()?)),
            Some('t') | Some('f') => {
                let mut word = String::new();
                while matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
                    word.push(self.bump().unwrap());
                }
                match word.as_str() {
                    "true" => Ok(Val::Bool(true)),
                    "false" => Ok(Val::Bool(false)),
                    other => Err(self.err(format!("expected true or false, found {other:?}"))),
                }
            }
            Some(c) if c == '-' || c == '+' || c == '.' || c.is_ascii_digit() => {
                let mut lit = String::new();
                while matches!(self.peek(), Some(c) if c == '-' || c == '+' || c == '.' || c == 'e' || c == 'E' || c.is_ascii_digit())
                {
                    lit.push(self.bump().unwrap());
                }
                lit.parse::<f64>()
                    .map(Val::Num)
                    .map_err(|_| self.err(format!("invalid number literal {lit:?}")))
            }
            Some(c) => Err(self.err(format!("expected a value, found '{c}'"))),
            None => Err(self.err("expected a value, found end of input")),
        }
    }
}

/// Parse configuration text. Later occurrences of a key override earlier
/// ones; unknown keys and malformed values are errors.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut saw_delta = false;
    let mut saw_split = false;

    let mut cur = Cursor::new(text);
    cur.skip_ws();
    cur.expect('{')?;
    cur.skip_ws();
    if cur.peek() != Some('}') {
        loop {
            cur.skip_ws();
            let (key_line, key_col) = (cur.line, cur.col);
            let key = cur.string()?;
            cur.skip_ws();
            cur.expect(':')?;
            cur.skip_ws();
            let (val_line, val_col) = (cur.line, cur.col);
            let val = cur.value()?;
            apply_key(
                &mut cfg,
                &key,
                val,
                (key_line, key_col),
                (val_line, val_col),
                &mut saw_delta,
                &mut saw_split,
            )?;
            cur.skip_ws();
            match cur.peek() {
                Some(',') => {
                    cur.bump();
                }
                Some('}') => break,
                Some(c) => return Err(cur.err(format!("expected ',' or '}}', found '{c}'"))),
                None => return Err(cur.err("expected ',' or '}', found end of input")),
            }
        }
    }
    cur.skip_ws();
    cur.expect('}')?;
    cur.skip_ws();
    if let Some(c) = cur.peek() {
        return Err(cur.err(format!("unexpected trailing content starting with '{c}'")));
    }

    if saw_delta && saw_split {
        return Err(Error::Range(
            "config sets both \"delta\" and an explicit \"delta1\"/\"delta2\"; use one form".into(),
        ));
    }
    if let (Some(a), Some(b)) = (cfg.start, cfg.stop) {
        if !(a < b) {
            return Err(Error::Range(format!("sweep start must be below stop, got {a} .. {b}")));
        }
    }
    cfg.drive.validate().map_err(range_of)?;
    cfg.rates.validate().map_err(range_of)?;
    Ok(cfg)
}

/// Read and parse a configuration file.
pub fn load_config(path: &std::path::Path) -> Result<RunConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

fn range_of(e: Error) -> Error {
    match e {
        Error::InvalidParams(m) => Error::Range(m),
        other => other,
    }
}

fn apply_key(
    cfg: &mut RunConfig,
    key: &str,
    val: Val,
    key_pos: (usize, usize),
    val_pos: (usize, usize),
    saw_delta: &mut bool,
    saw_split: &mut bool,
) -> Result<()> {
    let num = |v: &Val| -> Result<f64> {
        match v {
            Val::Num(x) => Ok(*x),
            _ => Err(Error::Parse {
                line: val_pos.0,
                col: val_pos.1,
                msg: format!("key {key:?} expects a number"),
            }),
        }
    };
    // Phase-like fields additionally accept "…pi" strings.
    let angle = |v: &Val| -> Result<f64> {
        match v {
            Val::Num(x) => Ok(*x),
            Val::Str(s) => parse_scalar_with_pi(s).ok_or(Error::Parse {
                line: val_pos.0,
                col: val_pos.1,
                msg: format!("key {key:?} expects a number or a pi multiple like \"0.5pi\", got {s:?}"),
            }),
            Val::Bool(_) => Err(Error::Parse {
                line: val_pos.0,
                col: val_pos.1,
                msg: format!("key {key:?} expects a number"),
            }),
        }
    };
    let flag = |v: &Val| -> Result<bool> {
        match v {
            Val::Bool(b) => Ok(*b),
            _ => Err(Error::Parse {
                line: val_pos.0,
                col: val_pos.1,
                msg: format!("key {key:?} expects true or false"),
            }),
        }
    };
    let text = |v: &Val| -> Result<String> {
        match v {
            Val::Str(s) => Ok(s.clone()),
            _ => Err(Error::Parse {
                line: val_pos.0,
                col: val_pos.1,
                msg: format!("key {key:?} expects a string"),
            }),
        }
    };

    match key {
        "omega1" => cfg.drive.omega1 = num(&val)?,
        "omega2" => cfg.drive.omega2 = num(&val)?,
        "v" => cfg.drive.v = num(&val)?,
        "q" => cfg.drive.q = num(&val)?,
        "kappa" => cfg.drive.kappa = num(&val)?,
        "delta1" => {
            cfg.drive.delta1 = num(&val)?;
            *saw_split = true;
        }
        "delta2" => {
            cfg.drive.delta2 = num(&val)?;
            *saw_split = true;
        }
        "delta" => {
            let (d1, d2) = detunings_from_delta(num(&val)?);
            cfg.drive.delta1 = d1;
            cfg.drive.delta2 = d2;
            *saw_delta = true;
        }
        "big_delta" => cfg.drive.big_delta = num(&val)?,
        "phi" => cfg.drive.phi = angle(&val)?,
        "gamma21" => cfg.rates.gamma21 = num(&val)?,
        "gamma31" => cfg.rates.gamma31 = num(&val)?,
        "gamma32" => cfg.rates.gamma32 = num(&val)?,
        "gamma41" => cfg.rates.gamma41 = num(&val)?,
        "gamma42" => cfg.rates.gamma42 = num(&val)?,
        "Gamma12" => cfg.rates.big_gamma12 = num(&val)?,
        "Gamma13" => cfg.rates.big_gamma13 = num(&val)?,
        "Gamma14" => cfg.rates.big_gamma14 = num(&val)?,
        "Gamma23" => cfg.rates.big_gamma23 = num(&val)?,
        "Gamma24" => cfg.rates.big_gamma24 = num(&val)?,
        "Gamma34" => cfg.rates.big_gamma34 = num(&val)?,
        "gamma_si" => cfg.rates.gamma_si = num(&val)?,
        "eq13_consistent" => cfg.eq13_consistent = flag(&val)?,
        "output_path" => cfg.output_path = Some(text(&val)?),
        "emit_svg" => cfg.emit_svg = flag(&val)?,
        "param" => cfg.param = Some(text(&val)?.parse()?),
        "start" => cfg.start = Some(angle(&val)?),
        "stop" => cfg.stop = Some(angle(&val)?),
        "count" => {
            let x = num(&val)?;
            if !x.is_finite() || x.fract() != 0.0 || x < 0.0 || x > u32::MAX as f64 {
                return Err(Error::Range(format!("count must be a whole number of grid points, got {x}")));
            }
            let n = x as usize;
            if n < 2 {
                return Err(Error::Range(format!("count must be at least 2, got {n}")));
            }
            cfg.count = Some(n);
        }
        other => {
            return Err(Error::UnknownKey {
                key: other.to_string(),
                line: key_pos.0,
                col: key_pos.1,
            })
        }
    }
    Ok(())
}
