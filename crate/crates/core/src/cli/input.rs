//! Plain-text key-value fan documents.
//!
//! ```text
//! # weighted projective line with one extension point
//! rank = 1
//! ray = 2
//! ray = -1
//! cone = 1
//! cone = 2
//! ext = 1
//! profile = qdeg=2,tord=0,yord=4
//! chi = symbolic
//! sigma0 = 1
//! basis = 0
//! basis = -1
//! basis = 1
//! ```
//!
//! Rays, extension points and basis points list the free coordinates followed by
//! the torsion coordinates. Cones use 1-based ray indices.

use std::fmt;

use thiserror::Error;

use crate::exactalg::{fmt_rat, parse_rat, rint, Rat};
use crate::iseries::{MirrorSetup, SetupError};
use crate::stackyfan::{NVec, StackyFan};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{0}")]
    Semantic(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileSpec {
    pub qdeg: Rat,
    pub tord: u32,
    pub yord: u32,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        ProfileSpec { qdeg: rint(2), tord: 0, yord: 2 }
    }
}

impl ProfileSpec {
    /// `qdeg=K,tord=K,yord=K`, any subset, in any order.
    pub fn parse_over(&self, text: &str) -> Result<ProfileSpec, String> {
        let mut p = self.clone();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| format!("expected key=value in '{}'", part))?;
            let v = v.trim();
            match k.trim() {
                "qdeg" => p.qdeg = parse_rat(v).ok_or_else(|| format!("bad rational '{}'", v))?,
                "tord" => p.tord = v.parse().map_err(|_| format!("bad order '{}'", v))?,
                "yord" => p.yord = v.parse().map_err(|_| format!("bad order '{}'", v))?,
                other => return Err(format!("unknown profile key '{}'", other)),
            }
        }
        if p.qdeg < Rat::from_integer(0.into()) {
            return Err("qdeg must be non-negative".into());
        }
        Ok(p)
    }
}

impl fmt::Display for ProfileSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "qdeg={},tord={},yord={}", fmt_rat(&self.qdeg), self.tord, self.yord)
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub enum ChiMode {
    #[default]
    Symbolic,
    Values(Vec<Rat>),
}

impl ChiMode {
    pub fn parse(text: &str) -> Result<ChiMode, String> {
        let t = text.trim();
        if t == "symbolic" {
            return Ok(ChiMode::Symbolic);
        }
        t.split(',')
            .map(|s| parse_rat(s.trim()).ok_or_else(|| format!("bad rational '{}'", s.trim())))
            .collect::<Result<Vec<_>, _>>()
            .map(ChiMode::Values)
    }
}

impl fmt::Display for ChiMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChiMode::Symbolic => write!(f, "symbolic"),
            ChiMode::Values(v) => write!(f, "{}", v.iter().map(fmt_rat).collect::<Vec<_>>().join(",")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InputDocument {
    pub rank: usize,
    pub torsion: Vec<i64>,
    pub rays: Vec<NVec>,
    /// 1-based.
    pub cones: Vec<Vec<usize>>,
    pub ext: Vec<NVec>,
    /// Divisor vector in (ℚ^m)*.
    pub ample: Option<Vec<Rat>>,
    pub profile: ProfileSpec,
    pub chi: ChiMode,
    /// 1-based.
    pub sigma0: usize,
    pub basis: Option<Vec<NVec>>,
}

impl InputDocument {
    pub fn fan(&self) -> Result<StackyFan, ParseError> {
        let cones = self.cones.iter().map(|c| c.iter().map(|i| i - 1).collect()).collect();
        StackyFan::new(self.rank, self.torsion.clone(), self.rays.clone(), cones).map_err(|e| ParseError::Semantic(e.to_string()))
    }

    pub fn setup(&self, fan: &StackyFan) -> Result<MirrorSetup, SetupError> {
        let chi = match &self.chi {
            ChiMode::Symbolic => None,
            ChiMode::Values(v) => Some(v.as_slice()),
        };
        MirrorSetup::new(
            fan,
            self.sigma0 - 1,
            &self.ext,
            self.ample.as_deref(),
            self.profile.qdeg.clone(),
            self.profile.tord,
            self.profile.yord,
            chi,
        )
    }

    /// Canonical text form; `parse_input` of it gives back the same document.
    pub fn serialize(&self) -> String {
        let vec = |v: &[i64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut out = format!("rank = {}\n", self.rank);
        if !self.torsion.is_empty() {
            out += &format!("torsion = {}\n", vec(&self.torsion));
        }
        for r in &self.rays {
            out += &format!("ray = {}\n", vec(r));
        }
        for c in &self.cones {
            out += &format!("cone = {}\n", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
        }
        for l in &self.ext {
            out += &format!("ext = {}\n", vec(l));
        }
        if let Some(a) = &self.ample {
            out += &format!("ample = {}\n", a.iter().map(fmt_rat).collect::<Vec<_>>().join(" "));
        }
        out += &format!("profile = {}\n", self.profile);
        out += &format!("chi = {}\n", self.chi);
        out += &format!("sigma0 = {}\n", self.sigma0);
        if let Some(b) = &self.basis {
            for k in b {
                out += &format!("basis = {}\n", vec(k));
            }
        }
        out
    }
}

struct Line<'a> {
    no: usize,
    value: &'a str,
    /// 1-based column of the value start.
    col: usize,
}

impl Line<'_> {
    fn err(&self, offset: usize, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: self.no, col: self.col + offset, msg: msg.into() }
    }

    /// Whitespace- or comma-separated tokens with their offsets.
    fn tokens(&self) -> Vec<(usize, &str)> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, ch) in self.value.char_indices() {
            let sep = ch.is_whitespace() || ch == ',';
            match (sep, start) {
                (true, Some(s)) => {
                    out.push((s, &self.value[s..i]));
                    start = None;
                }
                (false, None) => start = Some(i),
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push((s, &self.value[s..]));
        }
        out
    }

    fn ints(&self) -> Result<Vec<i64>, ParseError> {
        self.tokens().into_iter().map(|(o, t)| t.parse::<i64>().map_err(|_| self.err(o, format!("expected an integer, found '{}'", t)))).collect()
    }

    fn indices(&self) -> Result<Vec<usize>, ParseError> {
        self.tokens()
            .into_iter()
            .map(|(o, t)| match t.parse::<usize>() {
                Ok(0) => Err(self.err(o, "ray indices are 1-based")),
                Ok(i) => Ok(i),
                Err(_) => Err(self.err(o, format!("expected a ray index, found '{}'", t))),
            })
            .collect()
    }

    fn rats(&self) -> Result<Vec<Rat>, ParseError> {
        self.tokens().into_iter().map(|(o, t)| parse_rat(t).ok_or_else(|| self.err(o, format!("expected a rational, found '{}'", t)))).collect()
    }
}

/// Parses and validates a document: syntax, index ranges, vector lengths and the fan axioms.
pub fn parse_input(text: &str) -> Result<InputDocument, ParseError> {
    let mut rank = None;
    let mut torsion = None;
    let mut rays = Vec::new();
    let mut cones = Vec::new();
    let mut ext = Vec::new();
    let mut ample = None;
    let mut profile = None;
    let mut chi = None;
    let mut sigma0 = None;
    let mut basis: Option<Vec<NVec>> = None;
    let mut cone_lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let lead = content.len() - content.trim_start().len();
        let Some(eq) = content.find('=') else {
            return Err(ParseError::Syntax { line: i + 1, col: lead + 1, msg: "expected 'key = value'".into() });
        };
        let key = content[..eq].trim();
        let after = &content[eq + 1..];
        let vstart = eq + 1 + (after.len() - after.trim_start().len());
        let line = Line { no: i + 1, value: after.trim(), col: vstart + 1 };
        let once = |slot_set: bool| -> Result<(), ParseError> {
            if slot_set {
                Err(ParseError::Syntax { line: i + 1, col: lead + 1, msg: format!("'{}' given twice", key) })
            } else {
                Ok(())
            }
        };
        match key {
            "rank" => {
                once(rank.is_some())?;
                rank = Some(line.value.parse::<usize>().map_err(|_| line.err(0, "expected a non-negative integer"))?);
            }
            "torsion" => {
                once(torsion.is_some())?;
                torsion = Some(line.ints()?);
            }
            "ray" => rays.push((line.ints()?, i + 1)),
            "cone" => {
                cones.push(line.indices()?);
                cone_lines.push(i + 1);
            }
            "ext" => ext.push((line.ints()?, i + 1)),
            "basis" => basis.get_or_insert_with(Vec::new).push(line.ints()?),
            "ample" => {
                once(ample.is_some())?;
                ample = Some(line.rats()?);
            }
            "profile" => {
                once(profile.is_some())?;
                profile = Some(ProfileSpec::default().parse_over(line.value).map_err(|m| line.err(0, m))?);
            }
            "chi" => {
                once(chi.is_some())?;
                chi = Some(ChiMode::parse(line.value).map_err(|m| line.err(0, m))?);
            }
            "sigma0" => {
                once(sigma0.is_some())?;
                sigma0 = Some(match line.value.parse::<usize>() {
                    Ok(s) if s >= 1 => s,
                    _ => return Err(line.err(0, "expected a 1-based cone index")),
                });
            }
            _ => return Err(ParseError::Syntax { line: i + 1, col: lead + 1, msg: format!("unknown key '{}'", key) }),
        }
    }
    let rank = rank.ok_or_else(|| ParseError::Semantic("missing 'rank'".into()))?;
    let torsion = torsion.unwrap_or_default();
    let width = rank + torsion.len();
    let check_len = |v: &[i64], line: usize, what: &str| -> Result<(), ParseError> {
        if v.len() != width {
            return Err(ParseError::Semantic(format!("line {}: {} has {} coordinates, expected {}", line, what, v.len(), width)));
        }
        Ok(())
    };
    for (r, l) in &rays {
        check_len(r, *l, "ray")?;
    }
    for (r, l) in &ext {
        check_len(r, *l, "extension point")?;
    }
    if let Some(b) = &basis {
        for k in b {
            if k.len() != width {
                return Err(ParseError::Semantic(format!("basis point {:?} has {} coordinates, expected {}", k, k.len(), width)));
            }
        }
    }
    let m = rays.len();
    for (c, l) in cones.iter().zip(&cone_lines) {
        if let Some(bad) = c.iter().find(|&&j| j > m) {
            return Err(ParseError::Semantic(format!("line {}: ray index {} out of range (there are {} rays)", l, bad, m)));
        }
    }
    if cones.is_empty() {
        // the zero cone
        cones.push(vec![]);
    }
    if let Some(a) = &ample {
        if a.len() != m {
            return Err(ParseError::Semantic(format!("ample class has {} entries, expected {}", a.len(), m)));
        }
    }
    let doc = InputDocument {
        rank,
        torsion,
        rays: rays.into_iter().map(|r| r.0).collect(),
        cones,
        ext: ext.into_iter().map(|r| r.0).collect(),
        ample,
        profile: profile.unwrap_or_default(),
        chi: chi.unwrap_or_default(),
        sigma0: sigma0.unwrap_or(1),
        basis,
    };
    let fan = doc.fan()?;
    let diag = fan.validate();
    if let Some(e) = diag.errors.first() {
        return Err(ParseError::Semantic(e.to_string()));
    }
    if doc.sigma0 > fan.max_cones.len() {
        return Err(ParseError::Semantic(format!("sigma0 = {} but there are {} maximal cones", doc.sigma0, fan.max_cones.len())));
    }
    if let ChiMode::Values(v) = &doc.chi {
        if v.len() != fan.rank {
            return Err(ParseError::Semantic(format!("chi has {} values, expected {}", v.len(), fan.rank)));
        }
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P1: &str = "rank = 1\nray = 1\nray = -1\ncone = 1\ncone = 2\n";

    #[test]
    fn projective_line_document() {
        let d = parse_input(P1).unwrap();
        assert_eq!(d.rays, vec![vec![1], vec![-1]]);
        assert_eq!(d.cones, vec![vec![1], vec![2]]);
        assert_eq!(d.profile, ProfileSpec::default());
        assert_eq!(parse_input(&d.serialize()).unwrap(), d);
    }

    #[test]
    fn dependent_cone_rejected() {
        let e = parse_input("rank = 1\nray = 1\nray = -1\ncone = 1 2\n").unwrap_err();
        assert!(matches!(e, ParseError::Semantic(ref m) if m.contains("linearly dependent")), "{e}");
    }

    #[test]
    fn positioned_errors() {
        assert_eq!(
            parse_input("rank = 1\nray = 1 x\n").unwrap_err(),
            ParseError::Syntax { line: 2, col: 9, msg: "expected an integer, found 'x'".into() }
        );
        assert!(matches!(parse_input("rank = 1\n  colour = 3\n").unwrap_err(), ParseError::Syntax { line: 2, col: 3, .. }));
        assert!(matches!(parse_input("rank = 1\nray = 1\ncone = 0\n").unwrap_err(), ParseError::Syntax { line: 3, col: 8, .. }));
        assert!(matches!(parse_input("rank = 1\nray = 1\ncone = 3\n").unwrap_err(), ParseError::Semantic(_)));
        assert!(matches!(parse_input("ray = 1\n").unwrap_err(), ParseError::Semantic(_)));
    }

    #[test]
    fn overrides_and_modes() {
        let p = ProfileSpec::default().parse_over("yord=6, qdeg=1/2").unwrap();
        assert_eq!(p, ProfileSpec { qdeg: crate::exactalg::rat(1, 2), tord: 0, yord: 6 });
        assert!(ProfileSpec::default().parse_over("depth=2").is_err());
        assert_eq!(ChiMode::parse("3, -1/2").unwrap(), ChiMode::Values(vec![rint(3), crate::exactalg::rat(-1, 2)]));
        let d = parse_input(&format!("{}chi = 3\nprofile = yord=0\n", P1)).unwrap();
        assert_eq!(parse_input(&d.serialize()).unwrap(), d);
    }
}
