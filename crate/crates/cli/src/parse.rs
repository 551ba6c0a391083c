//! The CLI mini-languages for rooted spaces and IRS laws.
//!
//! Spaces: `trivial | full | zq:a | zq:b | kn:N | kn:N@a^i | kn:N@b^i |
//! cover:kn=N,p=P,seed=S[,root=a^i|b^i]`.
//! IRS laws: `trivial | full | zmix | conj-kn:N | perc-kn:N,p=P`.

use coset_walk_core::{Axis, IrsSpec, SpaceSpec};

#[derive(Debug, PartialEq)]
pub struct ParseError(pub String);

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid spec: {}", self.0)
    }
}

impl std::error::Error for ParseError {}

fn err(msg: impl Into<String>) -> ParseError {
    ParseError(msg.into())
}

fn parse_axis(s: &str) -> Result<Axis, ParseError> {
    match s {
        "a" => Ok(Axis::A),
        "b" => Ok(Axis::B),
        _ => Err(err(format!("expected axis 'a' or 'b', got '{s}'"))),
    }
}

/// Parses a conjugate root `a^i` or `b^i`.
pub fn parse_root(s: &str) -> Result<(Axis, u32), ParseError> {
    let (axis, i) = s.split_once('^').ok_or_else(|| err(format!("expected root like 'a^1', got '{s}'")))?;
    let axis = parse_axis(axis)?;
    let i = i.parse().map_err(|_| err(format!("bad root exponent '{i}'")))?;
    Ok((axis, i))
}

pub fn parse_space(s: &str) -> Result<SpaceSpec, ParseError> {
    match s {
        "trivial" => return Ok(SpaceSpec::Trivial),
        "full" => return Ok(SpaceSpec::FullGroup),
        "zq:a" => return Ok(SpaceSpec::ZQuotient { kill: Axis::A }),
        "zq:b" => return Ok(SpaceSpec::ZQuotient { kill: Axis::B }),
        _ => {}
    }
    if let Some(rest) = s.strip_prefix("kn:") {
        let (n, root) = match rest.split_once('@') {
            None => (rest, None),
            Some((n, root)) => (n, Some(parse_root(root)?)),
        };
        let n = n.parse().map_err(|_| err(format!("bad K_n parameter '{n}'")))?;
        if let Some((_, i)) = root {
            if i >= n {
                return Err(err(format!("conjugate index {i} out of range for kn:{n}")));
            }
        }
        return Ok(SpaceSpec::Kn { n, root });
    }
    if let Some(rest) = s.strip_prefix("cover:") {
        let mut n = None;
        let mut p = None;
        let mut seed = None;
        let mut root = None;
        for field in rest.split(',') {
            let (key, value) =
                field.split_once('=').ok_or_else(|| err(format!("expected key=value, got '{field}'")))?;
            match key {
                "kn" => n = Some(value.parse().map_err(|_| err(format!("bad kn value '{value}'")))?),
                "p" => p = Some(value.parse().map_err(|_| err(format!("bad p value '{value}'")))?),
                "seed" => seed = Some(value.parse().map_err(|_| err(format!("bad seed '{value}'")))?),
                "root" => root = Some(parse_root(value)?),
                _ => return Err(err(format!("unknown cover field '{key}'"))),
            }
        }
        let n = n.ok_or_else(|| err("cover spec needs kn=N"))?;
        let p: f64 = p.ok_or_else(|| err("cover spec needs p=P"))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(err(format!("p must be in [0,1], got {p}")));
        }
        let seed = seed.ok_or_else(|| err("cover spec needs seed=S"))?;
        if let Some((_, i)) = root {
            if i >= n {
                return Err(err(format!("conjugate index {i} out of range for kn={n}")));
            }
        }
        return Ok(SpaceSpec::Cover { n, p, seed, root });
    }
    Err(err(format!("unknown space '{s}'")))
}

pub fn parse_irs(s: &str) -> Result<IrsSpec, ParseError> {
    match s {
        "trivial" => return Ok(IrsSpec::TrivialSubgroup),
        "full" => return Ok(IrsSpec::FullGroup),
        "zmix" => return Ok(IrsSpec::ZQuotientMix),
        _ => {}
    }
    if let Some(n) = s.strip_prefix("conj-kn:") {
        let n = n.parse().map_err(|_| err(format!("bad conj-kn parameter '{n}'")))?;
        return Ok(IrsSpec::ConjClassKn { n });
    }
    if let Some(rest) = s.strip_prefix("perc-kn:") {
        let (n, p) = rest
            .split_once(",p=")
            .ok_or_else(|| err(format!("expected perc-kn:N,p=P, got '{s}'")))?;
        let n = n.parse().map_err(|_| err(format!("bad perc-kn parameter '{n}'")))?;
        let p: f64 = p.parse().map_err(|_| err(format!("bad p value '{p}'")))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(err(format!("p must be in [0,1], got {p}")));
        }
        return Ok(IrsSpec::PercolationKn { n, p });
    }
    Err(err(format!("unknown IRS '{s}'")))
}

/// A strictly increasing probability grid from a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, ParseError> {
    let grid: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse().map_err(|_| err(format!("bad grid value '{x}'"))))
        .collect::<Result<_, _>>()?;
    if grid.is_empty() {
        return Err(err("empty grid"));
    }
    if grid.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(err("grid values must be in [0,1]"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(err("grid must be strictly increasing"));
    }
    Ok(grid)
}
