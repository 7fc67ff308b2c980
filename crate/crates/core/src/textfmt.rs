//! Textual diagram format: one record per line, UTF-8.
//!
//! ```text
//! # comment
//! meta tkind=link valences=[] flags=irr,ssep gbound=none
//! surface h0 role=thick genus=0 punctures=4
//! surface v0 role=boundary genus=0 punctures=3 drilled
//! body top plus=h0 minus=[f0,f1] bridge=1 vertical={f0:2} ghost=[(f0,f1)] loops=0 pockets=0
//! orient h0 bot top
//! ```
//!
//! The printer emits records sorted by id; the parser is
//! whitespace-tolerant (spaces inside bracketed lists are fine).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{
    BodyId, Compressionbody, Diagram, GraphPairMeta, Role, SurfaceComp, SurfaceId, TKind,
};

#[derive(Debug, Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        line,
        msg: msg.into(),
    }
}

/// Splits a record line into tokens, keeping bracketed groups together.
fn tokenize(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for ch in line.chars() {
        match ch {
            '[' | '{' | '(' => {
                depth += 1;
                cur.push(ch);
            }
            ']' | '}' | ')' => {
                depth -= 1;
                cur.push(ch);
            }
            c if c.is_whitespace() && depth == 0 => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn split_kv(tok: &str) -> Option<(&str, &str)> {
    tok.split_once('=')
}

fn parse_u32(line: usize, what: &str, s: &str) -> Result<u32, ParseError> {
    s.parse::<u32>()
        .map_err(|_| err(line, format!("bad {}: {:?}", what, s)))
}

fn strip_brackets(line: usize, s: &str, open: char, close: char) -> Result<&str, ParseError> {
    let s = s.trim();
    if !s.starts_with(open) || !s.ends_with(close) {
        return Err(err(
            line,
            format!("expected {}...{}, got {:?}", open, close, s),
        ));
    }
    Ok(&s[open.len_utf8()..s.len() - close.len_utf8()])
}

fn split_top_commas(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
        .into_iter()
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .collect()
}

fn valid_id(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

fn parse_id(line: usize, s: &str) -> Result<String, ParseError> {
    if valid_id(s) {
        Ok(s.to_owned())
    } else {
        Err(err(line, format!("bad identifier {:?}", s)))
    }
}

/// Parses a diagram from its textual form.
pub fn parse(input: &str) -> Result<Diagram, ParseError> {
    let mut meta: Option<GraphPairMeta> = None;
    let mut surfaces: BTreeMap<SurfaceId, SurfaceComp> = BTreeMap::new();
    let mut bodies: BTreeMap<BodyId, Compressionbody> = BTreeMap::new();
    let mut orientation: BTreeMap<SurfaceId, (BodyId, BodyId)> = BTreeMap::new();

    for (lineno, raw) in input.lines().enumerate() {
        let lineno = lineno + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let toks = tokenize(line);
        if toks.is_empty() {
            continue;
        }
        match toks[0].as_str() {
            "meta" => {
                if meta.is_some() {
                    return Err(err(lineno, "duplicate meta record"));
                }
                meta = Some(parse_meta(lineno, &toks[1..])?);
            }
            "surface" => {
                if toks.len() < 2 {
                    return Err(err(lineno, "surface record needs an id"));
                }
                let s = parse_surface(lineno, &toks[1..])?;
                if surfaces.insert(s.id.clone(), s).is_some() {
                    return Err(err(lineno, "duplicate surface id"));
                }
            }
            "body" => {
                if toks.len() < 2 {
                    return Err(err(lineno, "body record needs an id"));
                }
                let b = parse_body(lineno, &toks[1..])?;
                if bodies.insert(b.id.clone(), b).is_some() {
                    return Err(err(lineno, "duplicate body id"));
                }
            }
            "orient" => {
                if toks.len() != 4 {
                    return Err(err(lineno, "orient record: orient <sid> <body> <body>"));
                }
                let sid = SurfaceId(parse_id(lineno, &toks[1])?);
                let src = BodyId(parse_id(lineno, &toks[2])?);
                let tgt = BodyId(parse_id(lineno, &toks[3])?);
                if orientation.insert(sid, (src, tgt)).is_some() {
                    return Err(err(lineno, "duplicate orient record"));
                }
            }
            other => return Err(err(lineno, format!("unknown record kind {:?}", other))),
        }
    }

    let meta = meta.ok_or_else(|| err(0, "missing meta record"))?;
    Ok(Diagram {
        meta,
        surfaces,
        bodies,
        orientation,
    })
}

fn parse_meta(line: usize, toks: &[String]) -> Result<GraphPairMeta, ParseError> {
    let mut t_kind = None;
    let mut valences = Vec::new();
    let mut irr = false;
    let mut ssep = false;
    let mut csep = false;
    let mut gbound = None;
    for tok in toks {
        let (k, v) = split_kv(tok).ok_or_else(|| err(line, format!("bad meta token {:?}", tok)))?;
        match k {
            "tkind" => {
                t_kind = Some(match v {
                    "empty" => TKind::Empty,
                    "link" => TKind::Link,
                    "graph" => TKind::Graph,
                    _ => return Err(err(line, format!("bad tkind {:?}", v))),
                });
            }
            "valences" => {
                let inner = strip_brackets(line, v, '[', ']')?;
                for part in split_top_commas(inner) {
                    valences.push(parse_u32(line, "valence", part)?);
                }
            }
            "flags" => {
                if v != "none" {
                    for part in v.split(',').filter(|p| !p.is_empty()) {
                        match part {
                            "irr" => irr = true,
                            "ssep" => ssep = true,
                            "csep" => csep = true,
                            _ => return Err(err(line, format!("unknown flag {:?}", part))),
                        }
                    }
                }
            }
            "gbound" => {
                gbound = if v == "none" {
                    None
                } else {
                    Some(parse_u32(line, "gbound", v)?)
                };
            }
            _ => return Err(err(line, format!("unknown meta key {:?}", k))),
        }
    }
    let t_kind = t_kind.ok_or_else(|| err(line, "meta record missing tkind"))?;
    valences.sort_unstable();
    Ok(GraphPairMeta {
        t_kind,
        vertex_valences: valences,
        irreducible: irr,
        every_sphere_separates: ssep,
        every_surface_separates: csep,
        heegaard_genus_bound: gbound,
    })
}

fn parse_surface(line: usize, toks: &[String]) -> Result<SurfaceComp, ParseError> {
    let id = parse_id(line, &toks[0])?;
    let mut role = None;
    let mut genus = None;
    let mut punctures = None;
    let mut drilled = false;
    for tok in &toks[1..] {
        if tok == "drilled" {
            drilled = true;
            continue;
        }
        let (k, v) =
            split_kv(tok).ok_or_else(|| err(line, format!("bad surface token {:?}", tok)))?;
        match k {
            "role" => {
                role = Some(match v {
                    "thick" => Role::Thick,
                    "thin" => Role::Thin,
                    "boundary" => Role::Boundary,
                    _ => return Err(err(line, format!("bad role {:?}", v))),
                });
            }
            "genus" => genus = Some(parse_u32(line, "genus", v)?),
            "punctures" => punctures = Some(parse_u32(line, "punctures", v)?),
            _ => return Err(err(line, format!("unknown surface key {:?}", k))),
        }
    }
    let role = role.ok_or_else(|| err(line, "surface missing role"))?;
    if drilled && role != Role::Boundary {
        return Err(err(line, "only boundary surfaces can be drilled"));
    }
    Ok(SurfaceComp {
        id: SurfaceId(id),
        genus: genus.ok_or_else(|| err(line, "surface missing genus"))?,
        punctures: punctures.ok_or_else(|| err(line, "surface missing punctures"))?,
        role,
        drilled,
    })
}

fn parse_body(line: usize, toks: &[String]) -> Result<Compressionbody, ParseError> {
    let id = parse_id(line, &toks[0])?;
    let mut body = Compressionbody {
        id: BodyId(id),
        plus: SurfaceId(String::new()),
        minus: Vec::new(),
        bridge_arcs: 0,
        vertical_arcs: BTreeMap::new(),
        ghost_arcs: Vec::new(),
        core_loops: 0,
        pocket_trees: 0,
    };
    let mut have_plus = false;
    for tok in &toks[1..] {
        let (k, v) = split_kv(tok).ok_or_else(|| err(line, format!("bad body token {:?}", tok)))?;
        match k {
            "plus" => {
                body.plus = SurfaceId(parse_id(line, v)?);
                have_plus = true;
            }
            "minus" => {
                let inner = strip_brackets(line, v, '[', ']')?;
                for part in split_top_commas(inner) {
                    body.minus.push(SurfaceId(parse_id(line, part)?));
                }
            }
            "bridge" => body.bridge_arcs = parse_u32(line, "bridge", v)?,
            "vertical" => {
                let inner = strip_brackets(line, v, '{', '}')?;
                for part in split_top_commas(inner) {
                    let (sid, n) = part
                        .split_once(':')
                        .ok_or_else(|| err(line, format!("bad vertical entry {:?}", part)))?;
                    let count = parse_u32(line, "vertical count", n.trim())?;
                    if count > 0 {
                        body.vertical_arcs
                            .insert(SurfaceId(parse_id(line, sid.trim())?), count);
                    }
                }
            }
            "ghost" => {
                let inner = strip_brackets(line, v, '[', ']')?;
                for part in split_top_commas(inner) {
                    let pair = strip_brackets(line, part, '(', ')')?;
                    let items = split_top_commas(pair);
                    if items.len() != 2 {
                        return Err(err(line, format!("bad ghost pair {:?}", part)));
                    }
                    body.ghost_arcs.push((
                        SurfaceId(parse_id(line, items[0])?),
                        SurfaceId(parse_id(line, items[1])?),
                    ));
                }
            }
            "loops" => body.core_loops = parse_u32(line, "loops", v)?,
            "pockets" => body.pocket_trees = parse_u32(line, "pockets", v)?,
            _ => return Err(err(line, format!("unknown body key {:?}", k))),
        }
    }
    if !have_plus {
        return Err(err(line, "body missing plus surface"));
    }
    Ok(body)
}

/// Prints a diagram in the textual format, records sorted by id.
pub fn print(d: &Diagram) -> String {
    let mut out = String::new();
    let mut flags: Vec<&str> = Vec::new();
    if d.meta.irreducible {
        flags.push("irr");
    }
    if d.meta.every_sphere_separates {
        flags.push("ssep");
    }
    if d.meta.every_surface_separates {
        flags.push("csep");
    }
    let flag_str = if flags.is_empty() {
        "none".to_owned()
    } else {
        flags.join(",")
    };
    let valences = d
        .meta
        .vertex_valences
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let gbound = d
        .meta
        .heegaard_genus_bound
        .map_or_else(|| "none".to_owned(), |g| g.to_string());
    let _ = writeln!(
        out,
        "meta tkind={} valences=[{}] flags={} gbound={}",
        d.meta.t_kind, valences, flag_str, gbound
    );

    for s in d.surfaces.values() {
        let drilled = if s.drilled { " drilled" } else { "" };
        let _ = writeln!(
            out,
            "surface {} role={} genus={} punctures={}{}",
            s.id, s.role, s.genus, s.punctures, drilled
        );
    }

    for b in d.bodies.values() {
        let minus = b
            .minus
            .iter()
            .map(|m| m.0.clone())
            .collect::<Vec<_>>()
            .join(",");
        let vertical = b
            .vertical_arcs
            .iter()
            .filter(|(_, n)| **n > 0)
            .map(|(k, n)| format!("{}:{}", k, n))
            .collect::<Vec<_>>()
            .join(",");
        let mut ghost: Vec<(SurfaceId, SurfaceId)> = b
            .ghost_arcs
            .iter()
            .map(|(a, c)| {
                if a <= c {
                    (a.clone(), c.clone())
                } else {
                    (c.clone(), a.clone())
                }
            })
            .collect();
        ghost.sort();
        let ghost = ghost
            .iter()
            .map(|(a, c)| format!("({},{})", a, c))
            .collect::<Vec<_>>()
            .join(",");
        let _ = writeln!(
            out,
            "body {} plus={} minus=[{}] bridge={} vertical={{{}}} ghost=[{}] loops={} pockets={}",
            b.id, b.plus, minus, b.bridge_arcs, vertical, ghost, b.core_loops, b.pocket_trees
        );
    }

    for (sid, (src, tgt)) in &d.orientation {
        let _ = writeln!(out, "orient {} {} {}", sid, src, tgt);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn round_trip_bridge_diagram() {
        let d = corpus::bridge_position(0, 2);
        let text = print(&d);
        let back = parse(&text).expect("parse");
        // Minus lists and ghost arcs are stored canonically sorted by the
        // printer, so compare via a second print.
        assert_eq!(text, print(&back));
        assert_eq!(d.meta, back.meta);
        assert_eq!(d.surfaces, back.surfaces);
        assert_eq!(d.orientation, back.orientation);
    }

    #[test]
    fn whitespace_and_comments_tolerated() {
        let text = "\n# a comment\n  meta   tkind=link valences=[ ] flags=none gbound=none\nsurface  h0  role=thick genus=0   punctures=4  # trailing\nbody a plus=h0 minus=[ ] bridge=2 vertical={ } ghost=[ ] loops=0 pockets=0\nbody b plus=h0 minus=[] bridge=2 vertical={} ghost=[] loops=0 pockets=0\norient h0 a b\n";
        let d = parse(text).expect("parse");
        assert!(d.validate().is_valid());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "meta tkind=link valences=[] flags=none gbound=none\nsurface h0 role=thick genus=zero punctures=4\n";
        let e = parse(text).unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn drilled_round_trip() {
        let d = corpus::theta_atom(0);
        let text = print(&d);
        let back = parse(&text).expect("parse");
        assert_eq!(text, print(&back));
        assert!(back.drilled_surfaces().count() == 2);
    }
}

// ---------------------------------------------------------------------
// Moves-file format: one MoveSpec per line, keyword syntax mirroring the
// diagram format. `thin` lines are untelescope certificates applied as
// elementary thinning sequences; body groups use the prefixes op/ip/im/om
// for the outer-plus, inner-plus, inner-minus, and outer-minus bodies.
// ---------------------------------------------------------------------

use crate::moves::{
    DestabKind, DestabilizeSpec, MoveSpec, PartSpec, StrandMerge, UnperturbSpec, UntelescopeSpec,
};

/// A parsed moves file: the specs plus which untelescope entries run as
/// elementary thinnings.
#[derive(Clone, Debug, Default)]
pub struct MoveScript {
    pub moves: Vec<MoveSpec>,
    /// Indices of untelescope entries written with the `thin` keyword.
    pub thinning: Vec<bool>,
}

fn parse_part_list(line: usize, v: &str) -> Result<Vec<PartSpec>, ParseError> {
    let inner = strip_brackets(line, v, '[', ']')?;
    let mut out = Vec::new();
    for item in split_top_commas(inner) {
        let bits: Vec<&str> = item.split(':').collect();
        if bits.len() != 3 {
            return Err(err(
                line,
                format!("part must be id:genus:punctures, got {:?}", item),
            ));
        }
        out.push(PartSpec {
            id: SurfaceId(parse_id(line, bits[0])?),
            genus: parse_u32(line, "part genus", bits[1])?,
            punctures: parse_u32(line, "part punctures", bits[2])?,
        });
    }
    Ok(out)
}

fn parse_group_body(line: usize, tok: &str, prefix: &str) -> Result<Compressionbody, ParseError> {
    let inner = &tok[prefix.len()..];
    let inner = strip_brackets(line, inner, '{', '}')?;
    let toks = tokenize(inner);
    if toks.is_empty() {
        return Err(err(line, "empty body group"));
    }
    parse_body(line, &toks)
}

fn parse_untelescope(line: usize, toks: &[String]) -> Result<UntelescopeSpec, ParseError> {
    let mut thick = None;
    let mut side = None;
    let mut i = 0u8;
    let mut j = 0u8;
    let mut plus_parts = Vec::new();
    let mut minus_parts = Vec::new();
    let mut f_parts = Vec::new();
    let mut outer_plus = Vec::new();
    let mut inner_plus = Vec::new();
    let mut inner_minus = Vec::new();
    let mut outer_minus = Vec::new();
    let mut separating = false;
    let mut jointns = false;
    for tok in toks {
        if let Some(rest) = tok.strip_prefix("op{") {
            let _ = rest;
            outer_plus.push(parse_group_body(line, tok, "op")?);
            continue;
        }
        if tok.starts_with("ip{") {
            inner_plus.push(parse_group_body(line, tok, "ip")?);
            continue;
        }
        if tok.starts_with("im{") {
            inner_minus.push(parse_group_body(line, tok, "im")?);
            continue;
        }
        if tok.starts_with("om{") {
            outer_minus.push(parse_group_body(line, tok, "om")?);
            continue;
        }
        let (k, v) = split_kv(tok).ok_or_else(|| err(line, format!("bad token {:?}", tok)))?;
        match k {
            "thick" => thick = Some(SurfaceId(parse_id(line, v)?)),
            "side" => side = Some(BodyId(parse_id(line, v)?)),
            "i" => i = parse_u32(line, "i", v)? as u8,
            "j" => j = parse_u32(line, "j", v)? as u8,
            "plus" => plus_parts = parse_part_list(line, v)?,
            "minusp" => minus_parts = parse_part_list(line, v)?,
            "f" => f_parts = parse_part_list(line, v)?,
            "flags" => {
                for f in v.split(',') {
                    match f {
                        "sep" => separating = true,
                        "jointns" => jointns = true,
                        "none" | "" => {}
                        _ => return Err(err(line, format!("unknown untelescope flag {:?}", f))),
                    }
                }
            }
            _ => return Err(err(line, format!("unknown untelescope key {:?}", k))),
        }
    }
    Ok(UntelescopeSpec {
        thick: thick.ok_or_else(|| err(line, "untelescope missing thick="))?,
        plus_side: side.ok_or_else(|| err(line, "untelescope missing side="))?,
        disc_plus_punctures: i,
        disc_minus_punctures: j,
        plus_parts,
        minus_parts,
        f_parts,
        outer_plus,
        inner_plus,
        inner_minus,
        outer_minus,
        separating_disc: separating,
        joint_nonseparating: jointns,
    })
}

fn parse_merge(line: usize, v: &str) -> Result<StrandMerge, ParseError> {
    if let Some(rest) = v.strip_prefix("verticals:") {
        let bits: Vec<&str> = rest.split(':').collect();
        if bits.len() != 2 {
            return Err(err(line, "merge=verticals:<sid>:<sid>"));
        }
        return Ok(StrandMerge::TwoVerticals(
            SurfaceId(parse_id(line, bits[0])?),
            SurfaceId(parse_id(line, bits[1])?),
        ));
    }
    match v {
        "samebridge" => Ok(StrandMerge::SameBridge),
        "twobridges" => Ok(StrandMerge::TwoBridges),
        "bridgevertical" => Ok(StrandMerge::BridgeVertical),
        _ => Err(err(line, format!("unknown merge {:?}", v))),
    }
}

fn parse_unperturb(line: usize, toks: &[String]) -> Result<UnperturbSpec, ParseError> {
    let mut thick = None;
    let mut side = None;
    let mut merge = None;
    for tok in toks {
        let (k, v) = split_kv(tok).ok_or_else(|| err(line, format!("bad token {:?}", tok)))?;
        match k {
            "thick" => thick = Some(SurfaceId(parse_id(line, v)?)),
            "side" => side = Some(BodyId(parse_id(line, v)?)),
            "merge" => merge = Some(parse_merge(line, v)?),
            _ => return Err(err(line, format!("unknown key {:?}", k))),
        }
    }
    Ok(UnperturbSpec {
        thick: thick.ok_or_else(|| err(line, "missing thick="))?,
        disc_side: side.ok_or_else(|| err(line, "missing side="))?,
        merge: merge.ok_or_else(|| err(line, "missing merge="))?,
    })
}

fn parse_destabilize(line: usize, toks: &[String]) -> Result<DestabilizeSpec, ParseError> {
    let mut kind = None;
    let mut thick = None;
    let mut side = None;
    let mut discard = None;
    let mut bodies = Vec::new();
    for tok in toks {
        if tok.starts_with("body{") {
            bodies.push(parse_group_body(line, tok, "body")?);
            continue;
        }
        let (k, v) = split_kv(tok).ok_or_else(|| err(line, format!("bad token {:?}", tok)))?;
        match k {
            "kind" => {
                kind = Some(match v {
                    "plain" => DestabKind::Plain,
                    "meridional" => DestabKind::Meridional,
                    "boundary" => DestabKind::Boundary,
                    "mboundary" => DestabKind::MeridionalBoundary,
                    "gboundary" => DestabKind::GhostBoundary,
                    "gmboundary" => DestabKind::GhostMeridionalBoundary,
                    _ => return Err(err(line, format!("unknown destabilize kind {:?}", v))),
                });
            }
            "thick" => thick = Some(SurfaceId(parse_id(line, v)?)),
            "side" => side = Some(BodyId(parse_id(line, v)?)),
            "discard" => {
                let bits: Vec<&str> = v.split(':').collect();
                if bits.len() != 2 {
                    return Err(err(line, "discard=<genus>:<punctures>"));
                }
                discard = Some((
                    parse_u32(line, "discard genus", bits[0])?,
                    parse_u32(line, "discard punctures", bits[1])?,
                ));
            }
            _ => return Err(err(line, format!("unknown key {:?}", k))),
        }
    }
    Ok(DestabilizeSpec {
        kind: kind.ok_or_else(|| err(line, "missing kind="))?,
        thick: thick.ok_or_else(|| err(line, "missing thick="))?,
        disc_side: side.ok_or_else(|| err(line, "missing side="))?,
        discard,
        new_bodies: bodies,
    })
}

/// Parses a moves file.
pub fn parse_moves(input: &str) -> Result<MoveScript, ParseError> {
    let mut out = MoveScript::default();
    for (lineno, raw) in input.lines().enumerate() {
        let lineno = lineno + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let toks = tokenize(line);
        if toks.is_empty() {
            continue;
        }
        let (m, thin) = match toks[0].as_str() {
            "untelescope" => (
                MoveSpec::Untelescope(Box::new(parse_untelescope(lineno, &toks[1..])?)),
                false,
            ),
            "thin" => (
                MoveSpec::Untelescope(Box::new(parse_untelescope(lineno, &toks[1..])?)),
                true,
            ),
            "consolidate" => {
                let mut thin_id = None;
                let mut thick_id = None;
                for tok in &toks[1..] {
                    let (k, v) =
                        split_kv(tok).ok_or_else(|| err(lineno, format!("bad token {:?}", tok)))?;
                    match k {
                        "thin" => thin_id = Some(SurfaceId(parse_id(lineno, v)?)),
                        "thick" => thick_id = Some(SurfaceId(parse_id(lineno, v)?)),
                        _ => return Err(err(lineno, format!("unknown key {:?}", k))),
                    }
                }
                (
                    MoveSpec::Consolidate {
                        thin: thin_id.ok_or_else(|| err(lineno, "missing thin="))?,
                        thick: thick_id.ok_or_else(|| err(lineno, "missing thick="))?,
                    },
                    false,
                )
            }
            "destabilize" => (
                MoveSpec::Destabilize(parse_destabilize(lineno, &toks[1..])?),
                false,
            ),
            "unperturb" => (
                MoveSpec::Unperturb(parse_unperturb(lineno, &toks[1..])?),
                false,
            ),
            "removearc" => (
                MoveSpec::RemoveRemovableArc(parse_unperturb(lineno, &toks[1..])?),
                false,
            ),
            other => return Err(err(lineno, format!("unknown move kind {:?}", other))),
        };
        out.moves.push(m);
        out.thinning.push(thin);
    }
    Ok(out)
}

fn print_body_inline(b: &Compressionbody) -> String {
    let minus = b
        .minus
        .iter()
        .map(|m| m.0.clone())
        .collect::<Vec<_>>()
        .join(",");
    let vertical = b
        .vertical_arcs
        .iter()
        .filter(|(_, n)| **n > 0)
        .map(|(k, n)| format!("{}:{}", k, n))
        .collect::<Vec<_>>()
        .join(",");
    let ghost = b
        .ghost_arcs
        .iter()
        .map(|(a, c)| format!("({},{})", a, c))
        .collect::<Vec<_>>()
        .join(",");
    format!(
        "{} plus={} minus=[{}] bridge={} vertical={{{}}} ghost=[{}] loops={} pockets={}",
        b.id, b.plus, minus, b.bridge_arcs, vertical, ghost, b.core_loops, b.pocket_trees
    )
}

fn print_parts(parts: &[PartSpec]) -> String {
    parts
        .iter()
        .map(|p| format!("{}:{}:{}", p.id, p.genus, p.punctures))
        .collect::<Vec<_>>()
        .join(",")
}

/// Prints one move in the moves-file syntax. Untelescope entries are
/// written with the given keyword (`untelescope` or `thin`).
pub fn print_move(m: &MoveSpec, as_thinning: bool) -> String {
    match m {
        MoveSpec::Untelescope(u) => {
            let mut flags = Vec::new();
            if u.separating_disc {
                flags.push("sep");
            }
            if u.joint_nonseparating {
                flags.push("jointns");
            }
            let flag_str = if flags.is_empty() {
                "none".to_owned()
            } else {
                flags.join(",")
            };
            let mut s = format!(
                "{} thick={} side={} i={} j={} plus=[{}] minusp=[{}] f=[{}] flags={}",
                if as_thinning { "thin" } else { "untelescope" },
                u.thick,
                u.plus_side,
                u.disc_plus_punctures,
                u.disc_minus_punctures,
                print_parts(&u.plus_parts),
                print_parts(&u.minus_parts),
                print_parts(&u.f_parts),
                flag_str
            );
            for b in &u.outer_plus {
                s.push_str(&format!(" op{{{}}}", print_body_inline(b)));
            }
            for b in &u.inner_plus {
                s.push_str(&format!(" ip{{{}}}", print_body_inline(b)));
            }
            for b in &u.inner_minus {
                s.push_str(&format!(" im{{{}}}", print_body_inline(b)));
            }
            for b in &u.outer_minus {
                s.push_str(&format!(" om{{{}}}", print_body_inline(b)));
            }
            s
        }
        MoveSpec::Consolidate { thin, thick } => {
            format!("consolidate thin={} thick={}", thin, thick)
        }
        MoveSpec::Destabilize(spec) => {
            let kind = match spec.kind {
                DestabKind::Plain => "plain",
                DestabKind::Meridional => "meridional",
                DestabKind::Boundary => "boundary",
                DestabKind::MeridionalBoundary => "mboundary",
                DestabKind::GhostBoundary => "gboundary",
                DestabKind::GhostMeridionalBoundary => "gmboundary",
            };
            let mut s = format!(
                "destabilize kind={} thick={} side={}",
                kind, spec.thick, spec.disc_side
            );
            if let Some((g, p)) = spec.discard {
                s.push_str(&format!(" discard={}:{}", g, p));
            }
            for b in &spec.new_bodies {
                s.push_str(&format!(" body{{{}}}", print_body_inline(b)));
            }
            s
        }
        MoveSpec::Unperturb(spec) | MoveSpec::RemoveRemovableArc(spec) => {
            let kw = if matches!(m, MoveSpec::Unperturb(_)) {
                "unperturb"
            } else {
                "removearc"
            };
            let merge = match &spec.merge {
                StrandMerge::SameBridge => "samebridge".to_owned(),
                StrandMerge::TwoBridges => "twobridges".to_owned(),
                StrandMerge::BridgeVertical => "bridgevertical".to_owned(),
                StrandMerge::TwoVerticals(a, b) => format!("verticals:{}:{}", a, b),
            };
            format!(
                "{} thick={} side={} merge={}",
                kw, spec.thick, spec.disc_side, merge
            )
        }
    }
}

/// Prints a whole script, one move per line.
pub fn print_moves(script: &[MoveSpec], thinning: &[bool]) -> String {
    script
        .iter()
        .enumerate()
        .map(|(k, m)| print_move(m, thinning.get(k).copied().unwrap_or(false)))
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}

#[cfg(test)]
mod move_fmt_tests {
    use super::*;
    use crate::certs::{build_untelescope, SplitData};
    use crate::corpus;
    use std::collections::BTreeSet;

    #[test]
    fn moves_round_trip() {
        let d = corpus::width92_stack();
        let spec = build_untelescope(
            &d,
            &SurfaceId("h3".into()),
            &BodyId("bt".into()),
            None,
            None,
            Some(SplitData {
                minus0: BTreeSet::new(),
                bridges0: 2,
                loops0: 0,
                genus0: 0,
            }),
            Some(SplitData {
                minus0: BTreeSet::new(),
                bridges0: 3,
                loops0: 0,
                genus0: 0,
            }),
        )
        .unwrap();
        let script = vec![
            MoveSpec::Untelescope(Box::new(spec)),
            MoveSpec::Unperturb(UnperturbSpec {
                thick: SurfaceId("h1".into()),
                disc_side: BodyId("bb".into()),
                merge: StrandMerge::TwoBridges,
            }),
            MoveSpec::Consolidate {
                thin: SurfaceId("f1".into()),
                thick: SurfaceId("h2".into()),
            },
        ];
        let text = print_moves(&script, &[true, false, false]);
        let parsed = parse_moves(&text).expect("parse");
        assert_eq!(parsed.moves.len(), 3);
        assert_eq!(parsed.thinning, vec![true, false, false]);
        assert_eq!(print_moves(&parsed.moves, &parsed.thinning), text);
    }
}
