//! Rewrite moves on diagrams: untelescoping, consolidation, the six
//! generalized destabilizations, unperturbing, removable-arc removal,
//! and the composite thinning sequences.
//!
//! Moves are certificate-driven. The caller supplies the split and
//! reassignment data a geometric isotopy would determine; the engine
//! enforces every conservation law, validates the resulting diagram, and
//! rejects certificates that would increase the monotone quantities.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::halfint::Half;
use crate::invariant::{netchi, netext, width};
use crate::model::{
    BodyId, Compressionbody, Diagram, Role, SurfaceComp, SurfaceId, TKind, ValidationReport,
};

#[derive(Debug, Error)]
pub enum MoveError {
    #[error("unknown surface {0}")]
    UnknownSurface(SurfaceId),
    #[error("unknown body {0}")]
    UnknownBody(BodyId),
    #[error("surface {0} has the wrong role for this move")]
    WrongRole(SurfaceId),
    #[error("{0}")]
    BadCertificate(String),
    #[error("conservation violated: {0}")]
    Conservation(String),
    #[error("resulting diagram invalid:\n{0}")]
    ResultInvalid(ValidationReport),
    #[error("move would increase {quantity}: {before} -> {after}")]
    InvariantIncrease {
        quantity: &'static str,
        before: String,
        after: String,
    },
    #[error("consolidation would close the manifold up (the pair's outer bodies coincide)")]
    ClosedManifold,
    #[error("consolidation would absorb a pocket tree")]
    PocketAbsorption,
    #[error("width tracking requires a separating-disc or joint-nonseparating certificate flag")]
    WidthHypothesis,
    #[error("extended thinning script must start with an untelescope")]
    BadScript,
}

/// One (genus, punctures) part of a surface split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartSpec {
    pub id: SurfaceId,
    pub genus: u32,
    pub punctures: u32,
}

impl PartSpec {
    pub fn new(id: impl Into<String>, genus: u32, punctures: u32) -> Self {
        PartSpec {
            id: SurfaceId(id.into()),
            genus,
            punctures,
        }
    }

    fn chi(&self) -> i64 {
        2 - 2 * i64::from(self.genus)
    }
}

/// Fully parameterized untelescope certificate.
///
/// The thick surface splits into the new thick surfaces `plus_parts`
/// (pushed toward `plus_side`) and `minus_parts`, with the new thin
/// surface `f_parts` in between. Four groups of replacement bodies tile
/// the result; the inner groups sit between the f-parts and the new
/// thick surfaces and carry only vertical arcs plus the ghost arcs
/// created by the disc punctures.
#[derive(Clone, Debug)]
pub struct UntelescopeSpec {
    pub thick: SurfaceId,
    /// The adjacent body containing the upper disc of the weak reducing
    /// pair; `plus_parts` are pushed into it.
    pub plus_side: BodyId,
    /// i = |D₊ ∩ T| ∈ {0, 1}.
    pub disc_plus_punctures: u8,
    /// j = |D₋ ∩ T| ∈ {0, 1}.
    pub disc_minus_punctures: u8,
    pub plus_parts: Vec<PartSpec>,
    pub minus_parts: Vec<PartSpec>,
    pub f_parts: Vec<PartSpec>,
    /// One body per plus part, replacing the plus-side body.
    pub outer_plus: Vec<Compressionbody>,
    /// One body per plus part, between the f-parts and that plus part.
    pub inner_plus: Vec<Compressionbody>,
    pub inner_minus: Vec<Compressionbody>,
    pub outer_minus: Vec<Compressionbody>,
    /// Width-hypothesis certificate: one disc boundary separates H.
    pub separating_disc: bool,
    /// Width-hypothesis certificate: the union of the disc boundaries is
    /// non-separating on H.
    pub joint_nonseparating: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DestabKind {
    Plain,
    Meridional,
    Boundary,
    MeridionalBoundary,
    GhostBoundary,
    GhostMeridionalBoundary,
}

impl DestabKind {
    pub fn is_boundary_kind(self) -> bool {
        !matches!(self, DestabKind::Plain | DestabKind::Meridional)
    }

    /// Punctures the compression adds to the surface (cut-disc kinds).
    pub fn disc_punctures(self) -> u32 {
        match self {
            DestabKind::Meridional
            | DestabKind::MeridionalBoundary
            | DestabKind::GhostMeridionalBoundary => 2,
            _ => 0,
        }
    }
}

/// Certificate for a generalized destabilization.
#[derive(Clone, Debug)]
pub struct DestabilizeSpec {
    pub kind: DestabKind,
    pub thick: SurfaceId,
    /// Which adjacent body contains the disc.
    pub disc_side: BodyId,
    /// For boundary kinds: genus and punctures of the discarded split
    /// component.
    pub discard: Option<(u32, u32)>,
    /// Replacement decorations for the two adjacent bodies (ids kept).
    pub new_bodies: Vec<Compressionbody>,
}

/// How the two strand-ends on the far side join when a thick surface is
/// isotoped across a bridge disc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrandMerge {
    /// Both ends of one bridge arc: creates a core loop.
    SameBridge,
    /// Ends of two different bridge arcs: they fuse.
    TwoBridges,
    /// A bridge arc end and a vertical arc end.
    BridgeVertical,
    /// Two vertical arc ends: creates a ghost arc.
    TwoVerticals(SurfaceId, SurfaceId),
}

/// Certificate for unperturbing or undoing a removable arc: the disc-side
/// body loses a bridge arc and the far side merges two strand ends.
#[derive(Clone, Debug)]
pub struct UnperturbSpec {
    pub thick: SurfaceId,
    pub disc_side: BodyId,
    pub merge: StrandMerge,
}

#[derive(Clone, Debug)]
pub enum MoveSpec {
    Untelescope(Box<UntelescopeSpec>),
    Consolidate { thin: SurfaceId, thick: SurfaceId },
    Destabilize(DestabilizeSpec),
    Unperturb(UnperturbSpec),
    RemoveRemovableArc(UnperturbSpec),
}

impl MoveSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MoveSpec::Untelescope(_) => "untelescope",
            MoveSpec::Consolidate { .. } => "consolidate",
            MoveSpec::Destabilize(_) => "destabilize",
            MoveSpec::Unperturb(_) => "unperturb",
            MoveSpec::RemoveRemovableArc(_) => "remove-removable-arc",
        }
    }
}

/// Both sides of the untelescoping width identity, in quarter units:
/// with x'₊ = x+i−1−x''₊, x'₋ = x+j−1−x''₋, y = x+i+j−2−x''₊−x''₋,
/// (x'₊)² + (x'₋)² − y² = x² − 2((j−1)−x''₋)((i−1)−x''₊).
pub fn width_algebra_sides(x: Half, i: u8, j: u8, xpp: Half, xpm: Half) -> (i64, i64) {
    let i_h = Half::from_int(i64::from(i));
    let j_h = Half::from_int(i64::from(j));
    let one = Half::from_int(1);
    let xp_plus = x + i_h - one - xpp;
    let xp_minus = x + j_h - one - xpm;
    let y = x + i_h + j_h - one - one - xpp - xpm;
    let lhs = xp_plus.square_quarters() + xp_minus.square_quarters() - y.square_quarters();
    let a = j_h - one - xpm;
    let b = i_h - one - xpp;
    let rhs = x.square_quarters() - 2 * a.raw() * b.raw();
    (lhs, rhs)
}

fn check_fresh_surface(d: &Diagram, id: &SurfaceId) -> Result<(), MoveError> {
    if d.surfaces.contains_key(id) {
        Err(MoveError::BadCertificate(format!(
            "surface id {} already in use",
            id
        )))
    } else {
        Ok(())
    }
}

fn multiset_eq(a: &[SurfaceId], b: &[SurfaceId]) -> bool {
    let mut a: Vec<_> = a.to_vec();
    let mut b: Vec<_> = b.to_vec();
    a.sort();
    b.sort();
    a == b
}

fn snapshot(d: &Diagram) -> (i64, Half, Half) {
    (netchi(d), netext(d), width(d))
}

/// Applies one move; untelescope width-hypothesis flags are not required.
pub fn apply_move(d: &Diagram, m: &MoveSpec) -> Result<Diagram, MoveError> {
    apply_move_opts(d, m, false)
}

/// Applies one move; with `width_tracking` an untelescope certificate
/// must carry one of the width-hypothesis flags.
pub fn apply_move_opts(
    d: &Diagram,
    m: &MoveSpec,
    width_tracking: bool,
) -> Result<Diagram, MoveError> {
    match m {
        MoveSpec::Untelescope(spec) => apply_untelescope(d, spec, width_tracking),
        MoveSpec::Consolidate { thin, thick } => apply_consolidate(d, thin, thick),
        MoveSpec::Destabilize(spec) => apply_destabilize(d, spec),
        MoveSpec::Unperturb(spec) => apply_strand_reduction(d, spec),
        MoveSpec::RemoveRemovableArc(spec) => apply_strand_reduction(d, spec),
    }
}

fn apply_untelescope(
    d: &Diagram,
    spec: &UntelescopeSpec,
    width_tracking: bool,
) -> Result<Diagram, MoveError> {
    let h = d
        .surfaces
        .get(&spec.thick)
        .ok_or_else(|| MoveError::UnknownSurface(spec.thick.clone()))?;
    if h.role != Role::Thick {
        return Err(MoveError::WrongRole(spec.thick.clone()));
    }
    let adjacent = d.bodies_at_thick(&spec.thick);
    if adjacent.len() != 2 {
        return Err(MoveError::BadCertificate(format!(
            "thick surface {} must be ∂₊ of exactly two bodies",
            spec.thick
        )));
    }
    if !adjacent.contains(&&spec.plus_side) {
        return Err(MoveError::UnknownBody(spec.plus_side.clone()));
    }
    let up_id = spec.plus_side.clone();
    let down_id = if *adjacent[0] == up_id {
        adjacent[1].clone()
    } else {
        adjacent[0].clone()
    };
    let up = d.bodies[&up_id].clone();
    let down = d.bodies[&down_id].clone();

    let i = u32::from(spec.disc_plus_punctures);
    let j = u32::from(spec.disc_minus_punctures);
    if i > 1 || j > 1 {
        return Err(MoveError::BadCertificate(
            "disc punctures must be 0 or 1".into(),
        ));
    }
    if width_tracking && !spec.separating_disc && !spec.joint_nonseparating {
        return Err(MoveError::WidthHypothesis);
    }

    for (parts, low, high, what) in [
        (&spec.plus_parts, 1usize, 2usize, "plus"),
        (&spec.minus_parts, 1, 2, "minus"),
        (&spec.f_parts, 1, 3, "f"),
    ] {
        if parts.len() < low || parts.len() > high {
            return Err(MoveError::BadCertificate(format!(
                "{} split must have {}..={} parts",
                what, low, high
            )));
        }
    }

    // χ and puncture conservation of the three splits.
    let checks = [
        (&spec.plus_parts, h.chi() + 2, h.punctures + 2 * i, "H₊"),
        (&spec.minus_parts, h.chi() + 2, h.punctures + 2 * j, "H₋"),
        (&spec.f_parts, h.chi() + 4, h.punctures + 2 * i + 2 * j, "F"),
    ];
    for (parts, want_chi, want_p, what) in checks {
        let chi: i64 = parts.iter().map(PartSpec::chi).sum();
        let p: u32 = parts.iter().map(|p| p.punctures).sum();
        if chi != want_chi || p != want_p {
            return Err(MoveError::Conservation(format!(
                "{} split: χ={} (want {}), punctures={} (want {})",
                what, chi, want_chi, p, want_p
            )));
        }
    }

    let before = snapshot(d);

    // Remove the old pieces, then insert the new ones.
    let mut out = d.clone();
    out.surfaces.remove(&spec.thick);
    out.orientation.remove(&spec.thick);
    out.bodies.remove(&up_id);
    out.bodies.remove(&down_id);

    for (parts, role) in [
        (&spec.plus_parts, Role::Thick),
        (&spec.minus_parts, Role::Thick),
        (&spec.f_parts, Role::Thin),
    ] {
        for p in parts {
            check_fresh_surface(&out, &p.id)?;
            out.add_surface(SurfaceComp {
                id: p.id.clone(),
                genus: p.genus,
                punctures: p.punctures,
                role,
                drilled: false,
            });
        }
    }

    // Group shape checks.
    for (bodies, parts, what) in [
        (&spec.outer_plus, &spec.plus_parts, "outer_plus"),
        (&spec.inner_plus, &spec.plus_parts, "inner_plus"),
        (&spec.inner_minus, &spec.minus_parts, "inner_minus"),
        (&spec.outer_minus, &spec.minus_parts, "outer_minus"),
    ] {
        if bodies.len() != parts.len() {
            return Err(MoveError::BadCertificate(format!(
                "{} must have one body per part",
                what
            )));
        }
        for (b, p) in bodies.iter().zip(parts.iter()) {
            if b.plus != p.id {
                return Err(MoveError::BadCertificate(format!(
                    "{} body {} must have ∂₊ = {}",
                    what, b.id, p.id
                )));
            }
        }
    }
    // Inner bodies carry verticals plus the disc ghost arcs only.
    for (bodies, ghosts, what) in [
        (&spec.inner_plus, j as usize, "inner_plus"),
        (&spec.inner_minus, i as usize, "inner_minus"),
    ] {
        let total_ghosts: usize = bodies.iter().map(|b| b.ghost_arcs.len()).sum();
        if total_ghosts != ghosts {
            return Err(MoveError::BadCertificate(format!(
                "{} must contain exactly {} ghost arc(s)",
                what, ghosts
            )));
        }
        for b in bodies {
            if b.bridge_arcs != 0 || b.core_loops != 0 || b.pocket_trees != 0 {
                return Err(MoveError::BadCertificate(format!(
                    "{} body {} may only carry vertical and disc ghost arcs",
                    what, b.id
                )));
            }
        }
    }
    // Outer bodies partition the old ∂₋ sets; inner bodies partition the
    // f-parts.
    let f_ids: Vec<SurfaceId> = spec.f_parts.iter().map(|p| p.id.clone()).collect();
    let outer_plus_minus: Vec<SurfaceId> = spec
        .outer_plus
        .iter()
        .flat_map(|b| b.minus.iter().cloned())
        .collect();
    if !multiset_eq(&outer_plus_minus, &up.minus) {
        return Err(MoveError::BadCertificate(
            "outer_plus bodies must partition the old plus-side ∂₋ set".into(),
        ));
    }
    let outer_minus_minus: Vec<SurfaceId> = spec
        .outer_minus
        .iter()
        .flat_map(|b| b.minus.iter().cloned())
        .collect();
    if !multiset_eq(&outer_minus_minus, &down.minus) {
        return Err(MoveError::BadCertificate(
            "outer_minus bodies must partition the old minus-side ∂₋ set".into(),
        ));
    }
    for (bodies, what) in [
        (&spec.inner_plus, "inner_plus"),
        (&spec.inner_minus, "inner_minus"),
    ] {
        let covered: Vec<SurfaceId> = bodies
            .iter()
            .flat_map(|b| b.minus.iter().cloned())
            .collect();
        if !multiset_eq(&covered, &f_ids) {
            return Err(MoveError::BadCertificate(format!(
                "{} bodies must partition the f-parts",
                what
            )));
        }
    }

    let mut new_ids = BTreeSet::new();
    for b in spec
        .outer_plus
        .iter()
        .chain(&spec.inner_plus)
        .chain(&spec.inner_minus)
        .chain(&spec.outer_minus)
    {
        if out.bodies.contains_key(&b.id) || !new_ids.insert(b.id.clone()) {
            return Err(MoveError::BadCertificate(format!(
                "body id {} already in use",
                b.id
            )));
        }
        out.add_body(b.clone());
    }

    // Orientation. With the old flow src → tgt across the thick surface,
    // the new stack preserves the direction: the minus side is the old
    // source side iff plus_side was the target.
    let flow_up = {
        // Old orientation entry was removed from `out`; read from `d`.
        let (src, tgt) = d.orientation.get(&spec.thick).ok_or_else(|| {
            MoveError::BadCertificate(format!("thick surface {} lacks orientation", spec.thick))
        })?;
        if *tgt == up_id {
            true
        } else if *src == up_id {
            false
        } else {
            return Err(MoveError::BadCertificate(
                "orientation of the thick surface does not reference its bodies".into(),
            ));
        }
    };
    let owner = |bodies: &[Compressionbody], fid: &SurfaceId| -> Option<BodyId> {
        bodies
            .iter()
            .find(|b| b.minus.iter().any(|m| m == fid))
            .map(|b| b.id.clone())
    };
    for (k, p) in spec.plus_parts.iter().enumerate() {
        let (inner, outer) = (spec.inner_plus[k].id.clone(), spec.outer_plus[k].id.clone());
        let entry = if flow_up {
            (inner, outer)
        } else {
            (outer, inner)
        };
        out.orientation.insert(p.id.clone(), entry);
    }
    for (k, p) in spec.minus_parts.iter().enumerate() {
        let (outer, inner) = (
            spec.outer_minus[k].id.clone(),
            spec.inner_minus[k].id.clone(),
        );
        let entry = if flow_up {
            (outer, inner)
        } else {
            (inner, outer)
        };
        out.orientation.insert(p.id.clone(), entry);
    }
    for p in &spec.f_parts {
        let from = owner(&spec.inner_minus, &p.id)
            .ok_or_else(|| MoveError::BadCertificate(format!("f-part {} unowned below", p.id)))?;
        let to = owner(&spec.inner_plus, &p.id)
            .ok_or_else(|| MoveError::BadCertificate(format!("f-part {} unowned above", p.id)))?;
        let entry = if flow_up { (from, to) } else { (to, from) };
        out.orientation.insert(p.id.clone(), entry);
    }
    // Old ∂₋ surfaces of the replaced bodies: remap their orientation
    // entries to the outer bodies now holding them.
    let remap = |out: &mut Diagram, old: &BodyId, outers: &[Compressionbody]| {
        let pairs: Vec<(SurfaceId, (BodyId, BodyId))> = out
            .orientation
            .iter()
            .filter(|(_, (a, b))| a == old || b == old)
            .map(|(s, p)| (s.clone(), p.clone()))
            .collect();
        for (sid, (a, b)) in pairs {
            if let Some(new_owner) = outers
                .iter()
                .find(|ob| ob.minus.contains(&sid))
                .map(|ob| ob.id.clone())
            {
                let na = if a == *old { new_owner.clone() } else { a };
                let nb = if b == *old { new_owner } else { b };
                out.orientation.insert(sid, (na, nb));
            }
        }
    };
    remap(&mut out, &up_id, &spec.outer_plus);
    remap(&mut out, &down_id, &spec.outer_minus);

    let rep = out.validate();
    if !rep.is_valid() {
        return Err(MoveError::ResultInvalid(rep));
    }

    let after = snapshot(&out);
    if after.0 != before.0 || after.1 != before.1 {
        return Err(MoveError::Conservation(format!(
            "untelescoping must preserve netχ and netext: ({}, {}) -> ({}, {})",
            before.0, before.1, after.0, after.1
        )));
    }
    Ok(out)
}

/// Token terminal for the consolidation trace.
#[derive(Clone, PartialEq, Eq, Debug)]
enum End {
    Plus,
    Minus(SurfaceId),
}

/// Merges two bodies across a trivial product: the decorations of `w`
/// ending on `f` concatenate through the product strands with the
/// decorations of `u` ending on `k`. The pairing of strand ends is
/// canonical (sorted); the invariants do not depend on it.
pub(crate) fn trace_merge(
    w: &Compressionbody,
    f: &SurfaceId,
    u: &Compressionbody,
) -> Result<Compressionbody, MoveError> {
    if u.pocket_trees > 0 || w.pocket_trees > 0 {
        return Err(MoveError::PocketAbsorption);
    }
    // W-side tokens at f: verticals first, then ghost ends sorted by the
    // far endpoint.
    let mut w_tokens: Vec<End> = Vec::new();
    for _ in 0..w.vertical_at(f) {
        w_tokens.push(End::Plus);
    }
    let mut w_ghosts_at_f: Vec<(usize, SurfaceId, bool)> = Vec::new(); // (edge idx, far end, is_loop)
    let mut w_ghost_rest: Vec<(SurfaceId, SurfaceId)> = Vec::new();
    for (idx, (a, b)) in w.ghost_arcs.iter().enumerate() {
        match (a == f, b == f) {
            (true, true) => w_ghosts_at_f.push((idx, a.clone(), true)),
            (true, false) => w_ghosts_at_f.push((idx, b.clone(), false)),
            (false, true) => w_ghosts_at_f.push((idx, a.clone(), false)),
            (false, false) => w_ghost_rest.push((a.clone(), b.clone())),
        }
    }
    w_ghosts_at_f.sort_by(|x, y| x.1.cmp(&y.1).then(x.0.cmp(&y.0)));
    // Loops at f contribute two adjacent tokens linked to each other;
    // other ghost edges contribute one token terminating at the far end.
    let mut w_internal: BTreeMap<usize, usize> = BTreeMap::new();
    for (_, far, is_loop) in &w_ghosts_at_f {
        if *is_loop {
            let t0 = w_tokens.len();
            w_tokens.push(End::Minus(far.clone()));
            w_tokens.push(End::Minus(far.clone()));
            w_internal.insert(t0, t0 + 1);
            w_internal.insert(t0 + 1, t0);
        } else {
            w_tokens.push(End::Minus(far.clone()));
        }
    }

    // U-side tokens at k = ∂₊u: verticals sorted by target, then bridge
    // arcs (two adjacent tokens each, linked).
    let mut u_tokens: Vec<End> = Vec::new();
    let mut u_internal: BTreeMap<usize, usize> = BTreeMap::new();
    for (sid, n) in &u.vertical_arcs {
        for _ in 0..*n {
            u_tokens.push(End::Minus(sid.clone()));
        }
    }
    for _ in 0..u.bridge_arcs {
        let t0 = u_tokens.len();
        u_tokens.push(End::Plus); // placeholder kind; bridges are internal
        u_tokens.push(End::Plus);
        u_internal.insert(t0, t0 + 1);
        u_internal.insert(t0 + 1, t0);
    }
    if w_tokens.len() != u_tokens.len() {
        return Err(MoveError::Conservation(format!(
            "strand ends across the product disagree: {} vs {}",
            w_tokens.len(),
            u_tokens.len()
        )));
    }
    let m = w_tokens.len();

    // Chain walk. Node encoding: W tokens 0..m, U tokens m..2m. The
    // pairing joins t and m+t; internal links join bridge/loop mates.
    let is_terminal = |node: usize| -> Option<End> {
        if node < m {
            if w_internal.contains_key(&node) {
                None
            } else {
                Some(w_tokens[node].clone())
            }
        } else if u_internal.contains_key(&(node - m)) {
            None
        } else {
            Some(u_tokens[node - m].clone())
        }
    };
    let internal_mate = |node: usize| -> Option<usize> {
        if node < m {
            w_internal.get(&node).copied()
        } else {
            u_internal.get(&(node - m)).map(|t| *t + m)
        }
    };
    let pairing_mate = |node: usize| -> usize {
        if node < m {
            node + m
        } else {
            node - m
        }
    };

    let mut merged = Compressionbody {
        id: w.id.clone(),
        plus: w.plus.clone(),
        minus: Vec::new(),
        bridge_arcs: w.bridge_arcs,
        vertical_arcs: w
            .vertical_arcs
            .iter()
            .filter(|(sid, _)| *sid != f)
            .map(|(sid, n)| (sid.clone(), *n))
            .collect(),
        ghost_arcs: w_ghost_rest,
        core_loops: w.core_loops + u.core_loops,
        pocket_trees: 0,
    };
    merged.minus = w
        .minus
        .iter()
        .filter(|mi| *mi != f)
        .cloned()
        .chain(u.minus.iter().cloned())
        .collect();
    merged.minus.sort();
    for (a, b) in &u.ghost_arcs {
        merged.ghost_arcs.push((a.clone(), b.clone()));
    }

    let mut seen = vec![false; 2 * m];
    for start in 0..2 * m {
        if seen[start] || is_terminal(start).is_none() {
            continue;
        }
        // Walk from a terminal: cross the pairing, then internal links,
        // alternating, until the next terminal.
        let first = is_terminal(start).unwrap();
        seen[start] = true;
        let mut node = pairing_mate(start);
        let last = loop {
            seen[node] = true;
            match internal_mate(node) {
                None => break is_terminal(node).unwrap(),
                Some(mate) => {
                    seen[mate] = true;
                    node = pairing_mate(mate);
                }
            }
        };
        match (first, last) {
            (End::Plus, End::Plus) => merged.bridge_arcs += 1,
            (End::Plus, End::Minus(x)) | (End::Minus(x), End::Plus) => {
                *merged.vertical_arcs.entry(x).or_insert(0) += 1;
            }
            (End::Minus(x), End::Minus(y)) => merged.ghost_arcs.push((x, y)),
        }
    }
    // Remaining unvisited tokens lie on closed cycles.
    for start in 0..2 * m {
        if seen[start] {
            continue;
        }
        let mut node = start;
        loop {
            seen[node] = true;
            let mate = internal_mate(node).expect("cycle tokens are internal");
            seen[mate] = true;
            node = pairing_mate(mate);
            if node == start {
                break;
            }
        }
        merged.core_loops += 1;
    }

    let mut ghost: Vec<(SurfaceId, SurfaceId)> = merged
        .ghost_arcs
        .iter()
        .map(|(a, b)| {
            if a <= b {
                (a.clone(), b.clone())
            } else {
                (b.clone(), a.clone())
            }
        })
        .collect();
    ghost.sort();
    merged.ghost_arcs = ghost;
    Ok(merged)
}

fn apply_consolidate(
    d: &Diagram,
    thin: &SurfaceId,
    thick: &SurfaceId,
) -> Result<Diagram, MoveError> {
    let f = d
        .surfaces
        .get(thin)
        .ok_or_else(|| MoveError::UnknownSurface(thin.clone()))?;
    let k = d
        .surfaces
        .get(thick)
        .ok_or_else(|| MoveError::UnknownSurface(thick.clone()))?;
    if f.role != Role::Thin {
        return Err(MoveError::WrongRole(thin.clone()));
    }
    if k.role != Role::Thick {
        return Err(MoveError::WrongRole(thick.clone()));
    }
    if f.genus != k.genus || f.punctures != k.punctures {
        return Err(MoveError::BadCertificate(format!(
            "{} and {} do not cobound a trivial product: shape mismatch",
            thin, thick
        )));
    }
    let product = d
        .bodies
        .values()
        .find(|b| b.plus == *thick && b.is_trivial_product_over(f))
        .ok_or_else(|| {
            MoveError::BadCertificate(format!(
                "no trivial product body between {} and {}",
                thin, thick
            ))
        })?
        .clone();
    let u = d
        .bodies
        .values()
        .find(|b| b.plus == *thick && b.id != product.id)
        .ok_or_else(|| MoveError::BadCertificate("thick surface has only one body".into()))?
        .clone();
    let w = d
        .bodies
        .values()
        .find(|b| b.id != product.id && b.minus.iter().any(|m| m == thin))
        .ok_or_else(|| MoveError::BadCertificate("thin surface has only one body".into()))?
        .clone();
    if u.id == w.id {
        return Err(MoveError::ClosedManifold);
    }

    let before = snapshot(d);
    let merged = trace_merge(&w, thin, &u)?;

    let mut out = d.clone();
    out.surfaces.remove(thin);
    out.surfaces.remove(thick);
    out.orientation.remove(thin);
    out.orientation.remove(thick);
    out.bodies.remove(&product.id);
    out.bodies.remove(&u.id);
    out.bodies.remove(&w.id);
    out.add_body(merged);
    // Remap orientation entries referencing the dissolved bodies.
    let entries: Vec<(SurfaceId, (BodyId, BodyId))> = out
        .orientation
        .iter()
        .map(|(s, p)| (s.clone(), p.clone()))
        .collect();
    for (sid, (a, b)) in entries {
        let fix = |x: BodyId| {
            if x == u.id || x == product.id {
                w.id.clone()
            } else {
                x
            }
        };
        out.orientation.insert(sid, (fix(a), fix(b)));
    }

    let rep = out.validate();
    if !rep.is_valid() {
        return Err(MoveError::ResultInvalid(rep));
    }
    let after = snapshot(&out);
    if before != after {
        return Err(MoveError::Conservation(format!(
            "consolidation must preserve all invariants: {:?} -> {:?}",
            before, after
        )));
    }
    Ok(out)
}

fn apply_destabilize(d: &Diagram, spec: &DestabilizeSpec) -> Result<Diagram, MoveError> {
    let h = d
        .surfaces
        .get(&spec.thick)
        .ok_or_else(|| MoveError::UnknownSurface(spec.thick.clone()))?
        .clone();
    if h.role != Role::Thick {
        return Err(MoveError::WrongRole(spec.thick.clone()));
    }
    let adjacent = d.bodies_at_thick(&spec.thick);
    if adjacent.len() != 2 {
        return Err(MoveError::BadCertificate(
            "thick surface must have two bodies".into(),
        ));
    }
    if !adjacent.contains(&&spec.disc_side) {
        return Err(MoveError::UnknownBody(spec.disc_side.clone()));
    }
    let old_ids: BTreeSet<BodyId> = adjacent.iter().map(|b| (*b).clone()).collect();
    let extra_p = spec.kind.disc_punctures();

    let (new_genus, new_punct) = if spec.kind.is_boundary_kind() {
        let (gd, pd) = spec.discard.ok_or_else(|| {
            MoveError::BadCertificate("boundary destabilization needs a discard part".into())
        })?;
        if gd > h.genus || pd > h.punctures + extra_p {
            return Err(MoveError::Conservation(
                "discarded component exceeds the surface".into(),
            ));
        }
        (h.genus - gd, h.punctures + extra_p - pd)
    } else {
        if spec.discard.is_some() {
            return Err(MoveError::BadCertificate(
                "plain/meridional destabilization has no discard part".into(),
            ));
        }
        if h.genus == 0 {
            return Err(MoveError::BadCertificate(
                "destabilization needs genus ≥ 1".into(),
            ));
        }
        (h.genus - 1, h.punctures + extra_p)
    };

    if spec.new_bodies.len() != 2 {
        return Err(MoveError::BadCertificate(
            "exactly two replacement bodies".into(),
        ));
    }
    let new_ids: BTreeSet<BodyId> = spec.new_bodies.iter().map(|b| b.id.clone()).collect();
    if new_ids != old_ids {
        return Err(MoveError::BadCertificate(
            "replacement bodies must keep the two adjacent body ids".into(),
        ));
    }
    for b in &spec.new_bodies {
        if b.plus != spec.thick {
            return Err(MoveError::BadCertificate(format!(
                "replacement body {} must keep ∂₊ = {}",
                b.id, spec.thick
            )));
        }
    }
    // ∂₋ surfaces may migrate between the two bodies but not appear or
    // vanish.
    let old_minus: Vec<SurfaceId> = adjacent
        .iter()
        .flat_map(|b| d.bodies[*b].minus.iter().cloned())
        .collect();
    let new_minus: Vec<SurfaceId> = spec
        .new_bodies
        .iter()
        .flat_map(|b| b.minus.iter().cloned())
        .collect();
    if !multiset_eq(&old_minus, &new_minus) {
        return Err(MoveError::Conservation(
            "replacement bodies must keep the union of ∂₋ surfaces".into(),
        ));
    }

    let before = snapshot(d);
    let mut out = d.clone();
    {
        let s = out.surfaces.get_mut(&spec.thick).unwrap();
        s.genus = new_genus;
        s.punctures = new_punct;
    }
    for b in &spec.new_bodies {
        out.bodies.insert(b.id.clone(), b.clone());
    }
    let rep = out.validate();
    if !rep.is_valid() {
        return Err(MoveError::ResultInvalid(rep));
    }
    enforce_monotone(before, &out)?;
    Ok(out)
}

fn apply_strand_reduction(d: &Diagram, spec: &UnperturbSpec) -> Result<Diagram, MoveError> {
    let h = d
        .surfaces
        .get(&spec.thick)
        .ok_or_else(|| MoveError::UnknownSurface(spec.thick.clone()))?
        .clone();
    if h.role != Role::Thick {
        return Err(MoveError::WrongRole(spec.thick.clone()));
    }
    if h.punctures < 2 {
        return Err(MoveError::BadCertificate(
            "surface has fewer than 2 punctures".into(),
        ));
    }
    let adjacent = d.bodies_at_thick(&spec.thick);
    if adjacent.len() != 2 {
        return Err(MoveError::BadCertificate(
            "thick surface must have two bodies".into(),
        ));
    }
    if !adjacent.contains(&&spec.disc_side) {
        return Err(MoveError::UnknownBody(spec.disc_side.clone()));
    }
    let other_id = if *adjacent[0] == spec.disc_side {
        adjacent[1].clone()
    } else {
        adjacent[0].clone()
    };

    let before = snapshot(d);
    let mut out = d.clone();
    out.surfaces.get_mut(&spec.thick).unwrap().punctures -= 2;
    {
        let side = out.bodies.get_mut(&spec.disc_side).unwrap();
        if side.bridge_arcs == 0 {
            return Err(MoveError::BadCertificate(
                "disc-side body has no bridge arc to push across".into(),
            ));
        }
        side.bridge_arcs -= 1;
    }
    {
        let other = out.bodies.get_mut(&other_id).unwrap();
        match &spec.merge {
            StrandMerge::SameBridge => {
                if other.bridge_arcs == 0 {
                    return Err(MoveError::BadCertificate(
                        "no bridge arc to close up".into(),
                    ));
                }
                other.bridge_arcs -= 1;
                other.core_loops += 1;
            }
            StrandMerge::TwoBridges => {
                if other.bridge_arcs < 2 {
                    return Err(MoveError::BadCertificate(
                        "need two bridge arcs to fuse".into(),
                    ));
                }
                other.bridge_arcs -= 1;
            }
            StrandMerge::BridgeVertical => {
                if other.bridge_arcs == 0 || other.vertical_total() == 0 {
                    return Err(MoveError::BadCertificate(
                        "need a bridge arc and a vertical arc to fuse".into(),
                    ));
                }
                other.bridge_arcs -= 1;
            }
            StrandMerge::TwoVerticals(x, y) => {
                for sid in [x, y] {
                    let n = other.vertical_arcs.entry(sid.clone()).or_insert(0);
                    if *n == 0 {
                        return Err(MoveError::BadCertificate(format!(
                            "no vertical arc into {} to fuse",
                            sid
                        )));
                    }
                    *n -= 1;
                }
                other.vertical_arcs.retain(|_, n| *n > 0);
                other.ghost_arcs.push((x.clone(), y.clone()));
            }
        }
    }
    let rep = out.validate();
    if !rep.is_valid() {
        return Err(MoveError::ResultInvalid(rep));
    }
    enforce_monotone(before, &out)?;
    Ok(out)
}

fn enforce_monotone(before: (i64, Half, Half), out: &Diagram) -> Result<(), MoveError> {
    let after = snapshot(out);
    if after.0 > before.0 {
        return Err(MoveError::InvariantIncrease {
            quantity: "netχ",
            before: before.0.to_string(),
            after: after.0.to_string(),
        });
    }
    if after.1 > before.1 {
        return Err(MoveError::InvariantIncrease {
            quantity: "netext",
            before: before.1.to_string(),
            after: after.1.to_string(),
        });
    }
    if after.2 > before.2 {
        return Err(MoveError::InvariantIncrease {
            quantity: "width",
            before: before.2.to_string(),
            after: after.2.to_string(),
        });
    }
    Ok(())
}

/// All (thin, thick) pairs currently cobounding a trivial product body.
pub fn find_consolidations(d: &Diagram) -> Vec<(SurfaceId, SurfaceId)> {
    let mut out = Vec::new();
    for b in d.bodies.values() {
        if b.minus.len() != 1 {
            continue;
        }
        let fid = &b.minus[0];
        let Some(f) = d.surfaces.get(fid) else {
            continue;
        };
        if f.role != Role::Thin || !b.is_trivial_product_over(f) {
            continue;
        }
        let Some(k) = d.surfaces.get(&b.plus) else {
            continue;
        };
        if k.genus == f.genus && k.punctures == f.punctures {
            out.push((fid.clone(), b.plus.clone()));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Untelescope followed by the two consolidation passes: first among the
/// newly created surfaces, then between new thick and old thin surfaces.
pub fn elementary_thinning(d: &Diagram, spec: &UntelescopeSpec) -> Result<Diagram, MoveError> {
    elementary_thinning_opts(d, spec, false)
}

pub fn elementary_thinning_opts(
    d: &Diagram,
    spec: &UntelescopeSpec,
    width_tracking: bool,
) -> Result<Diagram, MoveError> {
    let mut cur = apply_untelescope(d, spec, width_tracking)?;
    let new_thick: BTreeSet<SurfaceId> = spec
        .plus_parts
        .iter()
        .chain(&spec.minus_parts)
        .map(|p| p.id.clone())
        .collect();
    let new_thin: BTreeSet<SurfaceId> = spec.f_parts.iter().map(|p| p.id.clone()).collect();
    // Pass 1: pairs with both members new.
    loop {
        let cand = find_consolidations(&cur)
            .into_iter()
            .find(|(f, k)| new_thin.contains(f) && new_thick.contains(k));
        match cand {
            Some((f, k)) => cur = apply_consolidate(&cur, &f, &k)?,
            None => break,
        }
    }
    // Pass 2: new thick against old thin.
    loop {
        let cand = find_consolidations(&cur)
            .into_iter()
            .find(|(f, k)| !new_thin.contains(f) && new_thick.contains(k));
        match cand {
            Some((f, k)) => cur = apply_consolidate(&cur, &f, &k)?,
            None => break,
        }
    }
    Ok(cur)
}

/// Whether the diagram's flags satisfy the width hypothesis (W1)–(W3).
pub fn width_hypothesis(d: &Diagram) -> bool {
    d.meta.irreducible
        && (d.thick_surfaces().all(|s| s.genus <= 2) || d.meta.every_surface_separates)
        && d.meta.every_sphere_separates
}

/// Applies an extended thinning script: an elementary thinning followed
/// by destabilize/unperturb/remove/consolidate moves. Asserts the
/// monotonicity contract after every step.
pub fn extended_thinning(d: &Diagram, script: &[MoveSpec]) -> Result<Diagram, MoveError> {
    let Some((first, rest)) = script.split_first() else {
        return Err(MoveError::BadScript);
    };
    let MoveSpec::Untelescope(u) = first else {
        return Err(MoveError::BadScript);
    };
    let track = width_hypothesis(d);
    let mut prev = snapshot(d);
    let mut cur = elementary_thinning_opts(d, u, track)?;
    let check = |cur: &Diagram, prev: &mut (i64, Half, Half)| -> Result<(), MoveError> {
        let now = snapshot(cur);
        if now.0 > prev.0 || now.1 > prev.1 || (track && now.2 > prev.2) {
            return Err(MoveError::InvariantIncrease {
                quantity: "thinning monotonicity",
                before: format!("{:?}", prev),
                after: format!("{:?}", now),
            });
        }
        *prev = now;
        Ok(())
    };
    check(&cur, &mut prev)?;
    for m in rest {
        if matches!(m, MoveSpec::Untelescope(_)) {
            return Err(MoveError::BadScript);
        }
        cur = apply_move_opts(&cur, m, track)?;
        check(&cur, &mut prev)?;
    }
    Ok(cur)
}

/// Combinatorially checkable necessary conditions for local thinness.
#[derive(Clone, Debug)]
pub struct LintReport {
    pub failures: Vec<String>,
    /// Geometric conditions that remain user assertions.
    pub assumed: Vec<String>,
}

impl LintReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn locally_thin_lint(d: &Diagram) -> LintReport {
    let mut failures = Vec::new();
    if d.meta.t_kind != TKind::Empty {
        for s in d.surfaces.values() {
            if s.role != Role::Boundary && s.is_sphere() && s.punctures == 0 {
                failures.push(format!(
                    "{} surface {} is a 2-sphere disjoint from T",
                    s.role, s.id
                ));
            }
        }
    }
    for (f, k) in find_consolidations(d) {
        failures.push(format!(
            "trivial product between thin {} and thick {}: consolidation applies",
            f, k
        ));
    }
    let assumed = vec![
        "thick surfaces sc-strongly irreducible (geometric, user-asserted)".to_owned(),
        "thin surfaces c-essential (geometric, user-asserted)".to_owned(),
        format!(
            "pair flags: irreducible={} every-sphere-separates={} every-surface-separates={}",
            d.meta.irreducible, d.meta.every_sphere_separates, d.meta.every_surface_separates
        ),
    ];
    LintReport { failures, assumed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::invariant::invariants;

    #[test]
    fn width_algebra_spot_value() {
        let (lhs, rhs) = width_algebra_sides(
            Half::from_int(4),
            1,
            0,
            Half::from_int(1),
            Half::from_int(0),
        );
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, 4 * 14);
    }

    #[test]
    fn width_algebra_grid() {
        // x ∈ [−1, 6] half steps, i, j ∈ {0,1}, x''± ∈ [−1, 4] half steps.
        for xr in -2..=12 {
            for i in 0..=1u8 {
                for j in 0..=1u8 {
                    for ppr in -2..=8 {
                        for pmr in -2..=8 {
                            let (lhs, rhs) = width_algebra_sides(
                                Half::halves(xr),
                                i,
                                j,
                                Half::halves(ppr),
                                Half::halves(pmr),
                            );
                            assert_eq!(lhs, rhs, "x={} i={} j={} x+={} x-={}", xr, i, j, ppr, pmr);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn genus2_untelescope_preserves_netext() {
        // Thick genus-2 surface, no punctures, untelescoped with both
        // discs non-separating: H₊, H₋ tori, F a sphere.
        let d = corpus::bridge_position(2, 0);
        let spec = UntelescopeSpec {
            thick: SurfaceId("h0".into()),
            plus_side: BodyId("top".into()),
            disc_plus_punctures: 0,
            disc_minus_punctures: 0,
            plus_parts: vec![PartSpec::new("hp", 1, 0)],
            minus_parts: vec![PartSpec::new("hm", 1, 0)],
            f_parts: vec![PartSpec::new("f", 0, 0)],
            outer_plus: vec![Compressionbody::new("op", "hp")],
            inner_plus: vec![Compressionbody::new("ip", "hp").with_minus(&["f"])],
            inner_minus: vec![Compressionbody::new("im", "hm").with_minus(&["f"])],
            outer_minus: vec![Compressionbody::new("om", "hm")],
            separating_disc: false,
            joint_nonseparating: true,
        };
        let before = invariants(&d).unwrap();
        let out = apply_move(&d, &MoveSpec::Untelescope(Box::new(spec.clone()))).unwrap();
        let after = invariants(&out).unwrap();
        assert_eq!(before.netext, after.netext);
        assert_eq!(before.netchi, after.netchi);
        // netext 1 = 0 + 0 − (−1).
        assert_eq!(after.netext, Half::from_int(1));
        assert_eq!(out.thin_surfaces().count(), 1);
        assert_eq!(out.thick_surfaces().count(), 2);
        // No trivial products arise, so the elementary thinning sequence
        // is exactly the bare untelescope.
        let thinned = elementary_thinning(&d, &spec).unwrap();
        assert_eq!(thinned, out);
    }

    #[test]
    fn consolidate_drops_trivial_pair() {
        // Build a 3-level stack with a genuine trivial product pair.
        let d = corpus::stack(&[(0, 4), (0, 4)], &[(0, 4)]);
        // stack puts a trivial product between levels when shapes match:
        // thick0 (0,4) over thin0 (0,4).
        let pairs = find_consolidations(&d);
        assert!(!pairs.is_empty());
        let before = invariants(&d).unwrap();
        let (f, k) = pairs[0].clone();
        let out = apply_move(&d, &MoveSpec::Consolidate { thin: f, thick: k }).unwrap();
        let after = invariants(&out).unwrap();
        assert_eq!(before.netext, after.netext);
        assert_eq!(before.netchi, after.netchi);
        assert_eq!(before.width, after.width);
        assert_eq!(out.surfaces.len(), d.surfaces.len() - 2);
    }

    #[test]
    fn unperturb_reduces_punctures() {
        // 3-bridge unknot position unperturbs to 2-bridge.
        let d = corpus::bridge_position(0, 3);
        let spec = UnperturbSpec {
            thick: SurfaceId("h0".into()),
            disc_side: BodyId("top".into()),
            merge: StrandMerge::TwoBridges,
        };
        let out = apply_move(&d, &MoveSpec::Unperturb(spec)).unwrap();
        let h = &out.surfaces[&SurfaceId("h0".into())];
        assert_eq!(h.punctures, 4);
        assert!(out.validate().is_valid());
        let r = invariants(&out).unwrap();
        assert_eq!(r.netext, Half::from_int(1));
    }

    #[test]
    fn unperturb_on_minimal_sphere_rejected() {
        // Unperturbing a 2-punctured thick sphere would push extent below
        // −1's reach and raise width: the monotonicity gate rejects it.
        let d = corpus::bridge_position(0, 1);
        let spec = UnperturbSpec {
            thick: SurfaceId("h0".into()),
            disc_side: BodyId("top".into()),
            merge: StrandMerge::SameBridge,
        };
        let err = apply_move(&d, &MoveSpec::Unperturb(spec)).unwrap_err();
        assert!(matches!(
            err,
            MoveError::InvariantIncrease { .. } | MoveError::ResultInvalid(_)
        ));
    }

    #[test]
    fn plain_destabilization() {
        // Genus-2 Heegaard diagram destabilizes to genus 1.
        let d = corpus::bridge_position(2, 0);
        let spec = DestabilizeSpec {
            kind: DestabKind::Plain,
            thick: SurfaceId("h0".into()),
            disc_side: BodyId("top".into()),
            discard: None,
            new_bodies: vec![
                Compressionbody::new("top", "h0"),
                Compressionbody::new("bot", "h0"),
            ],
        };
        let out = apply_move(&d, &MoveSpec::Destabilize(spec)).unwrap();
        assert_eq!(out.surfaces[&SurfaceId("h0".into())].genus, 1);
        let r = invariants(&out).unwrap();
        assert_eq!(r.netext, Half::from_int(0));
    }

    #[test]
    fn extended_thinning_requires_untelescope_first() {
        let d = corpus::bridge_position(0, 2);
        let err = extended_thinning(&d, &[]).unwrap_err();
        assert!(matches!(err, MoveError::BadScript));
        let err = extended_thinning(
            &d,
            &[MoveSpec::Unperturb(UnperturbSpec {
                thick: SurfaceId("h0".into()),
                disc_side: BodyId("top".into()),
                merge: StrandMerge::TwoBridges,
            })],
        )
        .unwrap_err();
        assert!(matches!(err, MoveError::BadScript));
    }

    #[test]
    fn lint_flags() {
        let d = corpus::bridge_position(0, 1);
        assert!(locally_thin_lint(&d).passes());

        let with_product = corpus::stack(&[(0, 4), (0, 4)], &[(0, 4)]);
        assert!(!locally_thin_lint(&with_product).passes());

        // Thin 0-punctured sphere with T ≠ ∅ fails.
        let mut bad = corpus::stack(&[(0, 2), (0, 2)], &[(0, 0)]);
        bad.meta.t_kind = TKind::Link;
        assert!(!locally_thin_lint(&bad).passes());
    }
}


#[cfg(test)]
mod trace_tests {
    use super::*;

    /// A consolidation whose strand pairing closes a cycle produces a
    /// core loop: W carries a ghost loop at the thin surface and U a
    /// single bridge arc.
    #[test]
    fn consolidation_can_close_a_core_loop() {
        let w = Compressionbody::new("w", "k2")
            .with_minus(&["f"])
            .with_ghost("f", "f");
        let u = Compressionbody::new("u", "k").with_bridges(1);
        let merged = trace_merge(&w, &SurfaceId("f".into()), &u).unwrap();
        assert_eq!(merged.core_loops, 1);
        assert_eq!(merged.bridge_arcs, 0);
        assert!(merged.ghost_arcs.is_empty());
        assert!(merged.minus.is_empty());
    }

    /// Mixed pairing: a vertical of W and a ghost end fuse through U's
    /// bridge into a vertical arc toward the ghost's far endpoint.
    #[test]
    fn consolidation_traces_vertical_through_bridge() {
        let w = Compressionbody::new("w", "k2")
            .with_minus(&["f", "g"])
            .with_vertical("f", 1)
            .with_ghost("f", "g")
            .with_vertical("g", 1);
        let u = Compressionbody::new("u", "k").with_bridges(1);
        let merged = trace_merge(&w, &SurfaceId("f".into()), &u).unwrap();
        // ∂₊ still sees one strand down to g via the old vertical, plus
        // the traced path plus → f-vertical → bridge → ghost-end → g.
        assert_eq!(merged.vertical_at(&SurfaceId("g".into())), 2);
        assert_eq!(merged.bridge_arcs, 0);
        assert!(merged.ghost_arcs.is_empty());
        assert_eq!(merged.minus, vec![SurfaceId("g".into())]);
    }
}
