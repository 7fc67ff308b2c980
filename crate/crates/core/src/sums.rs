//! Connected sum (#₂) and trivalent vertex sum (#₃) of diagrams,
//! orientation flip, and prime-factor extraction along thin summing
//! spheres.
//!
//! Gluing inserts a new thin summing sphere between the two host bodies
//! and splits the decoration the sum point sits on; the decoration split
//! is the caller's certificate, carried by [`SumPoint`]. Factoring cuts
//! along thin 2- and 3-punctured spheres, caps 2-punctured scars with
//! (B³, arc) traces, caps vertical 3-punctured scars with pocket-tree
//! balls, and re-drills the rest.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::halfint::Half;
use crate::invariant::{graph_euler_characteristic, netchi, netext, width};
use crate::model::{
    BodyId, Compressionbody, Diagram, GraphPairMeta, Role, SurfaceComp, SurfaceId, TKind,
    ValidationReport,
};
use crate::moves::{self, MoveError};

#[derive(Debug, Error)]
pub enum SumError {
    #[error("sum point kinds disagree: {0} vs {1}")]
    KindMismatch(u8, u8),
    #[error("unknown body {0}")]
    UnknownBody(BodyId),
    #[error("sum point not available: {0}")]
    BadPoint(String),
    #[error("diagram invalid:\n{0}")]
    Invalid(ValidationReport),
    #[error("precondition not met: {0}")]
    Precondition(String),
    #[error("summing sphere {0} does not separate the diagram")]
    Nonseparating(SurfaceId),
    #[error("move engine error: {0}")]
    Move(#[from] MoveError),
}

/// Where a sum attaches inside the host body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SumAttach {
    /// On a bridge arc (kind 2).
    OnBridge,
    /// On a vertical arc into the named ∂₋ component (kind 2).
    OnVertical(SurfaceId),
    /// On a ghost arc between the named ∂₋ components (kind 2).
    OnGhost(SurfaceId, SurfaceId),
    /// On a core loop (kind 2).
    OnLoop,
    /// At a drilled trivalent vertex sphere of the host body (kind 3).
    AtVertex(SurfaceId),
}

/// One side of a gluing: the host body and the decoration the removed
/// point sits on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumPoint {
    pub body: BodyId,
    pub attach: SumAttach,
}

impl SumPoint {
    pub fn kind(&self) -> u8 {
        match self.attach {
            SumAttach::AtVertex(_) => 3,
            _ => 2,
        }
    }
}

/// Reverses every transverse orientation; invariants are unchanged.
pub fn flip(d: &Diagram) -> Diagram {
    let mut out = d.clone();
    out.orientation = d
        .orientation
        .iter()
        .map(|(s, (a, b))| (s.clone(), (b.clone(), a.clone())))
        .collect();
    out
}

/// Renames every id of `d` that collides with an id of `other`.
fn rename_apart(d: &Diagram, other: &Diagram) -> Diagram {
    let mut out = d.clone();
    let surface_renames: Vec<(SurfaceId, SurfaceId)> = d
        .surfaces
        .keys()
        .filter(|id| other.surfaces.contains_key(*id))
        .map(|id| {
            let mut cand = SurfaceId(format!("{}.r", id));
            while other.surfaces.contains_key(&cand) || d.surfaces.contains_key(&cand) {
                cand = SurfaceId(format!("{}.r", cand));
            }
            (id.clone(), cand)
        })
        .collect();
    for (old, new) in &surface_renames {
        let mut s = out.surfaces.remove(old).unwrap();
        s.id = new.clone();
        out.surfaces.insert(new.clone(), s);
        if let Some(pair) = out.orientation.remove(old) {
            out.orientation.insert(new.clone(), pair);
        }
        for b in out.bodies.values_mut() {
            if b.plus == *old {
                b.plus = new.clone();
            }
            for m in &mut b.minus {
                if m == old {
                    *m = new.clone();
                }
            }
            if let Some(n) = b.vertical_arcs.remove(old) {
                b.vertical_arcs.insert(new.clone(), n);
            }
            for (a, c) in &mut b.ghost_arcs {
                if a == old {
                    *a = new.clone();
                }
                if c == old {
                    *c = new.clone();
                }
            }
        }
    }
    let body_renames: Vec<(BodyId, BodyId)> = d
        .bodies
        .keys()
        .filter(|id| other.bodies.contains_key(*id))
        .map(|id| {
            let mut cand = BodyId(format!("{}.r", id));
            while other.bodies.contains_key(&cand) || d.bodies.contains_key(&cand) {
                cand = BodyId(format!("{}.r", cand));
            }
            (id.clone(), cand)
        })
        .collect();
    for (old, new) in &body_renames {
        let mut b = out.bodies.remove(old).unwrap();
        b.id = new.clone();
        out.bodies.insert(new.clone(), b);
        for (a, c) in out.orientation.values_mut() {
            if a == old {
                *a = new.clone();
            }
            if c == old {
                *c = new.clone();
            }
        }
    }
    out
}

fn attach_feasible(d: &Diagram, p: &SumPoint) -> Result<(), SumError> {
    let body = d
        .bodies
        .get(&p.body)
        .ok_or_else(|| SumError::UnknownBody(p.body.clone()))?;
    match &p.attach {
        SumAttach::OnBridge => {
            if body.bridge_arcs == 0 {
                return Err(SumError::BadPoint(format!(
                    "body {} has no bridge arc",
                    p.body
                )));
            }
        }
        SumAttach::OnVertical(f) => {
            if body.vertical_at(f) == 0 {
                return Err(SumError::BadPoint(format!(
                    "body {} has no vertical arc into {}",
                    p.body, f
                )));
            }
        }
        SumAttach::OnGhost(a, b) => {
            let has = body
                .ghost_arcs
                .iter()
                .any(|(x, y)| (x == a && y == b) || (x == b && y == a));
            if !has {
                return Err(SumError::BadPoint(format!(
                    "body {} has no ghost arc ({}, {})",
                    p.body, a, b
                )));
            }
        }
        SumAttach::OnLoop => {
            if body.core_loops == 0 {
                return Err(SumError::BadPoint(format!(
                    "body {} has no core loop",
                    p.body
                )));
            }
        }
        SumAttach::AtVertex(v) => {
            if d.meta.t_kind != TKind::Graph {
                return Err(SumError::Precondition(
                    "trivalent vertex sums need a graph pair".into(),
                ));
            }
            if !body.minus.iter().any(|m| m == v) {
                return Err(SumError::BadPoint(format!(
                    "drilled sphere {} is not in ∂₋ of body {}",
                    v, p.body
                )));
            }
            match d.surfaces.get(v) {
                Some(s) if s.drilled && s.punctures == 3 => {}
                _ => {
                    return Err(SumError::BadPoint(format!(
                        "{} is not a drilled trivalent vertex sphere",
                        v
                    )))
                }
            }
        }
    }
    Ok(())
}

/// Rewrites the host body for a kind-2 attach: the cut decoration's two
/// new endpoints land on the summing sphere.
fn cut_decoration(body: &mut Compressionbody, attach: &SumAttach, p: &SurfaceId) {
    body.minus.push(p.clone());
    body.minus.sort();
    match attach {
        SumAttach::OnBridge => {
            body.bridge_arcs -= 1;
            *body.vertical_arcs.entry(p.clone()).or_insert(0) += 2;
        }
        SumAttach::OnVertical(f) => {
            let n = body.vertical_arcs.get_mut(f).unwrap();
            *n -= 1;
            if *n == 0 {
                body.vertical_arcs.remove(f);
            }
            *body.vertical_arcs.entry(p.clone()).or_insert(0) += 1;
            body.ghost_arcs.push((p.clone(), f.clone()));
        }
        SumAttach::OnGhost(a, b) => {
            let pos = body
                .ghost_arcs
                .iter()
                .position(|(x, y)| (x == a && y == b) || (x == b && y == a))
                .unwrap();
            body.ghost_arcs.remove(pos);
            body.ghost_arcs.push((p.clone(), a.clone()));
            body.ghost_arcs.push((p.clone(), b.clone()));
        }
        SumAttach::OnLoop => {
            body.core_loops -= 1;
            body.ghost_arcs.push((p.clone(), p.clone()));
        }
        SumAttach::AtVertex(_) => unreachable!("kind-3 attaches are handled separately"),
    }
}

/// Rewrites the host body for a kind-3 attach: the drilled vertex sphere
/// is re-pointed at the summing sphere.
fn repoint_vertex(body: &mut Compressionbody, v: &SurfaceId, p: &SurfaceId) {
    for m in &mut body.minus {
        if m == v {
            *m = p.clone();
        }
    }
    body.minus.sort();
    if let Some(n) = body.vertical_arcs.remove(v) {
        body.vertical_arcs.insert(p.clone(), n);
    }
    for (a, b) in &mut body.ghost_arcs {
        if a == v {
            *a = p.clone();
        }
        if b == v {
            *b = p.clone();
        }
    }
}

fn merged_meta(m1: &GraphPairMeta, m2: &GraphPairMeta, kind: u8) -> GraphPairMeta {
    let mut valences: Vec<u32> = Vec::new();
    let take = |src: &GraphPairMeta, out: &mut Vec<u32>| {
        let mut v = src.vertex_valences.clone();
        if kind == 3 {
            if let Some(pos) = v.iter().position(|x| *x == 3) {
                v.remove(pos);
            }
        }
        out.extend(v);
    };
    take(m1, &mut valences);
    take(m2, &mut valences);
    valences.sort_unstable();
    let t_kind = if !valences.is_empty() {
        TKind::Graph
    } else {
        TKind::Link
    };
    GraphPairMeta {
        t_kind,
        vertex_valences: valences,
        irreducible: m1.irreducible && m2.irreducible,
        every_sphere_separates: m1.every_sphere_separates && m2.every_sphere_separates,
        every_surface_separates: m1.every_surface_separates && m2.every_surface_separates,
        heegaard_genus_bound: match (m1.heegaard_genus_bound, m2.heegaard_genus_bound) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        },
    }
}

/// Glues two diagrams along a new thin summing sphere between the two
/// host bodies. The second diagram is flipped when needed so the result
/// stays acyclic; tree gluings always orient.
pub fn glue(d1: &Diagram, p1: &SumPoint, d2: &Diagram, p2: &SumPoint) -> Result<Diagram, SumError> {
    if p1.kind() != p2.kind() {
        return Err(SumError::KindMismatch(p1.kind(), p2.kind()));
    }
    let kind = p1.kind();
    if d1.meta.t_kind == TKind::Empty || d2.meta.t_kind == TKind::Empty {
        return Err(SumError::Precondition(
            "cannot glue along an empty graph".into(),
        ));
    }
    attach_feasible(d1, p1)?;
    attach_feasible(d2, p2)?;

    let d2r = rename_apart(d2, d1);
    let p2r = SumPoint {
        body: if d1.bodies.contains_key(&p2.body) && !d2r.bodies.contains_key(&p2.body) {
            // The host body was renamed; find its new id.
            let mut cand = BodyId(format!("{}.r", p2.body));
            while !d2r.bodies.contains_key(&cand) {
                cand = BodyId(format!("{}.r", cand));
            }
            cand
        } else {
            p2.body.clone()
        },
        attach: match &p2.attach {
            SumAttach::OnVertical(f) => SumAttach::OnVertical(resolve_renamed(d2, &d2r, f)),
            SumAttach::OnGhost(a, b) => {
                SumAttach::OnGhost(resolve_renamed(d2, &d2r, a), resolve_renamed(d2, &d2r, b))
            }
            SumAttach::AtVertex(v) => SumAttach::AtVertex(resolve_renamed(d2, &d2r, v)),
            other => other.clone(),
        },
    };

    let mut out = Diagram::new(merged_meta(&d1.meta, &d2r.meta, kind));
    for s in d1.surfaces.values().chain(d2r.surfaces.values()) {
        out.add_surface(s.clone());
    }
    for b in d1.bodies.values().chain(d2r.bodies.values()) {
        out.add_body(b.clone());
    }
    for (s, pair) in d1.orientation.iter().chain(d2r.orientation.iter()) {
        out.orientation.insert(s.clone(), pair.clone());
    }

    let sphere = out.fresh_surface_id("sum");
    out.add_surface(SurfaceComp {
        id: sphere.clone(),
        genus: 0,
        punctures: u32::from(kind),
        role: Role::Thin,
        drilled: false,
    });

    // Rewrite the two host bodies.
    if kind == 2 {
        let mut b1 = out.bodies[&p1.body].clone();
        cut_decoration(&mut b1, &p1.attach, &sphere);
        out.bodies.insert(b1.id.clone(), b1);
        let mut b2 = out.bodies[&p2r.body].clone();
        cut_decoration(&mut b2, &p2r.attach, &sphere);
        out.bodies.insert(b2.id.clone(), b2);
    } else {
        let (SumAttach::AtVertex(v1), SumAttach::AtVertex(v2)) = (&p1.attach, &p2r.attach) else {
            unreachable!()
        };
        let mut b1 = out.bodies[&p1.body].clone();
        repoint_vertex(&mut b1, v1, &sphere);
        out.bodies.insert(b1.id.clone(), b1);
        let mut b2 = out.bodies[&p2r.body].clone();
        repoint_vertex(&mut b2, v2, &sphere);
        out.bodies.insert(b2.id.clone(), b2);
        out.surfaces.remove(v1);
        out.surfaces.remove(v2);
    }

    // Orient the summing sphere; flip the second side if its flow does
    // not mesh.
    let up1 = out
        .body_upward(&out.bodies[&p1.body])
        .ok_or_else(|| SumError::Precondition("host body lacks orientation".into()))?;
    let up2 = out
        .body_upward(&out.bodies[&p2r.body])
        .ok_or_else(|| SumError::Precondition("host body lacks orientation".into()))?;
    if up1 == up2 {
        // Turn the second summand upside down.
        let d2_surfaces: BTreeSet<SurfaceId> = d2r.orientation.keys().cloned().collect();
        let entries: Vec<(SurfaceId, (BodyId, BodyId))> = out
            .orientation
            .iter()
            .filter(|(s, _)| d2_surfaces.contains(*s))
            .map(|(s, p)| (s.clone(), p.clone()))
            .collect();
        for (s, (a, b)) in entries {
            out.orientation.insert(s, (b, a));
        }
    }
    let entry = if up1 {
        (p2r.body.clone(), p1.body.clone())
    } else {
        (p1.body.clone(), p2r.body.clone())
    };
    out.orientation.insert(sphere, entry);

    let rep = out.validate();
    if !rep.is_valid() {
        return Err(SumError::Invalid(rep));
    }
    debug_assert_eq!(netchi(&out), netchi(d1) + netchi(d2) + 2);
    debug_assert_eq!(
        netext(&out),
        netext(d1) + netext(d2) - Half::halves(i64::from(kind) - 2)
    );
    Ok(out)
}

fn resolve_renamed(orig: &Diagram, renamed: &Diagram, id: &SurfaceId) -> SurfaceId {
    if renamed.surfaces.contains_key(id) || !orig.surfaces.contains_key(id) {
        return id.clone();
    }
    let mut cand = SurfaceId(format!("{}.r", id));
    while !renamed.surfaces.contains_key(&cand) {
        cand = SurfaceId(format!("{}.r", cand));
    }
    cand
}

/// A prime factorization extracted along thin summing spheres.
#[derive(Clone, Debug)]
pub struct FactorizationResult {
    pub factors: Vec<Diagram>,
    pub p2: usize,
    pub p3: usize,
    /// Edges of the tree dual to the summing spheres: (factor, factor,
    /// sphere id).
    pub dual_tree: Vec<(usize, usize, SurfaceId)>,
}

/// True for the combinatorial certificate of a trivial (S³, unknot)
/// factor: a closed link pair of net extent zero.
pub fn is_unknot_certificate(d: &Diagram) -> bool {
    d.meta.t_kind == TKind::Link
        && d.boundary_surfaces().next().is_none()
        && netext(d) == Half::ZERO
}

/// True for the combinatorial certificate of a trivial θ-graph factor:
/// a closed graph pair with two trivalent vertices, χ(T) = −1, and net
/// extent ½.
pub fn is_trivial_theta_certificate(d: &Diagram) -> bool {
    d.meta.t_kind == TKind::Graph
        && d.boundary_surfaces().next().is_none()
        && d.meta.vertex_valences == vec![3, 3]
        && graph_euler_characteristic(d) == -1
        && netext(d) == Half::halves(1)
}

/// Splits a locally-thin diagram along its thin 2- and 3-punctured
/// spheres, capping scars, pruning trivial factors per the absorption
/// steps, and returning the factors with the dual tree.
pub fn split_prime(d: &Diagram) -> Result<FactorizationResult, SumError> {
    if !d.meta.irreducible {
        return Err(SumError::Precondition(
            "diagram not flagged irreducible".into(),
        ));
    }
    let lint = moves::locally_thin_lint(d);
    if !lint.passes() {
        return Err(SumError::Precondition(format!(
            "diagram fails the locally-thin lint: {}",
            lint.failures.join("; ")
        )));
    }
    // The dual tree needs a connected diagram.
    let (all, _) = split_along(d, &BTreeSet::new())?;
    if all.len() != 1 {
        return Err(SumError::Precondition(
            "diagram is disconnected; factor the pieces separately".into(),
        ));
    }

    let mut chosen: BTreeSet<SurfaceId> = d
        .thin_surfaces()
        .filter(|s| s.is_sphere() && (s.punctures == 2 || s.punctures == 3))
        .map(|s| s.id.clone())
        .collect();

    loop {
        let (factors, tree) = split_along(d, &chosen)?;
        // Absorption: a trivial factor hands one of its summing spheres
        // back, merging it with its neighbor.
        let trivial = factors
            .iter()
            .enumerate()
            .find(|(_, f)| is_unknot_certificate(f) || is_trivial_theta_certificate(f));
        match trivial {
            Some((idx, _)) if !chosen.is_empty() && factors.len() > 1 => {
                let sphere = tree
                    .iter()
                    .find(|(a, b, _)| *a == idx || *b == idx)
                    .map(|(_, _, s)| s.clone())
                    .expect("connected factor tree");
                chosen.remove(&sphere);
            }
            _ => {
                let p2 = chosen
                    .iter()
                    .filter(|s| d.surfaces[*s].punctures == 2)
                    .count();
                let p3 = chosen.len() - p2;
                return Ok(FactorizationResult {
                    factors,
                    p2,
                    p3,
                    dual_tree: tree,
                });
            }
        }
    }
}

/// Splits along exactly the given thin spheres.
/// Dual-tree edge: the two factor indices a sphere separates.
type TreeEdge = (usize, usize, SurfaceId);

fn split_along(
    d: &Diagram,
    spheres: &BTreeSet<SurfaceId>,
) -> Result<(Vec<Diagram>, Vec<TreeEdge>), SumError> {
    // Component structure over bodies, not crossing the chosen spheres.
    let body_ids: Vec<BodyId> = d.bodies.keys().cloned().collect();
    let idx: std::collections::BTreeMap<&BodyId, usize> =
        body_ids.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let mut parent: Vec<usize> = (0..body_ids.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for s in d.surfaces.values() {
        if spheres.contains(&s.id) {
            continue;
        }
        let touching: Vec<usize> = d
            .bodies
            .values()
            .filter(|b| b.plus == s.id || b.minus.contains(&s.id))
            .map(|b| idx[&b.id])
            .collect();
        for w in touching.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent[a] = b;
            }
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut comp_of = vec![usize::MAX; body_ids.len()];
    for (i, slot) in comp_of.iter_mut().enumerate() {
        let r = find(&mut parent, i);
        let c = match roots.iter().position(|x| *x == r) {
            Some(c) => c,
            None => {
                roots.push(r);
                roots.len() - 1
            }
        };
        *slot = c;
    }

    // Dual tree edges; each chosen sphere must separate.
    let mut tree = Vec::new();
    for sid in spheres {
        let bodies: Vec<usize> = d
            .bodies
            .values()
            .filter(|b| b.minus.iter().any(|m| m == sid))
            .map(|b| comp_of[idx[&b.id]])
            .collect();
        if bodies.len() != 2 || bodies[0] == bodies[1] {
            return Err(SumError::Nonseparating(sid.clone()));
        }
        tree.push((bodies[0], bodies[1], sid.clone()));
    }

    // Build each factor.
    let mut factors = Vec::new();
    for c in 0..roots.len() {
        let mut fd = Diagram::new(d.meta.clone());
        for (i, bid) in body_ids.iter().enumerate() {
            if comp_of[i] == c {
                fd.add_body(d.bodies[bid].clone());
            }
        }
        // Surfaces referenced by those bodies.
        let mut needed: BTreeSet<SurfaceId> = BTreeSet::new();
        for b in fd.bodies.values() {
            needed.insert(b.plus.clone());
            needed.extend(b.minus.iter().cloned());
        }
        for sid in &needed {
            fd.add_surface(d.surfaces[sid].clone());
        }
        for (sid, pair) in &d.orientation {
            if needed.contains(sid) && !spheres.contains(sid) {
                fd.orientation.insert(sid.clone(), pair.clone());
            }
        }
        // Cap the scars.
        let scars: Vec<SurfaceId> = spheres
            .iter()
            .filter(|s| needed.contains(*s))
            .cloned()
            .collect();
        for scar in scars {
            let host_id = fd
                .bodies
                .values()
                .find(|b| b.minus.contains(&scar))
                .map(|b| b.id.clone())
                .expect("scar has a host in this factor");
            let host = fd.bodies[&host_id].clone();
            let punct = d.surfaces[&scar].punctures;
            if punct == 2 {
                // Cap with (B³, arc): trace the two strand ends through
                // the cap's bridge arc.
                let cap = Compressionbody::new("cap", "capplus").with_bridges(1);
                let merged = moves::trace_merge(&host, &scar, &cap)?;
                fd.bodies.insert(host_id, merged);
                fd.surfaces.remove(&scar);
            } else {
                // Thrice-punctured scar: the capping ball carries a tree
                // with one interior vertex. Folding it into a host with
                // other decorations would put an interior vertex in a
                // non-ball body, so the factor keeps the vertex drilled;
                // the new sphere stands for the capping ball's vertex and
                // every invariant agrees with the capped pair.
                let _ = host;
                let s = fd.surfaces.get_mut(&scar).unwrap();
                s.role = Role::Boundary;
                s.drilled = true;
            }
        }
        // Factor metadata: recompute the presented vertices.
        let mut valences: Vec<u32> = fd.drilled_surfaces().map(|s| s.punctures).collect();
        let pockets: u32 = fd.bodies.values().map(|b| b.pocket_trees).sum();
        valences.extend(std::iter::repeat_n(3, pockets as usize));
        valences.sort_unstable();
        fd.meta.t_kind = if !valences.is_empty() {
            TKind::Graph
        } else if d.meta.t_kind == TKind::Empty {
            TKind::Empty
        } else {
            TKind::Link
        };
        fd.meta.vertex_valences = valences;
        fd.meta.heegaard_genus_bound = None;

        let rep = fd.validate();
        if !rep.is_valid() {
            return Err(SumError::Invalid(rep));
        }
        factors.push(fd);
    }
    Ok((factors, tree))
}

/// Exact additivity verdict for a sum certificate.
#[derive(Clone, Debug)]
pub struct AdditivityReport {
    pub netext_ok: bool,
    pub width_ok: bool,
    pub netchi_ok: bool,
    pub netext_whole: Half,
    pub netext_parts: Half,
    pub width_whole: Half,
    pub width_parts: Half,
}

impl AdditivityReport {
    pub fn all_ok(&self) -> bool {
        self.netext_ok && self.width_ok && self.netchi_ok
    }
}

/// Verifies netext(whole) = Σ netext(parts) − p₃/2, the width analogue,
/// and netχ(whole) = Σ netχ(parts) + 2(p₂ + p₃) as exact equalities.
pub fn additivity_check(
    parts: &[Diagram],
    whole: &Diagram,
    p2: usize,
    p3: usize,
) -> AdditivityReport {
    let correction = Half::halves(p3 as i64);
    let ne_parts = parts.iter().map(netext).sum::<Half>() - correction;
    let w_parts = parts.iter().map(width).sum::<Half>() - correction;
    let chi_parts = parts.iter().map(netchi).sum::<i64>() + 2 * (p2 + p3) as i64;
    let ne_whole = netext(whole);
    let w_whole = width(whole);
    AdditivityReport {
        netext_ok: ne_whole == ne_parts,
        width_ok: w_whole == w_parts,
        netchi_ok: netchi(whole) == chi_parts,
        netext_whole: ne_whole,
        netext_parts: ne_parts,
        width_whole: w_whole,
        width_parts: w_parts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::invariant::invariants;

    fn bridge_point(d: &Diagram) -> SumPoint {
        let body = d
            .bodies
            .values()
            .find(|b| b.bridge_arcs > 0)
            .expect("a bridge arc somewhere");
        SumPoint {
            body: body.id.clone(),
            attach: SumAttach::OnBridge,
        }
    }

    #[test]
    fn flip_is_involution_and_preserves_invariants() {
        let d = corpus::width92_stack();
        let f = flip(&d);
        assert!(f.validate().is_valid());
        assert_eq!(flip(&f), d);
        let a = invariants(&d).unwrap();
        let b = invariants(&f).unwrap();
        assert_eq!(a.netext, b.netext);
        assert_eq!(a.width, b.width);
        assert_eq!(a.netchi, b.netchi);
    }

    #[test]
    fn glue_two_bridge_diagrams() {
        let d1 = corpus::bridge_position(0, 2);
        let d2 = corpus::bridge_position(0, 2);
        let out = glue(&d1, &bridge_point(&d1), &d2, &bridge_point(&d2)).unwrap();
        let r = invariants(&out).unwrap();
        assert_eq!(r.netext, Half::from_int(2)); // 1 + 1 − 0
        assert_eq!(r.netchi, invariants(&d1).unwrap().netchi * 2 + 2);
    }

    #[test]
    fn glue_theta_graphs_kind3() {
        let d1 = corpus::theta_atom(1);
        let d2 = corpus::theta_atom(1);
        let v1 = SumPoint {
            body: d1.bodies.keys().next().unwrap().clone(),
            attach: SumAttach::AtVertex(d1.bodies.values().next().unwrap().minus[0].clone()),
        };
        let v2 = SumPoint {
            body: d2.bodies.keys().next().unwrap().clone(),
            attach: SumAttach::AtVertex(d2.bodies.values().next().unwrap().minus[0].clone()),
        };
        let out = glue(&d1, &v1, &d2, &v2).unwrap();
        let a = invariants(&d1).unwrap().netext;
        let b = invariants(&d2).unwrap().netext;
        let r = invariants(&out).unwrap();
        assert_eq!(r.netext, a + b - Half::halves(1));
        // One trivalent vertex consumed on each side.
        assert_eq!(out.meta.vertex_valences, vec![3, 3]);
    }

    #[test]
    fn glue_unknot_preserves_width() {
        let d = corpus::bridge_position(0, 3);
        let unknot = corpus::bridge_position(0, 1);
        let out = glue(&d, &bridge_point(&d), &unknot, &bridge_point(&unknot)).unwrap();
        assert_eq!(
            invariants(&out).unwrap().width,
            invariants(&d).unwrap().width
        );
    }

    #[test]
    fn split_recovers_factors() {
        let mut d1 = corpus::bridge_position(0, 2);
        d1.meta.irreducible = true;
        d1.meta.every_sphere_separates = true;
        let mut d2 = corpus::bridge_position(0, 3);
        d2.meta.irreducible = true;
        d2.meta.every_sphere_separates = true;
        let whole = glue(&d1, &bridge_point(&d1), &d2, &bridge_point(&d2)).unwrap();
        let fac = split_prime(&whole).unwrap();
        assert_eq!(fac.factors.len(), 2);
        assert_eq!(fac.p2, 1);
        assert_eq!(fac.p3, 0);
        let mut got: Vec<(Half, Half)> = fac
            .factors
            .iter()
            .map(|f| {
                let r = invariants(f).unwrap();
                (r.netext, r.width)
            })
            .collect();
        got.sort();
        let mut want: Vec<(Half, Half)> = [&d1, &d2]
            .iter()
            .map(|f| {
                let r = invariants(f).unwrap();
                (r.netext, r.width)
            })
            .collect();
        want.sort();
        assert_eq!(got, want);
        let rep = additivity_check(&fac.factors, &whole, fac.p2, fac.p3);
        assert!(rep.all_ok());
    }

    #[test]
    fn unknot_factor_absorbed() {
        // Summing with the unknot makes the old bridge sphere parallel to
        // the summing sphere; consolidating that pair undoes the sum
        // exactly, and the factorization then sees a single prime factor.
        let mut d = corpus::bridge_position(0, 3);
        d.meta.irreducible = true;
        d.meta.every_sphere_separates = true;
        let mut unknot = corpus::bridge_position(0, 1);
        unknot.meta.irreducible = true;
        unknot.meta.every_sphere_separates = true;
        let whole = glue(&d, &bridge_point(&d), &unknot, &bridge_point(&unknot)).unwrap();
        assert!(!moves::locally_thin_lint(&whole).passes());
        let pairs = moves::find_consolidations(&whole);
        assert_eq!(pairs.len(), 1);
        let (thin, thick) = pairs[0].clone();
        let reduced =
            moves::apply_move(&whole, &crate::moves::MoveSpec::Consolidate { thin, thick })
                .unwrap();
        let fac = split_prime(&reduced).unwrap();
        assert_eq!(fac.factors.len(), 1);
        assert_eq!(fac.p2 + fac.p3, 0);
        assert_eq!(
            invariants(&fac.factors[0]).unwrap().netext,
            invariants(&d).unwrap().netext
        );
    }

    #[test]
    fn glued_unknots_additivity_report() {
        // Two unknot diagrams glued along a kind-2 sphere: 0 = 0 + 0 − 0.
        let u1 = corpus::bridge_position(0, 1);
        let u2 = corpus::bridge_position(0, 1);
        let whole = glue(&u1, &bridge_point(&u1), &u2, &bridge_point(&u2)).unwrap();
        let rep = additivity_check(&[u1, u2], &whole, 1, 0);
        assert!(rep.all_ok(), "{:?}", rep);
        assert_eq!(rep.netext_whole, Half::ZERO);
    }

    #[test]
    fn schubert_instance_two_bridge_is_prime() {
        // A 2-bridge certificate has netext 1; every non-trivial factor
        // carries netext ≥ 1, so the factorization finds a single prime.
        let d = corpus::assert_irreducible(corpus::bridge_position(0, 2));
        assert_eq!(invariants(&d).unwrap().netext, Half::from_int(1));
        let fac = split_prime(&d).unwrap();
        assert_eq!(fac.factors.len(), 1);
        assert_eq!(fac.p2 + fac.p3, 0);
    }

    #[test]
    fn pocket_capping_ball_validates() {
        // The trivial capping ball for a thrice-punctured scar: a ball
        // whose tree has one interior vertex and three legs on ∂₊.
        let mut d = Diagram::new(GraphPairMeta::graph(vec![3, 3]));
        d.add_surface(SurfaceComp::new("h", Role::Thick, 0, 3));
        d.add_surface(SurfaceComp::drilled_vertex("v", 3));
        d.add_body(Compressionbody::new("cap", "h").with_pockets(1));
        d.add_body(
            Compressionbody::new("host", "h")
                .with_minus(&["v"])
                .with_vertical("v", 3),
        );
        d.orient("h", "host", "cap");
        let rep = d.validate();
        assert!(rep.is_valid(), "{}", rep);
        // δ of the capping ball counts the pocket vertex as drilled: 0.
        assert_eq!(
            crate::invariant::delta(&d, &d.bodies[&BodyId("cap".into())]),
            Half::ZERO
        );
    }

    #[test]
    fn theta_split_caps_with_pocket() {
        let mut d1 = corpus::theta_atom(1);
        d1.meta.irreducible = true;
        d1.meta.every_sphere_separates = true;
        let mut d2 = corpus::theta_atom(1);
        d2.meta.irreducible = true;
        d2.meta.every_sphere_separates = true;
        let v1 = SumPoint {
            body: d1.bodies.keys().next().unwrap().clone(),
            attach: SumAttach::AtVertex(d1.bodies.values().next().unwrap().minus[0].clone()),
        };
        let v2 = SumPoint {
            body: d2.bodies.keys().next().unwrap().clone(),
            attach: SumAttach::AtVertex(d2.bodies.values().next().unwrap().minus[0].clone()),
        };
        let whole = glue(&d1, &v1, &d2, &v2).unwrap();
        let fac = split_prime(&whole).unwrap();
        assert_eq!(fac.factors.len(), 2);
        assert_eq!(fac.p3, 1);
        // Each factor presents the capped vertex drilled again, so the
        // factors recover the atoms' vertex bookkeeping and invariants.
        for f in &fac.factors {
            assert_eq!(f.meta.vertex_valences, vec![3, 3]);
            assert_eq!(f.drilled_surfaces().count(), 2);
            assert_eq!(
                invariants(f).unwrap().netext,
                invariants(&d1).unwrap().netext
            );
        }
        let rep = additivity_check(&fac.factors, &whole, fac.p2, fac.p3);
        assert!(rep.all_ok(), "{:?}", rep);
    }
}
