//! Handle presentations of v.p.-compressionbodies and the trace that
//! derives a body summary from one.
//!
//! A body is built from 0-handles (trivial balls, possibly holding an
//! arc, and products over the ∂₋ components carrying vertical strands)
//! joined by 1-handles, plain or cored. Cored handles bind free graph
//! endpoints on the tops of the 0-handles; tracing the concatenations of
//! strands, ball arcs, and cores recovers the bridge/vertical/ghost/loop
//! decorations. This is the realizability oracle the validator's
//! arithmetic bounds are checked against.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{Compressionbody, Diagram, GraphPairMeta, Role, SurfaceComp, SurfaceId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZeroHandle {
    /// (B³, ∅): top is a sphere, no graph.
    TrivialBallEmpty,
    /// (B³, arc): top is a sphere, one boundary-parallel arc with two
    /// free endpoints (slots 0 and 1).
    TrivialBallArc,
    /// F × I over a ∂₋ component with the given number of vertical
    /// strands (slots 0..strands−1 on the top).
    Product {
        surface: SurfaceId,
        genus: u32,
        strands: u32,
    },
}

impl ZeroHandle {
    fn top_chi(&self) -> i64 {
        match self {
            ZeroHandle::TrivialBallEmpty | ZeroHandle::TrivialBallArc => 2,
            ZeroHandle::Product { genus, .. } => 2 - 2 * i64::from(*genus),
        }
    }

    fn slot_count(&self) -> u32 {
        match self {
            ZeroHandle::TrivialBallEmpty => 0,
            ZeroHandle::TrivialBallArc => 2,
            ZeroHandle::Product { strands, .. } => *strands,
        }
    }
}

/// Attachment of one end of a 1-handle: a 0-handle, plus the consumed
/// endpoint slot when the handle is cored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AttachPoint {
    pub zero_handle: usize,
    pub slot: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneHandle {
    pub cored: bool,
    pub ends: (AttachPoint, AttachPoint),
}

impl OneHandle {
    pub fn plain(a: usize, b: usize) -> Self {
        OneHandle {
            cored: false,
            ends: (
                AttachPoint {
                    zero_handle: a,
                    slot: None,
                },
                AttachPoint {
                    zero_handle: b,
                    slot: None,
                },
            ),
        }
    }

    pub fn cored(a: usize, slot_a: u32, b: usize, slot_b: u32) -> Self {
        OneHandle {
            cored: true,
            ends: (
                AttachPoint {
                    zero_handle: a,
                    slot: Some(slot_a),
                },
                AttachPoint {
                    zero_handle: b,
                    slot: Some(slot_b),
                },
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HandlePresentation {
    pub zero_handles: Vec<ZeroHandle>,
    pub one_handles: Vec<OneHandle>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HandleError {
    #[error("cored 1-handle end has no endpoint binding")]
    DanglingCoredEnd,
    #[error("plain 1-handle end carries an endpoint binding")]
    BindingOnPlainHandle,
    #[error("1-handle end references missing 0-handle {0}")]
    BadZeroHandle(usize),
    #[error("endpoint slot {slot} out of range on 0-handle {zero_handle}")]
    SlotOutOfRange { zero_handle: usize, slot: u32 },
    #[error("endpoint slot {slot} on 0-handle {zero_handle} bound twice")]
    SlotReused { zero_handle: usize, slot: u32 },
    #[error("attachment pattern does not yield a connected body")]
    Disconnected,
    #[error("two product 0-handles share the surface id {0}")]
    DuplicateProductSurface(SurfaceId),
    #[error("derived genus of ∂₊ is negative")]
    NegativeGenus,
    #[error("presentation has no 0-handles")]
    Empty,
}

/// The summary a handle presentation derives: the body decorations plus
/// the surfaces it references.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivedBody {
    pub body: Compressionbody,
    pub plus: SurfaceComp,
    pub minus: Vec<SurfaceComp>,
}

impl DerivedBody {
    /// A throwaway diagram context holding just this body's surfaces, so
    /// the summary can be run through `validate_body`.
    pub fn context(&self, meta: GraphPairMeta) -> Diagram {
        let mut d = Diagram::new(meta);
        d.add_surface(self.plus.clone());
        for m in &self.minus {
            d.add_surface(m.clone());
        }
        d
    }
}

/// Node of the trace graph: one piece of the graph T inside the body.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Piece {
    BallArc(usize),
    Strand(usize, u32),
    Core(usize),
}

/// Traces a handle presentation into a compressionbody summary.
pub fn derive_summary(h: &HandlePresentation) -> Result<DerivedBody, HandleError> {
    if h.zero_handles.is_empty() {
        return Err(HandleError::Empty);
    }

    // Structural checks on the attachments.
    let mut slot_users: BTreeMap<(usize, u32), usize> = BTreeMap::new();
    for (hi, one) in h.one_handles.iter().enumerate() {
        for end in [one.ends.0, one.ends.1] {
            let zh = h
                .zero_handles
                .get(end.zero_handle)
                .ok_or(HandleError::BadZeroHandle(end.zero_handle))?;
            match (one.cored, end.slot) {
                (true, None) => return Err(HandleError::DanglingCoredEnd),
                (false, Some(_)) => return Err(HandleError::BindingOnPlainHandle),
                (true, Some(slot)) => {
                    if slot >= zh.slot_count() {
                        return Err(HandleError::SlotOutOfRange {
                            zero_handle: end.zero_handle,
                            slot,
                        });
                    }
                    if slot_users.insert((end.zero_handle, slot), hi).is_some() {
                        return Err(HandleError::SlotReused {
                            zero_handle: end.zero_handle,
                            slot,
                        });
                    }
                }
                (false, None) => {}
            }
        }
    }
    // A cored loop handle binding the same slot twice is caught above
    // (insert fails on the second use of the identical slot).

    // Connectivity over 0-handles.
    let n = h.zero_handles.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for one in &h.one_handles {
        let (a, b) = (
            find(&mut parent, one.ends.0.zero_handle),
            find(&mut parent, one.ends.1.zero_handle),
        );
        if a != b {
            parent[a] = b;
        }
    }
    let root = find(&mut parent, 0);
    for i in 1..n {
        if find(&mut parent, i) != root {
            return Err(HandleError::Disconnected);
        }
    }

    // ∂₊ from Euler characteristic bookkeeping.
    let chi_plus: i64 = h.zero_handles.iter().map(ZeroHandle::top_chi).sum::<i64>()
        - 2 * h.one_handles.len() as i64;
    if chi_plus > 2 || (chi_plus % 2) != 0 {
        return Err(HandleError::NegativeGenus);
    }
    let plus_genus = ((2 - chi_plus) / 2) as u32;

    // Minus surfaces from the products.
    let mut minus: Vec<SurfaceComp> = Vec::new();
    let mut seen_surface: BTreeMap<SurfaceId, ()> = BTreeMap::new();
    for zh in &h.zero_handles {
        if let ZeroHandle::Product {
            surface,
            genus,
            strands,
        } = zh
        {
            if seen_surface.insert(surface.clone(), ()).is_some() {
                return Err(HandleError::DuplicateProductSurface(surface.clone()));
            }
            minus.push(SurfaceComp {
                id: surface.clone(),
                genus: *genus,
                punctures: *strands,
                role: Role::Thin,
                drilled: false,
            });
        }
    }

    // Trace the graph pieces. Every piece has two endpoints; cored handle
    // bindings concatenate them.
    let mut pieces: Vec<Piece> = Vec::new();
    let mut slot_piece: BTreeMap<(usize, u32), usize> = BTreeMap::new();
    for (zi, zh) in h.zero_handles.iter().enumerate() {
        match zh {
            ZeroHandle::TrivialBallArc => {
                let p = pieces.len();
                pieces.push(Piece::BallArc(zi));
                slot_piece.insert((zi, 0), p);
                slot_piece.insert((zi, 1), p);
            }
            ZeroHandle::Product { strands, .. } => {
                for s in 0..*strands {
                    let p = pieces.len();
                    pieces.push(Piece::Strand(zi, s));
                    slot_piece.insert((zi, s), p);
                }
            }
            ZeroHandle::TrivialBallEmpty => {}
        }
    }
    // Each piece has endpoint keys 2p and 2p+1. For ball arcs these are
    // the two slots; for strands key 2p is the top slot and 2p+1 the
    // bottom (∂₋) endpoint; for cores they are the two bound slots.
    let mut link: BTreeMap<usize, usize> = BTreeMap::new(); // endpoint key -> endpoint key
    let mut endpoint_of_slot: BTreeMap<(usize, u32), usize> = BTreeMap::new();
    for (&(zi, slot), &p) in &slot_piece {
        let key = match pieces[p] {
            Piece::BallArc(_) => 2 * p + usize::from(slot == 1),
            Piece::Strand(..) => 2 * p,
            Piece::Core(_) => unreachable!(),
        };
        endpoint_of_slot.insert((zi, slot), key);
    }
    for (hi, one) in h.one_handles.iter().enumerate() {
        if !one.cored {
            continue;
        }
        let p = pieces.len();
        pieces.push(Piece::Core(hi));
        let ka = endpoint_of_slot[&(one.ends.0.zero_handle, one.ends.0.slot.unwrap())];
        let kb = endpoint_of_slot[&(one.ends.1.zero_handle, one.ends.1.slot.unwrap())];
        link.insert(ka, 2 * p);
        link.insert(2 * p, ka);
        link.insert(kb, 2 * p + 1);
        link.insert(2 * p + 1, kb);
    }

    // Walk chains. Terminal endpoints: unbound ball-arc/strand-top slots
    // (∂₊ punctures) and strand bottoms (∂₋ punctures).
    #[derive(Clone, Copy, PartialEq, Eq, Debug)]
    enum Terminal {
        Top,
        Bottom(usize), // piece index of the strand
    }
    let terminal_kind = |key: usize| -> Option<Terminal> {
        let p = key / 2;
        match pieces[p] {
            Piece::BallArc(_) => {
                if link.contains_key(&key) {
                    None
                } else {
                    Some(Terminal::Top)
                }
            }
            Piece::Strand(..) => {
                if key % 2 == 1 {
                    Some(Terminal::Bottom(p))
                } else if link.contains_key(&key) {
                    None
                } else {
                    Some(Terminal::Top)
                }
            }
            Piece::Core(_) => {
                if link.contains_key(&key) {
                    None
                } else {
                    // A core end is always bound by construction.
                    None
                }
            }
        }
    };
    let other_end = |key: usize| -> usize { key ^ 1 };

    let mut body = Compressionbody::new("body", "plus");
    let strand_surface = |p: usize| -> SurfaceId {
        match pieces[p] {
            Piece::Strand(zi, _) => match &h.zero_handles[zi] {
                ZeroHandle::Product { surface, .. } => surface.clone(),
                _ => unreachable!(),
            },
            _ => unreachable!(),
        }
    };

    let mut visited = vec![false; pieces.len()];
    for start in 0..pieces.len() {
        if visited[start] {
            continue;
        }
        // Walk to one extreme or detect a cycle.
        let mut key = 2 * start;
        let mut steps = 0;
        let start_key = key;
        let is_cycle = loop {
            // Move across the piece, then across a link if present.
            let far = other_end(key);
            match link.get(&far) {
                None => break false,
                Some(&next) => {
                    key = next;
                    steps += 1;
                    if key == start_key {
                        break true;
                    }
                    if steps > 4 * pieces.len() {
                        break true;
                    }
                }
            }
        };
        if is_cycle {
            // Mark every piece on the cycle.
            let mut k = start_key;
            loop {
                visited[k / 2] = true;
                let far = other_end(k);
                match link.get(&far) {
                    None => break,
                    Some(&next) => {
                        k = next;
                        if k == start_key {
                            break;
                        }
                    }
                }
            }
            body.core_loops += 1;
            continue;
        }
        // `key` side hit a terminal going forward from far end; find the
        // true chain by walking both directions from start.
        let walk = |mut k: usize, visited: &mut Vec<bool>| -> usize {
            loop {
                visited[k / 2] = true;
                let far = other_end(k);
                match link.get(&far) {
                    None => return far,
                    Some(&next) => k = next,
                }
            }
        };
        let end_a = walk(2 * start, &mut visited);
        let end_b = {
            // Walk the other way: start from the near end of the start
            // piece by crossing its link first.
            let near = 2 * start;
            match link.get(&near) {
                None => near,
                Some(&next) => walk(next, &mut visited),
            }
        };
        let ta = terminal_kind(end_a);
        let tb = terminal_kind(end_b);
        match (ta, tb) {
            (Some(Terminal::Top), Some(Terminal::Top)) => body.bridge_arcs += 1,
            (Some(Terminal::Top), Some(Terminal::Bottom(p)))
            | (Some(Terminal::Bottom(p)), Some(Terminal::Top)) => {
                let sid = strand_surface(p);
                *body.vertical_arcs.entry(sid).or_insert(0) += 1;
            }
            (Some(Terminal::Bottom(pa)), Some(Terminal::Bottom(pb))) => {
                body.ghost_arcs
                    .push((strand_surface(pa), strand_surface(pb)));
            }
            _ => unreachable!("chain endpoints must be terminals"),
        }
    }

    // ∂₊ punctures: free top slots.
    let mut plus_punctures = 0u32;
    for (zi, zh) in h.zero_handles.iter().enumerate() {
        for slot in 0..zh.slot_count() {
            if !slot_users.contains_key(&(zi, slot)) {
                plus_punctures += 1;
            }
        }
    }

    body.minus = minus.iter().map(|s| s.id.clone()).collect();
    body.minus.sort();
    let mut ghost: Vec<(SurfaceId, SurfaceId)> = body
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
    body.ghost_arcs = ghost;

    let plus = SurfaceComp {
        id: SurfaceId("plus".into()),
        genus: plus_genus,
        punctures: plus_punctures,
        role: Role::Thick,
        drilled: false,
    };
    Ok(DerivedBody { body, plus, minus })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_with_arc() {
        let h = HandlePresentation {
            zero_handles: vec![ZeroHandle::TrivialBallArc],
            one_handles: vec![],
        };
        let d = derive_summary(&h).unwrap();
        assert_eq!(d.plus.genus, 0);
        assert_eq!(d.plus.punctures, 2);
        assert_eq!(d.body.bridge_arcs, 1);
        assert!(d.body.minus.is_empty());
    }

    #[test]
    fn trivial_product_over_torus() {
        let h = HandlePresentation {
            zero_handles: vec![ZeroHandle::Product {
                surface: SurfaceId("t".into()),
                genus: 1,
                strands: 0,
            }],
            one_handles: vec![],
        };
        let d = derive_summary(&h).unwrap();
        assert_eq!(d.plus.genus, 1);
        assert_eq!(d.plus.punctures, 0);
        assert_eq!(d.body.bridge_arcs, 0);
        assert_eq!(d.body.core_loops, 0);
        assert_eq!(d.body.vertical_total(), 0);
        assert_eq!(d.minus.len(), 1);
    }

    #[test]
    fn two_ball_arcs_joined_by_cored_handle() {
        // Exhaustive over the four endpoint bindings: all give ∂₊ a
        // sphere with 2 punctures and a single traced bridge arc.
        for sa in 0..2 {
            for sb in 0..2 {
                let h = HandlePresentation {
                    zero_handles: vec![ZeroHandle::TrivialBallArc, ZeroHandle::TrivialBallArc],
                    one_handles: vec![OneHandle::cored(0, sa, 1, sb)],
                };
                let d = derive_summary(&h).unwrap();
                assert_eq!(d.plus.genus, 0);
                assert_eq!(d.plus.punctures, 2);
                assert_eq!(d.body.bridge_arcs, 1);
                assert_eq!(d.body.core_loops, 0);
            }
        }
    }

    #[test]
    fn solid_torus_with_core_loop() {
        // Ball arc closed up by a cored handle on its own two endpoints.
        let h = HandlePresentation {
            zero_handles: vec![ZeroHandle::TrivialBallArc],
            one_handles: vec![OneHandle::cored(0, 0, 0, 1)],
        };
        let d = derive_summary(&h).unwrap();
        assert_eq!(d.plus.genus, 1);
        assert_eq!(d.plus.punctures, 0);
        assert_eq!(d.body.core_loops, 1);
        assert_eq!(d.body.bridge_arcs, 0);
    }

    #[test]
    fn ghost_arc_between_products() {
        let h = HandlePresentation {
            zero_handles: vec![
                ZeroHandle::Product {
                    surface: SurfaceId("f1".into()),
                    genus: 0,
                    strands: 3,
                },
                ZeroHandle::Product {
                    surface: SurfaceId("f2".into()),
                    genus: 0,
                    strands: 3,
                },
            ],
            one_handles: vec![OneHandle::cored(0, 0, 1, 0)],
        };
        let d = derive_summary(&h).unwrap();
        assert_eq!(d.body.ghost_arcs.len(), 1);
        assert_eq!(d.body.vertical_total(), 4);
        assert_eq!(d.plus.punctures, 4);
        assert_eq!(d.plus.genus, 0);
    }

    #[test]
    fn dangling_and_reuse_rejected() {
        let h = HandlePresentation {
            zero_handles: vec![ZeroHandle::TrivialBallArc, ZeroHandle::TrivialBallArc],
            one_handles: vec![OneHandle {
                cored: true,
                ends: (
                    AttachPoint {
                        zero_handle: 0,
                        slot: Some(0),
                    },
                    AttachPoint {
                        zero_handle: 1,
                        slot: None,
                    },
                ),
            }],
        };
        assert_eq!(
            derive_summary(&h).unwrap_err(),
            HandleError::DanglingCoredEnd
        );

        let h2 = HandlePresentation {
            zero_handles: vec![ZeroHandle::TrivialBallArc, ZeroHandle::TrivialBallArc],
            one_handles: vec![OneHandle::cored(0, 0, 1, 0), OneHandle::cored(0, 0, 1, 1)],
        };
        assert!(matches!(
            derive_summary(&h2),
            Err(HandleError::SlotReused { .. })
        ));

        let h3 = HandlePresentation {
            zero_handles: vec![ZeroHandle::TrivialBallEmpty, ZeroHandle::TrivialBallEmpty],
            one_handles: vec![],
        };
        assert_eq!(derive_summary(&h3).unwrap_err(), HandleError::Disconnected);
    }

    #[test]
    fn plain_self_handle_adds_genus() {
        let h = HandlePresentation {
            zero_handles: vec![ZeroHandle::TrivialBallEmpty],
            one_handles: vec![OneHandle::plain(0, 0), OneHandle::plain(0, 0)],
        };
        let d = derive_summary(&h).unwrap();
        assert_eq!(d.plus.genus, 2);
        assert_eq!(d.plus.punctures, 0);
    }
}
