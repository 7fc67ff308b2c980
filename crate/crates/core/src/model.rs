//! Core data model: surfaces, compressionbody summaries, diagrams, and
//! structural validation.
//!
//! Surfaces are abstract (genus, punctures) pairs; no embedding data is
//! stored. The engine enforces the combinatorial necessary conditions
//! (puncture bookkeeping, genus feasibility, incidence counts, orientation
//! coherence, acyclicity); geometric legality beyond that is carried as
//! user-asserted flags on the pair metadata.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::halfint::Half;

/// Identifier of a surface component. Opaque token, printable in the
/// textual diagram format.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SurfaceId(pub String);

/// Identifier of a compressionbody.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BodyId(pub String);

impl fmt::Display for SurfaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for BodyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for SurfaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s#{}", self.0)
    }
}

impl fmt::Debug for BodyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b#{}", self.0)
    }
}

impl From<&str> for SurfaceId {
    fn from(s: &str) -> Self {
        SurfaceId(s.to_owned())
    }
}

impl From<&str> for BodyId {
    fn from(s: &str) -> Self {
        BodyId(s.to_owned())
    }
}

/// What the embedded graph T is.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TKind {
    Empty,
    Link,
    Graph,
}

impl fmt::Display for TKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TKind::Empty => f.write_str("empty"),
            TKind::Link => f.write_str("link"),
            TKind::Graph => f.write_str("graph"),
        }
    }
}

/// Metadata of the (3-manifold, graph) pair a diagram certifies.
///
/// The three boolean flags are user assertions about the geometry; the
/// engine never tries to derive them.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GraphPairMeta {
    pub t_kind: TKind,
    /// Valences of the interior vertices of T, as a multiset (sorted).
    /// Vertices are presented drilled: each corresponds to a drilled
    /// boundary sphere, or to a pocket tree in a capping ball.
    pub vertex_valences: Vec<u32>,
    /// (M,T) is irreducible.
    pub irreducible: bool,
    /// Every sphere in M separates.
    pub every_sphere_separates: bool,
    /// Every closed surface in M separates.
    pub every_surface_separates: bool,
    /// Asserted Heegaard genus of M, if known.
    pub heegaard_genus_bound: Option<u32>,
}

impl GraphPairMeta {
    pub fn link() -> Self {
        GraphPairMeta {
            t_kind: TKind::Link,
            vertex_valences: Vec::new(),
            irreducible: false,
            every_sphere_separates: false,
            every_surface_separates: false,
            heegaard_genus_bound: None,
        }
    }

    pub fn empty() -> Self {
        GraphPairMeta {
            t_kind: TKind::Empty,
            ..GraphPairMeta::link()
        }
    }

    pub fn graph(valences: Vec<u32>) -> Self {
        let mut vertex_valences = valences;
        vertex_valences.sort_unstable();
        GraphPairMeta {
            t_kind: TKind::Graph,
            vertex_valences,
            ..GraphPairMeta::link()
        }
    }
}

/// Role of a surface component in a diagram.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Role {
    Thick,
    Thin,
    Boundary,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Thick => f.write_str("thick"),
            Role::Thin => f.write_str("thin"),
            Role::Boundary => f.write_str("boundary"),
        }
    }
}

/// One connected surface component of the diagram.
///
/// Euler characteristic is always derived from the genus, never stored.
/// A boundary surface with `drilled` set stands for a drilled-out
/// interior vertex of T; its punctures equal the vertex valence.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SurfaceComp {
    pub id: SurfaceId,
    pub genus: u32,
    pub punctures: u32,
    pub role: Role,
    pub drilled: bool,
}

impl SurfaceComp {
    pub fn new(id: impl Into<String>, role: Role, genus: u32, punctures: u32) -> Self {
        SurfaceComp {
            id: SurfaceId(id.into()),
            genus,
            punctures,
            role,
            drilled: false,
        }
    }

    pub fn drilled_vertex(id: impl Into<String>, valence: u32) -> Self {
        SurfaceComp {
            id: SurfaceId(id.into()),
            genus: 0,
            punctures: valence,
            role: Role::Boundary,
            drilled: true,
        }
    }

    pub fn chi(&self) -> i64 {
        2 - 2 * i64::from(self.genus)
    }

    /// ext(S) = (|S ∩ T| − χ(S))/2 = genus − 1 + punctures/2.
    pub fn ext(&self) -> Half {
        Half::halves(i64::from(self.punctures) + 2 * i64::from(self.genus) - 2)
    }

    pub fn is_sphere(&self) -> bool {
        self.genus == 0
    }
}

/// The ghost arc graph of a compressionbody: vertices are the ∂₋
/// components, edges the ghost arcs (loops allowed).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GhostArcGraph {
    pub vertices: Vec<SurfaceId>,
    pub edges: Vec<(SurfaceId, SurfaceId)>,
}

impl GhostArcGraph {
    pub fn degree(&self, v: &SurfaceId) -> u32 {
        let mut d = 0;
        for (a, b) in &self.edges {
            if a == v {
                d += 1;
            }
            if b == v {
                d += 1;
            }
        }
        d
    }

    /// Number of connected components, counting isolated vertices.
    pub fn component_count(&self) -> usize {
        let idx: BTreeMap<&SurfaceId, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (a, b) in &self.edges {
            if let (Some(&ia), Some(&ib)) = (idx.get(a), idx.get(b)) {
                let (ra, rb) = (find(&mut parent, ia), find(&mut parent, ib));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
        let mut roots = BTreeSet::new();
        for i in 0..self.vertices.len() {
            roots.insert(find(&mut parent, i));
        }
        roots.len()
    }

    pub fn is_connected(&self) -> bool {
        self.vertices.len() <= 1 && self.edges.iter().all(|(a, b)| a == b)
            || self.component_count() == 1
    }

    /// Isolated vertices: degree zero.
    pub fn isolated_count(&self) -> usize {
        self.vertices.iter().filter(|v| self.degree(v) == 0).count()
    }

    /// Leaves: degree exactly one.
    pub fn leaf_count(&self) -> usize {
        self.vertices.iter().filter(|v| self.degree(v) == 1).count()
    }

    /// First Betti number n − k + c of the graph.
    pub fn cycle_rank(&self) -> i64 {
        if self.vertices.is_empty() {
            return 0;
        }
        self.edges.len() as i64 - self.vertices.len() as i64 + self.component_count() as i64
    }
}

/// Summary of one v.p.-compressionbody: its ∂₊ surface, ∂₋ surfaces, and
/// the decoration counts of T inside it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Compressionbody {
    pub id: BodyId,
    /// ∂₊C, a thick surface.
    pub plus: SurfaceId,
    /// ∂₋C components (thin or boundary surfaces), without repetition.
    pub minus: Vec<SurfaceId>,
    /// Arcs with both endpoints on ∂₊C.
    pub bridge_arcs: u32,
    /// Arcs from ∂₊C to the keyed ∂₋ component.
    pub vertical_arcs: BTreeMap<SurfaceId, u32>,
    /// Arcs joining ∂₋ components (unordered pairs; loops allowed).
    pub ghost_arcs: Vec<(SurfaceId, SurfaceId)>,
    /// Circle components of T in the interior.
    pub core_loops: u32,
    /// Boundary-parallel trivalent trees with one interior vertex; only in
    /// trivial capping balls of graph pairs.
    pub pocket_trees: u32,
}

impl Compressionbody {
    pub fn new(id: impl Into<String>, plus: impl Into<String>) -> Self {
        Compressionbody {
            id: BodyId(id.into()),
            plus: SurfaceId(plus.into()),
            minus: Vec::new(),
            bridge_arcs: 0,
            vertical_arcs: BTreeMap::new(),
            ghost_arcs: Vec::new(),
            core_loops: 0,
            pocket_trees: 0,
        }
    }

    pub fn with_bridges(mut self, n: u32) -> Self {
        self.bridge_arcs = n;
        self
    }

    pub fn with_minus(mut self, ids: &[&str]) -> Self {
        self.minus = ids.iter().map(|s| SurfaceId((*s).to_owned())).collect();
        self
    }

    pub fn with_vertical(mut self, sid: &str, n: u32) -> Self {
        self.vertical_arcs.insert(SurfaceId(sid.to_owned()), n);
        self
    }

    pub fn with_ghost(mut self, a: &str, b: &str) -> Self {
        self.ghost_arcs
            .push((SurfaceId(a.to_owned()), SurfaceId(b.to_owned())));
        self
    }

    pub fn with_loops(mut self, n: u32) -> Self {
        self.core_loops = n;
        self
    }

    pub fn with_pockets(mut self, n: u32) -> Self {
        self.pocket_trees = n;
        self
    }

    pub fn vertical_total(&self) -> u32 {
        self.vertical_arcs.values().sum()
    }

    pub fn vertical_at(&self, sid: &SurfaceId) -> u32 {
        self.vertical_arcs.get(sid).copied().unwrap_or(0)
    }

    /// Punctures ∂₊C must carry: 2·bridge + Σ vertical + 3·pockets.
    pub fn plus_punctures_needed(&self) -> u32 {
        2 * self.bridge_arcs + self.vertical_total() + 3 * self.pocket_trees
    }

    pub fn ghost_degree(&self, sid: &SurfaceId) -> u32 {
        let mut d = 0;
        for (a, b) in &self.ghost_arcs {
            if a == sid {
                d += 1;
            }
            if b == sid {
                d += 1;
            }
        }
        d
    }

    pub fn ghost_graph(&self) -> GhostArcGraph {
        let mut edges: Vec<(SurfaceId, SurfaceId)> = self
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
        edges.sort();
        GhostArcGraph {
            vertices: self.minus.clone(),
            edges,
        }
    }

    /// Lower bound on genus(∂₊C) from the handle construction: the ghost
    /// arcs and core loops force cycles in the 0/1-handle graph.
    pub fn genus_lower_bound(&self) -> i64 {
        let g = self.ghost_graph();
        g.cycle_rank() + i64::from(self.core_loops)
    }

    pub fn is_trivial_product_over(&self, f: &SurfaceComp) -> bool {
        self.minus.len() == 1
            && self.minus[0] == f.id
            && self.bridge_arcs == 0
            && self.ghost_arcs.is_empty()
            && self.core_loops == 0
            && self.pocket_trees == 0
    }

    /// (B³, ∅): no decorations at all and no ∂₋.
    pub fn looks_like_empty_ball(&self, plus: &SurfaceComp) -> bool {
        self.minus.is_empty()
            && self.bridge_arcs == 0
            && self.core_loops == 0
            && self.pocket_trees == 0
            && plus.genus == 0
            && plus.punctures == 0
    }
}

/// One violated structural invariant.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub rule: Rule,
    pub detail: String,
}

/// Names of the checkable structural invariants.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rule {
    UnknownSurface,
    RoleMismatch,
    PlusPunctures,
    MinusPunctures,
    DuplicateMinus,
    GhostEndpoint,
    VerticalKey,
    GenusBound,
    OncePuncturedSphere,
    PocketUsage,
    IncidenceCount,
    OrientationDomain,
    OrientationCoherence,
    ClosedFlowLine,
    PairAssumption,
    VertexBookkeeping,
    TKindConsistency,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.rule, self.detail)
    }
}

/// Outcome of validating a body or diagram. Empty means legal.
#[derive(Clone, Default, Debug)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, rule: Rule, detail: impl Into<String>) {
        self.violations.push(Violation {
            rule,
            detail: detail.into(),
        });
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for v in &self.violations {
            writeln!(f, "{}", v)?;
        }
        Ok(())
    }
}

/// A multiple v.p.-bridge surface diagram: surfaces, compressionbody
/// summaries, incidence, and a transverse orientation.
///
/// Diagrams are immutable values: every operation produces a new value or
/// a report.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Diagram {
    pub meta: GraphPairMeta,
    pub surfaces: BTreeMap<SurfaceId, SurfaceComp>,
    pub bodies: BTreeMap<BodyId, Compressionbody>,
    /// For each thick or thin surface, the (source body, target body) of
    /// the flow across it.
    pub orientation: BTreeMap<SurfaceId, (BodyId, BodyId)>,
}

impl Diagram {
    pub fn new(meta: GraphPairMeta) -> Self {
        Diagram {
            meta,
            surfaces: BTreeMap::new(),
            bodies: BTreeMap::new(),
            orientation: BTreeMap::new(),
        }
    }

    pub fn add_surface(&mut self, s: SurfaceComp) {
        self.surfaces.insert(s.id.clone(), s);
    }

    pub fn add_body(&mut self, b: Compressionbody) {
        self.bodies.insert(b.id.clone(), b);
    }

    pub fn orient(&mut self, sid: &str, src: &str, tgt: &str) {
        self.orientation.insert(
            SurfaceId(sid.to_owned()),
            (BodyId(src.to_owned()), BodyId(tgt.to_owned())),
        );
    }

    pub fn surface(&self, id: &SurfaceId) -> Option<&SurfaceComp> {
        self.surfaces.get(id)
    }

    pub fn thick_surfaces(&self) -> impl Iterator<Item = &SurfaceComp> {
        self.surfaces.values().filter(|s| s.role == Role::Thick)
    }

    pub fn thin_surfaces(&self) -> impl Iterator<Item = &SurfaceComp> {
        self.surfaces.values().filter(|s| s.role == Role::Thin)
    }

    /// Genuine components of ∂M: boundary role, not drilled vertices.
    pub fn boundary_surfaces(&self) -> impl Iterator<Item = &SurfaceComp> {
        self.surfaces
            .values()
            .filter(|s| s.role == Role::Boundary && !s.drilled)
    }

    pub fn drilled_surfaces(&self) -> impl Iterator<Item = &SurfaceComp> {
        self.surfaces
            .values()
            .filter(|s| s.role == Role::Boundary && s.drilled)
    }

    /// The ids of the two bodies having the given thick surface as ∂₊.
    pub fn bodies_at_thick(&self, sid: &SurfaceId) -> Vec<&BodyId> {
        self.bodies
            .values()
            .filter(|b| &b.plus == sid)
            .map(|b| &b.id)
            .collect()
    }

    /// The ids of the bodies having the given surface among ∂₋.
    pub fn bodies_at_minus(&self, sid: &SurfaceId) -> Vec<&BodyId> {
        self.bodies
            .values()
            .filter(|b| b.minus.iter().any(|m| m == sid))
            .map(|b| &b.id)
            .collect()
    }

    /// Validates one compressionbody summary against this diagram's
    /// surface table. Total: always returns a report.
    pub fn validate_body(&self, c: &Compressionbody) -> ValidationReport {
        let mut rep = ValidationReport::default();

        let plus = match self.surfaces.get(&c.plus) {
            Some(s) => s,
            None => {
                rep.push(
                    Rule::UnknownSurface,
                    format!("body {}: plus surface {} missing", c.id, c.plus),
                );
                return rep;
            }
        };
        if plus.role != Role::Thick {
            rep.push(
                Rule::RoleMismatch,
                format!(
                    "body {}: ∂₊ surface {} has role {}",
                    c.id, c.plus, plus.role
                ),
            );
        }

        let mut seen = BTreeSet::new();
        for m in &c.minus {
            if !seen.insert(m.clone()) {
                rep.push(
                    Rule::DuplicateMinus,
                    format!("body {}: ∂₋ lists {} twice", c.id, m),
                );
            }
            match self.surfaces.get(m) {
                None => {
                    rep.push(
                        Rule::UnknownSurface,
                        format!("body {}: ∂₋ surface {} missing", c.id, m),
                    );
                }
                Some(s) => {
                    if s.role == Role::Thick {
                        rep.push(
                            Rule::RoleMismatch,
                            format!("body {}: ∂₋ surface {} is thick", c.id, m),
                        );
                    }
                    if s.is_sphere() && s.punctures == 1 {
                        rep.push(
                            Rule::OncePuncturedSphere,
                            format!(
                                "body {}: ∂₋ component {} is a once-punctured sphere",
                                c.id, m
                            ),
                        );
                    }
                }
            }
        }
        let minus_set: BTreeSet<&SurfaceId> = c.minus.iter().collect();

        for k in c.vertical_arcs.keys() {
            if !minus_set.contains(k) {
                rep.push(
                    Rule::VerticalKey,
                    format!("body {}: vertical arcs into {} which is not in ∂₋", c.id, k),
                );
            }
        }
        for (a, b) in &c.ghost_arcs {
            if !minus_set.contains(a) || !minus_set.contains(b) {
                rep.push(
                    Rule::GhostEndpoint,
                    format!("body {}: ghost arc ({},{}) leaves ∂₋", c.id, a, b),
                );
            }
        }

        if plus.punctures != c.plus_punctures_needed() {
            rep.push(
                Rule::PlusPunctures,
                format!(
                    "body {}: punctures(∂₊)={} but 2·bridge + Σvertical + 3·pockets = {}",
                    c.id,
                    plus.punctures,
                    c.plus_punctures_needed()
                ),
            );
        }

        for m in &c.minus {
            if let Some(s) = self.surfaces.get(m) {
                let need = c.vertical_at(m) + c.ghost_degree(m);
                if s.punctures != need {
                    rep.push(
                        Rule::MinusPunctures,
                        format!(
                            "body {}: punctures({})={} but vertical + ghost endpoints = {}",
                            c.id, m, s.punctures, need
                        ),
                    );
                }
            }
        }

        // Genus feasibility from the handle construction.
        if rep.is_valid() || !rep.has(Rule::UnknownSurface) {
            let minus_genus: i64 = c
                .minus
                .iter()
                .filter_map(|m| self.surfaces.get(m))
                .map(|s| i64::from(s.genus))
                .sum();
            let bound = minus_genus + c.genus_lower_bound();
            if i64::from(plus.genus) < bound {
                rep.push(
                    Rule::GenusBound,
                    format!(
                        "body {}: genus(∂₊)={} below handle lower bound {}",
                        c.id, plus.genus, bound
                    ),
                );
            }
        }

        if c.pocket_trees > 0 {
            let trivial_tree_ball = c.pocket_trees == 1
                && c.minus.is_empty()
                && c.bridge_arcs == 0
                && c.ghost_arcs.is_empty()
                && c.core_loops == 0
                && plus.genus == 0;
            if !trivial_tree_ball || self.meta.t_kind != TKind::Graph {
                rep.push(
                    Rule::PocketUsage,
                    format!("body {}: pocket trees only occur alone in trivial capping balls of graph pairs", c.id),
                );
            }
        }

        rep
    }

    /// Validates the full diagram: per-body legality, incidence counts,
    /// orientation coherence, acyclicity, the standing pair assumption, and the
    /// vertex bookkeeping of the drilling convention.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();

        for body in self.bodies.values() {
            let body_rep = self.validate_body(body);
            rep.violations.extend(body_rep.violations);
        }

        // Incidence: thick = ∂₊ of exactly 2, thin = ∂₋ of exactly 2,
        // boundary (genuine or drilled) = ∂₋ of exactly 1.
        for s in self.surfaces.values() {
            let plus_count = self.bodies.values().filter(|b| b.plus == s.id).count();
            let minus_count = self
                .bodies
                .values()
                .flat_map(|b| b.minus.iter())
                .filter(|m| **m == s.id)
                .count();
            match s.role {
                Role::Thick => {
                    if plus_count != 2 || minus_count != 0 {
                        rep.push(
                            Rule::IncidenceCount,
                            format!(
                                "thick {} is ∂₊ of {} bodies and ∂₋ of {} (want 2, 0)",
                                s.id, plus_count, minus_count
                            ),
                        );
                    }
                }
                Role::Thin => {
                    if plus_count != 0 || minus_count != 2 {
                        rep.push(
                            Rule::IncidenceCount,
                            format!(
                                "thin {} is ∂₊ of {} bodies and ∂₋ of {} (want 0, 2)",
                                s.id, plus_count, minus_count
                            ),
                        );
                    }
                }
                Role::Boundary => {
                    if plus_count != 0 || minus_count != 1 {
                        rep.push(
                            Rule::IncidenceCount,
                            format!(
                                "boundary {} is ∂₊ of {} bodies and ∂₋ of {} (want 0, 1)",
                                s.id, plus_count, minus_count
                            ),
                        );
                    }
                }
            }
        }

        // Standing assumption on the pair: no genuine boundary sphere meets T in ≤ 2
        // points; no valence-2 vertices.
        for s in self.boundary_surfaces() {
            if s.is_sphere() && s.punctures <= 2 {
                rep.push(
                    Rule::PairAssumption,
                    format!("boundary sphere {} has {} ≤ 2 punctures", s.id, s.punctures),
                );
            }
        }
        for v in &self.meta.vertex_valences {
            if *v < 3 {
                rep.push(Rule::PairAssumption, format!("vertex valence {} < 3", v));
            }
        }

        // Drilling convention bookkeeping.
        let mut presented: Vec<u32> = self.drilled_surfaces().map(|s| s.punctures).collect();
        let pockets: u32 = self.bodies.values().map(|b| b.pocket_trees).sum();
        presented.extend(std::iter::repeat_n(3, pockets as usize));
        presented.sort_unstable();
        if presented != self.meta.vertex_valences {
            rep.push(
                Rule::VertexBookkeeping,
                format!(
                    "presented vertices {:?} do not match declared valences {:?}",
                    presented, self.meta.vertex_valences
                ),
            );
        }
        for s in self.drilled_surfaces() {
            if !s.is_sphere() {
                rep.push(
                    Rule::VertexBookkeeping,
                    format!("drilled surface {} is not a sphere", s.id),
                );
            }
        }

        match self.meta.t_kind {
            TKind::Empty => {
                let punctured = self.surfaces.values().any(|s| s.punctures > 0);
                let decorated = self.bodies.values().any(|b| {
                    b.bridge_arcs > 0
                        || b.vertical_total() > 0
                        || !b.ghost_arcs.is_empty()
                        || b.core_loops > 0
                        || b.pocket_trees > 0
                });
                if punctured || decorated {
                    rep.push(
                        Rule::TKindConsistency,
                        "t_kind=empty but T decorations present",
                    );
                }
            }
            TKind::Link => {
                if !self.meta.vertex_valences.is_empty() {
                    rep.push(
                        Rule::TKindConsistency,
                        "t_kind=link but vertex valences declared",
                    );
                }
            }
            TKind::Graph => {
                if self.meta.vertex_valences.is_empty() {
                    rep.push(
                        Rule::TKindConsistency,
                        "t_kind=graph but no vertices declared",
                    );
                }
            }
        }

        // Orientation: domain, coherence, acyclicity.
        for s in self.surfaces.values() {
            let oriented = self.orientation.contains_key(&s.id);
            match s.role {
                Role::Thick | Role::Thin => {
                    if !oriented {
                        rep.push(
                            Rule::OrientationDomain,
                            format!("surface {} lacks orientation", s.id),
                        );
                    }
                }
                Role::Boundary => {
                    if oriented {
                        rep.push(
                            Rule::OrientationDomain,
                            format!("boundary surface {} must not carry orientation", s.id),
                        );
                    }
                }
            }
        }
        for (sid, (src, tgt)) in &self.orientation {
            if !self.surfaces.contains_key(sid) {
                rep.push(
                    Rule::OrientationDomain,
                    format!("orientation of unknown surface {}", sid),
                );
                continue;
            }
            if src == tgt {
                rep.push(
                    Rule::OrientationDomain,
                    format!("surface {} oriented from a body to itself", sid),
                );
                continue;
            }
            let role = self.surfaces[sid].role;
            let adjacent: Vec<&BodyId> = match role {
                Role::Thick => self.bodies_at_thick(sid),
                _ => self.bodies_at_minus(sid),
            };
            for b in [src, tgt] {
                if !adjacent.contains(&b) {
                    rep.push(
                        Rule::OrientationDomain,
                        format!("surface {} oriented across non-adjacent body {}", sid, b),
                    );
                }
            }
        }

        // Coherence: each body is an oriented cobordism, so its ∂₊ and its
        // oriented ∂₋ components point the same way through it.
        for body in self.bodies.values() {
            if let Some(dir) = self.body_direction_conflict(body) {
                rep.push(Rule::OrientationCoherence, dir);
            }
        }

        // Acyclicity of the flow digraph over bodies.
        if self.has_directed_cycle() {
            rep.push(
                Rule::ClosedFlowLine,
                "orientation digraph over bodies has a directed cycle",
            );
        }

        rep
    }

    /// True when the body's plus surface points *into* the body; None if
    /// the orientation entry is missing.
    pub fn body_upward(&self, body: &Compressionbody) -> Option<bool> {
        let (_, tgt) = self.orientation.get(&body.plus)?;
        // Flow exits through ∂₊ when the body is upward (cobordism from
        // ∂₋ to ∂₊), i.e. the body is the source of its plus surface.
        Some(*tgt != body.id)
    }

    fn body_direction_conflict(&self, body: &Compressionbody) -> Option<String> {
        let upward = self.body_upward(body)?;
        for m in &body.minus {
            if let Some((src, tgt)) = self.orientation.get(m) {
                // Upward body: flow enters through every ∂₋ component, so
                // the body must be the target.
                let entering = *tgt == body.id;
                let leaving = *src == body.id;
                if upward && !entering {
                    return Some(format!(
                        "body {}: ∂₊ {} outgoing but ∂₋ {} not incoming",
                        body.id, body.plus, m
                    ));
                }
                if !upward && !leaving {
                    return Some(format!(
                        "body {}: ∂₊ {} incoming but ∂₋ {} not outgoing",
                        body.id, body.plus, m
                    ));
                }
            }
        }
        None
    }

    fn has_directed_cycle(&self) -> bool {
        // Edges src → tgt per oriented surface.
        let ids: Vec<&BodyId> = self.bodies.keys().collect();
        let idx: BTreeMap<&BodyId, usize> = ids.iter().enumerate().map(|(i, b)| (*b, i)).collect();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
        for (src, tgt) in self.orientation.values() {
            if let (Some(&a), Some(&b)) = (idx.get(src), idx.get(tgt)) {
                adj[a].push(b);
            }
        }
        // Kahn's algorithm.
        let mut indeg = vec![0usize; ids.len()];
        for outs in &adj {
            for &b in outs {
                indeg[b] += 1;
            }
        }
        let mut queue: Vec<usize> = (0..ids.len()).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(i) = queue.pop() {
            seen += 1;
            for &b in &adj[i] {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    queue.push(b);
                }
            }
        }
        seen != ids.len()
    }

    /// Fresh surface id not colliding with existing ones.
    pub fn fresh_surface_id(&self, stem: &str) -> SurfaceId {
        let mut n = 0;
        loop {
            let cand = SurfaceId(format!("{}{}", stem, n));
            if !self.surfaces.contains_key(&cand) {
                return cand;
            }
            n += 1;
        }
    }

    pub fn fresh_body_id(&self, stem: &str) -> BodyId {
        let mut n = 0;
        loop {
            let cand = BodyId(format!("{}{}", stem, n));
            if !self.bodies.contains_key(&cand) {
                return cand;
            }
            n += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn ext_values() {
        let s = SurfaceComp::new("s", Role::Thick, 0, 2);
        assert_eq!(s.ext(), Half::from_int(0));
        let s = SurfaceComp::new("s", Role::Thick, 0, 10);
        assert_eq!(s.ext(), Half::from_int(4));
        // Minimal bridge sphere of a b-bridge knot has 2b punctures and
        // extent b − 1.
        for b in 1..6 {
            let s = SurfaceComp::new("s", Role::Thick, 0, 2 * b);
            assert_eq!(s.ext(), Half::from_int(i64::from(b) - 1));
        }
        // A torus is extent 0 regardless of orientation role.
        let t = SurfaceComp::new("t", Role::Boundary, 1, 0);
        assert_eq!(t.ext(), Half::ZERO);
    }

    #[test]
    fn unknot_diagram_validates() {
        let d = corpus::bridge_position(0, 1);
        let rep = d.validate();
        assert!(rep.is_valid(), "{}", rep);
    }

    #[test]
    fn puncture_bookkeeping_rejected() {
        // ∂₊ sphere punctures 3, bridge_arcs 2: 3 ≠ 2·2.
        let mut d = Diagram::new(GraphPairMeta::link());
        d.add_surface(SurfaceComp::new("h", Role::Thick, 0, 3));
        d.add_body(Compressionbody::new("a", "h").with_bridges(2));
        d.add_body(Compressionbody::new("b", "h").with_bridges(2));
        d.orient("h", "a", "b");
        let rep = d.validate_body(&d.bodies[&BodyId("a".into())]);
        assert!(rep.has(Rule::PlusPunctures));
    }

    #[test]
    fn once_punctured_sphere_rejected() {
        let mut d = Diagram::new(GraphPairMeta::link());
        d.add_surface(SurfaceComp::new("h", Role::Thick, 0, 1));
        d.add_surface(SurfaceComp::new("f", Role::Thin, 0, 1));
        let body = Compressionbody::new("a", "h")
            .with_minus(&["f"])
            .with_vertical("f", 1);
        let rep_ctx = {
            let mut dd = d.clone();
            dd.add_body(body.clone());
            dd
        };
        let rep = rep_ctx.validate_body(&body);
        assert!(rep.has(Rule::OncePuncturedSphere));
    }

    #[test]
    fn closed_flow_line_rejected() {
        // Two bodies joined by two thick surfaces oriented as a 2-cycle.
        let mut d = Diagram::new(GraphPairMeta::empty());
        d.add_surface(SurfaceComp::new("h1", Role::Thick, 1, 0));
        d.add_surface(SurfaceComp::new("h2", Role::Thick, 1, 0));
        // Bodies cannot share two plus surfaces in a legal diagram, so
        // build the digraph directly: a ↔ b.
        d.add_body(Compressionbody::new("a", "h1"));
        d.add_body(Compressionbody::new("b", "h1"));
        d.orient("h1", "a", "b");
        d.orient("h2", "b", "a");
        let rep = d.validate();
        assert!(rep.has(Rule::ClosedFlowLine) || rep.has(Rule::OrientationDomain));
    }

    #[test]
    fn genus_bound_from_ghosts() {
        // Two ∂₋ spheres joined by 2 ghost arcs force genus(∂₊) ≥ 1.
        let mut d = Diagram::new(GraphPairMeta::link());
        d.add_surface(SurfaceComp::new("h", Role::Thick, 0, 4));
        d.add_surface(SurfaceComp::new("f1", Role::Thin, 0, 3));
        d.add_surface(SurfaceComp::new("f2", Role::Thin, 0, 3));
        let body = Compressionbody::new("a", "h")
            .with_minus(&["f1", "f2"])
            .with_vertical("f1", 2)
            .with_vertical("f2", 2)
            .with_ghost("f1", "f2")
            .with_ghost("f1", "f2");
        let mut dd = d.clone();
        dd.add_body(body.clone());
        let rep = dd.validate_body(&body);
        assert!(rep.has(Rule::GenusBound), "{}", rep);

        // With genus 1 it passes.
        let mut dd2 = d;
        dd2.surfaces.get_mut(&SurfaceId("h".into())).unwrap().genus = 1;
        dd2.add_body(body.clone());
        let rep2 = dd2.validate_body(&body);
        assert!(!rep2.has(Rule::GenusBound), "{}", rep2);
    }

    #[test]
    fn ghost_graph_shape() {
        let body = Compressionbody::new("a", "h")
            .with_minus(&["f1", "f2", "f3"])
            .with_ghost("f1", "f2")
            .with_ghost("f2", "f3");
        let g = body.ghost_graph();
        assert_eq!(g.component_count(), 1);
        assert_eq!(g.leaf_count(), 2);
        assert_eq!(g.isolated_count(), 0);
        assert_eq!(g.cycle_rank(), 0);

        let body2 = Compressionbody::new("a", "h").with_minus(&["t"]);
        let g2 = body2.ghost_graph();
        assert_eq!(g2.isolated_count(), 1);
        assert_eq!(g2.component_count(), 1);
    }
}
