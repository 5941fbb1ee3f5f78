//! Cyclic and general Sullivan chord diagrams as labeled ribbon data.
//!
//! Each input circle is stored as a list of clusters read clockwise, with the
//! cluster holding the input mark first and the mark last inside it. A chord
//! is reduced to the cyclic order of its leaves.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::json::{self, InputError};
use crate::report::ValidationReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Cyclic,
    Sullivan,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Cyclic => "cyclic",
            Mode::Sullivan => "sullivan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Opposing,
    Reversed,
}

impl Direction {
    pub fn flipped(self) -> Direction {
        match self {
            Direction::Opposing => Direction::Reversed,
            Direction::Reversed => Direction::Opposing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpecialPoint {
    InputMark,
    /// `id` is 1-based.
    OutputMark { id: usize, dir: Direction },
    ChordLeaf { chord: usize, index: usize, twist: bool },
}

impl SpecialPoint {
    pub fn out(id: usize) -> SpecialPoint {
        SpecialPoint::OutputMark { id, dir: Direction::Opposing }
    }

    pub fn leaf(chord: usize, index: usize) -> SpecialPoint {
        SpecialPoint::ChordLeaf { chord, index, twist: false }
    }

    pub fn is_mark(&self) -> bool {
        matches!(self, SpecialPoint::InputMark)
    }

    /// The same point attached with the opposite local orientation.
    pub fn toggled(self) -> SpecialPoint {
        match self {
            SpecialPoint::InputMark => self,
            SpecialPoint::OutputMark { id, dir } => SpecialPoint::OutputMark { id, dir: dir.flipped() },
            SpecialPoint::ChordLeaf { chord, index, twist } => {
                SpecialPoint::ChordLeaf { chord, index, twist: !twist }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cluster {
    pub points: Vec<SpecialPoint>,
}

impl Cluster {
    pub fn new(points: Vec<SpecialPoint>) -> Cluster {
        Cluster { points }
    }

    pub fn has_mark(&self) -> bool {
        self.points.iter().any(SpecialPoint::is_mark)
    }

    /// Points met by an outside walk (everything except the input mark).
    pub fn outside(&self) -> &[SpecialPoint] {
        match self.points.last() {
            Some(SpecialPoint::InputMark) => &self.points[..self.points.len() - 1],
            _ => &self.points,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chord {
    pub arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InputCircle {
    /// Clockwise; `clusters[0]` carries the input mark.
    pub clusters: Vec<Cluster>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChordDiagram {
    pub mode: Mode,
    pub inputs: Vec<InputCircle>,
    pub chords: Vec<Chord>,
    pub outputs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiagramError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("malformed diagram: {0}")]
    Malformed(String),
    #[error("invalid diagram: {0}")]
    Invalid(String),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
}

/// Position of a point: circle, cluster, index within the cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Loc {
    pub circle: usize,
    pub cluster: usize,
    pub pos: usize,
}

/// A gap between outside points: `gap` ranges over `0..=outside.len()`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WalkState {
    pub circle: usize,
    pub cluster: usize,
    pub gap: usize,
    pub forward: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Visit {
    /// Arc `arc` joins cluster `arc` to cluster `arc + 1` (cyclically).
    Arc { circle: usize, arc: usize, forward: bool },
    Point { loc: Loc, forward: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WalkLabel {
    Input(usize),
    Output(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryWalk {
    pub label: WalkLabel,
    pub visits: Vec<Visit>,
}

impl BoundaryWalk {
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, bool)> + '_ {
        self.visits.iter().filter_map(|v| match *v {
            Visit::Arc { circle, arc, forward } => Some((circle, arc, forward)),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub euler_characteristic: i64,
    pub genus: Option<usize>,
    pub orientable: bool,
    pub n: usize,
    pub m: usize,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.genus {
            Some(g) => write!(f, "(g={g}, n={}, m={})", self.n, self.m),
            None => write!(f, "(non-orientable, chi={}, n={}, m={})", self.euler_characteristic, self.n, self.m),
        }
    }
}

impl ChordDiagram {
    /// Builds a diagram, rotating each circle so the mark cluster comes first
    /// and moving the mark to the end of its cluster.
    pub fn new(
        mode: Mode,
        inputs: Vec<InputCircle>,
        chords: Vec<Chord>,
        outputs: usize,
    ) -> Result<ChordDiagram, DiagramError> {
        let mut inputs = inputs;
        for (i, circle) in inputs.iter_mut().enumerate() {
            if circle.clusters.iter().any(|c| c.points.is_empty()) {
                return Err(DiagramError::Malformed(format!("circle {}: empty cluster", i + 1)));
            }
            let marks: Vec<usize> = circle
                .clusters
                .iter()
                .enumerate()
                .flat_map(|(k, c)| c.points.iter().filter(|p| p.is_mark()).map(move |_| k))
                .collect();
            if marks.len() != 1 {
                return Err(DiagramError::Malformed(format!(
                    "circle {} has {} input marks",
                    i + 1,
                    marks.len()
                )));
            }
            circle.clusters.rotate_left(marks[0]);
            let pts = &mut circle.clusters[0].points;
            pts.retain(|p| !p.is_mark());
            pts.push(SpecialPoint::InputMark);
        }
        let mut seen = BTreeSet::new();
        for circle in &inputs {
            for c in &circle.clusters {
                for p in &c.points {
                    if let SpecialPoint::ChordLeaf { chord, index, .. } = *p {
                        if chord >= chords.len() || index >= chords[chord].arity {
                            return Err(DiagramError::Malformed(format!(
                                "leaf ({chord},{index}) does not exist"
                            )));
                        }
                        if !seen.insert((chord, index)) {
                            return Err(DiagramError::Malformed(format!(
                                "leaf ({chord},{index}) used twice"
                            )));
                        }
                    }
                }
            }
        }
        for (c, ch) in chords.iter().enumerate() {
            if ch.arity < 2 {
                return Err(DiagramError::Malformed(format!("chord {c} has arity {}", ch.arity)));
            }
            if (0..ch.arity).any(|i| !seen.contains(&(c, i))) {
                return Err(DiagramError::Malformed(format!("chord {c} has a missing leaf")));
            }
        }
        Ok(ChordDiagram { mode, inputs, chords, outputs })
    }

    /// Compact notation used by tests and the catalog, e.g. `"[o1 a0] | [a1]"`.
    ///
    /// Circles are separated by `|`; each bracket group is a cluster, the
    /// first one holding the input mark. `oK` is output mark `K'`, `oKr`
    /// the reversed one; `a0`, `b2t` are leaf 0 of chord `a` and twisted
    /// leaf 2 of chord `b`. Chords are numbered by letter, arities by the
    /// largest leaf index.
    pub fn from_notation(mode: Mode, text: &str) -> Result<ChordDiagram, DiagramError> {
        let bad = |m: String| DiagramError::Malformed(format!("notation: {m}"));
        let mut inputs = Vec::new();
        let mut arity: BTreeMap<char, usize> = BTreeMap::new();
        let mut outs = BTreeSet::new();
        let mut raw: Vec<Vec<Vec<(char, usize, bool)>>> = Vec::new();
        for circle in text.split('|') {
            let mut clusters = Vec::new();
            let mut rest = circle.trim();
            while !rest.is_empty() {
                let body = rest.strip_prefix('[').ok_or_else(|| bad(format!("expected '[' in {rest:?}")))?;
                let close = body.find(']').ok_or_else(|| bad("unclosed '['".into()))?;
                let mut pts = Vec::new();
                for tok in body[..close].split_whitespace() {
                    let mut chars = tok.chars();
                    let head = chars.next().unwrap();
                    let tail: String = chars.collect();
                    let flag = tail.ends_with('r') || tail.ends_with('t');
                    let digits = if flag { &tail[..tail.len() - 1] } else { &tail[..] };
                    let k: usize = digits.parse().map_err(|_| bad(format!("bad token {tok:?}")))?;
                    if head != 'o' {
                        let e = arity.entry(head).or_insert(0);
                        *e = (*e).max(k + 1);
                    } else {
                        outs.insert(k);
                    }
                    pts.push((head, k, flag));
                }
                clusters.push(pts);
                rest = body[close + 1..].trim();
            }
            if clusters.is_empty() {
                clusters.push(Vec::new());
            }
            raw.push(clusters);
        }
        let letters: Vec<char> = arity.keys().copied().collect();
        for circle in raw {
            let mut clusters = Vec::new();
            for (k, pts) in circle.into_iter().enumerate() {
                let mut points: Vec<SpecialPoint> = pts
                    .into_iter()
                    .map(|(h, k, flag)| {
                        if h == 'o' {
                            let dir = if flag { Direction::Reversed } else { Direction::Opposing };
                            SpecialPoint::OutputMark { id: k, dir }
                        } else {
                            let chord = letters.iter().position(|&c| c == h).unwrap();
                            SpecialPoint::ChordLeaf { chord, index: k, twist: flag }
                        }
                    })
                    .collect();
                if k == 0 {
                    points.push(SpecialPoint::InputMark);
                }
                clusters.push(Cluster::new(points));
            }
            inputs.push(InputCircle { clusters });
        }
        let chords = letters.iter().map(|c| Chord { arity: arity[c] }).collect();
        ChordDiagram::new(mode, inputs, chords, outs.len())
    }

    /// Inverse of [`ChordDiagram::from_notation`] up to chord lettering.
    pub fn notation(&self) -> String {
        let circle = |c: &InputCircle| {
            c.clusters
                .iter()
                .map(|cl| {
                    let toks: Vec<String> = cl
                        .outside()
                        .iter()
                        .map(|p| match *p {
                            SpecialPoint::OutputMark { id, dir } => {
                                format!("o{id}{}", if dir == Direction::Reversed { "r" } else { "" })
                            }
                            SpecialPoint::ChordLeaf { chord, index, twist } => format!(
                                "{}{index}{}",
                                chord_letter(chord),
                                if twist { "t" } else { "" }
                            ),
                            SpecialPoint::InputMark => unreachable!(),
                        })
                        .collect();
                    format!("[{}]", toks.join(" "))
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        self.inputs.iter().map(circle).collect::<Vec<_>>().join(" | ")
    }

    pub fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs
    }

    pub fn dimension(&self) -> usize {
        self.inputs.iter().map(|c| c.clusters.len() - 1).sum()
    }

    pub fn arc_count(&self) -> usize {
        self.inputs.iter().map(|c| c.clusters.len()).sum()
    }

    pub fn cluster(&self, circle: usize, cluster: usize) -> &Cluster {
        &self.inputs[circle].clusters[cluster]
    }

    pub fn point(&self, loc: Loc) -> SpecialPoint {
        self.inputs[loc.circle].clusters[loc.cluster].points[loc.pos]
    }

    pub fn points(&self) -> impl Iterator<Item = (Loc, SpecialPoint)> + '_ {
        self.inputs.iter().enumerate().flat_map(|(i, c)| {
            c.clusters.iter().enumerate().flat_map(move |(k, cl)| {
                cl.points
                    .iter()
                    .enumerate()
                    .map(move |(p, &pt)| (Loc { circle: i, cluster: k, pos: p }, pt))
            })
        })
    }

    /// `leaf_loc[c][i]` is the location of leaf `i` of chord `c`.
    pub fn leaf_locations(&self) -> Vec<Vec<Loc>> {
        let mut out: Vec<Vec<Loc>> =
            self.chords.iter().map(|c| vec![Loc { circle: 0, cluster: 0, pos: 0 }; c.arity]).collect();
        for (loc, p) in self.points() {
            if let SpecialPoint::ChordLeaf { chord, index, .. } = p {
                out[chord][index] = loc;
            }
        }
        out
    }

    pub fn output_location(&self, id: usize) -> Option<Loc> {
        self.points().find_map(|(loc, p)| match p {
            SpecialPoint::OutputMark { id: k, .. } if k == id => Some(loc),
            _ => None,
        })
    }

    fn outside_len(&self, circle: usize, cluster: usize) -> usize {
        self.cluster(circle, cluster).outside().len()
    }

    /// Arrival state after passing leaf (`chord`, `index`) through its chord.
    fn jump(&self, leaves: &[Vec<Loc>], chord: usize, index: usize, forward: bool) -> WalkState {
        let r = self.chords[chord].arity as isize;
        let sign = |t: bool| if t { -1isize } else { 1 };
        let twist_of = |loc: Loc| match self.point(loc) {
            SpecialPoint::ChordLeaf { twist, .. } => twist,
            _ => unreachable!("leaf location holds a leaf"),
        };
        let w = if forward { 1 } else { -1 };
        let delta = w * sign(twist_of(leaves[chord][index]));
        let j = (index as isize + delta).rem_euclid(r) as usize;
        let target = leaves[chord][j];
        let w2 = delta * sign(twist_of(target));
        if w2 > 0 {
            WalkState { circle: target.circle, cluster: target.cluster, gap: target.pos + 1, forward: true }
        } else {
            WalkState { circle: target.circle, cluster: target.cluster, gap: target.pos, forward: false }
        }
    }

    /// One step of the outside face-tracing permutation.
    pub fn step(&self, leaves: &[Vec<Loc>], s: WalkState) -> (Visit, WalkState) {
        let len = self.outside_len(s.circle, s.cluster);
        let k = self.inputs[s.circle].clusters.len();
        if s.forward {
            if s.gap < len {
                let loc = Loc { circle: s.circle, cluster: s.cluster, pos: s.gap };
                match self.point(loc) {
                    SpecialPoint::ChordLeaf { chord, index, .. } => {
                        (Visit::Point { loc, forward: true }, self.jump(leaves, chord, index, true))
                    }
                    _ => (Visit::Point { loc, forward: true }, WalkState { gap: s.gap + 1, ..s }),
                }
            } else {
                let next = (s.cluster + 1) % k;
                (
                    Visit::Arc { circle: s.circle, arc: s.cluster, forward: true },
                    WalkState { circle: s.circle, cluster: next, gap: 0, forward: true },
                )
            }
        } else if s.gap > 0 {
            let loc = Loc { circle: s.circle, cluster: s.cluster, pos: s.gap - 1 };
            match self.point(loc) {
                SpecialPoint::ChordLeaf { chord, index, .. } => {
                    (Visit::Point { loc, forward: false }, self.jump(leaves, chord, index, false))
                }
                _ => (Visit::Point { loc, forward: false }, WalkState { gap: s.gap - 1, ..s }),
            }
        } else {
            let prev = (s.cluster + k - 1) % k;
            let plen = self.outside_len(s.circle, prev);
            (
                Visit::Arc { circle: s.circle, arc: prev, forward: false },
                WalkState { circle: s.circle, cluster: prev, gap: plen, forward: false },
            )
        }
    }

    fn all_states(&self) -> Vec<WalkState> {
        let mut out = Vec::new();
        for (i, c) in self.inputs.iter().enumerate() {
            for (k, cl) in c.clusters.iter().enumerate() {
                for gap in 0..=cl.outside().len() {
                    for forward in [true, false] {
                        out.push(WalkState { circle: i, cluster: k, gap, forward });
                    }
                }
            }
        }
        out
    }

    /// Orbits of the outside walk, each as its list of visits from a start state.
    fn orbits(&self) -> Vec<(WalkState, Vec<Visit>)> {
        let leaves = self.leaf_locations();
        let states = self.all_states();
        let limit = 4 * states.len() + 8;
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for s0 in states {
            if seen.contains(&s0) {
                continue;
            }
            let mut visits = Vec::new();
            let mut s = s0;
            loop {
                seen.insert(s);
                let (v, n) = self.step(&leaves, s);
                visits.push(v);
                s = n;
                if s == s0 {
                    break;
                }
                if visits.len() > limit {
                    panic!("face tracing did not close on {}", self.notation());
                }
            }
            out.push((s0, visits));
        }
        out
    }

    /// Walk of output `id`, starting just past its mark in its declared
    /// direction and ending with the crossing of that mark.
    pub fn output_walk(&self, id: usize) -> Option<BoundaryWalk> {
        let loc = self.output_location(id)?;
        let SpecialPoint::OutputMark { dir, .. } = self.point(loc) else { unreachable!() };
        let leaves = self.leaf_locations();
        let mut s = match dir {
            Direction::Opposing => {
                WalkState { circle: loc.circle, cluster: loc.cluster, gap: loc.pos + 1, forward: true }
            }
            Direction::Reversed => {
                WalkState { circle: loc.circle, cluster: loc.cluster, gap: loc.pos, forward: false }
            }
        };
        let limit = 2 * self.all_states().len() + 2;
        let mut visits = Vec::new();
        loop {
            let (v, n) = self.step(&leaves, s);
            visits.push(v);
            s = n;
            if let Visit::Point { loc: l, .. } = v {
                if l == loc {
                    return Some(BoundaryWalk { label: WalkLabel::Output(id), visits });
                }
            }
            if visits.len() > limit {
                return None;
            }
        }
    }

    /// Input circles first, then outputs by id.
    pub fn trace_boundaries(&self) -> Result<Vec<BoundaryWalk>, DiagramError> {
        let mut walks = Vec::new();
        for (i, c) in self.inputs.iter().enumerate() {
            let mut visits = Vec::new();
            for k in 0..c.clusters.len() {
                if k == 0 {
                    let pos = c.clusters[0].points.len() - 1;
                    visits.push(Visit::Point { loc: Loc { circle: i, cluster: 0, pos }, forward: true });
                }
                visits.push(Visit::Arc { circle: i, arc: k, forward: true });
            }
            walks.push(BoundaryWalk { label: WalkLabel::Input(i + 1), visits });
        }
        for id in 1..=self.outputs {
            let w = self
                .output_walk(id)
                .ok_or_else(|| DiagramError::Invalid(format!("output {id}' walk does not close")))?;
            walks.push(w);
        }
        Ok(walks)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        r.pass("one input mark per circle");
        let mut counts = vec![0usize; self.outputs + 1];
        let mut stray = None;
        for (_, p) in self.points() {
            if let SpecialPoint::OutputMark { id, .. } = p {
                if id == 0 || id > self.outputs {
                    stray.get_or_insert(id);
                } else {
                    counts[id] += 1;
                }
            }
        }
        let dup = (1..=self.outputs).find(|&k| counts[k] > 1);
        let missing = (1..=self.outputs).find(|&k| counts[k] == 0);
        r.record(
            "output ids",
            match (dup, missing, stray) {
                (Some(k), _, _) => Some(format!("duplicate output id {k}'")),
                (_, _, Some(k)) => Some(format!("output id {k}' out of range 1..{}", self.outputs)),
                (_, Some(k), _) => Some(format!("missing output id {k}'")),
                _ => None,
            },
        );
        let structural_ok = dup.is_none() && missing.is_none() && stray.is_none();
        let cyclic_bits = if self.mode == Mode::Cyclic {
            self.points().find_map(|(loc, p)| match p {
                SpecialPoint::OutputMark { dir: Direction::Reversed, id } => {
                    Some(format!("output {id}' reversed at {loc:?}"))
                }
                SpecialPoint::ChordLeaf { twist: true, chord, index } => {
                    Some(format!("leaf ({chord},{index}) twisted"))
                }
                _ => None,
            })
        } else {
            None
        };
        r.record("cyclic orientation bits", cyclic_bits);
        if !structural_ok {
            r.fail("boundary components", "skipped: output ids invalid");
            return r;
        }
        let orbits = self.orbits();
        let components = orbits.len() / 2;
        let mut bad = None;
        for (_, visits) in &orbits {
            let n_out = visits
                .iter()
                .filter(|v| matches!(v, Visit::Point { loc, .. } if matches!(self.point(*loc), SpecialPoint::OutputMark { .. })))
                .count();
            if n_out != 1 {
                bad.get_or_insert(n_out);
            }
        }
        let boundary = if components != self.outputs {
            Some(format!("{} outside components for {} outputs", components, self.outputs))
        } else {
            bad.map(|k| format!("an outside component carries {k} output marks"))
        };
        r.record("boundary components", boundary);
        if self.mode == Mode::Cyclic {
            r.record("orientable", (!self.orientable()).then(|| "twist parity inconsistent".into()));
        }
        r
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn ensure_valid(&self) -> Result<(), DiagramError> {
        let r = self.validate();
        let first = r.failures().next().map(|e| {
            DiagramError::Invalid(format!("{}: {}", e.check, e.witness.clone().unwrap_or_default()))
        });
        first.map_or(Ok(()), Err)
    }

    /// Two-colouring of circles and chords with `o(circle)·o(chord) = (−1)^twist` at every leaf.
    pub fn orientable(&self) -> bool {
        let n = self.inputs.len();
        let nodes = n + self.chords.len();
        let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); nodes];
        for (loc, p) in self.points() {
            if let SpecialPoint::ChordLeaf { chord, twist, .. } = p {
                adj[loc.circle].push((n + chord, twist));
                adj[n + chord].push((loc.circle, twist));
            }
        }
        let mut colour: Vec<Option<bool>> = vec![None; nodes];
        for s in 0..nodes {
            if colour[s].is_some() {
                continue;
            }
            colour[s] = Some(false);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let cu = colour[u].unwrap();
                for &(v, t) in &adj[u] {
                    let want = cu ^ t;
                    match colour[v] {
                        None => {
                            colour[v] = Some(want);
                            queue.push_back(v);
                        }
                        Some(c) if c != want => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }

    pub fn classify(&self) -> Classification {
        let clusters: usize = self.arc_count();
        let v = (clusters + self.chords.len()) as i64;
        let e = (clusters + self.chords.iter().map(|c| c.arity).sum::<usize>()) as i64;
        let chi = v - e;
        let orientable = self.orientable();
        let n = self.inputs.len();
        let m = self.outputs;
        let twice_g = 2 - (n + m) as i64 - chi;
        let genus = (orientable && twice_g >= 0 && twice_g % 2 == 0).then(|| (twice_g / 2) as usize);
        Classification { euler_characteristic: chi, genus, orientable, n, m }
    }

    /// Order in which points are met when reading each circle clockwise from
    /// just after its input mark.
    fn traversal(&self) -> Vec<Loc> {
        let mut out = Vec::new();
        for (i, c) in self.inputs.iter().enumerate() {
            let k = c.clusters.len();
            for cl in (1..k).chain(std::iter::once(0)) {
                for pos in 0..c.clusters[cl].outside().len() {
                    out.push(Loc { circle: i, cluster: cl, pos });
                }
            }
        }
        out
    }

    /// Representative invariant under chord renumbering and leaf rotation; in
    /// sullivan mode a chord is also flipped so its first leaf is untwisted.
    pub fn canonical(&self) -> ChordDiagram {
        let mut new_id = vec![usize::MAX; self.chords.len()];
        let mut first_leaf = vec![0usize; self.chords.len()];
        let mut flip = vec![false; self.chords.len()];
        let mut next = 0;
        for loc in self.traversal() {
            if let SpecialPoint::ChordLeaf { chord, index, twist } = self.point(loc) {
                if new_id[chord] == usize::MAX {
                    new_id[chord] = next;
                    next += 1;
                    first_leaf[chord] = index;
                    flip[chord] = twist;
                }
            }
        }
        let mut chords = vec![Chord { arity: 0 }; self.chords.len()];
        for (c, ch) in self.chords.iter().enumerate() {
            chords[new_id[c]] = *ch;
        }
        let mut d = self.clone();
        d.chords = chords;
        for circle in d.inputs.iter_mut() {
            for cl in circle.clusters.iter_mut() {
                for p in cl.points.iter_mut() {
                    if let SpecialPoint::ChordLeaf { chord, index, twist } = *p {
                        let r = self.chords[chord].arity as isize;
                        let off = index as isize - first_leaf[chord] as isize;
                        let idx = if flip[chord] { -off } else { off }.rem_euclid(r) as usize;
                        *p = SpecialPoint::ChordLeaf {
                            chord: new_id[chord],
                            index: idx,
                            twist: twist ^ flip[chord],
                        };
                    }
                }
            }
        }
        d
    }

    pub fn canonical_bytes(&self) -> String {
        json::canonical_string(&self.canonical().to_json())
    }

    pub fn equals(&self, other: &ChordDiagram) -> bool {
        self.canonical() == other.canonical()
    }

    /// All diagrams one slide move away, in canonical form, excluding `self`.
    pub fn slide_variants(&self) -> Vec<ChordDiagram> {
        let leaves = self.leaf_locations();
        let me = self.canonical();
        let mut out = BTreeSet::new();
        for (loc, p) in self.points() {
            if p.is_mark() {
                continue;
            }
            let outside = self.cluster(loc.circle, loc.cluster).outside();
            let own_chord = match p {
                SpecialPoint::ChordLeaf { chord, .. } => Some(chord),
                _ => None,
            };
            // p right after a leaf: cross that leaf's corner walking backward.
            // p right before a leaf: cross it walking forward.
            let mut moves = Vec::new();
            if loc.pos > 0 {
                moves.push((loc.pos - 1, false));
            }
            if loc.pos + 1 < outside.len() {
                moves.push((loc.pos + 1, true));
            }
            for (npos, forward) in moves {
                let SpecialPoint::ChordLeaf { chord, index, .. } = outside[npos] else { continue };
                if Some(chord) == own_chord {
                    continue;
                }
                let landing = self.jump(&leaves, chord, index, forward);
                if let Some(d) = self.moved_across(loc, p, forward, landing) {
                    let c = d.canonical();
                    if c != me {
                        out.insert(c);
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// Removes the point at `loc`, which a walker moving `was_forward`
    /// crosses just before the corner, and re-inserts it so that a walker in
    /// state `landing` crosses it first; toggled when the crossing direction
    /// changes.
    fn moved_across(&self, loc: Loc, p: SpecialPoint, was_forward: bool, landing: WalkState) -> Option<ChordDiagram> {
        let mut d = self.clone();
        // `landing` is adjacent to a leaf; locate that leaf to survive index shifts.
        let anchor_pos = if landing.forward { landing.gap - 1 } else { landing.gap };
        let anchor = self.point(Loc { circle: landing.circle, cluster: landing.cluster, pos: anchor_pos });
        d.inputs[loc.circle].clusters[loc.cluster].points.remove(loc.pos);
        let ap = d.inputs[landing.circle].clusters[landing.cluster].points.iter().position(|q| *q == anchor)?;
        let q = if landing.forward == was_forward { p } else { p.toggled() };
        let at = if landing.forward { ap + 1 } else { ap };
        d.inputs[landing.circle].clusters[landing.cluster].points.insert(at, q);
        Some(d)
    }

    /// Closure under slides, as a sorted set of canonical diagrams.
    pub fn slide_class(&self, limit: usize) -> Vec<ChordDiagram> {
        let start = self.canonical();
        let mut seen = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some(d) = queue.pop_front() {
            if seen.len() >= limit {
                break;
            }
            for v in d.slide_variants() {
                if seen.insert(v.clone()) {
                    queue.push_back(v);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Least member of the slide class in the canonical order.
    pub fn slide_normal_form(&self) -> ChordDiagram {
        self.slide_class(usize::MAX).swap_remove(0)
    }

    pub fn to_json(&self) -> Value {
        let point = |p: &SpecialPoint| match *p {
            SpecialPoint::InputMark => json!({"kind": "mark"}),
            SpecialPoint::OutputMark { id, dir } => json!({
                "kind": "out",
                "id": id,
                "dir": if dir == Direction::Opposing { "opp" } else { "rev" },
            }),
            SpecialPoint::ChordLeaf { chord, index, twist } => {
                json!({"kind": "leaf", "chord": chord, "index": index, "twist": twist})
            }
        };
        json!({
            "mode": self.mode.as_str(),
            "outputs": self.outputs,
            "chords": self.chords.iter().map(|c| json!({"arity": c.arity})).collect::<Vec<_>>(),
            "inputs": self.inputs.iter().map(|c| json!({
                "clusters": c.clusters.iter().map(|cl| json!({
                    "points": cl.points.iter().map(point).collect::<Vec<_>>()
                })).collect::<Vec<_>>()
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<ChordDiagram, DiagramError> {
        json::reject_unknown(v, &["mode", "outputs", "chords", "inputs"], "$")?;
        let mode = match json::str_of(json::field(v, "mode", "$")?, "$.mode")? {
            "cyclic" => Mode::Cyclic,
            "sullivan" => Mode::Sullivan,
            other => return Err(InputError::new("$.mode", format!("unknown mode {other:?}")).into()),
        };
        let outputs = json::usize_of(json::field(v, "outputs", "$")?, "$.outputs")?;
        let mut chords = Vec::new();
        for (c, ch) in json::array(json::field(v, "chords", "$")?, "$.chords")?.iter().enumerate() {
            let p = format!("$.chords[{c}]");
            json::reject_unknown(ch, &["arity"], &p)?;
            let arity = json::usize_of(json::field(ch, "arity", &p)?, &format!("{p}.arity"))?;
            if arity < 2 {
                return Err(InputError::new(format!("{p}.arity"), "arity must be at least 2").into());
            }
            chords.push(Chord { arity });
        }
        let mut inputs = Vec::new();
        for (i, circle) in json::array(json::field(v, "inputs", "$")?, "$.inputs")?.iter().enumerate() {
            let p = format!("$.inputs[{i}]");
            json::reject_unknown(circle, &["clusters"], &p)?;
            let mut clusters = Vec::new();
            let mut marks = 0;
            for (k, cl) in json::array(json::field(circle, "clusters", &p)?, &format!("{p}.clusters"))?
                .iter()
                .enumerate()
            {
                let pc = format!("{p}.clusters[{k}]");
                json::reject_unknown(cl, &["points"], &pc)?;
                let pts = json::array(json::field(cl, "points", &pc)?, &format!("{pc}.points"))?;
                if pts.is_empty() {
                    return Err(InputError::new(format!("{pc}.points"), "cluster has no points").into());
                }
                let mut points = Vec::new();
                for (j, pt) in pts.iter().enumerate() {
                    let pp = format!("{pc}.points[{j}]");
                    let sp = parse_point(pt, &pp, &chords)?;
                    if sp.is_mark() {
                        marks += 1;
                    }
                    points.push(sp);
                }
                clusters.push(Cluster::new(points));
            }
            if marks != 1 {
                return Err(InputError::new(
                    format!("{p}.clusters"),
                    format!("expected exactly one mark, found {marks}"),
                )
                .into());
            }
            inputs.push(InputCircle { clusters });
        }
        ChordDiagram::new(mode, inputs, chords, outputs)
    }
}

fn parse_point(v: &Value, path: &str, chords: &[Chord]) -> Result<SpecialPoint, InputError> {
    match json::str_of(json::field(v, "kind", path)?, &format!("{path}.kind"))? {
        "mark" => {
            json::reject_unknown(v, &["kind"], path)?;
            Ok(SpecialPoint::InputMark)
        }
        "out" => {
            json::reject_unknown(v, &["kind", "id", "dir"], path)?;
            let id = json::usize_of(json::field(v, "id", path)?, &format!("{path}.id"))?;
            if id == 0 {
                return Err(InputError::new(format!("{path}.id"), "output ids start at 1"));
            }
            let dir = match json::opt_field(v, "dir") {
                None => Direction::Opposing,
                Some(d) => match json::str_of(d, &format!("{path}.dir"))? {
                    "opp" => Direction::Opposing,
                    "rev" => Direction::Reversed,
                    o => return Err(InputError::new(format!("{path}.dir"), format!("unknown direction {o:?}"))),
                },
            };
            Ok(SpecialPoint::OutputMark { id, dir })
        }
        "leaf" => {
            json::reject_unknown(v, &["kind", "chord", "index", "twist"], path)?;
            let chord = json::usize_of(json::field(v, "chord", path)?, &format!("{path}.chord"))?;
            let index = json::usize_of(json::field(v, "index", path)?, &format!("{path}.index"))?;
            if chord >= chords.len() {
                return Err(InputError::new(format!("{path}.chord"), format!("no chord {chord}")));
            }
            if index >= chords[chord].arity {
                return Err(InputError::new(
                    format!("{path}.index"),
                    format!("chord {chord} has arity {}", chords[chord].arity),
                ));
            }
            let twist = match json::opt_field(v, "twist") {
                None => false,
                Some(t) => json::bool_of(t, &format!("{path}.twist"))?,
            };
            Ok(SpecialPoint::ChordLeaf { chord, index, twist })
        }
        o => Err(InputError::new(format!("{path}.kind"), format!("unknown point kind {o:?}"))),
    }
}

fn chord_letter(c: usize) -> String {
    let letters = b"abcdefghijklmnpqrsuvwxyz";
    if c < letters.len() {
        (letters[c] as char).to_string()
    } else {
        format!("z{c}")
    }
}

const CATALOG_FILES: &[(&str, &str)] = &[
    ("cup", include_str!("../generators/cup.json")),
    ("star", include_str!("../generators/star.json")),
    ("vee0", include_str!("../generators/vee0.json")),
    ("vee", include_str!("../generators/vee.json")),
    ("delta", include_str!("../generators/delta.json")),
    ("id", include_str!("../generators/id.json")),
    ("tau2", include_str!("../generators/tau2.json")),
    ("reverse", include_str!("../generators/reverse.json")),
];

/// Names of the shipped catalog files.
pub fn catalog_names() -> Vec<&'static str> {
    CATALOG_FILES.iter().map(|(n, _)| *n).collect()
}

/// Raw JSON text of a shipped catalog file.
pub fn catalog_source(name: &str) -> Option<&'static str> {
    CATALOG_FILES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Catalog diagram by name: the shipped files plus `id(n)` and `perm(σ)`,
/// where `σ` lists the 1-based images, e.g. `perm(2,1)`.
pub fn generator(name: &str) -> Result<ChordDiagram, DiagramError> {
    let unknown = || DiagramError::UnknownGenerator(name.to_string());
    if let Some(src) = catalog_source(name) {
        let v = json::parse(src)?;
        return ChordDiagram::from_json(&v);
    }
    let (head, args) = name
        .strip_suffix(')')
        .and_then(|s| s.split_once('('))
        .ok_or_else(unknown)?;
    let nums: Vec<usize> = args
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| unknown()))
        .collect::<Result<_, _>>()?;
    let sigma = match (head, nums.as_slice()) {
        ("id", [n]) => (1..=*n).collect(),
        ("perm", s) => {
            let mut sorted = s.to_vec();
            sorted.sort_unstable();
            if sorted != (1..=s.len()).collect::<Vec<_>>() {
                return Err(unknown());
            }
            s.to_vec()
        }
        _ => return Err(unknown()),
    };
    let inputs = sigma
        .iter()
        .map(|&j| InputCircle { clusters: vec![Cluster::new(vec![SpecialPoint::out(j), SpecialPoint::InputMark])] })
        .collect();
    ChordDiagram::new(Mode::Cyclic, inputs, Vec::new(), sigma.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nd(t: &str) -> ChordDiagram {
        ChordDiagram::from_notation(Mode::Cyclic, t).unwrap()
    }

    #[test]
    fn catalog_is_valid_and_canonical() {
        for name in catalog_names() {
            let d = generator(name).unwrap();
            assert!(d.is_valid(), "{name}: {}", d.validate());
            assert_eq!(d.canonical(), d, "{name} is stored canonically");
            assert_eq!(
                json::canonical_string(&d.to_json()) + "\n",
                catalog_source(name).unwrap(),
                "{name} file is byte-canonical"
            );
        }
    }

    #[test]
    fn generator_shapes_and_dimensions() {
        let dims = [("cup", 2, 1, 0), ("star", 2, 1, 1), ("vee0", 1, 2, 0), ("vee", 1, 2, 1), ("delta", 1, 1, 1), ("id", 1, 1, 0)];
        for (name, n, m, k) in dims {
            let d = generator(name).unwrap();
            assert_eq!((d.n_inputs(), d.n_outputs(), d.dimension()), (n, m, k), "{name}");
            assert_eq!(d.arc_count() - d.n_inputs(), d.dimension());
        }
        assert_eq!(generator("id(3)").unwrap().n_inputs(), 3);
        assert_eq!(generator("perm(2,1)").unwrap(), generator("tau2").unwrap());
        assert!(generator("perm(1,1)").is_err());
        assert!(generator("bogus").is_err());
    }

    #[test]
    fn duplicate_output_id_is_reported() {
        let d = nd("[o1] | [o1]");
        let r = d.validate();
        assert!(r.entry("output ids").unwrap().witness.as_deref().unwrap().contains("duplicate output id"));
    }

    #[test]
    fn reverse_rejected_in_cyclic_mode() {
        let mut d = generator("reverse").unwrap();
        assert!(d.is_valid());
        d.mode = Mode::Cyclic;
        assert!(!d.is_valid());
    }

    #[test]
    fn boundary_walks() {
        assert_eq!(generator("id").unwrap().trace_boundaries().unwrap().len(), 2);
        let cup = generator("cup").unwrap();
        let walks = cup.trace_boundaries().unwrap();
        assert_eq!(walks.len(), 3);
        let circles: BTreeSet<usize> = walks[2].arcs().map(|(c, _, _)| c).collect();
        assert_eq!(circles, BTreeSet::from([0, 1]));
        let rev = generator("reverse").unwrap();
        let w = rev.output_walk(1).unwrap();
        assert!(w.arcs().all(|(_, _, f)| !f));
    }

    #[test]
    fn classification() {
        let c = |n: &str| generator(n).unwrap().classify();
        assert_eq!(c("id"), Classification { euler_characteristic: 0, genus: Some(0), orientable: true, n: 1, m: 1 });
        assert_eq!(c("cup"), Classification { euler_characteristic: -1, genus: Some(0), orientable: true, n: 2, m: 1 });
        assert_eq!(c("vee0"), Classification { euler_characteristic: -1, genus: Some(0), orientable: true, n: 1, m: 2 });
        assert_eq!(c("cup").to_string(), "(g=0, n=2, m=1)");
        // one self-chord whose leaves interleave with two markers twice gives a torus
        let torus = nd("[a0 b0 a1 b1 o1]");
        assert!(torus.is_valid(), "{}", torus.validate());
        assert_eq!(torus.classify().genus, Some(1));
        let mobius = ChordDiagram::from_notation(Mode::Sullivan, "[a0 o1] [a1t]").unwrap();
        assert!(!mobius.classify().orientable);
    }

    #[test]
    fn canonical_equality() {
        let a = nd("[o1 a0 b0] | [a1] | [b1]");
        let b = nd("[o1 b0 a0] | [b1] | [a1]");
        assert!(a.equals(&nd("[o1 a0 b0] | [a1] | [b1]")));
        // same diagram with chord letters swapped
        let swapped = nd("[o1 b0 a0] | [b1] | [a1]");
        assert!(b.equals(&swapped));
        assert!(!generator("cup").unwrap().equals(&generator("star").unwrap()));
        // rotation of the stored cluster list
        let rot = ChordDiagram::new(
            Mode::Cyclic,
            vec![InputCircle {
                clusters: vec![
                    Cluster::new(vec![SpecialPoint::out(1)]),
                    Cluster::new(vec![SpecialPoint::InputMark]),
                ],
            }],
            vec![],
            1,
        )
        .unwrap();
        assert!(rot.equals(&generator("delta").unwrap()));
        // leaf rotation of a 3-ary chord
        let t1 = nd("[o1 a0] | [a1] | [a2]");
        let mut t2 = t1.clone();
        for circle in t2.inputs.iter_mut() {
            for cl in circle.clusters.iter_mut() {
                for p in cl.points.iter_mut() {
                    if let SpecialPoint::ChordLeaf { index, .. } = p {
                        *index = (*index + 1) % 3;
                    }
                }
            }
        }
        assert!(t1.equals(&t2));
        assert_ne!(t1.canonical_bytes(), nd("[o1 a0] | [a2] | [a1]").canonical_bytes());
    }

    #[test]
    fn double_twist_on_a_two_leaf_chord_normalizes_away() {
        let a = ChordDiagram::from_notation(Mode::Sullivan, "[o1 a0t] | [a1t]").unwrap();
        let b = ChordDiagram::from_notation(Mode::Sullivan, "[o1 a0] | [a1]").unwrap();
        assert!(a.equals(&b));
    }

    #[test]
    fn slide_examples() {
        assert!(generator("star").unwrap().slide_variants().is_empty());
        // marker beside a chord leaf moves to the other end
        let v = generator("cup").unwrap().slide_variants();
        assert_eq!(v, vec![nd("[a0] | [o1 a1]").canonical()]);
        // two chords in one cluster: chord past chord
        let d = nd("[o1] [a0 b0] | [a1] | [b1]");
        let v = d.slide_variants();
        let mut want = vec![
            nd("[o1] [a0] | [b0 a1] | [b1]").canonical(),
            nd("[o1] [b0] | [a1] | [b1 a0]").canonical(),
        ];
        want.sort();
        assert_eq!(v, want);
        assert!(v.iter().all(|x| x.is_valid() && x.dimension() == d.dimension()));
    }

    #[test]
    fn json_round_trip_and_errors() {
        for name in catalog_names() {
            let d = generator(name).unwrap();
            let back = ChordDiagram::from_json(&d.to_json()).unwrap();
            assert_eq!(back, d);
        }
        let mut v = generator("cup").unwrap().to_json();
        v["inputs"][1]["clusters"][0]["points"][0]["index"] = serde_json::json!(5);
        match ChordDiagram::from_json(&v) {
            Err(DiagramError::Input(e)) => assert_eq!(e.path, "$.inputs[1].clusters[0].points[0].index"),
            other => panic!("{other:?}"),
        }
    }
}
