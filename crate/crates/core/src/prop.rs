//! Linear combinations of chord diagrams with boundary, composition, tensor
//! and relabelling.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use itertools::Itertools;
use serde_json::{json, Value};

use crate::diagram::{ChordDiagram, Cluster, DiagramError, Direction, InputCircle, Mode, SpecialPoint};
use crate::json::{self, InputError};
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PropError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("mode mismatch")]
    Mode,
    #[error("inhomogeneous sum: dimensions {0} and {1}")]
    Inhomogeneous(usize, usize),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// Sign convention for the faces of the boundary operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundarySign {
    /// Face of local arc `l` on a circle preceded by `P` non-mark clusters
    /// gets `(−1)^(P+l+1)`.
    #[default]
    Koszul,
    /// Arcs numbered globally `t = 1..n+k`, face sign `(−1)^(t+1)`.
    GlobalArc,
}

thread_local! {
    static NORMAL_FORMS: RefCell<HashMap<ChordDiagram, ChordDiagram>> = RefCell::new(HashMap::new());
}

fn normal_form(d: &ChordDiagram) -> ChordDiagram {
    let c = d.canonical();
    if let Some(n) = NORMAL_FORMS.with(|m| m.borrow().get(&c).cloned()) {
        return n;
    }
    let class = c.slide_class(usize::MAX);
    let n = class[0].clone();
    NORMAL_FORMS.with(|m| {
        let mut m = m.borrow_mut();
        for member in class {
            m.insert(member, n.clone());
        }
    });
    n
}

/// Homogeneous ℚ-combination of diagrams of one shape and mode.
#[derive(Clone, PartialEq, Eq)]
pub struct DiagramSum {
    n: usize,
    m: usize,
    mode: Mode,
    terms: BTreeMap<ChordDiagram, Q>,
    slide_normalize: bool,
}

impl fmt::Debug for DiagramSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(d, c)| format!("{c}·⟨{}⟩", d.notation())).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl DiagramSum {
    pub fn zero(n: usize, m: usize, mode: Mode) -> DiagramSum {
        DiagramSum { n, m, mode, terms: BTreeMap::new(), slide_normalize: true }
    }

    /// A sum that keeps slide-equivalent diagrams apart.
    pub fn zero_raw(n: usize, m: usize, mode: Mode) -> DiagramSum {
        DiagramSum { slide_normalize: false, ..DiagramSum::zero(n, m, mode) }
    }

    pub fn from_diagram(d: &ChordDiagram) -> DiagramSum {
        let mut s = DiagramSum::zero(d.n_inputs(), d.n_outputs(), d.mode);
        s.add_term(d, &Q::one()).expect("shape matches by construction");
        s
    }

    pub fn from_diagram_raw(d: &ChordDiagram) -> DiagramSum {
        let mut s = DiagramSum::zero_raw(d.n_inputs(), d.n_outputs(), d.mode);
        s.add_term(d, &Q::one()).expect("shape matches by construction");
        s
    }

    pub fn n_inputs(&self) -> usize {
        self.n
    }

    pub fn n_outputs(&self) -> usize {
        self.m
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dimension(&self) -> Option<usize> {
        self.terms.keys().next().map(ChordDiagram::dimension)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ChordDiagram, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn like(&self) -> DiagramSum {
        DiagramSum { terms: BTreeMap::new(), ..self.clone() }
    }

    pub fn add_term(&mut self, d: &ChordDiagram, c: &Q) -> Result<(), PropError> {
        if c.is_zero() {
            return Ok(());
        }
        if d.n_inputs() != self.n || d.n_outputs() != self.m {
            return Err(PropError::Shape(format!(
                "term of type ({},{}) in a sum of type ({},{})",
                d.n_inputs(),
                d.n_outputs(),
                self.n,
                self.m
            )));
        }
        if d.mode != self.mode {
            return Err(PropError::Mode);
        }
        if let Some(k) = self.dimension() {
            if k != d.dimension() {
                return Err(PropError::Inhomogeneous(k, d.dimension()));
            }
        }
        let key = if self.slide_normalize { normal_form(d) } else { d.canonical() };
        let entry = self.terms.entry(key.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn scale(&self, c: &Q) -> DiagramSum {
        let mut out = self.like();
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(d, x)| (d.clone(), x * c)).collect();
        }
        out
    }

    pub fn add(&self, other: &DiagramSum) -> Result<DiagramSum, PropError> {
        let mut out = self.clone();
        for (d, c) in &other.terms {
            out.add_term(d, c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DiagramSum) -> Result<DiagramSum, PropError> {
        self.add(&other.scale(&Q::from_int(-1)))
    }

    /// The same sum viewed in sullivan mode.
    pub fn to_sullivan(&self) -> DiagramSum {
        let mut out = DiagramSum { mode: Mode::Sullivan, terms: BTreeMap::new(), ..self.clone() };
        for (d, c) in &self.terms {
            let mut e = d.clone();
            e.mode = Mode::Sullivan;
            out.add_term(&e, c).expect("shape preserved");
        }
        out
    }

    pub fn boundary(&self) -> DiagramSum {
        self.boundary_with(BoundarySign::default())
    }

    pub fn boundary_with(&self, convention: BoundarySign) -> DiagramSum {
        let mut out = self.like();
        for (d, c) in &self.terms {
            for (face, sign) in faces(d, convention) {
                out.add_term(&face, &(c * &Q::from_int(sign))).expect("faces share a shape");
            }
        }
        out
    }

    /// `self ∘ other`: outputs of `other` feed the inputs of `self`.
    pub fn compose(&self, other: &DiagramSum) -> Result<DiagramSum, PropError> {
        if self.n != other.m {
            return Err(PropError::Shape(format!(
                "cannot feed {} outputs into {} inputs",
                other.m, self.n
            )));
        }
        if self.mode != other.mode {
            return Err(PropError::Mode);
        }
        let mut out = DiagramSum { n: other.n, m: self.m, terms: BTreeMap::new(), ..self.clone() };
        for (s, a) in &self.terms {
            for (t, b) in &other.terms {
                let ab = a * b;
                for (d, sign) in compose_diagrams(s, t) {
                    out.add_term(&d, &(&ab * &Q::from_int(sign)))?;
                }
            }
        }
        Ok(out)
    }

    pub fn tensor(&self, other: &DiagramSum) -> Result<DiagramSum, PropError> {
        if self.mode != other.mode {
            return Err(PropError::Mode);
        }
        let mut out =
            DiagramSum { n: self.n + other.n, m: self.m + other.m, terms: BTreeMap::new(), ..self.clone() };
        for (s, a) in &self.terms {
            for (t, b) in &other.terms {
                out.add_term(&disjoint_union(s, t), &(a * b))?;
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(d, c)| json!([c.to_string(), d.to_json()]))
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<DiagramSum, PropError> {
        let items = json::array(v, "$").map_err(DiagramError::from)?;
        let mut out: Option<DiagramSum> = None;
        for (k, it) in items.iter().enumerate() {
            let p = format!("$[{k}]");
            let pair = json::array(it, &p).map_err(DiagramError::from)?;
            if pair.len() != 2 {
                return Err(DiagramError::from(InputError::new(p, "expected [coefficient, diagram]")).into());
            }
            let c = json::q_of(&pair[0], &format!("{p}[0]")).map_err(DiagramError::from)?;
            let d = ChordDiagram::from_json(&pair[1]).map_err(|e| match e {
                DiagramError::Input(ie) => DiagramError::Input(InputError::new(
                    format!("{p}[1]{}", ie.path.trim_start_matches('$')),
                    ie.message,
                )),
                other => other,
            })?;
            let sum = out.get_or_insert_with(|| DiagramSum::zero(d.n_inputs(), d.n_outputs(), d.mode));
            sum.add_term(&d, &c)?;
        }
        out.ok_or_else(|| DiagramError::from(InputError::new("$", "empty sum has no shape")).into())
    }
}

/// Faces of `d` with their signs; full-circle arcs contribute nothing.
pub fn faces(d: &ChordDiagram, convention: BoundarySign) -> Vec<(ChordDiagram, i64)> {
    let mut out = Vec::new();
    let mut before_clusters = 0usize;
    let mut before_arcs = 0usize;
    for (i, circle) in d.inputs.iter().enumerate() {
        let k = circle.clusters.len();
        if k > 1 {
            for a in 0..k {
                let local = a + 1;
                let exponent = match convention {
                    BoundarySign::Koszul => before_clusters + local + 1,
                    BoundarySign::GlobalArc => before_arcs + local + 1,
                };
                let sign = if exponent % 2 == 0 { 1 } else { -1 };
                let later = (a + 1) % k;
                let mut clusters = Vec::with_capacity(k - 1);
                let mut merged = circle.clusters[a].points.clone();
                merged.extend(circle.clusters[later].points.iter().copied());
                for (q, cl) in circle.clusters.iter().enumerate() {
                    if q == a {
                        clusters.push(Cluster::new(merged.clone()));
                    } else if q != later {
                        clusters.push(cl.clone());
                    }
                }
                let mut inputs = d.inputs.clone();
                inputs[i] = InputCircle { clusters };
                let face = ChordDiagram::new(d.mode, inputs, d.chords.clone(), d.outputs)
                    .expect("collapsing an arc keeps the diagram well formed");
                out.push((face, sign));
            }
        }
        before_clusters += k - 1;
        before_arcs += k;
    }
    out
}

pub fn disjoint_union(s: &ChordDiagram, t: &ChordDiagram) -> ChordDiagram {
    let off_c = s.chords.len();
    let off_o = s.outputs;
    let mut inputs = s.inputs.clone();
    for circle in &t.inputs {
        inputs.push(InputCircle {
            clusters: circle
                .clusters
                .iter()
                .map(|cl| Cluster::new(cl.points.iter().map(|p| shift(*p, off_c, off_o)).collect()))
                .collect(),
        });
    }
    let mut chords = s.chords.clone();
    chords.extend(t.chords.iter().copied());
    ChordDiagram::new(s.mode, inputs, chords, s.outputs + t.outputs).expect("union of valid diagrams")
}

fn shift(p: SpecialPoint, chord_off: usize, out_off: usize) -> SpecialPoint {
    match p {
        SpecialPoint::OutputMark { id, dir } => SpecialPoint::OutputMark { id: id + out_off, dir },
        SpecialPoint::ChordLeaf { chord, index, twist } => {
            SpecialPoint::ChordLeaf { chord: chord + chord_off, index, twist }
        }
        SpecialPoint::InputMark => p,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Token {
    /// Non-mark cluster `b` (1-based) of circle `i` of the outer diagram.
    Outer(usize, usize),
    /// Non-mark cluster `q` of circle `c` of the inner diagram.
    Inner(usize, usize),
}

/// Terms of `s ∘ t` with signs, before summation.
pub fn compose_diagrams(s: &ChordDiagram, t: &ChordDiagram) -> Vec<(ChordDiagram, i64)> {
    let k = s.n_inputs();
    assert_eq!(k, t.n_outputs(), "compose shape");
    let off = t.chords.len();
    let walks: Vec<Vec<(usize, usize, bool)>> = (1..=k)
        .map(|id| t.output_walk(id).expect("valid inner diagram").arcs().collect())
        .collect();
    let out_dirs: Vec<Direction> = (1..=k)
        .map(|id| match t.point(t.output_location(id).unwrap()) {
            SpecialPoint::OutputMark { dir, .. } => dir,
            _ => unreachable!(),
        })
        .collect();
    let residues: Vec<Vec<SpecialPoint>> = s
        .inputs
        .iter()
        .map(|c| c.clusters[0].outside().iter().map(|p| shift(*p, off, 0)).collect())
        .collect();
    let carried: Vec<Vec<Cluster>> = s
        .inputs
        .iter()
        .map(|c| {
            c.clusters[1..]
                .iter()
                .map(|cl| Cluster::new(cl.points.iter().map(|p| shift(*p, off, 0)).collect()))
                .collect()
        })
        .collect();

    // t's clusters with output marks replaced by the residues
    let mut base: Vec<Vec<Cluster>> = Vec::new();
    for circle in &t.inputs {
        let mut clusters = Vec::new();
        for (q, cl) in circle.clusters.iter().enumerate() {
            let mut pts = Vec::new();
            for p in &cl.points {
                match *p {
                    SpecialPoint::OutputMark { id, .. } => {
                        let block = &residues[id - 1];
                        if out_dirs[id - 1] == Direction::Opposing {
                            pts.extend(block.iter().copied());
                        } else {
                            pts.extend(block.iter().rev().map(|p| p.toggled()));
                        }
                    }
                    other => pts.push(other),
                }
            }
            if pts.is_empty() {
                debug_assert!(q > 0);
                return Vec::new();
            }
            clusters.push(Cluster::new(pts));
        }
        base.push(clusters);
    }

    let choices: Vec<Vec<Vec<usize>>> = (0..k)
        .map(|i| {
            let p = carried[i].len();
            let arcs = walks[i].len();
            if p == 0 {
                vec![Vec::new()]
            } else {
                (0..arcs).combinations_with_replacement(p).collect()
            }
        })
        .collect();

    let mut outer_rank = BTreeMap::new();
    for (i, cs) in carried.iter().enumerate() {
        for b in 0..cs.len() {
            let r = outer_rank.len();
            outer_rank.insert(Token::Outer(i, b + 1), r);
        }
    }
    for (c, circle) in t.inputs.iter().enumerate() {
        for q in 1..circle.clusters.len() {
            let r = outer_rank.len();
            outer_rank.insert(Token::Inner(c, q), r);
        }
    }

    let mut chords = t.chords.clone();
    chords.extend(s.chords.iter().copied());

    let mut out = Vec::new();
    for combo in choices.iter().map(|v| v.iter()).multi_cartesian_product() {
        let mut inserted: HashMap<(usize, usize), Vec<(Token, Cluster)>> = HashMap::new();
        let mut against = 0;
        for (i, slots) in combo.iter().enumerate() {
            for (b, &a) in slots.iter().enumerate() {
                let (circle, arc, forward) = walks[i][a];
                let mut cl = carried[i][b].clone();
                if !forward {
                    cl = Cluster::new(cl.points.iter().rev().map(|p| p.toggled()).collect());
                    against += 1;
                }
                inserted.entry((circle, arc)).or_default().push((Token::Outer(i, b + 1), cl));
            }
        }
        let mut inputs = Vec::new();
        let mut order = Vec::new();
        for (c, clusters) in base.iter().enumerate() {
            let mut new_clusters = Vec::new();
            for (q, cl) in clusters.iter().enumerate() {
                if q > 0 {
                    order.push(Token::Inner(c, q));
                }
                new_clusters.push(cl.clone());
                if let Some(list) = inserted.get(&(c, q)) {
                    let forward = walks
                        .iter()
                        .flatten()
                        .find(|&&(cc, aa, _)| cc == c && aa == q)
                        .map(|&(_, _, f)| f)
                        .unwrap();
                    let ordered: Vec<&(Token, Cluster)> =
                        if forward { list.iter().collect() } else { list.iter().rev().collect() };
                    for (tok, cl) in ordered {
                        order.push(*tok);
                        new_clusters.push(cl.clone());
                    }
                }
            }
            inputs.push(InputCircle { clusters: new_clusters });
        }
        let ranks: Vec<usize> = order.iter().map(|t| outer_rank[t]).collect();
        let inversions = (0..ranks.len())
            .map(|x| (x + 1..ranks.len()).filter(|&y| ranks[x] > ranks[y]).count())
            .sum::<usize>();
        let sign = if (inversions + against) % 2 == 0 { 1 } else { -1 };
        let d = ChordDiagram::new(s.mode, inputs, chords.clone(), s.outputs)
            .expect("composite of valid diagrams is well formed");
        out.push((d, sign));
    }
    out
}

/// `perm(σ)`: circle `i` carries output `σ(i)'`; `sigma` is 1-based.
pub fn permutation_diagram(sigma: &[usize], mode: Mode) -> ChordDiagram {
    let inputs = sigma
        .iter()
        .map(|&j| InputCircle {
            clusters: vec![Cluster::new(vec![SpecialPoint::out(j), SpecialPoint::InputMark])],
        })
        .collect();
    ChordDiagram::new(mode, inputs, Vec::new(), sigma.len()).expect("permutation diagram")
}

pub fn permutation(sigma: &[usize]) -> DiagramSum {
    DiagramSum::from_diagram(&permutation_diagram(sigma, Mode::Cyclic))
}

pub fn identity(n: usize) -> DiagramSum {
    permutation(&(1..=n).collect::<Vec<_>>())
}
