//! Evaluation of chord diagrams on tuples of normalized Hochschild cochains.
//!
//! Each input circle of degree n has n argument slots followed by the slot of
//! its final factor, which carries the mark cluster. A placement puts the
//! remaining clusters on distinct argument slots in clockwise order. A slot
//! with r attached points is split by the r-fold coproduct, chords contract
//! their factors with the cyclic bracket, the input mark evaluates on the unit,
//! and every output reads the untouched slots along its boundary walk.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;

use crate::diagram::{ChordDiagram, SpecialPoint};
use crate::frobenius::FrobeniusAlgebra;
use crate::hochschild::{self, decode, encode, space_len, Cochain, HochschildError, Variant};
use crate::linalg::{Field, RationalMatrix};
use crate::prop::DiagramSum;
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ActionError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("input {0} is not homogeneous")]
    Inhomogeneous(usize),
    #[error("input {0} is not a normalized cochain")]
    NotNormalized(usize),
    #[error("cochains over different algebras")]
    Algebra,
    #[error("not well defined on cohomology: {0}")]
    NotWellDefined(String),
    #[error(transparent)]
    Hochschild(#[from] HochschildError),
}

/// An assignment of non-mark clusters to argument slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    /// `slots[i][b]` is the 1-based slot of cluster `b + 1` on circle `i`.
    pub slots: Vec<Vec<usize>>,
    pub sign: i64,
    /// Per output, the `(circle, slot)` factors read along its walk.
    pub reads: Vec<Vec<(usize, usize)>>,
}

/// Every order-preserving injective placement for the given input degrees.
pub fn placements(d: &ChordDiagram, degrees: &[usize]) -> Vec<Placement> {
    assert_eq!(d.n_inputs(), degrees.len(), "one degree per input circle");
    let per_circle: Vec<Vec<Vec<usize>>> = d
        .inputs
        .iter()
        .zip(degrees)
        .map(|(c, &n)| (1..=n).combinations(c.clusters.len() - 1).collect())
        .collect();
    let walks = walks(d);
    per_circle
        .iter()
        .map(|v| v.iter())
        .multi_cartesian_product()
        .map(|slots| {
            let slots: Vec<Vec<usize>> = slots.into_iter().cloned().collect();
            let (reads, sign) = read_and_sign(degrees, &slots, &walks);
            Placement { slots, sign, reads }
        })
        .collect()
}

fn walks(d: &ChordDiagram) -> Vec<Vec<(usize, usize, bool)>> {
    (1..=d.n_outputs()).map(|id| d.output_walk(id).expect("valid diagram").arcs().collect()).collect()
}

/// The single placement with the given slots, if they are admissible.
pub fn placement(d: &ChordDiagram, degrees: &[usize], slots: &[Vec<usize>]) -> Option<Placement> {
    let fits = d.n_inputs() == degrees.len()
        && slots.len() == degrees.len()
        && d.inputs.iter().zip(slots).zip(degrees).all(|((c, s), &n)| {
            s.len() + 1 == c.clusters.len() && s.windows(2).all(|w| w[0] < w[1]) && s.iter().all(|&p| (1..=n).contains(&p))
        });
    if !fits {
        return None;
    }
    let (reads, sign) = read_and_sign(degrees, slots, &walks(d));
    Some(Placement { slots: slots.to_vec(), sign, reads })
}

/// Free slots on arc `arc` of circle `i`, in increasing order.
fn arc_slots(n: usize, slots: &[usize], arc: usize) -> std::ops::Range<usize> {
    let start = if arc == 0 { 1 } else { slots[arc - 1] + 1 };
    let end = if arc < slots.len() { slots[arc] } else { n + 1 };
    start..end
}

fn read_and_sign(
    degrees: &[usize],
    slots: &[Vec<usize>],
    walks: &[Vec<(usize, usize, bool)>],
) -> (Vec<Vec<(usize, usize)>>, i64) {
    let mut against = 0usize;
    let reads: Vec<Vec<(usize, usize)>> = walks
        .iter()
        .map(|w| {
            let mut r = Vec::new();
            for &(circle, arc, forward) in w {
                let range = arc_slots(degrees[circle], &slots[circle], arc);
                if forward {
                    r.extend(range.map(|p| (circle, p)));
                } else {
                    against += range.len();
                    r.extend(range.rev().map(|p| (circle, p)));
                }
            }
            r
        })
        .collect();

    // degree-one items: tokens (non-mark clusters) then letters (argument slots)
    #[derive(Clone, Copy, PartialEq, Eq, Hash)]
    enum Item {
        Token(usize, usize),
        Letter(usize, usize),
    }
    let mut initial = Vec::new();
    for (i, s) in slots.iter().enumerate() {
        initial.extend((0..s.len()).map(|b| Item::Token(i, b)));
    }
    for (i, &n) in degrees.iter().enumerate() {
        initial.extend((1..=n).map(|p| Item::Letter(i, p)));
    }
    let mut fin = Vec::with_capacity(initial.len());
    for (i, s) in slots.iter().enumerate() {
        for (b, &p) in s.iter().enumerate() {
            fin.push(Item::Token(i, b));
            fin.push(Item::Letter(i, p));
        }
    }
    for r in &reads {
        fin.extend(r.iter().map(|&(i, p)| Item::Letter(i, p)));
    }
    debug_assert_eq!(fin.len(), initial.len());
    let rank: HashMap<Item, usize> = initial.iter().enumerate().map(|(k, x)| (*x, k)).collect();
    let ranks: Vec<usize> = fin.iter().map(|x| rank[x]).collect();
    let inversions: usize =
        (0..ranks.len()).map(|x| (x + 1..ranks.len()).filter(|&y| ranks[x] > ranks[y]).count()).sum();
    let sign = if (inversions + against) % 2 == 0 { 1 } else { -1 };
    (reads, sign)
}

/// A tensor of normalized cochains, stored per degree profile as a dense
/// array over the product of the factors' normalized index sets.
#[derive(Clone)]
pub struct CochainTensor {
    alg: Arc<FrobeniusAlgebra>,
    arity: usize,
    parts: BTreeMap<Vec<usize>, Vec<Q>>,
}

impl fmt::Debug for CochainTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CochainTensor({}, arity {}", self.alg.name(), self.arity)?;
        for (ns, v) in &self.parts {
            let nz = v.iter().filter(|x| !x.is_zero()).count();
            if nz > 0 {
                write!(f, ", {ns:?}: {nz} nonzero")?;
            }
        }
        write!(f, ")")
    }
}

impl PartialEq for CochainTensor {
    fn eq(&self, other: &CochainTensor) -> bool {
        self.arity == other.arity && self.sub(other).map(|x| x.is_zero()).unwrap_or(false)
    }
}

fn part_len(d: usize, degrees: &[usize]) -> usize {
    degrees.iter().map(|&n| space_len(d, n, Variant::Normalized)).product()
}

fn split_index(d: usize, degrees: &[usize], mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; degrees.len()];
    for (j, &n) in degrees.iter().enumerate().rev() {
        let len = space_len(d, n, Variant::Normalized);
        out[j] = idx % len;
        idx /= len;
    }
    out
}

fn join_index(d: usize, degrees: &[usize], parts: &[usize]) -> usize {
    degrees
        .iter()
        .zip(parts)
        .fold(0, |acc, (&n, &i)| acc * space_len(d, n, Variant::Normalized) + i)
}

impl CochainTensor {
    pub fn zero(alg: Arc<FrobeniusAlgebra>, arity: usize) -> CochainTensor {
        CochainTensor { alg, arity, parts: BTreeMap::new() }
    }

    /// `f_1 ⊗ ⋯ ⊗ f_k`, expanding each factor into its homogeneous parts.
    pub fn from_cochains(fs: &[Cochain]) -> Result<CochainTensor, ActionError> {
        let alg = fs.first().map(|f| f.algebra().clone()).ok_or_else(|| {
            ActionError::Shape("empty tuple; use CochainTensor::unit".into())
        })?;
        for (i, f) in fs.iter().enumerate() {
            if f.variant() != Variant::Normalized {
                return Err(ActionError::NotNormalized(i + 1));
            }
            if !Arc::ptr_eq(f.algebra(), &alg) && f.algebra().to_json() != alg.to_json() {
                return Err(ActionError::Algebra);
            }
        }
        let mut out = CochainTensor::unit(alg);
        for f in fs {
            let mut fac = CochainTensor::zero(out.alg.clone(), 1);
            for n in f.degrees() {
                fac.parts.insert(vec![n], f.component(n).unwrap().to_vec());
            }
            out = out.tensor(&fac)?;
        }
        Ok(out)
    }

    /// The empty tensor product: the scalar 1.
    pub fn unit(alg: Arc<FrobeniusAlgebra>) -> CochainTensor {
        let mut parts = BTreeMap::new();
        parts.insert(Vec::new(), vec![Q::one()]);
        CochainTensor { alg, arity: 0, parts }
    }

    pub fn algebra(&self) -> &Arc<FrobeniusAlgebra> {
        &self.alg
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Degree profiles with a nonzero part.
    pub fn profiles(&self) -> Vec<Vec<usize>> {
        self.parts
            .iter()
            .filter(|(_, v)| v.iter().any(|x| !x.is_zero()))
            .map(|(k, _)| k.clone())
            .collect()
    }

    pub fn part(&self, degrees: &[usize]) -> Option<&[Q]> {
        self.parts.get(degrees).map(Vec::as_slice)
    }

    pub fn is_zero(&self) -> bool {
        self.parts.values().all(|v| v.iter().all(Q::is_zero))
    }

    /// Total degrees of the nonzero parts.
    pub fn total_degrees(&self) -> Vec<usize> {
        self.profiles().iter().map(|p| p.iter().sum()).sorted().dedup().collect()
    }

    /// Coefficient of the elementary tensor with factors `(args_j; b_j)`.
    pub fn get(&self, factors: &[(Vec<usize>, usize)]) -> Q {
        let d = self.alg.dim();
        if factors.iter().any(|(a, _)| a.contains(&0)) {
            return Q::zero();
        }
        let degrees: Vec<usize> = factors.iter().map(|(a, _)| a.len()).collect();
        match self.parts.get(&degrees) {
            Some(v) => {
                let idx: Vec<usize> =
                    factors.iter().map(|(a, b)| encode(d, Variant::Normalized, a, *b)).collect();
                v[join_index(d, &degrees, &idx)].clone()
            }
            None => Q::zero(),
        }
    }

    /// Nonzero elementary terms as `(factors, coefficient)`.
    pub fn entries(&self) -> Vec<(Vec<(Vec<usize>, usize)>, Q)> {
        let d = self.alg.dim();
        let mut out = Vec::new();
        for (degrees, v) in &self.parts {
            for (i, x) in v.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                let idx = split_index(d, degrees, i);
                let factors = degrees
                    .iter()
                    .zip(idx)
                    .map(|(&n, k)| decode(d, Variant::Normalized, n, k))
                    .collect();
                out.push((factors, x.clone()));
            }
        }
        out
    }

    fn slot_mut(&mut self, degrees: &[usize]) -> &mut Vec<Q> {
        let len = part_len(self.alg.dim(), degrees);
        self.parts.entry(degrees.to_vec()).or_insert_with(|| vec![Q::zero(); len])
    }

    pub fn add_assign_scaled(&mut self, other: &CochainTensor, s: &Q) -> Result<(), ActionError> {
        if self.arity != other.arity {
            return Err(ActionError::Shape(format!("arity {} vs {}", self.arity, other.arity)));
        }
        if !Arc::ptr_eq(&self.alg, &other.alg) && self.alg.to_json() != other.alg.to_json() {
            return Err(ActionError::Algebra);
        }
        for (k, v) in &other.parts {
            let slot = self.slot_mut(k);
            for (x, y) in slot.iter_mut().zip(v) {
                if !y.is_zero() {
                    *x += s * y;
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &CochainTensor) -> Result<CochainTensor, ActionError> {
        let mut out = self.clone();
        out.add_assign_scaled(other, &Q::one())?;
        Ok(out)
    }

    pub fn sub(&self, other: &CochainTensor) -> Result<CochainTensor, ActionError> {
        let mut out = self.clone();
        out.add_assign_scaled(other, &-Q::one())?;
        Ok(out)
    }

    pub fn scale(&self, s: &Q) -> CochainTensor {
        let mut out = self.clone();
        for v in out.parts.values_mut() {
            for x in v.iter_mut() {
                *x *= s;
            }
        }
        out
    }

    pub fn tensor(&self, other: &CochainTensor) -> Result<CochainTensor, ActionError> {
        if !Arc::ptr_eq(&self.alg, &other.alg) && self.alg.to_json() != other.alg.to_json() {
            return Err(ActionError::Algebra);
        }
        let d = self.alg.dim();
        let mut out = CochainTensor::zero(self.alg.clone(), self.arity + other.arity);
        for (ka, va) in &self.parts {
            for (kb, vb) in &other.parts {
                let key: Vec<usize> = ka.iter().chain(kb).copied().collect();
                let lb = part_len(d, kb);
                let slot = out.slot_mut(&key);
                for (i, x) in va.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                    for (j, y) in vb.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                        slot[i * lb + j] += x * y;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Arity-one tensors as cochains truncated at `max_degree`.
    pub fn to_cochain(&self, max_degree: usize) -> Result<Cochain, ActionError> {
        if self.arity != 1 {
            return Err(ActionError::Shape(format!("arity {} is not 1", self.arity)));
        }
        let mut c = Cochain::zero(self.alg.clone(), max_degree);
        for (k, v) in &self.parts {
            if v.iter().any(|x| !x.is_zero()) {
                c.set_component(k[0], v.clone())?;
            }
        }
        Ok(c)
    }

    /// The scalar of an arity-zero tensor.
    pub fn scalar(&self) -> Option<Q> {
        (self.arity == 0).then(|| self.parts.get(&Vec::new()).map(|v| v[0].clone()).unwrap_or_default())
    }

    /// Applies `m(c, b)` to every factor's final slot.
    fn map_final_slots(&self, m: &dyn Fn(usize, usize) -> Q) -> CochainTensor {
        let d = self.alg.dim();
        let table: Vec<Vec<(usize, Q)>> = (0..d)
            .map(|b| (0..d).filter_map(|c| {
                let x = m(c, b);
                (!x.is_zero()).then_some((c, x))
            }).collect())
            .collect();
        let mut out = self.clone();
        for (degrees, v) in out.parts.iter_mut() {
            let mut cur = std::mem::take(v);
            for j in 0..degrees.len() {
                let mut next = vec![Q::zero(); cur.len()];
                for (i, x) in cur.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                    let mut idx = split_index(d, degrees, i);
                    let base = idx[j] - idx[j] % d;
                    let b = idx[j] % d;
                    for (c, w) in &table[b] {
                        idx[j] = base + c;
                        next[join_index(d, degrees, &idx)] += w * x;
                    }
                }
                cur = next;
            }
            *v = cur;
        }
        out
    }

    /// `β♯` on every factor.
    pub fn to_dual(&self) -> CochainTensor {
        let alg = self.alg.clone();
        self.map_final_slots(&|c, b| alg.g(c, b).clone())
    }

    /// `(β♯)⁻¹` on every factor.
    pub fn to_primal(&self) -> CochainTensor {
        let alg = self.alg.clone();
        self.map_final_slots(&|c, b| alg.ginv(c, b).clone())
    }

    /// `δ` on factor `j` alone, without a sign.
    pub fn delta_at(&self, j: usize) -> Result<CochainTensor, ActionError> {
        let d = self.alg.dim();
        let mut out = CochainTensor::zero(self.alg.clone(), self.arity);
        for (degrees, v) in &self.parts {
            let n = degrees[j];
            let mut key = degrees.clone();
            key[j] = n + 1;
            let lens: Vec<usize> = degrees.iter().map(|&m| space_len(d, m, Variant::Normalized)).collect();
            let (pre, post): (usize, usize) =
                (lens[..j].iter().product(), lens[j + 1..].iter().product());
            let lj = lens[j];
            let new_lj = space_len(d, n + 1, Variant::Normalized);
            let slot = out.slot_mut(&key);
            for a in 0..pre {
                for c in 0..post {
                    let column: Vec<Q> = (0..lj).map(|x| v[(a * lj + x) * post + c].clone()).collect();
                    if column.iter().all(Q::is_zero) {
                        continue;
                    }
                    let f = Cochain::homogeneous(self.alg.clone(), n + 1, Variant::Normalized, n, column)?;
                    let df = f.delta()?;
                    if let Some(dv) = df.component(n + 1) {
                        for (x, y) in dv.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                            slot[(a * new_lj + x) * post + c] += y;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// The tensor differential `Σ_j (−1)^{m_1+⋯+m_{j−1}} (id ⊗ δ ⊗ id)` at factor `j`.
    pub fn delta(&self) -> Result<CochainTensor, ActionError> {
        let mut out = CochainTensor::zero(self.alg.clone(), self.arity);
        for j in 0..self.arity {
            let dj = self.delta_at(j)?;
            for (degrees, v) in &dj.parts {
                let before: usize = degrees[..j].iter().sum();
                let s = if before % 2 == 0 { Q::one() } else { -Q::one() };
                let slot = out.slot_mut(degrees);
                for (x, y) in slot.iter_mut().zip(v) {
                    if !y.is_zero() {
                        *x += &s * y;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Factor `j` of the result is factor `sigma[j] − 1` of `self`, with the Koszul sign.
    pub fn permute(&self, sigma: &[usize]) -> CochainTensor {
        assert_eq!(sigma.len(), self.arity);
        let d = self.alg.dim();
        let mut out = CochainTensor::zero(self.alg.clone(), self.arity);
        for (degrees, v) in &self.parts {
            let key: Vec<usize> = sigma.iter().map(|&s| degrees[s - 1]).collect();
            let mut inv = 0;
            for x in 0..sigma.len() {
                for y in x + 1..sigma.len() {
                    if sigma[x] > sigma[y] {
                        inv += degrees[sigma[x] - 1] * degrees[sigma[y] - 1];
                    }
                }
            }
            let s = if inv % 2 == 0 { Q::one() } else { -Q::one() };
            let slot = out.slot_mut(&key);
            let mut updates = Vec::new();
            for (i, x) in v.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                let idx = split_index(d, degrees, i);
                let new_idx: Vec<usize> = sigma.iter().map(|&s| idx[s - 1]).collect();
                updates.push((join_index(d, &key, &new_idx), &s * x));
            }
            for (k, x) in updates {
                slot[k] += x;
            }
        }
        out
    }
}

/// Cluster-level contraction table of one diagram: for every choice of basis
/// functional on each cluster's slot, the weighted output final indices.
struct Contraction {
    /// Global cluster order: circle-major, mark cluster first on each circle.
    offsets: Vec<usize>,
    n_clusters: usize,
    table: HashMap<Vec<usize>, Vec<(Vec<usize>, Q)>>,
}

thread_local! {
    static CONTRACTIONS: RefCell<HashMap<(String, ChordDiagram), std::rc::Rc<Contraction>>> =
        RefCell::new(HashMap::new());
}

fn product_coords(alg: &FrobeniusAlgebra, word: &[usize]) -> Vec<(usize, Q)> {
    let mut acc: Vec<(usize, Q)> = vec![(0, Q::one())];
    for &a in word {
        let mut next: BTreeMap<usize, Q> = BTreeMap::new();
        for (x, cx) in &acc {
            for (y, m) in alg.product(*x, a) {
                *next.entry(*y).or_default() += cx * m;
            }
        }
        acc = next.into_iter().filter(|(_, v)| !v.is_zero()).collect();
    }
    acc
}

fn contraction(alg: &FrobeniusAlgebra, alg_key: &str, d: &ChordDiagram) -> std::rc::Rc<Contraction> {
    let key = (alg_key.to_string(), d.clone());
    if let Some(c) = CONTRACTIONS.with(|m| m.borrow().get(&key).cloned()) {
        return c;
    }
    let dim = alg.dim();
    let mut offsets = Vec::new();
    let mut clusters = Vec::new();
    for c in &d.inputs {
        offsets.push(clusters.len());
        clusters.extend(c.clusters.iter().cloned());
    }
    let chord_tensors: Vec<Vec<(Vec<usize>, Q)>> =
        d.chords.iter().map(|ch| alg.chord_tensor(ch.arity)).collect();
    let mut table: HashMap<Vec<usize>, BTreeMap<Vec<usize>, Q>> = HashMap::new();
    let outs = d.n_outputs();
    for assignment in cartesian(&chord_tensors) {
        let weight: Q = assignment.iter().fold(Q::one(), |acc, (_, w)| acc * w);
        for b in cartesian(&vec![(0..dim).collect::<Vec<_>>(); outs]) {
            let mut factors: Vec<Vec<(usize, Q)>> = Vec::with_capacity(clusters.len());
            for cl in &clusters {
                let word: Vec<usize> = cl
                    .points
                    .iter()
                    .map(|p| match *p {
                        SpecialPoint::InputMark => 0,
                        SpecialPoint::OutputMark { id, .. } => b[id - 1],
                        SpecialPoint::ChordLeaf { chord, index, .. } => assignment[chord].0[index],
                    })
                    .collect();
                factors.push(product_coords(alg, &word));
            }
            if factors.iter().any(Vec::is_empty) {
                continue;
            }
            for pick in cartesian(&factors) {
                let e: Vec<usize> = pick.iter().map(|(x, _)| *x).collect();
                let w = pick.iter().fold(weight.clone(), |acc, (_, c)| acc * c);
                *table.entry(e).or_default().entry(b.clone()).or_default() += w;
            }
        }
    }
    let table = table
        .into_iter()
        .map(|(e, m)| (e, m.into_iter().filter(|(_, v)| !v.is_zero()).collect::<Vec<_>>()))
        .filter(|(_, v)| !v.is_empty())
        .collect();
    let c = std::rc::Rc::new(Contraction { offsets, n_clusters: clusters.len(), table });
    CONTRACTIONS.with(|m| m.borrow_mut().insert(key, c.clone()));
    c
}

/// Cartesian product of lists; one empty tuple for zero lists.
fn cartesian<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for l in lists {
        out = out
            .into_iter()
            .flat_map(|pre| {
                l.iter().map(move |x| {
                    let mut v = pre.clone();
                    v.push(x.clone());
                    v
                })
            })
            .collect();
    }
    out
}

fn alg_key(alg: &FrobeniusAlgebra) -> String {
    crate::json::canonical_string(&alg.to_json())
}

/// `α(S)(input)`: the action of a diagram sum on a tensor of normalized cochains.
pub fn act(s: &DiagramSum, input: &CochainTensor) -> Result<CochainTensor, ActionError> {
    if input.arity != s.n_inputs() {
        return Err(ActionError::Shape(format!(
            "diagram takes {} inputs, got a tensor of arity {}",
            s.n_inputs(),
            input.arity
        )));
    }
    let alg = input.alg.clone();
    let key = alg_key(&alg);
    let dim = alg.dim();
    let dual = input.to_dual();
    let mut out = CochainTensor::zero(alg.clone(), s.n_outputs());
    for (diagram, coef) in s.terms() {
        let w = contraction(&alg, &key, diagram);
        for (degrees, v) in &dual.parts {
            let plans = placements(diagram, degrees);
            if plans.is_empty() {
                continue;
            }
            let entries: Vec<(Vec<(Vec<usize>, usize)>, &Q)> = v
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| {
                    let idx = split_index(dim, degrees, i);
                    let f = degrees
                        .iter()
                        .zip(idx)
                        .map(|(&n, k)| decode(dim, Variant::Normalized, n, k))
                        .collect();
                    (f, x)
                })
                .collect();
            for plan in &plans {
                let out_degrees: Vec<usize> = plan.reads.iter().map(Vec::len).collect();
                let sign = Q::from_int(plan.sign) * coef;
                let mut e = vec![0usize; w.n_clusters];
                let mut updates: Vec<(usize, Q)> = Vec::new();
                for (factors, x) in &entries {
                    for (i, (args, c)) in factors.iter().enumerate() {
                        let o = w.offsets[i];
                        e[o] = *c;
                        for (b, &p) in plan.slots[i].iter().enumerate() {
                            e[o + b + 1] = args[p - 1];
                        }
                    }
                    let Some(hits) = w.table.get(&e) else { continue };
                    let out_args: Vec<Vec<usize>> = plan
                        .reads
                        .iter()
                        .map(|r| r.iter().map(|&(i, p)| factors[i].0[p - 1]).collect())
                        .collect();
                    let base = &sign * *x;
                    for (bs, weight) in hits {
                        let idx: Vec<usize> = out_args
                            .iter()
                            .zip(bs)
                            .map(|(a, &b)| encode(dim, Variant::Normalized, a, b))
                            .collect();
                        updates.push((join_index(dim, &out_degrees, &idx), &base * weight));
                    }
                }
                let slot = out.slot_mut(&out_degrees);
                for (k, x) in updates {
                    slot[k] += x;
                }
            }
        }
    }
    Ok(out.to_primal())
}

/// `α(S)(f_1, …, f_k)` for homogeneous or mixed normalized cochains.
pub fn act_on(s: &DiagramSum, fs: &[Cochain]) -> Result<CochainTensor, ActionError> {
    if fs.len() != s.n_inputs() {
        return Err(ActionError::Shape(format!(
            "diagram takes {} inputs, got {}",
            s.n_inputs(),
            fs.len()
        )));
    }
    match fs.first() {
        Some(_) => act(s, &CochainTensor::from_cochains(fs)?),
        None => Err(ActionError::Shape("diagrams without inputs do not act".into())),
    }
}

/// `D(α(S))(x) = α(S)(δx) − (−1)^{|S|} δ(α(S)(x))`.
pub fn d_of_action(s: &DiagramSum, input: &CochainTensor) -> Result<CochainTensor, ActionError> {
    let dim_s = s.dimension().unwrap_or(0);
    let a = act(s, &input.delta()?)?;
    let b = act(s, input)?.delta()?;
    let sign = if dim_s % 2 == 0 { -Q::one() } else { Q::one() };
    let mut out = a;
    out.add_assign_scaled(&b, &sign)?;
    Ok(out)
}

/// Outcome of an exact identity check.
#[derive(Debug, Clone)]
pub struct Check {
    pub holds: bool,
    pub discrepancy: CochainTensor,
}

/// `α(∂S) = D(α(S))` on the given input.
pub fn check_chain_map(s: &DiagramSum, input: &CochainTensor) -> Result<Check, ActionError> {
    let lhs = act(&s.boundary(), input)?;
    let rhs = d_of_action(s, input)?;
    let discrepancy = lhs.sub(&rhs)?;
    Ok(Check { holds: discrepancy.is_zero(), discrepancy })
}

/// `α(S ∘ T) = α(S) ∘ α(T)` on the given input.
pub fn check_composition(
    s: &DiagramSum,
    t: &DiagramSum,
    input: &CochainTensor,
) -> Result<Check, ActionError> {
    let composite = s.compose(t).map_err(|e| ActionError::Shape(e.to_string()))?;
    let lhs = act(&composite, input)?;
    let rhs = act(s, &act(t, input)?)?;
    let discrepancy = lhs.sub(&rhs)?;
    Ok(Check { holds: discrepancy.is_zero(), discrepancy })
}

/// Cohomology of one degree in a fixed representative basis, with the
/// projection that kills coboundaries and a complement of the cocycles.
pub struct CohomologyBasis {
    pub degree: usize,
    pub representatives: Vec<Cochain>,
    projection: RationalMatrix,
}

impl CohomologyBasis {
    pub fn new(alg: &Arc<FrobeniusAlgebra>, degree: usize, max_degree: usize) -> Result<CohomologyBasis, ActionError> {
        let h = hochschild::cohomology(alg, degree, max_degree, Variant::Normalized, Field::Rational)?;
        let d = alg.dim();
        let len = space_len(d, degree, Variant::Normalized);
        let mut cols: Vec<Vec<Q>> = h.representatives.iter().map(|r| r.component(degree).unwrap().to_vec()).collect();
        if degree > 0 {
            let b = hochschild::delta_matrix(alg, degree - 1, Variant::Normalized)?;
            for j in 0..b.cols() {
                cols.push(b.column(j));
            }
        }
        let mut basis: Vec<Vec<Q>> = Vec::new();
        let mut rank = 0;
        let candidates = cols.into_iter().chain((0..len).map(|i| {
            let mut v = vec![Q::zero(); len];
            v[i] = Q::one();
            v
        }));
        for v in candidates {
            basis.push(v);
            let r = RationalMatrix::from_columns(len, &basis).rank();
            if r > rank {
                rank = r;
            } else {
                basis.pop();
            }
            if rank == len {
                break;
            }
        }
        let m = RationalMatrix::from_columns(len, &basis);
        let mut inv_rows = Vec::new();
        for i in 0..h.dimension {
            // row i of m⁻¹ solves mᵀ y = e_i
            let mut e = vec![Q::zero(); len];
            e[i] = Q::one();
            inv_rows.push(m.transpose().solve(&e).expect("basis matrix is invertible"));
        }
        let projection = if inv_rows.is_empty() {
            RationalMatrix::zeros(0, len)
        } else {
            RationalMatrix::from_rows(inv_rows)
        };
        Ok(CohomologyBasis { degree, representatives: h.representatives, projection })
    }

    pub fn dimension(&self) -> usize {
        self.representatives.len()
    }

    /// Class coordinates of a cocycle.
    pub fn project(&self, v: &[Q]) -> Vec<Q> {
        self.projection.mul_vec(v)
    }
}

/// The induced map between tensor products of cohomology groups.
#[derive(Debug, Clone)]
pub struct InducedMap {
    pub input_profile: Vec<usize>,
    /// Output degree profiles, in the row-block order of `matrix`.
    pub output_profiles: Vec<Vec<usize>>,
    pub matrix: RationalMatrix,
}

/// Cached cohomology bases of one algebra.
pub struct CohomologyCache {
    alg: Arc<FrobeniusAlgebra>,
    max_degree: usize,
    bases: RefCell<BTreeMap<usize, Arc<CohomologyBasis>>>,
}

impl CohomologyCache {
    pub fn new(alg: Arc<FrobeniusAlgebra>, max_degree: usize) -> CohomologyCache {
        CohomologyCache { alg, max_degree, bases: RefCell::new(BTreeMap::new()) }
    }

    pub fn algebra(&self) -> &Arc<FrobeniusAlgebra> {
        &self.alg
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn basis(&self, degree: usize) -> Result<Arc<CohomologyBasis>, ActionError> {
        if let Some(b) = self.bases.borrow().get(&degree) {
            return Ok(b.clone());
        }
        let b = Arc::new(CohomologyBasis::new(&self.alg, degree, self.max_degree)?);
        self.bases.borrow_mut().insert(degree, b.clone());
        Ok(b)
    }

    /// Tensor of representatives, one index per factor.
    pub fn representative_tensor(&self, profile: &[usize], pick: &[usize]) -> Result<CochainTensor, ActionError> {
        let mut out = CochainTensor::unit(self.alg.clone());
        for (&n, &k) in profile.iter().zip(pick) {
            let r = self.basis(n)?.representatives[k].clone();
            out = out.tensor(&CochainTensor::from_cochains(&[r])?)?;
        }
        Ok(out)
    }

    /// Coordinates of a cocycle tensor in the product basis, grouped by profile.
    pub fn classes(&self, t: &CochainTensor) -> Result<BTreeMap<Vec<usize>, Vec<Q>>, ActionError> {
        let d = self.alg.dim();
        let mut out = BTreeMap::new();
        for profile in t.profiles() {
            let v = t.part(&profile).unwrap();
            let bases: Vec<Arc<CohomologyBasis>> =
                profile.iter().map(|&n| self.basis(n)).collect::<Result<_, _>>()?;
            // contract one factor at a time
            let mut cur = v.to_vec();
            let mut dims: Vec<usize> = profile.iter().map(|&n| space_len(d, n, Variant::Normalized)).collect();
            for j in 0..profile.len() {
                let pre: usize = dims[..j].iter().product();
                let post: usize = dims[j + 1..].iter().product();
                let h = bases[j].dimension();
                let mut next = vec![Q::zero(); pre * h * post];
                for a in 0..pre {
                    for c in 0..post {
                        let col: Vec<Q> = (0..dims[j]).map(|x| cur[(a * dims[j] + x) * post + c].clone()).collect();
                        if col.iter().all(Q::is_zero) {
                            continue;
                        }
                        for (y, val) in bases[j].project(&col).into_iter().enumerate() {
                            next[(a * h + y) * post + c] = val;
                        }
                    }
                }
                cur = next;
                dims[j] = h;
            }
            out.insert(profile, cur);
        }
        Ok(out)
    }

    /// Output profiles of total degree `total` over `arity` factors with all degrees ≤ N−1.
    fn profiles_of(&self, arity: usize, total: usize) -> Vec<Vec<usize>> {
        let top = self.max_degree.saturating_sub(1);
        cartesian(&vec![(0..=top.min(total)).collect::<Vec<_>>(); arity])
            .into_iter()
            .filter(|p| p.iter().sum::<usize>() == total)
            .collect()
    }

    /// Matrix of `H(α(S))` from the input profile, checking cocycles map to
    /// cocycles and coboundaries to coboundaries.
    pub fn act_on_cohomology(&self, s: &DiagramSum, input_profile: &[usize]) -> Result<InducedMap, ActionError> {
        let k = s.n_inputs();
        if input_profile.len() != k {
            return Err(ActionError::Shape(format!("profile {input_profile:?} for {k} inputs")));
        }
        let dim_s = s.dimension().unwrap_or(0);
        let total: usize = input_profile.iter().sum();
        let output_profiles = match total.checked_sub(dim_s) {
            Some(t) => self.profiles_of(s.n_outputs(), t),
            None => Vec::new(),
        };
        let in_dims: Vec<usize> =
            input_profile.iter().map(|&n| self.basis(n).map(|b| b.dimension())).collect::<Result<_, _>>()?;
        let block_dims: Vec<usize> = output_profiles
            .iter()
            .map(|p| p.iter().map(|&n| self.basis(n).map(|b| b.dimension())).product::<Result<usize, _>>())
            .collect::<Result<_, _>>()?;
        let rows: usize = block_dims.iter().sum();
        let cols: usize = in_dims.iter().product();
        let mut matrix = RationalMatrix::zeros(rows, cols);
        let picks = cartesian(&in_dims.iter().map(|&h| (0..h).collect::<Vec<_>>()).collect::<Vec<_>>());
        for (col, pick) in picks.iter().enumerate() {
            let x = self.representative_tensor(input_profile, pick)?;
            let y = act(s, &x)?;
            if !y.delta()?.is_zero() {
                return Err(ActionError::NotWellDefined(format!(
                    "image of the class {pick:?} in degrees {input_profile:?} is not a cocycle"
                )));
            }
            let classes = self.classes(&y)?;
            for (profile, coords) in &classes {
                let Some(b) = output_profiles.iter().position(|p| p == profile) else {
                    if coords.iter().any(|c| !c.is_zero()) {
                        return Err(ActionError::NotWellDefined(format!(
                            "image has a class in degrees {profile:?} beyond the truncation"
                        )));
                    }
                    continue;
                };
                let offset: usize = block_dims[..b].iter().sum();
                for (r, c) in coords.iter().enumerate() {
                    matrix.set(offset + r, col, c.clone());
                }
            }
        }
        self.check_coboundaries(s, input_profile)?;
        Ok(InducedMap { input_profile: input_profile.to_vec(), output_profiles, matrix })
    }

    /// Replaces each factor in turn by every basis coboundary and checks the image is exact.
    fn check_coboundaries(&self, s: &DiagramSum, profile: &[usize]) -> Result<(), ActionError> {
        for (j, &n) in profile.iter().enumerate().filter(|(_, &n)| n > 0) {
            let b = hochschild::delta_matrix(&self.alg, n - 1, Variant::Normalized)?;
            let (_, pivots) = b.rref();
            let others: Vec<Vec<Cochain>> = profile
                .iter()
                .enumerate()
                .map(|(i, &m)| if i == j { Ok(vec![]) } else { self.basis(m).map(|b| b.representatives.clone()) })
                .collect::<Result<_, _>>()?;
            let mut lists = others;
            lists[j] = pivots
                .iter()
                .map(|&col| Cochain::homogeneous(self.alg.clone(), self.max_degree, Variant::Normalized, n, b.column(col)))
                .collect::<Result<_, _>>()?;
            for tuple in cartesian(&lists) {
                let y = act(s, &CochainTensor::from_cochains(&tuple)?)?;
                let exact = y.delta()?.is_zero() && self.classes(&y)?.values().flatten().all(Q::is_zero);
                if !exact {
                    return Err(ActionError::NotWellDefined(format!(
                        "a coboundary in factor {} of degrees {profile:?} maps to a nontrivial class",
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }
}
