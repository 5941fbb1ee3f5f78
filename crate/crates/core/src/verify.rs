//! The identity suite: PROP axioms, generator relations, the action checks,
//! cohomology tables and the BV and Sullivan relations on HH*, collected into
//! one deterministic pass/fail report.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::action::{act, check_chain_map, check_composition, ActionError, CochainTensor, CohomologyCache};
use crate::diagram::{generator, ChordDiagram, Mode, SpecialPoint};
use crate::frobenius::{mat2, FrobeniusAlgebra};
use crate::hochschild::{self, algebra_from_json, Cochain, Variant};
use crate::json::InputError;
use crate::linalg::Field;
use crate::prop::{identity, permutation, DiagramSum};
use crate::rational::Q;

pub const DEFAULT_SEED: u64 = 0x5c40_2d00;

/// Check groups, in report order.
pub const GROUPS: [&str; 7] = ["prop-axioms", "generators", "action", "cohomology", "bv", "sullivan", "negative-control"];

const CYCLIC_POOL: [&str; 7] = ["cup", "star", "vee0", "vee", "delta", "id", "tau2"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Samples {
    pub composites: usize,
    pub pairs: usize,
    pub triples: usize,
    pub cochains: usize,
    pub slides: usize,
}

impl Default for Samples {
    fn default() -> Samples {
        Samples { composites: 200, pairs: 100, triples: 50, cochains: 50, slides: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Builtin names or inline algebra objects.
    pub algebras: Vec<Value>,
    pub max_degree: usize,
    pub samples: Samples,
    pub seed: u64,
    pub mode: Mode,
    /// Groups or check names to run; empty runs everything.
    pub checks: Vec<String>,
}

impl Default for SuiteConfig {
    fn default() -> SuiteConfig {
        SuiteConfig {
            algebras: vec![json!("dual_numbers")],
            max_degree: hochschild::DEFAULT_MAX_DEGREE,
            samples: Samples::default(),
            seed: DEFAULT_SEED,
            mode: Mode::Sullivan,
            checks: Vec::new(),
        }
    }
}

impl SuiteConfig {
    pub fn from_json(v: &Value) -> Result<SuiteConfig, InputError> {
        let cfg: SuiteConfig = serde_json::from_value(v.clone()).map_err(|e| InputError::new("$", e.to_string()))?;
        cfg.algebras()?;
        Ok(cfg)
    }

    /// Resolves the algebras and checks the selection names.
    pub fn algebras(&self) -> Result<Vec<Arc<FrobeniusAlgebra>>, InputError> {
        if self.max_degree < 2 {
            return Err(InputError::new("$.max_degree", "must be at least 2"));
        }
        for (i, c) in self.checks.iter().enumerate() {
            let group = c.split('.').next().unwrap_or("");
            if !GROUPS.contains(&group) {
                return Err(InputError::new(format!("$.checks[{i}]"), format!("unknown check {c:?}")));
            }
        }
        self.algebras
            .iter()
            .enumerate()
            .map(|(i, v)| algebra_from_json(v, &format!("$.algebras[{i}]")).map(Arc::new))
            .collect()
    }

    fn selects(&self, check: &str) -> bool {
        self.checks.is_empty()
            || self.checks.iter().any(|c| {
                check == c || check.starts_with(&format!("{c}.")) || check.starts_with(&format!("{c}["))
            })
    }

    fn selects_group(&self, group: &str) -> bool {
        self.checks.is_empty() || self.checks.iter().any(|c| c.split('.').next() == Some(group))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub check: String,
    pub status: Status,
    /// A replayable counterexample; null on success.
    pub witness: Value,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SuiteReport {
    pub entries: Vec<CheckEntry>,
}

impl SuiteReport {
    pub fn is_ok(&self) -> bool {
        self.entries.iter().all(|e| e.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| e.status == Status::Fail)
    }

    pub fn entry(&self, check: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.check == check)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(&self.entries).expect("report serializes")
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            match e.status {
                Status::Pass => writeln!(f, "pass  {}", e.check)?,
                Status::Fail => writeln!(f, "FAIL  {}  witness: {}", e.check, e.witness)?,
            }
        }
        let bad = self.failures().count();
        write!(f, "{} checks, {} failed", self.entries.len(), bad)
    }
}

type Outcome = Result<(), Value>;

/// A sum with a readable expression for it.
pub type Labelled = (String, DiagramSum);

fn entry(check: String, outcome: Outcome) -> CheckEntry {
    match outcome {
        Ok(()) => CheckEntry { check, status: Status::Pass, witness: Value::Null },
        Err(witness) => CheckEntry { check, status: Status::Fail, witness },
    }
}

fn action_err(e: ActionError) -> Value {
    json!({ "error": e.to_string() })
}

/// Runs every selected check. Jobs run on scoped threads and are reported in
/// a fixed order, so the report depends only on the configuration.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport, InputError> {
    let algebras = cfg.algebras()?;
    type Job<'a> = Box<dyn FnOnce() -> Vec<CheckEntry> + Send + 'a>;
    let mut jobs: Vec<Job> = Vec::new();
    if cfg.selects_group("prop-axioms") {
        jobs.push(Box::new(|| prop_axioms(cfg)));
    }
    if cfg.selects_group("generators") {
        jobs.push(Box::new(|| generator_identities(cfg)));
    }
    for alg in &algebras {
        if cfg.selects_group("action") {
            jobs.push(Box::new(move || action_checks(cfg, alg)));
        }
        if cfg.selects_group("cohomology") {
            jobs.push(Box::new(move || cohomology_checks(cfg, alg)));
        }
        if cfg.selects_group("bv") {
            jobs.push(Box::new(move || bv_checks(cfg, alg)));
        }
        if cfg.mode == Mode::Sullivan && cfg.selects_group("sullivan") {
            jobs.push(Box::new(move || sullivan_checks(cfg, alg)));
        }
    }
    if cfg.selects_group("negative-control") {
        jobs.push(Box::new(|| negative_control(cfg)));
    }
    let results: Vec<Vec<CheckEntry>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs.into_iter().map(|j| scope.spawn(j)).collect();
        handles.into_iter().map(|h| h.join().expect("check job panicked")).collect()
    });
    let entries = results.into_iter().flatten().filter(|e| cfg.selects(&e.check)).collect();
    Ok(SuiteReport { entries })
}

/// A generator stream that depends only on the seed and the job name.
pub fn job_rng(seed: u64, name: &str) -> ChaCha8Rng {
    let h = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

pub fn catalog(name: &str) -> DiagramSum {
    DiagramSum::from_diagram(&generator(name).expect("shipped generator"))
}

fn in_mode(s: DiagramSum, mode: Mode) -> DiagramSum {
    match mode {
        Mode::Cyclic => s,
        Mode::Sullivan => s.to_sullivan(),
    }
}

/// The generators composites are built from; sullivan mode adds `reverse`.
pub fn generator_pool(mode: Mode) -> Vec<(String, DiagramSum)> {
    let mut pool: Vec<(String, DiagramSum)> =
        CYCLIC_POOL.iter().map(|n| (n.to_string(), in_mode(catalog(n), mode))).collect();
    if mode == Mode::Sullivan {
        pool.push(("reverse".into(), catalog("reverse")));
    }
    pool
}

/// A random generator placed among identities so that it takes `m` inputs.
fn layer(rng: &mut ChaCha8Rng, m: usize, pool: &[(String, DiagramSum)], mode: Mode) -> Option<(String, DiagramSum)> {
    let fits: Vec<&(String, DiagramSum)> = pool.iter().filter(|(_, s)| s.n_inputs() <= m).collect();
    let (name, h) = *fits.choose(rng)?;
    let before = rng.gen_range(0..=m - h.n_inputs());
    let after = m - h.n_inputs() - before;
    let mut label = Vec::new();
    let mut out: Option<DiagramSum> = None;
    let mut push = |s: DiagramSum, l: String| {
        label.push(l);
        out = Some(match out.take() {
            None => s,
            Some(o) => o.tensor(&s).expect("same mode"),
        });
    };
    if before > 0 {
        push(in_mode(identity(before), mode), format!("id({before})"));
    }
    push(h.clone(), name.clone());
    if after > 0 {
        push(in_mode(identity(after), mode), format!("id({after})"));
    }
    Some((label.join("⊗"), out.unwrap()))
}

/// Post-composes `steps` random layers on `start`.
fn grow(
    rng: &mut ChaCha8Rng,
    start: (String, DiagramSum),
    steps: usize,
    pool: &[(String, DiagramSum)],
    mode: Mode,
) -> (String, DiagramSum) {
    let (mut label, mut cur) = start;
    for _ in 0..steps {
        let Some((l, s)) = layer(rng, cur.n_outputs(), pool, mode) else { break };
        if s.n_outputs() > 3 {
            continue;
        }
        cur = s.compose(&cur).expect("layer fits");
        label = format!("({l})∘{label}");
    }
    (label, cur)
}

/// A nonzero composite of at most three generators with at most three
/// inputs, three outputs and dimension `max_dim`.
pub fn random_composite(rng: &mut ChaCha8Rng, mode: Mode, max_dim: usize) -> (String, DiagramSum) {
    let pool = generator_pool(mode);
    for _ in 0..200 {
        let start = pool.choose(rng).unwrap().clone();
        let steps = rng.gen_range(0..=2);
        let mut c = grow(rng, start, steps, &pool, mode);
        if rng.gen_bool(0.2) && c.1.n_inputs() < 3 {
            let (l, s) = pool.iter().filter(|(_, s)| s.n_inputs() == 1 && s.n_outputs() == 1).collect::<Vec<_>>()
                .choose(rng)
                .copied()
                .unwrap()
                .clone();
            c = (format!("({})⊗{l}", c.0), c.1.tensor(&s).unwrap());
        }
        let (_, s) = &c;
        if !s.is_zero() && s.dimension().unwrap() <= max_dim && s.n_inputs() <= 3 && s.n_outputs() <= 3 {
            return c;
        }
    }
    pool[0].clone()
}

/// A composable pair `(S, T)`, `S` applied after `T`.
pub fn random_pair(rng: &mut ChaCha8Rng, mode: Mode) -> (Labelled, Labelled) {
    let pool = generator_pool(mode);
    let t = random_composite(rng, mode, 2);
    let m = t.1.n_outputs();
    let steps = rng.gen_range(1..=2);
    let s = grow(rng, (format!("id({m})"), in_mode(identity(m), mode)), steps, &pool, mode);
    (s, t)
}

/// A composable triple `(R, S, T)`.
pub fn random_triple(rng: &mut ChaCha8Rng, mode: Mode) -> (Labelled, Labelled, Labelled) {
    let (s, t) = random_pair(rng, mode);
    let pool = generator_pool(mode);
    let m = s.1.n_outputs();
    let steps = rng.gen_range(1..=2);
    let r = grow(rng, (format!("id({m})"), in_mode(identity(m), mode)), steps, &pool, mode);
    (r, s, t)
}

fn sum_witness(items: &[(&str, &(String, DiagramSum))]) -> Value {
    let mut w = serde_json::Map::new();
    for (k, (label, s)) in items {
        w.insert(k.to_string(), json!({ "expr": label, "sum": s.to_json() }));
    }
    Value::Object(w)
}

/// The first sample violating `law`, as a witness.
fn first_failure<T>(samples: &[T], mut law: impl FnMut(&T) -> Option<Value>) -> Outcome {
    for s in samples {
        if let Some(w) = law(s) {
            return Err(w);
        }
    }
    Ok(())
}

fn sign(k: usize) -> Q {
    if k % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

fn prop_axioms(cfg: &SuiteConfig) -> Vec<CheckEntry> {
    let mode = cfg.mode;
    let mut rng = job_rng(cfg.seed, "prop-axioms");
    let mut composites: Vec<(String, DiagramSum)> =
        crate::diagram::catalog_names().iter().map(|n| (n.to_string(), catalog(n))).collect();
    composites.extend((0..cfg.samples.composites).map(|_| random_composite(&mut rng, mode, 3)));
    let pairs: Vec<_> = (0..cfg.samples.pairs).map(|_| random_pair(&mut rng, mode)).collect();
    let triples: Vec<_> = (0..cfg.samples.triples).map(|_| random_triple(&mut rng, mode)).collect();

    let mut out = Vec::new();
    out.push(entry(
        "prop-axioms.boundary-squared".into(),
        first_failure(&composites, |c| (!c.1.boundary().boundary().is_zero()).then(|| sum_witness(&[("s", c)]))),
    ));
    out.push(entry(
        "prop-axioms.derivation".into(),
        first_failure(&pairs, |(s, t)| {
            let lhs = s.1.compose(&t.1).unwrap().boundary();
            let k = s.1.dimension().unwrap_or(0);
            let rhs = s.1.boundary().compose(&t.1).unwrap()
                .add(&s.1.compose(&t.1.boundary()).unwrap().scale(&sign(k)))
                .unwrap();
            (lhs != rhs).then(|| sum_witness(&[("s", s), ("t", t)]))
        }),
    ));
    out.push(entry(
        "prop-axioms.associativity".into(),
        first_failure(&triples, |(r, s, t)| {
            let l = r.1.compose(&s.1).unwrap().compose(&t.1).unwrap();
            let rr = r.1.compose(&s.1.compose(&t.1).unwrap()).unwrap();
            (l != rr).then(|| sum_witness(&[("r", r), ("s", s), ("t", t)]))
        }),
    ));
    out.push(entry(
        "prop-axioms.identity".into(),
        first_failure(&composites, |c| {
            let s = &c.1;
            let l = in_mode(identity(s.n_outputs()), s.mode()).compose(s).unwrap();
            let r = s.compose(&in_mode(identity(s.n_inputs()), s.mode())).unwrap();
            (&l != s || &r != s).then(|| sum_witness(&[("s", c)]))
        }),
    ));
    let s3: Vec<Vec<usize>> = itertools::Itertools::permutations(1..=3usize, 3).collect();
    let mut perm_pairs = Vec::new();
    for x in &s3 {
        for y in &s3 {
            perm_pairs.push((x.clone(), y.clone()));
        }
    }
    out.push(entry(
        "prop-axioms.permutations".into(),
        first_failure(&perm_pairs, |(x, y)| {
            let xy: Vec<usize> = y.iter().map(|&i| x[i - 1]).collect();
            let p = |v: &[usize]| in_mode(permutation(v), mode);
            (p(x).compose(&p(y)).unwrap() != p(&xy)).then(|| json!({ "sigma": x, "tau": y }))
        }),
    ));
    out
}

/// The relations among the generators, as equalities of sums.
pub fn generator_relations() -> Vec<(&'static str, DiagramSum, DiagramSum)> {
    let (cup, star, vee0, vee, delta, id, tau) =
        (catalog("cup"), catalog("star"), catalog("vee0"), catalog("vee"), catalog("delta"), identity(1), catalog("tau2"));
    let c = |a: &DiagramSum, b: &DiagramSum| a.compose(b).expect("composable");
    let t = |a: &DiagramSum, b: &DiagramSum| a.tensor(b).expect("same mode");
    let frob = c(&vee0, &cup);
    vec![
        ("d-star", star.boundary(), cup.sub(&c(&cup, &tau)).unwrap()),
        ("d-vee", vee.boundary(), vee0.sub(&c(&tau, &vee0)).unwrap()),
        ("cup-assoc", c(&cup, &t(&cup, &id)), c(&cup, &t(&id, &cup))),
        ("vee0-coassoc", c(&t(&id, &vee0), &vee0), c(&t(&vee0, &id), &vee0)),
        ("frobenius-left", frob.clone(), c(&t(&id, &cup), &t(&vee0, &id))),
        ("frobenius-twisted", frob, c(&c(&tau, &t(&cup, &id)), &t(&id, &c(&tau, &vee0)))),
        ("delta-squared", c(&delta, &delta), DiagramSum::zero(1, 1, Mode::Cyclic)),
    ]
}

fn generator_identities(_cfg: &SuiteConfig) -> Vec<CheckEntry> {
    generator_relations()
        .into_iter()
        .map(|(name, l, r)| {
            let w = (l != r).then(|| json!({ "lhs": l.to_json(), "rhs": r.to_json() }));
            entry(format!("generators.{name}"), w.map_or(Ok(()), Err))
        })
        .collect()
}

/// Random normalized cochains of degrees `0..=top`, one per input.
pub fn random_tuple(rng: &mut ChaCha8Rng, alg: &Arc<FrobeniusAlgebra>, k: usize, top: usize, max_degree: usize) -> Vec<Cochain> {
    (0..k)
        .map(|_| {
            let n = rng.gen_range(0..=top);
            Cochain::random(alg.clone(), max_degree, n, 3, rng).expect("degree within bound")
        })
        .collect()
}

fn total_degree(fs: &[Cochain]) -> usize {
    fs.iter().filter_map(Cochain::degree).sum()
}

fn input_witness(alg: &FrobeniusAlgebra, s: &DiagramSum, fs: &[Cochain]) -> Value {
    json!({
        "algebra": hochschild::algebra_json(alg),
        "diagram": s.to_json(),
        "inputs": fs.iter().map(Cochain::to_json).collect::<Vec<_>>(),
    })
}

/// Samples sorted by total degree so the first failure is a small one.
fn sorted_tuples(
    rng: &mut ChaCha8Rng,
    alg: &Arc<FrobeniusAlgebra>,
    k: usize,
    count: usize,
    top: usize,
    max_degree: usize,
) -> Vec<Vec<Cochain>> {
    let mut v: Vec<Vec<Cochain>> = (0..count).map(|_| random_tuple(rng, alg, k, top, max_degree)).collect();
    v.sort_by_key(|fs| total_degree(fs));
    v
}

/// Chord diagrams from random composites in which some mark shares a
/// cluster with a chord leaf and at least one slide applies.
pub fn random_slide_diagrams(rng: &mut ChaCha8Rng, mode: Mode, count: usize) -> Vec<ChordDiagram> {
    let mut out: Vec<ChordDiagram> = Vec::new();
    for _ in 0..count * 200 {
        if out.len() == count {
            break;
        }
        let (_, s) = random_composite(rng, mode, 2);
        for (d, _) in s.terms() {
            let coincident = d.inputs.iter().flat_map(|c| &c.clusters).any(|cl| {
                cl.points.iter().any(|p| matches!(p, SpecialPoint::ChordLeaf { .. }))
                    && cl.points.iter().any(|p| !matches!(p, SpecialPoint::ChordLeaf { .. }))
            });
            if coincident && !d.slide_variants().is_empty() && !out.contains(d) && out.len() < count {
                out.push(d.clone());
            }
        }
    }
    out
}

fn action_checks(cfg: &SuiteConfig, alg: &Arc<FrobeniusAlgebra>) -> Vec<CheckEntry> {
    let name = alg.name().to_string();
    let n_max = cfg.max_degree;
    let top = n_max.saturating_sub(1).min(3);
    let mut rng = job_rng(cfg.seed, &format!("action[{name}]"));
    let pool = generator_pool(Mode::Cyclic);
    let mut out = Vec::new();

    let chain = (|| {
        for (_, s) in &pool {
            for fs in sorted_tuples(&mut rng, alg, s.n_inputs(), cfg.samples.cochains, top, n_max + 1) {
                let x = CochainTensor::from_cochains(&fs).map_err(action_err)?;
                if !check_chain_map(s, &x).map_err(action_err)?.holds {
                    return Err(input_witness(alg, s, &fs));
                }
            }
        }
        Ok(())
    })();
    out.push(entry(format!("action.chain-map[{name}]"), chain));

    let composition = (|| {
        let per_pair = (cfg.samples.cochains / 10).max(1);
        for (_, s) in &pool {
            for (_, t) in &pool {
                if s.n_inputs() != t.n_outputs() {
                    continue;
                }
                for fs in sorted_tuples(&mut rng, alg, t.n_inputs(), per_pair, top.min(2), n_max + 1) {
                    let x = CochainTensor::from_cochains(&fs).map_err(action_err)?;
                    if !check_composition(s, t, &x).map_err(action_err)?.holds {
                        let mut w = input_witness(alg, t, &fs);
                        w["outer"] = s.to_json();
                        return Err(w);
                    }
                }
            }
        }
        Ok(())
    })();
    out.push(entry(format!("action.composition[{name}]"), composition));

    let slides = (|| {
        for d in random_slide_diagrams(&mut rng, Mode::Cyclic, cfg.samples.slides) {
            let raw = DiagramSum::from_diagram_raw(&d);
            for fs in sorted_tuples(&mut rng, alg, d.n_inputs(), 2, top.min(2), n_max + 1) {
                let x = CochainTensor::from_cochains(&fs).map_err(action_err)?;
                let base = act(&raw, &x).map_err(action_err)?;
                for v in d.slide_variants() {
                    if act(&DiagramSum::from_diagram_raw(&v), &x).map_err(action_err)? != base {
                        let mut w = input_witness(alg, &raw, &fs);
                        w["variant"] = DiagramSum::from_diagram_raw(&v).to_json();
                        return Err(w);
                    }
                }
            }
        }
        Ok(())
    })();
    out.push(entry(format!("action.slides[{name}]"), slides));

    let degree_law = (|| {
        for (_, s) in &pool {
            for fs in sorted_tuples(&mut rng, alg, s.n_inputs(), 5, top, n_max + 1) {
                let y = act(s, &CochainTensor::from_cochains(&fs).map_err(action_err)?).map_err(action_err)?;
                let want = total_degree(&fs).checked_sub(s.dimension().unwrap_or(0));
                if y.total_degrees().into_iter().any(|d| Some(d) != want) {
                    return Err(input_witness(alg, s, &fs));
                }
            }
        }
        Ok(())
    })();
    out.push(entry(format!("action.degree-law[{name}]"), degree_law));

    // outputs lie in the normalized subcomplex, which the full δ preserves
    let normalization = (|| {
        for (_, s) in pool.iter().filter(|(_, s)| s.n_outputs() == 1) {
            for fs in sorted_tuples(&mut rng, alg, s.n_inputs(), 3, top, n_max + 1) {
                let y = act(s, &CochainTensor::from_cochains(&fs).map_err(action_err)?).map_err(action_err)?;
                let c = y.to_cochain(2 * n_max + 2).map_err(action_err)?;
                let lhs = c.to_full().delta().map_err(|e| action_err(e.into()))?;
                let rhs = c.delta().map_err(|e| action_err(e.into()))?.to_full();
                if lhs != rhs {
                    return Err(input_witness(alg, s, &fs));
                }
            }
        }
        Ok(())
    })();
    out.push(entry(format!("action.normalization[{name}]"), normalization));
    out
}

/// Closed-form Hochschild dimensions over ℚ for the builtin families.
pub fn expected_hh(alg: &FrobeniusAlgebra, n: usize) -> Option<usize> {
    let name = alg.name();
    if name == "mat2" {
        return Some(usize::from(n == 0));
    }
    if name == "group_c2" {
        return Some(if n == 0 { 2 } else { 0 });
    }
    let k = if name == "dual_numbers" {
        2
    } else {
        name.strip_prefix("trunc_poly(")?.strip_suffix(')')?.parse().ok()?
    };
    Some(if n == 0 { k } else { k - 1 })
}

fn cohomology_checks(cfg: &SuiteConfig, alg: &Arc<FrobeniusAlgebra>) -> Vec<CheckEntry> {
    let name = alg.name().to_string();
    let n_max = cfg.max_degree;
    let dims = |variant| -> Result<Vec<usize>, Value> {
        (0..n_max)
            .map(|n| {
                hochschild::cohomology(alg, n, n_max, variant, Field::Rational)
                    .map(|h| h.dimension)
                    .map_err(|e| json!({ "error": e.to_string() }))
            })
            .collect()
    };
    let mut out = Vec::new();
    let normalized = dims(Variant::Normalized);
    if (0..n_max).all(|n| expected_hh(alg, n).is_some()) {
        let want: Vec<usize> = (0..n_max).map(|n| expected_hh(alg, n).unwrap()).collect();
        let outcome = match &normalized {
            Ok(got) if *got == want => Ok(()),
            Ok(got) => Err(json!({ "algebra": name, "expected": want, "computed": got })),
            Err(e) => Err(e.clone()),
        };
        out.push(entry(format!("cohomology.table[{name}]"), outcome));
    }
    let outcome = match (normalized, dims(Variant::Full)) {
        (Ok(a), Ok(b)) if a == b => Ok(()),
        (Ok(a), Ok(b)) => Err(json!({ "algebra": name, "normalized": a, "full": b })),
        (Err(e), _) | (_, Err(e)) => Err(e),
    };
    out.push(entry(format!("cohomology.variants[{name}]"), outcome));
    out
}

/// Degree profiles of `k` factors, each at most `top`, with total in `range`.
fn profiles(k: usize, top: usize, range: std::ops::RangeInclusive<usize>) -> Vec<Vec<usize>> {
    itertools::Itertools::multi_cartesian_product((0..k).map(|_| 0..=top))
        .filter(|p: &Vec<usize>| range.contains(&p.iter().sum()))
        .collect()
}

/// The BV relation term by term, with the sign of each right-hand term. The
/// Koszul signs of the classical relation come from the PROP itself.
pub fn bv_terms() -> (DiagramSum, Vec<(Q, DiagramSum)>) {
    let (cup, tau, delta, id) = (catalog("cup"), catalog("tau2"), catalog("delta"), identity(1));
    let c = |a: &DiagramSum, b: &DiagramSum| a.compose(b).expect("composable");
    let t = |a: &DiagramSum, b: &DiagramSum| a.tensor(b).expect("same mode");
    let cc = c(&cup, &t(&cup, &id));
    let dc = c(&delta, &cup);
    let (p, m) = (Q::one(), -Q::one());
    let rhs = vec![
        (p.clone(), c(&cup, &t(&dc, &id))),
        (p.clone(), c(&cup, &t(&id, &dc))),
        (p, c(&c(&cup, &t(&dc, &id)), &t(&id, &tau))),
        (m.clone(), c(&cc, &t(&t(&delta, &id), &id))),
        (m.clone(), c(&cc, &t(&t(&id, &delta), &id))),
        (m, c(&cc, &t(&t(&id, &id), &delta))),
    ];
    (c(&delta, &cc), rhs)
}

/// The seven terms of the dual relation, each expected to vanish on HH*.
pub fn cobv_terms() -> Vec<DiagramSum> {
    let (vee0, tau, delta, id) = (catalog("vee0"), catalog("tau2"), catalog("delta"), identity(1));
    let c = |a: &DiagramSum, b: &DiagramSum| a.compose(b).expect("composable");
    let t = |a: &DiagramSum, b: &DiagramSum| a.tensor(b).expect("same mode");
    let vv = c(&t(&vee0, &id), &vee0);
    let vd = c(&vee0, &delta);
    vec![
        c(&vv, &delta),
        c(&t(&vd, &id), &vee0),
        c(&t(&id, &vd), &vee0),
        c(&c(&t(&id, &tau), &t(&vd, &id)), &vee0),
        c(&t(&t(&delta, &id), &id), &vv),
        c(&t(&t(&id, &delta), &id), &vv),
        c(&t(&t(&id, &id), &delta), &vv),
    ]
}

fn induced_equal(cache: &CohomologyCache, l: &DiagramSum, r: &DiagramSum, profile: &[usize]) -> Result<bool, Value> {
    let a = cache.act_on_cohomology(l, profile).map_err(action_err)?;
    let b = cache.act_on_cohomology(r, profile).map_err(action_err)?;
    Ok(a.matrix == b.matrix)
}

fn bv_checks(cfg: &SuiteConfig, alg: &Arc<FrobeniusAlgebra>) -> Vec<CheckEntry> {
    let name = alg.name().to_string();
    let n_max = cfg.max_degree;
    let top = n_max - 1;
    let cache = CohomologyCache::new(alg.clone(), n_max);
    let (cup, tau, delta, id) = (catalog("cup"), catalog("tau2"), catalog("delta"), identity(1));
    let mut out = Vec::new();
    let pw = |p: &[usize]| json!({ "algebra": name, "profile": p });

    let assoc = (|| {
        let l = cup.compose(&cup.tensor(&id).unwrap()).unwrap();
        let r = cup.compose(&id.tensor(&cup).unwrap()).unwrap();
        for p in profiles(3, top, 0..=top) {
            if !induced_equal(&cache, &l, &r, &p)? {
                return Err(pw(&p));
            }
        }
        Ok(())
    })();
    out.push(entry(format!("bv.cup-assoc[{name}]"), assoc));

    let comm = (|| {
        let swapped = cup.compose(&tau).unwrap();
        for p in profiles(2, top, 0..=top) {
            if !induced_equal(&cache, &cup, &swapped, &p)? {
                return Err(pw(&p));
            }
        }
        Ok(())
    })();
    out.push(entry(format!("bv.cup-commutative[{name}]"), comm));

    let dd = (|| {
        for n in 2..=top {
            let hi = cache.act_on_cohomology(&delta, &[n]).map_err(action_err)?;
            let lo = cache.act_on_cohomology(&delta, &[n - 1]).map_err(action_err)?;
            if !lo.matrix.mul(&hi.matrix).is_zero() {
                return Err(pw(&[n]));
            }
        }
        Ok(())
    })();
    out.push(entry(format!("bv.delta-squared[{name}]"), dd));

    let seven = (|| {
        let (lhs, rhs) = bv_terms();
        for p in profiles(3, top, 1..=n_max) {
            let want = cache.act_on_cohomology(&lhs, &p).map_err(action_err)?.matrix;
            let mut got = crate::linalg::RationalMatrix::zeros(want.rows(), want.cols());
            for (c, s) in &rhs {
                let m = cache.act_on_cohomology(s, &p).map_err(action_err)?.matrix;
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        got.add_at(i, j, &(c * m.get(i, j)));
                    }
                }
            }
            if got != want {
                return Err(pw(&p));
            }
        }
        Ok(())
    })();
    out.push(entry(format!("bv.seven-term[{name}]"), seven));

    let cobv = (|| {
        for (k, s) in cobv_terms().iter().enumerate() {
            for n in 0..=top {
                if !cache.act_on_cohomology(s, &[n]).map_err(action_err)?.matrix.is_zero() {
                    return Err(json!({ "algebra": name, "term": k, "degree": n, "diagram": s.to_json() }));
                }
            }
        }
        Ok(())
    })();
    out.push(entry(format!("bv.cobv-zero[{name}]"), cobv));
    out
}

fn sullivan_checks(cfg: &SuiteConfig, alg: &Arc<FrobeniusAlgebra>) -> Vec<CheckEntry> {
    let name = alg.name().to_string();
    let n_max = cfg.max_degree;
    let top = n_max.saturating_sub(1).min(3);
    let mut rng = job_rng(cfg.seed, &format!("sullivan[{name}]"));
    let rev = catalog("reverse");
    let s = |n: &str| catalog(n).to_sullivan();
    let (delta, cup, tau, vee0) = (s("delta"), s("cup"), s("tau2"), s("vee0"));
    let rr = rev.tensor(&rev).unwrap();
    let singles = sorted_tuples(&mut rng, alg, 1, cfg.samples.cochains, top, n_max + 1);
    let tensor = |fs: &[Cochain]| CochainTensor::from_cochains(fs).map_err(action_err);
    let mut out = Vec::new();

    let chain = (|| {
        for fs in &singles {
            if !check_chain_map(&rev, &tensor(fs)?).map_err(action_err)?.holds {
                return Err(input_witness(alg, &rev, fs));
            }
        }
        Ok(())
    })();
    out.push(entry(format!("sullivan.chain-map[{name}]"), chain));

    let involution = (|| {
        let twice = rev.compose(&rev).unwrap();
        if twice != identity(1).to_sullivan() {
            return Err(json!({ "composite": twice.to_json() }));
        }
        for fs in &singles {
            let x = tensor(fs)?;
            if act(&rev, &act(&rev, &x).map_err(action_err)?).map_err(action_err)? != x {
                return Err(input_witness(alg, &rev, fs));
            }
        }
        Ok(())
    })();
    out.push(entry(format!("sullivan.involution[{name}]"), involution));

    let anti = (|| {
        for fs in &singles {
            let x = tensor(fs)?;
            let l = act(&rev, &act(&delta, &x).map_err(action_err)?).map_err(action_err)?;
            let r = act(&delta, &act(&rev, &x).map_err(action_err)?).map_err(action_err)?;
            if l != r.scale(&-Q::one()) {
                return Err(input_witness(alg, &delta, fs));
            }
        }
        Ok(())
    })();
    out.push(entry(format!("sullivan.anticommutes-delta[{name}]"), anti));

    if !alg.is_commutative() {
        return out;
    }

    // ~(f⌣g) = (−1)^{pq} ~g⌣~f, i.e. ∼∘⌣ = ⌣∘τ₂∘(∼⊗∼)
    let anti_alg = (|| {
        let rhs = cup.compose(&tau).unwrap().compose(&rr).unwrap();
        for fs in sorted_tuples(&mut rng, alg, 2, cfg.samples.cochains, top.min(2), n_max + 1) {
            let x = tensor(&fs)?;
            let l = act(&rev, &act(&cup, &x).map_err(action_err)?).map_err(action_err)?;
            if l != act(&rhs, &x).map_err(action_err)? {
                return Err(input_witness(alg, &cup, &fs));
            }
        }
        Ok(())
    })();
    out.push(entry(format!("sullivan.anti-algebra[{name}]"), anti_alg));

    // ∨₀(~f) = Σ ~f''⊗~f' on HH*
    let anti_coalg = (|| {
        let cache = CohomologyCache::new(alg.clone(), n_max);
        let l = vee0.compose(&rev).unwrap();
        let r = rr.compose(&tau).unwrap().compose(&vee0).unwrap();
        for n in 0..n_max {
            if !induced_equal(&cache, &l, &r, &[n])? {
                return Err(json!({ "algebra": name, "degree": n }));
            }
        }
        Ok(())
    })();
    out.push(entry(format!("sullivan.anti-coalgebra[{name}]"), anti_coalg));

    let eigen = (|| {
        let cache = CohomologyCache::new(alg.clone(), n_max);
        let half = Q::new(1, 2);
        for n in 1..n_max {
            for f in &cache.basis(n).map_err(action_err)?.representatives {
                let x = tensor(std::slice::from_ref(f))?;
                let fx = act(&rev, &x).map_err(action_err)?;
                for (eps, part) in [(1, x.add(&fx)), (-1, x.sub(&fx))] {
                    let part = part.map_err(action_err)?.scale(&half);
                    let d = act(&delta, &part).map_err(action_err)?;
                    let back = act(&rev, &d).map_err(action_err)?;
                    if back != d.scale(&Q::from_int(-eps)) {
                        return Err(input_witness(alg, &delta, std::slice::from_ref(f)));
                    }
                }
            }
        }
        Ok(())
    })();
    out.push(entry(format!("sullivan.eigenspaces[{name}]"), eigen));
    out
}

/// `(δf̃ − (δf)~)(a_1, …, a_{n+1})` from the commutator expression, with
/// `F = f(a_{n+1},…,a_2)`, `G = f(a_n,…,a_1)` and `ε_n = (−1)^{n(n+1)/2}`:
/// `ε_n[(a_1F − Fa_1) + Σ_j (−1)^j f(…, a_ja_{j+1} − a_{j+1}a_j, …) + (−1)^{n+1}(Ga_{n+1} − a_{n+1}G)]`,
/// the commutator sitting where `a_{j+1}, a_j` sit in the reversed list.
pub fn reverse_defect(f: &Cochain, n: usize) -> Cochain {
    let alg = f.algebra().clone();
    let d = alg.dim();
    let eps = sign(n * (n + 1) / 2);
    let value = |args: &[usize], b: usize| -> Q {
        let a = |i: usize| args[i - 1];
        let fval = |xs: &[usize], c: usize| f.get(xs, c);
        let rev = |lo: usize, hi: usize| -> Vec<usize> { (lo..=hi).rev().map(a).collect() };
        let big_f = rev(2, n + 1);
        let big_g = rev(1, n);
        let mut s = Q::zero();
        for c in 0..d {
            let fc = fval(&big_f, c);
            let gc = fval(&big_g, c);
            if !fc.is_zero() {
                s += &fc * &(alg.mu(a(1), c, b) - alg.mu(c, a(1), b));
            }
            if !gc.is_zero() {
                s += &sign(n + 1) * &gc * &(alg.mu(c, a(n + 1), b) - alg.mu(a(n + 1), c, b));
            }
        }
        for j in 1..=n {
            let mut xs: Vec<usize> = rev(1, n + 1);
            // reversed position of the pair a_{j+1}, a_j
            let at = n + 1 - (j + 1);
            for c in 1..d {
                let comm = alg.mu(a(j), a(j + 1), c) - alg.mu(a(j + 1), a(j), c);
                if comm.is_zero() {
                    continue;
                }
                let mut ys = xs.clone();
                ys.splice(at..at + 2, [c]);
                s += &sign(j) * &comm * &fval(&ys, b);
            }
            xs.clear();
        }
        &eps * &s
    };
    Cochain::from_fn(alg.clone(), f.max_degree().max(n + 1), n + 1, value).expect("degree within bound")
}

fn negative_control(cfg: &SuiteConfig) -> Vec<CheckEntry> {
    let alg = Arc::new(mat2());
    let mut rng = job_rng(cfg.seed, "negative-control");
    let rev = catalog("reverse");
    let outcome = (|| {
        let mut nonzero = false;
        for n in 1..=2 {
            for _ in 0..3 {
                let f = Cochain::random(alg.clone(), cfg.max_degree + 1, n, 3, &mut rng).unwrap();
                let x = CochainTensor::from_cochains(std::slice::from_ref(&f)).map_err(action_err)?;
                let defect = check_chain_map(&rev, &x).map_err(action_err)?.discrepancy;
                let want = reverse_defect(&f, n);
                let got = defect.to_cochain(want.max_degree()).map_err(action_err)?;
                if got != want {
                    return Err(input_witness(&alg, &rev, &[f]));
                }
                nonzero |= !got.is_zero();
            }
        }
        if nonzero {
            Ok(())
        } else {
            Err(json!({ "error": "defect vanished on every sample" }))
        }
    })();
    vec![entry("negative-control.reverse-defect[mat2]".into(), outcome)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig {
            samples: Samples { composites: 10, pairs: 5, triples: 3, cochains: 4, slides: 2 },
            max_degree: 3,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn config_json_defaults_and_errors() {
        let cfg = SuiteConfig::from_json(&json!({ "checks": ["prop-axioms"] })).unwrap();
        assert_eq!(cfg.samples, Samples::default());
        assert_eq!(cfg.mode, Mode::Sullivan);
        let err = SuiteConfig::from_json(&json!({ "bogus": 1 })).unwrap_err();
        assert!(err.message.contains("bogus"), "{err}");
        let err = SuiteConfig::from_json(&json!({ "algebras": ["dual_numbers", "nope"] })).unwrap_err();
        assert!(err.path.starts_with("$.algebras[1]"), "{err}");
        let err = SuiteConfig::from_json(&json!({ "checks": ["prop-axioms", "wat"] })).unwrap_err();
        assert_eq!(err.path, "$.checks[1]");
    }

    #[test]
    fn subset_selection() {
        let cfg = SuiteConfig { checks: vec!["prop-axioms".into()], ..small() };
        let r = run_suite(&cfg).unwrap();
        assert!(r.is_ok(), "{r}");
        assert!(r.entries.iter().all(|e| e.check.starts_with("prop-axioms.")));
        assert_eq!(r.entries.len(), 5);
        let one = SuiteConfig { checks: vec!["generators.d-star".into()], ..small() };
        let r = run_suite(&one).unwrap();
        assert_eq!(r.entries.len(), 1);
    }

    #[test]
    fn small_default_suite_passes_and_is_deterministic() {
        let cfg = small();
        let a = run_suite(&cfg).unwrap();
        assert!(a.is_ok(), "{a}");
        assert_eq!(a, run_suite(&cfg).unwrap());
        assert!(a.entry("negative-control.reverse-defect[mat2]").is_some());
        assert!(a.entry("sullivan.eigenspaces[dual_numbers]").is_some());
    }

    #[test]
    fn mat2_fails_only_the_reverse_chain_map() {
        let cfg = SuiteConfig { algebras: vec![json!("mat2")], ..small() };
        let r = run_suite(&cfg).unwrap();
        let failed: Vec<&str> = r.failures().map(|e| e.check.as_str()).collect();
        assert_eq!(failed, vec!["sullivan.chain-map[mat2]"], "{r}");
        let w = &r.entry("sullivan.chain-map[mat2]").unwrap().witness;
        assert!(w["inputs"].is_array() && w["diagram"].is_array());
    }

    #[test]
    fn random_composites_are_seeded() {
        let a: Vec<String> = (0..5).map({
            let mut rng = job_rng(1, "x");
            move |_| random_composite(&mut rng, Mode::Cyclic, 3).0
        }).collect();
        let b: Vec<String> = (0..5).map({
            let mut rng = job_rng(1, "x");
            move |_| random_composite(&mut rng, Mode::Cyclic, 3).0
        }).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn expected_tables() {
        let t = crate::frobenius::truncated_polynomial(4);
        assert_eq!((0..3).map(|n| expected_hh(&t, n).unwrap()).collect::<Vec<_>>(), vec![4, 3, 3]);
        assert_eq!(expected_hh(&mat2(), 2), Some(0));
    }
}
