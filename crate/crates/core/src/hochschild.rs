//! Hochschild cochains `C^n(A; A)` of a Frobenius algebra, in primal and dualized form.
//!
//! A degree-n component is a dense vector over the index set `(a_1,…,a_n; b)`,
//! mixed radix with `b` least significant. In the normalized variant the
//! arguments range over `1..d` (index 0 is the unit), in the full variant over `0..d`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::frobenius::{self, FrobeniusAlgebra};
use crate::json::{self, InputError};
use crate::linalg::{self, Field, LinalgError, RationalMatrix};
use crate::rational::Q;

pub const DEFAULT_MAX_DEGREE: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HochschildError {
    #[error("degree {degree} exceeds the truncation N = {max}")]
    DegreeOverflow { degree: usize, max: usize },
    #[error("component of degree {degree} has length {got}, expected {want}")]
    Length { degree: usize, got: usize, want: usize },
    #[error("cochains live over different algebras or truncations")]
    Mismatch,
    #[error("output not normalized at {0}")]
    NotNormalized(String),
    #[error("cohomology in degree {n} needs N >= {}", n + 1)]
    Truncation { n: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Input(#[from] InputError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Normalized,
    Full,
}

impl Variant {
    fn lowest_arg(self) -> usize {
        match self {
            Variant::Normalized => 1,
            Variant::Full => 0,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Normalized => write!(f, "normalized"),
            Variant::Full => write!(f, "full"),
        }
    }
}

/// Number of coordinates of a degree-n component.
pub fn space_len(d: usize, n: usize, variant: Variant) -> usize {
    (d - variant.lowest_arg()).pow(n as u32) * d
}

pub fn encode(d: usize, variant: Variant, args: &[usize], b: usize) -> usize {
    let lo = variant.lowest_arg();
    let base = d - lo;
    args.iter().fold(0, |acc, &a| acc * base + (a - lo)) * d + b
}

pub fn decode(d: usize, variant: Variant, n: usize, idx: usize) -> (Vec<usize>, usize) {
    let lo = variant.lowest_arg();
    let base = d - lo;
    let b = idx % d;
    let mut rest = idx / d;
    let mut args = vec![0; n];
    for slot in args.iter_mut().rev() {
        *slot = rest % base + lo;
        rest /= base;
    }
    (args, b)
}

/// The index set `(a_1,…,a_n; b)` with every `a_j ≠ 0`, in storage order.
pub fn normalized_basis(alg: &FrobeniusAlgebra, n: usize) -> Vec<(Vec<usize>, usize)> {
    let d = alg.dim();
    (0..space_len(d, n, Variant::Normalized))
        .map(|i| decode(d, Variant::Normalized, n, i))
        .collect()
}

/// Whether the final slot holds an element of A or of A*.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Primal,
    Dual,
}

/// A truncated cochain: components in degrees `0..=max_degree`, absent ones zero.
#[derive(Clone)]
pub struct Cochain {
    alg: Arc<FrobeniusAlgebra>,
    max_degree: usize,
    variant: Variant,
    components: BTreeMap<usize, Vec<Q>>,
}

/// `β♯f`: the same layout with the final slot in the dual basis of A*.
#[derive(Clone)]
pub struct DualCochain(Cochain);

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cochain({}, N={}, {}", self.alg.name(), self.max_degree, self.variant)?;
        for (n, v) in &self.components {
            let nz = v.iter().filter(|x| !x.is_zero()).count();
            write!(f, ", deg {n}: {nz} nonzero")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for DualCochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dual{:?}", self.0)
    }
}

impl PartialEq for Cochain {
    fn eq(&self, other: &Cochain) -> bool {
        if self.max_degree != other.max_degree
            || self.variant != other.variant
            || !Arc::ptr_eq(&self.alg, &other.alg) && self.alg.to_json() != other.alg.to_json()
        {
            return false;
        }
        let zero_or = |c: &Cochain, n: usize, i: usize| c.components.get(&n).map(|v| &v[i]).cloned();
        let degrees: std::collections::BTreeSet<usize> =
            self.components.keys().chain(other.components.keys()).copied().collect();
        degrees.into_iter().all(|n| {
            let len = space_len(self.alg.dim(), n, self.variant);
            (0..len).all(|i| {
                zero_or(self, n, i).unwrap_or_default() == zero_or(other, n, i).unwrap_or_default()
            })
        })
    }
}

impl PartialEq for DualCochain {
    fn eq(&self, other: &DualCochain) -> bool {
        self.0 == other.0
    }
}

impl Cochain {
    pub fn zero(alg: Arc<FrobeniusAlgebra>, max_degree: usize) -> Cochain {
        Cochain::zero_in(alg, max_degree, Variant::Normalized)
    }

    pub fn zero_in(alg: Arc<FrobeniusAlgebra>, max_degree: usize, variant: Variant) -> Cochain {
        Cochain { alg, max_degree, variant, components: BTreeMap::new() }
    }

    /// A homogeneous cochain from a dense component in storage order.
    pub fn homogeneous(
        alg: Arc<FrobeniusAlgebra>,
        max_degree: usize,
        variant: Variant,
        degree: usize,
        data: Vec<Q>,
    ) -> Result<Cochain, HochschildError> {
        let mut c = Cochain::zero_in(alg, max_degree, variant);
        c.set_component(degree, data)?;
        Ok(c)
    }

    /// Builds the degree-n component from `f(args) = Σ_b value(args, b)·e_b`.
    pub fn from_fn(
        alg: Arc<FrobeniusAlgebra>,
        max_degree: usize,
        degree: usize,
        mut value: impl FnMut(&[usize], usize) -> Q,
    ) -> Result<Cochain, HochschildError> {
        let d = alg.dim();
        let data = (0..space_len(d, degree, Variant::Normalized))
            .map(|i| {
                let (args, b) = decode(d, Variant::Normalized, degree, i);
                value(&args, b)
            })
            .collect();
        Cochain::homogeneous(alg, max_degree, Variant::Normalized, degree, data)
    }

    /// Integer entries uniform in `[-bound, bound]` on the normalized basis.
    pub fn random(
        alg: Arc<FrobeniusAlgebra>,
        max_degree: usize,
        degree: usize,
        bound: i64,
        rng: &mut impl Rng,
    ) -> Result<Cochain, HochschildError> {
        let len = space_len(alg.dim(), degree, Variant::Normalized);
        let data = (0..len).map(|_| Q::from_int(rng.gen_range(-bound..=bound))).collect();
        Cochain::homogeneous(alg, max_degree, Variant::Normalized, degree, data)
    }

    pub fn set_component(&mut self, degree: usize, data: Vec<Q>) -> Result<(), HochschildError> {
        if degree > self.max_degree {
            return Err(HochschildError::DegreeOverflow { degree, max: self.max_degree });
        }
        let want = space_len(self.alg.dim(), degree, self.variant);
        if data.len() != want {
            return Err(HochschildError::Length { degree, got: data.len(), want });
        }
        self.components.insert(degree, data);
        Ok(())
    }

    pub fn algebra(&self) -> &Arc<FrobeniusAlgebra> {
        &self.alg
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn component(&self, degree: usize) -> Option<&[Q]> {
        self.components.get(&degree).map(Vec::as_slice)
    }

    /// Degrees carrying a nonzero component.
    pub fn degrees(&self) -> Vec<usize> {
        self.components
            .iter()
            .filter(|(_, v)| v.iter().any(|x| !x.is_zero()))
            .map(|(n, _)| *n)
            .collect()
    }

    /// The unique degree of a nonzero homogeneous cochain.
    pub fn degree(&self) -> Option<usize> {
        match self.degrees().as_slice() {
            [n] => Some(*n),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.degrees().is_empty()
    }

    /// Coefficient of `e_b` in `f(e_{a_1},…,e_{a_n})`; zero on a unit argument when normalized.
    pub fn get(&self, args: &[usize], b: usize) -> Q {
        let lo = self.variant.lowest_arg();
        if args.iter().any(|&a| a < lo) {
            return Q::zero();
        }
        match self.components.get(&args.len()) {
            Some(v) => v[encode(self.alg.dim(), self.variant, args, b)].clone(),
            None => Q::zero(),
        }
    }

    /// Nonzero entries `(args, b, value)` of the degree-n component.
    pub fn entries(&self, degree: usize) -> impl Iterator<Item = (Vec<usize>, usize, &Q)> + '_ {
        let d = self.alg.dim();
        let variant = self.variant;
        self.components
            .get(&degree)
            .into_iter()
            .flat_map(|v| v.iter().enumerate())
            .filter(|(_, x)| !x.is_zero())
            .map(move |(i, x)| {
                let (args, b) = decode(d, variant, degree, i);
                (args, b, x)
            })
    }

    /// The degree-n part as a cochain.
    pub fn part(&self, degree: usize) -> Cochain {
        let mut c = Cochain::zero_in(self.alg.clone(), self.max_degree, self.variant);
        if let Some(v) = self.components.get(&degree) {
            c.components.insert(degree, v.clone());
        }
        c
    }

    /// The same cochain in the full complex, zero on unit arguments.
    pub fn to_full(&self) -> Cochain {
        if self.variant == Variant::Full {
            return self.clone();
        }
        let d = self.alg.dim();
        let mut out = Cochain::zero_in(self.alg.clone(), self.max_degree, Variant::Full);
        for (&n, v) in &self.components {
            let mut w = vec![Q::zero(); space_len(d, n, Variant::Full)];
            for (i, x) in v.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                let (args, b) = decode(d, Variant::Normalized, n, i);
                w[encode(d, Variant::Full, &args, b)] = x.clone();
            }
            out.components.insert(n, w);
        }
        out
    }

    fn compatible(&self, other: &Cochain) -> Result<(), HochschildError> {
        let same_alg = Arc::ptr_eq(&self.alg, &other.alg) || self.alg.to_json() == other.alg.to_json();
        if !same_alg || self.max_degree != other.max_degree || self.variant != other.variant {
            return Err(HochschildError::Mismatch);
        }
        Ok(())
    }

    fn combine(&self, other: &Cochain, s: &Q) -> Result<Cochain, HochschildError> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (n, v) in &other.components {
            let slot = out.components.entry(*n).or_insert_with(|| vec![Q::zero(); v.len()]);
            for (x, y) in slot.iter_mut().zip(v) {
                *x += s * y;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain, HochschildError> {
        self.combine(other, &Q::one())
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain, HochschildError> {
        self.combine(other, &-Q::one())
    }

    pub fn scale(&self, s: &Q) -> Cochain {
        let mut out = self.clone();
        for v in out.components.values_mut() {
            for x in v.iter_mut() {
                *x *= s;
            }
        }
        out
    }

    /// The Hochschild differential with coefficients in A itself.
    pub fn delta(&self) -> Result<Cochain, HochschildError> {
        let mut out = Cochain::zero_in(self.alg.clone(), self.max_degree, self.variant);
        for (&n, v) in &self.components {
            if v.iter().all(Q::is_zero) {
                continue;
            }
            if n + 1 > self.max_degree {
                return Err(HochschildError::DegreeOverflow { degree: n + 1, max: self.max_degree });
            }
            let dv = differential(&self.alg, self.variant, n, v, Slot::Primal, Signs::Conjugate)?;
            out.components.insert(n + 1, dv);
        }
        Ok(out)
    }

    /// `β♯f = β∘f`.
    pub fn beta_sharp(&self) -> DualCochain {
        DualCochain(self.map_final_slot(|alg, c, b| alg.g(c, b).clone()))
    }

    fn map_final_slot(&self, m: impl Fn(&FrobeniusAlgebra, usize, usize) -> Q) -> Cochain {
        let d = self.alg.dim();
        let mut out = self.clone();
        for v in out.components.values_mut() {
            let mut w = vec![Q::zero(); v.len()];
            for (base, chunk) in v.chunks(d).enumerate() {
                for c in 0..d {
                    w[base * d + c] = (0..d).map(|b| m(&self.alg, c, b) * &chunk[b]).sum();
                }
            }
            *v = w;
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut comps = Map::new();
        for (n, _) in &self.components {
            let entries: Vec<Value> = self
                .entries(*n)
                .map(|(args, b, x)| {
                    let mut e: Vec<Value> = args.iter().map(|&a| json!(a)).collect();
                    e.push(json!(b));
                    e.push(json!(x.to_string()));
                    Value::Array(e)
                })
                .collect();
            if !entries.is_empty() {
                comps.insert(n.to_string(), Value::Array(entries));
            }
        }
        let mut obj = Map::new();
        obj.insert("algebra".into(), algebra_json(&self.alg));
        obj.insert("components".into(), Value::Object(comps));
        obj.insert("max_degree".into(), json!(self.max_degree));
        if self.variant == Variant::Full {
            obj.insert("variant".into(), json!("full"));
        }
        Value::Object(obj)
    }

    pub fn from_json(v: &Value) -> Result<Cochain, InputError> {
        json::reject_unknown(v, &["algebra", "components", "max_degree", "variant"], "$")?;
        let alg = Arc::new(algebra_from_json(json::field(v, "algebra", "$")?, "$.algebra")?);
        let max_degree = match json::opt_field(v, "max_degree") {
            Some(x) => json::usize_of(x, "$.max_degree")?,
            None => DEFAULT_MAX_DEGREE,
        };
        let variant = match json::opt_field(v, "variant") {
            None => Variant::Normalized,
            Some(x) => match json::str_of(x, "$.variant")? {
                "normalized" => Variant::Normalized,
                "full" => Variant::Full,
                other => {
                    return Err(InputError::new("$.variant", format!("unknown variant {other:?}")))
                }
            },
        };
        let d = alg.dim();
        let mut out = Cochain::zero_in(alg, max_degree, variant);
        let comps = json::field(v, "components", "$")?;
        let obj = comps
            .as_object()
            .ok_or_else(|| InputError::new("$.components", "expected an object"))?;
        for (key, list) in obj {
            let path = format!("$.components.{key}");
            let n: usize = key
                .parse()
                .map_err(|_| InputError::new(&path, "degree keys must be nonnegative integers"))?;
            if n > max_degree {
                return Err(InputError::new(&path, format!("degree {n} exceeds max_degree {max_degree}")));
            }
            let mut data = vec![Q::zero(); space_len(d, n, variant)];
            for (k, e) in json::array(list, &path)?.iter().enumerate() {
                let p = format!("{path}[{k}]");
                let e = json::array(e, &p)?;
                if e.len() != n + 2 {
                    return Err(InputError::new(&p, format!("expected {} indices and a rational", n + 1)));
                }
                let mut idx = Vec::with_capacity(n + 1);
                for (j, x) in e[..=n].iter().enumerate() {
                    let ip = format!("{p}[{j}]");
                    let i = json::usize_of(x, &ip)?;
                    if i >= d {
                        return Err(InputError::new(ip, format!("index {i} out of range for dimension {d}")));
                    }
                    if j < n && i < variant.lowest_arg() {
                        return Err(InputError::new(ip, "unit argument in a normalized cochain"));
                    }
                    idx.push(i);
                }
                let b = idx.pop().expect("n + 1 indices");
                data[encode(d, variant, &idx, b)] = json::q_of(&e[n + 1], &format!("{p}[{}]", n + 1))?;
            }
            out.components.insert(n, data);
        }
        Ok(out)
    }
}

/// A builtin algebra serializes by name, anything else inline.
pub fn algebra_json(alg: &FrobeniusAlgebra) -> Value {
    match frobenius::builtin(alg.name()) {
        Ok(b) if b.to_json() == alg.to_json() => json!(alg.name()),
        _ => alg.to_json(),
    }
}

pub fn algebra_from_json(v: &Value, path: &str) -> Result<FrobeniusAlgebra, InputError> {
    match v {
        Value::String(name) => {
            frobenius::builtin(name).map_err(|e| InputError::new(path, e.to_string()))
        }
        _ => FrobeniusAlgebra::from_json(v).map_err(|e| {
            let tail = e.path.strip_prefix('$').unwrap_or(&e.path);
            InputError::new(format!("{path}{tail}"), e.message)
        }),
    }
}

impl DualCochain {
    pub fn cochain_view(&self) -> &Cochain {
        &self.0
    }

    /// `(β♯)⁻¹`, transforming the final slot by `g⁻¹`.
    pub fn to_primal(&self) -> Cochain {
        self.0.map_final_slot(|alg, c, b| alg.ginv(c, b).clone())
    }

    pub fn get(&self, args: &[usize], c: usize) -> Q {
        self.0.get(args, c)
    }

    pub fn scale(&self, s: &Q) -> DualCochain {
        DualCochain(self.0.scale(s))
    }

    pub fn add(&self, other: &DualCochain) -> Result<DualCochain, HochschildError> {
        self.0.add(&other.0).map(DualCochain)
    }

    pub fn sub(&self, other: &DualCochain) -> Result<DualCochain, HochschildError> {
        self.0.sub(&other.0).map(DualCochain)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// The differential transported through β♯, written with the comultiplication of A*.
    pub fn dual_delta(&self) -> Result<DualCochain, HochschildError> {
        self.dual_with(Signs::Conjugate)
    }

    /// `δ₁ + δ₂` with the signs `(−1)^{j−1}`, `(−1)^n`, `(−1)^{n+1}` read literally.
    /// In odd degree this leaves the normalized subcomplex; unit-argument terms are dropped.
    pub fn dual_delta_displayed(&self) -> Result<DualCochain, HochschildError> {
        self.dual_with(Signs::Displayed)
    }

    fn dual_with(&self, signs: Signs) -> Result<DualCochain, HochschildError> {
        let c = &self.0;
        let mut out = Cochain::zero_in(c.alg.clone(), c.max_degree, c.variant);
        for (&n, v) in &c.components {
            if v.iter().all(Q::is_zero) {
                continue;
            }
            if n + 1 > c.max_degree {
                return Err(HochschildError::DegreeOverflow { degree: n + 1, max: c.max_degree });
            }
            out.components.insert(n + 1, differential(&c.alg, c.variant, n, v, Slot::Dual, signs)?);
        }
        Ok(DualCochain(out))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Signs {
    Conjugate,
    Displayed,
}

fn parity(k: usize) -> Q {
    if k % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// One step of the differential on a dense degree-n component.
///
/// Primal: `δf(a_1..a_{n+1}) = a_1 f(a_2..) + Σ_j (−1)^j f(..a_j a_{j+1}..) + (−1)^{n+1} f(a_1..a_n) a_{n+1}`.
/// Dual: the same three families written as coproduct insertions on `(c_1..c_n; c_{n+1})`.
fn differential(
    alg: &FrobeniusAlgebra,
    variant: Variant,
    n: usize,
    f: &[Q],
    slot: Slot,
    signs: Signs,
) -> Result<Vec<Q>, HochschildError> {
    let d = alg.dim();
    // splits[e] = (x, y, μ_{xy}^e)
    let mut splits: Vec<Vec<(usize, usize, Q)>> = vec![Vec::new(); d];
    for (x, y) in itertools::iproduct!(0..d, 0..d) {
        for (e, m) in alg.product(x, y) {
            splits[*e].push((x, y, m.clone()));
        }
    }
    let (insert_sign, split_sign, rotate_sign) = match signs {
        Signs::Conjugate => (1usize, n + 1, 0usize),
        Signs::Displayed => (0, n, n + 1),
    };
    let mut full = vec![Q::zero(); space_len(d, n + 1, Variant::Full)];
    for (i, val) in f.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        let (args, c) = decode(d, variant, n, i);
        let mut put = |new_args: &[usize], b: usize, coef: Q| {
            full[encode(d, Variant::Full, new_args, b)] += coef * val;
        };
        let mut buf = Vec::with_capacity(n + 1);
        for j in 0..n {
            let s = parity(j + insert_sign);
            for (x, y, m) in &splits[args[j]] {
                buf.clear();
                buf.extend_from_slice(&args[..j]);
                buf.push(*x);
                buf.push(*y);
                buf.extend_from_slice(&args[j + 1..]);
                put(&buf, c, &s * m);
            }
        }
        match slot {
            Slot::Primal => {
                for a in 0..d {
                    buf.clear();
                    buf.push(a);
                    buf.extend_from_slice(&args);
                    for (b, m) in alg.product(a, c) {
                        put(&buf, *b, m.clone());
                    }
                    buf.clear();
                    buf.extend_from_slice(&args);
                    buf.push(a);
                    for (b, m) in alg.product(c, a) {
                        put(&buf, *b, parity(n + 1) * m);
                    }
                }
            }
            Slot::Dual => {
                for (x, y, m) in &splits[c] {
                    buf.clear();
                    buf.extend_from_slice(&args);
                    buf.push(*x);
                    put(&buf, *y, parity(split_sign) * m);
                    buf.clear();
                    buf.push(*y);
                    buf.extend_from_slice(&args);
                    put(&buf, *x, parity(rotate_sign) * m);
                }
            }
        }
    }
    match variant {
        Variant::Full => Ok(full),
        Variant::Normalized => {
            let mut out = vec![Q::zero(); space_len(d, n + 1, Variant::Normalized)];
            for (i, x) in full.into_iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                let (args, b) = decode(d, Variant::Full, n + 1, i);
                if args.contains(&0) {
                    if signs == Signs::Displayed {
                        continue;
                    }
                    return Err(HochschildError::NotNormalized(format!("{args:?}; {b}")));
                }
                out[encode(d, Variant::Normalized, &args, b)] = x;
            }
            Ok(out)
        }
    }
}

/// Matrix of `δ: C^n → C^{n+1}` in storage order.
pub fn delta_matrix(
    alg: &FrobeniusAlgebra,
    n: usize,
    variant: Variant,
) -> Result<RationalMatrix, HochschildError> {
    let d = alg.dim();
    let (rows, cols) = (space_len(d, n + 1, variant), space_len(d, n, variant));
    let mut m = RationalMatrix::zeros(rows, cols);
    let mut unit = vec![Q::zero(); cols];
    for j in 0..cols {
        unit[j] = Q::one();
        for (i, x) in differential(alg, variant, n, &unit, Slot::Primal, Signs::Conjugate)?
            .into_iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
        {
            m.set(i, j, x);
        }
        unit[j] = Q::zero();
    }
    Ok(m)
}

#[derive(Debug, Clone)]
pub struct Cohomology {
    pub degree: usize,
    pub dimension: usize,
    pub variant: Variant,
    pub field: Field,
    /// Cocycles whose classes form a basis; empty over a prime field.
    pub representatives: Vec<Cochain>,
}

/// `HH^n` as `ker δ_n / im δ_{n−1}` on the chosen complex, truncated at N.
pub fn cohomology(
    alg: &Arc<FrobeniusAlgebra>,
    n: usize,
    max_degree: usize,
    variant: Variant,
    field: Field,
) -> Result<Cohomology, HochschildError> {
    if n + 1 > max_degree {
        return Err(HochschildError::Truncation { n });
    }
    let d = alg.dim();
    let b_out = delta_matrix(alg, n, variant)?;
    let b_in = match n {
        0 => RationalMatrix::zeros(space_len(d, 0, variant), 0),
        _ => delta_matrix(alg, n - 1, variant)?,
    };
    let (dimension, representatives) = match field {
        Field::Rational => {
            let q = linalg::quotient_dimension(&b_in, &b_out)?;
            let reps = q
                .representatives
                .into_iter()
                .map(|v| Cochain::homogeneous(alg.clone(), max_degree, variant, n, v))
                .collect::<Result<Vec<_>, _>>()?;
            (q.dimension, reps)
        }
        Field::Prime(_) => (linalg::quotient_dimension_in(&b_in, &b_out, field)?, Vec::new()),
    };
    Ok(Cohomology { degree: n, dimension, variant, field, representatives })
}
