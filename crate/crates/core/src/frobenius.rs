//! Finite-dimensional Frobenius algebras given by structure constants.

use std::fmt;

use serde_json::{json, Value};

use crate::json::{self, InputError};
use crate::linalg::RationalMatrix;
use crate::rational::Q;
use crate::report::ValidationReport;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("unknown builtin algebra {0:?}")]
    UnknownBuiltin(String),
    #[error("invalid algebra {name}: {reason}")]
    Invalid { name: String, reason: String },
    #[error("comultiply needs r >= 2, got {0}")]
    Arity(usize),
    #[error("cyclic bracket of an empty list")]
    EmptyBracket,
    #[error(transparent)]
    Input(#[from] InputError),
}

/// Coordinates of an element of A in the basis `e_0 = 1, e_1, …`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element(pub Vec<Q>);

/// Coordinates of an element of A* in the dual basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DualVector(pub Vec<Q>);

impl Element {
    pub fn basis(d: usize, a: usize) -> Element {
        let mut v = vec![Q::zero(); d];
        v[a] = Q::one();
        Element(v)
    }
}

impl DualVector {
    pub fn basis(d: usize, a: usize) -> DualVector {
        let mut v = vec![Q::zero(); d];
        v[a] = Q::one();
        DualVector(v)
    }

    pub fn eval(&self, x: &Element) -> Q {
        self.0.iter().zip(&x.0).map(|(a, b)| a * b).sum()
    }
}

#[derive(Clone)]
pub struct FrobeniusAlgebra {
    name: String,
    basis: Vec<String>,
    mul: Vec<Q>,
    form: Vec<Q>,
    commutative: bool,
    form_inv: Option<Vec<Q>>,
    products: Vec<Vec<(usize, Q)>>,
    report: ValidationReport,
}

impl fmt::Debug for FrobeniusAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FrobeniusAlgebra({}, d={})", self.name, self.dim())
    }
}

impl FrobeniusAlgebra {
    /// `mul[(a*d + b)*d + c] = μ[a][b][c]`, `form[a*d + b] = g[a][b]`.
    pub fn new(
        name: impl Into<String>,
        basis: Vec<String>,
        mul: Vec<Q>,
        form: Vec<Q>,
        commutative: bool,
    ) -> FrobeniusAlgebra {
        let d = basis.len();
        assert!(d >= 1, "empty basis");
        assert_eq!(mul.len(), d * d * d, "structure constant count");
        assert_eq!(form.len(), d * d, "form entry count");
        let g = RationalMatrix::from_rows(form.chunks(d).map(|r| r.to_vec()).collect());
        let form_inv = invert(&g);
        let products = (0..d * d)
            .map(|ab| {
                (0..d)
                    .filter(|&c| !mul[ab * d + c].is_zero())
                    .map(|c| (c, mul[ab * d + c].clone()))
                    .collect()
            })
            .collect();
        let mut alg = FrobeniusAlgebra {
            name: name.into(),
            basis,
            mul,
            form,
            commutative,
            form_inv,
            products,
            report: ValidationReport::default(),
        };
        alg.report = alg.compute_report();
        alg
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    pub fn mu(&self, a: usize, b: usize, c: usize) -> &Q {
        let d = self.dim();
        &self.mul[(a * d + b) * d + c]
    }

    pub fn g(&self, a: usize, b: usize) -> &Q {
        &self.form[a * self.dim() + b]
    }

    /// Entry of g⁻¹. Panics on a degenerate form.
    pub fn ginv(&self, a: usize, b: usize) -> &Q {
        let inv = self.form_inv.as_ref().expect("degenerate form has no inverse");
        &inv[a * self.dim() + b]
    }

    /// Nonzero coordinates of `e_a · e_b`.
    pub fn product(&self, a: usize, b: usize) -> &[(usize, Q)] {
        &self.products[a * self.dim() + b]
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Element {
        let d = self.dim();
        let mut out = vec![Q::zero(); d];
        for (a, xa) in x.0.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (b, yb) in y.0.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let s = xa * yb;
                for (c, m) in self.product(a, b) {
                    out[*c] += &s * m;
                }
            }
        }
        Element(out)
    }

    pub fn pair(&self, x: &Element, y: &Element) -> Q {
        self.beta(x).eval(y)
    }

    pub fn unit(&self) -> Element {
        Element::basis(self.dim(), 0)
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn validate(&self) -> ValidationReport {
        self.report.clone()
    }

    pub fn ensure_valid(&self) -> Result<(), AlgebraError> {
        match self.report.failures().next() {
            None => Ok(()),
            Some(e) => Err(AlgebraError::Invalid {
                name: self.name.clone(),
                reason: format!("{} fails at {}", e.check, e.witness.clone().unwrap_or_default()),
            }),
        }
    }

    fn compute_report(&self) -> ValidationReport {
        let d = self.dim();
        let mut r = ValidationReport::default();
        let idx = |t: &[usize]| format!("{t:?}");
        let first = |it: &mut dyn Iterator<Item = Vec<usize>>| it.next().map(|t| idx(&t));

        let unit = first(&mut itertools::iproduct!(0..d, 0..d).filter_map(|(b, c)| {
            let want = if b == c { Q::one() } else { Q::zero() };
            (self.mu(0, b, c) != &want || self.mu(b, 0, c) != &want).then(|| vec![b, c])
        }));
        r.record("unitality", unit);

        let assoc = first(&mut itertools::iproduct!(0..d, 0..d, 0..d, 0..d).filter_map(
            |(a, b, c, y)| {
                let lhs: Q = (0..d).map(|x| self.mu(a, b, x) * self.mu(x, c, y)).sum();
                let rhs: Q = (0..d).map(|x| self.mu(b, c, x) * self.mu(a, x, y)).sum();
                (lhs != rhs).then(|| vec![a, b, c, y])
            },
        ));
        r.record("associativity", assoc);

        let inv = first(&mut itertools::iproduct!(0..d, 0..d, 0..d).filter_map(|(a, b, c)| {
            let ab_c: Q = (0..d).map(|x| self.mu(a, b, x) * self.g(x, c)).sum();
            let a_bc: Q = (0..d).map(|x| self.mu(b, c, x) * self.g(a, x)).sum();
            let b_ca: Q = (0..d).map(|x| self.mu(c, a, x) * self.g(b, x)).sum();
            (ab_c != a_bc || ab_c != b_ca).then(|| vec![a, b, c])
        }));
        r.record("invariance", inv);

        r.record(
            "non-degeneracy",
            self.form_inv.is_none().then(|| "det(g) = 0".to_string()),
        );

        let sym = first(
            &mut itertools::iproduct!(0..d, 0..d)
                .filter_map(|(a, b)| (self.g(a, b) != self.g(b, a)).then(|| vec![a, b])),
        );
        r.record("symmetry", sym);

        let noncomm = itertools::iproduct!(0..d, 0..d, 0..d)
            .find(|&(a, b, c)| self.mu(a, b, c) != self.mu(b, a, c))
            .map(|(a, b, c)| vec![a, b, c]);
        let flag = match (&noncomm, self.commutative) {
            (Some(t), true) => Some(format!("declared commutative but mu differs at {t:?}")),
            (None, false) => Some("declared non-commutative but mu is symmetric".to_string()),
            _ => None,
        };
        r.record("commutative-flag", flag);
        r
    }

    /// `β(a) = ⟨a, −⟩` in the dual basis.
    pub fn beta(&self, a: &Element) -> DualVector {
        let d = self.dim();
        DualVector(
            (0..d)
                .map(|c| (0..d).map(|b| &a.0[b] * self.g(b, c)).sum())
                .collect(),
        )
    }

    pub fn gamma(&self, c: &DualVector) -> Element {
        let d = self.dim();
        Element(
            (0..d)
                .map(|b| (0..d).map(|x| self.ginv(b, x) * &c.0[x]).sum())
                .collect(),
        )
    }

    /// Dense `d^r` tensor `t` with `t[i_1..i_r] = c(e_{i_1}⋯e_{i_r})`, first index most significant.
    pub fn comultiply(&self, c: &DualVector, r: usize) -> Result<Vec<Q>, AlgebraError> {
        if r < 2 {
            return Err(AlgebraError::Arity(r));
        }
        let d = self.dim();
        // prod[w] = coordinates of the word w as an element
        let mut prods: Vec<Vec<Q>> = (0..d).map(|a| Element::basis(d, a).0).collect();
        for _ in 1..r {
            let mut next = Vec::with_capacity(prods.len() * d);
            for p in &prods {
                for b in 0..d {
                    next.push(self.multiply(&Element(p.clone()), &Element::basis(d, b)).0);
                }
            }
            prods = next;
        }
        Ok(prods.into_iter().map(|p| c.eval(&Element(p))).collect())
    }

    /// `⟨γ(c_1)⋯γ(c_r), 1⟩`.
    pub fn cyclic_bracket(&self, cs: &[DualVector]) -> Result<Q, AlgebraError> {
        let (head, rest) = cs.split_first().ok_or(AlgebraError::EmptyBracket)?;
        let mut acc = self.gamma(head);
        for c in rest {
            acc = self.multiply(&acc, &self.gamma(c));
        }
        Ok(self.pair(&acc, &self.unit()))
    }

    /// Dual basis element `ê_a = γ(e*_a)`, so that `⟨ê_a, e_b⟩ = δ_ab`.
    pub fn dual_basis_element(&self, a: usize) -> Element {
        self.gamma(&DualVector::basis(self.dim(), a))
    }

    /// Sparse chord tensor of arity `r`: index tuples with weight `⟨ê_{a_0}⋯ê_{a_{r−1}}, 1⟩`.
    pub fn chord_tensor(&self, r: usize) -> Vec<(Vec<usize>, Q)> {
        let d = self.dim();
        let duals: Vec<Element> = (0..d).map(|a| self.dual_basis_element(a)).collect();
        let mut words: Vec<(Vec<usize>, Element)> = vec![(Vec::new(), self.unit())];
        for _ in 0..r {
            let mut next = Vec::new();
            for (w, x) in &words {
                for (a, da) in duals.iter().enumerate() {
                    let mut w2 = w.clone();
                    w2.push(a);
                    next.push((w2, self.multiply(x, da)));
                }
            }
            words = next;
        }
        let one = self.unit();
        words
            .into_iter()
            .filter_map(|(w, x)| {
                let v = self.pair(&x, &one);
                (!v.is_zero()).then_some((w, v))
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let d = self.dim();
        let mut mul = Vec::new();
        for (a, b, c) in itertools::iproduct!(0..d, 0..d, 0..d) {
            let x = self.mu(a, b, c);
            if !x.is_zero() {
                mul.push(json!([a, b, c, x.to_string()]));
            }
        }
        let mut form = Vec::new();
        for (a, b) in itertools::iproduct!(0..d, 0..d) {
            let x = self.g(a, b);
            if !x.is_zero() {
                form.push(json!([a, b, x.to_string()]));
            }
        }
        json!({
            "name": self.name,
            "dimension": d,
            "basis": self.basis,
            "multiplication": mul,
            "form": form,
            "commutative": self.commutative,
        })
    }

    pub fn from_json(v: &Value) -> Result<FrobeniusAlgebra, InputError> {
        json::reject_unknown(
            v,
            &["name", "dimension", "basis", "multiplication", "form", "commutative"],
            "$",
        )?;
        let name = json::str_of(json::field(v, "name", "$")?, "$.name")?.to_string();
        let d = json::usize_of(json::field(v, "dimension", "$")?, "$.dimension")?;
        if d == 0 {
            return Err(InputError::new("$.dimension", "dimension must be at least 1"));
        }
        let basis = json::array(json::field(v, "basis", "$")?, "$.basis")?
            .iter()
            .enumerate()
            .map(|(i, b)| json::str_of(b, &format!("$.basis[{i}]")).map(str::to_string))
            .collect::<Result<Vec<_>, _>>()?;
        if basis.len() != d {
            return Err(InputError::new("$.basis", format!("expected {d} labels, got {}", basis.len())));
        }
        let index = |x: &Value, path: String| -> Result<usize, InputError> {
            let i = json::usize_of(x, &path)?;
            if i >= d {
                return Err(InputError::new(path, format!("index {i} out of range for dimension {d}")));
            }
            Ok(i)
        };
        let mut mul = vec![Q::zero(); d * d * d];
        for (k, e) in json::array(json::field(v, "multiplication", "$")?, "$.multiplication")?
            .iter()
            .enumerate()
        {
            let p = format!("$.multiplication[{k}]");
            let e = json::array(e, &p)?;
            if e.len() != 4 {
                return Err(InputError::new(p, "expected [a, b, c, \"p/q\"]"));
            }
            let a = index(&e[0], format!("{p}[0]"))?;
            let b = index(&e[1], format!("{p}[1]"))?;
            let c = index(&e[2], format!("{p}[2]"))?;
            mul[(a * d + b) * d + c] = json::q_of(&e[3], &format!("{p}[3]"))?;
        }
        let mut form = vec![Q::zero(); d * d];
        for (k, e) in json::array(json::field(v, "form", "$")?, "$.form")?.iter().enumerate() {
            let p = format!("$.form[{k}]");
            let e = json::array(e, &p)?;
            if e.len() != 3 {
                return Err(InputError::new(p, "expected [a, b, \"p/q\"]"));
            }
            let a = index(&e[0], format!("{p}[0]"))?;
            let b = index(&e[1], format!("{p}[1]"))?;
            form[a * d + b] = json::q_of(&e[2], &format!("{p}[2]"))?;
        }
        let commutative = json::bool_of(json::field(v, "commutative", "$")?, "$.commutative")?;
        Ok(FrobeniusAlgebra::new(name, basis, mul, form, commutative))
    }
}

fn invert(g: &RationalMatrix) -> Option<Vec<Q>> {
    let d = g.rows();
    let mut aug = RationalMatrix::zeros(d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            aug.set(i, j, g.get(i, j).clone());
        }
        aug.set(i, d + i, Q::one());
    }
    let (r, pivots) = aug.rref();
    if pivots.len() < d || pivots[d - 1] != d - 1 {
        return None;
    }
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            out.push(r.get(i, d + j).clone());
        }
    }
    Some(out)
}

struct Builder {
    d: usize,
    mul: Vec<Q>,
    form: Vec<Q>,
}

impl Builder {
    fn new(d: usize) -> Builder {
        Builder { d, mul: vec![Q::zero(); d * d * d], form: vec![Q::zero(); d * d] }
    }

    fn m(&mut self, a: usize, b: usize, c: usize, x: i64) {
        self.mul[(a * self.d + b) * self.d + c] = Q::from_int(x);
    }

    fn g(&mut self, a: usize, b: usize, x: i64) {
        self.form[a * self.d + b] = Q::from_int(x);
    }
}

/// `ℚ[x]/(x^k)` with `⟨x^i, x^j⟩ = δ_{i+j,k−1}`.
pub fn truncated_polynomial(k: usize) -> FrobeniusAlgebra {
    assert!(k >= 1, "trunc_poly needs k >= 1");
    let mut b = Builder::new(k);
    for i in 0..k {
        for j in 0..k - i {
            b.m(i, j, i + j, 1);
        }
        b.g(i, k - 1 - i, 1);
    }
    let basis = (0..k)
        .map(|i| match i {
            0 => "1".to_string(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        })
        .collect();
    FrobeniusAlgebra::new(format!("trunc_poly({k})"), basis, b.mul, b.form, true)
}

pub fn dual_numbers() -> FrobeniusAlgebra {
    let mut a = truncated_polynomial(2);
    a.name = "dual_numbers".into();
    a
}

/// 2×2 matrices in the basis `1, E11, E12, E21` with the trace form.
pub fn mat2() -> FrobeniusAlgebra {
    type M = [[i64; 2]; 2];
    let basis: [M; 4] = [[[1, 0], [0, 1]], [[1, 0], [0, 0]], [[0, 1], [0, 0]], [[0, 0], [1, 0]]];
    let mm = |x: &M, y: &M| -> M {
        let mut z = [[0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                z[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        z
    };
    // [[p,q],[r,s]] = s·1 + (p−s)·E11 + q·E12 + r·E21
    let coords = |z: &M| [z[1][1], z[0][0] - z[1][1], z[0][1], z[1][0]];
    let mut b = Builder::new(4);
    for (i, x) in basis.iter().enumerate() {
        for (j, y) in basis.iter().enumerate() {
            let z = mm(x, y);
            for (c, v) in coords(&z).into_iter().enumerate() {
                b.m(i, j, c, v);
            }
            b.g(i, j, z[0][0] + z[1][1]);
        }
    }
    let labels = ["1", "E11", "E12", "E21"].map(String::from).to_vec();
    FrobeniusAlgebra::new("mat2", labels, b.mul, b.form, false)
}

/// The group algebra of ℤ/2 with `⟨g, h⟩ = δ_{gh,1}`.
pub fn group_c2() -> FrobeniusAlgebra {
    let mut b = Builder::new(2);
    b.m(0, 0, 0, 1);
    b.m(0, 1, 1, 1);
    b.m(1, 0, 1, 1);
    b.m(1, 1, 0, 1);
    b.g(0, 0, 1);
    b.g(1, 1, 1);
    FrobeniusAlgebra::new("group_c2", vec!["1".into(), "g".into()], b.mul, b.form, true)
}

/// Builtins by name: `dual_numbers`, `mat2`, `group_c2`, `trunc_poly(k)` (also `trunc_polyK`).
pub fn builtin(name: &str) -> Result<FrobeniusAlgebra, AlgebraError> {
    let unknown = || AlgebraError::UnknownBuiltin(name.to_string());
    match name {
        "dual_numbers" => Ok(dual_numbers()),
        "mat2" => Ok(mat2()),
        "group_c2" => Ok(group_c2()),
        _ => {
            let k = name.strip_prefix("trunc_poly").ok_or_else(unknown)?;
            let k = k.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(k);
            let k: usize = k.parse().map_err(|_| unknown())?;
            if k == 0 {
                return Err(unknown());
            }
            Ok(truncated_polynomial(k))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(x: i64) -> Q {
        Q::from_int(x)
    }

    fn all_builtins() -> Vec<FrobeniusAlgebra> {
        vec![dual_numbers(), mat2(), group_c2(), truncated_polynomial(3), truncated_polynomial(4)]
    }

    #[test]
    fn builtins_validate() {
        for a in all_builtins() {
            assert!(a.report().is_ok(), "{}: {}", a.name(), a.report());
        }
        assert!(!mat2().is_commutative());
        assert_eq!(builtin("trunc_poly(3)").unwrap().dim(), 3);
        assert_eq!(builtin("trunc_poly3").unwrap().dim(), 3);
        assert!(matches!(builtin("nope"), Err(AlgebraError::UnknownBuiltin(_))));
    }

    #[test]
    fn degenerate_form_is_reported() {
        let a = dual_numbers();
        let mut form = vec![Q::zero(); 4];
        form[0] = q(1);
        let bad = FrobeniusAlgebra::new("bad", a.basis.clone(), a.mul.clone(), form, true);
        let r = bad.validate();
        assert!(!r.entry("non-degeneracy").unwrap().passed);
        assert!(bad.ensure_valid().is_err());
    }

    #[test]
    fn mat2_matches_matrix_multiplication() {
        let a = mat2();
        // E12·E21 = E11, E21·E12 = 1 − E11
        assert_eq!(a.product(2, 3), &[(1, q(1))]);
        assert_eq!(a.product(3, 2), &[(0, q(1)), (1, q(-1))]);
        assert_eq!(a.g(0, 0), &q(2));
        assert_eq!(a.g(2, 3), &q(1));
    }

    #[test]
    fn dual_numbers_beta() {
        let a = dual_numbers();
        assert_eq!(a.beta(&Element::basis(2, 0)), DualVector::basis(2, 1));
        assert_eq!(a.beta(&Element::basis(2, 1)), DualVector::basis(2, 0));
    }

    #[test]
    fn dual_numbers_coproduct() {
        let a = dual_numbers();
        // Δ(x*) = 1*⊗x* + x*⊗1*, Δ(1*) = 1*⊗1*
        assert_eq!(a.comultiply(&DualVector::basis(2, 1), 2).unwrap(), vec![q(0), q(1), q(1), q(0)]);
        assert_eq!(a.comultiply(&DualVector::basis(2, 0), 2).unwrap(), vec![q(1), q(0), q(0), q(0)]);
        assert_eq!(a.comultiply(&DualVector::basis(2, 0), 1), Err(AlgebraError::Arity(1)));
    }

    #[test]
    fn cyclic_bracket_examples() {
        let a = dual_numbers();
        let b1 = a.beta(&a.unit());
        assert_eq!(a.cyclic_bracket(&[b1]).unwrap(), a.g(0, 0).clone());
        let bx = a.beta(&Element::basis(2, 1));
        assert_eq!(a.cyclic_bracket(&[bx.clone(), bx]).unwrap(), q(0));
        assert_eq!(a.cyclic_bracket(&[]), Err(AlgebraError::EmptyBracket));
    }

    #[test]
    fn counit_and_coassociativity_of_comultiply() {
        for a in all_builtins() {
            let d = a.dim();
            for k in 0..d {
                let c = DualVector::basis(d, k);
                let t3 = a.comultiply(&c, 3).unwrap();
                let t2 = a.comultiply(&c, 2).unwrap();
                // contracting any factor with the unit
                for slot in 0..3 {
                    for (i, j) in itertools::iproduct!(0..d, 0..d) {
                        let mut idx = vec![i, j];
                        idx.insert(slot, 0);
                        let flat = (idx[0] * d + idx[1]) * d + idx[2];
                        assert_eq!(t3[flat], t2[i * d + j]);
                    }
                }
                // both bracketings of Δ² agree with c(e_i e_j e_k)
                for (i, j, l) in itertools::iproduct!(0..d, 0..d, 0..d) {
                    let ei = Element::basis(d, i);
                    let ej = Element::basis(d, j);
                    let el = Element::basis(d, l);
                    let left = c.eval(&a.multiply(&a.multiply(&ei, &ej), &el));
                    let right = c.eval(&a.multiply(&ei, &a.multiply(&ej, &el)));
                    assert_eq!(left, right);
                    assert_eq!(t3[(i * d + j) * d + l], left);
                }
            }
        }
    }

    #[test]
    fn chord_tensor_contracts_to_cyclic_bracket() {
        for a in all_builtins() {
            let d = a.dim();
            let t = a.chord_tensor(3);
            let cs: Vec<DualVector> =
                (0..3).map(|k| DualVector((0..d).map(|i| q(((i * 7 + k * 3) % 5) as i64 - 2)).collect())).collect();
            let contracted: Q = t
                .iter()
                .map(|(w, v)| v * &(0..3).map(|k| cs[k].0[w[k]].clone()).fold(Q::one(), |x, y| x * y))
                .sum();
            assert_eq!(contracted, a.cyclic_bracket(&cs).unwrap());
        }
    }

    #[test]
    fn json_round_trip() {
        for a in all_builtins() {
            let v = a.to_json();
            let b = FrobeniusAlgebra::from_json(&v).unwrap();
            assert_eq!(json::canonical_string(&b.to_json()), json::canonical_string(&v));
        }
        let mut v = dual_numbers().to_json();
        v["multiplication"][0][1] = serde_json::json!(7);
        let err = FrobeniusAlgebra::from_json(&v).unwrap_err();
        assert_eq!(err.path, "$.multiplication[0][1]");
    }

    fn elem(d: usize) -> impl Strategy<Value = Element> {
        proptest::collection::vec(-3i64..=3, d).prop_map(|v| Element(v.into_iter().map(q).collect()))
    }

    proptest! {
        #[test]
        fn beta_gamma_inverse_and_bimodule(i in 0usize..5, seed in proptest::collection::vec(-3i64..=3, 12)) {
            let a = &all_builtins()[i];
            let d = a.dim();
            let x = Element(seed[..d].iter().map(|&v| q(v)).collect());
            let y = Element(seed[4..4 + d].iter().map(|&v| q(v)).collect());
            let z = Element(seed[8..8 + d].iter().map(|&v| q(v)).collect());
            prop_assert_eq!(a.gamma(&a.beta(&x)), x.clone());
            prop_assert_eq!(a.beta(&x).eval(&y), a.pair(&x, &y));
            // ⟨xy, z⟩ = ⟨x, yz⟩ = ⟨y, zx⟩
            let xy_z = a.pair(&a.multiply(&x, &y), &z);
            prop_assert_eq!(&xy_z, &a.pair(&x, &a.multiply(&y, &z)));
            prop_assert_eq!(&xy_z, &a.pair(&y, &a.multiply(&z, &x)));
        }

        #[test]
        fn cyclic_bracket_rotation_invariant(i in 0usize..5, cs in proptest::collection::vec(elem(4), 3)) {
            let a = &all_builtins()[i];
            let d = a.dim();
            let cs: Vec<DualVector> = cs.into_iter().map(|e| DualVector(e.0[..d].to_vec())).collect();
            let v = a.cyclic_bracket(&cs).unwrap();
            let mut rot = cs.clone();
            for _ in 0..3 {
                rot.rotate_left(1);
                prop_assert_eq!(&a.cyclic_bracket(&rot).unwrap(), &v);
            }
        }
    }
}
