//! Affine forms over real unknowns with exact coefficients, polynomials of
//! such forms, and the grade-separated rational solver.

use super::exact::ExactCoeff;
use super::SeriesError;
use rug::Rational;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

/// Real unknowns of the perturbative problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    /// Coefficient of u^d in A_n(u).
    A { n: i32, d: u32 },
    /// Real part of C_n.
    CRe(i32),
    /// Imaginary part of C_n.
    CIm(i32),
}

impl Var {
    pub fn order(&self) -> i32 {
        match *self {
            Var::A { n, .. } | Var::CRe(n) | Var::CIm(n) => n,
        }
    }

    fn key(&self) -> (i32, u8, u32) {
        match *self {
            Var::CRe(n) => (n, 0, 0),
            Var::CIm(n) => (n, 0, 1),
            Var::A { n, d } => (n, 1, d),
        }
    }
}

impl Ord for Var {
    fn cmp(&self, o: &Self) -> Ordering {
        self.key().cmp(&o.key())
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Quadratic monomials collected while multiplying affine forms, keyed by
/// (polynomial degree, unknown pair).
pub type QuadSink = BTreeMap<(usize, Var, Var), ExactCoeff>;

/// c + Σ_v coeff_v · v with every unknown v real.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Affine {
    pub c: ExactCoeff,
    pub lin: BTreeMap<Var, ExactCoeff>,
}

impl Affine {
    pub fn constant(c: ExactCoeff) -> Self {
        Self { c, lin: BTreeMap::new() }
    }

    pub fn var(v: Var) -> Self {
        let mut lin = BTreeMap::new();
        lin.insert(v, ExactCoeff::one());
        Self { c: ExactCoeff::zero(), lin }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero() && self.lin.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.lin.is_empty()
    }

    fn add_lin(&mut self, v: Var, c: &ExactCoeff) {
        if c.is_zero() {
            return;
        }
        let e = self.lin.entry(v).or_default();
        *e += c;
        if e.is_zero() {
            self.lin.remove(&v);
        }
    }

    pub fn add_assign(&mut self, o: &Affine) {
        self.c += &o.c;
        for (v, c) in &o.lin {
            self.add_lin(*v, c);
        }
    }

    pub fn sub_assign(&mut self, o: &Affine) {
        self.c -= &o.c;
        for (v, c) in &o.lin {
            self.add_lin(*v, &-c);
        }
    }

    pub fn scale(&self, k: &ExactCoeff) -> Affine {
        if k.is_zero() {
            return Affine::default();
        }
        let mut out = Affine::constant(&self.c * k);
        for (v, c) in &self.lin {
            out.add_lin(*v, &(c * k));
        }
        out
    }

    /// Complex conjugate (unknowns are real).
    pub fn conj(&self) -> Affine {
        Affine {
            c: self.c.conj(),
            lin: self.lin.iter().map(|(v, c)| (*v, c.conj())).collect(),
        }
    }

    fn map_coeffs(&self, f: impl Fn(&ExactCoeff) -> ExactCoeff) -> Affine {
        let mut out = Affine::constant(f(&self.c));
        for (v, c) in &self.lin {
            out.add_lin(*v, &f(c));
        }
        out
    }

    pub fn re(&self) -> Affine {
        self.map_coeffs(ExactCoeff::re)
    }

    pub fn im(&self) -> Affine {
        self.map_coeffs(ExactCoeff::im)
    }

    /// Product; bilinear terms go to `quad` at polynomial degree `deg`.
    pub fn mul(&self, o: &Affine, deg: usize, quad: &mut QuadSink) -> Affine {
        let mut out = Affine::constant(&self.c * &o.c);
        for (v, c) in &o.lin {
            out.add_lin(*v, &(&self.c * c));
        }
        for (v, c) in &self.lin {
            out.add_lin(*v, &(c * &o.c));
        }
        for (v1, c1) in &self.lin {
            for (v2, c2) in &o.lin {
                let (a, b) = if v1 <= v2 { (*v1, *v2) } else { (*v2, *v1) };
                let e = quad.entry((deg, a, b)).or_default();
                *e += &(c1 * c2);
                if e.is_zero() {
                    quad.remove(&(deg, a, b));
                }
            }
        }
        out
    }

    /// Replace solved unknowns by their affine values.
    pub fn substitute(&self, sol: &HashMap<Var, Affine>) -> Affine {
        if !self.lin.keys().any(|v| sol.contains_key(v)) {
            return self.clone();
        }
        let mut out = Affine::constant(self.c.clone());
        for (v, c) in &self.lin {
            match sol.get(v) {
                Some(val) => out.add_assign(&val.scale(c)),
                None => out.add_lin(*v, c),
            }
        }
        out
    }
}

/// Polynomial in one variable with affine coefficients (index = degree).
pub type APoly = Vec<Affine>;

pub fn ap_add(a: &mut APoly, b: &APoly) {
    if a.len() < b.len() {
        a.resize(b.len(), Affine::default());
    }
    for (x, y) in a.iter_mut().zip(b) {
        x.add_assign(y);
    }
}

pub fn ap_mul(a: &APoly, b: &APoly, quad: &mut QuadSink) -> APoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Affine::default(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let p = x.mul(y, i + j, quad);
            out[i + j].add_assign(&p);
        }
    }
    out
}

/// p(x) ↦ conj(p(-x̄)): conjugate coefficients and flip odd degrees.
pub fn ap_conj_reflect(a: &APoly) -> APoly {
    a.iter()
        .enumerate()
        .map(|(d, c)| {
            let c = c.conj();
            if d % 2 == 1 {
                c.scale(&ExactCoeff::rational(Rational::from(-1)))
            } else {
                c
            }
        })
        .collect()
}

pub fn ap_trim(a: &mut APoly) {
    while a.last().is_some_and(Affine::is_zero) {
        a.pop();
    }
}

/// Solve real equations Σ_v e_v v + e_0 = 0.
///
/// Every nonzero coefficient must be a single-grade monomial r·s^{g_i - h_v},
/// consistent with a grade g_i per equation and h_v per unknown. Scaling out
/// the grades leaves a rational matrix, eliminated exactly with the constant
/// terms carried as graded right-hand sides. Pivot unknowns (earliest in
/// [`Var`] order) are returned as affine forms in the remaining free ones.
pub fn solve_graded(eqs: &[Affine]) -> Result<HashMap<Var, Affine>, SeriesError> {
    let eqs: Vec<&Affine> = eqs.iter().filter(|e| !e.is_zero()).collect();
    for e in &eqs {
        if e.is_constant() {
            return Err(SeriesError::Inconsistent(format!("constant equation {} = 0", e.c)));
        }
        if !e.c.is_real() || e.lin.values().any(|c| !c.is_real()) {
            return Err(SeriesError::Inconsistent("equation with complex coefficients".into()));
        }
    }
    let mut vars: Vec<Var> = eqs.iter().flat_map(|e| e.lin.keys().copied()).collect();
    vars.sort();
    vars.dedup();
    let col: HashMap<Var, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let (m, nv) = (eqs.len(), vars.len());

    // Grade assignment by graph traversal: exponent(i, v) = g_i - h_v.
    let mut entries: Vec<Vec<(usize, i32, Rational)>> = vec![Vec::new(); m];
    let mut by_var: Vec<Vec<(usize, i32)>> = vec![Vec::new(); nv];
    for (i, e) in eqs.iter().enumerate() {
        for (v, c) in &e.lin {
            let (k, a, _) = c
                .single_grade()
                .ok_or_else(|| SeriesError::Inconsistent(format!("coefficient of {v:?} is not a monomial: {c}")))?;
            let j = col[v];
            entries[i].push((j, k, a.clone()));
            by_var[j].push((i, k));
        }
    }
    let mut g: Vec<Option<i32>> = vec![None; m];
    let mut h: Vec<Option<i32>> = vec![None; nv];
    for start in 0..m {
        if g[start].is_some() {
            continue;
        }
        g[start] = Some(0);
        let mut stack = vec![(true, start)];
        while let Some((is_eq, idx)) = stack.pop() {
            if is_eq {
                let gi = g[idx].unwrap();
                for (j, k, _) in &entries[idx] {
                    let want = gi - k;
                    match h[*j] {
                        Some(x) if x != want => return Err(SeriesError::Inconsistent("grading conflict".into())),
                        Some(_) => {}
                        None => {
                            h[*j] = Some(want);
                            stack.push((false, *j));
                        }
                    }
                }
            } else {
                let hj = h[idx].unwrap();
                for (i, k) in &by_var[idx] {
                    let want = hj + k;
                    match g[*i] {
                        Some(x) if x != want => return Err(SeriesError::Inconsistent("grading conflict".into())),
                        Some(_) => {}
                        None => {
                            g[*i] = Some(want);
                            stack.push((true, *i));
                        }
                    }
                }
            }
        }
    }
    let g: Vec<i32> = g.into_iter().map(Option::unwrap).collect();
    let h: Vec<i32> = h.into_iter().map(Option::unwrap).collect();

    let mut mat: Vec<Vec<Rational>> = vec![vec![Rational::new(); nv]; m];
    let mut rhs: Vec<ExactCoeff> = Vec::with_capacity(m);
    for (i, e) in eqs.iter().enumerate() {
        for (j, _, a) in &entries[i] {
            mat[i][*j] = a.clone();
        }
        rhs.push((-&e.c).shift(-g[i]));
    }

    // Reduced row echelon form over ℚ.
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for c in 0..nv {
        let Some(p) = (row..m).find(|&r| mat[r][c] != 0) else { continue };
        mat.swap(row, p);
        rhs.swap(row, p);
        let inv = Rational::from(1) / mat[row][c].clone();
        for x in mat[row].iter_mut() {
            *x *= &inv;
        }
        rhs[row] = rhs[row].scale(&inv);
        for r in 0..m {
            if r == row || mat[r][c] == 0 {
                continue;
            }
            let f = mat[r][c].clone();
            for k in 0..nv {
                if mat[row][k] != 0 {
                    let t = Rational::from(&f * &mat[row][k]);
                    mat[r][k] -= t;
                }
            }
            let t = rhs[row].scale(&f);
            rhs[r] -= &t;
        }
        pivots.push((row, c));
        row += 1;
        if row == m {
            break;
        }
    }
    for r in row..m {
        if !rhs[r].is_zero() {
            return Err(SeriesError::Inconsistent(format!("incompatible row with right-hand side {}", rhs[r])));
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|p| p.1).collect();
    let mut sol = HashMap::new();
    for (r, c) in pivots {
        let mut val = Affine::constant(rhs[r].shift(h[c]));
        for f in 0..nv {
            if f != c && mat[r][f] != 0 && !pivot_cols.contains(&f) {
                let coef = ExactCoeff::monomial(h[c] - h[f], Rational::from(-&mat[r][f]), Rational::new());
                val.add_lin(vars[f], &coef);
            }
        }
        sol.insert(vars[c], val);
    }
    Ok(sol)
}
