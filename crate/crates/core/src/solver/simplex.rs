//! Bounded dual simplex on `A x − s = 0` with an explicit dense basis inverse.

use super::SolverError;
use crate::mip::{MilpModel, Sense};

const PRIMAL_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 100;
const BLAND_AFTER: usize = 50;
/// Stand-in for a missing bound that dual feasibility would require.
const ARTIFICIAL: f64 = 1e9;

/// An LP in computational form. Structural columns come first, then one
/// logical per kept row with bounds taken from the row sense. Rows with a
/// single term are folded into variable bounds.
#[derive(Debug, Clone)]
pub struct LpForm {
    pub n: usize,
    pub m: usize,
    cols: Vec<Vec<(usize, f64)>>,
    /// Minimization costs of the structurals.
    cost: Vec<f64>,
    base_lb: Vec<f64>,
    base_ub: Vec<f64>,
    obj_constant: f64,
    /// A row with no terms is violated, or singleton rows crossed bounds.
    pub trivially_infeasible: bool,
}

impl LpForm {
    pub fn new(model: &MilpModel) -> Self {
        let n = model.vars.len();
        let mut lb: Vec<f64> = model.vars.iter().map(|v| v.lb).collect();
        let mut ub: Vec<f64> = model.vars.iter().map(|v| v.ub).collect();
        let mut cols = vec![Vec::new(); n];
        let mut row_lb = Vec::new();
        let mut row_ub = Vec::new();
        let mut bad = false;
        for c in &model.cons {
            let (lo, hi) = match c.sense {
                Sense::Le => (f64::NEG_INFINITY, c.rhs),
                Sense::Ge => (c.rhs, f64::INFINITY),
                Sense::Eq => (c.rhs, c.rhs),
            };
            match c.terms.as_slice() {
                [] => bad |= lo > PRIMAL_TOL || hi < -PRIMAL_TOL,
                &[(j, a)] => {
                    let (l, h) = if a > 0.0 { (lo / a, hi / a) } else { (hi / a, lo / a) };
                    lb[j] = lb[j].max(l);
                    ub[j] = ub[j].min(h);
                }
                terms => {
                    let r = row_lb.len();
                    for &(j, a) in terms {
                        cols[j].push((r, a));
                    }
                    row_lb.push(lo);
                    row_ub.push(hi);
                }
            }
        }
        for j in 0..n {
            if lb[j] > ub[j] {
                if lb[j] - ub[j] <= PRIMAL_TOL * (1.0 + lb[j].abs()) {
                    ub[j] = lb[j];
                } else {
                    bad = true;
                }
            }
        }
        let m = row_lb.len();
        lb.extend(row_lb);
        ub.extend(row_ub);
        let cost = model.objective_dense().into_iter().map(|c| -c).collect();
        LpForm { n, m, cols, cost, base_lb: lb, base_ub: ub, obj_constant: model.obj_constant, trivially_infeasible: bad }
    }

    /// Structural bounds after folding singleton rows.
    pub fn structural_bounds(&self) -> (&[f64], &[f64]) {
        (&self.base_lb[..self.n], &self.base_ub[..self.n])
    }

    fn cost_of(&self, j: usize) -> f64 {
        if j < self.n {
            self.cost[j]
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Maximization objective including the constant; `-inf` when infeasible.
    pub objective: f64,
    pub x: Vec<f64>,
    pub iterations: usize,
}

/// Solver state that survives between solves, so a re-solve after bound
/// changes starts from the previous optimal basis.
#[derive(Debug, Clone)]
pub struct LpWorkspace {
    form: LpForm,
    basis: Vec<usize>,
    /// Basis position of each column, `usize::MAX` when nonbasic.
    pos: Vec<usize>,
    at_upper: Vec<bool>,
    binv: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    x: Vec<f64>,
    d: Vec<f64>,
    since_refactor: usize,
    pub max_iterations: usize,
}

impl LpWorkspace {
    pub fn new(form: LpForm) -> Self {
        let (n, m) = (form.n, form.m);
        let mut ws = LpWorkspace {
            basis: Vec::new(),
            pos: Vec::new(),
            at_upper: vec![false; n + m],
            binv: Vec::new(),
            lb: form.base_lb.clone(),
            ub: form.base_ub.clone(),
            x: vec![0.0; n + m],
            d: vec![0.0; n + m],
            since_refactor: 0,
            max_iterations: 50 * (n + m) + 10_000,
            form,
        };
        ws.slack_basis();
        ws
    }

    pub fn form(&self) -> &LpForm {
        &self.form
    }

    fn slack_basis(&mut self) {
        let (n, m) = (self.form.n, self.form.m);
        self.basis = (n..n + m).collect();
        self.pos = vec![usize::MAX; n + m];
        for (i, &j) in self.basis.iter().enumerate() {
            self.pos[j] = i;
        }
        self.binv = vec![0.0; m * m];
        for i in 0..m {
            self.binv[i * m + i] = -1.0;
        }
        self.since_refactor = 0;
    }

    /// Dot product of a basis-inverse row with column `j` of `[A  −I]`.
    fn row_dot(&self, row: &[f64], j: usize) -> f64 {
        if j < self.form.n {
            self.form.cols[j].iter().map(|&(r, a)| row[r] * a).sum()
        } else {
            -row[j - self.form.n]
        }
    }

    fn refactor(&mut self) {
        let m = self.form.m;
        let n = self.form.n;
        let mut b = vec![0.0; m * m];
        for (c, &j) in self.basis.iter().enumerate() {
            if j < n {
                for &(r, a) in &self.form.cols[j] {
                    b[r * m + c] = a;
                }
            } else {
                b[(j - n) * m + c] = -1.0;
            }
        }
        match invert(&b, m) {
            Some(inv) => {
                self.binv = inv;
                self.since_refactor = 0;
            }
            None => self.slack_basis(),
        }
    }

    fn compute_duals(&mut self) {
        let (n, m) = (self.form.n, self.form.m);
        let mut y = vec![0.0; m];
        for (i, &j) in self.basis.iter().enumerate() {
            let c = self.form.cost_of(j);
            if c != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for (yk, b) in y.iter_mut().zip(row) {
                    *yk += c * b;
                }
            }
        }
        for j in 0..n {
            self.d[j] = self.form.cost[j] - self.form.cols[j].iter().map(|&(r, a)| y[r] * a).sum::<f64>();
        }
        self.d[n..n + m].copy_from_slice(&y[..m]);
        for &j in &self.basis {
            self.d[j] = 0.0;
        }
    }

    /// Puts every nonbasic column at the bound its reduced cost asks for.
    /// Returns whether an artificial bound had to be used.
    fn place_nonbasics(&mut self) -> bool {
        let mut artificial = false;
        for j in 0..self.form.n + self.form.m {
            if self.pos[j] != usize::MAX {
                continue;
            }
            let (l, u) = (self.lb[j], self.ub[j]);
            if l == u {
                self.x[j] = l;
                continue;
            }
            let want_upper = if self.d[j] > DUAL_TOL {
                false
            } else if self.d[j] < -DUAL_TOL {
                true
            } else {
                (self.at_upper[j] && u.is_finite()) || !l.is_finite()
            };
            self.at_upper[j] = want_upper;
            self.x[j] = if want_upper {
                if u.is_finite() {
                    u
                } else {
                    artificial = true;
                    ARTIFICIAL
                }
            } else if l.is_finite() {
                l
            } else {
                artificial = true;
                -ARTIFICIAL
            };
        }
        artificial
    }

    fn compute_primal(&mut self) {
        let (n, m) = (self.form.n, self.form.m);
        let mut rhs = vec![0.0; m];
        for j in 0..n + m {
            if self.pos[j] != usize::MAX || self.x[j] == 0.0 {
                continue;
            }
            if j < n {
                for &(r, a) in &self.form.cols[j] {
                    rhs[r] -= a * self.x[j];
                }
            } else {
                rhs[j - n] += self.x[j];
            }
        }
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            self.x[self.basis[i]] = row.iter().zip(&rhs).map(|(b, r)| b * r).sum();
        }
    }

    /// Solves with structural bounds intersected with `lb`/`ub`.
    pub fn solve(&mut self, lb: &[f64], ub: &[f64]) -> Result<LpSolution, SolverError> {
        let (n, m) = (self.form.n, self.form.m);
        let infeasible = |iterations| LpSolution {
            status: LpStatus::Infeasible,
            objective: f64::NEG_INFINITY,
            x: Vec::new(),
            iterations,
        };
        if self.form.trivially_infeasible {
            return Ok(infeasible(0));
        }
        for j in 0..n {
            self.lb[j] = self.form.base_lb[j].max(lb[j]);
            self.ub[j] = self.form.base_ub[j].min(ub[j]);
            if self.lb[j] > self.ub[j] {
                if self.lb[j] - self.ub[j] <= PRIMAL_TOL * (1.0 + self.lb[j].abs()) {
                    self.ub[j] = self.lb[j];
                } else {
                    return Ok(infeasible(0));
                }
            }
        }
        let mut degenerate = 0usize;
        let mut iterations = 0usize;
        let mut rho = vec![0.0; m];
        let mut alpha = vec![0.0; n + m];
        let mut cands: Vec<(usize, f64, f64)> = Vec::new();
        loop {
            if iterations > self.max_iterations {
                return Err(SolverError::Stall { iterations });
            }
            self.compute_duals();
            let artificial = self.place_nonbasics();
            self.compute_primal();
            let bland = degenerate > BLAND_AFTER;

            // leaving row
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let j = self.basis[i];
                let v = self.x[j];
                let below = self.lb[j] - v;
                let above = v - self.ub[j];
                let viol = below.max(above);
                if viol <= PRIMAL_TOL * (1.0 + v.abs()) {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some((r, best)) => {
                        if bland {
                            j < self.basis[r]
                        } else {
                            viol > best
                        }
                    }
                };
                if better {
                    leave = Some((i, viol));
                }
            }
            let Some((r, delta)) = leave else {
                if artificial {
                    return Err(SolverError::Unbounded);
                }
                let x: Vec<f64> = self.x[..n].to_vec();
                let objective = -x.iter().zip(&self.form.cost).map(|(a, c)| a * c).sum::<f64>() + self.form.obj_constant;
                return Ok(LpSolution { status: LpStatus::Optimal, objective, x, iterations });
            };
            let leaving = self.basis[r];
            let s = if self.x[leaving] < self.lb[leaving] { 1.0 } else { -1.0 };

            rho.copy_from_slice(&self.binv[r * m..(r + 1) * m]);
            cands.clear();
            for j in 0..n + m {
                if self.pos[j] != usize::MAX || self.lb[j] == self.ub[j] {
                    continue;
                }
                let a = self.row_dot(&rho, j);
                alpha[j] = a;
                if a.abs() < PIVOT_TOL {
                    continue;
                }
                let up = self.at_upper[j];
                let eligible = if up { s * a > 0.0 } else { s * a < 0.0 };
                if !eligible {
                    continue;
                }
                let dj = if up { (-self.d[j]).max(0.0) } else { self.d[j].max(0.0) };
                cands.push((j, dj / a.abs(), a.abs()));
            }
            if cands.is_empty() {
                return Ok(infeasible(iterations));
            }
            cands.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            // bound-flipping pass: pass breakpoints while the infeasibility stays positive
            let mut slope = delta;
            let mut stop = cands.len() - 1;
            for (t, &(j, _, a)) in cands.iter().enumerate() {
                let range = self.ub[j] - self.lb[j];
                let next = slope - a * range;
                if t + 1 < cands.len() && range.is_finite() && next > 0.0 {
                    slope = next;
                } else {
                    stop = t;
                    break;
                }
            }
            let theta = cands[stop].1;
            let mut q = stop;
            for (t, c) in cands.iter().enumerate().skip(stop + 1) {
                if c.1 > theta + 1e-12 {
                    break;
                }
                let better = if bland { c.0 < cands[q].0 } else { c.2 > cands[q].2 };
                if better {
                    q = t;
                }
            }
            for &(j, _, _) in &cands[..stop] {
                self.at_upper[j] = !self.at_upper[j];
            }
            let entering = cands[q].0;
            // pivot column
            let mut w = vec![0.0; m];
            if entering < n {
                for &(row, a) in &self.form.cols[entering] {
                    for i in 0..m {
                        w[i] += self.binv[i * m + row] * a;
                    }
                }
            } else {
                let k = entering - n;
                for i in 0..m {
                    w[i] = -self.binv[i * m + k];
                }
            }
            let piv = w[r];
            if piv.abs() < 1e-11 {
                self.refactor();
                iterations += 1;
                continue;
            }
            {
                let (head, rest) = self.binv.split_at_mut(r * m);
                let (prow, tail) = rest.split_at_mut(m);
                for v in prow.iter_mut() {
                    *v /= piv;
                }
                for (i, chunk) in head.chunks_mut(m).enumerate() {
                    let f = w[i];
                    if f != 0.0 {
                        for (a, b) in chunk.iter_mut().zip(prow.iter()) {
                            *a -= f * b;
                        }
                    }
                }
                for (i, chunk) in tail.chunks_mut(m).enumerate() {
                    let f = w[r + 1 + i];
                    if f != 0.0 {
                        for (a, b) in chunk.iter_mut().zip(prow.iter()) {
                            *a -= f * b;
                        }
                    }
                }
            }
            self.basis[r] = entering;
            self.pos[entering] = r;
            self.pos[leaving] = usize::MAX;
            self.at_upper[leaving] = s < 0.0;
            degenerate = if theta < 1e-12 { degenerate + 1 } else { 0 };
            iterations += 1;
            self.since_refactor += 1;
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor();
            }
        }
    }
}

/// Gauss-Jordan inverse with partial pivoting; `None` when singular.
fn invert(a: &[f64], m: usize) -> Option<Vec<f64>> {
    let mut a = a.to_vec();
    let mut inv = vec![0.0; m * m];
    for i in 0..m {
        inv[i * m + i] = 1.0;
    }
    for c in 0..m {
        let p = (c..m).max_by(|&x, &y| a[x * m + c].abs().total_cmp(&a[y * m + c].abs()))?;
        if a[p * m + c].abs() < 1e-11 {
            return None;
        }
        if p != c {
            for k in 0..m {
                a.swap(p * m + k, c * m + k);
                inv.swap(p * m + k, c * m + k);
            }
        }
        let d = a[c * m + c];
        for k in 0..m {
            a[c * m + k] /= d;
            inv[c * m + k] /= d;
        }
        for r in 0..m {
            if r == c {
                continue;
            }
            let f = a[r * m + c];
            if f == 0.0 {
                continue;
            }
            for k in 0..m {
                a[r * m + k] -= f * a[c * m + k];
                inv[r * m + k] -= f * inv[c * m + k];
            }
        }
    }
    Some(inv)
}

/// LP relaxation of `model`: integrality markers are ignored.
pub fn solve_lp(model: &MilpModel) -> Result<LpSolution, SolverError> {
    let mut ws = LpWorkspace::new(LpForm::new(model));
    let n = model.vars.len();
    ws.solve(&vec![f64::NEG_INFINITY; n], &vec![f64::INFINITY; n])
}
