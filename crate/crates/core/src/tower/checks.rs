//! Certified boundary values `curly E^Q_{P,m}(z)` and the identities they satisfy
//! in the tower: coherence, the Galois action, traces and the lattice of
//! conjugates in the fixed field `M` of `mu_{q-1}`.

use num_rational::Ratio;

use super::galois::{division_point_check, galois_conjugate, trace_to_m, DivisionPoint, DivisionPointReport};
use super::Tower;
use crate::error::{LtError, Result};
use crate::exponentials::{curly_e, CurlyE};
use crate::formal_group::LubinTate;
use crate::padic::{linalg, Elem, Valuation};

/// Truncation parameters shared by the checks.
#[derive(Clone, Debug)]
pub struct CheckOptions {
    /// Threshold for "is zero" certificates, in pi-digits.
    pub t: u32,
    /// Series degree for `curly E` and its boundary sums.
    pub d_boundary: usize,
    /// Degree of the bracket series `[u]_P`.
    pub d_bracket: usize,
    /// Total degree of `F_P` used for point addition.
    pub d_group: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { t: 10, d_boundary: 300, d_bracket: 90, d_group: 90 }
    }
}

/// `curly E^Q_{P,m}` for every `1 <= m <= n`, all over the level-`n` tower.
#[derive(Clone, Debug)]
pub struct CurlyFamily {
    pub levels: Vec<CurlyE>,
}

impl CurlyFamily {
    pub fn new(lt: &LubinTate, tower: &Tower, d: usize) -> Result<CurlyFamily> {
        let levels = (1..=tower.level()).map(|m| curly_e(lt, tower, m, d)).collect::<Result<Vec<_>>>()?;
        Ok(CurlyFamily { levels })
    }

    pub fn level(&self, m: usize) -> &CurlyE {
        &self.levels[m - 1]
    }

    /// `curly E_m(z)` for `v_p(z) >= 0`, with the precision cut down to the
    /// stabilised part of the sum.
    pub fn boundary_value(&self, m: usize, z: &Elem) -> Result<Elem> {
        let s = &self.level(m).series;
        if z.is_exact_zero() {
            return Ok(Elem::zero(s.ring()));
        }
        let window = (s.degree() / 10).max(4);
        let b = s.eval_boundary(z, window)?;
        Ok(b.value.with_abs_prec(b.achieved_prec.floor().to_integer()))
    }
}

/// `pi = pi'` modulo `P_K^(n+1)`.
pub fn same_field_hypothesis(lt: &LubinTate, tower: &Tower) -> Result<bool> {
    let vpi = lt.pi().valuation().exact().ok_or(LtError::IndeterminateValuation)?;
    let diff = lt.pi().sub_ref(tower.pi_prime());
    Ok(diff.valuation().certainly_at_least(vpi * Ratio::from_integer(tower.level() as i64 + 1)))
}

fn require_same_field(lt: &LubinTate, tower: &Tower) -> Result<()> {
    if !same_field_hypothesis(lt, tower)? {
        return Err(LtError::HypothesisViolated(format!(
            "pi and pi' differ modulo P_K^{}",
            tower.level() + 1
        )));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct Prop2Level {
    pub m: usize,
    pub value: Elem,
    pub division: DivisionPointReport,
    /// Lower bound for `v_p(s_m - omega_m)`.
    pub offset_from_omega: Ratio<i64>,
    /// `2 v_p(omega_m)`.
    pub offset_bound: Ratio<i64>,
}

#[derive(Clone, Debug)]
pub struct Prop2Report {
    pub levels: Vec<Prop2Level>,
    /// Lower bounds for `v_p(P(s_m) - s_{m-1})`, `m >= 2`; empty unless `pi = pi'`.
    pub coherence: Vec<Ratio<i64>>,
    pub threshold: Ratio<i64>,
    pub primitive: bool,
    pub congruent: bool,
    pub coherent: bool,
}

impl Prop2Report {
    pub fn pass(&self) -> bool {
        self.primitive && self.congruent && self.coherent
    }
}

/// Boundary values `s_m = curly E_m(1)` are primitive `m`-th division points
/// of `P`, congruent to `omega_m` modulo `omega_m^2`, and (when `pi = pi'`)
/// form a coherent set of roots.
pub fn prop2_check(lt: &LubinTate, tower: &Tower, fam: &CurlyFamily, opts: &CheckOptions) -> Result<Prop2Report> {
    require_same_field(lt, tower)?;
    let one = Elem::one(lt.ring());
    let vpi = lt.pi().valuation().exact().ok_or(LtError::IndeterminateValuation)?;
    let threshold = vpi * Ratio::from_integer(opts.t as i64);
    let mut levels = Vec::new();
    for m in 1..=tower.level() {
        let value = fam.boundary_value(m, &one)?;
        let division = division_point_check(lt, &value, m, opts.t)?;
        let w = tower.omega(m);
        let offset_bound = w.valuation().exact().ok_or(LtError::IndeterminateValuation)? * Ratio::from_integer(2);
        let offset_from_omega = value.sub_ref(w).valuation().lower();
        levels.push(Prop2Level { m, value, division, offset_from_omega, offset_bound });
    }
    let mut coherence = Vec::new();
    if lt.pi().agrees_with(tower.pi_prime()) {
        for m in 2..=tower.level() {
            let image = lt.eval_p(&levels[m - 1].value)?;
            coherence.push(image.sub_ref(&levels[m - 2].value).valuation().lower());
        }
    }
    let primitive = levels.iter().all(|l| l.division.verdict == DivisionPoint::Primitive);
    let congruent = levels.iter().all(|l| l.offset_from_omega >= l.offset_bound);
    let coherent = coherence.iter().all(|v| *v >= threshold);
    Ok(Prop2Report { levels, coherence, threshold, primitive, congruent, coherent })
}

#[derive(Clone, Debug)]
pub struct Prop3Report {
    pub z: Vec<Elem>,
    pub lhs: Elem,
    pub rhs: Elem,
    /// Lower bound for `v_p(lhs - rhs)`.
    pub agreement: Ratio<i64>,
    pub threshold: Ratio<i64>,
}

impl Prop3Report {
    pub fn pass(&self) -> bool {
        self.agreement >= self.threshold
    }
}

/// `[sum z_i pi^i]_P(curly E_n(1))` against
/// `curly E_n(z_0) +_F curly E_{n-1}(z_1) +_F ... +_F curly E_1(z_{n-1})`,
/// with agreement required to `t` pi-digits.
pub fn prop3_check(lt: &LubinTate, tower: &Tower, fam: &CurlyFamily, z: &[Elem], opts: &CheckOptions) -> Result<Prop3Report> {
    require_same_field(lt, tower)?;
    let n = tower.level();
    if z.len() != n {
        return Err(LtError::InvalidParameter(format!("need {n} digits z_i, got {}", z.len())));
    }
    if z[0].is_zero() {
        return Err(LtError::InvalidParameter("z_0 must be a unit".into()));
    }
    let ring = lt.ring();
    let mut u = Elem::zero(ring);
    let mut pik = Elem::one(ring);
    for zi in z {
        u = u.add_ref(&zi.mul_ref(&pik));
        pik = pik.mul_ref(lt.pi());
    }
    let s = fam.boundary_value(n, &Elem::one(ring))?;
    let lhs = galois_conjugate(lt, &u, &s, opts.d_bracket)?;
    let mut terms = Vec::new();
    for (i, zi) in z.iter().enumerate() {
        if !zi.is_exact_zero() {
            terms.push(fam.boundary_value(n - i, zi)?);
        }
    }
    let rhs = lt.fg_sum(&terms, opts.d_group)?;
    let vpi = lt.pi().valuation().exact().ok_or(LtError::IndeterminateValuation)?;
    let threshold = vpi * Ratio::from_integer(opts.t as i64);
    let agreement = lhs.sub_ref(&rhs).valuation().lower();
    Ok(Prop3Report { z: z.to_vec(), lhs, rhs, agreement, threshold })
}

/// Every admissible digit vector: `z_0` Teichmuller, later digits Teichmuller or zero.
pub fn prop3_digit_vectors(tower: &Tower) -> Vec<Vec<Elem>> {
    let ctx = tower.ctx();
    let units = ctx.roots_of_unity();
    let mut with_zero = units.clone();
    with_zero.push(ctx.zero());
    let mut out: Vec<Vec<Elem>> = units.iter().map(|z| vec![z.clone()]).collect();
    for _ in 1..tower.level() {
        out = out
            .into_iter()
            .flat_map(|v| {
                with_zero.iter().map(move |z| {
                    let mut w = v.clone();
                    w.push(z.clone());
                    w
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug)]
pub struct AlphaReport {
    pub label: &'static str,
    pub v_p: Ratio<i64>,
    pub expected_v_p: Ratio<i64>,
    /// Valuation of the determinant of the coordinate matrix of the
    /// conjugates in the basis `beta^(1-q+i)`.
    pub det_valuation: Option<Ratio<i64>>,
}

impl AlphaReport {
    pub fn valuation_ok(&self) -> bool {
        self.v_p == self.expected_v_p
    }

    pub fn lattice_ok(&self) -> bool {
        self.det_valuation == Some(Ratio::from_integer(0))
    }
}

#[derive(Clone, Debug)]
pub struct Thm4Report {
    pub division: DivisionPointReport,
    pub trace_to_k: Elem,
    /// `(q-1) a_{q-1}`.
    pub trace_formula: Elem,
    pub trace_matches_formula: bool,
    pub trace_matches_negated_formula: bool,
    pub beta: Elem,
    /// `v(beta)` in units of the normalised valuation of the tower field.
    pub beta_v_l: i64,
    pub alphas: Vec<AlphaReport>,
    /// Representatives `1 + z pi` of `Gal(M/K)`, as `z`.
    pub representatives: Vec<Elem>,
}

impl Thm4Report {
    pub fn uniformizer_ok(&self, q: u64) -> bool {
        self.beta_v_l == q as i64 - 1
    }
}

/// Trace, uniformiser and lattice certificates for `curly E_2(1)` and the
/// fixed field `M` of `mu_{q-1}` in the level-2 tower. Needs
/// `v_p(a_{q-1}) = v_p(pi)` for `P = X^q + ... + a_{q-1} X^(q-1) + ... + pi X`.
pub fn thm4_check(lt: &LubinTate, tower: &Tower, fam: &CurlyFamily, opts: &CheckOptions) -> Result<Thm4Report> {
    if tower.level() != 2 {
        return Err(LtError::InvalidParameter("the trace certificates need the level-2 tower".into()));
    }
    let poly = lt
        .polynomial()
        .ok_or_else(|| LtError::HypothesisViolated("P must be a polynomial".into()))?;
    let q = lt.q() as usize;
    let a = &poly[q - 1];
    let vpi = lt.pi().valuation().exact().ok_or(LtError::IndeterminateValuation)?;
    if a.valuation() != Valuation::Exact(vpi) {
        return Err(LtError::HypothesisViolated(format!(
            "v_p(a_(q-1)) = {:?}, not v_p(pi) = {vpi}",
            a.valuation()
        )));
    }
    let vpi3 = vpi * Ratio::from_integer(3);
    if !lt.pi().sub_ref(tower.pi_prime()).valuation().certainly_at_least(vpi3) {
        return Err(LtError::HypothesisViolated("pi and pi' differ modulo P_K^3".into()));
    }
    let ctx = tower.ctx();
    let s = fam.boundary_value(2, &Elem::one(lt.ring()))?;
    let division = division_point_check(lt, &s, 2, opts.t)?;
    if division.verdict != DivisionPoint::Primitive {
        return Err(LtError::HypothesisViolated(format!("curly E_2(1) is not certified primitive: {:?}", division.verdict)));
    }

    let trace_to_k = tower.trace_to_k(&s);
    let trace_formula = a.mul_int(q as i64 - 1);
    let trace_matches_formula = trace_to_k.agrees_with(&trace_formula);
    let trace_matches_negated_formula = trace_to_k.agrees_with(&trace_formula.neg_ref());

    let beta = trace_to_m(tower, lt, &s, opts.d_bracket)?.value;
    let beta_v_l = tower.valuation(&beta)?.v_l;

    // Gal(M/K) through the representatives 1 + z pi
    let mut representatives = ctx.roots_of_unity();
    representatives.push(ctx.zero());
    let mut conj_betas = Vec::with_capacity(q);
    for z in &representatives {
        let u = Elem::one(lt.ring()).add_ref(&z.mul_ref(lt.pi()));
        let sz = galois_conjugate(lt, &u, &s, opts.d_bracket)?;
        conj_betas.push(trace_to_m(tower, lt, &sz, opts.d_bracket)?.value);
    }

    let e = ctx.e() as i64;
    let expected_v_p = Ratio::new(1 - q as i64, q as i64 * e);
    let qe = tower.elem(&ctx.elem(q as i64));
    let beta_pow = beta.pow(q as u64 - 1);
    // beta^i, i < q, as columns over K in the power basis of the tower
    let mut basis = Vec::with_capacity(q);
    let mut bi = Elem::one(tower.ring());
    for _ in 0..q {
        basis.push(tower.power_basis_coords(&bi));
        bi = bi.mul_ref(&beta);
    }
    let mut alphas = Vec::new();
    for (label, shift) in [("beta/pi", false), ("(beta+q)/pi", true)] {
        let lift = |b: &Elem| -> Result<Elem> {
            let b = if shift { b.add_ref(&qe) } else { b.clone() };
            b.div_ref(&tower.elem(lt.pi()))
        };
        let alpha = lift(&beta)?;
        let v_p = tower.valuation(&alpha)?.v_p;
        let mut rows = Vec::with_capacity(q);
        for cb in &conj_betas {
            // alpha_sigma beta^(q-1) = sum_i c_i beta^i
            let target = tower.power_basis_coords(&lift(cb)?.mul_ref(&beta_pow));
            let a: Vec<Vec<Elem>> = (0..tower.degree()).map(|r| (0..q).map(|i| basis[i][r].clone()).collect()).collect();
            rows.push(linalg::solve_consistent(a, target)?);
        }
        let det = linalg::det(rows)?;
        alphas.push(AlphaReport { label, v_p, expected_v_p, det_valuation: det.valuation().exact() });
    }
    Ok(Thm4Report {
        division,
        trace_to_k,
        trace_formula,
        trace_matches_formula,
        trace_matches_negated_formula,
        beta,
        beta_v_l,
        alphas,
        representatives,
    })
}
