//! Finite truncation towers standing in for infinite dimensional phantoms, with
//! finite-level effectiveness and subfactor checks.

use crate::algebra::AlgebraRef;
use crate::approximation::{hatted_zigzag_graph, ApproximationResult, CriterionData};
use crate::error::{inconsistent, input, Result};
use crate::field::Field;
use crate::hom::{hom_mats, is_homomorphism, subfactor_search, vectorize, SubfactorResult};
use crate::homological::{default_bound, pdim};
use crate::linalg::{is_zero_vec, Mat, Subspace, Vector};
use crate::module::{free_module, quotient, realize_graph, Module};
use crate::presentation::Path;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TowerPattern<E> {
    Zigzag(CriterionData),
    /// Zigzag whose tops x_2, x_3, … sit below new tops through the hat path.
    HattedZigzag(CriterionData, Path),
    /// L_{nk}: (⊕Λx_i)/(Λ(βx_1 − kαx_1) + Σ Λ(βx_i − kαx_i − αx_{i−1})).
    Lnk(E),
}

#[derive(Clone, Debug)]
pub struct Tower<F: Field> {
    pub modules: Vec<Module<F>>,
    /// ι_n: T_n → T_{n+1} as dim T_{n+1} × dim T_n matrices.
    pub injections: Vec<Mat<F>>,
    pub pattern: TowerPattern<F::E>,
    /// Whether every level was checked to have finite projective dimension.
    pub in_pinf: bool,
}

impl<F: Field> Tower<F> {
    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.modules.iter().map(|m| m.dim()).collect()
    }

    /// ι_{to-1} ∘ … ∘ ι_from.
    pub fn composite(&self, from: usize, to: usize) -> Mat<F> {
        let f = self.modules[from].field();
        let mut out = Mat::identity(f, self.modules[from].dim());
        for k in from..to {
            out = self.injections[k].mul(f, &out);
        }
        out
    }

    pub fn tag(&self) -> &'static str {
        match self.pattern {
            TowerPattern::Zigzag(_) => "zigzag",
            TowerPattern::HattedZigzag(..) => "hatted-zigzag",
            TowerPattern::Lnk(_) => "lnk",
        }
    }
}

/// The homomorphism sending the marked tops of `src` to `images`, if it exists.
pub fn hom_from_tops<F: Field>(src: &Module<F>, dst: &Module<F>, images: &[Vector<F>]) -> Option<Mat<F>> {
    let f = src.field();
    let homs = hom_mats(src, dst);
    let want: Vector<F> = images.concat();
    if homs.is_empty() {
        return is_zero_vec(f, &want).then(|| Mat::zeros(f, dst.dim(), src.dim()));
    }
    let cols: Vec<Vector<F>> = homs.iter().map(|h| src.tops.iter().flat_map(|t| h.apply(f, t)).collect()).collect();
    let sys = Mat::from_cols(f, want.len(), &cols);
    let c = sys.solve(f, &want)?;
    let mut out = Mat::zeros(f, dst.dim(), src.dim());
    for (h, x) in homs.iter().zip(&c) {
        out = out.add(f, &h.scale(f, x));
    }
    Some(out)
}

fn tower_from_levels<F: Field>(
    modules: Vec<Module<F>>,
    pattern: TowerPattern<F::E>,
    require_pinf: bool,
) -> Result<Tower<F>> {
    let f = modules[0].field().clone();
    let mut injections = Vec::new();
    for w in modules.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let images: Vec<Vector<F>> = b.tops[..a.tops.len()].to_vec();
        let Some(iota) = hom_from_tops(a, b, &images) else {
            return inconsistent("tower levels admit no map matching the tops");
        };
        if iota.rank(&f) != a.dim() || !is_homomorphism(a, b, &iota) {
            return inconsistent("tower map is not an injective homomorphism");
        }
        injections.push(iota);
    }
    let mut in_pinf = false;
    if require_pinf {
        let bound = default_bound(&modules[0].alg);
        for (i, m) in modules.iter().enumerate() {
            if pdim(m, bound).finite().is_none() {
                return inconsistent(format!("tower level {} has infinite projective dimension", i + 1));
            }
        }
        in_pinf = true;
    }
    Ok(Tower { modules, injections, pattern, in_pinf })
}

fn check_levels(n: usize) -> Result<()> {
    if n == 0 {
        return input("a tower needs at least one level");
    }
    Ok(())
}

/// M_1 ⊆ M_2 ⊆ … ⊆ M_N for zigzag data; x_i ↦ x_i.
pub fn build_zigzag_tower<F: Field>(alg: &AlgebraRef<F>, data: &CriterionData, n: usize) -> Result<Tower<F>> {
    build_hatted_zigzag_tower(alg, data, None, n)
}

/// Zigzag tower, optionally with x_i = h w_i for i ≥ 2.
pub fn build_hatted_zigzag_tower<F: Field>(
    alg: &AlgebraRef<F>,
    data: &CriterionData,
    hat: Option<&Path>,
    n: usize,
) -> Result<Tower<F>> {
    check_levels(n)?;
    let f = &alg.field;
    let mut modules = Vec::with_capacity(n);
    for k in 1..=n {
        let m = realize_graph(alg, &hatted_zigzag_graph(alg, data, k, hat)?)?;
        let tops = &m.tops;
        let x1 = &tops[0];
        if is_zero_vec(f, &m.act_path(&data.p[0], x1)) {
            return input("degenerate data: p_1 x_1 = 0");
        }
        modules.push(m);
    }
    let pattern = match hat {
        Some(h) => TowerPattern::HattedZigzag(data.clone(), h.clone()),
        None => TowerPattern::Zigzag(data.clone()),
    };
    tower_from_levels(modules, pattern, false)
}

/// L_{nk} with tops x̄_1..x̄_n over an algebra with arrows alpha, beta from the first vertex.
pub fn lnk_module<F: Field>(alg: &AlgebraRef<F>, k: &F::E, n: usize) -> Result<Module<F>> {
    let f = &alg.field;
    if f.is_zero(k) {
        return input("L_{nk} needs a nonzero scalar k");
    }
    check_levels(n)?;
    let q = alg.quiver();
    let (Some(a), Some(b)) = (q.arrow_index("alpha"), q.arrow_index("beta")) else {
        return input("L_{nk} needs arrows named alpha and beta");
    };
    if q.arrows[a].source != q.arrows[b].source || q.arrows[a].target != q.arrows[b].target {
        return input("alpha and beta must be parallel");
    }
    let e = q.arrows[a].source;
    let (p, _) = free_module(alg, &vec![e; n]);
    let tops = p.tops.clone();
    let mut rels = Vec::with_capacity(n);
    for i in 0..n {
        let bx = p.act(b, &tops[i]);
        let ax = p.act(a, &tops[i]);
        let mut r: Vector<F> = bx.iter().zip(&ax).map(|(u, v)| f.sub(u, &f.mul(k, v))).collect();
        if i > 0 {
            let prev = p.act(a, &tops[i - 1]);
            r = r.iter().zip(&prev).map(|(u, v)| f.sub(u, v)).collect();
        }
        rels.push(r);
    }
    let (m, proj) = quotient(&p, &p.generate(&rels));
    let images: Vec<Vector<F>> = tops.iter().map(|t| proj.apply(f, t)).collect();
    Ok(m.with_tops(images))
}

/// L_{1k} ⊆ L_{2k} ⊆ … ⊆ L_{Nk}, each level checked to have finite pdim.
pub fn build_lnk_tower<F: Field>(alg: &AlgebraRef<F>, k: &F::E, n: usize) -> Result<Tower<F>> {
    check_levels(n)?;
    let modules = (1..=n).map(|j| lnk_module(alg, k, j)).collect::<Result<Vec<_>>>()?;
    tower_from_levels(modules, TowerPattern::Lnk(k.clone()), true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeLevels {
    pub probe: usize,
    /// Per basis map C → X, the least level through which it factors.
    pub levels: Vec<Option<usize>>,
}

impl ProbeLevels {
    pub fn all_factor(&self) -> bool {
        self.levels.iter().all(|l| l.is_some())
    }
}

#[derive(Clone, Debug)]
pub struct EffectivenessReport {
    pub probes: Vec<ProbeLevels>,
    pub n_max: usize,
}

impl EffectivenessReport {
    /// Every probe map factors through some level ≤ n_max; a finite-level statement only.
    pub fn effective(&self) -> bool {
        self.probes.iter().all(|p| p.all_factor())
    }
}

/// f_n: T_n → X sending the first top to the generator of a simple X and everything else to 0.
pub fn top_family<F: Field>(t: &Tower<F>, x: &Module<F>) -> Result<Vec<Mat<F>>> {
    let f = x.field();
    if x.dim() != 1 {
        return input("no compatible family: the target is not simple");
    }
    let v = x.vertex_of(0);
    let mut out = Vec::with_capacity(t.len());
    for m in &t.modules {
        if m.vertex_of_vec(&m.tops[0]) != Some(v) {
            return input("no compatible family: the first top does not have the vertex of the target");
        }
        let mut images = vec![vec![f.zero()]; m.tops.len()];
        images[0] = vec![f.one()];
        let Some(fm) = hom_from_tops(m, x, &images) else {
            return input("no compatible family: the first top does not map onto the target");
        };
        out.push(fm);
    }
    for n in 0..t.len().saturating_sub(1) {
        if out[n + 1].mul(f, &t.injections[n]) != out[n] {
            return inconsistent("the family is not compatible with the tower maps");
        }
    }
    Ok(out)
}

/// For each probe C and each basis map g: C → X, the least level n ≤ n_max with g ∈ f_n ∘ Hom(C, T_n).
pub fn effectiveness_check<F: Field>(
    t: &Tower<F>,
    x: &Module<F>,
    probes: &[Module<F>],
    n_max: usize,
) -> Result<EffectivenessReport> {
    let family = top_family(t, x)?;
    effectiveness_check_with(t, x, &family, probes, n_max)
}

pub fn effectiveness_check_with<F: Field>(
    t: &Tower<F>,
    x: &Module<F>,
    family: &[Mat<F>],
    probes: &[Module<F>],
    n_max: usize,
) -> Result<EffectivenessReport> {
    let f = x.field();
    if family.len() != t.len() {
        return input("the family needs one map per tower level");
    }
    let top = n_max.min(t.len());
    let mut out = Vec::with_capacity(probes.len());
    for (pi, c) in probes.iter().enumerate() {
        let targets = hom_mats(c, x);
        let mut levels = vec![None; targets.len()];
        for n in 0..top {
            if levels.iter().all(|l| l.is_some()) {
                break;
            }
            let mut span = Subspace::zero(x.dim() * c.dim());
            for h in hom_mats(c, &t.modules[n]) {
                span.add_vector(f, &vectorize(&family[n].mul(f, &h)));
            }
            for (g, l) in targets.iter().zip(levels.iter_mut()) {
                if l.is_none() && span.contains(f, &vectorize(g)) {
                    *l = Some(n + 1);
                }
            }
        }
        out.push(ProbeLevels { probe: pi, levels });
    }
    Ok(EffectivenessReport { probes: out, n_max: top })
}

#[derive(Clone, Debug)]
pub struct SubfactorProbe {
    pub candidate: usize,
    pub found: bool,
    pub note: String,
}

/// subfactor_search of H in each candidate approximation; never a proof of phantom-hood.
pub fn phantom_subfactor_probe<F: Field>(
    h: &Module<F>,
    candidates: &[ApproximationResult<F>],
    budget: usize,
) -> Vec<SubfactorProbe> {
    candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let (found, note) = match subfactor_search(h, &c.module, budget) {
                SubfactorResult::Found { .. } => (true, "found".to_string()),
                SubfactorResult::NotFound(why) => (false, why),
                SubfactorResult::BudgetExhausted => (false, "inconclusive: budget exhausted".to_string()),
            };
            SubfactorProbe { candidate: i, found, note }
        })
        .collect()
}
