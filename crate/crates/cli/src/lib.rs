//! Command-line front end for saguaro-core: argument types, input loading,
//! the subcommands and the example reproduction registry.

pub mod reproduce;

use std::fmt::Write as _;
use std::path::{Path as FsPath, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use saguaro_core::approximation::*;
use saguaro_core::graph::LayeredGraph;
use saguaro_core::homological::{default_bound, pdim, PdimResult};
use saguaro_core::module::{graph_of, realize_graph, realize_spec, regular_module, structure, Module};
use saguaro_core::phantom::*;
use saguaro_core::presentation::{parse_module_spec, parse_presentation, Presentation, Quiver};
use saguaro_core::saguaro::{enumerate_irredundant_with, EnumOptions};
use saguaro_core::uniserial::{check_condition_n, check_finite_vp, enumerate_uniserials};
use saguaro_core::{fixtures, random, Algebra, AlgebraRef, Error, Field, FieldConfig, Fp, Rationals, Result};

#[derive(Parser, Debug)]
#[command(name = "saguaro-kit", version, about = "Modules, saguaros and right approximations over bound quiver algebras")]
pub struct Cli {
    /// Ground field: `q` for the rationals or `fp:P` for a prime field.
    #[arg(long, global = true, default_value = "q")]
    pub field: String,
    /// Seed for the randomized searches.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the main graph of the result as DOT.
    #[arg(long, global = true, value_name = "FILE")]
    pub dot: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Summarize an algebra given as a presentation file or fixture name.
    Algebra { algebra: String },
    /// Realize a module and print its dimension vector, top, socle and graph.
    Module { algebra: String, module: String },
    /// Projective dimension of a module.
    Pdim {
        algebra: String,
        module: String,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Uniserial modules, one per mast.
    Uniserials { algebra: String },
    /// Condition (N) and the finite V_p conditions.
    Check { algebra: String },
    /// Irredundant saguaros up to isomorphism.
    Saguaro {
        algebra: String,
        #[arg(long)]
        max_trunks: Option<usize>,
        #[arg(long, default_value_t = 5000)]
        max_saguaros: usize,
    },
    /// Minimal right approximation of a module.
    Approx {
        algebra: String,
        #[arg(long)]
        target: String,
        /// pinf, pd:D, sinf, s, radsq or list:M1,M2,...
        #[arg(long, default_value = "pinf")]
        category: String,
        /// Skip right-minimization for list categories.
        #[arg(long)]
        raw: bool,
    },
    /// Check the failure criterion for a simple module on finite data.
    Criterion {
        algebra: String,
        /// JSON file or inline JSON `{"idempotents":[1],"p":["beta"],"q":["alpha"]}`.
        #[arg(long)]
        data: String,
        #[arg(long, default_value_t = 12)]
        n: usize,
        /// Dimension bound for the amalgam probes.
        #[arg(long, default_value_t = 12)]
        probe_dim: usize,
        /// Number of zigzag levels whose syzygy summands join the probes.
        #[arg(long, default_value_t = 4)]
        zigzag_probes: usize,
        /// Also report dimensions of minimal {M_1..M_k}-approximations for k up to this value.
        #[arg(long)]
        growth: Option<usize>,
    },
    /// Build a truncated phantom tower and check effectiveness.
    Phantom {
        algebra: String,
        /// zigzag, hatted:PATH or lnk:K
        #[arg(long, default_value = "zigzag")]
        pattern: String,
        #[arg(long)]
        data: Option<String>,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long)]
        target: Option<String>,
        #[arg(long, value_delimiter = ',')]
        probes: Vec<String>,
    },
    /// Rerun a worked example against its recorded outputs.
    Reproduce {
        id: Option<String>,
        #[arg(long)]
        all: bool,
    },
}

/// What a subcommand produced; `code` is the process exit status.
#[derive(Clone, Debug)]
pub struct Output {
    pub text: String,
    pub json: Value,
    pub dot: Option<String>,
    pub code: i32,
}

impl Output {
    fn new(text: String, json: Value) -> Self {
        Output { text, json, dot: None, code: 0 }
    }
}

pub fn run(cli: &Cli) -> Result<Output> {
    if let Some(s) = cli.seed {
        random::set_seed(s);
    }
    let field = FieldConfig::parse(&cli.field)?;
    if let Command::Reproduce { id, all } = &cli.command {
        return reproduce_command(id.as_deref(), *all);
    }
    match field {
        FieldConfig::Rationals => dispatch(&cli.command, Rationals),
        FieldConfig::Prime(p) => dispatch(&cli.command, Fp::new(p)?),
    }
}

/// Prints the output and writes the DOT file if one was asked for.
pub fn emit(cli: &Cli, out: &Output) -> Result<()> {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&out.json).unwrap());
    } else {
        print!("{}", out.text);
    }
    if let Some(path) = &cli.dot {
        let Some(dot) = &out.dot else {
            return Err(Error::Input("this command has no graph to render".into()));
        };
        std::fs::write(path, dot).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn dispatch<F: Field>(cmd: &Command, f: F) -> Result<Output> {
    match cmd {
        Command::Algebra { algebra } => algebra_command(&load_algebra(algebra, f)?),
        Command::Module { algebra, module } => {
            let a = load_algebra(algebra, f)?;
            module_command(&load_module(&a, module)?)
        }
        Command::Pdim { algebra, module, bound } => {
            let a = load_algebra(algebra, f)?;
            let m = load_module(&a, module)?;
            let b = bound.unwrap_or_else(|| default_bound(&a));
            let r = pdim(&m, b);
            let text = match &r {
                PdimResult::Finite { d, .. } => format!("pdim {d}\n"),
                PdimResult::Infinite { cycle } => {
                    let c: Vec<String> = cycle.iter().map(|p| a.path_name(p)).collect();
                    format!("pdim infinite (cycle of path modules {})\n", c.join(" -> "))
                }
                PdimResult::AtLeast { bound, .. } => format!("pdim >= {bound} (undecided)\n"),
            };
            Ok(Output::new(text, pdim_json(&a, &r)))
        }
        Command::Uniserials { algebra } => uniserials_command(&load_algebra(algebra, f)?),
        Command::Check { algebra } => check_command(&load_algebra(algebra, f)?),
        Command::Saguaro { algebra, max_trunks, max_saguaros } => {
            let opts = EnumOptions { max_trunks: *max_trunks, max_top: None, max_saguaros: *max_saguaros };
            saguaro_command(&load_algebra(algebra, f)?, opts)
        }
        Command::Approx { algebra, target, category, raw } => {
            let a = load_algebra(algebra, f)?;
            approx_command(&a, &load_module(&a, target)?, category, *raw)
        }
        Command::Criterion { algebra, data, n, probe_dim, zigzag_probes, growth } => {
            let a = load_algebra(algebra, f)?;
            criterion_command(&a, &load_data(&a, data)?, *n, *probe_dim, *zigzag_probes, *growth)
        }
        Command::Phantom { algebra, pattern, data, n, target, probes } => {
            let a = load_algebra(algebra, f)?;
            phantom_command(&a, pattern, data.as_deref(), *n, target.as_deref(), probes)
        }
        Command::Reproduce { .. } => unreachable!(),
    }
}

// ------------------------------------------------------------ input loading

fn read_file(path: &FsPath) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// A presentation file, or else a fixture name.
pub fn load_presentation(spec: &str) -> Result<Presentation> {
    let p = FsPath::new(spec);
    if p.is_file() {
        return parse_presentation(&read_file(p)?);
    }
    fixtures::presentation(spec)
}

pub fn load_algebra<F: Field>(spec: &str, f: F) -> Result<AlgebraRef<F>> {
    Algebra::build(&load_presentation(spec)?, f)
}

fn vertex_arg(q: &Quiver, s: &str) -> Result<usize> {
    match s.trim().parse::<usize>() {
        Ok(v) if v >= 1 && v <= q.n => Ok(v - 1),
        _ => Err(Error::Input(format!("`{s}` is not a vertex (1..{})", q.n))),
    }
}

/// Accepts a module spec file, a graph JSON file, `simple:V`, `proj:V`
/// or a recorded example entry `EXAMPLE/NAME`.
pub fn load_module<F: Field>(a: &AlgebraRef<F>, spec: &str) -> Result<Module<F>> {
    let p = FsPath::new(spec);
    if p.is_file() {
        let text = read_file(p)?;
        if text.trim_start().starts_with('{') {
            return realize_graph(a, &LayeredGraph::from_json(&text, a.quiver())?);
        }
        return realize_spec(a, &parse_module_spec(&text, &a.pres)?);
    }
    if let Some(v) = spec.strip_prefix("simple:") {
        return Ok(Module::simple(a, vertex_arg(a.quiver(), v)?));
    }
    if let Some(v) = spec.strip_prefix("proj:") {
        return Ok(regular_module(a, vertex_arg(a.quiver(), v)?));
    }
    if let Some((ex, key)) = spec.split_once('/') {
        if fixtures::golden_source(ex).is_some() {
            if fixtures::golden_module_names(ex)?.iter().any(|k| k == key) {
                return realize_spec(a, &fixtures::golden_module(ex, key, &a.pres)?);
            }
            return realize_graph(a, &fixtures::golden_graph(ex, key, a.quiver())?);
        }
    }
    Err(Error::Input(format!("cannot read module `{spec}`: not a file, simple:V, proj:V or EXAMPLE/NAME")))
}

/// Failure data with 1-based idempotents and paths written as in module specs.
pub fn load_data<F: Field>(a: &AlgebraRef<F>, spec: &str) -> Result<CriterionData> {
    let text = if spec.trim_start().starts_with('{') { spec.to_string() } else { read_file(FsPath::new(spec))? };
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::Input(format!("criterion data: {e}")))?;
    let q = a.quiver();
    let idempotents = v
        .get("idempotents")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Input("criterion data needs `idempotents`".into()))?
        .iter()
        .map(|x| match x.as_u64() {
            Some(i) if i >= 1 && i as usize <= q.n => Ok(i as usize - 1),
            _ => Err(Error::Input(format!("bad idempotent {x}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let paths = |key: &str| -> Result<Vec<_>> {
        v.get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Input(format!("criterion data needs `{key}`")))?
            .iter()
            .map(|x| q.parse_path(x.as_str().ok_or_else(|| Error::Input(format!("bad path {x}")))?))
            .collect()
    };
    let data = CriterionData { idempotents, p: paths("p")?, q: paths("q")? };
    data.validate(a)?;
    Ok(data)
}

// ------------------------------------------------------------ rendering

/// Compact listing: nodes `id:vertex@layer`, edges `up-arrow-down`.
pub fn graph_lines(g: &LayeredGraph, q: &Quiver) -> String {
    let nodes: Vec<String> = g.nodes.iter().map(|n| format!("{}:{}@{}", n.id, n.vertex + 1, n.layer)).collect();
    let edges: Vec<String> = g
        .edges
        .iter()
        .map(|e| {
            let a = e.arrow.map(|a| q.arrow_name(a).to_string()).unwrap_or_default();
            format!("{}-{}-{}", g.nodes[e.up].id, a, g.nodes[e.down].id)
        })
        .collect();
    format!("nodes {}\nedges {}\n", nodes.join(" "), edges.join(" "))
}

fn pdim_json<F: Field>(a: &AlgebraRef<F>, r: &PdimResult<F>) -> Value {
    match r {
        PdimResult::Finite { d, chain_dims } => json!({"status": "finite", "pdim": d, "syzygy_dims": chain_dims}),
        PdimResult::Infinite { cycle } => {
            json!({"status": "infinite", "cycle": cycle.iter().map(|p| a.path_name(p)).collect::<Vec<_>>()})
        }
        PdimResult::AtLeast { bound, .. } => json!({"status": "at_least", "bound": bound}),
    }
}

fn pdim_short<F: Field>(r: &PdimResult<F>) -> String {
    match r {
        PdimResult::Finite { d, .. } => d.to_string(),
        PdimResult::Infinite { .. } => "infinite".into(),
        PdimResult::AtLeast { bound, .. } => format!(">={bound}"),
    }
}

fn one_based(v: &[usize]) -> String {
    format!("{v:?}")
}

fn module_json<F: Field>(m: &Module<F>) -> (Value, Option<LayeredGraph>) {
    let st = structure(m);
    let g = graph_of(m).ok();
    let q = m.alg.quiver();
    let v = json!({
        "dim": m.dim(),
        "dims": m.dims,
        "top": st.top,
        "socle": st.socle,
        "layers": st.layers,
        "graph": g.as_ref().map(|g| g.to_value(q)),
    });
    (v, g)
}

// ------------------------------------------------------------ subcommands

fn algebra_command<F: Field>(a: &AlgebraRef<F>) -> Result<Output> {
    let q = a.quiver();
    let bound = default_bound(a);
    let simples: Vec<PdimResult<F>> = (0..q.n).map(|v| pdim(&Module::simple(a, v), bound)).collect();
    let proj: Vec<usize> = (0..q.n).map(|e| a.basis_from(e).len()).collect();
    let left_serial = is_left_serial(a);
    let radsq = a.radical_power(2).is_zero();
    let mut text = a.pres.pretty();
    let _ = writeln!(text, "field {}  dim {}  loewy length {}", a.field.config(), a.dim(), a.loewy_length);
    let _ = writeln!(text, "dim Λe_v {}", one_based(&proj));
    let pd: Vec<String> = simples.iter().map(pdim_short).collect();
    let _ = writeln!(text, "pdim S_v [{}]", pd.join(", "));
    let _ = writeln!(text, "monomial {}  left serial {}  J^2 = 0 {}", a.is_monomial(), left_serial, radsq);
    let json = json!({
        "field": a.field.config().to_string(),
        "vertices": q.n,
        "arrows": q.arrows.iter().map(|x| json!({"name": x.name, "source": x.source + 1, "target": x.target + 1})).collect::<Vec<_>>(),
        "dim": a.dim(),
        "loewy_length": a.loewy_length,
        "projective_dims": proj,
        "simple_pdims": simples.iter().map(|r| pdim_json(a, r)).collect::<Vec<_>>(),
        "monomial": a.is_monomial(),
        "left_serial": left_serial,
        "radical_square_zero": radsq,
    });
    Ok(Output::new(text, json))
}

fn module_command<F: Field>(m: &Module<F>) -> Result<Output> {
    let (json, g) = module_json(m);
    let st = structure(m);
    let q = m.alg.quiver();
    let mut text = format!("dim {}  dims {}\ntop {}\nsocle {}\nlayers {:?}\n", m.dim(), one_based(&m.dims), one_based(&st.top), one_based(&st.socle), st.layer_dims());
    Ok(match &g {
        Some(g) => {
            text += &graph_lines(g, q);
            let mut o = Output::new(text, json);
            o.dot = Some(g.to_dot(q, "module"));
            o
        }
        None => Output::new(text + "no layered graph relative to the computed tops\n", json),
    })
}

fn uniserials_command<F: Field>(a: &AlgebraRef<F>) -> Result<Output> {
    let recs = enumerate_uniserials(a)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for r in &recs {
        let mast = a.path_name(&r.mast.path);
        let _ = writeln!(text, "{:<24} dim {:<3} {}", mast, r.module.dim(), r.regime.tag());
        rows.push(json!({
            "mast": mast,
            "source": r.mast.path.source + 1,
            "dim": r.module.dim(),
            "regime": r.regime.tag(),
        }));
    }
    let _ = writeln!(text, "{} uniserials", recs.len());
    Ok(Output::new(text, json!({"uniserials": rows})))
}

fn check_command<F: Field>(a: &AlgebraRef<F>) -> Result<Output> {
    let q = a.quiver();
    let n = check_condition_n(a)?;
    let vp = check_finite_vp(a)?;
    let wit = |w: &[(usize, saguaro_core::presentation::Path)]| -> Vec<Value> {
        w.iter().map(|(ar, p)| json!({"arrow": q.arrow_name(*ar), "mast": a.path_name(p)})).collect()
    };
    let mut text = format!("condition (N): {}\n", if n.holds { "holds" } else { "fails" });
    for (ar, p) in &n.witnesses {
        let _ = writeln!(text, "  mast {} is parallel to {} without starting or ending with it", a.path_name(p), q.arrow_name(*ar));
    }
    let _ = writeln!(text, "finite V_p: {}", if vp.holds { "holds" } else { "fails" });
    let _ = writeln!(text, "  masts parallel to arrows start with them: {}", vp.condition3.holds);
    match vp.condition5 {
        Some(b) => {
            let _ = writeln!(text, "  uniserial graphs are edge paths: {b}");
        }
        None => text += "  uniserial graphs: enumeration refused\n",
    }
    if let Some(note) = n.field_note.as_ref().or(vp.condition3.field_note.as_ref()) {
        let _ = writeln!(text, "  note: {note}");
    }
    let json = json!({
        "condition_n": {"holds": n.holds, "witnesses": wit(&n.witnesses), "note": n.field_note},
        "finite_vp": {
            "holds": vp.holds,
            "condition3": vp.condition3.holds,
            "condition3_witnesses": wit(&vp.condition3.witnesses),
            "condition5": vp.condition5,
            "non_edge_paths": vp.non_edge_paths.iter().map(|p| a.path_name(p)).collect::<Vec<_>>(),
        },
    });
    Ok(Output::new(text, json))
}

fn saguaro_command<F: Field>(a: &AlgebraRef<F>, opts: EnumOptions) -> Result<Output> {
    let list = enumerate_irredundant_with(a, opts)?;
    let q = a.quiver();
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut dot = String::new();
    for (i, s) in list.iter().enumerate() {
        let st = structure(&s.module);
        let g = s.graph().ok();
        let _ = writeln!(text, "#{} dim {} top {} socle {}  {}", i + 1, s.module.dim(), one_based(&st.top), s.socle_vertex() + 1, s.describe());
        if let Some(g) = &g {
            dot += &g.to_dot(q, &format!("saguaro_{}", i + 1));
        }
        rows.push(json!({
            "dim": s.module.dim(),
            "top": st.top,
            "socle_vertex": s.socle_vertex() + 1,
            "masts": s.masts().iter().map(|p| a.path_name(p)).collect::<Vec<_>>(),
            "links": s.links.iter().map(|l| [a.path_name(&l.q), a.path_name(&l.q_next)]).collect::<Vec<_>>(),
            "graph": g.map(|g| g.to_value(q)),
        }));
    }
    let _ = writeln!(text, "{} irredundant saguaros", list.len());
    let mut out = Output::new(text, json!({"saguaros": rows}));
    out.dot = Some(dot);
    Ok(out)
}

fn simple_vertex<F: Field>(m: &Module<F>) -> Result<usize> {
    if m.dim() == 1 {
        Ok(m.vertex_of(0))
    } else {
        Err(Error::Refusal("the left serial algorithms approximate simple modules only".into()))
    }
}

/// Runs the engine selected by `category`.
pub fn approximate<F: Field>(a: &AlgebraRef<F>, m: &Module<F>, category: &str, raw: bool) -> Result<ApproximationResult<F>> {
    let left_serial = || {
        if is_left_serial(a) {
            simple_vertex(m)
        } else {
            Err(Error::Refusal("𝒫^∞ and 𝒫^(d) searches need a left serial algebra; try radsq, sinf or list:".into()))
        }
    };
    if let Some(d) = category.strip_prefix("pd:") {
        let d: usize = d.parse().map_err(|_| Error::Input(format!("bad bound in `{category}`")))?;
        return leftserial_pd_approx(a, left_serial()?, d);
    }
    if let Some(list) = category.strip_prefix("list:") {
        let gens = list.split(',').filter(|s| !s.is_empty()).map(|s| load_module(a, s)).collect::<Result<Vec<_>>>()?;
        let r = finite_type_approx(&gens, m)?;
        return if raw { Ok(r) } else { minimize_right(&r) };
    }
    match category {
        "pinf" if a.radical_power(2).is_zero() && !is_left_serial(a) => radsq_zero_approx(a, m),
        "pinf" => leftserial_pinf_approx(a, left_serial()?),
        "radsq" => radsq_zero_approx(a, m),
        "sinf" => saguaro_approx(a, m, true),
        "s" => saguaro_approx(a, m, false),
        other => Err(Error::Input(format!("unknown category `{other}` (pinf, pd:D, sinf, s, radsq, list:M1,M2)"))),
    }
}

fn approx_command<F: Field>(a: &AlgebraRef<F>, m: &Module<F>, category: &str, raw: bool) -> Result<Output> {
    let r = approximate(a, m, category, raw)?;
    check_factorization(&r)?;
    let pd = pdim(&r.module, default_bound(a));
    let (mut json, g) = module_json(&r.module);
    json["category"] = json!(r.category.tag());
    json["pdim"] = pdim_json(a, &pd);
    json["minimal"] = json!(r.minimal);
    json["certified"] = json!(r.certified);
    json["multiplicities"] = json!(r.multiplicities());
    let q = a.quiver();
    let mut text = format!(
        "{} approximation: dim {}  dims {}  pdim {}  minimal {}\n",
        r.category.tag(),
        r.dim(),
        one_based(&r.module.dims),
        pdim_short(&pd),
        r.minimal
    );
    if let Some(s) = &r.saguaro {
        let _ = writeln!(text, "saguaro {}", s.describe());
    }
    Ok(match g {
        Some(g) => {
            text += &graph_lines(&g, q);
            let mut o = Output::new(text, json);
            o.dot = Some(g.to_dot(q, "approximation"));
            o
        }
        None => Output::new(text, json),
    })
}

fn criterion_command<F: Field>(
    a: &AlgebraRef<F>,
    data: &CriterionData,
    n: usize,
    probe_dim: usize,
    zz: usize,
    growth: Option<usize>,
) -> Result<Output> {
    let mut probes = amalgam_probes(a, probe_dim);
    if zz > 0 {
        probes.extend(zigzag_probes(a, data, zz)?);
    }
    let rep = failure_criterion_check(a, data, n, &probes)?;
    let status = match &rep.status {
        CriterionStatus::ConsistentWithFailure => json!({"verdict": "consistent_with_failure"}),
        CriterionStatus::LevelFails(k) => json!({"verdict": "level_fails", "level": k}),
        CriterionStatus::Violated { probe, condition } => {
            json!({"verdict": "violated", "probe": probe + 1, "condition": condition})
        }
    };
    let in_cat = rep.probes.iter().filter(|p| p.in_category).count();
    let mut text = format!("condition (1): {}/{} levels pass\n", rep.levels.iter().filter(|l| l.passes()).count(), rep.levels.len());
    let _ = writeln!(text, "probes: {} checked, {} of finite projective dimension", rep.probes.len(), in_cat);
    text += &match &rep.status {
        CriterionStatus::ConsistentWithFailure => {
            "verdict: consistent with failure of contravariant finiteness (finite data only)\n".to_string()
        }
        CriterionStatus::LevelFails(k) => format!("verdict: condition (1) fails at level {k}\n"),
        CriterionStatus::Violated { probe, condition } => {
            let m = &probes[*probe];
            format!("verdict: probe {} (dims {}) violates condition {condition}\n", probe + 1, one_based(&m.dims))
        }
    };
    let mut json = json!({
        "levels": rep.levels.iter().map(|l| json!({"n": l.n, "independent": l.independent, "linked": l.linked, "in_category": l.in_category})).collect::<Vec<_>>(),
        "probes": rep.probes.iter().map(|p| json!({
            "index": p.index + 1, "dim": p.dim, "in_category": p.in_category,
            "violates_i": p.violates_i, "violates_ii": p.violates_ii.map(|i| i + 1),
        })).collect::<Vec<_>>(),
        "status": status,
    });
    if let Some(k) = growth {
        let s = Module::simple(a, data.idempotents[0]);
        let dims = zigzag_approx_dims(a, data, &s, k)?;
        let _ = writeln!(text, "minimal {{M_1..M_k}}-approximation dims of S_{}: {dims:?}", data.idempotents[0] + 1);
        json["growth"] = json!(dims);
    }
    Ok(Output::new(text, json))
}

fn phantom_command<F: Field>(
    a: &AlgebraRef<F>,
    pattern: &str,
    data: Option<&str>,
    n: usize,
    target: Option<&str>,
    probe_specs: &[String],
) -> Result<Output> {
    let need_data = || -> Result<CriterionData> {
        match data {
            Some(d) => load_data(a, d),
            None => Err(Error::Input(format!("pattern `{pattern}` needs --data"))),
        }
    };
    let (tower, default_probes, vertex) = if pattern == "zigzag" {
        let d = need_data()?;
        let t = build_zigzag_tower(a, &d, n)?;
        let probes = (1..=n.min(4)).map(|k| zigzag_module(a, &d, k)).collect::<Result<Vec<_>>>()?;
        (t, probes, d.idempotents[0])
    } else if let Some(h) = pattern.strip_prefix("hatted:") {
        let d = need_data()?;
        let hat = a.quiver().parse_path(h)?;
        let t = build_hatted_zigzag_tower(a, &d, Some(&hat), n)?;
        let probes = t.modules.iter().take(4).cloned().collect();
        (t, probes, d.idempotents[0])
    } else if let Some(k) = pattern.strip_prefix("lnk:") {
        let k: i64 = k.parse().map_err(|_| Error::Input(format!("bad scalar in `{pattern}`")))?;
        let k = a.field.from_i64(k);
        let t = build_lnk_tower(a, &k, n)?;
        let probes = (1..=n.min(3)).map(|j| lnk_module(a, &k, j)).collect::<Result<Vec<_>>>()?;
        (t, probes, 0)
    } else {
        return Err(Error::Input(format!("unknown pattern `{pattern}` (zigzag, hatted:PATH, lnk:K)")));
    };
    let x = match target {
        Some(t) => load_module(a, t)?,
        None => Module::simple(a, vertex),
    };
    let probes = if probe_specs.is_empty() {
        default_probes
    } else {
        probe_specs.iter().map(|s| load_module(a, s)).collect::<Result<Vec<_>>>()?
    };
    let rep = effectiveness_check(&tower, &x, &probes, n)?;
    let mut text = format!("{} tower, {} levels, dims {:?}, injections verified\n", tower.tag(), tower.len(), tower.dims());
    if tower.in_pinf {
        text += "every level verified to have finite projective dimension\n";
    }
    for p in &rep.probes {
        let lv: Vec<String> = p.levels.iter().map(|l| l.map_or("-".into(), |x| x.to_string())).collect();
        let _ = writeln!(text, "probe {}: factorization levels [{}]", p.probe + 1, lv.join(", "));
    }
    let _ = writeln!(text, "effective up to level {}: {}", rep.n_max, rep.effective());
    let json = json!({
        "pattern": tower.tag(),
        "dims": tower.dims(),
        "in_pinf": tower.in_pinf,
        "probes": rep.probes.iter().map(|p| json!({"probe": p.probe + 1, "levels": p.levels})).collect::<Vec<_>>(),
        "n_max": rep.n_max,
        "effective": rep.effective(),
    });
    let mut out = Output::new(text, json);
    if let Some(last) = tower.modules.last() {
        out.dot = graph_of(last).ok().map(|g| g.to_dot(a.quiver(), "tower_top"));
    }
    Ok(out)
}

fn reproduce_command(id: Option<&str>, all: bool) -> Result<Output> {
    let reports = match (id, all) {
        (_, true) => reproduce::reproduce_all(),
        (Some(id), false) => vec![reproduce::reproduce(id)?],
        (None, false) => return Err(Error::Input("give an example id or --all".into())),
    };
    let text: String = reports.iter().map(|r| r.to_text()).collect();
    let json = Value::Array(reports.iter().map(|r| r.to_json()).collect());
    let mut out = Output::new(text, json);
    if reports.iter().any(|r| !r.passed()) {
        out.code = 3;
    }
    Ok(out)
}
