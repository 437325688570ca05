//! `redmod`: command-line front end for the analyses in `redmod-core`.

mod context;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use redmod_core::classify2::{
    eiconal_residual, eiconal_submodule, elliptic_coorder, meta_module_from_eiconal, parse_matrix,
    wave_singularity_condition, Kind, QuasiLinear2, QuasiLinearSpec,
};
use redmod_core::evolution::{
    coorder1_determining, determining_system_evolution, phi_residual_evolution, tilde_extension, EvolutionEquation,
};
use redmod_core::manifold::{meta_singularity_coorder, strong_coorder, weak_coorder, MetaVariant};
use redmod_core::reduction::{conditional_invariance_check, ndim_reduce, reduce_shift_module, ultra_module_from_family, PhiInverse};
use redmod_core::vfmod::{phi_family_member, ModuleSpec, PhiVariant};
use redmod_core::{Error, Expr, JetContext, Result, Split, VFModule, Var};

use context::{json_or_file, module_spec, text_or_file, ContextOptions};

const SCHEMA: &str = "redmod/1";
const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser)]
#[command(name = "redmod", version, about = "Singularity co-orders and reduction modules of scalar PDEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Context JSON (file or inline): {"n", "r", "p", "time_alias", "symbols"}.
    #[arg(long, global = true)]
    context: Option<String>,
    /// Number of independent variables (inferred when omitted).
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Name slot 0 `t` and the remaining slots `x1, x2, …`.
    #[arg(long, global = true)]
    time: bool,
    /// Declare a symbolic constant.
    #[arg(long = "symbol", global = true)]
    symbols: Vec<String>,
    /// Declare a symbolic constant known to be nonzero.
    #[arg(long = "nonzero", global = true)]
    nonzero: Vec<String>,
    /// Declare a symbolic constant known to be positive.
    #[arg(long = "positive", global = true)]
    positive: Vec<String>,
    /// Working jet order.
    #[arg(long, global = true)]
    r: Option<usize>,
    /// Expression size limit.
    #[arg(long, global = true)]
    max_nodes: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Compact JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Indented JSON output.
    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(Args)]
struct SplitArgs {
    /// Number of leading checked slots.
    #[arg(long)]
    p: Option<usize>,
    /// Comma-separated checked coordinates, e.g. `x1,x2`.
    #[arg(long)]
    checked: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Strong and weak singularity co-orders of an equation for a module.
    Sco {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        module: Option<String>,
        /// Use the Φ-family module instead of `--module`.
        #[arg(long)]
        phi: Option<String>,
        /// Meta-singular co-order for the split instead of a single module.
        #[arg(long)]
        meta: bool,
        #[command(flatten)]
        split: SplitArgs,
    },
    /// Conditional invariance criterion.
    CheckReduction {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        module: Option<String>,
        #[arg(long)]
        phi: Option<String>,
        #[command(flatten)]
        split: SplitArgs,
    },
    /// Reduce by the shift module of the checked coordinates.
    Reduce {
        #[arg(long)]
        eq: String,
        #[command(flatten)]
        split: SplitArgs,
    },
    /// Algebraic reduction by the n-dimensional module of a family `κ = Φ`.
    NdimReduce {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        phi: String,
        /// Inverse `u = ψ(x, κ)` of `κ = Φ(x, u)`.
        #[arg(long)]
        inverse: Option<String>,
        /// Name of the family parameter used by `--inverse`.
        #[arg(long, default_value = "k")]
        kappa: String,
    },
    /// Determining equations of an evolution equation `u_t = H`.
    Deteqs {
        #[arg(long)]
        eq: String,
        /// One η per spatial variable.
        #[arg(long, value_delimiter = ';')]
        eta: Vec<String>,
        #[arg(long)]
        phi: Option<String>,
    },
    /// Co-order-one determining equation for a family invariant `Φ`.
    Coorder1 {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        phi: String,
        /// Distinguished coordinate (default the last).
        #[arg(long)]
        hat: Option<String>,
    },
    /// Quasi-linear second-order analysis from a JSON description.
    Classify {
        /// {"kind", "a", "b", "module"} as a file or inline JSON.
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// Eiconal residual and the module built from `Ψ`.
    Eiconal {
        /// `identity`, a diagonal list or a matrix, as JSON.
        #[arg(long)]
        a: String,
        #[arg(long)]
        psi: String,
        /// Also test the member of the module annihilating `Φ`.
        #[arg(long)]
        phi: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Sco { .. } => "sco",
            Command::CheckReduction { .. } => "check-reduction",
            Command::Reduce { .. } => "reduce",
            Command::NdimReduce { .. } => "ndim-reduce",
            Command::Deteqs { .. } => "deteqs",
            Command::Coorder1 { .. } => "coorder1",
            Command::Classify { .. } => "classify",
            Command::Eiconal { .. } => "eiconal",
        }
    }
}

struct Inputs {
    texts: Vec<String>,
    module: Option<ModuleSpec>,
    /// The command needs a time variable in slot 0.
    time: bool,
}

fn inputs(cmd: &Command) -> Result<Inputs> {
    let mut texts = Vec::new();
    let mut module = None;
    let mut time = matches!(cmd, Command::Deteqs { .. } | Command::Eiconal { .. });
    let mut push = |s: &Option<String>| -> Result<()> {
        if let Some(s) = s {
            texts.push(text_or_file(s)?);
        }
        Ok(())
    };
    match cmd {
        Command::Sco { eq, module: m, phi, .. } | Command::CheckReduction { eq, module: m, phi, .. } => {
            push(&Some(eq.clone()))?;
            push(phi)?;
            if let Some(m) = m {
                module = Some(module_spec(m)?);
            }
        }
        Command::Reduce { eq, .. } => push(&Some(eq.clone()))?,
        Command::NdimReduce { eq, phi, inverse, .. } => {
            push(&Some(eq.clone()))?;
            push(&Some(phi.clone()))?;
            push(inverse)?;
        }
        Command::Deteqs { eq, eta, phi } => {
            push(&Some(eq.clone()))?;
            push(phi)?;
            for e in eta {
                push(&Some(e.clone()))?;
            }
        }
        Command::Coorder1 { eq, phi, .. } => {
            push(&Some(eq.clone()))?;
            push(&Some(phi.clone()))?;
        }
        Command::Classify { spec, .. } => {
            let v = json_or_file(spec)?;
            push(&Some(v.to_string()))?;
            time = v.get("kind").and_then(Value::as_str).is_some_and(|k| k != "elliptic");
            if let Some(m) = v.get("module") {
                module =
                    Some(serde_json::from_value(m.clone()).map_err(|e| Error::InvalidInput(format!("invalid module: {e}")))?);
            }
        }
        Command::Eiconal { a, psi, phi } => {
            push(&Some(a.clone()))?;
            push(&Some(psi.clone()))?;
            push(phi)?;
        }
    }
    Ok(Inputs { texts, module, time })
}

fn parse(ctx: &JetContext, arg: &str) -> Result<Expr> {
    ctx.parse(&text_or_file(arg)?)
}

fn coord_slot(ctx: &JetContext, name: &str) -> Result<usize> {
    ctx.coord_slot(name.trim()).ok_or_else(|| Error::InvalidInput(format!("unknown coordinate `{name}`")))
}

/// Explicit split, else the context's `p`, else `default`.
fn split(ctx: &JetContext, s: &SplitArgs, default: impl FnOnce() -> Split) -> Result<Split> {
    if let Some(c) = &s.checked {
        let slots = c.split(',').map(|x| coord_slot(ctx, x)).collect::<Result<Vec<_>>>()?;
        return Ok(Split::from_checked(ctx.n, &slots));
    }
    match s.p.or(ctx.p) {
        Some(p) if p == 0 || p > ctx.n => Err(Error::InvalidInput(format!("p must be in 1..={}", ctx.n))),
        Some(p) => Ok(Split::prefix(ctx.n, p)),
        None => Ok(default()),
    }
}

/// Spatial slots for time contexts, otherwise the first slot.
fn default_split(ctx: &JetContext) -> Split {
    if ctx.time_alias && ctx.n > 1 {
        Split::from_checked(ctx.n, &(1..ctx.n).collect::<Vec<_>>())
    } else {
        Split::prefix(ctx.n, 1)
    }
}

fn module_or_phi(ctx: &JetContext, spec: &Option<ModuleSpec>, phi: &Option<String>, s: &SplitArgs) -> Result<VFModule> {
    match (spec, phi) {
        (Some(m), None) => m.build(ctx),
        (None, Some(phi)) => {
            let sp = split(ctx, s, || default_split(ctx))?;
            phi_family_member(&parse(ctx, phi)?, &sp, &PhiVariant::Involutive)
        }
        _ => Err(Error::InvalidInput("give exactly one of --module and --phi".into())),
    }
}

fn show_module(m: &VFModule, ctx: &JetContext) -> Value {
    json!(m.basis().iter().map(|v| v.show(ctx)).collect::<Vec<_>>())
}

/// `(τ, η)` when every field reads `∂_s + τ^s ∂_t + η^s ∂_u` in order.
fn wave_form(m: &VFModule) -> Option<(Vec<Expr>, Vec<Expr>)> {
    let n = m.n();
    if m.dim() + 1 != n {
        return None;
    }
    let mut tau = Vec::new();
    let mut eta = Vec::new();
    for (k, v) in m.basis().iter().enumerate() {
        for s in 1..n {
            let want = if s == k + 1 { Expr::one() } else { Expr::zero() };
            if v.xi[s] != want {
                return None;
            }
        }
        tau.push(v.xi[0].clone());
        eta.push(v.eta.clone());
    }
    Some((tau, eta))
}

fn run(cmd: &Command, ctx: &JetContext, module: &Option<ModuleSpec>, seed: u64) -> Result<Value> {
    match cmd {
        Command::Sco { eq, phi, meta, split: s, .. } => {
            let l = parse(ctx, eq)?;
            if *meta {
                let sp = split(ctx, s, || default_split(ctx))?;
                return Ok(meta_singularity_coorder(&l, &sp, &MetaVariant::Involutive, ctx)?.to_json(ctx));
            }
            let m = module_or_phi(ctx, module, phi, s)?;
            let mut v = weak_coorder(&l, &m, ctx)?.to_json(ctx);
            v["module"] = show_module(&m, ctx);
            Ok(v)
        }
        Command::CheckReduction { eq, phi, split: s, .. } => {
            let l = parse(ctx, eq)?;
            let m = module_or_phi(ctx, module, phi, s)?;
            let mut v = conditional_invariance_check(&l, &m, ctx)?.to_json(ctx);
            v["module"] = show_module(&m, ctx);
            Ok(v)
        }
        Command::Reduce { eq, split: s } => {
            let l = parse(ctx, eq)?;
            let sp = split(ctx, s, || Split::prefix(ctx.n, 1))?;
            Ok(reduce_shift_module(&l, &sp, ctx)?.to_json(ctx))
        }
        Command::NdimReduce { eq, phi, inverse, kappa } => {
            let l = parse(ctx, eq)?;
            let phi = parse(ctx, phi)?;
            let inv = match inverse {
                Some(psi) => {
                    if ctx.symbol(kappa).is_none() {
                        return Err(Error::InvalidInput(format!("declare the parameter with --symbol {kappa}")));
                    }
                    Some(PhiInverse { psi: parse(ctx, psi)?, kappa: Var::Sym(kappa.as_str().into()) })
                }
                None => None,
            };
            let mut v = ndim_reduce(&l, &phi, inv.as_ref(), ctx)?.to_json(ctx);
            v["family_module"] = ultra_module_from_family(&l, &phi, ctx)?.to_json(ctx);
            Ok(v)
        }
        Command::Deteqs { eq, eta, phi } => {
            let e = EvolutionEquation::from_equation(&parse(ctx, eq)?, ctx)?;
            let mut v = json!({"h": ctx.show(&e.h)});
            if let Some(phi) = phi {
                v["phi_residual"] = phi_residual_evolution(&e, &parse(ctx, phi)?, ctx)?.to_json(ctx);
            }
            if !eta.is_empty() {
                let etas = eta.iter().map(|s| parse(ctx, s)).collect::<Result<Vec<_>>>()?;
                let d = determining_system_evolution(&e, &etas, ctx)?;
                v["determining_system"] = d.to_json(ctx);
                if d.reduced_rhs.is_some() {
                    v["tilde_extension"] = tilde_extension(&e, &etas, ctx)?.to_json(ctx);
                }
            }
            if phi.is_none() && eta.is_empty() {
                return Err(Error::InvalidInput("give --eta or --phi".into()));
            }
            Ok(v)
        }
        Command::Coorder1 { eq, phi, hat } => {
            let l = parse(ctx, eq)?;
            let h = hat.as_deref().map(|s| coord_slot(ctx, s)).transpose()?;
            Ok(coorder1_determining(&l, &parse(ctx, phi)?, h, ctx)?.to_json(ctx))
        }
        Command::Classify { spec, samples } => {
            let v = json_or_file(spec)?;
            let qs: QuasiLinearSpec =
                serde_json::from_value(v).map_err(|e| Error::InvalidInput(format!("invalid classify input: {e}")))?;
            let q = qs.build(ctx)?;
            let kind = q.kind;
            let m = module
                .as_ref()
                .ok_or_else(|| Error::InvalidInput("classify needs a \"module\" entry".into()))?
                .build(ctx)?;
            let mut out = match kind {
                Kind::Elliptic => {
                    let certified = q.clone().with_positivity(*samples, seed, ctx)?;
                    elliptic_coorder(&certified, &m, ctx)?.to_json(ctx)
                }
                Kind::Evolution | Kind::Wave => strong_coorder(&q.equation(ctx), &m, ctx).map(|r| {
                    redmod_core::manifold::with_weak(r, ctx).to_json(ctx)
                })?,
            };
            if kind == Kind::Wave {
                if let Some((tau, eta)) = wave_form(&m) {
                    out["wave_condition"] = wave_singularity_condition(&q, &tau, &eta, ctx)?.to_json(ctx);
                }
            }
            out["kind"] = json!(kind);
            out["equation"] = json!(ctx.show(&q.equation(ctx)));
            out["module"] = show_module(&m, ctx);
            Ok(out)
        }
        Command::Eiconal { a, psi, phi } => {
            let raw = text_or_file(a)?;
            let av: Value = serde_json::from_str(&raw).unwrap_or(Value::String(raw));
            let w = QuasiLinear2::new(Kind::Wave, parse_matrix(&av, ctx.n - 1, ctx)?, Expr::zero(), ctx)?;
            let psi = parse(ctx, psi)?;
            let r = eiconal_residual(&w, &psi, ctx)?;
            let mut v = json!({"equation": ctx.show(&w.equation(ctx)), "psi": ctx.show(&psi), "residual": ctx.show(&r)});
            if r.is_zero() {
                v["module"] = show_module(&meta_module_from_eiconal(&w, &psi, ctx)?, ctx);
                if let Some(phi) = phi {
                    let sub = eiconal_submodule(&psi, &parse(ctx, phi)?, ctx)?;
                    let rep = strong_coorder(&w.equation(ctx), &sub, ctx)?;
                    v["submodule"] = json!({"basis": show_module(&sub, ctx), "strong_coorder": rep.strong_coorder});
                }
            }
            Ok(v)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ResourceLimit(_) => 3,
        Error::Internal(_) => 4,
        _ => 2,
    }
}

fn error_kind(e: &Error) -> String {
    let s = format!("{e:?}");
    s.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
}

fn context_json(ctx: &JetContext) -> Value {
    json!({
        "n": ctx.n,
        "time_alias": ctx.time_alias,
        "coordinates": (0..ctx.n).map(|i| ctx.names().coord(i)).collect::<Vec<_>>(),
        "symbols": ctx.symbols.iter().map(|s| s.name.clone()).collect::<Vec<_>>(),
    })
}

fn summary(doc: &Value) -> String {
    let mut out = String::new();
    let obj = doc.as_object().cloned().unwrap_or_default();
    for (k, v) in &obj {
        if k == "result" {
            continue;
        }
        out.push_str(&format!("{k}: {}\n", scalar(v)));
    }
    if let Some(Value::Object(r)) = obj.get("result") {
        write_fields(&mut out, r, "");
    }
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_fields(out: &mut String, m: &Map<String, Value>, prefix: &str) {
    for (k, v) in m {
        match v {
            Value::Object(inner) => write_fields(out, inner, &format!("{prefix}{k}.")),
            _ => out.push_str(&format!("{prefix}{k}: {}\n", scalar(v))),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.common;
    let name = cli.command.name();
    let outcome = inputs(&cli.command).and_then(|inp| {
        let opts = ContextOptions {
            context: c.context.as_deref(),
            n: c.n,
            time: c.time || inp.time,
            symbols: &c.symbols,
            nonzero: &c.nonzero,
            positive: &c.positive,
            r: c.r,
            max_nodes: c.max_nodes,
        };
        let texts: Vec<&str> = inp.texts.iter().map(String::as_str).collect();
        let ctx = context::build(&opts, &texts, inp.module.as_ref())?;
        let result = run(&cli.command, &ctx, &inp.module, c.seed)?;
        Ok(json!({
            "schema": SCHEMA,
            "command": name,
            "seed": c.seed,
            "context": context_json(&ctx),
            "result": result,
        }))
    });
    let (doc, code) = match outcome {
        Ok(doc) => (doc, 0),
        Err(e) => {
            eprintln!("redmod {name}: {e}");
            let doc = json!({
                "schema": SCHEMA,
                "command": name,
                "error": {"kind": error_kind(&e), "message": e.to_string()},
            });
            (doc, exit_code(&e))
        }
    };
    let text = if c.pretty {
        serde_json::to_string_pretty(&doc).expect("serializable")
    } else if c.json {
        serde_json::to_string(&doc).expect("serializable")
    } else if code == 0 {
        summary(&doc)
    } else {
        String::new()
    };
    if !text.is_empty() {
        println!("{}", text.trim_end());
    }
    ExitCode::from(code)
}
