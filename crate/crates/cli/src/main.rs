use bnc_engine::ffb::{
    check_ffb_independence, check_ffb_system, embed_ffb_family, ffb_cumulant_checks, verify_system_gives_ffb,
    FfbEmbedding, Perturbed, ThetaModel, ThetaRepresentation,
};
use bnc_engine::fixtures;
use bnc_engine::freeprod::lrdecomp::{random_side_operator, verify_lr_decomposition, LrOperand};
use bnc_engine::freeprod::{build_bimodule_from_space, FreeProduct, OpRef};
use bnc_engine::lr::{enumerate_lr, lateral_closure, DiagramFamily, LrDiagram};
use bnc_engine::moments::MomentEngine;
use bnc_engine::render::{render_diagram, render_partition, Format as RenderFormat};
use bnc_engine::{
    lr_replacement, BBProbSpace, BncContext, ChiMap, EpsilonMap, Error, MomentSpace, Report, SetPartition,
};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "bnc-engine", version, about = "Exact bi-free and free-free-Boolean combinatorics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[arg(long, global = true)]
    chi: Option<String>,
    #[arg(long, global = true)]
    chihat: Option<String>,
    /// Colours, comma separated.
    #[arg(long, global = true)]
    eps: Option<String>,
    #[arg(long, global = true)]
    pi: Option<String>,
    #[arg(long, global = true)]
    sigma: Option<String>,
    /// Built-in fixture: scalar, diag2, diag2-bad, m2-scalar, doubled-m2.
    #[arg(long, global = true)]
    fixture: Option<String>,
    /// JSON file holding a B-B space.
    #[arg(long, global = true)]
    space: Option<PathBuf>,
    /// Truncation depth of free products.
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long = "word-cap", global = true, default_value_t = 4)]
    word_cap: usize,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Enumeration cap on n (also read from BNC_ENGINE_CAP).
    #[arg(long, global = true)]
    cap: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// List BNC(χ), LR(χ, ε), LR^lat(χ, ε) or BNC_ffb(χ̂).
    Enumerate {
        #[arg(value_enum)]
        what: Enumerable,
    },
    /// μ(π, σ), or the column of σ when --pi is absent.
    Mobius,
    /// E_π for every π ∈ BNC(χ) on seeded random inputs.
    Moments,
    /// κ_π for every π ∈ BNC(χ), with the inversion round trip.
    Cumulants,
    /// Run a verification suite and print one line per claim.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Negative control: replace S by the identity (ffb-system), shift mixed
        /// moments (ffb-independence) or multiply the last operator by one of
        /// another colour (bifree).
        #[arg(long)]
        perturb: bool,
        /// Boolean-projected positions, 1-based (lr-decompose).
        #[arg(long)]
        projected: Option<String>,
    },
    /// TikZ or DOT text for a partition (--chi, --pi), a diagram file, or
    /// the i-th diagram of LR(χ, ε).
    Render {
        #[arg(long)]
        diagram: Option<PathBuf>,
        #[arg(long)]
        index: Option<usize>,
        #[arg(long, default_value = "")]
        caption: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Enumerable {
    Bnc,
    Lr,
    Lrlat,
    Bncffb,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    BbAxioms,
    Bifree,
    FfbSystem,
    FfbIndependence,
    LrDecompose,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Tikz,
    Dot,
}

enum Failure {
    Engine(Error),
    Usage(String),
    Axioms(Report),
    Claims,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

type Out = Result<String, Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Alphabet(_) | Error::SizeMismatch { .. } | Error::Colouring(_) => 2,
        Error::CapExceeded { .. } => 3,
        _ => 1,
    }
}

fn need<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str, Failure> {
    v.as_deref().ok_or_else(|| Failure::Usage(format!("--{flag} is required")))
}

fn chi_of(cli: &Cli) -> Result<ChiMap, Failure> {
    Ok(need(&cli.chi, "chi")?.parse()?)
}

fn eps_of(cli: &Cli) -> Result<EpsilonMap, Failure> {
    Ok(need(&cli.eps, "eps")?.parse()?)
}

fn format_of(cli: &Cli, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
    let f = cli.format.unwrap_or(default);
    if !allowed.contains(&f) {
        return Err(Failure::Usage(format!("format {f:?} is not available here")));
    }
    Ok(f)
}

fn emit(f: Format, json: Value, text: impl FnOnce() -> String) -> String {
    match f {
        Format::Json => serde_json::to_string_pretty(&json).expect("json") + "\n",
        _ => text(),
    }
}

fn load_space(cli: &Cli, default: &str) -> Result<BBProbSpace, Failure> {
    let space = match &cli.space {
        Some(path) => {
            let s = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            BBProbSpace::from_json_str(&s)?
        }
        None => fixtures::by_name(cli.fixture.as_deref().unwrap_or(default))?,
    };
    let rep = space.check_bb_axioms();
    if !rep.all_pass() {
        return Err(Failure::Axioms(rep));
    }
    Ok(space)
}

fn report_out(cli: &Cli, rep: &Report) -> Out {
    let f = format_of(cli, Format::Text, &[Format::Json, Format::Text])?;
    let s = emit(f, rep.to_json(), || rep.to_text());
    if rep.all_pass() {
        Ok(s)
    } else {
        print!("{s}");
        Err(Failure::Claims)
    }
}

fn family_out(cli: &Cli, fam: &DiagramFamily) -> Out {
    let f = format_of(cli, Format::Text, &[Format::Json, Format::Text])?;
    Ok(emit(f, json!({ "count": fam.len(), "family": fam.to_json() }), || {
        let mut s = format!("count: {}\n", fam.len());
        for d in &fam.diagrams {
            s.push_str(&d.to_json().to_string());
            s.push('\n');
        }
        s
    }))
}

fn partitions_out(cli: &Cli, label: &str, ps: &[SetPartition]) -> Out {
    let f = format_of(cli, Format::Text, &[Format::Json, Format::Text])?;
    let items: Vec<Value> = ps.iter().map(|p| json!({ "rgs": p.to_rgs_string(), "blocks": p.to_block_string() })).collect();
    Ok(emit(f, json!({ "chi": label, "count": ps.len(), "partitions": items }), || {
        let mut s = format!("count: {}\n", ps.len());
        for p in ps {
            s.push_str(&p.to_block_string());
            s.push('\n');
        }
        s
    }))
}

fn enumerate(cli: &Cli, what: Enumerable) -> Out {
    match what {
        Enumerable::Bnc => {
            let chi = chi_of(cli)?;
            let ctx = BncContext::new(chi.clone())?;
            partitions_out(cli, &chi.to_string(), &ctx.enumerate()?)
        }
        Enumerable::Lr => family_out(cli, &enumerate_lr(&chi_of(cli)?, &eps_of(cli)?)?),
        Enumerable::Lrlat => family_out(cli, &lateral_closure(&enumerate_lr(&chi_of(cli)?, &eps_of(cli)?)?)),
        Enumerable::Bncffb => {
            let chi_hat: ChiMap = need(&cli.chihat, "chihat")?.parse()?;
            let fctx = lr_replacement(&chi_hat)?;
            partitions_out(cli, &chi_hat.to_string(), &fctx.enumerate()?)
        }
    }
}

fn mobius(cli: &Cli) -> Out {
    let ctx = BncContext::new(chi_of(cli)?)?;
    let sigma = SetPartition::parse(need(&cli.sigma, "sigma")?)?;
    let f = format_of(cli, Format::Text, &[Format::Json, Format::Text])?;
    match &cli.pi {
        Some(p) => {
            let pi = SetPartition::parse(p)?;
            let mu = ctx.mobius(&pi, &sigma)?;
            Ok(emit(f, json!({ "pi": pi.to_rgs_string(), "sigma": sigma.to_rgs_string(), "mobius": mu }), || format!("{mu}\n")))
        }
        None => {
            let col = ctx.mobius_column(&sigma)?;
            let items: Vec<Value> = col.iter().map(|(t, m)| json!({ "pi": t.to_rgs_string(), "mobius": m })).collect();
            Ok(emit(f, json!({ "sigma": sigma.to_rgs_string(), "column": items }), || {
                col.iter().map(|(t, m)| format!("{} {m}\n", t.to_block_string())).collect()
            }))
        }
    }
}

fn sample_inputs(space: &BBProbSpace, chi: &ChiMap, seed: u64) -> Result<Vec<bnc_engine::AlgebraElement>, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(chi.sides().iter().map(|s| space.random_side_element(*s, &mut rng)).collect::<Result<Vec<_>, _>>()?)
}

fn moments(cli: &Cli, cumulants: bool) -> Out {
    let chi = chi_of(cli)?;
    let space = load_space(cli, "m2-scalar")?;
    let ctx = BncContext::new(chi.clone())?;
    let z = sample_inputs(&space, &chi, cli.seed)?;
    let engine = MomentEngine::new(&space);
    let f = format_of(cli, Format::Json, &[Format::Json, Format::Text])?;
    let inputs: Vec<String> = z.iter().map(|x| x.to_strings().join(" ")).collect();
    let (table, round_trip) = if cumulants {
        let kt = engine.cumulant_table(&ctx, &z)?;
        let mut ok = true;
        for (p, e) in &engine.moment_table(&ctx, &z)?.entries {
            let mut acc = space.base().zero();
            for (s, k) in &kt.entries {
                if s.refines(p) {
                    acc = acc.add(k)?;
                }
            }
            ok &= &acc == e;
        }
        (kt, Some(ok))
    } else {
        (engine.moment_table(&ctx, &z)?, None)
    };
    let mut j = table.to_json();
    j["inputs"] = json!(inputs);
    if let Some(ok) = round_trip {
        j["round_trip"] = json!(ok);
    }
    let s = emit(f, j, || {
        let mut s = String::new();
        for (i, x) in inputs.iter().enumerate() {
            s.push_str(&format!("Z{} = {x}\n", i + 1));
        }
        for (p, v) in &table.entries {
            s.push_str(&format!("{} {}\n", p.to_block_string(), v.to_strings().join(" ")));
        }
        if let Some(ok) = round_trip {
            s.push_str(&format!("round_trip: {ok}\n"));
        }
        s
    });
    if round_trip == Some(false) {
        print!("{s}");
        return Err(Failure::Claims);
    }
    Ok(s)
}

fn embedding(cli: &Cli) -> Result<(FfbEmbedding, Report), Failure> {
    let name = cli.fixture.as_deref().unwrap_or("doubled-m2");
    if name != "doubled-m2" {
        return Err(Error::Parse(format!("ffb suites run on the doubled-m2 fixture, not {name:?}")).into());
    }
    let space = fixtures::m2_scalar();
    let fam = fixtures::m2_scalar_family(&space);
    Ok(embed_ffb_family(&space, &fam, cli.word_cap)?)
}

fn verify(cli: &Cli, suite: Suite, perturb: bool, projected: &Option<String>) -> Out {
    let rep = match suite {
        Suite::BbAxioms => {
            let r = load_space(cli, "m2-scalar")?.check_bb_axioms();
            if !r.all_pass() {
                return Err(Failure::Axioms(r));
            }
            r
        }
        Suite::Bifree => {
            let (chi, eps) = (chi_of(cli)?, eps_of(cli)?);
            let space = load_space(cli, "m2-scalar")?;
            let mut colours: Vec<u32> = eps.colours().to_vec();
            colours.sort_unstable();
            colours.dedup();
            let extra = colours.last().copied().unwrap_or(0) + 1;
            if perturb && colours.len() < 2 {
                colours.push(extra);
            }
            let tm = ThetaModel::new(&space, &colours, cli.depth.unwrap_or(chi.len() + 1))?;
            let z = sample_inputs(&space, &chi, cli.seed)?;
            let mut ops: Vec<OpRef> = Vec::new();
            for (i, ((s, c), x)) in chi.sides().iter().zip(eps.colours()).zip(&z).enumerate() {
                ops.push(tm.operator(*c, *s, x, &format!("Z{}", i + 1))?);
            }
            if perturb {
                let last = ops.len() - 1;
                let other = *colours.iter().find(|&&c| c != eps.colours()[last]).expect("two colours");
                let s = chi.sides()[last];
                let w = tm.operator(other, s, &z[last], "W")?;
                ops[last] = OpRef::product(format!("{}*{}", ops[last].label(), w.label()), &[ops[last].clone(), w]);
            }
            MomentEngine::new(tm.model()).bifree_moment_check(&chi, &eps, &ops)?
        }
        Suite::FfbSystem => {
            let (emb, mut rep) = embedding(cli)?;
            let sys = if perturb { emb.corrupted_system() } else { emb.system().clone() };
            rep.absorb("system", check_ffb_system(emb.model(), &sys, cli.word_cap)?);
            rep.absorb("cumulants", ffb_cumulant_checks(&emb, cli.word_cap)?);
            let mut out = Report::new();
            out.absorb("embedding", rep);
            out
        }
        Suite::FfbIndependence => {
            if cli.fixture.as_deref() == Some("m2-scalar") {
                let space = load_space(cli, "m2-scalar")?;
                let fam = fixtures::m2_scalar_family(&space);
                let theta = ThetaRepresentation::new(&space, &fam.colours)?;
                check_ffb_independence(&space, &fam, &theta, cli.word_cap)?
            } else {
                let (emb, _) = embedding(cli)?;
                if perturb {
                    let p = Perturbed::new(emb.model(), emb.family(), emb.model().base().one());
                    check_ffb_independence(&p, emb.family(), &emb, cli.word_cap)?
                } else {
                    verify_system_gives_ffb(&emb, cli.word_cap, cli.word_cap.min(3))?
                }
            }
        }
        Suite::LrDecompose => {
            let (chi, eps) = (chi_of(cli)?, eps_of(cli)?);
            if chi.len() != eps.len() {
                return Err(Error::SizeMismatch { expected: chi.len(), found: eps.len() }.into());
            }
            let space = load_space(cli, "m2-scalar")?;
            let x = build_bimodule_from_space(&space)?.module;
            let mut colours: Vec<u32> = eps.colours().to_vec();
            colours.sort_unstable();
            colours.dedup();
            let fp = FreeProduct::new(colours.iter().map(|&c| (c, x.clone())).collect(), cli.depth.unwrap_or(chi.len()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let mut ops = Vec::new();
            for (s, c) in chi.sides().iter().zip(eps.colours()) {
                ops.push(LrOperand::new(&fp, *s, *c, random_side_operator(&x, *s, &mut rng)?)?);
            }
            let proj: Vec<usize> = match projected {
                Some(p) => EpsilonMap::from_str_positions(p)?,
                None => Vec::new(),
            };
            verify_lr_decomposition(&fp, &ops, &proj)?
        }
    };
    report_out(cli, &rep)
}

trait Positions {
    fn from_str_positions(s: &str) -> Result<Vec<usize>, Error>;
}

impl Positions for EpsilonMap {
    /// 1-based positions to 0-based indices.
    fn from_str_positions(s: &str) -> Result<Vec<usize>, Error> {
        let e: EpsilonMap = s.parse()?;
        e.colours()
            .iter()
            .map(|&c| if c == 0 { Err(Error::Parse("positions are 1-based".into())) } else { Ok(c as usize - 1) })
            .collect()
    }
}

fn render(cli: &Cli, diagram: &Option<PathBuf>, index: Option<usize>, caption: &str) -> Out {
    let f = match format_of(cli, Format::Tikz, &[Format::Tikz, Format::Dot])? {
        Format::Dot => RenderFormat::Dot,
        _ => RenderFormat::Tikz,
    };
    if let Some(path) = diagram {
        let s = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        return Ok(render_diagram(&LrDiagram::from_json_str(&s)?, f, caption)?);
    }
    let chi = chi_of(cli)?;
    if let Some(i) = index {
        let fam = enumerate_lr(&chi, &eps_of(cli)?)?;
        let d = fam
            .diagrams
            .get(i.wrapping_sub(1))
            .ok_or_else(|| Failure::Usage(format!("--index must lie in 1..={}", fam.len())))?;
        return Ok(render_diagram(d, f, caption)?);
    }
    let pi = SetPartition::parse(need(&cli.pi, "pi")?)?;
    BncContext::new(chi.clone())?.require_bnc(&pi)?;
    Ok(render_partition(&pi, &chi, f, caption)?)
}

fn run(cli: &Cli) -> Out {
    match &cli.cmd {
        Cmd::Enumerate { what } => enumerate(cli, *what),
        Cmd::Mobius => mobius(cli),
        Cmd::Moments => moments(cli, false),
        Cmd::Cumulants => moments(cli, true),
        Cmd::Verify { suite, perturb, projected } => verify(cli, *suite, *perturb, projected),
        Cmd::Render { diagram, index, caption } => render(cli, diagram, *index, caption),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(c) = cli.cap {
        // read by the library on every capped enumeration; set before any work starts
        std::env::set_var("BNC_ENGINE_CAP", c.to_string());
    }
    match run(&cli) {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(Failure::Engine(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Axioms(r)) => {
            print!("{}", r.to_text());
            eprintln!("error: the space fails the B-B axioms");
            ExitCode::from(4)
        }
        Err(Failure::Claims) => {
            eprintln!("error: some claims failed");
            ExitCode::from(5)
        }
    }
}
