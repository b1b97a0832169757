use clap::{Args, Parser, Subcommand, ValueEnum};
use k3gap::certifier::{certify_gap, Verdict};
use k3gap::config::{parse_class, RunConfig};
use k3gap::enumeration::{
    alpha_block, beta_block, enumerate_cached, negative_sublattice, xi_eta_block, RootCache,
};
use k3gap::exact::{parse_rational, Q};
use k3gap::frame::{build_frame, kahler_cone_check, HodgeFrame};
use k3gap::lattice::{build_k3_lattice, IntersectionLattice, LatticeVector};
use k3gap::report::{lattice_facts, run_pipeline};
use k3gap::search::{donaldson_h0_bound, exclusion_search, Outcome, SearchOptions, StabilityCount};
use serde::Serialize;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "k3gap",
    version,
    about = "Area-gap certificates on the K3 lattice"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Root-set cache directory.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Run configuration (key = value file).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write JSON here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice invariants and root counts.
    Lattice {
        #[command(subcommand)]
        action: LatticeAction,
    },
    /// Norm −2 vectors of a definite block.
    Roots {
        #[command(subcommand)]
        action: RootsAction,
    },
    /// Period point and Kähler class for one t.
    Frame {
        #[command(subcommand)]
        action: FrameAction,
    },
    /// Area-gap certificate for one t.
    Certify {
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        norm_floor: Option<i64>,
    },
    /// Decomposition exclusion search.
    Exclude {
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        #[arg(long)]
        budget_sq: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        #[arg(long)]
        expect: Option<ExpectArg>,
        #[arg(long)]
        lagrangian: bool,
    },
    /// Riemann–Roch lower bound on h⁰ for a stable curve.
    Donaldson {
        #[arg(long)]
        genus: u32,
        #[arg(long, allow_hyphen_values = true)]
        euler_normal: i64,
        #[arg(long, default_value_t = 0)]
        bonus: u8,
    },
    /// Full pipeline over every t in the configuration.
    Run,
}

#[derive(Subcommand)]
enum LatticeAction {
    Check,
}

#[derive(Subcommand)]
enum RootsAction {
    Enumerate {
        #[arg(long, value_enum, default_value_t = Block::Alpha)]
        block: Block,
        /// Include the vectors themselves.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Subcommand)]
enum FrameAction {
    Build {
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Block {
    Alpha,
    Beta,
    XiEta,
    Negative,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum ExpectArg {
    Found,
    Impossible,
}

struct Ctx {
    cfg: RunConfig,
    lat: IntersectionLattice,
    cache: Option<RootCache>,
    out: Option<PathBuf>,
}

impl Ctx {
    fn frame(&self, t: &Option<String>) -> Result<HodgeFrame, String> {
        let t = match t {
            Some(s) => parse_q(s)?,
            None => self.cfg.t_list[0].clone(),
        };
        let params = self.cfg.params(&t);
        params.validate().map_err(|e| e.to_string())?;
        build_frame(&self.lat, &params).map_err(|e| e.to_string())
    }

    fn emit<T: Serialize>(&self, value: &T) -> Result<(), String> {
        let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
        match &self.out {
            Some(p) => std::fs::write(p, text + "\n").map_err(|e| format!("{}: {e}", p.display())),
            None => {
                println!("{text}");
                Ok(())
            }
        }
    }
}

fn parse_q(s: &str) -> Result<Q, String> {
    parse_rational(s).ok_or_else(|| format!("bad rational {s:?}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    let mut cfg = match &cli.common.config {
        Some(p) => RunConfig::load(p).map_err(|e| format!("{}:{e}", p.display()))?,
        None => RunConfig::reference(),
    };
    if cli.common.cache_dir.is_some() {
        cfg.cache_dir = cli.common.cache_dir.clone();
    }
    let ctx = Ctx {
        cache: cfg.cache_dir.as_ref().map(RootCache::new),
        cfg,
        lat: build_k3_lattice(),
        out: cli.common.out,
    };

    match cli.command {
        Command::Lattice {
            action: LatticeAction::Check,
        } => {
            let (facts, _) =
                lattice_facts(&ctx.lat, ctx.cache.as_ref()).map_err(|e| e.to_string())?;
            ctx.emit(&facts)?;
            Ok(facts.ok())
        }
        Command::Roots {
            action: RootsAction::Enumerate { block, list },
        } => {
            let sub = match block {
                Block::Alpha => alpha_block(&ctx.lat),
                Block::Beta => beta_block(&ctx.lat),
                Block::XiEta => xi_eta_block(&ctx.lat),
                Block::Negative => negative_sublattice(&ctx.lat),
            };
            let (rs, hit) =
                enumerate_cached(&sub, -2, ctx.cache.as_ref()).map_err(|e| e.to_string())?;
            let vectors: Option<Vec<String>> = list.then(|| {
                rs.ambient(&sub)
                    .iter()
                    .map(|v| LatticeVector::from_ints(v).ascii())
                    .collect()
            });
            ctx.emit(&json!({
                "sublattice": rs.sublattice_id,
                "rank": sub.rank(),
                "norm": rs.norm,
                "count": rs.len(),
                "closed_under_negation": rs.closed_under_negation(),
                "cache_hit": hit,
                "vectors": vectors,
            }))?;
            Ok(true)
        }
        Command::Frame {
            action: FrameAction::Build { t },
        } => {
            let f = ctx.frame(&t)?;
            let neg = negative_sublattice(&ctx.lat);
            let roots = enumerate_cached(&neg, -2, ctx.cache.as_ref())
                .map_err(|e| e.to_string())?
                .0;
            let kahler = kahler_cone_check(&ctx.lat, &f, &roots.ambient(&neg));
            let ok = kahler.passed;
            ctx.emit(&json!({
                "params": f.params,
                "summary": f.summary(),
                "omega_t": f.omega_t,
                "omega_re": f.omega_re,
                "omega_im": f.omega_im,
                "kahler": kahler,
            }))?;
            Ok(ok)
        }
        Command::Certify { t, norm_floor } => {
            let f = ctx.frame(&t)?;
            let floor = norm_floor.unwrap_or(ctx.cfg.norm_floor);
            let cert = certify_gap(&ctx.lat, &f, floor).map_err(|e| e.to_string())?;
            ctx.emit(&cert)?;
            Ok(cert.verdict == Verdict::Pass)
        }
        Command::Exclude {
            target,
            budget_sq,
            t,
            expect,
            lagrangian,
        } => {
            let f = ctx.frame(&t)?;
            let class = parse_class(&target)?;
            let budget = match budget_sq {
                Some(s) => parse_q(&s)?,
                None => ctx.cfg.budget_sq.clone(),
            };
            let cert = certify_gap(&ctx.lat, &f, -2).map_err(|e| e.to_string())?;
            let v = exclusion_search(
                &ctx.lat,
                &class,
                &budget,
                &f,
                &cert,
                SearchOptions {
                    lagrangian: lagrangian || ctx.cfg.lagrangian,
                },
            )
            .map_err(|e| e.to_string())?;
            ctx.emit(&v)?;
            let expected = expect.unwrap_or(ExpectArg::Impossible);
            Ok(match v.outcome {
                Outcome::Found => expected == ExpectArg::Found,
                Outcome::Impossible => expected == ExpectArg::Impossible,
            })
        }
        Command::Donaldson {
            genus,
            euler_normal,
            bonus,
        } => {
            let s =
                StabilityCount::new(genus, euler_normal, bonus).ok_or("bonus must be 0 or 1")?;
            ctx.emit(&json!({
                "input": s,
                "h0_lower_bound": donaldson_h0_bound(s),
            }))?;
            Ok(true)
        }
        Command::Run => {
            let report = run_pipeline(&ctx.cfg).map_err(|e| e.to_string())?;
            let pass = report.overall.pass;
            ctx.emit(&report)?;
            Ok(pass)
        }
    }
}
