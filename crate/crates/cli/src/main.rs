use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use supnorm::amplifier::{amplifier_diagonal_value, build_amplifier, build_is_amplifier, HeckeSystem};
use supnorm::arith::{parse_character, DirichletCharacter, SquarefreeModulus};
use supnorm::counting::{
    count_admissible_a, enumerate_a, enumerate_a_square, enumerate_r_n_matrices, geometric_sum, matrix_count_split,
    quadruple_bound_check, CongruenceReductionInstance, CountingInstance, MatrixCountInstance, Which,
};
use supnorm::exponents::{final_exponents, hybrid_combination, rat};
use supnorm::kloosterman::{kloosterman_weil_check, KloostermanQuery};
use supnorm::oscillatory::{
    dirichlet_approximate, dirichlet_approximate_exact, poisson_decay_check, voronoi_integral, Frequency, Shape,
    SmoothWindow,
};
use supnorm::special::{
    bessel_j, bessel_k_imag, bessel_k_real, bessel_y_imag_pair, bessel_y_real, voronoi_kernel, whittaker_weight,
    ArchimedeanParameter, Sign, VoronoiKernel,
};
use supnorm::transforms::{
    dot_transform_closed, dot_transform_quadrature, tilde_transform_closed_real, tilde_transform_quadrature,
    TestFunction,
};
use supnorm_cli::{emit_report, run_verify, summary, CliError, Format, RunConfig};

#[derive(Parser)]
#[command(name = "supnorm", version, about = "Kernels, exponential sums, counting oracles and exponent bookkeeping")]
struct Cli {
    /// Config file (flat key = value); defaults to $SUPNORM_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Largest enumeration box before giving up.
    #[arg(long, global = true)]
    box_cap: Option<u128>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Twisted Kloosterman sum S_chi(m, n; c) and its Weil ratio.
    Kloosterman {
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long)]
        c: u64,
        /// Square-free level of the character; must divide c.
        #[arg(long, alias = "N", default_value_t = 1)]
        level: u64,
        /// `trivial`, `real`, or comma-separated exponents per prime of the level.
        #[arg(long, alias = "char", default_value = "trivial")]
        character: String,
    },
    /// Bessel functions and the derived kernels; `bessel verify` runs the special-function suite.
    #[command(args_conflicts_with_subcommands = true)]
    Bessel {
        #[command(subcommand)]
        action: Option<BesselAction>,
        #[arg(long = "fn", value_enum)]
        function: Option<BesselFn>,
        /// Order of J, Y, K; weight k (holomorphic) for W and kernel.
        #[arg(long, allow_hyphen_values = true)]
        order: Option<f64>,
        /// Spectral parameter (Kimag, Ypair; Maass W and kernel).
        #[arg(long, allow_hyphen_values = true, conflicts_with = "order")]
        t: Option<f64>,
        #[arg(long)]
        y: Option<f64>,
        #[arg(long, value_enum, default_value = "plus")]
        sign: SignArg,
    },
    /// Bessel transforms of phi_{A,B}.
    Transform {
        #[arg(long, alias = "A")]
        a: u32,
        #[arg(long, alias = "B")]
        b: u32,
        /// Even weight k for the holomorphic transform.
        #[arg(long, conflicts_with = "t", required_unless_present = "t")]
        k: Option<u32>,
        /// Real spectral parameter for the Maass transform.
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        #[arg(long, value_enum, default_value = "closed")]
        method: Method,
    },
    /// Continued-fraction approximation a/q of x with q <= H.
    Approx {
        /// A float, or an exact fraction `p/q`.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, alias = "H")]
        h: f64,
    },
    /// |sum_m e(alpha m) Phi(m)| against Z (T ||alpha||)^-j.
    Decay {
        #[arg(long, alias = "Z")]
        z: f64,
        #[arg(long, alias = "T")]
        t: f64,
        /// A float, or an exact fraction `p/q`.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = 2)]
        j: u32,
    },
    /// int g(xi) J(alpha sqrt xi) d xi for a window g at scale Z with derivative scale T.
    Vintegral {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Weight, for holomorphic kernels.
        #[arg(long, required_if_eq("kind", "holomorphic"))]
        k: Option<u32>,
        /// Spectral parameter, for Maass kernels.
        #[arg(long, allow_hyphen_values = true, required_if_eq("kind", "maass"))]
        t: Option<f64>,
        #[arg(long = "Z", alias = "z")]
        z: f64,
        #[arg(long = "T")]
        window_t: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "plus")]
        sign: SignArg,
    },
    /// Lattice counts.
    #[command(subcommand)]
    Count(CountCmd),
    /// Amplifier for a random Hecke system and its diagonal value.
    Amplifier {
        #[arg(long, alias = "L")]
        l: f64,
        #[arg(long, alias = "N", default_value_t = 1)]
        level: u64,
        #[arg(long, alias = "char", default_value = "trivial")]
        character: String,
        /// Use the prime-and-prime-square amplifier with primes up to sqrt(L).
        #[arg(long, alias = "is-variant")]
        small_primes: bool,
    },
    /// Balanced parameters and final exponents, exactly.
    Optimize {
        /// Ramanujan exponent as `p/q`.
        #[arg(long, default_value = "7/64")]
        theta: String,
        /// Include the per-term dominance trace.
        #[arg(long)]
        emit_trace: bool,
        /// Print the hybrid combination instead.
        #[arg(long)]
        hybrid: bool,
    },
    /// Run the property suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Property id pattern; `*` matches anything.
    #[arg(default_value = "*")]
    selector: String,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Seconds; properties not started in time are reported as capped.
    #[arg(long)]
    time_budget: Option<f64>,
}

#[derive(Subcommand)]
enum BesselAction {
    /// Run the special-function suite (CSV unless --format says otherwise).
    Verify {
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BesselFn {
    #[value(alias = "J")]
    J,
    #[value(alias = "Y")]
    Y,
    #[value(alias = "K")]
    K,
    #[value(alias = "Kimag")]
    KImag,
    #[value(alias = "Ypair")]
    YPair,
    #[value(alias = "W")]
    W,
    Kernel,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Holomorphic,
    Maass,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Method {
    Closed,
    Quad,
    Both,
}

#[derive(Subcommand)]
enum CountCmd {
    /// Quadruples (c, s, r1, r2) with N | u^2 d1 d2 c + u(d1 r2 + d2 r1) + s.
    #[command(alias = "A")]
    A(QuadArgs),
    /// The subset with sc - r1 r2 a perfect square (d1 = d2 = 1).
    #[command(alias = "Asq")]
    Asq(QuadArgs),
    /// Matrices of determinant n near z, with the c = 0 split.
    Matrices {
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long)]
        y: f64,
        #[arg(long)]
        n: i64,
        #[arg(long, alias = "N", default_value_t = 1)]
        level: u64,
        #[arg(long)]
        delta: f64,
        #[arg(long, alias = "emit-elements")]
        list: bool,
    },
    /// Residue reduction statistics.
    Reduce {
        #[arg(long)]
        l1: i64,
        #[arg(long)]
        l2: i64,
        #[arg(long, default_value_t = 1)]
        d1: i64,
        #[arg(long, default_value_t = 1)]
        d2: i64,
        #[arg(long)]
        c: i64,
        #[arg(long, allow_hyphen_values = true)]
        u: i64,
        #[arg(long, alias = "N")]
        level: u64,
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
    },
    /// Kernel-weighted sum over matrices against its expected shape.
    Geometric {
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long)]
        y: f64,
        #[arg(long)]
        n: i64,
        #[arg(long, alias = "N", default_value_t = 1)]
        level: u64,
        #[arg(long, alias = "T")]
        t: f64,
        #[arg(long, default_value_t = supnorm::suites::GEOMETRIC_DELTA_MAX)]
        delta_max: f64,
    },
}

#[derive(Args)]
struct QuadArgs {
    #[arg(long, alias = "C")]
    c: f64,
    #[arg(long, alias = "S")]
    s: f64,
    #[arg(long, alias = "R")]
    r: f64,
    #[arg(long, alias = "R-tilde")]
    r_tilde: f64,
    #[arg(long, default_value_t = 1)]
    d1: i64,
    #[arg(long, default_value_t = 1)]
    d2: i64,
    #[arg(long, allow_hyphen_values = true)]
    u: i64,
    #[arg(long, alias = "N")]
    level: u64,
    /// Approximation parameter; when given, the count is compared with its bound.
    #[arg(long, alias = "H")]
    h: Option<f64>,
    #[arg(long, alias = "emit-elements")]
    list: bool,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn modulus(n: u64) -> Result<SquarefreeModulus, CliError> {
    Ok(SquarefreeModulus::new(n)?)
}

fn character(level: u64, spec: &str) -> Result<DirichletCharacter, CliError> {
    Ok(parse_character(spec, modulus(level)?)?)
}

/// `p/q` or an integer, as an exact rational.
fn parse_fraction(s: &str) -> Option<(i64, i64)> {
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let (p, q) = (p.trim().parse().ok()?, q.trim().parse().ok()?);
    (q != 0).then_some((p, q))
}

fn archimedean(order: Option<f64>, t: Option<f64>) -> Result<ArchimedeanParameter, CliError> {
    match (order, t) {
        (Some(k), None) if k.fract() == 0.0 && k > 0.0 => Ok(ArchimedeanParameter::holomorphic(k as u32)?),
        (Some(k), None) => Err(usage(format!("weight must be a positive even integer, got {k}"))),
        (None, Some(t)) => Ok(ArchimedeanParameter::maass(t)?),
        _ => Err(usage("give --order (holomorphic weight) or --t (Maass parameter)")),
    }
}

fn verify(cfg: &RunConfig, selector: &str) -> Result<u8, CliError> {
    let report = run_verify(cfg, selector);
    let text = emit_report(&report, cfg.format, cfg.output.as_deref())?;
    if cfg.output.is_some() {
        eprint!("{}", summary(&report));
    } else {
        print!("{text}");
    }
    Ok(report.exit_code())
}

fn bessel(function: Option<BesselFn>, order: Option<f64>, t: Option<f64>, y: Option<f64>, sign: SignArg) -> Result<Value, CliError> {
    let function = function.ok_or_else(|| usage("bessel needs --fn or the verify subcommand"))?;
    let y = y.ok_or_else(|| usage("bessel needs --y"))?;
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| usage(format!("this function needs {flag}")));
    let value = match function {
        BesselFn::J => bessel_j(need(order, "--order")?, y)?,
        BesselFn::Y => bessel_y_real(need(order, "--order")?, y)?,
        BesselFn::K => bessel_k_real(need(order, "--order")?, y)?,
        BesselFn::KImag => bessel_k_imag(need(t, "--t")?, y)?,
        BesselFn::YPair => bessel_y_imag_pair(need(t, "--t")?, y)?,
        BesselFn::W => whittaker_weight(&archimedean(order, t)?, y)?,
        BesselFn::Kernel => voronoi_kernel(&VoronoiKernel { param: archimedean(order, t)?, sign: sign.into() }, y)?,
    };
    Ok(json!({ "order": order, "t": t, "y": y, "value": value }))
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(b) = cli.box_cap {
        cfg.set("box_cap", &b.to_string())?;
    }
    let out: Value = match cli.cmd {
        Cmd::Kloosterman { m, n, c, level, character: spec } => {
            let chi = character(level, &spec)?;
            let q = KloostermanQuery::new(m, n, c, &chi)?;
            let w = kloosterman_weil_check(&q);
            json!({ "m": m, "n": n, "c": c, "level": level, "re": w.value.0, "im": w.value.1,
                    "abs": w.abs, "weil_bound": w.bound, "weil_ratio": w.ratio })
        }
        Cmd::Bessel { action: Some(BesselAction::Verify { format, output }), .. } => {
            cfg.format = format.unwrap_or(Format::Csv);
            if output.is_some() {
                cfg.output = output;
            }
            return verify(&cfg, "special/*");
        }
        Cmd::Bessel { action: None, function, order, t, y, sign } => bessel(function, order, t, y, sign)?,
        Cmd::Transform { a, b, k, t, method } => {
            let tf = TestFunction::new(a, b)?;
            let (mut out, closed, quad) = match (k, t) {
                (Some(k), _) => {
                    let c = dot_transform_closed(&tf, k)?;
                    let q = if method == Method::Closed { None } else { Some(dot_transform_quadrature(&tf, k)?) };
                    (json!({ "k": k, "over_pi": c.over_pi.to_string() }), c.value, q)
                }
                (None, Some(t)) => {
                    let c = tilde_transform_closed_real(&tf, t)?;
                    let q = if method == Method::Closed { None } else { Some(tilde_transform_quadrature(&tf, t)?) };
                    (json!({ "t": t, "over_pi": c.over_pi.to_string() }), c.value, q)
                }
                (None, None) => return Err(usage("give --k or --t")),
            };
            out["a"] = a.into();
            out["b"] = b.into();
            if method != Method::Quad {
                out["closed"] = closed.into();
            }
            if let Some(q) = quad {
                out["quadrature"] = q.into();
                if method == Method::Both {
                    out["relative_error"] = ((q - closed).abs() / closed.abs()).into();
                }
            }
            out
        }
        Cmd::Approx { x, h } => {
            let a = match parse_fraction(&x) {
                Some((p, q)) if x.contains('/') => {
                    let hr = rat((h * 1e6).round() as i64, 1_000_000);
                    dirichlet_approximate_exact(&rat(p, q), &hr)?
                }
                _ => dirichlet_approximate(x.parse().map_err(|_| usage(format!("bad x '{x}'")))?, h)?,
            };
            serde_json::to_value(a)?
        }
        Cmd::Decay { z, t, alpha, j } => {
            let freq = match parse_fraction(&alpha) {
                Some((num, den)) if alpha.contains('/') => Frequency::Rational { num, den },
                _ => Frequency::Real(alpha.parse().map_err(|_| usage(format!("bad alpha '{alpha}'")))?),
            };
            let w = SmoothWindow::new(z, t, Shape::LogBump)?;
            serde_json::to_value(poisson_decay_check(&w, freq, j)?)?
        }
        Cmd::Vintegral { kind, k, t, z, window_t, alpha, sign } => {
            let param = match kind {
                Kind::Holomorphic => ArchimedeanParameter::holomorphic(k.ok_or_else(|| usage("holomorphic needs --k"))?)?,
                Kind::Maass => ArchimedeanParameter::maass(t.ok_or_else(|| usage("maass needs --t"))?)?,
            };
            let w = SmoothWindow::new(z, window_t, Shape::LogBump)?;
            let v = voronoi_integral(&w, &VoronoiKernel { param, sign: sign.into() }, alpha)?;
            let size = z.powf(0.75) * param.t_star() / alpha.sqrt();
            json!({ "value": v, "size_bound": size, "ratio": v.abs() / size })
        }
        Cmd::Count(c) => count(c, &cfg)?,
        Cmd::Amplifier { l, level, character: spec, small_primes } => {
            let chi = character(level, &spec)?;
            let n = modulus(level)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let limit = (2.0 * l).ceil() as u64 + 1;
            let mut sys = HeckeSystem::sato_tate(chi, limit, &mut rng);
            let amp = if small_primes { build_is_amplifier(&sys, l, &n)? } else { build_amplifier(&sys, l, &n)? };
            let d = amplifier_diagonal_value(&mut sys, &amp)?;
            json!({ "amplifier": amp, "diagonal": [d.re, d.im], "primes": amp.lambda1.len() })
        }
        Cmd::Optimize { theta, emit_trace, hybrid } => {
            if hybrid {
                serde_json::to_value(hybrid_combination()?)?
            } else {
                let (p, q) = parse_fraction(&theta).ok_or_else(|| usage(format!("bad theta '{theta}'")))?;
                let mut v = serde_json::to_value(final_exponents(&rat(p, q))?)?;
                if !emit_trace {
                    if let Some(o) = v.as_object_mut() {
                        o.remove("trace");
                    }
                }
                v
            }
        }
        Cmd::Verify(VerifyArgs { selector, format, output, time_budget }) => {
            if let Some(f) = format {
                cfg.format = f;
            }
            if output.is_some() {
                cfg.output = output;
            }
            if let Some(b) = time_budget {
                cfg.set("time_budget", &b.to_string())?;
            }
            return verify(&cfg, &selector);
        }
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(supnorm_cli::EXIT_OK)
}

fn count(cmd: CountCmd, cfg: &RunConfig) -> Result<Value, CliError> {
    Ok(match cmd {
        CountCmd::A(q) => quads(q, Which::Plain, cfg)?,
        CountCmd::Asq(q) => quads(q, Which::Square, cfg)?,
        CountCmd::Matrices { x, y, n, level, delta, list } => {
            let mut inst = MatrixCountInstance::new(x, y, n, modulus(level)?, delta)?;
            inst.box_cap = cfg.box_cap;
            let split = matrix_count_split(&inst)?;
            let mats = if list { Some(enumerate_r_n_matrices(&inst)?) } else { None };
            json!({ "split": split, "matrices": mats })
        }
        CountCmd::Reduce { l1, l2, d1, d2, c, u, level, r1, r2 } => {
            let mut inst = CongruenceReductionInstance::new(l1, l2, d1, d2, c, u, modulus(level)?, r1, r2)?;
            inst.box_cap = cfg.box_cap;
            let rep = count_admissible_a(&inst)?;
            json!({ "report": rep, "clean": rep.clean() })
        }
        CountCmd::Geometric { x, y, n, level, t, delta_max } => {
            serde_json::to_value(geometric_sum(x, y, n, modulus(level)?, t, delta_max)?)?
        }
    })
}

fn quads(q: QuadArgs, which: Which, cfg: &RunConfig) -> Result<Value, CliError> {
    let mut inst = CountingInstance::new(q.c, q.s, q.r, q.r_tilde, q.d1, q.d2, q.u, modulus(q.level)?)?;
    inst.box_cap = cfg.box_cap;
    if let Some(h) = q.h {
        inst = inst.with_approximation(h)?;
    }
    let set = match which {
        Which::Plain => enumerate_a(&inst)?,
        Which::Square => enumerate_a_square(&inst)?,
    };
    let bound = if q.h.is_some() { Some(quadruple_bound_check(&inst, which)?) } else { None };
    Ok(json!({ "count": set.len(), "bound": bound, "quadruples": if q.list { Some(set) } else { None } }))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { supnorm_cli::EXIT_USAGE } else { supnorm_cli::EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
