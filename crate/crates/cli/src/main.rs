use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use theta_forge_core::charspace::{
    all_even_gopel_groups, enumerate_gopel_groups, even_chars, gopel_group_count, hyperelliptic_even_gopel_groups,
};
use theta_forge_core::classify::{
    abcde_residuals, curve_from_fundamentals, d8_remark_test, derive_even_thetanulls, v4_fundamental_test,
    v4_theta_test, v4_theta_test_printed, EvenThetas, FundamentalThetas, LOCUS_TOL,
};
use theta_forge_core::cyclic::{
    algorithm1_scaffold, case4_alpha, fit_genus4_constants, genus4_case2_reduction, genus4_trigonal_ratios,
    picard_params, CyclicCurveSpec,
};
use theta_forge_core::identities::{full_catalog, genus2_suite, genus3_reference_suite, identity_residuals};
use theta_forge_core::igusa::{
    absolute_invariants, d12_polynomials, d8_polynomial, igusa, l2_polynomial, locus_membership, LocusFlags,
};
use theta_forge_core::periods::{period_matrix, HyperellipticCurve, DEFAULT_QUAD_ORDER};
use theta_forge_core::theta::{
    half_thetanulls, random_siegel_point, theta, DEFAULT_MAX_RADIUS, DEFAULT_TOL,
};
use theta_forge_core::thomae::{genus3_branch_points, picard_branch_points, verify_thomae};
use theta_forge_core::{labels, BinarySextic, EvalParams, IgusaInvariants, RatChar, SiegelPoint};

#[derive(Parser)]
#[command(name = "theta-forge", version, about = "Theta constants, period matrices and genus-2 loci")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Serialize, Clone)]
struct RunConfig {
    /// Absolute tolerance for theta series truncation.
    #[arg(long = "tol", global = true, default_value_t = DEFAULT_TOL)]
    tolerance: f64,
    /// Gauss-Chebyshev nodes per period integral.
    #[arg(long, global = true, default_value_t = DEFAULT_QUAD_ORDER)]
    quad_order: usize,
    /// Largest lattice enumeration radius.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_RADIUS)]
    max_radius: usize,
    /// Write JSON here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for commands that draw random period matrices.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate Goepel groups.
    Gopel {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        rank: usize,
        /// Keep only groups of even characteristics.
        #[arg(long)]
        even_only: bool,
        /// With --even-only, also drop groups through thetanulls that vanish on hyperelliptic curves.
        #[arg(long)]
        hyperelliptic: bool,
    },
    /// Evaluate a theta constant, or all even half-integer ones.
    Thetanull {
        /// Period matrix: JSON file or inline {"g","re","im"}.
        #[arg(long)]
        tau: String,
        /// Characteristic {"g","top","bottom"} with 0/1 entries, or {"g","top_num","top_den","bottom_num","bottom_den"}.
        #[arg(long = "char")]
        characteristic: Option<String>,
        /// Argument z as a list of [re, im]; zero when absent.
        #[arg(long)]
        z: Option<String>,
    },
    /// Period matrix of a hyperelliptic curve.
    Periods {
        /// Curve: JSON file or inline {"genus","branch_points"}.
        #[arg(long)]
        curve: String,
    },
    /// Fit Thomae's formula on a curve's thetanulls.
    VerifyThomae {
        #[arg(long)]
        curve: String,
    },
    /// Branch points from a period matrix.
    Invert {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        tau: String,
    },
    /// Theta identities from Goepel groups, optionally evaluated.
    Identities {
        #[arg(long)]
        genus: usize,
        /// Genus-2 group name i..vi; genus 3 uses the reference group.
        #[arg(long)]
        group: Option<String>,
        /// Every identity from every all-even group.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        tau: Option<String>,
        /// Evaluate at this many random period matrices drawn from --seed.
        #[arg(long, default_value_t = 0)]
        random: usize,
        /// Include the structured identity instances.
        #[arg(long)]
        emit: bool,
    },
    /// Genus-2 locus tests on thetanulls.
    Classify {
        /// θ1..θ10 as a list of [re, im].
        #[arg(long, conflicts_with_all = ["tau", "curve"])]
        thetas: Option<String>,
        #[arg(long, conflicts_with = "curve")]
        tau: Option<String>,
        #[arg(long)]
        curve: Option<String>,
    },
    /// Igusa invariants and loci of a binary sextic.
    ClassifyInvariants {
        /// Polynomial such as "x^6-1", or a JSON coefficient list a0..a6.
        #[arg(long)]
        sextic: String,
    },
    /// Cyclic (non-hyperelliptic) curves.
    Cyclic {
        #[command(subcommand)]
        command: CyclicCommand,
    },
}

#[derive(Subcommand)]
enum CyclicCommand {
    /// (s, t) of y^3 = x(x-1)(x-s)(x-t) from a genus-3 period matrix.
    PicardParams {
        #[arg(long)]
        tau: String,
    },
    /// Reduced group data, normal form and inversion route for y^n = f(x).
    Plan {
        #[arg(long)]
        equation: String,
        #[arg(long)]
        reduced_order: Option<usize>,
    },
    /// Genus-4 trigonal ratios from θ1..θ15, with a constant fit when a1, a2, a3 are given.
    Trigonal {
        /// θ1..θ15 as a list of [re, im].
        #[arg(long)]
        thetas: String,
        /// a1, a2, a3 as a list of [re, im].
        #[arg(long)]
        branch: Option<String>,
    },
    /// Exact reduction of y^3 = (x^2-1)(x^2-α1)(x^2-α2) to y^3 = x(x-1)(x-β1)(x-β2)(x-β3).
    Case2 {
        #[arg(long)]
        alpha1: String,
        #[arg(long)]
        alpha2: String,
    },
}

enum Failure {
    Input(String),
    Domain(String),
    Precision(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Domain(_) => 2,
            Failure::Precision(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Domain(m) | Failure::Precision(m) => m,
        }
    }
}

impl From<theta_forge_core::Error> for Failure {
    fn from(e: theta_forge_core::Error) -> Self {
        if e.is_precision() {
            Failure::Precision(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

type Outcome<T> = Result<T, Failure>;

/// Inline JSON when the argument starts with `{`, `[` or `"`; otherwise a file path.
fn load<T: DeserializeOwned>(what: &str, arg: &str) -> Outcome<T> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with(['{', '[', '"']) {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::Input(format!("{what}: cannot read {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| {
        let msg = format!("{what}: {e}");
        if e.is_data() {
            Failure::Domain(msg)
        } else {
            Failure::Input(msg)
        }
    })
}

/// A period matrix, also accepted inside a `periods` output document.
fn load_tau(arg: &str) -> Outcome<SiegelPoint> {
    let mut v: Value = load("tau", arg)?;
    for key in ["result", "tau"] {
        if let Some(inner) = v.get(key) {
            v = inner.clone();
        }
    }
    serde_json::from_value(v).map_err(|e| Failure::Domain(format!("tau: {e}")))
}

fn complex_list(what: &str, arg: &str) -> Outcome<Vec<Complex64>> {
    let v: Vec<[f64; 2]> = load(what, arg)?;
    Ok(v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result types serialize")
}

fn rational(what: &str, s: &str) -> Outcome<BigRational> {
    BigRational::from_str(s.trim()).map_err(|e| Failure::Input(format!("{what}: {s:?} is not a rational number ({e})")))
}

fn even_thetas_of_tau(tau: &SiegelPoint, p: &EvalParams) -> Outcome<EvenThetas> {
    if tau.genus() != 2 {
        return Err(Failure::Domain(format!("genus-2 period matrix expected, got genus {}", tau.genus())));
    }
    let chars = (1..=10).map(|i| labels::theta_char(2, i)).collect::<Result<Vec<_>, _>>()?;
    Ok(EvenThetas::from_slice(&half_thetanulls(tau, &chars, p)?)?)
}

fn run(cfg: &RunConfig, cmd: &Command) -> Outcome<Value> {
    let p = EvalParams::new(cfg.tolerance, cfg.max_radius)?;
    if cfg.quad_order == 0 {
        return Err(Failure::Domain("quad-order must be positive".into()));
    }
    Ok(match cmd {
        Command::Gopel { genus, rank, even_only, hyperelliptic } => {
            let groups = match (even_only, hyperelliptic) {
                (false, false) => enumerate_gopel_groups(*genus, *rank)?,
                (true, false) => all_even_gopel_groups(*genus, *rank)?,
                (_, true) => hyperelliptic_even_gopel_groups(*genus, *rank)?,
            };
            json!({
                "genus": genus,
                "rank": rank,
                "formula_count": gopel_group_count(*genus, *rank).to_string(),
                "count": groups.len(),
                "groups": groups,
            })
        }
        Command::Thetanull { tau, characteristic, z } => {
            let tau = load_tau(tau)?;
            let g = tau.genus();
            let z = match z {
                Some(z) => complex_list("z", z)?,
                None => vec![Complex64::new(0.0, 0.0); g],
            };
            if z.len() != g {
                return Err(Failure::Domain(format!("z has {} entries, genus is {g}", z.len())));
            }
            match characteristic {
                Some(ch) => {
                    let ch: RatChar = load("char", ch)?;
                    json!({ "char": ch, "z": z.iter().map(|w| pair(*w)).collect::<Vec<_>>(), "value": pair(theta(&z, &tau, &ch, &p)?) })
                }
                None => {
                    let values = even_chars(g)
                        .into_iter()
                        .map(|c| Ok(json!({ "char": c, "value": pair(theta(&z, &tau, &RatChar::from(&c), &p)?) })))
                        .collect::<Outcome<Vec<_>>>()?;
                    json!({ "values": values })
                }
            }
        }
        Command::Periods { curve } => {
            let curve: HyperellipticCurve = load("curve", curve)?;
            to_value(&period_matrix(&curve, cfg.quad_order)?)
        }
        Command::VerifyThomae { curve } => {
            let curve: HyperellipticCurve = load("curve", curve)?;
            let pd = period_matrix(&curve, cfg.quad_order)?;
            json!({ "tau": pd.tau, "report": verify_thomae(&pd, &p)? })
        }
        Command::Invert { genus, tau } => {
            let tau = load_tau(tau)?;
            if tau.genus() != *genus {
                return Err(Failure::Domain(format!("--genus {genus} but τ has genus {}", tau.genus())));
            }
            match genus {
                2 => {
                    let sol = picard_branch_points(&tau, &p)?;
                    let [l, m, n] = [sol.values[0], sol.values[1], sol.values[2]].map(pair);
                    json!({ "lambda": l, "mu": m, "nu": n, "residual": sol.thomae_residual, "solution": sol })
                }
                3 => {
                    let sol = genus3_branch_points(&tau, &p)?;
                    json!({ "a": sol_values(&sol.values), "residual": sol.thomae_residual, "solution": sol })
                }
                g => return Err(Failure::Domain(format!("inversion implemented for genus 2 and 3, not {g}"))),
            }
        }
        Command::Identities { genus, group, all, tau, random, emit } => {
            let suite = match (genus, group, all) {
                (g, _, true) => full_catalog(*g)?,
                (2, Some(name), false) => {
                    let grp = labels::genus2_even_group(name)?;
                    theta_forge_core::identities::generate_identities(
                        &grp,
                        &theta_forge_core::identities::default_a_choices(&grp),
                    )?
                }
                (2, None, false) => genus2_suite()?,
                (3, None, false) => genus3_reference_suite()?,
                (g, _, _) => return Err(Failure::Domain(format!("no identity suite for genus {g} with these options"))),
            };
            let mut taus: Vec<SiegelPoint> = Vec::new();
            if let Some(t) = tau {
                taus.push(load_tau(t)?);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            taus.extend((0..*random).map(|_| random_siegel_point(*genus, &mut rng)));
            let evaluations = taus
                .iter()
                .map(|t| {
                    let res = identity_residuals(&suite, t, &p)?;
                    Ok(json!({ "tau": t, "max_residual": res.iter().copied().fold(0.0, f64::max), "residuals": res }))
                })
                .collect::<Outcome<Vec<_>>>()?;
            let mut out = json!({
                "count": suite.len(),
                "identities": suite.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "evaluations": evaluations,
            });
            if *emit {
                out["instances"] = to_value(&suite);
            }
            out
        }
        Command::Classify { thetas, tau, curve } => {
            let mut exact_sextic = None;
            let th = match (thetas, tau, curve) {
                (Some(t), _, _) => EvenThetas::from_slice(&complex_list("thetas", t)?)?,
                (_, Some(t), _) => even_thetas_of_tau(&load_tau(t)?, &p)?,
                (_, _, Some(c)) => {
                    let curve: HyperellipticCurve = load("curve", c)?;
                    exact_sextic = rational_sextic(&curve);
                    even_thetas_of_tau(&period_matrix(&curve, cfg.quad_order)?.tau, &p)?
                }
                _ => return Err(Failure::Input("one of --thetas, --tau or --curve is required".into())),
            };
            let ft = FundamentalThetas::from_even(&th);
            let v4 = v4_theta_test(&th);
            let on_v4 = v4.residual < LOCUS_TOL;
            let invariants = exact_sextic.as_ref().map(|f| invariants_report(&igusa(f)));
            let flags = exact_sextic.as_ref().map(|f| locus_membership(&igusa(f)));
            let (estimate, source) = match flags {
                Some(fl) => (group_from_loci(&fl), "igusa invariants"),
                None if on_v4 => ("V4 or larger", "theta relations"),
                None => ("C2", "theta relations"),
            };
            let fundamentals = curve_from_fundamentals(&ft, LOCUS_TOL);
            json!({
                "aut_group_estimate": estimate,
                "estimate_source": source,
                "locus_tolerance": LOCUS_TOL,
                "v4_theta_residual": v4.residual,
                "igusa_loci": flags.map(|fl| fl.names()),
                "igusa": invariants,
                "alpha_roots": fundamentals.as_ref().ok().map(|c| c.alpha_roots),
                "thetas": (1..=10).map(|l| pair(th.get(l))).collect::<Vec<_>>(),
                "v4_theta_test": v4,
                "v4_theta_test_printed": v4_theta_test_printed(&th),
                "v4_fundamental_test": v4_fundamental_test(&ft),
                "d8_remark": { "plus": d8_remark_test(&ft, true), "minus": d8_remark_test(&ft, false) },
                "abcde": abcde_residuals(&th)?,
                "derived_pairs": derive_even_thetanulls(&ft)?,
                "curve_from_fundamentals": fundamentals.as_ref().ok(),
                "curve_from_fundamentals_error": fundamentals.as_ref().err().map(ToString::to_string),
            })
        }
        Command::ClassifyInvariants { sextic } => {
            let f: BinarySextic = if sextic.trim_start().starts_with('[') {
                load("sextic", sextic)?
            } else {
                BinarySextic::parse(sextic)?
            };
            let j = igusa(&f);
            let mut out = invariants_report(&j);
            out["sextic"] = json!(f.to_string());
            out
        }
        Command::Cyclic { command } => run_cyclic(cfg, &p, command)?,
    })
}

fn invariants_report(j: &IgusaInvariants) -> Value {
    let absolute = absolute_invariants(j);
    let [i1, i2, i3] = match &absolute {
        Ok(a) => a.clone().map(|x| json!(x.to_string())),
        Err(_) => [Value::Null, Value::Null, Value::Null],
    };
    json!({
        "J2": j.j2.to_string(),
        "J4": j.j4.to_string(),
        "J6": j.j6.to_string(),
        "J10": j.j10.to_string(),
        "i1": i1,
        "i2": i2,
        "i3": i3,
        "absolute_invariants_error": absolute.err().map(|e| e.to_string()),
        "loci": locus_membership(j).names(),
        "l2": l2_polynomial(j).to_string(),
        "d8": d8_polynomial(j).to_string(),
        "d12": d12_polynomials(j).map(|x| x.to_string()),
    })
}

/// Exact sextic when the genus is 2 and every branch point is real; binary
/// doubles convert to rationals without loss.
fn rational_sextic(curve: &HyperellipticCurve) -> Option<BinarySextic> {
    if curve.genus() != 2 || curve.branch_points().iter().any(|z| z.im != 0.0) {
        return None;
    }
    let roots = curve
        .branch_points()
        .iter()
        .map(|z| BigRational::from_float(z.re))
        .collect::<Option<Vec<_>>>()?;
    BinarySextic::from_roots(BigRational::from_integer(1.into()), &roots).ok()
}

fn group_from_loci(fl: &LocusFlags) -> &'static str {
    match (fl.l2, fl.d8, fl.d12) {
        (false, _, _) => "C2",
        (true, false, false) => "V4",
        (true, true, false) => "D8",
        (true, false, true) => "D12",
        (true, true, true) => "D8 and D12 loci both contain it; a special curve with a larger group",
    }
}

fn sol_values(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| pair(*z)).collect()
}

fn run_cyclic(_cfg: &RunConfig, p: &EvalParams, cmd: &CyclicCommand) -> Outcome<Value> {
    Ok(match cmd {
        CyclicCommand::PicardParams { tau } => {
            let tau = load_tau(tau)?;
            to_value(&picard_params(&tau, p)?)
        }
        CyclicCommand::Plan { equation, reduced_order } => {
            let mut spec = CyclicCurveSpec::parse(equation)?;
            if let Some(m) = reduced_order {
                spec = spec.with_reduced_order(*m);
            }
            to_value(&algorithm1_scaffold(&spec)?)
        }
        CyclicCommand::Trigonal { thetas, branch } => {
            let th = complex_list("thetas", thetas)?;
            let th: [Complex64; 15] = th
                .try_into()
                .map_err(|v: Vec<Complex64>| Failure::Domain(format!("expected 15 thetanulls, got {}", v.len())))?;
            let map: BTreeMap<usize, Complex64> = (1..=15).zip(th).collect();
            let ratios = genus4_trigonal_ratios(&map, 10.0 * p.target_abs_tol)?;
            let fit = match branch {
                Some(b) => {
                    let a: [Complex64; 3] = complex_list("branch", b)?
                        .try_into()
                        .map_err(|v: Vec<Complex64>| Failure::Domain(format!("expected a1, a2, a3, got {} values", v.len())))?;
                    Some(fit_genus4_constants(&th, &a, 10.0 * p.target_abs_tol)?)
                }
                None => None,
            };
            json!({ "ratios": ratios, "fit": fit })
        }
        CyclicCommand::Case2 { alpha1, alpha2 } => {
            let (a1, a2) = (rational("alpha1", alpha1)?, rational("alpha2", alpha2)?);
            let red = genus4_case2_reduction(&a1, &a2)?;
            let case4 = case4_alpha(&a1, &a2).ok().map(|a| a.to_string());
            json!({ "reduction": red, "case4_alpha": case4 })
        }
    })
}

fn emit(cfg: &RunConfig, command: &str, result: Value) -> Result<(), Failure> {
    let doc = json!({ "command": command, "config": cfg, "result": result });
    let text = serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n";
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Gopel { .. } => "gopel",
        Command::Thetanull { .. } => "thetanull",
        Command::Periods { .. } => "periods",
        Command::VerifyThomae { .. } => "verify-thomae",
        Command::Invert { .. } => "invert",
        Command::Identities { .. } => "identities",
        Command::Classify { .. } => "classify",
        Command::ClassifyInvariants { .. } => "classify-invariants",
        Command::Cyclic { command } => match command {
            CyclicCommand::PicardParams { .. } => "cyclic picard-params",
            CyclicCommand::Plan { .. } => "cyclic plan",
            CyclicCommand::Trigonal { .. } => "cyclic trigonal",
            CyclicCommand::Case2 { .. } => "cyclic case2",
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli.config, &cli.command).and_then(|r| emit(&cli.config, command_name(&cli.command), r)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
