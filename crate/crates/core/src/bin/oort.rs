//! Command-line surface: every computation of the library with
//! machine-readable JSON output (exact rationals as "a/b" strings, exit
//! codes 0/1/2 for ok/domain-error/usage-error). OORT_PRECISION overrides
//! the default pi-digit working precision where exact p-adic arithmetic is
//! involved.

use clap::{Args, Parser, Subcommand};
use oort::error::{Error, Result};
use oort::jsonio;
use oort::rat::{rat_from_str, rat_to_string, Rat};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "oort",
    about = "Exact computations for the local lifting problem: differents, KGB obstructions, cyclic lift certificates, stable models, Hurwitz trees"
)]
struct Cli {
    /// Emit the JSON payload instead of the human rendering.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Degree of the different from a filtration or cyclic upper jumps.
    Different(DifferentArgs),
    /// KGB obstruction predicates and witness search.
    #[command(subcommand)]
    Kgb(KgbCmd),
    /// Verify explicit lifts via the different criterion.
    #[command(subcommand, name = "verify-lift")]
    VerifyLift(VerifyCmd),
    /// Build and validate Hurwitz trees.
    #[command(subcommand)]
    Hurwitz(HurwitzCmd),
    /// Stable model of a marked open unit disc.
    #[command(name = "stable-model")]
    StableModel(StableModelArgs),
    /// Depth of a degree-p disc cover along radii.
    Depth(DepthArgs),
    /// The jump-window condition for cyclic lifting.
    #[command(name = "oort-condition")]
    OortCondition(OortConditionArgs),
    /// Artin-Schreier-Witt reductions and jumps.
    #[command(subcommand)]
    Asw(AswCmd),
}

#[derive(Args)]
struct DifferentArgs {
    /// Cyclic mode: prime p (requires a jump tuple).
    #[arg(long, value_name = "P")]
    cyclic: Option<u64>,
    /// Comma-separated upper jumps, e.g. 1,3 (cyclic mode).
    #[arg(value_name = "JUMPS")]
    jumps: Option<String>,
    /// Filtration JSON (inline, a path, or @path).
    #[arg(long, value_name = "JSON")]
    filtration: Option<String>,
}

#[derive(Subcommand)]
enum KgbCmd {
    /// (Z/p)^2 predicate with lower jumps m1, m2.
    Zpzp { p: u64, m1: i64, m2: i64 },
    /// Z/p^n x| Z/m predicate with first lower jump h.
    Meta {
        p: u64,
        n: u32,
        m: u64,
        chi: u64,
        h: i64,
    },
    /// Exhaustive witness search.
    #[command(subcommand)]
    Witness(WitnessCmd),
}

#[derive(Subcommand)]
enum WitnessCmd {
    Zpzp {
        p: u64,
        m1: i64,
        m2: i64,
    },
    Meta {
        p: u64,
        n: u32,
        m: u64,
        chi: u64,
        h: i64,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Z^p = 1 + lambda^p T^{-u}.
    Zp { p: u64, u: i64 },
    /// The two-step chain with H2 = exp_p(mu^p T^{-u}).
    Zp2 { p: u64, u: i64 },
    /// The explicit dihedral lift.
    Dihedral { p: u64 },
}

#[derive(Subcommand)]
enum HurwitzCmd {
    /// The explicit small-conductor tree (1 < h < p).
    Build {
        p: u64,
        m: u64,
        h: i64,
        /// Base points z_1,...,z_r (comma-separated).
        #[arg(long)]
        z: Option<String>,
        /// chi(c) in F_p^x of multiplicative order m.
        #[arg(long)]
        chi: Option<u64>,
        /// Emit DOT instead of JSON.
        #[arg(long)]
        dot: bool,
    },
    /// Run the axiom validator on a tree file.
    Validate { file: String },
}

#[derive(Args)]
struct StableModelArgs {
    /// marked-disc/1 JSON file (points or valuation matrix).
    file: String,
    /// Emit DOT instead of JSON.
    #[arg(long)]
    dot: bool,
}

#[derive(Args)]
struct DepthArgs {
    /// valued-laurent/1 JSON file.
    file: String,
    /// Comma-separated radii, e.g. 0,1/8,1/4.
    #[arg(long)]
    radii: String,
}

#[derive(Args)]
struct OortConditionArgs {
    p: u64,
    /// Comma-separated upper jumps.
    jumps: String,
}

#[derive(Subcommand)]
enum AswCmd {
    /// Reduce f to the standard Artin-Schreier shape.
    Reduce { file: String },
    /// Upper jumps and different of a Witt normal form.
    Jumps { file: String },
}

fn parse_jumps(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| Error::usage(format!("bad jump {x:?}")))
        })
        .collect()
}

fn parse_radii(s: &str) -> Result<Vec<Rat>> {
    s.split(',').map(|x| rat_from_str(x.trim())).collect()
}

fn read_json_arg(s: &str) -> Result<Value> {
    let text = if let Some(path) = s.strip_prefix('@') {
        std::fs::read_to_string(path)
            .map_err(|e| Error::usage(format!("cannot read {path}: {e}")))?
    } else if s.trim_start().starts_with('{') {
        s.to_string()
    } else {
        std::fs::read_to_string(s).map_err(|e| Error::usage(format!("cannot read {s}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::usage(format!("bad JSON: {e}")))
}

fn precision_override() -> Option<i64> {
    std::env::var("OORT_PRECISION")
        .ok()
        .and_then(|s| s.parse().ok())
}

fn run(cli: &Cli) -> Result<(Value, String)> {
    match &cli.command {
        Command::Different(args) => cmd_different(args),
        Command::Kgb(c) => cmd_kgb(c),
        Command::VerifyLift(c) => cmd_verify(c),
        Command::Hurwitz(c) => cmd_hurwitz(c),
        Command::StableModel(args) => cmd_stable_model(args),
        Command::Depth(args) => cmd_depth(args),
        Command::OortCondition(args) => cmd_oort_condition(args),
        Command::Asw(c) => cmd_asw(c),
    }
}

fn cmd_different(args: &DifferentArgs) -> Result<(Value, String)> {
    match (&args.cyclic, &args.filtration) {
        (Some(p), None) => {
            let jumps = parse_jumps(
                args.jumps
                    .as_deref()
                    .ok_or_else(|| Error::usage("cyclic mode needs a jump tuple"))?,
            )?;
            let closed = oort::ramification::cyclic_different(*p, &jumps)?;
            let upper = oort::ramification::cyclic_upper_filtration(*p, &jumps)?;
            let lower = oort::ramification::herbrand_lower_from_upper(&upper)?;
            let brute = oort::ramification::different_from_lower(&lower)?;
            let payload = json!({
                "schema": "different/1",
                "p": p,
                "upper_jumps": jumps,
                "different": closed.to_string(),
                "herbrand_brute_sum": brute.to_string(),
                "lower_filtration": jsonio::filtration_to_json(&lower),
            });
            let human = format!(
                "cyclic different for p = {p}, upper jumps {jumps:?}: {closed} (closed form) = {brute} (Herbrand + integer sum)"
            );
            Ok((payload, human))
        }
        (None, Some(src)) => {
            let f = jsonio::filtration_from_json(&read_json_arg(src)?)?;
            let lower = match f.numbering {
                oort::ramification::Numbering::Lower => f,
                oort::ramification::Numbering::Upper => {
                    oort::ramification::herbrand_lower_from_upper(&f)?
                }
            };
            let d = oort::ramification::different_from_lower(&lower)?;
            let payload = json!({
                "schema": "different/1",
                "different": d.to_string(),
                "lower_filtration": jsonio::filtration_to_json(&lower),
            });
            Ok((payload, format!("different: {d}")))
        }
        _ => Err(Error::usage(
            "use exactly one of --cyclic <p> <jumps> or --filtration <json>",
        )),
    }
}

fn verdict_output(v: &oort::kgb::KgbVerdict) -> (Value, String) {
    let payload = jsonio::kgb_verdict_to_json(v);
    let mut human = format!("vanishes={}", v.vanishes);
    if let Some(w) = &v.witness {
        human.push_str(&format!("\nwitness: {:?}", w.tuple));
        human.push_str("\n|H|  deg R_X  deg R_Y");
        for row in &v.table {
            human.push_str(&format!(
                "\n{:>3}  {:>7}  {:>7}",
                row.subgroup.len(),
                row.r_char0,
                row.r_charp
            ));
        }
    }
    (payload, human)
}

fn cmd_kgb(c: &KgbCmd) -> Result<(Value, String)> {
    match c {
        KgbCmd::Zpzp { p, m1, m2 } => {
            let v = oort::kgb::kgb_zpzp(*p, *m1, *m2)?;
            Ok(verdict_output(&v))
        }
        KgbCmd::Meta { p, n, m, chi, h } => {
            let v = oort::kgb::kgb_metacyclic(*p, *n, *m, *chi, *h)?;
            Ok(verdict_output(&v))
        }
        KgbCmd::Witness(w) => {
            let bounds = oort::kgb::SearchBounds::default();
            let found = match w {
                WitnessCmd::Zpzp { p, m1, m2 } => {
                    oort::kgb::kgb_witness_zpzp(*p, *m1, *m2, bounds)?
                }
                WitnessCmd::Meta { p, n, m, chi, h } => {
                    oort::kgb::kgb_witness_metacyclic(*p, *n, *m, *chi, *h, bounds)?
                }
            };
            match found {
                Some(v) => Ok(verdict_output(&v)),
                None => Ok((
                    json!({
                        "schema": "kgb-verdict/1",
                        "vanishes": false,
                        "witness": Value::Null,
                        "table": [],
                    }),
                    "no witness exists within the searched shape class".into(),
                )),
            }
        }
    }
}

fn certificate_output(c: &oort::lifting::DifferentCertificate) -> (Value, String) {
    let payload = jsonio::certificate_to_json(c);
    let mut human = format!(
        "status: {}\ndelta_eta = {}, delta_s = {}",
        c.status.as_str(),
        c.delta_eta,
        c.delta_s
    );
    human.push_str("\nvaluation  disc-points  ram-index");
    for row in &c.table {
        let v = row
            .valuation
            .as_ref()
            .map(rat_to_string)
            .unwrap_or_else(|| "pole".into());
        human.push_str(&format!(
            "\n{:>9}  {:>11}  {:>9}",
            v, row.disc_points, row.ram_index
        ));
    }
    (payload, human)
}

fn cmd_verify(c: &VerifyCmd) -> Result<(Value, String)> {
    let prec = precision_override();
    match c {
        VerifyCmd::Zp { p, u } => {
            let chain = oort::lifting::build_zp_lift(*p, *u, prec)?;
            oort::lifting::verify_zp_reduction(&chain.cyc)?;
            let cert = oort::lifting::different_criterion(&chain, &[*u])?;
            Ok(certificate_output(&cert))
        }
        VerifyCmd::Zp2 { p, u } => {
            let chain = oort::lifting::build_zp2_lift(*p, *u, prec)?;
            oort::lifting::verify_zp_reduction(&chain.cyc)?;
            let cert = oort::lifting::different_criterion(&chain, &[*u, *p as i64 * *u])?;
            Ok(certificate_output(&cert))
        }
        VerifyCmd::Dihedral { p } => {
            let cert = oort::lifting::dihedral_example_check(*p)?;
            Ok(certificate_output(&cert))
        }
    }
}

fn cmd_hurwitz(c: &HurwitzCmd) -> Result<(Value, String)> {
    match c {
        HurwitzCmd::Build {
            p,
            m,
            h,
            z,
            chi,
            dot,
        } => {
            let zs = match z {
                Some(s) => Some(
                    s.split(',')
                        .map(|x| {
                            x.trim()
                                .parse::<u64>()
                                .map_err(|_| Error::usage(format!("bad base point {x:?}")))
                        })
                        .collect::<Result<Vec<u64>>>()?,
                ),
                None => None,
            };
            let t = oort::hurwitz::build_small_conductor(*p, *m, *h, *chi, zs)?;
            let violations = t.validate()?;
            if !violations.is_empty() {
                return Err(Error::domain(format!(
                    "constructed tree fails validation: {violations:?}"
                )));
            }
            if *dot {
                let d = t.to_dot();
                return Ok((json!({ "schema": "dot/1", "dot": d }), d));
            }
            let payload = jsonio::hurwitz_to_json(&t);
            let human = format!(
                "valid Hurwitz tree: conductor {}, {} components, {} marked points",
                t.conductor()?,
                t.vertices.len() - 1,
                t.marked.len()
            );
            Ok((payload, human))
        }
        HurwitzCmd::Validate { file } => {
            let t = jsonio::hurwitz_from_json(&read_json_arg(file)?)?;
            let violations = t.validate()?;
            let payload = json!({
                "schema": "hurwitz-validation/1",
                "valid": violations.is_empty(),
                "violations": jsonio::violations_to_json(&violations),
            });
            let human = if violations.is_empty() {
                format!("valid Hurwitz tree (conductor {})", t.conductor()?)
            } else {
                let mut s = format!("{} violations:", violations.len());
                for v in &violations {
                    s.push_str(&format!("\n  ({}) {}", v.axiom.tag(), v.detail));
                }
                s
            };
            Ok((payload, human))
        }
    }
}

fn cmd_stable_model(args: &StableModelArgs) -> Result<(Value, String)> {
    let v = read_json_arg(&args.file)?;
    let (disc, labels) = jsonio::marked_disc_from_json(&v, precision_override())?;
    let tree = oort::discgeom::cluster_tree(&disc)?;
    if args.dot {
        let d = tree.to_dot(&labels);
        return Ok((json!({ "schema": "dot/1", "dot": d }), d));
    }
    let payload = jsonio::cluster_tree_to_json(&tree, &labels);
    let mut human = format!("{} components", tree.clusters.len());
    for c in &tree.clusters {
        let pts: Vec<String> = c.members.iter().map(|&i| labels[i].clone()).collect();
        human.push_str(&format!(
            "\n  component {}: depth {}, thickness {}, points {{{}}}",
            c.id,
            rat_to_string(&c.depth),
            rat_to_string(&c.thickness),
            pts.join(", ")
        ));
    }
    Ok((payload, human))
}

fn cmd_depth(args: &DepthArgs) -> Result<(Value, String)> {
    let (p, f) = jsonio::valued_laurent_from_json(&read_json_arg(&args.file)?)?;
    let radii = parse_radii(&args.radii)?;
    if radii.len() == 1 {
        let d = oort::lifting::zp_depth(p, &f, radii[0])?;
        let payload = json!({
            "schema": "depth/1",
            "radius": rat_to_string(&radii[0]),
            "depth": rat_to_string(&d),
        });
        let human = format!(
            "depth at r = {}: {}",
            rat_to_string(&radii[0]),
            rat_to_string(&d)
        );
        return Ok((payload, human));
    }
    let prof = oort::lifting::depth_profile_check(p, &f, &radii)?;
    let payload = jsonio::depth_profile_to_json(&prof);
    let mut human = String::from("r  depth  nu");
    for ((r, d), nu) in prof.samples.iter().zip(&prof.nu) {
        human.push_str(&format!(
            "\n{}  {}  {}",
            rat_to_string(r),
            rat_to_string(d),
            nu
        ));
    }
    human.push_str(&format!(
        "\nslope bound (<= nu - 1): {}",
        if prof.slope_bound_ok { "ok" } else { "VIOLATED" }
    ));
    Ok((payload, human))
}

fn cmd_oort_condition(args: &OortConditionArgs) -> Result<(Value, String)> {
    let jumps = parse_jumps(&args.jumps)?;
    let v = oort::lifting::oort_condition(args.p, &jumps)?;
    let payload = json!({
        "schema": "oort-condition/1",
        "p": args.p,
        "jumps": jumps,
        "holds": v.holds,
        "failure": v.failure.map(|(i, a)| json!({ "index": i, "multiple": a })),
    });
    let human = match v.failure {
        None => format!("condition holds for p = {} and jumps {:?}", args.p, jumps),
        Some((i, a)) => {
            format!("condition fails at i = {i}: a_{i} = {a} lies in the forbidden window")
        }
    };
    Ok((payload, human))
}

fn cmd_asw(c: &AswCmd) -> Result<(Value, String)> {
    match c {
        AswCmd::Reduce { file } => {
            let v = read_json_arg(file)?;
            let p = v
                .get("p")
                .and_then(|x| x.as_u64())
                .ok_or_else(|| Error::usage("missing p"))?;
            let r = v.get("r").and_then(|x| x.as_u64()).unwrap_or(1) as usize;
            let field = oort::algebra::gf::Gf::new(p, r)?;
            let f = jsonio::laurent_from_json(
                &field,
                v.get("terms")
                    .ok_or_else(|| Error::usage("missing terms"))?,
            )?;
            let red = oort::asw::reduce_artin_schreier(&f)?;
            match &red {
                oort::asw::AswReduction::Trivial { .. } => Ok((
                    json!({ "schema": "asw-reduction/1", "trivial": true }),
                    "trivial extension (f is in the image of y -> y^p - y)".into(),
                )),
                oort::asw::AswReduction::Standard { standard, .. } => {
                    let payload = json!({
                        "schema": "asw-reduction/1",
                        "trivial": false,
                        "standard": jsonio::laurent_to_json(standard),
                    });
                    Ok((payload, format!("standard form: {standard:?}")))
                }
            }
        }
        AswCmd::Jumps { file } => {
            let w = jsonio::witt_from_json(&read_json_arg(file)?)?;
            let jumps = w.upper_jumps()?;
            let d = w.different()?;
            let payload = json!({
                "schema": "asw-jumps/1",
                "upper_jumps": jumps,
                "different": d.to_string(),
            });
            Ok((payload, format!("upper jumps {jumps:?}, different {d}")))
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((payload, human)) => {
            if cli.json {
                let wrapped = json!({ "status": "ok", "result": payload });
                println!("{}", serde_json::to_string_pretty(&wrapped).unwrap());
            } else {
                println!("{human}");
            }
        }
        Err(e) => {
            let code = e.exit_code();
            if cli.json {
                let wrapped = json!({ "status": "error", "message": e.to_string() });
                eprintln!("{}", serde_json::to_string_pretty(&wrapped).unwrap());
            } else {
                eprintln!("error: {e}");
            }
            std::process::exit(code);
        }
    }
}
