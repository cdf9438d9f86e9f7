use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ainf_core::bar::{bar_differential, check_bar_square};
use ainf_core::deformation::{deformed_differential, specialize_first_order};
use ainf_core::dual::{dual_algebra, positive_part};
use ainf_core::functor::check_functor;
use ainf_core::io::{self, JetFile};
use ainf_core::kill::{kill_all, KillTarget};
use ainf_core::pipeline::bn_pipeline;
use ainf_core::transfer::{contraction_from_dg, local_algebra_fixture, transfer};
use ainf_core::{check_ainf, fixtures, AInfPair, AInfStructure, Error, FieldSpec, Vector};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "ainf", version, about = "Finite A-infinity structures: checks, duals, transfer, deformation and killing")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Ground field, `Q` or `Fp:<p>`. Input files are read over this field.
    #[arg(long, global = true)]
    field: Option<FieldSpec>,
    /// Arity bound N.
    #[arg(long, global = true, default_value_t = 5)]
    arity: usize,
    /// Jet order / word bound K.
    #[arg(long = "jet", global = true, default_value_t = 4)]
    jet: usize,
    /// Seed for random fixtures.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (written atomically); standard output if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check the A∞ identities and b² = 0 arity by arity.
    Check { input: PathBuf },
    /// Bar coderivation components and their square.
    Bar { input: PathBuf },
    /// Dual algebra of End(object) truncated at K.
    Dual {
        input: PathBuf,
        #[arg(long)]
        object: Option<String>,
        /// Use the positive-degree part of End(object).
        #[arg(long)]
        positive_part: bool,
    },
    /// Minimal model of a dg-model up to arity N.
    Transfer {
        input: PathBuf,
        /// Where to write the residual report (standard error if absent).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Deformed differential on M ⊗ A^! of a pair.
    Deform { input: PathBuf },
    /// Specializations of the deformed differential: along the augmentation
    /// and to first order along a tangent vector.
    Specialize {
        input: PathBuf,
        /// Tangent vector as `S->T:degree:label=coefficient`, repeatable.
        #[arg(long = "xi")]
        xi: Vec<String>,
    },
    /// Kill the higher products into M_1 of a pair.
    Kill { input: PathBuf },
    /// Kill, read off the family matrix and compare determinantal ideals.
    BnPipeline {
        input: PathBuf,
        /// Values of r (minor size h - r); defaults to 0 and 1.
        #[arg(long = "rank")]
        ranks: Vec<usize>,
    },
    /// Write a seeded fixture.
    Fixture {
        /// localalg, localalg-dg, randomdg, perturb, killtarget, pair, corrupt
        kind: String,
        /// n for localalg.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Comma-separated dimensions.
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
    },
}

enum Outcome {
    Clean,
    Failure,
    Inconsistent,
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::PetriFails { .. } | Error::DependentLinearParts | Error::NotSurjective { .. } => 1,
        Error::SignAmbiguity { .. } => 3,
        _ => 2,
    }
}

impl RunConfig {
    fn validate(&self) -> Result<(), Error> {
        if self.arity < 2 {
            return Err(Error::Invalid("--arity must be at least 2".into()));
        }
        if self.jet < 1 {
            return Err(Error::Invalid("--jet must be at least 1".into()));
        }
        Ok(())
    }

    fn field(&self) -> FieldSpec {
        self.field.unwrap_or_default()
    }

    fn read(&self, path: &Path) -> Result<Value, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let mut v = io::parse_json(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        if let Some(f) = self.field {
            let file: FieldSpec = v.get("field").and_then(Value::as_str).unwrap_or("Q").parse()?;
            match (file, f) {
                (a, b) if a == b => {}
                (FieldSpec::Rationals, FieldSpec::Prime(_)) => v["field"] = json!(f.to_string()),
                _ => return Err(Error::Parse(format!("cannot read a file over {file} as {f}"))),
            }
        }
        Ok(v)
    }

    fn structure(&self, path: &Path) -> Result<AInfStructure, Error> {
        io::structure_from_json(&self.read(path)?)
    }

    fn pair(&self, path: &Path) -> Result<AInfPair, Error> {
        io::pair_from_json(&self.read(path)?)
    }

    fn emit(&self, v: &Value) -> Result<(), Error> {
        emit_to(self.out.as_deref(), v)
    }
}

fn emit_to(path: Option<&Path>, v: &Value) -> Result<(), Error> {
    let text = io::to_text(v);
    match path {
        Some(p) => io::write_atomic(p, &text),
        None => {
            use std::io::Write;
            match std::io::stdout().lock().write_all(text.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Parse(format!("stdout: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let cfg = &cli.config;
    cfg.validate()?;
    match &cli.cmd {
        Cmd::Check { input } => cmd_check(cfg, input),
        Cmd::Bar { input } => cmd_bar(cfg, input),
        Cmd::Dual {
            input,
            object,
            positive_part: pos,
        } => cmd_dual(cfg, input, object.as_deref(), *pos),
        Cmd::Transfer { input, report } => cmd_transfer(cfg, input, report.as_deref()),
        Cmd::Deform { input } => cmd_deform(cfg, input),
        Cmd::Specialize { input, xi } => cmd_specialize(cfg, input, xi),
        Cmd::Kill { input } => cmd_kill(cfg, input),
        Cmd::BnPipeline { input, ranks } => cmd_bn_pipeline(cfg, input, ranks),
        Cmd::Fixture { kind, n, dims, density } => cmd_fixture(cfg, kind, *n, dims, *density),
    }
}

fn cmd_check(cfg: &RunConfig, input: &Path) -> Result<Outcome, Error> {
    let s = cfg.structure(input)?;
    let up_to = cfg.arity.min(s.arity_bound());
    let ainf = check_ainf(&s, up_to)?;
    let bar = check_bar_square(&bar_differential(&s), up_to);
    let arities = |r: &ainf_core::Report| r.iter().map(|x| x.arity).collect::<std::collections::BTreeSet<_>>();
    let agree = arities(&ainf) == arities(&bar);
    let b = s.basis();
    let report = json!({
        "schema": "check-report/v1",
        "arity": up_to,
        "clean": ainf.is_empty(),
        "bar_clean": bar.is_empty(),
        "agree": agree,
        "ainf_residuals": io::residual_norms(&ainf, up_to),
        "bar_residuals": io::residual_norms(&bar, up_to),
        "first_failures": io::residuals_to_json(b, s.field, &ainf, 10),
    });
    cfg.emit(&report)?;
    Ok(if !agree {
        Outcome::Inconsistent
    } else if ainf.is_empty() {
        Outcome::Clean
    } else {
        Outcome::Failure
    })
}

fn cmd_bar(cfg: &RunConfig, input: &Path) -> Result<Outcome, Error> {
    let s = cfg.structure(input)?;
    let b = bar_differential(&s);
    let up_to = cfg.arity.min(s.arity_bound());
    let sq = check_bar_square(&b, up_to);
    let basis = s.basis();
    let comps = (1..=b.arity_bound()).flat_map(|n| b.components(n).iter());
    let v = json!({
        "schema": "bar/v1",
        "field": s.field.to_string(),
        "components": io::table_to_json(basis, basis, s.field, comps),
        "square_residuals": io::residual_norms(&sq, up_to),
        "square_zero": sq.is_empty(),
    });
    cfg.emit(&v)?;
    Ok(if sq.is_empty() { Outcome::Clean } else { Outcome::Failure })
}

fn object_index(s: &AInfStructure, name: Option<&str>) -> Result<usize, Error> {
    match name {
        None => Ok(0),
        Some(n) => s.basis().object_index(n).ok_or_else(|| Error::Parse(format!("no object {n:?}"))),
    }
}

fn cmd_dual(cfg: &RunConfig, input: &Path, object: Option<&str>, pos: bool) -> Result<Outcome, Error> {
    let s = cfg.structure(input)?;
    let o = object_index(&s, object)?;
    let r = if pos {
        dual_algebra(&positive_part(&s, o)?, 0, cfg.jet)?
    } else {
        dual_algebra(&s, o, cfg.jet)?
    };
    let v = io::dual_to_json(&r);
    cfg.emit(&v)?;
    Ok(Outcome::Clean)
}

fn cmd_transfer(cfg: &RunConfig, input: &Path, report: Option<&Path>) -> Result<Outcome, Error> {
    let d = cfg.structure(input)?;
    let n = cfg.arity;
    let m = transfer(&d, &contraction_from_dg(&d), n)?;
    let ainf = check_ainf(&m.structure, n)?;
    let functor = check_functor(&m.functor)?;
    let rep = io::transfer_report_to_json(&m, &ainf, &functor, n);
    cfg.emit(&io::structure_to_json(&m.structure))?;
    match report {
        Some(p) => emit_to(Some(p), &rep)?,
        None => eprint!("{}", io::to_text(&rep)),
    }
    Ok(if ainf.is_empty() && functor.is_empty() {
        Outcome::Clean
    } else {
        Outcome::Inconsistent
    })
}

fn cmd_deform(cfg: &RunConfig, input: &Path) -> Result<Outcome, Error> {
    let pair = cfg.pair(input)?;
    let d = deformed_differential(&pair, cfg.jet)?;
    let mut v = io::deformed_to_json(&d);
    let square_zero = match d.square() {
        Ok(sq) => {
            let zero = sq.values().all(|img| img.values().all(|c| c.is_empty()));
            v["square_zero"] = json!(zero);
            zero
        }
        Err(Error::TruncationTooSmall { need, .. }) => {
            v["square_zero"] = Value::Null;
            v["square_note"] = json!(format!("not checked: needs arity bound {need}"));
            true
        }
        Err(e) => return Err(e),
    };
    cfg.emit(&v)?;
    Ok(if square_zero { Outcome::Clean } else { Outcome::Inconsistent })
}

fn parse_xi(s: &AInfStructure, xi: &[String]) -> Result<Vector, Error> {
    let mut v = Vector::new();
    for t in xi {
        let (r, c) = t.rsplit_once('=').ok_or_else(|| Error::Parse(format!("--xi {t:?} is not ref=coefficient")))?;
        v.add_term(io::parse_ref(s.basis(), r)?, &s.field.parse_scalar(c)?);
    }
    Ok(v)
}

fn cmd_specialize(cfg: &RunConfig, input: &Path, xi: &[String]) -> Result<Outcome, Error> {
    let pair = cfg.pair(input)?;
    let s = pair.structure();
    let d = deformed_differential(&pair, cfg.jet)?;
    let b = s.basis();
    let f = s.field;
    let map_json = |m: &std::collections::BTreeMap<u32, Vector>| -> Value {
        Value::Object(m.iter().map(|(x, v)| (io::gen_ref(b, *x), io::vector_to_json(b, f, v))).collect())
    };
    let aug = d.specialize_augmentation();
    let m1: std::collections::BTreeMap<u32, Vector> = pair
        .module_gens()
        .into_iter()
        .filter_map(|g| s.product(&[g]).map(|v| (g, v.clone())))
        .collect();
    let mut v = json!({
        "schema": "specialize/v1",
        "augmentation": map_json(&aug),
        "augmentation_is_m1": aug == m1,
    });
    if !xi.is_empty() {
        let xi = parse_xi(s, xi)?;
        let fo = specialize_first_order(&d, &xi);
        v["first_order"] = json!({"base": map_json(&fo.base), "eps": map_json(&fo.eps)});
    }
    cfg.emit(&v)?;
    Ok(if aug == m1 { Outcome::Clean } else { Outcome::Inconsistent })
}

fn cmd_kill(cfg: &RunConfig, input: &Path) -> Result<Outcome, Error> {
    let pair = cfg.pair(input)?;
    let t = KillTarget::new(pair)?;
    let (out, steps) = kill_all(&t, cfg.arity)?;
    let mut v = io::killlog_to_json(t.structure(), &steps);
    v["structure"] = io::pair_to_json(&out.pair);
    cfg.emit(&v)?;
    Ok(Outcome::Clean)
}

fn cmd_bn_pipeline(cfg: &RunConfig, input: &Path, ranks: &[usize]) -> Result<Outcome, Error> {
    let pair = cfg.pair(input)?;
    let ranks = if ranks.is_empty() { vec![0, 1] } else { ranks.to_vec() };
    let rep = match bn_pipeline(&pair, cfg.arity, cfg.jet, &ranks) {
        Ok(r) => r,
        Err(Error::PetriFails { rank_defect }) => {
            let v = json!({"schema": "bn-report/v1", "pass": false, "petri": false, "rank_defect": rank_defect});
            cfg.emit(&v)?;
            return Ok(Outcome::Failure);
        }
        Err(e) => return Err(e),
    };
    let f = pair.field();
    let fam = &rep.family;
    let b = pair.basis();
    let jet = JetFile {
        field: f,
        nvars: fam.matrix.nvars,
        order: fam.matrix.order,
        matrix: Some(fam.matrix.clone()),
        automorphism: Some(rep.straightening.automorphism.clone()),
        ideals: rep
            .comparisons
            .iter()
            .flat_map(|c| {
                [
                    (format!("family_minors_r{}", c.r), c.family_minors.clone()),
                    (format!("coordinate_minors_r{}", c.r), c.coordinate_minors.clone()),
                ]
            })
            .collect(),
    };
    let v = json!({
        "schema": "bn-report/v1",
        "pass": rep.passed(),
        "petri": true,
        "arity": rep.arity,
        "K": rep.order,
        "killlog": io::killlog_to_json(pair.structure(), &rep.steps),
        "variables": fam.variables.iter().map(|&g| io::gen_ref(b, g)).collect::<Vec<_>>(),
        "rows": fam.rows.iter().map(|&g| io::gen_ref(b, g)).collect::<Vec<_>>(),
        "cols": fam.cols.iter().map(|&g| io::gen_ref(b, g)).collect::<Vec<_>>(),
        "entries_linear": rep.entries_linear,
        "linearly_independent": rep.independent,
        "assignment": rep.straightening.assignment,
        "straightened": io::matrix_to_json(f, &rep.straightening.matrix),
        "jet": io::jet_to_json(&jet),
        "comparisons": rep.comparisons.iter().map(|c| json!({"r": c.r, "minor_size": c.size, "ideal_jet_equal": c.equal})).collect::<Vec<_>>(),
    });
    cfg.emit(&v)?;
    Ok(if rep.passed() { Outcome::Clean } else { Outcome::Failure })
}

fn dims_or<const N: usize>(dims: &[usize], default: [usize; N]) -> Result<[usize; N], Error> {
    if dims.is_empty() {
        return Ok(default);
    }
    dims.try_into().map_err(|_| Error::Parse(format!("--dims needs {N} entries")))
}

fn cmd_fixture(cfg: &RunConfig, kind: &str, n: usize, dims: &[usize], density: f64) -> Result<Outcome, Error> {
    let mut rng = fixtures::seeded(cfg.seed);
    let field = cfg.field();
    let n_ar = cfg.arity;
    let small_v = |dims: &[usize]| -> Result<Vec<usize>, Error> {
        let d = if dims.is_empty() { vec![1, 1, 1] } else { dims.to_vec() };
        if d.iter().sum::<usize>() > 3 || d.iter().sum::<usize>() == 0 {
            return Err(Error::Parse("--dims must have total 1..=3".into()));
        }
        Ok(d)
    };
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::Parse("--density must lie in [0, 1]".into()));
    }
    let v = match kind {
        "localalg" => {
            let d = local_algebra_fixture(n, n_ar, field)?;
            io::structure_to_json(&transfer(&d, &contraction_from_dg(&d), n_ar)?.structure)
        }
        "localalg-dg" => io::structure_to_json(&local_algebra_fixture(n, n_ar, field)?),
        "randomdg" => io::structure_to_json(&fixtures::random_dg(&mut rng, &small_v(dims)?, n_ar, field)),
        "perturb" => {
            let s = fixtures::random_dg(&mut rng, &small_v(dims)?, n_ar, field);
            io::structure_to_json(&fixtures::perturb(&mut rng, &s, n_ar - 1, density))
        }
        "corrupt" => {
            let s = fixtures::random_dg(&mut rng, &small_v(dims)?, n_ar, field);
            io::structure_to_json(&fixtures::corrupt(&mut rng, &s, 3))
        }
        "killtarget" => {
            let [a1, m0, m1] = dims_or(dims, [6, 2, 3])?;
            if m0 * m1 > a1 {
                return Err(Error::Parse("killtarget needs dim M0 · dim M1 ≤ dim A1".into()));
            }
            io::pair_to_json(&fixtures::kill_target(&mut rng, [a1, m0, m1], n_ar, density, field))
        }
        "pair" => io::pair_to_json(&fixtures::random_pair(&mut rng, dims_or(dims, [3, 1, 2, 2])?, n_ar, density, field)),
        other => return Err(Error::UnknownFixture(other.to_string())),
    };
    cfg.emit(&v)?;
    Ok(Outcome::Clean)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Failure) => ExitCode::from(1),
        Ok(Outcome::Inconsistent) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
