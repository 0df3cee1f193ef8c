//! `bsfiedler` command-line front end.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad usage or unreadable input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bsfiedler::congruence::{brute_force_oracle, main_permutation, BRUTE_FORCE_MAX_K};
use bsfiedler::families::{as_condition, build_family, skeleton, FamilyForm, FamilyTag};
use bsfiedler::fiedler::{build_gfpr, gfp_t, GfprSpec, TvConvention};
use bsfiedler::minbases::{is_minimal_basis, partition, recover_q_kronecker};
use bsfiedler::symbolic::render;
use bsfiedler::tuples::{csf, heads, satisfies_sip};
use bsfiedler::verify::{check_strong_linearization, is_regular, DEFAULT_TOL};
use bsfiedler::{suite, BlockPencil, Complex64, Error, IndexTuple, Matrix, MatrixPolynomial, Rational, Scalar};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "bsfiedler", version, about = "Block-symmetric Fiedler-like linearizations")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Matrix polynomials.
    #[command(subcommand)]
    Poly(PolyCmd),
    /// Block pencils.
    #[command(subcommand)]
    Pencil(PencilCmd),
    /// Index tuples, written like "(5,6,3:4,0)".
    #[command(subcommand)]
    Tuple(TupleCmd),
    /// Block-symmetric GFPR construction.
    #[command(subcommand)]
    Gfpr(GfprCmd),
    /// The pencil T_P.
    #[command(subcommand)]
    Gfp(GfpCmd),
    /// The four block-structure families.
    #[command(subcommand)]
    Family(FamilyCmd),
    /// Minimal bases and recovery of the polynomial.
    #[command(subcommand)]
    Minbases(MinbasesCmd),
    /// Block-permutation congruence to a family.
    #[command(subcommand)]
    Congruence(CongruenceCmd),
    /// Spectral checks.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Runs the full acceptance battery.
    Suite {
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum PolyCmd {
    Inspect { file: PathBuf },
}

#[derive(Subcommand)]
enum PencilCmd {
    /// Symbolic block grid; names blocks after the coefficients of `--poly`.
    Print {
        file: PathBuf,
        #[arg(long)]
        poly: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum TupleCmd {
    Csf { tuple: String },
    Sip { tuple: String },
    Heads { tuple: String },
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long)]
    poly: PathBuf,
    #[arg(long)]
    h: usize,
    #[arg(long, default_value = "()")]
    tw: String,
    #[arg(long, default_value = "()")]
    tv: String,
    /// `--tv` holds `k + t_v` instead of the negative indices.
    #[arg(long)]
    tv_shifted: bool,
    /// JSON list of matrices for `t_w`; identities by default.
    #[arg(long)]
    zw: Option<PathBuf>,
    /// JSON list of matrices for `t_v`; identities by default.
    #[arg(long)]
    zv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GfprCmd {
    Build(SpecArgs),
}

#[derive(Subcommand)]
enum GfpCmd {
    T {
        #[arg(long)]
        poly: PathBuf,
    },
}

#[derive(Subcommand)]
enum FamilyCmd {
    Skeleton {
        #[arg(long)]
        tag: String,
        #[arg(long)]
        poly: PathBuf,
    },
    Build {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        poly: PathBuf,
    },
    /// Antidiagonal-sum condition of a body `M` against `P`.
    CheckAs {
        #[arg(long)]
        pencil: PathBuf,
        #[arg(long)]
        poly: PathBuf,
    },
}

#[derive(Subcommand)]
enum MinbasesCmd {
    /// Minimal-basis test; with `--p` and `--q`, the block minimal bases
    /// pencil test on the partition instead.
    Check {
        #[arg(long)]
        pencil: PathBuf,
        #[arg(long, requires = "q")]
        p: Option<usize>,
        #[arg(long, requires = "p")]
        q: Option<usize>,
    },
    Recover {
        #[arg(long)]
        pencil: PathBuf,
        #[arg(long)]
        s1: usize,
        #[arg(long)]
        s2: usize,
    },
}

#[derive(Subcommand)]
enum CongruenceCmd {
    Reduce(SpecArgs),
    /// Exhaustive search over permutations, grade at most 8.
    Oracle {
        #[arg(long)]
        pencil: PathBuf,
        #[arg(long)]
        poly: PathBuf,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    Linearize {
        #[arg(long)]
        pencil: PathBuf,
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
}

enum Failure {
    Usage(String),
    Check(String),
}

type CliResult = Result<Output, Failure>;

/// What to print, and whether the check behind it passed.
struct Output {
    json: Value,
    text: String,
    ok: bool,
}

impl Output {
    fn ok(json: Value, text: impl Into<String>) -> Self {
        Output { json, text: text.into(), ok: true }
    }

    fn data(json: Value) -> Self {
        let text = serde_json::to_string_pretty(&json).unwrap();
        Output { json, text, ok: true }
    }

    fn check(ok: bool, json: Value, text: impl Into<String>) -> Self {
        Output { json, text: text.into(), ok }
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn failed(e: Error) -> Failure {
    Failure::Check(e.to_string())
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let s = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&s).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Anything other than rational data is handled in complex arithmetic.
fn is_float(vs: &[&Value]) -> bool {
    vs.iter().any(|v| matches!(v.get("field").and_then(Value::as_str), Some("complex") | Some("real")))
}

macro_rules! by_field {
    ($vals:expr, $f:ident($($arg:expr),*)) => {
        if is_float($vals) { $f::<Complex64>($($arg),*) } else { $f::<Rational>($($arg),*) }
    };
}

fn parse_tuple(s: &str) -> Result<IndexTuple, Failure> {
    IndexTuple::parse(s).map_err(usage)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).unwrap());
            } else {
                print!("{}", out.text);
                if !out.text.ends_with('\n') {
                    println!();
                }
            }
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Check(m)) => {
            if cli.json {
                println!("{}", json!({ "ok": false, "error": m }));
            }
            eprintln!("check failed: {m}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Cmd) -> CliResult {
    match cmd {
        Cmd::Poly(PolyCmd::Inspect { file }) => {
            let v = read_json(&file)?;
            by_field!(&[&v], poly_inspect(&v))
        }
        Cmd::Pencil(PencilCmd::Print { file, poly }) => {
            let l = read_json(&file)?;
            let p = poly.as_deref().map(read_json).transpose()?;
            let vals: Vec<&Value> = std::iter::once(&l).chain(p.as_ref()).collect();
            by_field!(&vals, pencil_print(&l, p.as_ref()))
        }
        Cmd::Tuple(t) => tuple_cmd(t),
        Cmd::Gfpr(GfprCmd::Build(a)) => {
            let v = read_json(&a.poly)?;
            by_field!(&[&v], gfpr_build(&v, &a))
        }
        Cmd::Gfp(GfpCmd::T { poly }) => {
            let v = read_json(&poly)?;
            by_field!(&[&v], gfp_cmd(&v))
        }
        Cmd::Family(f) => family_cmd(f),
        Cmd::Minbases(m) => minbases_cmd(m),
        Cmd::Congruence(CongruenceCmd::Reduce(a)) => {
            let v = read_json(&a.poly)?;
            by_field!(&[&v], congruence_reduce(&v, &a))
        }
        Cmd::Congruence(CongruenceCmd::Oracle { pencil, poly }) => {
            let (l, p) = (read_json(&pencil)?, read_json(&poly)?);
            by_field!(&[&l, &p], congruence_oracle(&l, &p))
        }
        Cmd::Verify(VerifyCmd::Linearize { pencil, poly, tol }) => {
            let (l, p) = (read_json(&pencil)?, read_json(&poly)?);
            by_field!(&[&l, &p], verify_linearize(&l, &p, tol))
        }
        Cmd::Suite { seed } => {
            let results = suite::run_all(seed);
            let ok = results.iter().all(|r| r.passed);
            let text: String = results.iter().map(|r| r.line() + "\n").collect();
            Ok(Output::check(ok, suite::summary_json(seed, &results), text))
        }
    }
}

fn load_poly<T: Scalar>(v: &Value) -> Result<MatrixPolynomial<T>, Failure> {
    MatrixPolynomial::from_json(v).map_err(usage)
}

fn load_pencil<T: Scalar>(v: &Value) -> Result<BlockPencil<T>, Failure> {
    BlockPencil::from_json(v).map_err(usage)
}

fn poly_inspect<T: Scalar>(v: &Value) -> CliResult {
    let p = load_poly::<T>(v)?;
    let regular = is_regular(&p).map_err(failed)?;
    let hermitian = p.is_hermitian().ok();
    let j = json!({
        "n": p.n(),
        "k": p.grade(),
        "degree": p.degree(),
        "field": T::FIELD.name(),
        "symmetric": p.is_symmetric(),
        "hermitian": hermitian,
        "regular": regular,
    });
    let degree = p.degree().map_or("none (zero polynomial)".to_string(), |d| d.to_string());
    let mut text = format!("n = {}, grade k = {}, degree {degree}\nsymmetric: {}\n", p.n(), p.grade(), p.is_symmetric());
    if let Some(h) = hermitian {
        text += &format!("hermitian: {h}\n");
    }
    text += &format!("regular: {regular}\n");
    Ok(Output::ok(j, text))
}

fn pencil_print<T: Scalar>(l: &Value, p: Option<&Value>) -> CliResult {
    let l = load_pencil::<T>(l)?;
    let p = p.map(load_poly::<T>).transpose()?;
    let text = render(&l, p.as_ref());
    let grid = bsfiedler::symbolic::symbolic_grid(&l, p.as_ref());
    Ok(Output::ok(json!({ "grid": grid, "block_symmetric": l.is_block_symmetric() }), text))
}

fn tuple_cmd(t: TupleCmd) -> CliResult {
    match t {
        TupleCmd::Csf { tuple } => {
            let t = parse_tuple(&tuple)?;
            let c = csf(&t).map_err(failed)?;
            Ok(Output::ok(json!({ "tuple": t.to_string(), "csf": c.to_string() }), c.to_string()))
        }
        TupleCmd::Sip { tuple } => {
            let t = parse_tuple(&tuple)?;
            let ok = satisfies_sip(&t).map_err(failed)?;
            Ok(Output::check(ok, json!({ "tuple": t.to_string(), "sip": ok }), ok.to_string()))
        }
        TupleCmd::Heads { tuple } => {
            let t = parse_tuple(&tuple)?;
            let h = heads(&t).map_err(failed)?;
            let list: Vec<String> = h.iter().map(i64::to_string).collect();
            Ok(Output::ok(json!({ "tuple": t.to_string(), "heads": h }), format!("{{{}}}", list.join(","))))
        }
    }
}

fn load_assignment<T: Scalar>(path: Option<&Path>, len: usize, n: usize) -> Result<Vec<Matrix<T>>, Failure> {
    let Some(path) = path else {
        return Ok(vec![Matrix::identity(n); len]);
    };
    let v = read_json(path)?;
    let list = v.as_array().ok_or_else(|| usage(format!("{}: expected a list of matrices", path.display())))?;
    if list.len() != len {
        return Err(usage(format!("{}: {} matrices for a tuple of length {len}", path.display(), list.len())));
    }
    list.iter().map(|m| Matrix::from_json(m, Some((n, n))).map_err(usage)).collect()
}

fn load_spec<T: Scalar>(v: &Value, a: &SpecArgs) -> Result<(MatrixPolynomial<T>, GfprSpec<T>), Failure> {
    let p = load_poly::<T>(v)?;
    let (t_w, t_v) = (parse_tuple(&a.tw)?, parse_tuple(&a.tv)?);
    let z_w = load_assignment(a.zw.as_deref(), t_w.len(), p.n())?;
    let z_v = load_assignment(a.zv.as_deref(), t_v.len(), p.n())?;
    let conv = if a.tv_shifted { TvConvention::Shifted } else { TvConvention::Negative };
    let spec = GfprSpec::new(p.grade(), a.h, t_w, t_v, conv, z_w, z_v).map_err(usage)?;
    Ok((p, spec))
}

fn gfpr_build<T: Scalar>(v: &Value, a: &SpecArgs) -> CliResult {
    let (p, spec) = load_spec::<T>(v, a)?;
    let l = build_gfpr(&p, &spec).map_err(failed)?;
    Ok(Output::data(l.to_json()))
}

fn gfp_cmd<T: Scalar>(v: &Value) -> CliResult {
    let p = load_poly::<T>(v)?;
    Ok(Output::data(gfp_t(&p).map_err(failed)?.to_json()))
}

fn family_cmd(f: FamilyCmd) -> CliResult {
    match f {
        FamilyCmd::Skeleton { tag, poly } => {
            let tag = FamilyTag::parse(&tag).map_err(usage)?;
            let v = read_json(&poly)?;
            by_field!(&[&v], family_skeleton(&v, tag))
        }
        FamilyCmd::Build { form, poly } => {
            let (f, p) = (read_json(&form)?, read_json(&poly)?);
            by_field!(&[&f, &p], family_build(&f, &p))
        }
        FamilyCmd::CheckAs { pencil, poly } => {
            let (m, p) = (read_json(&pencil)?, read_json(&poly)?);
            by_field!(&[&m, &p], family_check_as(&m, &p))
        }
    }
}

fn family_skeleton<T: Scalar>(v: &Value, tag: FamilyTag) -> CliResult {
    let p = load_poly::<T>(v)?;
    Ok(Output::data(skeleton(&p, tag).map_err(failed)?.to_json()))
}

fn family_build<T: Scalar>(f: &Value, p: &Value) -> CliResult {
    let form = FamilyForm::<T>::from_json(f).map_err(usage)?;
    let p = load_poly::<T>(p)?;
    if form.k != p.grade() || form.n != p.n() {
        return Err(usage(format!("form is for k={}, n={} but P has k={}, n={}", form.k, form.n, p.grade(), p.n())));
    }
    Ok(Output::data(build_family(&p, &form).map_err(failed)?.to_json()))
}

fn family_check_as<T: Scalar>(m: &Value, p: &Value) -> CliResult {
    let m = load_pencil::<T>(m)?;
    let p = load_poly::<T>(p)?;
    let r = as_condition(&m, &p).map_err(failed)?;
    let ok = r.holds();
    let j = json!({ "holds": ok, "violated": r.violated });
    let text = if ok {
        "AS condition holds".to_string()
    } else {
        let idx: Vec<String> = r.violated.iter().map(|i| i.to_string()).collect();
        format!("AS condition fails at coefficient(s) {}", idx.join(", "))
    };
    Ok(Output::check(ok, j, text))
}

fn minbases_cmd(m: MinbasesCmd) -> CliResult {
    match m {
        MinbasesCmd::Check { pencil, p, q } => {
            let v = read_json(&pencil)?;
            by_field!(&[&v], minbases_check(&v, p.zip(q)))
        }
        MinbasesCmd::Recover { pencil, s1, s2 } => {
            let v = read_json(&pencil)?;
            by_field!(&[&v], minbases_recover(&v, s1, s2))
        }
    }
}

fn minbases_check<T: Scalar>(v: &Value, pq: Option<(usize, usize)>) -> CliResult {
    let g = load_pencil::<T>(v)?;
    let (ok, what) = match pq {
        Some((p, q)) => {
            let part = partition(&g, p, q).map_err(failed)?;
            (part.is_block_minimal_bases_pencil().map_err(failed)?, "block minimal bases pencil")
        }
        None => (is_minimal_basis(&g.to_poly_matrix()).map_err(failed)?, "minimal basis"),
    };
    let text = format!("{}{what}", if ok { "" } else { "not a " });
    Ok(Output::check(ok, json!({ "holds": ok, "property": what }), text))
}

fn minbases_recover<T: Scalar>(v: &Value, s1: usize, s2: usize) -> CliResult {
    let c = load_pencil::<T>(v)?;
    Ok(Output::data(recover_q_kronecker(&c, s1, s2).map_err(failed)?.to_json()))
}

fn congruence_reduce<T: Scalar>(v: &Value, a: &SpecArgs) -> CliResult {
    let (p, spec) = load_spec::<T>(v, a)?;
    let cert = main_permutation(&p, &spec).map_err(failed)?;
    let text = format!("c = {}\nfamily {}\nverified: {}\n", cert.c, cert.tag(), cert.residual);
    Ok(Output::check(cert.residual, cert.to_json(), text))
}

fn congruence_oracle<T: Scalar>(l: &Value, p: &Value) -> CliResult {
    let l = load_pencil::<T>(l)?;
    let p = load_poly::<T>(p)?;
    if p.grade() > BRUTE_FORCE_MAX_K {
        return Err(usage(format!("exhaustive search is limited to k <= {BRUTE_FORCE_MAX_K}")));
    }
    match brute_force_oracle(&l, &p).map_err(failed)? {
        Some(cert) => {
            let text = format!("c = {}\nfamily {}\n", cert.c, cert.tag());
            Ok(Output::ok(cert.to_json(), text))
        }
        None => Ok(Output::check(false, json!({ "found": false }), "no block permutation reaches a family")),
    }
}

fn verify_linearize<T: Scalar>(l: &Value, p: &Value, tol: f64) -> CliResult {
    let l = load_pencil::<T>(l)?;
    let p = load_poly::<T>(p)?;
    let r = check_strong_linearization(&l, &p, tol).map_err(failed)?;
    let text = format!(
        "finite eigenvalues {} vs {}, infinite {} vs {}; max chordal distance {:.3e} (tol {:.1e}): {}",
        r.finite.0,
        r.finite.1,
        r.infinite.0,
        r.infinite.1,
        r.max_distance,
        tol,
        if r.passed { "pass" } else { "FAIL" }
    );
    Ok(Output::check(r.passed, r.to_json(), text))
}
