//! `sqalg`: command-line front end to the Steenrod-algebra library.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sqalg::bundlecalc::{BundleKind, FiberBundleData};
use sqalg::cartan::SqAlgebraPresentation;
use sqalg::charclass::{self, ClassifyingSpacePresentation, Space};
use sqalg::milnor::{self, SubHopfAlgebra};
use sqalg::modcat::{self, Catalog, Family, FiniteModule, MargolisOp, ModAlgebra, ModuleMap};
use sqalg::{expr, presets, steenrod, verify, F2Poly, F2Vector};

/// Environment variable holding cap overrides, e.g. `primitives=32,lemma37=16`.
const CAPS_VAR: &str = "SQALG_CAPS";

#[derive(Parser)]
#[command(name = "sqalg", version, about = "Mod-2 Steenrod algebra, modules over A(1)/E(1), characteristic-class primitives and fiber integration")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Degree bound (meaning depends on the command).
    #[arg(long, global = true)]
    max: Option<u32>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Tsv,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Bundle {
    Cp2,
    Hp2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algebra {
    A1,
    E1,
}

impl From<Algebra> for ModAlgebra {
    fn from(a: Algebra) -> Self {
        match a {
            Algebra::A1 => ModAlgebra::A1,
            Algebra::E1 => ModAlgebra::E1,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Q0,
    Q1,
}

#[derive(Subcommand)]
enum Cmd {
    /// Normalize an expression to the admissible basis.
    Adem { expr: String },
    /// Product of two elements.
    Mul { a: String, b: String },
    /// Coproduct of an element.
    Coprod { expr: String },
    /// Antipode of an element.
    Antipode { expr: String },
    /// Pairing <d, s> of a dual element with a Steenrod element.
    Pair { dual: String, elt: String },
    /// Express an element in the Milnor basis.
    Milnor { expr: String },
    /// Admissible basis in one degree, or the basis of a sub-Hopf algebra.
    Basis {
        degree: Option<u32>,
        /// Sub-Hopf algebra: A0, A1, E0, E1, E2.
        #[arg(long)]
        sub: Option<String>,
    },
    /// Apply Sq^k to a polynomial in a preset ring or classifying space.
    Sq {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        expr: String,
        /// bpsp3, bpsp21, bsu3, bu3, cp2-total, rank4.
        #[arg(long, conflicts_with_all = ["space", "presentation"])]
        preset: Option<String>,
        /// BO, BSO, BSpin or BSpinc.
        #[arg(long, conflicts_with = "presentation")]
        space: Option<String>,
        /// JSON presentation file.
        #[arg(long)]
        presentation: Option<String>,
    },
    /// Stable type of a module over A(1) or E(1).
    ModuleType {
        #[command(flatten)]
        module: ModuleArgs,
    },
    /// Margolis homology of a module.
    Margolis {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long, value_enum, default_value_t = Which::Q0)]
        q: Which,
    },
    /// Split-injection criterion for the map sending the source generator to a target basis element.
    SplitCheck {
        /// Source family (Z2, J, A1), suspended by --shift.
        #[arg(long)]
        source: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        shift: i32,
        /// Target family (Z2, I, J, K, A1).
        #[arg(long)]
        target: String,
        /// Target basis label for the image of the generator, or 0.
        #[arg(long)]
        image: String,
    },
    /// Primitive table of a classifying space.
    Primitives {
        #[arg(long)]
        space: String,
    },
    /// Integration along the fiber.
    Transfer {
        #[arg(long, value_enum)]
        bundle: Bundle,
        #[arg(long)]
        expr: String,
    },
    /// Run the reproduction suites.
    VerifyPaper {
        /// Suite names (repeatable or comma separated); default all.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
    },
}

#[derive(clap::Args)]
struct ModuleArgs {
    #[arg(long, value_enum, default_value_t = Algebra::A1)]
    algebra: Algebra,
    /// Preset cohomology ring: bpsp3, bsu3.
    #[arg(long, conflicts_with = "family")]
    preset: Option<String>,
    /// Catalog template: Z2, I, J, K, A1, L, C, E1.
    #[arg(long)]
    family: Option<String>,
    /// Suspension of the template.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    shift: i32,
    /// Restrict an A(1) template to E(1).
    #[arg(long)]
    restrict: bool,
}

/// Failure of a computation or check (exit 1) as opposed to bad input (exit 2).
struct Output {
    text: String,
    ok: bool,
}

fn caps() -> BTreeMap<String, u32> {
    std::env::var(CAPS_VAR)
        .ok()
        .map(|s| {
            s.split(',')
                .filter_map(|kv| {
                    let (k, v) = kv.split_once('=')?;
                    Some((k.trim().to_string(), v.trim().parse().ok()?))
                })
                .collect()
        })
        .unwrap_or_default()
}

fn cap_for(flag: Option<u32>, name: &str, default: u32) -> u32 {
    flag.or_else(|| caps().get(name).copied()).unwrap_or(default)
}

fn parse_a(s: &str) -> Result<steenrod::SteenrodElt> {
    if s.trim().is_empty() {
        bail!(UsageError("empty expression".into()));
    }
    expr::parse_steenrod(s).map_err(|e| anyhow!(UsageError(e.to_string())))
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(UsageError(msg.into()))
}

fn envelope(command: &str, result: Value) -> String {
    serde_json::to_string_pretty(&json!({ "command": command, "result": result })).expect("serializable") + "\n"
}

fn simple(cli: &Cli, command: &str, text: String, value: Value) -> Result<Output> {
    match cli.format {
        Format::Text => Ok(Output { text: text + "\n", ok: true }),
        Format::Json => Ok(Output { text: envelope(command, value), ok: true }),
        Format::Tsv => Ok(Output { text: text + "\n", ok: true }),
        Format::Dot => Err(usage(format!("--format dot is not available for {command}"))),
    }
}

fn steenrod_json(x: &steenrod::SteenrodElt) -> Value {
    Value::Array(x.terms().map(|t| json!(t.entries())).collect())
}

fn preset_presentation(name: &str) -> Result<SqAlgebraPresentation> {
    Ok(match name.to_ascii_lowercase().as_str() {
        "bpsp3" => presets::bpsp3()?,
        "bpsp21" => presets::bpsp21()?,
        "bsu3" => presets::bsu3()?,
        "bu3" => presets::bu3()?,
        "cp2-total" | "cp2" => presets::cp2_total()?,
        "rank4" => presets::rank4_model(),
        _ => return Err(usage(format!("unknown preset {name:?}"))),
    })
}

fn family(name: &str) -> Result<Family> {
    Family::parse(name).ok_or_else(|| usage(format!("unknown module family {name:?}")))
}

fn sub_algebra(name: &str) -> Result<SubHopfAlgebra> {
    let n = name.to_ascii_uppercase().replace(['(', ')'], "");
    let (kind, idx) = n.split_at(1);
    let i: u32 = idx.parse().map_err(|_| usage(format!("unknown sub-Hopf algebra {name:?}")))?;
    match kind {
        "A" => Ok(SubHopfAlgebra::A(i)),
        "E" => Ok(SubHopfAlgebra::E(i)),
        _ => Err(usage(format!("unknown sub-Hopf algebra {name:?}"))),
    }
}

fn build_module(a: &ModuleArgs, window: u32) -> Result<(FiniteModule, String)> {
    let alg: ModAlgebra = a.algebra.into();
    if let Some(p) = &a.preset {
        let pres = preset_presentation(p)?;
        let m = FiniteModule::from_presentation(&pres, alg, 0, window)?;
        return Ok((m, p.clone()));
    }
    let Some(f) = &a.family else {
        return Err(usage("give --preset or --family"));
    };
    let fam = family(f)?;
    let m = if a.restrict {
        fam.template(ModAlgebra::A1)?.restrict_to_e1()
    } else {
        fam.template(alg)?.clone()
    };
    let name = if a.shift == 0 { f.clone() } else { format!("S^{} {f}", a.shift) };
    Ok((m.suspend(a.shift), name))
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.cmd {
        Cmd::Adem { expr } => {
            let x = parse_a(expr)?;
            simple(cli, "adem", x.to_string(), json!({ "input": expr, "terms": steenrod_json(&x), "text": x.to_string() }))
        }
        Cmd::Mul { a, b } => {
            let x = &parse_a(a)? * &parse_a(b)?;
            simple(cli, "mul", x.to_string(), json!({ "terms": steenrod_json(&x), "text": x.to_string() }))
        }
        Cmd::Coprod { expr } => {
            let x = parse_a(expr)?;
            let d = steenrod::coproduct(&x);
            let pairs: Vec<Value> = d.terms().map(|(l, r)| json!([l.entries(), r.entries()])).collect();
            simple(cli, "coprod", d.to_string(), json!({ "terms": pairs, "text": d.to_string() }))
        }
        Cmd::Antipode { expr } => {
            let x = steenrod::antipode(&parse_a(expr)?);
            simple(cli, "antipode", x.to_string(), json!({ "terms": steenrod_json(&x), "text": x.to_string() }))
        }
        Cmd::Pair { dual, elt } => {
            if dual.trim().is_empty() {
                return Err(usage("empty dual expression"));
            }
            let d = expr::parse_dual(dual).map_err(|e| usage(e.to_string()))?;
            let v = milnor::pair(&d, &parse_a(elt)?) as u8;
            simple(cli, "pair", v.to_string(), json!({ "value": v }))
        }
        Cmd::Milnor { expr } => {
            let x = parse_a(expr)?;
            let m = milnor::admissible_to_milnor(&x);
            let terms: Vec<Value> = m.terms().map(|s| json!(s.exponents())).collect();
            simple(cli, "milnor", m.to_string(), json!({ "admissible": x.to_string(), "terms": terms, "text": m.to_string() }))
        }
        Cmd::Basis { degree, sub } => {
            let elts: Vec<steenrod::SteenrodElt> = match (sub, degree) {
                (Some(s), _) => milnor::subalgebra_basis(sub_algebra(s)?)?,
                (None, Some(d)) => steenrod::basis(*d).into_iter().map(steenrod::SteenrodElt::from_adm).collect(),
                (None, None) => return Err(usage("give a degree or --sub")),
            };
            let lines: Vec<String> = elts.iter().map(|e| e.to_string()).collect();
            let text = match cli.format {
                Format::Tsv => elts.iter().map(|e| format!("{}\t{e}", e.degree().unwrap_or(0))).collect::<Vec<_>>().join("\n"),
                _ => lines.join("\n"),
            };
            simple(cli, "basis", text, json!({ "count": elts.len(), "elements": lines }))
        }
        Cmd::Sq { k, expr, preset, space, presentation } => {
            let (input, out) = if let Some(s) = space {
                let sp = Space::parse(s).map_err(|e| usage(e.to_string()))?;
                let p = charclass::presentation(sp);
                let f = p.ring().parse(expr).map_err(|e| usage(e.to_string()))?;
                let nf = p.normal_form(&f)?;
                (nf.to_string(), p.sq(*k, &nf)?)
            } else {
                let pres = match (preset, presentation) {
                    (Some(p), _) => preset_presentation(p)?,
                    (None, Some(path)) => {
                        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
                        SqAlgebraPresentation::from_json(&text).map_err(|e| usage(e.to_string()))?
                    }
                    (None, None) => return Err(usage("give --preset, --space or --presentation")),
                };
                let f = pres.ring().parse(expr).map_err(|e| usage(e.to_string()))?;
                (f.to_string(), pres.sq(*k, &f))
            };
            simple(cli, "sq", out.to_string(), json!({ "k": k, "input": input, "value": out.to_string() }))
        }
        Cmd::ModuleType { module } => {
            let window = cap_for(cli.max, "module-type", 40);
            let (m, name) = build_module(module, window)?;
            if cli.format == Format::Dot {
                return Ok(Output { text: m.to_dot(&name), ok: true });
            }
            let cat = if module.preset.as_deref().is_some_and(|p| p.eq_ignore_ascii_case("bpsp3")) && m.algebra() == ModAlgebra::A1 {
                Catalog::bpsp3()
            } else {
                Catalog::full(m.algebra())
            };
            let rep = modcat::stable_type_solve(&m, &cat, modcat::DEFAULT_SOLUTION_LIMIT)?;
            let sols: Vec<Vec<String>> = rep.solutions.iter().map(|s| s.iter().map(|p| p.to_string()).collect()).collect();
            let mut text = String::new();
            match rep.unique() {
                Some(s) => {
                    let joined = s.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" + ");
                    let _ = writeln!(text, "{}", if joined.is_empty() { "0".into() } else { joined });
                }
                None => {
                    let _ = writeln!(text, "ambiguous: {} solutions{}", sols.len(), if rep.exhaustive { "" } else { " (search truncated)" });
                    for s in &sols {
                        let _ = writeln!(text, "  {}", s.join(" + "));
                    }
                }
            }
            if let Some(p) = rep.provisional_above {
                let _ = writeln!(text, "provisional above degree {p}");
            }
            let value = json!({
                "module": name,
                "algebra": m.algebra().to_string(),
                "solutions": sols,
                "unique": rep.unique().is_some(),
                "exhaustive": rep.exhaustive,
                "provisional_above": rep.provisional_above,
                "isomorphism_verified": rep.isomorphism_verified,
            });
            match cli.format {
                Format::Json => Ok(Output { text: envelope("module-type", value), ok: true }),
                _ => Ok(Output { text, ok: true }),
            }
        }
        Cmd::Margolis { module, q } => {
            let window = cap_for(cli.max, "margolis", 40);
            let (m, name) = build_module(module, window)?;
            if cli.format == Format::Dot {
                return Ok(Output { text: m.to_dot(&name), ok: true });
            }
            let op = match q {
                Which::Q0 => MargolisOp::Q0,
                Which::Q1 => MargolisOp::Q1,
            };
            let h = m.margolis(op);
            let rows: Vec<Value> = m
                .degrees()
                .filter(|&d| h.get(d) > 0)
                .map(|d| json!({ "degree": d, "dimension": h.get(d), "reliable": h.is_reliable(d) }))
                .collect();
            let text = m
                .degrees()
                .filter(|&d| h.get(d) > 0)
                .map(|d| {
                    let mark = if h.is_reliable(d) { "" } else { "\tprovisional" };
                    if cli.format == Format::Tsv {
                        format!("{d}\t{}{mark}", h.get(d))
                    } else {
                        format!("degree {d}: {}{}", h.get(d), if mark.is_empty() { "" } else { " (provisional)" })
                    }
                })
                .collect::<Vec<_>>()
                .join("\n");
            match cli.format {
                Format::Json => Ok(Output { text: envelope("margolis", json!({ "module": name, "rows": rows })), ok: true }),
                _ => Ok(Output { text: if text.is_empty() { "0\n".into() } else { text + "\n" }, ok: true }),
            }
        }
        Cmd::SplitCheck { source, shift, target, image } => {
            let a = ModAlgebra::A1;
            let src = family(source)?.template(a)?.suspend(*shift);
            let tgt = family(target)?.template(a)?.clone();
            let d = src.d_min();
            if src.dim(d) != 1 {
                return Err(usage("source must have a single bottom class"));
            }
            let y = if image.trim() == "0" {
                F2Vector::zeros(tgt.dim(d))
            } else {
                let i = tgt.basis_index(d, image).ok_or_else(|| {
                    usage(format!("no basis element {image:?} of the target in degree {d}; available: {:?}", tgt.labels(d)))
                })?;
                F2Vector::from_support(tgt.dim(d), [i])
            };
            let f = ModuleMap::extending(&src, &tgt, d, &F2Vector::from_support(1, [0]), &y)?;
            let c = modcat::check_split_criterion(&f)?;
            let value = json!({
                "hypotheses_met": c.hypotheses_met,
                "f_injective": c.f_injective,
                "q0_margolis_injective": c.q0_margolis_injective,
                "split_guaranteed": c.split_guaranteed,
                "witness_degree": c.witness_degree,
            });
            let text = format!(
                "hypotheses_met\t{}\nf_injective\t{}\nq0_margolis_injective\t{}\nsplit_guaranteed\t{}\nwitness_degree\t{}",
                c.hypotheses_met,
                c.f_injective,
                c.q0_margolis_injective,
                c.split_guaranteed,
                c.witness_degree.map(|d| d.to_string()).unwrap_or_else(|| "-".into())
            );
            simple(cli, "split-check", text, value)
        }
        Cmd::Primitives { space } => {
            let sp = Space::parse(space).map_err(|e| usage(e.to_string()))?;
            let max = cap_for(cli.max, "primitives", 64);
            let p = if max <= charclass::DEFAULT_CAP {
                None
            } else {
                Some(ClassifyingSpacePresentation::new(sp, max)?)
            };
            let pres = p.as_ref().unwrap_or_else(|| charclass::presentation(sp));
            let mut rows = Vec::new();
            let mut ok = true;
            for n in 1..=max {
                let r = pres.primitives(n)?;
                let want = usize::from(sp.has_generator(n));
                let verified = r.dimension() == want && (want == 0 || r.matches);
                ok &= verified;
                rows.push((n, r, verified));
            }
            let text = match cli.format {
                Format::Tsv => {
                    let mut t = String::from("degree\tdimension\tformula\tmethod\tverified\n");
                    for (n, r, v) in &rows {
                        let _ = writeln!(t, "{n}\t{}\t{}\t{:?}\t{v}", r.dimension(), r.named_label.clone().unwrap_or_else(|| "-".into()), r.method);
                    }
                    t
                }
                _ => {
                    let mut t = String::new();
                    for (n, r, v) in &rows {
                        let basis = r.basis.iter().map(F2Poly::to_string).collect::<Vec<_>>().join(", ");
                        let line = format!(
                            "{n:>3}  dim {}  {}  [{}{}]  {}",
                            r.dimension(),
                            r.named_label.clone().unwrap_or_else(|| "-".into()),
                            if *v { "ok" } else { "MISMATCH" },
                            match r.method {
                                charclass::PrimitiveMethod::Literal => ", kernel",
                                charclass::PrimitiveMethod::Frobenius => ", squares",
                            },
                            basis
                        );
                        let _ = writeln!(t, "{}", line.trim_end());
                    }
                    t
                }
            };
            let value = json!({
                "space": sp.name(),
                "max": max,
                "rows": rows.iter().map(|(n, r, v)| json!({
                    "degree": n,
                    "dimension": r.dimension(),
                    "formula": r.named_label,
                    "basis": r.basis.iter().map(F2Poly::to_string).collect::<Vec<_>>(),
                    "method": format!("{:?}", r.method).to_lowercase(),
                    "verified": v,
                })).collect::<Vec<_>>(),
            });
            match cli.format {
                Format::Json => Ok(Output { text: envelope("primitives", value), ok }),
                Format::Dot => Err(usage("--format dot is not available for primitives")),
                _ => Ok(Output { text, ok }),
            }
        }
        Cmd::Transfer { bundle, expr } => {
            let kind = match bundle {
                Bundle::Cp2 => BundleKind::Cp2,
                Bundle::Hp2 => BundleKind::Hp2,
            };
            let b = FiberBundleData::preset(kind)?;
            let f = b.total.ring().parse(expr).map_err(|e| usage(e.to_string()))?;
            let mut value = b.base.ring().zero();
            let mut coeffs = Vec::new();
            for (_, part) in f.parts() {
                value.add_assign(&b.fiber_integrate(&part)?);
                let r = b.lh_reduce(&part)?;
                coeffs.push(r.iter().map(F2Poly::to_string).collect::<Vec<_>>());
            }
            simple(cli, "transfer", value.to_string(), json!({ "input": f.to_string(), "value": value.to_string(), "lh_coefficients": coeffs }))
        }
        Cmd::VerifyPaper { suite } => {
            let names: Vec<&str> = if suite.is_empty() { verify::SUITES.to_vec() } else { suite.iter().map(|s| s.as_str()).collect() };
            for n in &names {
                if verify::default_max(n).is_none() {
                    return Err(usage(format!("unknown suite {n:?}; known: {}", verify::SUITES.join(", "))));
                }
            }
            let c = caps();
            let mut report = verify::Report { suites: Vec::new(), pass: 0, fail: 0, provisional: 0 };
            for s in verify::SUITES.iter().filter(|s| names.contains(s)) {
                let r = verify::run_suite(s, cli.max.or_else(|| c.get(*s).copied()))?;
                report.pass += r.count(verify::Status::Pass);
                report.fail += r.count(verify::Status::Fail);
                report.provisional += r.count(verify::Status::Provisional);
                report.suites.push(r);
            }
            let ok = report.passed();
            let text = match cli.format {
                Format::Json => envelope("verify-paper", serde_json::to_value(&report)?),
                Format::Tsv => {
                    let mut t = String::from("suite\tid\tstatus\twitness\n");
                    for s in &report.suites {
                        for c in &s.checks {
                            let _ = writeln!(t, "{}\t{}\t{}\t{}", s.suite, c.id, c.status, c.witness.replace(['\t', '\n'], " "));
                        }
                    }
                    t
                }
                Format::Text => {
                    let mut t = String::new();
                    for s in &report.suites {
                        let _ = writeln!(
                            t,
                            "== {} (max {}): {} pass, {} fail, {} provisional",
                            s.suite,
                            s.max,
                            s.count(verify::Status::Pass),
                            s.count(verify::Status::Fail),
                            s.count(verify::Status::Provisional)
                        );
                        for c in &s.checks {
                            let w = if c.witness.is_empty() { String::new() } else { format!("  -- {}", c.witness) };
                            let _ = writeln!(t, "  [{}] {}{}", c.status, c.id, w);
                        }
                    }
                    let _ = writeln!(t, "total: {} pass, {} fail, {} provisional", report.pass, report.fail, report.provisional);
                    t
                }
                Format::Dot => return Err(usage("--format dot is not available for verify-paper")),
            };
            Ok(Output { text, ok })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let usage_error = e.downcast_ref::<UsageError>().is_some()
                || matches!(e.downcast_ref::<sqalg::Error>(), Some(sqalg::Error::Parse(_)));
            eprintln!("error: {e:#}");
            ExitCode::from(if usage_error { 2 } else { 1 })
        }
    }
}
