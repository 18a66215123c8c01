use std::fmt::Display;
use std::path::{Path, PathBuf};

use clap::{Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use gmnl::behavior::{
    behavior_from_json, chsh_value, hierarchy_report, mix, rabello_game_value, theorem1_conditions_check, BehaviorJson,
    ChshThreshold,
};
use gmnl::dilation::{dilate_povm, trine_povm};
use gmnl::linalg::CMat;
use gmnl::nsbox::{evaluate, load_fixture, search_theorem2, search_theorem3, BoxNetwork, NetworkFixture};
use gmnl::optim::{
    check_locality_certificate, enumerate_vertices, is_local, max_mixture_conditional_chsh, AgreementConstraint,
    ConditioningEvent,
};
use gmnl::quantum::{
    behavior_from_strategy, build_ghz_strategy, build_rabello_quantum_strategy, build_theorem1_strategy, QuantumStrategy,
};
use gmnl::targets::{theorem1_behavior, theorem2_behavior};
use gmnl::{Backend, Behavior, QSqrt2, Scalar};

use crate::report::{Check, Digest256, RunReport};
use crate::Command;

type Res<T> = Result<T, String>;

trait Msg<T> {
    fn msg(self) -> Res<T>;
}

impl<T, E: Display> Msg<T> for Result<T, E> {
    fn msg(self) -> Res<T> {
        self.map_err(|e| e.to_string())
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Target {
    T1Quantum,
    T1Ghz,
    T2,
    T3,
    RabelloQuantum,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Which {
    T2,
    T3,
}

impl Which {
    fn fixture(self) -> &'static str {
        match self {
            Which::T2 => "theorem2",
            Which::T3 => "theorem3",
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum BoxnetAction {
    /// Evaluate a network (bare or wrapped in a fixture document).
    Evaluate { file: PathBuf },
    /// Rerun the wiring search and compare with the stored fixture.
    Search {
        #[arg(value_enum)]
        which: Which,
    },
    /// Load a stored fixture and check it against its target.
    ShowFixture {
        #[arg(value_enum)]
        which: Which,
    },
}

pub struct Ctx {
    backend: Backend,
    tolerance: f64,
    fixtures_dir: Option<PathBuf>,
    digest: Digest256,
}

impl Ctx {
    pub fn new(backend: Backend, tolerance: f64, fixtures_dir: Option<PathBuf>, cmd: &Command) -> Self {
        let mut digest = Digest256::default();
        digest.feed(format!("{cmd:?}|{backend}|{tolerance}").as_bytes());
        Ctx { backend, tolerance, fixtures_dir, digest }
    }

    fn read(&mut self, path: &Path) -> Res<String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
        self.digest.feed(text.as_bytes());
        Ok(text)
    }

    fn fixture(&mut self, name: &str) -> Res<NetworkFixture> {
        let f = load_fixture(name, self.fixtures_dir.as_deref()).msg()?;
        self.digest.feed(serde_json::to_string(&f).msg()?.as_bytes());
        Ok(f)
    }

    fn convert(&self, b: &Behavior) -> Res<Behavior> {
        b.to_backend(self.backend).map_err(|e| format!("{e}; rerun with --backend float"))
    }

    fn require_exact(&self, what: &str) -> Res<()> {
        match self.backend {
            Backend::Exact => Ok(()),
            Backend::Float => Err(format!("{what} needs --backend exact")),
        }
    }

    fn same(&self, got: &Scalar, want: &Scalar) -> bool {
        got.approx_eq(want, self.tolerance)
    }

    fn compare(&self, name: &str, got: &Scalar, want: &Scalar) -> Check {
        Check::compare(name, got, want, self.same(got, want))
    }

    fn table_match(&self, name: &str, got: &Behavior, want: &Behavior) -> Check {
        let ok = got.scenario() == want.scenario() && got.entries().iter().zip(want.entries()).all(|(a, b)| self.same(a, b));
        Check::flag(name, ok)
    }

    fn finish(self, command: &str, backend: Backend, checks: Vec<Check>, data: Value) -> RunReport {
        RunReport::new(command, self.digest.finish(), backend, self.tolerance, checks, data)
    }
}

fn q(n: i64, d: i64) -> Scalar {
    Scalar::from_ratio(n, d, Backend::Exact)
}

fn two_sqrt2() -> Scalar {
    Scalar::exact(QSqrt2::from_parts(0, 1, 2, 1))
}

fn behavior_value(b: &Behavior) -> Value {
    serde_json::to_value(BehaviorJson::from(b)).expect("behavior serializes")
}

fn basics(b: &Behavior, checks: &mut Vec<Check>) {
    checks.push(Check::flag("valid", b.validate().passed));
    let ns = b.no_signaling_check();
    checks.push(Check::value("no_signaling", &ns.worst_residual, ns.passed));
}

fn p_equal(b: &Behavior, s: &[usize]) -> Scalar {
    b.event_probability(s, |o| o[0] == o[1])
}

fn conditional_chsh(b: &Behavior, party: usize, setting: usize, outcome: usize) -> Res<Scalar> {
    chsh_value(&b.condition(party, setting, outcome).msg()?.behavior).msg()
}

/// Appends the nonlocality check in exact mode; notes the skip otherwise.
fn nonlocal(ctx: &Ctx, b: &Behavior, checks: &mut Vec<Check>, data: &mut Map<String, Value>) -> Res<()> {
    match ctx.backend {
        Backend::Exact => {
            let v = is_local(b).msg()?;
            let verdict = if v.local { "local" } else { "nonlocal" };
            checks.push(Check::compare("locality", verdict, "nonlocal", !v.local && v.certificate_verified));
        }
        Backend::Float => {
            data.insert("locality".into(), json!("skipped: needs the exact backend"));
        }
    }
    Ok(())
}

pub fn run(mut ctx: Ctx, cmd: &Command) -> Res<RunReport> {
    match cmd {
        Command::Reproduce { target } => reproduce(ctx, *target),
        Command::Check { file, checks } => {
            let text = ctx.read(file)?;
            check(ctx, &text, checks)
        }
        Command::Dilate { file, trine } => {
            let elements = match (file, trine) {
                (_, true) => trine_povm(),
                (Some(f), false) => {
                    let text = ctx.read(f)?;
                    parse_povm(&text)?
                }
                (None, false) => return Err("a POVM file or --trine is required".into()),
            };
            dilate(ctx, &elements)
        }
        Command::Boxnet { action } => boxnet(ctx, action),
        Command::CertifyLocal { file } => {
            let text = ctx.read(file)?;
            certify_local(ctx, &text)
        }
        Command::MixtureFrontier { file, event, no_agreement } => {
            let text = match file {
                Some(f) => Some(ctx.read(f)?),
                None => None,
            };
            mixture_frontier(ctx, text.as_deref(), event, *no_agreement)
        }
        Command::Strategy { source } => strategy(ctx, source),
    }
}

fn reproduce(mut ctx: Ctx, target: Target) -> Res<RunReport> {
    let mut checks = Vec::new();
    let mut data = Map::new();
    let name = target.to_possible_value().expect("named").get_name().to_string();
    match target {
        Target::T1Quantum | Target::T1Ghz => {
            let (s, expected) = match target {
                Target::T1Quantum => (build_theorem1_strategy(), theorem1_behavior()),
                _ => build_ghz_strategy().msg()?,
            };
            let s = s.to_backend(ctx.backend).ok_or("strategy has no exact form")?;
            checks.push(Check::flag("strategy_valid", s.validate().is_ok()));
            let product = s.is_bipartite_product();
            // The GHZ variant draws on a three-party source by design.
            let required = matches!(target, Target::T1Quantum);
            checks.push(Check::value("bipartite_product", product, product || !required));
            let b = behavior_from_strategy(&s).msg()?;
            basics(&b, &mut checks);
            checks.push(ctx.table_match("matches_target_table", &b, &expected));
            let r = theorem1_conditions_check(&b, ChshThreshold::Quantum).msg()?;
            checks.push(Check::flag("conditions", r.passed));
            let want_b0 = if matches!(target, Target::T1Quantum) { q(1, 4) } else { q(1, 2) };
            checks.push(ctx.compare("p_b0_given_y1", &r.p_b0_given_y1, &want_b0));
            checks.push(ctx.compare("conditional_chsh", &conditional_chsh(&b, 1, 1, 0)?, &two_sqrt2()));
            checks.push(ctx.compare("p_a_eq_b_x0_y0", &p_equal(&b, &[0, 0, 0]), &q(1, 1)));
            if matches!(target, Target::T1Quantum) {
                checks.push(ctx.compare("p_a_eq_b_x1_y0", &p_equal(&b, &[1, 0, 0]), &q(1, 2)));
            }
            nonlocal(&ctx, &b, &mut checks, &mut data)?;
            data.insert("conditions".into(), serde_json::to_value(&r).msg()?);
            data.insert("behavior".into(), behavior_value(&b));
        }
        Target::T2 => {
            let f = ctx.fixture("theorem2")?;
            let b = ctx.convert(&evaluate(&f.network).msg()?)?;
            basics(&b, &mut checks);
            checks.push(ctx.table_match("matches_target_table", &b, &theorem2_behavior()));
            let r = theorem1_conditions_check(&b, ChshThreshold::NoSignaling).msg()?;
            checks.push(Check::flag("conditions", r.passed));
            checks.push(ctx.compare("conditional_chsh", &conditional_chsh(&b, 1, 1, 0)?, &q(4, 1)));
            for x in 0..2 {
                checks.push(ctx.compare(&format!("p_a_eq_b_x{x}_y0"), &p_equal(&b, &[x, 0, 0]), &q(1, 1)));
            }
            checks.push(ctx.compare("p_b0_given_y1", &r.p_b0_given_y1, &q(1, 2)));
            nonlocal(&ctx, &b, &mut checks, &mut data)?;
            data.insert("note".into(), json!(f.note));
            data.insert("network".into(), serde_json::to_value(&f.network).msg()?);
            data.insert("behavior".into(), behavior_value(&b));
        }
        Target::T3 => {
            let f = ctx.fixture("theorem3")?;
            let b = ctx.convert(&evaluate(&f.network).msg()?)?;
            basics(&b, &mut checks);
            let r = rabello_game_value(&b, None).msg()?;
            checks.push(ctx.compare("win_probability", &r.overall, &q(1, 1)));
            let net = &f.network;
            checks.push(Check::flag("five_boxes_one_shared_bit", net.boxes.len() == 5 && net.shared_bits.len() == 1));
            checks.push(Check::flag("second_box_joins_a_b", (net.boxes.get(1).map(|x| (x.left, x.right))) == Some((0, 1))));
            data.insert("note".into(), json!(f.note));
            data.insert("game".into(), serde_json::to_value(&r).msg()?);
            data.insert("network".into(), serde_json::to_value(net).msg()?);
        }
        Target::RabelloQuantum => {
            let s = build_rabello_quantum_strategy().to_backend(ctx.backend).ok_or("strategy has no exact form")?;
            checks.push(Check::flag("strategy_valid", s.validate().is_ok()));
            let b = behavior_from_strategy(&s).msg()?;
            basics(&b, &mut checks);
            let r = rabello_game_value(&b, None).msg()?;
            let target = Scalar::exact(QSqrt2::from_parts(1, 2, 1, 4));
            for sg in &r.subgames {
                let got = sg.value.clone().ok_or_else(|| format!("subgame {} undefined", sg.label))?;
                checks.push(ctx.compare(&format!("subgame_{}", sg.label), &got, &target));
            }
            checks.push(Check::value("win_probability", &r.overall, true));
            data.insert("game".into(), serde_json::to_value(&r).msg()?);
        }
    }
    let backend = ctx.backend;
    Ok(ctx.finish(&format!("reproduce {name}"), backend, checks, Value::Object(data)))
}

fn check(ctx: Ctx, text: &str, names: &[String]) -> Res<RunReport> {
    let b = ctx.convert(&behavior_from_json(text).msg()?)?;
    let mut checks = Vec::new();
    let mut data = Map::new();
    for name in names {
        match name.as_str() {
            "validate" => checks.push(Check::flag("valid", b.validate().passed)),
            "no-signaling" => {
                let ns = b.no_signaling_check();
                checks.push(Check::value("no_signaling", &ns.worst_residual, ns.passed));
                data.insert("no_signaling".into(), serde_json::to_value(&ns).msg()?);
            }
            "chsh" => checks.push(Check::value("chsh", chsh_value(&b).msg()?, true)),
            "locality" => {
                ctx.require_exact("locality")?;
                let v = is_local(&b).msg()?;
                let independent = check_locality_certificate(&b, &v.certificate).is_ok();
                let verdict = if v.local { "local" } else { "nonlocal" };
                checks.push(Check::value("locality", verdict, v.certificate_verified && independent));
                data.insert("locality".into(), serde_json::to_value(&v).msg()?);
            }
            "theorem1" | "theorem2" => {
                let threshold = if name == "theorem1" { ChshThreshold::Quantum } else { ChshThreshold::NoSignaling };
                let r = theorem1_conditions_check(&b, threshold).msg()?;
                checks.push(Check::flag(&format!("{name}_conditions"), r.passed));
                data.insert(name.replace('-', "_"), serde_json::to_value(&r).msg()?);
            }
            "rabello" => {
                let r = rabello_game_value(&b, None).msg()?;
                checks.push(Check::value("win_probability", &r.overall, true));
                data.insert("rabello".into(), serde_json::to_value(&r).msg()?);
            }
            "hierarchy" => {
                let r = hierarchy_report(&b).msg()?;
                let ok = r.locality.as_ref().is_none_or(|l| l.certificate_verified);
                checks.push(Check::flag("hierarchy", ok));
                data.insert("hierarchy".into(), serde_json::to_value(&r).msg()?);
            }
            other => return Err(format!("unknown check {other:?}")),
        }
    }
    let backend = ctx.backend;
    Ok(ctx.finish("check", backend, checks, Value::Object(data)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PovmFile {
    /// `elements[k][row][col] = [re, im]`.
    elements: Vec<Vec<Vec<[f64; 2]>>>,
}

fn parse_povm(text: &str) -> Res<Vec<CMat>> {
    let f: PovmFile = serde_json::from_str(text).map_err(|e| format!("schema: {e}"))?;
    let d = f.elements.first().map(Vec::len).ok_or("POVM has no elements")?;
    f.elements
        .iter()
        .enumerate()
        .map(|(k, e)| {
            if e.len() != d || e.iter().any(|row| row.len() != d) {
                return Err(format!("element {k} is not {d}x{d}"));
            }
            Ok(CMat::from_fn(d, d, |i, j| Complex64::new(e[i][j][0], e[i][j][1])))
        })
        .collect()
}

fn dilate(ctx: Ctx, elements: &[CMat]) -> Res<RunReport> {
    let res = dilate_povm(elements, None).msg()?;
    let report = serde_json::to_value(&res.report).msg()?;
    let mut checks = Vec::new();
    if let Value::Object(fields) = &report {
        for (k, v) in fields.iter().filter(|(k, _)| k.ends_with("_error")) {
            let x = v.as_f64().unwrap_or(f64::INFINITY);
            checks.push(Check::compare(k, format!("{x:e}"), format!("<= {:e}", ctx.tolerance), x <= ctx.tolerance));
        }
    }
    let data = json!({
        "input_dim": elements[0].rows(),
        "outcomes": elements.len(),
        "ancilla_dim": res.ancilla_dim,
        "report": report,
    });
    Ok(ctx.finish("dilate", Backend::Float, checks, data))
}

fn parse_network(text: &str) -> Res<BoxNetwork> {
    if let Ok(f) = serde_json::from_str::<NetworkFixture>(text) {
        return Ok(f.network);
    }
    serde_json::from_str::<BoxNetwork>(text).map_err(|e| format!("schema: {e}"))
}

fn boxnet(mut ctx: Ctx, action: &BoxnetAction) -> Res<RunReport> {
    let mut checks = Vec::new();
    let (command, data) = match action {
        BoxnetAction::Evaluate { file } => {
            let text = ctx.read(file)?;
            let net = parse_network(&text)?;
            net.validate().msg()?;
            let b = ctx.convert(&evaluate(&net).msg()?)?;
            basics(&b, &mut checks);
            ("boxnet evaluate", json!({ "behavior": behavior_value(&b) }))
        }
        BoxnetAction::Search { which } => {
            let found = match which {
                Which::T2 => search_theorem2(),
                Which::T3 => search_theorem3(),
            }
            .msg()?;
            let stored = ctx.fixture(which.fixture())?;
            checks.push(Check::flag("found", found.network.is_some()));
            checks.push(Check::flag("matches_stored_fixture", found.network.as_ref() == Some(&stored.network)));
            ("boxnet search", serde_json::to_value(&found).msg()?)
        }
        BoxnetAction::ShowFixture { which } => {
            let f = ctx.fixture(which.fixture())?;
            let b = ctx.convert(&evaluate(&f.network).msg()?)?;
            basics(&b, &mut checks);
            match which {
                Which::T2 => checks.push(ctx.table_match("matches_target_table", &b, &theorem2_behavior())),
                Which::T3 => {
                    let r = rabello_game_value(&b, None).msg()?;
                    checks.push(ctx.compare("win_probability", &r.overall, &q(1, 1)));
                }
            }
            ("boxnet show-fixture", serde_json::to_value(&f).msg()?)
        }
    };
    let backend = ctx.backend;
    Ok(ctx.finish(command, backend, checks, data))
}

fn certify_local(ctx: Ctx, text: &str) -> Res<RunReport> {
    ctx.require_exact("certify-local")?;
    let b = behavior_from_json(text).msg()?;
    let v = is_local(&b).msg()?;
    let recheck = check_locality_certificate(&b, &v.certificate);
    let checks = vec![
        Check::value("local", v.local, true),
        Check::flag("certificate_verified", v.certificate_verified),
        Check::flag("certificate_rechecked", recheck.is_ok()),
    ];
    let data = serde_json::to_value(&v).msg()?;
    Ok(ctx.finish("certify-local", Backend::Exact, checks, data))
}

fn mixture_frontier(ctx: Ctx, text: Option<&str>, event: &[usize], no_agreement: bool) -> Res<RunReport> {
    ctx.require_exact("mixture-frontier")?;
    let b = match text {
        Some(t) => behavior_from_json(t).msg()?,
        None => theorem2_behavior(),
    };
    let [party, setting, outcome] = event else { return Err("--event takes party,setting,outcome".into()) };
    let event = ConditioningEvent { party: *party, setting: *setting, outcome: *outcome };
    let constraints = if no_agreement { vec![] } else { vec![AgreementConstraint { parties: [0, 1], settings: [0, 0] }] };
    let opt = max_mixture_conditional_chsh(&b, event, &constraints).msg()?;
    let optimum = Scalar::exact(opt.optimum.clone());
    let mut checks = vec![Check::flag("witness_rebuilt", opt.witness_chsh == opt.optimum)];
    let mut data = Map::new();
    if text.is_none() {
        if no_agreement {
            checks.push(ctx.compare("optimum", &optimum, &q(4, 1)));
        } else {
            checks.push(ctx.compare("optimum", &optimum, &two_sqrt2()));
            // (2 − √2)·B + (√2 − 1)·D₀ meets the constraint at exactly 2√2.
            let d0 = enumerate_vertices(b.scenario()).msg()?[0].behavior(b.scenario());
            let p = QSqrt2::from_parts(2, 1, -1, 1);
            let m = mix(&[(Scalar::exact(p.clone()), b.clone()), (Scalar::exact(QSqrt2::one() - p), d0)]).msg()?;
            let agrees = (0..2).all(|z| m.event_probability(&[0, 0, z], |o| o[0] == o[1]) == q(1, 1));
            let value = conditional_chsh(&m, *party, *setting, *outcome)?;
            checks.push(Check::compare("tsirelson_mixture", &value, two_sqrt2(), agrees && value == two_sqrt2()));
        }
    } else {
        checks.push(Check::value("optimum", &optimum, true));
    }
    data.insert("constraints".into(), serde_json::to_value(&constraints).msg()?);
    data.insert("optimum".into(), serde_json::to_value(&opt).msg()?);
    Ok(ctx.finish("mixture-frontier", Backend::Exact, checks, Value::Object(data)))
}

fn strategy(mut ctx: Ctx, source: &str) -> Res<RunReport> {
    let s = match source {
        "t1-quantum" => build_theorem1_strategy(),
        "t1-ghz" => build_ghz_strategy().msg()?.0,
        "rabello-quantum" => build_rabello_quantum_strategy(),
        path => {
            let text = ctx.read(Path::new(path))?;
            serde_json::from_str::<QuantumStrategy>(&text).map_err(|e| format!("schema: {e}"))?
        }
    };
    let s = s.to_backend(ctx.backend).ok_or("strategy has no exact form; rerun with --backend float")?;
    let mut checks = Vec::new();
    let valid = s.validate();
    checks.push(Check::value("strategy_valid", valid.as_ref().err().map_or("ok".to_string(), |e| e.to_string()), valid.is_ok()));
    let mut data = Map::new();
    if valid.is_ok() {
        checks.push(Check::value("bipartite_product", s.is_bipartite_product(), true));
        let b = behavior_from_strategy(&s).msg()?;
        basics(&b, &mut checks);
        data.insert("behavior".into(), behavior_value(&b));
    }
    data.insert("strategy".into(), serde_json::to_value(&s).msg()?);
    let backend = ctx.backend;
    Ok(ctx.finish("strategy", backend, checks, Value::Object(data)))
}
