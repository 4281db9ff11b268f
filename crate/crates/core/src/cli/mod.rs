//! Command dispatch and reports.

pub mod input;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::curves::{AgePairing, CurveError};
use crate::exactalg::{fmt_rat, mod_one, Rat, RatFn, SeriesKey};
use crate::fandmod::{FanDModule, RelationBounds};
use crate::iseries::{MirrorSetup, SetupError};
use crate::mirrorflow::{self, basis_from_members, select_basis, Direction, Mat, MatSeries, Mirror, MirrorError};
use crate::stackyfan::StackyFan;

pub use input::{parse_input, ChiMode, InputDocument, ParseError, ProfileSpec};

pub const COMMANDS: [&str; 9] = ["validate", "inertia", "sequences", "gkz", "iseries", "mirror", "qring", "pairing", "checks"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("ill-posed profile: {0}")]
    IllPosed(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::IllPosed(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SetupError> for CliError {
    fn from(e: SetupError) -> Self {
        match &e {
            SetupError::Curve(CurveError::NotAmple { .. } | CurveError::AmpleLength { .. }) | SetupError::Chi(_) => CliError::IllPosed(e.to_string()),
            SetupError::Curve(CurveError::BadSigma0(_)) | SetupError::Fan(_) | SetupError::BadExt(..) => CliError::Validation(e.to_string()),
            SetupError::Curve(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<MirrorError> for CliError {
    fn from(e: MirrorError) -> Self {
        match &e {
            MirrorError::NotGenerated(..) | MirrorError::BasisBound(..) | MirrorError::Direction(_) => CliError::IllPosed(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckOutcome {
    fn from_result(name: impl Into<String>, r: Result<(), String>) -> Self {
        match r {
            Ok(()) => CheckOutcome { name: name.into(), passed: true, witness: None },
            Err(w) => CheckOutcome { name: name.into(), passed: false, witness: Some(w) },
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ReportDocument {
    pub command: String,
    pub version: String,
    pub input_digest: String,
    pub results: Value,
    pub checks: Vec<CheckOutcome>,
}

impl ReportDocument {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// 0 when every check passed, 4 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            4
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} (input {})\n", self.command, &self.input_digest[..12]);
        render(&self.results, 0, &mut out);
        for c in &self.checks {
            let _ = write!(out, "{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
            if let Some(w) = &c.witness {
                let _ = write!(out, ": {}", w);
            }
            out.push('\n');
        }
        out
    }
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if is_inline(x) {
                    let _ = writeln!(out, "{}{}: {}", pad, k, inline(x));
                } else {
                    let _ = writeln!(out, "{}{}:", pad, k);
                    render(x, indent + 1, out);
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                if is_inline(x) {
                    let _ = writeln!(out, "{}- {}", pad, inline(x));
                } else {
                    let _ = writeln!(out, "{}-", pad);
                    render(x, indent + 1, out);
                }
            }
        }
        _ => {
            let _ = writeln!(out, "{}{}", pad, inline(v));
        }
    }
}

fn is_inline(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.iter().all(|x| !x.is_object() && is_inline(x)),
        Value::Object(_) => false,
        _ => true,
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => format!("[{}]", a.iter().map(inline).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn rats(v: &[Rat]) -> Value {
    Value::from(v.iter().map(fmt_rat).collect::<Vec<_>>())
}

fn key_json(s: &MirrorSetup, k: &SeriesKey) -> Value {
    json!({
        "q": k.q,
        "q_lq": rats(&s.rd.from_lambda(&k.q)),
        "t": k.t,
        "y": k.y,
    })
}

fn mat_json(m: &Mat) -> Value {
    Value::from(m.iter().map(|r| r.iter().map(|e| e.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn series_json(s: &MirrorSetup, m: &MatSeries) -> Value {
    Value::from(m.coeffs.iter().map(|(k, x)| json!({"key": key_json(s, k), "matrix": mat_json(x)})).collect::<Vec<_>>())
}

fn coords_json(s: &MirrorSetup, c: &BTreeMap<SeriesKey, Vec<RatFn>>) -> Value {
    Value::from(c.iter().map(|(k, v)| json!({"key": key_json(s, k), "coords": v.iter().map(|e| e.to_string()).collect::<Vec<_>>()})).collect::<Vec<_>>())
}

pub fn digest(doc: &InputDocument) -> String {
    let h = Sha256::digest(doc.serialize().as_bytes());
    h.iter().map(|b| format!("{:02x}", b)).collect()
}

struct Context {
    doc: InputDocument,
    fan: StackyFan,
}

impl Context {
    fn setup(&self) -> Result<MirrorSetup, CliError> {
        Ok(self.doc.setup(&self.fan)?)
    }

    fn mirror(&self, setup: &MirrorSetup) -> Result<Mirror, CliError> {
        let basis = match &self.doc.basis {
            Some(b) => basis_from_members(setup, b)?,
            None => select_basis(setup)?,
        };
        Ok(Mirror::new(setup, basis)?)
    }
}

/// Runs a command on a parsed document.
pub fn run(command: &str, doc: &InputDocument) -> Result<ReportDocument, CliError> {
    let fan = doc.fan()?;
    let cx = Context { doc: doc.clone(), fan };
    let (results, checks) = match command {
        "validate" => validate(&cx)?,
        "inertia" => inertia(&cx)?,
        "sequences" => sequences(&cx)?,
        "gkz" => gkz(&cx)?,
        "iseries" => iseries(&cx)?,
        "mirror" => mirror(&cx)?,
        "qring" => qring(&cx)?,
        "pairing" => pairing(&cx)?,
        "checks" => all_checks(&cx)?,
        other => return Err(CliError::Validation(format!("unknown command '{}'; expected one of {}", other, COMMANDS.join(", ")))),
    };
    Ok(ReportDocument { command: command.into(), version: env!("CARGO_PKG_VERSION").into(), input_digest: digest(doc), results, checks })
}

type Outcome = Result<(Value, Vec<CheckOutcome>), CliError>;

fn validate(cx: &Context) -> Outcome {
    let d = cx.fan.validate();
    let mut checks: Vec<CheckOutcome> = d.checks.iter().map(|c| CheckOutcome { name: c.check.clone(), passed: c.passed, witness: (!c.passed).then(|| c.detail.clone()) }).collect();
    if !d.ok() {
        return Err(CliError::Validation(d.errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")));
    }
    let s = cx.setup()?;
    checks.push(CheckOutcome { name: "ample class".into(), passed: true, witness: None });
    let results = json!({
        "rank": cx.fan.rank,
        "torsion": cx.fan.torsion,
        "rays": cx.fan.m(),
        "maximal_cones": cx.fan.max_cones.iter().map(|c| c.iter().map(|i| i + 1).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "extension": s.ext,
        "fixed_points": s.model.len(),
        "profile": cx.doc.profile.to_string(),
        "chi": cx.doc.chi.to_string(),
    });
    Ok((results, checks))
}

fn inertia(cx: &Context) -> Outcome {
    let rows: Vec<Value> = cx
        .fan
        .box_elements()
        .iter()
        .map(|b| json!({"v": b.v, "cone": b.cone.iter().map(|i| i + 1).collect::<Vec<_>>(), "psi": rats(&b.psi), "age": fmt_rat(&b.age)}))
        .collect();
    Ok((json!({ "box": rows }), vec![]))
}

fn sequences(cx: &Context) -> Outcome {
    let s = cx.setup()?;
    let rd = &s.rd;
    let results = json!({
        "relation_lattice": rd.l_basis.iter().map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "curve_lattice": rd.basis.iter().map(|v| rats(v)).collect::<Vec<_>>(),
        "orbifold_lattice": {
            "group": rd.o_group.to_string(),
            "over_rays": rd.o_mod_rays.to_string(),
            "generators": rd.o_gens.iter().map(|(l, k)| json!({"lambda": rats(l), "k": k})).collect::<Vec<_>>(),
        },
        "mori_walls": s.mori.walls.iter().map(|w| json!({"q": w, "q_lq": rats(&rd.from_lambda(w))})).collect::<Vec<_>>(),
        "ample": rats(&s.mori.omega_divisor),
        "d_classes_generate": rd.generated_by_dclasses(),
    });
    Ok((results, vec![]))
}

fn gkz(cx: &Context) -> Outcome {
    let s = cx.setup()?;
    let bounds = RelationBounds { qdeg: s.profile.qdeg.clone(), max_a: 2, window: None };
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for reduced in [false, true] {
        let m = FanDModule::new(&s.rd, &s.ext, reduced).map_err(|e| CliError::Internal(e.to_string()))?;
        for r in m.gkz_relations(&s.mori, &bounds) {
            let ok = m.verify(&r).map_err(|e| CliError::Internal(e.to_string()))?;
            let module = if reduced { "reduced" } else { "full" };
            rows.push(json!({"module": module, "label": r.label, "relation": r.to_string(), "verified": ok}));
            checks.push(CheckOutcome { name: format!("{} {}", module, r.label), passed: ok, witness: (!ok).then(|| r.to_string()) });
        }
    }
    Ok((json!({ "relations": rows }), checks))
}

fn iseries(cx: &Context) -> Outcome {
    let s = cx.setup()?;
    let i = s.ifunction();
    let keys: Vec<Value> = s.model.keys.iter().map(|k| json!({"cone": k.cone + 1, "v": k.v})).collect();
    let coeffs: Vec<Value> = i
        .coeffs
        .iter()
        .map(|(k, c)| json!({"key": key_json(&s, k), "values": c.values.iter().map(|e| e.to_string()).collect::<Vec<_>>()}))
        .collect();
    let ode = s.verify_loc_ode(&s.default_window());
    let mut checks = vec![CheckOutcome::from_result(format!("Loc ODEs ({} equations)", ode.checked), ode.failure.map_or(Ok(()), Err))];
    checks.push(CheckOutcome::from_result("I-function Galois phase", s.galois_violation(&i, &|_| Rat::from_integer(0.into())).map_or(Ok(()), Err)));
    if !s.model.is_specialized() {
        checks.push(CheckOutcome::from_result("I-function homogeneity", s.homogeneity_violation(&i, &Rat::from_integer(1.into())).map_or(Ok(()), Err)));
    }
    Ok((json!({"fixed_points": keys, "ifunction": coeffs}), checks))
}

fn mirror(cx: &Context) -> Outcome {
    let s = cx.setup()?;
    let mir = cx.mirror(&s)?;
    let mut conn = serde_json::Map::new();
    let mut checks = Vec::new();
    for d in mir.directions() {
        match mir.quantum_connection(&d) {
            Ok(a) => {
                conn.insert(d.to_string(), series_json(&s, &mir.in_tbasis(&a)));
                checks.push(CheckOutcome { name: format!("z-independence {}", d), passed: true, witness: None });
            }
            Err(e @ MirrorError::ZDependent { .. }) => checks.push(CheckOutcome { name: format!("z-independence {}", d), passed: false, witness: Some(e.to_string()) }),
            Err(e) => return Err(e.into()),
        }
    }
    let results = json!({
        "basis": mir.basis.members,
        "mirror_map": coords_json(&s, &mir.tau_coords()),
        "connection": Value::Object(conn),
    });
    Ok((results, checks))
}

fn generating_directions(mir: &Mirror) -> Vec<Direction> {
    mir.directions()
}

fn qring(cx: &Context) -> Outcome {
    let s = cx.setup()?;
    let mir = cx.mirror(&s)?;
    let alg = mir.star_algebra(&generating_directions(&mir))?;
    let mut gens = Vec::new();
    for p in &s.s {
        let m = alg.mult_matrix(&mir.p_class(p)?);
        gens.push(json!({"class": p, "matrix": series_json(&s, &mir.in_tbasis(&m))}));
    }
    let mut products = Vec::new();
    for (i, a) in s.ext.iter().enumerate() {
        for b in &s.ext[i..] {
            products.push(json!({"left": a, "right": b, "product": coords_json(&s, &mir.quantum_product(&alg, a, b)?)}));
        }
    }
    Ok((json!({"basis": mir.basis.members, "multiplication": gens, "products": products}), vec![]))
}

fn pairing(cx: &Context) -> Outcome {
    let s = cx.setup()?;
    let mir = cx.mirror(&s)?;
    let p = mir.pairing_matrix()?;
    let checks = vec![
        CheckOutcome::from_result("pairing symmetry and polynomiality", pairing_symmetric(&mir, &p)),
        CheckOutcome::from_result("pairing equals Poincaré pairing of images", pairing_matches(&mir, &p)),
    ];
    let rows: Vec<Value> = p.iter().map(|(k, m)| json!({"key": key_json(&s, k), "matrix": mat_json(m)})).collect();
    Ok((json!({"basis": mir.basis.members, "pairing": rows}), checks))
}

fn pairing_symmetric(mir: &Mirror, p: &BTreeMap<SeriesKey, Mat>) -> Result<(), String> {
    let n = mir.n();
    // on a non-compact target the pairing of untwisted classes has poles in χ
    let proper = mir.setup.fan().is_complete();
    for (k, m) in p {
        for i in 0..n {
            for j in 0..n {
                if !m[i][j].is_z_polynomial() || (proper && !m[i][j].is_polynomial()) {
                    return Err(format!("entry ({},{}) at {:?} is not polynomial: {}", i + 1, j + 1, k, m[i][j]));
                }
                if m[i][j] != m[j][i].negate_z() {
                    return Err(format!("entries ({},{}) and ({},{}) at {:?}", i + 1, j + 1, j + 1, i + 1, k));
                }
            }
        }
    }
    Ok(())
}

fn pairing_matches(mir: &Mirror, p: &BTreeMap<SeriesKey, Mat>) -> Result<(), String> {
    let t = mir.theta_pairing_matrix();
    if &t == p {
        Ok(())
    } else {
        let k = p.keys().chain(t.keys()).find(|k| p.get(*k) != t.get(*k)).cloned();
        Err(format!("differs at {:?}", k))
    }
}

/// ⋆ commutativity and associativity on the P-classes of the basis.
pub fn star_checks(mir: &Mirror) -> Result<(Result<(), String>, Result<(), String>), MirrorError> {
    let alg = mir.star_algebra(&generating_directions(mir))?;
    let ps: Vec<_> = mir.basis.members.iter().map(|k| mir.p_class(k)).collect::<Result<_, _>>()?;
    let mut comm = Ok(());
    let mut assoc = Ok(());
    for (i, a) in ps.iter().enumerate() {
        for (j, b) in ps.iter().enumerate().skip(i) {
            let ab = alg.multiply(a, b);
            if comm.is_ok() && !ab.sub(&alg.multiply(b, a)).is_zero() {
                comm = Err(format!("P_{:?} and P_{:?}", mir.basis.members[i], mir.basis.members[j]));
            }
            for (l, c) in ps.iter().enumerate() {
                if assoc.is_ok() && !alg.multiply(&ab, c).sub(&alg.multiply(a, &alg.multiply(b, c))).is_zero() {
                    assoc = Err(format!("P_{:?}, P_{:?}, P_{:?}", mir.basis.members[i], mir.basis.members[j], mir.basis.members[l]));
                }
            }
        }
    }
    Ok((comm, assoc))
}

fn galois_phases(s: &MirrorSetup) -> Value {
    let ap = AgePairing::new(&s.rd);
    Value::from(ap.generators.iter().map(|xi| {
        let w: Vec<Value> = s.s.iter().enumerate().map(|(j, l)| {
            let age = ap.age(xi, &s.psi(l), l);
            json!({"point": l, "index": j + 1, "phase": fmt_rat(&mod_one(&age))})
        }).collect();
        json!({"generator": xi.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "phases": w})
    }).collect::<Vec<_>>())
}

fn all_checks(cx: &Context) -> Outcome {
    let mut checks = Vec::new();
    let (_, v) = validate(cx)?;
    checks.extend(v);
    let s = cx.setup()?;
    let (_, g) = gkz(cx)?;
    let bad: Vec<&CheckOutcome> = g.iter().filter(|c| !c.passed).collect();
    checks.push(CheckOutcome::from_result(format!("GKZ relations ({})", g.len()), bad.first().map_or(Ok(()), |c| Err(c.name.clone()))));
    let ode = s.verify_loc_ode(&s.default_window());
    checks.push(CheckOutcome::from_result(format!("Loc ODEs ({} equations)", ode.checked), ode.failure.map_or(Ok(()), Err)));
    let mut gal = Ok(());
    for k in s.default_window() {
        if let Some(e) = s.galois_check_loc(&k) {
            gal = Err(e);
            break;
        }
    }
    checks.push(CheckOutcome::from_result("Loc Galois equivariance", gal));
    checks.push(CheckOutcome::from_result("Bernoulli cancellation", mirrorflow::bernoulli_cancellation(&s, 6)));
    let mir = cx.mirror(&s)?;
    let dirs = mir.directions();
    for d in &dirs {
        checks.push(CheckOutcome::from_result(format!("z-independence {}", d), mir.quantum_connection(d).map(|_| ()).map_err(|e| e.to_string())));
    }
    let mut gm = Ok(());
    let mut qf = Ok(());
    for (i, a) in dirs.iter().enumerate() {
        for b in &dirs[i + 1..] {
            if gm.is_ok() && !mir.gm_flatness_defect(a, b)?.is_zero() {
                gm = Err(format!("{} / {}", a, b));
            }
            if qf.is_ok() {
                let (c, d) = mir.quantum_flatness_defect(a, b)?;
                if !c.is_zero() || !d.is_zero() {
                    qf = Err(format!("{} / {}", a, b));
                }
            }
        }
    }
    checks.push(CheckOutcome::from_result("Gauss-Manin flatness", gm));
    checks.push(CheckOutcome::from_result("quantum connection flatness", qf));
    if !s.model.is_specialized() {
        checks.push(CheckOutcome::from_result("Euler grading of tau and Theta", mir.euler_grading_check()));
    }
    checks.push(CheckOutcome::from_result("Galois phases of tau and Theta", mir.galois_check()));
    checks.push(CheckOutcome::from_result("derivative of tau at the origin", mir.tau_derivative_check()));
    let p = mir.pairing_matrix()?;
    checks.push(CheckOutcome::from_result("pairing symmetry", pairing_symmetric(&mir, &p)));
    checks.push(CheckOutcome::from_result("pairing equals Poincaré pairing of images", pairing_matches(&mir, &p)));
    match star_checks(&mir) {
        Ok((c, a)) => {
            checks.push(CheckOutcome::from_result("quantum product commutative", c));
            checks.push(CheckOutcome::from_result("quantum product associative", a));
        }
        Err(MirrorError::NotGenerated(r, n)) => {
            checks.push(CheckOutcome::from_result("quantum product", Err(format!("directions generate rank {} of {}; add extension points or t-order", r, n))));
        }
        Err(e) => return Err(e.into()),
    }
    let results = json!({
        "basis": mir.basis.members,
        "passed": checks.iter().filter(|c| c.passed).count(),
        "total": checks.len(),
        "galois": galois_phases(&s),
    });
    Ok((results, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P12: &str = "rank = 1\nray = 2\nray = -1\ncone = 1\ncone = 2\next = 1\nprofile = qdeg=2,tord=0,yord=4\nbasis = 0\nbasis = -1\nbasis = 1\n";

    #[test]
    fn inertia_of_weighted_line() {
        let d = parse_input(P12).unwrap();
        let r = run("inertia", &d).unwrap();
        let ages: Vec<(String, String)> = r.results["box"]
            .as_array()
            .unwrap()
            .iter()
            .map(|b| (b["v"].to_string(), b["age"].as_str().unwrap().to_string()))
            .collect();
        assert_eq!(ages, vec![("[0]".into(), "0".into()), ("[1]".into(), "1/2".into())]);
    }

    #[test]
    fn reports_are_deterministic() {
        let d = parse_input(P12).unwrap();
        let a = run("mirror", &d).unwrap().to_json();
        let b = run("mirror", &parse_input(&d.serialize()).unwrap()).unwrap().to_json();
        assert_eq!(a, b);
        assert!(run("sequences", &d).unwrap().to_text().contains("curve_lattice"));
    }

    #[test]
    fn exit_codes() {
        let d = parse_input(P12).unwrap();
        assert_eq!(run("frobnicate", &d).unwrap_err().exit_code(), 2);
        let mut bad = d.clone();
        bad.ample = Some(vec![crate::exactalg::rint(-1), crate::exactalg::rint(0)]);
        assert_eq!(run("mirror", &bad).unwrap_err().exit_code(), 3);
        let mut zero = d.clone();
        zero.chi = ChiMode::Values(vec![crate::exactalg::rint(0)]);
        assert_eq!(run("mirror", &zero).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn checks_pass_on_weighted_line() {
        let d = parse_input(P12).unwrap();
        let r = run("checks", &d).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }
}
