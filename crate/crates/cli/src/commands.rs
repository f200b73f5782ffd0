//! One function per subcommand. Each returns JSON results, explicit checks
//! and the files it wants written.

use haarlab::born::{estimate_expected_tv, sq_lower_bound, BornDistribution, SamplingRoute, SqParams};
use haarlab::commutant::{commutant_basis, mc_twirl_many, random_density_matrix, twirl, BasisSummary};
use haarlab::complexity::{
    corollary_packing_count, design_low_complexity_prob_bound, design_packing_count, low_complexity_prob_bound,
    measurement_class_size_bound, packing_count, ComplexityParams, DesignParams, MomentOrder,
};
use haarlab::concentration::{default_tau_grid, empirical_tail, LipschitzFunctional};
use haarlab::gaussian::{haar_expect_direct, haar_expect_gaussian, random_homogeneous_polynomial, MomentRecord};
use haarlab::haar::{sample_group_element, sample_state, write_matrix_csv, write_state_csv};
use haarlab::verify::{verify_all_with, Scale};
use haarlab::RngStream;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, ConfigError, Params};

/// An explicit pass/fail comparison.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: Value) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }
}

#[derive(Default)]
pub struct Outcome {
    pub result: Value,
    pub checks: Vec<Check>,
    /// (file name, contents)
    pub files: Vec<(String, Vec<u8>)>,
}

type Res = Result<Outcome, ConfigError>;

pub fn execute(command: Command, p: &Params, seed: u64, rng: &RngStream) -> Res {
    match command {
        Command::Sample => sample(p, rng),
        Command::Moment => moment(p, rng),
        Command::TwirlCheck => twirl_check(p, rng),
        Command::Concentration => concentration(p, rng),
        Command::TvDistance => tv_distance(p, rng),
        Command::ComplexityBound => complexity_bound(p),
        Command::Packing => packing(p),
        Command::SqBound => sq_bound(p),
        Command::Verify => verify(p, seed),
    }
}

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> haarlab::Result<()>) -> Result<Vec<u8>, ConfigError> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(buf)
}

fn sample(p: &Params, rng: &RngStream) -> Res {
    let g = p.group_id()?;
    let n = p.samples.unwrap_or(1);
    let states = p.states.unwrap_or(false);
    let mut out = Outcome::default();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut r = rng.substream(i as u64);
        if states {
            let psi = sample_state(g, &mut r);
            let norm = psi.state.norm_sqr();
            out.checks.push(Check::new(format!("state {i} normalized"), (norm - 1.0).abs() < 1e-12, json!(norm)));
            rows.push(json!({"index": i, "norm_sqr": norm}));
            out.files.push((format!("state_{i}.csv"), csv_bytes(|b| write_state_csv(b, &psi))?));
        } else {
            let u = sample_group_element(g, &mut r);
            let report = u.constraint_report();
            out.checks.push(Check::new(format!("element {i} constraints"), report.holds(), json!(report)));
            rows.push(json!({"index": i, "constraints": report}));
            out.files.push((format!("element_{i}.csv"), csv_bytes(|b| write_matrix_csv(b, u.matrix()))?));
        }
    }
    out.result = json!({"group": g, "label": g.to_string(), "kind": if states { "states" } else { "elements" }, "samples": rows});
    Ok(out)
}

fn moment(p: &Params, rng: &RngStream) -> Res {
    let g = p.group_id()?;
    let k = p.k.unwrap_or(1);
    let n = p.samples.unwrap_or(100_000);
    let tol = p.tolerance(3.0)?;
    let mut poly_rng = rng.substream(u64::MAX);
    let mut out = Outcome::default();
    let mut rows = Vec::new();
    for i in 0..p.polynomials.unwrap_or(5) {
        let (f, monomials) = random_homogeneous_polynomial(g, k, p.terms.unwrap_or(3), &mut poly_rng)?;
        let s = rng.substream(i as u64);
        let gauss = haar_expect_gaussian(g, &f, n, &s)?;
        let direct = haar_expect_direct(g, &f, n, &s)?;
        let z = gauss.z_score(&direct);
        out.checks.push(Check::new(format!("polynomial {i}: gaussian vs direct within {tol} SE"), z <= tol, json!(z)));
        rows.push(json!({
            "polynomial": i, "monomials": monomials,
            "gaussian": MomentRecord::new(g, k, &gauss), "direct": MomentRecord::new(g, k, &direct), "z": z,
        }));
    }
    out.result = json!({"group": g, "label": g.to_string(), "k": k, "rows": rows});
    Ok(out)
}

fn twirl_check(p: &Params, rng: &RngStream) -> Res {
    let g = p.group_id()?;
    let k = p.k.unwrap_or(1);
    let n = p.samples.unwrap_or(100_000);
    let tol = p.tolerance(5.0)?;
    let basis = commutant_basis(g, k)?;
    let size = g.complex_dim().pow(k);
    let mut input_rng = rng.substream(u64::MAX);
    let inputs: Vec<_> = (0..p.inputs.unwrap_or(5)).map(|_| random_density_matrix(size, &mut input_rng)).collect();
    let mc = mc_twirl_many(g, k, &inputs, n, rng)?;
    let mut out = Outcome::default();
    let mut rows = Vec::new();
    for (i, (rho, est)) in inputs.iter().zip(&mc).enumerate() {
        let t = twirl(rho, &basis)?;
        let z = est.max_z(&t, haarlab::verify::TWIRL_SE_FLOOR);
        let idem = (twirl(&t, &basis)? - &t).camax();
        let trace = (t.trace() - rho.trace()).norm();
        out.checks.push(Check::new(format!("input {i}: Monte Carlo within {tol} SE"), z <= tol, json!(z)));
        out.checks.push(Check::new(format!("input {i}: idempotent"), idem <= 1e-10, json!(idem)));
        out.checks.push(Check::new(format!("input {i}: trace preserving"), trace <= 1e-10, json!(trace)));
        rows.push(json!({"input": i, "max_z": z, "max_deviation": est.max_deviation(&t), "idempotence_error": idem, "trace_error": trace}));
    }
    out.result = json!({"group": g, "label": g.to_string(), "k": k, "n_samples": n, "basis": BasisSummary::from(&basis), "rows": rows});
    Ok(out)
}

fn concentration(p: &Params, rng: &RngStream) -> Res {
    let g = p.group_id()?;
    let tol = p.tolerance(3.0)?;
    let f = LipschitzFunctional::basis_projector(g, p.target.unwrap_or(0))?;
    let mut rep = empirical_tail(g, &f, &default_tau_grid(), p.samples.unwrap_or(10_000), rng)?;
    rep.exact_mean = Some(1.0 / g.complex_dim() as f64);
    let violations = rep.violations(tol);
    let mut out = Outcome::default();
    out.checks.push(Check::new(format!("tails within Levy bound + {tol} SE"), violations.is_empty(), json!({"violations": violations, "worst_z": rep.worst_z()})));
    out.files.push(("tail.csv".into(), csv_bytes(|b| rep.write_csv(b))?));
    out.result = serde_json::to_value(&rep).expect("report serializes");
    Ok(out)
}

fn tv_distance(p: &Params, rng: &RngStream) -> Res {
    let kind = p.group_kind()?;
    let n = Params::require(p.qubits, "qubits")?;
    let tol = p.tolerance(3.0)?;
    let route = p.route.unwrap_or(SamplingRoute::Pushforward);
    let e = estimate_expected_tv(kind, n, p.samples.unwrap_or(200), rng, route)?;
    let gap = (e.estimate.value - e.m).abs();
    let mut out = Outcome::default();
    out.checks.push(Check::new(
        format!("estimate within M ± (Delta + {tol} SE)"),
        gap <= e.delta + tol * e.estimate.std_error,
        json!({"gap": gap, "allowed": e.delta + tol * e.estimate.std_error}),
    ));
    // One example distribution for plotting.
    let psi = sample_state(e.group, &mut rng.substream(u64::MAX));
    let example = BornDistribution::from_state(&psi)?;
    out.files.push(("born.csv".into(), csv_bytes(|b| example.write_csv(b))?));
    out.result = serde_json::to_value(&e).expect("estimate serializes");
    Ok(out)
}

fn complexity_bound(p: &Params) -> Res {
    let kind = p.group_kind()?;
    let params = ComplexityParams {
        n: Params::require(p.qubits, "qubits")?,
        r: p.r.unwrap_or(1),
        delta: Params::require(p.delta, "delta")?,
        gate_set_size: p.gate_set_size.unwrap_or(2),
    };
    let mut result = json!({
        "measurement_class_size": measurement_class_size_bound(&params)?,
        "low_complexity": low_complexity_prob_bound(kind, &params)?,
    });
    if let Some(k) = p.k {
        let design = DesignParams {
            k,
            epsilon: p.epsilon.unwrap_or(0.0),
        };
        let order = if p.integer_m.unwrap_or(false) {
            MomentOrder::IntegerFloor
        } else {
            MomentOrder::RealThird
        };
        result["design_low_complexity"] = json!(design_low_complexity_prob_bound(kind, &params, &design, order)?);
    }
    Ok(Outcome {
        result,
        ..Outcome::default()
    })
}

fn packing(p: &Params) -> Res {
    let kind = p.group_kind()?;
    let d = match (p.dim, p.qubits) {
        (Some(d), _) => d as f64,
        (None, Some(n)) => 2f64.powi(n as i32),
        (None, None) => return Err(ConfigError("missing parameter `params.dim` or `params.qubits` (or --dim/--qubits)".into())),
    };
    let report = if p.corollary.unwrap_or(false) {
        corollary_packing_count(kind, d, Params::require(p.k, "k")?)?
    } else {
        let delta = Params::require(p.delta, "delta")?;
        match p.k {
            Some(k) => design_packing_count(kind, d, delta, &DesignParams { k, epsilon: p.epsilon.unwrap_or(0.0) })?,
            None => packing_count(kind, d, delta)?,
        }
    };
    Ok(Outcome {
        result: json!(report),
        ..Outcome::default()
    })
}

fn sq_bound(p: &Params) -> Res {
    let kind = p.group_kind()?;
    let params = SqParams {
        n: Params::require(p.qubits, "qubits")?,
        tau: Params::require(p.tau, "tau")?,
        epsilon: Params::require(p.epsilon, "epsilon")?,
        beta: Params::require(p.beta, "beta")?,
    };
    Ok(Outcome {
        result: json!(sq_lower_bound(kind, &params)?),
        ..Outcome::default()
    })
}

fn verify(p: &Params, seed: u64) -> Res {
    let scale = p.scale.unwrap_or(Scale::Quick);
    let report = verify_all_with(seed, scale, |r| eprintln!("{}", r.summary_line()));
    let checks = report
        .criteria
        .iter()
        .map(|c| Check::new(format!("criterion {}: {}", c.id, c.name), c.passed, json!({"elapsed_secs": c.elapsed_secs, "within_budget": c.within_budget()})))
        .collect();
    Ok(Outcome {
        result: json!(report),
        checks,
        files: Vec::new(),
    })
}
