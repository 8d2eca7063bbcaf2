//! Command implementations. Each returns a process exit code; data goes to
//! the supplied writer, errors to stderr.
//!
//! Exit contract: 0 success, 1 input error, 2 solver failure (no convergence
//! or no output state), 3 property-suite failure.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ctcsim_core::circuit::{assemble_unitary, is_classical};
use ctcsim_core::dctc::{
    self, basis_index, classical_enumerate, fixed_point_space, induced_channel,
    solve_fixed_point, Policy,
};
use ctcsim_core::dsl::{self, display_complex, matrix_value, round_sig};
use ctcsim_core::infoflow::flow_analysis;
use ctcsim_core::pctc::{pctc_operator, pctc_output};
use ctcsim_core::qlin::negativity;
use ctcsim_core::{Circuit, ComplexMatrix, DensityMatrix, Error};

use crate::scenarios;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_PROPERTY: i32 = 3;

/// Which semantics to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModelArg {
    Dctc,
    Pctc,
    Both,
}

/// Fixed-point selection exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PolicyArg {
    Canonical,
    #[value(name = "maxent")]
    MaxEnt,
    AllExtremes,
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::SolverNoConvergence { .. }
        | Error::SolverDefect(_)
        | Error::ZeroWeight(_)
        | Error::ChannelInvariant(_) => EXIT_SOLVER,
        _ => EXIT_INPUT,
    }
}

/// Resolve a scenario name or circuit file path.
fn load_input(input: &str) -> Result<(Circuit, String), (i32, String)> {
    if let Some(s) = scenarios::find(input) {
        let c = scenarios::build(s)
            .map_err(|e| (EXIT_INPUT, format!("scenario {}: {e}", s.name)))?;
        return Ok((c, format!("scenario {}", s.name)));
    }
    match std::fs::read_to_string(input) {
        Ok(text) => {
            let c = dsl::parse_circuit(&text)
                .map_err(|e| (exit_code_for(&e), format!("{input}: {e}")))?;
            Ok((c, format!("file {input}")))
        }
        Err(io) => Err((
            EXIT_INPUT,
            format!(
                "'{input}' is neither a built-in scenario ({}) nor a readable file: {io}",
                scenarios::SCENARIOS
                    .iter()
                    .map(|s| s.name)
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        )),
    }
}

/// Scalar display: plain decimals for ordinary magnitudes, scientific
/// notation for the tiny residual-scale values.
fn fmt_scalar(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 || r.abs() >= 1e-4 {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn write_matrix(out: &mut dyn Write, m: &ComplexMatrix) -> std::io::Result<()> {
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| display_complex(m[(i, j)])).collect();
        writeln!(out, "  [{}]", row.join(", "))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

pub struct SolveOptions {
    pub model: ModelArg,
    pub policy: PolicyArg,
    pub tol: f64,
    pub json: bool,
}

pub fn cmd_solve(input: &str, opts: &SolveOptions, out: &mut dyn Write) -> i32 {
    let (circuit, label) = match load_input(input) {
        Ok(v) => v,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            return code;
        }
    };
    let flow = match flow_analysis(&circuit) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: information-flow analysis failed: {e}");
            return exit_code_for(&e);
        }
    };

    let mut exit = EXIT_OK;
    let mut reports: Vec<dsl::Report> = Vec::new();
    let mut human = Vec::new();

    if matches!(opts.model, ModelArg::Dctc | ModelArg::Both) {
        let core_policy = match opts.policy {
            PolicyArg::Canonical => Policy::Canonical,
            PolicyArg::MaxEnt | PolicyArg::AllExtremes => Policy::MaxEnt,
        };
        match dctc::analyze_circuit(&circuit, core_policy, opts.tol) {
            Ok(solve) => {
                let want_extremes = opts.policy == PolicyArg::AllExtremes
                    || solve.fixed_space.affine_dim > 0;
                let extremes = if want_extremes {
                    match dctc::extreme_outputs(&circuit, &solve.fixed_space) {
                        Ok(list) if !list.is_empty() => Some(list),
                        Ok(_) => None,
                        Err(e) => {
                            eprintln!("error: {e}");
                            return exit_code_for(&e);
                        }
                    }
                } else {
                    None
                };
                human_dctc_section(&mut human, &label, &circuit, &solve, &flow, extremes.as_deref())
                    .expect("in-memory write");
                reports.push(dsl::dctc_report(&circuit, &solve, &flow, extremes.as_deref()));
            }
            Err(e) => {
                eprintln!("error: dctc solve failed: {e}");
                return exit_code_for(&e);
            }
        }
    }

    if matches!(opts.model, ModelArg::Pctc | ModelArg::Both) {
        match run_pctc(&circuit) {
            Ok((rho_out, weight, diags)) => {
                human_pctc_section(&mut human, &label, &rho_out, weight, &flow)
                    .expect("in-memory write");
                reports.push(dsl::pctc_report(&circuit, &rho_out, weight, &diags, &flow));
            }
            Err(e @ Error::ZeroWeight(_)) => {
                // a determinate outcome of the model, not a crash: the input
                // is post-selected away entirely
                eprintln!("pctc: {e}");
                if opts.model == ModelArg::Pctc {
                    exit = EXIT_SOLVER;
                }
                writeln!(human, "-- {label} (pctc) --").unwrap();
                writeln!(human, "paradoxical input annihilated: no output state exists\n")
                    .unwrap();
            }
            Err(e) => {
                eprintln!("error: pctc evaluation failed: {e}");
                return exit_code_for(&e);
            }
        }
    }

    if opts.json {
        let text = match reports.len() {
            1 => dsl::emit_report(&reports[0]),
            _ => format!(
                "[{}]",
                reports
                    .iter()
                    .map(dsl::emit_report)
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        };
        writeln!(out, "{text}").expect("stdout write");
    } else {
        out.write_all(&human).expect("stdout write");
        writeln!(out, "information flow: {}", flow_summary(&flow)).expect("stdout write");
    }
    exit
}

type PctcOutcome = (DensityMatrix, f64, Vec<(String, f64)>);

fn run_pctc(circuit: &Circuit) -> Result<PctcOutcome, Error> {
    let u = assemble_unitary(circuit)?;
    let op = pctc_operator(&u, circuit.dim_cr(), circuit.dim_ctc())?;
    let (rho_out, weight) = pctc_output(&op, &circuit.input)?;
    let mut diags = vec![
        ("input_purity".to_string(), circuit.input.purity()),
        ("output_purity".to_string(), rho_out.purity()),
    ];
    if circuit.n_cr >= 2 {
        let dims = vec![2usize; circuit.n_cr];
        diags.push((
            "input_negativity_cr0_rest".to_string(),
            negativity(&circuit.input, &dims, &[0])?,
        ));
        diags.push((
            "output_negativity_cr0_rest".to_string(),
            negativity(&rho_out, &dims, &[0])?,
        ));
    }
    Ok((rho_out, weight, diags))
}

fn flow_summary(flow: &ctcsim_core::infoflow::FlowReport) -> String {
    let mut s = format!(
        "{} (defect {} at declared input, {} worst-case over CR basis)",
        flow.narrative,
        fmt_scalar(flow.constancy_defect),
        fmt_scalar(flow.constancy_defect_worst_cr)
    );
    if flow.unrolled.is_some() {
        s.push_str("; an equivalent loop-free rerouting exists");
    }
    s
}

fn human_dctc_section(
    out: &mut dyn Write,
    label: &str,
    circuit: &Circuit,
    solve: &dctc::SolveReport,
    flow: &ctcsim_core::infoflow::FlowReport,
    extremes: Option<&[(DensityMatrix, DensityMatrix)]>,
) -> std::io::Result<()> {
    writeln!(out, "-- {label} (dctc) --")?;
    writeln!(out, "circuit hash: {}", dsl::circuit_hash(circuit))?;
    writeln!(out, "policy: {}", solve.policy)?;
    writeln!(out, "rho_ctc:")?;
    write_matrix(out, solve.rho_ctc.matrix())?;
    writeln!(out, "residual: {}", fmt_scalar(solve.residual))?;
    match solve.fixed_space.affine_dim {
        0 => writeln!(out, "fixed-point set: unique (affine dim 0)")?,
        d => writeln!(out, "fixed-point set: affine dim {d} (not unique)")?,
    }
    if let Some(list) = extremes {
        writeln!(out, "extreme fixed points and their outputs:")?;
        for (idx, (rho_ctc, rho_out)) in list.iter().enumerate() {
            writeln!(out, " extreme {idx}: rho_ctc =")?;
            write_matrix(out, rho_ctc.matrix())?;
            writeln!(out, "  routes to rho_out =")?;
            write_matrix(out, rho_out.matrix())?;
        }
    }
    writeln!(out, "rho_out:")?;
    write_matrix(out, solve.rho_out.matrix())?;
    writeln!(out, "diagnostics:")?;
    for (name, value) in &solve.diagnostics {
        writeln!(out, "  {name}: {}", fmt_scalar(*value))?;
    }
    writeln!(
        out,
        "  constancy_defect: {}",
        fmt_scalar(flow.constancy_defect)
    )?;
    writeln!(out)
}

fn human_pctc_section(
    out: &mut dyn Write,
    label: &str,
    rho_out: &DensityMatrix,
    weight: f64,
    _flow: &ctcsim_core::infoflow::FlowReport,
) -> std::io::Result<()> {
    writeln!(out, "-- {label} (pctc) --")?;
    writeln!(out, "post-selection weight: {}", fmt_scalar(weight))?;
    writeln!(out, "rho_out:")?;
    write_matrix(out, rho_out.matrix())?;
    writeln!(out)
}

// ---------------------------------------------------------------------------
// enumerate
// ---------------------------------------------------------------------------

pub fn cmd_enumerate(input: &str, json: bool, out: &mut dyn Write) -> i32 {
    let (circuit, label) = match load_input(input) {
        Ok(v) => v,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            return code;
        }
    };
    let result = (|| -> Result<(), Error> {
        let u = assemble_unitary(&circuit)?;
        let ch = induced_channel(&u, &circuit.input)?;
        let fps = fixed_point_space(&ch)?;
        let extremes = dctc::extreme_outputs(&circuit, &fps)?;
        let classical = if is_classical(&circuit)? && basis_index(&circuit.input).is_some() {
            Some(classical_enumerate(&circuit)?)
        } else {
            None
        };

        if json {
            let classical_json = classical.as_ref().map(|rows| {
                rows.iter()
                    .map(|r| {
                        serde_json::json!({
                            "z": r.z,
                            "consistent": r.consistent,
                            "output": r.output,
                        })
                    })
                    .collect::<Vec<_>>()
            });
            let doc = serde_json::json!({
                "circuit_hash": dsl::circuit_hash(&circuit),
                "affine_dim": fps.affine_dim,
                "extreme_points": fps.extreme_points.as_ref().map(|_| {
                    extremes
                        .iter()
                        .map(|(rho_ctc, rho_out)| {
                            serde_json::json!({
                                "rho_ctc": matrix_value(rho_ctc.matrix()),
                                "rho_out": matrix_value(rho_out.matrix()),
                            })
                        })
                        .collect::<Vec<_>>()
                }),
                "classical": classical_json,
            });
            writeln!(out, "{doc}").expect("stdout write");
        } else {
            writeln!(out, "-- {label}: fixed-point set --").expect("stdout write");
            match fps.affine_dim {
                0 => writeln!(out, "affine dim 0: unique fixed point").expect("stdout write"),
                d => writeln!(out, "affine dim {d}: a continuum of fixed points")
                    .expect("stdout write"),
            }
            if extremes.is_empty() {
                writeln!(out, "extreme points: not enumerable (continuum)").expect("stdout write");
            } else {
                for (idx, (rho_ctc, rho_out)) in extremes.iter().enumerate() {
                    writeln!(out, "extreme {idx}: rho_ctc =").expect("stdout write");
                    write_matrix(out, rho_ctc.matrix()).expect("stdout write");
                    writeln!(out, "  routes to rho_out =").expect("stdout write");
                    write_matrix(out, rho_out.matrix()).expect("stdout write");
                }
            }
            match &classical {
                Some(rows) => {
                    writeln!(out, "classical consistency table (z | consistent | output):")
                        .expect("stdout write");
                    for r in rows {
                        writeln!(
                            out,
                            "  {} | {} | {}",
                            r.z,
                            if r.consistent { "yes" } else { "no " },
                            r.output
                        )
                        .expect("stdout write");
                    }
                    if rows.iter().all(|r| !r.consistent) {
                        writeln!(out, "  (no classically consistent assignment exists)")
                            .expect("stdout write");
                    }
                }
                None => writeln!(
                    out,
                    "classical table: n/a (requires a basis-state input and permutation gates)"
                )
                .expect("stdout write"),
            }
        }
        Ok(())
    })();
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

/// Randomized property run: CPTP validity, fixed-point existence, and
/// agreement between the spectral and iterative solvers, on Haar-random
/// interactions with random pure CR inputs.
pub fn cmd_check(seed: u64, count: usize, inject_defect: bool, out: &mut dyn Write) -> i32 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cptp_pass = 0usize;
    let mut exist_pass = 0usize;
    let mut agree_pass = 0usize;
    let mut failures: Vec<String> = Vec::new();

    for k in 0..count {
        let d_ctc = if k % 2 == 0 { 2 } else { 4 };
        let d_cr = if (k / 2) % 2 == 0 { 2 } else { 4 };
        let u = ctcsim_core::qlin::random_unitary(d_cr * d_ctc, &mut rng);
        let rho_in =
            DensityMatrix::from_pure(&ctcsim_core::qlin::random_pure_state(d_cr, &mut rng))
                .expect("normalized");
        let ch = match induced_channel(&u, &rho_in) {
            Ok(ch) => ch,
            Err(e) => {
                failures.push(format!("instance {k}: channel build failed: {e}"));
                continue;
            }
        };
        let ch = if inject_defect && k == 0 {
            ch.perturbed(0.05)
        } else {
            ch
        };

        match ch.validate() {
            Ok(()) => cptp_pass += 1,
            Err(e) => failures.push(format!("instance {k}: {e}")),
        }

        let sol = match solve_fixed_point(&ch, Policy::Canonical, 1e-10) {
            Ok(sol) if sol.residual <= 1e-8 => {
                exist_pass += 1;
                Some(sol)
            }
            Ok(sol) => {
                failures.push(format!(
                    "instance {k}: residual {:.3e} above 1e-8",
                    sol.residual
                ));
                None
            }
            Err(e) => {
                failures.push(format!("instance {k}: {e}"));
                None
            }
        };

        match (sol, fixed_point_space(&ch)) {
            (Some(sol), Ok(fps)) => {
                let mut remainder = sol.rho.matrix().sub(fps.particular.matrix());
                for dir in &fps.directions {
                    let mut coef = 0.0;
                    for i in 0..remainder.rows() {
                        for j in 0..remainder.cols() {
                            coef += (dir[(i, j)].conj() * remainder[(i, j)]).re;
                        }
                    }
                    remainder = remainder.sub(&dir.scale_re(coef));
                }
                let off = remainder.frobenius_norm();
                if off <= 1e-7 {
                    agree_pass += 1;
                } else {
                    failures.push(format!("instance {k}: solver disagreement {off:.3e}"));
                }
            }
            (None, _) => {}
            (_, Err(e)) => failures.push(format!("instance {k}: {e}")),
        }
    }

    writeln!(out, "seed {seed}, {count} instances").expect("stdout write");
    writeln!(out, "cptp validity:      {cptp_pass}/{count}").expect("stdout write");
    writeln!(out, "fixed-point found:  {exist_pass}/{count}").expect("stdout write");
    writeln!(out, "solver agreement:   {agree_pass}/{count}").expect("stdout write");
    if failures.is_empty() {
        if count == 0 {
            writeln!(out, "result: PASS (vacuous, no instances)").expect("stdout write");
        } else {
            writeln!(out, "result: PASS").expect("stdout write");
        }
        EXIT_OK
    } else {
        for f in &failures {
            writeln!(out, "FAIL {f}").expect("stdout write");
        }
        writeln!(out, "result: FAIL ({} failure(s))", failures.len()).expect("stdout write");
        EXIT_PROPERTY
    }
}

// ---------------------------------------------------------------------------
// scenarios listing
// ---------------------------------------------------------------------------

pub fn cmd_scenarios(out: &mut dyn Write) -> i32 {
    for s in scenarios::SCENARIOS {
        writeln!(out, "{:28} {}", s.name, s.summary).expect("stdout write");
    }
    EXIT_OK
}
