use clap::{Parser, Subcommand, ValueEnum};
use qwave::block_encode::{block_deviation, wave_encoding, wave_layout, BlockEncoding, EncodingKind};
use qwave::circuit::RegisterLayout;
use qwave::config::{Half, RunConfig, ScanAxis};
use qwave::linalg::{linear_fit, vec_norm};
use qwave::measure::ae::{amplitude_estimation, energy_estimate, p_tilde, simplified_prep};
use qwave::measure::gauss::{gaussian_phases, gaussian_qsvt, two_gaussians_demo};
use qwave::measure::power::{absorbed_power, brute_force_d};
use qwave::measure::spectrum::{classical_fft_reference, select_field, spectrum};
use qwave::qsp::{node_residual, PhaseVector, SolveStats};
use qwave::qsvt::{condition_numbers, inverse_phases, inverse_run, record_from_run, InverseSpec, QsvtRun, SolutionRecord};
use qwave::wave::WaveProblem;
use qwave::{Error, Result, C64};
use serde::Serialize;
use serde_json::json;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "qwave", version, about = "QSVT wave-solver emulator with classical cross-checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the config oracle.
    #[arg(long, global = true, value_enum)]
    oracle: Option<OracleArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Dilation,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Kappa,
    Eps,
    Nx,
}

#[derive(Subcommand)]
enum Command {
    /// QSVT solve compared with the direct solve.
    Solve,
    /// Inverse-function phases only.
    Angles,
    /// Sweep κ_qsvt, ε_qsvt or n_x.
    Scan {
        #[arg(long, value_enum)]
        axis: Option<AxisArg>,
    },
    /// QFT wave-number spectrum of E.
    Spectrum,
    /// Field energy by amplitude estimation.
    Energy,
    /// Absorbed power by SWAP tests.
    Power,
    /// Gaussian QSVT and the two-Gaussians demo.
    Gauss,
    /// Block-encoding readback and unitarity.
    VerifyOracle,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Angles => "angles",
            Command::Scan { .. } => "scan",
            Command::Spectrum => "spectrum",
            Command::Energy => "energy",
            Command::Power => "power",
            Command::Gauss => "gauss",
            Command::VerifyOracle => "verify-oracle",
        }
    }
}

struct Out {
    dir: PathBuf,
    header: String,
    hash: String,
    command: &'static str,
}

impl Out {
    fn write(&self, name: &str, body: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), body)?;
        Ok(())
    }

    fn csv(&self, name: &str, body: &str) -> Result<()> {
        self.write(name, &format!("{}\n{body}", self.header))
    }

    fn json(&self, name: &str, result: impl Serialize) -> Result<()> {
        let doc = json!({
            "meta": { "tool": "qwave", "version": env!("CARGO_PKG_VERSION"), "command": self.command, "config_hash": self.hash },
            "result": result,
        });
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
        self.write(name, &(text + "\n"))
    }

    fn plot(&self, name: &str, script: &str) -> Result<()> {
        self.write(name, &format!("{}\n{script}", self.header))
    }
}

struct Solved {
    problem: WaveProblem,
    layout: RegisterLayout,
    enc: BlockEncoding,
    phases: PhaseVector,
    stats: SolveStats,
    run: QsvtRun,
    record: SolutionRecord,
}

fn phases_for(cfg: &RunConfig, p: &WaveProblem) -> Result<(PhaseVector, SolveStats)> {
    let (_, kappa_enc) = condition_numbers(p)?;
    let mut spec = InverseSpec::new(cfg.resolve_kappa(kappa_enc), cfg.eps_qsvt);
    spec.target_max = cfg.target_max;
    let (pv, _, stats) = inverse_phases(&spec)?;
    Ok((pv, stats))
}

fn solve(cfg: &RunConfig) -> Result<Solved> {
    let problem = cfg.problem()?;
    let (phases, stats) = phases_for(cfg, &problem)?;
    let layout = wave_layout(problem.n_x, cfg.oracle, &[])?;
    let enc = wave_encoding(&problem, &layout, cfg.oracle)?;
    let run = inverse_run(&layout, &enc, &phases)?;
    let record = record_from_run(&problem, &enc, &phases, &run)?;
    Ok(Solved { problem, layout, enc, phases, stats, run, record })
}

/// Non-empty when the error is far above the requested tolerance.
fn convergence_warning(rec: &SolutionRecord) -> Option<String> {
    (rec.error.max_rel > 10.0 * rec.eps_qsvt).then(|| {
        format!(
            "relative E error {:.3e} exceeds 10*eps_qsvt; kappa_qsvt/kappa_enc = {:.3} is likely too small",
            rec.error.max_rel,
            rec.kappa_qsvt / rec.kappa_enc
        )
    })
}

fn cmd_solve(cfg: &RunConfig, out: &Out) -> Result<()> {
    let s = solve(cfg)?;
    let warning = convergence_warning(&s.record);
    if let Some(w) = &warning {
        eprintln!("warning: {w}");
    }
    out.csv("solve_fields.csv", &s.record.fields_csv())?;
    out.json("solve_report.json", json!({ "solution": s.record, "phase_solver": s.stats, "warning": warning }))?;
    out.plot(
        "solve.gp",
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'j'\n\
         plot 'solve_fields.csv' using 1:2 with lines title 'Re E (QSVT)', \
         '' using 1:6 with points title 'Re E (direct)'\n",
    )
}

fn cmd_angles(cfg: &RunConfig, out: &Out) -> Result<()> {
    let p = cfg.problem()?;
    let (_, kappa_enc) = condition_numbers(&p)?;
    let mut spec = InverseSpec::new(cfg.resolve_kappa(kappa_enc), cfg.eps_qsvt);
    spec.target_max = cfg.target_max;
    let (pv, series, stats) = inverse_phases(&spec)?;
    out.csv("angles_phases.csv", &pv.to_csv())?;
    out.csv("angles_cheb.csv", &series.to_csv())?;
    out.json(
        "angles_report.json",
        json!({
            "n_pol": pv.degree(),
            "kappa_qsvt": pv.kappa_qsvt,
            "eps_qsvt": pv.eps_qsvt,
            "beta_sc": pv.beta_sc,
            "node_residual": node_residual(&pv, &series),
            "solver": stats,
        }),
    )
}

fn cmd_scan(cfg: &RunConfig, axis: ScanAxis, out: &Out) -> Result<()> {
    if cfg.scan_values.is_empty() {
        return Err(Error::Config("scan needs a non-empty scan_values list".into()));
    }
    let mut csv = String::new();
    let (xs, ys): (Vec<f64>, Vec<f64>);
    let summary = match axis {
        ScanAxis::Kappa => {
            csv.push_str("kappa_qsvt,n_pol,beta_sc,iterations,node_residual\n");
            let mut n_pol = Vec::new();
            for &k in &cfg.scan_values {
                let mut spec = InverseSpec::new(k, cfg.eps_qsvt);
                spec.target_max = cfg.target_max;
                let (pv, series, st) = inverse_phases(&spec)?;
                let _ = writeln!(csv, "{k},{},{:.12e},{},{:.3e}", pv.degree(), pv.beta_sc, st.iterations, node_residual(&pv, &series));
                n_pol.push(pv.degree() as f64);
            }
            xs = cfg.scan_values.iter().map(|v| v.ln()).collect();
            ys = n_pol.iter().map(|v| v.ln()).collect();
            let (a, _, r2) = linear_fit(&xs, &ys)?;
            json!({ "axis": "kappa", "power_law_exponent": a, "r2": r2 })
        }
        ScanAxis::Eps => {
            csv.push_str("eps_qsvt,n_pol,err_max_rel,err_max_abs\n");
            let mut n_pol = Vec::new();
            for &e in &cfg.scan_values {
                let mut c = cfg.clone();
                c.eps_qsvt = e;
                c.validate()?;
                let s = solve(&c)?;
                let _ = writeln!(csv, "{e:e},{},{:.12e},{:.12e}", s.phases.degree(), s.record.error.max_rel, s.record.error.max_abs);
                n_pol.push(s.phases.degree() as f64);
            }
            xs = cfg.scan_values.iter().map(|v| (1.0 / v).ln()).collect();
            ys = n_pol;
            let (a, b, r2) = linear_fit(&xs, &ys)?;
            json!({ "axis": "eps", "n_pol_per_ln_inv_eps": a, "intercept": b, "r2": r2 })
        }
        ScanAxis::Nx => {
            csv.push_str("n_x,N_x,kappa,kappa_enc\n");
            let mut kap = Vec::new();
            for &v in &cfg.scan_values {
                if v.fract() != 0.0 || !(2.0..=10.0).contains(&v) {
                    return Err(Error::Config(format!("n_x scan value {v} is not an integer in 2..=10")));
                }
                let n = v as usize;
                let p = WaveProblem::new(n, cfg.problem()?.omega, cfg.eps0, cfg.eps1)?;
                let (k, ke) = condition_numbers(&p)?;
                let _ = writeln!(csv, "{n},{},{k:.12e},{ke:.12e}", 1usize << n);
                kap.push(k);
            }
            xs = cfg.scan_values.iter().map(|v| v * std::f64::consts::LN_2).collect();
            ys = kap.iter().map(|v| v.ln()).collect();
            let (a, _, r2) = linear_fit(&xs, &ys)?;
            json!({ "axis": "nx", "kappa_vs_nx_exponent": a, "r2": r2 })
        }
    };
    let name = match axis {
        ScanAxis::Kappa => "kappa",
        ScanAxis::Eps => "eps",
        ScanAxis::Nx => "nx",
    };
    out.csv(&format!("scan_{name}.csv"), &csv)?;
    out.json(&format!("scan_{name}.json"), summary)?;
    let logx = if matches!(axis, ScanAxis::Eps) { "set logscale x\n" } else { "set logscale xy\n" };
    out.plot(
        &format!("scan_{name}.gp"),
        &format!("set datafile separator ','\nset key autotitle columnhead\n{logx}plot 'scan_{name}.csv' using 1:2 with linespoints\n"),
    )
}

fn cmd_spectrum(cfg: &RunConfig, out: &Out) -> Result<()> {
    let s = solve(cfg)?;
    let dx = s.problem.dx();
    let q = spectrum(&s.run.state, cfg.half, dx)?;
    let dq = classical_fft_reference(&select_field(&s.record.quantum.e, cfg.half), dx)?;
    let dc = classical_fft_reference(&select_field(&s.record.classical.e, cfg.half), dx)?;
    let mut csv = String::from("j,k,prob_qft,prob_dft_solver,prob_dft_direct\n");
    for j in 0..q.k.len() {
        let _ = writeln!(csv, "{j},{:.12e},{:.12e},{:.12e},{:.12e}", q.k[j], q.prob[j], dq.prob[j], dc.prob[j]);
    }
    let top: Vec<_> = q.ranked_bins().into_iter().take(4).map(|j| json!({ "j": j, "k": q.k[j], "prob": q.prob[j] })).collect();
    let top_pos: Vec<_> =
        q.ranked_bins().into_iter().filter(|&j| q.k[j] > 0.0).take(2).map(|j| json!({ "j": j, "k": q.k[j] })).collect();
    out.csv("spectrum.csv", &csv)?;
    out.json(
        "spectrum.json",
        json!({
            "half": cfg.half,
            "k_x0": s.problem.omega,
            "top_bins": top,
            "top_positive_k_bins": top_pos,
            "selection_probability": q.selection_probability,
            "max_dev_vs_dft_of_solver_field": q.max_deviation(&dq),
            "max_dev_vs_dft_of_direct_field": q.max_deviation(&dc),
            "solution_error": s.record.error,
        }),
    )?;
    out.plot(
        "spectrum.gp",
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'k'\n\
         plot 'spectrum.csv' using 2:3 with boxes title 'QFT', '' using 2:5 with points title 'DFT (direct)'\n",
    )
}

fn half_conditions(layout: &RegisterLayout, half: Half) -> Result<(Vec<(usize, bool)>, usize)> {
    let rj = layout.qubits("r_j")?;
    let n = 1usize << rj.len();
    Ok(match half {
        Half::Full => (vec![], n),
        Half::Left => (vec![(*rj.last().unwrap(), false)], n / 2),
        Half::Right => (vec![(*rj.last().unwrap(), true)], n / 2),
    })
}

fn cmd_energy(cfg: &RunConfig, out: &Out) -> Result<()> {
    let s = solve(cfg)?;
    let (half, n_area) = half_conditions(&s.layout, cfg.half)?;
    let mut conds = s.run.success.clone();
    conds.push((s.layout.qubit("r_d")?, false));
    conds.extend(half);
    let p_m1 = s.run.state.probability(&conds);
    let (prep, ry) = simplified_prep(p_m1.min(1.0), cfg.n_y)?;
    let mut ae = amplitude_estimation(&prep, &ry)?;
    let mut counts = vec![0usize; ae.n_aa()];
    if cfg.shots > 0 {
        let seed = cfg.seed.ok_or_else(|| Error::Config("sampling needs a seed".into()))?;
        for i in ae.sample(cfg.shots, seed)? {
            counts[i] += 1;
        }
        let mode = (0..counts.len()).fold(0, |b, i| if counts[i] > counts[b] { i } else { b });
        ae.i_y = mode;
        ae.p_tilde = p_tilde(mode, ae.n_aa());
        ae.delta = qwave::measure::ae::ae_delta(ae.p_tilde, ae.n_aa());
    }
    let kappa_eff = s.phases.kappa_qsvt / s.enc.nu;
    let (e_q, delta) = energy_estimate(&ae, s.phases.beta_sc, kappa_eff, n_area)?;
    let sel: Vec<C64> = select_field(&s.record.classical.e, cfg.half);
    let e_c = sel.iter().map(|v| v.norm_sqr()).sum::<f64>() / n_area as f64;
    let mut csv = String::from("i_y,p_tilde,prob,count\n");
    for (i, pr) in ae.distribution.iter().enumerate() {
        let _ = writeln!(csv, "{i},{:.12e},{pr:.12e},{}", p_tilde(i, ae.n_aa()), counts[i]);
    }
    out.csv("energy_ae.csv", &csv)?;
    out.json(
        "energy.json",
        json!({
            "half": cfg.half,
            "n_area": n_area,
            "p_m1": p_m1,
            "ae": { "n_y": ae.n_y, "i_y": ae.i_y, "p_tilde": ae.p_tilde, "delta": ae.delta },
            "shots": cfg.shots,
            "energy_estimate": e_q,
            "energy_half_width": delta,
            "energy_direct": e_c,
            "within_bound": (e_q - e_c).abs() <= delta,
        }),
    )
}

fn cmd_power(cfg: &RunConfig, out: &Out) -> Result<()> {
    let w = cfg.window();
    w.validate(cfg.n_x)?;
    let s = solve(cfg)?;
    let (gpv, _) = gaussian_phases(cfg.mu, cfg.beta_gauss, w.x_c(), cfg.eps_qsvt)?;
    let r = absorbed_power(&s.record.quantum.e, &w, &gpv, cfg.mu)?;
    let g = w.gaussian_weights(cfg.mu, cfg.beta_gauss);
    let ec = &s.record.classical.e;
    let nc = vec_norm(ec);
    let ec: Vec<C64> = ec.iter().map(|v| v / nc).collect();
    let d_direct = brute_force_d(&ec, &w, &g).norm();
    let tolerance = 5.0 * (cfg.eps_qsvt + s.record.error.max_rel);
    let mut csv = String::from("k,abs_e_solver,abs_e_direct\n");
    let nq = vec_norm(&s.record.quantum.e);
    for k in 0..ec.len() {
        let _ = writeln!(csv, "{k},{:.12e},{:.12e}", s.record.quantum.e[k].norm() / nq, ec[k].norm());
    }
    out.csv("power_fields.csv", &csv)?;
    out.json(
        "power.json",
        json!({
            "result": r,
            "gauss_n_pol": gpv.degree(),
            "d_direct_fields": d_direct,
            "tolerance": tolerance,
            "within_tolerance": (r.d_abs - d_direct).abs() <= tolerance,
        }),
    )
}

fn cmd_gauss(cfg: &RunConfig, out: &Out) -> Result<()> {
    let r = gaussian_qsvt(cfg.n_x, cfg.mu, cfg.beta_gauss, cfg.x_c, cfg.eps_qsvt)?;
    let mut csv = String::from("j,x,value,expected\n");
    for j in 0..r.x.len() {
        let _ = writeln!(csv, "{j},{:.12e},{:.12e},{:.12e}", r.x[j], r.values[j], r.expected[j]);
    }
    out.csv("gauss_profile.csv", &csv)?;
    let two = if cfg.n_x >= 3 {
        let t = two_gaussians_demo(cfg.n_x, cfg.mu, cfg.beta_gauss, cfg.eps_qsvt, cfg.n_y)?;
        json!({
            "p_m1": t.p_m1,
            "p_m1_direct": t.p_m1_classical,
            "ae": { "n_y": t.ae.n_y, "i_y": t.ae.i_y, "p_tilde": t.ae.p_tilde, "delta": t.ae.delta },
            "s_g": t.s_g_quantum,
            "s_g_direct": t.s_g_classical,
            "within_bound": t.within_bound,
            "lobe_widths": t.lobe_widths,
        })
    } else {
        serde_json::Value::Null
    };
    out.json(
        "gauss.json",
        json!({ "n_pol": r.n_pol, "max_deviation": r.max_deviation, "p0": r.p0, "two_gaussians": two }),
    )?;
    out.plot(
        "gauss.gp",
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'x'\n\
         plot 'gauss_profile.csv' using 2:3 with points title 'QSVT', '' using 2:4 with lines title 'direct'\n",
    )
}

fn cmd_verify_oracle(cfg: &RunConfig, out: &Out) -> Result<()> {
    let p = cfg.problem()?;
    let layout = wave_layout(p.n_x, cfg.oracle, &[])?;
    let enc = wave_encoding(&p, &layout, cfg.oracle)?;
    out.json(
        "verify_oracle.json",
        json!({
            "oracle": enc.kind,
            "nu": enc.nu,
            "rescale_exponent": enc.rescale_exponent,
            "qubits": layout.n_qubits(),
            "block_deviation": block_deviation(&enc, &p)?,
            "unitarity_residual": enc.unitarity_residual()?,
        }),
    )
}

fn run(cli: Cli) -> Result<()> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(s) = cli.seed {
        cfg.seed = Some(s);
    }
    if let Some(o) = cli.oracle {
        cfg.oracle = match o {
            OracleArg::Dilation => EncodingKind::Dilation,
            OracleArg::Structured => EncodingKind::Structured,
        };
    }
    cfg.validate()?;
    std::fs::create_dir_all(&cli.out)?;
    let command = cli.command.name();
    let out = Out { dir: cli.out.clone(), header: cfg.header(command), hash: cfg.hash(), command };
    match cli.command {
        Command::Solve => cmd_solve(&cfg, &out),
        Command::Angles => cmd_angles(&cfg, &out),
        Command::Scan { axis } => {
            let axis = match axis {
                Some(AxisArg::Kappa) => ScanAxis::Kappa,
                Some(AxisArg::Eps) => ScanAxis::Eps,
                Some(AxisArg::Nx) => ScanAxis::Nx,
                None => cfg.scan_axis.ok_or_else(|| Error::Config("scan needs --axis or scan_axis".into()))?,
            };
            cmd_scan(&cfg, axis, &out)
        }
        Command::Spectrum => cmd_spectrum(&cfg, &out),
        Command::Energy => cmd_energy(&cfg, &out),
        Command::Power => cmd_power(&cfg, &out),
        Command::Gauss => cmd_gauss(&cfg, &out),
        Command::VerifyOracle => cmd_verify_oracle(&cfg, &out),
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
