use crate::config::{parse_range, parse_vector, BlockArg, Command, EqArg, Grid, Model, SchemeArg, Settings};
use crate::svg::Series;
use anyhow::{anyhow, bail, Context};
use num_complex::Complex64;
use pllsym::acceptance::{self, term_scale};
use pllsym::phasediff::{char_functions_n2, determinant_n3, fictitious_roots};
use pllsym::phasemodel::{equilibrium_case_curves, relative_hopf_scan_on, releq_branches, releq_solve, zero_root_taus};
use pllsym::simulator::{integrate, period_estimate, symmetry_classify, HistorySpec, TRANSIENT_FRACTION};
use pllsym::snmap::{bifurcation_curves, crossings_up_to, region_boundaries, RootBranch, SweepParam};
use pllsym::spectrum::{rightmost_sweep, Scheme};
use pllsym::{build_blocks, normalize, Block, Equilibrium, EquilibriumBranch, LinearizationPoint, ModelKind, NetworkParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Domain errors exit with 1, everything else with 2.
#[derive(Debug)]
pub enum Failure {
    Domain(pllsym::Error),
    Usage(anyhow::Error),
}

impl From<pllsym::Error> for Failure {
    fn from(e: pllsym::Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::F(v) => format!("{v:.16e}"),
            Cell::I(v) => v.to_string(),
            Cell::S(v) => v.clone(),
        }
    }
}

pub enum Body {
    Table { header: Vec<&'static str>, rows: Vec<Vec<Cell>> },
    Text(String),
}

pub struct Chart {
    pub title: String,
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub series: Vec<Series>,
}

pub struct Report {
    pub comments: Vec<String>,
    pub body: Body,
    pub chart: Option<Chart>,
    pub summary: String,
    /// False when the command ran but its verdict is negative.
    pub success: bool,
}

impl Report {
    pub fn csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        match &self.body {
            Body::Table { header, rows } => {
                out.push_str(&header.join(","));
                out.push('\n');
                for r in rows {
                    let cells: Vec<String> = r.iter().map(Cell::render).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
            Body::Text(t) => out.push_str(t),
        }
        out
    }
}

struct Resolved {
    physical: NetworkParams,
    params: NetworkParams,
}

impl Resolved {
    /// Converts a physical delay to the normalized time unit.
    fn time(&self, t: f64) -> f64 {
        t * self.physical.free_freq
    }

    /// Converts a physical rate (`K`, `μ`) to normalized units.
    fn rate(&self, r: f64) -> f64 {
        r / self.physical.free_freq
    }
}

fn resolve(s: &Settings, need_k: bool, need_mu: bool) -> Outcome<Resolved> {
    if need_k && s.coupling.is_none() {
        return Err(anyhow!("--K is required").into());
    }
    if need_mu && s.mu.is_none() {
        return Err(anyhow!("--mu is required").into());
    }
    let physical = NetworkParams {
        n_nodes: s.nodes.unwrap_or(2),
        coupling: s.coupling.unwrap_or(1.0),
        filter_gain: s.mu.unwrap_or(1.0),
        free_freq: s.omega_m.unwrap_or(1.0),
        delay: s.tau.unwrap_or(0.0),
    };
    if !(physical.free_freq > 0.0) {
        return Err(anyhow!("--omega-m must be positive").into());
    }
    let params = normalize(&physical);
    params.validate().map_err(|e| Failure::Usage(anyhow!(e)))?;
    Ok(Resolved { physical, params })
}

fn param_comment(model: &str, p: &NetworkParams) -> String {
    format!(
        "model={model} N={} K={:.16e} mu={:.16e} omega_M={:.16e} tau={:.16e}",
        p.n_nodes, p.coupling, p.filter_gain, p.free_freq, p.delay
    )
}

fn block_of(s: &Settings) -> Block {
    match s.block.unwrap_or(BlockArg::Fix) {
        BlockArg::Fix => Block::Fix,
        BlockArg::Standard => Block::Standard,
    }
}

fn eq_of(s: &Settings) -> EquilibriumBranch {
    match s.equilibrium.unwrap_or(EqArg::Minus) {
        EqArg::Plus => EquilibriumBranch::Plus,
        EqArg::Minus => EquilibriumBranch::Minus,
    }
}

fn root_label(r: RootBranch) -> String {
    match r {
        RootBranch::PlusRoot => "plus".into(),
        RootBranch::MinusRoot => "minus".into(),
    }
}

fn grid(s: &Option<String>, what: &str) -> Outcome<Option<Grid>> {
    match s {
        Some(g) => Ok(Some(Grid::parse(g).with_context(|| format!("--{what}"))?)),
        None => Ok(None),
    }
}

fn range(s: &Option<String>, default: std::ops::RangeInclusive<i64>, what: &str) -> Outcome<std::ops::RangeInclusive<i64>> {
    match s {
        Some(r) => Ok(parse_range(r).with_context(|| format!("--{what}"))?),
        None => Ok(default),
    }
}

pub fn run(command: Command, s: &Settings) -> Outcome<Report> {
    match command {
        Command::Curves => curves(s),
        Command::Rightmost => rightmost(s),
        Command::Snmap => snmap(s),
        Command::Releq => releq(s),
        Command::ZeroRoots => zero_roots(s),
        Command::PhasediffCheck => phasediff_check(s),
        Command::Simulate => simulate(s),
        Command::Verify => verify(),
    }
}

fn curves(s: &Settings) -> Outcome<Report> {
    match s.model.unwrap_or(Model::FullPhase) {
        Model::FullPhase => curves_full_phase(s),
        Model::Phase => curves_phase(s),
        Model::PhaseDifference => Err(pllsym::Error::UnsupportedKind("curves for the phase-difference model".into()).into()),
    }
}

fn curves_full_phase(s: &Settings) -> Outcome<Report> {
    let r = resolve(s, false, false)?;
    let block = block_of(s);
    let branch = eq_of(s);
    let (sweep, values, label) = match (grid(&s.mu_grid, "mu-grid")?, grid(&s.k_grid, "K-grid")?) {
        (Some(g), None) => (SweepParam::FilterGain, g.scaled(r.rate(1.0)).points(), "mu"),
        (None, Some(g)) => (SweepParam::Coupling, g.scaled(r.rate(1.0)).points(), "K"),
        _ => return Err(anyhow!("give exactly one of --mu-grid and --K-grid").into()),
    };
    let n_range = range(&s.n_range, 0..=4, "n")?;
    let rows = bifurcation_curves(ModelKind::FullPhase, &r.params, block, branch, sweep, &values, n_range)?;
    let mut series: BTreeMap<(i64, String), Vec<(f64, f64)>> = BTreeMap::new();
    let table: Vec<Vec<Cell>> = rows
        .iter()
        .map(|row| {
            series
                .entry((row.winding, root_label(row.root_branch)))
                .or_default()
                .push((row.sweep_value, row.tau_star));
            vec![
                Cell::F(row.sweep_value),
                Cell::I(row.winding),
                Cell::S(root_label(row.root_branch)),
                Cell::F(row.omega),
                Cell::F(row.tau_star),
                Cell::I(row.delta_sign as i64),
            ]
        })
        .collect();
    let header = match sweep {
        SweepParam::FilterGain => vec!["mu", "n", "root", "omega", "tau", "delta_sign"],
        SweepParam::Coupling => vec!["K", "n", "root", "omega", "tau", "delta_sign"],
    };
    Ok(Report {
        comments: vec![
            param_comment("full-phase", &r.params),
            format!("block={block} eq={branch} sweep={label}"),
        ],
        summary: format!("{} crossing delays over {} {label} values", table.len(), values.len()),
        body: Body::Table { header, rows: table },
        chart: Some(Chart {
            title: format!("{block} block crossing delays, eq {branch}"),
            x_label: if label == "mu" { "mu" } else { "K" },
            y_label: "tau",
            series: series
                .into_iter()
                .map(|((n, root), points)| Series {
                    label: format!("n={n} {root}"),
                    points,
                })
                .collect(),
        }),
        success: true,
    })
}

fn curves_phase(s: &Settings) -> Outcome<Report> {
    let r = resolve(s, false, false)?;
    let half_turns = s.half_turns.ok_or_else(|| anyhow!("--half-turns is required for phase-model curves"))?;
    let mu = grid(&s.mu_grid, "mu-grid")?
        .ok_or_else(|| anyhow!("--mu-grid is required"))?
        .scaled(r.rate(1.0))
        .points();
    let m_range = range(&s.m_range, 1..=4, "m")?;
    let pts = equilibrium_case_curves(r.params.free_freq, half_turns, m_range, &mu);
    let mut series: BTreeMap<i64, Vec<(f64, f64)>> = BTreeMap::new();
    let rows: Vec<Vec<Cell>> = pts
        .iter()
        .map(|p| {
            series.entry(p.m).or_default().push((p.mu, p.coupling));
            vec![Cell::I(p.m), Cell::F(p.mu), Cell::F(p.coupling), Cell::F(p.residual)]
        })
        .collect();
    Ok(Report {
        comments: vec![
            param_comment("phase", &r.params),
            format!("omega_M*tau = {half_turns}*pi"),
        ],
        summary: if half_turns % 2 == 1 {
            "odd multiple of pi: no imaginary roots".into()
        } else {
            format!("{} curve points", rows.len())
        },
        body: Body::Table {
            header: vec!["m", "mu", "K", "residual"],
            rows,
        },
        chart: Some(Chart {
            title: format!("fix-block imaginary roots at omega_M tau = {half_turns} pi"),
            x_label: "mu",
            y_label: "K",
            series: series
                .into_iter()
                .map(|(m, points)| Series {
                    label: format!("m={m}"),
                    points,
                })
                .collect(),
        }),
        success: true,
    })
}

fn full_phase_block(r: &Resolved, s: &Settings) -> Outcome<(pllsym::QuasiPolynomial, Equilibrium)> {
    let eq = Equilibrium::new(r.params.coupling, eq_of(s))?;
    let bs = build_blocks(ModelKind::FullPhase, &r.params, LinearizationPoint::Equilibrium(eq))?;
    Ok((bs.block(block_of(s)).clone(), eq))
}

fn rightmost(s: &Settings) -> Outcome<Report> {
    if s.model.unwrap_or(Model::FullPhase) != Model::FullPhase {
        return Err(pllsym::Error::UnsupportedKind("rightmost sweeps need the full-phase model".into()).into());
    }
    let r = resolve(s, true, true)?;
    let (p, _) = full_phase_block(&r, s)?;
    let taus = grid(&s.tau_grid, "tau-grid")?
        .unwrap_or(Grid {
            start: 0.0,
            end: 50.0,
            count: 501,
        })
        .scaled(r.time(1.0))
        .points();
    let scheme = match s.scheme.unwrap_or(SchemeArg::Newton) {
        SchemeArg::Newton => Scheme::Newton,
        SchemeArg::Halley => Scheme::Halley,
    };
    let rows = rightmost_sweep(&p, &taus, scheme)?;
    let certified = rows.iter().filter(|x| x.certified).count();
    Ok(Report {
        comments: vec![
            param_comment("full-phase", &r.params),
            format!("block={} eq={} scheme={scheme:?}", block_of(s), eq_of(s)),
        ],
        summary: format!("{} delays, {certified} certified", rows.len()),
        chart: Some(Chart {
            title: format!("rightmost root, {} block", block_of(s)),
            x_label: "tau",
            y_label: "Re lambda",
            series: vec![Series {
                label: "Re lambda".into(),
                points: rows.iter().map(|x| (x.tau, x.lambda.re)).collect(),
            }],
        }),
        body: Body::Table {
            header: vec!["tau", "re", "im", "certified"],
            rows: rows
                .iter()
                .map(|x| vec![Cell::F(x.tau), Cell::F(x.lambda.re), Cell::F(x.lambda.im), Cell::I(x.certified as i64)])
                .collect(),
        },
        success: true,
    })
}

fn snmap(s: &Settings) -> Outcome<Report> {
    let r = resolve(s, true, true)?;
    let block = block_of(s);
    match s.model.unwrap_or(Model::FullPhase) {
        Model::FullPhase => {
            let (p, eq) = full_phase_block(&r, s)?;
            let tau_max = match grid(&s.tau_grid, "tau-grid")? {
                Some(g) => r.time(g.end),
                None => r.time(s.tau.filter(|t| *t > 0.0).unwrap_or(30.0)),
            };
            let found = crossings_up_to(&p, block, tau_max)?;
            let b = region_boundaries(&r.params, &eq, block);
            let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_else(|| "none".into());
            let rows: Vec<Vec<Cell>> = found
                .iter()
                .map(|c| {
                    vec![
                        Cell::F(c.tau_star),
                        Cell::I(c.winding),
                        Cell::S(root_label(c.omega_candidate.root_branch)),
                        Cell::F(c.omega()),
                        Cell::F(c.delta),
                        Cell::I(c.delta_sign as i64),
                    ]
                })
                .collect();
            Ok(Report {
                comments: vec![
                    param_comment("full-phase", &r.params),
                    format!("block={block} eq={} tau_max={tau_max:.16e}", eq_of(s)),
                    format!(
                        "mu_minus={} mu_plus={} mu_b={} K_N={} mu_max={}",
                        opt(b.mu_minus),
                        opt(b.mu_plus),
                        format!("{:.16e}", b.mu_b),
                        format!("{:.16e}", b.k_n),
                        opt(b.mu_max)
                    ),
                ],
                summary: format!("{} crossings below tau = {tau_max}", rows.len()),
                chart: Some(Chart {
                    title: format!("{block} block crossings"),
                    x_label: "tau",
                    y_label: "omega",
                    series: found
                        .iter()
                        .map(|c| Series {
                            label: format!("n={}", c.winding),
                            points: vec![(c.tau_star, c.omega())],
                        })
                        .collect(),
                }),
                body: Body::Table {
                    header: vec!["tau", "n", "root", "omega", "delta", "delta_sign"],
                    rows,
                },
                success: true,
            })
        }
        Model::Phase => {
            let window = grid(&s.tau_grid, "tau-grid")?.unwrap_or(Grid {
                start: 0.0,
                end: 5.0 * PI,
                count: 2001,
            });
            let window = window.scaled(r.time(1.0));
            let resolution = (window.end - window.start) / (window.count - 1) as f64;
            let branches = releq_branches(&r.params, (window.start, window.end), resolution);
            let found = relative_hopf_scan_on(&r.params, block, &branches);
            let rows: Vec<Vec<Cell>> = found
                .iter()
                .map(|c| {
                    vec![
                        Cell::I(c.branch_id.unwrap_or(0) as i64),
                        Cell::F(c.tau_star),
                        Cell::I(c.winding),
                        Cell::S(root_label(c.omega_candidate.root_branch)),
                        Cell::F(c.omega()),
                        Cell::F(c.delta),
                        Cell::I(c.delta_sign as i64),
                    ]
                })
                .collect();
            Ok(Report {
                comments: vec![
                    param_comment("phase", &r.params),
                    format!("block={block} window={:.16e}:{:.16e} branches={}", window.start, window.end, branches.len()),
                ],
                summary: format!("{} crossings on {} branches", rows.len(), branches.len()),
                chart: None,
                body: Body::Table {
                    header: vec!["branch", "tau", "n", "root", "omega", "delta", "delta_sign"],
                    rows,
                },
                success: true,
            })
        }
        Model::PhaseDifference => Err(pllsym::Error::UnsupportedKind("snmap for the phase-difference model".into()).into()),
    }
}

fn releq(s: &Settings) -> Outcome<Report> {
    let r = resolve(s, true, true)?;
    let window = grid(&s.tau_grid, "tau-grid")?
        .unwrap_or(Grid {
            start: 0.0,
            end: 5.0 * PI,
            count: 2001,
        })
        .scaled(r.time(1.0));
    let resolution = (window.end - window.start) / (window.count - 1) as f64;
    let branches = releq_branches(&r.params, (window.start, window.end), resolution);
    let mut rows = Vec::new();
    for b in &branches {
        for &(t, w) in &b.samples {
            rows.push(vec![Cell::I(b.branch_id as i64), Cell::F(t), Cell::F(w)]);
        }
    }
    Ok(Report {
        comments: vec![param_comment("phase", &r.params)],
        summary: format!("{} relative-equilibrium branches", branches.len()),
        chart: Some(Chart {
            title: "relative equilibria".into(),
            x_label: "tau",
            y_label: "Omega_hat",
            series: branches
                .iter()
                .map(|b| Series {
                    label: format!("branch {}", b.branch_id),
                    points: b.samples.clone(),
                })
                .collect(),
        }),
        body: Body::Table {
            header: vec!["branch", "tau", "omega_hat"],
            rows,
        },
        success: true,
    })
}

fn zero_roots(s: &Settings) -> Outcome<Report> {
    let r = resolve(s, true, false)?;
    let n_range = range(&s.n_range, 0..=10, "n")?;
    let events = zero_root_taus(&r.params, n_range);
    Ok(Report {
        comments: vec![param_comment("phase", &r.params)],
        summary: match events.first() {
            Some(e) => format!("{} events, first at tau = {:.12}", events.len(), e.tau_star),
            None => "no events".into(),
        },
        chart: None,
        body: Body::Table {
            header: vec!["n", "tau", "delta0"],
            rows: events
                .iter()
                .map(|e| vec![Cell::I(e.n), Cell::F(e.tau_star), Cell::F(e.delta0)])
                .collect(),
        },
        success: true,
    })
}

fn phasediff_check(s: &Settings) -> Outcome<Report> {
    let r = resolve(s, true, true)?;
    let params = r.params;
    let tau = params.delay;
    let rotation = releq_solve(&params, tau)
        .into_iter()
        .min_by(|a, b| (a - params.free_freq).abs().total_cmp(&(b - params.free_freq).abs()))
        .ok_or(pllsym::Error::NoConvergence { tau })?;
    let c = s.c_const.unwrap_or((rotation - params.free_freq) * tau);
    let samples = s.samples.unwrap_or(100);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed.unwrap_or(0));
    let pm = build_blocks(ModelKind::Phase, &params, LinearizationPoint::Rotation(rotation))?;
    let mut comments = vec![
        param_comment("phase-difference", &params),
        format!("C={c:.16e} Omega_hat={rotation:.16e} seed={}", s.seed.unwrap_or(0)),
    ];
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    let (header, summary) = match params.n_nodes {
        2 => {
            let pd = char_functions_n2(&params, c)?;
            for _ in 0..samples {
                let l = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-6.0..6.0));
                let scale = term_scale(&params, l);
                let d1 = (pd.p1.eval(l) - pm.fix_block.eval(l)).norm() / scale;
                let d2 = (pd.p2.eval(l) - pm.standard_block.eval(l)).norm() / scale;
                worst = worst.max(d1).max(d2);
                rows.push(vec![Cell::F(l.re), Cell::F(l.im), Cell::F(d1), Cell::F(d2)]);
            }
            (
                vec!["lambda_re", "lambda_im", "defect_p1", "defect_p2"],
                format!("max relative block defect {worst:.3e}"),
            )
        }
        3 => {
            let mu = params.filter_gain;
            for _ in 0..samples {
                let l = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-6.0..6.0));
                let u = pm.standard_block.eval(l);
                let expect = (l * l + mu * l).powu(3) * pm.fix_block.eval(l) * u * u;
                let d = (determinant_n3(&params, c, l)? / expect - 1.0).norm();
                worst = worst.max(d);
                rows.push(vec![Cell::F(l.re), Cell::F(l.im), Cell::F(d)]);
            }
            let roots = fictitious_roots(&params, c)?;
            for f in &roots {
                comments.push(format!(
                    "root lambda={:.16e} multiplicity={} fictitious={}",
                    f.lambda.re, f.multiplicity, f.is_fictitious
                ));
            }
            let fict = roots.iter().filter(|f| f.is_fictitious).count();
            (
                vec!["lambda_re", "lambda_im", "defect"],
                format!("max relative factorization defect {worst:.3e}, {fict} fictitious roots"),
            )
        }
        n => return Err(pllsym::Error::UnsupportedKind(format!("phase-difference with N = {n}")).into()),
    };
    Ok(Report {
        comments,
        summary,
        chart: None,
        body: Body::Table { header, rows },
        success: true,
    })
}

fn simulate(s: &Settings) -> Outcome<Report> {
    let r = resolve(s, true, true)?;
    let params = r.params;
    let n = params.n_nodes;
    let (kind, model, base) = match s.model.unwrap_or(Model::FullPhase) {
        Model::FullPhase => {
            let eq = Equilibrium::new(params.coupling, eq_of(s))?;
            (ModelKind::FullPhase, "full-phase", eq.state(n))
        }
        Model::Phase => {
            let w = releq_solve(&params, params.delay)
                .into_iter()
                .min_by(|a, b| (a - 1.0).abs().total_cmp(&(b - 1.0).abs()))
                .ok_or(pllsym::Error::NoConvergence { tau: params.delay })?;
            let mut x = vec![0.0; 2 * n];
            for i in 0..n {
                x[2 * i + 1] = w - params.free_freq;
            }
            (ModelKind::Phase, "phase", x)
        }
        Model::PhaseDifference => {
            return Err(pllsym::Error::UnsupportedKind("simulating the phase-difference model".into()).into())
        }
    };
    let amplitude = s.amplitude.unwrap_or(0.0);
    let history = match &s.direction {
        Some(d) => {
            let dir = parse_vector(d).context("--direction")?;
            if dir.len() != n {
                bail_usage(format!("--direction has {} components, N = {n}", dir.len()))?;
            }
            HistorySpec::perturbed(base, &dir, amplitude)?
        }
        None => HistorySpec::constant(base),
    };
    let tau = params.delay;
    let step = match s.step {
        Some(h) => r.time(h),
        None if tau > 0.0 => tau / 100.0,
        None => 0.01,
    };
    let t_end = r.time(s.t_end.unwrap_or(1000.0));
    let traj = integrate(kind, &params, &history, t_end, step)?;
    let mut text = Vec::new();
    traj.write_csv(&mut text).map_err(|e| Failure::Usage(e.into()))?;
    let summary = match period_estimate(&traj, TRANSIENT_FRACTION) {
        Ok(t) => {
            let class = symmetry_classify(&traj, t, 1e-2);
            format!("period {t:.6}, {} (residual {:.2e})", class.tag, class.residual)
        }
        Err(e) => format!("{} steps, {e}", traj.len() - 1),
    };
    let stride = (traj.len() / 2000).max(1);
    Ok(Report {
        comments: vec![
            param_comment(model, &params),
            format!("step={:.16e} t_end={t_end:.16e} amplitude={amplitude:.16e}", traj.step),
        ],
        summary,
        chart: Some(Chart {
            title: format!("{model} simulation"),
            x_label: "t",
            y_label: "angular velocity",
            series: (0..n)
                .map(|i| Series {
                    label: format!("node {}", i + 1),
                    points: traj
                        .times
                        .iter()
                        .zip(&traj.states)
                        .step_by(stride)
                        .map(|(t, x)| (*t, x[2 * i + 1]))
                        .collect(),
                })
                .collect(),
        }),
        body: Body::Text(String::from_utf8(text).expect("ascii csv")),
        success: true,
    })
}

fn bail_usage(msg: String) -> anyhow::Result<()> {
    bail!(msg)
}

fn verify() -> Outcome<Report> {
    let outcomes = acceptance::run_all();
    let passed = outcomes.iter().filter(|o| o.passed).count();
    for o in &outcomes {
        println!("{o}");
    }
    Ok(Report {
        comments: Vec::new(),
        summary: format!("{passed}/{} criteria pass", outcomes.len()),
        chart: None,
        success: passed == outcomes.len(),
        body: Body::Table {
            header: vec!["id", "title", "passed", "detail"],
            rows: outcomes
                .iter()
                .map(|o| {
                    vec![
                        Cell::I(o.id as i64),
                        Cell::S(o.title.to_string()),
                        Cell::I(o.passed as i64),
                        Cell::S(format!("\"{}\"", o.detail.replace('"', "'"))),
                    ]
                })
                .collect(),
        },
    })
}
