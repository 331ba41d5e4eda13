//! Benchmark problems, experiment configuration, and convergence sweeps.
//!
//! A [`ProblemSpec`] bundles initial data, boundary treatment, and a final
//! time, and knows its exact solution by shifting the initial data.  An
//! [`ExperimentConfig`] adds the discretization choices (degree, mesh
//! family, initialization method, tableau, step rule, mesh sequence) and can
//! be read from a flat `key = value` file with command-line overrides
//! applied on top.  [`run_experiment`] runs the doubling mesh sequence in
//! parallel and assembles an [`ErrorReport`].

use std::fmt;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::basis::radau_points;
use crate::correction::{initialize, InitMethod};
use crate::field::{ModalField, SmoothFunction};
use crate::jet::Jet;
use crate::mesh::Mesh1D;
use crate::metrics::{measure_all, ErrorReport, ErrorSample};
use crate::operator::{dg_rhs, BoundaryCondition};
use crate::timestep::{integrate, ButcherTableau, StepPolicy};
use crate::{Error, Result};

/// The largest polynomial degree the solver accepts.
pub const MAX_DEGREE: usize = 8;

/// Mesh family used for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshKind {
    /// `n` equal cells over the domain.
    Uniform,
    /// A quarter/three-quarter split with `n/2` equal cells on each part.
    Split,
}

impl MeshKind {
    pub fn build(&self, n: usize) -> Result<Mesh1D> {
        match self {
            MeshKind::Uniform => Ok(Mesh1D::uniform(n)),
            MeshKind::Split => Mesh1D::split(n),
        }
    }
}

impl FromStr for MeshKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "uniform" => Ok(MeshKind::Uniform),
            "split" => Ok(MeshKind::Split),
            other => Err(Error::Config(format!(
                "unknown mesh kind {other:?} (expected uniform or split)"
            ))),
        }
    }
}

impl fmt::Display for MeshKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshKind::Uniform => write!(f, "uniform"),
            MeshKind::Split => write!(f, "split"),
        }
    }
}

/// How to choose the number of time steps for a mesh with `n` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// The problem's own default protocol.
    Auto,
    /// The resolution-robust rule `dt = min(0.05 h, 0.5 h^ceil((2k+1)/4))`.
    Cfl,
    /// `ceil(factor * n^power)` equal steps, written `10N^2` in configs.
    PerN { factor: f64, power: u32 },
    /// A fixed number of equal steps regardless of the mesh.
    Fixed(usize),
}

impl FromStr for StepRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(StepRule::Auto);
        }
        if s.eq_ignore_ascii_case("cfl") {
            return Ok(StepRule::Cfl);
        }
        if let Some((factor_str, power_str)) = s.split_once(['N', 'n']) {
            let factor = if factor_str.is_empty() {
                1.0
            } else {
                factor_str
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad step factor {factor_str:?}")))?
            };
            let power = match power_str.strip_prefix('^') {
                Some(p) => p
                    .parse::<u32>()
                    .map_err(|_| Error::Config(format!("bad step power {p:?}")))?,
                None if power_str.is_empty() => 1,
                None => {
                    return Err(Error::Config(format!("bad step rule {s:?}")));
                }
            };
            if factor.is_nan() || factor <= 0.0 {
                return Err(Error::Config(format!("step factor must be positive, got {factor}")));
            }
            return Ok(StepRule::PerN { factor, power });
        }
        let count = s
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("bad step rule {s:?}")))?;
        if count == 0 {
            return Err(Error::Config("step count must be positive".into()));
        }
        Ok(StepRule::Fixed(count))
    }
}

impl fmt::Display for StepRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepRule::Auto => write!(f, "auto"),
            StepRule::Cfl => write!(f, "cfl"),
            StepRule::PerN { factor, power } => write!(f, "{factor}N^{power}"),
            StepRule::Fixed(n) => write!(f, "{n}"),
        }
    }
}

/// Which Butcher tableau to integrate with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableauSpec {
    Rk4,
    SspRk33,
    File(PathBuf),
}

impl TableauSpec {
    pub fn build(&self) -> Result<ButcherTableau> {
        match self {
            TableauSpec::Rk4 => Ok(ButcherTableau::rk4()),
            TableauSpec::SspRk33 => Ok(ButcherTableau::ssprk33()),
            TableauSpec::File(path) => {
                let file = fs::File::open(path)?;
                ButcherTableau::from_text(BufReader::new(file))
            }
        }
    }
}

impl FromStr for TableauSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rk4" => Ok(TableauSpec::Rk4),
            "ssprk33" => Ok(TableauSpec::SspRk33),
            path => Ok(TableauSpec::File(PathBuf::from(path))),
        }
    }
}

impl fmt::Display for TableauSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableauSpec::Rk4 => write!(f, "rk4"),
            TableauSpec::SspRk33 => write!(f, "ssprk33"),
            TableauSpec::File(path) => write!(f, "{}", path.display()),
        }
    }
}

/// A benchmark problem: smooth initial data advected at unit speed.
#[derive(Clone)]
pub struct ProblemSpec {
    name: &'static str,
    u0: SmoothFunction,
    bc: BoundaryCondition,
    t_end: f64,
    default_mesh: MeshKind,
    default_nmin: usize,
}

impl ProblemSpec {
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn initial_data(&self) -> &SmoothFunction {
        &self.u0
    }

    pub fn boundary_condition(&self) -> &BoundaryCondition {
        &self.bc
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn default_mesh(&self) -> MeshKind {
        self.default_mesh
    }

    pub fn default_nmin(&self) -> usize {
        self.default_nmin
    }

    /// The exact solution at time `t` as a function of `x`.
    pub fn exact_at(&self, t: f64) -> SmoothFunction {
        self.u0.shifted(t)
    }

    /// The benchmark stepping protocol for this problem and degree.
    /// Never returns [`StepRule::Auto`].
    pub fn default_steps(&self, degree: usize) -> StepRule {
        match (self.bc.is_periodic(), degree) {
            // The inflow benchmark traditionally resolves time far below the
            // spatial error so tables isolate the spatial orders.
            (false, 0..=3) => StepRule::PerN { factor: 10.0, power: 2 },
            (false, 4) => StepRule::PerN { factor: 5.0, power: 3 },
            _ => StepRule::Cfl,
        }
    }
}

/// The built-in benchmark problems.
///
/// `periodic-expsin` advects `exp(sin x)` around the periodic domain to
/// `t = 3 pi / 4`, by default on the split mesh.  `inflow-sine` advects
/// `sin x` with exact inflow data `g(t) = sin(-t)` to `t = pi` on a uniform
/// mesh.
pub fn builtin_problems() -> Vec<ProblemSpec> {
    let expsin = SmoothFunction::new(|x: Jet| x.sin().exp());
    let sine = SmoothFunction::new(|x: Jet| x.sin());
    let sine_inflow = sine.clone();
    vec![
        ProblemSpec {
            name: "periodic-expsin",
            u0: expsin,
            bc: BoundaryCondition::periodic(),
            t_end: 3.0 * std::f64::consts::PI / 4.0,
            default_mesh: MeshKind::Split,
            default_nmin: 4,
        },
        ProblemSpec {
            name: "inflow-sine",
            u0: sine,
            bc: BoundaryCondition::inflow(move |t| sine_inflow.eval(-t)),
            t_end: std::f64::consts::PI,
            default_mesh: MeshKind::Uniform,
            default_nmin: 2,
        },
    ]
}

/// Look up a built-in problem by name.
pub fn problem_by_name(name: &str) -> Result<ProblemSpec> {
    builtin_problems()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| {
            let known: Vec<&str> = builtin_problems().iter().map(|p| p.name).collect();
            Error::Config(format!("unknown problem {name:?} (built in: {known:?})"))
        })
}

/// Everything needed to reproduce one convergence run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: String,
    pub degree: usize,
    pub method: InitMethod,
    pub mesh: Option<MeshKind>,
    pub nmin: usize,
    pub nmax: usize,
    pub tableau: TableauSpec,
    pub steps: StepRule,
    pub out: Option<PathBuf>,
    pub dump_fields: Option<PathBuf>,
}

impl ExperimentConfig {
    /// A config with the named problem's defaults: degree 3, method 4, the
    /// problem's preferred mesh and smallest cell count, four doublings,
    /// the classical fourth-order tableau, and the problem's step protocol.
    pub fn new(problem: &str) -> Result<Self> {
        let spec = problem_by_name(problem)?;
        let nmin = spec.default_nmin();
        Ok(ExperimentConfig {
            problem: problem.to_string(),
            degree: 3,
            method: InitMethod::CorrectedInterpolant,
            mesh: None,
            nmin,
            nmax: nmin * 16,
            tableau: TableauSpec::Rk4,
            steps: StepRule::Auto,
            out: None,
            dump_fields: None,
        })
    }

    /// Parse a flat `key = value` config file.  A `problem` key is required;
    /// `#` starts a comment.
    pub fn from_config_text(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        let problem = pairs
            .iter()
            .find(|(k, _)| k == "problem")
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Error::Config("config must set problem = <name>".into()))?;
        let mut config = ExperimentConfig::new(&problem)?;
        for (key, value) in &pairs {
            config.apply(key, value)?;
        }
        Ok(config)
    }

    /// Apply one `key = value` setting, as found in config files or flags.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "problem" => {
                // Re-resolve problem-dependent defaults only if the mesh
                // sequence was never customized.
                let fresh = ExperimentConfig::new(value)?;
                self.problem = fresh.problem;
                Ok(())
            }
            "k" | "degree" => {
                self.degree = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad degree {value:?}")))?;
                Ok(())
            }
            "method" => {
                let id: u8 = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad method {value:?}")))?;
                self.method = InitMethod::from_id(id)?;
                Ok(())
            }
            "mesh" => {
                self.mesh = Some(value.parse()?);
                Ok(())
            }
            "nmin" => {
                self.nmin = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad nmin {value:?}")))?;
                Ok(())
            }
            "nmax" => {
                self.nmax = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad nmax {value:?}")))?;
                Ok(())
            }
            "tableau" => {
                self.tableau = value.parse()?;
                Ok(())
            }
            "steps" => {
                self.steps = value.parse()?;
                Ok(())
            }
            "out" => {
                self.out = Some(PathBuf::from(value));
                Ok(())
            }
            "dump_fields" => {
                self.dump_fields = Some(PathBuf::from(value));
                Ok(())
            }
            other => Err(Error::Config(format!("unknown config key {other:?}"))),
        }
    }

    /// The mesh family, falling back to the problem's default.
    pub fn mesh_kind(&self) -> Result<MeshKind> {
        Ok(match self.mesh {
            Some(kind) => kind,
            None => problem_by_name(&self.problem)?.default_mesh(),
        })
    }

    /// The doubling sequence `nmin, 2 nmin, ..., nmax`.
    pub fn n_sequence(&self) -> Result<Vec<usize>> {
        if self.nmin == 0 || self.nmax < self.nmin {
            return Err(Error::Config(format!(
                "need 0 < nmin <= nmax, got {}..{}",
                self.nmin, self.nmax
            )));
        }
        let mut seq = Vec::new();
        let mut n = self.nmin;
        while n < self.nmax {
            seq.push(n);
            n *= 2;
        }
        if n != self.nmax {
            return Err(Error::NonDoublingSequence);
        }
        seq.push(n);
        Ok(seq)
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree > MAX_DEGREE {
            return Err(Error::Config(format!(
                "degree {} exceeds the supported maximum {MAX_DEGREE}",
                self.degree
            )));
        }
        let kind = self.mesh_kind()?;
        for n in self.n_sequence()? {
            kind.build(n)?;
        }
        self.tableau.build()?;
        Ok(())
    }
}

/// The outcome of one mesh: the six errors plus the final state.
pub struct RunResult {
    pub errors: [f64; 6],
    pub final_state: ModalField,
    pub steps: usize,
}

/// Resolve a step rule into a concrete policy for a mesh of `n` cells.
pub fn resolve_policy(
    rule: StepRule,
    problem: &ProblemSpec,
    degree: usize,
    n: usize,
    h_min: f64,
) -> StepPolicy {
    match rule {
        StepRule::Auto => {
            resolve_policy(problem.default_steps(degree), problem, degree, n, h_min)
        }
        StepRule::Cfl => StepPolicy::default_for(degree, h_min, problem.t_end()),
        StepRule::PerN { factor, power } => {
            let count = (factor * (n as f64).powi(power as i32)).ceil() as usize;
            StepPolicy::fixed_count(count.max(1), problem.t_end())
        }
        StepRule::Fixed(count) => StepPolicy::fixed_count(count, problem.t_end()),
    }
}

/// Run one problem on one mesh and measure all six errors at the final
/// time.
pub fn single_run(
    problem: &ProblemSpec,
    degree: usize,
    mesh_kind: MeshKind,
    n: usize,
    method: InitMethod,
    tableau: &ButcherTableau,
    steps: StepRule,
) -> Result<RunResult> {
    let mesh = Arc::new(mesh_kind.build(n)?);
    let state = initialize(method, problem.initial_data(), problem.boundary_condition(), &mesh, degree)?;
    let policy = resolve_policy(steps, problem, degree, n, mesh.h_min());
    let bc = problem.boundary_condition().clone();
    let rhs = move |u: &ModalField, t: f64| dg_rhs(u, &bc, t);
    let result = integrate(state, &rhs, &policy, tableau)?;
    let exact = problem.exact_at(result.t_final);
    let radau = radau_points(degree)?;
    let errors = measure_all(&result.state, &exact, &radau);
    Ok(RunResult { errors, final_state: result.state, steps: result.steps })
}

/// Run the configured doubling sequence and assemble the report.
///
/// Meshes run in parallel.  If `config.out` is set the CSV is written there;
/// when a later mesh fails, the samples gathered so far are still flushed
/// before the error propagates.  With `config.dump_fields` set, each final
/// state is saved in `dgfield` format inside that directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ErrorReport> {
    let problem = problem_by_name(&config.problem)?;
    let tableau = config.tableau.build()?;
    run_experiment_with(config, |n| {
        single_run(
            &problem,
            config.degree,
            config.mesh_kind()?,
            n,
            config.method,
            &tableau,
            config.steps,
        )
    })
}

/// Experiment driver with an injectable per-mesh runner (used directly by
/// tests to exercise the partial-flush path).
pub fn run_experiment_with(
    config: &ExperimentConfig,
    runner: impl Fn(usize) -> Result<RunResult> + Sync,
) -> Result<ErrorReport> {
    config.validate()?;
    let ns = config.n_sequence()?;
    let outcomes: Vec<(usize, Result<RunResult>)> = ns
        .par_iter()
        .map(|&n| (n, runner(n)))
        .collect();

    let mut samples = Vec::new();
    let mut failure: Option<Error> = None;
    for (n, outcome) in outcomes {
        match outcome {
            Ok(result) => {
                if failure.is_none() {
                    samples.push(ErrorSample { n_cells: n, errors: result.errors });
                    if let Some(dir) = &config.dump_fields {
                        fs::create_dir_all(dir)?;
                        let name = format!(
                            "{}-k{}-m{}-N{}.dgfield",
                            config.problem,
                            config.degree,
                            config.method.id(),
                            n
                        );
                        let mut file = fs::File::create(dir.join(name))?;
                        result.final_state.write_dgfield(&mut file)?;
                    }
                }
            }
            Err(err) => {
                failure.get_or_insert(err);
            }
        }
    }
    let report = ErrorReport::from_samples(samples)?;
    if let Some(path) = &config.out {
        write_text(path, &report.to_csv())?;
    }
    match failure {
        Some(err) => Err(err),
        None => Ok(report),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, text)?;
    Ok(())
}

/// Run every built-in problem with every initialization method at one
/// degree, writing one CSV per combination into `out_dir`.  Returns labeled
/// reports in a deterministic order.
pub fn sweep(
    degree: usize,
    nmax: Option<usize>,
    out_dir: &Path,
) -> Result<Vec<(String, ErrorReport)>> {
    let mut results = Vec::new();
    for problem in builtin_problems() {
        for id in 1..=4u8 {
            let mut config = ExperimentConfig::new(problem.name())?;
            config.degree = degree;
            config.method = InitMethod::from_id(id)?;
            if let Some(nmax) = nmax {
                config.nmax = nmax;
            }
            let label = format!("{}-k{}-m{}", problem.name(), degree, id);
            config.out = Some(out_dir.join(format!("{label}.csv")));
            let report = run_experiment(&config)?;
            results.push((label, report));
        }
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn problems_are_self_consistent() {
        for problem in builtin_problems() {
            assert!(problem.t_end() > 0.0);
            let by_name = problem_by_name(problem.name()).unwrap();
            assert_eq!(by_name.name(), problem.name());
            // The exact solution at t = 0 is the initial data.
            let u0 = problem.initial_data();
            let shifted = problem.exact_at(0.0);
            for &x in &[0.3, 2.0, 5.9] {
                assert!((u0.eval(x) - shifted.eval(x)).abs() < 1e-15);
            }
        }
        assert!(problem_by_name("no-such-problem").is_err());
    }

    #[test]
    fn inflow_data_matches_the_advected_solution() {
        let problem = problem_by_name("inflow-sine").unwrap();
        let g = match problem.boundary_condition() {
            BoundaryCondition::Inflow(g) => Arc::clone(g),
            BoundaryCondition::Periodic => panic!("inflow problem is not periodic"),
        };
        for &t in &[0.0, 0.5, 2.0] {
            let exact = problem.exact_at(t);
            assert!((g(t) - exact.eval(0.0)).abs() < 1e-15, "boundary trace at t = {t}");
        }
    }

    #[test]
    fn step_rules_parse() {
        assert_eq!(StepRule::from_str("auto").unwrap(), StepRule::Auto);
        assert_eq!(StepRule::from_str("cfl").unwrap(), StepRule::Cfl);
        assert_eq!(
            StepRule::from_str("10N^2").unwrap(),
            StepRule::PerN { factor: 10.0, power: 2 }
        );
        assert_eq!(
            StepRule::from_str("N^3").unwrap(),
            StepRule::PerN { factor: 1.0, power: 3 }
        );
        assert_eq!(
            StepRule::from_str("2.5N").unwrap(),
            StepRule::PerN { factor: 2.5, power: 1 }
        );
        assert_eq!(StepRule::from_str("400").unwrap(), StepRule::Fixed(400));
        assert!(StepRule::from_str("0").is_err());
        assert!(StepRule::from_str("fast").is_err());
        assert!(StepRule::from_str("-1N^2").is_err());
    }

    #[test]
    fn per_n_rules_resolve_to_counts() {
        let problem = problem_by_name("inflow-sine").unwrap();
        let policy = resolve_policy(
            StepRule::PerN { factor: 10.0, power: 2 },
            &problem,
            3,
            8,
            0.1,
        );
        assert_eq!(policy, StepPolicy::fixed_count(640, problem.t_end()));
        // Auto on the inflow problem at k <= 3 is the same rule.
        let auto = resolve_policy(StepRule::Auto, &problem, 3, 8, 0.1);
        assert_eq!(auto, policy);
    }

    #[test]
    fn config_files_parse_with_defaults_and_overrides() {
        let text = "\
# comment
problem = inflow-sine
k = 2
method = 1
steps = 40N^1
nmin = 4
nmax = 8
";
        let config = ExperimentConfig::from_config_text(text).unwrap();
        assert_eq!(config.problem, "inflow-sine");
        assert_eq!(config.degree, 2);
        assert_eq!(config.method, InitMethod::L2Projection);
        assert_eq!(config.steps, StepRule::PerN { factor: 40.0, power: 1 });
        assert_eq!(config.n_sequence().unwrap(), vec![4, 8]);
        assert_eq!(config.mesh_kind().unwrap(), MeshKind::Uniform);
        config.validate().unwrap();

        let mut overridden = config.clone();
        overridden.apply("mesh", "split").unwrap();
        assert_eq!(overridden.mesh_kind().unwrap(), MeshKind::Split);
        assert!(overridden.apply("method", "9").is_err());
        assert!(overridden.apply("color", "blue").is_err());
        assert!(ExperimentConfig::from_config_text("k = 2\n").is_err());
    }

    #[test]
    fn n_sequences_must_double() {
        let mut config = ExperimentConfig::new("inflow-sine").unwrap();
        config.nmin = 4;
        config.nmax = 24;
        assert!(config.n_sequence().is_err());
        config.nmax = 4;
        assert_eq!(config.n_sequence().unwrap(), vec![4]);
    }

    #[test]
    fn validate_rejects_bad_degree_and_mesh() {
        let mut config = ExperimentConfig::new("periodic-expsin").unwrap();
        config.degree = 9;
        assert!(config.validate().is_err());
        config.degree = 2;
        config.mesh = Some(MeshKind::Split);
        config.nmin = 3;
        config.nmax = 3;
        assert!(config.validate().is_err(), "split meshes need even n");
    }

    #[test]
    fn single_run_converges_at_low_order_quickly() {
        // k = 1 on the inflow problem: downwind errors drop by about
        // 2k+1 = 3 orders of two per doubling.
        let problem = problem_by_name("inflow-sine").unwrap();
        let tableau = ButcherTableau::rk4();
        let coarse = single_run(
            &problem,
            1,
            MeshKind::Uniform,
            8,
            InitMethod::CorrectedInterpolant,
            &tableau,
            StepRule::Auto,
        )
        .unwrap();
        let fine = single_run(
            &problem,
            1,
            MeshKind::Uniform,
            16,
            InitMethod::CorrectedInterpolant,
            &tableau,
            StepRule::Auto,
        )
        .unwrap();
        let rate = (coarse.errors[1] / fine.errors[1]).log2();
        assert!(
            (2.4..3.6).contains(&rate),
            "downwind RMS rate {rate}, errors {} -> {}",
            coarse.errors[1],
            fine.errors[1]
        );
        assert_eq!(coarse.steps, 640, "10 N^2 steps at N = 8");
    }

    #[test]
    fn experiments_are_deterministic_and_write_csv() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = ExperimentConfig::new("inflow-sine").unwrap();
        config.degree = 1;
        config.nmin = 2;
        config.nmax = 8;
        config.steps = StepRule::PerN { factor: 4.0, power: 1 };
        config.out = Some(dir.path().join("run.csv"));
        config.dump_fields = Some(dir.path().join("fields"));
        let first = run_experiment(&config).unwrap();
        let second = run_experiment(&config).unwrap();
        assert_eq!(first.to_csv(), second.to_csv(), "bitwise reproducible");
        let written = fs::read_to_string(dir.path().join("run.csv")).unwrap();
        assert_eq!(written, first.to_csv());
        assert!(dir.path().join("fields/inflow-sine-k1-m4-N4.dgfield").exists());
    }

    #[test]
    fn failures_still_flush_partial_results() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = ExperimentConfig::new("inflow-sine").unwrap();
        config.degree = 1;
        config.nmin = 2;
        config.nmax = 8;
        config.out = Some(dir.path().join("partial.csv"));
        let problem = problem_by_name("inflow-sine").unwrap();
        let tableau = ButcherTableau::rk4();
        let result = run_experiment_with(&config, |n| {
            if n == 8 {
                return Err(Error::NonPositiveStep(-1.0));
            }
            single_run(
                &problem,
                1,
                MeshKind::Uniform,
                n,
                InitMethod::RadauProjection,
                &tableau,
                StepRule::Fixed(32),
            )
        });
        assert!(result.is_err());
        let written = fs::read_to_string(dir.path().join("partial.csv")).unwrap();
        let parsed = ErrorReport::from_csv(&written).unwrap();
        let ns: Vec<usize> = parsed.samples().iter().map(|s| s.n_cells).collect();
        assert_eq!(ns, vec![2, 4], "the successful prefix was flushed");
    }
}
