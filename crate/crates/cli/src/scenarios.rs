//! Scenario pipelines: each one builds states, runs the quantum and
//! semiquantum sides, and reports machine-checkable pass/fail lines.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::Instant;

use num_complex::Complex;

use semiq_core::detectors::{
    default_number_grid, quantum_joint_number_correlation, semiquantum_joint_number,
    semiquantum_number_via_q, semiquantum_quadrature,
};
use semiq_core::fock::{
    make_coherent_state, make_number_state, make_squeezed_vacuum, make_thermal_state,
    photon_number_moments, quadrature_moments, DensityMatrix, FockParams,
};
use semiq_core::grid::Grid1;
use semiq_core::inversion::{heterodyne_to_wigner, separability_property_suite};
use semiq_core::quasiprob::husimi_q_grid;
use semiq_core::two_mode::{apply_beam_splitter, BeamSplitterParams, TwoModeState};
use semiq_core::CoreError;

use crate::report::{CheckKind, CheckLine, ScenarioReport};

/// Scenario failure split by exit-code class: configuration problems exit
/// with 1, numerical failures with 2.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Numerics(CoreError),
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        RunError::Numerics(e)
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(msg) => write!(f, "configuration error: {msg}"),
            RunError::Numerics(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

pub type RunResult = Result<(ScenarioReport, Vec<(String, String)>), RunError>;

/// Single-mode state selection shared by the single-mode scenarios.
#[derive(Debug, Clone, Copy)]
pub enum StateSpec {
    Fock(usize),
    Coherent(f64),
    Thermal(f64),
    Squeezed(f64),
}

impl StateSpec {
    fn label(&self) -> String {
        match self {
            StateSpec::Fock(m) => format!("fock m={m}"),
            StateSpec::Coherent(b) => format!("coherent beta={b}"),
            StateSpec::Thermal(n) => format!("thermal nbar={n}"),
            StateSpec::Squeezed(r) => format!("squeezed r={r}"),
        }
    }
}

/// Builds the state, growing the dimension to the constructor's reported
/// requirement when no override is given.
fn build_state(spec: StateSpec, dim: Option<usize>) -> Result<(DensityMatrix<f64>, usize), RunError> {
    let attempt = |d: usize| -> Result<DensityMatrix<f64>, CoreError> {
        let params = FockParams::with_dim(d)?;
        match spec {
            StateSpec::Fock(m) => make_number_state(m, params),
            StateSpec::Coherent(b) => make_coherent_state(Complex::new(b, 0.0), params),
            StateSpec::Thermal(n) => make_thermal_state(n, params),
            StateSpec::Squeezed(r) => make_squeezed_vacuum(r, params),
        }
    };
    if let Some(d) = dim {
        return Ok((attempt(d)?, d));
    }
    let mut d = match spec {
        StateSpec::Fock(m) => m + 4,
        _ => 16,
    };
    for _ in 0..8 {
        match attempt(d) {
            Ok(rho) => return Ok((rho, d)),
            Err(CoreError::TailTooHeavy { required_dim, .. }) => d = required_dim + 4,
            Err(other) => return Err(other.into()),
        }
    }
    Err(RunError::Config(format!(
        "cannot satisfy the truncation gate for {} below dimension {d}",
        spec.label()
    )))
}

fn within(name: &str, expected: f64, computed: f64, tol: f64, basis: &'static str) -> CheckLine {
    CheckLine {
        name: name.to_string(),
        expected,
        computed,
        tol,
        basis,
        kind: CheckKind::Within,
    }
}

fn at_least(name: &str, expected: f64, computed: f64, tol: f64, basis: &'static str) -> CheckLine {
    CheckLine {
        name: name.to_string(),
        expected,
        computed,
        tol,
        basis,
        kind: CheckKind::AtLeast,
    }
}

pub fn subpoisson(spec: StateSpec, dim: Option<usize>) -> RunResult {
    let start = Instant::now();
    let (rho, dim_used) = build_state(spec, dim)?;
    let (mean_n, second_n) = photon_number_moments(&rho);
    let var_n = second_n - mean_n * mean_n;
    let grid = default_number_grid(&rho)?;
    let stats = semiquantum_number_via_q(&rho, &grid)?;

    let checks = vec![
        within(
            "semiquantum_mean_shift_closed",
            mean_n + 1.0,
            stats.mean,
            1e-10,
            "closed-form",
        ),
        within(
            "semiquantum_mean_shift_grid",
            mean_n + 1.0,
            stats.grid_mean,
            1e-5,
            "closed-form",
        ),
        within(
            "semiquantum_variance_identity",
            var_n + stats.mean,
            stats.grid_variance(),
            1e-5,
            "closed-form",
        ),
        at_least(
            "super_poissonian_floor",
            stats.mean,
            stats.variance(),
            1e-9,
            "closed-form",
        ),
    ];
    let report = ScenarioReport {
        scenario: "subpoisson",
        inputs: vec![
            ("state".into(), spec.label()),
            ("dim".into(), dim_used.to_string()),
            ("n_grid_max".into(), format!("{:.3}", grid.max())),
            ("n_grid_step".into(), format!("{:.4}", grid.step())),
        ],
        values: vec![
            ("quantum_mean".into(), mean_n),
            ("quantum_variance".into(), var_n),
            ("semiquantum_mean".into(), stats.mean),
            ("semiquantum_variance".into(), stats.variance()),
        ],
        checks,
        wall_ms: start.elapsed().as_millis(),
    };
    Ok((report, Vec::new()))
}

fn joint_grid(grid_max: f64, grid_step: f64) -> Result<Grid1<f64>, RunError> {
    if grid_max <= 0.0 || grid_step <= 0.0 {
        return Err(RunError::Config(
            "grid-max and grid-step must be positive".into(),
        ));
    }
    Ok(Grid1::from_zero(grid_max, grid_step)?)
}

pub fn anticorrelation(
    transmission: f64,
    phase: f64,
    dim_per_mode: usize,
    grid_max: f64,
    grid_step: f64,
) -> RunResult {
    let start = Instant::now();
    if !(0.0..=1.0).contains(&transmission) {
        return Err(RunError::Config(format!(
            "transmission must lie in [0, 1], got {transmission}"
        )));
    }
    let input = TwoModeState::<f64>::from_fock_pair(1, 0, dim_per_mode)?;
    let bs = BeamSplitterParams::new(transmission, 1.0 - transmission, phase)?;
    let out = apply_beam_splitter(&input, &bs)?;
    let quantum = quantum_joint_number_correlation(&out);
    let grid = joint_grid(grid_max, grid_step)?;
    let joint = semiquantum_joint_number(&out, &grid, &grid)?;

    let swapped = apply_beam_splitter(&input, &bs.swapped())?;
    let joint_swapped = semiquantum_joint_number(&swapped, &grid, &grid)?;

    let checks = vec![
        within("quantum_correlation", 0.0, quantum, 1e-12, "closed-form"),
        within(
            "semiquantum_correlation",
            2.0,
            joint.correlation,
            1e-3,
            "closed-form",
        ),
        within(
            "semiquantum_correlation_closed",
            2.0,
            joint.correlation_closed_form,
            1e-12,
            "closed-form",
        ),
        within(
            "transmission_reflection_swap",
            0.0,
            joint.correlation - joint_swapped.correlation,
            1e-6,
            "exact",
        ),
    ];
    let report = ScenarioReport {
        scenario: "anticorrelation",
        inputs: vec![
            ("transmission".into(), format!("{transmission}")),
            ("phase".into(), format!("{phase}")),
            ("dim_per_mode".into(), dim_per_mode.to_string()),
            ("n_grid_max".into(), format!("{grid_max}")),
            ("n_grid_step".into(), format!("{grid_step}")),
        ],
        values: vec![
            ("quantum_correlation".into(), quantum),
            ("semiquantum_correlation".into(), joint.correlation),
        ],
        checks,
        wall_ms: start.elapsed().as_millis(),
    };
    Ok((report, Vec::new()))
}

pub fn hom(dim_per_mode: usize, grid_max: f64, grid_step: f64) -> RunResult {
    let start = Instant::now();
    let input = TwoModeState::<f64>::from_fock_pair(1, 1, dim_per_mode)?;
    let out = apply_beam_splitter(&input, &BeamSplitterParams::balanced())?;
    let quantum = quantum_joint_number_correlation(&out);
    let grid = joint_grid(grid_max, grid_step)?;
    let joint = semiquantum_joint_number(&out, &grid, &grid)?;

    let mut density_dev = 0.0f64;
    for i in 0..grid.len() {
        let n1 = grid.point(i);
        for j in 0..grid.len() {
            let n2 = grid.point(j);
            let expected = 0.25 * (n1 * n1 + n2 * n2) * (-n1 - n2).exp();
            density_dev = density_dev.max((joint.distribution.at(i, j) - expected).abs());
        }
    }

    let checks = vec![
        within("quantum_correlation", 0.0, quantum, 1e-12, "closed-form"),
        within(
            "semiquantum_correlation",
            3.0,
            joint.correlation,
            1e-3,
            "closed-form",
        ),
        within(
            "joint_density_pointwise",
            0.0,
            density_dev,
            1e-6,
            "closed-form",
        ),
    ];
    let report = ScenarioReport {
        scenario: "hom",
        inputs: vec![
            ("dim_per_mode".into(), dim_per_mode.to_string()),
            ("n_grid_max".into(), format!("{grid_max}")),
            ("n_grid_step".into(), format!("{grid_step}")),
        ],
        values: vec![
            ("quantum_correlation".into(), quantum),
            ("semiquantum_correlation".into(), joint.correlation),
            ("joint_density_max_dev".into(), density_dev),
        ],
        checks,
        wall_ms: start.elapsed().as_millis(),
    };
    Ok((report, Vec::new()))
}

pub fn squeezing(r: f64, dim: Option<usize>) -> RunResult {
    let start = Instant::now();
    let (rho, dim_used) = build_state(StateSpec::Squeezed(r), dim)?;
    let x_grid = Grid1::symmetric(7.0, 0.02)?;

    let mut checks = Vec::new();
    let mut values = Vec::new();
    for (label, theta) in [("0", 0.0), ("pi_4", FRAC_PI_4), ("pi_2", FRAC_PI_2)] {
        let (mean_x, second_x) = quadrature_moments(&rho, theta);
        let var_x = second_x - mean_x * mean_x;
        let stats = semiquantum_quadrature(&rho, theta, &x_grid)?;
        values.push((format!("quantum_variance_theta_{label}"), var_x));
        values.push((format!("semiquantum_variance_theta_{label}"), stats.variance()));
        checks.push(within(
            &format!("washout_identity_theta_{label}"),
            var_x + 0.25,
            stats.variance(),
            1e-5,
            "closed-form",
        ));
        checks.push(within(
            &format!("mean_equality_theta_{label}"),
            mean_x,
            stats.mean,
            1e-8,
            "exact",
        ));
    }

    let (m0, s0) = quadrature_moments(&rho, 0.0);
    let quantum_var0 = s0 - m0 * m0;
    let semi0 = semiquantum_quadrature(&rho, 0.0, &x_grid)?;
    checks.push(within(
        "quantum_variance_oracle",
        (-2.0 * r).exp() / 4.0,
        quantum_var0,
        1e-6,
        "oracle",
    ));
    checks.push(at_least(
        "quantum_at_most_vacuum_floor",
        0.0,
        0.25 - quantum_var0,
        1e-9,
        "closed-form",
    ));
    checks.push(at_least(
        "semiquantum_floor",
        0.25,
        semi0.variance(),
        1e-9,
        "closed-form",
    ));

    let report = ScenarioReport {
        scenario: "squeezing",
        inputs: vec![
            ("r".into(), format!("{r}")),
            ("dim".into(), dim_used.to_string()),
            ("x_grid_half_width".into(), "7".into()),
            ("x_grid_step".into(), "0.02".into()),
        ],
        values,
        checks,
        wall_ms: start.elapsed().as_millis(),
    };
    Ok((report, Vec::new()))
}

pub fn wigner_negativity(m: usize, control_beta: f64, dim: Option<usize>) -> RunResult {
    let start = Instant::now();
    let dim_used = dim.unwrap_or(16 + 2 * m);
    let grid = Grid1::new(-6.0, 6.0, 241)?;
    let rho = make_number_state(m, FockParams::with_dim(dim_used)?)?;
    let q = husimi_q_grid(&rho, grid.clone(), grid.clone())?;
    let w = heterodyne_to_wigner(&q)?;
    let mid = grid.len() / 2;
    let origin = w.at(mid, mid);
    let oracle = (2.0 / PI) * if m.is_multiple_of(2) { 1.0 } else { -1.0 };

    let (control, control_dim) = build_state(StateSpec::Coherent(control_beta), None)?;
    let qc = husimi_q_grid(&control, grid.clone(), grid.clone())?;
    let wc = heterodyne_to_wigner(&qc)?;

    let mut checks = vec![
        within(
            "deconvolved_origin_vs_oracle",
            oracle,
            origin,
            0.02 * (2.0 / PI),
            "oracle",
        ),
        within("deconvolved_mass", 1.0, w.mass(), 1e-4, "exact"),
        at_least(
            "control_nonnegative",
            0.0,
            wc.min_value(),
            1e-3,
            "closed-form",
        ),
    ];
    if m % 2 == 1 {
        checks.push(at_least(
            "negativity_mass",
            0.05,
            w.negativity_mass(),
            0.0,
            "oracle",
        ));
    }

    let report = ScenarioReport {
        scenario: "wigner-negativity",
        inputs: vec![
            ("m".into(), m.to_string()),
            ("dim".into(), dim_used.to_string()),
            ("control_beta".into(), format!("{control_beta}")),
            ("control_dim".into(), control_dim.to_string()),
            ("grid".into(), "[-6, 6] x 241".into()),
        ],
        values: vec![
            ("deconvolved_origin".into(), origin),
            ("negativity_mass".into(), w.negativity_mass()),
            ("control_min_value".into(), wc.min_value()),
        ],
        checks,
        wall_ms: start.elapsed().as_millis(),
    };
    let artifacts = vec![(
        "wigner".to_string(),
        crate::report::field_to_table(&w),
    )];
    Ok((report, artifacts))
}

pub fn separability_suite(seed: u64, trials: u64) -> RunResult {
    let start = Instant::now();
    if trials == 0 {
        return Err(RunError::Config("trials must be at least 1".into()));
    }
    let suite = separability_property_suite::<f64>(seed, trials)?;
    let mut checks = vec![
        within(
            "all_trials_bona_fide",
            trials as f64,
            suite.passes as f64,
            0.0,
            "exact",
        ),
        at_least(
            "worst_min_value",
            0.0,
            suite.worst_min_value,
            1e-8,
            "closed-form",
        ),
        within(
            "worst_normalization_defect",
            0.0,
            suite.worst_norm_defect,
            1e-4,
            "exact",
        ),
    ];
    if !suite.failures.is_empty() {
        // keep the first offender visible in the report
        checks.push(within(
            &format!("first_failure_trial_{}", suite.failures[0].trial),
            0.0,
            suite.failures[0].min_value,
            1e-8,
            "exact",
        ));
    }
    let report = ScenarioReport {
        scenario: "separability-suite",
        inputs: vec![
            ("seed".into(), seed.to_string()),
            ("trials".into(), trials.to_string()),
        ],
        values: vec![
            ("passes".into(), suite.passes as f64),
            ("worst_min_value".into(), suite.worst_min_value),
            ("worst_norm_defect".into(), suite.worst_norm_defect),
        ],
        checks,
        wall_ms: start.elapsed().as_millis(),
    };
    Ok((report, Vec::new()))
}

/// Used by the wigner-negativity artifact path and the emit tests.
pub fn field_artifact_name(stem: &str, tag: &str) -> String {
    format!("{stem}-{tag}.csv")
}
