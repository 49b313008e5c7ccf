use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hardball::dynamics::{simulate_trajectory, ProcessKind, SimParams, State, TrajectoryOptions};
use hardball::estimators::hitting_time_packing;
use hardball::formulas;
use hardball::geometry::{self, Configuration, ReducedConfiguration};

/// `(times, flattened states, energies)`.
type Path = (Vec<f64>, Vec<Vec<f64>>, Vec<Option<f64>>);

fn err(e: hardball::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn process(name: &str, c: f64) -> PyResult<ProcessKind> {
    Ok(match name {
        "full" => ProcessKind::Full,
        "reduced" => ProcessKind::Reduced,
        "radial" => ProcessKind::Radial,
        "affine" => ProcessKind::Affine,
        "reflected_drift_bm" => ProcessKind::ReflectedDriftBm { c },
        "u_squared" => ProcessKind::USquared,
        _ => return Err(PyValueError::new_err(format!("unknown process {name:?}"))),
    })
}

#[pyfunction]
fn poincare_bounds(a: f64, d: usize, r: f64) -> PyResult<(f64, f64)> {
    let b = formulas::poincare_bounds(a, d, r).map_err(err)?;
    Ok((b.lower, b.upper))
}

#[pyfunction]
fn psi_exp_moment(lam: f64, c: f64, eps_minus: f64, eps_plus: f64) -> PyResult<f64> {
    formulas::psi_exp_moment(lam, c, eps_minus, eps_plus).map_err(err)
}

#[pyfunction]
fn sigma_hat_mean(c: f64, eps_plus: f64) -> PyResult<f64> {
    formulas::sigma_hat_mean(c, eps_plus).map_err(err)
}

#[pyfunction]
fn sigma_hat_second_moment_upper(c: f64, eps_plus: f64) -> PyResult<f64> {
    formulas::sigma_hat_second_moment_upper(c, eps_plus).map_err(err)
}

#[pyfunction]
fn prophit_bound(t: f64, a: f64, d: usize, r: f64, second_moment_init: f64) -> PyResult<f64> {
    formulas::prophit_bound(t, a, d, r, second_moment_init).map_err(err)
}

#[pyfunction]
fn tricomi_u(alpha: f64, b: f64, z: f64) -> PyResult<f64> {
    formulas::tricomi_u(alpha, b, z).map_err(err)
}

#[pyfunction]
fn radial_density(rho: f64, a: f64, d: usize, r: f64) -> PyResult<f64> {
    formulas::radial_density(rho, a, d, r).map_err(err)
}

/// Rows of `(a, x_a, gap, residual)`.
#[pyfunction]
#[pyo3(signature = (a_grid, d=2, r=1.0))]
fn gap_table(a_grid: Vec<f64>, d: usize, r: f64) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let rows = formulas::gap_table(&a_grid, d, r, formulas::DEFAULT_WINDOW).map_err(err)?;
    Ok(rows.iter().map(|g| (g.a, g.x_a, g.gap, g.residual)).collect())
}

#[pyfunction]
fn schedule<'py>(py: Python<'py>, a: f64, d: usize) -> PyResult<Bound<'py, PyDict>> {
    let s = formulas::schedule(a, d).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("eps_plus", s.eps_plus)?;
    out.set_item("eps_minus", s.eps_minus)?;
    out.set_item("lambda", s.lambda)?;
    out.set_item("r_prime", s.r_prime)?;
    out.set_item("q", s.q)?;
    out.set_item("ln_r_min", s.ln_r_min)?;
    out.set_item("admissible", s.admissible)?;
    Ok(out)
}

/// Sum of squared pairwise distances.
#[pyfunction]
#[pyo3(signature = (points, r=1.0))]
fn quadratic_energy(points: Vec<Vec<f64>>, r: f64) -> PyResult<f64> {
    let c = Configuration::new(&points, r).map_err(err)?;
    Ok(c.quadratic_energy().value())
}

#[pyfunction]
#[pyo3(signature = (points, apex=0, r=1.0))]
fn median_coordinates(points: Vec<Vec<f64>>, apex: usize, r: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let c = ReducedConfiguration::centered(&points, r).map_err(err)?;
    geometry::median_coordinates(&c, apex).map_err(err)
}

/// Simulates one path. `init` is a float for scalar processes and a list of
/// points otherwise. Returns `(times, states, energies)` with states flattened.
#[allow(clippy::too_many_arguments)]
#[pyfunction]
#[pyo3(signature = (process, init, a, d, n, r=1.0, dt=None, t_max=1.0, seed=0, index=0, stride=1, c=0.0))]
fn simulate(
    process: &str,
    init: &Bound<'_, PyAny>,
    a: f64,
    d: usize,
    n: usize,
    r: f64,
    dt: Option<f64>,
    t_max: f64,
    seed: u64,
    index: u64,
    stride: u64,
    c: f64,
) -> PyResult<Path> {
    let kind = self::process(process, c)?;
    let mut p = SimParams::new(a, r, d, n).with_t_max(t_max).with_seed(seed);
    if let Some(dt) = dt {
        p = p.with_dt(dt);
    }
    p.validate().map_err(err)?;
    let state = match kind {
        ProcessKind::Full => State::Full(Configuration::new(&init.extract::<Vec<Vec<f64>>>()?, r).map_err(err)?),
        ProcessKind::Reduced => {
            State::Reduced(ReducedConfiguration::centered(&init.extract::<Vec<Vec<f64>>>()?, r).map_err(err)?)
        }
        _ => State::Scalar(init.extract::<f64>()?),
    };
    let opts = TrajectoryOptions {
        stride,
        index,
        cluster_radius: None,
    };
    let traj = simulate_trajectory(kind, state, &p, &opts).map_err(err)?;
    let states = traj.states.iter().map(State::coordinates).collect();
    Ok((traj.times, states, traj.energies))
}

/// Times for two balls started at half-distance `init_y` to touch; returns
/// `(times, censored)`.
#[allow(clippy::too_many_arguments)]
#[pyfunction]
#[pyo3(signature = (a, d, init_y, n_rep, t_max, r=1.0, dt=None, seed=0))]
fn packing_hitting_times(
    a: f64,
    d: usize,
    init_y: f64,
    n_rep: usize,
    t_max: f64,
    r: f64,
    dt: Option<f64>,
    seed: u64,
) -> PyResult<(Vec<f64>, Vec<bool>)> {
    let mut p = SimParams::new(a, r, d, 2).with_seed(seed);
    if let Some(dt) = dt {
        p = p.with_dt(dt);
    }
    p.validate().map_err(err)?;
    let (samples, _) = hitting_time_packing(&p, init_y, n_rep, t_max).map_err(err)?;
    Ok(samples.iter().map(|s| (s.time, s.censored)).unzip())
}

#[pymodule]
fn hardball_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(poincare_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(psi_exp_moment, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_hat_mean, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_hat_second_moment_upper, m)?)?;
    m.add_function(wrap_pyfunction!(prophit_bound, m)?)?;
    m.add_function(wrap_pyfunction!(tricomi_u, m)?)?;
    m.add_function(wrap_pyfunction!(radial_density, m)?)?;
    m.add_function(wrap_pyfunction!(gap_table, m)?)?;
    m.add_function(wrap_pyfunction!(schedule, m)?)?;
    m.add_function(wrap_pyfunction!(quadratic_energy, m)?)?;
    m.add_function(wrap_pyfunction!(median_coordinates, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(packing_hitting_times, m)?)?;
    Ok(())
}
