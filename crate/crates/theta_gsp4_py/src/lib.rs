use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use theta_gsp4::assembly::{interpolation_rhs, mass_volume as mass, run_verification_suite, GlobalDatum, GROUPS};
use theta_gsp4::cm_theta::{master_identity, theta_element as theta, CmTower, FourierExpansion};
use theta_gsp4::exact_arith::{impose_central_char, parse, RatFunc};
use theta_gsp4::hecke_gsp4::relation_checks;
use theta_gsp4::quadfield::{class_group as cg, ring_class_number as rcn};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Exact element of Q(u, a, b, g, d) with u^2 = q.
#[pyclass(name = "RatFunc", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyRatFunc(RatFunc);

#[pymethods]
impl PyRatFunc {
    #[new]
    fn new(expr: &str) -> PyResult<Self> {
        parse(expr).map(PyRatFunc).map_err(err)
    }

    fn __add__(&self, o: &Self) -> Self {
        PyRatFunc(&self.0 + &o.0)
    }

    fn __sub__(&self, o: &Self) -> Self {
        PyRatFunc(&self.0 - &o.0)
    }

    fn __mul__(&self, o: &Self) -> Self {
        PyRatFunc(&self.0 * &o.0)
    }

    fn __truediv__(&self, o: &Self) -> PyResult<Self> {
        self.0.checked_div(&o.0).map(PyRatFunc).map_err(err)
    }

    fn __neg__(&self) -> Self {
        PyRatFunc(-&self.0)
    }

    fn __pow__(&self, e: i32, _m: Option<i64>) -> PyResult<Self> {
        if e < 0 && self.0.is_zero() {
            return Err(PyValueError::new_err("zero has no inverse"));
        }
        Ok(PyRatFunc(self.0.pow(e)))
    }

    fn inv(&self) -> PyResult<Self> {
        self.0.inv().map(PyRatFunc).map_err(err)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Impose the central-character relation b = a^-1 g^-2.
    fn central(&self) -> Self {
        PyRatFunc(impose_central_char(&self.0))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("RatFunc('{}')", self.0)
    }
}

/// (name, holds generically, holds after b = a^-1 g^-2) for each Hecke relation.
#[pyfunction]
fn hecke_relations() -> Vec<(String, bool, bool)> {
    relation_checks().into_iter().map(|c| (c.name, c.generic, c.central)).collect()
}

#[pyfunction]
fn class_group(disc: i64) -> PyResult<Vec<(i64, i64, i64)>> {
    let g = cg(disc).map_err(err)?;
    Ok(g.elements.iter().map(|f| (f.a, f.b, f.c)).collect())
}

#[pyfunction]
fn ring_class_number(delta_k: i64, p: i64, n: u32) -> PyResult<u64> {
    rcn(delta_k, p, n).map_err(err)
}

/// Volume as (numerator, denominator, power of pi).
#[pyfunction]
fn mass_volume(n_plus: i64, n_minus: i64) -> PyResult<(i64, i64, i32)> {
    let v = mass(n_plus, n_minus).map_err(err)?;
    Ok((*v.coeff.numer(), *v.coeff.denom(), v.pi_power))
}

/// Suite entries as (group, name, status, detail).
#[pyfunction]
#[pyo3(signature = (groups=Vec::new()))]
fn verify(groups: Vec<String>) -> PyResult<Vec<(String, String, String, String)>> {
    if let Some(g) = groups.iter().find(|g| !GROUPS.contains(&g.as_str())) {
        return Err(PyValueError::new_err(format!("unknown group {g}")));
    }
    let sel: Vec<&str> = groups.iter().map(String::as_str).collect();
    Ok(run_verification_suite(&sel).into_iter().map(|e| (e.group, e.name, e.status.name().to_string(), e.detail)).collect())
}

/// Factor rows (kind, name, value) for a `key = value` configuration text.
#[pyfunction]
fn interpolation(config: &str) -> PyResult<Vec<(String, String, String)>> {
    let g = GlobalDatum::from_config(config).map_err(err)?;
    Ok(interpolation_rhs(&g).map_err(err)?.rows())
}

/// Coefficients of the level-n theta element, plus whether the pushforward identity holds (n >= 1).
#[pyfunction]
#[pyo3(signature = (delta_k, p, n, coeffs, n_plus=1, alpha_q="a"))]
fn theta_element(delta_k: i64, p: i64, n: u32, coeffs: &str, n_plus: i64, alpha_q: &str) -> PyResult<(Vec<PyRatFunc>, Option<bool>)> {
    let aq = parse(alpha_q).map_err(err)?;
    let tower = CmTower::new(delta_k, p, n + 1, n_plus).map_err(err)?;
    let f = FourierExpansion::parse(coeffs, tower.order_level(n.max(1))).map_err(err)?;
    let th = theta(&f, &tower, &aq, n).map_err(err)?;
    let master = if n >= 1 { Some(master_identity(&f, &tower, &aq, n).map_err(err)?) } else { None };
    Ok((th.coeffs.into_iter().map(PyRatFunc).collect(), master))
}

#[pymodule]
#[pyo3(name = "theta_gsp4")]
fn theta_gsp4_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRatFunc>()?;
    m.add_function(wrap_pyfunction!(hecke_relations, m)?)?;
    m.add_function(wrap_pyfunction!(class_group, m)?)?;
    m.add_function(wrap_pyfunction!(ring_class_number, m)?)?;
    m.add_function(wrap_pyfunction!(mass_volume, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(interpolation, m)?)?;
    m.add_function(wrap_pyfunction!(theta_element, m)?)?;
    Ok(())
}
