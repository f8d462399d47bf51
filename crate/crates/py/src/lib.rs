//! Python module `orbit_atlas`: thin wrappers returning plain Python values.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use orbit_atlas_core::catalog::{load_catalog, Catalog};
use orbit_atlas_core::classify::{parse_point_mod, parse_point_rational, DEFAULT_CENSUS_BUDGET};
use orbit_atlas_core::oracle::DEFAULT_ORACLE_BUDGET;
use orbit_atlas_core::witness::WitnessStatus;

fn py_err(e: orbit_atlas_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn catalog(rank: usize) -> PyResult<Catalog> {
    load_catalog(rank).map_err(py_err)
}

/// Orbit ids of a rank in catalog order.
#[pyfunction]
fn orbit_ids(rank: usize) -> PyResult<Vec<String>> {
    Ok(catalog(rank)?.orbits.into_iter().map(|r| r.id).collect())
}

/// The catalog file as JSON text.
#[pyfunction]
fn catalog_json(rank: usize) -> PyResult<String> {
    Ok(catalog(rank)?.to_json())
}

/// Stratum of a comma-separated point, over F_p when `modulus` is given.
#[pyfunction]
#[pyo3(signature = (rank, point, modulus=None))]
fn classify(rank: usize, point: &str, modulus: Option<u64>) -> PyResult<String> {
    let cat = catalog(rank)?;
    let res = match modulus {
        Some(p) => orbit_atlas_core::classify::classify(&cat, &parse_point_mod(point, rank, p).map_err(py_err)?),
        None => orbit_atlas_core::classify::classify(&cat, &parse_point_rational(point, rank).map_err(py_err)?),
    };
    Ok(res.map_err(py_err)?.orbit_id)
}

/// `(orbit id, number of F_q points)` for every stratum.
#[pyfunction]
#[pyo3(signature = (rank, q, budget=None))]
fn census(py: Python<'_>, rank: usize, q: u64, budget: Option<u128>) -> PyResult<Vec<(String, u64)>> {
    let cat = catalog(rank)?;
    let c = py
        .detach(|| orbit_atlas_core::classify::partition_census(&cat, q, budget.unwrap_or(DEFAULT_CENSUS_BUDGET)))
        .map_err(py_err)?;
    Ok(c.counts)
}

/// Number of B(F_q)-orbits and whether the catalog refines them.
#[pyfunction]
fn oracle(py: Python<'_>, rank: usize, q: u64) -> PyResult<(usize, bool)> {
    let cat = catalog(rank)?;
    py.detach(|| {
        let part = orbit_atlas_core::oracle::enumerate_borel_orbits(rank, q, DEFAULT_ORACLE_BUDGET)?;
        let r = orbit_atlas_core::oracle::refine_check(&cat, &part)?;
        Ok((r.classes, r.passed()))
    })
    .map_err(py_err)
}

/// `(orbit id, Jacobian dimension, catalog dimension)` for every record.
#[pyfunction]
fn dimensions(rank: usize) -> PyResult<Vec<(String, usize, usize)>> {
    catalog(rank)?
        .orbits
        .iter()
        .map(|r| orbit_atlas_core::oracle::jacobian_rank_dim(r, 20).map(|d| (d.id, d.dim, d.catalog_dim)))
        .collect::<Result<_, _>>()
        .map_err(py_err)
}

/// Nodes `(id, dim)` and cover edges `(lower, upper)` of the closure order.
#[pyfunction]
fn hasse(py: Python<'_>, rank: usize) -> PyResult<(Vec<(String, usize)>, Vec<(String, String)>)> {
    let cat = catalog(rank)?;
    let p = py.detach(|| orbit_atlas_core::order::hasse(&cat)).map_err(py_err)?;
    let covers = p.cover_ids().into_iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    Ok((p.nodes, covers))
}

#[pyfunction]
fn hasse_dot(py: Python<'_>, rank: usize) -> PyResult<String> {
    let cat = catalog(rank)?;
    Ok(py.detach(|| orbit_atlas_core::order::hasse(&cat)).map_err(py_err)?.emit_dot())
}

/// `(orbit id, final witness status, certified)` for every record.
#[pyfunction]
fn verify(py: Python<'_>, rank: usize) -> PyResult<Vec<(String, String, bool)>> {
    let cat = catalog(rank)?;
    Ok(py.detach(|| {
        cat.orbits
            .iter()
            .map(|r| {
                let c = orbit_atlas_core::witness::certify(r);
                let status = match &c.verdict.status {
                    WitnessStatus::VerifiedSymbolic => "VerifiedSymbolic",
                    WitnessStatus::VerifiedNumeric { .. } => "VerifiedNumeric",
                    WitnessStatus::RepairedAndVerified { .. } => "RepairedAndVerified",
                    WitnessStatus::FailedAsPrinted { .. } => "FailedAsPrinted",
                };
                (c.orbit_id.clone(), status.to_string(), c.certified())
            })
            .collect()
    }))
}

#[pymodule]
fn orbit_atlas(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(orbit_ids, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_json, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(census, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(dimensions, m)?)?;
    m.add_function(wrap_pyfunction!(hasse, m)?)?;
    m.add_function(wrap_pyfunction!(hasse_dot, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
