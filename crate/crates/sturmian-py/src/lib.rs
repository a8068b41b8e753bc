//! Python bindings. Exact numbers cross the boundary as `QuadReal` objects or strings,
//! never as floats.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use pyo3::exceptions::{PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;

use sturmian::lattice::{self, Dir, Form, LatticeParams};
use sturmian::render::{self, RenderSpec};
use sturmian::tileset::{self, Dedup};
use sturmian::words::SkewVariant;
use sturmian::{bd, cf_eval, cf_expand, compare, superlattice, CfKind, ContinuedFraction, Error};

fn err(e: Error) -> PyErr {
    match e {
        Error::DivisionByZero => PyZeroDivisionError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn dir(name: &str) -> PyResult<Dir> {
    match name {
        "a" | "A" => Ok(Dir::A),
        "b" | "B" => Ok(Dir::B),
        "c" | "C" => Ok(Dir::C),
        _ => Err(PyValueError::new_err("direction must be 'a', 'b' or 'c'")),
    }
}

fn form(name: &str) -> PyResult<Form> {
    match name {
        "cabinet" => Ok(Form::Cabinet),
        "isometric" => Ok(Form::Isometric),
        _ => Err(PyValueError::new_err("form must be 'cabinet' or 'isometric'")),
    }
}

/// An exact element of ℚ(√d). Accepts an int, a `QuadReal`, or a string such as
/// `"-1 + sqrt(2)"`, `"sqrt:2,-1,1"` or `"cf:[0;(2)]"`.
#[pyclass(name = "QuadReal", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyQuadReal(pub sturmian::QuadReal);

fn quad(x: &Bound<'_, PyAny>) -> PyResult<sturmian::QuadReal> {
    if let Ok(q) = x.extract::<PyQuadReal>() {
        return Ok(q.0);
    }
    if let Ok(n) = x.extract::<i64>() {
        return Ok(sturmian::QuadReal::int(n));
    }
    if let Ok(s) = x.extract::<String>() {
        return sturmian::cli::parse_number(&s).map_err(err);
    }
    Err(PyValueError::new_err("expected QuadReal, int or str"))
}

#[pymethods]
impl PyQuadReal {
    #[new]
    fn py_new(x: &Bound<'_, PyAny>) -> PyResult<Self> {
        quad(x).map(Self)
    }

    #[staticmethod]
    fn sqrt(d: u64) -> Self {
        Self(sturmian::QuadReal::sqrt(d))
    }

    #[staticmethod]
    fn frac(p: i64, q: i64) -> PyResult<Self> {
        if q == 0 {
            return Err(PyZeroDivisionError::new_err("zero denominator"));
        }
        Ok(Self(sturmian::QuadReal::frac(p, q)))
    }

    /// Rational and irrational parts as strings, and the radicand.
    fn parts(&self) -> (String, String, u64) {
        (self.0.a().to_string(), self.0.b().to_string(), self.0.d())
    }

    fn is_rational(&self) -> bool {
        self.0.is_rational()
    }

    fn conj(&self) -> Self {
        Self(self.0.conj())
    }

    fn norm(&self) -> String {
        self.0.norm().to_string()
    }

    fn floor(&self) -> PyResult<i64> {
        Ok(self.0.floor_i64())
    }

    fn ceil(&self) -> PyResult<i64> {
        Ok(self.0.ceil_i64())
    }

    fn __add__(&self, o: &Bound<'_, PyAny>) -> PyResult<Self> {
        let o = quad(o)?;
        sturmian::QuadReal::try_add(&self.0, &o).map(Self).map_err(err)
    }

    fn __sub__(&self, o: &Bound<'_, PyAny>) -> PyResult<Self> {
        let o = quad(o)?;
        sturmian::QuadReal::try_sub(&self.0, &o).map(Self).map_err(err)
    }

    fn __mul__(&self, o: &Bound<'_, PyAny>) -> PyResult<Self> {
        let o = quad(o)?;
        sturmian::QuadReal::try_mul(&self.0, &o).map(Self).map_err(err)
    }

    fn __truediv__(&self, o: &Bound<'_, PyAny>) -> PyResult<Self> {
        let o = quad(o)?;
        sturmian::QuadReal::try_div(&self.0, &o).map(Self).map_err(err)
    }

    fn __radd__(&self, o: &Bound<'_, PyAny>) -> PyResult<Self> {
        self.__add__(o)
    }

    fn __rsub__(&self, o: &Bound<'_, PyAny>) -> PyResult<Self> {
        quad(o)?.try_sub(&self.0).map(Self).map_err(err)
    }

    fn __rmul__(&self, o: &Bound<'_, PyAny>) -> PyResult<Self> {
        self.__mul__(o)
    }

    fn __rtruediv__(&self, o: &Bound<'_, PyAny>) -> PyResult<Self> {
        quad(o)?.try_div(&self.0).map(Self).map_err(err)
    }

    fn __eq__(&self, o: &Bound<'_, PyAny>) -> bool {
        quad(o).is_ok_and(|o| o == self.0)
    }

    fn __hash__(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.0.hash(&mut h);
        h.finish()
    }

    fn __lt__(&self, o: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(compare(&self.0, &quad(o)?).map_err(err)?.is_lt())
    }

    fn __le__(&self, o: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(compare(&self.0, &quad(o)?).map_err(err)?.is_le())
    }

    fn __gt__(&self, o: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(compare(&self.0, &quad(o)?).map_err(err)?.is_gt())
    }

    fn __ge__(&self, o: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(compare(&self.0, &quad(o)?).map_err(err)?.is_ge())
    }

    fn __neg__(&self) -> Self {
        Self(-self.0.clone())
    }

    fn __float__(&self) -> f64 {
        self.0.to_f64()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("QuadReal('{}')", self.0)
    }
}

/// Continued-fraction expansion as a string like `"[0; (2)]"`; `negative` selects the
/// `d0 − 1/(d1 − …)` kind.
#[pyfunction]
#[pyo3(signature = (x, negative=false))]
fn continued_fraction(x: &Bound<'_, PyAny>, negative: bool) -> PyResult<String> {
    let kind = if negative { CfKind::Negative } else { CfKind::Regular };
    cf_expand(&quad(x)?, kind).map(|c| c.to_string()).map_err(err)
}

/// Value of a continued fraction written as by [`continued_fraction`].
#[pyfunction]
fn cf_value(s: &str) -> PyResult<PyQuadReal> {
    let cf: ContinuedFraction = s.parse().map_err(err)?;
    cf_eval(&cf).map(|v| PyQuadReal(v.value)).map_err(err)
}

#[pyclass(name = "Lattice", frozen)]
pub struct PyLattice(LatticeParams);

#[pymethods]
impl PyLattice {
    /// Irrational slope with zero-sum intercepts.
    #[new]
    #[pyo3(signature = (alpha, kappa=None, rho=None))]
    fn py_new(alpha: &Bound<'_, PyAny>, kappa: Option<&Bound<'_, PyAny>>, rho: Option<Vec<Bound<'_, PyAny>>>) -> PyResult<Self> {
        let kappa = kappa.map(quad).transpose()?.unwrap_or_else(sturmian::QuadReal::one);
        let rho = match rho {
            None => [sturmian::QuadReal::zero(), sturmian::QuadReal::zero(), sturmian::QuadReal::zero()],
            Some(v) if v.len() == 3 => [quad(&v[0])?, quad(&v[1])?, quad(&v[2])?],
            Some(_) => return Err(PyValueError::new_err("rho needs three entries")),
        };
        LatticeParams::irrational(kappa, quad(alpha)?, rho).map(Self).map_err(err)
    }

    /// Rational slope `p/q`: `variant` is `"periodic"` (with 0/1 `choices`), `"skew-a"` or `"skew-b"`.
    #[staticmethod]
    #[pyo3(signature = (p, q, variant, choices=vec![true], kappa=None))]
    fn rational(p: i64, q: i64, variant: &str, choices: Vec<bool>, kappa: Option<&Bound<'_, PyAny>>) -> PyResult<Self> {
        let kappa = kappa.map(quad).transpose()?.unwrap_or_else(sturmian::QuadReal::one);
        match variant {
            "periodic" => LatticeParams::rational_periodic(p, q, kappa, &choices),
            "skew-a" => LatticeParams::rational_skew(p, q, kappa, SkewVariant::A),
            "skew-b" => LatticeParams::rational_skew(p, q, kappa, SkewVariant::B),
            _ => return Err(PyValueError::new_err("unknown variant")),
        }
        .map(Self)
        .map_err(err)
    }

    #[staticmethod]
    fn kagome() -> Self {
        Self(LatticeParams::kagome())
    }

    #[getter]
    fn alpha(&self) -> PyQuadReal {
        PyQuadReal(self.0.alpha.clone())
    }

    #[getter]
    fn kappa(&self) -> PyQuadReal {
        PyQuadReal(self.0.kappa.clone())
    }

    fn line_coord(&self, direction: &str, n: i64) -> PyResult<PyQuadReal> {
        Ok(PyQuadReal(self.0.line_coord(dir(direction)?, n)))
    }

    fn classify(&self) -> String {
        lattice::classify(&self.0).to_string()
    }

    /// `(passage, slope, frequency)`.
    fn invariants(&self) -> (PyQuadReal, PyQuadReal, PyQuadReal) {
        let (k, a, q) = lattice::invariants_of(&self.0);
        (PyQuadReal(k), PyQuadReal(a), PyQuadReal(q))
    }

    fn verify_axiom(&self, window: i64) -> bool {
        lattice::verify_axiom(&self.0, window).is_ok()
    }

    fn verify_super(&self, window: i64) -> PyResult<bool> {
        superlattice::verify_psi(&self.0, window).map(|c| c.is_ok()).map_err(err)
    }

    /// `(passage, slope, scale)` for levels `0..=level` of the SL substitution.
    fn orbit(&self, level: usize) -> PyResult<Vec<(PyQuadReal, PyQuadReal, PyQuadReal)>> {
        let o = superlattice::orbit(&self.0, level).map_err(err)?;
        Ok(o.into_iter().map(|(k, a, s)| (PyQuadReal(k), PyQuadReal(a), PyQuadReal(s))).collect())
    }

    #[pyo3(signature = (window=8, form="cabinet"))]
    fn svg(&self, window: i64, form: &str) -> PyResult<String> {
        let spec = RenderSpec { form: self::form(form)?, window, ..RenderSpec::default() };
        Ok(render::lattice_svg(&self.0, &spec))
    }

    fn to_json(&self) -> String {
        lattice::to_json(&self.0).to_string()
    }
}

#[pyclass(name = "Catalog", frozen)]
pub struct PyCatalog(tileset::PatchCatalog);

#[pymethods]
impl PyCatalog {
    /// Build the patch-tile catalog of a quadratic irrational slope in (0,1).
    #[new]
    #[pyo3(signature = (alpha, isometry=true))]
    fn py_new(alpha: &Bound<'_, PyAny>, isometry: bool) -> PyResult<Self> {
        let dedup = if isometry { Dedup::Isometry } else { Dedup::Translation };
        tileset::build_catalog(&quad(alpha)?, dedup).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| PyValueError::new_err(e.to_string()))?;
        tileset::PatchCatalog::from_json(&v).map(Self).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.tiles.len()
    }

    fn classes(&self) -> (String, String) {
        (self.0.classes[0].to_string(), self.0.classes[1].to_string())
    }

    fn is_proper(&self) -> bool {
        tileset::verify_properness(&self.0.classes, &self.0.u, &self.0.v).proper
    }

    /// Tile the `window × window` cells at intercepts `(ρ₁, ρ₂)`; returns the placed
    /// tiles as `(i, j, width, height)`.
    fn tile(&self, rho1: &Bound<'_, PyAny>, rho2: &Bound<'_, PyAny>, window: i64) -> PyResult<Vec<(i64, i64, i64, i64)>> {
        let t = tileset::tile_a_window(&self.0, (quad(rho1)?, quad(rho2)?), window).map_err(err)?;
        Ok(t.placed.iter().map(|p| (p.origin.0, p.origin.1, p.tile.width(), p.tile.height())).collect())
    }

    fn tiling_svg(&self, rho1: &Bound<'_, PyAny>, rho2: &Bound<'_, PyAny>, window: i64) -> PyResult<String> {
        let t = tileset::tile_a_window(&self.0, (quad(rho1)?, quad(rho2)?), window).map_err(err)?;
        let spec = RenderSpec { window, ..RenderSpec::default() };
        render::tiling_svg(&t, &self.0.alpha, &spec).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json().to_string()
    }
}

/// Number of distinct `r1 × r2` patches, by enumeration.
#[pyfunction]
fn patch_count(alpha: &Bound<'_, PyAny>, r1: i64, r2: i64) -> PyResult<usize> {
    tileset::enumerate_rect_patches(&quad(alpha)?, r1, r2).map(|v| v.len()).map_err(err)
}

/// Catalog size of the height-`h` family with norm ±1.
#[pyfunction]
fn height_family_size(h: i64, norm: i32) -> PyResult<usize> {
    tileset::height_family_tileset(h, norm).map(|r| r.size()).map_err(err)
}

/// Image of cell `(x, y)` under the bounded-displacement map for densities `λ, μ` with
/// `λμn = 1`.
#[pyfunction]
fn bd_map(lambda: &Bound<'_, PyAny>, mu: &Bound<'_, PyAny>, n: i64, x: i64, y: i64) -> PyResult<(i64, i64)> {
    bd::do_map(&quad(lambda)?, &quad(mu)?, n, x, y).map_err(err)
}

#[pymodule]
fn sturmian_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyQuadReal>()?;
    m.add_class::<PyLattice>()?;
    m.add_class::<PyCatalog>()?;
    m.add_function(wrap_pyfunction!(continued_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(cf_value, m)?)?;
    m.add_function(wrap_pyfunction!(patch_count, m)?)?;
    m.add_function(wrap_pyfunction!(height_family_size, m)?)?;
    m.add_function(wrap_pyfunction!(bd_map, m)?)?;
    Ok(())
}
