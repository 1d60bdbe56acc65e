//! Python bindings. Points and vertices cross the boundary as lists of
//! `(x, y, z)` tuples; depth arrays as lists of floats.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use spotlights_core as core;
use spotlights_core::density::{OcclusionParams, QuadratureResolution, SurfelParams};
use spotlights_core::metrics::Norm;
use spotlights_core::Vec3;

fn to_py(e: core::Error) -> PyErr {
    if e.is_io() {
        PyIOError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn tuples(points: &[Vec3]) -> Vec<(f64, f64, f64)> {
    points.iter().map(|p| (p.x, p.y, p.z)).collect()
}

fn vecs(points: Vec<(f64, f64, f64)>) -> Vec<Vec3> {
    points.into_iter().map(|(x, y, z)| Vec3::new(x, y, z)).collect()
}

fn parse_norm(norm: &str) -> PyResult<Norm> {
    norm.parse().map_err(to_py)
}

/// Triangle mesh.
#[pyclass(name = "Mesh", module = "spotlights", skip_from_py_object)]
#[derive(Clone)]
struct PyMesh(core::TriangleMesh);

#[pymethods]
impl PyMesh {
    #[new]
    fn new(vertices: Vec<(f64, f64, f64)>, triangles: Vec<[u32; 3]>) -> PyResult<Self> {
        core::TriangleMesh::new(vecs(vertices), triangles).map(PyMesh).map_err(to_py)
    }

    /// Reads an `.obj` or `.ply` file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        core::io::load_mesh(path).map(PyMesh).map_err(to_py)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        core::io::save_mesh(path, &self.0).map_err(to_py)
    }

    #[getter]
    fn vertices(&self) -> Vec<(f64, f64, f64)> {
        tuples(self.0.vertices())
    }

    #[getter]
    fn triangles(&self) -> Vec<[u32; 3]> {
        self.0.triangles().to_vec()
    }

    fn surface_area(&self) -> f64 {
        self.0.surface_area()
    }

    /// `(center, radius)` of the bounding box's circumsphere.
    fn bounding_sphere(&self) -> PyResult<((f64, f64, f64), f64)> {
        let s = core::bounding_sphere(&self.0).map_err(to_py)?;
        Ok(((s.center.x, s.center.y, s.center.z), s.radius))
    }

    /// Area-weighted uniform surface samples.
    #[pyo3(signature = (n, seed = 0))]
    fn sample(&self, n: usize, seed: u64) -> PyResult<PyPointCloud> {
        core::surface::sample_surface(&self.0, n, seed).map(PyPointCloud).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.0.triangles().len()
    }

    fn __repr__(&self) -> String {
        format!("Mesh(vertices={}, triangles={})", self.0.vertices().len(), self.0.triangles().len())
    }
}

/// Point cloud, optionally carrying the ray index of each point.
#[pyclass(name = "PointCloud", module = "spotlights", from_py_object)]
#[derive(Clone)]
struct PyPointCloud(core::PointCloud);

#[pymethods]
impl PyPointCloud {
    #[new]
    #[pyo3(signature = (points, ray_index = None))]
    fn new(points: Vec<(f64, f64, f64)>, ray_index: Option<Vec<u32>>) -> PyResult<Self> {
        match ray_index {
            Some(idx) => core::PointCloud::ordered(vecs(points), idx).map(PyPointCloud).map_err(to_py),
            None => Ok(PyPointCloud(core::PointCloud::new(vecs(points)))),
        }
    }

    /// Reads a `.ply` or `.xyz` file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        core::io::load_cloud(path).map(PyPointCloud).map_err(to_py)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        core::io::save_cloud(path, &self.0).map_err(to_py)
    }

    #[getter]
    fn points(&self) -> Vec<(f64, f64, f64)> {
        tuples(self.0.points())
    }

    #[getter]
    fn ray_index(&self) -> Option<Vec<u32>> {
        self.0.ray_index().map(<[u32]>::to_vec)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("PointCloud(len={}, ordered={})", self.0.len(), self.0.ray_index().is_some())
    }
}

/// Encoded depths bound to one ray arrangement.
#[pyclass(name = "DepthArray", module = "spotlights", skip_from_py_object)]
#[derive(Clone)]
struct PyDepthArray(core::DepthArray);

#[pymethods]
impl PyDepthArray {
    #[getter]
    fn values(&self) -> Vec<f32> {
        self.0.values().to_vec()
    }

    #[getter]
    fn model_id(&self) -> String {
        self.0.model_id().to_string()
    }

    /// `(center, radius)` of the world frame the object was normalized from.
    #[getter]
    fn frame(&self) -> ((f64, f64, f64), f64) {
        let f = self.0.frame();
        ((f.center.x, f.center.y, f.center.z), f.radius)
    }

    fn hit_ratio(&self) -> f64 {
        core::hit_ratio(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("DepthArray(len={}, hits={})", self.0.len(), self.0.hit_count())
    }
}

/// Fixed arrangement of `n_primary * m_secondary` rays.
#[pyclass(name = "Model", module = "spotlights")]
struct PyModel(core::SpotlightsModel);

#[pymethods]
impl PyModel {
    /// `opening_angle` is in degrees.
    #[new]
    #[pyo3(signature = (n_primary = 32, m_secondary = 64, opening_angle = 60.0))]
    fn new(n_primary: u32, m_secondary: u32, opening_angle: f64) -> PyResult<Self> {
        core::build_model(n_primary, m_secondary, opening_angle.to_radians())
            .map(PyModel)
            .map_err(to_py)
    }

    #[getter]
    fn id(&self) -> String {
        self.0.id().to_string()
    }

    #[getter]
    fn n_primary(&self) -> usize {
        self.0.n_primary()
    }

    #[getter]
    fn m_secondary(&self) -> usize {
        self.0.m_secondary()
    }

    /// Degrees.
    #[getter]
    fn opening_angle(&self) -> f64 {
        self.0.opening_angle().to_degrees()
    }

    #[getter]
    fn ray_count(&self) -> usize {
        self.0.ray_count()
    }

    fn primary_points(&self) -> Vec<(f64, f64, f64)> {
        tuples(self.0.primary_points())
    }

    fn ray_directions(&self) -> Vec<(f64, f64, f64)> {
        tuples(self.0.ray_directions())
    }

    /// Encodes a world-frame mesh, normalizing it into its bounding sphere
    /// unless `normalize` is false (then it must already fit the unit ball).
    #[pyo3(signature = (mesh, normalize = true))]
    fn encode(&self, py: Python<'_>, mesh: &PyMesh, normalize: bool) -> PyResult<PyDepthArray> {
        let mesh = mesh.0.clone();
        let model = &self.0;
        py.detach(|| {
            if normalize {
                core::encode_object(model, &mesh)
            } else {
                core::encode(model, &mesh)
            }
        })
        .map(PyDepthArray)
        .map_err(to_py)
    }

    #[pyo3(signature = (depths, clip = 0.2, world_frame = false))]
    fn decode(&self, depths: &PyDepthArray, clip: f32, world_frame: bool) -> PyResult<PyPointCloud> {
        let r = if world_frame {
            core::decode_world(&self.0, &depths.0, clip)
        } else {
            core::decode(&self.0, &depths.0, clip)
        };
        r.map(PyPointCloud).map_err(to_py)
    }

    /// Builds a depth array for this model from raw values in `[0, 1]`.
    #[pyo3(signature = (values, center = (0.0, 0.0, 0.0), radius = 1.0))]
    fn depths(&self, values: Vec<f32>, center: (f64, f64, f64), radius: f64) -> PyResult<PyDepthArray> {
        if values.len() != self.0.ray_count() {
            return Err(to_py(core::Error::SizeMismatch {
                expected: self.0.ray_count(),
                actual: values.len(),
            }));
        }
        let frame = core::BoundingSphere::new(Vec3::new(center.0, center.1, center.2), radius).map_err(to_py)?;
        core::DepthArray::new(self.0.id(), values, frame).map(PyDepthArray).map_err(to_py)
    }

    fn save(&self, path: &str, depths: &PyDepthArray) -> PyResult<()> {
        core::io::write_spl(path, &self.0.descriptor(), &depths.0).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(n_primary={}, m_secondary={}, opening_angle={:.3}, id={})",
            self.0.n_primary(),
            self.0.m_secondary(),
            self.0.opening_angle().to_degrees(),
            self.0.id()
        )
    }
}

/// Reads an SPL file, returning the model it was encoded with and its depths.
#[pyfunction]
fn read_spl(path: &str) -> PyResult<(PyModel, PyDepthArray)> {
    let file = core::io::read_spl(path).map_err(to_py)?;
    let model = core::SpotlightsModel::from_descriptor(file.descriptor).map_err(to_py)?;
    Ok((PyModel(model), PyDepthArray(file.depths)))
}

#[pyfunction]
#[pyo3(signature = (a, b, norm = "l2"))]
fn chamfer(a: &PyPointCloud, b: &PyPointCloud, norm: &str) -> PyResult<f64> {
    core::chamfer(&a.0, &b.0, parse_norm(norm)?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (pred, gt, norm = "l1"))]
fn accuracy(pred: &PyPointCloud, gt: &PyPointCloud, norm: &str) -> PyResult<f64> {
    core::accuracy(&pred.0, &gt.0, parse_norm(norm)?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (sample, gt, norm = "l2"))]
fn completeness(sample: &PyPointCloud, gt: &PyPointCloud, norm: &str) -> PyResult<f64> {
    core::completeness(&sample.0, &gt.0, parse_norm(norm)?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (clouds, norm = "l2"))]
fn consistency(clouds: Vec<PyPointCloud>, norm: &str) -> PyResult<f64> {
    let clouds: Vec<core::PointCloud> = clouds.into_iter().map(|c| c.0).collect();
    core::consistency(&clouds, parse_norm(norm)?).map_err(to_py)
}

#[pyfunction]
fn ordered_correspondence(a: &PyPointCloud, b: &PyPointCloud) -> PyResult<Vec<(usize, usize)>> {
    core::ordered_correspondence(&a.0, &b.0).map_err(to_py)
}

/// Opening angle in degrees for a cap-sphere radius `r` on a sphere of radius `big_r`.
#[pyfunction]
fn opening_angle(r: f64, big_r: f64) -> PyResult<f64> {
    core::opening_angle(r, big_r).map(f64::to_degrees).map_err(to_py)
}

/// Free-space ray density at a surfel `r` from the centre, tilted by `alpha` radians.
#[pyfunction]
#[pyo3(signature = (r, alpha, theta_steps = 512, phi_steps = 1024))]
fn density_free(r: f64, alpha: f64, theta_steps: usize, phi_steps: usize) -> PyResult<f64> {
    let s = SurfelParams::new(r, alpha).map_err(to_py)?;
    core::density::density_free(
        s,
        QuadratureResolution {
            theta: theta_steps,
            phi: phi_steps,
        },
    )
    .map_err(to_py)
}

#[pyfunction]
fn density_occluded(r: f64, alpha: f64, beta: f64, gamma: f64) -> PyResult<f64> {
    let s = SurfelParams::new(r, alpha).map_err(to_py)?;
    core::density::density_occluded(s, OcclusionParams { beta, gamma }).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (radius = 1.0, subdivisions = 3))]
fn icosphere(radius: f64, subdivisions: u32) -> PyMesh {
    PyMesh(core::shapes::icosphere(radius, subdivisions))
}

#[pyfunction]
#[pyo3(signature = (side = 1.0, center = (0.0, 0.0, 0.0)))]
fn cube(side: f64, center: (f64, f64, f64)) -> PyMesh {
    PyMesh(core::shapes::cube(Vec3::new(center.0, center.1, center.2), side))
}

#[pyfunction]
#[pyo3(signature = (major = 1.0, minor = 0.35, major_segments = 48, minor_segments = 24))]
fn torus(major: f64, minor: f64, major_segments: u32, minor_segments: u32) -> PyMesh {
    PyMesh(core::shapes::torus(major, minor, major_segments, minor_segments))
}

#[pymodule]
fn spotlights(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMesh>()?;
    m.add_class::<PyPointCloud>()?;
    m.add_class::<PyDepthArray>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(read_spl, m)?)?;
    m.add_function(wrap_pyfunction!(chamfer, m)?)?;
    m.add_function(wrap_pyfunction!(accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(completeness, m)?)?;
    m.add_function(wrap_pyfunction!(consistency, m)?)?;
    m.add_function(wrap_pyfunction!(ordered_correspondence, m)?)?;
    m.add_function(wrap_pyfunction!(opening_angle, m)?)?;
    m.add_function(wrap_pyfunction!(density_free, m)?)?;
    m.add_function(wrap_pyfunction!(density_occluded, m)?)?;
    m.add_function(wrap_pyfunction!(icosphere, m)?)?;
    m.add_function(wrap_pyfunction!(cube, m)?)?;
    m.add_function(wrap_pyfunction!(torus, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
