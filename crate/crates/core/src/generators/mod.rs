//! Seeded instance generators and reporting metrics.
//!
//! Every generator seeds a [`ChaCha8Rng`] from the instance seed and switches to a
//! dedicated stream per drawn object (see [`stream`]); the stream ids are listed
//! on each generator and are part of the instance format.

mod csv_input;
mod metrics;
mod recovery;
mod scca;
mod sps;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};

use crate::linalg::Matrix;
use crate::problem::SqcqpProblem;

pub use csv_input::{read_matrix_csv, scca_from_csv, scca_from_data};
pub use metrics::{cca_metrics, metrics, relerr, require_ground_truth, rsnr, CcaMetrics, Metrics};
pub use recovery::{gen_recovery_qcqp, gen_recovery_simplex, BoxKind};
pub use scca::{cca_initial_point, gen_scca_synthetic, SCCA_DEFAULT_TAU};
pub use sps::gen_sps_synthetic;

/// A generated problem with its provenance and, when known, the planted solution.
#[derive(Clone, Debug)]
pub struct InstanceBundle {
    pub problem: SqcqpProblem<f64>,
    pub x_star: Option<Vec<f64>>,
    pub family: String,
    pub seed: u64,
    pub recommended_tau: f64,
    /// Length of the first variable block for canonical-correlation instances.
    pub cca_split: Option<usize>,
    /// Generator parameters, written to the instance's `"meta"` object.
    pub meta: Map<String, Value>,
}

impl InstanceBundle {
    fn new(problem: SqcqpProblem<f64>, family: &str, seed: u64, recommended_tau: f64) -> Self {
        let mut meta = Map::new();
        meta.insert("family".into(), family.into());
        meta.insert("seed".into(), seed.into());
        meta.insert("recommended_tau".into(), recommended_tau.into());
        Self { problem, x_star: None, family: family.into(), seed, recommended_tau, cca_split: None, meta }
    }

    fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.meta.insert(key.into(), value.into());
        self
    }
}

/// Generator for stream `id` of instance `seed`.
pub fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// `DᵀD` for a row-major `D`.
pub(crate) fn gram(d: &Matrix<f64>) -> Matrix<f64> {
    let (rows, cols) = (d.rows(), d.cols());
    let mut out = vec![0.0; cols * cols];
    // SAFETY: the strides describe `Dᵀ` (cols x rows), `D` (rows x cols) and the
    // cols x cols output, all inside their buffers.
    unsafe {
        matrixmultiply::dgemm(
            cols,
            rows,
            cols,
            1.0,
            d.data().as_ptr(),
            1,
            cols as isize,
            d.data().as_ptr(),
            cols as isize,
            1,
            0.0,
            out.as_mut_ptr(),
            cols as isize,
            1,
        );
    }
    let mut g = Matrix::from_row_major(cols, cols, out).expect("square buffer");
    // dgemm may round the two triangles differently.
    g.symmetrize();
    g
}

/// `X Yᵀ` for row-major `X` (a x N) and `Y` (b x N).
pub(crate) fn outer_gram(x: &Matrix<f64>, y: &Matrix<f64>) -> Matrix<f64> {
    assert_eq!(x.cols(), y.cols());
    let (a, b, k) = (x.rows(), y.rows(), x.cols());
    let mut out = vec![0.0; a * b];
    // SAFETY: `X` is a x k row-major, `Yᵀ` is read through column strides of `Y`.
    unsafe {
        matrixmultiply::dgemm(
            a,
            k,
            b,
            1.0,
            x.data().as_ptr(),
            k as isize,
            1,
            y.data().as_ptr(),
            1,
            k as isize,
            0.0,
            out.as_mut_ptr(),
            b as isize,
            1,
        );
    }
    Matrix::from_row_major(a, b, out).expect("buffer size")
}
