//! Gram and cross-kernel assembly.
//!
//! Each entry is an independent scalar evaluation written to its own slot,
//! so the result does not depend on how rows are distributed over workers.

use ndarray::{Array2, ArrayView2};

use super::hyper::KernelHyperParams;
use super::id::KernelId;
use crate::error::{Error, Result};
use crate::numerics::SpdMatrix;
use crate::parallel::{map_rows, Workers};

#[derive(Debug, Clone)]
pub struct KernelGram {
    pub kernel: KernelId,
    pub hyper: KernelHyperParams,
    pub matrix: SpdMatrix,
}

fn at(row: usize, col: usize) -> impl FnOnce(Error) -> Error {
    move |e| Error::KernelAt {
        row,
        col,
        source: Box::new(e),
    }
}

fn check_width(x: &ArrayView2<f64>, h: &KernelHyperParams, what: &'static str) -> Result<()> {
    if x.ncols() != h.d_in {
        return Err(Error::dims(what, h.d_in, x.ncols()));
    }
    Ok(())
}

/// Symmetric Gram matrix over the rows of `x`. Only `j ≤ i` is evaluated;
/// the upper triangle is a mirror.
pub fn gram_matrix(
    kernel: KernelId,
    h: &KernelHyperParams,
    x: ArrayView2<f64>,
    workers: Workers,
) -> Result<KernelGram> {
    check_width(&x, h, "gram_matrix design")?;
    let x = x.as_standard_layout();
    let n = x.nrows();
    let rows: Vec<&[f64]> = x
        .rows()
        .into_iter()
        .map(|r| r.to_slice().expect("standard layout"))
        .collect();
    let lower = map_rows(n, workers, |i| -> Result<Vec<f64>> {
        (0..=i)
            .map(|j| kernel.eval(rows[i], rows[j], h).map_err(at(i, j)))
            .collect()
    })?;
    let matrix = SpdMatrix::from_lower_fn(n, |i, j| lower[i][j]);
    Ok(KernelGram {
        kernel,
        hyper: *h,
        matrix,
    })
}

/// `out[i][j] = k(test_i, train_j)`.
pub fn cross_kernel(
    kernel: KernelId,
    h: &KernelHyperParams,
    x_test: ArrayView2<f64>,
    x_train: ArrayView2<f64>,
    workers: Workers,
) -> Result<Array2<f64>> {
    check_width(&x_test, h, "cross_kernel test design")?;
    check_width(&x_train, h, "cross_kernel train design")?;
    let (x_test, x_train) = (x_test.as_standard_layout(), x_train.as_standard_layout());
    let test: Vec<&[f64]> = x_test
        .rows()
        .into_iter()
        .map(|r| r.to_slice().expect("standard layout"))
        .collect();
    let train: Vec<&[f64]> = x_train
        .rows()
        .into_iter()
        .map(|r| r.to_slice().expect("standard layout"))
        .collect();
    let rows = map_rows(test.len(), workers, |i| -> Result<Vec<f64>> {
        train
            .iter()
            .enumerate()
            .map(|(j, t)| kernel.eval(test[i], t, h).map_err(at(i, j)))
            .collect()
    })?;
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(Array2::from_shape_vec((test.len(), train.len()), flat).expect("row lengths are uniform"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn single_row() {
        let h = KernelHyperParams::with_d_in(2);
        let x = array![[0.6, 0.8]];
        let g = gram_matrix(KernelId::NTKB1, &h, x.view(), Workers::Serial).unwrap();
        assert_eq!(g.matrix.order(), 1);
        assert_eq!(
            g.matrix.get(0, 0),
            KernelId::NTKB1.eval(&[0.6, 0.8], &[0.6, 0.8], &h).unwrap()
        );
    }

    #[test]
    fn laplace_on_equal_rows_is_constant() {
        let h = KernelHyperParams::with_d_in(2);
        let x = array![[0.6, 0.8], [0.6, 0.8], [0.6, 0.8]];
        let g = gram_matrix(KernelId::LAPLACE, &h, x.view(), Workers::Serial).unwrap();
        assert!(g.matrix.as_slice().iter().all(|&v| v == 2.0));
    }

    #[test]
    fn cross_of_train_with_itself_equals_gram() {
        let h = KernelHyperParams::with_d_in(2);
        let x = array![[0.6, 0.8], [1.0, 0.0], [0.0, -1.0], [0.28, 0.96]];
        for k in KernelId::ALL {
            let g = gram_matrix(k, &h, x.view(), Workers::Serial).unwrap();
            let c = cross_kernel(k, &h, x.view(), x.view(), Workers::Serial).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(g.matrix.get(i, j), c[[i, j]], "{k} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn one_test_row_gives_one_row() {
        let h = KernelHyperParams::with_d_in(2);
        let train = array![[0.6, 0.8], [1.0, 0.0], [0.0, -1.0]];
        let test = array![[0.0, 1.0]];
        let c = cross_kernel(
            KernelId::GP2,
            &h,
            test.view(),
            train.view(),
            Workers::Serial,
        )
        .unwrap();
        assert_eq!(c.dim(), (1, 3));
        for j in 0..3 {
            let t = train.row(j).to_vec();
            assert_eq!(c[[0, j]], KernelId::GP2.eval(&[0.0, 1.0], &t, &h).unwrap());
        }
    }

    #[test]
    fn errors_carry_location() {
        let h = KernelHyperParams::with_d_in(2);
        let x = array![[1.0, 0.0], [0.0, 0.0]];
        let err = gram_matrix(KernelId::NTKA1, &h, x.view(), Workers::Serial).unwrap_err();
        assert!(
            matches!(err, Error::KernelAt { row: 1, col: 0, .. }),
            "{err}"
        );
        let wide = array![[1.0, 0.0, 0.0]];
        assert!(matches!(
            gram_matrix(KernelId::NTKB1, &h, wide.view(), Workers::Serial),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
