use super::graph::{Graph, Var};
use super::params::{ParamId, ParamStore};
use super::NumError;

/// Central-difference step used by [`gradient_check`].
pub const FD_STEP: f64 = 1e-5;

/// Denominator floor of [`relative_error`]; central differences at
/// [`FD_STEP`] are only accurate to about `1e-11` absolute.
pub const REL_FLOOR: f64 = 1e-6;

/// Relative error between an analytic and a numeric derivative.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / (analytic.abs() + numeric.abs()).max(REL_FLOOR)
}

/// Compares backprop gradients of a scalar function of the parameters
/// against central finite differences over every coordinate of every
/// parameter. Returns the maximum relative error.
///
/// `f` must be deterministic: build graphs with [`Graph::new`] (no dropout).
pub fn gradient_check<E, F>(store: &mut ParamStore, f: F) -> Result<f64, E>
where
    E: From<NumError>,
    F: Fn(&mut Graph) -> Result<Var, E>,
{
    let ids: Vec<ParamId> = store.ids().collect();
    gradient_check_params(store, &ids, f)
}

/// Like [`gradient_check`] restricted to the listed parameters.
pub fn gradient_check_params<E, F>(store: &mut ParamStore, ids: &[ParamId], f: F) -> Result<f64, E>
where
    E: From<NumError>,
    F: Fn(&mut Graph) -> Result<Var, E>,
{
    let analytic = {
        let mut g = Graph::new(store);
        let loss = f(&mut g)?;
        g.backward(loss)?
    };
    let eval = |store: &ParamStore| -> Result<f64, E> {
        let mut g = Graph::new(store);
        let loss = f(&mut g)?;
        Ok(g.value(loss).item())
    };
    let mut worst: f64 = 0.0;
    for &id in ids {
        let a = analytic.get_or_zero(store, id);
        for k in 0..store.value(id).len() {
            let orig = store.value(id).data()[k];
            store.value_mut(id).data_mut()[k] = orig + FD_STEP;
            let plus = eval(store)?;
            store.value_mut(id).data_mut()[k] = orig - FD_STEP;
            let minus = eval(store)?;
            store.value_mut(id).data_mut()[k] = orig;
            let numeric = (plus - minus) / (2.0 * FD_STEP);
            worst = worst.max(relative_error(a.data()[k], numeric));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::Tensor;

    #[test]
    fn linear_function_is_exact() {
        let mut store = ParamStore::new();
        let w = store.add("w", Tensor::row(vec![0.3, -0.7, 1.1])).unwrap();
        let x = Tensor::matrix(3, 1, vec![2.0, 0.5, -1.0]).unwrap();
        let err = gradient_check::<NumError, _>(&mut store, |g| {
            let wv = g.param(w);
            let xv = g.constant(x.clone());
            g.matmul(wv, xv)
        })
        .unwrap();
        assert!(err < 1e-10, "{}", err);
    }
}
