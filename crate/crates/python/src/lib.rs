use pyo3::prelude::*;

#[pymodule]
fn ringspdc_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
