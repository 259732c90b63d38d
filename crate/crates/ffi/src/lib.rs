//! C ABI over `juniward`.
//!
//! Every function returns a [`JuniwardStatus`]. On failure a description is
//! available from [`juniward_last_error_message`] on the same thread. Objects
//! are opaque handles owned by the caller and released with the matching
//! `*_free` function. Panics never cross the boundary; they surface as
//! [`JuniwardStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use juniward::analysis::{self, Pattern};
use juniward::costmap::CostModel;
use juniward::{CostMap, CostParams, DctContainer, Error, QuantTable, WindowMode};

pub const JUNIWARD_MODE_ORIGINAL: u32 = 0;
pub const JUNIWARD_MODE_FIXED: u32 = 1;

pub const JUNIWARD_PATTERN_STRIPES_H: u32 = 0;
pub const JUNIWARD_PATTERN_STRIPES_2D: u32 = 1;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JuniwardStatus {
    Ok = 0,
    InvalidArgument = 1,
    Io = 2,
    NullPointer = 3,
    Panic = 4,
}

/// Quantized DCT coefficients of one luminance plane.
pub struct JuniwardContainer(DctContainer);

/// Per-coefficient embedding costs for one window mode.
pub struct JuniwardCostMap(CostMap);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(JuniwardStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Io { .. } => JuniwardStatus::Io,
            _ => JuniwardStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(JuniwardStatus::NullPointer, format!("{name} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(JuniwardStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> JuniwardStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            JuniwardStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            JuniwardStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn path_arg(p: *const c_char) -> Result<String, Failure> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p).to_str().map(str::to_owned).map_err(|_| invalid("path is not valid UTF-8"))
}

fn mode_arg(mode: u32) -> Result<WindowMode, Failure> {
    match mode {
        JUNIWARD_MODE_ORIGINAL => Ok(WindowMode::Original),
        JUNIWARD_MODE_FIXED => Ok(WindowMode::Fixed),
        m => Err(invalid(format!("unknown window mode {m}"))),
    }
}

fn params(sigma: f64) -> Result<CostParams, Failure> {
    let p = CostParams::with_sigma(sigma);
    p.validate()?;
    Ok(p)
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message for the most recent failure on this thread, or null after a
/// success. The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn juniward_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Reads a DCTC v1 JSON container.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn juniward_container_read(
    path: *const c_char,
    out: *mut *mut JuniwardContainer,
) -> JuniwardStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let c = juniward::read_container(path_arg(path)?)?;
        *out = boxed(JuniwardContainer(c));
        Ok(())
    })
}

/// Writes `container` in canonical DCTC v1 form.
///
/// # Safety
/// `container` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn juniward_container_write(
    container: *const JuniwardContainer,
    path: *const c_char,
) -> JuniwardStatus {
    guard(|| {
        let c = deref(container, "container")?;
        juniward::write_container(&c.0, path_arg(path)?)?;
        Ok(())
    })
}

/// Builds a container from a row-major 8×8 quantization table and
/// `height * width` row-major coefficients.
///
/// # Safety
/// `quant` must point to 64 values and `coeffs` to `height * width` values.
#[no_mangle]
pub unsafe extern "C" fn juniward_container_new(
    height: usize,
    width: usize,
    quant: *const u16,
    coeffs: *const i32,
    out: *mut *mut JuniwardContainer,
) -> JuniwardStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if quant.is_null() {
            return Err(null("quant"));
        }
        if coeffs.is_null() {
            return Err(null("coeffs"));
        }
        let n = height.checked_mul(width).ok_or_else(|| invalid("dimensions overflow"))?;
        let q = std::slice::from_raw_parts(quant, 64);
        let mut steps = [[0u16; 8]; 8];
        for (i, &s) in q.iter().enumerate() {
            steps[i / 8][i % 8] = s;
        }
        let c = DctContainer::from_parts(
            height,
            width,
            QuantTable::new(steps)?,
            std::slice::from_raw_parts(coeffs, n).to_vec(),
        )?;
        *out = boxed(JuniwardContainer(c));
        Ok(())
    })
}

/// Generates a synthetic cover (see `JUNIWARD_PATTERN_*`) with the given
/// texture strength in [0, 1], compressed at `quality`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn juniward_container_synth(
    pattern: u32,
    height: usize,
    width: usize,
    quality: u32,
    seed: u64,
    texture: f64,
    out: *mut *mut JuniwardContainer,
) -> JuniwardStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let pattern = match pattern {
            JUNIWARD_PATTERN_STRIPES_H => Pattern::StripesH,
            JUNIWARD_PATTERN_STRIPES_2D => Pattern::Stripes2d,
            p => return Err(invalid(format!("unknown pattern {p}"))),
        };
        let img = analysis::synth_spatial(pattern, height, width, seed, texture)?;
        *out = boxed(JuniwardContainer(analysis::compress(&img, quality)?));
        Ok(())
    })
}

/// # Safety
/// `container` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn juniward_container_free(container: *mut JuniwardContainer) {
    if !container.is_null() {
        drop(Box::from_raw(container));
    }
}

/// # Safety
/// `container` must come from this library; `height` and `width` must be writable.
#[no_mangle]
pub unsafe extern "C" fn juniward_container_dims(
    container: *const JuniwardContainer,
    height: *mut usize,
    width: *mut usize,
) -> JuniwardStatus {
    guard(|| {
        let c = deref(container, "container")?;
        *out_ref(height, "height")? = c.0.height();
        *out_ref(width, "width")? = c.0.width();
        Ok(())
    })
}

/// Copies `height * width` row-major coefficients into `out`.
///
/// # Safety
/// `out` must have room for `len` values.
#[no_mangle]
pub unsafe extern "C" fn juniward_container_copy_coeffs(
    container: *const JuniwardContainer,
    out: *mut i32,
    len: usize,
) -> JuniwardStatus {
    guard(|| {
        let c = deref(container, "container")?;
        copy_into(c.0.coeffs(), out, len)
    })
}

/// Number of nonzero AC coefficients.
///
/// # Safety
/// `container` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn juniward_container_nzac(
    container: *const JuniwardContainer,
    out: *mut usize,
) -> JuniwardStatus {
    guard(|| {
        *out_ref(out, "out")? = deref(container, "container")?.0.nzac();
        Ok(())
    })
}

/// Writes the 64 row-major steps of the quality-scaled luminance table.
///
/// # Safety
/// `out` must have room for 64 values.
#[no_mangle]
pub unsafe extern "C" fn juniward_quality_table(quality: u32, out: *mut u16) -> JuniwardStatus {
    guard(|| {
        let table = juniward::quality_table(quality)?;
        let flat: Vec<u16> = table.steps().iter().flatten().copied().collect();
        copy_into(&flat, out, 64)
    })
}

/// Top-left corner of the 23×23 residual window of block `(block_row,
/// block_col)` in padded-plane coordinates.
///
/// # Safety
/// `row0` and `col0` must be writable.
#[no_mangle]
pub unsafe extern "C" fn juniward_window_bounds(
    block_row: usize,
    block_col: usize,
    mode: u32,
    row0: *mut usize,
    col0: *mut usize,
) -> JuniwardStatus {
    guard(|| {
        let b = juniward::window_bounds(block_row, block_col, mode_arg(mode)?);
        *out_ref(row0, "row0")? = b.row0;
        *out_ref(col0, "col0")? = b.col0;
        Ok(())
    })
}

/// # Safety
/// `container` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn juniward_costmap_compute(
    container: *const JuniwardContainer,
    mode: u32,
    sigma: f64,
    out: *mut *mut JuniwardCostMap,
) -> JuniwardStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let c = deref(container, "container")?;
        let cm = juniward::compute_costmap(&c.0, mode_arg(mode)?, &params(sigma)?)?;
        *out = boxed(JuniwardCostMap(cm));
        Ok(())
    })
}

/// # Safety
/// `costmap` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn juniward_costmap_free(costmap: *mut JuniwardCostMap) {
    if !costmap.is_null() {
        drop(Box::from_raw(costmap));
    }
}

/// Copies `height * width` row-major costs into `out`. Wet coefficients
/// carry the wet cost.
///
/// # Safety
/// `out` must have room for `len` values.
#[no_mangle]
pub unsafe extern "C" fn juniward_costmap_copy_rho(
    costmap: *const JuniwardCostMap,
    out: *mut f64,
    len: usize,
) -> JuniwardStatus {
    guard(|| copy_into(deref(costmap, "costmap")?.0.rho(), out, len))
}

/// # Safety
/// `costmap` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn juniward_costmap_nzac(costmap: *const JuniwardCostMap, out: *mut usize) -> JuniwardStatus {
    guard(|| {
        *out_ref(out, "out")? = deref(costmap, "costmap")?.0.nzac();
        Ok(())
    })
}

/// Per-block costs, `(height / 8) * (width / 8)` values in row-major order.
///
/// # Safety
/// `out` must have room for `len` values.
#[no_mangle]
pub unsafe extern "C" fn juniward_block_costs(
    container: *const JuniwardContainer,
    mode: u32,
    sigma: f64,
    out: *mut f64,
    len: usize,
) -> JuniwardStatus {
    guard(|| {
        let c = deref(container, "container")?;
        let grid = CostModel::new(&c.0, params(sigma)?)?.block_costs(mode_arg(mode)?);
        copy_into(grid.as_slice(), out, len)
    })
}

/// Simulates embedding `payload` bits per nonzero AC coefficient with costs
/// from `mode` and writes the stego container to `out`. `lambda` may be null.
///
/// # Safety
/// `container` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn juniward_embed(
    container: *const JuniwardContainer,
    mode: u32,
    sigma: f64,
    payload: f64,
    seed: u64,
    out: *mut *mut JuniwardContainer,
    lambda: *mut f64,
) -> JuniwardStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let c = deref(container, "container")?;
        if !(payload > 0.0 && payload <= 3f64.log2()) {
            return Err(invalid(format!("payload {payload} must be in (0, log2 3]")));
        }
        let cm = juniward::compute_costmap(&c.0, mode_arg(mode)?, &params(sigma)?)?;
        let pm = juniward::solve_lambda(&cm, payload)?;
        let stego = juniward::simulate(&pm, &c.0, seed)?;
        if let Some(l) = lambda.as_mut() {
            *l = pm.lambda;
        }
        *out = boxed(JuniwardContainer(stego));
        Ok(())
    })
}

unsafe fn copy_into<T: Copy>(src: &[T], out: *mut T, len: usize) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    if len != src.len() {
        return Err(invalid(format!("buffer holds {len} values, {} required", src.len())));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, len);
    Ok(())
}
