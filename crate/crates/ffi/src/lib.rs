//! C ABI for the `urbanlos` simulator.
//!
//! Layouts live behind an opaque [`UlLayout`] handle. Every fallible call
//! returns a [`UlStatus`]; on failure [`ul_last_error`] describes the cause
//! until the next call on the same thread. Strings returned by the library
//! are released with [`ul_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use urbanlos::citygen::{generate_city_indexed, BuiltUpParams, CityLayout, GenConfig};
use urbanlos::geometry::{classify_link, Link, LinkClass};
use urbanlos::montecarlo::{run_sweep, AltitudePolicy, Scenario, SweepConfig, DEFAULT_BIN_WIDTH};
use urbanlos::pathloss::{self, VegGeometry, VegetationParams};
use urbanlos::{Error, Point};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UlStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Infeasible = 3,
    DegenerateLink = 4,
    Model = 5,
    RankDeficient = 6,
    Aggregation = 7,
    InvalidUtf8 = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UlLinkClass {
    Los = 0,
    NlosBuilding = 1,
    NlosTree = 2,
    NlosStreetlight = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UlScenario {
    BuildingsOnly = 0,
    Trees = 1,
    Full = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UlParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UlGenConfig {
    pub area: f64,
    pub n_trees: usize,
    pub n_lights: usize,
    pub n_gu: usize,
    pub d_o: f64,
    pub h_gu: f64,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UlVegParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub k0: f64,
    pub rf: f64,
    pub a0: f64,
    pub freq_ghz: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UlFit {
    pub a: f64,
    pub b: f64,
    pub rmse: f64,
    pub n_points: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UlLayoutCounts {
    pub buildings: usize,
    pub trees: usize,
    pub lights: usize,
    pub users: usize,
}

/// Opaque city layout.
pub struct UlLayout(CityLayout);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> UlStatus {
    match e.root() {
        Error::Domain(_) => UlStatus::Domain,
        Error::Infeasible(_) => UlStatus::Infeasible,
        Error::DegenerateLink => UlStatus::DegenerateLink,
        Error::Model(_) => UlStatus::Model,
        Error::RankDeficient(_) => UlStatus::RankDeficient,
        Error::Aggregation(_) => UlStatus::Aggregation,
        Error::City { .. } => unreachable!("root strips city context"),
    }
}

struct Fail(UlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(UlStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> UlStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UlStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            UlStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn layout_ref<'a>(p: *const UlLayout) -> Result<&'a CityLayout, Fail> {
    p.as_ref().map(|l| &l.0).ok_or_else(|| null("layout"))
}

unsafe fn slice<'a, T>(p: *const T, n: usize, what: &str) -> Result<&'a [T], Fail> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

impl From<UlGenConfig> for GenConfig {
    fn from(c: UlGenConfig) -> Self {
        GenConfig {
            area: c.area,
            n_trees: c.n_trees,
            n_lights: c.n_lights,
            n_gu: c.n_gu,
            d_o: c.d_o,
            h_gu: c.h_gu,
            seed: c.seed,
        }
    }
}

impl From<UlVegParams> for VegetationParams {
    fn from(v: UlVegParams) -> Self {
        VegetationParams {
            a: v.a,
            b: v.b,
            c: v.c,
            k0: v.k0,
            rf: v.rf,
            a0: v.a0,
            freq_ghz: v.freq_ghz,
        }
    }
}

fn params_of(p: UlParams) -> Result<BuiltUpParams, Fail> {
    Ok(BuiltUpParams::new(p.alpha, p.beta, p.gamma)?)
}

/// Message for the most recent failure on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ul_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn ul_gen_config_default() -> UlGenConfig {
    let g = GenConfig::default();
    UlGenConfig {
        area: g.area,
        n_trees: g.n_trees,
        n_lights: g.n_lights,
        n_gu: g.n_gu,
        d_o: g.d_o,
        h_gu: g.h_gu,
        seed: g.seed,
    }
}

#[no_mangle]
pub extern "C" fn ul_veg_params_default() -> UlVegParams {
    let v = VegetationParams::default();
    UlVegParams {
        a: v.a,
        b: v.b,
        c: v.c,
        k0: v.k0,
        rf: v.rf,
        a0: v.a0,
        freq_ghz: v.freq_ghz,
    }
}

/// Generates city `city_index` of the family seeded by `config->seed`.
///
/// # Safety
/// `config` must point to a valid config and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn ul_layout_generate(
    params: UlParams,
    config: *const UlGenConfig,
    city_index: u64,
    out: *mut *mut UlLayout,
) -> UlStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let cfg = GenConfig::from(*config.as_ref().ok_or_else(|| null("config"))?);
        let layout = generate_city_indexed(&params_of(params)?, &cfg, city_index)?;
        *out = Box::into_raw(Box::new(UlLayout(layout)));
        Ok(())
    })
}

/// # Safety
/// `layout` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn ul_layout_free(layout: *mut UlLayout) {
    if !layout.is_null() {
        drop(Box::from_raw(layout));
    }
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ul_layout_from_json(json: *const c_char, out: *mut *mut UlLayout) -> UlStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Fail(UlStatus::InvalidUtf8, e.to_string()))?;
        *out = Box::into_raw(Box::new(UlLayout(CityLayout::from_json(text)?)));
        Ok(())
    })
}

/// Serializes a layout; release the string with [`ul_string_free`].
///
/// # Safety
/// `layout` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ul_layout_to_json(layout: *const UlLayout, out: *mut *mut c_char) -> UlStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let json = layout_ref(layout)?.to_json();
        *out = CString::new(json).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn ul_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `layout` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ul_layout_counts(layout: *const UlLayout, out: *mut UlLayoutCounts) -> UlStatus {
    guard(|| {
        let l = layout_ref(layout)?;
        *out_ref(out, "out")? = UlLayoutCounts {
            buildings: l.buildings.len(),
            trees: l.trees.len(),
            lights: l.lights.len(),
            users: l.users.len(),
        };
        Ok(())
    })
}

/// Position and height of ground user `index`.
///
/// # Safety
/// `layout` must be a live handle; `x`, `y` and `h` writable.
#[no_mangle]
pub unsafe extern "C" fn ul_layout_user(
    layout: *const UlLayout,
    index: usize,
    x: *mut f64,
    y: *mut f64,
    h: *mut f64,
) -> UlStatus {
    guard(|| {
        let l = layout_ref(layout)?;
        let u = l.users.get(index).ok_or_else(|| {
            Fail(
                UlStatus::Domain,
                format!("user {index} out of range ({} users)", l.users.len()),
            )
        })?;
        *out_ref(x, "x")? = u.position.x;
        *out_ref(y, "y")? = u.position.y;
        *out_ref(h, "h")? = u.height;
        Ok(())
    })
}

/// # Safety
/// `layout` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ul_classify_link(
    layout: *const UlLayout,
    abs_x: f64,
    abs_y: f64,
    h_abs: f64,
    gu_x: f64,
    gu_y: f64,
    h_gu: f64,
    out: *mut UlLinkClass,
) -> UlStatus {
    guard(|| {
        let l = layout_ref(layout)?;
        let out = out_ref(out, "out")?;
        let link = Link::new(Point::new(abs_x, abs_y), h_abs, Point::new(gu_x, gu_y), h_gu)?;
        *out = match classify_link(&link, l)? {
            LinkClass::Los => UlLinkClass::Los,
            LinkClass::NlosBuilding => UlLinkClass::NlosBuilding,
            LinkClass::NlosTree => UlLinkClass::NlosTree,
            LinkClass::NlosStreetlight => UlLinkClass::NlosStreetlight,
        };
        Ok(())
    })
}

/// Free-space path loss at 28 GHz (dB).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ul_fspl(d: f64, out: *mut f64) -> UlStatus {
    guard(|| {
        *out_ref(out, "out")? = pathloss::fspl(d)?;
        Ok(())
    })
}

/// Building-blocked path loss (dB).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ul_pl_nlos_building(d: f64, out: *mut f64) -> UlStatus {
    guard(|| {
        *out_ref(out, "out")? = pathloss::pl_nlos_building(d)?;
        Ok(())
    })
}

/// Foliage attenuation (dB) over depth `d_t` for a tree at `d1` from the ABS
/// and `d2` from the user.
///
/// # Safety
/// `params` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ul_veg_attenuation(
    params: *const UlVegParams,
    d1: f64,
    d2: f64,
    d_t: f64,
    r_t: f64,
    out: *mut f64,
) -> UlStatus {
    guard(|| {
        let p = VegetationParams::from(*params.as_ref().ok_or_else(|| null("params"))?);
        let geom = VegGeometry {
            d1,
            d2,
            d_t,
            r_t,
            lambda: p.wavelength(),
        };
        *out_ref(out, "out")? = pathloss::veg_attenuation(&geom, &p)?;
        Ok(())
    })
}

/// Least-squares fit of `pl = A + 10·B·log10(d)` over `n` samples.
///
/// # Safety
/// `d` and `pl` must hold `n` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ul_fit_ab(d: *const f64, pl: *const f64, n: usize, out: *mut UlFit) -> UlStatus {
    guard(|| {
        let d = slice(d, n, "d")?;
        let pl = slice(pl, n, "pl")?;
        let samples: Vec<(f64, f64)> = d.iter().copied().zip(pl.iter().copied()).collect();
        let f = pathloss::fit_ab(&samples)?;
        *out_ref(out, "out")? = UlFit {
            a: f.a,
            b: f.b,
            rmse: f.rmse,
            n_points: f.n_points,
        };
        Ok(())
    })
}

/// P_LoS against elevation over `n_cities` cities; writes one value per
/// angle into `p_los`.
///
/// # Safety
/// `config` must be valid; `angles` and `p_los` must hold `n_angles` values.
#[no_mangle]
pub unsafe extern "C" fn ul_plos_curve(
    params: UlParams,
    config: *const UlGenConfig,
    n_cities: usize,
    angles: *const f64,
    n_angles: usize,
    scenario: UlScenario,
    p_los: *mut f64,
) -> UlStatus {
    guard(|| {
        let cfg = GenConfig::from(*config.as_ref().ok_or_else(|| null("config"))?);
        let angles = slice(angles, n_angles, "angles")?.to_vec();
        if p_los.is_null() && n_angles > 0 {
            return Err(null("p_los"));
        }
        let scenario = match scenario {
            UlScenario::BuildingsOnly => Scenario::buildings_only(),
            UlScenario::Trees => Scenario::trees(),
            UlScenario::Full => Scenario::full(),
        };
        let sweep = SweepConfig {
            n_cities,
            angles,
            altitude: AltitudePolicy::PerAngle,
            scenarios: vec![scenario],
            bin_width: DEFAULT_BIN_WIDTH,
        };
        let out = run_sweep(&params_of(params)?, &cfg, &sweep)?;
        let dst = std::slice::from_raw_parts_mut(p_los, n_angles);
        for (d, r) in dst.iter_mut().zip(&out.results[0].curve.records) {
            *d = r.p_los;
        }
        Ok(())
    })
}
