//! C interface to the inventory simulator, value networks and the
//! per-step MILP actor.
//!
//! Every object crosses the boundary as an opaque pointer created by a
//! `*_new`/`*_from_*` function and released by the matching `*_free`.
//! Functions return a [`ParlStatus`]; on failure the message is available
//! from [`parl_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use parl_core::env::{parse_config, preset, Action, Env, Network, Preset, Scale};
use parl_core::heuristics::analytic_order_up_to;
use parl_core::parl::{GreedyPolicy, SamplingConfig};
use parl_core::solver::StepMethod;
use parl_core::valuenet::{critic_from_text, Critic};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    DimensionMismatch = 4,
    SolverFailure = 5,
    InvalidArgument = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// A validated network.
pub struct ParlNetwork(Network);

/// A simulator with its own random stream.
pub struct ParlEnv(Env);

/// A value network with its input scaling.
pub struct ParlCritic(Critic);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: ParlStatus, msg: impl Into<String>) -> ParlStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
    status
}

fn guard(f: impl FnOnce() -> ParlStatus) -> ParlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(ParlStatus::Panic, "internal panic"),
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, ParlStatus> {
    if p.is_null() {
        return Err(fail(ParlStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(ParlStatus::InvalidUtf8, "string is not UTF-8"))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> ParlStatus {
    *out = Box::into_raw(Box::new(value));
    ParlStatus::Ok
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn parl_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Parses a network configuration document.
///
/// # Safety
/// `doc` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn parl_network_from_config(doc: *const c_char, out: *mut *mut ParlNetwork) -> ParlStatus {
    guard(|| {
        if out.is_null() {
            return fail(ParlStatus::NullPointer, "null output handle");
        }
        let doc = match text(doc) {
            Ok(d) => d,
            Err(s) => return s,
        };
        match parse_config(doc).and_then(Network::new) {
            Ok(net) => put(out, ParlNetwork(net)),
            Err(e) => fail(ParlStatus::InvalidConfig, e.to_string()),
        }
    })
}

/// Builds a named benchmark network at `desk` or `paper` scale.
///
/// # Safety
/// `name` and `scale` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn parl_network_from_preset(
    name: *const c_char,
    scale: *const c_char,
    out: *mut *mut ParlNetwork,
) -> ParlStatus {
    guard(|| {
        if out.is_null() {
            return fail(ParlStatus::NullPointer, "null output handle");
        }
        let (name, scale) = match (text(name), text(scale)) {
            (Ok(n), Ok(s)) => (n, s),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match (name.parse::<Preset>(), scale.parse::<Scale>()) {
            (Ok(p), Ok(s)) => put(out, ParlNetwork(preset(p, s))),
            (Err(e), _) | (_, Err(e)) => fail(ParlStatus::InvalidConfig, e),
        }
    })
}

/// # Safety
/// `net` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn parl_network_free(net: *mut ParlNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// # Safety
/// `net` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn parl_network_num_links(net: *const ParlNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.num_links())
}

/// # Safety
/// `net` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn parl_network_state_dim(net: *const ParlNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.state_dim())
}

/// Creates a simulator over a copy of `net`, reset from `seed`.
///
/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn parl_env_new(net: *const ParlNetwork, seed: u64, out: *mut *mut ParlEnv) -> ParlStatus {
    guard(|| match (net.as_ref(), out.is_null()) {
        (Some(n), false) => put(out, ParlEnv(Env::new(n.0.clone(), seed))),
        _ => fail(ParlStatus::NullPointer, "null network or output handle"),
    })
}

/// # Safety
/// `env` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn parl_env_free(env: *mut ParlEnv) {
    if !env.is_null() {
        drop(Box::from_raw(env));
    }
}

/// # Safety
/// `env` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn parl_env_reset(env: *mut ParlEnv) -> ParlStatus {
    guard(|| match env.as_mut() {
        Some(e) => {
            e.0.reset();
            ParlStatus::Ok
        }
        None => fail(ParlStatus::NullPointer, "null env"),
    })
}

/// Writes the state vector into `buf`. `written` receives the dimension
/// even when the buffer is too small.
///
/// # Safety
/// `env` must be a live handle, `buf` must hold `len` doubles, `written`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn parl_env_state(env: *const ParlEnv, buf: *mut f64, len: usize, written: *mut usize) -> ParlStatus {
    guard(|| {
        let (Some(e), false, false) = (env.as_ref(), buf.is_null(), written.is_null()) else {
            return fail(ParlStatus::NullPointer, "null argument");
        };
        let v = e.0.state.to_vector(&e.0.net);
        *written = v.len();
        if len < v.len() {
            return fail(ParlStatus::BufferTooSmall, format!("state has {} entries", v.len()));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), buf, v.len());
        ParlStatus::Ok
    })
}

/// Requests `action` (one order per link), draws demand and advances one
/// period. The per-period reward goes to `reward`.
///
/// # Safety
/// `env` must be a live handle, `action` must hold `n` values, `reward`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn parl_env_step(env: *mut ParlEnv, action: *const i64, n: usize, reward: *mut f64) -> ParlStatus {
    guard(|| {
        let (Some(e), false, false) = (env.as_mut(), action.is_null(), reward.is_null()) else {
            return fail(ParlStatus::NullPointer, "null argument");
        };
        if n != e.0.net.num_links() {
            return fail(ParlStatus::DimensionMismatch, format!("expected {} orders, got {n}", e.0.net.num_links()));
        }
        let a = Action(std::slice::from_raw_parts(action, n).to_vec());
        match e.0.step(&a) {
            Ok((_, _, rb)) => {
                *reward = rb.total;
                ParlStatus::Ok
            }
            Err(err) => fail(ParlStatus::InvalidArgument, err.to_string()),
        }
    })
}

/// Loads a critic from its text format.
///
/// # Safety
/// `doc` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn parl_critic_from_text(doc: *const c_char, out: *mut *mut ParlCritic) -> ParlStatus {
    guard(|| {
        if out.is_null() {
            return fail(ParlStatus::NullPointer, "null output handle");
        }
        let doc = match text(doc) {
            Ok(d) => d,
            Err(s) => return s,
        };
        match critic_from_text(doc) {
            Ok(c) => put(out, ParlCritic(c)),
            Err(e) => fail(ParlStatus::InvalidConfig, e.to_string()),
        }
    })
}

/// # Safety
/// `critic` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn parl_critic_free(critic: *mut ParlCritic) {
    if !critic.is_null() {
        drop(Box::from_raw(critic));
    }
}

/// Value of a raw (unscaled) state vector.
///
/// # Safety
/// `critic` must be a live handle, `state` must hold `n` doubles, `value`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn parl_critic_value(
    critic: *const ParlCritic,
    state: *const f64,
    n: usize,
    value: *mut f64,
) -> ParlStatus {
    guard(|| {
        let (Some(c), false, false) = (critic.as_ref(), state.is_null(), value.is_null()) else {
            return fail(ParlStatus::NullPointer, "null argument");
        };
        match c.0.value(std::slice::from_raw_parts(state, n)) {
            Ok(v) => {
                *value = v;
                ParlStatus::Ok
            }
            Err(e) => fail(ParlStatus::DimensionMismatch, e.to_string()),
        }
    })
}

/// Greedy action in the simulator's current state: `eta` quantile
/// samples, discount `gamma`, branch and bound. Writes one order per link.
///
/// # Safety
/// `env` and `critic` must be live handles, `action` must hold `n` values.
#[no_mangle]
pub unsafe extern "C" fn parl_greedy_action(
    env: *const ParlEnv,
    critic: *const ParlCritic,
    gamma: f64,
    eta: usize,
    action: *mut i64,
    n: usize,
) -> ParlStatus {
    guard(|| {
        let (Some(e), Some(c), false) = (env.as_ref(), critic.as_ref(), action.is_null()) else {
            return fail(ParlStatus::NullPointer, "null argument");
        };
        let net = &e.0.net;
        if n != net.num_links() {
            return fail(ParlStatus::DimensionMismatch, format!("expected {} orders, got {n}", net.num_links()));
        }
        if !(gamma > 0.0 && gamma < 1.0) || eta == 0 {
            return fail(ParlStatus::InvalidArgument, "need 0 < gamma < 1 and eta > 0");
        }
        let sampling = SamplingConfig { eta, ..SamplingConfig::default() };
        let policy = match GreedyPolicy::new(net, c.0.clone(), sampling, gamma, StepMethod::default()) {
            Ok(p) => p,
            Err(err) => return fail(ParlStatus::InvalidArgument, err.to_string()),
        };
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
        match policy.solve(net, &e.0.state, &mut rng) {
            Ok(r) => {
                ptr::copy_nonoverlapping(r.action.0.as_ptr(), action, n);
                ParlStatus::Ok
            }
            Err(err) => fail(ParlStatus::SolverFailure, err.to_string()),
        }
    })
}

/// Order-up-to level for per-period `N(mu, sigma)` demand, lead time
/// `lead`, shortage cost `b` and holding cost `h`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn parl_order_up_to(mu: f64, sigma: f64, lead: usize, b: f64, h: f64, out: *mut f64) -> ParlStatus {
    guard(|| {
        if out.is_null() {
            return fail(ParlStatus::NullPointer, "null output");
        }
        match analytic_order_up_to(mu, sigma, lead, b, h) {
            Ok(s) => {
                *out = s;
                ParlStatus::Ok
            }
            Err(e) => fail(ParlStatus::InvalidArgument, e.to_string()),
        }
    })
}
