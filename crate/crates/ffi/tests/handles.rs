use std::ffi::CString;
use std::process::Command;
use std::ptr;

use parl_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { parl_last_error(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(255)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn simulate_through_handles() {
    let name = CString::new("1s-3r").unwrap();
    let scale = CString::new("desk").unwrap();
    let mut net = ptr::null_mut();
    unsafe {
        assert_eq!(parl_network_from_preset(name.as_ptr(), scale.as_ptr(), &mut net), ParlStatus::Ok);
        assert_eq!(parl_network_num_links(net), 3);
        let dim = parl_network_state_dim(net);
        let mut env = ptr::null_mut();
        assert_eq!(parl_env_new(net, 7, &mut env), ParlStatus::Ok);
        let mut state = vec![0.0; dim];
        let mut written = 0;
        assert_eq!(parl_env_state(env, state.as_mut_ptr(), dim, &mut written), ParlStatus::Ok);
        assert_eq!(written, dim);
        let mut reward = f64::NAN;
        assert_eq!(parl_env_step(env, [1i64, 2, 3].as_ptr(), 3, &mut reward), ParlStatus::Ok);
        assert!(reward.is_finite());
        assert_eq!(parl_env_step(env, [1i64].as_ptr(), 1, &mut reward), ParlStatus::DimensionMismatch);
        assert!(last_error().contains("expected 3"));
        assert_eq!(parl_env_state(env, state.as_mut_ptr(), 1, &mut written), ParlStatus::BufferTooSmall);
        assert_eq!(parl_env_reset(env), ParlStatus::Ok);
        parl_env_free(env);
        parl_network_free(net);
    }
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("[node.S]\nkind = planet\n").unwrap();
    let mut net = ptr::null_mut();
    unsafe {
        assert_eq!(parl_network_from_config(bad.as_ptr(), &mut net), ParlStatus::InvalidConfig);
        assert!(net.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(parl_network_from_config(ptr::null(), &mut net), ParlStatus::NullPointer);
        let mut s = 0.0;
        assert_eq!(parl_order_up_to(5.0, 0.8, 4, 7.0, 0.8, &mut s), ParlStatus::Ok);
        assert!((s - 27.27).abs() < 0.01);
        assert_eq!(parl_order_up_to(5.0, 0.8, 4, 0.0, 0.8, &mut s), ParlStatus::InvalidArgument);
        parl_network_free(ptr::null_mut());
    }
}

#[test]
fn greedy_action_from_a_critic() {
    let doc = parl_core::valuenet::critic_to_text(&parl_core::valuenet::Critic::zero(vec![1.0, 1.0, 1.0], &[2]));
    let doc = CString::new(doc).unwrap();
    let name = CString::new("smoke").unwrap();
    let scale = CString::new("desk").unwrap();
    unsafe {
        let mut net = ptr::null_mut();
        assert_eq!(parl_network_from_preset(name.as_ptr(), scale.as_ptr(), &mut net), ParlStatus::Ok);
        assert_eq!(parl_network_state_dim(net), 3);
        let mut critic = ptr::null_mut();
        assert_eq!(parl_critic_from_text(doc.as_ptr(), &mut critic), ParlStatus::Ok, "{}", last_error());
        let mut v = f64::NAN;
        assert_eq!(parl_critic_value(critic, [1.0, 2.0, 3.0].as_ptr(), 3, &mut v), ParlStatus::Ok);
        assert_eq!(v, 0.0);
        let mut env = ptr::null_mut();
        assert_eq!(parl_env_new(net, 1, &mut env), ParlStatus::Ok);
        let mut a = [-1i64];
        assert_eq!(parl_greedy_action(env, critic, 0.75, 3, a.as_mut_ptr(), 1), ParlStatus::Ok, "{}", last_error());
        assert!((0..=10).contains(&a[0]));
        assert_eq!(parl_greedy_action(env, critic, 1.5, 3, a.as_mut_ptr(), 1), ParlStatus::InvalidArgument);
        parl_env_free(env);
        parl_critic_free(critic);
        parl_network_free(net);
    }
}

#[test]
fn header_declares_the_interface_and_compiles() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/include/parl.h");
    let header = std::fs::read_to_string(path).unwrap();
    for sym in ["parl_network_from_config", "parl_env_step", "parl_greedy_action", "PARL_STATUS_OK", "typedef struct ParlEnv ParlEnv"] {
        assert!(header.contains(sym), "missing {sym}");
    }
    if let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-x", "c", path]).status() {
        assert!(status.success());
    }
}
