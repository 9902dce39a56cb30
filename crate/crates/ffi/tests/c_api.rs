use std::ffi::{c_char, CStr, CString};
use std::ptr;

use dupmatch::format::to_json;
use dupmatch::generate::{generate, GenParams};
use dupmatch::matroid::MatroidSpec;
use dupmatch::verify::Oracle;
use dupmatch::{ConstructionChoice, Edge, Engine, Instance, SolveOptions, Value, VertexRef};
use dupmatch_ffi::*;

struct Handle(*mut DmInstance);

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { dm_instance_free(self.0) }
    }
}

struct Solution(*mut DmSolution);

impl Drop for Solution {
    fn drop(&mut self) {
        unsafe { dm_solution_free(self.0) }
    }
}

fn load(inst: &Instance) -> Handle {
    let text = CString::new(to_json(inst)).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { dm_instance_from_json(text.as_ptr(), &mut out) }, DmStatus::Ok);
    assert!(!out.is_null());
    Handle(out)
}

fn load_err(text: &[u8]) -> (DmStatus, String) {
    let text = CString::new(text).unwrap();
    let mut out = ptr::dangling_mut::<DmInstance>();
    let status = unsafe { dm_instance_from_json(text.as_ptr(), &mut out) };
    assert!(out.is_null());
    (status, last_error().unwrap())
}

fn last_error() -> Option<String> {
    let p = dm_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

fn take_string(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { dm_string_free(p) };
    s
}

fn solve(h: &Handle, engine: u32, construction: u32) -> Result<Solution, DmStatus> {
    let mut out = ptr::null_mut();
    match unsafe { dm_solve(h.0, engine, construction, &mut out) } {
        DmStatus::Ok => Ok(Solution(out)),
        status => {
            assert!(out.is_null());
            Err(status)
        }
    }
}

fn edges(sol: &Solution) -> Vec<usize> {
    let n = unsafe { dm_solution_edges(sol.0, ptr::null_mut(), 0) };
    let mut buf = vec![usize::MAX; n];
    assert_eq!(unsafe { dm_solution_edges(sol.0, buf.as_mut_ptr(), n) }, n);
    buf
}

fn certify(h: &Handle, m: &[usize], cap: usize) -> Result<(bool, String), DmStatus> {
    let mut stable = true;
    let mut cert = ptr::null_mut();
    match unsafe { dm_certify(h.0, m.as_ptr(), m.len(), cap, &mut stable, &mut cert) } {
        DmStatus::Ok => Ok((stable, take_string(cert))),
        status => {
            assert!(cert.is_null());
            assert!(!stable);
            Err(status)
        }
    }
}

fn single_edge() -> Instance {
    let mut inst = Instance::new(1, 1);
    inst.push_edge(Edge::new(0, 0, 0, Value::int(1), Value::int(1)));
    inst
}

#[test]
fn matches_library_on_generated_instances() {
    let codes = [
        (DM_ENGINE_AUTO, Engine::Auto),
        (DM_ENGINE_GS, Engine::Gs),
        (DM_ENGINE_KERNEL, Engine::Kernel),
    ];
    let constructions = [
        (DM_CONSTRUCTION_AUTO, ConstructionChoice::Auto),
        (DM_CONSTRUCTION_GENERAL, ConstructionChoice::General),
    ];
    for seed in 0..40 {
        let params = GenParams { capacity_max: 1 + (seed % 2) as usize, edge_count: 8, ..GenParams::default() };
        let inst = generate(seed, &params).unwrap();
        let h = load(&inst);
        assert_eq!(unsafe { dm_instance_edge_count(h.0) }, inst.edges.len());
        let mut text = ptr::null_mut();
        assert_eq!(unsafe { dm_instance_to_json(h.0, &mut text) }, DmStatus::Ok);
        assert_eq!(take_string(text), to_json(&inst));

        for &(ec, engine) in &codes {
            for &(cc, construction) in &constructions {
                let options = SolveOptions { engine, construction, ..SolveOptions::default() };
                let Ok(expected) = dupmatch::solve(&inst, &options) else {
                    assert_eq!(solve(&h, ec, cc).err(), Some(DmStatus::EngineMismatch));
                    assert!(last_error().unwrap().contains("unit capacities"));
                    continue;
                };
                let sol = solve(&h, ec, cc).unwrap();
                assert_eq!(last_error(), None);
                assert_eq!(edges(&sol), expected.matching.edges());
                assert_eq!(unsafe { dm_solution_size(sol.0) }, expected.size);
                assert_eq!(unsafe { dm_solution_criticality_score(sol.0) }, expected.criticality_score);
                let mut json = ptr::null_mut();
                assert_eq!(unsafe { dm_solution_to_json(sol.0, &mut json) }, DmStatus::Ok);
                assert_eq!(take_string(json), serde_json::to_string(&expected).unwrap());

                let (stable, cert) = certify(&h, &edges(&sol), DM_DEFAULT_CAP).unwrap();
                assert!(stable, "seed {seed}: {cert}");
                let oracle = Oracle::new(&inst, DM_DEFAULT_CAP).unwrap();
                assert_eq!(cert, serde_json::to_string(&oracle.certify(&expected.matching)).unwrap());
            }
        }
    }
}

#[test]
fn certify_rejects_unstable_and_bad_input() {
    let h = load(&single_edge());
    let (stable, cert) = certify(&h, &[], 20).unwrap();
    assert!(!stable);
    let cert: serde_json::Value = serde_json::from_str(&cert).unwrap();
    assert_eq!(cert["blocking_edges"][0]["edge"], 0);

    assert_eq!(certify(&h, &[0, 0], 20).err(), Some(DmStatus::BadArgument));
    assert_eq!(certify(&h, &[0], 0).err(), Some(DmStatus::CapExceeded));
    assert!(last_error().unwrap().contains("cap"));
    let (stable, cert) = certify(&h, &[7], 20).unwrap();
    assert!(!stable);
    assert!(cert.contains("\"feasible\":false"));

    // the certificate pointer is optional; a null edge array is fine when empty
    let mut stable = true;
    assert_eq!(unsafe { dm_certify(h.0, ptr::null(), 0, 20, &mut stable, ptr::null_mut()) }, DmStatus::Ok);
    assert!(!stable);
    assert_eq!(
        unsafe { dm_certify(h.0, ptr::null(), 1, 20, &mut stable, ptr::null_mut()) },
        DmStatus::NullPointer
    );
    assert_eq!(unsafe { dm_certify(h.0, ptr::null(), 0, 20, ptr::null_mut(), ptr::null_mut()) }, DmStatus::NullPointer);
}

#[test]
fn parse_and_validation_errors() {
    let (status, msg) = load_err(b"{\"u_count\": 1");
    assert_eq!(status, DmStatus::ParseError);
    assert!(!msg.is_empty());
    let (status, _) = load_err(br#"{"u_count": 1, "w_count": 1, "edges": [{"id": 0, "u": 0, "w": 0, "p_u": "x"}]}"#);
    assert_eq!(status, DmStatus::ParseError);

    let mut reversed = single_edge();
    reversed.edges[0] = reversed.edges[0].with_u_thresholds(Value::int(5), Value::int(1));
    let (status, msg) = load_err(to_json(&reversed).as_bytes());
    assert_eq!(status, DmStatus::InvalidInstance);
    assert!(msg.contains("invalid instance"), "{msg}");

    let mut out_of_range = single_edge();
    out_of_range.edges[0].w = 3;
    assert_eq!(load_err(to_json(&out_of_range).as_bytes()).0, DmStatus::InvalidInstance);

    let bad_utf8 = [b'{', 0xff, b'}', 0];
    let mut out = ptr::null_mut();
    let status = unsafe { dm_instance_from_json(bad_utf8.as_ptr().cast(), &mut out) };
    assert_eq!(status, DmStatus::InvalidUtf8);
    assert!(out.is_null());
}

#[test]
fn null_handles_and_codes() {
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { dm_instance_from_json(ptr::null(), &mut inst) }, DmStatus::NullPointer);
    assert!(last_error().unwrap().contains("json"));
    let text = CString::new(to_json(&single_edge())).unwrap();
    assert_eq!(unsafe { dm_instance_from_json(text.as_ptr(), ptr::null_mut()) }, DmStatus::NullPointer);

    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { dm_solve(ptr::null(), 0, 0, &mut sol) }, DmStatus::NullPointer);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { dm_instance_to_json(ptr::null(), &mut s) }, DmStatus::NullPointer);
    assert_eq!(unsafe { dm_solution_to_json(ptr::null(), &mut s) }, DmStatus::NullPointer);
    unsafe {
        assert_eq!(dm_instance_edge_count(ptr::null()), 0);
        assert_eq!(dm_solution_size(ptr::null()), 0);
        assert_eq!(dm_solution_criticality_score(ptr::null()), 0);
        assert_eq!(dm_solution_edges(ptr::null(), ptr::null_mut(), 5), 0);
        dm_instance_free(ptr::null_mut());
        dm_solution_free(ptr::null_mut());
        dm_string_free(ptr::null_mut());
    }

    let h = load(&single_edge());
    assert_eq!(solve(&h, 9, DM_CONSTRUCTION_AUTO).err(), Some(DmStatus::BadArgument));
    assert!(last_error().unwrap().contains("engine code 9"));
    assert_eq!(solve(&h, DM_ENGINE_AUTO, 9).err(), Some(DmStatus::BadArgument));
    assert!(solve(&h, DM_ENGINE_AUTO, DM_CONSTRUCTION_SIMPLE).is_ok());
    assert_eq!(last_error(), None);
}

#[test]
fn engine_mismatch_and_partial_edge_copy() {
    let mut inst = Instance::new(1, 2);
    inst.push_edge(Edge::new(0, 0, 0, Value::int(2), Value::int(1)));
    inst.push_edge(Edge::new(1, 0, 1, Value::int(1), Value::int(1)));
    inst.constraints.insert(VertexRef::u(0), MatroidSpec::Capacity { q: 2 });
    let h = load(&inst);
    assert_eq!(solve(&h, DM_ENGINE_GS, DM_CONSTRUCTION_AUTO).err(), Some(DmStatus::EngineMismatch));
    let sol = solve(&h, DM_ENGINE_AUTO, DM_CONSTRUCTION_AUTO).unwrap();
    assert_eq!(edges(&sol), [0, 1]);
    let mut one = [usize::MAX; 2];
    assert_eq!(unsafe { dm_solution_edges(sol.0, one.as_mut_ptr(), 1) }, 2);
    assert_eq!(one, [0, usize::MAX]);
}

#[test]
fn errors_are_per_thread() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { dm_instance_from_json(ptr::null(), &mut out) }, DmStatus::NullPointer);
    assert!(last_error().is_some());
    let other = std::thread::spawn(|| dm_last_error().is_null()).join().unwrap();
    assert!(other);
    assert!(last_error().is_some());
}
