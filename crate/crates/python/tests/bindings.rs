use monomorph_py::monomorph_py;
use pyo3::prelude::*;

fn run(code: &str) {
    pyo3::append_to_inittab!(monomorph_py);
    Python::with_gil(|py| {
        let module = py.import_bound("monomorph_py").unwrap();
        let globals = pyo3::types::PyDict::new_bound(py);
        globals.set_item("m", module).unwrap();
        if let Err(e) = py.run_bound(code, Some(&globals), None) {
            e.print(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn module_round_trip() {
    run(r#"
w = m.Word("abAB")
assert str(w) == "abAB" and len(w) == 4
assert str(w * w.inverse()) == "1"
assert m.Word.from_signed([1, -2]).to_signed() == [1, -2]
assert str(m.Word("ab").substitute(["aa", "b"])) == "aab"

g = m.CoreGraph(2, ["ab", "abb"])
assert g.rank == 2 and g.num_vertices == 1 and g.contains("b")
assert g.member("b") == "Ab"
assert m.CoreGraph(2, ["aa"]).member("a") is None

v = m.decide(2, "ab", "aabb")
assert v and v.answer == "YES"
assert str(m.Word("ab").substitute(v.witness)) == "aabb"
assert not m.decide(2, "aa", "aaa", strategy="exhaustive")
assert m.decide_multi(2, ["a", "b"], ["b", "a"])
assert m.oracle(2, "aabb", "aa", 2) is None
assert m.equivalent(2, ["ab"], ["ba"]) is not None
assert m.image_rank(2, ["aa", "aaa"]) == 1
assert len(m.topological_graphs(1)) == 2
assert {"basis": ["a"], "w": "aa"} in m.candidates(2, "aa")

for bad in [lambda: m.Word("a?"), lambda: m.decide(2, "c", "a"), lambda: m.decide(2, "a", "a", strategy="nope")]:
    try:
        bad()
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")
"#);
}
