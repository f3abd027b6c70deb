"""Smoke test for the rcpp_py extension.

Build with `maturin develop -m crates/python/Cargo.toml`, or copy
target/release/librcpp_py.so to rcpp_py.so somewhere on PYTHONPATH.
"""

import json
import pathlib

import rcpp_py

ROOT = pathlib.Path(__file__).resolve().parent.parent


def main():
    inst = rcpp_py.Instance.from_text((ROOT / "instances" / "tiny3.rpa").read_text())
    assert inst.ring_count == 4, inst.ring_count
    assert rcpp_py.Instance.from_text(inst.to_text()).rings == inst.rings

    cfg = rcpp_py.SolveConfig("desk")
    assert cfg.deterministic
    report = rcpp_py.solve(inst, cfg)
    print(report.summary_line())
    assert report.status == "optimal"
    assert report.primal_bound == 2 and report.dual_bound == 2
    assert json.loads(report.to_json())["format"] == "rcpp-report-v1"

    ok, violations = rcpp_py.validate(inst, report.solution_text())
    assert ok, violations
    ok, _ = rcpp_py.validate(inst, report.to_json())
    assert ok
    assert report.svg().count("<rect") == 2

    feasible, unknown, infeasible = rcpp_py.enumerate_patterns(inst, cfg)
    assert feasible > 0 and unknown == 0

    assert rcpp_py.brute_force_opt(inst) == 2
    assert rcpp_py.solve_dw_lp(inst) <= 2 + 1e-9
    assert rcpp_py.farley_bound(1.5, -0.1) >= 1

    gen = rcpp_py.generate(3, 2.0, 3.0, 1.0, seed=7)
    assert len(gen.rings) == 3

    try:
        rcpp_py.Instance(1.0, 1.0, [(0.1, 2.0, 1)])
    except ValueError:
        pass
    else:
        raise AssertionError("oversized ring accepted")
    print("smoke test passed")


if __name__ == "__main__":
    main()
