"""Smoke test for the sblfem_py extension.

Build first:
    cargo build -p sblfem-py --release --features extension-module
then run:
    python3 crates/python/python/smoke_test.py
The module is imported from the environment if installed, otherwise loaded
straight from the cargo target directory.
"""

import importlib.machinery
import importlib.util
import math
import pathlib
import sys


def load():
    try:
        import sblfem_py

        return sblfem_py
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parents[3]
    for profile in ("release", "debug"):
        for name in ("libsblfem_py.so", "libsblfem_py.dylib", "sblfem_py.dll"):
            path = root / "target" / profile / name
            if path.exists():
                loader = importlib.machinery.ExtensionFileLoader("sblfem_py", str(path))
                spec = importlib.util.spec_from_file_location("sblfem_py", path, loader=loader)
                module = importlib.util.module_from_spec(spec)
                loader.exec_module(module)
                return module
    sys.exit("sblfem_py not found; build it with cargo first")


def main():
    s = load()

    # 1D: exact reproduction, C1 continuity, Galerkin orthogonality
    poly = s.Problem1D.catalog("poly", 1.0)
    uh = s.solve_1d(poly, 4)
    assert uh.error_norms(poly)["balanced"] <= 1e-9

    layered = s.Problem1D.catalog("layered", 1e-6)
    errs = []
    for p in (4, 8, 12):
        uh = s.solve_1d(layered, p)
        assert uh.max_c1_jump() <= 1e-10
        assert uh.galerkin_residual(layered) <= 1e-8
        errs.append(uh.error_norms(layered)["balanced"])
    assert errs[0] > errs[1] > errs[2], errs

    ip = s.interpolate_1d(layered, 8)
    for x in ip.mesh.nodes:
        assert abs(ip.eval(x) - layered.exact(x, 0)) <= 1e-12
    rep = s.special_representative(layered, 6)
    assert rep.p == 6

    # correctors and Markov constants
    for tau in (1e-1, 1e-3):
        assert abs(s.corrector_seminorm(tau, 0, 0) - tau**1.5 / math.sqrt(105)) <= 1e-12
    assert abs(s.markov_sup(1, 1) - math.sqrt(12)) <= 1e-10
    assert abs(s.scaled_i0(0.0) - 1.0) <= 1e-15

    # 2D: conforming traces and a converging sequence
    bessel = s.Problem2D.catalog("bessel", 1e-4)
    prev = math.inf
    for p in (2, 3, 4):
        field = s.solve_2d(bessel, p)
        assert field.max_trace_jump() <= 1e-10
        assert field.galerkin_residual(bessel) <= 1e-8
        e = field.error_norms(bessel)["balanced"]
        assert e < prev
        prev = e
    assert len(field.u_values) == field.num_nodes

    # study driver and checks
    csv, fits = s.run_study('dimension = 1\nproblem = "layered"\neps = [1e-2, 1e-6]\np_min = 3\np_max = 8\n')
    assert csv.splitlines()[0].startswith("problem,eps,p,kappa")
    assert len(csv.splitlines()) == 1 + 2 * 6
    assert [f["norm"] for f in fits] == ["energy", "balanced", "max", "c1max"]
    summary = s.verify("CHI_BOUNDS")
    assert summary["suite"] == "CHI_BOUNDS"
    assert all(c["status"] == "pass" for c in summary["checks"])

    print("sblfem_py smoke test passed")


if __name__ == "__main__":
    main()
