"""Smoke test for the Python bindings.

Builds the extension with cargo if needed, loads it straight from the cargo
target directory, and exercises each exported function once.

Run from the repository root:  python3 python/smoke_test.py
"""

import importlib.util
import math
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parents[1]


def load_module():
    subprocess.run(
        ["cargo", "build", "-p", "microloc-py"], cwd=ROOT, check=True
    )
    built = ROOT / "target" / "debug" / "libmicroloc_py.so"
    if not built.exists():  # macOS
        built = ROOT / "target" / "debug" / "libmicroloc_py.dylib"
    tmp = pathlib.Path(tempfile.mkdtemp())
    target = tmp / "microloc_py.so"
    shutil.copy(built, target)
    spec = importlib.util.spec_from_file_location("microloc_py", target)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def main():
    m = load_module()
    mink = 'name = "minkowski"'
    schw = 'name = "schwarzschild"\nmass = 1.0'

    # flat null ray: xi constant, q identically zero
    rows = m.propagate(mink, [0, 0, 0, 0], [1, -1, 0, 0], 1.0, 5)
    assert len(rows) == 5
    for row in rows:
        assert abs(row[5] - 1.0) < 1e-12 and abs(row[6] + 1.0) < 1e-12
        assert abs(row[9]) < 1e-12
    assert abs(rows[-1][1] - 2.0) < 1e-9  # t advances at rate 2 g^{00} xi_0

    # null covector construction on a curved background
    xi = m.null_covector(schw, [0.0, 6.0, math.pi / 2, 0.0], [0.6, 0.0, 0.8])
    rows = m.propagate(schw, [0.0, 6.0, math.pi / 2, 0.0], xi, 0.3, 9)
    assert max(abs(r[9]) for r in rows) < 1e-8 * sum(v * v for v in xi)

    # bispinor transport in flat space is the identity
    fibre_re = [float(i == j) for i in range(4) for j in range(4)]
    end = m.transport_fibre(
        mink, [0, 0, 0, 0], [1, -1, 0, 0], 0.5, fibre_re, [0.0] * 16
    )
    for k, (re, im) in enumerate(end):
        want = fibre_re[k]
        assert abs(re - want) < 1e-9 and abs(im) < 1e-9

    # wave front prediction for a null-related pair
    els = m.predict_wf_hadamard(mink, [0, 0, 0, 0], [1, 1, 0, 0])
    assert len(els) == 1
    assert els[0]["frequency_flag"] is True
    assert els[0]["xi"][0] > 0

    # spacelike pair: empty prediction
    assert m.predict_wf_hadamard(mink, [0, 0, 0, 0], [0, 1, 0, 0]) == []

    # massless two-point value at unit spacelike separation
    re, im = m.eval_minkowski_scalar(0.0, [0, 0, 0, 0], [0, 1, 0, 0], 1e-6)
    assert abs(re - 1.0 / (4 * math.pi**2)) < 1e-7
    assert abs(im) < 1e-7

    # invariant checks pass on a curved background
    results = m.run_checks(schw, ["metric-inverse", "anticommutator"], 7)
    assert [r["name"] for r in results] == ["metric-inverse", "anticommutator"]
    assert all(r["pass"] for r in results)

    # unknown check raises ValueError
    try:
        m.run_checks(mink, ["nope"])
    except ValueError:
        pass
    else:
        raise AssertionError("unknown check should raise")

    print("smoke test: all bindings ok")


if __name__ == "__main__":
    main()
