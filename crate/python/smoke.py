#!/usr/bin/env python3
"""Smoke test for the graphwave_py extension module.

Builds nothing itself: expects `cargo build -p graphwave-py [--release]` to
have produced the cdylib, copies it next to a temp dir under the importable
name, and exercises the main entry points.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def locate_cdylib() -> Path:
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libgraphwave_py.so", "libgraphwave_py.dylib", "graphwave_py.dll")
    ]
    for c in candidates:
        if c.exists():
            return c
    sys.exit("build the extension first: cargo build -p graphwave-py --release")


def main() -> None:
    lib = locate_cdylib()
    tmp = Path(tempfile.mkdtemp(prefix="graphwave_py_"))
    suffix = ".pyd" if lib.suffix == ".dll" else ".so"
    shutil.copy2(lib, tmp / f"graphwave_py{suffix}")
    sys.path.insert(0, str(tmp))
    import graphwave_py as gw

    floor, star = gw.thresholds(3.0, 25.0, -1.0, 3)
    assert floor == 9.0 and star == 18.0, (floor, star)

    bs = gw.beta_star(3.0, 1.0, 2)
    assert abs(bs + 5.758770483143634) < 1e-8, bs

    t1, tn = gw.solve_t_system(3.0, 25.0, -1.0, 3, 1)
    assert 0 < t1 < 1 / math.sqrt(2) < tn < 1
    assert abs(t1 * t1 + tn * tn - 1) < 1e-10

    xs, values = gw.profile_values(3.0, 25.0, -1.0, 3, points=512)
    assert len(values) == 3 and len(values[0]) == len(xs)
    assert values[0][0] > values[0][10] > 0, "attractive tail decays from the vertex"

    acts = gw.actions(3.0, 25.0, -1.0, 3)
    assert abs(acts["action"] - 52.0) < 1e-4, acts
    assert abs(acts["nehari"]) < 1e-4 * acts["charge"] ** 2

    spectrum = gw.morse(3.0, 25.0, -1.0, 3)
    assert (spectrum["n1"], spectrum["n2"]) == (3, 0), spectrum
    assert spectrum["agreement"]

    lambdas = gw.unstable_modes(3.0, 25.0, -1.0, 3, points=192)
    assert lambdas and lambdas[0] > 0.1, lambdas

    xi, w3 = gw.omega3(7.0, 3, -1.0)
    assert 0 < xi < 1 and w3 > 9.0

    run = gw.evolve(3.0, 12.0, -1.0, 3, 1e-3, 0.2, points=384, perturb_bump=1e-3)
    assert run["status"] == "completed", run
    assert run["mass_drift"] < 1e-9, run

    print("graphwave_py smoke test: all checks passed")


if __name__ == "__main__":
    main()
