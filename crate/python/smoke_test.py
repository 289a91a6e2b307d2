#!/usr/bin/env python3
"""Smoke test for the qbd_py extension module.

Builds nothing itself: expects `cargo build -p qbd-py` (or --release) to have
produced the cdylib, copies it next to a temp directory under the right
module name, imports it, and exercises the main entry points.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def locate_cdylib() -> Path:
    candidates = []
    for profile in ("release", "debug"):
        for stem in ("libqbd_py.so", "qbd_py.dll", "libqbd_py.dylib"):
            p = REPO / "target" / profile / stem
            if p.exists():
                candidates.append(p)
    if not candidates:
        sys.exit("build the extension first: cargo build -p qbd-py [--release]")
    return max(candidates, key=lambda p: p.stat().st_mtime)


def import_module():
    lib = locate_cdylib()
    tmp = Path(tempfile.mkdtemp(prefix="qbd_py_"))
    suffix = ".pyd" if lib.suffix == ".dll" else ".so"
    shutil.copy2(lib, tmp / f"qbd_py{suffix}")
    sys.path.insert(0, str(tmp))
    import qbd_py

    return qbd_py


CHECKS = []


def check(name):
    def wrap(fn):
        CHECKS.append((name, fn))
        return fn

    return wrap


@check("model and state basics")
def _(q):
    model = q.Model.baby(16)
    assert model.kind == "baby"
    assert model.alphas()[0] == 1.0 and model.betas()[1] == 1.0
    state = q.State(0.25, 0.6j)
    assert state.is_faithful() and not state.is_pure()
    rho = state.density_matrix()
    assert abs(rho[0][0] - 0.25) < 1e-15
    assert abs(state.nu - 1j * 0.6j * math.sqrt(0.25 * 0.75)) < 1e-15
    rotated = state.rotate(-1)
    assert abs(rotated.zeta + 0.6j) < 1e-15
    try:
        q.State(1.2)
    except ValueError as e:
        assert "lambda" in str(e)
    else:
        raise AssertionError("lambda out of range must raise")


@check("three application paths agree")
def _(q):
    n = 12
    ch = q.Channel(q.Model.jaynes_cummings(0.7, n), q.State(0.3, 0.2 + 0.4j), n)
    x = [[0.0] * n for _ in range(n)]
    x[2][3] = 1.0 + 0.5j
    x[5][5] = -0.25
    outs = [ch.apply_heisenberg(x, mode) for mode in ("kraus", "dilation", "coefficient")]
    for other in outs[1:]:
        dev = max(
            abs(outs[0][i][j] - other[i][j]) for i in range(n) for j in range(n)
        )
        assert dev < 1e-13, dev


@check("invariant state of the baby chain")
def _(q):
    n = 40
    ch = q.Channel(q.Model.baby(n), q.State(0.25, 0.5), n)
    res = ch.invariant_state("baby")
    assert res.kind == "closed_form_baby"
    assert res.residual < 1e-10
    rho = res.rho()
    # geometric diagonal with ratio 1/3
    assert abs(rho[1][1] / rho[0][0] - 1 / 3) < 1e-12
    # predual application leaves it put
    out = ch.apply_schrodinger(rho)
    dev = max(
        abs(out[i][j] - rho[i][j]) for i in range(n - 1) for j in range(n - 1)
    )
    assert dev < 1e-12, dev


@check("pure invariant state parameter")
def _(q):
    n = 48
    ch = q.Channel(q.Model.homogeneous(0.6, 0.8, n), q.State(0.15, 1j), n)
    res = ch.invariant_state("pure")
    assert res.kind == "closed_form_pure"
    assert abs(res.q - 0.8401680504) < 1e-9
    assert res.residual < 1e-8


@check("spectrum, probe, and verdicts")
def _(q):
    n = 16
    ch = q.Channel(q.Model.baby(n), q.State(0.3, 0.4), n)
    fixed_dim, gap, rogue = ch.spectrum()
    assert fixed_dim == 1 and rogue == 0
    assert ch.subharmonic() == "no_subharmonic_found"
    verdicts = ch.expected_verdicts()
    assert verdicts["irreducible"][0] == "yes"
    assert verdicts["weak_mixing"][0] == "yes"

    above = q.Channel(q.Model.baby(n), q.State(0.75, 0.5), n)
    fixed_dim, _, _ = above.spectrum()
    assert fixed_dim > 1, fixed_dim
    family = above.explicit_fixed_points(3)
    assert len(family) == 3


@check("classical restriction and extremality")
def _(q):
    n = 24
    ch = q.Channel(q.Model.homogeneous(0.6, 0.8, n), q.State(0.25, 0.0), n)
    P = ch.classical_transition()
    assert abs(P[3][4] - 0.16) < 1e-15 and abs(P[3][2] - 0.48) < 1e-15
    pi = ch.classical_stationary()
    assert pi is not None and abs(pi[1] / pi[0] - 1 / 3) < 1e-12
    invariant, mass = ch.diagonal_invariant()
    assert invariant and mass < 1e-12

    pure = q.Channel(q.Model.homogeneous(0.6, 0.8, n), q.State(0.3, 1.0), n)
    verdict, product_rank, _ = pure.extremality()
    assert verdict == "extremal" and product_rank == 4
    north = q.Channel(q.Model.homogeneous(0.6, 0.8, n), q.State.plus(), n)
    verdict, _, _ = north.extremality()
    assert verdict == "not_extremal"


def main():
    q = import_module()
    failures = 0
    for name, fn in CHECKS:
        try:
            fn(q)
            print(f"PASS {name}")
        except Exception as e:  # noqa: BLE001 - report and continue
            failures += 1
            print(f"FAIL {name}: {e!r}")
    if failures:
        sys.exit(f"{failures} smoke check(s) failed")
    print("all smoke checks passed")


if __name__ == "__main__":
    main()
