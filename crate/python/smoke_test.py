"""Smoke test for the hypervc_py extension.

Build it first with
    cargo build -p hypervc-py --release --features extension-module
The script imports an installed hypervc_py if there is one, and otherwise
loads target/release/libhypervc_py.so from the workspace.
"""

import os
import shutil
import sys
import tempfile
from fractions import Fraction
from pathlib import Path


def load():
    try:
        import hypervc_py

        return hypervc_py
    except ImportError:
        pass
    root = Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "libhypervc_py.so"
        if lib.exists():
            tmp = tempfile.mkdtemp()
            shutil.copy(lib, os.path.join(tmp, "hypervc_py.so"))
            sys.path.insert(0, tmp)
            import hypervc_py

            return hypervc_py
    sys.exit("hypervc_py not built; see the docstring")


def main():
    hv = load()

    h = hv.ahk_instance(2, 3)
    assert h.k == 3 and not h.validate(), h
    lp, x = hv.solve_lp(h)
    assert lp == "3/1", lp
    assert sum(Fraction(v) for v in x.values()) > 0

    vc = hv.exact_min_vc(h)
    assert vc["optimal"] and Fraction(vc["weight"]) >= 3
    assert h.is_cover(vc["cover"])

    rep = hv.solve(h, mode="all", name="ahk-2-3")
    assert Fraction(rep["vcExact"]) / Fraction(rep["lpValue"]) <= Fraction(3, 2)

    again = hv.Hypergraph.from_json(h.to_json())
    assert again.to_json() == h.to_json()

    assert hv.chernoff_t("1/2", "1/10") == 232
    fam = [[2, 3], [3]]
    shifted = hv.left_shift(3, fam)
    assert hv.measure(3, fam, "1/3") == hv.measure(3, shifted, "1/3")
    assert hv.is_cross_intersecting(3, [fam, [[1, 2, 3]]], 1)

    csp, planted = hv.LayeredCsp.toy([2, 2], [2, 2], density="1", seed=3)
    labeling, sat, total = csp.best_labeling(0, 1)
    assert sat == total == csp.num_constraints

    red = hv.Reduction(csp, 3, "1/10", 1)
    g = red.hypergraph()
    ids = red.completeness_ids(planted)
    assert g.is_independent(ids)
    assert red.completeness_weight() == "7/30"
    d1 = red.decode(ids, 7)
    d2 = red.decode(ids, 7)
    assert d1 == d2 and d1["pairs"][0]["satisfied"] == "1/1"

    try:
        hv.chernoff_t("0.5", "1/10")
    except ValueError:
        pass
    else:
        raise AssertionError("decimals must be rejected")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
