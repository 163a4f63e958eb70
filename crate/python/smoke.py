#!/usr/bin/env python3
"""Builds the extension module and exercises the Python surface end to end.

Run from anywhere: `python3 python/smoke.py`. Compiles the cdylib in
release mode, copies it next to a temporary import root as `bridgetail.so`,
then checks walk analysis, exact enumeration, the reflection identity, the
tail expansion, and the root-based generating functions.
"""

import subprocess
import sys
import shutil
import tempfile
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def build_module(workdir: Path) -> None:
    subprocess.run(
        ["cargo", "build", "-p", "bridgetail-py", "--release"],
        cwd=ROOT,
        check=True,
    )
    built = None
    for name in ("libbridgetail.so", "libbridgetail.dylib", "bridgetail.dll"):
        candidate = ROOT / "target" / "release" / name
        if candidate.exists():
            built = candidate
            break
    if built is None:
        sys.exit("no built extension found under target/release")
    suffix = ".pyd" if built.suffix == ".dll" else ".so"
    shutil.copy2(built, workdir / f"bridgetail{suffix}")


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        workdir = Path(tmp)
        build_module(workdir)
        sys.path.insert(0, str(workdir))
        import bridgetail

        dyck = bridgetail.Walk("-1:1/2,1:1/2")
        info = dyck.analyze()
        assert info["period"] == 2
        assert float(info["tau"]) == 1.0
        assert float(info["rho"]) == 1.0
        assert info["moments_at_1"] == ("1", "-3", "12")

        assert dyck.bridge_count(3) == "0"
        assert Fraction(dyck.bridge_count(4)) == Fraction(6, 16)

        # Pr(max > 8) at n = 64 from exact enumeration, the reflection
        # formula, and the order-7 expansion must all line up.
        beta = Fraction(dyck.bridge_tail(64, 8)) / Fraction(dyck.bridge_count(64))
        andre = Fraction(bridgetail.andre_reflection(64, 9))
        assert beta == andre
        expansion = dyck.expansion(7)
        value = float(expansion.evaluate(64, "1"))
        assert abs(value - float(andre)) < 1e-7

        import math

        assert abs(float(dyck.rayleigh_tail("1")) - math.exp(-2)) < 1e-12

        duchon = bridgetail.Walk("2:1,-3:1")
        assert duchon.period == 5
        assert duchon.bridge_count(7) == "0"
        assert duchon.bridge_count(5) == "10"
        ratio = float(duchon.vn_estimate(100, 2)) / float(duchon.bridge_count(100))
        assert abs(ratio - 1) < 0.01

        sing = bridgetail.Walk("1:17/24,-2:1/6,-3:1/8").singularities()
        assert len(sing["pairs"]) == 4

        roots = duchon.roots_at("0.25")
        assert len(roots["small"]) == 3 and len(roots["large"]) == 2
        report = duchon.domination(samples=25)
        assert report["violations"] == []

        wm = dyck.wm("0.25", 0)
        assert abs(float(wm[1])) < 1e-30
        bh = dyck.bh("0.25", 2)
        assert float(bh[0]) > 0

        assert bridgetail.hermite_coefficients(3) == ["0", "-3", "0", "1"]
        assert bridgetail.q_family_coefficients(0) == ["1"]

        skeleton = dyck.expansion(4).skeleton_check(2)
        assert skeleton["pass"]
        assert sorted(skeleton["observed"]) == [(2, 0), (3, 1), (4, 0)]

        print("smoke ok")


if __name__ == "__main__":
    main()
