"""Regenerate the bundled logical representatives of the 144-qubit code.

The shipped representatives are re-picked within their logical classes to
make large injectable sets pairable and well protected. The search is
seeded, so rerunning this script reproduces the bundled file byte for byte.

Usage: python tools/regenerate_bb_logicals.py [out.json]
"""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from msilab.codes import bb_144_spec, build_bb, validate  # noqa: E402
from msilab.injector import optimize_for_injection  # noqa: E402


def main() -> None:
    out = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else \
        pathlib.Path(__file__).resolve().parents[1] / "src" / "msilab" / "data" / "bb_144_logicals.json"
    code = build_bb(bb_144_spec())
    code = optimize_for_injection(code, seed=0)
    code = optimize_for_injection(code, seed=7)
    bad = validate(code)
    if bad:
        raise SystemExit(f"optimized representatives failed validation: {bad}")
    doc = {"x": [p.x.tolist() for p in code.logical_x],
           "z": [p.z.tolist() for p in code.logical_z]}
    out.write_text(json.dumps(doc) + "\n")
    print(f"wrote {out}")
    print("X weights:", [p.weight for p in code.logical_x])
    print("Z weights:", [p.weight for p in code.logical_z])


if __name__ == "__main__":
    main()
