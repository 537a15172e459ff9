"""Regenerate the committed system/points files under data/.

Every file is derived from the builders in expcert.mechanisms, so the data
directory never drifts from the code. Run from the repository root:

    python3 scripts/regen_data.py
"""

from __future__ import annotations

import pathlib

from expcert import mechanisms
from expcert.expsystems import as_exp_system
from expcert.sysio import serialize_points, serialize_system

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"

BUILDERS = {
    "rr_dyad_poly": mechanisms.two_link_arm_poly,
    "rr_dyad": mechanisms.two_link_arm_exp,
    "rr_dyad_euler": mechanisms.two_link_arm_euler,
    "compliant": mechanisms.compliant_linkage,
    "compliant_alt": mechanisms.compliant_linkage_alt,
}


def main() -> None:
    DATA.mkdir(exist_ok=True)
    for stem, build in BUILDERS.items():
        system, points = build()
        system = as_exp_system(system)
        (DATA / f"{stem}.sys").write_text(serialize_system(system), encoding="utf-8")
        (DATA / f"{stem}.pts").write_text(
            serialize_points(points, "rational"), encoding="utf-8"
        )
        print(f"wrote {stem}.sys ({system.n}+{system.m} rows), {stem}.pts")


if __name__ == "__main__":
    main()
