"""Print the Newton step-length table for the arm's sin/cos formulation.

Each row is the step length at one iterate; in the quadratic regime the
exponent doubles row over row until the working precision saturates.

    python3 scripts/residual_table.py --bits 4096 --steps 7
"""

from __future__ import annotations

import argparse

import mpmath as mp

from expcert.mechanisms import two_link_arm_exp
from expcert.refine import newton_refine
from expcert.scalars import PrecisionConfig


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--bits", type=int, default=4096)
    parser.add_argument("--steps", type=int, default=7)
    parser.add_argument("--point", type=int, default=1, choices=(1, 2))
    args = parser.parse_args()

    G, points = two_link_arm_exp()
    z = points[args.point - 1]
    _, table = newton_refine(G, z, args.steps, PrecisionConfig("float", args.bits))
    print(f"step lengths from Z{args.point} at {args.bits} bits")
    for k, beta in table.beta_values(args.bits):
        print(f"  {k:2d}  {mp.nstr(beta, 4)}")
    if table.singular_at is not None:
        print(f"  singular Jacobian at step {table.singular_at}")


if __name__ == "__main__":
    main()
