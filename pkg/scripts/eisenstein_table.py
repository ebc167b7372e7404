"""Dual-route table of the twisted coefficients A_{s,gamma}(tau): Taylor route
vs Eisenstein-Hurwitz route, over all classes of Z/M x Z/N.

    python scripts/eisenstein_table.py --M 2 --N 2 --tau 0+1j --smax 6
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from ellassoc.modular import A_s_gamma_closed, A_s_gamma_taylor, TorsionPoint
from ellassoc.presentations import GammaSpec


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--M", type=int, default=2)
    ap.add_argument("--N", type=int, default=2)
    ap.add_argument("--tau", type=str, default="0+1j")
    ap.add_argument("--smax", type=int, default=6)
    ap.add_argument("--out", default="")
    args = ap.parse_args()
    tau = complex(args.tau.replace("i", "j"))
    spec = GammaSpec(args.M, args.N)
    rows = []
    for gamma in spec.elements():
        tp = TorsionPoint(gamma, spec)
        taylor = A_s_gamma_taylor(tp, tau, args.smax)
        closed = A_s_gamma_closed(tp, tau, args.smax)
        for s in range(args.smax + 1):
            rows.append({
                "s": s, "gamma": list(gamma), "M": args.M, "N": args.N,
                "tau": [tau.real, tau.imag],
                "A_closed": [closed[s].real, closed[s].imag],
                "A_taylor": [taylor[s].real, taylor[s].imag],
                "abs_diff": abs(closed[s] - taylor[s]),
            })
    text = json.dumps(rows, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)


if __name__ == "__main__":
    main()
