"""How the closed loop changes as the third gain crosses its threshold.

For a range of chi3 values the script records the parabola margin of the
admissibility test and, where admissible, the spectral abscissa of the
generator matrix.  Output is a CSV on stdout or into a file; the
threshold announces itself as the sign change of the margin column.
"""

import argparse
import sys

import numpy as np

from heavychain.discretization import assemble_generator
from heavychain.model import (
    ControllerGains,
    PhysicalParams,
    check_admissibility,
    chi3_threshold,
    derive_physical_thetas,
    rescale,
)
from heavychain.spectral import spectrum


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100, help="grid cells")
    ap.add_argument("--points", type=int, default=25)
    ap.add_argument("--span", type=float, default=3.0,
                    help="scan up to span * threshold")
    ap.add_argument("--out", default="-", help="CSV path or - for stdout")
    args = ap.parse_args()

    params = PhysicalParams(rho=1.0, L=1.0, m_p=1.0, m_c=1.0, g=9.81)
    thr = chi3_threshold(params)
    chi3s = np.linspace(0.25 * thr, args.span * thr, args.points)

    lines = ["chi3,margin,admissible,abscissa"]
    for chi3 in map(float, chi3s):
        gains = ControllerGains(chi1=1.0, chi2=1.0, chi3=chi3)
        m = rescale(params, derive_physical_thetas(params, gains))
        rep = check_admissibility(m)
        if rep.admissible:
            absc = repr(spectrum(assemble_generator(m, args.n)).abscissa)
        else:
            absc = ""
        lines.append(f"{chi3!r},{rep.parabola_margin!r},"
                     f"{str(rep.admissible).lower()},{absc}")

    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.out} (threshold chi3 = {thr:.6f})")


if __name__ == "__main__":
    main()
