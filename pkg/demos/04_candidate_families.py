"""Candidate curve families and the zero-area parameter.

Shows why the all-arc family wins: of the three tangent three-segment
closed-loop families (line-arc-line, arc-line-arc, three arcs), the
all-arc one is strictly shortest at every cusp angle.  Also charts the
middle-arc center height k(phi) fixed by the zero-net-area condition
for the five-arc second-order solution.

Usage:
    python demos/04_candidate_families.py

Output:
    demos/output/family_lengths.png
    demos/output/k_of_phi.png
"""

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from curvepulse import family_lengths, solve_k

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)


def main():
    phis = np.linspace(0.05, math.pi - 0.01, 200)
    lal = []
    ala = []
    aaa = []
    for p in phis:
        fl = family_lengths(p)
        lal.append(fl.line_arc_line)
        ala.append(fl.arc_line_arc)
        aaa.append(fl.three_arc)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(phis, lal, label="line-arc-line")
    ax.plot(phis, ala, label="arc-line-arc")
    ax.plot(phis, aaa, label="three arcs")
    ax.set_xlabel("phi")
    ax.set_ylabel("curve length")
    ax.set_ylim(0, 14)
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(OUT / "family_lengths.png", dpi=150)
    print(f"saved {OUT / 'family_lengths.png'}")

    sample = family_lengths(math.pi / 2)
    print(f"lengths at phi = pi/2: line-arc-line {sample.line_arc_line:.3f}, "
          f"arc-line-arc {sample.arc_line_arc:.3f}, "
          f"three arcs {sample.three_arc:.3f}")

    phis_k = np.linspace(0.0, math.pi, 80)
    ks = [solve_k(p).k for p in phis_k]
    print(f"k(0) = {ks[0]:.7f}, k(pi) = {ks[-1]:.1e}")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(phis_k, ks)
    ax.set_xlabel("phi")
    ax.set_ylabel("k (middle-arc center height)")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(OUT / "k_of_phi.png", dpi=150)
    print(f"saved {OUT / 'k_of_phi.png'}")


if __name__ == "__main__":
    main()
