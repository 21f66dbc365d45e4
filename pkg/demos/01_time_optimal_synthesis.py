"""Time-optimal noise-cancelling pulses and their error-plane curves.

Walks through the core synthesis capability: build the shortest
composite square pulses that cancel quasistatic transverse noise to
first or second order, inspect their geometry (closed loops of
unit-radius arcs), and chart the minimal gate time as a function of the
target rotation.

Usage:
    python demos/01_time_optimal_synthesis.py

Output:
    demos/output/optimal_curves.png
    demos/output/minimal_times.png
"""

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from curvepulse import (
    SynthesisSpec,
    closure_defect,
    curve_from_pulse,
    signed_area,
    solve_k,
    synthesize_curve,
    synthesize_pulse,
    t_min,
)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)


def print_pulse_table(spec):
    pulse = synthesize_pulse(spec)
    print(f"\nphi = {spec.phi:.6f}, order = {spec.order}: "
          f"T_min = {t_min(spec):.6f}")
    print("  segment   duration    amplitude")
    for i, (d, a) in enumerate(pulse.segments, 1):
        print(f"  {i:7d}   {d:8.5f}    {a:+8.1f}")
    curve = synthesize_curve(spec)
    print(f"  closure defect: {closure_defect(curve):.2e}")
    print(f"  net signed area: {signed_area(curve):+.2e}")
    return pulse, curve


def draw_curve(ax, pulse, title):
    curve = curve_from_pulse(pulse, grid_points=4096)
    ax.plot(curve.x, curve.y, lw=1.8)
    ax.plot([0], [0], "k.", ms=8)
    ax.set_aspect("equal")
    ax.set_title(title)
    ax.set_xlabel("x")
    ax.set_ylabel("y")


def main():
    print("=" * 64)
    print("Time-optimal synthesis")
    print("=" * 64)

    spec1 = SynthesisSpec(phi=math.pi / 3, order=1)
    pulse1, _ = print_pulse_table(spec1)

    spec2 = SynthesisSpec(phi=0.0, order=2)
    pulse2, _ = print_pulse_table(spec2)
    print(f"  middle-arc center height k(0) = {solve_k(0.0).k:.7f}")

    fig, axes = plt.subplots(2, 2, figsize=(10, 8))
    draw_curve(axes[0, 0], pulse1, "first order, phi = pi/3")
    draw_curve(axes[0, 1], pulse2, "second order, phi = 0")
    for ax, pulse in ((axes[1, 0], pulse1), (axes[1, 1], pulse2)):
        bounds = np.concatenate([[0.0], np.cumsum([d for d, _ in pulse.segments])])
        t = np.repeat(bounds, 2)[1:-1]
        om = np.repeat([a for _, a in pulse.segments], 2)
        ax.plot(t, om, lw=1.8)
        ax.set_xlabel("t")
        ax.set_ylabel("drive amplitude")
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(OUT / "optimal_curves.png", dpi=150)
    print(f"\nsaved {OUT / 'optimal_curves.png'}")

    # Minimal gate time versus target angle, both cancellation orders.
    phis = np.linspace(0.0, math.pi, 120)
    t1 = [t_min(SynthesisSpec(phi=p, order=1)) for p in phis]
    t2 = [t_min(SynthesisSpec(phi=p, order=2)) for p in phis]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(phis, t1, label="first order")
    ax.plot(phis, t2, label="second order")
    ax.set_xlabel("phi (z-rotation by phi + pi)")
    ax.set_ylabel("minimal duration (1/max amplitude)")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(OUT / "minimal_times.png", dpi=150)
    print(f"saved {OUT / 'minimal_times.png'}")


if __name__ == "__main__":
    main()
