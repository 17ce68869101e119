"""Current-voltage curves of a charged trumpet-shaped pore.

The pore narrows parabolically from radius 10 at both ends to 1.5 in the
middle, and carries a positive wall charge along most of its length. The
script compares the model without fluid flow (Pe = 0) against the flow-coupled
model and shows how ion crowding (a > 0) changes the peak electro-osmotic
velocity at dphi = 8. Shape and charge are mirror symmetric about the
middle, so the curves are odd in dphi: no rectification.

Run from the repository root: ``python3 demos/trumpet_iv.py``.
"""
from dataclasses import replace

import numpy as np

from asympnps import load_preset, observables as obs, solve_steady


def trumpet(coupled=True, **kw):
    case = load_preset("trumpet").with_overrides(**kw)
    if not coupled:
        case = replace(case, groups=replace(case.groups, Pe=0.0))
    return case


def main():
    print(" dphi    I+ (Pe=0)   I- (Pe=0)   I+ (flow)   I- (flow)")
    initial = {}
    for dphi in np.linspace(-20, 20, 9):
        row = []
        for coupled in (False, True):
            sol = solve_steady(trumpet(coupled, dphi=dphi).problem(), initial=initial.get(coupled))
            initial[coupled] = sol
            row.extend(obs.current_at(sol).species)
        print(f"{dphi:5.0f}  " + "  ".join(f"{v:10.3f}" for v in row))

    for a in (0.0, 1.0, 5.0):
        sol = solve_steady(trumpet(a=a).problem())
        iz, ir = np.unravel_index(np.argmax(sol.u), sol.u.shape)
        print(f"a = {a:g}: max u = {sol.u[iz, ir]:.3f} at z = {sol.geometry.z[iz]:.2f}, "
              f"r = {sol.r[iz, ir]:.2f}")


if __name__ == "__main__":
    main()
