"""Electro-osmotic flow reversal in a straight charged pore.

A positively charged band on the wall of a cylinder (R = 5, L = 25) holds an
anion-rich double layer. An applied potential drags that layer, and with it
the fluid, toward one end; a pressure difference pushes the fluid the other
way. This script

1. computes the area-integrated zeta potential <zeta>,
2. locates the pressure at which the net flow <u> vanishes and compares it
   with the Helmholtz-Smoluchowski estimate dp = C_u <zeta> dphi,
3. splits the flow into Poiseuille, Helmholtz-Smoluchowski and double-layer
   parts,
4. locates the pressure at which the cation current changes sign.

Run from the repository root: ``python3 demos/cylinder_flow_transitions.py``.
"""
import logging

from scipy.optimize import brentq

from asympnps import load_preset, observables as obs, solve_steady


def solve(**kw):
    return solve_steady(load_preset("cylinder").with_overrides(**kw).problem())


def main():
    logging.basicConfig(level=logging.WARNING)
    ref = solve(dphi=-8.0)
    zeta = obs.zeta_mean(ref)
    C_u = obs.flow_coefficient(ref.problem.groups, 5.0, 25.0)
    print(f"<zeta> = {zeta:.2f}, C_u = {C_u:.3e}")

    for dphi in (-8.0, -0.2):
        guess = C_u * zeta * dphi
        root = brentq(lambda dp: obs.mean_flow(solve(dphi=dphi, dp=dp)), 0.0, 3 * guess,
                      xtol=1e-8)
        print(f"dphi = {dphi:5.1f}: <u> = 0 at dp = {root:.5f} (estimate {guess:.5f})")

    d = obs.flow_decomposition(solve(dphi=-8.0, dp=0.1))
    print(f"flow parts at dphi = -8, dp = 0.1: PF {d.PF:.4f}, HS {d.HS:.4f}, "
          f"EDL {d.EDL:.2e}, total {d.total:.4f}")

    for dphi in (1.0, 2.0):
        threshold = obs.current_decomposition(solve(dphi=dphi)).threshold[0]
        root = brentq(lambda dp: obs.current_at(solve(dphi=dphi, dp=dp)).species[0], 0.0,
                      3 * threshold * dphi, xtol=1e-8)
        print(f"dphi = {dphi:.0f}: I_+ = 0 at dp = {root:.4f} (small-potential estimate "
              f"{threshold * dphi:.4f})")


if __name__ == "__main__":
    main()
