"""Selectivity switch and electro-osmotic pumping of a protein pore.

The ClyA-like lumen (negative wall charge inside a narrow, flared channel)
conducts mostly cations at low salt. As the bulk concentration grows the
double layer is screened and the anion, which is more mobile here, takes over.
The volume flux Q_eo through the outlet is largest at an intermediate
concentration where the double layer is still charged but no longer fills the
lumen.

Run from the repository root: ``python3 demos/clya_selectivity.py``.
"""
from asympnps import load_preset, observables as obs, solve_steady

CONCENTRATIONS = (0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0)


def main():
    for dphi in (-6.0, 6.0):
        print(f"dphi = {dphi:+.0f}")
        print("   n      t+      t-   Q_eo/dphi")
        for n in CONCENTRATIONS:
            sol = solve_steady(load_preset("clya").with_overrides(dphi=dphi, nbulk=n).problem())
            m = obs.transport_metrics(sol)
            print(f"{n:5.2f}  {m.t[0]:6.3f}  {m.t[1]:6.3f}  {m.Q_eo / dphi:8.4f}")


if __name__ == "__main__":
    main()
