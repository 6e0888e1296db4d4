"""Recompute the frozen crossing-rate calibration constant.

Fits the analytic boundary-flux formula to the trajectory simulator's
sub-cell entry rate on the reference geometry.  The resulting value is
frozen as hetnet.mobility.DEFAULT_CV; rerun only if the formula or the
reference geometry changes.
"""

from hetnet.geometry import ClusterGeometry, SubCell
from hetnet.mobility import RwpParams, SpatialDensity, boundary_flux_integral
from hetnet.simulate import simulate_trajectory


def main():
    geom = ClusterGeometry(600.0, (SubCell(200.0, 300.0),))
    params = RwpParams(v_max=20.0)
    density = SpatialDensity()
    traj = simulate_trajectory(geom, params, n_legs=10**6, seed=7)
    entry_rate = traj.subcells[2].entry_rate
    flux = boundary_flux_integral(geom, 2, density)
    c_v = 2.0 * params.v_eff * flux / (geom.service_radius * entry_rate)
    print(f"simulated entry rate : {entry_rate:.9g} /s")
    print(f"flux integral        : {flux:.9g}")
    print(f"calibrated c_v       : {c_v!r}")


if __name__ == "__main__":
    main()
