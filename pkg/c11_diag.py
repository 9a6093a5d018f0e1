import time

import numpy as np

from logchoquard.field import Field, Grid
from logchoquard.functionals import Potential, cos2d_potential
from logchoquard.logkernel import make_kernel_table
from logchoquard.solver import SolveConfig, descend, make_bump_family
from logchoquard.symmetry import lattice_translation

grid = Grid(L=8.0, n=128)
pot = cos2d_potential(grid, 1.0, 0.5, 1.0, 1.0)
table = make_kernel_table(grid)
action = lattice_translation(grid, (1.0, 0.0), (0.0, 1.0))
cfg = SolveConfig(max_iters=4000)

family = make_bump_family(4, action, pot, table, cfg)
print("samples:", len(family.simplex_samples), flush=True)

for idx in (0, 1, 3, 7, 8, 15):
    s = family.simplex_samples[idx]
    vals = np.zeros((grid.n, grid.n))
    for coeff, b in zip(s, family.bumps):
        vals += coeff * b.values
    u0 = Field(grid, vals)
    t0 = time.time()
    try:
        res = descend(u0, action, pot, table, cfg)
    except Exception as exc:  # noqa: BLE001
        res = getattr(exc, "result", None)
        print("idx %d raised %s" % (idx, exc), flush=True)
        if res is None:
            continue
    dt = time.time() - t0
    print(
        "idx %-3d conv=%s iters=%-5d cerami=%.3e phi=%.9f  (%.1f s)"
        % (idx, res.converged, res.iters, res.cerami, res.breakdown.phi, dt),
        flush=True,
    )
    rows = res.trace
    for r in rows[::200] + [rows[-1]]:
        print("    it %-5d phi %.9f cerami %.3e" % (r[0], r[1], r[5]), flush=True)
