"""Solve a packaged benchmark system and inspect its error table.

Run:  python3 demos/solve_builtin.py
"""

import numpy as np

from daesvr import SolverConfig, load_problem, report, solve

# The mixed linear system: two half-order fractional rate equations plus one
# algebraic coupling, on [0, 1], with known solutions t^2.5, t^2, sin(t).
problem = load_problem("example3")
print(f"{problem.name}: {problem.unknowns} unknowns on {problem.domain}")

config = SolverConfig(m=10, gamma=1e6)
model = solve(problem, config)
print(f"trained with m={config.m}, gamma={config.gamma:g} "
      f"({model.weights.size} basis coefficients)")

probes = (0.2, 0.4, 0.6, 0.8, 1.0)
rep = report(model, probes)
for u, rows in enumerate(rep.rows):
    print(f"\nu{u + 1}:  {'t':>5} {'exact':>14} {'approx':>14} {'rel err':>10}")
    for row in rows:
        print(f"     {row.point:>5.2f} {row.exact:>14.9f} {row.approx:>14.9f} "
              f"{row.rel_err:>10.2e}")
print("\nl2 error per unknown:", np.array2string(rep.l2, precision=2))

# The same thing from a shell:
#   daesvr solve example3
#   daesvr solve example3 --m 12 --out errors.csv
