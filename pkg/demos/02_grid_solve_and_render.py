# Solve a random triangulated-grid instance and save a picture of the result.

import sys
from pathlib import Path

from counterdeception import cd_tree, mst_seed, reattachment_solve
from counterdeception.generate import gen_instance
from counterdeception.render import render_svg

inst = gen_instance("tri", 12, 12, 5, rng_seed=0, budget_factor=2.0)
print(f"{len(inst.graph)} nodes, start {inst.start}, targets {inst.targets}")
print(f"budget {inst.budget:.2f}")

seed = mst_seed(inst.graph, inst.targets, inst.start)
print(f"trimmed MST seed: CD {cd_tree(seed, inst.targets).cd:.3f}, weight {seed.weight:.2f}")

tree, stats = reattachment_solve(inst.graph, inst.targets, inst.start, inst.budget)
report = cd_tree(tree, inst.targets)
print(f"after {stats.reattachments_accepted} reattachments: CD {report.cd:.3f}, "
      f"weight {report.weight:.2f}")
print("CD history:", [round(c, 3) for c in stats.cd_history])

out = Path(sys.argv[1] if len(sys.argv) > 1 else "grid_solution.svg")
out.write_text(render_svg(tree, inst, report))
print("wrote", out)
