"""Build a modular network and watch its partition dissolve under rewiring.

We generate a planted-modularity graph, detect communities with both
optimizers, then rewire increasing fractions of edges and track how far
the detected partition drifts from the reference (in Variation of
Information). The observed graph's curve rises slowly compared to a
degree-matched random graph: that gap is the robustness signal.

Run:  python3 demos/01_curves_and_detection.py
"""

import numpy as np

from virobust import (
    GeneratorSpec,
    detect,
    generate,
    modularity,
    rewire,
    rng_stream,
    variation_of_information,
)
from virobust.pipeline import null_base_graph

# A 300-node network with 4 planted modules at modularity ~0.5.
spec = GeneratorSpec(n=300, n_modules=4, avg_degree=8, target_q=0.5, seed=7)
labeled = generate(spec)
g = labeled.graph
print(f"generated: n={g.n}, m={g.m}, planted Q={labeled.achieved_q:.3f}")

for method in ("fastgreedy", "louvain"):
    part = detect(g, method, rng_seed=0)
    print(
        f"{method:>10}: K={part.k}, Q={modularity(g, part):.3f}, "
        f"VI to planted={variation_of_information(part, labeled.planted):.3f}"
    )

# Perturb a growing fraction of edges and measure partition drift.
reference = detect(g, "louvain", rng_seed=0)
null = null_base_graph(g, seed=7)
null_reference = detect(null, "louvain", rng_seed=0)

print("\n  p    VI(observed)  VI(null)")
for p in (0.0, 0.1, 0.25, 0.5, 1.0):
    vi_obs = variation_of_information(
        reference, detect(rewire(g, p, rng_stream(7, 1)), "louvain", rng_seed=0)
    )
    vi_null = variation_of_information(
        null_reference,
        detect(rewire(null, p, rng_stream(7, 2)), "louvain", rng_seed=0),
    )
    print(f"{p:4.2f}   {vi_obs:11.3f}  {vi_null:8.3f}")

print(
    "\nThe observed curve stays below the null curve at small p: the planted"
    "\nstructure resists perturbation, random structure does not."
)
