"""Show that the projection order changes the formula but not its value.

In this graph W confounds X and Y while Z mediates.  Depending on which
vertex is projected away first, pruning ends up with a back-door or a
front-door adjustment.
"""

from causalprune import corpus, identify, render
from causalprune.oracle import check_expression, sample_scm

ex = corpus.example("order-sensitive")
model = sample_scm(ex.graph, seed=1)
for order in ("reverse-topological", "topological", ["Z"], ["W"]):
    expr = identify(ex.graph, ex.y, ex.x, "pid", order=order).expression
    err = check_expression(expr, model, ex.y, ex.x)
    print(f"{str(order):22} {render(expr):50} max-diff={err:.1e}")
