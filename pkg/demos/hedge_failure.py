"""Non-identifiable queries: the algorithms return a hedge instead of a formula."""

import json

from causalprune import corpus, identify, render

for name in ("bow", "guard-projection", "guard"):
    ex = corpus.example(name)
    result = identify(ex.graph, ex.y, ex.x, "pid")
    print(f"== {name}: P({','.join(sorted(ex.y))} | do({','.join(sorted(ex.x))}))")
    if result.identified:
        print("identified:", render(result.expression))
    else:
        print("hedge:", json.dumps(result.hedge.to_dict()))
