from itertools import combinations
from typing import List, Sequence

from app.algorithms.matroid import MatroidOracle, Sense, WeightedElement


def matroid_basis_exhaustive(oracle: MatroidOracle, elements: Sequence[WeightedElement], sense: Sense = Sense.MIN) -> List[WeightedElement]:
    """Enumerate every subset; return the extreme basis in greedy order."""
    elements = sorted(elements, key=lambda x: x.key)
    bases = []
    for k in range(len(elements), -1, -1):
        bases = [
            list(group)
            for group in combinations(elements, k)
            if oracle.independent([x.decoration for x in group])
        ]
        if bases:
            break
    if Sense(sense) is Sense.MIN:
        return min(bases, key=lambda b: [x.key for x in b])
    best = max(bases, key=lambda b: sorted((x.key for x in b), reverse=True))
    return sorted(best, key=lambda x: x.key, reverse=True)
