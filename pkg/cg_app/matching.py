"""
Label-aware homomorphisms between labeled graphs.

A pattern vertex may map onto a target vertex when every path of its label
is a prefix of the corresponding target path and both repeat the same
argument positions; a pattern edge needs a target edge between the images
with the same oriented positions and a prefix path.
"""

from collections import deque
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .dfs import EdgeLabel, LabeledGraph, NodeLabel
from .models import TypePath


def is_prefix(prefix: TypePath, path: TypePath) -> bool:
    return len(prefix) <= len(path) and path[:len(prefix)] == prefix


def node_generalizes(pattern: NodeLabel, target: NodeLabel) -> bool:
    relation, arguments, classes = pattern
    target_relation, target_arguments, target_classes = target
    if len(arguments) != len(target_arguments) or bool(relation) != bool(target_relation):
        return False
    if classes != target_classes or not is_prefix(relation, target_relation):
        return False
    return all(is_prefix(a, b) for a, b in zip(arguments, target_arguments))


def edge_generalizes(pattern: EdgeLabel, target: EdgeLabel) -> bool:
    return pattern[0] == target[0] and pattern[1] == target[1] and is_prefix(pattern[2], target[2])


def _search_order(pattern: LabeledGraph) -> List[Tuple[int, Optional[int]]]:
    """Vertices in BFS order, each with an earlier neighbour to draw candidates from."""
    order: List[Tuple[int, Optional[int]]] = []
    seen = set()
    for start in range(pattern.size):
        if start in seen:
            continue
        seen.add(start)
        order.append((start, None))
        queue = deque([start])
        while queue:
            vertex = queue.popleft()
            for neighbour, _, _ in pattern.adjacency[vertex]:
                if neighbour not in seen:
                    seen.add(neighbour)
                    order.append((neighbour, vertex))
                    queue.append(neighbour)
    return order


def find_embeddings(pattern: LabeledGraph, target: LabeledGraph, injective: bool = False) -> Iterator[Tuple[int, ...]]:
    """Yield vertex maps (tuple indexed by pattern vertex) of every homomorphism into target."""
    if pattern.size == 0:
        yield ()
        return
    order = _search_order(pattern)
    mapping: Dict[int, int] = {}
    used: Dict[int, int] = {}

    def consistent(vertex: int, image: int) -> bool:
        if not node_generalizes(pattern.labels[vertex], target.labels[image]):
            return False
        for neighbour, _, label in pattern.adjacency[vertex]:
            if neighbour not in mapping:
                continue
            candidates = target.edges_between.get((image, mapping[neighbour]), ())
            if not any(edge_generalizes(label, t) for t in candidates):
                return False
        return True

    def extend(step: int) -> Iterator[Tuple[int, ...]]:
        if step == len(order):
            yield tuple(mapping[k] for k in range(pattern.size))
            return
        vertex, anchor = order[step]
        if anchor is None:
            candidates: Iterable[int] = range(target.size)
        else:
            candidates = sorted({n for n, _, _ in target.adjacency[mapping[anchor]]})
        for image in candidates:
            if injective and used.get(image):
                continue
            if not consistent(vertex, image):
                continue
            mapping[vertex] = image
            used[image] = used.get(image, 0) + 1
            yield from extend(step + 1)
            used[image] -= 1
            del mapping[vertex]

    yield from extend(0)


def embeds(pattern: LabeledGraph, target: LabeledGraph, injective: bool = False) -> bool:
    if pattern.size > target.size and injective:
        return False
    return next(find_embeddings(pattern, target, injective), None) is not None


def count_support(pattern: LabeledGraph, db: Sequence[LabeledGraph], tids: Optional[Iterable[int]] = None,
                  injective: bool = False) -> Tuple[int, Tuple[int, ...]]:
    """Number of database graphs the pattern embeds into, and their indexes."""
    candidates = range(len(db)) if tids is None else tids
    supporting = tuple(t for t in candidates if embeds(pattern, db[t], injective))
    return len(supporting), supporting
