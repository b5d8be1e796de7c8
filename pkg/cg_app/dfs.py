"""
Labeled graphs and canonical DFS codes.

A LabeledGraph is the mining-side view of a translated CG: undirected
multigraph whose node labels are (relation path, argument paths, argument
classes) and whose edge labels are (position at one end, position at the
other end, concept path). Bricks and raw CG nodes both fit that shape.

Argument classes number the argument positions of a brick by the concept
filling them, in first-seen order: knows(x, x) gives (1, 1), r(x, y, x)
gives (1, 2, 1). The tuple is empty when every position holds its own
concept.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import networkx as nx

from .exceptions import DisconnectedPatternError
from .models import TypePath, join_path

NodeLabel = Tuple[TypePath, Tuple[TypePath, ...], Tuple[int, ...]]
EdgeLabel = Tuple[int, int, TypePath]


def argument_classes(args: Sequence) -> Tuple[int, ...]:
    """Class number of each argument position, or () when no concept repeats."""
    first_seen: Dict = {}
    classes = tuple(first_seen.setdefault(arg, len(first_seen) + 1) for arg in args)
    return classes if len(first_seen) < len(classes) else ()


def orient(label: EdgeLabel, flipped: bool) -> EdgeLabel:
    pos_a, pos_b, path = label
    return (pos_b, pos_a, path) if flipped else label


def edge_key(label: EdgeLabel):
    """Total order on oriented edge labels: (min pos, max pos, path, pos at the near end)."""
    pos_i, pos_j, path = label
    return (min(pos_i, pos_j), max(pos_i, pos_j), path, pos_i)


def format_classes(classes: Tuple[int, ...]) -> str:
    """Positions that repeat an earlier one, as "1=2,1=3"."""
    first: Dict[int, int] = {}
    pairs = []
    for position, cls in enumerate(classes, start=1):
        if cls in first:
            pairs.append(f"{first[cls]}={position}")
        else:
            first[cls] = position
    return ",".join(pairs)


def format_node_label(label: NodeLabel) -> str:
    relation, arguments, classes = label
    if not relation:
        return "[" + ",".join(join_path(p) for p in arguments) + "]"
    text = join_path(relation) + "(" + ",".join(join_path(p) for p in arguments) + ")"
    return text + "{" + format_classes(classes) + "}" if classes else text


def format_edge_label(label: EdgeLabel) -> str:
    pos_i, pos_j, path = label
    return f"{pos_i}-{pos_j}:{join_path(path)}"


@dataclass(frozen=True)
class LabeledGraph:
    """
    Fields:
    - graph_id: id of the CG this graph was translated from (or of the pattern)
    - labels: one NodeLabel per vertex, vertices are 0..n-1
    - edges: (a, b, (pos_a, pos_b, path)) with a != b; parallel edges allowed
    """
    graph_id: str
    labels: Tuple[NodeLabel, ...]
    edges: Tuple[Tuple[int, int, EdgeLabel], ...] = ()

    @property
    def size(self) -> int:
        return len(self.labels)

    @cached_property
    def adjacency(self) -> Tuple[Tuple[Tuple[int, int, EdgeLabel], ...], ...]:
        """Per vertex: (neighbour, edge index, label oriented from this vertex)."""
        adjacent: List[List[Tuple[int, int, EdgeLabel]]] = [[] for _ in self.labels]
        for index, (a, b, label) in enumerate(self.edges):
            adjacent[a].append((b, index, label))
            adjacent[b].append((a, index, orient(label, True)))
        return tuple(tuple(items) for items in adjacent)

    @cached_property
    def edges_between(self) -> Dict[Tuple[int, int], Tuple[EdgeLabel, ...]]:
        """Oriented labels of the edges joining an ordered pair of vertices."""
        pairs: Dict[Tuple[int, int], List[EdgeLabel]] = {}
        for a, b, label in self.edges:
            pairs.setdefault((a, b), []).append(label)
            pairs.setdefault((b, a), []).append(orient(label, True))
        return {pair: tuple(labels) for pair, labels in pairs.items()}

    def to_networkx(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from((index, {"label": label}) for index, label in enumerate(self.labels))
        graph.add_edges_from((a, b, {"label": label}) for a, b, label in self.edges)
        return graph

    def is_connected(self) -> bool:
        if not self.labels:
            return True
        return nx.is_connected(self.to_networkx())

    def relabel(self, labels, edge_labels=None) -> "LabeledGraph":
        edges = self.edges
        if edge_labels is not None:
            edges = tuple((a, b, label) for (a, b, _), label in zip(self.edges, edge_labels))
        return LabeledGraph(self.graph_id, tuple(labels), edges)

    def permuted(self, order) -> "LabeledGraph":
        """Copy whose vertex k is vertex order[k] of this graph."""
        position = {old: new for new, old in enumerate(order)}
        labels = tuple(self.labels[old] for old in order)
        edges = tuple((position[a], position[b], label) for a, b, label in self.edges)
        return LabeledGraph(self.graph_id, labels, edges)

    def induced(self, vertices, edge_indexes=None) -> "LabeledGraph":
        """Subgraph on the given vertices; all edges among them unless edge_indexes is given."""
        vertices = list(vertices)
        position = {old: new for new, old in enumerate(vertices)}
        chosen = range(len(self.edges)) if edge_indexes is None else sorted(edge_indexes)
        edges = []
        for index in chosen:
            a, b, label = self.edges[index]
            if a in position and b in position:
                edges.append((position[a], position[b], label))
        return LabeledGraph(self.graph_id, tuple(self.labels[v] for v in vertices), tuple(edges))


class DFSEdge(NamedTuple):
    i: int
    j: int
    label_i: NodeLabel
    edge_label: Optional[EdgeLabel]
    label_j: Optional[NodeLabel]

    @property
    def is_forward(self) -> bool:
        return self.i < self.j

    def __str__(self):
        if self.edge_label is None:
            return f"({self.i},{self.j},{format_node_label(self.label_i)})"
        return (
            f"({self.i},{self.j},{format_node_label(self.label_i)},"
            f"{format_edge_label(self.edge_label)},{format_node_label(self.label_j)})"
        )


DFSCode = Tuple[DFSEdge, ...]


def code_string(code: DFSCode) -> str:
    return " ".join(str(edge) for edge in code)


def rightmost_path(code: DFSCode) -> List[int]:
    """Discovery indexes on the rightmost path, from the rightmost vertex up to the root."""
    if not code or code[0].edge_label is None:
        return [0] if code else []
    parent: Dict[int, int] = {}
    rightmost = 0
    for edge in code:
        if edge.is_forward:
            parent[edge.j] = edge.i
            rightmost = max(rightmost, edge.j)
    path = [rightmost]
    while path[-1] in parent:
        path.append(parent[path[-1]])
    return path


def code_vertex_count(code: DFSCode) -> int:
    if not code:
        return 0
    return 1 + sum(1 for edge in code if edge.is_forward)


def graph_from_code(code: DFSCode, graph_id: str = "pattern") -> LabeledGraph:
    """Rebuild the labeled graph a DFS code describes; vertex k is discovery index k."""
    if not code:
        return LabeledGraph(graph_id, ())
    labels: Dict[int, NodeLabel] = {0: code[0].label_i}
    edges = []
    for edge in code:
        if edge.edge_label is None:
            continue
        labels.setdefault(edge.i, edge.label_i)
        labels.setdefault(edge.j, edge.label_j)
        edges.append((edge.i, edge.j, edge.edge_label))
    return LabeledGraph(graph_id, tuple(labels[k] for k in range(len(labels))), tuple(edges))


class _State(NamedTuple):
    order: Tuple[int, ...]          # discovery index -> graph vertex
    index: Dict[int, int]           # graph vertex -> discovery index
    used: frozenset                 # edge indexes already in the code
    rmpath: Tuple[int, ...]         # discovery indexes, rightmost vertex first


def _extensions(graph: LabeledGraph, state: _State):
    """Yield (key, DFSEdge, next state) for every one-edge growth of a partial code."""
    rightmost = state.rmpath[0]
    vertex = state.order[rightmost]
    for neighbour, edge_index, label in graph.adjacency[vertex]:
        if edge_index in state.used or neighbour not in state.index:
            continue
        j = state.index[neighbour]
        dfs_edge = DFSEdge(rightmost, j, graph.labels[vertex], label, graph.labels[neighbour])
        yield (0, j, edge_key(label)), dfs_edge, state._replace(used=state.used | {edge_index})

    new_index = len(state.order)
    for depth, i in enumerate(state.rmpath):
        vertex = state.order[i]
        for neighbour, edge_index, label in graph.adjacency[vertex]:
            if neighbour in state.index:
                continue
            key = (1, -i, edge_key(label), graph.labels[neighbour])
            dfs_edge = DFSEdge(i, new_index, graph.labels[vertex], label, graph.labels[neighbour])
            index = dict(state.index)
            index[neighbour] = new_index
            yield key, dfs_edge, _State(
                order=state.order + (neighbour,),
                index=index,
                used=state.used | {edge_index},
                rmpath=(new_index,) + state.rmpath[depth:],
            )


def min_dfs_code(graph: LabeledGraph) -> DFSCode:
    """
    Minimum DFS code of a connected labeled graph.

    Codes are grown one edge at a time and only the partial codes that are
    minimal so far are kept, so the result is the same for every vertex
    numbering of the graph. A single vertex encodes as (0, 0, label, None, None).
    """
    if not graph.labels:
        return ()
    if not graph.is_connected():
        raise DisconnectedPatternError(f"Graph {graph.graph_id!r} is not connected")
    if not graph.edges:
        return (DFSEdge(0, 0, graph.labels[0], None, None),)

    best = None
    states: List[_State] = []
    for a, b, label in graph.edges:
        for (u, w, oriented) in ((a, b, label), (b, a, orient(label, True))):
            key = (graph.labels[u], edge_key(oriented), graph.labels[w])
            if best is not None and key > best[0]:
                continue
            state = _State(order=(u, w), index={u: 0, w: 1}, used=frozenset(), rmpath=(1, 0))
            edge = DFSEdge(0, 1, graph.labels[u], oriented, graph.labels[w])
            if best is None or key < best[0]:
                best = (key, edge)
                states = []
            states.append(state)
    code = [best[1]]
    states = _dedupe([used for state in states for used in _first_edge_used(graph, state, best[1])])

    while len(code) < len(graph.edges):
        best_key = None
        best_edge = None
        next_states: List[_State] = []
        for state in states:
            for key, edge, successor in _extensions(graph, state):
                if best_key is None or key < best_key:
                    best_key, best_edge, next_states = key, edge, [successor]
                elif key == best_key:
                    next_states.append(successor)
        code.append(best_edge)
        states = _dedupe(next_states)
    return tuple(code)


def _first_edge_used(graph: LabeledGraph, state: _State, edge: DFSEdge) -> List[_State]:
    """States for each parallel edge realizing the first code edge between the two seed vertices."""
    u, w = state.order
    results = []
    for neighbour, edge_index, label in graph.adjacency[u]:
        if neighbour == w and label == edge.edge_label:
            results.append(state._replace(used=frozenset({edge_index})))
    return results


def _dedupe(states: List[_State]) -> List[_State]:
    seen = set()
    unique = []
    for state in states:
        key = (state.order, state.used)
        if key not in seen:
            seen.add(key)
            unique.append(state)
    return unique


def canonical_code(graph: LabeledGraph) -> str:
    return code_string(min_dfs_code(graph))


def is_min_code(code: DFSCode) -> bool:
    return min_dfs_code(graph_from_code(code)) == tuple(code)
