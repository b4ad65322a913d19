"""Embedded planar triangulations to induced path-product structure.

The pipeline: triangulate an embedded graph by apex insertion (keeping the
input induced), fix a BFS tree rooted on the outer triangle, then recurse on
cycles covered by at most six vertical paths.  One recursion step finds up
to three new vertical paths inside the cycle whose removal splits the
interior into child cycles, each again covered by at most six paths, with
adjacency into older paths confined to path ends.  Every new path
contributes five factor vertices (a clique); path ends sit on slots 1 and 5,
internal vertices on slot 2 + (level mod 3), so any three consecutive path
vertices occupy distinct slots and slot reuse is at least three levels
apart.  Factor edges towards older paths are attached only from end slots,
one per actual graph edge.  The factor's tree decomposition grows by two
bags per step and every bag is (at most 8 paths) x (5 slots): width <= 39.

Faces are handled combinatorially: rotation systems list each vertex's
neighbours in cyclic order, a dart (u, v) continues to (v, successor of u
in v's rotation), and faces are the orbits of that map.  Each cycle frame
carries a witness dart whose orbit inside any boundary-containing subgraph
is the region outside the cycle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .graphs import (BfsStructure, LoopGraph, ProductEmbedding, Verdict,
                     bfs_tree, edge_key, path_graph)
from .treedec import TreeDecomposition, validate_decomposition

Dart = tuple[int, int]


@dataclass(frozen=True)
class EmbeddedGraph:
    """Simple connected graph with a rotation system and an outer-face dart."""
    graph: LoopGraph
    rotation: tuple[tuple[int, ...], ...]
    outer: Dart

    def check(self) -> None:
        g = self.graph
        if g.loops:
            raise ValueError("embedded graphs must be simple")
        if len(self.rotation) != g.n:
            raise ValueError("rotation must cover every vertex")
        for v in range(g.n):
            if sorted(self.rotation[v]) != sorted(g.neighbours(v)):
                raise ValueError(f"rotation at {v} is not a permutation of its neighbours")
        u, v = self.outer
        if not g.has_edge(u, v):
            raise ValueError("outer dart is not an edge")
        f = len(face_orbits(g.edges, self.rotation))
        if g.n - g.num_edges() + f != 2:
            raise ValueError("rotation system fails the Euler check; not planar or inconsistent")

    def outer_cycle(self) -> list[int]:
        orbit = dart_orbit(self.rotation, self.outer,
                           {v: set(self.graph.neighbours(v)) for v in range(self.graph.n)})
        return [d[0] for d in orbit]


def _succ_dart(rotation: Sequence[Sequence[int]], u: int, v: int,
               allowed: dict[int, set[int]]) -> Dart:
    rot = [w for w in rotation[v] if w in allowed[v]]
    i = rot.index(u)
    return (v, rot[(i + 1) % len(rot)])


def dart_orbit(rotation, start: Dart, allowed: dict[int, set[int]]) -> list[Dart]:
    orbit = [start]
    cur = _succ_dart(rotation, start[0], start[1], allowed)
    while cur != start:
        orbit.append(cur)
        cur = _succ_dart(rotation, cur[0], cur[1], allowed)
    return orbit


def face_orbits(edges, rotation,
                allowed: Optional[dict[int, set[int]]] = None) -> list[list[Dart]]:
    """All face orbits of the (sub)graph given by ``edges``."""
    if allowed is None:
        allowed = {}
        for (u, v) in edges:
            allowed.setdefault(u, set()).add(v)
            allowed.setdefault(v, set()).add(u)
    darts = set()
    for (u, v) in edges:
        darts.add((u, v))
        darts.add((v, u))
    seen: set[Dart] = set()
    orbits = []
    for d in sorted(darts):
        if d in seen:
            continue
        orbit = dart_orbit(rotation, d, allowed)
        seen.update(orbit)
        orbits.append(orbit)
    return orbits


def face_of_angle(rotation, allowed: dict[int, set[int]], x: int, towards: int) -> Dart:
    """Dart of the subgraph face whose angular sector at x holds the edge
    direction x -> towards (``towards`` not a subgraph neighbour of x)."""
    rot = rotation[x]
    i = rot.index(towards)
    n = len(rot)
    for step in range(1, n + 1):
        w = rot[(i + step) % n]
        if w in allowed[x]:
            return (x, w)
    raise ValueError(f"vertex {x} has no subgraph neighbour")


def embedded_from_faces(n: int, faces: Sequence[Sequence[int]],
                        outer: Dart) -> EmbeddedGraph:
    """Embedded graph from consistently oriented face walks.

    Each face lists its vertices so that every dart occurs in exactly one
    face; rotations are stitched from the corner relation (u -> v -> w in a
    face makes w the successor of u at v).
    """
    succ: list[dict[int, int]] = [dict() for _ in range(n)]
    edges = set()
    for face in faces:
        k = len(face)
        for i in range(k):
            u, v, w = face[i], face[(i + 1) % k], face[(i + 2) % k]
            if u in succ[v]:
                raise ValueError(f"dart ({u},{v}) occurs in two faces")
            succ[v][u] = w
            edges.add(edge_key(u, v))
    rotation = []
    for v in range(n):
        cyc: list[int] = []
        if succ[v]:
            start = min(succ[v])
            cur = start
            while True:
                cyc.append(cur)
                cur = succ[v][cur]
                if cur == start:
                    break
            if len(cyc) != len(succ[v]):
                raise ValueError(f"rotation at {v} is not a single cycle")
        rotation.append(tuple(cyc))
    eg = EmbeddedGraph(LoopGraph(n, edges), tuple(rotation), outer)
    eg.check()
    return eg


# ---------------------------------------------------------------------------
# triangulation by apex insertion

def triangulate(eg: EmbeddedGraph) -> EmbeddedGraph:
    """Make every face a triangle by placing one apex in each larger face.

    The input stays induced: apexes only ever join existing vertices, never
    each other.  Face walks must be simple cycles (2-connected input); a
    repeated vertex on a walk is rejected.
    """
    eg.check()
    g = eg.graph
    if g.n < 3:
        raise ValueError("need at least 3 vertices")
    orbits = face_orbits(g.edges, eg.rotation)
    rotation = [list(r) for r in eg.rotation]
    edges = set(g.edges)
    nxt = g.n
    for orbit in orbits:
        walk = [d[0] for d in orbit]
        if len(set(walk)) != len(walk):
            raise ValueError(
                "face walk repeats a vertex; triangulate needs a 2-connected embedding")
        if len(walk) == 3:
            continue
        apex = nxt
        nxt += 1
        rotation.append(list(reversed(walk)))
        for i, w in enumerate(walk):
            prev = walk[i - 1]
            edges.add(edge_key(apex, w))
            pos = rotation[w].index(prev)
            rotation[w].insert(pos + 1, apex)
    out = EmbeddedGraph(LoopGraph(nxt, edges), tuple(tuple(r) for r in rotation),
                        eg.outer)
    out.check()
    for orbit in face_orbits(out.graph.edges, out.rotation):
        assert len(orbit) == 3, "triangulation left a non-triangle face"
    return out


# ---------------------------------------------------------------------------
# cycle frames and the decomposition step

@dataclass
class CycleFrame:
    """A cycle covered by vertical-path pieces, with its inside region.

    ``pieces`` lists (global path id, consecutive cycle vertices) in cyclic
    order; their concatenation is the cycle.  One global path may appear in
    several pieces (fragments arise below frames whose covering had to be
    split), but at most six pieces cover the cycle.  ``witness`` is a dart
    on the cycle whose orbit, in any subgraph containing the cycle, bounds
    the region outside it.
    """
    pieces: list[tuple[int, list[int]]]
    interior: set[int]
    witness: Dart

    def cycle(self) -> list[int]:
        out: list[int] = []
        for _, vs in self.pieces:
            out.extend(vs)
        return out

    def path_ids(self) -> list[int]:
        return sorted({pid for pid, _ in self.pieces})

    def check(self, g: LoopGraph, level: Sequence[int]) -> None:
        cyc = self.cycle()
        if len(cyc) < 3 or len(set(cyc)) != len(cyc):
            raise ValueError("frame cycle must be a simple cycle")
        for i, v in enumerate(cyc):
            if not g.has_edge(v, cyc[(i + 1) % len(cyc)]):
                raise ValueError("frame cycle is not a cycle of the graph")
        if len(self.pieces) > 6:
            raise ValueError("more than six covering pieces")
        for _, vs in self.pieces:
            for a, b in zip(vs, vs[1:]):
                if abs(level[a] - level[b]) != 1:
                    raise ValueError("covering piece is not vertical")


@dataclass
class DecompositionStep:
    """Outcome of one application of the cycle decomposition."""
    q7: Optional[int]           # global ids of the new paths (None = empty)
    q8: Optional[int]
    q9: Optional[int]
    h_path: Optional[int]       # global id of the piece with no edges to q9
    children: list[CycleFrame]
    new_vertices: list[list[int]]   # vertex lists of the registered paths


def _interior_components(g: LoopGraph, remaining: set[int]) -> list[list[int]]:
    comps = []
    left = set(remaining)
    while left:
        s = min(left)
        comp = [s]
        left.discard(s)
        stack = [s]
        while stack:
            v = stack.pop()
            for w in g.neighbours(v):
                if w in left:
                    left.discard(w)
                    comp.append(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def _children_from_subgraph(eg: EmbeddedGraph, frame: CycleFrame,
                            f_edges: set[tuple[int, int]],
                            path_of: dict[int, int]) -> list[CycleFrame]:
    """Faces of the boundary subgraph, minus the outside, as child frames.

    Interior components are routed to the face whose angular sector holds
    their attachment edges.
    """
    allowed: dict[int, set[int]] = {}
    for (u, v) in f_edges:
        allowed.setdefault(u, set()).add(v)
        allowed.setdefault(v, set()).add(u)
    orbits = face_orbits(f_edges, eg.rotation, allowed)
    outer_key = None
    keyed: dict[int, list[Dart]] = {}
    for idx, orbit in enumerate(orbits):
        keyed[idx] = orbit
        if frame.witness in orbit:
            outer_key = idx
    if outer_key is None:
        raise RuntimeError("witness dart lost from the boundary subgraph")

    w_set = set(allowed)
    assignments: dict[int, list[list[int]]] = {idx: [] for idx in keyed}
    for comp in _interior_components(eg.graph, frame.interior - w_set):
        anchor = None
        for v in comp:
            for y in sorted(eg.graph.neighbours(v)):
                if y in w_set:
                    anchor = (y, v)
                    break
            if anchor:
                break
        if anchor is None:
            raise RuntimeError("interior component does not touch the boundary subgraph")
        dart = face_of_angle(eg.rotation, allowed, anchor[0], anchor[1])
        home = None
        for idx, orbit in keyed.items():
            if dart in orbit:
                home = idx
                break
        if home is None or home == outer_key:
            raise RuntimeError("interior component assigned outside the cycle")
        assignments[home].append(comp)

    children = []
    for idx in sorted(keyed):
        if idx == outer_key:
            continue
        orbit = keyed[idx]
        walk = [d[0] for d in orbit]
        pieces: list[tuple[int, list[int]]] = []
        for v in walk:
            pid = path_of[v]
            if pieces and pieces[-1][0] == pid:
                pieces[-1][1].append(v)
            else:
                pieces.append((pid, [v]))
        if len(pieces) > 1 and pieces[0][0] == pieces[-1][0]:
            pid, head = pieces.pop(0)
            pieces[-1][1].extend(head)
        interior = set()
        for comp in assignments[idx]:
            interior.update(comp)
        rev_witness = (orbit[0][1], orbit[0][0])
        child = CycleFrame(pieces, interior, rev_witness)
        if len(child.pieces) > 6:
            raise RuntimeError("child cycle has more than six covering pieces")
        children.append(child)
    return children


class _FrameScan:
    """Attachment walks and piece colours of one frame's interior."""

    def __init__(self, eg: EmbeddedGraph, bfs: BfsStructure, frame: CycleFrame,
                 work_pieces: list[tuple[int, list[int]]]):
        self.eg = eg
        self.bfs = bfs
        self.frame = frame
        self.pieces = work_pieces
        self.c_set = set(frame.cycle())
        self.piece_index = {}
        for i, (_, vs) in enumerate(work_pieces):
            for v in vs:
                self.piece_index[v] = i
        self._w_cache: dict[int, int] = {}
        self._iota_cache: dict[int, int] = {}

    def c_adjacent(self, v: int) -> bool:
        return any(w in self.c_set for w in self.eg.graph.neighbours(v))

    def attach_end(self, u: int) -> int:
        """First vertex on u's root walk adjacent to the cycle (maybe u)."""
        chain = []
        x = u
        while True:
            got = self._w_cache.get(x)
            if got is not None:
                w = got
                break
            if self.c_adjacent(x):
                w = x
                self._w_cache[x] = x
                break
            chain.append(x)
            x = self.bfs.parent[x]
            if x not in self.frame.interior:
                raise RuntimeError("attachment walk escaped the interior")
        for y in chain:
            self._w_cache[y] = w
        return w

    def walk(self, u: int) -> list[int]:
        """Vertices of the attachment walk from u up to its end."""
        w = self.attach_end(u)
        out = [u]
        while out[-1] != w:
            out.append(self.bfs.parent[out[-1]])
        return out

    def iota(self, u: int) -> int:
        """Piece colour: own piece on the cycle, least-indexed adjacent piece
        of the attachment end inside."""
        if u in self.piece_index:
            return self.piece_index[u]
        got = self._iota_cache.get(u)
        if got is None:
            w = self.attach_end(u)
            nb = set(self.eg.graph.neighbours(w))
            got = min(i for i, (_, vs) in enumerate(self.pieces)
                      if any(v in nb for v in vs))
            self._iota_cache[u] = got
        return got

    def c_attach(self, w: int) -> int:
        """Least-id cycle vertex of piece iota(w) adjacent to w."""
        i = self.iota(w) if w not in self.piece_index else self.piece_index[w]
        nb = set(self.eg.graph.neighbours(w))
        return min(v for v in self.pieces[i][1] if v in nb)

    def extended_walk(self, u: int) -> list[int]:
        """walk(u) plus the cycle attachment; just [u] when u is on the cycle."""
        if u in self.piece_index:
            return [u]
        vs = self.walk(u)
        vs.append(self.c_attach(vs[-1]))
        return vs


def _inside_chord(eg: EmbeddedGraph, frame: CycleFrame) -> Optional[tuple[int, int]]:
    cyc = frame.cycle()
    c_set = set(cyc)
    n = len(cyc)
    c_edges = {edge_key(cyc[i], cyc[(i + 1) % n]) for i in range(n)}
    allowed = {cyc[i]: {cyc[i - 1], cyc[(i + 1) % n]} for i in range(n)}
    inner = None
    for v in cyc:
        for w in sorted(eg.graph.neighbours(v)):
            if w in c_set and v < w and edge_key(v, w) not in c_edges:
                dart = face_of_angle(eg.rotation, allowed, v, w)
                if inner is None:
                    outer_orbit = dart_orbit(eg.rotation, frame.witness, allowed)
                    inner = set()
                    for d in face_orbits(c_edges, eg.rotation, allowed):
                        if frame.witness not in d:
                            inner.update(d)
                if dart in inner:
                    return (v, w)
    return None


def _split_for_min_pieces(pieces: list[tuple[int, list[int]]]
                          ) -> list[tuple[int, list[int]]]:
    """At least three working pieces, splitting the first long one."""
    work = [(pid, list(vs)) for pid, vs in pieces]
    while len(work) < 3:
        idx = next(i for i, (_, vs) in enumerate(work) if len(vs) >= 2)
        pid, vs = work[idx]
        work[idx:idx + 1] = [(pid, vs[:1]), (pid, vs[1:])]
    return work


def _cyclic_dist(i: int, j: int, m: int) -> int:
    d = abs(i - j) % m
    return min(d, m - d)


def decompose_cycle(frame: CycleFrame, eg: EmbeddedGraph, bfs: BfsStructure,
                    register: Callable[[list[int]], int],
                    path_of: dict[int, int]) -> DecompositionStep:
    """One application of the interior decomposition.

    Either an inside chord splits the frame into two children directly, or
    up to three new vertical paths are carved out of the interior:  the
    contracted piece-colour graph supplies a chord (or a low-shared triangle
    when all six pieces are present), attachment walks realize it inside,
    and walk-length minimization confines adjacency into older paths to the
    new paths' ends.  ``register`` is called for each nonempty new path
    (top vertex first) and must hand back its global id; ``path_of`` is
    updated for the new vertices.
    """
    g = eg.graph
    if not frame.interior:
        raise ValueError("frame has empty interior")
    cyc = frame.cycle()
    c_set = set(cyc)

    chord = _inside_chord(eg, frame)
    if chord is not None:
        f_edges = {edge_key(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))}
        f_edges.add(edge_key(*chord))
        children = _children_from_subgraph(eg, frame, f_edges, path_of)
        return DecompositionStep(None, None, None, None, children, [])

    work = _split_for_min_pieces(frame.pieces)
    scan = _FrameScan(eg, bfs, frame, work)
    m = len(work)

    # candidate realizing edges per unordered piece-colour pair
    candidates: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for v in sorted(frame.interior):
        iv = scan.iota(v)
        for w in sorted(g.neighbours(v)):
            if w in frame.interior and w < v:
                continue
            if w not in frame.interior and w not in c_set:
                continue
            iw = scan.iota(w)
            if iv == iw:
                continue
            key = (min(iv, iw), max(iv, iw))
            a, b = (v, w) if iv < iw else (w, v)
            candidates.setdefault(key, []).append((a, b))

    def realizer_cost(pair: tuple[int, int]) -> tuple[int, int, int]:
        a, b = pair
        union = set(scan.extended_walk(a)) | set(scan.extended_walk(b))
        return (len(union), a, b)

    if m <= 5:
        noncons = [key for key in sorted(candidates)
                   if _cyclic_dist(key[0], key[1], m) >= 2]
        pool = noncons if m > 3 else sorted(candidates)
        if not pool:
            raise RuntimeError("no realizable colour pair inside the cycle")
        key = pool[0]
        u7, u8 = min(candidates[key], key=realizer_cost)
        q7_vs = scan.walk(u7) if u7 in frame.interior else []
        q8_vs = scan.walk(u8) if u8 in frame.interior else []
        f_edges = {edge_key(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))}
        f_edges.add(edge_key(u7, u8))
        for vs in (q7_vs, q8_vs):
            for a, b in zip(vs, vs[1:]):
                f_edges.add(edge_key(a, b))
            if vs:
                f_edges.add(edge_key(vs[-1], scan.c_attach(vs[-1])))
        new_paths = [list(reversed(q7_vs)), list(reversed(q8_vs)), []]
        ids = _register_new(new_paths, register, path_of)
        children = _children_from_subgraph(eg, frame, f_edges, path_of)
        _check_conditions(frame, new_paths, ids, None, children, g)
        return DecompositionStep(ids[0], ids[1], None, None, children,
                                 [p for p in new_paths if p])

    # m == 6: contracted colour graph and a triangle sharing at most one
    # cycle edge, labelled to the distance pattern and realized by an inner
    # triangular face
    bprime = set()
    for i in range(m):
        bprime.add((i, (i + 1) % m))
    for key in candidates:
        bprime.add(key)
    bprime |= {(b, a) for (a, b) in bprime}
    labelings = []
    for tri in sorted({tuple(sorted(t)) for t in
                       itertools.combinations(range(m), 3)
                       if (t[0], t[1]) in bprime and (t[1], t[2]) in bprime
                       and (t[0], t[2]) in bprime}):
        shared = [p for p in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2]))
                  if _cyclic_dist(p[0], p[1], m) == 1]
        if len(shared) > 1:
            continue
        for (x7, x8, x9) in itertools.permutations(tri):
            if shared and set(shared[0]) != {x8, x9}:
                continue
            if (_cyclic_dist(x8, x9, m) in (1, 2)
                    and _cyclic_dist(x7, x9, m) == 2
                    and _cyclic_dist(x7, x8, m) in (2, 3)):
                labelings.append((x7, x8, x9))
                break
    face = triangle = None
    for cand in labelings:
        try:
            face = _tricoloured_face(eg, frame, scan, cand)
        except RuntimeError:
            continue
        triangle = cand
        break
    if face is None:
        raise RuntimeError("no facial triangle realizes a low-shared colour triple")
    x7, x8, x9 = triangle
    u7p, u8p, u9p = face

    # pick u8 on the extended walk of u8p, closest to the cycle, adjacent to
    # the extended walk of u7p; then u9 likewise against walk(u7p) + walk(u8)
    r7p = scan.extended_walk(u7p)
    r7p_set = set(r7p)
    r8p = scan.extended_walk(u8p)
    u8 = v8 = None
    for cand in reversed(r8p):
        hits = [y for y in r7p if g.has_edge(cand, y)]
        if hits:
            u8 = cand
            v8 = min(hits, key=r7p.index)
            break
    if u8 is None:
        raise RuntimeError("no attachment for the second path")
    q8_vs = scan.walk(u8) if u8 in frame.interior else []
    pool9 = [y for y in r7p if y in frame.interior] + q8_vs
    r9p = scan.extended_walk(u9p)
    u9 = v9 = None
    for cand in reversed(r9p):
        hits = [y for y in pool9 if g.has_edge(cand, y)]
        if hits:
            u9 = cand
            v9 = min(hits, key=pool9.index)
            break
    if u9 is None:
        raise RuntimeError("no attachment for the third path")
    q9_vs = scan.walk(u9) if u9 in frame.interior else []

    if v9 in r7p_set and r7p.index(v9) < r7p.index(v8):
        u7 = v9
    else:
        u7 = v8
    q7_vs = scan.walk(u7) if u7 in frame.interior else []

    f_edges = {edge_key(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))}
    for vs in (q7_vs, q8_vs, q9_vs):
        for a, b in zip(vs, vs[1:]):
            f_edges.add(edge_key(a, b))
        if vs:
            f_edges.add(edge_key(vs[-1], scan.c_attach(vs[-1])))
    f_edges.add(edge_key(u8, v8))
    f_edges.add(edge_key(u9, v9))

    new_paths = [list(reversed(q7_vs)), list(reversed(q8_vs)), list(reversed(q9_vs))]
    ids = _register_new(new_paths, register, path_of)
    children = _children_from_subgraph(eg, frame, f_edges, path_of)

    # a path to drop from the second bag is needed only when all six pieces
    # belong to distinct paths (otherwise the bag fits without dropping)
    h_path = None
    globals_ = frame.path_ids()
    if ids[2] is not None and len(globals_) == 6:
        q9_set = set(new_paths[2])
        for pid in globals_:
            pvs = [v for p, vs in frame.pieces if p == pid for v in vs]
            if any(g.has_edge(a, b) for a in q9_set for b in pvs):
                continue
            ok = True
            for child in children:
                hit = {p for p, _ in child.pieces}
                if ids[2] in hit and pid in hit:
                    ok = False
                    break
            if ok:
                h_path = pid
                break
        if h_path is None:
            raise RuntimeError("no separated path for the third new path")
    _check_conditions(frame, new_paths, ids, h_path, children, g)
    return DecompositionStep(ids[0], ids[1], ids[2], h_path, children,
                             [p for p in new_paths if p])


def _register_new(new_paths: list[list[int]], register, path_of
                  ) -> list[Optional[int]]:
    ids: list[Optional[int]] = []
    for vs in new_paths:
        if not vs:
            ids.append(None)
            continue
        pid = register(vs)
        for v in vs:
            path_of[v] = pid
        ids.append(pid)
    return ids


def _tricoloured_face(eg: EmbeddedGraph, frame: CycleFrame, scan: _FrameScan,
                      triangle: tuple[int, int, int]) -> tuple[int, int, int]:
    """First triangular face inside the frame whose piece colours match."""
    want = set(triangle)
    region = frame.interior | scan.c_set
    seen = set()
    for orbit in face_orbits(eg.graph.edges, eg.rotation):
        if len(orbit) != 3:
            continue
        vs = tuple(sorted(d[0] for d in orbit))
        if vs in seen:
            continue
        seen.add(vs)
        if not all(v in region for v in vs):
            continue
        if not any(v in frame.interior for v in vs):
            continue
        cols = {scan.iota(v) for v in vs}
        if cols == want:
            by_col = {scan.iota(v): v for v in vs}
            return (by_col[triangle[0]], by_col[triangle[1]], by_col[triangle[2]])
    raise RuntimeError("no facial triangle realizes the selected colours")


def _check_conditions(frame: CycleFrame, new_paths: list[list[int]],
                      ids: list[Optional[int]], h_path: Optional[int],
                      children: list[CycleFrame], g: LoopGraph) -> None:
    """End-confinement and separation conditions of one step."""
    earlier = set(frame.cycle())
    for vs in new_paths:
        if vs:
            ends = {vs[0], vs[-1]}
            for v in vs:
                if v in ends:
                    continue
                hit = [y for y in g.neighbours(v) if y in earlier]
                if hit:
                    raise RuntimeError(
                        f"internal vertex {v} of a new path touches older path vertex {hit[0]}")
        earlier.update(vs)
    for child in children:
        if len(child.pieces) > 6:
            raise RuntimeError("child has more than six covering pieces")
    if ids[2] is not None and h_path is not None:
        q9 = set(new_paths[2])
        hvs = [v for pid, vs in frame.pieces if pid == h_path for v in vs]
        for a in q9:
            for b in hvs:
                if g.has_edge(a, b):
                    raise RuntimeError("separated path touches the third new path")


# ---------------------------------------------------------------------------
# the full structure builder

@dataclass
class NiceProductStructure:
    """Factor on (vertical path, slot) pairs plus the aligned decomposition.

    Factor vertex (path p, slot j) has id 5*p + j - 1.  ``slot`` maps every
    graph vertex to its (path, j) pair; the path coordinate of the product
    embedding is the BFS level.
    """
    p_len: int
    paths: list[list[int]]
    slot: dict[int, tuple[int, int]]
    m: LoopGraph
    td: TreeDecomposition
    root: int


@dataclass
class PlanarStructureResult:
    triangulation: EmbeddedGraph
    structure: NiceProductStructure
    embedding: ProductEmbedding           # for the triangulation
    original_embedding: ProductEmbedding  # restricted to the input vertices


class _StructureBuilder:
    def __init__(self, eg: EmbeddedGraph):
        self.eg = eg
        self.g = eg.graph
        outer_cycle = eg.outer_cycle()
        if len(outer_cycle) != 3:
            raise ValueError("outer face must be a triangle")
        self.root = min(outer_cycle)
        self.bfs = bfs_tree(self.g, self.root)
        self.paths: list[list[int]] = []
        self.path_of: dict[int, int] = {}
        self.slot: dict[int, tuple[int, int]] = {}
        self.m_edges: set[tuple[int, int]] = set()
        self.td_parent: list[int] = []
        self.td_bags: list[frozenset[int]] = []
        self.outer_cycle = outer_cycle

    def register_path(self, vs: list[int]) -> int:
        level = self.bfs.level
        for a, b in zip(vs, vs[1:]):
            assert level[b] == level[a] + 1, "path is not vertical"
            assert self.g.has_edge(a, b)
        pid = len(self.paths)
        self.paths.append(list(vs))
        for v in vs:
            self.path_of[v] = pid
        if len(vs) == 1:
            self.slot[vs[0]] = (pid, 1)
        else:
            self.slot[vs[0]] = (pid, 1)
            self.slot[vs[-1]] = (pid, 5)
            for v in vs[1:-1]:
                self.slot[v] = (pid, 2 + (level[v] % 3))
        base = 5 * pid
        for i in range(5):
            for j in range(i + 1, 5):
                self.m_edges.add((base + i, base + j))
        ends = [vs[0]] if len(vs) == 1 else [vs[0], vs[-1]]
        for e in ends:
            ep, ej = self.slot[e]
            for y in sorted(self.g.neighbours(e)):
                yp = self.path_of.get(y)
                if yp is None or yp == pid:
                    continue
                yj = self.slot[y][1]
                self.m_edges.add(edge_key(5 * ep + ej - 1, 5 * yp + yj - 1))
        return pid

    def add_bag(self, parent: int, pids: Sequence[int]) -> int:
        node = len(self.td_bags)
        self.td_parent.append(parent)
        bag = frozenset(5 * p + i for p in pids for i in range(5))
        self.td_bags.append(bag)
        return node

    def build(self) -> NiceProductStructure:
        for v in self.outer_cycle:
            self.register_path([v])
        root_pids = [self.path_of[v] for v in self.outer_cycle]
        root_bag = self.add_bag(-1, root_pids)
        root_frame = CycleFrame(
            [(self.path_of[v], [v]) for v in self.outer_cycle],
            set(range(self.g.n)) - set(self.outer_cycle),
            self.eg.outer)
        stack: list[tuple[CycleFrame, int]] = [(root_frame, root_bag)]
        while stack:
            frame, expose = stack.pop()
            if not frame.interior:
                continue
            frame.check(self.g, self.bfs.level)
            assert set(self.path_of[v] for pid, vs in frame.pieces for v in vs
                       ) <= set(self.td_bag_paths(expose)), "frame not exposed"
            step = decompose_cycle(frame, self.eg, self.bfs,
                                   self.register_path, self.path_of)
            globals_ = frame.path_ids()
            new78 = [p for p in (step.q7, step.q8) if p is not None]
            z1 = self.add_bag(expose, sorted(set(globals_) | set(new78)))
            z2 = None
            if step.q9 is not None:
                z2_pids = sorted((set(globals_) - {step.h_path})
                                 | set(new78) | {step.q9})
                assert len(z2_pids) <= 8
                z2 = self.add_bag(z1, z2_pids)
            for child in step.children:
                hit = {pid for pid, _ in child.pieces}
                if step.q9 is not None and step.q9 in hit:
                    assert z2 is not None and hit <= set(self.td_bag_paths(z2))
                    stack.append((child, z2))
                else:
                    assert hit <= set(self.td_bag_paths(z1)), (hit, self.td_bag_paths(z1))
                    stack.append((child, z1))
        assert len(self.path_of) == self.g.n, "paths do not cover the graph"
        td = TreeDecomposition(tuple(self.td_parent), tuple(self.td_bags), 0)
        m = LoopGraph(5 * len(self.paths), self.m_edges)
        p_len = max(self.bfs.level)
        return NiceProductStructure(p_len, self.paths, dict(self.slot), m, td,
                                    self.root)

    def td_bag_paths(self, node: int) -> list[int]:
        return sorted({x // 5 for x in self.td_bags[node]})


def structure_embedding(g: LoopGraph, nps: NiceProductStructure
                        ) -> ProductEmbedding:
    level = bfs_tree(g, nps.root).level
    image = []
    for v in range(g.n):
        pid, j = nps.slot[v]
        image.append((level[v], 5 * pid + j - 1))
    return ProductEmbedding(path_graph(nps.p_len + 1), nps.m, tuple(image))


def build_planar_structure(eg: EmbeddedGraph) -> PlanarStructureResult:
    """Full pipeline: triangulate, recurse, certify.

    The returned structure and embedding cover the triangulation; the
    restriction to the input's vertices is returned alongside (induced-ness
    survives restriction).
    """
    tri = triangulate(eg)
    builder = _StructureBuilder(tri)
    nps = builder.build()
    emb = structure_embedding(tri.graph, nps)
    orig = ProductEmbedding(emb.left, emb.right, emb.image[:eg.graph.n])
    return PlanarStructureResult(tri, nps, emb, orig)


# ---------------------------------------------------------------------------
# verification

def verify_nice_structure(g: LoopGraph, nps: NiceProductStructure,
                          emb: ProductEmbedding, thickness: int = 8,
                          slots: int = 5) -> Verdict:
    """Full check of the structure: factor shape, level/slot consistency,
    distinct slots on consecutive triples, aligned decomposition of bounded
    thickness, and the induced embedding itself."""
    from .graphs import check_induced_embedding
    if nps.m.n != slots * len(nps.paths):
        return Verdict(False, "factor-shape", (nps.m.n,))
    covered: dict[int, int] = {}
    for pid, vs in enumerate(nps.paths):
        for v in vs:
            if v in covered:
                return Verdict(False, "paths-overlap", (v,))
            covered[v] = pid
    if len(covered) != g.n:
        return Verdict(False, "paths-cover", (g.n - len(covered),))
    try:
        level = bfs_tree(g, nps.root).level
    except ValueError as e:
        return Verdict(False, "disconnected", (str(e),))
    for pid, vs in enumerate(nps.paths):
        for a, b in zip(vs, vs[1:]):
            if not g.has_edge(a, b):
                return Verdict(False, "path-not-a-path", (a, b))
            if level[b] != level[a] + 1:
                return Verdict(False, "path-not-vertical", (a, b))
    for v in range(g.n):
        pid, j = nps.slot.get(v, (None, None))
        if pid is None or pid != covered[v] or not 1 <= j <= slots:
            return Verdict(False, "slot-map", (v,))
        a, b = emb.image[v]
        if a != level[v]:
            return Verdict(False, "level-coordinate", (v, a, level[v]))
        if b != slots * pid + j - 1:
            return Verdict(False, "factor-coordinate", (v,))
    for pid, vs in enumerate(nps.paths):
        for i in range(len(vs) - 2):
            js = {nps.slot[vs[i + k]][1] for k in range(3)}
            if len(js) != 3:
                return Verdict(False, "consecutive-slots", (vs[i],))
    for node, bag in enumerate(nps.td.bags):
        pids = {x // slots for x in bag}
        if len(pids) > thickness:
            return Verdict(False, "thickness", (node, len(pids)))
        if bag != frozenset(slots * p + i for p in pids for i in range(slots)):
            return Verdict(False, "alignment", (node,))
    tv = validate_decomposition(nps.m, nps.td)
    if not tv:
        return Verdict(False, "decomposition-" + tv.reason, tv.witness)
    ev = check_induced_embedding(g, emb)
    if not ev:
        return Verdict(False, "embedding-" + ev.reason, ev.witness)
    return Verdict(True)
