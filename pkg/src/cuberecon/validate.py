"""Evidence-producing checks of the CAT(0) hypotheses.

Every check returns a :class:`ValidationReport` whose witnesses point at the
offending vertices or cells, so a failing verdict can be inspected rather
than taken on trust.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

import networkx as nx

from .complex import MAX_DIM, CubeComplex, chart_faces, is_connected, link, orientation_sign

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass(frozen=True)
class Witness:
    check: str
    ids: tuple
    reason: str

    def to_dict(self) -> dict:
        return {"check": self.check, "ids": list(self.ids), "reason": self.reason}


@dataclass
class ValidationReport:
    """Verdict plus the evidence behind it."""

    verdict: str
    witnesses: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.verdict == PASS

    def vertices(self, check: str | None = None) -> set:
        """Base vertices named first in the witnesses of ``check``."""
        return {w.ids[0] for w in self.witnesses if check is None or w.check == check}

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "details": self.details,
        }

    @staticmethod
    def combine(reports) -> "ValidationReport":
        reports = list(reports)
        verdicts = {r.verdict for r in reports}
        if FAIL in verdicts:
            verdict = FAIL
        elif INCONCLUSIVE in verdicts:
            verdict = INCONCLUSIVE
        else:
            verdict = PASS
        out = ValidationReport(verdict)
        for r in reports:
            out.witnesses.extend(r.witnesses)
            out.details.update(r.details)
        return out


def _report(witnesses, details=None) -> ValidationReport:
    return ValidationReport(FAIL if witnesses else PASS, list(witnesses), details or {})


# --------------------------------------------------------------------------
# flag links


def check_flag_links(X: CubeComplex) -> ValidationReport:
    """Every clique in every vertex link must span a simplex.

    With cells of dimension at most three it is enough to look for empty
    triangles and for 4-cliques, which would need a 4-cube.
    """
    out = []
    for v in range(X.n_vertices):
        lk = link(X, v)
        g = lk.graph()
        for a, b, c in _triangles(g):
            if frozenset((a, b, c)) not in lk.triangles:
                out.append(Witness("flag", (v, a, b, c), "empty triangle in link"))
            for d in g[a] & g[b] & g[c]:
                if d > c:
                    out.append(Witness("flag", (v, a, b, c, d), "4-clique in link"))
    return _report(out)


def _triangles(g: dict):
    for a in sorted(g):
        for b in sorted(g[a]):
            if b <= a:
                continue
            for c in sorted(g[a] & g[b]):
                if c > b:
                    yield a, b, c


# --------------------------------------------------------------------------
# homology


def boundary_matrices(X: CubeComplex) -> list:
    """Sparse integer boundary maps ``{(row, col): value}`` for d = 0..3.

    Entry ``d`` maps d-chains to (d-1)-chains; ``d = 0`` is the augmentation
    onto a single generator, so the homology computed from these matrices is
    reduced homology.
    """
    mats = [{(0, v): 1 for v in range(X.n_vertices)}]
    for d in range(1, MAX_DIM + 1):
        m = {}
        for j, c in enumerate(X.cells[d]):
            faces = chart_faces(c)
            for i in range(d):
                for b in (0, 1):
                    f = faces[2 * i + b]
                    r = X.cell_index[d - 1][frozenset(f)]
                    sign = (-1) ** i * (1 if b else -1)
                    sign *= orientation_sign(f, X.cells[d - 1][r]) if d > 1 else 1
                    m[(r, j)] = m.get((r, j), 0) + sign
        mats.append({k: v for k, v in m.items() if v})
    return mats


def smith_invariants(entries: dict, shape: tuple) -> list:
    """Nonzero invariant factors of a sparse integer matrix.

    Unit pivots are eliminated sparsely; whatever is left is passed to a
    dense Smith normal form over Python integers.
    """
    rows: dict = {}
    cols: dict = {}
    for (r, c), v in entries.items():
        if v:
            rows.setdefault(r, {})[c] = v
            cols.setdefault(c, set()).add(r)
    factors = []
    while True:
        pivot = None
        best = None
        for r, row in rows.items():
            for c, v in row.items():
                if v in (1, -1):
                    cost = len(row) * len(cols[c])
                    if best is None or cost < best:
                        best, pivot = cost, (r, c)
                    break
            if best == 1:
                break
        if pivot is None:
            break
        r, c = pivot
        prow = rows.pop(r)
        pv = prow[c]
        for c2 in prow:
            cols[c2].discard(r)
        for r2 in list(cols[c]):
            row2 = rows[r2]
            f = row2[c] * pv  # pv is a unit, so pv == 1/pv
            for c2, v in prow.items():
                nv = row2.get(c2, 0) - f * v
                if nv:
                    if c2 not in row2:
                        cols[c2].add(r2)
                    row2[c2] = nv
                elif c2 in row2:
                    del row2[c2]
                    cols[c2].discard(r2)
            if not row2:
                del rows[r2]
        del cols[c]
        factors.append(1)
    rest = [(r, row) for r, row in rows.items() if row]
    if rest:
        cidx = sorted({c for _, row in rest for c in row})
        pos = {c: i for i, c in enumerate(cidx)}
        dense = []
        for _, row in rest:
            line = [0] * len(cidx)
            for c, v in row.items():
                line[pos[c]] = v
            dense.append(line)
        factors.extend(_dense_snf(dense))
    return factors


def _dense_snf(a: list) -> list:
    a = [row[:] for row in a]
    m = len(a)
    n = len(a[0]) if m else 0
    out = []
    t = 0
    while t < m and t < n:
        nz = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            done = True
            p = a[t][t]
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    for k in range(t, n):
                        a[i][k] -= q * a[t][k]
                    if a[i][t]:
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    for k in range(t, m):
                        a[k][j] -= q * a[k][t]
                    if a[t][j]:
                        done = False
            if not done:
                nz = [(abs(a[i][t]), i, 0) for i in range(t, m) if a[i][t]]
                nz += [(abs(a[t][j]), t, j) for j in range(t, n) if a[t][j]]
                _, i, j = min(nz)
                if j:
                    for row in a:
                        row[t], row[j] = row[j], row[t]
                else:
                    a[t], a[i] = a[i], a[t]
                continue
            # divisibility of the remaining block
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            for k in range(t, n):
                a[t][k] += a[bad][k]
        out.append(abs(a[t][t]))
        t += 1
    return out


def reduced_homology(X: CubeComplex) -> dict:
    """Reduced integral homology as ``{degree: (rank, torsion list)}``."""
    mats = boundary_matrices(X)
    sizes = [len(c) for c in X.cells]
    shapes = [(1, sizes[0])] + [(sizes[d - 1], sizes[d]) for d in range(1, MAX_DIM + 1)]
    inv = [smith_invariants(m, s) for m, s in zip(mats, shapes)]
    inv.append([])
    out = {}
    for d in range(MAX_DIM + 1):
        rank = sizes[d] - len(inv[d]) - len(inv[d + 1])
        torsion = sorted(x for x in inv[d + 1] if x > 1)
        out[d] = (rank, torsion)
    return out


# --------------------------------------------------------------------------
# collapsing


def collapse(X: CubeComplex, budget: int = 1_000_000, seed: int = 0):
    """Search for a free-face collapse of ``X`` onto a vertex.

    Returns ``(collapsed, states)``.  Elementary collapses are taken from the
    highest available dimension first; when the greedy run gets stuck it
    restarts with shuffled tie-breaking until ``budget`` collapse states have
    been visited.
    """
    total = sum(X.counts())
    if total == 0:
        return True, 0
    facets = [[[] for _ in cs] for cs in X.cells]
    for d in range(1, MAX_DIM + 1):
        for i in range(len(X.cells[d])):
            facets[d][i] = X.facets(d, i)
    cof = X.cofaces
    rng = random.Random(seed)
    states = 0
    attempt = 0
    while states < budget:
        alive = [set(range(len(cs))) for cs in X.cells]
        ncof = [[len(cof[d][i]) for i in range(len(X.cells[d]))] for d in range(MAX_DIM)]
        ncof.append([0] * len(X.cells[MAX_DIM]))
        # free pairs keyed by the smaller cell
        buckets = [set() for _ in range(MAX_DIM + 1)]  # by dim of the larger cell
        for d in range(MAX_DIM):
            for i in range(len(X.cells[d])):
                if ncof[d][i] == 1:
                    (j,) = cof[d][i]
                    if ncof[d + 1][j] == 0:
                        buckets[d + 1].add((i, j))
        left = total
        start = states
        keys = None if attempt == 0 else {}
        while left > 1 and states < budget:
            pair = None
            for dd in range(MAX_DIM, 0, -1):
                if buckets[dd]:
                    if keys is None:
                        pair = min(buckets[dd])
                    else:
                        pair = min(buckets[dd], key=lambda p: keys.setdefault(p, rng.random()))
                    buckets[dd].discard(pair)
                    break
            if pair is None:
                break
            i, j = pair
            d = dd - 1
            if i not in alive[d] or j not in alive[dd] or ncof[d][i] != 1 or ncof[dd][j] != 0:
                continue
            states += 1
            alive[d].discard(i)
            alive[dd].discard(j)
            left -= 2
            touched = []
            for f in facets[dd][j]:
                if f != i and f in alive[d]:
                    ncof[d][f] -= 1
                    touched.append((d, f))
            if d > 0:
                for f in facets[d][i]:
                    if f in alive[d - 1]:
                        ncof[d - 1][f] -= 1
                        touched.append((d - 1, f))
            for td, f in touched:
                if ncof[td][f] == 1:
                    (j2,) = [c for c in cof[td][f] if c in alive[td + 1]]
                    if ncof[td + 1][j2] == 0:
                        buckets[td + 1].add((f, j2))
                elif ncof[td][f] == 0 and td > 0:
                    for g in facets[td][f]:
                        if g in alive[td - 1] and ncof[td - 1][g] == 1:
                            buckets[td].add((g, f))
        if left == 1:
            return True, states
        if states == start:
            break
        attempt += 1
    return False, states


def check_contractible(X: CubeComplex, budget: int = 1_000_000) -> ValidationReport:
    """Trivial reduced homology plus a collapse onto a point.

    Verdict ``fail`` when homology is nontrivial or the complex is
    disconnected; ``inconclusive`` when homology vanishes but no collapse was
    found within ``budget`` states.
    """
    if X.n_vertices == 0:
        return ValidationReport(FAIL, [Witness("contractible", (), "empty complex")])
    H = reduced_homology(X)
    details = {"homology": {str(d): {"rank": r, "torsion": t} for d, (r, t) in H.items()}}
    bad = []
    if not is_connected(X):
        bad.append(Witness("contractible", (), "complex is disconnected"))
    for d, (r, t) in H.items():
        if r or t:
            bad.append(Witness("contractible", (), f"reduced H_{d} has rank {r}, torsion {t}"))
    if bad:
        return ValidationReport(FAIL, bad, details)
    ok, states = collapse(X, budget)
    details["collapse_states"] = states
    if ok:
        return ValidationReport(PASS, [], details)
    w = Witness("contractible", (), f"no collapse to a point within {budget} states")
    return ValidationReport(INCONCLUSIVE, [w], details)


# --------------------------------------------------------------------------
# squares and cleanliness


def unfilled_four_cycles(X: CubeComplex) -> list:
    """4-cycles of the 1-skeleton, in cyclic order, bounding no square."""
    adj = [set(a) for a in X.adjacency]
    seen = set()
    out = []
    for a in range(X.n_vertices):
        for c in range(a + 1, X.n_vertices):
            common = sorted(adj[a] & adj[c])
            if c in adj[a] or len(common) < 2:
                continue
            for b, d in itertools.combinations(common, 2):
                if b in adj[d]:
                    continue
                key = frozenset((a, b, c, d))
                if key in seen:
                    continue
                seen.add(key)
                if X.find_cell(key) is None:
                    out.append((a, b, c, d))
    return out


def check_squares_filled(X: CubeComplex) -> ValidationReport:
    ws = [Witness("squares_filled", cyc, "4-cycle bounds no square") for cyc in unfilled_four_cycles(X)]
    return _report(ws)


def cut_vertices(X: CubeComplex) -> list:
    g = nx.Graph()
    g.add_nodes_from(range(X.n_vertices))
    g.add_edges_from(X.edges)
    return sorted(nx.articulation_points(g))


def face_corners(X: CubeComplex) -> list:
    """Vertices of degree 2 lying in exactly one square."""
    return [v for v in range(X.n_vertices) if X.degree(v) == 2 and len(X.vertex_cells[v][2]) == 1]


def degree3_without_cube(X: CubeComplex) -> list:
    return [v for v in range(X.n_vertices) if X.degree(v) == 3 and not X.vertex_cells[v][3]]


def is_clean(X: CubeComplex) -> ValidationReport:
    """Report cut vertices, corners of faces and degree-3 vertices outside cubes."""
    ws = [Witness("cut_vertex", (v,), "removing it disconnects the complex") for v in cut_vertices(X)]
    ws += [Witness("face_corner", (v,), "degree 2, in a single square") for v in face_corners(X)]
    ws += [Witness("degree3_no_cube", (v,), "degree 3 and in no cube") for v in degree3_without_cube(X)]
    return _report(ws)


def validate_cat0(X: CubeComplex, budget: int = 1_000_000) -> ValidationReport:
    """Flag links, contractibility and filled squares together."""
    return ValidationReport.combine(
        [check_flag_links(X), check_contractible(X, budget), check_squares_filled(X)]
    )
