"""Exact permutation and derangement counting.

Three counters with nested domains:

* count_bruteforce -- checks all n! bijections, n <= 10 (ground truth);
* count_permanent  -- Ryser permanents of A and A+I, n <= 30;
* count_layered    -- transfer-matrix over per-part fixed sets, the
  workhorse for blow-up subgraphs (cost exponential in k, not in k*ell).

A permutation in a digraph is a bijection where each vertex is fixed or
maps along an out-edge; a derangement fixes nothing.  Counting permutations
equals the permanent of adjacency-plus-identity, derangements the permanent
of the adjacency matrix.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .digraph import BlowupDigraph, Digraph, SampledSubgraph

BRUTEFORCE_MAX_N = 10
PERMANENT_MAX_N = 30
LAYERED_MAX_K = 12


@dataclass(frozen=True)
class CountPair:
    """Exact derangement and permutation counts for one digraph."""

    derangements: int
    permutations: int

    def ratio(self) -> Fraction:
        return Fraction(self.derangements, self.permutations)


def count_bruteforce(g: Digraph) -> CountPair:
    """Count by checking every bijection directly against the definition."""
    if g.n > BRUTEFORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTEFORCE_MAX_N}, got {g.n}")
    edges = g.edges
    der = 0
    per = 0
    for f in itertools.permutations(range(g.n)):
        fixes = 0
        ok = True
        for v in range(g.n):
            if f[v] == v:
                fixes += 1
            elif (v, f[v]) not in edges:
                ok = False
                break
        if ok:
            per += 1
            if fixes == 0:
                der += 1
    return CountPair(derangements=der, permutations=per)


def permanent(matrix) -> int:
    """Permanent of a square 0/1 matrix via Ryser's inclusion-exclusion.

    O(2^n * n); exact big-integer result.
    """
    n = len(matrix)
    if n > PERMANENT_MAX_N:
        raise ValueError(f"permanent limited to n <= {PERMANENT_MAX_N}, got {n}")
    if n == 0:
        return 1
    rows = []
    for row in matrix:
        if len(row) != n:
            raise ValueError("matrix must be square")
        mask = 0
        for j, a in enumerate(row):
            if a not in (0, 1):
                raise ValueError("matrix entries must be 0 or 1")
            if a:
                mask |= 1 << j
        rows.append(mask)
    return _permanent_bitrows(rows, (1 << n) - 1, n)


def _permanent_bitrows(rows: list[int], col_mask: int, n: int) -> int:
    """Permanent of the minor with the given rows and column mask.

    len(rows) must equal popcount(col_mask) = n.  Ryser in the form
    perm = sum over S subset of columns of (-1)^(n-|S|) prod_i |row_i & S|.
    """
    if n == 0:
        return 1
    total = 0
    s = col_mask
    # enumerate all non-empty subsets of col_mask
    while s:
        prod = 1
        for r in rows:
            prod *= (r & s).bit_count()
            if not prod:
                break
        if prod:
            if (n - s.bit_count()) & 1:
                total -= prod
            else:
                total += prod
        s = (s - 1) & col_mask
    return total


def count_permanent(g: Digraph) -> CountPair:
    """derangements = perm(A), permutations = perm(A + I)."""
    n = g.n
    if n > PERMANENT_MAX_N:
        raise ValueError(f"permanent counting limited to n <= {PERMANENT_MAX_N}")
    adj = [0] * n
    for u, v in g.edges:
        adj[u] |= 1 << v
    full = (1 << n) - 1
    der = _permanent_bitrows(adj, full, n)
    per = _permanent_bitrows([adj[i] | (1 << i) for i in range(n)], full, n)
    return CountPair(derangements=der, permutations=per)


def count_layered(g: SampledSubgraph) -> CountPair:
    """Exact counts using the layered structure of blow-up subgraphs.

    Every permutation fixes the same number i of vertices in each part and
    matches the non-fixed vertices of part c perfectly into the non-fixed
    vertices of part c+1.  Summing over i:

        permutations = sum_i trace(T_1^(i) ... T_ell^(i))

    where T_c^(i) is indexed by pairs of i-subsets (F of part c, F' of part
    c+1) with entry = number of perfect matchings of layer c avoiding F and
    F' (a permanent of a (k-i) x (k-i) minor).  The i = 0 term is the
    derangement count, a product of per-layer permanents.
    """
    base = g.base
    k, ell = base.k, base.ell
    if k > LAYERED_MAX_K:
        raise ValueError(f"layered counting limited to k <= {LAYERED_MAX_K}")
    full = (1 << k) - 1
    subsets_by_size: list[list[int]] = [[] for _ in range(k + 1)]
    for mask in range(1 << k):
        subsets_by_size[mask.bit_count()].append(mask)

    layer_edge_counts = [sum(r.bit_count() for r in rows) for rows in g.layers]

    permutations = 0
    derangements = 0
    for i in range(k + 1):
        need = k - i
        if any(cnt < need for cnt in layer_edge_counts):
            continue
        fixed_sets = subsets_by_size[i]
        mats = [
            _layer_matrix(g.layers[c], fixed_sets, need, full) for c in range(ell)
        ]
        term = _trace_product(mats)
        permutations += term
        if i == 0:
            derangements = term
    return CountPair(derangements=derangements, permutations=permutations)


def _layer_matrix(rows, fixed_sets: list[int], need: int, full: int):
    """Matrix of minor permanents over all (row fixed set, col fixed set) pairs."""
    mat = []
    for f_rows in fixed_sets:
        active = [rows[r] for r in range(len(rows)) if not (f_rows >> r) & 1]
        row_out = []
        for f_cols in fixed_sets:
            row_out.append(
                _permanent_bitrows([r & ~f_cols for r in active], full & ~f_cols, need)
            )
        mat.append(row_out)
    return mat


def _trace_product(mats) -> int:
    """trace(M_1 * ... * M_t) for square big-int matrices."""
    if len(mats) == 2:
        a, b = mats
        n = len(a)
        return sum(a[x][y] * b[y][x] for x in range(n) for y in range(n))
    m = mats[0]
    n = len(m)
    for nxt in mats[1:]:
        m = [
            [sum(m[x][z] * nxt[z][y] for z in range(n)) for y in range(n)]
            for x in range(n)
        ]
    return sum(m[x][x] for x in range(n))


def closed_form_counts(k: int, ell: int) -> CountPair:
    """Exact counts for the full blow-up: (k!)^ell derangements and
    sum_i (C(k,i) (k-i)!)^ell permutations."""
    if k < 1 or ell < 2:
        raise ValueError("need k >= 1 and ell >= 2")
    der = math.factorial(k) ** ell
    per = sum(
        (math.comb(k, i) * math.factorial(k - i)) ** ell for i in range(k + 1)
    )
    return CountPair(derangements=der, permutations=per)


def closed_form_ratio(k: int, ell: int) -> Fraction:
    """Exact derangement-to-permutation ratio of the full blow-up."""
    c = closed_form_counts(k, ell)
    return Fraction(c.derangements, c.permutations)


def count(g, method: str = "auto") -> CountPair:
    """Dispatch to a counter by name; 'auto' picks the cheapest valid one."""
    if method == "layered" or (method == "auto" and isinstance(g, SampledSubgraph)):
        if isinstance(g, BlowupDigraph):
            g = g.full_subgraph()
        if not isinstance(g, SampledSubgraph):
            raise ValueError("layered counting needs a blow-up subgraph")
        return count_layered(g)
    from .digraph import to_general

    plain = to_general(g) if not isinstance(g, Digraph) else g
    if method == "brute" or (method == "auto" and plain.n <= BRUTEFORCE_MAX_N):
        return count_bruteforce(plain)
    if method in ("permanent", "auto"):
        return count_permanent(plain)
    raise ValueError(f"unknown counting method {method!r}")
