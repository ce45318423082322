"""Sparse exact row echelon data for subspaces of a finite ordered basis.

Pivots are always the *largest* basis index present in a row, so reducing a
vector pushes it toward the low end of the ordering.  For Fock bases ordered
by (degree, modes) that means coset representatives of lowest possible degree.
The set of pivots (leading terms) of a subspace does not depend on the order
in which generators are inserted, so reduced forms are canonical.
"""

from __future__ import annotations

import heapq
from fractions import Fraction

from .fock import CutoffOverflow, FockVector, _sort_key, basis_upto, format_key


class EchelonSpace:
    def __init__(self, size: int):
        self.size = size
        self.rows: dict[int, dict[int, Fraction]] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: dict) -> dict:
        """Return the canonical remainder of ``vec`` (a dict index -> coef)."""
        x = {i: c for i, c in vec.items() if c != 0}
        heap = [-i for i in x if i in self.rows]
        heapq.heapify(heap)
        while heap:
            i = -heapq.heappop(heap)
            c = x.get(i)
            if not c:
                continue
            for j, rc in self.rows[i].items():
                v = x.get(j, 0) - c * rc
                if v:
                    if j not in x and j in self.rows and j != i:
                        heapq.heappush(heap, -j)
                    x[j] = v
                else:
                    x.pop(j, None)
        return x

    def add(self, vec: dict) -> bool:
        """Insert ``vec``; returns True if it enlarged the span."""
        x = self.reduce(vec)
        if not x:
            return False
        p = max(x)
        inv = 1 / Fraction(x[p])
        self.rows[p] = {j: c * inv for j, c in x.items()}
        return True

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)


def nullspace(columns: list[dict], nrows_hint=None) -> list[dict]:
    """Exact kernel of the matrix whose ``j``-th column is ``columns[j]``.

    Columns are dicts row-label -> coef.  Returns kernel vectors as dicts
    column index -> coef.
    """
    # Gaussian elimination on the transpose view: track combinations of columns.
    pivots: dict = {}  # row label -> (column combo, reduced column)
    kernel = []
    for j, col in enumerate(columns):
        vec = {r: Fraction(c) for r, c in col.items() if c != 0}
        combo = {j: Fraction(1)}
        changed = True
        while vec and changed:
            changed = False
            for r in list(vec):
                if r in pivots and vec.get(r):
                    pcombo, pvec = pivots[r]
                    f = vec[r] / pvec[r]
                    for rr, cc in pvec.items():
                        v = vec.get(rr, 0) - f * cc
                        if v:
                            vec[rr] = v
                        else:
                            vec.pop(rr, None)
                    for jj, cc in pcombo.items():
                        v = combo.get(jj, 0) - f * cc
                        if v:
                            combo[jj] = v
                        else:
                            combo.pop(jj, None)
                    changed = True
                    break
        if vec:
            r = min(vec, key=repr)
            pivots[r] = (combo, vec)
        else:
            kernel.append(combo)
    return kernel


class QuotientSpace:
    """``V_{<=N} / span(generators)`` with canonical coset representatives.

    Only generators lying entirely in the ambient basis are admitted, so the
    dimension reported is an upper bound on the image of ``V_{<=N}`` in the
    untruncated quotient.
    """

    def __init__(self, cutoff, sector="untwisted", label=""):
        self.cutoff = cutoff
        self.sector = sector
        self.label = label
        self.keys = basis_upto(cutoff, sector)
        self.index = {k: i for i, k in enumerate(self.keys)}
        self.space = EchelonSpace(len(self.keys))
        self.generator_count = 0

    @property
    def ambient_dim(self) -> int:
        return len(self.keys)

    @property
    def rank(self) -> int:
        return self.space.rank

    @property
    def dim(self) -> int:
        return self.ambient_dim - self.rank

    def _to_index(self, v: FockVector) -> dict:
        out = {}
        for k, c in v.terms.items():
            i = self.index.get(k)
            if i is None:
                raise CutoffOverflow(
                    f"{format_key(k, v.sector)} lies above the quotient cutoff {self.cutoff}"
                )
            out[i] = c
        return out

    def _from_index(self, x: dict) -> FockVector:
        return FockVector({self.keys[i]: c for i, c in x.items()}, self.sector)

    def add_generator(self, v: FockVector) -> bool:
        self.generator_count += 1
        return self.space.add(self._to_index(v))

    def reduce(self, v: FockVector) -> FockVector:
        return self._from_index(self.space.reduce(self._to_index(v)))

    def contains(self, v: FockVector) -> bool:
        return not self.space.reduce(self._to_index(v))

    def fits(self, v: FockVector) -> bool:
        return all(k in self.index for k in v.terms)

    def basis_keys(self):
        """Non-pivot keys: a basis of the quotient by canonical representatives."""
        return [k for i, k in enumerate(self.keys) if i not in self.space.rows]

    def coordinates(self, v: FockVector) -> dict:
        return {k: c for k, c in sorted(self.reduce(v).terms.items(), key=lambda kv: _sort_key(kv[0]))}

    def contains_space(self, other: "QuotientSpace") -> bool:
        """True if every echelon row of ``other`` lies in this span."""
        if other.keys != self.keys:
            raise ValueError("ambient bases differ")
        return all(self.space.contains(row) for row in other.space.rows.values())

    def sum_rank(self, other: "QuotientSpace") -> int:
        combined = EchelonSpace(len(self.keys))
        for row in self.space.rows.values():
            combined.add(row)
        for row in other.space.rows.values():
            combined.add(row)
        return combined.rank

    def rows_as_vectors(self):
        return [self._from_index(r) for _, r in sorted(self.space.rows.items())]
