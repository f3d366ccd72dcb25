"""Pure-Python TreeRePair replacement kernel (fallback for the compiled one).

A forest of ranked trees with integer symbols.  Digram occurrences are kept
in lazily cleaned lists keyed by ``(f << 40) | (g << 12) | i``; counts are
exact.  A digram (f, i, f) may overlap itself along a chain, in which case
the non-overlapping count is obtained greedily from the bottom of each
chain.  The most frequent digram wins, ties going to the smallest key.
"""

from __future__ import annotations

import heapq

__all__ = ["TreeStore"]

_MAX_INDEX = 1 << 12
_MAX_SYM = 1 << 24


def _key(f, g, i):
    return (f << 40) | (g << 12) | i


def _unkey(k):
    return k >> 40, (k >> 12) & 0xFFFFFFF, k & 0xFFF


class TreeStore:
    def __init__(self):
        self.arity: list[int] = []
        self.child_ok: list[bool] = []
        self.parent_ok: list[bool] = []
        self.sym: list[int] = []
        self.kids: list[list[int]] = []
        self.parent: list[int] = []
        self.pidx: list[int] = []
        self.alive: list[bool] = []

    # --- construction -----------------------------------------------------
    def add_symbol(self, arity: int, child_ok: bool = True, parent_ok: bool = True) -> int:
        if len(self.arity) >= _MAX_SYM:
            raise OverflowError("too many symbols")
        self.arity.append(arity)
        self.child_ok.append(child_ok)
        self.parent_ok.append(parent_ok)
        return len(self.arity) - 1

    def add(self, sym: int, kids) -> int:
        kids = list(kids)
        if len(kids) != self.arity[sym]:
            raise ValueError(f"symbol {sym} has arity {self.arity[sym]}, got {len(kids)} kids")
        n = len(self.sym)
        for j, c in enumerate(kids):
            if self.parent[c] != -1:
                raise ValueError(f"node {c} already has a parent")
            self.parent[c] = n
            self.pidx[c] = j
        self.sym.append(sym)
        self.kids.append(kids)
        self.parent.append(-1)
        self.pidx.append(-1)
        self.alive.append(True)
        return n

    def node_sym(self, n: int) -> int:
        return self.sym[n]

    def node_kids(self, n: int) -> list:
        return list(self.kids[n])

    def symbol_arity(self, s: int) -> int:
        return self.arity[s]

    def num_symbols(self) -> int:
        return len(self.arity)

    # --- occurrence bookkeeping ----------------------------------------------
    def _counted(self, f, g) -> bool:
        return self.parent_ok[f] and self.child_ok[g]

    def _inc(self, P, j):
        f = self.sym[P]
        c = self.kids[P][j]
        g = self.sym[c]
        if not self._counted(f, g):
            return
        k = _key(f, g, j)
        lst = self.occ.get(k)
        if lst is None:
            self.occ[k] = [P]
            self.count[k] = 1
        else:
            lst.append(P)
            self.count[k] += 1
        self.changed.add(k)

    def _dec(self, P, j):
        f = self.sym[P]
        g = self.sym[self.kids[P][j]]
        if not self._counted(f, g):
            return
        k = _key(f, g, j)
        self.count[k] -= 1
        self.changed.add(k)

    def _valid(self, P, f, g, i) -> bool:
        if not self.alive[P] or self.sym[P] != f:
            return False
        ks = self.kids[P]
        return i < len(ks) and self.sym[ks[i]] == g

    def _occurrences(self, k):
        f, g, i = _unkey(k)
        lst = [P for P in self.occ.get(k, ()) if self._valid(P, f, g, i)]
        self.occ[k] = lst
        return lst

    def _nonoverlapping(self, k, lst):
        f, g, i = _unkey(k)
        if f != g:
            return lst
        inset = set(lst)
        chosen = []
        for P in lst:
            if self.kids[P][i] in inset:
                continue            # not the bottom of its chain
            take = True
            cur = P
            while True:
                if take:
                    chosen.append(cur)
                take = not take
                up = self.parent[cur]
                if up == -1 or up not in inset or self.pidx[cur] != i:
                    break
                cur = up
        return chosen

    def _push(self, k):
        # a new version invalidates all older heap entries of k
        self.ver[k] = v = self.ver.get(k, 0) + 1
        c = self.count.get(k, 0)
        if c <= 0:
            return
        f, g, i = _unkey(k)
        if self.cap and self.arity[f] - 1 + self.arity[g] > self.cap:
            return
        heapq.heappush(self.heap, (-c, k, v, False))

    # --- replacement ----------------------------------------------------------
    def _replace(self, P, i, h):
        C = self.kids[P][i]
        up = self.parent[P]
        if up != -1:
            self._dec(up, self.pidx[P])
        for j in range(len(self.kids[P])):
            self._dec(P, j)
        for j in range(len(self.kids[C])):
            self._dec(C, j)
        ck = self.kids[C]
        new = self.kids[P][:i] + ck + self.kids[P][i + 1:]
        self.sym[P] = h
        self.kids[P] = new
        for j, c in enumerate(new):
            self.parent[c] = P
            self.pidx[c] = j
        self.alive[C] = False
        self.kids[C] = []
        self.parent[C] = -1
        for j in range(len(new)):
            self._inc(P, j)
        if up != -1:
            self._inc(up, self.pidx[P])

    def run(self, min_occ: int = 2, arity_cap: int = 0, max_rules: int = -1) -> list:
        """Replace digrams until none occurs ``min_occ`` times.

        Returns the introduced rules as ``(h, f, i, g)`` with ``i`` 0-based:
        ``h(x1..x_{n-1+m}) = f(x1..x_i, g(..m..), ...)``.
        """
        self.occ: dict = {}
        self.count: dict = {}
        self.ver: dict = {}
        self.heap: list = []
        self.changed: set = set()
        self.cap = arity_cap
        for P in range(len(self.sym)):
            if self.alive[P]:
                for j in range(len(self.kids[P])):
                    if j >= _MAX_INDEX:
                        raise OverflowError("arity too large")
                    self._inc(P, j)
        for k in sorted(self.changed):
            self._push(k)
        self.changed = set()
        rules = []
        while self.heap and max_rules != 0:
            negc, k, v, exact = heapq.heappop(self.heap)
            if self.ver.get(k) != v:
                continue
            c = -negc
            if c < min_occ:
                break
            f, g, i = _unkey(k)
            lst = self._occurrences(k)
            chosen = self._nonoverlapping(k, lst)
            if len(chosen) != c:
                # stale upper bound for a self-overlapping digram
                self.ver[k] = v + 1
                if len(chosen) > 0:
                    heapq.heappush(self.heap, (-len(chosen), k, v + 1, True))
                continue
            h = self.add_symbol(self.arity[f] - 1 + self.arity[g])
            rules.append((h, f, i, g))
            for P in chosen:
                self._replace(P, i, h)
            for kk in sorted(self.changed):
                self._push(kk)
            self.changed = set()
            max_rules -= 1
        return rules
