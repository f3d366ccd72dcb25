# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled TreeRePair replacement kernel; same interface and results as
:mod:`proofgram.compress._pytreestore`."""

from libcpp.vector cimport vector
from libcpp.unordered_map cimport unordered_map
from libcpp.unordered_set cimport unordered_set
from libcpp.algorithm cimport sort as csort
from libcpp.queue cimport priority_queue
from libcpp cimport bool as cbool

cdef extern from * nogil:
    """
    struct HeapEntry {
        long long c; long long k; long long v;
        bool operator<(const HeapEntry& o) const {
            if (c != o.c) return c < o.c;
            if (k != o.k) return k > o.k;
            return v > o.v;
        }
    };
    """
    cdef cppclass HeapEntry:
        long long c
        long long k
        long long v

ctypedef long long i64

cdef inline i64 _key(i64 f, i64 g, i64 i) nogil:
    return (f << 40) | (g << 12) | i


cdef class TreeStore:
    cdef vector[int] arity
    cdef vector[char] child_ok
    cdef vector[char] parent_ok
    cdef vector[int] sym
    cdef vector[vector[int]] kids
    cdef vector[int] parent
    cdef vector[int] pidx
    cdef vector[char] alive
    cdef unordered_map[i64, vector[int]] occ
    cdef unordered_map[i64, i64] count
    cdef unordered_map[i64, i64] ver
    cdef priority_queue[HeapEntry] heap
    cdef vector[i64] changed
    cdef int cap

    def add_symbol(self, int arity, child_ok=True, parent_ok=True):
        if self.arity.size() >= (1 << 24):
            raise OverflowError("too many symbols")
        cdef char co = 1 if child_ok else 0
        cdef char po = 1 if parent_ok else 0
        self.arity.push_back(arity)
        self.child_ok.push_back(co)
        self.parent_ok.push_back(po)
        return self.arity.size() - 1

    def add(self, int s, kids):
        cdef vector[int] ks
        cdef int n = self.sym.size()
        cdef int j, c
        for c in kids:
            ks.push_back(c)
        if <int>ks.size() != self.arity[s]:
            raise ValueError(f"symbol {s} has arity {self.arity[s]}, got {ks.size()} kids")
        for j in range(<int>ks.size()):
            c = ks[j]
            if self.parent[c] != -1:
                raise ValueError(f"node {c} already has a parent")
            self.parent[c] = n
            self.pidx[c] = j
        self.sym.push_back(s)
        self.kids.push_back(ks)
        self.parent.push_back(-1)
        self.pidx.push_back(-1)
        self.alive.push_back(1)
        return n

    def node_sym(self, int n):
        return self.sym[n]

    def node_kids(self, int n):
        return [c for c in self.kids[n]]

    def symbol_arity(self, int s):
        return self.arity[s]

    def num_symbols(self):
        return self.arity.size()

    cdef inline void _inc(self, int P, int j):
        cdef int f = self.sym[P]
        cdef int g = self.sym[self.kids[P][j]]
        if not (self.parent_ok[f] and self.child_ok[g]):
            return
        cdef i64 k = _key(f, g, j)
        self.occ[k].push_back(P)
        self.count[k] += 1
        self.changed.push_back(k)

    cdef inline void _dec(self, int P, int j):
        cdef int f = self.sym[P]
        cdef int g = self.sym[self.kids[P][j]]
        if not (self.parent_ok[f] and self.child_ok[g]):
            return
        cdef i64 k = _key(f, g, j)
        self.count[k] -= 1
        self.changed.push_back(k)

    cdef inline cbool _valid(self, int P, int f, int g, int i):
        if not self.alive[P] or self.sym[P] != f:
            return False
        return i < <int>self.kids[P].size() and self.sym[self.kids[P][i]] == g

    cdef void _push(self, i64 k):
        cdef i64 v = self.ver[k] + 1
        self.ver[k] = v
        cdef i64 c = self.count[k]
        if c <= 0:
            return
        cdef int f = k >> 40
        cdef int g = (k >> 12) & 0xFFFFFFF
        if self.cap and self.arity[f] - 1 + self.arity[g] > self.cap:
            return
        cdef HeapEntry e
        e.c = c
        e.k = k
        e.v = v
        self.heap.push(e)

    cdef void _flush(self):
        cdef size_t a
        csort(self.changed.begin(), self.changed.end())
        for a in range(self.changed.size()):
            if a == 0 or self.changed[a] != self.changed[a - 1]:
                self._push(self.changed[a])
        self.changed.clear()

    cdef void _replace(self, int P, int i, int h):
        cdef int C = self.kids[P][i]
        cdef int up = self.parent[P]
        cdef int j
        cdef vector[int] nk
        if up != -1:
            self._dec(up, self.pidx[P])
        for j in range(<int>self.kids[P].size()):
            self._dec(P, j)
        for j in range(<int>self.kids[C].size()):
            self._dec(C, j)
        for j in range(i):
            nk.push_back(self.kids[P][j])
        for j in range(<int>self.kids[C].size()):
            nk.push_back(self.kids[C][j])
        for j in range(i + 1, <int>self.kids[P].size()):
            nk.push_back(self.kids[P][j])
        self.sym[P] = h
        self.kids[P] = nk
        for j in range(<int>nk.size()):
            self.parent[nk[j]] = P
            self.pidx[nk[j]] = j
        self.alive[C] = 0
        self.kids[C].clear()
        self.parent[C] = -1
        for j in range(<int>nk.size()):
            self._inc(P, j)
        if up != -1:
            self._inc(up, self.pidx[P])

    cdef vector[int] _chosen(self, i64 k):
        cdef int f = k >> 40
        cdef int g = (k >> 12) & 0xFFFFFFF
        cdef int i = k & 0xFFF
        cdef vector[int] lst
        cdef vector[int] out
        cdef unordered_set[int] inset
        cdef int P, cur, up
        cdef cbool take
        for P in self.occ[k]:
            if self._valid(P, f, g, i):
                lst.push_back(P)
        self.occ[k] = lst
        if f != g:
            return lst
        for P in lst:
            inset.insert(P)
        for P in lst:
            if inset.count(self.kids[P][i]):
                continue
            take = True
            cur = P
            while True:
                if take:
                    out.push_back(cur)
                take = not take
                up = self.parent[cur]
                if up == -1 or not inset.count(up) or self.pidx[cur] != i:
                    break
                cur = up
        return out

    def run(self, int min_occ=2, int arity_cap=0, long max_rules=-1):
        cdef int P, j, f, g, i, h
        cdef i64 k, c, v
        cdef HeapEntry e
        cdef vector[int] chosen
        self.cap = arity_cap
        for P in range(<int>self.sym.size()):
            if self.alive[P]:
                if self.kids[P].size() >= (1 << 12):
                    raise OverflowError("arity too large")
                for j in range(<int>self.kids[P].size()):
                    self._inc(P, j)
        self._flush()
        rules = []
        while not self.heap.empty() and max_rules != 0:
            e = self.heap.top()
            self.heap.pop()
            k = e.k
            v = e.v
            if self.ver[k] != v:
                continue
            c = e.c
            if c < min_occ:
                break
            f = k >> 40
            g = (k >> 12) & 0xFFFFFFF
            i = k & 0xFFF
            chosen = self._chosen(k)
            if <i64>chosen.size() != c:
                self.ver[k] = v + 1
                if chosen.size() > 0:
                    e.c = chosen.size()
                    e.v = v + 1
                    self.heap.push(e)
                continue
            h = self.add_symbol(self.arity[f] - 1 + self.arity[g])
            rules.append((h, f, i, g))
            for P in chosen:
                self._replace(P, i, h)
            self._flush()
            max_rules -= 1
        return rules
