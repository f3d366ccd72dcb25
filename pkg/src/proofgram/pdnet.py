"""Proof dependency networks and power-law fitting of their in-degrees."""

from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .terms import ProofGrammar

__all__ = [
    "PDNet", "build_pdnet", "write_edges_tsv", "InsufficientData", "PowerLawFit",
    "fit_power_law", "ccdf", "write_ccdf_csv", "MIN_TAIL",
]

MIN_TAIL = 10


@dataclass
class PDNet:
    """Directed multigraph: edge p -> q counts occurrences of q in p's RHS."""

    nodes: list = field(default_factory=list)
    edges: dict = field(default_factory=dict)   # (src, dst) -> count

    def in_degree(self) -> dict:
        deg = dict.fromkeys(self.nodes, 0)
        for (_, q), c in self.edges.items():
            deg[q] += c
        return deg

    def out_degree(self) -> dict:
        deg = dict.fromkeys(self.nodes, 0)
        for (p, _), c in self.edges.items():
            deg[p] += c
        return deg

    @property
    def edge_count(self) -> int:
        return sum(self.edges.values())


def build_pdnet(G: ProofGrammar) -> PDNet:
    from .compress.metrics import _name_counts
    names = set(G.nonterminals)
    net = PDNet(list(G.nonterminals))
    for p in G.productions:
        for q, c in sorted(_name_counts(p.rhs, names).items()):
            net.edges[(p.nonterminal, q)] = c
    return net


def write_edges_tsv(out, net: PDNet, header: Iterable[str] = ()) -> None:
    for h in header:
        out.write(f"# {h}\n")
    for (p, q), c in net.edges.items():
        out.write(f"{p}\t{q}\t{c}\n")


# ---------------------------------------------------------------------------
# power-law fit

class InsufficientData(ValueError):
    """Fewer than MIN_TAIL degrees at or above kmin."""


@dataclass(frozen=True)
class PowerLawFit:
    alpha: float
    kmin: int
    ks: float
    n_tail: int
    n_zero: int = 0          # zero degrees dropped before fitting
    degenerate: bool = False
    method: str = "approx"


def _approx_alpha(tail_log_sum: float, n: int, kmin: int) -> float:
    denom = tail_log_sum - n * math.log(kmin - 0.5)
    return math.inf if denom <= 0 else 1.0 + n / denom


def _discrete_alpha(tail_log_sum: float, n: int, kmin: int) -> float:
    # maximize -alpha * sum(ln k) - n * ln zeta(alpha, kmin)
    from scipy.optimize import minimize_scalar
    from scipy.special import zeta

    def nll(a):
        return a * tail_log_sum + n * math.log(zeta(a, kmin))
    res = minimize_scalar(nll, bounds=(1.0001, 20.0), method="bounded",
                          options={"xatol": 1e-7})
    return float(res.x)


def _fitted_ccdf(k: float, kmin: int, alpha: float, method: str) -> float:
    if method == "discrete":
        from scipy.special import zeta
        return float(zeta(alpha, k) / zeta(alpha, kmin))
    return ((k - 0.5) / (kmin - 0.5)) ** (1.0 - alpha)


def _ks(tail: Sequence[int], kmin: int, alpha: float, method: str) -> float:
    n = len(tail)
    d = 0.0
    i = 0
    while i < n:
        v = tail[i]
        emp = (n - i) / n
        d = max(d, abs(emp - _fitted_ccdf(v, kmin, alpha, method)))
        i = bisect.bisect_right(tail, v, i)
    return d


def fit_power_law(degrees: Iterable[int], kmin: Union[int, str] = "auto",
                  method: str = "approx") -> PowerLawFit:
    """Fit p(k) ~ k^-alpha to the degrees >= kmin by maximum likelihood.

    ``method='approx'`` uses the closed form
    alpha = 1 + n / sum(ln(k_i / (kmin - 1/2))); ``'discrete'`` maximizes the
    exact discrete likelihood (needs scipy).  With ``kmin='auto'`` the kmin
    minimizing the KS distance between empirical and fitted CCDF is chosen,
    ties going to the smallest.  A tail of one distinct value is reported as
    degenerate with KS distance 1.
    """
    if method not in ("approx", "discrete"):
        raise ValueError(f"unknown fit method {method!r}")
    ks = sorted(degrees)
    if ks and ks[0] < 0:
        raise ValueError("degrees must be nonnegative")
    n_zero = bisect.bisect_left(ks, 1)
    ks = ks[n_zero:]
    alpha_of = _approx_alpha if method == "approx" else _discrete_alpha
    # suffix sums of ln k
    suffix = [0.0] * (len(ks) + 1)
    for j in range(len(ks) - 1, -1, -1):
        suffix[j] = suffix[j + 1] + math.log(ks[j])

    def fit_at(km: int) -> Optional[PowerLawFit]:
        i = bisect.bisect_left(ks, km)
        tail = ks[i:]
        n = len(tail)
        if n < MIN_TAIL:
            return None
        if tail[0] == tail[-1]:
            return PowerLawFit(math.inf, km, 1.0, n, n_zero, True, method)
        a = alpha_of(suffix[i], n, km)
        return PowerLawFit(a, km, _ks(tail, km, a, method), n, n_zero, False, method)

    if kmin != "auto":
        if not isinstance(kmin, int) or kmin < 1:
            raise ValueError(f"kmin must be a positive integer or 'auto', got {kmin!r}")
        res = fit_at(kmin)
        if res is None:
            raise InsufficientData(f"fewer than {MIN_TAIL} degrees >= {kmin}")
        return res
    best = None
    for km in sorted(set(ks)):
        res = fit_at(km)
        if res is None:
            break
        if res.degenerate:
            if best is None:
                best = res
            continue
        if best is None or best.degenerate or res.ks < best.ks:
            best = res
    if best is None:
        raise InsufficientData(f"fewer than {MIN_TAIL} positive degrees")
    return best


def ccdf(degrees: Iterable[int]) -> list:
    """[(k, P(X >= k))] over the distinct positive degrees, ascending."""
    ks = sorted(d for d in degrees if d > 0)
    n = len(ks)
    out = []
    i = 0
    while i < n:
        v = ks[i]
        out.append((v, (n - i) / n))
        i = bisect.bisect_right(ks, v, i)
    return out


def write_ccdf_csv(out, degrees: Iterable[int], fit: Optional[PowerLawFit] = None,
                   header: Iterable[str] = ()) -> None:
    """Columns k,ccdf_empirical,ccdf_fitted; the fit is scaled to meet the
    empirical curve at kmin and left empty below it."""
    for h in header:
        out.write(f"# {h}\n")
    rows = ccdf(degrees)
    anchor = None
    if fit is not None and not fit.degenerate:
        anchor = next((c for k, c in rows if k >= fit.kmin), None)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["k", "ccdf_empirical", "ccdf_fitted"])
    for k, c in rows:
        fitted = ""
        if anchor is not None and k >= fit.kmin:
            fitted = f"{anchor * _fitted_ccdf(k, fit.kmin, fit.alpha, fit.method):.6g}"
        w.writerow([k, f"{c:.6g}", fitted])

