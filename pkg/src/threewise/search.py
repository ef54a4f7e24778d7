"""Exhaustive search over (r,t)-maximal families on small ground sets.

Families are enumerated with an include/exclude search on candidate
generators (Bron-Kerbosch style), then grouped into isomorphism classes by
a canonical form.  On top of that sit exhaustive checks of the recognition
lemmas for the frontier families and of the stability trichotomy.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .exact import compare, p0_of_t
from .families import (
    CapExceeded,
    ExplicitFamily,
    _minimal_array,
    elements_of,
    embeds_in_frontier_copy,
    families_from_text,
    families_to_text,
    frontier_family,
    popcounts,
)
from .measure import frontier_closed_form, mu
from .report import NOT_APPLICABLE, AuditReport
from .shifting import DEFAULT_POLICIES, _indices, shift_fixpoint, shift_once

CANON_MAX_N = 8
DEFAULT_ENUM_CAP = 6
FORMAT_VERSION = 1
CACHE_ENV = "THREEWISE_CACHE"


# ---------------------------------------------------------------------------
# canonical forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IsoClass:
    canonical: ExplicitFamily
    orbit_size: int
    generators: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return self.canonical.n

    def key(self) -> bytes:
        return _table_key(self.canonical.table)


def _table_key(table: np.ndarray) -> bytes:
    return np.packbits(table).tobytes()


def _element_classes(fam: ExplicitFamily) -> list[list[int]]:
    """Elements grouped by an isomorphism invariant, groups in invariant order."""
    n = fam.n
    members = fam.members()
    gens = _minimal_array(fam).astype(np.int64)
    keys = {}
    for e in range(n):
        bit = 1 << e
        keys.setdefault(
            (-int(((members & bit) != 0).sum()), -int(((gens & bit) != 0).sum())), []
        ).append(e)
    return [keys[k] for k in sorted(keys)]


def _label_maps(classes: list[list[int]]):
    """Every map from labels to elements that sends label blocks to classes."""
    for parts in itertools.product(*(itertools.permutations(c) for c in classes)):
        yield [e for part in parts for e in part]


def canonicalize(fam: ExplicitFamily, *, max_n: int = CANON_MAX_N) -> IsoClass:
    """Canonical representative of the isomorphism class of ``fam``.

    The minimum membership table (as a bit string) is taken over the
    relabelings that list elements in order of a degree invariant; any
    isomorphism preserves that invariant, so isomorphic families get the
    same table.  The number of relabelings attaining the minimum equals the
    automorphism count, which gives the orbit size ``n!/|Aut|``.
    """
    n = fam.n
    if n > max_n:
        raise CapExceeded(f"canonicalize supports n <= {max_n}, got {n}")
    idx = _indices(n)
    bits = [((idx >> b) & 1) for b in range(n)]
    best = None
    count = 0
    maps = _label_maps(_element_classes(fam))
    while True:
        batch = list(itertools.islice(maps, 5040))
        if not batch:
            break
        inv = np.array(batch, dtype=np.int64)
        src = np.zeros((len(batch), 1 << n), dtype=np.int64)
        for b in range(n):
            src |= bits[b][None, :] << inv[:, b][:, None]
        packed = np.packbits(fam.table[src], axis=1)
        order = np.lexsort(packed.T[::-1])
        row = packed[order[0]]
        key = row.tobytes()
        ties = int((packed == row).all(axis=1).sum())
        if best is None or key < best[0]:
            best = (key, int(order[0]), src[order[0]])
            count = ties
        elif key == best[0]:
            count += ties
    canon = ExplicitFamily(n, fam.table[best[2]])
    gens = tuple(tuple(elements_of(int(g))) for g in sorted(_minimal_array(canon).tolist()))
    return IsoClass(canon, math.factorial(n) // count, gens)


def is_isomorphic(a: ExplicitFamily, b: ExplicitFamily) -> bool:
    if a.n != b.n or len(a) != len(b):
        return False
    return canonicalize(a).canonical == canonicalize(b).canonical


def orbit(iso: IsoClass) -> list[ExplicitFamily]:
    """All distinct relabelings of the class representative."""
    fam = iso.canonical
    seen = {}
    for perm in itertools.permutations(range(1, fam.n + 1)):
        g = fam.relabel(perm)
        seen.setdefault(_table_key(g.table), g)
    out = [seen[k] for k in sorted(seen)]
    assert len(out) == iso.orbit_size
    return out


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def _meets(gens: np.ndarray, k: int) -> np.ndarray:
    """Minimal masks among intersections of ``k`` generators (repetition allowed)."""
    w = np.unique(gens)
    for _ in range(k - 1):
        w = np.unique(np.concatenate([w, (w[:, None] & gens[None, :]).ravel()]))
    # keep only inclusion-minimal masks
    sub = (w[:, None] & w[None, :]) == w[None, :]
    np.fill_diagonal(sub, False)
    return w[~sub.any(axis=1)]


def _compatible_many(cands: np.ndarray, gens: np.ndarray, r: int, t: int) -> np.ndarray:
    """For each candidate, whether adding it keeps ``up(gens)`` r-wise t-intersecting."""
    ok = np.bitwise_count(cands) >= t
    if gens.size == 0 or cands.size == 0:
        return ok
    w = _meets(gens, r - 1)
    return ok & (np.bitwise_count(cands[:, None] & w[None, :]).min(axis=1) >= t)


def _minimal_of(masks: np.ndarray) -> np.ndarray:
    if masks.size == 0:
        return masks
    m = np.unique(masks)
    sup = (m[:, None] & m[None, :]) == m[None, :]
    np.fill_diagonal(sup, False)
    return m[~sup.any(axis=1)]


@dataclass
class _Node:
    gens: np.ndarray
    P: np.ndarray
    X: np.ndarray


def _children(node: _Node, n: int, r: int, t: int) -> list[_Node]:
    """Include and exclude branches on the first candidate, after pruning."""
    gens, P, X = node.gens, node.P, node.X
    if X.size:
        pool = _minimal_of(np.concatenate([gens, P]))
        if _compatible_many(X, pool, r, t).any():
            return []
    v = P[0]
    out = []
    above = (P & v) == v
    if not ((X & v) == v).any():
        g2 = np.append(gens[(gens & v) != v], v)
        rest = P[~above]
        out.append(_Node(g2, rest[_compatible_many(rest, g2, r, t)], X[_compatible_many(X, g2, r, t)]))
    below = (P & v) == P
    out.append(_Node(gens, P[~below], np.concatenate([X, P[below]])))
    return out


def _search(node: _Node, n: int, r: int, t: int, out: list[int]):
    stack = [node]
    while stack:
        cur = stack.pop()
        if cur.P.size == 0:
            if cur.X.size == 0:
                out.append(cur.gens)
            continue
        stack.extend(reversed(_children(cur, n, r, t)))


def _root(n: int, t: int) -> _Node:
    sizes = popcounts(n)
    cands = np.flatnonzero(sizes >= t).astype(np.uint64)
    # large sets first: including them commits little, excluding prunes much
    cands = cands[np.lexsort((cands, -sizes[cands.astype(np.int64)]))]
    empty = np.zeros(0, dtype=np.uint64)
    return _Node(empty, cands, empty)


def _run_subtree(args) -> list[list[int]]:
    node, n, r, t = args
    found = []
    _search(node, n, r, t, found)
    return [sorted(int(g) for g in gens) for gens in found]


def maximal_families_labelled(n: int, r: int, t: int, *, workers: int = 1, cap: int = DEFAULT_ENUM_CAP) -> list[ExplicitFamily]:
    """Every (r,t)-maximal family on ``[n]``, sorted by membership table."""
    if n > cap:
        raise CapExceeded(f"enumeration is capped at n <= {cap}, got {n}")
    if r < 2 or t < 1 or n < t:
        raise ValueError("need r >= 2, t >= 1 and n >= t")
    root = _root(n, t)
    frontier = [root]
    if workers > 1:
        # split the tree into independent subtrees
        while 0 < len(frontier) < 8 * workers:
            nxt = []
            for node in frontier:
                nxt.extend(_children(node, n, r, t) if node.P.size else [node])
            if len(nxt) == len(frontier):
                break
            frontier = nxt
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_subtree, [(nd, n, r, t) for nd in frontier]))
    else:
        parts = [_run_subtree((root, n, r, t))]
    fams = [ExplicitFamily.upward_closure_of(n, [elements_of(g) for g in gens]) for part in parts for gens in part]
    fams.sort(key=lambda f: _table_key(f.table))
    return fams


def _group(fams: list[ExplicitFamily]) -> list[IsoClass]:
    classes = {}
    for f in fams:
        iso = canonicalize(f)
        classes.setdefault(iso.key(), iso)
    return [classes[k] for k in sorted(classes)]


# ---------------------------------------------------------------------------
# disk cache
# ---------------------------------------------------------------------------


def default_cache_dir() -> Path | None:
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else None


def _cache_paths(cache_dir: Path, n: int, r: int, t: int) -> tuple[Path, Path]:
    stem = f"maximal_n{n}_r{r}_t{t}_v{FORMAT_VERSION}"
    return cache_dir / f"{stem}.txt", cache_dir / f"{stem}.json"


def _load_cache(cache_dir: Path, n: int, r: int, t: int) -> list[IsoClass] | None:
    data_path, index_path = _cache_paths(cache_dir, n, r, t)
    if not (data_path.exists() and index_path.exists()):
        return None
    text = data_path.read_text()
    index = json.loads(index_path.read_text())
    if index.get("sha256") != hashlib.sha256(text.encode()).hexdigest():
        return None
    if index.get("format_version") != FORMAT_VERSION or [index["n"], index["r"], index["t"]] != [n, r, t]:
        return None
    fams = families_from_text(text)
    if len(fams) != index["class_count"]:
        return None
    return [
        IsoClass(f, size, tuple(tuple(elements_of(int(g))) for g in sorted(_minimal_array(f).tolist())))
        for f, size in zip(fams, index["orbit_sizes"])
    ]


def _store_cache(cache_dir: Path, n: int, r: int, t: int, classes: list[IsoClass]):
    cache_dir.mkdir(parents=True, exist_ok=True)
    data_path, index_path = _cache_paths(cache_dir, n, r, t)
    text = families_to_text([c.canonical for c in classes])
    index = {
        "n": n,
        "r": r,
        "t": t,
        "format_version": FORMAT_VERSION,
        "class_count": len(classes),
        "orbit_sizes": [c.orbit_size for c in classes],
        "sha256": hashlib.sha256(text.encode()).hexdigest(),
    }
    data_path.write_text(text)
    index_path.write_text(json.dumps(index, indent=1) + "\n")


def enumerate_maximal(
    n: int,
    r: int,
    t: int,
    *,
    cap: int = DEFAULT_ENUM_CAP,
    workers: int = 1,
    cache_dir: str | Path | None = None,
) -> list[IsoClass]:
    """One representative per isomorphism class of (r,t)-maximal families on ``[n]``.

    Classes come sorted by canonical table.  With a cache directory (the
    argument or ``$THREEWISE_CACHE``) results are read from and written to
    disk; a checksum mismatch triggers recomputation.
    """
    cache = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    if cache is not None:
        hit = _load_cache(cache, n, r, t)
        if hit is not None:
            return hit
    classes = _group(maximal_families_labelled(n, r, t, workers=workers, cap=cap))
    if cache is not None:
        _store_cache(cache, n, r, t, classes)
    return classes


# ---------------------------------------------------------------------------
# recognition lemmas
# ---------------------------------------------------------------------------


def _is_frontier_copy(fam: ExplicitFamily, r: int, t: int, i: int, size: int) -> bool:
    return len(fam) == size and embeds_in_frontier_copy(fam, r, t, i) is not None


def verify_recognition(
    n: int,
    r: int,
    t: int,
    i: int,
    policies=DEFAULT_POLICIES,
    *,
    families: list[ExplicitFamily] | None = None,
    workers: int = 1,
) -> AuditReport:
    """Check that shifting into ``F_i^t(r)`` forces ``G`` to be a copy of it.

    Every labelled (r,t)-maximal ``G`` on ``[n]`` is tried.  Single shifts:
    if ``s_ij(G)`` lies in ``F_i^t(r)`` then ``G`` must be a copy of
    ``F_i^t(r)`` and ``s_ij(G)`` must equal it.  Fixpoints: for each policy,
    if the shifted family lies in ``F_i^t(r)`` then ``G`` must be a copy.
    For ``r = 3`` and ``i`` in {0, 1} these are theorems; other
    parameters are conjecture instances.
    """
    tag = "lemma" if r == 3 and i in (0, 1) else "conjecture"
    rep = AuditReport(title=f"recognition n={n} r={r} t={t} i={i}")
    base = {"n": n, "r": r, "t": t, "i": i}
    if t + r * i > n:
        rep.add(f"recognition.{tag}.single_shift", f"F_{i}^t({r}) does not fit in [{n}]", NOT_APPLICABLE, params=dict(base))
        return rep
    if families is None:
        families = maximal_families_labelled(n, r, t, workers=workers)
    target = frontier_family(r, t, i, n)
    size = len(target)

    triggered, bad = 0, None
    for g in families:
        for a in range(1, n + 1):
            for b in range(a + 1, n + 1):
                h = shift_once(g, a, b)
                if not h.issubset(target):
                    continue
                triggered += 1
                if bad is None and not (_is_frontier_copy(g, r, t, i, size) and h == target):
                    bad = {"G": [elements_of(int(m)) for m in _minimal_array(g).tolist()], "shift": [a, b]}
    rep.check(
        f"recognition.{tag}.single_shift",
        f"s_ij(G) inside F_{i}^t({r}) implies G is a copy and s_ij(G) = F_{i}^t({r})",
        bad is None,
        params={**base, "families": len(families), "triggered": triggered},
        witness=bad,
    )
    for policy in policies:
        triggered, bad = 0, None
        for g in families:
            h, trace = shift_fixpoint(g, policy)
            if not h.issubset(target):
                continue
            triggered += 1
            if bad is None and not _is_frontier_copy(g, r, t, i, size):
                bad = {"G": [elements_of(int(m)) for m in _minimal_array(g).tolist()], "trace": trace.steps}
        rep.check(
            f"recognition.{tag}.fixpoint",
            f"shifted family inside F_{i}^t({r}) implies G is a copy ({policy})",
            bad is None,
            params={**base, "policy": policy, "families": len(families), "triggered": triggered},
            witness=bad,
        )
    return rep


# ---------------------------------------------------------------------------
# stability trichotomy
# ---------------------------------------------------------------------------


def verify_stability(
    n: int,
    t: int,
    p_grid,
    delta=Fraction(1, 10),
    *,
    policies=DEFAULT_POLICIES,
    classes: list[IsoClass] | None = None,
) -> AuditReport:
    """Classify every (3,t)-maximal class on ``[n]`` at each ``p`` of the grid.

    Cases: measure below ``p^t/2``; contained in a copy of ``F_0^t`` or
    ``F_1^t``; some shifted image inside ``F_2^t``.  Also checked: the
    ``(1/2 + delta) p^t`` stability statement and the conjectured threshold
    ``max{p^t/2, mu(F_1^t), mu(F_2^t)}`` above which only subfamilies of
    ``F_0^t`` survive.  The trichotomy is only asserted for ``t >= 241``,
    so its steps are informational here; the conjecture is asserted for
    ``t >= 2``.
    """
    grid = [Fraction(p) for p in p_grid]
    p0 = p0_of_t(t)
    for p in grid:
        if p <= 0 or compare(p, p0) == 1:
            raise ValueError(f"grid point {p} is outside (0, p0({t})]")
    if classes is None:
        classes = enumerate_maximal(n, 3, t)
    f2 = frontier_family(3, t, 2, n) if t + 6 <= n else None
    poly1, poly2 = frontier_closed_form(3, t, 1), frontier_closed_form(3, t, 2)
    rep = AuditReport(title=f"stability n={n} t={t}")
    summary = []
    for k, iso in enumerate(classes):
        g = iso.canonical
        in_f0 = embeds_in_frontier_copy(g, 3, t, 0) is not None
        in_f1 = embeds_in_frontier_copy(g, 3, t, 1) is not None
        shifted_in_f2 = None
        if f2 is not None:
            shifted_in_f2 = any(shift_fixpoint(g, pol)[0].issubset(f2) for pol in policies)
        gens = [list(c) for c in iso.generators]
        for p in grid:
            m = mu(g, p)
            half = p**t / 2
            small = m < half
            params = {"t": t, "n": n, "p": str(p), "class": k, "orbit_size": iso.orbit_size}
            cases = [name for name, ok in (("small", small), ("F0", in_f0), ("F1", in_f1), ("F2-shift", shifted_in_f2)) if ok]
            rep.check(
                "stability.trichotomy",
                "measure < p^t/2, or inside a copy of F_0^t / F_1^t, or shifts into F_2^t",
                bool(cases),
                params={**params, "cases": cases},
                lhs=m,
                rhs=half,
                witness=None if cases else gens,
                in_scope=t >= 241,
            )
            strong = (Fraction(1, 2) + Fraction(delta)) * p**t
            big = m >= strong
            rep.check(
                "stability.theorem",
                "measure >= (1/2 + delta) p^t implies inside a copy of F_0^t or F_1^t",
                (not big) or in_f0 or in_f1,
                params={**params, "delta": str(delta)},
                lhs=m,
                rhs=strong,
                witness=None if (not big) or in_f0 or in_f1 else gens,
                in_scope=False,
            )
            thr = max(half, poly1(p), poly2(p))
            above = m > thr
            rep.check(
                "stability.conjecture",
                "measure > max{p^t/2, mu(F_1^t), mu(F_2^t)} implies inside a copy of F_0^t",
                (not above) or in_f0,
                params=params,
                lhs=m,
                rhs=thr,
                witness=None if (not above) or in_f0 else gens,
                in_scope=t >= 2,
            )
        summary.append({"class": k, "orbit_size": iso.orbit_size, "F0": in_f0, "F1": in_f1, "F2_shift": shifted_in_f2})
    rep.summary = {"n": n, "t": t, "classes": summary}
    return rep
