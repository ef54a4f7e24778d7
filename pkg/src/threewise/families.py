"""Set families on [n] stored as membership bit tables.

A subset of ``[n] = {1, ..., n}`` is an ``int`` mask in which element ``i``
is bit ``i - 1``.  An :class:`ExplicitFamily` stores one boolean per subset
(``2**n`` entries); a :class:`WindowFamily` stores only the traces on a
prefix window ``[m]`` and stands for ``{G : G & [m] in window}`` on any
ground set ``[n]`` with ``n >= m``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_N = 22
MAX_WINDOW = 22


class CapExceeded(ValueError):
    pass


# ---------------------------------------------------------------------------
# masks
# ---------------------------------------------------------------------------


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        if e < 1:
            raise ValueError(f"elements are 1-based, got {e}")
        m |= 1 << (e - 1)
    return m


def elements_of(mask: int) -> list[int]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def full_mask(n: int) -> int:
    return (1 << n) - 1


def interval_mask(lo: int, hi: int) -> int:
    """Mask of the integer interval ``{lo, ..., hi}`` (empty if hi < lo)."""
    if hi < lo:
        return 0
    return full_mask(hi) & ~full_mask(lo - 1)


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    arr = np.bitwise_count(np.arange(1 << n, dtype=np.uint32)).astype(np.int16)
    arr.setflags(write=False)
    return arr


def popcount(x):
    if isinstance(x, np.ndarray):
        return np.bitwise_count(x)
    return int(x).bit_count()


def _check_n(n: int, cap: int = MAX_N):
    if n < 0:
        raise ValueError("ground size must be non-negative")
    if n > cap:
        raise CapExceeded(f"ground size {n} exceeds cap {cap}")


# ---------------------------------------------------------------------------
# bit-table transforms
# ---------------------------------------------------------------------------


def _up_closure_table(table: np.ndarray, n: int) -> np.ndarray:
    up = table.copy()
    for b in range(n):
        v = up.reshape(-1, 2, 1 << b)
        v[:, 1, :] |= v[:, 0, :]
    return up


def _minimal_table(table: np.ndarray, n: int) -> np.ndarray:
    up = _up_closure_table(table, n)
    above = np.zeros_like(table)
    for b in range(n):
        va = above.reshape(-1, 2, 1 << b)
        vu = up.reshape(-1, 2, 1 << b)
        va[:, 1, :] |= vu[:, 0, :]
    return table & ~above


class ExplicitFamily:
    """A family of subsets of ``[n]`` held as a ``2**n`` membership table.

    Families are values: every operation returns a new family and the table
    is read-only.
    """

    __slots__ = ("n", "table", "_members")

    def __init__(self, n: int, table):
        _check_n(n)
        arr = np.array(table, dtype=bool).reshape(-1)
        if arr.shape[0] != 1 << n:
            raise ValueError(f"table length {arr.shape[0]} != 2**{n}")
        arr.setflags(write=False)
        self.n = n
        self.table = arr
        self._members = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def empty(cls, n: int) -> "ExplicitFamily":
        _check_n(n)
        return cls(n, np.zeros(1 << n, dtype=bool))

    @classmethod
    def power_set(cls, n: int) -> "ExplicitFamily":
        _check_n(n)
        return cls(n, np.ones(1 << n, dtype=bool))

    @classmethod
    def from_masks(cls, n: int, masks: Iterable[int]) -> "ExplicitFamily":
        _check_n(n)
        table = np.zeros(1 << n, dtype=bool)
        idx = np.fromiter((int(m) for m in masks), dtype=np.int64)
        if idx.size:
            if idx.min() < 0 or idx.max() >= 1 << n:
                raise ValueError(f"mask outside 2^[{n}]")
            table[idx] = True
        return cls(n, table)

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "ExplicitFamily":
        return cls.from_masks(n, (mask_of(s) for s in sets))

    @classmethod
    def upward_closure_of(cls, n: int, sets: Iterable[Iterable[int]]) -> "ExplicitFamily":
        return cls.from_sets(n, sets).upward_closure()

    # -- basic protocol ---------------------------------------------------
    def members(self) -> np.ndarray:
        """Member masks, ascending (int64 array)."""
        if self._members is None:
            m = np.flatnonzero(self.table).astype(np.int64)
            m.setflags(write=False)
            self._members = m
        return self._members

    def __len__(self) -> int:
        return int(self.table.sum())

    def __iter__(self) -> Iterator[int]:
        return (int(m) for m in self.members())

    def __contains__(self, mask: int) -> bool:
        return 0 <= mask < (1 << self.n) and bool(self.table[mask])

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExplicitFamily):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash((self.n, self.table.tobytes()))

    def __repr__(self) -> str:
        shown = [elements_of(m) for m in list(self)[:6]]
        more = ", ..." if len(self) > 6 else ""
        return f"ExplicitFamily(n={self.n}, size={len(self)}, members={shown}{more})"

    # -- set algebra ------------------------------------------------------
    def _same_ground(self, other: "ExplicitFamily"):
        if other.n != self.n:
            raise ValueError("families live on different ground sets")

    def union(self, other: "ExplicitFamily") -> "ExplicitFamily":
        self._same_ground(other)
        return ExplicitFamily(self.n, self.table | other.table)

    def difference(self, other: "ExplicitFamily") -> "ExplicitFamily":
        self._same_ground(other)
        return ExplicitFamily(self.n, self.table & ~other.table)

    def with_masks(self, masks: Iterable[int]) -> "ExplicitFamily":
        table = self.table.copy()
        for m in masks:
            table[m] = True
        return ExplicitFamily(self.n, table)

    def without_masks(self, masks: Iterable[int]) -> "ExplicitFamily":
        table = self.table.copy()
        for m in masks:
            table[m] = False
        return ExplicitFamily(self.n, table)

    def issubset(self, other: "ExplicitFamily") -> bool:
        self._same_ground(other)
        return not np.any(self.table & ~other.table)

    # -- structure --------------------------------------------------------
    def upward_closure(self) -> "ExplicitFamily":
        return ExplicitFamily(self.n, _up_closure_table(self.table, self.n))

    def is_upward_closed(self) -> bool:
        return bool(np.array_equal(self.table, _up_closure_table(self.table, self.n)))

    def size_profile(self) -> list[int]:
        """``counts[k]`` = number of members of size ``k``."""
        pc = popcounts(self.n)[self.table]
        return np.bincount(pc, minlength=self.n + 1).tolist()

    def relabel(self, perm: Sequence[int]) -> "ExplicitFamily":
        """Image under the permutation ``i -> perm[i-1]`` of ``[n]`` (1-based)."""
        if sorted(perm) != list(range(1, self.n + 1)):
            raise ValueError("perm must be a permutation of 1..n")
        src = self.members()
        dst = np.zeros_like(src)
        for b, target in enumerate(perm):
            dst |= ((src >> b) & 1) << (target - 1)
        return ExplicitFamily.from_masks(self.n, dst.tolist())

    # -- text format ------------------------------------------------------
    def to_text(self) -> str:
        lines = [f"n={self.n}"]
        lines.extend(" ".join(map(str, elements_of(m))) for m in self)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExplicitFamily":
        fams = families_from_text(text)
        if len(fams) != 1:
            raise ValueError(f"expected one family, found {len(fams)}")
        return fams[0]


def families_from_text(text: str) -> list[ExplicitFamily]:
    """Parse one or more families, each introduced by an ``n=<n>`` header.

    Every following line is a member written as sorted 1-based elements; an
    empty line is the empty set.
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    out: list[ExplicitFamily] = []
    n = None
    masks: list[int] = []
    for lineno, line in enumerate(lines, 1):
        s = line.strip()
        if s.startswith("n="):
            if n is not None:
                out.append(ExplicitFamily.from_masks(n, masks))
            n = int(s[2:])
            masks = []
            continue
        if n is None:
            raise ValueError(f"line {lineno}: member before 'n=' header")
        elems = [int(x) for x in s.split()]
        if any(e < 1 or e > n for e in elems):
            raise ValueError(f"line {lineno}: element outside [1, {n}]")
        if elems != sorted(set(elems)):
            raise ValueError(f"line {lineno}: elements must be sorted and distinct")
        masks.append(mask_of(elems))
    if n is not None:
        out.append(ExplicitFamily.from_masks(n, masks))
    return out


def families_to_text(fams: Iterable[ExplicitFamily]) -> str:
    return "".join(f.to_text() for f in fams)


# ---------------------------------------------------------------------------
# window families
# ---------------------------------------------------------------------------


class WindowFamily:
    """``{G subset of [n] : G & [m] in window}`` for any ``n >= m``."""

    __slots__ = ("m", "table", "monotone")

    def __init__(self, m: int, table):
        _check_n(m, MAX_WINDOW)
        arr = np.array(table, dtype=bool).reshape(-1)
        if arr.shape[0] != 1 << m:
            raise ValueError(f"window table length {arr.shape[0]} != 2**{m}")
        arr.setflags(write=False)
        self.m = m
        self.table = arr
        self.monotone = bool(np.array_equal(arr, _up_closure_table(arr, m)))

    def window_family(self) -> ExplicitFamily:
        """The window members as an explicit family on ``[m]``."""
        return ExplicitFamily(self.m, self.table)

    def size_profile(self) -> list[int]:
        pc = popcounts(self.m)[self.table]
        return np.bincount(pc, minlength=self.m + 1).tolist()

    def __contains__(self, mask: int) -> bool:
        return bool(self.table[mask & full_mask(self.m)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, WindowFamily):
            return NotImplemented
        return self.m == other.m and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash((self.m, self.table.tobytes()))

    def __repr__(self) -> str:
        return f"WindowFamily(m={self.m}, window_members={int(self.table.sum())}, monotone={self.monotone})"


def lift(w: WindowFamily, n: int) -> ExplicitFamily:
    if n < w.m:
        raise ValueError(f"cannot lift a window of size {w.m} to n={n}")
    _check_n(n)
    return ExplicitFamily(n, np.tile(w.table, 1 << (n - w.m)))


def restrict(fam: ExplicitFamily, m: int) -> WindowFamily:
    """Inverse of :func:`lift`; fails unless membership depends only on ``G & [m]``."""
    if m > fam.n:
        raise ValueError("window larger than ground set")
    w = fam.table[: 1 << m]
    if not np.array_equal(np.tile(w, 1 << (fam.n - m)), fam.table):
        raise ValueError(f"family is not determined by its trace on [{m}]")
    return WindowFamily(m, w)


def make_frontier(r: int, t: int, i: int) -> WindowFamily:
    """``F_i^t(r)``: sets meeting ``[t+r*i]`` in at least ``t+(r-1)*i`` elements."""
    if r < 2 or t < 1 or i < 0:
        raise ValueError("need r >= 2, t >= 1, i >= 0")
    m = t + r * i
    if m > MAX_WINDOW:
        raise CapExceeded(f"window size {m} exceeds cap {MAX_WINDOW}")
    return WindowFamily(m, popcounts(m) >= t + (r - 1) * i)


def frontier_family(r: int, t: int, i: int, n: int) -> ExplicitFamily:
    w = make_frontier(r, t, i)
    if n < w.m:
        raise ValueError(f"F_{i}^{t}({r}) needs n >= {w.m}")
    return lift(w, n)


# ---------------------------------------------------------------------------
# predicates
# ---------------------------------------------------------------------------


def minimal_members(fam: ExplicitFamily) -> list[int]:
    """Inclusion-minimal members, ascending by mask."""
    return np.flatnonzero(_minimal_table(fam.table, fam.n)).tolist()


def _minimal_array(fam) -> np.ndarray:
    if isinstance(fam, WindowFamily):
        fam = fam.window_family()
    return np.flatnonzero(_minimal_table(fam.table, fam.n)).astype(np.uint64)


_ALL_BITS = (1 << 64) - 1


def tuples_intersect(base: int, gens: np.ndarray, depth: int, t: int) -> bool:
    """Every multiset of ``depth`` gens, intersected with ``base``, keeps >= t elements."""
    a = np.unique(gens & np.uint64(base))
    if a.size == 0:
        return True
    pc = np.bitwise_count(a)
    if pc.min() < t:
        return False
    if depth <= 1:
        return True
    if depth == 2:
        return int(np.bitwise_count(a[:, None] & a[None, :]).min()) >= t
    for k in range(a.size):
        if not tuples_intersect(int(a[k]), a[k:], depth - 1, t):
            return False
    return True


def is_r_wise_t_intersecting(fam, r: int, t: int) -> bool:
    """Every r members (repetition allowed) share at least t elements.

    Only inclusion-minimal members are examined: every intersection of
    members contains the intersection of minimal members below them.
    """
    if r < 2 or t < 1:
        raise ValueError("need r >= 2 and t >= 1")
    gens = _minimal_array(fam)
    if gens.size == 0:
        return True
    return tuples_intersect(_ALL_BITS, gens, r, t)


def embeds_in_frontier_copy(fam: ExplicitFamily, r: int, t: int, i: int) -> list[int] | None:
    """Least (lexicographic) ``(t+r*i)``-set ``B`` with ``|G & B| >= t+(r-1)i`` for all members.

    Such a ``B`` exists iff ``fam`` is contained in an isomorphic copy of
    ``F_i^t(r)``; the witness is returned as sorted 1-based elements.
    """
    k = t + r * i
    n = fam.n
    if k > n:
        return None
    gens = _minimal_array(fam)
    # each member may miss at most i elements of B
    slack = i
    bits = [((gens >> np.uint64(e)) & np.uint64(1)) == 0 for e in range(n)]

    def dfs(start: int, chosen: list[int], misses: np.ndarray):
        if len(chosen) == k:
            return chosen
        for e in range(start, n - (k - len(chosen)) + 1):
            new = misses + bits[e]
            if new.size and new.max() > slack:
                continue
            found = dfs(e + 1, chosen + [e], new)
            if found is not None:
                return found
        return None

    res = dfs(0, [], np.zeros(gens.size, dtype=np.int16))
    return None if res is None else [e + 1 for e in res]


# ---------------------------------------------------------------------------
# named examples
# ---------------------------------------------------------------------------


def gprime(t: int, n: int) -> ExplicitFamily:
    """The t-star with ``[t]`` swapped for ``[n] - {1}``."""
    if n < t + 2:
        raise ValueError("gprime needs n >= t + 2")
    star = frontier_family(2, t, 0, n)
    return star.without_masks([full_mask(t)]).with_masks([full_mask(n) & ~1])


def second_layer(t: int, n: int) -> ExplicitFamily:
    """``{[t+1] + A : A nonempty, A in {t+2..n}} + {[n] - {i} : i in [n]}``."""
    if n < t + 4:
        raise ValueError("second-layer needs n >= t + 4")
    _check_n(n)
    head = full_mask(t + 1)
    tail = np.arange(1 << n, dtype=np.int64)
    table = ((tail & head) == head) & ((tail & ~head) != 0)
    fam = ExplicitFamily(n, table)
    return fam.with_masks(full_mask(n) & ~(1 << k) for k in range(n))


NAMED_EXAMPLES = {"gprime": gprime, "second-layer": second_layer}


def make_named_example(name: str, t: int, n: int) -> ExplicitFamily:
    try:
        build = NAMED_EXAMPLES[name]
    except KeyError:
        raise ValueError(f"unknown example {name!r}; choose from {sorted(NAMED_EXAMPLES)}") from None
    return build(t, n)
