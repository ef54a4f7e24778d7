"""Fixed-seed corpus of shifted (3,t)-maximal families outside the t-star.

Each family is grown by a randomly ordered greedy closure, then shifted
and closed again until it is both shifted and maximal.  The generated
corpus ships as ``data/shifted_corpus.jsonl`` so audits run on the same
families everywhere; :func:`build_corpus` regenerates it bit for bit.
"""

from __future__ import annotations

import json
import random
from importlib import resources

from .audit import h_param
from .families import ExplicitFamily, elements_of, frontier_family, minimal_members
from .shifting import is_maximal, is_shifted, maximal_closure, shift_fixpoint

CORPUS_SEED = 20240601
CORPUS_SIZE = 200
CORPUS_FILE = "shifted_corpus.jsonl"


def random_shifted_maximal(n: int, t: int, seed: int, r: int = 3, start: ExplicitFamily | None = None) -> ExplicitFamily:
    """Shift and close a random greedy maximal family until both are stable."""
    if start is None:
        start = ExplicitFamily.empty(n)
    fam = maximal_closure(start, r, t, order=f"random:{seed}")
    while True:
        fam, _ = shift_fixpoint(fam)
        closed = maximal_closure(fam, r, t)
        if closed == fam:
            return fam
        fam = closed


def build_corpus(count: int = CORPUS_SIZE, seed: int = CORPUS_SEED, max_n: int = 10) -> list[tuple[int, ExplicitFamily]]:
    """``count`` distinct ``(t, family)`` pairs with ``h >= 1``."""
    rng = random.Random(seed)
    seen = set()
    out = []
    while len(out) < count:
        t = rng.choice((1, 2, 3))
        n = rng.randint(t + 3, max_n)
        start = None
        fits = [i for i in (1, 2) if t + 3 * i <= n]
        if fits and rng.random() < 0.5:
            # a random half of the generators of a frontier family
            gens = minimal_members(frontier_family(3, t, rng.choice(fits), n))
            start = ExplicitFamily.upward_closure_of(n, [elements_of(g) for g in rng.sample(gens, (len(gens) + 1) // 2)])
        fam = random_shifted_maximal(n, t, rng.randrange(1 << 30), start=start)
        key = (t, n, fam.table.tobytes())
        if key in seen or h_param(fam, t).h == 0:
            continue
        seen.add(key)
        out.append((t, fam))
    return out


def corpus_to_jsonl(entries: list[tuple[int, ExplicitFamily]]) -> str:
    lines = []
    for t, fam in entries:
        gens = [elements_of(m) for m in minimal_members(fam)]
        lines.append(json.dumps({"n": fam.n, "t": t, "generators": gens}))
    return "".join(line + "\n" for line in lines)


def corpus_from_jsonl(text: str) -> list[tuple[int, ExplicitFamily]]:
    out = []
    for line in text.splitlines():
        if line.strip():
            rec = json.loads(line)
            out.append((rec["t"], ExplicitFamily.upward_closure_of(rec["n"], rec["generators"])))
    return out


def load_corpus() -> list[tuple[int, ExplicitFamily]]:
    text = resources.files("threewise").joinpath("data", CORPUS_FILE).read_text()
    return corpus_from_jsonl(text)


def check_entry(t: int, fam: ExplicitFamily) -> bool:
    return is_shifted(fam) and is_maximal(fam, 3, t) and h_param(fam, t).h >= 1
