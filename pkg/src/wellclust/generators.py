"""Seeded random-graph families used by the experiment suite.

Every generator is a pure function of its parameters and a 64-bit seed.
Randomness comes from Philox4x64-10 (via numpy's ``Philox`` bit generator),
chosen because its counter-based keying gives reproducible, splittable
streams whose identity can be stated precisely: stream ``t`` of seed ``s``
is ``Philox(key = s + (t << 64))``. Identical parameters and seed yield a
byte-identical edge list.

All families except the Gaussian kernel produce unit-weight graphs; where
several edge sources overlap (block-model edges, planted cliques, hub
joins) the duplicates collapse to a single unit edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .graph import Graph
from .spectral import smallest_eigenvalues

__all__ = [
    "GenSpec",
    "PlantedLabels",
    "GENERATOR_FAMILIES",
    "generate",
    "gen_sbm",
    "gen_hsbm",
    "gen_planted_clique_expander",
    "gen_bridged_two_cluster",
    "gen_sbm_planted_cliques",
    "gen_sbm_unequal",
    "gaussian_kernel_graph",
    "save_labels",
    "load_labels",
]

REGULAR_BASE_DEGREE = 8
EXPANDER_MIN_LAMBDA2 = 0.1
KERNEL_WEIGHT_FLOOR = 1e-12

GENERATOR_FAMILIES = (
    "sbm",
    "hsbm",
    "planted_clique_expander",
    "bridged_two_cluster",
    "sbm_planted_cliques",
    "sbm_unequal",
    "gaussian_kernel",
)


def _rng(seed: int, stream: int = 0) -> np.random.Generator:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.Philox(key=seed + (int(stream) << 64)))


@dataclass(frozen=True)
class PlantedLabels:
    """Ground-truth bookkeeping emitted alongside a generated graph.

    ``clusters[v]`` is the planted cluster id of vertex ``v``; ``cliques``
    maps a cluster id to the sorted vertex array of the clique planted
    inside that cluster (absent when nothing was planted there).
    """

    clusters: np.ndarray
    cliques: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        clusters = np.asarray(self.clusters, dtype=np.int64)
        object.__setattr__(self, "clusters", clusters)
        if clusters.ndim != 1 or clusters.size == 0:
            raise ValueError("cluster labels must be a nonempty 1-d array")
        if clusters.min() < 0:
            raise ValueError("cluster ids must be nonnegative")
        for cid, members in self.cliques.items():
            members = np.asarray(members, dtype=np.int64)
            self.cliques[cid] = members
            if np.any(clusters[members] != cid):
                raise ValueError(f"clique of cluster {cid} leaves its cluster")

    @property
    def n(self) -> int:
        return len(self.clusters)

    @property
    def n_clusters(self) -> int:
        return int(self.clusters.max()) + 1

    def cluster_members(self, cid: int) -> np.ndarray:
        return np.flatnonzero(self.clusters == cid)


@dataclass(frozen=True)
class GenSpec:
    """A generator family plus its parameters and seed."""

    family: str
    params: Mapping[str, Any]
    seed: int = 0

    def __post_init__(self):
        if self.family not in GENERATOR_FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one "
                             f"of {GENERATOR_FAMILIES}")


def generate(spec: GenSpec) -> tuple[Graph, PlantedLabels | None]:
    """Dispatch a :class:`GenSpec` to its family's generator."""
    p = dict(spec.params)
    fam = spec.family
    if fam == "sbm":
        return gen_sbm(p.pop("sizes"), p.pop("p"), p.pop("q"), spec.seed, **p)
    if fam == "hsbm":
        return gen_hsbm(p.pop("p"), p.pop("q_min", 0.0005), spec.seed, **p)
    if fam == "planted_clique_expander":
        return gen_planted_clique_expander(p.pop("n"), spec.seed, **p)
    if fam == "bridged_two_cluster":
        return gen_bridged_two_cluster(p.pop("n"), spec.seed, **p)
    if fam == "sbm_planted_cliques":
        return gen_sbm_planted_cliques(p.pop("sizes"), p.pop("p"), p.pop("q"),
                                       p.pop("c_p"), spec.seed, **p)
    if fam == "sbm_unequal":
        return gen_sbm_unequal(spec.seed, p.pop("c_p"), **p)
    return gaussian_kernel_graph(p.pop("points"), p.pop("sigma"), **p), None


def _unit_graph(n: int, us: np.ndarray, vs: np.ndarray) -> Graph:
    """Unit-weight graph from endpoint arrays; duplicate pairs collapse."""
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    lo = np.minimum(us, vs)
    hi = np.maximum(us, vs)
    key = np.unique(lo * n + hi)
    return Graph(n, key // n, key % n,
                 np.ones(len(key), dtype=np.float64),
                 np.zeros(n, dtype=np.float64))


def _check_prob(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


def _bernoulli_block(rng: np.random.Generator, A: np.ndarray, B: np.ndarray,
                     prob: float) -> tuple[np.ndarray, np.ndarray]:
    """Bernoulli(prob) over A x B (or the i<j pairs of A when B is A)."""
    intra = B is A
    count = len(A) * (len(A) - 1) // 2 if intra else len(A) * len(B)
    if count == 0 or prob == 0.0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    if prob >= 1.0:
        idx = np.arange(count)
    else:
        idx = np.flatnonzero(rng.random(count) < prob)
    if intra:
        iu, iv = np.triu_indices(len(A), 1)
        return A[iu[idx]], A[iv[idx]]
    return A[idx // len(B)], B[idx % len(B)]


def _block_model(blocks: list[np.ndarray], qmat: np.ndarray,
                 rng: np.random.Generator) -> tuple[list[np.ndarray], list[np.ndarray]]:
    us: list[np.ndarray] = []
    vs: list[np.ndarray] = []
    for a in range(len(blocks)):
        for b in range(a, len(blocks)):
            other = blocks[a] if a == b else blocks[b]
            eu, ev = _bernoulli_block(rng, blocks[a], other, qmat[a, b])
            us.append(eu)
            vs.append(ev)
    return us, vs


def _blocks_of(sizes: Sequence[int]) -> list[np.ndarray]:
    sizes = [int(s) for s in sizes]
    if not sizes:
        raise ValueError("need at least one cluster size")
    if any(s < 1 for s in sizes):
        raise ValueError("cluster sizes must be at least 1")
    bounds = np.concatenate([[0], np.cumsum(sizes)])
    return [np.arange(bounds[i], bounds[i + 1]) for i in range(len(sizes))]


def gen_sbm(sizes: Sequence[int], p: float, q: float,
            seed: int) -> tuple[Graph, PlantedLabels]:
    """Stochastic block model: Bernoulli(p) inside blocks, Bernoulli(q) across."""
    p = _check_prob("p", p)
    q = _check_prob("q", q)
    blocks = _blocks_of(sizes)
    k = len(blocks)
    qmat = np.full((k, k), q)
    np.fill_diagonal(qmat, p)
    us, vs = _block_model(blocks, qmat, _rng(seed))
    n = sum(len(b) for b in blocks)
    G = _unit_graph(n, np.concatenate(us), np.concatenate(vs))
    clusters = np.concatenate([np.full(len(b), i) for i, b in enumerate(blocks)])
    return G, PlantedLabels(clusters)


def _hsbm_qmat(p: float, q_min: float) -> np.ndarray:
    # Two coarse groups {0,1,2} and {3,4}; similarity doubles per level of
    # shared ancestry and triples for the closest pair (0,1).
    q = np.full((5, 5), q_min)
    for i in (0, 1):
        q[i, 2] = q[2, i] = 2.0 * q_min
    q[3, 4] = q[4, 3] = 2.0 * q_min
    q[0, 1] = q[1, 0] = 3.0 * q_min
    np.fill_diagonal(q, p)
    return q


def gen_hsbm(p: float, q_min: float, seed: int,
             size: int = 600) -> tuple[Graph, PlantedLabels]:
    """Five-cluster hierarchical block model with a fixed nested q-pattern.

    Cross-block probabilities step q_min / 2*q_min / 3*q_min according to
    how early the two blocks split in the planted hierarchy
    ``((0, 1), 2) | (3, 4)``.
    """
    p = _check_prob("p", p)
    if q_min < 0 or 3.0 * q_min > 1.0:
        raise ValueError("q_min must satisfy 0 <= 3*q_min <= 1")
    blocks = _blocks_of([size] * 5)
    us, vs = _block_model(blocks, _hsbm_qmat(p, q_min), _rng(seed))
    G = _unit_graph(5 * size, np.concatenate(us), np.concatenate(vs))
    return G, PlantedLabels(np.repeat(np.arange(5), size))


def _floor_pow_2_3(n: int) -> int:
    """Exact floor(n^(2/3)) without float cube-root error."""
    target = n * n
    s = max(1, int(round(target ** (1.0 / 3.0))))
    while s * s * s > target:
        s -= 1
    while (s + 1) ** 3 <= target:
        s += 1
    return s


def _floor_pow_11_10(n: int) -> int:
    """Exact floor(n^1.1); float powers misround at powers of 2^10."""
    target = n**11
    t = max(1, int(n ** 1.1))
    while t**10 > target:
        t -= 1
    while (t + 1) ** 10 <= target:
        t += 1
    return t


def _pair_repair(us: np.ndarray, vs: np.ndarray, n: int,
                 rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray] | None:
    """Degree-preserving endpoint swaps until no self-loop or duplicate remains.

    Returns None when the attempt budget runs out (caller redraws stubs).
    """
    us = us.astype(np.int64).copy()
    vs = vs.astype(np.int64).copy()
    m = len(us)

    def key_of(a: int, b: int) -> int:
        return a * n + b if a <= b else b * n + a

    slots: dict[int, set[int]] = {}
    for i in range(m):
        slots.setdefault(key_of(us[i], vs[i]), set()).add(i)

    def is_bad(i: int) -> bool:
        return us[i] == vs[i] or len(slots[key_of(us[i], vs[i])]) > 1

    bad = {i for i in range(m) if is_bad(i)}
    budget = 200 * (len(bad) + 10)
    while bad:
        if budget <= 0:
            return None
        budget -= 1
        i = min(bad)
        j = int(rng.integers(m))
        a, b = int(us[i]), int(vs[i])
        c, d = int(us[j]), int(vs[j])
        if j == i or a == c or b == d or a == d or c == b:
            continue
        k_new1, k_new2 = key_of(a, d), key_of(c, b)
        if slots.get(k_new1) or slots.get(k_new2):
            continue
        k_old1, k_old2 = key_of(a, b), key_of(c, d)
        slots[k_old1].discard(i)
        slots[k_old2].discard(j)
        slots.setdefault(k_new1, set()).add(i)
        slots.setdefault(k_new2, set()).add(j)
        vs[i] = d
        vs[j] = b
        touched = {i, j} | set(slots.get(k_old1, ())) | set(slots.get(k_old2, ()))
        for idx in touched:
            if is_bad(idx):
                bad.add(idx)
            else:
                bad.discard(idx)
    return us, vs


def _random_regular(n: int, d: int, rng: np.random.Generator,
                    min_lambda2: float) -> Graph:
    """Random simple d-regular graph with second eigenvalue at least min_lambda2.

    Stub pairing plus swap repair; a draw whose normalized-Laplacian gap is
    below the threshold (in particular, a disconnected one) is redrawn.
    """
    if n * d % 2:
        raise ValueError("n*d must be even for a regular graph")
    if d >= n:
        raise ValueError("degree must be below the vertex count")
    for _ in range(20):
        stubs = rng.permutation(np.repeat(np.arange(n), d))
        repaired = _pair_repair(stubs[0::2], stubs[1::2], n, rng)
        if repaired is None:
            continue
        G = _unit_graph(n, *repaired)
        lam2 = float(smallest_eigenvalues(G, 2).eigenvalues[1])
        if lam2 >= min_lambda2:
            return G
    raise ValueError(f"failed to sample a {d}-regular graph with spectral "
                     f"gap >= {min_lambda2} on {n} vertices after 20 draws")


def _planted_clique_expander(n: int, rng: np.random.Generator) -> tuple[Graph, np.ndarray]:
    if n < 27:
        raise ValueError("planted-clique construction needs n >= 27")
    base = _random_regular(n, REGULAR_BASE_DEGREE, rng, EXPANDER_MIN_LAMBDA2)
    s = _floor_pow_2_3(n)
    # Vertex ids of the regular base are exchangeable; the clique takes 0..s-1.
    clique = np.arange(s)
    iu, iv = np.triu_indices(s, 1)
    groups = np.array_split(np.arange(s, n), s)
    hub_u = np.concatenate([np.full(len(g), i) for i, g in enumerate(groups)])
    hub_v = np.concatenate(groups)
    us = np.concatenate([base.edges_u, iu, hub_u])
    vs = np.concatenate([base.edges_v, iv, hub_v])
    return _unit_graph(n, us, vs), clique


def gen_planted_clique_expander(n: int, seed: int) -> tuple[Graph, PlantedLabels]:
    """Near-regular expander with a floor(n^(2/3))-clique and hub joins.

    An 8-regular random base supplies the expansion; clique vertices double
    as hubs, each fully joined to one of floor(n^(2/3)) near-equal groups
    of the remaining vertices. All weights are unit; overlapping sources
    collapse.
    """
    G, clique = _planted_clique_expander(int(n), _rng(seed))
    labels = PlantedLabels(np.zeros(G.n, dtype=np.int64), {0: clique})
    return G, labels


def gen_bridged_two_cluster(n: int, seed: int) -> tuple[Graph, PlantedLabels]:
    """Two independent planted-clique expanders bridged clique-to-clique.

    floor(n^1.1) distinct cross pairs between the two cliques get unit
    edges, so each side keeps low but nonvanishing outer conductance.
    """
    n = int(n)
    G1, clique1 = _planted_clique_expander(n, _rng(seed, 1))
    G2, clique2 = _planted_clique_expander(n, _rng(seed, 2))
    s = len(clique1)
    bridges = _floor_pow_11_10(n)
    if bridges > s * s:
        raise ValueError(f"floor(n^1.1) = {bridges} exceeds the {s * s} "
                         f"available clique pairs at n = {n}")
    pick = _rng(seed, 3).choice(s * s, size=bridges, replace=False)
    cross_u = clique1[pick // s]
    cross_v = n + clique2[pick % s]
    us = np.concatenate([G1.edges_u, n + G2.edges_u, cross_u])
    vs = np.concatenate([G1.edges_v, n + G2.edges_v, cross_v])
    G = _unit_graph(2 * n, us, vs)
    clusters = np.repeat(np.arange(2), n)
    return G, PlantedLabels(clusters, {0: clique1, 1: n + clique2})


def _plant_cliques(blocks: list[np.ndarray], c_p: float,
                   rng: np.random.Generator) -> tuple[dict[int, np.ndarray],
                                                      list[np.ndarray],
                                                      list[np.ndarray]]:
    if not 0.0 < c_p <= 1.0:
        raise ValueError(f"clique fraction must lie in (0, 1], got {c_p}")
    cliques: dict[int, np.ndarray] = {}
    us: list[np.ndarray] = []
    vs: list[np.ndarray] = []
    for i, block in enumerate(blocks):
        size = int(round(c_p * len(block)))
        if size < 2:
            continue
        members = np.sort(rng.choice(block, size=size, replace=False))
        cliques[i] = members
        iu, iv = np.triu_indices(size, 1)
        us.append(members[iu])
        vs.append(members[iv])
    return cliques, us, vs


def gen_sbm_planted_cliques(sizes: Sequence[int], p: float, q: float, c_p: float,
                            seed: int) -> tuple[Graph, PlantedLabels]:
    """Block model plus a planted clique on a random c_p-fraction per block."""
    p = _check_prob("p", p)
    q = _check_prob("q", q)
    blocks = _blocks_of(sizes)
    k = len(blocks)
    qmat = np.full((k, k), q)
    np.fill_diagonal(qmat, p)
    rng = _rng(seed)
    us, vs = _block_model(blocks, qmat, rng)
    cliques, cu, cv = _plant_cliques(blocks, c_p, rng)
    n = sum(len(b) for b in blocks)
    G = _unit_graph(n, np.concatenate(us + cu), np.concatenate(vs + cv))
    clusters = np.concatenate([np.full(len(b), i) for i, b in enumerate(blocks)])
    return G, PlantedLabels(clusters, cliques)


def gen_sbm_unequal(seed: int, c_p: float,
                    scale: float = 1.0) -> tuple[Graph, PlantedLabels]:
    """Three blocks of very different sizes, the smallest much denser.

    Full scale is sizes (1900, 900, 200) with intra probabilities
    (0.06, 0.06, 0.3) and cross probability 0.002; the dense small block
    compensates its size so its outer conductance stays low. ``scale``
    shrinks all sizes proportionally for quick runs. Planted cliques of
    fraction ``c_p`` are added per block as in
    :func:`gen_sbm_planted_cliques`.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    sizes = [int(round(base * scale)) for base in (1900, 900, 200)]
    if any(s < 1 for s in sizes):
        raise ValueError(f"scale {scale} shrinks a block below one vertex")
    blocks = _blocks_of(sizes)
    qmat = np.full((3, 3), 0.002)
    np.fill_diagonal(qmat, (0.06, 0.06, 0.3))
    rng = _rng(seed)
    us, vs = _block_model(blocks, qmat, rng)
    cliques, cu, cv = _plant_cliques(blocks, c_p, rng)
    G = _unit_graph(sum(sizes), np.concatenate(us + cu), np.concatenate(vs + cv))
    clusters = np.concatenate([np.full(len(b), i) for i, b in enumerate(blocks)])
    return G, PlantedLabels(clusters, cliques)


def _squared_distances(pts: np.ndarray) -> np.ndarray:
    n = len(pts)
    out = np.empty((n, n), dtype=np.float64)
    step = max(1, (1 << 22) // max(1, n * pts.shape[1]))
    for lo in range(0, n, step):
        diff = pts[lo:lo + step, None, :] - pts[None, :, :]
        out[lo:lo + step] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def gaussian_kernel_graph(points: Sequence[Sequence[float]] | np.ndarray,
                          sigma: float) -> Graph:
    """Complete similarity graph w_uv = exp(-|x_u - x_v|^2 / (2 sigma^2)).

    Weights below 1e-12 are dropped, so far-apart points simply lack an
    edge; duplicate points get weight exactly 1.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or len(pts) < 2:
        raise ValueError("need at least two points, as rows of a 2-d array")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    sigma = float(sigma)
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    n = len(pts)
    d2 = _squared_distances(pts)
    iu, iv = np.triu_indices(n, 1)
    w = np.exp(-d2[iu, iv] / (2.0 * sigma * sigma))
    keep = w >= KERNEL_WEIGHT_FLOOR
    return Graph(n, iu[keep].astype(np.int64), iv[keep].astype(np.int64),
                 w[keep], np.zeros(n, dtype=np.float64))


def save_labels(path: str, labels: PlantedLabels) -> None:
    """Write ``vertex cluster [clique_flag]`` lines; the flag column appears
    only when some clique was planted."""
    flags = np.zeros(labels.n, dtype=np.int64)
    for members in labels.cliques.values():
        flags[members] = 1
    with open(path, "w", encoding="ascii") as fh:
        if labels.cliques:
            for v in range(labels.n):
                fh.write(f"{v} {labels.clusters[v]} {flags[v]}\n")
        else:
            for v in range(labels.n):
                fh.write(f"{v} {labels.clusters[v]}\n")


def load_labels(path: str) -> PlantedLabels:
    rows = []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if len(parts) not in (2, 3):
                raise ValueError(f"malformed label line: {line.rstrip()!r}")
            rows.append([int(x) for x in parts])
    if not rows:
        raise ValueError("empty label file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("inconsistent label columns")
    arr = np.asarray(rows, dtype=np.int64)
    order = np.argsort(arr[:, 0])
    arr = arr[order]
    if not np.array_equal(arr[:, 0], np.arange(len(arr))):
        raise ValueError("label file must cover vertices 0..n-1 exactly once")
    clusters = arr[:, 1]
    cliques: dict[int, np.ndarray] = {}
    if width == 3:
        for cid in np.unique(clusters[arr[:, 2] == 1]):
            cliques[int(cid)] = np.flatnonzero((clusters == cid) & (arr[:, 2] == 1))
    return PlantedLabels(clusters, cliques)
