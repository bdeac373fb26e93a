"""Finitely generated groups with exact arithmetic and Cayley-ball enumeration.

Supported groups and their canonical normal forms:

* ``free(d)``          reduced words, tuples of nonzero ints in ``{-d..d}``
                       (``i`` = i-th generator, ``-i`` = its inverse)
* ``free-abelian(d)``  exponent vectors, tuples of ``d`` ints
* ``heisenberg3``      triples ``(x, y, z)`` for ``a^x b^y c^z`` with
                       ``c = [a, b]`` central; multiplication follows the
                       2-step collection rule ``(x1,y1,z1)(x2,y2,z2) =
                       (x1+x2, y1+y2, z1+z2+x1*y2)``
* ``cyclic-power(n,d)`` tuples of ``d`` ints in ``[0, n)``
* ``dihedral(n)``      pairs ``(k, e)`` for ``r^k s^e``, ``k in [0,n)``,
                       ``e in {0,1}``

Two elements are equal iff their normal forms are identical tuples.  Balls
are enumerated deterministically, ordered by (word length, normal form), so
``ball(G, N)`` is always an ordering prefix of ``ball(G, N+1)``.

The generating sets are symmetric and exclude the identity: the 2d free or
abelian generators and their inverses, ``{a, a^-1, b, b^-1}`` for the
Heisenberg group, and ``{r, r^-1, s}`` for dihedral groups.  On free-abelian
groups an alternative "cube" ball family ``[-N, N]^d`` is available for
Fejer constructions.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import BallCapError, DomainError, GrammarError, MalformedElementError

DEFAULT_BALL_CAP = 200_000

Element = tuple


def ball_cap_default() -> int:
    env = os.environ.get("SYMAUDIT_BALL_CAP")
    return int(env) if env else DEFAULT_BALL_CAP


@dataclass(frozen=True)
class GroupSpec:
    """Identifier of a supported group; hashable so caches can key on it."""

    kind: str
    params: tuple = ()
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("free", "free-abelian", "heisenberg3", "cyclic-power", "dihedral"):
            raise GrammarError(self.kind, "unknown group kind")
        if not self.label:
            object.__setattr__(self, "label", _default_label(self.kind, self.params))


def _default_label(kind, params):
    if kind == "free":
        return f"free:{params[0]}"
    if kind == "free-abelian":
        return f"zd:{params[0]}"
    if kind == "heisenberg3":
        return "heis3"
    if kind == "cyclic-power":
        return f"zmod:{params[0]}^{params[1]}"
    return f"dihedral:{params[0]}"


_GROUP_RE = {
    "free": re.compile(r"^free:(\d+)$"),
    "zd": re.compile(r"^zd:(\d+)$"),
    "heis3": re.compile(r"^heis3$"),
    "zmod": re.compile(r"^zmod:(\d+)(?:\^(\d+))?$"),
    "dihedral": re.compile(r"^dihedral:(\d+)$"),
}


def parse_group(text: str) -> GroupSpec:
    """Parse the group grammar: free:2, zd:3, heis3, zmod:8^2, dihedral:6."""
    t = text.strip()
    if m := _GROUP_RE["free"].match(t):
        d = int(m.group(1))
        if d < 1:
            raise GrammarError(text, "free rank must be >= 1", position=5)
        return GroupSpec("free", (d,))
    if m := _GROUP_RE["zd"].match(t):
        d = int(m.group(1))
        if d < 1:
            raise GrammarError(text, "abelian rank must be >= 1", position=3)
        return GroupSpec("free-abelian", (d,))
    if _GROUP_RE["heis3"].match(t):
        return GroupSpec("heisenberg3")
    if m := _GROUP_RE["zmod"].match(t):
        n = int(m.group(1))
        d = int(m.group(2) or 1)
        if n < 2 or d < 1:
            raise GrammarError(text, "zmod needs modulus >= 2 and power >= 1")
        return GroupSpec("cyclic-power", (n, d))
    if m := _GROUP_RE["dihedral"].match(t):
        n = int(m.group(1))
        if n < 3:
            raise GrammarError(text, "dihedral order parameter must be >= 3")
        return GroupSpec("dihedral", (n,))
    raise GrammarError(text, "expected free:<d>, zd:<d>, heis3, zmod:<n>[^<d>] or dihedral:<n>", position=0)


# ---------------------------------------------------------------------------
# element arithmetic


def identity(G: GroupSpec) -> Element:
    if G.kind == "free":
        return ()
    if G.kind == "free-abelian":
        return (0,) * G.params[0]
    if G.kind == "heisenberg3":
        return (0, 0, 0)
    if G.kind == "cyclic-power":
        return (0,) * G.params[1]
    return (0, 0)


def validate_element(G: GroupSpec, g) -> Element:
    """Check that g is a canonical normal form for G; return it as a tuple."""
    if not isinstance(g, tuple):
        try:
            g = tuple(g)
        except TypeError:
            raise MalformedElementError(f"{g!r} is not a tuple-like normal form")
    if G.kind == "free":
        d = G.params[0]
        if not all(isinstance(a, (int, np.integer)) and a != 0 and -d <= a <= d for a in g):
            raise MalformedElementError(f"{g!r}: free-group letters must be nonzero ints in [-{d},{d}]")
        if any(a == -b for a, b in zip(g, g[1:])):
            raise MalformedElementError(f"{g!r} is not a reduced word")
        return g
    if G.kind == "free-abelian":
        if len(g) != G.params[0] or not all(isinstance(a, (int, np.integer)) for a in g):
            raise MalformedElementError(f"{g!r}: expected {G.params[0]} integer exponents")
        return g
    if G.kind == "heisenberg3":
        if len(g) != 3 or not all(isinstance(a, (int, np.integer)) for a in g):
            raise MalformedElementError(f"{g!r}: expected integer triple (x, y, z)")
        return g
    if G.kind == "cyclic-power":
        n, d = G.params
        if len(g) != d or not all(isinstance(a, (int, np.integer)) and 0 <= a < n for a in g):
            raise MalformedElementError(f"{g!r}: expected {d} residues mod {n}")
        return g
    n = G.params[0]
    if len(g) != 2 or g[1] not in (0, 1) or not (isinstance(g[0], (int, np.integer)) and 0 <= g[0] < n):
        raise MalformedElementError(f"{g!r}: expected (rotation in [0,{n}), flip in {{0,1}})")
    return g


def multiply(G: GroupSpec, a, b) -> Element:
    """Product a*b in canonical normal form."""
    a = validate_element(G, a)
    b = validate_element(G, b)
    if G.kind == "free":
        out = list(a)
        for x in b:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        return tuple(out)
    if G.kind == "free-abelian":
        return tuple(x + y for x, y in zip(a, b))
    if G.kind == "heisenberg3":
        return (a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1])
    if G.kind == "cyclic-power":
        n = G.params[0]
        return tuple((x + y) % n for x, y in zip(a, b))
    n = G.params[0]
    k1, e1 = a
    k2, e2 = b
    return ((k1 + (k2 if e1 == 0 else -k2)) % n, e1 ^ e2)


def inverse(G: GroupSpec, g) -> Element:
    g = validate_element(G, g)
    if G.kind == "free":
        return tuple(-x for x in reversed(g))
    if G.kind == "free-abelian":
        return tuple(-x for x in g)
    if G.kind == "heisenberg3":
        x, y, z = g
        return (-x, -y, x * y - z)
    if G.kind == "cyclic-power":
        n = G.params[0]
        return tuple((-x) % n for x in g)
    n = G.params[0]
    k, e = g
    return ((-k) % n if e == 0 else k, e)


def generators(G: GroupSpec) -> list[Element]:
    """The symmetric generating set S (identity excluded)."""
    if G.kind == "free":
        d = G.params[0]
        return [(i,) for i in range(1, d + 1)] + [(-i,) for i in range(1, d + 1)]
    if G.kind == "free-abelian":
        d = G.params[0]
        out = []
        for i in range(d):
            for s in (1, -1):
                v = [0] * d
                v[i] = s
                out.append(tuple(v))
        return out
    if G.kind == "heisenberg3":
        return [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)]
    if G.kind == "cyclic-power":
        n, d = G.params
        out = []
        for i in range(d):
            for s in (1, n - 1):
                v = [0] * d
                v[i] = s
                out.append(tuple(v))
        return sorted(set(out))
    n = G.params[0]
    return [(1, 0), (n - 1, 0), (0, 1)]


def is_finite(G: GroupSpec) -> bool:
    return G.kind in ("cyclic-power", "dihedral")


def is_abelian(G: GroupSpec) -> bool:
    return G.kind in ("free-abelian", "cyclic-power") or (G.kind == "free" and G.params[0] == 1)


def group_order(G: GroupSpec) -> int:
    if G.kind == "cyclic-power":
        n, d = G.params
        return n**d
    if G.kind == "dihedral":
        return 2 * G.params[0]
    raise DomainError(f"{G.label} is infinite")


def enumerate_group(G: GroupSpec) -> list[Element]:
    """All elements of a finite group, deterministically ordered."""
    if G.kind == "cyclic-power":
        n, d = G.params
        return [tuple(v) for v in product(range(n), repeat=d)]
    if G.kind == "dihedral":
        n = G.params[0]
        return [(k, e) for e in (0, 1) for k in range(n)]
    raise DomainError(f"cannot enumerate infinite group {G.label}")


# ---------------------------------------------------------------------------
# word length


def word_length(G: GroupSpec, g) -> int:
    """Minimal k with g in S^k.

    Closed form for free, free-abelian and cyclic groups; BFS distance for
    heisenberg3 and dihedral.
    """
    g = validate_element(G, g)
    if G.kind == "free":
        return len(g)
    if G.kind == "free-abelian":
        return sum(abs(x) for x in g)
    if G.kind == "cyclic-power":
        n = G.params[0]
        return sum(min(x, n - x) for x in g)
    cache = _bfs_cache(G)
    cap = ball_cap_default()
    while g not in cache.dist:
        cache.grow(cache.radius + 1, cap)
    return cache.dist[g]


# ---------------------------------------------------------------------------
# ball enumeration

_BFS_GROUPS = ("heisenberg3", "dihedral")


class _BfsCache:
    def __init__(self, G: GroupSpec):
        self.G = G
        e = identity(G)
        self.dist: dict[Element, int] = {e: 0}
        self.frontier = [e]
        self.radius = 0
        self.order = group_order(G) if is_finite(G) else None

    def grow(self, radius: int, cap: int):
        gens = generators(self.G)
        while self.radius < radius:
            if self.order is not None and len(self.dist) == self.order:
                self.radius = radius
                self.frontier = []
                return
            k = self.radius + 1
            nxt = []
            for g in self.frontier:
                for s in gens:
                    h = multiply(self.G, g, s)
                    if h not in self.dist:
                        self.dist[h] = k
                        nxt.append(h)
                        if len(self.dist) > cap:
                            raise BallCapError(self.G.label, k, cap)
            self.frontier = nxt
            self.radius = k


_bfs_caches: dict[GroupSpec, _BfsCache] = {}


def _bfs_cache(G: GroupSpec) -> _BfsCache:
    if G not in _bfs_caches:
        _bfs_caches[G] = _BfsCache(G)
    return _bfs_caches[G]


@dataclass
class EnumeratedBall:
    """All elements of word length (or cube norm) <= radius, sorted by
    (length, normal form), with an element -> position map and cumulative
    sphere offsets."""

    group: GroupSpec
    family: str
    radius: int
    elements: list[Element]
    lengths: list[int]
    index: dict[Element, int] = field(repr=False)
    sphere_sizes: list[int]  # sphere_sizes[k] = #{g : |g| == k}, k <= radius

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in self.index

    def __iter__(self):
        return iter(self.elements)

    def sphere(self, k: int) -> list[Element]:
        a = sum(self.sphere_sizes[:k])
        return self.elements[a : a + self.sphere_sizes[k]]

    def prefix(self, radius: int) -> "EnumeratedBall":
        """The sub-ball of smaller radius; shares the ordering prefix."""
        if radius > self.radius:
            raise DomainError(f"prefix radius {radius} exceeds ball radius {self.radius}")
        n = sum(self.sphere_sizes[: radius + 1])
        els = self.elements[:n]
        return EnumeratedBall(
            self.group,
            self.family,
            radius,
            els,
            self.lengths[:n],
            {g: i for i, g in enumerate(els)},
            self.sphere_sizes[: radius + 1],
        )


def _cube_length(g) -> int:
    return max((abs(x) for x in g), default=0)


def ball(G: GroupSpec, N: int, family: str = "word", cap: int | None = None) -> EnumeratedBall:
    """Enumerate the radius-N ball for the given family ('word' or 'cube')."""
    if N < 0:
        raise DomainError("ball radius must be >= 0")
    cap = ball_cap_default() if cap is None else cap
    if family == "cube":
        if G.kind != "free-abelian":
            raise DomainError("cube ball family is defined on free-abelian groups only")
        d = G.params[0]
        if (2 * N + 1) ** d > cap:
            first_bad = next(r for r in range(N + 1) if (2 * r + 1) ** d > cap)
            raise BallCapError(G.label, first_bad, cap)
        elems = sorted(product(range(-N, N + 1), repeat=d), key=lambda g: (_cube_length(g), g))
        lengths = [_cube_length(g) for g in elems]
    elif family == "word":
        if G.kind in _BFS_GROUPS:
            cache = _bfs_cache(G)
            cache.grow(N, cap)
            pairs = sorted((k, g) for g, k in cache.dist.items() if k <= N)
            elems = [g for _, g in pairs]
            lengths = [k for k, _ in pairs]
        else:
            elems, lengths = _closed_form_ball(G, N, cap)
    else:
        raise GrammarError(family, "ball family must be 'word' or 'cube'")
    sphere_sizes = [0] * (N + 1)
    for k in lengths:
        sphere_sizes[k] += 1
    return EnumeratedBall(G, family, N, elems, lengths, {g: i for i, g in enumerate(elems)}, sphere_sizes)


def _closed_form_ball(G: GroupSpec, N: int, cap: int):
    if G.kind == "free":
        d = G.params[0]
        size = 1
        sphere = 2 * d
        for r in range(1, N + 1):
            size += sphere
            if size > cap:
                raise BallCapError(G.label, r, cap)
            sphere *= 2 * d - 1
        words = [()]
        frontier = [()]
        for _ in range(N):
            nxt = []
            for w in frontier:
                for a in range(-d, d + 1):
                    if a == 0 or (w and w[-1] == -a):
                        continue
                    nxt.append(w + (a,))
            words.extend(nxt)
            frontier = nxt
        elems = sorted(words, key=lambda g: (len(g), g))
        return elems, [len(g) for g in elems]
    if G.kind == "free-abelian":
        from math import comb

        d = G.params[0]
        size = 1
        for r in range(1, N + 1):
            size += sum(comb(d, j) * comb(r - 1, j - 1) * 2**j for j in range(1, d + 1))
            if size > cap:
                raise BallCapError(G.label, r, cap)
        rng = range(-N, N + 1)
        elems = sorted(
            (g for g in product(rng, repeat=d) if sum(abs(x) for x in g) <= N),
            key=lambda g: (sum(abs(x) for x in g), g),
        )
        return elems, [sum(abs(x) for x in g) for g in elems]
    if G.kind == "cyclic-power":
        els = enumerate_group(G)
        if len(els) > cap:
            raise BallCapError(G.label, 0, cap)
        pairs = sorted((word_length(G, g), g) for g in els if word_length(G, g) <= N)
        return [g for _, g in pairs], [k for k, _ in pairs]
    raise DomainError(f"no closed-form ball for {G.kind}")


def ball_intersection_count(G: GroupSpec, N: int, g, family: str = "word", cap: int | None = None) -> int:
    """|K_N ∩ g K_N| with K_N the radius-N ball of the chosen family."""
    B = ball(G, N, family=family, cap=cap)
    g = validate_element(G, g)
    ginv = inverse(G, g)
    return sum(1 for h in B.elements if multiply(G, ginv, h) in B.index)


# ---------------------------------------------------------------------------
# batch Fejer counting
#
# For audits the intersection count is needed at every point of a large
# domain.  The generic path translates the ball once per point; for the
# Heisenberg group that is too slow at radius ~32, so counts are obtained for
# the whole domain at once from the ball-indicator autocorrelation
# (1_K * 1_K)(g), evaluated slice-by-slice with an FFT and a shear that
# accounts for the central twist.  The FFT values are integers up to
# round-off and are rounded back exactly.


def intersection_count_table(
    G: GroupSpec, N: int, points: list[Element], family: str = "word", cap: int | None = None
) -> np.ndarray:
    if G.kind == "heisenberg3" and family == "word" and len(points) * max(N, 1) ** 4 > 1 << 22:
        table = _heis_autocorrelation(N, cap)
        return table.lookup(points)
    B = ball(G, N, family=family, cap=cap)
    out = np.empty(len(points), dtype=np.int64)
    for i, g in enumerate(points):
        ginv = inverse(G, validate_element(G, g))
        out[i] = sum(1 for h in B.elements if multiply(G, ginv, h) in B.index)
    return out


class _HeisTable:
    def __init__(self, grid: np.ndarray, s: int, zmax_out: int):
        self.grid = grid
        self.s = s
        self.zmax_out = zmax_out

    def lookup(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.int64).reshape(-1, 3)
        x = pts[:, 0] + 2 * self.s
        y = pts[:, 1] + 2 * self.s
        z = pts[:, 2] + self.zmax_out
        ok = (
            (x >= 0)
            & (x < self.grid.shape[0])
            & (y >= 0)
            & (y < self.grid.shape[1])
            & (z >= 0)
            & (z < self.grid.shape[2])
        )
        vals = np.zeros(len(pts))
        vals[ok] = self.grid[x[ok], y[ok], z[ok]]
        out = np.rint(vals)
        if np.abs(vals - out).max(initial=0.0) > 1e-3:
            raise DomainError("autocorrelation rounding residual too large")
        return out.astype(np.int64)


_heis_tables: dict[int, _HeisTable] = {}


def _heis_autocorrelation(s: int, cap: int | None) -> _HeisTable:
    if s in _heis_tables:
        return _heis_tables[s]
    from scipy.signal import fftconvolve

    G = GroupSpec("heisenberg3")
    B = ball(G, s, cap=cap)
    el = np.asarray(B.elements, dtype=np.int64)
    zmax_s = int(np.abs(el[:, 2]).max(initial=0))
    nx, nz = 2 * s + 1, 2 * zmax_s + 1
    F = np.zeros((nx, nx, nz))
    F[el[:, 0] + s, el[:, 1] + s, el[:, 2] + zmax_s] = 1.0
    zmax_out = 2 * zmax_s + s * s
    out = np.zeros((4 * s + 1, 4 * s + 1, 2 * zmax_out + 1))
    for ix1 in range(nx):
        x1 = ix1 - s
        f1 = F[ix1]
        if not f1.any():
            continue
        off = abs(x1) * s
        sheared = np.zeros((nx, nx, nz + 2 * off))
        for iy2 in range(nx):
            sh = x1 * (iy2 - s)
            sheared[:, iy2, off + sh : off + sh + nz] = F[:, iy2, :]
        conv = fftconvolve(f1[None, :, :], sheared, axes=(1, 2))
        cz0 = zmax_s + zmax_s + off
        lo, hi = cz0 - zmax_out, cz0 + zmax_out + 1
        a, b = max(lo, 0), min(hi, conv.shape[2])
        xo = x1 + 2 * s
        for ix2 in range(nx):
            out[xo + ix2 - s][:, (a - lo) : (a - lo) + (b - a)] += conv[ix2][:, a:b]
    table = _HeisTable(out, s, zmax_out)
    _heis_tables[s] = table
    return table


# ---------------------------------------------------------------------------
# Heisenberg symmetry orbits: the maps generated by coordinate sign flips,
# the a<->b swap and inversion preserve the generating set, hence every ball
# and every Fejer symbol.  Reducing a domain to orbit representatives cuts
# audit work by ~15x.


def heis_orbit_data(points: np.ndarray):
    """(representative indices, inverse map) for the symmetry action on points."""
    pts = np.asarray(points, dtype=np.int64)
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    keys = []
    for sx in (1, -1):
        for sy in (1, -1):
            for swap in (0, 1):
                for inv in (0, 1):
                    xx, yy, zz = sx * x, sy * y, sx * sy * z
                    if swap:
                        xx, yy, zz = yy, xx, xx * yy - zz
                    if inv:
                        xx, yy, zz = -xx, -yy, xx * yy - zz
                    keys.append(((xx + 512) << 40) | ((yy + 512) << 20) | (zz + (1 << 19)))
    canon = np.stack(keys, 0).min(0)
    _, first, inv_map = np.unique(canon, return_index=True, return_inverse=True)
    return first, inv_map
