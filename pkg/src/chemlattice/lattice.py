"""Rough-set closure lattices over binary relations, with law checks.

A binary relation between a row set and a column set induces an upper
approximation (columns related to any chosen row), a lower approximation
(rows whose whole related-column set lies inside a chosen column set),
and their composite closure on row subsets.  The closure's fixed points,
ordered by inclusion, form a complete lattice.  This module enumerates
that lattice, resolves meets and joins against the enumerated element
set, extracts the Hasse diagram, and checks distributivity, maximal
Boolean sublattices, and orthomodularity.

Subsets are handled as frozensets of 0-based row indices externally and
as integer bitmasks internally.  Exact enumeration is capped at 20 rows;
the pairwise law checks and the Hasse scan carry their own element-count
caps, and oversize requests raise CapacityError suggesting block
decomposition rather than silently degrading.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import CapacityError, ConfigError

__all__ = [
    "Relation",
    "Lattice",
    "LawReport",
    "parse_relation",
    "relation_from_file",
    "build_two_block_relation",
    "upper_approx",
    "lower_approx",
    "closure",
    "enumerate_lattice",
    "meet_join",
    "hasse_cover",
    "find_complements",
    "check_distributive",
    "check_orthomodular",
    "boolean_blocks",
    "analyze_laws",
    "lattice_to_dot",
    "law_report_json",
    "format_subset",
]

ENUM_MAX_ROWS = 20
LAW_MAX_ELEMENTS = 512
HASSE_MAX_ELEMENTS = 2048
BLOCK_MAX_ATOMS = 16
_ORTHO_NODE_CAP = 1_000_000


@dataclass(frozen=True, eq=False)
class Relation:
    """Binary relation as a dense boolean matrix, rows x columns.

    Rows and columns must each touch the relation at least once; empty
    rows or columns reject at construction.
    """

    cells: np.ndarray

    def __post_init__(self) -> None:
        cells = np.asarray(self.cells, dtype=bool)
        if cells.ndim != 2 or cells.size == 0:
            raise ConfigError("relation must be a non-empty 2-D 0/1 matrix")
        object.__setattr__(self, "cells", cells)
        empty_rows = np.flatnonzero(~cells.any(axis=1))
        if empty_rows.size:
            raise ConfigError(f"relation row {int(empty_rows[0]) + 1} is empty")
        empty_cols = np.flatnonzero(~cells.any(axis=0))
        if empty_cols.size:
            raise ConfigError(f"relation column {int(empty_cols[0]) + 1} is empty")

    @property
    def n_rows(self) -> int:
        return self.cells.shape[0]

    @property
    def n_cols(self) -> int:
        return self.cells.shape[1]

    def row_masks(self) -> list:
        """Per-row related-column sets as integer bitmasks."""
        return [
            sum(1 << int(j) for j in np.flatnonzero(row)) for row in self.cells
        ]


def parse_relation(text: str) -> Relation:
    """Parse a 0/1 matrix; '#' starts a comment, blank lines skipped."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].replace(" ", "").replace("\t", "").strip()
        if not line:
            continue
        bad = set(line) - {"0", "1"}
        if bad:
            raise ConfigError(
                f"line {lineno}: unexpected character {sorted(bad)[0]!r} in relation"
            )
        rows.append([c == "1" for c in line])
        if len(rows[-1]) != len(rows[0]):
            raise ConfigError(
                f"line {lineno}: row length {len(rows[-1])} != {len(rows[0])}"
            )
    if not rows:
        raise ConfigError("relation text contains no rows")
    return Relation(np.array(rows, dtype=bool))


def relation_from_file(path) -> Relation:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_relation(fh.read())


def build_two_block_relation(
    block_sizes: Sequence[int],
    overlap: Iterable[int] = (),
    fill_off_blocks: bool = True,
) -> Relation:
    """Square relation from diagonal block squares.

    Blocks of the given sizes are laid out along the diagonal.  Inside
    each block's square only the diagonal cells are related; outside
    every block square all cells are related when ``fill_off_blocks`` is
    set, none otherwise.  Each index in ``overlap`` (1-based) makes the
    block ending there share that position with the next block, so e.g.
    sizes (3, 3, 2) with overlap (3,) span 7 positions.
    """
    sizes = list(block_sizes)
    if not sizes or any(s < 1 for s in sizes):
        raise ConfigError(f"block sizes must be positive, got {sizes}")
    overlap_set = set(int(i) for i in overlap)
    spans = []
    start = 1
    for bi, size in enumerate(sizes):
        end = start + size - 1
        spans.append((start, end))
        if end in overlap_set:
            if bi == len(sizes) - 1:
                raise ConfigError(
                    f"overlap index {end} falls on the final block boundary"
                )
            overlap_set.discard(end)
            start = end
        else:
            start = end + 1
    if overlap_set:
        raise ConfigError(
            f"overlap index {sorted(overlap_set)[0]} is not a block boundary"
        )
    n = spans[-1][1]
    cells = np.full((n, n), bool(fill_off_blocks))
    eye = np.eye(n, dtype=bool)
    for lo, hi in spans:
        sl = slice(lo - 1, hi)
        cells[sl, sl] = eye[sl, sl]
    return Relation(cells)


def _as_indices(x: Iterable[int], bound: int, what: str) -> frozenset:
    out = frozenset(int(i) for i in x)
    for i in out:
        if not 0 <= i < bound:
            raise ValueError(f"{what} index {i} outside 0..{bound - 1}")
    return out


def upper_approx(rel: Relation, rows: Iterable[int]) -> frozenset:
    """Columns related to at least one of the given rows."""
    idx = _as_indices(rows, rel.n_rows, "row")
    if not idx:
        return frozenset()
    hit = rel.cells[sorted(idx)].any(axis=0)
    return frozenset(int(j) for j in np.flatnonzero(hit))


def lower_approx(rel: Relation, cols: Iterable[int]) -> frozenset:
    """Rows whose entire related-column set lies inside the given columns."""
    idx = _as_indices(cols, rel.n_cols, "column")
    outside = np.ones(rel.n_cols, dtype=bool)
    if idx:
        outside[sorted(idx)] = False
    ok = ~(rel.cells & outside).any(axis=1)
    return frozenset(int(i) for i in np.flatnonzero(ok))


def closure(rel: Relation, rows: Iterable[int]) -> frozenset:
    """Lower approximation of the upper approximation; extensive,
    monotone, and idempotent on row subsets."""
    return lower_approx(rel, upper_approx(rel, rows))


def _closure_mask(row_masks: Sequence[int], n_rows: int, x: int) -> int:
    y = 0
    m = x
    while m:
        i = (m & -m).bit_length() - 1
        y |= row_masks[i]
        m &= m - 1
    out = 0
    for r in range(n_rows):
        if row_masks[r] & ~y == 0:
            out |= 1 << r
    return out


def enumerate_lattice(rel: Relation, max_rows: int = ENUM_MAX_ROWS) -> "Lattice":
    """All closure fixed points, via lectic-order next-closure search.

    Exact and exhaustive; relations wider than ``max_rows`` rows raise
    CapacityError (decompose the relation into blocks instead).
    """
    n = rel.n_rows
    if n > max_rows:
        raise CapacityError(
            f"exact lattice enumeration is capped at {max_rows} rows "
            f"(got {n}); decompose the relation into blocks"
        )
    row_masks = rel.row_masks()
    full = (1 << n) - 1
    elems = []
    a = _closure_mask(row_masks, n, 0)
    elems.append(a)
    while a != full:
        progressed = False
        for i in reversed(range(n)):
            bit = 1 << i
            if a & bit:
                a &= ~bit
            else:
                b = _closure_mask(row_masks, n, a | bit)
                if (b & ~a) & (bit - 1) == 0:
                    a = b
                    elems.append(a)
                    progressed = True
                    break
        if not progressed:
            break
    return Lattice(n, elems)


class Lattice:
    """Finite lattice of subsets of a ground set, ordered by inclusion.

    Elements are stored as bitmasks sorted numerically, so the empty set
    comes first and the full ground set last.  Meets and joins are
    resolved against the element set itself: the meet of two elements is
    the union of all elements below both, the join the intersection of
    all elements above both, and either raises if that resolvent is not
    itself an element (the family then fails to be a lattice).
    """

    def __init__(self, universe: int, masks: Iterable[int]):
        self.universe = int(universe)
        uniq = sorted(set(int(m) for m in masks))
        full = (1 << self.universe) - 1
        if not uniq:
            raise ValueError("a lattice needs at least one element")
        if uniq[0] < 0 or uniq[-1] > full:
            raise ValueError("element outside the ground set")
        if uniq[0] != 0:
            raise ValueError("the empty set must be an element (bottom)")
        if uniq[-1] != full:
            raise ValueError("the full ground set must be an element (top)")
        self._masks = uniq
        self._mask_arr = np.array(uniq, dtype=np.int64)
        self._index = {m: i for i, m in enumerate(uniq)}
        self._elements = [self._to_set(m) for m in uniq]
        self._sub = None
        self._meet_tab = None
        self._join_tab = None

    @classmethod
    def from_subsets(cls, universe: int, subsets: Iterable[Iterable[int]]) -> "Lattice":
        masks = []
        for s in subsets:
            fs = _as_indices(s, universe, "ground-set")
            masks.append(sum(1 << i for i in fs))
        return cls(universe, masks)

    def _to_set(self, mask: int) -> frozenset:
        return frozenset(i for i in range(self.universe) if mask >> i & 1)

    def _to_mask(self, subset: Iterable[int]) -> int:
        fs = _as_indices(subset, self.universe, "ground-set")
        return sum(1 << i for i in fs)

    def __len__(self) -> int:
        return len(self._masks)

    def __contains__(self, subset) -> bool:
        try:
            return self._to_mask(subset) in self._index
        except ValueError:
            return False

    @property
    def elements(self) -> list:
        return list(self._elements)

    @property
    def bottom(self) -> frozenset:
        return self._elements[0]

    @property
    def top(self) -> frozenset:
        return self._elements[-1]

    def index_of(self, subset) -> int:
        mask = self._to_mask(subset)
        try:
            return self._index[mask]
        except KeyError:
            raise ValueError(
                f"{format_subset(frozenset(subset))} is not a lattice element"
            ) from None

    def _subset_matrix(self) -> np.ndarray:
        if self._sub is None:
            m = self._mask_arr
            self._sub = (m[:, None] & ~m[None, :]) == 0
        return self._sub

    def _lookup_masks(self, masks: np.ndarray, what: str) -> np.ndarray:
        idx = np.searchsorted(self._mask_arr, masks)
        idx = np.clip(idx, 0, len(self._masks) - 1)
        bad = self._mask_arr[idx] != masks
        if bad.any():
            flat = np.flatnonzero(bad.ravel())[0]
            raise ValueError(
                f"{what} resolves outside the element set; "
                "the family is not a lattice"
            )
        return idx.astype(np.int32)

    def _tables(self):
        """Dense meet/join index tables, built once, capped in size."""
        if self._meet_tab is None:
            n = len(self._masks)
            if n > LAW_MAX_ELEMENTS:
                raise CapacityError(
                    f"pairwise law tables are capped at {LAW_MAX_ELEMENTS} "
                    f"elements (got {n}); decompose the relation into blocks"
                )
            sub = self._subset_matrix()
            m = self._mask_arr
            full = self._masks[-1]
            meet_tab = np.empty((n, n), dtype=np.int32)
            join_tab = np.empty((n, n), dtype=np.int32)
            for i in range(n):
                below = sub[:, i:i + 1] & sub          # k below i and k below j
                or_all = np.bitwise_or.reduce(
                    np.where(below, m[:, None], 0), axis=0
                )
                meet_tab[i] = self._lookup_masks(or_all, "a meet")
                above = sub[i, :][:, None] & sub.T      # k above i and k above j
                and_all = np.bitwise_and.reduce(
                    np.where(above, m[:, None], full), axis=0
                )
                join_tab[i] = self._lookup_masks(and_all, "a join")
            self._meet_tab = meet_tab
            self._join_tab = join_tab
        return self._meet_tab, self._join_tab

    def meet_index(self, i: int, j: int) -> int:
        mt, _ = self._tables()
        return int(mt[i, j])

    def join_index(self, i: int, j: int) -> int:
        _, jt = self._tables()
        return int(jt[i, j])


def meet_join(lat: Lattice, x: Iterable[int], y: Iterable[int]) -> tuple:
    """Greatest element inside x∩y and least element containing x∪y.

    Both arguments must be lattice elements; resolution happens against
    the enumerated element set, without table construction, so it works
    at any lattice size.
    """
    xi = lat.index_of(x)
    yi = lat.index_of(y)
    xm = lat._masks[xi]
    ym = lat._masks[yi]
    inter = xm & ym
    or_all = 0
    for m in lat._masks:
        if m & ~inter == 0:
            or_all |= m
    if or_all not in lat._index:
        raise ValueError("meet resolves outside the element set")
    union = xm | ym
    and_all = lat._masks[-1]
    for m in lat._masks:
        if union & ~m == 0:
            and_all &= m
    if and_all not in lat._index:
        raise ValueError("join resolves outside the element set")
    return lat._to_set(or_all), lat._to_set(and_all)


def hasse_cover(lat: Lattice) -> list:
    """Covering pairs (lower, upper) of the inclusion order."""
    n = len(lat)
    if n > HASSE_MAX_ELEMENTS:
        raise CapacityError(
            f"Hasse extraction is capped at {HASSE_MAX_ELEMENTS} elements (got {n})"
        )
    sub = lat._subset_matrix()
    pc = np.array([int(m).bit_count() for m in lat._masks])
    edges = []
    for x in range(n):
        ups = np.flatnonzero(sub[x] & (pc > pc[x]))
        if ups.size == 0:
            continue
        s = sub[np.ix_(ups, ups)]
        np.fill_diagonal(s, False)
        minimal = ~s.any(axis=0)
        for y in ups[minimal]:
            edges.append((lat._elements[x], lat._elements[int(y)]))
    return edges


def find_complements(lat: Lattice, x: Iterable[int]) -> list:
    """Elements whose meet with x is bottom and join with x is top."""
    xi = lat.index_of(x)
    mt, jt = lat._tables()
    n = len(lat)
    hits = np.flatnonzero((mt[xi] == 0) & (jt[xi] == n - 1))
    return [lat._elements[int(i)] for i in hits]


@dataclass(frozen=True)
class DistributivityReport:
    holds: bool
    witness: Optional[tuple] = None


def check_distributive(lat: Lattice) -> DistributivityReport:
    """Exhaustive check of meet-over-join on all triples.

    Returns the first failing triple (x, y, z) in element order as a
    witness, where x ∧ (y ∨ z) != (x ∧ y) ∨ (x ∧ z).
    """
    mt, jt = lat._tables()
    n = len(lat)
    for x in range(n):
        lhs = mt[x][jt]
        rhs = jt[mt[x][:, None], mt[x][None, :]]
        diff = lhs != rhs
        if diff.any():
            y, z = map(int, np.argwhere(diff)[0])
            witness = (lat._elements[x], lat._elements[y], lat._elements[z])
            return DistributivityReport(False, witness)
    return DistributivityReport(True, None)


@dataclass(frozen=True)
class OrthomodularityReport:
    holds: bool
    witness: Optional[tuple] = None
    complement_map: Optional[dict] = None
    note: str = ""


def _search_orthocomplement(lat: Lattice, enforce_oml: bool):
    """Backtracking search for an involutive order-reversing complement
    assignment; optionally prunes branches violating the orthomodular
    law as pairs are fixed."""
    mt, jt = lat._tables()
    sub = lat._subset_matrix()
    n = len(lat)
    bottom, top = 0, n - 1
    comp_sets = [np.flatnonzero((mt[x] == bottom) & (jt[x] == top)) for x in range(n)]
    assign = np.full(n, -1, dtype=np.int64)
    assign[bottom] = top
    assign[top] = bottom
    budget = [_ORTHO_NODE_CAP]

    all_idx = np.arange(n)

    def law_ok(x: int, c: int) -> bool:
        ups = all_idx[sub[x]]
        if not (jt[x, mt[c, ups]] == ups).all():
            return False
        ups_c = all_idx[sub[c]]
        return (jt[c, mt[x, ups_c]] == ups_c).all()

    def reversal_ok(x: int, c: int) -> bool:
        done = np.flatnonzero(assign >= 0)
        partners = assign[done]
        for u, up in zip(done, partners):
            u, up = int(u), int(up)
            if sub[u, x] and not sub[c, up]:
                return False
            if sub[x, u] and not sub[up, c]:
                return False
            if sub[u, c] and not sub[x, up]:
                return False
            if sub[c, u] and not sub[up, x]:
                return False
        return True

    def backtrack() -> bool:
        budget[0] -= 1
        if budget[0] < 0:
            raise CapacityError(
                "orthocomplement search exceeded its node budget"
            )
        todo = np.flatnonzero(assign < 0)
        if todo.size == 0:
            return True
        x = int(todo[0])
        for c in comp_sets[x]:
            c = int(c)
            if assign[c] >= 0 or c == x:
                continue
            if not reversal_ok(x, c):
                continue
            if enforce_oml and not law_ok(x, c):
                continue
            assign[x] = c
            assign[c] = x
            if backtrack():
                return True
            assign[x] = -1
            assign[c] = -1
        return False

    found = backtrack()
    return (assign.copy() if found else None)


def check_orthomodular(lat: Lattice) -> OrthomodularityReport:
    """Search for an orthocomplementation satisfying the orthomodular law.

    If some involutive order-reversing complement assignment satisfies
    x <= y  =>  y = x ∨ (x' ∧ y) throughout, the lattice passes and the
    assignment is reported.  If complement assignments exist but every
    one breaks the law, the first violating pair under the first
    assignment found is the witness.  If no assignment exists at all the
    result carries a note instead of a witness.
    """
    assign = _search_orthocomplement(lat, enforce_oml=True)
    if assign is not None:
        cmap = {
            lat._elements[i]: lat._elements[int(assign[i])] for i in range(len(lat))
        }
        return OrthomodularityReport(True, None, cmap, "")
    assign = _search_orthocomplement(lat, enforce_oml=False)
    if assign is None:
        return OrthomodularityReport(
            False, None, None, "no consistent orthocomplementation"
        )
    mt, jt = lat._tables()
    sub = lat._subset_matrix()
    n = len(lat)
    for x in range(n):
        c = int(assign[x])
        for y in np.flatnonzero(sub[x]):
            y = int(y)
            if jt[x, mt[c, y]] != y:
                cmap = {
                    lat._elements[i]: lat._elements[int(assign[i])]
                    for i in range(n)
                }
                witness = (lat._elements[x], lat._elements[y])
                return OrthomodularityReport(False, witness, cmap, "")
    return OrthomodularityReport(
        False, None, None, "no consistent orthocomplementation"
    )


def _atom_indices(lat: Lattice) -> list:
    sub = lat._subset_matrix()
    below_counts = sub.sum(axis=0)
    return [i for i in range(1, len(lat)) if int(below_counts[i]) == 2]


def _cube_indices(lat: Lattice, atom_idx: Sequence[int]):
    """Element indices of all joins of subsets of the given atoms, or
    None when they fail to form a Boolean cube."""
    mt, jt = lat._tables()
    k = len(atom_idx)
    cube = np.zeros(1 << k, dtype=np.int64)
    for bit, a in enumerate(atom_idx):
        base = 1 << bit
        cube[base:2 * base] = jt[cube[:base], a]
    if len(set(cube.tolist())) != len(cube):
        return None
    s = np.arange(1 << k)
    sel = cube[s]
    if not (mt[sel[:, None], sel[None, :]] == cube[s[:, None] & s[None, :]]).all():
        return None
    if not (jt[sel[:, None], sel[None, :]] == cube[s[:, None] | s[None, :]]).all():
        return None
    return cube


def _boolean_blocks_raw(lat: Lattice, assign=None) -> list:
    """Atom sets spanning Boolean sublattices, as (atom indices, cube).

    Every atom subset whose joins form a Boolean cube is enumerated.
    When an orthocomplement assignment is available, only cubes agreeing
    with it survive (each atom's in-cube complement, the join of the
    others, must be its orthocomplement); that distinguishes genuine
    blocks from accidental cubes such as a cross pair of atoms from two
    different blocks, whose meet is bottom and join top all the same.
    The inclusion-maximal surviving sets are returned.  Without any
    complement assignment the inclusion-maximal cubes stand as found.
    """
    atoms = _atom_indices(lat)
    if len(atoms) > BLOCK_MAX_ATOMS:
        raise CapacityError(
            f"Boolean block search is capped at {BLOCK_MAX_ATOMS} atoms "
            f"(got {len(atoms)})"
        )
    cubes = []

    def dfs(current: list, cube):
        if current:
            cubes.append((tuple(current), cube))
        start = current[-1] if current else -1
        for a in atoms:
            if a <= start:
                continue
            trial_cube = _cube_indices(lat, current + [a])
            if trial_cube is not None:
                dfs(current + [a], trial_cube)

    dfs([], None)

    def consistent(atom_idx, cube) -> bool:
        if assign is None:
            return True
        k = len(atom_idx)
        top_mask = (1 << k) - 1
        return all(
            int(cube[top_mask ^ (1 << bit)]) == int(assign[atom_idx[bit]])
            for bit in range(k)
        )

    surviving = [
        (atom_idx, cube) for atom_idx, cube in cubes if consistent(atom_idx, cube)
    ]
    keep = []
    sets = [frozenset(a) for a, _ in surviving]
    for i, (atom_idx, cube) in enumerate(surviving):
        if not any(j != i and sets[i] < sets[j] for j in range(len(surviving))):
            keep.append((atom_idx, cube))
    return keep


def _ortho_assignment(lat: Lattice):
    return _search_orthocomplement(lat, enforce_oml=False)


def boolean_blocks(lat: Lattice) -> list:
    """Maximal Boolean sublattices generated by lattice atoms.

    Each entry is (atom elements, sublattice element count); a block of
    k atoms spans 2**k elements including bottom and top.  When the
    lattice carries an orthocomplementation, blocks are additionally
    required to agree with it (see _boolean_blocks_raw).
    """
    out = []
    for atom_idx, cube in _boolean_blocks_raw(lat, _ortho_assignment(lat)):
        atoms = tuple(lat._elements[i] for i in atom_idx)
        out.append((atoms, int(cube.size)))
    return out


@dataclass(frozen=True)
class LawReport:
    """Aggregate law-check results for one lattice."""

    distributive: bool
    distributive_witness: Optional[tuple]
    boolean_blocks: list
    shared_elements: list
    orthomodular: bool
    orthomodular_witness: Optional[tuple] = None
    complement_map: Optional[dict] = None
    note: str = ""


def analyze_laws(lat: Lattice) -> LawReport:
    """Run the distributivity, block, shared-element, and orthomodularity
    checks and collect the results."""
    dist = check_distributive(lat)
    ortho = check_orthomodular(lat)
    assign = None
    if ortho.complement_map is not None:
        assign = np.array(
            [lat.index_of(ortho.complement_map[e]) for e in lat.elements],
            dtype=np.int64,
        )
    raw_blocks = _boolean_blocks_raw(lat, assign)
    blocks = [
        (tuple(lat._elements[i] for i in atom_idx), int(cube.size))
        for atom_idx, cube in raw_blocks
    ]
    membership = {}
    for bi, (_, cube) in enumerate(raw_blocks):
        for e in cube.tolist():
            membership.setdefault(int(e), set()).add(bi)
    shared = sorted(
        (e for e, bs in membership.items() if len(bs) >= 2)
    )
    shared_elements = [lat._elements[e] for e in shared]
    return LawReport(
        distributive=dist.holds,
        distributive_witness=dist.witness,
        boolean_blocks=blocks,
        shared_elements=shared_elements,
        orthomodular=ortho.holds,
        orthomodular_witness=ortho.witness,
        complement_map=ortho.complement_map,
        note=ortho.note,
    )


def format_subset(subset: Iterable[int]) -> str:
    """Render a row subset as '{A1,A3}' with 1-based labels; '{}' when empty."""
    idx = sorted(int(i) for i in subset)
    return "{" + ",".join(f"A{i + 1}" for i in idx) + "}"


def lattice_to_dot(lat: Lattice) -> str:
    """Graphviz digraph of the Hasse diagram, bottom ranked lowest."""
    edges = hasse_cover(lat)
    index = {e: i for i, e in enumerate(lat.elements)}
    lines = [
        "digraph hasse {",
        "  rankdir=BT;",
        '  node [shape=box, fontname="Helvetica"];',
    ]
    for i, e in enumerate(lat.elements):
        lines.append(f'  n{i} [label="{format_subset(e)}"];')
    for lo, hi in sorted(edges, key=lambda p: (index[p[0]], index[p[1]])):
        lines.append(f"  n{index[lo]} -> n{index[hi]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def law_report_json(report: LawReport) -> dict:
    """Five-key JSON form: distributive, witness, blocks, shared,
    orthomodular."""
    witness = None
    if report.distributive_witness is not None:
        witness = [format_subset(e) for e in report.distributive_witness]
    blocks = [
        {
            "atoms": [format_subset(a) for a in atoms],
            "elements": count,
        }
        for atoms, count in report.boolean_blocks
    ]
    return {
        "distributive": report.distributive,
        "witness": witness,
        "blocks": blocks,
        "shared": [format_subset(e) for e in report.shared_elements],
        "orthomodular": report.orthomodular,
    }
