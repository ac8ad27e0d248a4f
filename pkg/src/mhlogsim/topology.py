"""Cellular network hierarchy: MSC -> BSC -> BS cells, plus host movement.

Cells (base stations) carry global indices 0..n_cells-1; cell c belongs to
BSC ``c // bss_per_bsc`` and BSC b belongs to MSC ``b // bscs_per_msc``.
The region of a BSC is the set of cells it controls. Wired hop counts are
fixed by the tree shape:

    BS <-> its BSC            1
    BS <-> BS, same BSC       2
    BSC <-> BSC, same MSC     2
    BSC <-> BSC, across MSCs  inter_msc_bsc_hops (default 4, a declared
                              convention for an MSC backbone of diameter 2)

Sites are (kind, index) pairs so log fragments can name their holder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

CellId = int
BscId = int
MscId = int

# Site kinds used across the strategy layer.
BS = "bs"
BSC = "bsc"
MH = "mh"

Site = tuple[str, int]


def bs_site(cell: CellId) -> Site:
    return (BS, cell)


def bsc_site(bsc: BscId) -> Site:
    return (BSC, bsc)


def mh_site(host_id: int) -> Site:
    return (MH, host_id)


class MoveKind(Enum):
    INTRA_BSC = "intra_bsc"
    INTER_BSC = "inter_bsc"


@dataclass(frozen=True)
class NetworkTree:
    """Immutable topology with precomputed cell adjacency."""

    msc_count: int
    bscs_per_msc: int
    bss_per_bsc: int
    adjacency: tuple[tuple[CellId, ...], ...]
    adjacency_kind: str = "ring"
    inter_msc_bsc_hops: int = 4

    @property
    def n_bscs(self) -> int:
        return self.msc_count * self.bscs_per_msc

    @property
    def n_cells(self) -> int:
        return self.n_bscs * self.bss_per_bsc


def _ring_adjacency(n: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for i in range(n):
        nbrs = sorted({(i - 1) % n, (i + 1) % n} - {i})
        out.append(tuple(nbrs))
    return tuple(out)


def _grid_adjacency(n: int) -> tuple[tuple[int, ...], ...]:
    # Near-square layout, row-major, 4-neighborhood.
    cols = math.ceil(math.sqrt(n))
    out = []
    for i in range(n):
        r, c = divmod(i, cols)
        nbrs = []
        for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if rr < 0 or cc < 0 or cc >= cols:
                continue
            j = rr * cols + cc
            if 0 <= j < n:
                nbrs.append(j)
        out.append(tuple(sorted(nbrs)))
    return tuple(out)


def build_topology(
    msc_count: int,
    bscs_per_msc: int,
    bss_per_bsc: int,
    adjacency_kind: str = "ring",
    inter_msc_bsc_hops: int = 4,
) -> NetworkTree:
    """Construct the tree and the cell adjacency over the global cell order.

    A network needs at least two cells: movement is part of every run, and a
    single-cell network has nowhere to hand off to.
    """
    if msc_count < 1 or bscs_per_msc < 1 or bss_per_bsc < 1:
        raise ValueError("all topology counts must be >= 1")
    n = msc_count * bscs_per_msc * bss_per_bsc
    if n < 2:
        raise ValueError("topology must contain at least 2 cells for mobility")
    if inter_msc_bsc_hops < 2:
        raise ValueError("inter_msc_bsc_hops must be >= 2")
    if adjacency_kind == "ring":
        adj = _ring_adjacency(n)
    elif adjacency_kind == "grid":
        adj = _grid_adjacency(n)
    else:
        raise ValueError(f"unknown adjacency kind: {adjacency_kind!r}")
    return NetworkTree(
        msc_count=msc_count,
        bscs_per_msc=bscs_per_msc,
        bss_per_bsc=bss_per_bsc,
        adjacency=adj,
        adjacency_kind=adjacency_kind,
        inter_msc_bsc_hops=inter_msc_bsc_hops,
    )


def bsc_of(tree: NetworkTree, cell: CellId) -> BscId:
    """The unique BSC owning ``cell``."""
    if not 0 <= cell < tree.n_cells:
        raise ValueError(f"unknown cell {cell}")
    return cell // tree.bss_per_bsc


def msc_of_bsc(tree: NetworkTree, bsc: BscId) -> MscId:
    if not 0 <= bsc < tree.n_bscs:
        raise ValueError(f"unknown BSC {bsc}")
    return bsc // tree.bscs_per_msc


def cells_of_bsc(tree: NetworkTree, bsc: BscId) -> list[CellId]:
    start = bsc * tree.bss_per_bsc
    return list(range(start, start + tree.bss_per_bsc))


def _bsc_gap(tree: NetworkTree, a: BscId, b: BscId) -> int:
    if a == b:
        return 0
    if msc_of_bsc(tree, a) == msc_of_bsc(tree, b):
        return 2
    return tree.inter_msc_bsc_hops


def hop_distance(tree: NetworkTree, a: Site, b: Site) -> int:
    """Wired tree-path length between two BS or BSC sites."""
    if a == b:
        return 0
    kind_a, ia = a
    kind_b, ib = b
    if kind_a == BS and kind_b == BS:
        return 1 + _bsc_gap(tree, bsc_of(tree, ia), bsc_of(tree, ib)) + 1
    if kind_a == BS and kind_b == BSC:
        return 1 + _bsc_gap(tree, bsc_of(tree, ia), ib)
    if kind_a == BSC and kind_b == BS:
        return 1 + _bsc_gap(tree, bsc_of(tree, ib), ia)
    if kind_a == BSC and kind_b == BSC:
        return _bsc_gap(tree, ia, ib)
    raise ValueError(f"hop_distance needs BS or BSC sites, got {a} and {b}")


def sample_next_cell(tree: NetworkTree, current: CellId, rng: np.random.Generator) -> CellId:
    """Uniformly random neighbor of ``current``; deterministic per stream."""
    nbrs = tree.adjacency[current]
    return nbrs[int(rng.integers(len(nbrs)))]


def classify_move(tree: NetworkTree, from_cell: CellId, to_cell: CellId) -> MoveKind:
    """Intra-BSC when both cells share a region, inter-BSC otherwise."""
    if from_cell == to_cell:
        raise ValueError("not a handoff: from_cell == to_cell")
    if bsc_of(tree, from_cell) == bsc_of(tree, to_cell):
        return MoveKind.INTRA_BSC
    return MoveKind.INTER_BSC
