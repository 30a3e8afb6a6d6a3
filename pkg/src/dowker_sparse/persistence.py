"""Persistence diagrams of filtered complexes over the two-element field.

compute_diagram runs the standard left-to-right column reduction of the
boundary matrix, processed per dimension with columns stored as Python
integers (bit i set = face of per-dimension rank i).  betti_at is a rank
oracle on the sublevel complex and deliberately shares none of the pairing
logic: it eliminates columns by lowest set bit in vertex-lexicographic
order, with no filtration sort and no pivot pairing.
"""

from dataclasses import dataclass

from .extreal import INF
from .nerve import FilteredComplex, Simplex


@dataclass(frozen=True)
class PersistenceDiagram:
    """Per-dimension multiset of intervals [birth, death), death possibly inf.

    classes are (dimension, birth, death) triples sorted by that key, so
    dataclass equality is multiset equality.
    """

    classes: tuple[tuple[int, float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        for dim, b, d in self.classes:
            if not b < d:
                raise ValueError(f"empty interval [{b},{d}) in dimension {dim}")

    def in_dim(self, dim: int) -> list[tuple[float, float]]:
        return [(b, d) for (k, b, d) in self.classes if k == dim]

    def dims(self) -> list[int]:
        return sorted({k for (k, _, _) in self.classes})


def _facets(verts: Simplex) -> list[Simplex]:
    return [verts[:i] + verts[i + 1:] for i in range(len(verts))]


def compute_diagram(cx: FilteredComplex) -> PersistenceDiagram:
    """Reduce the boundary matrix and pair births with deaths.

    Simplices are ordered by (value, dimension, vertices).  Every pivot pair
    with strictly increasing value yields a class; simplices of dimension
    below the cap whose column reduces to zero and whose row is never a
    pivot yield essential classes.  Input invariants (face closure, monotone
    values, no duplicates, finite values) are verified and violations are
    rejected naming the offending face pair.
    """
    dim_cap = cx.dim_cap
    ordered = sorted(cx.simplices, key=lambda sv: (sv[1], len(sv[0]), sv[0]))

    rank_of = [dict() for _ in range(dim_cap)]      # face tuple -> rank, dims < dim_cap
    values_of = [[] for _ in range(dim_cap)]        # per-dimension birth values
    counts = [0] * (dim_cap + 1)
    pivots = [dict() for _ in range(dim_cap)]       # row rank -> reduced column
    pairs = []                                      # (row dim, row rank, death value)
    creators = [[] for _ in range(dim_cap)]         # (rank, value) with zero column
    seen = set()

    for verts, value in ordered:
        if any(a >= b for a, b in zip(verts, verts[1:])):
            raise ValueError(f"simplex vertices must be sorted and duplicate-free: {verts}")
        if verts in seen:
            raise ValueError(f"duplicate simplex {verts}")
        seen.add(verts)
        if not value < INF or value < 0 or value != value:
            raise ValueError(f"simplex {verts} has invalid filtration value {value}")
        d = len(verts) - 1
        if d > dim_cap:
            raise ValueError(f"simplex {verts} exceeds dim_cap={dim_cap}")
        rank = counts[d]
        counts[d] += 1

        if d == 0:
            if dim_cap > 0:
                creators[0].append((rank, value))
        else:
            col = 0
            for facet in _facets(verts):
                fr = rank_of[d - 1].get(facet)
                if fr is None:
                    raise ValueError(f"missing face {facet} of simplex {verts}")
                if values_of[d - 1][fr] > value:
                    raise ValueError(
                        f"face {facet} of simplex {verts} has larger filtration value "
                        f"({values_of[d - 1][fr]} > {value})")
                col |= 1 << fr
            piv = pivots[d - 1]
            while col:
                low = col.bit_length() - 1
                other = piv.get(low)
                if other is None:
                    piv[low] = col
                    pairs.append((d - 1, low, value))
                    break
                col ^= other
            else:
                if d < dim_cap:
                    creators[d].append((rank, value))

        if d < dim_cap:
            rank_of[d][verts] = rank
            values_of[d].append(value)

    classes = []
    for row_dim, row_rank, death in pairs:
        birth = values_of[row_dim][row_rank]
        if birth < death:
            classes.append((row_dim, birth, death))
    for d in range(dim_cap):
        paired_rows = pivots[d].keys()
        for rank, value in creators[d]:
            if rank not in paired_rows:
                classes.append((d, value, INF))
    classes.sort()
    return PersistenceDiagram(tuple(classes))


def _gf2_rank(columns: list[int]) -> int:
    """Rank of a set of GF(2) column vectors, eliminating by lowest set bit."""
    table = {}
    rank = 0
    for col in columns:
        while col:
            lead = (col & -col).bit_length() - 1
            if lead in table:
                col ^= table[lead]
            else:
                table[lead] = col
                rank += 1
                break
    return rank


def betti_at(cx: FilteredComplex, t: float, dim: int) -> int:
    """Rank of degree-dim homology of the sublevel complex {value < t}.

    Independent of the pairing reduction: builds the two boundary matrices
    of the sublevel complex in vertex order and subtracts their GF(2) ranks.
    Only valid for dim < dim_cap.
    """
    if not 0 <= dim < cx.dim_cap:
        raise ValueError(f"dimension {dim} not below dim_cap={cx.dim_cap}")
    by_dim: dict[int, list[Simplex]] = {}
    for verts, value in cx.simplices:
        if value < t:
            by_dim.setdefault(len(verts) - 1, []).append(verts)
    for lst in by_dim.values():
        lst.sort()

    def boundary_rank(d: int) -> int:
        cols_of = by_dim.get(d, [])
        if d == 0 or not cols_of:
            return 0
        row_index = {verts: i for i, verts in enumerate(by_dim.get(d - 1, []))}
        columns = []
        for verts in cols_of:
            col = 0
            for facet in _facets(verts):
                col |= 1 << row_index[facet]
            columns.append(col)
        return _gf2_rank(columns)

    n_dim = len(by_dim.get(dim, []))
    cycles = n_dim - boundary_rank(dim)
    boundaries = boundary_rank(dim + 1)
    return cycles - boundaries
