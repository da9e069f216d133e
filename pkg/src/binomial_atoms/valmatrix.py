"""The valuation matrix of n and its exact rank.

For n >= 2 the matrix has one column per j in 0..n-1 and one row per
pair (p, r) where p <= n is prime and r runs through the row set of
(n, p); the entry at (p, r, j) is v_p(n+r-j) - v_p(n-j).  Rows are
stacked in blocks of ascending p, rows inside a block in ascending r.
All arithmetic is exact: entries are Python ints, elimination is
fraction-free (cross-multiplication with gcd content stripping keeps
every intermediate integral), and kernel vectors are re-verified by
multiplying them back into the matrix.

Rank facts this module verifies computationally: the rank is n-1 with
kernel spanned by the all-ones vector; the "inner" columns strictly
between n-P and P (P the largest prime <= n) span 2P-n-1 dimensions;
the "outer" 2(n-P) columns span 2(n-P) dimensions; the two spans meet
trivially.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd

from . import primes
from .errors import CounterexampleError, UsageError
from .primes import _val as _vp
from .reports import WitnessReport

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# row sets and blocks


@dataclass(frozen=True)
class ResidueInfo:
    """r_np is the residue of n mod p, 0 <= r_np < p."""

    n: int
    p: int
    r_np: int


def residue_info(n: int, p: int) -> ResidueInfo:
    if not (2 <= p <= n):
        raise UsageError(f"need 2 <= p <= n, got p={p}, n={n}")
    if not primes.is_prime(p):
        raise UsageError(f"p={p} is not prime")
    return ResidueInfo(n=n, p=p, r_np=n % p)


def _is_proper_power_of_two(n: int) -> bool:
    return n >= 4 and n & (n - 1) == 0


@dataclass(frozen=True)
class RowSet:
    n: int
    p: int
    rows: tuple[int, ...]


def row_set(n: int, p: int) -> RowSet:
    """Row indices r for the (n, p) block.

    The plain set is {1, ..., p - r_np - 1} (possibly empty); powers of
    two need two rows for p = 2, and n = 9 needs four rows for p = 3.
    Exceptional cases are detected structurally, never by magnitude.
    """
    info = residue_info(n, p)
    if p == 2 and _is_proper_power_of_two(n):
        rows: tuple[int, ...] = (1, 2)
        log.info("exceptional row set for n=%d, p=2: [1, 2]", n)
    elif n == 9 and p == 3:
        rows = (1, 2, 3, 4)
        log.info("exceptional row set for n=9, p=3: [1, 2, 3, 4]")
    else:
        rows = tuple(range(1, p - info.r_np))
    return RowSet(n=n, p=p, rows=rows)


def _sparse_row(n: int, p: int, r: int) -> dict[int, int]:
    """Nonzero entries of row (p, r): column j holds v_p(n+r-j) - v_p(n-j).

    Only j with p | n-j or p | n+r-j can be nonzero, so the row is
    assembled along the two residue classes instead of scanning all n
    columns.
    """
    row: dict[int, int] = {}
    r_np = n % p
    for j in range(r_np, n, p):
        row[j] = -_vp(n - j, p)
    for j in range((r_np + r) % p, n, p):
        v = row.get(j, 0) + _vp(n + r - j, p)
        if v:
            row[j] = v
        else:
            row.pop(j, None)
    return row


@dataclass
class PBlock:
    """All rows of the valuation matrix sharing one prime p."""

    n: int
    p: int
    row_indices: tuple[int, ...]
    sparse_rows: list[dict[int, int]] = field(repr=False)

    @property
    def row_labels(self) -> list[tuple[int, int]]:
        return [(self.p, r) for r in self.row_indices]

    @property
    def entries(self) -> list[list[int]]:
        """Dense |rows| x n matrix (materialized on demand)."""
        out = []
        for sparse in self.sparse_rows:
            dense = [0] * self.n
            for j, v in sparse.items():
                dense[j] = v
            out.append(dense)
        return out

    def row_sums(self) -> list[int]:
        return [sum(sparse.values()) for sparse in self.sparse_rows]


def build_p_block(n: int, p: int) -> PBlock:
    rs = row_set(n, p)
    return PBlock(
        n=n,
        p=p,
        row_indices=rs.rows,
        sparse_rows=[_sparse_row(n, p, r) for r in rs.rows],
    )


@dataclass
class ValuationMatrix:
    """Stacked p-blocks in ascending p; immutable once built."""

    n: int
    blocks: list[PBlock]

    @property
    def largest_prime(self) -> int:
        return self.blocks[-1].p

    @property
    def row_labels(self) -> list[tuple[int, int]]:
        return [label for b in self.blocks for label in b.row_labels]

    def iter_sparse_rows(self):
        for block in self.blocks:
            yield from block.sparse_rows

    def dense_rows(self) -> list[list[int]]:
        out = []
        for block in self.blocks:
            out.extend(block.entries)
        return out

    def row_sums(self) -> list[int]:
        return [s for b in self.blocks for s in b.row_sums()]

    def multiply_vector(self, vec) -> list:
        if len(vec) != self.n:
            raise UsageError(f"vector length {len(vec)} != {self.n}")
        return [
            sum(v * vec[j] for j, v in row.items()) for row in self.iter_sparse_rows()
        ]

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "blocks": [
                {
                    "p": b.p,
                    "rows": [
                        {"r": r, "entries": dense}
                        for r, dense in zip(b.row_indices, b.entries)
                    ],
                }
                for b in self.blocks
            ],
        }

    def to_csv(self) -> str:
        header = "p,r," + ",".join(f"j{j}" for j in range(self.n))
        lines = [header]
        for block in self.blocks:
            for r, dense in zip(block.row_indices, block.entries):
                lines.append(f"{block.p},{r}," + ",".join(str(v) for v in dense))
        return "\n".join(lines) + "\n"


def build_valuation_matrix(n: int) -> ValuationMatrix:
    if n < 2:
        raise UsageError("build_valuation_matrix requires n >= 2")
    blocks = [build_p_block(n, p) for p in primes.simple_primes(n)]
    bigp = blocks[-1].p
    if not bigp - 1 > n - bigp:
        # guaranteed by Bertrand's postulate; a failure means a bug
        raise RuntimeError(f"internal: column grouping violated for n={n} (P={bigp})")
    return ValuationMatrix(n=n, blocks=blocks)


# ---------------------------------------------------------------------------
# exact elimination


def _strip_content(row: dict[int, int]) -> None:
    """Divide out the gcd of the entries and make the leading one positive."""
    g = reduce(gcd, row.values())
    if row[min(row)] < 0:
        g = -g
    if g != 1:
        for j in row:
            row[j] //= g


def _reduce_row(row: dict[int, int], pivots: dict[int, dict[int, int]]) -> dict[int, int]:
    """Eliminate row against the pivot rows; returns the reduced row.

    Cross-multiplication keeps everything integral; content is stripped
    after each step so entries stay small.
    """
    while row:
        c = min(row)
        piv = pivots.get(c)
        if piv is None:
            _strip_content(row)
            return row
        a, b = piv[c], row[c]
        # row := a*row - b*piv, all integral
        if a != 1:
            for j in row:
                row[j] *= a
        for j, v in piv.items():
            w = row.get(j, 0) - b * v
            if w:
                row[j] = w
            else:
                row.pop(j, None)
        if row:
            _strip_content(row)
    return row


def _echelon(sparse_rows, stop_at: int | None = None):
    """Incremental echelon form; returns (rank, pivot dict col -> row).

    Pivot selection is the first nonzero column scanning left to right,
    rows are consumed in the order supplied.  With stop_at set the scan
    terminates once that many independent rows were found (only sound
    when the caller has an upper bound of the same value).
    """
    pivots: dict[int, dict[int, int]] = {}
    for row in sparse_rows:
        red = _reduce_row(dict(row), pivots)
        if red:
            pivots[min(red)] = red
            if stop_at is not None and len(pivots) >= stop_at:
                break
    return len(pivots), pivots


def _to_sparse_rows(rows: list[list[int]]) -> list[dict[int, int]]:
    return [{j: v for j, v in enumerate(r) if v} for r in rows]


def _normalize_to_integer(vec: list[Fraction]) -> list[int]:
    denom = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in vec), 1)
    ints = [int(x * denom) for x in vec]
    g = reduce(gcd, ints)
    lead = next(x for x in ints if x)
    if lead < 0:
        g = -g
    return [x // g for x in ints]


@dataclass
class RankResult:
    """Exact rank plus an integer kernel basis (content 1, leading entry
    positive, one vector per free column in ascending order)."""

    rank: int
    kernel_basis: list[list[int]]

    def kernel_dimension(self) -> int:
        return len(self.kernel_basis)


def exact_rank_and_kernel(matrix) -> RankResult:
    """Rank and kernel basis of an integer matrix, all exact.

    Accepts a ValuationMatrix or a nonempty list of equal-length integer
    rows.  Elimination is fraction-free over the rows in their natural
    order; each kernel vector is verified against the original matrix
    before returning.
    """
    if isinstance(matrix, ValuationMatrix):
        ncols = matrix.n
        sparse = list(matrix.iter_sparse_rows())
    else:
        rows = [list(r) for r in matrix]
        if not rows or not rows[0]:
            raise UsageError("matrix must be nonempty")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise UsageError("ragged matrix")
        sparse = _to_sparse_rows(rows)

    rank, pivots = _echelon(sparse)
    free_cols = [j for j in range(ncols) if j not in pivots]
    pivot_cols = sorted(pivots, reverse=True)

    basis = []
    for f in free_cols:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for c in pivot_cols:
            row = pivots[c]
            s = sum(Fraction(v) * x[j] for j, v in row.items() if j != c)
            x[c] = -s / row[c]
        basis.append(_normalize_to_integer(x))

    for vec in basis:
        bad = [i for i, row in enumerate(sparse) if sum(v * vec[j] for j, v in row.items())]
        if bad:
            raise RuntimeError(f"internal: kernel vector fails at rows {bad[:3]}")
    result = RankResult(rank=rank, kernel_basis=basis)
    if result.rank + len(result.kernel_basis) != ncols:
        raise RuntimeError("internal: rank-nullity violated")
    return result


# ---------------------------------------------------------------------------
# span dimensions and the rank theorem


def _rows_best_order(vm: ValuationMatrix):
    """Blocks in descending p: the P-block alone contributes 2P-n-1
    nearly-diagonal rows, which makes the echelon scan cheap."""
    for block in reversed(vm.blocks):
        yield from block.sparse_rows


def _column_span_rank(vm: ValuationMatrix, cols: set[int], stop_at: int | None) -> int:
    restricted = []
    for row in _rows_best_order(vm):
        sub = {j: v for j, v in row.items() if j in cols}
        if sub:
            restricted.append(sub)
    rank, _ = _echelon(restricted, stop_at=stop_at)
    return rank


def _span_mismatch(claim: str, n: int, expected: int, got: int) -> CounterexampleError:
    return CounterexampleError(
        f"{claim} of A_{n}: expected {expected}, computed {got}",
        report=WitnessReport(
            claim_id=claim,
            parameters={"n": n, "expected": expected, "computed": got},
            outcome="counterexample",
            values=[n],
            search_bound=n,
        ),
    )


def inner_span_dimension(n: int, vm: ValuationMatrix | None = None) -> int:
    """Rank of columns n-P+1 .. P-1; must equal 2P-n-1."""
    vm = vm if vm is not None else build_valuation_matrix(n)
    bigp = vm.largest_prime
    cols = set(range(n - bigp + 1, bigp))
    expected = 2 * bigp - n - 1
    got = _column_span_rank(vm, cols, stop_at=len(cols))
    if got != expected:
        raise _span_mismatch("inner_span_dimension", n, expected, got)
    return got


def outer_span_dimension(n: int, vm: ValuationMatrix | None = None) -> int:
    """Rank of columns {0..n-P-1} and {P..n-1}; must equal 2(n-P).

    For prime n the column set is empty and the dimension is 0.
    """
    vm = vm if vm is not None else build_valuation_matrix(n)
    bigp = vm.largest_prime
    cols = set(range(0, n - bigp)) | set(range(bigp, n))
    expected = 2 * (n - bigp)
    if not cols:
        return 0
    got = _column_span_rank(vm, cols, stop_at=len(cols))
    if got != expected:
        raise _span_mismatch("outer_span_dimension", n, expected, got)
    return got


def _rank_certified(vm: ValuationMatrix) -> bool:
    """Certify rank(A_n) = n-1.

    Row sums being zero puts the all-ones vector in the kernel, so the
    rank is at most n-1; finding n-1 independent rows is then an exact
    certificate.  The early stop is sound precisely because of that
    upper bound, which the caller has already checked.
    """
    n = vm.n
    rank, _ = _echelon(_rows_best_order(vm), stop_at=n - 1)
    return rank == n - 1


def verify_rank_theorem(n_lo: int, n_hi: int) -> WitnessReport:
    """Verify, for each n in [n_lo, n_hi]: all row sums are zero,
    rank(A_n) = n-1 (hence kernel = span of the all-ones vector), and
    for composite n the inner/outer span dimensions and their direct
    sum.  Small n are additionally cross-checked against the dense
    rank/kernel routine."""
    if not 2 <= n_lo <= n_hi:
        raise UsageError("need 2 <= n_lo <= n_hi")
    failures = []
    for n in range(n_lo, n_hi + 1):
        vm = build_valuation_matrix(n)
        if any(s != 0 for s in vm.row_sums()):
            failures.append(n)
            continue
        if not _rank_certified(vm):
            failures.append(n)
            continue
        bigp = vm.largest_prime
        if bigp != n:
            try:
                inner = inner_span_dimension(n, vm)
                outer = outer_span_dimension(n, vm)
            except CounterexampleError:
                failures.append(n)
                continue
            union_cols = set(range(n)) - {n - bigp}
            union = _column_span_rank(vm, union_cols, stop_at=n - 1)
            if inner + outer != n - 1 or union != n - 1:
                failures.append(n)
                continue
        if n <= 30:
            dense = exact_rank_and_kernel(vm)
            if dense.rank != n - 1 or dense.kernel_basis != [[1] * n]:
                failures.append(n)
    return WitnessReport(
        claim_id="rank_theorem",
        parameters={"n_lo": n_lo, "n_hi": n_hi},
        outcome="counterexample" if failures else "verified",
        values=failures,
        search_bound=n_hi,
    )


# ---------------------------------------------------------------------------
# p-block structure checks


def _admissible_span_range(n: int, p: int, bigp: int) -> range:
    r_np = n % p
    upper = min(n - bigp, (p + r_np - 1) // 2)
    return range(r_np + 1, upper + 1)


def p_block_structure_check(n: int, p: int, k: int | None = None) -> WitnessReport:
    """Entry-by-entry check of the block's left and right column pattern,
    plus the outer-span dimension 2(k - r_np) for admissible k.

    The left p columns of row r must vanish except -v at j = r_np and
    +v at j = r_np + r (v the p-adic valuation of n - r_np); the right
    p-1 columns must vanish except a 1 at j = n - p + r.  Pattern rows
    are restricted to r <= p - r_np - 1, so the two exceptional row
    sets are only checked on their plain prefix.  With k omitted, every
    admissible k is checked.
    """
    block = build_p_block(n, p)
    vm_bigp = primes.largest_prime_leq(n)
    r_np = n % p
    if k is not None and k not in _admissible_span_range(n, p, vm_bigp):
        raise UsageError(
            f"k={k} outside admissible range {list(_admissible_span_range(n, p, vm_bigp))}"
        )
    v = _vp(n - r_np, p)
    violations = []
    for r, row in zip(block.row_indices, block.sparse_rows):
        if r > p - r_np - 1:
            continue
        for j in range(0, p):
            expected = -v if j == r_np else (v if j == r_np + r else 0)
            if row.get(j, 0) != expected:
                violations.append((p, r, j))
        for j in range(n - p + 1, n):
            expected = 1 if j == n - p + r else 0
            if row.get(j, 0) != expected:
                violations.append((p, r, j))

    # zero outer columns below r_np, then the span dimensions
    zero_cols = set(range(0, r_np)) | set(range(n - r_np, n))
    for idx, row in enumerate(block.sparse_rows):
        for j in sorted(zero_cols):
            if row.get(j, 0) != 0:
                violations.append((p, block.row_indices[idx], j))
    ks = [k] if k is not None else list(_admissible_span_range(n, p, vm_bigp))
    for kk in ks:
        cols = set(range(r_np, kk)) | set(range(n - kk, n - r_np))
        restricted = [
            {j: w for j, w in row.items() if j in cols} for row in block.sparse_rows
        ]
        rank, _ = _echelon([r_ for r_ in restricted if r_])
        if rank != 2 * (kk - r_np):
            violations.append((p, -1, kk))

    params = {"n": n, "p": p}
    if k is not None:
        params["k"] = k
    return WitnessReport(
        claim_id="p_block_structure",
        parameters=params,
        outcome="counterexample" if violations else "verified",
        values=violations,
        search_bound=n,
    )


# ---------------------------------------------------------------------------
# diagnostics


def exceptional_rows_diagnostic(n: int) -> dict:
    """Rank of A_n with the exceptional row sets versus the plain formula.

    Only n = 2**s (s > 1) and n = 9 differ; the returned dict reports
    both ranks and row counts so the effect of the extra rows can be
    inspected.  Nothing here asserts the plain variant reaches n-1.
    """
    vm = build_valuation_matrix(n)
    rank_full, _ = _echelon(_rows_best_order(vm))

    plain_blocks = []
    for block in vm.blocks:
        p = block.p
        rows = tuple(range(1, p - n % p))
        plain_blocks.append(
            PBlock(n=n, p=p, row_indices=rows, sparse_rows=[_sparse_row(n, p, r) for r in rows])
        )
    plain = ValuationMatrix(n=n, blocks=plain_blocks)
    rank_plain, _ = _echelon(_rows_best_order(plain))
    return {
        "n": n,
        "rank_with_exceptional_rows": rank_full,
        "rank_with_plain_rows": rank_plain,
        "rows_with_exceptional": len(vm.row_labels),
        "rows_with_plain": len(plain.row_labels),
    }
