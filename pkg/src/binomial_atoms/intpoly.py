"""Candidate factors of powers of the binomial polynomial.

Any factorization C(x,n)^m = f*g in Int(Z) forces, up to sign,
f = prod((x-i)/(n-i))**k_i with 0 <= k_i <= m and g the complementary
product, so factor candidates are exponent vectors.  This module
evaluates candidates exactly, decides Int(Z) membership, enumerates
all factorization pairs either by brute force over the whole exponent
lattice or through the kernel of the valuation matrix, and combines
both routes into an irreducibility verdict.

Membership in Int(Z) is decided by the finite-difference criterion: a
rational polynomial of degree d is integer-valued iff its values at
0, 1, ..., d are integers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from . import valmatrix
from .errors import ResourceLimitError, UsageError

log = logging.getLogger(__name__)

DEFAULT_CANDIDATE_BUDGET = 2 * 10**6


@dataclass(frozen=True)
class ExponentVector:
    """Exponents (k_0, ..., k_{n-1}) of a candidate prod((x-i)/(n-i))**k_i."""

    n: int
    k: tuple[int, ...]

    def __post_init__(self):
        if self.n < 2:
            raise UsageError("ExponentVector requires n >= 2")
        if len(self.k) != self.n:
            raise UsageError(f"expected {self.n} exponents, got {len(self.k)}")
        if any(x < 0 for x in self.k):
            raise UsageError("exponents must be non-negative")
        object.__setattr__(self, "k", tuple(self.k))

    @property
    def degree(self) -> int:
        return sum(self.k)

    def is_constant(self) -> bool:
        return len(set(self.k)) == 1

    def complement(self, m: int) -> "ExponentVector":
        if any(x > m for x in self.k):
            raise UsageError(f"exponents exceed m={m}")
        return ExponentVector(self.n, tuple(m - x for x in self.k))


@dataclass(frozen=True)
class FactorizationPair:
    """Unordered pair of complementary candidates with k_i + l_i = m."""

    k: ExponentVector
    l: ExponentVector
    m: int

    def __post_init__(self):
        if self.k.n != self.l.n:
            raise UsageError("mismatched n")
        if any(a + b != self.m for a, b in zip(self.k.k, self.l.k)):
            raise UsageError("exponents do not sum to m")

    def is_trivial(self) -> bool:
        return self.k.is_constant()

    def to_json_dict(self) -> dict:
        return {"k": list(self.k.k), "l": list(self.l.k)}


def evaluate_candidate(v: ExponentVector, s: int) -> Fraction:
    """Exact value prod(((s-i)/(n-i))**k_i) at the integer s."""
    num = 1
    den = 1
    for i, e in enumerate(v.k):
        if not e:
            continue
        num *= (s - i) ** e
        den *= (v.n - i) ** e
    return Fraction(num, den)


def is_integer_valued(v: ExponentVector) -> bool:
    """Whether the candidate lies in Int(Z).

    Checks the exact values at s = 0..degree; the first non-integer
    value rejects immediately.  Values at s < n with k_s > 0 are zero
    and are skipped.
    """
    den = 1
    for i, e in enumerate(v.k):
        if e:
            den *= (v.n - i) ** e
    for s in range(v.degree + 1):
        if s < v.n and v.k[s]:
            continue
        num = 1
        for i, e in enumerate(v.k):
            if e:
                num *= (s - i) ** e
        if num % den:
            return False
    return True


def _check_budget(n: int, m: int, budget: int) -> None:
    total = (m + 1) ** n
    if total > budget:
        raise ResourceLimitError(
            f"enumeration of {total} = ({m}+1)^{n} candidates exceeds budget {budget}",
            bound=budget,
        )


def enumerate_factorizations_oracle(
    n: int, m: int, budget: int = DEFAULT_CANDIDATE_BUDGET
) -> list[FactorizationPair]:
    """Brute-force search of the whole exponent lattice {0..m}^n.

    Keeps the unordered pairs (k, m-k) where both members are
    integer-valued; each pair is reported once with k <= m-k
    lexicographically, pairs in lexicographic order of k.
    """
    if n < 2 or m < 1:
        raise UsageError("need n >= 2 and m >= 1")
    _check_budget(n, m, budget)
    pairs = []
    for k in product(range(m + 1), repeat=n):
        l = tuple(m - x for x in k)
        if k > l:
            continue
        vk = ExponentVector(n, k)
        if not is_integer_valued(vk):
            continue
        vl = ExponentVector(n, l)
        if not is_integer_valued(vl):
            continue
        pairs.append(FactorizationPair(k=vk, l=vl, m=m))
    return pairs


def enumerate_factorizations_kernel(
    n: int,
    m: int,
    matrix: valmatrix.ValuationMatrix | None = None,
    rank_result: valmatrix.RankResult | None = None,
    budget: int = DEFAULT_CANDIDATE_BUDGET,
) -> list[FactorizationPair]:
    """Factorization pairs via the valuation matrix kernel.

    Exponent vectors of integer-valued complementary factors lie in
    ker(A_n); with rank n-1 the kernel is the line of constant vectors,
    so only c*(1,...,1) for 0 <= c <= m need testing.  Every survivor
    is still re-verified by the membership test.  Should the kernel
    ever have dimension > 1, the search falls back to the full lattice
    restricted to kernel members and flags the anomaly.
    """
    if n < 2 or m < 1:
        raise UsageError("need n >= 2 and m >= 1")
    vm = matrix if matrix is not None else valmatrix.build_valuation_matrix(n)
    rr = rank_result if rank_result is not None else valmatrix.exact_rank_and_kernel(vm)
    if rr.rank == n - 1:
        candidates = [tuple([c] * n) for c in range(m + 1)]
    else:
        log.warning(
            "kernel of A_%d has dimension %d > 1; falling back to lattice scan",
            n,
            rr.kernel_dimension(),
        )
        _check_budget(n, m, budget)
        candidates = [
            k
            for k in product(range(m + 1), repeat=n)
            if all(s == 0 for s in vm.multiply_vector(list(k)))
        ]
    pairs = []
    for k in candidates:
        l = tuple(m - x for x in k)
        if k > l:
            continue
        vk = ExponentVector(n, k)
        vl = ExponentVector(n, l)
        if is_integer_valued(vk) and is_integer_valued(vl):
            pairs.append(FactorizationPair(k=vk, l=vl, m=m))
    return pairs


@dataclass
class IrreducibilityVerdict:
    """Outcome of checking C(x,n)^m for nontrivial factorizations up to m_max."""

    n: int
    m_max: int
    status: str
    method: str
    pairs: list[FactorizationPair] = field(default_factory=list)
    counterexample: FactorizationPair | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.counterexample is None

    def to_json_dict(self) -> dict:
        out = {
            "n": self.n,
            "m_max": self.m_max,
            "status": self.status,
            "method": self.method,
            "pairs": [p.to_json_dict() for p in self.pairs],
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample.to_json_dict()
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def verify_absolute_irreducibility(
    n: int, m_max: int, budget: int = DEFAULT_CANDIDATE_BUDGET
) -> IrreducibilityVerdict:
    """Check that every factorization of C(x,n)^m, m <= m_max, is trivial.

    Uses the kernel route for every m and cross-checks with the brute
    force route whenever (m+1)^n fits the budget.  A nontrivial pair is
    re-verified by direct evaluation before it is reported.
    """
    if n < 2 or m_max < 2:
        raise UsageError("need n >= 2 and m_max >= 2")
    vm = valmatrix.build_valuation_matrix(n)
    rr = valmatrix.exact_rank_and_kernel(vm)
    notes = []
    if rr.rank != n - 1:
        notes.append(f"anomaly: rank(A_{n}) = {rr.rank} != {n - 1}")
    all_pairs = []
    oracle_everywhere = True
    for m in range(1, m_max + 1):
        kernel_pairs = enumerate_factorizations_kernel(
            n, m, matrix=vm, rank_result=rr, budget=budget
        )
        if (m + 1) ** n <= budget:
            oracle_pairs = enumerate_factorizations_oracle(n, m, budget=budget)
            if [p.to_json_dict() for p in oracle_pairs] != [
                p.to_json_dict() for p in kernel_pairs
            ]:
                raise RuntimeError(
                    f"internal: oracle and kernel enumerations disagree for n={n}, m={m}"
                )
        else:
            oracle_everywhere = False
        for pair in kernel_pairs:
            if not pair.is_trivial():
                if is_integer_valued(pair.k) and is_integer_valued(pair.l):
                    return IrreducibilityVerdict(
                        n=n,
                        m_max=m_max,
                        status="counterexample",
                        method="both" if oracle_everywhere else "kernel",
                        pairs=all_pairs,
                        counterexample=pair,
                        notes=notes,
                    )
        all_pairs.extend(kernel_pairs)
    return IrreducibilityVerdict(
        n=n,
        m_max=m_max,
        status=f"absolutely_irreducible_up_to({m_max})",
        method="both" if oracle_everywhere else "kernel",
        pairs=all_pairs,
        notes=notes,
    )
