"""Set partitions of ancestral lineages {1, ..., n}."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator, Sequence

from ..errors import UsageError

_BLOCK_RE = re.compile(r"\{([^{}]*)\}")


@dataclass(frozen=True)
class MergerSpec:
    """Outcome of one merger step: j new blocks made of k_1, ..., k_j old blocks."""

    j: int
    group_sizes: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.group_sizes)

    def __str__(self) -> str:
        return f"{self.j}:{','.join(str(k) for k in self.group_sizes)}"


@dataclass(frozen=True)
class Partition:
    """Blocks kept sorted internally and ordered by least element."""

    blocks: tuple[tuple[int, ...], ...]
    n: int

    def __post_init__(self):
        canonical = tuple(sorted((tuple(sorted(b)) for b in self.blocks), key=lambda b: b[0] if b else 0))
        flat = [i for b in canonical for i in b]
        if any(not b for b in canonical):
            raise UsageError("partition blocks must be non-empty")
        if sorted(flat) != list(range(1, self.n + 1)):
            raise UsageError(f"blocks {canonical} do not partition {{1..{self.n}}}")
        object.__setattr__(self, "blocks", canonical)

    @classmethod
    def singletons(cls, n: int) -> Partition:
        if n < 1:
            raise UsageError(f"sample size must be >= 1, got {n}")
        return cls(tuple((i,) for i in range(1, n + 1)), n)

    @classmethod
    def from_string(cls, text: str) -> Partition:
        """Parse the "{1,3}{2}" form."""
        blocks = []
        for body in _BLOCK_RE.findall(text):
            try:
                blocks.append(tuple(int(tok) for tok in body.split(",") if tok.strip()))
            except ValueError as exc:
                raise UsageError(f"malformed partition {text!r}") from exc
        if not blocks or _BLOCK_RE.sub("", text).strip():
            raise UsageError(f"malformed partition {text!r}")
        n = sum(len(b) for b in blocks)
        return cls(tuple(blocks), n)

    def __str__(self) -> str:
        return "".join("{" + ",".join(str(i) for i in b) + "}" for b in self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def block_of(self) -> dict[int, int]:
        return {i: idx for idx, b in enumerate(self.blocks) for i in b}


def merge_by_parent(pi: Partition, labels: Sequence[int]) -> Partition:
    """Union the blocks of pi that received the same parent label."""
    if len(labels) != len(pi.blocks):
        raise UsageError(f"expected {len(pi.blocks)} parent labels, got {len(labels)}")
    groups: dict[int, list[int]] = {}
    for block, label in zip(pi.blocks, labels):
        groups.setdefault(int(label), []).extend(block)
    return Partition(tuple(tuple(g) for g in groups.values()), pi.n)


def is_coarsening(pi: Partition, pi_next: Partition) -> bool:
    if pi.n != pi_next.n:
        raise UsageError(f"partitions of different sizes: {pi.n} and {pi_next.n}")
    owner = pi_next.block_of()
    return all(len({owner[i] for i in block}) == 1 for block in pi.blocks)


def merger_spec(pi: Partition, pi_next: Partition) -> MergerSpec:
    if not is_coarsening(pi, pi_next):
        raise UsageError(f"{pi_next} is not a coarsening of {pi}")
    owner = pi_next.block_of()
    counts = [0] * len(pi_next.blocks)
    for block in pi.blocks:
        counts[owner[block[0]]] += 1
    return MergerSpec(len(counts), tuple(counts))


def enumerate_partitions(n: int) -> Iterator[Partition]:
    """All set partitions of {1..n}; Bell(n) of them."""
    if n < 1:
        raise UsageError(f"n must be >= 1, got {n}")
    for blocks in _set_partitions(list(range(1, n + 1))):
        yield Partition(tuple(tuple(b) for b in blocks), n)


def _set_partitions(items: list[int]) -> Iterator[list[list[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for smaller in _set_partitions(rest):
        yield [[first]] + smaller
        for idx in range(len(smaller)):
            yield smaller[:idx] + [[first] + smaller[idx]] + smaller[idx + 1 :]


def bell_number(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for value in row:
            nxt.append(nxt[-1] + value)
        row = nxt
    return row[0]


def index_partitions(j: int) -> list[tuple[tuple[int, ...], ...]]:
    """Set partitions of the positions 0..j-1, used for Möbius inversion."""
    return [tuple(tuple(i - 1 for i in b) for b in p.blocks) for p in enumerate_partitions(j)]


def mobius_weight(blocks: Sequence[Sequence[int]]) -> int:
    """Π (-1)^{|B|-1} (|B|-1)! over the blocks."""
    weight = 1
    for block in blocks:
        size = len(block)
        weight *= (-1) ** (size - 1) * math.factorial(size - 1)
    return weight


def partition_count(group_sizes: Sequence[int]) -> int:
    """Number of set partitions of {1..b} with block sizes group_sizes: b!/(Πk_i! Πm_r!)."""
    b = sum(group_sizes)
    count = math.factorial(b)
    for k in group_sizes:
        count //= math.factorial(k)
    multiplicities: dict[int, int] = {}
    for k in group_sizes:
        multiplicities[k] = multiplicities.get(k, 0) + 1
    for m in multiplicities.values():
        count //= math.factorial(m)
    return count
