"""
Candidate-model families and the greedy general-to-specific block search
"""

import logging
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple, overload

import pandas as pd

from .errors import (
    ConfigError,
    DomainError,
    EmptyFamilyError,
    MissingCriterionError,
    ModelFitError,
    MspeLabError,
    OrderTooLargeError,
    TooManyBlocksError,
)
from .models import CriterionKind, CriterionRecord, ModelMask
from .parallel import ordered_map
from .regression import Dataset, FitResult, fit_restricted_ls

logger = logging.getLogger(__name__)

MAX_EXHAUSTIVE_BLOCKS = 20


@dataclass(frozen=True)
class BlockPartition:
    """Disjoint blocks of column indices whose union is [0, p_active)"""

    blocks: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        blocks = tuple(tuple(sorted(int(j) for j in block)) for block in self.blocks)
        if any(len(block) == 0 for block in blocks):
            raise DomainError("Blocks must be non-empty")
        flat = [j for block in blocks for j in block]
        if len(set(flat)) != len(flat):
            raise DomainError("Blocks must be pairwise disjoint")
        if sorted(flat) != list(range(len(flat))):
            raise DomainError(
                f"Blocks must cover the indices 0..{len(flat) - 1} without gaps"
            )
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def consecutive(cls, p_active: int, block_size: int) -> "BlockPartition":
        """p_active / block_size consecutive blocks of equal length"""
        if block_size < 1 or p_active % block_size != 0:
            raise DomainError(
                f"block_size={block_size} must divide p_active={p_active}"
            )
        starts = range(0, p_active, block_size)
        return cls(blocks=tuple(tuple(range(s, s + block_size)) for s in starts))

    @classmethod
    def parse(cls, spec: str) -> "BlockPartition":
        """
        Parse a block specification such as ``0-1;2-3;4,5``

        Blocks are separated by ``;``; each block lists indices and inclusive
        ranges separated by ``,``.

        Raises:
            ConfigError: when the text is malformed or the blocks are not a partition
        """
        blocks: List[Tuple[int, ...]] = []
        try:
            for chunk in spec.split(";"):
                indices: List[int] = []
                for part in chunk.split(","):
                    part = part.strip()
                    if "-" in part:
                        lo, hi = part.split("-", 1)
                        indices.extend(range(int(lo), int(hi) + 1))
                    elif part:
                        indices.append(int(part))
                blocks.append(tuple(indices))
            return cls(blocks=tuple(blocks))
        except ValueError as e:
            raise ConfigError(f"Invalid block specification {spec!r}: {e}")

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    @property
    def p_active(self) -> int:
        return sum(len(block) for block in self.blocks)

    def union(self, block_ids: Sequence[int], p: int) -> ModelMask:
        """Mask made of the given whole blocks"""
        included = tuple(j for b in block_ids for j in self.blocks[b])
        return ModelMask(included=included, p=p)


@dataclass(frozen=True)
class GreedyStep:
    mask: ModelMask
    rss: float
    eliminated_block: Optional[int] = None


@dataclass(frozen=True)
class GreedyPath:
    """Masks from the full-blocks model down to the empty model"""

    steps: Tuple[GreedyStep, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def masks(self) -> List[ModelMask]:
        return [step.mask for step in self.steps]

    def increasing(self) -> List[ModelMask]:
        """Path masks from the empty model up to the full one"""
        return self.masks[::-1]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "step": range(len(self.steps)),
                "eliminated_block": pd.array(
                    [s.eliminated_block for s in self.steps], dtype="Int64"
                ),
                "order": [s.mask.order for s in self.steps],
                "rss": [s.rss for s in self.steps],
            }
        )


def leading_term_family(p_max: int, p: Optional[int] = None) -> List[ModelMask]:
    """
    The nested masks {0..k-1} for k = 0..p_max

    Args:
        p_max: Largest order in the family
        p: Number of candidate regressors (defaults to p_max)
    """
    if p_max < 0:
        raise DomainError(f"p_max must be >= 0, got {p_max}")
    total = p_max if p is None else p
    return [ModelMask.leading(k, total) for k in range(p_max + 1)]


class BlockFamily(Sequence[ModelMask]):
    """
    All unions of whole blocks, in binary-counter order

    Index i includes block j exactly when bit j of i is set. Masks are built
    on access, so len() is cheap even for 2^20 models.
    """

    def __init__(self, partition: BlockPartition, p: Optional[int] = None) -> None:
        if partition.n_blocks > MAX_EXHAUSTIVE_BLOCKS:
            raise TooManyBlocksError(
                f"Exhaustive enumeration of {partition.n_blocks} blocks exceeds "
                f"the limit of {MAX_EXHAUSTIVE_BLOCKS}"
            )
        self.partition = partition
        self.p = partition.p_active if p is None else p

    def __len__(self) -> int:
        return 1 << self.partition.n_blocks

    @overload
    def __getitem__(self, index: int) -> ModelMask: ...

    @overload
    def __getitem__(self, index: slice) -> List[ModelMask]: ...

    def __getitem__(self, index):  # type: ignore[no-untyped-def]
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        if index < 0:
            index += len(self)
        if not 0 <= index < len(self):
            raise IndexError(index)
        chosen = [b for b in range(self.partition.n_blocks) if index >> b & 1]
        return self.partition.union(chosen, self.p)

    def __iter__(self) -> Iterator[ModelMask]:
        for i in range(len(self)):
            yield self[i]


def exhaustive_block_family(
    partition: BlockPartition, p: Optional[int] = None
) -> BlockFamily:
    """
    Lazy family of all 2^#blocks block unions

    Raises:
        TooManyBlocksError: beyond 20 blocks
    """
    return BlockFamily(partition, p)


def greedy_block_elimination(
    data: Dataset, partition: BlockPartition, max_workers: Optional[int] = None
) -> GreedyPath:
    """
    Backward elimination of whole blocks

    Starting from the union of all blocks, each step refits every candidate
    removal and drops the block whose removal gives the smallest rss. Exact
    ties go to the lowest block index.

    Raises:
        OrderTooLargeError: when the full-blocks model has order >= n - 1
        ModelFitError: wrapping a fit failure, tagged with the step
    """
    if partition.p_active > data.p:
        raise DomainError(
            f"Blocks cover {partition.p_active} columns, dataset has {data.p}"
        )

    surviving = list(range(partition.n_blocks))
    full = partition.union(surviving, data.p)
    if full.order >= data.n - 1:
        raise OrderTooLargeError(full.order, data.n)

    def fit_at(step: int, mask: ModelMask) -> FitResult:
        try:
            return fit_restricted_ls(data, mask)
        except MspeLabError as e:
            raise ModelFitError(
                f"Greedy step {step} failed: {e}", mask=mask, step=step
            ) from e

    current = fit_at(0, full)
    steps = [GreedyStep(mask=current.mask, rss=current.rss)]
    step = 0
    while surviving:
        step += 1
        candidates = [current.mask.without(partition.blocks[b]) for b in surviving]
        fits = ordered_map(lambda m: fit_at(step, m), candidates, max_workers)
        # Candidates are in ascending block order; min keeps the lowest index on ties
        best = min(range(len(surviving)), key=lambda i: (fits[i].rss, surviving[i]))
        block = surviving.pop(best)
        current = fits[best]
        steps.append(
            GreedyStep(mask=current.mask, rss=current.rss, eliminated_block=block)
        )
        logger.debug(
            "Greedy step %d: eliminated block %d, rss=%.6g", step, block, current.rss
        )

    return GreedyPath(steps=tuple(steps))


def block_inclusion_order(path: GreedyPath) -> List[int]:
    """Blocks ordered by how long the path keeps them (last eliminated first)"""
    eliminated = [
        s.eliminated_block for s in path.steps if s.eliminated_block is not None
    ]
    return eliminated[::-1]


def select_best(records: Sequence[CriterionRecord], kind: CriterionKind) -> ModelMask:
    """
    Mask minimizing the criterion over the family

    Ties go to the smaller order, then to the lexicographically smaller mask.

    Raises:
        EmptyFamilyError: when records is empty
        MissingCriterionError: when a record lacks the criterion
    """
    if not records:
        raise EmptyFamilyError("Cannot select from an empty family")
    for record in records:
        if kind not in record.values:
            raise MissingCriterionError(
                f"Criterion {kind.value} is missing for the model of order {record.k}"
            )
    best = min(records, key=lambda r: (r.values[kind], r.mask.sort_key()))
    return best.mask
