"""Balanced multiway number partitioning.

Greedy partitioning (largest numbers first, each further number to the set
with the smallest running sum), its recurrent variant that enforces exactly
``k_B`` numbers per set, and brute-force oracles for small instances.
"""

import heapq
import itertools
import logging
from collections.abc import Sequence

import numpy as np

from qredist_sdk.exceptions import (
    InstanceTooLargeError,
    IterationCapExceededError,
    NotRectangularError,
    TooFewNumbersError,
)
from qredist_sdk.models import Partition, PartitionInput, PartitionObjective
from qredist_sdk.states import shannon_entropy

logger = logging.getLogger(__name__)

BALANCED_LIMIT = 16
MULTIWAY_LIMIT = 12
TIE_TOL = 1e-12


def _greedy(numbers: Sequence[float], k: int) -> list[list[float]]:
    ordered = sorted(numbers, reverse=True)
    sets: list[list[float]] = [[x] for x in ordered[:k]]
    # (running sum, set index); equal sums resolve to the lowest index
    heap = [(x, i) for i, x in enumerate(ordered[:k])]
    heapq.heapify(heap)
    for x in ordered[k:]:
        total, i = heapq.heappop(heap)
        sets[i].append(x)
        heapq.heappush(heap, (total + x, i))
    for s in sets:
        s.sort(reverse=True)
    return sets


def gnp(partition_input: PartitionInput) -> Partition:
    """Greedy number partitioning into ``k`` sets.

    Args:
        partition_input: Numbers and set count; ``per_set`` is ignored

    Returns:
        Partition whose sets are each sorted descending

    Raises:
        TooFewNumbersError: If there are fewer numbers than sets

    Example:
        >>> gnp(PartitionInput(numbers=[8, 7, 6, 5, 4], k=2)).sets
        [(8.0, 5.0, 4.0), (7.0, 6.0)]
    """
    if len(partition_input.numbers) < partition_input.k:
        raise TooFewNumbersError(
            f"Cannot split {len(partition_input.numbers)} numbers into {partition_input.k} sets"
        )
    return Partition(sets=[tuple(s) for s in _greedy(partition_input.numbers, partition_input.k)])


def _check_rectangular(partition_input: PartitionInput) -> int:
    if partition_input.per_set is None or not partition_input.is_rectangular:
        raise NotRectangularError(
            f"{len(partition_input.numbers)} numbers cannot fill {partition_input.k} sets "
            f"of {partition_input.per_set}"
        )
    return partition_input.per_set


def rgnp(partition_input: PartitionInput, max_iterations: int | None = None) -> Partition:
    """Recurrent greedy partitioning into ``k`` sets of exactly ``per_set`` numbers.

    Each round greedily partitions the pool of unplaced numbers into as many
    sets as are still missing. Sets of the right size are kept, oversized sets
    keep their ``per_set`` largest numbers and return the rest to the pool, and
    undersized sets return everything. The loop ends when a round produces no
    oversized set. When every set that is not the right size is off by exactly
    one element, the cut numbers go straight to the undersized sets instead of
    another round.

    Args:
        partition_input: Numbers with ``per_set`` set and ``len == k * per_set``
        max_iterations: Round cap, defaults to ``10 * k``

    Returns:
        Partition ordered by descending set sum

    Raises:
        NotRectangularError: If the count is not ``k * per_set``
        IterationCapExceededError: If the round cap is hit
    """
    k_b = _check_rectangular(partition_input)
    cap = 10 * partition_input.k if max_iterations is None else max_iterations
    done: list[list[float]] = []
    todo = list(partition_input.numbers)
    missing = partition_input.k

    for iteration in range(1, cap + 1):
        cut: list[float] = []
        under: list[list[float]] = []
        oversized = 0
        offset_only = True
        for s in _greedy(todo, missing):
            if len(s) == k_b:
                done.append(s)
                continue
            offset_only = offset_only and abs(len(s) - k_b) == 1
            if len(s) > k_b:
                done.append(s[:k_b])
                cut.extend(s[k_b:])
                oversized += 1
            else:
                under.append(s)
        logger.debug(
            "rgnp round %d: %d kept, %d oversized, %d undersized",
            iteration,
            len(done),
            oversized,
            len(under),
        )

        if oversized == 0:
            break
        if offset_only and len(cut) == len(under):
            for x in sorted(cut, reverse=True):
                min((s for s in under if len(s) < k_b), key=sum).append(x)
            done.extend(sorted(s, reverse=True) for s in under)
            break
        todo = cut + [x for s in under for x in s]
        missing = len(under)
    else:
        raise IterationCapExceededError(f"rgnp did not finish within {cap} rounds")

    done.sort(key=sum, reverse=True)
    return Partition(sets=[tuple(s) for s in done])


def _score(sums: Sequence[float], objective: PartitionObjective) -> float:
    if objective is PartitionObjective.MIN_MAX_SUM:
        return -max(sums)
    if objective is PartitionObjective.MAX_MIN_SUM:
        return min(sums)
    return shannon_entropy(np.asarray(sums) / sum(sums)) if sum(sums) > 0 else 0.0


def exhaustive_balanced(
    partition_input: PartitionInput,
    objective: PartitionObjective = PartitionObjective.MAX_ENTROPY_OF_SUMS,
) -> Partition:
    """Best grouping of the numbers into ``k`` unordered groups of ``per_set``.

    Ties within 1e-12 go to the lexicographically smallest descending vector of
    group sums.

    Raises:
        NotRectangularError: If the count is not ``k * per_set``
        InstanceTooLargeError: If there are more than 16 numbers
    """
    k_b = _check_rectangular(partition_input)
    numbers = sorted(partition_input.numbers, reverse=True)
    if len(numbers) > BALANCED_LIMIT:
        raise InstanceTooLargeError(f"{len(numbers)} numbers exceed the limit of {BALANCED_LIMIT}")

    best: tuple[float, list[float], list[tuple[int, ...]]] | None = None

    def visit(remaining: tuple[int, ...], groups: list[tuple[int, ...]]) -> None:
        nonlocal best
        if not remaining:
            sums = sorted((sum(numbers[i] for i in g) for g in groups), reverse=True)
            score = _score(sums, objective)
            if (
                best is None
                or score > best[0] + TIE_TOL
                or (abs(score - best[0]) <= TIE_TOL and sums < best[1])
            ):
                best = (score, sums, list(groups))
            return
        head, rest = remaining[0], remaining[1:]
        for partners in itertools.combinations(rest, k_b - 1):
            taken = set(partners)
            visit(
                tuple(i for i in rest if i not in taken),
                [*groups, (head, *partners)],
            )

    visit(tuple(range(len(numbers))), [])
    assert best is not None
    groups = sorted(
        (tuple(numbers[i] for i in g) for g in best[2]), key=lambda s: (-sum(s), [-x for x in s])
    )
    return Partition(sets=groups)


def exhaustive_multiway(
    numbers: Sequence[float],
    k: int,
    objective: PartitionObjective = PartitionObjective.MIN_MAX_SUM,
) -> Partition:
    """Best split of ``numbers`` into ``k`` sets of any size (brute force over k**n).

    Raises:
        TooFewNumbersError: If there are fewer numbers than sets
        InstanceTooLargeError: If there are more than 12 numbers
    """
    values = np.sort(np.asarray(numbers, dtype=np.float64))[::-1]
    n = values.shape[0]
    if n < k:
        raise TooFewNumbersError(f"Cannot split {n} numbers into {k} sets")
    if n > MULTIWAY_LIMIT:
        raise InstanceTooLargeError(f"{n} numbers exceed the limit of {MULTIWAY_LIMIT}")

    # The largest number is pinned to set 0; the tail is tabulated, the head looped.
    tail = min(n - 1, 8)
    head = n - 1 - tail
    tail_labels = np.array(list(itertools.product(range(k), repeat=tail)), dtype=np.int8)
    tail_labels = tail_labels.reshape(k**tail, tail)
    rows = np.arange(tail_labels.shape[0])
    tail_sums = np.zeros((tail_labels.shape[0], k))
    for j in range(tail):
        tail_sums[rows, tail_labels[:, j]] += values[1 + head + j]

    best_score = -np.inf
    best_labels: list[int] = []
    for head_labels in itertools.product(range(k), repeat=head):
        offset = np.zeros(k)
        offset[0] += values[0]
        for j, label in enumerate(head_labels):
            offset[label] += values[1 + j]
        sums = tail_sums + offset
        if objective is PartitionObjective.MIN_MAX_SUM:
            scores = -sums.max(axis=1)
        elif objective is PartitionObjective.MAX_MIN_SUM:
            scores = sums.min(axis=1)
        else:
            p = sums / (values.sum() or 1.0)
            safe = np.where(p > 0, p, 1.0)
            scores = -np.sum(np.where(p > 0, p * np.log2(safe), 0.0), axis=1)
        idx = int(np.argmax(scores))
        if scores[idx] > best_score + TIE_TOL:
            best_score = float(scores[idx])
            best_labels = [0, *head_labels, *tail_labels[idx].tolist()]

    sets: list[list[float]] = [[] for _ in range(k)]
    for value, label in zip(values.tolist(), best_labels, strict=True):
        sets[label].append(value)
    return Partition(sets=[tuple(s) for s in sets])
