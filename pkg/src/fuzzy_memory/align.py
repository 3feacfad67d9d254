from typing import Callable, List, Optional, Sequence, Tuple

from .models import AlignOp, Alignment

KEEP = "keep"
SUBSTITUTE = "substitute"
DELETE = "delete"
INSERT = "insert"


def _equal(a: str, b: str) -> bool:
    return a == b


def align(
    original: Sequence[str],
    corrected: Sequence[str],
    same: Optional[Callable[[str, str], bool]] = None,
) -> Alignment:
    """
    Minimum-cost alignment under unit costs. Among optimal alignments the walk
    prefers keep, then substitute, then delete, then insert, so the earliest
    possible keep is always taken.
    """
    same = same or _equal
    n, m = len(original), len(corrected)

    # cost[i][j]: cheapest way to turn original[i:] into corrected[j:]
    cost = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n, -1, -1):
        for j in range(m, -1, -1):
            if i == n:
                cost[i][j] = m - j
            elif j == m:
                cost[i][j] = n - i
            else:
                diagonal = cost[i + 1][j + 1] + (0 if same(original[i], corrected[j]) else 1)
                cost[i][j] = min(diagonal, cost[i + 1][j] + 1, cost[i][j + 1] + 1)

    ops: List[AlignOp] = []
    i = j = 0
    while i < n or j < m:
        here = cost[i][j]
        if i < n and j < m:
            if same(original[i], corrected[j]) and here == cost[i + 1][j + 1]:
                ops.append(AlignOp(KEEP, i, j))
                i, j = i + 1, j + 1
                continue
            if here == cost[i + 1][j + 1] + 1:
                ops.append(AlignOp(SUBSTITUTE, i, j))
                i, j = i + 1, j + 1
                continue
        if i < n and here == cost[i + 1][j] + 1:
            ops.append(AlignOp(DELETE, i, None))
            i += 1
            continue
        ops.append(AlignOp(INSERT, None, j))
        j += 1

    return Alignment(tuple(ops), cost[0][0])


def replay(
    alignment: Alignment, original: Sequence[str], corrected: Sequence[str]
) -> List[str]:
    out: List[str] = []
    for op in alignment.ops:
        if op.kind == KEEP:
            out.append(original[op.i])
        elif op.kind in (SUBSTITUTE, INSERT):
            out.append(corrected[op.j])
    return out


def edit_blocks(alignment: Alignment) -> List[Tuple[int, int]]:
    """Maximal [start, end) runs of non-keep ops, as indices into alignment.ops."""
    blocks = []
    start: Optional[int] = None
    for idx, op in enumerate(alignment.ops):
        if op.kind != KEEP and start is None:
            start = idx
        elif op.kind == KEEP and start is not None:
            blocks.append((start, idx))
            start = None
    if start is not None:
        blocks.append((start, len(alignment.ops)))
    return blocks


def positions(alignment: Alignment) -> List[Tuple[int, int]]:
    """(original index, corrected index) reached before each op."""
    out = []
    i = j = 0
    for op in alignment.ops:
        out.append((i, j))
        if op.kind != INSERT:
            i += 1
        if op.kind != DELETE:
            j += 1
    return out


def revised_region(
    alignment: Alignment, ops: Optional[Sequence[int]] = None
) -> Optional[Tuple[int, int]]:
    """
    Minimal [start, end) span of the corrected tokens covering every insert
    and substitute among `ops` (all ops by default). Deletion-only edits give
    an empty span at the point of deletion; no edit at all gives None.
    """
    selected = range(len(alignment.ops)) if ops is None else ops
    starts = positions(alignment)
    touched = []
    deleted_at: Optional[int] = None
    for idx in selected:
        op = alignment.ops[idx]
        if op.kind in (INSERT, SUBSTITUTE):
            touched.append(op.j)
        elif op.kind == DELETE and deleted_at is None:
            deleted_at = starts[idx][1]
    if touched:
        return min(touched), max(touched) + 1
    if deleted_at is not None:
        return deleted_at, deleted_at
    return None


def edit_ratio(alignment: Alignment, original_len: int, corrected_len: int) -> float:
    longest = max(original_len, corrected_len)
    return alignment.cost / longest if longest else 0.0
