"""Citation samples, subfield aggregates, and descriptive statistics.

A :class:`CitationSample` is the unit every fitting routine operates on: a
labelled, immutable multiset of per-paper citation counts.  Aggregates carry
the per-subfield paper/citation totals split by collaboration class that the
scaling regressions consume.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

__all__ = [
    "CitationSample",
    "SubfieldAggregate",
    "SummaryStats",
    "PartitionShares",
    "summarize",
    "partition_shares",
    "read_counts",
    "write_counts",
    "read_aggregates",
    "write_aggregates",
    "AGGREGATE_COLUMNS",
]

AGGREGATE_COLUMNS = (
    "subfield",
    "field",
    "papers_total",
    "papers_collab",
    "papers_single",
    "citations_total",
    "citations_collab",
    "citations_single",
)


class CitationSample:
    """Immutable, ascending-sorted collection of nonnegative citation counts.

    Counts of zero are kept: they never enter a power-law tail but they do
    contribute to corpus shares and medians.
    """

    __slots__ = ("_label", "_counts")

    def __init__(self, counts: Iterable[int], label: str = ""):
        arr = np.asarray(list(counts) if not isinstance(counts, np.ndarray) else counts)
        if arr.size == 0:
            raise ValueError("empty dataset")
        if not np.issubdtype(arr.dtype, np.integer):
            if not np.all(np.equal(np.mod(arr, 1), 0)):
                raise ValueError("citation counts must be integers")
            arr = arr.astype(np.int64)
        else:
            arr = arr.astype(np.int64)
        if arr.min() < 0:
            raise ValueError("citation counts must be nonnegative")
        arr = np.sort(arr)
        arr.setflags(write=False)
        self._label = str(label)
        self._counts = arr

    @property
    def label(self) -> str:
        return self._label

    @property
    def counts(self) -> np.ndarray:
        """Sorted, read-only view of the counts."""
        return self._counts

    def __len__(self) -> int:
        return int(self._counts.size)

    def __iter__(self):
        return iter(self._counts.tolist())

    def __repr__(self) -> str:
        return f"CitationSample(label={self._label!r}, n={len(self)})"

    @property
    def n_citations(self) -> int:
        return int(self._counts.sum())

    def tail(self, x_min: int) -> np.ndarray:
        """Counts at or above ``x_min`` (read-only)."""
        return self._counts[self._counts >= x_min]

    def relabel(self, label: str) -> "CitationSample":
        out = CitationSample.__new__(CitationSample)
        out._label = str(label)
        out._counts = self._counts
        return out


@dataclass(frozen=True, slots=True)
class SubfieldAggregate:
    """Per-subfield paper and citation totals split by collaboration class."""

    subfield_id: str
    field_id: str
    papers_total: int
    papers_collab: int
    papers_single: int
    citations_total: int
    citations_collab: int
    citations_single: int

    def __post_init__(self):
        for name in ("papers_total", "papers_collab", "papers_single",
                     "citations_total", "citations_collab", "citations_single"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.papers_total != self.papers_collab + self.papers_single:
            raise ValueError("papers_total must equal papers_collab + papers_single")
        if self.citations_total != self.citations_collab + self.citations_single:
            raise ValueError("citations_total must equal citations_collab + citations_single")


@dataclass(frozen=True, slots=True)
class SummaryStats:
    """Descriptive statistics for one partition of a corpus.

    ``share_papers``/``share_citations`` are fractions of the corpus totals
    handed to :func:`summarize`; they default to 1 when no totals are given.
    """

    n_papers: int
    n_citations: int
    share_papers: float
    share_citations: float
    median_citations: float


class PartitionShares(NamedTuple):
    share_collab: float
    share_single: float
    ratio: float | None


def summarize(sample: CitationSample,
              total_papers: int | None = None,
              total_citations: int | None = None) -> SummaryStats:
    """Summary statistics for a sample, optionally as a share of corpus totals.

    The median of an even-sized sample is the mean of the two central order
    statistics.
    """
    n = len(sample)
    if n == 0:
        raise ValueError("empty dataset")
    cites = sample.n_citations
    tp = n if total_papers is None else int(total_papers)
    tc = cites if total_citations is None else int(total_citations)
    if tp < n or tc < cites:
        raise ValueError("corpus totals smaller than the sample itself")
    return SummaryStats(
        n_papers=n,
        n_citations=cites,
        share_papers=n / tp if tp else 0.0,
        share_citations=cites / tc if tc else 0.0,
        median_citations=float(statistics.median(sample.counts.tolist())),
    )


def partition_shares(collab: SummaryStats, single: SummaryStats) -> PartitionShares:
    """Citation shares of the two-way partition and their ratio.

    The ratio is collaborative citations over single-authored citations; it
    is ``None`` (undefined) when the single partition has no citations.
    """
    total = collab.n_citations + single.n_citations
    if total == 0:
        return PartitionShares(0.0, 0.0, None)
    ratio = collab.n_citations / single.n_citations if single.n_citations else None
    return PartitionShares(collab.n_citations / total, single.n_citations / total, ratio)


def read_counts(path: str | Path, label: str | None = None) -> CitationSample:
    """Read the one-count-per-line plain-text format.

    Blank lines and lines starting with ``#`` are ignored; both LF and CRLF
    endings are accepted.
    """
    path = Path(path)
    values: list[int] = []
    with open(path, "r", encoding="utf-8", newline=None) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                value = int(line)
            except ValueError:
                raise ValueError(f"{path.name}:{lineno}: not a base-10 integer: {line!r}") from None
            if value < 0:
                raise ValueError(f"{path.name}:{lineno}: negative count {value}")
            values.append(value)
    if not values:
        raise ValueError("empty dataset")
    return CitationSample(values, label=label if label is not None else path.stem)


def write_counts(path: str | Path, counts: Iterable[int],
                 header: Iterable[str] = ()) -> None:
    """Write counts one per line; header lines are emitted as ``#`` comments."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        for value in counts:
            fh.write(f"{int(value)}\n")


def read_aggregates(path: str | Path) -> list[SubfieldAggregate]:
    """Read the tab-separated subfield aggregate table."""
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline=None) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise ValueError("empty aggregate table")
    header = tuple(lines[0].split("\t"))
    if header != AGGREGATE_COLUMNS:
        raise ValueError(f"bad aggregate header: expected {list(AGGREGATE_COLUMNS)}, got {list(header)}")
    out = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != len(AGGREGATE_COLUMNS):
            raise ValueError(f"{path.name}:{lineno}: expected {len(AGGREGATE_COLUMNS)} columns")
        try:
            numbers = [int(p) for p in parts[2:]]
        except ValueError:
            raise ValueError(f"{path.name}:{lineno}: non-integer aggregate value") from None
        out.append(SubfieldAggregate(parts[0], parts[1], *numbers))
    return out


def write_aggregates(path: str | Path, aggregates: Iterable[SubfieldAggregate]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(AGGREGATE_COLUMNS) + "\n")
        for agg in aggregates:
            fh.write("\t".join(str(v) for v in (
                agg.subfield_id, agg.field_id,
                agg.papers_total, agg.papers_collab, agg.papers_single,
                agg.citations_total, agg.citations_collab, agg.citations_single)) + "\n")
