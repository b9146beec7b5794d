"""Quantile-based loss truncation for training on noisy references.

A training loop feeds per-example losses through this filter; examples
whose loss lands above a running quantile estimate get dropped instead of
contributing a gradient step. The quantile is the exact nearest-rank
(1 - drop_frac) quantile of a bounded window of recent losses, so the
long-run dropped fraction converges to drop_frac on i.i.d. streams.

The decision for an example is made before its own loss enters the window,
so no example can shift its own threshold.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left, insort
from collections import deque
from dataclasses import dataclass
from pathlib import Path

from sklearn.base import BaseEstimator

DEFAULT_WINDOW = 4096
DEFAULT_WARMUP = 500
DEFAULT_DROP_FRAC = 0.3


class LossTruncation(BaseEstimator):
    """Streaming keep/drop classifier over a loss sequence.

    drop_frac=0 never drops. During warmup (steps_seen <= warmup) every
    example is kept while the window fills. Afterwards an example is
    dropped iff its loss strictly exceeds the nearest-rank quantile
    (the ceil(q*m)-th smallest of the m buffered losses, q = 1 - drop_frac).
    """

    def __init__(
        self,
        drop_frac: float = DEFAULT_DROP_FRAC,
        window: int = DEFAULT_WINDOW,
        warmup: int = DEFAULT_WARMUP,
    ):
        if not 0.0 <= drop_frac < 1.0:
            raise ValueError(f"drop_frac must be in [0, 1): {drop_frac}")
        if window < 1:
            raise ValueError("window capacity must be >= 1")
        if warmup < 0:
            raise ValueError("warmup must be >= 0")
        self.drop_frac = drop_frac
        self.window = window
        self.warmup = warmup
        self._buffer: deque[float] = deque()  # arrival order, for eviction
        self._sorted: list[float] = []  # same multiset, kept sorted
        self.steps_seen = 0

    @staticmethod
    def _check_loss(loss: float) -> float:
        loss = float(loss)
        if math.isnan(loss) or math.isinf(loss):
            raise ValueError(f"loss must be finite: {loss}")
        if loss < 0:
            raise ValueError(f"loss must be non-negative: {loss}")
        return loss

    def observe(self, loss: float) -> "LossTruncation":
        """Append a loss to the window (evicting the oldest past capacity)."""
        loss = self._check_loss(loss)
        if len(self._buffer) == self.window:
            oldest = self._buffer.popleft()
            del self._sorted[bisect_left(self._sorted, oldest)]
        self._buffer.append(loss)
        insort(self._sorted, loss)
        self.steps_seen += 1
        return self

    def threshold(self) -> float:
        """Current nearest-rank (1 - drop_frac) quantile of the window."""
        if not self._sorted:
            raise ValueError("no losses observed yet")
        rank = math.ceil((1.0 - self.drop_frac) * len(self._sorted))
        return self._sorted[max(rank, 1) - 1]

    def should_drop(self, loss: float) -> bool:
        loss = self._check_loss(loss)
        if not self._buffer:
            raise ValueError("no losses observed yet")
        if self.drop_frac == 0.0 or self.steps_seen <= self.warmup:
            return False
        return loss > self.threshold()


@dataclass
class TruncationReport:
    total: int
    dropped: int
    post_warmup: int
    post_warmup_dropped: int

    @property
    def post_warmup_fraction(self) -> float:
        return self.post_warmup_dropped / self.post_warmup if self.post_warmup else 0.0

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "dropped": self.dropped,
            "post_warmup": self.post_warmup,
            "post_warmup_dropped": self.post_warmup_dropped,
            "post_warmup_fraction": self.post_warmup_fraction,
        }


def truncate_stream(
    in_path: str | Path,
    out_path: str | Path,
    drop_frac: float = DEFAULT_DROP_FRAC,
    window: int = DEFAULT_WINDOW,
    warmup: int = DEFAULT_WARMUP,
) -> TruncationReport:
    """Classify a JSONL loss stream ({"id", "loss"}) into keep/drop decisions.

    Writes one {"id", "loss", "dropped"} record per input line, in order.
    Decisions use decide-then-observe: the first loss is never droppable
    (nothing is buffered yet), matching the streaming class semantics.
    """
    in_path = Path(in_path)
    out_path = Path(out_path)
    state = LossTruncation(drop_frac=drop_frac, window=window, warmup=warmup)
    report = TruncationReport(total=0, dropped=0, post_warmup=0, post_warmup_dropped=0)
    with in_path.open(encoding="utf-8") as src, out_path.open(
        "w", encoding="utf-8"
    ) as dst:
        for line_no, line in enumerate(src, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                ident = str(record["id"])
                loss = float(record["loss"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{in_path}: line {line_no}: {exc}") from exc
            dropped = state.steps_seen > 0 and state.should_drop(loss)
            state.observe(loss)
            report.total += 1
            report.dropped += int(dropped)
            if state.steps_seen > state.warmup + 1:
                # This decision was made post-warmup (threshold active).
                report.post_warmup += 1
                report.post_warmup_dropped += int(dropped)
            dst.write(
                json.dumps({"id": ident, "loss": loss, "dropped": dropped}) + "\n"
            )
    return report
