"""Result tables: Monte Carlo aggregation and CSV round-trip."""

import csv
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from ..errors import DataFormatError

CSV_COLUMNS = ("n", "key", "mean_beta", "band_lo", "band_hi", "rmse", "failures")


@dataclass
class TableRow:
    """One cell of an experiment table.

    ``band_lo``/``band_hi`` is a 95% Monte Carlo band for the mean (or a
    Wald interval when the cell holds a single fit). ``values`` keeps the
    per-replicate estimates and is not written to CSV.
    """

    n: int
    key: str
    mean_beta: float
    band_lo: float
    band_hi: float
    rmse: float = math.nan
    failures: int = 0
    values: Tuple[float, ...] = field(default=(), repr=False, compare=False)

    @property
    def width(self) -> float:
        return self.band_hi - self.band_lo


def mc_row(n: int, key: str, values: Iterable[float], failures: int = 0, rmse: float = math.nan) -> TableRow:
    """Aggregate replicate estimates into mean and ``mean +- 1.96 sd / sqrt(R)``."""
    vals = np.asarray([v for v in values], dtype=float)
    if vals.size == 0:
        return TableRow(n, key, math.nan, math.nan, math.nan, rmse, failures, ())
    mean = float(np.mean(vals))
    half = 1.96 * float(np.std(vals, ddof=1)) / math.sqrt(vals.size) if vals.size > 1 else 0.0
    return TableRow(n, key, mean, mean - half, mean + half, rmse, failures, tuple(vals.tolist()))


@dataclass
class ExperimentTable:
    """Rows keyed by ``(n, key)``; ``key`` names a model or a smoothness value."""

    rows: List[TableRow] = field(default_factory=list)
    title: str = ""

    def get(self, n: int, key: str) -> TableRow:
        for row in self.rows:
            if row.n == n and row.key == key:
                return row
        raise KeyError((n, key))

    def keys(self) -> List[str]:
        seen: Dict[str, None] = {}
        for row in self.rows:
            seen.setdefault(row.key, None)
        return list(seen)

    def n_values(self) -> List[int]:
        return sorted({row.n for row in self.rows})

    def column(self, key: str, attr: str = "mean_beta") -> np.ndarray:
        """Values of ``attr`` for ``key`` ordered by increasing ``n``."""
        return np.array([getattr(self.get(n, key), attr) for n in self.n_values()])

    def to_csv(self, path) -> None:
        """Write atomically (temp file + rename), floats with 17 significant digits."""
        path = os.fspath(path)
        directory = os.path.dirname(os.path.abspath(path))
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(CSV_COLUMNS)
                for r in self.rows:
                    writer.writerow([r.n, r.key, _fmt(r.mean_beta), _fmt(r.band_lo), _fmt(r.band_hi), _fmt(r.rmse), r.failures])
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def from_csv(cls, path, title: str = "") -> "ExperimentTable":
        rows = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if tuple(header or ()) != CSV_COLUMNS:
                raise DataFormatError(f"{path}:1: expected header {','.join(CSV_COLUMNS)}")
            for lineno, rec in enumerate(reader, start=2):
                try:
                    n, key, mean, lo, hi, rm, fail = rec
                    rows.append(TableRow(int(n), key, float(mean), float(lo), float(hi), float(rm), int(fail)))
                except ValueError as exc:
                    raise DataFormatError(f"{path}:{lineno}: {exc}") from None
        return cls(rows, title)


def _fmt(x: Optional[float]) -> str:
    return "nan" if x is None or not np.isfinite(x) else repr(float(x))
