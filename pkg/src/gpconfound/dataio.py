"""File formats: location and long-format data CSVs, run configs, run manifests.

Data CSV (long format), one row per observation::

    site_id,x,y,replicate_id,variable,value

Locations CSV::

    site_id,x,y

Both accept one-dimensional sites when the ``y`` column is omitted.
"""

import csv
import hashlib
import json
import os
import tempfile
from typing import Dict, List, Tuple

import numpy as np

from .errors import ConfigError, DataFormatError, DegenerateColumnError

try:  # Python >= 3.11
    import tomllib as _toml
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as _toml


def standardize_per_replicate(values) -> np.ndarray:
    """Standardize each column of an ``(n, R)`` array to mean 0, sample variance 1.

    Raises
    ------
    DegenerateColumnError
        If a column has fewer than two entries or zero variance.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    if v.shape[0] < 2:
        raise DegenerateColumnError("need at least two values per column")
    centred = v - v.mean(axis=0)
    sd = np.std(v, axis=0, ddof=1)
    bad = np.flatnonzero(~(sd > 1e-300))
    if bad.size:
        raise DegenerateColumnError(f"column {int(bad[0])} has zero variance")
    return centred / sd


def _open_csv(path):
    try:
        fh = open(path, newline="")
    except FileNotFoundError:
        raise DataFormatError(f"{path}: file not found") from None
    except OSError as exc:
        raise DataFormatError(f"{path}: {exc.strerror}") from None
    return fh


def _coords(header: List[str], path) -> List[str]:
    if "x" not in header:
        raise DataFormatError(f"{path}:1: missing column 'x'")
    return ["x", "y"] if "y" in header else ["x"]


def read_locations(path) -> Tuple[List[str], np.ndarray]:
    """Read ``site_id,x[,y]``; returns site ids and an ``(n, d)`` array."""
    with _open_csv(path) as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        if "site_id" not in header:
            raise DataFormatError(f"{path}:1: missing column 'site_id'")
        cols = _coords(header, path)
        ids, pts, seen = [], [], set()
        for rec in reader:
            line = reader.line_num
            sid = rec["site_id"]
            if sid in seen:
                raise DataFormatError(f"{path}:{line}: duplicate site_id {sid!r}")
            seen.add(sid)
            try:
                pts.append([float(rec[c]) for c in cols])
            except (TypeError, ValueError):
                raise DataFormatError(f"{path}:{line}: non-numeric coordinate") from None
            ids.append(sid)
    if not ids:
        raise DataFormatError(f"{path}: no sites")
    return ids, np.asarray(pts)


def read_long_data(path):
    """Read the long-format data CSV.

    Returns
    -------
    site_ids : list of str
        In order of first appearance.
    locations : np.ndarray
        ``(n_sites, d)``.
    replicate_ids : list of str
        Sorted (numerically when all ids are integers).
    variables : dict
        ``name -> (R, n_sites)`` arrays.
    """
    with _open_csv(path) as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in ("site_id", "replicate_id", "variable", "value"):
            if col not in header:
                raise DataFormatError(f"{path}:1: missing column {col!r}")
        cols = _coords(header, path)
        sites: Dict[str, Tuple[float, ...]] = {}
        cells = {}
        for rec in reader:
            line = reader.line_num
            try:
                coords = tuple(float(rec[c]) for c in cols)
                value = float(rec["value"])
            except (TypeError, ValueError):
                raise DataFormatError(f"{path}:{line}: non-numeric coordinate or value") from None
            sid = rec["site_id"]
            if sites.setdefault(sid, coords) != coords:
                raise DataFormatError(f"{path}:{line}: site {sid!r} has inconsistent coordinates")
            key = (rec["variable"], rec["replicate_id"], sid)
            if key in cells:
                raise DataFormatError(f"{path}:{line}: duplicate observation {key}")
            cells[key] = (value, line)
    if not cells:
        raise DataFormatError(f"{path}: no observations")
    site_ids = list(sites)
    names = sorted({k[0] for k in cells})
    reps = sorted({k[1] for k in cells}, key=lambda r: (0, int(r), "") if r.lstrip("-").isdigit() else (1, 0, r))
    out = {}
    for name in names:
        arr = np.full((len(reps), len(site_ids)), np.nan)
        for i, rep in enumerate(reps):
            for j, sid in enumerate(site_ids):
                cell = cells.get((name, rep, sid))
                if cell is None:
                    raise DataFormatError(f"{path}: missing value for variable {name!r}, replicate {rep!r}, site {sid!r}")
                arr[i, j] = cell[0]
        out[name] = arr
    return site_ids, np.asarray(list(sites.values())), reps, out


def write_long_data(path, locations, variables: Dict[str, np.ndarray], site_ids=None) -> None:
    """Inverse of :func:`read_long_data` (replicate ids ``0..R-1``)."""
    locs = np.asarray(locations, dtype=float)
    if locs.ndim == 1:
        locs = locs[:, None]
    site_ids = site_ids or [str(i) for i in range(locs.shape[0])]
    coord_cols = ["x", "y"][: locs.shape[1]]
    rows = []
    for name, values in variables.items():
        values = np.atleast_2d(values)
        for r in range(values.shape[0]):
            for j, sid in enumerate(site_ids):
                rows.append([sid, *map(repr, map(float, locs[j])), r, name, repr(float(values[r, j]))])
    atomic_write_csv(path, ["site_id", *coord_cols, "replicate_id", "variable", "value"], rows)


def atomic_write_csv(path, header, rows) -> None:
    path = os.fspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)), prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_config(path) -> dict:
    """Parse a TOML-syntax run configuration (``key = value``, ``[section]`` headers)."""
    try:
        with open(path, "rb") as fh:
            return _toml.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"{path}: config file not found") from None
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def config_digest(config: dict) -> str:
    """SHA-256 of the canonical JSON form; insensitive to key order and whitespace."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode()).hexdigest()


def write_manifest(path, manifest: dict) -> None:
    path = os.fspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)), prefix=".tmp-", suffix=".json")
    with os.fdopen(fd, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)
