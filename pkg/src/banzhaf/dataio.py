"""Binary datasets: CSV ingestion, the SPECT files, and binarization helpers."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import urllib.request
import zipfile
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from banzhaf.errors import ArgumentError, DataParseError
from banzhaf.game import matrix_to_masks

SPECT_FILES = ("SPECT.train", "SPECT.test")
DATA_DIR_ENV = "BANZHAF_DATA_DIR"


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.uint8)
        y = np.asarray(self.y, dtype=np.uint8).reshape(-1)
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise ArgumentError(f"feature matrix {X.shape} does not match {y.shape[0]} labels")
        if len(self.feature_names) != X.shape[1]:
            raise ArgumentError("one feature name per column is required")
        if np.any(X > 1) or np.any(y > 1):
            raise ArgumentError("dataset cells and labels must be 0 or 1")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n(self) -> int:
        return self.X.shape[1]

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def masks(self) -> np.ndarray:
        return matrix_to_masks(self.X)

    def subset(self, rows: Sequence[int] | np.ndarray) -> Dataset:
        rows = np.asarray(rows, dtype=np.intp)
        return Dataset(self.X[rows], self.y[rows], self.feature_names)

    def concat(self, other: Dataset) -> Dataset:
        if other.feature_names != self.feature_names:
            raise ArgumentError("cannot concatenate datasets with different features")
        return Dataset(np.vstack([self.X, other.X]), np.concatenate([self.y, other.y]), self.feature_names)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Dataset)
            and self.feature_names == other.feature_names
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
        )


def default_feature_names(n: int) -> tuple[str, ...]:
    return tuple(f"f{j + 1}" for j in range(n))


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def parse_csv(text: str, label_column: str | int = "first", header: str = "auto", source: str = "<csv>") -> Dataset:
    """Parse CSV text into a :class:`Dataset`.

    ``label_column`` is ``"first"``, ``"last"``, a column name (needs a header)
    or a 0-based column index. ``header`` is ``"auto"``, ``"yes"`` or ``"no"``;
    auto treats the first row as a header when any cell is non-numeric.
    """
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise DataParseError(f"{source}: file is empty")
    rows = [[c.strip() for c in r] for r in rows]
    if header not in ("auto", "yes", "no"):
        raise ArgumentError(f"header must be auto, yes or no, got {header!r}")
    has_header = header == "yes" or (header == "auto" and not all(_is_number(c) for c in rows[0]))
    names = rows[0] if has_header else None
    body = rows[1:] if has_header else rows
    if not body:
        raise DataParseError(f"{source}: no data rows")
    width = len(rows[0])
    for r, row in enumerate(body):
        if len(row) != width:
            line = r + 1 + has_header
            raise DataParseError(f"{source}: row {line} has {len(row)} cells, expected {width}")

    if label_column == "first":
        label_idx = 0
    elif label_column == "last":
        label_idx = width - 1
    elif isinstance(label_column, int) or str(label_column).isdigit():
        label_idx = int(label_column)
    else:
        if names is None or label_column not in names:
            raise DataParseError(f"{source}: label column {label_column!r} not found in header")
        label_idx = names.index(label_column)
    if not 0 <= label_idx < width:
        raise DataParseError(f"{source}: label column index {label_idx} out of range")
    if width < 2:
        raise DataParseError(f"{source}: need a label column and at least one feature")

    cells = np.zeros((len(body), width), dtype=np.uint8)
    for r, row in enumerate(body):
        for c, cell in enumerate(row):
            if cell not in ("0", "1"):
                line = r + 1 + has_header
                raise DataParseError(f"{source}: row {line}, column {c + 1}: expected 0 or 1, got {cell!r}")
            cells[r, c] = cell == "1"
    feature_cols = [c for c in range(width) if c != label_idx]
    feature_names = (
        tuple(names[c] for c in feature_cols) if names is not None else default_feature_names(len(feature_cols))
    )
    return Dataset(cells[:, feature_cols], cells[:, label_idx], feature_names)


def load_csv(path: str | Path, label_column: str | int = "first", header: str = "auto") -> Dataset:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_csv(text, label_column, header, source=str(path))


def write_csv(data: Dataset, path: str | Path, header: bool = True) -> None:
    """Write label-first CSV; with ``header`` the label column is named ``label``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(["label", *data.feature_names])
    for x, y in zip(data.X, data.y):
        writer.writerow([int(y), *(int(v) for v in x)])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def train_test_split(data: Dataset, train_count: int, test_count: int, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded uniform shuffle, then the first ``train_count`` rows train."""
    if train_count < 1 or test_count < 0 or train_count + test_count != len(data):
        raise ArgumentError(
            f"split {train_count}/{test_count} does not add up to the {len(data)} rows of the dataset"
        )
    order = np.random.default_rng(seed).permutation(len(data))
    return data.subset(order[:train_count]), data.subset(order[train_count:])


def quantize(values: Sequence[float], thresholds: Sequence[float]) -> np.ndarray:
    """One-hot bucket membership; a value equal to a threshold goes to the upper bucket."""
    t = np.asarray(thresholds, dtype=np.float64)
    if t.ndim != 1 or np.any(np.diff(t) <= 0):
        raise ArgumentError("thresholds must be strictly ascending")
    v = np.asarray(values, dtype=np.float64)
    buckets = np.searchsorted(t, v, side="right")
    out = np.zeros((v.size, t.size + 1), dtype=np.uint8)
    out[np.arange(v.size), buckets] = 1
    return out


def one_hot(values: Sequence, name: str = "x") -> tuple[np.ndarray, list[str]]:
    """One column per observed category in sorted order, named ``name=category``."""
    values = list(values)
    if not values:
        raise ArgumentError("cannot one-hot encode an empty column")
    categories = sorted(set(values), key=str)
    index = {c: j for j, c in enumerate(categories)}
    out = np.zeros((len(values), len(categories)), dtype=np.uint8)
    out[np.arange(len(values)), [index[v] for v in values]] = 1
    return out, [f"{name}={c}" for c in categories]


# SPECT -------------------------------------------------------------------


def spect_manifest() -> dict:
    return json.loads(resources.files("banzhaf").joinpath("resources/spect_manifest.json").read_text())


def default_data_dir() -> Path:
    env = os.environ.get(DATA_DIR_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "banzhaf" / "spect"


def canonical_text(raw: bytes) -> bytes:
    return raw.replace(b"\r\n", b"\n").rstrip() + b"\n"


def sha256(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def _download(url: str, timeout: float) -> bytes:
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        return resp.read()


def _from_urls(source: dict, timeout: float) -> dict[str, bytes]:
    return {name: _download(url, timeout) for name, url in source["files"].items()}


def _from_wheel(source: dict, timeout: float) -> dict[str, bytes]:
    meta = json.loads(_download(f"https://pypi.org/pypi/{source['package']}/json", timeout))
    url = next(u["url"] for u in meta["releases"][source["version"]] if u["filename"] == source["filename"])
    wheel = _download(url, timeout)
    if sha256(wheel) != source["sha256"]:
        raise DataParseError(f"{source['filename']}: checksum mismatch")
    with zipfile.ZipFile(io.BytesIO(wheel)) as zf:
        return {name: zf.read(member) for name, member in source["files"].items()}


def fetch_spect(dest: str | Path | None = None, timeout: float = 60.0, log=print) -> Path:
    """Download the SPECT files into ``dest`` and verify their pinned checksums.

    Sources from the bundled manifest are tried in order. Files already present
    with the right checksum are kept.
    """
    manifest = spect_manifest()
    dest = Path(dest) if dest is not None else default_data_dir()
    if spect_available(dest):
        log(f"SPECT already present in {dest}")
        return dest
    errors = []
    for source in manifest["sources"]:
        try:
            files = _from_urls(source, timeout) if source["kind"] == "url" else _from_wheel(source, timeout)
        except Exception as exc:  # network failures of any kind fall through to the next source
            errors.append(f"{source['kind']}: {exc}")
            log(f"source {source['kind']} failed: {exc}")
            continue
        texts = {name: canonical_text(raw) for name, raw in files.items()}
        bad = [n for n, t in texts.items() if sha256(t) != manifest["files"][n]["sha256"]]
        if bad:
            errors.append(f"{source['kind']}: checksum mismatch for {', '.join(bad)}")
            continue
        dest.mkdir(parents=True, exist_ok=True)
        for name, text in texts.items():
            (dest / name).write_bytes(text)
        (dest / "manifest.json").write_text(
            json.dumps(
                {
                    "path": str(dest),
                    "files": {n: {"sha256": sha256(t)} for n, t in texts.items()},
                    "schema": manifest["schema"],
                    "source": source["kind"],
                },
                indent=2,
            )
            + "\n"
        )
        log(f"SPECT written to {dest} (source: {source['kind']})")
        return dest
    raise DataParseError("could not fetch SPECT: " + "; ".join(errors))


def spect_available(path: str | Path | None = None) -> bool:
    path = Path(path) if path is not None else default_data_dir()
    manifest = spect_manifest()
    for name in SPECT_FILES:
        f = path / name
        if not f.is_file() or sha256(canonical_text(f.read_bytes())) != manifest["files"][name]["sha256"]:
            return False
    return True


def load_spect(path: str | Path | None = None, part: str = "all") -> Dataset:
    """Load SPECT; ``part`` is ``"train"`` (80 rows), ``"test"`` (187) or ``"all"`` (267)."""
    path = Path(path) if path is not None else default_data_dir()
    if not spect_available(path):
        raise DataParseError(f"SPECT files missing or corrupt in {path}; run `banzhaf data fetch-spect`")
    train = load_csv(path / "SPECT.train", "first", "no")
    test = load_csv(path / "SPECT.test", "first", "no")
    if part == "train":
        return train
    if part == "test":
        return test
    if part == "all":
        return train.concat(test)
    raise ArgumentError(f"unknown SPECT part {part!r}")
