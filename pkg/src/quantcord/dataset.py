"""Column-oriented numeric datasets and CSV ingestion."""

import csv
from dataclasses import dataclass, field

import numpy as np

from .exceptions import IngestionError, InvalidArgumentError

MISSING_TOKENS = {"", "na", "nan", "null", "none"}


@dataclass(frozen=True)
class Dataset:
    """Named numeric columns of equal length.

    Binary indicator columns are stored as 0/1 floats like everything
    else; ingestion validates the declared ones.
    """

    columns: dict
    source: str = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        cols = {}
        n = None
        for name, values in self.columns.items():
            arr = np.asarray(values, dtype=float)
            if arr.ndim != 1:
                raise InvalidArgumentError(f"column {name!r} is not 1-d")
            if n is None:
                n = arr.shape[0]
            elif arr.shape[0] != n:
                raise InvalidArgumentError(
                    f"column {name!r} has length {arr.shape[0]}, expected {n}"
                )
            cols[name] = arr
        if not cols:
            raise InvalidArgumentError("dataset needs at least one column")
        object.__setattr__(self, "columns", cols)

    @property
    def n(self):
        return len(next(iter(self.columns.values())))

    @property
    def names(self):
        return tuple(self.columns)

    def column(self, name):
        try:
            return self.columns[name]
        except KeyError:
            raise InvalidArgumentError(
                f"column {name!r} not found; available: {list(self.columns)}"
            ) from None

    def take(self, indices):
        """Row subset / resample; pairs of responses and covariates
        always travel together because selection is by whole row."""
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(
            columns={k: v[idx] for k, v in self.columns.items()},
            source=self.source,
        )

    def __contains__(self, name):
        return name in self.columns


@dataclass(frozen=True)
class DropReport:
    """Rows removed during ingestion because a used cell was missing."""

    dropped_rows: tuple  # 1-based data row numbers (header excluded)
    n_kept: int

    @property
    def n_dropped(self):
        return len(self.dropped_rows)


def read_csv(path, columns=None, binary=()):
    """Parse a comma-separated file into a Dataset.

    Parameters
    ----------
    path : str
        CSV with a header row, period decimal mark, UTF-8.
    columns : sequence of str, optional
        The columns actually used; rows with missing cells in these
        columns are dropped (and reported), other columns are ignored.
        Default: all columns in the file.
    binary : sequence of str
        Columns that must contain only 0 and 1.

    Returns
    -------
    (Dataset, DropReport)
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        used = list(columns) if columns is not None else header
        missing_cols = [c for c in used if c not in header]
        if missing_cols:
            raise IngestionError(
                f"{path}: missing columns {missing_cols}; header has {header}"
            )
        for b in binary:
            if b not in used:
                raise IngestionError(
                    f"{path}: binary column {b!r} is not among the used columns"
                )
        col_idx = {c: header.index(c) for c in used}

        parsed = {c: [] for c in used}
        dropped = []
        for rownum, row in enumerate(reader, start=1):
            if not row or all(cell.strip() == "" for cell in row):
                continue
            values = {}
            has_missing = False
            for c, j in col_idx.items():
                cell = row[j].strip() if j < len(row) else ""
                if cell.lower() in MISSING_TOKENS:
                    has_missing = True
                    continue
                try:
                    values[c] = float(cell)
                except ValueError:
                    raise IngestionError(
                        f"{path}: cannot parse cell {cell!r} at data row "
                        f"{rownum}, column {c!r}"
                    ) from None
            if has_missing:
                dropped.append(rownum)
                continue
            for c in used:
                parsed[c].append(values[c])

    if not parsed[used[0]]:
        raise IngestionError(f"{path}: no usable data rows")

    for b in binary:
        arr = np.asarray(parsed[b])
        bad = np.nonzero(~np.isin(arr, (0.0, 1.0)))[0]
        if bad.size:
            kept_rownum = [r for r in range(1, len(arr) + len(dropped) + 1)
                           if r not in dropped]
            raise IngestionError(
                f"{path}: binary column {b!r} contains {float(arr[bad[0]])!r} "
                f"at data row {kept_rownum[bad[0]]}"
            )

    data = Dataset(
        columns={c: np.asarray(parsed[c]) for c in used},
        source=str(path),
        meta={"dropped_rows": tuple(dropped)},
    )
    return data, DropReport(dropped_rows=tuple(dropped), n_kept=data.n)


def write_csv(path, columns, float_format="%.17g"):
    """Write named columns to CSV deterministically (no timestamps)."""
    names = list(columns)
    arrays = [np.asarray(columns[c]) for c in names]
    n = len(arrays[0])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for i in range(n):
            writer.writerow([float_format % a[i] for a in arrays])
