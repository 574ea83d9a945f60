#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""Feature matrices"""

import csv
import math
import logging
from typing import Any, Dict, Iterable, List, Sequence, Text, TextIO, Tuple

import numpy as np
from pydantic import validator

from jot_sdk.measures import UnitaryMeasure
from jot_sdk.special import RngStream
from jot_sdk.util import BaseModel

logger = logging.getLogger(__name__)

Column = Tuple[int, Tuple[int, ...]]


class FeatureMatrix(BaseModel):
    """
    Sparse binary object×feature matrix:
        columns are (column id, sorted 0-based row indices), never empty
    """

    n_rows: int

    columns: List[Column] = []

    @validator("columns")
    def non_empty(cls, columns, values):
        n_rows = values.get("n_rows", 0)
        result = []
        seen = set()
        for col_id, rows in columns:
            rows = tuple(sorted(int(_) for _ in rows))
            if not rows:
                raise ValueError(f"column {col_id} is empty")
            if rows[0] < 0 or rows[-1] >= n_rows or len(set(rows)) != len(rows):
                raise ValueError(f"column {col_id} has rows outside 0..{n_rows - 1}")
            if int(col_id) in seen:
                raise ValueError(f"column id {col_id} is repeated")
            seen.add(int(col_id))
            result.append((int(col_id), rows))
        return result

    @classmethod
    def from_dense(cls, dense) -> "FeatureMatrix":
        """From a 0/1 array (rows × columns), all-zero columns dropped"""
        dense = np.asarray(dense)
        return cls(
            n_rows=dense.shape[0],
            columns=[
                (k, tuple(np.flatnonzero(dense[:, k])))
                for k in range(dense.shape[1])
                if dense[:, k].any()
            ],
        )

    @classmethod
    def from_rows(cls, rows: Sequence[Iterable[int]]) -> "FeatureMatrix":
        """From per-row feature ids (as emitted by the urn schemes)"""
        members: Dict[int, List[int]] = {}
        for i, row in enumerate(rows):
            for feature in row:
                members.setdefault(int(feature), []).append(i)
        return cls(
            n_rows=len(rows),
            columns=[(k, tuple(v)) for k, v in sorted(members.items())],
        )

    @property
    def K(self) -> int:
        return len(self.columns)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n_rows, self.K), dtype=np.uint8)
        for k, (_, rows) in enumerate(self.columns):
            dense[list(rows), k] = 1
        return dense

    def to_csv(self, stream: TextIO):
        """Dense 0/1 matrix with a header row of column ids"""
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow([col_id for col_id, _ in self.columns])
        writer.writerows(self.to_dense().tolist())


class MatrixStats(BaseModel):
    """K_n, column counts n_k, row and column sums"""

    K_n: int

    counts: List[int]

    row_sums: List[int]

    col_sums: List[int]

    def to_json(self) -> Dict[Text, Any]:
        return self.dict()


def _column_ids(atoms: np.ndarray) -> List[int]:
    # Distinct integer labels name their columns, anything else is named by position
    atoms = np.asarray(atoms)
    if atoms.size and np.issubdtype(atoms.dtype, np.number):
        labels = atoms.astype(float)
        if np.all(labels == np.round(labels)) and len(np.unique(labels)) == labels.size:
            return [int(_) for _ in labels]
    return list(range(atoms.size))


def sample_bernoulli_matrix(m: UnitaryMeasure, n: int, rng: RngStream) -> FeatureMatrix:
    """
    Rows Z_i ~ BeP(m): entry (i, k) is Bernoulli(J_k), all independent

        Per column: n_k ~ Binomial(n, J_k), then a uniform n_k-subset of rows.

    :param m:
    :param n:   number of rows, n >= 1
    :param rng:
    :return:
    """
    if n < 1:
        raise ValueError(f"n={n!r}: at least one row")

    counts = rng.generator.binomial(n, m.weights) if len(m.weights) else np.empty(0, int)
    ids = _column_ids(m.atoms)
    columns = [
        (ids[k], tuple(sorted(rng.generator.choice(n, int(count), replace=False))))
        for k, count in enumerate(counts)
        if count
    ]
    logger.debug("Sampled %s non-empty columns out of %s weights", len(columns), len(counts))
    return FeatureMatrix(n_rows=n, columns=columns)


def _canonical_key(rows: Tuple[int, ...], n_rows: int) -> Tuple[int, ...]:
    # Ascending row tuples with a sentinel sort binary strings descending
    return rows + (n_rows,)


def canonicalize(z: FeatureMatrix) -> FeatureMatrix:
    """
    Left-ordered form: columns sorted by their membership read top-down as a
    binary number, descending, and relabeled 0..K-1

    :param z:
    :return:
    """
    ordered = sorted((rows for _, rows in z.columns), key=lambda r: _canonical_key(r, z.n_rows))
    return FeatureMatrix(n_rows=z.n_rows, columns=list(enumerate(ordered)))


def equivalent(a: FeatureMatrix, b: FeatureMatrix) -> bool:
    """Same equivalence class: equal up to a column permutation"""
    return canonicalize(a) == canonicalize(b)


def stats(z: FeatureMatrix) -> MatrixStats:
    """
    Column counts n_k, K_n and row/column sums

    :param z:
    :return:
    """
    counts = [len(rows) for _, rows in z.columns]
    row_sums = np.zeros(z.n_rows, dtype=int)
    for _, rows in z.columns:
        row_sums[list(rows)] += 1
    return MatrixStats(
        K_n=len(counts), counts=counts, row_sums=row_sums.tolist(), col_sums=counts
    )


def row_sum_tail_bound(mass: float, eps: float) -> float:
    """
    Bound on P(|row sum - mass| > eps) for a row of independent Bernoulli(J_k)
    with Σ J_k = mass: exp(-ε²/(2(m+ε/3))) + exp(-ε²/(2m))

    :param mass:
    :param eps:
    :return:
    """
    if mass <= 0:
        return 0.0
    upper = math.exp(-(eps ** 2) / (2.0 * (mass + eps / 3.0)))
    lower = math.exp(-(eps ** 2) / (2.0 * mass))
    return min(1.0, upper + lower)
