"""Scoring clusterings against ground-truth labels.

Clusters carry arbitrary numbers, so before any rate is meaningful the
clusters must be matched to the true groups.  The alignment maximizes the
total number of correctly assigned samples: exhaustively over injective
maps when max(k, L) <= 8, otherwise by maximum-weight bipartite matching.
Accuracy, sensitivity and specificity are computed on the aligned
confusion counts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .clustering import ClusterAssignment
from .errors import MissingPositiveClass, ShapeMismatch
from .serialize import write_json

_EXHAUSTIVE_MAX = 8


@dataclass
class EvaluationReport:
    """Aligned confusion counts and the derived rates.

    ``confusion`` is L x k with rows = true groups and columns reordered so
    the cluster matched to group g sits at column g where possible.
    ``alignment[c]`` gives the 1-based group matched to original cluster
    c+1, or None when k > L leaves the cluster unmatched.
    """

    confusion: np.ndarray
    alignment: tuple
    accuracy: float
    sensitivity: float | None
    specificity: float | None
    per_group_rates: np.ndarray


def _best_alignment(M: np.ndarray) -> dict[int, int]:
    """Map cluster -> group (0-based) maximizing the matched count.

    Ties keep the lexicographically smallest assignment vector, which the
    exhaustive scan visits first.
    """
    L, k = M.shape
    if max(L, k) <= _EXHAUSTIVE_MAX:
        best_score, best_map = -1, {}
        if k <= L:
            for groups in itertools.permutations(range(L), k):
                score = sum(M[g, c] for c, g in enumerate(groups))
                if score > best_score:
                    best_score = score
                    best_map = {c: g for c, g in enumerate(groups)}
        else:
            for clusters in itertools.permutations(range(k), L):
                score = sum(M[g, c] for g, c in enumerate(clusters))
                if score > best_score:
                    best_score = score
                    best_map = {c: g for g, c in enumerate(clusters)}
        return best_map
    rows, cols = linear_sum_assignment(-M)
    return {int(c): int(g) for g, c in zip(rows, cols)}


def align_and_score(
    truth, assignment: ClusterAssignment, positive_class: int | None = None
) -> EvaluationReport:
    """Align clusters to true groups and compute accuracy and rates.

    ``truth`` holds integers in {1..L}.  Sensitivity/specificity are only
    produced for binary problems with an explicit ``positive_class``.
    """
    truth = np.asarray(truth, dtype=int)
    labels = np.asarray(assignment.labels, dtype=int)
    if truth.size != labels.size:
        raise ShapeMismatch(
            f"truth has {truth.size} entries, assignment has {labels.size}"
        )
    m = truth.size
    L = int(truth.max())
    k = assignment.k

    M = np.zeros((L, k), dtype=int)
    np.add.at(M, (truth - 1, labels - 1), 1)

    cluster_to_group = _best_alignment(M)
    group_to_cluster = {g: c for c, g in cluster_to_group.items()}

    matched = [group_to_cluster.get(g) for g in range(L)]
    col_order = [c for c in matched if c is not None]
    col_order += [c for c in range(k) if c not in cluster_to_group]
    confusion = M[:, col_order]

    correct = sum(M[g, c] for c, g in cluster_to_group.items())
    accuracy = correct / m

    per_group = np.zeros(L)
    group_sizes = M.sum(axis=1)
    for g in range(L):
        c = group_to_cluster.get(g)
        if c is not None and group_sizes[g] > 0:
            per_group[g] = M[g, c] / group_sizes[g]

    sensitivity = specificity = None
    if positive_class is not None:
        if L != 2 or positive_class not in (1, 2):
            raise MissingPositiveClass(
                f"sensitivity needs a binary truth with positive_class in {{1,2}}; "
                f"got L={L}, positive_class={positive_class}"
            )
        g_pos = positive_class - 1
        g_neg = 1 - g_pos
        sensitivity = float(per_group[g_pos])
        specificity = float(per_group[g_neg])

    alignment = tuple(
        cluster_to_group[c] + 1 if c in cluster_to_group else None for c in range(k)
    )
    return EvaluationReport(
        confusion=confusion,
        alignment=alignment,
        accuracy=float(accuracy),
        sensitivity=sensitivity,
        specificity=specificity,
        per_group_rates=per_group,
    )


def consistency_check(report: EvaluationReport, n_pos: int, n_neg: int) -> bool:
    """Does accuracy equal the prevalence-weighted mean of the two rates?

    The 0.005 slack absorbs rounding in 3-decimal published tables.
    """
    if report.sensitivity is None or report.specificity is None:
        raise MissingPositiveClass("consistency check needs a binary report")
    weighted = (report.sensitivity * n_pos + report.specificity * n_neg) / (
        n_pos + n_neg
    )
    return abs(report.accuracy - weighted) <= 0.005


def report_to_dict(report: EvaluationReport) -> dict:
    return {
        "confusion": report.confusion.tolist(),
        "alignment": list(report.alignment),
        "accuracy": report.accuracy,
        "sensitivity": report.sensitivity,
        "specificity": report.specificity,
        "per_group_rates": report.per_group_rates.tolist(),
    }


def save_report(report: EvaluationReport, path) -> None:
    write_json(path, report_to_dict(report))


def format_report(report: EvaluationReport) -> str:
    """Counts table with both row-wise and column-wise percentages.

    Published tables sometimes mix the two normalizations, so both are
    reported explicitly: each cell shows count (row% / col%).
    """
    M = report.confusion
    L, k = M.shape
    row_tot = M.sum(axis=1, keepdims=True)
    col_tot = M.sum(axis=0, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        row_pct = np.where(row_tot > 0, 100.0 * M / row_tot, 0.0)
        col_pct = np.where(col_tot > 0, 100.0 * M / col_tot, 0.0)

    header = ["true\\assigned"] + [f"cluster {j + 1}" for j in range(k)]
    lines = ["\t".join(header)]
    for g in range(L):
        cells = [
            f"{M[g, j]} ({row_pct[g, j]:.1f}% / {col_pct[g, j]:.1f}%)" for j in range(k)
        ]
        lines.append("\t".join([f"group {g + 1}"] + cells))
    lines.append(f"accuracy\t{100.0 * report.accuracy:.2f}%")
    if report.sensitivity is not None:
        lines.append(f"sensitivity\t{100.0 * report.sensitivity:.2f}%")
        lines.append(f"specificity\t{100.0 * report.specificity:.2f}%")
    return "\n".join(lines)
