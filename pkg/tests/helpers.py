# -*- coding: utf-8 -*-
# vim: ts=4 sw=4 et ai si
#
# License: GPLv2
#
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License, version 2,
# as published by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU
# General Public License for more details.

"""
This module contains independent functions shared between various
tests: straight-from-the-definition oracles and fixture generators.
"""

import os
import shutil
import tempfile
import itertools
import numpy
from fgeomtools import Functional


def brute_force_lof(d, min_pts):
    """
    Compute LOF scores for the distance matrix 'd' literally following the
    definitions, one observation at a time, with plain Python loops.
    """

    n = len(d)

    def neighbors(a):
        """The k-distance neighborhood of 'a', ties included."""
        dists = sorted(d[a][b] for b in range(n) if b != a)
        kdist = dists[min_pts - 1]
        return kdist, [b for b in range(n) if b != a and d[a][b] <= kdist]

    kdists = {}
    hoods = {}
    for a in range(n):
        kdists[a], hoods[a] = neighbors(a)

    lrds = {}
    for a in range(n):
        total = 0.0
        for b in hoods[a]:
            total += max(kdists[b], d[a][b])
        lrds[a] = len(hoods[a]) / max(total, 1e-12)

    scores = []
    for a in range(n):
        mean_lrd = sum(lrds[b] for b in hoods[a]) / len(hoods[a])
        scores.append(mean_lrd / lrds[a])
    return scores


def pair_count_auc(scores, labels):
    """
    Compute the AUC by counting all the (outlier, inlier) pairs: a pair
    counts 1 if the outlier scores higher, 1/2 for a tie.
    """

    positives = [s for s, l in zip(scores, labels) if l]
    negatives = [s for s, l in zip(scores, labels) if not l]
    total = 0.0
    for pos in positives:
        for neg in negatives:
            if pos > neg:
                total += 1
            elif pos == neg:
                total += 0.5
    return total / (len(positives) * len(negatives))


def _alignments(len_x, len_y):
    """
    Generate all monotone alignment paths from (0, 0) to
    (len_x - 1, len_y - 1) using unit steps right, down and diagonal.
    """

    def walk(i, j, path):
        """Extend 'path' ending in (i, j) in all possible ways."""
        if (i, j) == (len_x - 1, len_y - 1):
            yield path
            return
        for step_i, step_j in ((1, 0), (0, 1), (1, 1)):
            if i + step_i < len_x and j + step_j < len_y:
                for result in walk(i + step_i, j + step_j,
                                   path + [(i + step_i, j + step_j)]):
                    yield result

    return walk(0, 0, [(0, 0)])


def brute_force_dtw(x, y):
    """DTW distance by enumerating every alignment (short sequences only)."""

    best = min(sum((x[i] - y[j]) ** 2 for i, j in path)
               for path in _alignments(len(x), len(y)))
    return best ** 0.5


def table_dtw(x, y, window=None):
    """DTW distance by filling the cost table cell by cell."""

    if window is None:
        window = max(len(x), len(y))
    inf = float("inf")
    cost = [[inf] * (len(y) + 1) for _ in range(len(x) + 1)]
    cost[0][0] = 0.0
    for i in range(1, len(x) + 1):
        for j in range(max(1, i - window), min(len(y), i + window) + 1):
            best = min(cost[i - 1][j - 1], cost[i - 1][j], cost[i][j - 1])
            cost[i][j] = (x[i - 1] - y[j - 1]) ** 2 + best
    return cost[len(x)][len(y)] ** 0.5


def random_points(gen, n, q):
    """Return 'n' random points in R^q."""
    return gen.normal(0, 1, (n, q))


def euclidean_matrix(points):
    """Euclidean distances between the rows of 'points', plain numpy."""
    diff = points[:, numpy.newaxis, :] - points[numpy.newaxis, :, :]
    return numpy.sqrt((diff ** 2).sum(axis=-1))


def random_dataset(gen, n, m, labeled=False):
    """Return a data set of 'n' random curves on a uniform 'm'-point grid."""

    labels = None
    if labeled:
        labels = numpy.zeros(n, dtype=bool)
        labels[:max(1, n // 10)] = True
    return Functional.FunctionalDataset(Functional.Grid.uniform(0, 1, m),
                                        gen.normal(0, 1, (n, m)), labels)


def constant_dataset(levels, m=11):
    """Return a data set of constant curves at 'levels' on [0, 1]."""

    values = numpy.repeat(numpy.asarray(levels, dtype=float)[:, numpy.newaxis],
                          m, axis=1)
    return Functional.FunctionalDataset(Functional.Grid.uniform(0, 1, m),
                                        values)


def pairs(n):
    """All (i, j) index pairs with i < j."""
    return itertools.combinations(range(n), 2)


class TempDir(object):
    """A temporary directory removed when the context is left."""

    def __enter__(self):
        self.path = tempfile.mkdtemp(prefix="fgeomtools-test-")
        return self

    def __exit__(self, *_):
        shutil.rmtree(self.path, ignore_errors=True)

    def join(self, name):
        """Return the path of file 'name' inside the directory."""
        return os.path.join(self.path, name)

    def write(self, name, text):
        """Create file 'name' containing 'text', return its path."""
        path = self.join(name)
        with open(path, "w") as file_obj:
            file_obj.write(text)
        return path

    def read(self, name):
        """Return the contents of file 'name'."""
        with open(self.join(name), "r") as file_obj:
            return file_obj.read()
