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
This module implements Local Outlier Factor (LOF) scoring on distance
matrices and on embedding coordinates.

LOF compares the local density around an observation with the local density
around its neighbors. With k = minPts:
  * kdist(a) is the distance from 'a' to its k-th nearest neighbor;
  * the neighborhood N(a) contains every other observation within kdist(a),
    so ties at the k-distance are all included and |N(a)| may exceed k;
  * reach(a, b) = max(kdist(b), d(a, b)) is the reachability distance;
  * lrd(a) = |N(a)| / sum_{b in N(a)} reach(a, b) is the local reachability
    density;
  * LOF(a) = mean_{b in N(a)} lrd(b) / lrd(a).

Scores around 1 mean "as dense as the neighbors", larger scores are more
outlying. Scores are invariant to scaling all distances by a constant.

Exact duplicates can make a reachability sum zero and the density infinite.
Reachability sums are floored at 'REACH_SUM_FLOOR', so such observations get
a large but finite density, and duplicates get equal scores.

The default minPts is 0.75 n, which is a good choice for functional data
because it makes LOF compare each observation with most of the data set
rather than with a small local cluster.
"""

import csv
import logging
import numpy
from fgeomtools import Distance
from fgeomtools.Helpers import format_float, round_half_away

_log = logging.getLogger(__name__)  # pylint: disable=C0103

# Lower bound of reachability distance sums
REACH_SUM_FLOOR = 1e-12

# The default neighborhood size as a share of the observations count
DEFAULT_MIN_PTS_RATIO = 0.75


class Error(Exception):
    """
    A class for exceptions generated by this module. We currently support only
    one type of exceptions, and we basically throw human-readable problem
    description in case of errors.
    """
    pass


class LofConfig(object):
    """
    LOF parameters. The 'min_pts' attribute is the neighborhood size, 'None'
    means the default 0.75 n, resolved when the observations count is known.
    """

    def __init__(self, min_pts=None):
        if min_pts is not None:
            if int(min_pts) != min_pts or min_pts < 1:
                raise Error("minPts has to be a positive integer, got %s"
                            % min_pts)
            min_pts = int(min_pts)
        self.min_pts = min_pts

    def resolve(self, n):
        """Return the neighborhood size to use for 'n' observations."""

        if self.min_pts is None:
            return default_min_pts(n)
        if self.min_pts < 2 or self.min_pts > n - 1:
            raise Error("minPts has to be within [2, %d] for %d "
                        "observations, got %d" % (n - 1, n, self.min_pts))
        return self.min_pts


class ScoreVector(object):
    """
    One outlier score per observation ('scores', higher is more outlying)
    and the 'method_tag' provenance string.
    """

    def __init__(self, scores, method_tag):
        scores = numpy.array(scores, dtype=float, copy=True)
        if scores.ndim != 1:
            raise Error("scores have to be a vector")
        if not numpy.all(numpy.isfinite(scores)):
            raise Error("scores have to be finite")

        scores.flags.writeable = False
        self.scores = scores
        self.method_tag = str(method_tag)

    def __len__(self):
        return len(self.scores)


def default_min_pts(n):
    """
    Return the default neighborhood size for 'n' observations:
    round(0.75 n), halves rounded away from zero, clamped to [2, n - 1].
    """

    if n < 4:
        raise Error("the default minPts needs at least 4 observations, got %d"
                    % n)
    return min(max(round_half_away(DEFAULT_MIN_PTS_RATIO * n), 2), n - 1)


def lof_from_distances(matrix, cfg):
    """
    Return the LOF 'ScoreVector' for 'DistanceMatrix' object 'matrix' and
    'LofConfig' object 'cfg'.
    """

    n = matrix.n
    min_pts = cfg.resolve(n)
    d = matrix.d

    others = numpy.array(d, copy=True)
    numpy.fill_diagonal(others, numpy.inf)
    kdist = numpy.sort(others, axis=1)[:, min_pts - 1]

    # Neighborhood membership, ties at the k-distance included
    member = others <= kdist[:, numpy.newaxis]
    sizes = numpy.count_nonzero(member, axis=1)

    reach = numpy.maximum(kdist[numpy.newaxis, :], d)
    reach_sums = numpy.where(member, reach, 0).sum(axis=1)
    lrd = sizes / numpy.maximum(reach_sums, REACH_SUM_FLOOR)

    neighbor_lrd = numpy.where(member, lrd[numpy.newaxis, :], 0).sum(axis=1)
    scores = neighbor_lrd / sizes / lrd

    _log.debug("LOF of %d observations with minPts %d: neighborhood sizes "
               "%d-%d, scores %.4g-%.4g"
               % (n, min_pts, sizes.min(), sizes.max(), scores.min(),
                  scores.max()))

    return ScoreVector(scores, "lof:%d(%s)" % (min_pts, matrix.metric_tag))


def lof_on_embedding(embedding, cfg):
    """
    Return the LOF 'ScoreVector' of the coordinates of 'Embed.Embedding'
    object 'embedding', using Euclidean distances between them.
    """

    matrix = Distance.euclidean(embedding.coords,
                                "euclidean(%dd)" % embedding.d1)
    return lof_from_distances(matrix, cfg)


def write_csv(scores, file_obj, labels=None):
    """
    Write 'ScoreVector' object 'scores' to text file object 'file_obj' as the
    "index,score" CSV. If 'labels' (a 'Functional.LabelVector' object) is
    given, the "label" column is appended.
    """

    if labels is not None and len(labels) != len(scores):
        raise Error("%d labels for %d scores" % (len(labels), len(scores)))

    writer = csv.writer(file_obj, lineterminator="\n")
    header = ["index", "score"]
    if labels is not None:
        header.append("label")
    writer.writerow(header)

    for idx, value in enumerate(scores.scores):
        row = [idx, format_float(value)]
        if labels is not None:
            row.append("1" if labels.flags[idx] else "0")
        writer.writerow(row)


def read_csv(path):
    """
    Read the score CSV file 'path' written by 'write_csv()' and return the
    'ScoreVector' object.
    """

    try:
        with open(path, "r") as f_csv:
            rows = list(csv.DictReader(f_csv))
    except (IOError, csv.Error) as err:
        raise Error("cannot read score file '%s': %s" % (path, err))

    if not rows or "score" not in rows[0]:
        raise Error("score file '%s' has no \"score\" column" % path)

    try:
        scores = [float(row["score"]) for row in rows]
    except (TypeError, ValueError) as err:
        raise Error("bad score in file '%s': %s" % (path, err))

    return ScoreVector(scores, "file:%s" % path)
