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
This module implements functional (dis)similarity measures and the assembly
of pairwise distance matrices. It provides the following API.
  1. MetricSpec class - which measure to use and its parameters.
  2. DistanceMatrix class - symmetric n x n matrix of non-negative
     dissimilarities with zero diagonal.
  3. 'lp_distance()', 'wasserstein1_distance()', 'dtw_distance()' - the
     element measures.
  4. 'pairwise()' - the distance matrix of a functional data set.
  5. 'euclidean()' - the distance matrix of coordinate rows.
  6. 'read_csv()' and 'write_csv()' - distance matrix import and export.

The measures are:
  * Lp: (integral of |x(t) - y(t)|^p dt)^(1/p). The integral is approximated
    with the trapezoidal rule on the grid. For p < 1 this is only a
    quasi-metric, but it is still allowed.
  * Wasserstein1: the unnormalized L1-Wasserstein distance, computed as the
    integral of |F_x(t) - F_y(t)| where F_z is the running trapezoidal
    integral of z from t_1 to t. For curves of equal mass this is the 1-D
    optimal transport cost, unequal masses are penalized by the cumulative
    gap. Curves may be negative, there is no density check.
  * DTW: dynamic time warping with squared pointwise cost, the square root
    of the accumulated cost of the best monotone alignment is returned. The
    alignment may be restricted to a Sakoe-Chiba band. DTW does not satisfy
    the triangle inequality, so distance matrices never assert it.

All the measures are computed a whole row of the matrix at a time, the
element functions go through the same code, so 'pairwise()' gives exactly
the same numbers as calling the element functions pair by pair.
"""

# Disable the following pylint recommendations:
#   * Too many arguments - R0913
#   * Too many local variables (R0914)
# pylint: disable=R0913
# pylint: disable=R0914

import io
import csv
import logging
import numpy
from scipy.integrate import trapezoid, cumulative_trapezoid
from scipy.spatial.distance import pdist, squareform
from fgeomtools.Helpers import format_float

_log = logging.getLogger(__name__)  # pylint: disable=C0103

# Supported kinds of measures
LP = "lp"
WASSERSTEIN1 = "wasserstein1"
DTW = "dtw"
SUPPORTED_KINDS = (LP, WASSERSTEIN1, DTW)

# Cost table cells filled at once by the DTW dynamic program
_DTW_CELLS = 1 << 22


class Error(Exception):
    """
    A class for exceptions generated by this module. We currently support only
    one type of exceptions, and we basically throw human-readable problem
    description in case of errors.
    """
    pass


class MetricSpec(object):
    """
    Description of a dissimilarity measure:
    * kind   - one of 'LP', 'WASSERSTEIN1', 'DTW'
    * p      - the order of the Lp measure (Lp only)
    * window - half-width of the Sakoe-Chiba band, 'None' for unconstrained
               alignment (DTW only)
    """

    def __init__(self, kind, p=None, window=None):
        if kind not in SUPPORTED_KINDS:
            raise Error("unknown distance measure '%s', supported are: %s"
                        % (kind, ", ".join(SUPPORTED_KINDS)))

        if kind == LP:
            try:
                p = float(p)
            except (TypeError, ValueError):
                raise Error("the Lp measure needs a real order p, got '%s'"
                            % p)
            if not numpy.isfinite(p) or p <= 0:
                raise Error("the order p of the Lp measure has to be finite "
                            "and positive, got %s" % p)
        elif p is not None:
            raise Error("only the Lp measure has an order p")

        if window is not None:
            if kind != DTW:
                raise Error("only the DTW measure has a band window")
            if int(window) != window or window < 0:
                raise Error("the DTW band window has to be a non-negative "
                            "integer, got %s" % window)
            window = int(window)
        self.kind = kind
        self.p = p
        self.window = window

    @classmethod
    def parse(cls, text):
        """
        Parse the textual form of a measure: 'lp:<p>', 'wasserstein1', 'dtw'
        or 'dtw:<window>'.
        """

        split = [x.strip() for x in text.strip().split(':', 1)]
        kind = split[0].lower()

        if kind == LP:
            if len(split) < 2:
                raise Error("the Lp measure needs the order, e.g. 'lp:2'")
            return cls(LP, p=split[1])
        if kind == DTW and len(split) > 1:
            try:
                window = int(split[1])
            except ValueError:
                raise Error("bad DTW band window '%s'" % split[1])
            return cls(DTW, window=window)
        if len(split) > 1:
            raise Error("measure '%s' takes no parameters" % kind)
        return cls(kind)

    def check_grid_size(self, size):
        """Make sure the measure may be used for curves with 'size' points."""
        if self.window is not None and self.window > size - 1:
            raise Error("the DTW band window %d is larger than %d for curves "
                        "with %d points" % (self.window, size - 1, size))

    def __str__(self):
        if self.kind == LP:
            return "lp:%s" % ("%g" % self.p)
        if self.kind == DTW and self.window is not None:
            return "dtw:%d" % self.window
        return self.kind

    def __eq__(self, other):
        return isinstance(other, MetricSpec) and str(self) == str(other)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash(str(self))


class DistanceMatrix(object):
    """
    Symmetric n x n matrix of non-negative dissimilarities 'd' with zero
    diagonal. The 'metric_tag' attribute names the measure which produced it.
    The matrix is read-only.
    """

    def __init__(self, d, metric_tag):
        try:
            d = numpy.array(d, dtype=float, copy=True)
        except (TypeError, ValueError) as err:
            raise Error("distances are not real numbers: %s" % err)

        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise Error("a distance matrix has to be square, got shape %s"
                        % (d.shape, ))
        if not numpy.all(numpy.isfinite(d)):
            raise Error("distances have to be finite")
        if numpy.any(d < 0):
            raise Error("distances have to be non-negative")
        if numpy.any(numpy.diag(d) != 0):
            raise Error("a distance matrix has to have zero diagonal")

        tolerance = 1e-12 * max(1.0, float(numpy.max(d)) if d.size else 1.0)
        if not numpy.allclose(d, d.T, rtol=0, atol=tolerance):
            raise Error("a distance matrix has to be symmetric")

        d.flags.writeable = False
        self.d = d
        self.metric_tag = str(metric_tag)

    @property
    def n(self):
        """Count of observations."""
        return self.d.shape[0]

    def scaled(self, factor):
        """Return this distance matrix multiplied by 'factor' > 0."""
        if not factor > 0:
            raise Error("distances can only be scaled by a positive factor")
        return DistanceMatrix(self.d * factor, self.metric_tag)


def _check_pair(x, y):
    """Convert curves 'x' and 'y' to arrays and validate their lengths."""

    x = numpy.asarray(x, dtype=float)
    y = numpy.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1:
        raise Error("curves have to be vectors")
    if len(x) != len(y):
        raise Error("curves have different lengths: %d and %d"
                    % (len(x), len(y)))
    return x, y


def _grid_points(grid, size):
    """Return the grid points of 'grid' and check they match 'size'."""

    points = numpy.asarray(getattr(grid, "points", grid), dtype=float)
    if len(points) != size:
        raise Error("curves have %d values, but the grid has %d points"
                    % (size, len(points)))
    return points


def _lp_rows(x, others, t, p):
    """Lp distances between curve 'x' and each row of 'others'."""

    integrand = numpy.abs(others - x) ** p
    return trapezoid(integrand, t, axis=-1) ** (1.0 / p)


def _cumulative(values, t):
    """Running trapezoidal integrals of the rows of 'values'."""
    return cumulative_trapezoid(values, t, axis=-1, initial=0)


def _cdf_gap_rows(cum_x, cum_others, t):
    """Wasserstein distances from running integrals."""
    return trapezoid(numpy.abs(cum_others - cum_x), t, axis=-1)


def lp_distance(x, y, grid, p):
    """
    Return the Lp distance between curves 'x' and 'y' evaluated on 'grid'
    (a 'Grid' object or a vector of points).
    """

    x, y = _check_pair(x, y)
    if not p > 0:
        raise Error("the order p of the Lp measure has to be positive, got %s"
                    % p)
    t = _grid_points(grid, len(x))
    return float(_lp_rows(x, y[numpy.newaxis, :], t, float(p))[0])


def wasserstein1_distance(x, y, grid):
    """
    Return the unnormalized L1-Wasserstein distance between curves 'x' and
    'y' evaluated on 'grid'.
    """

    x, y = _check_pair(x, y)
    t = _grid_points(grid, len(x))
    cum = _cumulative(numpy.vstack((x, y)), t)
    return float(_cdf_gap_rows(cum[0], cum[1:], t)[0])


def _dtw_window(len_x, len_y, window):
    """Validate the lengths and the band 'window', return the band width."""

    if not len_x or not len_y:
        raise Error("DTW needs non-empty sequences")

    if window is None:
        return max(len_x, len_y)
    if window < 0:
        raise Error("the DTW band window has to be non-negative")
    if abs(len_x - len_y) > window:
        raise Error("the DTW band window %d cannot align sequences of "
                    "lengths %d and %d" % (window, len_x, len_y))
    return int(window)


def _dtw_rows(x, others, window):
    """
    DTW distances between sequence 'x' and each row of 'others'. The cost
    tables of all the rows are filled together, one anti-diagonal at a time,
    since the cells of an anti-diagonal only depend on the two previous ones.
    """

    len_x = len(x)
    count, len_y = others.shape

    rows = numpy.empty(count)
    chunk = max(1, _DTW_CELLS // (len_x * len_y))
    out_of_band = numpy.abs(numpy.arange(len_x)[:, numpy.newaxis] -
                            numpy.arange(len_y)) > window

    for begin in range(0, count, chunk):
        block = others[begin:begin + chunk]
        local = (x[:, numpy.newaxis] - block[:, numpy.newaxis, :]) ** 2
        local[:, out_of_band] = numpy.inf

        cost = numpy.full((len(block), len_x + 1, len_y + 1), numpy.inf)
        cost[:, 0, 0] = 0.0
        for diag in range(2, len_x + len_y + 1):
            i = numpy.arange(max(1, diag - len_y), min(len_x, diag - 1) + 1)
            j = diag - i
            best = numpy.minimum(numpy.minimum(cost[:, i - 1, j - 1],
                                               cost[:, i - 1, j]),
                                 cost[:, i, j - 1])
            cost[:, i, j] = local[:, i - 1, j - 1] + best

        rows[begin:begin + chunk] = numpy.sqrt(cost[:, len_x, len_y])

    return rows


def dtw_distance(x, y, window=None):
    """
    Return the DTW distance between sequences 'x' and 'y'. The cost of
    aligning x_i with y_j is (x_i - y_j)^2, the accumulated cost of the best
    alignment is c(i, j) = (x_i - y_j)^2 + min(c(i-1, j), c(i, j-1),
    c(i-1, j-1)), and the square root of c(end, end) is returned. If
    'window' is given, only cells with |i - j| <= window are allowed.
    """

    x = numpy.asarray(x, dtype=float).ravel()
    y = numpy.asarray(y, dtype=float).ravel()
    window = _dtw_window(len(x), len(y), window)
    return float(_dtw_rows(x, y[numpy.newaxis, :], window)[0])


def pairwise(dataset, spec):
    """
    Return the 'DistanceMatrix' of functional data set 'dataset' for the
    measure described by 'MetricSpec' object 'spec'. Only the upper triangle
    is computed, it is mirrored to the lower one.
    """

    n = dataset.n
    if n < 2:
        raise Error("a distance matrix needs at least 2 observations, got %d"
                    % n)

    spec.check_grid_size(dataset.m)
    values = dataset.values
    t = dataset.grid.points
    d = numpy.zeros((n, n))

    _log.debug("computing %s distances between %d curves of %d points"
               % (spec, n, dataset.m))

    if spec.kind == WASSERSTEIN1:
        cum = _cumulative(values, t)
    elif spec.kind == DTW:
        window = _dtw_window(dataset.m, dataset.m, spec.window)

    for i in range(n - 1):
        try:
            if spec.kind == LP:
                row = _lp_rows(values[i], values[i + 1:], t, spec.p)
            elif spec.kind == WASSERSTEIN1:
                row = _cdf_gap_rows(cum[i], cum[i + 1:], t)
            else:
                row = _dtw_rows(values[i], values[i + 1:], window)
        except Error as err:
            raise Error("cannot compute %s distances for observation %d: %s"
                        % (spec, i, err))

        row = numpy.asarray(row, dtype=float)
        bad = numpy.flatnonzero(~numpy.isfinite(row))
        if len(bad):
            raise Error("non-finite %s distance between observations %d and "
                        "%d" % (spec, i, i + 1 + bad[0]))

        d[i, i + 1:] = row
        d[i + 1:, i] = row

    return DistanceMatrix(d, str(spec))


def euclidean(coords, metric_tag="euclidean"):
    """Return the Euclidean 'DistanceMatrix' of the rows of 'coords'."""

    coords = numpy.asarray(coords, dtype=float)
    if coords.ndim != 2:
        raise Error("coordinates have to be an n x d matrix")
    return DistanceMatrix(squareform(pdist(coords, "euclidean")), metric_tag)


def write_csv(matrix, file_obj):
    """Write 'DistanceMatrix' object 'matrix' to text file object 'file_obj'."""

    writer = csv.writer(file_obj, lineterminator="\n")
    for row in matrix.d:
        writer.writerow([format_float(value) for value in row])


def read_csv(path, metric_tag="imported"):
    """Read a distance matrix from CSV file 'path' (n rows, n columns)."""

    try:
        with io.open(path, "r", encoding="utf-8", newline="") as f_csv:
            rows = [row for row in csv.reader(f_csv) if row]
    except (IOError, csv.Error) as err:
        raise Error("cannot read distance matrix file '%s': %s" % (path, err))

    if not rows:
        raise Error("distance matrix file '%s' is empty" % path)

    try:
        d = numpy.array([[float(cell) for cell in row] for row in rows])
    except ValueError as err:
        raise Error("bad distance matrix file '%s': %s" % (path, err))

    if d.ndim != 2:
        raise Error("ragged rows in distance matrix file '%s'" % path)

    try:
        return DistanceMatrix(d, metric_tag)
    except Error as err:
        raise Error("bad distance matrix file '%s': %s" % (path, err))
