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
This module implements low-dimensional embeddings of distance matrices and
provides the following API.
  1. Embedding class - the embedding coordinates together with the full
     eigenvalue spectrum and the goodness of fit.
  2. 'classical_mds()' - classical (Torgerson) multidimensional scaling.
  3. 'gof_of()' and 'gof_table()' - goodness of fit of an embedding.
  4. 'geodesic_distances()' and 'isomap()' - ISOMAP, which is classical MDS
     of the geodesic distances in a nearest neighbor graph.

Classical MDS double-centers the squared distance matrix,
B = -1/2 J (D o D) J with J = I - 1/n 11', and uses the eigenvectors of the
largest eigenvalues of B scaled by the square roots of the eigenvalues as
coordinates. For Euclidean-embeddable distances this restores the original
configuration up to rotation and translation. Distances which are not
Euclidean (e.g. DTW) produce negative eigenvalues. Those are clamped to zero
when scaling the coordinates, but kept as-is in the spectrum.

Eigenvectors are only defined up to sign. We flip every eigenvector so that
its largest-magnitude entry is positive (the lowest index wins ties), which
makes the coordinates reproducible.

The goodness of fit of a d1-dimensional embedding is the share of the
non-negative eigenvalue mass retained by the first d1 eigenvalues:
  GOF(d1) = sum_{i <= d1} max(0, l_i) / sum_{j <= n} max(0, l_j),
and it is 1 if all the eigenvalues are zero or negative.

ISOMAP connects every observation with its k nearest neighbors (an edge
exists if either end lists the other one), computes all shortest paths, and
embeds the resulting geodesic distances with classical MDS. If the graph
falls apart into several components, the geodesics between them are
undefined. In this case every pair of components is bridged by the single
shortest edge between them, which keeps components apart while producing a
finite matrix.
"""

# Disable the following pylint recommendations:
#   * Too many local variables (R0914)
# pylint: disable=R0914

import csv
import logging
import numpy
from scipy import linalg
from scipy.sparse.csgraph import (csgraph_from_dense, connected_components,
                                  shortest_path)
from fgeomtools import Distance, Functional
from fgeomtools.Helpers import format_float

_log = logging.getLogger(__name__)  # pylint: disable=C0103

# Maximum allowed eigenpair residual relative to the norm of B
_RESIDUAL_TOLERANCE = 1e-9


class Error(Exception):
    """
    A class for exceptions generated by this module. We currently support only
    one type of exceptions, and we basically throw human-readable problem
    description in case of errors.
    """
    pass


class ErrorNumeric(Error):
    """
    An exception of this type is raised when the eigensolver fails to
    converge or returns inaccurate eigenpairs.
    """
    pass


class Embedding(object):
    """
    An embedding of n observations into R^d1:
    * coords      - n x d1 matrix of coordinates, columns ordered by
                    descending eigenvalue
    * eigenvalues - all n eigenvalues, sorted in descending order
    * d1          - the embedding dimension
    * gof         - the goodness of fit, 'gof_of(eigenvalues, d1)'
    """

    def __init__(self, coords, eigenvalues, d1):
        coords = numpy.array(coords, dtype=float, copy=True)
        eigenvalues = numpy.array(eigenvalues, dtype=float, copy=True)

        if coords.ndim != 2 or coords.shape[1] != d1:
            raise Error("embedding coordinates have to be an n x %d matrix"
                        % d1)
        if len(eigenvalues) != coords.shape[0]:
            raise Error("%d eigenvalues for %d observations"
                        % (len(eigenvalues), coords.shape[0]))

        coords.flags.writeable = False
        eigenvalues.flags.writeable = False
        self.coords = coords
        self.eigenvalues = eigenvalues
        self.d1 = d1
        self.gof = gof_of(eigenvalues, d1)

    @property
    def n(self):
        """Count of embedded observations."""
        return self.coords.shape[0]


def _gof_cumulative(eigenvalues):
    """
    Validate 'eigenvalues' and return the running sums of their non-negative
    parts. Running sums make the goodness of fit non-decreasing in the
    dimension, and equal to 1 at full dimension, without rounding surprises.
    """

    eigenvalues = numpy.asarray(eigenvalues, dtype=float)
    if eigenvalues.ndim != 1 or not len(eigenvalues):
        raise Error("eigenvalues have to be a non-empty vector")
    if numpy.any(numpy.diff(eigenvalues) > 0):
        raise Error("eigenvalues have to be sorted in descending order")

    return numpy.cumsum(numpy.maximum(eigenvalues, 0))


def gof_of(eigenvalues, d1):
    """
    Return the goodness of fit of a 'd1'-dimensional embedding with the
    'eigenvalues' spectrum (sorted in descending order).
    """

    cumulative = _gof_cumulative(eigenvalues)
    if int(d1) != d1 or d1 < 1 or d1 > len(cumulative):
        raise Error("embedding dimension has to be within [1, %d], got %s"
                    % (len(cumulative), d1))

    if cumulative[-1] == 0:
        return 1.0
    return float(cumulative[int(d1) - 1] / cumulative[-1])


def gof_table(eigenvalues, max_dim):
    """
    Return the list of goodness of fit values for embedding dimensions
    1, 2, ..., 'max_dim'.
    """

    cumulative = _gof_cumulative(eigenvalues)
    if int(max_dim) != max_dim or max_dim < 1 or max_dim > len(cumulative):
        raise Error("maximum embedding dimension has to be within [1, %d], "
                    "got %s" % (len(cumulative), max_dim))

    if cumulative[-1] == 0:
        return [1.0] * int(max_dim)
    return [float(value / cumulative[-1])
            for value in cumulative[:int(max_dim)]]


def _fix_signs(evecs):
    """
    Flip eigenvectors (columns of 'evecs') so that the largest-magnitude
    entry of each one is positive.
    """

    idx = numpy.argmax(numpy.abs(evecs), axis=0)
    signs = numpy.sign(evecs[idx, numpy.arange(evecs.shape[1])])
    signs[signs == 0] = 1
    return evecs * signs


def classical_mds(matrix, d1):
    """
    Return the 'd1'-dimensional classical MDS 'Embedding' of
    'DistanceMatrix' object 'matrix'.
    """

    n = matrix.n
    if int(d1) != d1 or d1 < 1 or d1 > n - 1:
        raise Error("embedding dimension has to be within [1, %d], got %s"
                    % (n - 1, d1))
    d1 = int(d1)

    squared = matrix.d ** 2
    centering = numpy.eye(n) - numpy.full((n, n), 1.0 / n)
    b_matrix = -0.5 * centering.dot(squared).dot(centering)
    b_matrix = (b_matrix + b_matrix.T) / 2

    try:
        evals, evecs = linalg.eigh(b_matrix)
    except (linalg.LinAlgError, ValueError) as err:
        raise ErrorNumeric("eigendecomposition of the %d x %d centered "
                           "distance matrix failed: %s" % (n, n, err))

    order = numpy.argsort(-evals, kind="stable")
    evals = evals[order]
    evecs = _fix_signs(evecs[:, order])

    norm = linalg.norm(b_matrix)
    residual = linalg.norm(b_matrix.dot(evecs) - evecs * evals, axis=0)
    if numpy.any(residual > _RESIDUAL_TOLERANCE * norm):
        raise ErrorNumeric("inaccurate eigenpairs: residual %g exceeds %g"
                           % (numpy.max(residual),
                              _RESIDUAL_TOLERANCE * norm))

    coords = evecs[:, :d1] * numpy.sqrt(numpy.maximum(evals[:d1], 0))

    _log.debug("MDS of %d observations: top eigenvalues %s, %d negative"
               % (n, numpy.array2string(evals[:d1], precision=4),
                  numpy.count_nonzero(evals < 0)))

    return Embedding(coords, evals, d1)


def _nearest_neighbors_graph(d, k):
    """
    Return the dense weight matrix of the symmetrized 'k'-nearest-neighbor
    graph of distance matrix 'd'. Non-edges are infinite.
    """

    n = d.shape[0]
    ranked = numpy.array(d, copy=True)
    numpy.fill_diagonal(ranked, numpy.inf)
    neighbors = numpy.argsort(ranked, axis=1, kind="stable")[:, :k]

    graph = numpy.full((n, n), numpy.inf)
    rows = numpy.repeat(numpy.arange(n), k)
    cols = neighbors.ravel()
    graph[rows, cols] = d[rows, cols]
    return numpy.minimum(graph, graph.T)


def _bridge_components(d, graph, labels, count):
    """
    Connect the 'count' components of 'graph' (component of each vertex in
    'labels') by adding the shortest edge between every pair of components.
    """

    members = [numpy.flatnonzero(labels == comp) for comp in range(count)]
    for comp1 in range(count):
        for comp2 in range(comp1 + 1, count):
            block = d[numpy.ix_(members[comp1], members[comp2])]
            i, j = numpy.unravel_index(numpy.argmin(block), block.shape)
            src = members[comp1][i]
            dst = members[comp2][j]
            graph[src, dst] = graph[dst, src] = d[src, dst]


def geodesic_distances(matrix, k):
    """
    Return the geodesic 'DistanceMatrix' of 'DistanceMatrix' object 'matrix'
    in its symmetrized 'k'-nearest-neighbor graph.
    """

    n = matrix.n
    if int(k) != k or k < 1 or k > n - 1:
        raise Error("neighborhood size has to be within [1, %d], got %s"
                    % (n - 1, k))
    k = int(k)

    d = matrix.d
    graph = _nearest_neighbors_graph(d, k)

    count, labels = connected_components(
        csgraph_from_dense(graph, null_value=numpy.inf), directed=False)
    if count > 1:
        _log.warning("the %d-nearest-neighbor graph has %d components, "
                     "bridging them with their shortest edges" % (k, count))
        _bridge_components(d, graph, labels, count)

    geodesic = shortest_path(csgraph_from_dense(graph, null_value=numpy.inf),
                             method="D", directed=False)
    if not numpy.all(numpy.isfinite(geodesic)):
        raise ErrorNumeric("geodesic distances are not finite")

    geodesic = numpy.minimum(geodesic, geodesic.T)
    numpy.fill_diagonal(geodesic, 0)
    return Distance.DistanceMatrix(geodesic, "geodesic-%d(%s)"
                                   % (k, matrix.metric_tag))


def isomap(matrix, k, d1):
    """
    Return the 'd1'-dimensional ISOMAP 'Embedding' of 'DistanceMatrix' object
    'matrix' with neighborhood size 'k'.
    """

    n = matrix.n
    if int(d1) != d1 or d1 < 1 or d1 > n - 1:
        raise Error("embedding dimension has to be within [1, %d], got %s"
                    % (n - 1, d1))

    return classical_mds(geodesic_distances(matrix, k), d1)


def write_csv(embedding, file_obj, labels=None):
    """
    Write the coordinates of 'embedding' to text file object 'file_obj'. The
    header names the dimensions "y1", "y2", etc. If 'labels' (a
    'Functional.LabelVector' object) is given, the "label" column is
    appended.
    """

    writer = csv.writer(file_obj, lineterminator="\n")
    header = ["y%d" % (idx + 1) for idx in range(embedding.d1)]
    if labels is not None:
        header.append("label")
    writer.writerow(header)

    for idx in range(embedding.n):
        row = [format_float(value) for value in embedding.coords[idx]]
        if labels is not None:
            row.append("1" if labels.flags[idx] else "0")
        writer.writerow(row)


def write_eigenvalues(embedding, file_obj):
    """Write the full eigenvalue spectrum of 'embedding' to 'file_obj'."""

    writer = csv.writer(file_obj, lineterminator="\n")
    writer.writerow(["index", "eigenvalue"])
    for idx, value in enumerate(embedding.eigenvalues):
        writer.writerow([idx + 1, format_float(value)])


def write_gof_table(gofs, file_obj):
    """Write the list of goodness of fit values 'gofs' to 'file_obj'."""

    writer = csv.writer(file_obj, lineterminator="\n")
    writer.writerow(["dim", "gof"])
    for idx, value in enumerate(gofs):
        writer.writerow([idx + 1, format_float(value)])


def read_csv(path):
    """
    Read the embedding CSV file 'path' written by 'write_csv()' and return
    the ('Embedding', labels) tuple, where labels is a
    'Functional.LabelVector' object or 'None' if the file has no "label"
    column.

    The file keeps the coordinates only. The spectrum is restored from them:
    the k-th MDS eigenvalue is the squared norm of the k-th coordinate
    column, the remaining eigenvalues are taken as zeros.
    """

    try:
        with open(path, "r") as f_csv:
            rows = list(csv.reader(f_csv))
    except (IOError, csv.Error) as err:
        raise Error("cannot read embedding file '%s': %s" % (path, err))

    if len(rows) < 2:
        raise Error("embedding file '%s' has no coordinates" % path)

    header = [cell.strip() for cell in rows[0]]
    label_idx = header.index("label") if "label" in header else None
    dims = [idx for idx in range(len(header)) if idx != label_idx]
    if not dims:
        raise Error("embedding file '%s' has no coordinate columns" % path)

    coords = []
    flags = []
    for row_num, row in enumerate(rows[1:], 2):
        if len(row) != len(header):
            raise Error("file '%s', line %d: %d columns instead of %d"
                        % (path, row_num, len(row), len(header)))
        try:
            coords.append([float(row[idx]) for idx in dims])
            if label_idx is not None:
                flags.append(int(row[label_idx]))
        except ValueError as err:
            raise Error("file '%s', line %d: %s" % (path, row_num, err))

    coords = numpy.array(coords)
    if not numpy.all(numpy.isfinite(coords)):
        raise Error("embedding file '%s' has non-finite coordinates" % path)

    n, d1 = coords.shape
    if d1 > n:
        raise Error("embedding file '%s' has %d dimensions for %d "
                    "observations" % (path, d1, n))

    eigenvalues = numpy.zeros(n)
    eigenvalues[:d1] = -numpy.sort(-numpy.sum(coords ** 2, axis=0))

    labels = None
    if label_idx is not None:
        try:
            labels = Functional.LabelVector(flags)
        except Functional.Error as err:
            raise Error("file '%s': %s" % (path, err))

    return Embedding(coords, eigenvalues, d1), labels
