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
This module implements the functional data containers and provides the
following API.
  1. Grid class - the shared argument values t_1 < ... < t_m all curves of a
     data set are evaluated on.
  2. FunctionalDataset class - n curves evaluated on one grid, with optional
     ground-truth outlier labels and a free-form provenance record.
  3. LabelVector class - the outlier flags of a data set.
  4. 'load_csv()' and 'write_csv()' - the CSV representation of a data set.
  5. 'to_derivative()' - derivative preprocessing.

A functional observation is an entire curve x(t). We never look at the curve
between grid points: every integral is approximated with the trapezoidal rule
on the grid, which is exact for piecewise-linear data, and the grid does not
have to be uniform.

Labels only mark structural outliers, i.e., curves drawn from the anomalous
data generating process. Curves of the common process which merely have
unusual parameter values are never labeled.

The CSV format is UTF-8, comma-separated, '.' as the decimal point, one
observation per row. The optional first row is a header. If all the header
cells (except for the label column) are numbers, they are the grid, otherwise
the grid is 0, 1, ..., m - 1. The optional label column contains 0 or 1.
Numbers are written in the shortest form which reads back to the same double,
so writing and then loading a data set reproduces it bit-exactly.
"""

# Disable the following pylint recommendations:
#   * Too many arguments - R0913
#   * Too many branches (R0912)
# pylint: disable=R0913
# pylint: disable=R0912

import io
import csv
import logging
import numpy
from fgeomtools.Helpers import format_float

_log = logging.getLogger(__name__)  # pylint: disable=C0103

# Name of the label column in CSV files
LABEL_COLUMN = "label"


class Error(Exception):
    """
    A class for exceptions generated by this module. We currently support only
    one type of exceptions, and we basically throw human-readable problem
    description in case of errors.
    """
    pass


def _frozen(array):
    """Return a read-only copy of 'array'."""
    array = numpy.array(array, copy=True)
    array.flags.writeable = False
    return array


class Grid(object):
    """
    The argument values the curves are evaluated on. The points have to be
    finite and strictly increasing, and there have to be at least 2 of them.
    """

    def __init__(self, points):
        """The 'points' argument is a sequence of real numbers."""

        try:
            points = numpy.asarray(points, dtype=float)
        except (TypeError, ValueError) as err:
            raise Error("grid points are not real numbers: %s" % err)

        if points.ndim != 1:
            raise Error("grid points have to be a vector, got an array of "
                        "shape %s" % (points.shape, ))
        if len(points) < 2:
            raise Error("a grid needs at least 2 points, got %d" % len(points))
        if not numpy.all(numpy.isfinite(points)):
            raise Error("grid points have to be finite")
        if not numpy.all(numpy.diff(points) > 0):
            raise Error("grid points have to be strictly increasing")

        self.points = _frozen(points)

    @classmethod
    def uniform(cls, start, stop, count):
        """Return a grid of 'count' equidistant points over [start, stop]."""
        return cls(numpy.linspace(start, stop, count))

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        return isinstance(other, Grid) and \
               numpy.array_equal(self.points, other.points)

    def __ne__(self, other):
        return not self.__eq__(other)

    __hash__ = None


class LabelVector(object):
    """
    Outlier flags of a data set, 'True' means the observation stems from the
    anomalous manifold (it is a structural, off-manifold outlier).
    """

    def __init__(self, flags):
        flags = numpy.asarray(flags)
        if flags.ndim != 1:
            raise Error("labels have to be a vector")
        if flags.dtype != bool:
            if not numpy.all(numpy.isin(flags, (0, 1))):
                raise Error("labels have to be 0 or 1")
            flags = flags.astype(bool)

        self.flags = _frozen(flags)

    def __len__(self):
        return len(self.flags)

    @property
    def outliers_cnt(self):
        """Count of labeled outliers."""
        return int(numpy.count_nonzero(self.flags))


class FunctionalDataset(object):
    """
    This class holds n curves evaluated on a shared grid:
    * grid   - the 'Grid' object
    * values - n x m matrix, row i is observation x_i on the grid
    * labels - 'LabelVector' object or 'None'
    * meta   - dictionary with free-form provenance information (name of the
               data generating process, seed, outlier ratio, etc)

    Instances are immutable, use 'replace()' to derive a modified copy.
    """

    def __init__(self, grid, values, labels=None, meta=None):
        if not isinstance(grid, Grid):
            grid = Grid(grid)

        try:
            values = numpy.asarray(values, dtype=float)
        except (TypeError, ValueError) as err:
            raise Error("curve values are not real numbers: %s" % err)

        if values.ndim != 2:
            raise Error("curve values have to be an n x m matrix, got an "
                        "array of shape %s" % (values.shape, ))
        if values.shape[1] != len(grid):
            raise Error("curves have %d values, but the grid has %d points"
                        % (values.shape[1], len(grid)))
        if not numpy.all(numpy.isfinite(values)):
            raise Error("curve values have to be finite")

        if labels is not None:
            if not isinstance(labels, LabelVector):
                labels = LabelVector(labels)
            if len(labels) != values.shape[0]:
                raise Error("%d labels for %d observations"
                            % (len(labels), values.shape[0]))

        self.grid = grid
        self.values = _frozen(values)
        self.labels = labels
        self.meta = dict(meta or {})

    @property
    def n(self):
        """Count of observations."""
        return self.values.shape[0]

    @property
    def m(self):
        """Count of grid points."""
        return self.values.shape[1]

    def replace(self, values=None, labels=None, meta=None):
        """
        Return a copy of this data set with 'values', 'labels' or 'meta'
        substituted. The grid is always kept.
        """

        if values is None:
            values = self.values
        if labels is None:
            labels = self.labels
        if meta is None:
            meta = self.meta

        return FunctionalDataset(self.grid, values, labels, meta)

    def subset(self, mask):
        """Return the data set restricted to the rows selected by 'mask'."""

        mask = numpy.asarray(mask)
        labels = None
        if self.labels is not None:
            labels = self.labels.flags[mask]

        return FunctionalDataset(self.grid, self.values[mask], labels,
                                 self.meta)


def _parse_float(cell, row_num, col_num, path):
    """Parse CSV cell 'cell' as a finite real number."""

    try:
        value = float(cell)
    except ValueError:
        raise Error("non-numeric cell '%s' in row %d, column %d of '%s'"
                    % (cell, row_num + 1, col_num + 1, path))

    if not numpy.isfinite(value):
        raise Error("non-finite cell '%s' in row %d, column %d of '%s'"
                    % (cell, row_num + 1, col_num + 1, path))

    return value


def _read_rows(path):
    """Read the CSV file 'path' and return the list of non-empty rows."""

    try:
        with io.open(path, "r", encoding="utf-8", newline="") as f_csv:
            rows = [row for row in csv.reader(f_csv) if row]
    except IOError as err:
        raise Error("cannot read CSV file '%s': %s" % (path, err))
    except csv.Error as err:
        raise Error("cannot parse CSV file '%s': %s" % (path, err))

    return rows


def load_csv(path, has_header=False, label_column=None):
    """
    Load a functional data set from CSV file 'path'. Rows become
    observations. The 'has_header' argument says whether the first row is a
    header, and 'label_column' is the name of the header column containing
    0/1 outlier labels ('None' if there are no labels).
    """

    rows = _read_rows(path)
    if not rows or (has_header and len(rows) < 2):
        raise Error("CSV file '%s' contains no observations" % path)

    header = None
    if has_header:
        header = [cell.strip() for cell in rows[0]]
        rows = rows[1:]

    width = len(header) if header is not None else len(rows[0])
    for num, row in enumerate(rows):
        if len(row) != width:
            raise Error("ragged rows in CSV file '%s': row %d has %d cells, "
                        "expected %d" % (path, num + 1, len(row), width))

    label_idx = None
    if label_column is not None:
        if header is None or label_column not in header:
            raise Error("label column '%s' is missing in CSV file '%s'"
                        % (label_column, path))
        label_idx = header.index(label_column)

    value_idx = [idx for idx in range(width) if idx != label_idx]
    if not value_idx:
        raise Error("CSV file '%s' contains no value columns" % path)

    values = numpy.empty((len(rows), len(value_idx)))
    labels = None
    if label_idx is not None:
        labels = numpy.empty(len(rows), dtype=bool)

    for row_num, row in enumerate(rows):
        for col, idx in enumerate(value_idx):
            values[row_num, col] = _parse_float(row[idx], row_num, idx, path)
        if labels is not None:
            cell = row[label_idx].strip()
            if cell not in ("0", "1"):
                raise Error("label '%s' in row %d of '%s' is not 0 or 1"
                            % (cell, row_num + 1, path))
            labels[row_num] = cell == "1"

    grid = None
    if header is not None:
        try:
            grid = [float(header[idx]) for idx in value_idx]
        except ValueError:
            grid = None

    if grid is None:
        grid = numpy.arange(len(value_idx), dtype=float)

    _log.debug("loaded %d curves with %d grid points from '%s'"
               % (values.shape[0], values.shape[1], path))

    return FunctionalDataset(grid, values, labels, {"source": path})


def write_csv(dataset, file_obj, header=True):
    """
    Write data set 'dataset' to the text file object 'file_obj' in the CSV
    format 'load_csv()' understands. The label column is written if the data
    set has labels, which requires the header.
    """

    writer = csv.writer(file_obj, lineterminator="\n")
    has_labels = dataset.labels is not None

    if has_labels and not header:
        raise Error("labeled data sets can only be written with the header")

    if header:
        row = [format_float(point) for point in dataset.grid.points]
        if has_labels:
            row.append(LABEL_COLUMN)
        writer.writerow(row)

    for idx in range(dataset.n):
        row = [format_float(value) for value in dataset.values[idx]]
        if has_labels:
            row.append("1" if dataset.labels.flags[idx] else "0")
        writer.writerow(row)


def to_derivative(dataset):
    """
    Return the data set of the first derivatives of the curves of 'dataset'.
    The derivatives are estimated with central differences
    (x_{i+1} - x_{i-1}) / (t_{i+1} - t_{i-1}) at the interior grid points and
    with one-sided differences at the two ends. The grid and the labels are
    kept.
    """

    if dataset.m < 3:
        raise Error("derivatives need at least 3 grid points, got %d"
                    % dataset.m)

    t = dataset.grid.points
    x = dataset.values
    deriv = numpy.empty_like(x)

    deriv[:, 1:-1] = (x[:, 2:] - x[:, :-2]) / (t[2:] - t[:-2])
    deriv[:, 0] = (x[:, 1] - x[:, 0]) / (t[1] - t[0])
    deriv[:, -1] = (x[:, -1] - x[:, -2]) / (t[-1] - t[-2])

    meta = dict(dataset.meta)
    meta["derivative"] = True
    return dataset.replace(values=deriv, meta=meta)
