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
This module implements the replicated benchmark of outlier scoring pipelines
and provides the following API.
  1. 'auc()' and 'spearman()' - the performance and agreement statistics.
  2. Method class - a scoring pipeline: a distance measure, LOF on the raw
     distances or on an MDS or ISOMAP embedding, optionally applied to the
     derivatives of the curves.
  3. BenchmarkConfig class - DGP templates, methods, outlier ratios, the
     replications count B and the base seed.
  4. 'run_benchmark()' - runs every method on every replication and returns
     a BenchmarkResult object with one AucRecord per (DGP, method, r,
     replication) and the per-(DGP, method, r) summary.
  5. 'dimension_sensitivity()' - agreement of LOF scores computed on
     embeddings of different dimensionality.
  6. Writers for the record CSV, the timings CSV and the summary JSON.

Every replication is an independent work unit. The data set of a unit is
generated from a seed derived from the base seed and the unit coordinates
(DGP index, ratio index, replication index), all the methods are applied to
the same data set, and the records are sorted by their coordinates before
aggregation. This is why the results do not depend on the amount of worker
threads. Wall times are not deterministic, so they are kept out of the
record CSV and written to a separate timings CSV.

A failing cell (e.g. an embedding which cannot be computed) does not abort
the benchmark: it is recorded with an empty AUC and the error message.

When 'n_rule' is set for a DGP template, replications with r = 0.01 use
n = 1000 observations, so that there are enough outliers to score.
"""

# Disable the following pylint recommendations:
#   * Too many instance attributes (R0902)
#   * Too many arguments - R0913
#   * Too many local variables (R0914)
# pylint: disable=R0902
# pylint: disable=R0913
# pylint: disable=R0914

import io
import sys
import csv
import json
import time
import logging
import threading
import numpy
from scipy import stats
from six import reraise
from six.moves import queue as Queue
from fgeomtools import Distance, Embed, Functional, Generate, Lof
from fgeomtools.Helpers import format_float, human_time

_log = logging.getLogger(__name__)  # pylint: disable=C0103

# Observations count used at r = 0.01 when the DGP template opts in
RARE_OUTLIER_RATIO = 0.01
RARE_OUTLIER_N = 1000

# Columns of the record CSV, in this order
RECORD_FIELDS = ("dgp", "method", "r", "replication", "seed", "n", "auc",
                 "spearman_raw", "error")


class Error(Exception):
    """
    A class for exceptions generated by this module. We currently support only
    one type of exceptions, and we basically throw human-readable problem
    description in case of errors.
    """
    pass


# Exceptions which mean that a benchmark cell failed
_CELL_ERRORS = (Error, Functional.Error, Distance.Error, Embed.Error,
                Lof.Error, Generate.Error)


def _as_array(values):
    """Return the scores or labels of 'values' as a numpy array."""
    if isinstance(values, Lof.ScoreVector):
        return values.scores
    if isinstance(values, Functional.LabelVector):
        return values.flags
    return numpy.asarray(values)


def auc(scores, labels):
    """
    Return the area under the ROC curve of 'scores' (a 'Lof.ScoreVector' or
    a vector) for 'labels' (a 'Functional.LabelVector' or a 0/1 vector). This
    is the Mann-Whitney statistic with average ranks for ties, i.e., the
    probability that an outlier gets a higher score than an inlier, ties
    counting one half.
    """

    scores = numpy.asarray(_as_array(scores), dtype=float)
    labels = numpy.asarray(_as_array(labels)).astype(bool)

    if len(scores) != len(labels):
        raise Error("%d scores for %d labels" % (len(scores), len(labels)))

    positives = int(numpy.count_nonzero(labels))
    negatives = len(labels) - positives
    if not positives or not negatives:
        raise Error("AUC needs both outliers and inliers, got %d outliers "
                    "and %d inliers" % (positives, negatives))

    ranks = stats.rankdata(scores, method="average")
    u_statistic = ranks[labels].sum() - positives * (positives + 1) / 2.0
    return float(u_statistic / (positives * negatives))


def spearman(scores1, scores2):
    """
    Return the Spearman rank correlation of two score vectors, which is the
    Pearson correlation of their average-tie ranks.
    """

    ranks1 = stats.rankdata(_as_array(scores1), method="average")
    ranks2 = stats.rankdata(_as_array(scores2), method="average")

    if len(ranks1) != len(ranks2):
        raise Error("cannot correlate %d and %d scores"
                    % (len(ranks1), len(ranks2)))
    if len(ranks1) < 3:
        raise Error("rank correlation needs at least 3 scores")

    ranks1 = ranks1 - ranks1.mean()
    ranks2 = ranks2 - ranks2.mean()
    norm = numpy.sqrt(numpy.dot(ranks1, ranks1) * numpy.dot(ranks2, ranks2))
    if norm == 0:
        raise Error("rank correlation is undefined for constant scores")

    return float(numpy.dot(ranks1, ranks2) / norm)


class Method(object):
    """
    A scoring pipeline, parsed from "<metric>+<pipeline>[+deriv]":
    * <metric>   - a 'Distance.MetricSpec' in textual form, e.g. "lp:2";
    * <pipeline> - "raw" (LOF on the distance matrix), "mds" or "mds:<d>"
                   (LOF on the MDS embedding), "isomap:<k>" or
                   "isomap:<k>:<d>" (LOF on the ISOMAP embedding, 'k' is an
                   integer or "max" for n - 1);
    * "deriv"    - apply the pipeline to the derivatives of the curves.
    Without an explicit <d>, the benchmark embedding dimension is used.
    """

    def __init__(self, text):
        self.name = str(text).strip()
        parts = [part.strip() for part in self.name.split("+")]

        self.deriv = False
        if parts[-1].lower() == "deriv":
            self.deriv = True
            parts = parts[:-1]

        if len(parts) != 2:
            raise Error("bad method '%s', expected "
                        "'<metric>+<pipeline>[+deriv]'" % self.name)

        try:
            self.metric = Distance.MetricSpec.parse(parts[0])
        except Distance.Error as err:
            raise Error("bad method '%s': %s" % (self.name, err))

        pipeline = [x.strip().lower() for x in parts[1].split(":")]
        self.pipeline = pipeline[0]
        self.k = None
        self.dim = None

        try:
            if self.pipeline == "raw" and len(pipeline) == 1:
                pass
            elif self.pipeline == "mds" and len(pipeline) <= 2:
                if len(pipeline) == 2:
                    self.dim = int(pipeline[1])
            elif self.pipeline == "isomap" and len(pipeline) in (2, 3):
                self.k = pipeline[1] if pipeline[1] == "max" \
                         else int(pipeline[1])
                if len(pipeline) == 3:
                    self.dim = int(pipeline[2])
            else:
                raise Error("unknown pipeline '%s'" % parts[1])
        except ValueError as err:
            raise Error("bad method '%s': %s" % (self.name, err))
        except Error as err:
            raise Error("bad method '%s': %s" % (self.name, err))

        if self.dim is not None and self.dim < 1:
            raise Error("bad method '%s': the embedding dimension has to be "
                        "positive" % self.name)
        if self.k is not None and self.k != "max" and self.k < 1:
            raise Error("bad method '%s': the neighborhood size has to be "
                        "positive" % self.name)

    @property
    def distance_key(self):
        """Methods with equal keys share the distance matrix."""
        return (str(self.metric), self.deriv)

    def score(self, matrix, embed_dim, lof_cfg):
        """
        Return the 'Lof.ScoreVector' of this method for the distance matrix
        'matrix' of the (possibly differentiated) curves.
        """

        dim = self.dim if self.dim is not None else embed_dim
        if self.pipeline == "raw":
            scores = Lof.lof_from_distances(matrix, lof_cfg)
        elif self.pipeline == "mds":
            scores = Lof.lof_on_embedding(Embed.classical_mds(matrix, dim),
                                          lof_cfg)
        else:
            k = matrix.n - 1 if self.k == "max" else self.k
            scores = Lof.lof_on_embedding(Embed.isomap(matrix, k, dim),
                                          lof_cfg)

        return Lof.ScoreVector(scores.scores, self.name)

    def __str__(self):
        return self.name


class BenchmarkConfig(object):
    """
    Benchmark configuration:
    * dgps      - list of 'Generate.DgpConfig' templates (their 'r' and
                  'seed' are replaced for every replication)
    * methods   - list of 'Method' objects
    * r_values  - list of outlier ratios
    * B         - replications count
    * base_seed - seed all replication seeds are derived from
    * embed_dim - default embedding dimension
    * min_pts   - LOF neighborhood size, 'None' for the default 0.75 n
    """

    def __init__(self, dgps, methods, r_values, B=500, base_seed=0,
                 embed_dim=5, min_pts=None):
        # pylint: disable=C0103
        if not dgps:
            raise Error("the benchmark needs at least one DGP")
        if not methods:
            raise Error("the benchmark needs at least one method")
        if not r_values:
            raise Error("the benchmark needs at least one outlier ratio")
        if int(B) != B or B < 1:
            raise Error("replications count B has to be a positive integer, "
                        "got %s" % B)
        if int(embed_dim) != embed_dim or embed_dim < 1:
            raise Error("embedding dimension has to be a positive integer, "
                        "got %s" % embed_dim)
        if int(base_seed) != base_seed or base_seed < 0:
            raise Error("base seed has to be a non-negative integer, got %s"
                        % base_seed)

        self.dgps = [dgp if isinstance(dgp, Generate.DgpConfig)
                     else Generate.DgpConfig.from_dict(dgp) for dgp in dgps]
        self.methods = [method if isinstance(method, Method)
                        else Method(method) for method in methods]
        self.r_values = [float(r) for r in r_values]
        self.B = int(B)
        self.base_seed = int(base_seed)
        self.embed_dim = int(embed_dim)
        self.min_pts = min_pts

        names = [str(method) for method in self.methods]
        if len(set(names)) != len(names):
            raise Error("methods have to be unique")

        # Validate the ratios against the DGP limits early
        try:
            for dgp in self.dgps:
                for r in self.r_values:
                    dgp.replace(r=r)
            self.lof_cfg = Lof.LofConfig(min_pts)
        except (Generate.Error, Lof.Error) as err:
            raise Error(str(err))

    @classmethod
    def from_dict(cls, fields):
        """Create the configuration from a dictionary (e.g. parsed JSON)."""

        known = ("dgps", "methods", "r_values", "B", "base_seed",
                 "embed_dim", "min_pts")
        unknown = sorted(set(fields) - set(known))
        if unknown:
            raise Error("unknown benchmark configuration fields: %s"
                        % ", ".join(unknown))

        try:
            return cls(**fields)
        except (TypeError, Generate.Error) as err:
            raise Error("bad benchmark configuration: %s" % err)

    def to_dict(self):
        """Return the configuration as a JSON-compatible dictionary."""
        return {"dgps": [dgp.to_dict() for dgp in self.dgps],
                "methods": [str(method) for method in self.methods],
                "r_values": list(self.r_values), "B": self.B,
                "base_seed": self.base_seed, "embed_dim": self.embed_dim,
                "min_pts": self.min_pts}


class AucRecord(object):
    """
    The outcome of one method on one replication: the coordinates ('dgp',
    'method', 'r', 'replication'), the data set 'seed' and size 'n', the
    'auc' ('None' if the cell failed), the 'spearman_raw' diagnostic
    ('None' if unavailable), the 'error' message (empty on success) and the
    'wall_time' in seconds.
    """

    def __init__(self, key, dgp, method, r, replication, seed, n, auc_value,
                 wall_time, error="", spearman_raw=None):
        if auc_value is not None and \
           not (numpy.isfinite(auc_value) and 0 <= auc_value <= 1):
            raise Error("AUC has to be within [0, 1], got %s" % auc_value)

        self.key = key
        self.dgp = dgp
        self.method = method
        self.r = r
        self.replication = replication
        self.seed = seed
        self.n = n
        self.auc = auc_value
        self.wall_time = wall_time
        self.error = error
        self.spearman_raw = spearman_raw

    def to_row(self):
        """Return the record as a row of the record CSV."""

        def number(value):
            """Format an optional number."""
            return "" if value is None else format_float(value)

        return [self.dgp, self.method, format_float(self.r), self.replication,
                self.seed, self.n, number(self.auc), number(self.spearman_raw),
                self.error]


class BenchmarkResult(object):
    """
    The benchmark outcome: 'records' is the list of 'AucRecord' objects
    sorted by (DGP, ratio, replication, method) position in the
    configuration, 'summary' is the list of per-(DGP, method, r) dictionaries
    with the count of records and errors, the median and the quartiles of
    the AUC.
    """

    def __init__(self, cfg, records):
        self.cfg = cfg
        self.records = sorted(records, key=lambda record: record.key)
        self.summary = _summarize(cfg, self.records)


def _summarize(cfg, records):
    """Aggregate 'records' per (DGP, method, r)."""

    groups = {}
    for record in records:
        dgp_idx, r_idx, _, method_idx = record.key
        groups.setdefault((dgp_idx, method_idx, r_idx), []).append(record)

    summary = []
    for (dgp_idx, method_idx, r_idx) in sorted(groups):
        group = groups[(dgp_idx, method_idx, r_idx)]
        values = [record.auc for record in group if record.auc is not None]
        entry = {"dgp": cfg.dgps[dgp_idx].name,
                 "method": str(cfg.methods[method_idx]),
                 "r": cfg.r_values[r_idx], "count": len(group),
                 "errors": len(group) - len(values),
                 "median": None, "q1": None, "q3": None}
        if values:
            q1, median, q3 = numpy.percentile(values, [25, 50, 75])
            entry.update(median=float(median), q1=float(q1), q3=float(q3))
        summary.append(entry)

    return summary


def _replication_dgp(cfg, dgp_idx, r_idx, replication):
    """Return the 'DgpConfig' of a replication."""

    template = cfg.dgps[dgp_idx]
    r = cfg.r_values[r_idx]
    seed = Generate.derive_seed(cfg.base_seed, dgp_idx, r_idx, replication)
    n = template.n
    if template.n_rule and r == RARE_OUTLIER_RATIO:
        n = RARE_OUTLIER_N
    return template.replace(r=r, seed=seed, n=n)


def _run_unit(cfg, dgp_idx, r_idx, replication):
    """
    Run all the methods on one replication and return the list of
    'AucRecord' objects.
    """

    dgp_cfg = _replication_dgp(cfg, dgp_idx, r_idx, replication)
    where = "DGP '%s', r=%g, replication %d" % (dgp_cfg.name, dgp_cfg.r,
                                                replication)
    _log.debug("running %s (seed %d)" % (where, dgp_cfg.seed))

    def record(method_idx, auc_value, wall_time, error=""):
        """Create the record of method 'method_idx'."""
        return AucRecord((dgp_idx, r_idx, replication, method_idx),
                         dgp_cfg.name, str(cfg.methods[method_idx]),
                         dgp_cfg.r, replication, dgp_cfg.seed, dgp_cfg.n,
                         auc_value, wall_time, error)

    start = time.time()
    try:
        dataset = Generate.generate(dgp_cfg)
    except _CELL_ERRORS as err:
        msg = "%s: cannot generate data: %s" % (where, err)
        _log.warning(msg)
        return [record(idx, None, time.time() - start, msg)
                for idx in range(len(cfg.methods))]

    matrices = {}
    scores = {}
    records = []
    for method_idx, method in enumerate(cfg.methods):
        start = time.time()
        try:
            key = method.distance_key
            if key not in matrices:
                curves = dataset
                if method.deriv:
                    curves = Functional.to_derivative(dataset)
                matrices[key] = Distance.pairwise(curves, method.metric)

            scores[method_idx] = method.score(matrices[key], cfg.embed_dim,
                                              cfg.lof_cfg)
            value = auc(scores[method_idx], dataset.labels)
            records.append(record(method_idx, value, time.time() - start))
        except _CELL_ERRORS as err:
            msg = "%s, method '%s': %s" % (where, method, err)
            _log.warning(msg)
            records.append(record(method_idx, None, time.time() - start, msg))

    # The rank agreement with LOF on the raw distances of the same measure
    for rec in records:
        method_idx = rec.key[3]
        method = cfg.methods[method_idx]
        for raw_idx, raw in enumerate(cfg.methods):
            if raw.pipeline != "raw" or \
               raw.distance_key != method.distance_key:
                continue
            if method_idx in scores and raw_idx in scores:
                try:
                    rec.spearman_raw = spearman(scores[method_idx],
                                                scores[raw_idx])
                except Error:
                    pass
            break

    return records


def _worker(cfg, units, results):
    """
    The worker thread: takes work units from the 'units' queue until it gets
    'None', puts the lists of records to the 'results' queue.
    """

    while True:
        unit = units.get()
        if unit is None:
            break

        # pylint: disable=W0703
        try:
            results.put(("records", _run_unit(cfg, *unit)))
        except Exception:
            # pylint: enable=W0703
            # Pass any unexpected exception to the main thread
            results.put(("error", sys.exc_info()))


def run_benchmark(cfg, jobs=1):
    """
    Run the benchmark described by 'BenchmarkConfig' object 'cfg' using
    'jobs' worker threads and return the 'BenchmarkResult' object.
    """

    units = [(dgp_idx, r_idx, replication)
             for dgp_idx in range(len(cfg.dgps))
             for r_idx in range(len(cfg.r_values))
             for replication in range(cfg.B)]

    _log.info("running %d replications of %d methods with %d job(s)"
              % (len(units), len(cfg.methods), jobs))

    start = time.time()
    records = []

    if jobs <= 1:
        for unit in units:
            records.extend(_run_unit(cfg, *unit))
    else:
        unit_queue = Queue.Queue()
        result_queue = Queue.Queue()
        for unit in units:
            unit_queue.put(unit)

        threads = []
        for _ in range(min(jobs, len(units))):
            unit_queue.put(None)
            thread = threading.Thread(target=_worker,
                                      args=(cfg, unit_queue, result_queue))
            thread.daemon = True
            thread.start()
            threads.append(thread)

        for done in range(len(units)):
            kind, payload = result_queue.get()
            if kind == "error":
                # A worker thread hit an unexpected exception and passed it
                # to us through the queue.
                reraise(payload[0], payload[1], payload[2])
            records.extend(payload)
            _log.debug("%d of %d replications done" % (done + 1, len(units)))

        for thread in threads:
            thread.join()

    result = BenchmarkResult(cfg, records)
    failed = sum(1 for record in result.records if record.error)
    _log.info("benchmark finished in %s, %d records, %d failed"
              % (human_time(time.time() - start), len(result.records),
                 failed))
    return result


def dimension_sensitivity(matrix, dims, lof_cfg=None):
    """
    Compare LOF scores computed on classical MDS embeddings of
    'DistanceMatrix' object 'matrix' for the embedding dimensions 'dims'
    (e.g. [2, 5, 20]). Returns a list of (dim1, dim2, spearman, gof1, gof2)
    tuples for consecutive dimensions.
    """

    dims = [int(dim) for dim in dims]
    if len(dims) < 2:
        raise Error("need at least two embedding dimensions to compare")
    if lof_cfg is None:
        lof_cfg = Lof.LofConfig()

    full = Embed.classical_mds(matrix, max(dims))
    scores = {}
    gofs = {}
    for dim in dims:
        embedding = Embed.Embedding(full.coords[:, :dim], full.eigenvalues,
                                    dim)
        scores[dim] = Lof.lof_on_embedding(embedding, lof_cfg)
        gofs[dim] = embedding.gof

    return [(dim1, dim2, spearman(scores[dim1], scores[dim2]), gofs[dim1],
             gofs[dim2]) for dim1, dim2 in zip(dims, dims[1:])]


def write_records_csv(result, file_obj):
    """Write the records of 'result' to text file object 'file_obj'."""

    writer = csv.writer(file_obj, lineterminator="\n")
    writer.writerow(RECORD_FIELDS)
    for record in result.records:
        writer.writerow(record.to_row())


def write_timings_csv(result, file_obj):
    """Write the wall time of every record of 'result' to 'file_obj'."""

    writer = csv.writer(file_obj, lineterminator="\n")
    writer.writerow(["dgp", "method", "r", "replication", "wall_time"])
    for record in result.records:
        writer.writerow([record.dgp, record.method, format_float(record.r),
                         record.replication, "%.6f" % record.wall_time])


def write_summary_json(result, file_obj):
    """Write the configuration and the summary of 'result' as JSON."""

    json.dump({"config": result.cfg.to_dict(), "summary": result.summary,
               "records": len(result.records)},
              file_obj, indent=2, sort_keys=True)
    file_obj.write("\n")


def records_csv_text(result):
    """Return the record CSV of 'result' as a string."""
    output = io.StringIO()
    write_records_csv(result, output)
    return output.getvalue()
