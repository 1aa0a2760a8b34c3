#!/usr/bin/env python
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
A tool for detecting outliers in functional data by embedding curves with
multidimensional scaling or ISOMAP and scoring them with the local outlier
factor. It generates labeled synthetic data sets, computes embeddings and
scores, runs replicated benchmarks and plots embeddings. File formats are
described in docs/README.
"""

# Disable the following pylint recommendations:
#   * Too few public methods (R0903)
#   * Too many statements (R0915)
#   * Too many branches (R0912)
# pylint: disable=R0903
# pylint: disable=R0915
# pylint: disable=R0912

import argparse
import sys
import io
import csv
import json
import time
import logging
import traceback
from fgeomtools import (Bench, Distance, Embed, Functional, Generate, Lof,
                        Plot)
from fgeomtools.Helpers import (check_output_path, format_float, human_time,
                                sidecar_path)

VERSION = "1.0"

# Exit statuses
STATUS_OK = 0
STATUS_VALIDATION = 1
STATUS_RUNTIME = 2

# Module errors which mean that the input or the arguments are bad
_VALIDATION_ERRORS = (Functional.Error, Distance.Error, Embed.Error,
                      Lof.Error, Generate.Error, Bench.Error, Plot.Error)

log = logging.getLogger()  # pylint: disable=C0103


def print_error_with_tb(msgformat, *args):
    """
    Print an error message, and the traceback of the exception being handled
    if debugging messages are enabled.
    """

    if sys.exc_info()[0] and log.isEnabledFor(logging.DEBUG):
        log.debug("An error occurred, here is the traceback:\n%s",
                  traceback.format_exc().rstrip())

    if args:
        errmsg = msgformat % args
    else:
        errmsg = str(msgformat)
    log.error(errmsg)
    return errmsg


def error_out(msgformat, *args, **kwargs):
    """
    Print an error message, print the machine-readable JSON error line to
    stderr and terminate program execution. The 'status' keyword argument is
    the exit status (validation error by default), 'kind' is the error kind
    reported in the JSON line.
    """

    status = kwargs.get("status", STATUS_VALIDATION)
    kind = kwargs.get("kind", "validation")

    errmsg = print_error_with_tb(msgformat, *args)
    sys.stderr.write(json.dumps({"error": errmsg, "kind": kind,
                                 "status": status}, sort_keys=True) + "\n")
    raise SystemExit(status)


class ArgumentParser(argparse.ArgumentParser):
    """
    The standard argument parser exits with status 2 on bad arguments, which
    we use for run-time errors. This parser reports bad arguments as
    validation errors.
    """

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("%s: error: %s\n" % (self.prog, message))
        sys.stderr.write(json.dumps({"error": message, "kind": "usage",
                                     "status": STATUS_VALIDATION},
                                    sort_keys=True) + "\n")
        raise SystemExit(STATUS_VALIDATION)


class RunManifest(object):
    """
    The provenance record written next to the outputs of every command: the
    command, its arguments, the resolved configuration, the seed, the input
    and output files, the tool version and the time-stamp. Running the same
    command line again reproduces the outputs byte-for-byte.
    """

    def __init__(self, command, argv, config, seed=None):
        self.command = command
        self.argv = list(argv)
        self.config = config
        self.seed = seed
        self.inputs = []
        self.outputs = []
        self.version = VERSION
        self.timestamp = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())

    def to_dict(self):
        """Return the manifest as a JSON-compatible dictionary."""
        return {"command": self.command, "argv": self.argv,
                "config": self.config, "seed": self.seed,
                "inputs": self.inputs, "outputs": self.outputs,
                "version": self.version, "timestamp": self.timestamp}

    def write(self, file_obj):
        """Write the manifest to text file object 'file_obj' as JSON."""
        json.dump(self.to_dict(), file_obj, indent=2, sort_keys=True)
        file_obj.write("\n")


def write_output(manifest, path, writer):
    """
    Create output file 'path', call 'writer' with the file object and record
    the file in 'manifest'. Failures to write are run-time errors.
    """

    try:
        check_output_path(path)
        with io.open(path, "w", encoding="utf-8", newline="") as file_obj:
            writer(file_obj)
    except IOError as err:
        error_out("cannot write output file '%s': %s", path, err,
                  status=STATUS_RUNTIME, kind="io")

    manifest.outputs.append(path)
    log.debug("wrote '%s'" % path)


def finish(manifest, output):
    """Write the manifest of the command which produced 'output'."""

    path = sidecar_path(output, ".manifest.json")
    write_output(manifest, path, manifest.write)
    log.info("outputs: %s" % ", ".join(manifest.outputs))


def new_manifest(args, config, seed=None):
    """Create the 'RunManifest' object of the command run by 'args'."""
    return RunManifest(args.command, args.argv, config, seed)


def load_dataset(args, manifest):
    """
    Load the functional data set given by the 'input' argument. Without an
    explicit '--label-column', the "label" column is used if the header has
    one. The derivatives are returned if '--deriv' was given.
    """

    path = args.input
    has_header = not args.no_header
    label_column = args.label_column

    if has_header and label_column is None:
        try:
            with io.open(path, "r", encoding="utf-8", newline="") as f_csv:
                header = next(csv.reader(f_csv), [])
            if Functional.LABEL_COLUMN in [cell.strip() for cell in header]:
                label_column = Functional.LABEL_COLUMN
        except (IOError, csv.Error):
            # 'load_csv()' reports the problem
            pass

    dataset = Functional.load_csv(path, has_header, label_column)
    manifest.inputs.append(path)

    if args.deriv:
        dataset = Functional.to_derivative(dataset)

    log.info("loaded %d curves with %d grid points from '%s'"
             % (dataset.n, dataset.m, path))
    return dataset


def embed_matrix(method, matrix):
    """
    Return the distance matrix classical MDS has to embed for embedding
    method 'method': the matrix itself for MDS, the geodesic distances for
    ISOMAP.
    """

    name, k = method
    if name == "mds":
        return matrix
    if k == "max":
        k = matrix.n - 1
    return Embed.geodesic_distances(matrix, k)


def generate_command(args):
    """
    Generate a labeled synthetic data set and write it as CSV, together with
    the provenance record of the generator ("<output>.meta.json") and the
    run manifest.
    """

    seed = 0 if args.seed is None else args.seed
    cfg = Generate.DgpConfig(args.dgp, n=args.n, r=args.r, m=args.m,
                             seed=seed, params=dict(args.param or []))
    dataset = Generate.generate(cfg)

    manifest = new_manifest(args, cfg.to_dict(), seed)
    write_output(manifest, args.output,
                 lambda f_obj: Functional.write_csv(dataset, f_obj))
    write_output(manifest, sidecar_path(args.output, ".meta.json"),
                 lambda f_obj: Generate.write_meta(dataset, f_obj))

    log.info("generated %d curves of DGP '%s', %d outliers"
             % (dataset.n, cfg.name, dataset.labels.outliers_cnt))
    finish(manifest, args.output)


def embed_command(args):
    """
    Compute the pairwise distances of the curves and embed them. Writes the
    embedding coordinates, the full eigenvalue spectrum
    ("<output>.eigenvalues.csv"), the goodness of fit for every dimension
    ("<output>.gof.csv") and the run manifest.
    """

    config = {"metric": str(args.metric), "method": args.method_text,
              "dim": args.dim, "deriv": args.deriv}
    manifest = new_manifest(args, config)
    dataset = load_dataset(args, manifest)

    start = time.time()
    matrix = Distance.pairwise(dataset, args.metric)
    embedding = Embed.classical_mds(embed_matrix(args.method, matrix),
                                    args.dim)
    log.info("computed the %d-dimensional embedding in %s, GOF %.4f"
             % (args.dim, human_time(time.time() - start), embedding.gof))

    write_output(manifest, args.output,
                 lambda f_obj: Embed.write_csv(embedding, f_obj,
                                               dataset.labels))
    write_output(manifest, sidecar_path(args.output, ".eigenvalues.csv"),
                 lambda f_obj: Embed.write_eigenvalues(embedding, f_obj))

    gofs = Embed.gof_table(embedding.eigenvalues, embedding.n)
    write_output(manifest, sidecar_path(args.output, ".gof.csv"),
                 lambda f_obj: Embed.write_gof_table(gofs, f_obj))

    if args.save_distances:
        write_output(manifest, args.save_distances,
                     lambda f_obj: Distance.write_csv(matrix, f_obj))

    finish(manifest, args.output)


def score_command(args):
    """
    Compute the LOF scores of an embedding (Euclidean distances between the
    coordinates) or of a distance matrix.
    """

    lof_cfg = Lof.LofConfig(args.minpts)
    config = {"min_pts": args.minpts}
    manifest = new_manifest(args, config)

    labels = None
    if args.embedding:
        embedding, labels = Embed.read_csv(args.embedding)
        manifest.inputs.append(args.embedding)
        matrix = Distance.euclidean(embedding.coords,
                                    "euclidean(%dd)" % embedding.d1)
    else:
        matrix = Distance.read_csv(args.distances)
        manifest.inputs.append(args.distances)

    config["min_pts"] = lof_cfg.resolve(matrix.n)
    scores = Lof.lof_from_distances(matrix, lof_cfg)

    log.info("scored %d observations with minPts %d"
             % (matrix.n, config["min_pts"]))
    if labels is not None and 0 < labels.outliers_cnt < len(labels):
        log.info("AUC of the scores for the labels: %.4f"
                 % Bench.auc(scores, labels))

    write_output(manifest, args.output,
                 lambda f_obj: Lof.write_csv(scores, f_obj, labels))
    finish(manifest, args.output)


def benchmark_config(args):
    """
    Build the 'Bench.BenchmarkConfig' object from the configuration file and
    the command-line flags, flags override the file values.
    """

    fields = {}
    if args.config:
        try:
            with io.open(args.config, "r", encoding="utf-8") as f_config:
                fields = json.load(f_config)
        except (IOError, ValueError) as err:
            error_out("cannot load benchmark configuration '%s': %s",
                      args.config, err)
        if not isinstance(fields, dict):
            error_out("benchmark configuration '%s' is not a JSON object",
                      args.config)

    if args.dgp:
        fields["dgps"] = [{"name": name} for name in args.dgp]
    if args.method:
        fields["methods"] = args.method
    if args.r:
        fields["r_values"] = args.r
    if args.replications is not None:
        fields["B"] = args.replications
    if args.seed is not None:
        fields["base_seed"] = args.seed
    if args.embed_dim is not None:
        fields["embed_dim"] = args.embed_dim
    if args.minpts is not None:
        fields["min_pts"] = args.minpts

    for key in ("dgps", "methods", "r_values"):
        if key not in fields:
            error_out("the benchmark configuration has no '%s', use "
                      "'--config' or the command-line flags", key)

    if not isinstance(fields["dgps"], list):
        error_out("'dgps' of the benchmark configuration has to be a list")
    for dgp in fields["dgps"]:
        if isinstance(dgp, dict):
            if args.n is not None:
                dgp["n"] = args.n
            if args.m is not None:
                dgp["m"] = args.m

    return Bench.BenchmarkConfig.from_dict(fields)


def benchmark_command(args):
    """
    Run the replicated benchmark. Writes the records CSV, the summary
    ("<output>.summary.json"), the wall times ("<output>.timings.csv") and
    the run manifest.
    """

    cfg = benchmark_config(args)
    manifest = new_manifest(args, cfg.to_dict(), cfg.base_seed)
    if args.config:
        manifest.inputs.append(args.config)

    result = Bench.run_benchmark(cfg, jobs=args.jobs)

    for entry in result.summary:
        if entry["median"] is None:
            log.warning("DGP '%s', method '%s', r=%g: all %d cells failed"
                        % (entry["dgp"], entry["method"], entry["r"],
                           entry["count"]))
            continue
        log.info("DGP '%s', method '%s', r=%g: median AUC %.4f "
                 "(quartiles %.4f-%.4f)"
                 % (entry["dgp"], entry["method"], entry["r"],
                    entry["median"], entry["q1"], entry["q3"]))

    write_output(manifest, args.output,
                 lambda f_obj: Bench.write_records_csv(result, f_obj))
    write_output(manifest, sidecar_path(args.output, ".summary.json"),
                 lambda f_obj: Bench.write_summary_json(result, f_obj))
    write_output(manifest, sidecar_path(args.output, ".timings.csv"),
                 lambda f_obj: Bench.write_timings_csv(result, f_obj))
    finish(manifest, args.output)


def write_comparison(rows, file_obj):
    """Write the dimension sensitivity table 'rows' to 'file_obj'."""

    writer = csv.writer(file_obj, lineterminator="\n")
    writer.writerow(["dim1", "dim2", "spearman", "gof1", "gof2"])
    for dim1, dim2, rho, gof1, gof2 in rows:
        writer.writerow([dim1, dim2, format_float(rho), format_float(gof1),
                         format_float(gof2)])


def gof_command(args):
    """
    Write the goodness of fit of the embedding for dimensions 1 to
    '--max-dim'. With '--compare', also compare LOF scores on embeddings of
    the listed dimensions ("<output>.compare.csv").
    """

    config = {"metric": str(args.metric), "method": args.method_text,
              "max_dim": args.max_dim, "compare": args.compare,
              "deriv": args.deriv, "min_pts": args.minpts}
    manifest = new_manifest(args, config)
    dataset = load_dataset(args, manifest)

    matrix = embed_matrix(args.method,
                          Distance.pairwise(dataset, args.metric))
    spectrum = Embed.classical_mds(matrix, 1).eigenvalues
    gofs = Embed.gof_table(spectrum, args.max_dim)
    write_output(manifest, args.output,
                 lambda f_obj: Embed.write_gof_table(gofs, f_obj))

    if args.compare:
        rows = Bench.dimension_sensitivity(matrix, args.compare,
                                           Lof.LofConfig(args.minpts))
        for dim1, dim2, rho, _, _ in rows:
            log.info("Spearman correlation of LOF scores in %d and %d "
                     "dimensions: %.4f" % (dim1, dim2, rho))
        write_output(manifest, sidecar_path(args.output, ".compare.csv"),
                     lambda f_obj: write_comparison(rows, f_obj))

    finish(manifest, args.output)


def plot_command(args):
    """Render the embedding as an SVG scatterplot matrix."""

    manifest = new_manifest(args, {"scores": args.scores})
    embedding, labels = Embed.read_csv(args.input)
    manifest.inputs.append(args.input)

    scores = None
    if args.scores:
        scores = Lof.read_csv(args.scores)
        manifest.inputs.append(args.scores)

    svg = Plot.render_svg(embedding, scores, labels, title=args.input)
    write_output(manifest, args.output, lambda f_obj: f_obj.write(svg))
    finish(manifest, args.output)


def positive_int(text):
    """Argument type: a positive integer."""

    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("'%s' is not an integer" % text)
    if value < 1:
        raise argparse.ArgumentTypeError("'%s' is not positive" % text)
    return value


def metric_spec(text):
    """Argument type: a distance measure."""

    try:
        return Distance.MetricSpec.parse(text)
    except Distance.Error as err:
        raise argparse.ArgumentTypeError(str(err))


def embed_method(text):
    """Argument type: "mds" or "isomap:<k>" where 'k' may be "max"."""

    split = [x.strip() for x in text.lower().split(":")]
    if split == ["mds"]:
        return ("mds", None)
    if len(split) == 2 and split[0] == "isomap":
        if split[1] == "max":
            return ("isomap", "max")
        return ("isomap", positive_int(split[1]))
    raise argparse.ArgumentTypeError("bad embedding method '%s', expected "
                                     "'mds' or 'isomap:<k>'" % text)


def dgp_param(text):
    """Argument type: a "name=value" DGP parameter."""

    name, sep, value = text.partition("=")
    try:
        if not sep or not name.strip():
            raise ValueError
        return (name.strip(), float(value))
    except ValueError:
        raise argparse.ArgumentTypeError("bad DGP parameter '%s', expected "
                                         "'name=value'" % text)


def dims_list(text):
    """Argument type: a comma-separated list of embedding dimensions."""
    return [positive_int(dim) for dim in text.split(",")]


def add_dataset_arguments(parser):
    """Add the arguments describing the input data set to 'parser'."""

    # Mandatory command-line argument - the data set
    text = "the CSV file with the curves, one observation per row"
    parser.add_argument("input", help=text)

    # The --no-header option
    text = "the CSV file has no header row"
    parser.add_argument("--no-header", action="store_true", help=text)

    # The --label-column option
    text = "the header column with the 0/1 outlier labels (default: " \
           "\"%s\" if present)" % Functional.LABEL_COLUMN
    parser.add_argument("--label-column", help=text)

    # The --metric option
    text = "the distance measure: lp:<p>, wasserstein1, dtw or " \
           "dtw:<window> (default: lp:2)"
    parser.add_argument("--metric", type=metric_spec, default="lp:2",
                        help=text)

    # The --method option
    text = "the embedding method: mds or isomap:<k>, 'k' may be 'max' " \
           "(default: mds)"
    parser.add_argument("--method", dest="method_text", default="mds",
                        help=text)

    # The --deriv option
    text = "use the derivatives of the curves"
    parser.add_argument("--deriv", action="store_true", help=text)


def add_global_arguments(parser, suppress=False):
    """
    Add the options shared by all the commands to 'parser'. With 'suppress',
    options which are not given get no default value.
    """

    def default(value):
        """The default of an option."""
        return argparse.SUPPRESS if suppress else value

    # The --seed option
    text = "the random seed (generate) or the base seed (benchmark)"
    parser.add_argument("--seed", type=int, default=default(None), help=text)

    # The --output option
    text = "the output file (mandatory); sidecar files are named after it"
    parser.add_argument("-o", "--output", default=default(None), help=text)

    # The --jobs option
    text = "count of worker threads (default: 1)"
    parser.add_argument("--jobs", type=positive_int, default=default(1),
                        help=text)

    # The --quiet option
    text = "be quiet"
    parser.add_argument("-q", "--quiet", action="store_true",
                        default=default(False), help=text)

    # The --debug option
    text = "print debugging information"
    parser.add_argument("-d", "--debug", action="store_true",
                        default=default(False), help=text)


def parse_arguments(argv=None):
    """A helper function which parses the input arguments."""
    text = sys.modules[__name__].__doc__
    parser = ArgumentParser(description=text, prog="fgeomtool")

    # The --version option
    parser.add_argument("--version", action="version",
                        version="%(prog)s " + "%s" % VERSION)

    # The global options go before or after the command, the command parsers
    # only override the values given after it
    add_global_arguments(parser)
    common = argparse.ArgumentParser(add_help=False)
    add_global_arguments(common, suppress=True)

    subparsers = parser.add_subparsers(title="commands", dest="command")
    subparsers.required = True

    #
    # Create parser for the "generate" command
    #
    text = "generate a labeled synthetic data set"
    parser_gen = subparsers.add_parser("generate", help=text,
                                       parents=[common])
    parser_gen.set_defaults(func=generate_command)

    # The --dgp option
    text = "the data generating process, one of: " + \
           ", ".join(sorted(Generate.GENERATORS))
    parser_gen.add_argument("--dgp", required=True, help=text)

    # The --n option
    text = "count of observations (default: 100)"
    parser_gen.add_argument("--n", type=int, default=100, help=text)

    # The --r option
    text = "the outlier ratio within [0, %g] (default: 0.1)" \
           % Generate.MAX_OUTLIER_RATIO
    parser_gen.add_argument("--r", type=float, default=0.1, help=text)

    # The --m option
    text = "count of grid points (default: 50)"
    parser_gen.add_argument("--m", type=int, default=50, help=text)

    # The --param option
    text = "override a DGP parameter, e.g. 'shift=4'; may be repeated"
    parser_gen.add_argument("--param", type=dgp_param, action="append",
                            help=text)

    #
    # Create parser for the "embed" command
    #
    text = "embed the curves of a data set"
    parser_embed = subparsers.add_parser("embed", help=text,
                                         parents=[common])
    parser_embed.set_defaults(func=embed_command)
    add_dataset_arguments(parser_embed)

    # The --dim option
    text = "the embedding dimension (default: 5)"
    parser_embed.add_argument("--dim", type=positive_int, default=5,
                              help=text)

    # The --save-distances option
    text = "also write the distance matrix to this CSV file"
    parser_embed.add_argument("--save-distances", help=text)

    #
    # Create parser for the "score" command
    #
    text = "compute the LOF outlier scores"
    parser_score = subparsers.add_parser("score", help=text,
                                         parents=[common])
    parser_score.set_defaults(func=score_command)

    group = parser_score.add_mutually_exclusive_group(required=True)

    # The --embedding option
    text = "the embedding CSV file to score"
    group.add_argument("--embedding", help=text)

    # The --distances option
    text = "the distance matrix CSV file to score"
    group.add_argument("--distances", help=text)

    # The --minpts option
    text = "the LOF neighborhood size (default: 0.75 n)"
    parser_score.add_argument("--minpts", type=int, help=text)

    #
    # Create parser for the "benchmark" command
    #
    text = "run the replicated benchmark"
    parser_bench = subparsers.add_parser("benchmark", help=text,
                                         parents=[common])
    parser_bench.set_defaults(func=benchmark_command)

    # The --config option
    text = "the JSON benchmark configuration file"
    parser_bench.add_argument("--config", help=text)

    # The --dgp option
    text = "the data generating process; may be repeated"
    parser_bench.add_argument("--dgp", action="append", help=text)

    # The --method option
    text = "a scoring method '<metric>+<pipeline>[+deriv]', e.g. " \
           "'lp:2+mds'; may be repeated"
    parser_bench.add_argument("--method", action="append", help=text)

    # The --r option
    text = "an outlier ratio; may be repeated"
    parser_bench.add_argument("--r", type=float, action="append", help=text)

    # The -B option
    text = "count of replications"
    parser_bench.add_argument("-B", "--replications", type=positive_int,
                              help=text)

    # The --n option
    text = "count of observations of every DGP"
    parser_bench.add_argument("--n", type=int, help=text)

    # The --m option
    text = "count of grid points of every DGP"
    parser_bench.add_argument("--m", type=int, help=text)

    # The --embed-dim option
    text = "the default embedding dimension"
    parser_bench.add_argument("--embed-dim", type=positive_int, help=text)

    # The --minpts option
    text = "the LOF neighborhood size (default: 0.75 n)"
    parser_bench.add_argument("--minpts", type=int, help=text)

    #
    # Create parser for the "gof" command
    #
    text = "goodness of fit versus the embedding dimension"
    parser_gof = subparsers.add_parser("gof", help=text, parents=[common])
    parser_gof.set_defaults(func=gof_command)
    add_dataset_arguments(parser_gof)

    # The --max-dim option
    text = "the largest embedding dimension (default: 10)"
    parser_gof.add_argument("--max-dim", type=positive_int, default=10,
                            help=text)

    # The --compare option
    text = "compare LOF scores on embeddings of these dimensions, " \
           "e.g. '2,5,20'"
    parser_gof.add_argument("--compare", type=dims_list, help=text)

    # The --minpts option
    text = "the LOF neighborhood size for '--compare' (default: 0.75 n)"
    parser_gof.add_argument("--minpts", type=int, help=text)

    #
    # Create parser for the "plot" command
    #
    text = "render an embedding as an SVG scatterplot matrix"
    parser_plot = subparsers.add_parser("plot", help=text, parents=[common])
    parser_plot.set_defaults(func=plot_command)

    # Mandatory command-line argument - the embedding
    text = "the embedding CSV file"
    parser_plot.add_argument("input", help=text)

    # The --scores option
    text = "the score CSV file used to shade the points"
    parser_plot.add_argument("--scores", help=text)

    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    args.argv = argv

    if not args.output:
        parser.error("the following arguments are required: -o/--output")

    if hasattr(args, "method_text"):
        try:
            args.method = embed_method(args.method_text)
        except argparse.ArgumentTypeError as err:
            parser.error(str(err))

    return args


def setup_logger(loglevel):
    """
    A helper function which configures the root logger. The log level is
    initialized to 'loglevel'.
    """

    # Esc-sequences for coloured output, only used on a terminal
    if sys.stderr.isatty():
        esc_red = '\033[91m'     # pylint: disable=W1401
        esc_yellow = '\033[93m'  # pylint: disable=W1401
        esc_green = '\033[92m'   # pylint: disable=W1401
        esc_end = '\033[0m'      # pylint: disable=W1401
    else:
        esc_red = esc_yellow = esc_green = esc_end = ""

    class MyFormatter(logging.Formatter):
        """
        A custom formatter for logging messages. The reason we have it is to
        have different format for different log levels.
        """

        def __init__(self, fmt=None, datefmt=None):
            """The constructor."""
            logging.Formatter.__init__(self, fmt, datefmt)

            self._orig_fmt = fmt
            # Prefix with green-colored time-stamp, as well as with module name
            # and line number
            self._dbg_fmt = "[" + esc_green + "%(asctime)s" + esc_end + \
                            "] [%(module)s,%(lineno)d] " + fmt

        def format(self, record):
            """
            The formatter which which simply prefixes all debugging messages
            with a time-stamp.
            """

            if record.levelno == logging.DEBUG:
                self._style._fmt = self._dbg_fmt

            result = logging.Formatter.format(self, record)
            self._style._fmt = self._orig_fmt
            return result

    # Change log level names to something nicer than the default all-capital
    # 'INFO' etc.
    logging.addLevelName(logging.ERROR, esc_red + "error" + esc_end)
    logging.addLevelName(logging.WARNING, esc_yellow + "warning" + esc_end)
    logging.addLevelName(logging.DEBUG, "debug")
    logging.addLevelName(logging.INFO, "info")

    # Drop the handler of an earlier call
    for handler in list(log.handlers):
        if getattr(handler, "fgeomtool", False):
            log.removeHandler(handler)

    log.setLevel(loglevel)
    formatter = MyFormatter("fgeomtool: %(levelname)s: %(message)s",
                            "%H:%M:%S")
    where = logging.StreamHandler(sys.stderr)
    where.fgeomtool = True
    where.setFormatter(formatter)
    log.addHandler(where)


def main(argv=None):
    """Script entry point."""
    args = parse_arguments(argv)

    if args.quiet:
        loglevel = logging.WARNING
    elif args.debug:
        loglevel = logging.DEBUG
    else:
        loglevel = logging.INFO

    setup_logger(loglevel)

    if args.quiet and args.debug:
        error_out("--quiet and --debug cannot be used together")

    start = time.time()
    try:
        args.func(args)
    except Embed.ErrorNumeric as err:
        error_out(err, status=STATUS_RUNTIME, kind="numeric")
    except _VALIDATION_ERRORS as err:
        error_out(err)
    except MemoryError:
        error_out("out of memory", status=STATUS_RUNTIME, kind="runtime")

    log.debug("the '%s' command took %s"
              % (args.command, human_time(time.time() - start)))
    return STATUS_OK

if __name__ == "__main__":
    sys.exit(main())
