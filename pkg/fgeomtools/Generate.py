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
This module implements seeded synthetic data generating processes (DGPs) for
functional outlier detection and provides the following API.
  1. DgpConfig class - the DGP name, observations count n, outlier ratio r,
     grid size m, seed and DGP-specific parameters.
  2. Rng class and 'derive_seed()' - reproducible random streams and
     independent sub-streams for replications.
  3. The generators, each returning a labeled 'FunctionalDataset':
     'gen_taxonomy_shape()', 'gen_beta_shift()', 'gen_phase_case()',
     'gen_dgp_templates()', 'gen_sim_model()', 'gen_dgp_mixture()'.
  4. 'generate()' - runs the generator named in the configuration.
  5. The building blocks: 'bspline_basis()', 'beta_ecdf()', 'sample_gp()'.

Every DGP is defined by two functional manifolds: the common one, which
produces the inliers, and the anomalous one, which produces round(r n)
structural outliers. Only membership in the anomalous manifold is labeled.
Curves of the common manifold with unusual parameters (on-manifold
outliers) are never labeled. Observations are shuffled with the same random
stream, so the position of an observation says nothing about its label.

The random streams use the PCG64 generator of numpy. Replication
sub-streams are derived from a base seed and a tuple of non-negative integer
keys with 'derive_seed()', which hashes them with numpy's 'SeedSequence' and
takes the first 64-bit word of the generated state. The seed of a
replication thus only depends on its keys, not on the order in which
replications are run.

The "sim" models are re-specified forms of well-known functional outlier
simulation models. They keep the qualitative structure (a positive linear
trend, dominant vertical shifts, short isolated spikes, periodic shape
deviations) but are not bit-exact replicas of any package. The noise of the
sim models is a zero-mean Gaussian process with covariance exp(-|s - t|),
sampled through the Cholesky factor of its grid covariance matrix.
"""

# Disable the following pylint recommendations:
#   * Too many arguments - R0913
#   * Too many local variables (R0914)
# pylint: disable=R0913
# pylint: disable=R0914

import json
import logging
import numpy
from scipy import linalg, special, stats
from scipy.interpolate import BSpline
from fgeomtools import Functional
from fgeomtools.Helpers import outlier_count

_log = logging.getLogger(__name__)  # pylint: disable=C0103

# The largest outlier ratio the generators accept
MAX_OUTLIER_RATIO = 0.1
# The smallest grid size the generators accept
MIN_GRID_SIZE = 10
# Name of the random number generator algorithm
RNG_ALGORITHM = "PCG64"

# Default parameters of every DGP family
_SIM_DEFAULTS = {"slope": 4.0, "shift": 8.0, "spike": 6.0,
                 "spike_width": 0.04, "shape_amp": 2.0, "shift_sd": 0.0}
_DEFAULT_PARAMS = {
    "taxonomy-shape": {"inlier_sd": 3.0, "outlier_sd": 4.0},
    "beta-shift": {"shape_low": 1.0, "shape_high": 2.0, "shift_low": 0.0,
                   "shift_high": 0.5},
    "phase": {"amp_low": 0.1, "amp_high": 2.0},
    "templates-3": {"n_basis": 15, "noise": 0.1},
    "templates-4": {"n_basis": 25, "noise": 0.15},
    "sim": _SIM_DEFAULTS,
    "mixture": _SIM_DEFAULTS,
}


class Error(Exception):
    """
    A class for exceptions generated by this module. We currently support only
    one type of exceptions, and we basically throw human-readable problem
    description in case of errors.
    """
    pass


def derive_seed(seed, *keys):
    """
    Derive a 64-bit sub-stream seed from 'seed' and the non-negative integer
    'keys' (e.g. the replication index).
    """

    entropy = [int(seed)] + [int(key) for key in keys]
    if any(value < 0 for value in entropy):
        raise Error("seeds and sub-stream keys have to be non-negative")

    state = numpy.random.SeedSequence(entropy).generate_state(1, numpy.uint64)
    return int(state[0])


class Rng(object):
    """
    A seeded random stream. Identical seeds give identical streams. The
    'generator' attribute is the numpy 'Generator' object.
    """

    def __init__(self, seed):
        if int(seed) != seed or seed < 0 or seed >= 2 ** 64:
            raise Error("seeds have to be integers within [0, 2^64), got %s"
                        % seed)

        self.seed = int(seed)
        self.algorithm = RNG_ALGORITHM
        self.generator = numpy.random.Generator(numpy.random.PCG64(self.seed))

    def substream(self, *keys):
        """Return an independent 'Rng' for the sub-stream 'keys'."""
        return Rng(derive_seed(self.seed, *keys))


class DgpConfig(object):
    """
    Configuration of a data generating process:
    * name   - the DGP name, see 'generate()'
    * n      - count of observations
    * r      - outlier ratio within [0, 0.1]
    * m      - count of grid points, at least 10
    * seed   - 64-bit seed of the random stream
    * params - dictionary of DGP-specific parameters, overriding the defaults
    * n_rule - whether the benchmark should use n = 1000 when r = 0.01
    """

    def __init__(self, name, n=100, r=0.1, m=50, seed=0, params=None,
                 n_rule=True):
        try:
            r = float(r)
        except (TypeError, ValueError):
            raise Error("bad outlier ratio '%s'" % r)

        if not 0 <= r <= MAX_OUTLIER_RATIO:
            raise Error("outlier ratio has to be within [0, %g], got %g"
                        % (MAX_OUTLIER_RATIO, r))
        if int(n) != n or n < 2:
            raise Error("observations count has to be an integer of at least "
                        "2, got %s" % n)
        if int(m) != m or m < MIN_GRID_SIZE:
            raise Error("grid size has to be an integer of at least %d, "
                        "got %s" % (MIN_GRID_SIZE, m))
        if int(seed) != seed or seed < 0 or seed >= 2 ** 64:
            raise Error("seed has to be an integer within [0, 2^64), got %s"
                        % seed)

        self.name = str(name)
        self.n = int(n)
        self.r = r
        self.m = int(m)
        self.seed = int(seed)
        self.params = dict(params or {})
        self.n_rule = bool(n_rule)

    @property
    def outliers_cnt(self):
        """Count of structural outliers, round(r n)."""
        return outlier_count(self.r, self.n)

    def replace(self, **kwargs):
        """Return a copy of the configuration with some fields substituted."""

        fields = self.to_dict()
        fields.update(kwargs)
        return DgpConfig(**fields)

    def to_dict(self):
        """Return the configuration as a JSON-compatible dictionary."""
        return {"name": self.name, "n": self.n, "r": self.r, "m": self.m,
                "seed": self.seed, "params": dict(self.params),
                "n_rule": self.n_rule}

    @classmethod
    def from_dict(cls, fields):
        """Create a configuration from dictionary 'fields'."""

        known = ("name", "n", "r", "m", "seed", "params", "n_rule")
        unknown = sorted(set(fields) - set(known))
        if unknown:
            raise Error("unknown DGP configuration fields: %s"
                        % ", ".join(unknown))
        if "name" not in fields:
            raise Error("DGP configuration without a name")
        return cls(**fields)


def _resolve_params(cfg, family, **extra):
    """
    Merge the defaults of DGP 'family' with the parameters of 'cfg' and
    return the result. Unknown parameter names are errors.
    """

    params = dict(_DEFAULT_PARAMS[family])
    unknown = sorted(set(cfg.params) - set(params))
    if unknown:
        raise Error("unknown parameters for DGP '%s': %s"
                    % (cfg.name, ", ".join(unknown)))

    for key, value in cfg.params.items():
        try:
            params[key] = float(value)
        except (TypeError, ValueError):
            raise Error("parameter '%s' of DGP '%s' has to be a number, got "
                        "'%s'" % (key, cfg.name, value))

    params.update(extra)
    return params


def _check_range(params, low, high):
    """Make sure the 'low' parameter is not larger than the 'high' one."""
    if params[low] > params[high]:
        raise Error("parameter '%s' (%g) is larger than '%s' (%g)"
                    % (low, params[low], high, params[high]))


def _assemble(cfg, gen, grid, inliers, outliers, kinds, params):
    """
    Stack 'inliers' and 'outliers', shuffle them with random generator 'gen'
    and return the labeled data set. The 'kinds' list contains the kind tag
    of every outlier.
    """

    values = numpy.vstack((inliers, outliers))
    labels = numpy.r_[numpy.zeros(len(inliers), dtype=bool),
                      numpy.ones(len(outliers), dtype=bool)]
    tags = ["inlier"] * len(inliers) + list(kinds)

    order = gen.permutation(len(values))
    meta = {"dgp": cfg.name, "seed": cfg.seed, "r": cfg.r, "n": cfg.n,
            "m": cfg.m, "params": params, "outliers": int(len(outliers)),
            "kinds": [tags[idx] for idx in order],
            "rng": RNG_ALGORITHM}

    _log.debug("generated '%s': %d inliers, %d outliers, %d grid points"
               % (cfg.name, len(inliers), len(outliers), cfg.m))

    return Functional.FunctionalDataset(grid, values[order], labels[order],
                                        meta)


def _counts(cfg):
    """Return the count of inliers and the count of outliers."""
    outliers_cnt = cfg.outliers_cnt
    return cfg.n - outliers_cnt, outliers_cnt


def gen_taxonomy_shape(cfg):
    """
    Shape outliers of a level-shifted periodic family. Inliers are
    b + 0.05 t + cos(20 pi t) with b ~ N(5, 3^2), outliers are
    a + 0.05 t + sin(pi t^2) with a ~ N(5, 4^2), t in [0, 1].
    """

    params = _resolve_params(cfg, "taxonomy-shape", d2=1)
    gen = Rng(cfg.seed).generator
    grid = Functional.Grid.uniform(0, 1, cfg.m)
    t = grid.points
    inliers_cnt, outliers_cnt = _counts(cfg)

    levels = gen.normal(5, params["inlier_sd"], inliers_cnt)
    inliers = levels[:, numpy.newaxis] + 0.05 * t + numpy.cos(20 * numpy.pi * t)

    levels = gen.normal(5, params["outlier_sd"], outliers_cnt)
    outliers = levels[:, numpy.newaxis] + 0.05 * t + \
               numpy.sin(numpy.pi * t ** 2)

    return _assemble(cfg, gen, grid, inliers, outliers,
                     ["shape"] * outliers_cnt, params)


def gen_beta_shift(cfg):
    """
    Vertically shifted Beta densities. Inliers are Beta(a, b) densities with
    a, b ~ U[1, 2], outliers are such densities plus a constant
    c ~ U[0, 0.5], t in [0, 1].
    """

    params = _resolve_params(cfg, "beta-shift", d2=2)
    _check_range(params, "shape_low", "shape_high")
    _check_range(params, "shift_low", "shift_high")
    if params["shape_low"] <= 0:
        raise Error("Beta shape parameters have to be positive")

    gen = Rng(cfg.seed).generator
    grid = Functional.Grid.uniform(0, 1, cfg.m)
    t = grid.points
    inliers_cnt, outliers_cnt = _counts(cfg)

    def densities(count):
        """Draw 'count' Beta densities evaluated on the grid."""
        shapes = gen.uniform(params["shape_low"], params["shape_high"],
                             (count, 2))
        return stats.beta.pdf(t, shapes[:, :1], shapes[:, 1:])

    inliers = densities(inliers_cnt)
    outliers = densities(outliers_cnt)
    outliers = outliers + gen.uniform(params["shift_low"],
                                      params["shift_high"],
                                      (outliers_cnt, 1))

    return _assemble(cfg, gen, grid, inliers.reshape(inliers_cnt, cfg.m),
                     outliers.reshape(outliers_cnt, cfg.m),
                     ["shift"] * outliers_cnt, params)


def _parse_phase_case(case):
    """Turn the phase case tag into 1, 2 or 3."""

    cases = {"1": 1, "i": 1, "2": 2, "ii": 2, "3": 3, "iii": 3}
    try:
        return cases[str(case).strip().lower()]
    except KeyError:
        raise Error("invalid phase variation case '%s', use I, II or III"
                    % case)


def gen_phase_case(case, cfg):
    """
    Phase variation scenarios of scaled Gaussian pdfs phi, t in [-4, 4].
      Case I   - a single manifold x(t) = a phi(t - c), a in [0.1, 2],
                 c in [-2, 2]; there are no structural outliers, so the
                 outlier ratio is ignored and no curve is labeled.
      Case II  - inliers a phi(t + 1), outliers a phi(t), a in [0.1, 2].
      Case III - x(t) = a phi(t - c), a in [0.1, 2], with c in [-1.3, -0.7]
                 for inliers and c in [-0.5, 0.1] for outliers.
    """

    case = _parse_phase_case(case)
    params = _resolve_params(cfg, "phase", d2=2 if case != 2 else 1,
                             case=case)
    _check_range(params, "amp_low", "amp_high")

    gen = Rng(cfg.seed).generator
    grid = Functional.Grid.uniform(-4, 4, cfg.m)
    t = grid.points
    if case == 1:
        inliers_cnt, outliers_cnt = cfg.n, 0
    else:
        inliers_cnt, outliers_cnt = _counts(cfg)

    def curves(count, shift_low, shift_high):
        """Draw 'count' curves a phi(t - c) with c in [low, high]."""
        amps = gen.uniform(params["amp_low"], params["amp_high"], (count, 1))
        shifts = gen.uniform(shift_low, shift_high, (count, 1))
        return amps * stats.norm.pdf(t - shifts)

    if case == 1:
        inliers = curves(inliers_cnt, -2, 2)
        outliers = curves(0, -2, 2)
    elif case == 2:
        inliers = curves(inliers_cnt, -1, -1)
        outliers = curves(outliers_cnt, 0, 0)
    else:
        inliers = curves(inliers_cnt, -1.3, -0.7)
        outliers = curves(outliers_cnt, -0.5, 0.1)

    return _assemble(cfg, gen, grid, inliers, outliers,
                     ["phase"] * outliers_cnt, params)


def bspline_basis(x, n_basis, degree=3):
    """
    Evaluate the 'n_basis' B-spline basis functions of degree 'degree' with
    equidistant knots over [0, 1] at points 'x'. Returns a
    len(x) x n_basis matrix.
    """

    if n_basis < degree + 1:
        raise Error("a degree %d B-spline basis needs at least %d functions"
                    % (degree, degree + 1))

    inner = numpy.linspace(0, 1, n_basis - degree + 1)
    knots = numpy.r_[numpy.zeros(degree), inner, numpy.ones(degree)]
    basis = BSpline(knots, numpy.eye(n_basis), degree)
    return basis(numpy.clip(numpy.asarray(x, dtype=float), 0, 1))


def beta_ecdf(t, a, b):
    """
    The CDF of the Beta(a, b) distribution at points 't' in [0, 1], i.e.,
    the regularized incomplete beta function. Used as a warping function.
    """
    return special.betainc(a, b, numpy.clip(t, 0, 1))


def sample_gp(gen, grid, count, scale=1.0):
    """
    Draw 'count' zero-mean Gaussian process paths with covariance
    exp(-|s - t| / scale) on 'grid' using random generator 'gen'. Returns a
    count x m matrix.
    """

    t = numpy.asarray(getattr(grid, "points", grid), dtype=float)
    cov = numpy.exp(-numpy.abs(t[:, numpy.newaxis] - t) / scale)

    try:
        factor = linalg.cholesky(cov + 1e-10 * numpy.eye(len(t)), lower=True)
    except linalg.LinAlgError as err:
        raise Error("cannot factorize the Gaussian process covariance: %s"
                    % err)

    return gen.standard_normal((count, len(t))).dot(factor.T)


def gen_dgp_templates(variant, cfg):
    """
    Elastically deformed versions of a random wiggly template. The template
    g is a cubic B-spline with 15 (variant 3) or 25 (variant 4) N(0, 1)
    coefficients, drawn once per data set. Curves are g(w(t)) plus white
    noise, w is the CDF of a Beta(a, b) distribution:
      variant 3 - inliers a, b ~ U[4, 6], outliers a, b ~ U[3, 4], noise
                  sigma 0.1;
      variant 4 - inliers a, b ~ U[3, 8], outliers use the 50:50 mixture of
                  two Beta CDFs with a, b ~ U[3, 8] and a, b ~ U[0.1, 3],
                  noise sigma 0.15.
    """

    if str(variant) not in ("3", "4"):
        raise Error("invalid template DGP variant '%s', use 3 or 4" % variant)
    variant = int(variant)

    params = _resolve_params(cfg, "templates-%d" % variant, d2=2)
    n_basis = int(params["n_basis"])
    gen = Rng(cfg.seed).generator
    grid = Functional.Grid.uniform(0, 1, cfg.m)
    t = grid.points
    inliers_cnt, outliers_cnt = _counts(cfg)

    coefs = gen.standard_normal(n_basis)

    def template(warps):
        """Evaluate the template at the warped grid points."""
        if not warps.size:
            return numpy.zeros(warps.shape)
        return bspline_basis(warps.ravel(), n_basis).dot(coefs).reshape(
            warps.shape)

    def warps(count, low, high):
        """Draw 'count' Beta CDF warping functions with a, b ~ U[low, high]."""
        shapes = gen.uniform(low, high, (count, 2))
        return beta_ecdf(t, shapes[:, :1], shapes[:, 1:])

    if variant == 3:
        inlier_warps = warps(inliers_cnt, 4, 6)
        outlier_warps = warps(outliers_cnt, 3, 4)
    else:
        inlier_warps = warps(inliers_cnt, 3, 8)
        outlier_warps = 0.5 * warps(outliers_cnt, 3, 8) + \
                        0.5 * warps(outliers_cnt, 0.1, 3)

    inliers = template(inlier_warps.reshape(inliers_cnt, cfg.m))
    outliers = template(outlier_warps.reshape(outliers_cnt, cfg.m))
    noise = gen.normal(0, params["noise"], (cfg.n, cfg.m))
    inliers = inliers + noise[:inliers_cnt]
    outliers = outliers + noise[inliers_cnt:]

    return _assemble(cfg, gen, grid, inliers, outliers,
                     ["warp"] * outliers_cnt, params)


def _sim_deviations(kinds, gen, t, params):
    """
    Return the deviations from the linear trend for outliers of kinds
    'kinds' ("shift", "isolated" or "shape").
    """

    deviations = numpy.zeros((len(kinds), len(t)))
    width = params["spike_width"]

    for idx, kind in enumerate(kinds):
        if kind == "shift":
            sign = gen.choice((-1.0, 1.0))
            deviations[idx] = params["shift"] * sign
        elif kind == "isolated":
            sign = gen.choice((-1.0, 1.0))
            start = gen.uniform(0, 1 - width)
            support = (t >= start) & (t <= start + width)
            if not support.any():
                # On coarse grids the interval can fall between grid points
                support[numpy.argmin(numpy.abs(t - start - width / 2))] = True
            deviations[idx, support] = params["spike"] * sign
        elif kind == "shape":
            phase = gen.uniform(0, 2 * numpy.pi)
            deviations[idx] = params["shape_amp"] * \
                              numpy.sin(4 * numpy.pi * t + phase)
        else:
            raise Error("unknown outlier kind '%s'" % kind)

    return deviations


def _gen_sim(cfg, family, outlier_kinds):
    """
    Common part of the sim models and their mixtures: the linear trend plus
    Gaussian process noise (plus optional random vertical shifts) for all
    curves, with the deviations of 'outlier_kinds' added to the outliers.
    The 'outlier_kinds' argument is a function of the random generator and
    the outliers count which returns the list of outlier kinds.
    """

    params = _resolve_params(cfg, family)
    if not 0 <= params["spike_width"] <= 1:
        raise Error("spike width has to be within [0, 1]")
    if params["shift_sd"] < 0:
        raise Error("the vertical shift dispersion has to be non-negative")

    gen = Rng(cfg.seed).generator
    grid = Functional.Grid.uniform(0, 1, cfg.m)
    t = grid.points
    inliers_cnt, outliers_cnt = _counts(cfg)

    curves = params["slope"] * t + sample_gp(gen, grid, cfg.n)
    curves = curves + gen.normal(0, params["shift_sd"], (cfg.n, 1))

    kinds = outlier_kinds(gen, outliers_cnt)
    curves[inliers_cnt:] += _sim_deviations(kinds, gen, t, params)
    params["d2"] = 1 if params["shift_sd"] > 0 else 0

    return _assemble(cfg, gen, grid, curves[:inliers_cnt],
                     curves[inliers_cnt:], kinds, params)


_SIM_KINDS = {"1": "shift", "2": "isolated", "shape": "shape"}


def gen_sim_model(model_id, cfg):
    """
    Linear trend models: inliers are 4 t + e(t), e a Gaussian process with
    covariance exp(-|s - t|), t in [0, 1]. Outliers are
      id 1     - shifted by 8 s, s = -1 or +1 with equal probability;
      id 2     - a spike of height 6 s on a random sub-interval of length
                 0.04;
      id shape - 4 t + 2 sin(4 pi t + u) + e(t), u ~ U[0, 2 pi].
    The 'shift_sd' parameter adds N(0, shift_sd^2) vertical shifts to all
    the curves.
    """

    try:
        kind = _SIM_KINDS[str(model_id).strip().lower()]
    except KeyError:
        raise Error("invalid simulation model '%s', use 1, 2 or shape"
                    % model_id)

    return _gen_sim(cfg, "sim", lambda gen, count: [kind] * count)


def gen_dgp_mixture(variant, cfg):
    """
    Inliers of the linear trend model mixed with several outlier kinds:
      variant 1 - half of the outliers are shift outliers, the other half
                  are shape outliers (the odd one is a shift outlier);
      variant 2 - every outlier kind is drawn uniformly at random among
                  shift, isolated and shape.
    The kind of every observation is recorded in the "kinds" meta field.
    """

    if str(variant) == "1":
        def kinds(_, count):
            """Half shift, half shape outliers."""
            shifts = count - count // 2
            return ["shift"] * shifts + ["shape"] * (count - shifts)
    elif str(variant) == "2":
        def kinds(gen, count):
            """Outlier kinds drawn at random."""
            choices = ("shift", "isolated", "shape")
            return [choices[idx] for idx in gen.integers(0, 3, count)]
    else:
        raise Error("invalid mixture DGP variant '%s', use 1 or 2" % variant)

    return _gen_sim(cfg, "mixture", kinds)


# The generators by name. Names "dgp-1" - "dgp-4" are the four benchmark
# DGPs.
GENERATORS = {
    "taxonomy-shape": gen_taxonomy_shape,
    "beta-shift": gen_beta_shift,
    "phase-1": lambda cfg: gen_phase_case("I", cfg),
    "phase-2": lambda cfg: gen_phase_case("II", cfg),
    "phase-3": lambda cfg: gen_phase_case("III", cfg),
    "templates-3": lambda cfg: gen_dgp_templates(3, cfg),
    "templates-4": lambda cfg: gen_dgp_templates(4, cfg),
    "sim-1": lambda cfg: gen_sim_model("1", cfg),
    "sim-2": lambda cfg: gen_sim_model("2", cfg),
    "sim-shape": lambda cfg: gen_sim_model("shape", cfg),
    "mixture-1": lambda cfg: gen_dgp_mixture(1, cfg),
    "mixture-2": lambda cfg: gen_dgp_mixture(2, cfg),
    "dgp-1": lambda cfg: gen_dgp_mixture(1, cfg),
    "dgp-2": lambda cfg: gen_dgp_mixture(2, cfg),
    "dgp-3": lambda cfg: gen_dgp_templates(3, cfg),
    "dgp-4": lambda cfg: gen_dgp_templates(4, cfg),
}


def generate(cfg):
    """
    Run the generator named by 'DgpConfig' object 'cfg' and return the
    labeled 'Functional.FunctionalDataset'.
    """

    try:
        generator = GENERATORS[cfg.name]
    except KeyError:
        raise Error("unknown DGP '%s', supported are: %s"
                    % (cfg.name, ", ".join(sorted(GENERATORS))))

    try:
        return generator(cfg)
    except Functional.Error as err:
        raise Error("DGP '%s' produced invalid data: %s" % (cfg.name, err))


def write_meta(dataset, file_obj):
    """Write the provenance record of 'dataset' to 'file_obj' as JSON."""
    json.dump(dataset.meta, file_obj, indent=2, sort_keys=True)
    file_obj.write("\n")
