"""Configuration-driven experiment studies producing CSV tables.

A study is described by a :class:`StudySpec`, read from a ``key=value`` file
by :func:`parse_config` or built directly. Every runner returns a
:class:`StudyResult` whose CSV rendering is deterministic: identical specs give
byte-identical files (timings are only recorded on request).
"""

from __future__ import annotations

import io
import time
import warnings
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .approx import (DEFAULT_GRID, ApproxConfig, ErrorRecord, MemoField, build_approximation,
                     NATURAL_2D_SIZE, equispaced_grid, eval_approx, fit_rate,
                     natural_rule)
from .exceptions import ConfigParseError, ConfigurationError, InsufficientDataError
from .oracle import PROBLEMS as ORACLE_PROBLEMS, oracle_coeffs
from .pce import sobol_indices
from .polybasis import GradedBasis, cheb_to_leg
from .problems import BENCHMARKS, DEFAULT_DDE_N, benchmark_field
from .quadrature import (clenshaw_curtis, gauss_legendre, padua_cubature, simpson_rule,
                         tensor_cc_cubature, tensor_rule, trapezoid_rule)

SCHEMA = 1
STUDIES = ("converge", "quad-study", "stats", "eval", "approx")
PARITIES = ("all", "odd", "even")
RULES_1D = ("gauss", "clenshaw_curtis", "trapezoid", "simpson")
RULES_2D = ("padua", "tensor_cc", "gauss")
#: reference cubature sizes for 2-D quadrature studies
REFERENCE_2D_SIZE = {"padua": 199, "tensor_cc": 141, "gauss": 141}

KEYS = ("study", "problem", "method", "basis_norm", "degree_start", "degree_stop",
        "degree_step", "parity", "rule", "rule_size", "grid", "dde_n", "out")
REQUIRED = ("study", "problem")


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % x


@dataclass
class StudySpec:
    """Everything needed to rerun one study.

    ``degree_step`` is a positive integer or ``"x2"`` for doubling; ``rule``,
    ``rule_size`` and ``grid`` accept ``"auto"`` for the documented defaults.
    """

    study: str
    problem: str
    method: str = "galerkin"
    basis_norm: str = "total"
    degree_start: int = 1
    degree_stop: int = 20
    degree_step: str = "1"
    parity: str = "all"
    rule: str = "auto"
    rule_size: str = "auto"
    grid: str = "auto"
    dde_n: int = DEFAULT_DDE_N
    out: Optional[str] = None

    def __post_init__(self):
        self.validate()

    @property
    def dimension(self):
        return 1 if self.problem in ORACLE_PROBLEMS else 2

    def validate(self):
        def bad(key, why):
            raise ConfigurationError(f"{key}: {why}")

        if self.study not in STUDIES:
            bad("study", f"{self.study!r} is not one of {STUDIES}")
        if self.problem not in BENCHMARKS:
            bad("problem", f"{self.problem!r} is not one of {BENCHMARKS}")
        if self.method not in ("galerkin", "collocation"):
            bad("method", f"{self.method!r} is not galerkin or collocation")
        if self.basis_norm not in ("total", "maximal"):
            bad("basis_norm", f"{self.basis_norm!r} is not total or maximal")
        if self.parity not in PARITIES:
            bad("parity", f"{self.parity!r} is not one of {PARITIES}")
        for key in ("degree_start", "degree_stop", "dde_n"):
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                bad(key, f"expected an integer, got {value!r}")
        if self.degree_start < 0 or self.degree_stop < self.degree_start:
            bad("degree_stop", f"empty range {self.degree_start}..{self.degree_stop}")
        if self.dde_n < 4:
            bad("dde_n", "must be at least 4")
        self.degree_step = str(self.degree_step)
        if self.degree_step != "x2" and not (self.degree_step.isdigit() and int(self.degree_step) > 0):
            bad("degree_step", f"expected a positive integer or x2, got {self.degree_step!r}")
        if self.degree_step == "x2" and self.degree_start == 0:
            bad("degree_step", "doubling needs degree_start >= 1")
        allowed = RULES_1D if self.dimension == 1 else RULES_2D
        if self.rule != "auto" and self.rule not in allowed:
            bad("rule", f"{self.rule!r} is not one of {allowed} for problem {self.problem}")
        for key in ("rule_size", "grid"):
            value = str(getattr(self, key))
            setattr(self, key, value)
            if value != "auto" and not (value.isdigit() and int(value) > 0):
                bad(key, f"expected a positive integer or auto, got {value!r}")
        if self.grid != "auto" and int(self.grid) < 2:
            bad("grid", "needs at least 2 points per axis")
        if not self.sweep():
            bad("parity", "the degree sweep is empty after the parity filter")

    def sweep(self):
        """Degrees (or rule sizes, for quadrature studies) in sweep order."""
        if self.degree_step == "x2":
            values, k = [], self.degree_start
            while k <= self.degree_stop:
                values.append(k)
                k *= 2
        else:
            values = list(range(self.degree_start, self.degree_stop + 1, int(self.degree_step)))
        if self.parity == "odd":
            values = [k for k in values if k % 2]
        elif self.parity == "even":
            values = [k for k in values if k % 2 == 0]
        return values

    @property
    def grid_points(self):
        return DEFAULT_GRID[self.dimension] if self.grid == "auto" else int(self.grid)

    def items(self):
        return [(f.name, getattr(self, f.name)) for f in fields(self)]


_INT_KEYS = {"degree_start", "degree_stop", "dde_n"}


def _coerce(key, raw):
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigurationError(f"{key}: expected an integer, got {raw!r}") from None
    if key == "out":
        return raw or None
    return raw


def parse_config_text(text: str, overrides: Optional[dict] = None) -> StudySpec:
    """Parse the ``key=value`` grammar; ``overrides`` win over file entries."""
    values = {}
    lines = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"expected key=value, got {line!r}", lineno)
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigParseError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigParseError(f"duplicate key {key!r} (first on line {lines[key]})", lineno)
        try:
            values[key] = _coerce(key, raw)
        except ConfigurationError as exc:
            raise ConfigParseError(str(exc), lineno) from None
        lines[key] = lineno
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = _coerce(key, value) if isinstance(value, str) else value
    missing = [k for k in REQUIRED if k not in values]
    if missing:
        raise ConfigurationError(f"missing required key(s): {', '.join(missing)}")
    try:
        return StudySpec(**values)
    except ConfigurationError as exc:
        key = str(exc).split(":", 1)[0]
        if key in lines:
            raise ConfigParseError(str(exc), lines[key]) from None
        raise


def parse_config(path, overrides: Optional[dict] = None) -> StudySpec:
    """Read a study configuration file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config_text(text, overrides)


# ---------------------------------------------------------------------------
# results


@dataclass
class StudyResult:
    """Header metadata, column names, rows and trailing notes of one study."""

    spec: StudySpec
    columns: tuple
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    text: str = ""
    records: list = field(default_factory=list, repr=False)
    report: object = field(default=None, repr=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# schema={SCHEMA}\n")
        for key, value in self.spec.items():
            buf.write(f"# {key}={'' if value is None else value}\n")
        for key, value in self.meta.items():
            buf.write(f"# {key}={value}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            if isinstance(row, str):
                buf.write(f"# {row}\n")
            else:
                buf.write(",".join(_fmt(v) for v in row) + "\n")
        for note in self.notes:
            buf.write(f"# {note}\n")
        return buf.getvalue()

    def write(self, path=None):
        target = path or self.spec.out
        data = self.to_csv()
        if target:
            Path(target).write_text(data, encoding="utf-8")
        return data


def _base_meta(spec):
    return {"error_grid": f"{spec.grid_points}^{spec.dimension}"}


# ---------------------------------------------------------------------------
# rule selection


def _galerkin_rule(spec, P):
    """Default Galerkin rule for degree P: Gauss(4P) in 1-D, natural 2-D cubature."""
    if spec.dimension == 1:
        name = "gauss" if spec.rule == "auto" else spec.rule
        size = max(4 * P, 2) if spec.rule_size == "auto" else int(spec.rule_size)
        if name == "simpson" and size % 2:
            size += 1
        return _rule_1d(name, size)
    if spec.rule == "auto" and spec.rule_size == "auto":
        return natural_rule(_basis(spec, P))
    if spec.rule == "auto":
        name = "padua" if spec.basis_norm == "total" else "tensor_cc"
    else:
        name = spec.rule
    size = max(P, NATURAL_2D_SIZE) if spec.rule_size == "auto" else int(spec.rule_size)
    return _rule_2d(name, size)


def _rule_1d(name, M):
    return {"gauss": gauss_legendre, "clenshaw_curtis": clenshaw_curtis,
            "trapezoid": trapezoid_rule, "simpson": simpson_rule}[name](M)


def _rule_2d(name, m):
    if name == "padua":
        return padua_cubature(m)
    if name == "tensor_cc":
        return tensor_cc_cubature(m)
    return tensor_rule(gauss_legendre(m), 2)


def off_kink_size(rule: str, M: int) -> int:
    """Shift a classical rule size so the kink at 0 falls inside a panel.

    With the uniform grids of the trapezoid and Simpson rules, a node (or a
    Simpson panel boundary) at 0 makes piecewise-linear integrands exact and
    hides the generic convergence rate. Trapezoid sizes become odd; Simpson
    sizes keep M/2 odd so 0 is a panel midpoint. Other rules are unchanged.
    """
    if rule == "trapezoid" and M % 2 == 0:
        return M + 1
    if rule == "simpson" and M % 2 == 0 and (M // 2) % 2 == 0:
        return M + 2
    return M


def _field(spec):
    return MemoField(benchmark_field(spec.problem, N=spec.dde_n))


# ---------------------------------------------------------------------------
# runners


def _basis(spec, P, family="legendre"):
    norm = "total" if spec.dimension == 1 else spec.basis_norm
    return GradedBasis(family, spec.dimension, norm, P)


def _build(spec, f, P):
    if spec.method == "galerkin":
        config = ApproxConfig("galerkin", _basis(spec, P), _galerkin_rule(spec, P), spec.dde_n)
    else:
        config = ApproxConfig("collocation", _basis(spec, P, "chebyshev"), dde_n=spec.dde_n)
    return build_approximation(f, config)


def run_converge(spec: StudySpec, timing: bool = False) -> StudyResult:
    """Relative L-infinity error of the approximation for each degree of the sweep."""
    f = _field(spec)
    grid = equispaced_grid(spec.dimension, spec.grid_points)
    exact = np.asarray(f(grid), dtype=float).reshape(-1)
    scale = np.max(np.abs(exact)) or 1.0
    result = StudyResult(spec, ("degree", "n_coeffs", "rel_linf_error", "wall_ms"),
                         meta=_base_meta(spec))
    records, rule_sizes, flags = [], [], []
    for P in spec.sweep():
        t0 = time.perf_counter()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            coeffs = _build(spec, f, P)
        approx = np.asarray(eval_approx(coeffs, grid)).reshape(-1)
        err = float(np.max(np.abs(exact - approx)) / scale)
        wall = 1e3 * (time.perf_counter() - t0) if timing else float("nan")
        records.append(ErrorRecord(P, len(coeffs), err, None, wall if timing else 0.0))
        result.rows.append((P, len(coeffs), err, wall))
        rule_sizes.append(coeffs.meta.get("rule", coeffs.meta.get("nodes", "")))
        flags.extend(f"degree {P}: {msg}" for msg in coeffs.meta.get("flags", []))
    result.meta["rule_sizes"] = " ".join(rule_sizes)
    result.notes.extend(flags)
    try:
        result.notes.append(f"fitted_slope={_fmt(fit_rate(records))}")
    except InsufficientDataError:
        pass
    result.records = records
    return result


def _c0_reference(spec, f):
    if spec.dimension == 1:
        return float(oracle_coeffs(spec.problem, 0).coeffs[0]), "oracle"
    name = "padua" if spec.rule == "auto" else spec.rule
    size = REFERENCE_2D_SIZE[name]
    rule = _rule_2d(name, size)
    return 0.25 * float(rule.weights @ f(rule.nodes)), f"{name}({size})"


def run_quad_study(spec: StudySpec) -> StudyResult:
    """Error of the quadrature estimate of the constant coefficient per rule size."""
    f = _field(spec)
    ref, ref_label = _c0_reference(spec, f)
    rho = 0.5 ** spec.dimension
    result = StudyResult(spec, ("M", "abs_c0_error"), meta=_base_meta(spec))
    result.meta["reference"] = ref_label
    name = spec.rule if spec.rule != "auto" else (
        "clenshaw_curtis" if spec.dimension == 1 else "padua")
    if name in ("trapezoid", "simpson"):
        result.meta["size_shift"] = "off-kink"
    sizes = []
    for M in spec.sweep():
        if spec.dimension == 1:
            if name == "simpson" and M % 2:
                result.rows.append(f"warning: skipped M={M}, Simpson's rule needs an even M")
                continue
            M = off_kink_size(name, M)
            rule = _rule_1d(name, M)
        else:
            rule = _rule_2d(name, M)
        est = rho * float(rule.weights @ f(rule.points))
        result.rows.append((M, abs(est - ref)))
        sizes.append(str(M))
    result.meta["rule_sizes"] = " ".join(sizes)
    pts = [r for r in result.rows if not isinstance(r, str) and r[1] > 0]
    if len(pts) >= 2:
        slope = np.polyfit(np.log([r[0] for r in pts]), np.log([r[1] for r in pts]), 1)[0]
        result.notes.append(f"fitted_slope={_fmt(slope)}")
    return result


def _single_build(spec):
    f = _field(spec)
    P = spec.degree_stop
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        coeffs = _build(spec, f, P)
    return coeffs


def run_stats(spec: StudySpec) -> StudyResult:
    """Mean, variance and Sobol indices of the degree ``degree_stop`` build."""
    coeffs = _single_build(spec)
    leg = cheb_to_leg(coeffs) if coeffs.family == "chebyshev" else coeffs
    report = sobol_indices(leg)
    result = StudyResult(spec, ("quantity", "subset", "value"), meta=_base_meta(spec))
    result.meta["build"] = coeffs.meta.get("rule", coeffs.meta.get("nodes", ""))
    result.rows.append(("mean", "", report.mean))
    result.rows.append(("variance", "", report.variance))
    for subset, value in report.sobol.items():
        result.rows.append(("sobol", "{" + " ".join(map(str, subset)) + "}", value))
    for d, value in enumerate(report.total, start=1):
        result.rows.append(("total", "{" + str(d) + "}", value))
    if report.degenerate:
        result.notes.append("degenerate=zero variance")
    result.text = report.table()
    result.report = report
    return result


def run_eval(spec: StudySpec) -> StudyResult:
    """Field values (spectral abscissae) on the equispaced error grid."""
    f = _field(spec)
    grid = equispaced_grid(spec.dimension, spec.grid_points)
    values = np.asarray(f(grid), dtype=float).reshape(-1)
    cols = ("x", "value") if spec.dimension == 1 else ("x", "y", "value")
    pts = grid.reshape(len(values), -1)
    result = StudyResult(spec, cols, meta=_base_meta(spec))
    result.rows.extend((*p, v) for p, v in zip(pts, values))
    return result


def run_approx(spec: StudySpec) -> StudyResult:
    """Expansion coefficients of the degree ``degree_stop`` build."""
    coeffs = _single_build(spec)
    axes = tuple(f"i{d + 1}" for d in range(spec.dimension))
    result = StudyResult(spec, ("k",) + axes + ("coeff",), meta=_base_meta(spec))
    result.meta["family"] = coeffs.family
    result.meta["build"] = coeffs.meta.get("rule", coeffs.meta.get("nodes", ""))
    result.rows.extend((k, *idx, c) for k, (idx, c) in
                       enumerate(zip(coeffs.basis.indices, coeffs.coeffs)))
    return result


RUNNERS = {"converge": run_converge, "quad-study": run_quad_study, "stats": run_stats,
           "eval": run_eval, "approx": run_approx}


def run_study(spec: StudySpec, **kwargs) -> StudyResult:
    if kwargs and spec.study != "converge":
        kwargs = {}
    return RUNNERS[spec.study](spec, **kwargs)
