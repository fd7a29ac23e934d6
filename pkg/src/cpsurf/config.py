"""Run configuration: JSON ingestion and validation."""

import json
from dataclasses import dataclass

from .errors import ConfigError, ParseError
from .solution import SolutionSpec, builtin_catalog, make_builtin

DEFAULT_RESIDUAL_TOL = 1e-8
DEFAULT_QUADRATURE_TOL = 1e-9


@dataclass(frozen=True)
class RunConfig:
    n: int
    spec: SolutionSpec
    domain: tuple        # (xi_l_min, xi_l_max, xi_r_min, xi_r_max)
    grid: tuple          # (n_l, n_r)
    base_point: tuple    # (xi_l, xi_r), inside the rectangle
    det_g_tol: float | None   # None = scale-aware default
    residual_tol: float
    quadrature_tol: float
    prefix: str
    projection: tuple | None  # three basis labels for the N > 2 mesh figure


def _require(cond, message):
    if not cond:
        raise ConfigError(message)


def _pair(value, name):
    _require(isinstance(value, (list, tuple)) and len(value) == 2,
             f"'{name}' must be a pair")
    try:
        return float(value[0]), float(value[1])
    except (TypeError, ValueError):
        raise ConfigError(f"'{name}' entries must be numbers") from None


def _build_spec(doc, n):
    _require(isinstance(doc, dict), "'solution' must be an object")
    params = doc.get("params", {})
    _require(isinstance(params, dict), "'solution.params' must be an object")
    if "builtin" in doc:
        name = doc["builtin"]
        _require(name in builtin_catalog(),
                 f"unknown builtin '{name}'; catalog: {builtin_catalog()}")
        kwargs = dict(params)
        if "components" in doc:
            kwargs["sources"] = tuple(doc["components"])
        if name == "cp1_embedded" and "n" not in kwargs:
            kwargs["n"] = n
        try:
            spec = make_builtin(name, **kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"builtin '{name}': {exc}") from exc
    elif "components" in doc:
        comps = doc["components"]
        _require(isinstance(comps, list) and
                 all(isinstance(c, str) for c in comps),
                 "'solution.components' must be a list of strings")
        try:
            spec = SolutionSpec.from_sources(tuple(comps), params=params)
        except (ParseError, ValueError) as exc:
            raise ConfigError(f"bad component expression: {exc}") from exc
    else:
        raise ConfigError("'solution' needs 'builtin' or 'components'")
    _require(spec.n == n, f"solution has {spec.n} components but n = {n}")
    return spec


def parse_config(doc):
    """Validate a decoded JSON document into a RunConfig."""
    _require(isinstance(doc, dict), "config must be a JSON object")
    known = {"n", "solution", "domain", "grid", "base_point", "tolerances",
             "outputs"}
    unknown = set(doc) - known
    _require(not unknown, f"unknown config keys: {sorted(unknown)}")
    for key in ("n", "solution", "domain", "grid", "base_point"):
        _require(key in doc, f"missing config key '{key}'")
    n = doc["n"]
    _require(isinstance(n, int) and n >= 2, "'n' must be an integer >= 2")
    spec = _build_spec(doc["solution"], n)
    dom = doc["domain"]
    _require(isinstance(dom, dict) and set(dom) == {"xi_l", "xi_r"},
             "'domain' must have exactly 'xi_l' and 'xi_r' ranges")
    l0, l1 = _pair(dom["xi_l"], "domain.xi_l")
    r0, r1 = _pair(dom["xi_r"], "domain.xi_r")
    _require(l0 <= l1 and r0 <= r1, "domain ranges must be ordered")
    grid = doc["grid"]
    _require(isinstance(grid, (list, tuple)) and len(grid) == 2
             and all(isinstance(g, int) for g in grid),
             "'grid' must be a pair of integers")
    _require(grid[0] >= 2 and grid[1] >= 2, "grid needs at least 2x2 nodes")
    base = _pair(doc["base_point"], "base_point")
    _require(l0 <= base[0] <= l1 and r0 <= base[1] <= r1,
             "base_point must lie inside the domain rectangle")
    tols = doc.get("tolerances", {})
    _require(isinstance(tols, dict), "'tolerances' must be an object")
    unknown = set(tols) - {"det_g", "residual", "quadrature"}
    _require(not unknown, f"unknown tolerance keys: {sorted(unknown)}")
    det_g = tols.get("det_g")
    if det_g is not None:
        det_g = float(det_g)
        _require(det_g > 0, "'tolerances.det_g' must be positive")
    residual = float(tols.get("residual", DEFAULT_RESIDUAL_TOL))
    quadrature = float(tols.get("quadrature", DEFAULT_QUADRATURE_TOL))
    _require(residual > 0 and quadrature > 0, "tolerances must be positive")
    outputs = doc.get("outputs", {})
    _require(isinstance(outputs, dict), "'outputs' must be an object")
    unknown = set(outputs) - {"prefix", "projection"}
    _require(not unknown, f"unknown outputs keys: {sorted(unknown)}")
    prefix = outputs.get("prefix", "")
    _require(isinstance(prefix, str), "'outputs.prefix' must be a string")
    projection = outputs.get("projection")
    if projection is not None:
        _require(isinstance(projection, list) and len(projection) == 3
                 and all(isinstance(s, str) for s in projection),
                 "'outputs.projection' must be three basis labels")
        projection = tuple(projection)
    return RunConfig(n=n, spec=spec, domain=(l0, l1, r0, r1),
                     grid=(int(grid[0]), int(grid[1])), base_point=base,
                     det_g_tol=det_g, residual_tol=residual,
                     quadrature_tol=quadrature, prefix=prefix,
                     projection=projection)


def load_config(path):
    """Read and validate a config file."""
    try:
        with open(path, "r", encoding="ascii") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(doc)
