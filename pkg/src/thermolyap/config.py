"""Run configuration: parsing, normalization, and the canonical record.

Configs are JSON documents (nested tables and arrays).  Parsing produces
resolved objects plus a *normalized* dict: grid shorthands expanded to
explicit float lists, defaults materialized, keys ordered.  The
normalized JSON echo emitted next to every result is the canonical
reproducibility record, and its SHA-256 is the config hash embedded in
summaries.  Normalization is idempotent, so configs round-trip.
"""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .catalog import MaxAffinePressure
from .cocycle import MatrixCocycle, norm_potential, singular_value_potential
from .errors import ConfigError
from .measures import markov_measure
from .potentials import WindowFunction, birkhoff_potential, measure_potential
from .symbolic import ShiftSpace

DEFAULT_TOLERANCES = {
    "legendre_margin_factor": 3.0,
    "bracket_slack": 1e-9,
    "membership_band": 1e-9,
}


@dataclass
class RunConfig:
    raw: dict                      # normalized canonical form
    name: str
    space: ShiftSpace | None
    potentials: dict               # name -> WordPotential
    pressure: MaxAffinePressure | None
    q_grid: np.ndarray | None
    alpha_grid: np.ndarray | None
    n: int
    n_max: int
    seed: int
    tolerances: dict
    subdiff: dict = field(default_factory=dict)
    membership: dict = field(default_factory=dict)

    def hash(self):
        return config_hash(self.raw)

    def primary_potential(self):
        if not self.potentials:
            raise ConfigError("potentials", "no potential defined")
        return next(iter(self.potentials.values()))


def _expand_grid(spec, key):
    if isinstance(spec, (list, tuple)):
        out = [float(x) for x in spec]
    elif isinstance(spec, dict):
        try:
            start, stop = float(spec["start"]), float(spec["stop"])
        except KeyError as e:
            raise ConfigError(f"{key}.{e.args[0]}", "missing grid bound") from None
        if "count" in spec:
            count = int(spec["count"])
            if count < 1:
                raise ConfigError(f"{key}.count", "grid count must be >= 1")
            out = np.linspace(start, stop, count).tolist()
        elif "step" in spec:
            step = float(spec["step"])
            if step <= 0:
                raise ConfigError(f"{key}.step", "grid step must be positive")
            count = int(round((stop - start) / step)) + 1
            out = np.linspace(start, stop, count).tolist()
        else:
            raise ConfigError(key, "grid needs 'count' or 'step'")
    else:
        raise ConfigError(key, f"cannot interpret grid spec {spec!r}")
    if len(out) == 0:
        raise ConfigError(key, "grid is empty")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise ConfigError(key, "grid must be strictly increasing")
    return out


def _parse_space(doc):
    sys = doc.get("system")
    if sys is None:
        return None
    if "alphabet_size" not in sys:
        raise ConfigError("system.alphabet_size", "required")
    m = int(sys["alphabet_size"])
    transitions = sys.get("transitions")
    if transitions is not None:
        transitions = np.asarray(transitions, dtype=bool)
    try:
        return ShiftSpace(m, transitions)
    except ValueError as e:
        raise ConfigError("system", str(e)) from None


def _parse_potential(entry, space, idx):
    key = f"potentials[{idx}]"
    kind = entry.get("type")
    name = entry.get("name", f"potential_{idx}")
    if space is None:
        raise ConfigError("system", "potentials require a system table")
    if kind == "cocycle":
        d = int(entry.get("dimension", 0))
        if d < 1:
            raise ConfigError(f"{key}.dimension", "required positive integer")
        mats = [np.asarray(m, dtype=float).reshape(d, d)
                for m in entry.get("matrices", [])]
        if len(mats) != space.alphabet_size:
            raise ConfigError(f"{key}.matrices",
                              f"need {space.alphabet_size} matrices (one per symbol)")
        cocycle = MatrixCocycle(np.stack(mats))
        style = entry.get("kind", "norm")
        if style == "norm":
            return name, norm_potential(cocycle)
        if isinstance(style, dict) and "singular" in style:
            return name, singular_value_potential(cocycle, int(style["singular"]))
        raise ConfigError(f"{key}.kind", f"unknown cocycle kind {style!r}")
    if kind == "window":
        w = int(entry.get("window", 0))
        table = entry.get("table")
        if w < 1 or table is None:
            raise ConfigError(key, "window potentials need 'window' and 'table'")
        g = WindowFunction(w, np.asarray(table, dtype=float),
                           alphabet_size=space.alphabet_size)
        return name, birkhoff_potential(space, g, description=name)
    if kind == "measure":
        P = entry.get("transition")
        if P is None:
            raise ConfigError(f"{key}.transition", "required")
        mu = markov_measure(np.asarray(P, dtype=float), space=space)
        return name, measure_potential(space, mu, description=name)
    raise ConfigError(f"{key}.type", f"unknown potential type {kind!r}")


def _parse_pressure(doc):
    spec = doc.get("pressure")
    if spec is None:
        return None
    if spec.get("type") != "max_affine":
        raise ConfigError("pressure.type", "only 'max_affine' is supported")
    pieces = np.asarray(spec.get("pieces", []), dtype=float)
    if pieces.ndim != 2 or pieces.shape[0] < 1 or pieces.shape[1] < 2:
        raise ConfigError("pressure.pieces",
                          "need rows [intercept, coef...] with >= 1 coefficient")
    q_grid = None
    if "q_grid" in spec:
        q_grid = np.asarray(_expand_grid(spec["q_grid"], "pressure.q_grid"))
    return MaxAffinePressure(pieces, domain=spec.get("domain", "all-q"),
                             q_grid=q_grid)


def normalize(doc):
    """Expand shorthands and materialize defaults; idempotent."""
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    out = {}
    out["name"] = str(doc.get("name", "run"))
    if "description" in doc:
        out["description"] = str(doc["description"])
    if "system" in doc:
        sys = {"alphabet_size": int(doc["system"]["alphabet_size"])}
        if doc["system"].get("transitions") is not None:
            sys["transitions"] = [[bool(x) for x in row]
                                  for row in doc["system"]["transitions"]]
        out["system"] = sys
    pots = []
    for idx, entry in enumerate(doc.get("potentials", [])):
        e = {"name": str(entry.get("name", f"potential_{idx}")),
             "type": entry.get("type")}
        for k in ("kind", "dimension", "window"):
            if k in entry:
                e[k] = entry[k]
        for k in ("matrices", "table", "transition"):
            if k in entry:
                e[k] = np.asarray(entry[k], dtype=float).tolist()
        pots.append(e)
    if pots:
        out["potentials"] = pots
    if "pressure" in doc:
        p = dict(doc["pressure"])
        p["pieces"] = np.asarray(p["pieces"], dtype=float).tolist()
        if "q_grid" in p:
            p["q_grid"] = _expand_grid(p["q_grid"], "pressure.q_grid")
        out["pressure"] = p
    grids = dict(doc.get("grids", {}))
    norm_grids = {}
    for gkey in ("q", "alpha"):
        if gkey in grids:
            norm_grids[gkey] = _expand_grid(grids[gkey], f"grids.{gkey}")
    norm_grids["n"] = int(grids.get("n", 8))
    norm_grids["n_max"] = int(grids.get("n_max", norm_grids["n"]))
    out["grids"] = norm_grids
    for k in ("subdiff", "membership"):
        if k in doc:
            out[k] = doc[k]
    out["seed"] = int(doc.get("seed", 0))
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(doc.get("tolerances", {}))
    out["tolerances"] = tol
    return out


def parse(doc):
    """Normalize and resolve a config document into a :class:`RunConfig`."""
    raw = normalize(doc)
    space = _parse_space(raw)
    potentials = {}
    for idx, entry in enumerate(raw.get("potentials", [])):
        name, pot = _parse_potential(entry, space, idx)
        if name in potentials:
            raise ConfigError(f"potentials[{idx}].name", f"duplicate name {name!r}")
        potentials[name] = pot
    pressure = _parse_pressure(raw)
    grids = raw["grids"]
    q_grid = np.asarray(grids["q"]) if "q" in grids else None
    alpha_grid = np.asarray(grids["alpha"]) if "alpha" in grids else None
    return RunConfig(raw=raw, name=raw["name"], space=space,
                     potentials=potentials, pressure=pressure,
                     q_grid=q_grid, alpha_grid=alpha_grid,
                     n=grids["n"], n_max=grids["n_max"], seed=raw["seed"],
                     tolerances=raw["tolerances"],
                     subdiff=raw.get("subdiff", {}),
                     membership=raw.get("membership", {}))


def load(path):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError("<file>", f"invalid JSON: {e}") from None
    return parse(doc)


def canonical_json(raw):
    return json.dumps(raw, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=True)


def config_hash(raw):
    return hashlib.sha256(canonical_json(raw).encode()).hexdigest()
