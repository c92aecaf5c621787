"""Run configuration: a flat key-value schema shared by the config file, the
command line, and every emitted report.

File format: one ``key = value`` pair per line, ``#`` comments, lists
comma-separated.  Unknown keys are rejected by name.
"""

import hashlib
import math
from dataclasses import dataclass, field, fields

_TWO_PI = 2.0 * math.pi


@dataclass
class RunConfig:
    command: str = ""
    model: str = "g11u"
    models: tuple = ("g11u", "generic")
    custom: dict = field(default_factory=dict)
    m: float = 1.0
    n: int = 256
    L: float = _TWO_PI
    dt: float = 1e-3
    T: float = 1.0
    eps: tuple = (0.02, 0.01, 0.005)
    s: float = 3.0
    profile: str = "mode2"
    k1: int = 1
    k2: int = 2
    seed: int = 0
    out: str = "kgnf_run"
    dealias: bool = True
    skip_conjugation_nf: bool = False
    theta: float = 2.0
    cap_factor: float = 50.0
    delta: float = 1e-5
    samples: int = 1000
    fault: str = ""
    threads: int = 0

    def validate(self):
        if self.n < 16 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"config key 'n'={self.n}: grid size must be a power of two >= 16")
        for key in ("m", "L", "dt", "T", "theta", "cap_factor", "delta"):
            if getattr(self, key) <= 0:
                raise ValueError(f"config key {key!r} must be positive")
        if self.s < 1:
            raise ValueError("config key 's' must be >= 1")
        if any(e <= 0 for e in self.eps):
            raise ValueError("config key 'eps' entries must be positive")
        if self.samples < 1:
            raise ValueError("config key 'samples' must be >= 1")
        return self


_BOOL_KEYS = {"dealias", "skip_conjugation_nf"}
_INT_KEYS = {"n", "seed", "samples", "k1", "k2", "threads"}
_FLOAT_KEYS = {"m", "L", "dt", "T", "s", "theta", "cap_factor", "delta"}
_LIST_FLOAT_KEYS = {"eps"}
_LIST_STR_KEYS = {"models"}
_STR_KEYS = {"command", "model", "profile", "out", "fault"}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _BOOL_KEYS:
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ValueError(f"config key {key!r}: expected a boolean, got {raw!r}")
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ValueError(f"config key {key!r}: expected an integer, got {raw!r}")
    if key in _FLOAT_KEYS:
        try:
            return _float_token(raw)
        except ValueError:
            raise ValueError(f"config key {key!r}: expected a number, got {raw!r}")
    if key in _LIST_FLOAT_KEYS:
        return tuple(_float_token(tok) for tok in raw.split(","))
    if key in _LIST_STR_KEYS:
        return tuple(tok.strip() for tok in raw.split(",") if tok.strip())
    if key in _STR_KEYS:
        return raw
    if key.startswith("custom."):
        return _float_token(raw)
    raise ValueError(f"unknown config key {key!r}")


def _float_token(tok: str) -> float:
    tok = tok.strip()
    if tok.endswith("pi"):
        head = tok[:-2].strip("*").strip()
        return (float(head) if head else 1.0) * math.pi
    return float(tok)


def _known_keys():
    return {f.name for f in fields(RunConfig)} - {"custom"}


def parse_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Resolve a config from an optional file plus override pairs.

    Overrides win over file values; every unknown key is rejected with its
    name; the result is fully validated.
    """
    cfg = RunConfig()
    known = _known_keys()

    def apply(key: str, raw: str):
        key = key.strip()
        if key.startswith("custom."):
            cfg.custom[key[len("custom."):]] = _parse_value(key, raw)
            return
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
        setattr(cfg, key, _parse_value(key, str(raw)))

    if path:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected 'key = value'")
                key, _, raw = line.partition("=")
                apply(key, raw)
    for key, raw in (overrides or {}).items():
        apply(key, raw)
    return cfg.validate()


def config_dict(cfg: RunConfig) -> dict:
    out = {}
    for f in fields(cfg):
        val = getattr(cfg, f.name)
        if isinstance(val, tuple):
            val = list(val)
        out[f.name] = val
    return out


def config_hash(cfg: RunConfig) -> str:
    """Content hash of the inputs that determine results; output paths and
    worker counts are execution details and excluded."""
    items = sorted((k, v) for k, v in config_dict(cfg).items()
                   if k not in ("out", "threads"))
    text = "\n".join(f"{k}={v!r}" for k, v in items)
    return hashlib.sha256(text.encode()).hexdigest()[:16]
