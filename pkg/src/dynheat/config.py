"""Experiment configuration: a sectioned key-value file (INI syntax).

Example::

    [problem]
    ell = 1.0
    T = 1.0
    d = 1.0
    a = 0
    b_left = 0
    b_right = 0
    r = 1
    y0 = 0

    [discretization]
    n_cells = 256
    n_steps = 512

    [truth]
    source = parabolic

    [noise]
    p = 0.01, 0.03, 0.05
    seed = 0
    mode = zeromean

    [solver]
    epsilon = 1e-06
    e_J = 1e-06
    f0 = zero
    step_mode = adaptive
    max_iter = 1000

    [output]
    directory = out
"""
import configparser
import dataclasses
import hashlib
import io
from dataclasses import dataclass

from .landweber import NOISE_MODES
from .presets import EXAMPLES, compile_field

__all__ = ["ExperimentConfig", "load_config", "parse_config", "apply_example"]

_SECTIONS = {
    "problem": ("ell", "T", "d", "a", "b_left", "b_right", "r", "y0"),
    "discretization": ("n_cells", "n_steps"),
    "truth": ("source",),
    "noise": ("p", "seed", "mode"),
    "solver": ("epsilon", "e_J", "f0", "step_mode", "max_iter"),
    "output": ("directory",),
}


@dataclass(frozen=True)
class ExperimentConfig:
    ell: float = 1.0
    T: float = 1.0
    d: float = 1.0
    a: str = "0"
    b_left: float = 0.0
    b_right: float = 0.0
    r: str = "1"
    y0: str = "0"
    n_cells: int = 256
    n_steps: int = 512
    source: str = "parabolic"
    p: tuple = (0.01, 0.03, 0.05)
    seed: int = 0
    mode: str = "zeromean"
    epsilon: float = 1e-6
    e_J: float = 1e-6
    f0: str = "zero"
    step_mode: str = "adaptive"
    max_iter: int = 1000
    directory: str = "out"

    def __post_init__(self):
        if not self.p:
            raise ValueError("noise level list must not be empty")
        if any(not 0.0 <= p <= 1.0 for p in self.p):
            raise ValueError(f"noise levels must lie in [0, 1], got {self.p}")
        if self.mode not in NOISE_MODES:
            raise ValueError(f"unknown noise mode {self.mode!r}")
        if self.step_mode not in ("adaptive", "lipschitz"):
            try:
                if float(self.step_mode) <= 0:
                    raise ValueError
            except ValueError:
                raise ValueError("step_mode must be adaptive, lipschitz or a positive number") from None
        for name, variables in (("a", ("x",)), ("y0", ("x",)), ("r", ("t", "x")),
                                ("source", ("x",)), ("f0", ("x",))):
            compile_field(getattr(self, name), variables)

    def to_text(self):
        parser = configparser.ConfigParser()
        parser.optionxform = str
        for section, keys in _SECTIONS.items():
            parser[section] = {k: _dump(getattr(self, k)) for k in keys}
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_text())

    def digest(self):
        return hashlib.sha256(self.to_text().encode()).hexdigest()

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def _dump(v):
    if isinstance(v, tuple):
        return ", ".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def _coerce(key, text):
    kind = _FIELD_TYPES[key]
    if kind is tuple:
        return tuple(float(s) for s in text.replace(";", ",").split(",") if s.strip())
    if kind is int:
        return int(text)
    if kind is float:
        return float(text)
    return text.strip()


def parse_config(text):
    parser = configparser.ConfigParser()
    parser.optionxform = str
    parser.read_string(text)
    values = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ValueError(f"unknown config section [{section}]")
        for key, raw in parser[section].items():
            if key not in _SECTIONS[section]:
                raise ValueError(f"unknown key {key!r} in section [{section}]")
            values[key] = _coerce(key, raw)
    return ExperimentConfig(**values)


def load_config(path):
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except (OSError, ValueError, configparser.Error) as exc:
        raise ValueError(f"{path}: {exc}") from exc


def apply_example(cfg, number):
    """Overlay the preset of numerical example ``number`` (single-offset ``paper`` noise mode)."""
    if number not in EXAMPLES:
        raise ValueError(f"unknown example {number}; choose from {sorted(EXAMPLES)}")
    preset = EXAMPLES[number]
    return cfg.replace(
        ell=1.0, T=1.0, d=1.0, a="0", b_left=0.0, b_right=0.0, r="1", y0="0", f0="zero",
        source=preset["source"], epsilon=preset["epsilon"], e_J=preset["e_J"],
        p=preset["p"], mode="paper", step_mode="adaptive",
    )
