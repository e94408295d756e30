"""
Run configuration: the ``analysis`` block of the Kedro parameters plus command-line overrides.
"""
import dataclasses
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from kedro.config import MissingConfigException, OmegaConfigLoader

from bitterm.absdom import TemplateSpec
from bitterm.driver import Analyzer, Budget
from bitterm.driver.analyzer import CHECKS
from bitterm.errors import ConfigError
from bitterm.frontend import ast as A
from bitterm.logic.solver import SolverSettings
from bitterm.synth import SynthesisBounds, parse_schedule

logger = logging.getLogger(__name__)

MODES = ("ipta", "mta")
MAX_ORACLE_WIDTH = 6

_SECTIONS = {
    "solver": {"backend", "name", "command"},
    "bounds": {"max_lex", "max_iter", "coeff_schedule", "extend_width"},
    "budgets": {"timeout_proc", "timeout"},
    "output": {"json", "emit_ssa", "emit_dimacs"},
    "oracle": {"enabled", "width"},
}
_SCALARS = {"mode", "check", "entry", "type_widths", "template", "max_template_vars"}


def _positive_or_none(value: Any) -> Optional[float]:
    return None if value in (None, 0, "none") else float(value)


@dataclass
class RunConfig:
    """Everything one analysis run needs besides the program text."""

    mode: str = "ipta"
    check: str = "conditional"
    entry: Optional[str] = None
    type_widths: Dict[str, int] = field(default_factory=lambda: dict(A.DEFAULT_WIDTHS))
    template: str = "interval"
    max_template_vars: int = 32
    solver: SolverSettings = field(default_factory=SolverSettings)
    bounds: SynthesisBounds = field(default_factory=SynthesisBounds)
    timeout_proc: Optional[float] = 60.0
    timeout: Optional[float] = 1800.0
    json: bool = False
    emit_ssa: bool = False
    emit_dimacs: Optional[str] = None
    oracle: bool = False
    oracle_width: int = 4

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {self.mode!r}")
        if self.check not in CHECKS:
            raise ConfigError(f"check must be one of {', '.join(CHECKS)}, got {self.check!r}")
        widths = dict(A.DEFAULT_WIDTHS)
        for base, width in (self.type_widths or {}).items():
            if base not in A.DEFAULT_WIDTHS:
                raise ConfigError(f"unknown base type {base!r} in type_widths")
            if int(width) < 2:
                raise ConfigError(f"width of {base} must be at least 2, got {width}")
            widths[base] = int(width)
        self.type_widths = widths
        if self.max_template_vars < 1:
            raise ConfigError(f"max_template_vars must be positive, got {self.max_template_vars}")
        if not 2 <= self.oracle_width <= MAX_ORACLE_WIDTH:
            raise ConfigError(f"oracle width must be between 2 and {MAX_ORACLE_WIDTH}, got {self.oracle_width}")
        self.budget()

    @classmethod
    def from_params(cls, params: Mapping[str, Any]) -> "RunConfig":
        """
        Build a configuration from Kedro parameters.

        Parameters:
        - params (Mapping[str, Any]): either all parameters, read from their
          ``analysis`` block, or the block itself.

        Returns:
        RunConfig: the validated configuration; unknown keys raise ConfigError.
        """
        block = dict(params.get("analysis", params) or {})
        unknown = set(block) - _SCALARS - set(_SECTIONS)
        if unknown:
            raise ConfigError(f"unknown analysis settings: {', '.join(sorted(unknown))}")
        sections = {}
        for name, allowed in _SECTIONS.items():
            section = dict(block.get(name) or {})
            extra = set(section) - allowed
            if extra:
                raise ConfigError(f"unknown {name} settings: {', '.join(sorted(extra))}")
            sections[name] = section
        kwargs: Dict[str, Any] = {k: block[k] for k in _SCALARS if block.get(k) is not None}
        if sections["solver"]:
            kwargs["solver"] = SolverSettings(**sections["solver"])
        bounds = sections["bounds"]
        if "coeff_schedule" in bounds:
            bounds["coeff_schedule"] = parse_schedule(bounds["coeff_schedule"])
        if bounds:
            kwargs["bounds"] = SynthesisBounds(**bounds)
        for key in ("timeout_proc", "timeout"):
            if key in sections["budgets"]:
                kwargs[key] = _positive_or_none(sections["budgets"][key])
        kwargs.update(sections["output"])
        if "enabled" in sections["oracle"]:
            kwargs["oracle"] = bool(sections["oracle"]["enabled"])
        if "width" in sections["oracle"]:
            kwargs["oracle_width"] = int(sections["oracle"]["width"])
        return cls(**kwargs)

    def override(self, **changes: Any) -> "RunConfig":
        """A copy with every change that is not ``None`` applied; bound fields go into ``bounds``."""
        changes = {k: v for k, v in changes.items() if v is not None}
        bound_fields = {f.name for f in dataclasses.fields(SynthesisBounds)}
        bounds = {k: changes.pop(k) for k in list(changes) if k in bound_fields}
        if "coeff_schedule" in bounds:
            bounds["coeff_schedule"] = parse_schedule(bounds["coeff_schedule"])
        widths = changes.pop("type_widths", None)
        if widths:
            changes["type_widths"] = {**self.type_widths, **widths}
        if bounds:
            changes["bounds"] = dataclasses.replace(self.bounds, **bounds)
        return dataclasses.replace(self, **changes)

    def template_spec(self) -> TemplateSpec:
        return TemplateSpec.parse(self.template, self.max_template_vars)

    def budget(self) -> Budget:
        return Budget(self.timeout_proc, self.timeout)

    @property
    def oracle_widths(self) -> Dict[str, int]:
        return {**self.type_widths, "int": self.oracle_width}

    def analyzer(self, program: A.Program) -> Analyzer:
        return Analyzer(program, self.bounds, self.template_spec(), self.solver, self.budget(),
                        monolithic=self.mode == "mta")


def load_run_config(conf_source: Union[str, Path] = "conf", env: Optional[str] = None,
                    overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """
    Load the ``analysis`` parameters the way a Kedro session does and apply overrides.

    Parameters:
    - conf_source (str | Path): the project's configuration directory.
    - env (str): configuration environment layered over ``base``.
    - overrides (Mapping[str, Any]): settings from the command line; ``None`` values are ignored.

    Returns:
    RunConfig: built-in defaults when ``conf_source`` does not exist.
    """
    params: Dict[str, Any] = {}
    if Path(conf_source).is_dir():
        run_env = "local" if (Path(conf_source) / "local").is_dir() else "base"
        loader = OmegaConfigLoader(conf_source=str(conf_source), env=env, base_env="base", default_run_env=run_env)
        try:
            params = loader["parameters"]
        except MissingConfigException:
            logger.debug(f"no parameters under {conf_source}")
    else:
        logger.debug(f"no configuration directory {conf_source}, using defaults")
    config = RunConfig.from_params(params)
    return config.override(**(overrides or {}))
