from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

from bitterm.errors import ConfigError

FULL = None


def parse_schedule(value: Union[str, Sequence]) -> Tuple[Optional[int], ...]:
    """``"1,10,full"`` or a list such as ``[1, 10, "full"]``; ``None`` stands for the full width."""
    items = value.split(",") if isinstance(value, str) else list(value)
    schedule = []
    for item in items:
        text = str(item).strip().lower()
        if text in ("full", "none"):
            schedule.append(FULL)
            continue
        try:
            schedule.append(int(text))
        except ValueError as e:
            raise ConfigError(f"bad coefficient range {item!r} in schedule") from e
    return tuple(schedule)


@dataclass(frozen=True)
class SynthesisBounds:
    """
    Limits of the synthesis loops.

    ``coeff_schedule`` lists the coefficient magnitudes tried by ranking
    synthesis, each stage strictly wider than the last; ``None`` allows any
    coefficient representable at the variable width. ``extend_width``
    evaluates ranking arithmetic one bit wider than the program variables.
    """

    max_lex: int = 3
    max_iter: int = 20
    coeff_schedule: Tuple[Optional[int], ...] = (1, 10, FULL)
    extend_width: bool = True

    def __post_init__(self):
        if self.max_lex < 1:
            raise ConfigError(f"max_lex must be positive, got {self.max_lex}")
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be positive, got {self.max_iter}")
        if not self.coeff_schedule:
            raise ConfigError("coefficient schedule is empty")
        previous = 0
        for i, stage in enumerate(self.coeff_schedule):
            if stage is FULL:
                if i != len(self.coeff_schedule) - 1:
                    raise ConfigError("'full' must be the last coefficient range")
                continue
            if stage <= previous:
                raise ConfigError(f"coefficient schedule must strictly widen, got {self.coeff_schedule}")
            previous = stage
