"""Project settings. The analysis reads its parameters through the same loader
as ``kedro run`` so both entry points see one configuration."""

from kedro.config import OmegaConfigLoader  # noqa: import-outside-toplevel

CONFIG_LOADER_CLASS = OmegaConfigLoader
CONFIG_LOADER_ARGS = {"base_env": "base", "default_run_env": "local"}
