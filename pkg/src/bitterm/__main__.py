"""bitterm file for ensuring the package is executable
as `bitterm` and `python -m bitterm`
"""
from pathlib import Path

from kedro.framework.project import configure_project

from bitterm.commands import main as run


def main(*args, **kwargs):
    package_name = Path(__file__).parent.name
    configure_project(package_name)
    run(*args, **kwargs)


if __name__ == "__main__":
    main()
