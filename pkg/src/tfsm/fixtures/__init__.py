"""Reference machines shipped as JSON documents.

``fig4a`` and ``fig4b`` are aliases of ``m1`` and ``m2``.
"""

from importlib import resources

from ..io import parse_machine

NAMES = ("fig1a", "fig2a", "fig3a", "m1", "m2")
ALIASES = {"fig4a": "m1", "fig4b": "m2"}


def path(name: str):
    name = ALIASES.get(name, name)
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(NAMES)}")
    return resources.files(__name__).joinpath(f"{name}.json")


def text(name: str) -> str:
    return path(name).read_text(encoding="utf-8")


def load(name: str):
    return parse_machine(text(name))
