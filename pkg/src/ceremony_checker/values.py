"""Symbolic value universe: interned constants, booleans, and tuples."""

from __future__ import annotations


class Sym:
    """An interned symbolic constant; compared by identity."""

    __slots__ = ("name", "index")

    def __init__(self, name: str, index: int):
        self.name = name
        self.index = index

    def __repr__(self) -> str:
        return self.name


_REGISTRY: dict[str, Sym] = {}


def sym(name: str) -> Sym:
    """Return the unique constant with this name, creating it on first use."""
    s = _REGISTRY.get(name)
    if s is None:
        s = Sym(name, len(_REGISTRY))
        _REGISTRY[name] = s
    return s


def value_text(v) -> str:
    if isinstance(v, Sym):
        return v.name
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return "(" + ",".join(value_text(x) for x in v) + ")"
    return str(v)
