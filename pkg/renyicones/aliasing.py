"""
Module contains functionality for managing cone aliases.
An alias is the name under which a cone kind is written into problem files,
e.g., :class:`~renyicones.cones.RenyiHypo` -> ``"renyi-hypo"``.
"""
from typing import Dict, Optional
from .doc import doc_category


__all__ = (
    "register_alias",
    "get_aliased_name",
    "get_aliased_class",
)


ALIASES: Dict[type, str] = {}


@doc_category("Aliasing")
def register_alias(cls: type, alias: str):
    """
    Creates an alias name for type ``cls``.
    Aliases are used in place of the class name in:

    - The ``"kind"`` field of problem file cone records
    - Reports emitted by the command line

    Parameters
    ------------
    cls: type
        The class to register an alias for.
    alias: str
        The alias.

    Example
    -----------

    .. code-block:: python

        register_alias(NonNeg, "nonneg")
    """
    if alias in ALIASES.values() and ALIASES.get(cls) != alias:
        raise ValueError(f"Alias '{alias}' is already registered for another class.")

    ALIASES[cls] = alias


@doc_category("Aliasing")
def get_aliased_name(class_) -> Optional[str]:
    """
    Returns the ``class_``'s aliased name. If class has no alias name,
    ``None`` is returned.
    """
    return ALIASES.get(class_)


@doc_category("Aliasing")
def get_aliased_class(alias: str) -> Optional[type]:
    """
    Returns the class registered under ``alias``. If no class uses the alias,
    ``None`` is returned.
    """
    for cls, name in ALIASES.items():
        if name == alias:
            return cls

    return None
