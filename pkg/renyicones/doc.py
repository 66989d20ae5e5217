"""
Documentation helpers.

Objects marked with :func:`doc_category` get API reference pages generated by
``docs/source/scripts/generate_autodoc.py``. Marking only records the object
when the ``DOCUMENTATION`` environment variable is set.
"""
from typing import Any, Dict, List
from os import environ


__all__ = (
    "doc_category",
    "DOCUMENTATION_MODE",
)

DOCUMENTATION_MODE = bool(environ.get("DOCUMENTATION", False))

#: Reference category -> objects in it, in definition order.
categories: Dict[str, List[Any]] = {}


def doc_category(category: str):
    """
    Marks a class or function for the API reference.

    Parameters
    ------------
    category: str
        Title of the reference page the object is listed on.
    """
    def _category(item):
        if DOCUMENTATION_MODE:
            categories.setdefault(category, []).append(item)

        return item

    return _category
