"""
Constructor parameters of serializable classes.

The problem file reader uses them to decide which keys a cone record
may contain and which of them are required.
"""
from contextlib import suppress
from dataclasses import MISSING, fields, is_dataclass
from inspect import Parameter, isclass, signature
from typing import get_type_hints

from .doc import doc_category


__all__ = (
    "get_annotations",
    "get_required_parameters",
)


@doc_category("Annotations")
def get_annotations(class_) -> dict:
    """
    Returns the constructor parameters of ``class_`` mapped to their annotations.

    Dataclass fields are returned as declared (the annotation may be a string), other classes
    and functions through :func:`typing.get_type_hints`. The return annotation is excluded.
    """
    if isclass(class_) and is_dataclass(class_):
        return {f.name: f.type for f in fields(class_) if f.init}

    annotations = {}
    with suppress(AttributeError, TypeError, NameError):
        annotations = get_type_hints(class_.__init__ if isclass(class_) else class_)

    annotations.pop("return", None)
    return annotations


@doc_category("Annotations")
def get_required_parameters(class_) -> set:
    "Returns names of ``class_``'s constructor parameters that have no default value."
    if isclass(class_) and is_dataclass(class_):
        return {
            f.name for f in fields(class_)
            if f.init and f.default is MISSING and f.default_factory is MISSING
        }

    target = class_.__init__ if isclass(class_) else class_
    return {
        name for name, param in signature(target).parameters.items()
        if name != "self" and param.default is Parameter.empty
        and param.kind not in {Parameter.VAR_KEYWORD, Parameter.VAR_POSITIONAL}
    }
