"""
Writes the API reference pages from the objects marked with ``doc_category``.
"""
from enum import EnumMeta
from pathlib import Path
import inspect
import os


# Set before importing the package, so that marked objects get recorded
os.environ["DOCUMENTATION"] = "True"
OUTPUT_PATH = Path(__file__).parent.parent / "reference"

import renyicones  # noqa: E402
from renyicones import doc  # noqa: E402


SECTION_TEMPLATE = """
---------------------------------
{name}
---------------------------------
.. {directive}:: {path}
{options}"""


def _directive(item) -> str:
    if isinstance(item, EnumMeta):
        return "autoenum"

    return "autoclass" if inspect.isclass(item) else "autofunction"


def _section(item) -> str:
    directive = _directive(item)
    return SECTION_TEMPLATE.format(
        name=item.__name__,
        directive=directive,
        path=f"{item.__module__}.{item.__name__}",
        options="    :members:\n" if directive != "autofunction" else "",
    )


def main():
    OUTPUT_PATH.mkdir(parents=True, exist_ok=True)
    entries = []
    for category, items in doc.categories.items():
        entry = category.lower().replace(' ', '_')
        # Enums first, then functions, then classes
        ordered = sorted(items, key=lambda item: ("autoenum", "autofunction", "autoclass").index(_directive(item)))
        with open(OUTPUT_PATH / f"{entry}.rst", "w", encoding="utf-8") as writer:
            writer.write(f"============================\n{category}\n============================\n")
            writer.writelines(_section(item) for item in ordered)

        entries.append(entry)

    with open(OUTPUT_PATH / "index.rst", "w", encoding="utf-8") as writer:
        writer.write(
            "=======================\n"
            f"API reference (v{renyicones.__version__})\n"
            "=======================\n\n"
            ".. toctree::\n\n"
        )
        writer.writelines(f"    {entry}\n" for entry in entries)


main()
