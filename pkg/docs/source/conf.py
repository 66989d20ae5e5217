# Configuration file for the Sphinx documentation builder.
#
# https://www.sphinx-doc.org/en/master/usage/configuration.html

# -- Path setup --------------------------------------------------------------
import sys
import os

os.environ["DOCUMENTATION"] = "True"
sys.path.insert(0, os.path.abspath('../../'))
sys.path.insert(0, os.path.abspath('.'))

from renyicones import __version__


# -- Project information -----------------------------------------------------
project = 'RenyiCones'
copyright = '2023, David Hozic'
author = 'David Hozic'
version = __version__


# -- General configuration ---------------------------------------------------
numfig = True

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
    "sphinx.ext.mathjax",
    "sphinx.ext.autosectionlabel",
    "sphinx.ext.intersphinx",
    "sphinx_copybutton",
    "enum_tools.autoenum",
    "sphinx_design",
    "sphinx_search.extension",
]

source_suffix = {
    '.rst': 'restructuredtext',
    '.md': 'markdown',
}

templates_path = ['_templates']
exclude_patterns = []
autosectionlabel_prefix_document = True


# Autodoc
autodoc_typehints = "signature"
autodoc_typehints_format = "short"

development_build = os.environ.get("DOC_DEVELOPMENT", default="False") == "True"

autodoc_default_options = {
    'member-order': 'bysource',
    "private-members": development_build
}


# Intersphinx
intersphinx_mapping = {
    "python": ("https://docs.python.org/3/", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
}

# ----------- HTML ----------- #
html_title = project
html_theme = 'furo'
html_static_path = []
html_theme_options = {
    "navigation_with_keys": True,
    "top_of_page_button": "edit",
    "source_directory": "docs/source",
}

# ----------- Latex ----------- #
latex_engine = "xelatex"
