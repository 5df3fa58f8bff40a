# Configuration file for the Sphinx documentation builder.
#
# Only the options that differ from the defaults are set here; see
# http://www.sphinx-doc.org/en/master/config for the full list.

import os
import sys

sys.path.insert(0, os.path.abspath(".."))

from holofem import __version__  # noqa: E402

# -- Project information -----------------------------------------------------

project = "holofem"
copyright = "2026, holofem developers"
author = "holofem developers"

# The short X.Y version
version = __version__
# The full version, including alpha/beta/rc tags
release = __version__


# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.intersphinx",
    "sphinx.ext.coverage",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
    "sphinxcontrib.napoleon",
    "sphinx_autodoc_typehints",
]

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

# include class docstrings and __init__ docstrings
autoclass_content = "both"

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
}


# -- Options for HTML output -------------------------------------------------

html_theme = "alabaster"
html_static_path = ["_static"]
html_sidebars = {
    "**": [
        "about.html",
        "navigation.html",
        "localtoc.html",
        "searchbox.html",
    ],
}
htmlhelp_basename = "holofemdoc"


# -- Options for manual page output ------------------------------------------

man_pages = [(master_doc, "holofem", "holofem Documentation", [author], 1)]
