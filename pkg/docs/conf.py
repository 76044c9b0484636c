# type: ignore

"""Sphinx configuration script."""

from __future__ import annotations

import enum
import importlib.metadata
import inspect

import m2r2

from tropwrap.exceptions import Error, TropwrapWarning

project = "tropwrap"
author = "demberto"
copyright = f"2024, {author}"
release = importlib.metadata.version("tropwrap")  # Needs package installation!
extensions = [
    "m2r2",  # Markdown to reStructuredText conversion
    "sphinx_copybutton",  # Copy button for code blocks
    "sphinx_design",  # Grids, cards, icons and tabs
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.coverage",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",  # Formulas in the architecture notes
    "sphinx.ext.napoleon",  # Google-style docstrings
    "sphinx.ext.todo",
    "sphinx.ext.viewcode",
    "sphinx_toolbox",
    "sphinx_toolbox.more_autodoc.sourcelink",
    "sphinx_toolbox.sidebar_links",
]
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
html_theme = "furo"
autodoc_inherit_docstrings = False
autodoc_member_order = "bysource"
autodoc_default_options = {"undoc-members": True}
needs_sphinx = "5.0"
napoleon_preprocess_types = True
napoleon_attr_annotations = True
html_permalinks_icon = "<span>#</span>"
github_username = author
github_repository = project
autodoc_show_sourcelink = True
todo_include_todos = True
intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "sympy": ("https://docs.sympy.org/latest", None),
    "mpmath": ("https://mpmath.org/doc/current", None),
}


def autodoc_markdown(app, what, name, obj, options, lines):
    """Convert markdown in docstrings to reStructuredText."""
    newlines = m2r2.convert("\n".join(lines)).splitlines()
    lines.clear()
    lines.extend(newlines)


def remove_enum_signature(app, what, name, obj, options, signature, return_annotation):
    """Removes the erroneous ``(value)`` signature of enum classes."""
    if inspect.isclass(obj) and issubclass(obj, enum.Enum):
        return ("", return_annotation)


def remove_error_signature(app, what, name, obj, options, signature, return_annotation):
    """Exceptions and warnings are raised by the library, never constructed by users."""
    if inspect.isclass(obj) and issubclass(obj, (Error, TropwrapWarning)):
        return ("", return_annotation)


def setup(app):
    """Connects all callbacks to their event handlers."""
    app.connect("autodoc-process-docstring", autodoc_markdown)
    app.connect("autodoc-process-signature", remove_enum_signature)
    app.connect("autodoc-process-signature", remove_error_signature)
