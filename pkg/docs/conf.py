# Configuration file for the Sphinx documentation builder.

import os
import sys
from datetime import datetime

# Ajouter le chemin du projet au PYTHONPATH
sys.path.insert(0, os.path.abspath('..'))

from src import __version__  # noqa: E402

# -- Project information -----------------------------------------------------

project = 'relu-certify'
copyright = f'{datetime.now().year}, relu-certify Team'
author = 'relu-certify Team'
release = __version__
language = 'fr'

# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.autosummary',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
    'sphinx_autodoc_typehints',
    'myst_parser',
]

templates_path = ['_templates']
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']

# -- Extension configuration -------------------------------------------------

# Docstrings au format Google (Args/Returns/Raises)
napoleon_google_docstring = True
napoleon_numpy_docstring = False
napoleon_include_init_with_doc = False
napoleon_use_param = True
napoleon_use_rtype = False
napoleon_attr_annotations = True

# Types rendus par sphinx-autodoc-typehints
typehints_fully_qualified = False
always_document_param_types = False

autodoc_default_options = {
    'members': True,
    'member-order': 'bysource',
    'undoc-members': True,
    'exclude-members': '__weakref__, __post_init__',
}

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
    'pandas': ('https://pandas.pydata.org/docs/', None),
}
