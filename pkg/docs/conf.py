#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# HardBalls documentation build configuration file.

import os
import sys

sys.path.insert(0, os.path.abspath('..'))

import hardballs

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.todo',
    'sphinx.ext.coverage',
    'sphinx.ext.imgmath',
    'sphinx.ext.viewcode',
    'numpydoc',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'HardBalls'
copyright = '2026, the HardBalls authors'
author = 'the HardBalls authors'

version = hardballs.__version__
release = hardballs.__version__

language = 'en'
exclude_patterns = ['_build']
pygments_style = 'sphinx'
todo_include_todos = True

# numpydoc builds a table for every class; the autodoc member lists cover it
numpydoc_show_class_members = False

# -- Options for HTML output ----------------------------------------------

html_theme = 'sphinx_rtd_theme'
htmlhelp_basename = 'hardballsdoc'

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'hardballs', 'HardBalls Documentation', [author], 1),
]
