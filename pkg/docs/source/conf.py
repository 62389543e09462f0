# -*- coding: utf-8 -*-
#
# Latent Adversary documentation build configuration file.

import sys
import os

sys.path.insert(0, os.path.abspath('../../src'))

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.todo',
    'sphinx.ext.coverage',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'Latent Adversary'
copyright = u'2026, The Latent Adversary developers'

with open(os.path.abspath('../../src/latentadversary/VERSION')) as fid:
    release = fid.read().strip()
version = '.'.join(release.split('.')[:2])

exclude_patterns = []
pygments_style = 'sphinx'

# -- Options for HTML output ----------------------------------------------

html_theme = 'default'
html_static_path = []
htmlhelp_basename = 'Latentadversarydoc'

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {
}

latex_documents = [
  ('index', 'Latentadversary.tex', u'Latent Adversary Documentation',
   u'The Latent Adversary developers', 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    ('index', 'latentadversary', u'Latent Adversary Documentation',
     [u'The Latent Adversary developers'], 1)
]

# -- Extension configuration ----------------------------------------------

todo_include_todos = True
