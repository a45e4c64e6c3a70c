# -*- coding: utf-8 -*-
#
# steerkey documentation build configuration file.

import sys
import os

# If extensions (or modules to document with autodoc) are in another directory,
# add these directories to sys.path here.
sys.path.insert(0, os.path.dirname(os.path.abspath('.')))

# -- General configuration -----------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.todo',
    'sphinx.ext.coverage',
    'sphinx.ext.viewcode',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'steerkey'
copyright = u'2026, the steerkey developers'

release = version = '.'.join(
    str(part) for part in __import__('steerkey').VERSION[:3]
)

exclude_patterns = ['_build']
pygments_style = 'sphinx'

# -- Options for HTML output ---------------------------------------------------

html_theme = 'default'
html_static_path = ['_static']
htmlhelp_basename = 'steerkeydoc'

# -- Options for LaTeX output --------------------------------------------------

latex_elements = {
}

latex_documents = [
  ('index', 'steerkey.tex', u'steerkey Documentation',
   u'the steerkey developers', 'manual'),
]

# -- Options for manual page output --------------------------------------------

man_pages = [
    ('index', 'steerkey', u'steerkey Documentation',
     [u'the steerkey developers'], 1)
]

# -- Options for Texinfo output ------------------------------------------------

texinfo_documents = [
  ('index', 'steerkey', u'steerkey Documentation',
   u'the steerkey developers', 'steerkey',
   'Certified key rates for one-sided device-independent QKD.',
   'Miscellaneous'),
]
