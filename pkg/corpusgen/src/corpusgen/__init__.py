"""Synthetic Arabic page-image corpus generator with ground truth."""

from .generate import BatchSpec, gen_corpus, gen_from_spec_file
from .glyphs import GLYPHS, FontMetrics
from .render import PageMeta, RenderSpec, render_page, render_word, save_page
from .shaping import shape_word

__version__ = "0.1.0"
