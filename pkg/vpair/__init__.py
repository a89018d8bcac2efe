"""
vpair - steadily rotating and translating asymmetric vortex-patch pairs
"""
import os

__version__ = "0.1.0"

_dirpath = os.path.dirname(os.path.abspath(__file__))
