"""
deeptune - Score-free vocal pitch correction
"""

__version__ = "0.1.0"
__author__ = "deeptune developers"
__description__ = "Per-note pitch correction predicted from the vocal/backing constant-Q alignment"
