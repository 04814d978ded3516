"""
humangs - worst-case question planning for locating targets in a DAG with human answers
"""

__version__ = "0.1.0"
__author__ = "humangs developers"
