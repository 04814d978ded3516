"""
Entry point for running the package as a module: python -m humangs
"""

from .cli import main

if __name__ == '__main__':
    main()
