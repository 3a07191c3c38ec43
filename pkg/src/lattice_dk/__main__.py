"""
Run the lattice-dk CLI with ``python -m lattice_dk``.
"""

from .cli import main

if __name__ == "__main__":
    main()
