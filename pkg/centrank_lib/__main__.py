"""
Allows `python -m centrank_lib ...`.
"""

# Self-Import | the command line:
from centrank_lib.cli import main

if __name__ == "__main__":
    main()
