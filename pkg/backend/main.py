"""
Main entry point: `python backend/main.py COMMAND ...`.
"""
from galtonrank.cli.main import main

if __name__ == "__main__":
    main()
