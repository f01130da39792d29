# commands/__init__.py
# This file makes the 'commands' folder a proper Python module
# One module per CLI subcommand family: figures, sweeps, acceptance
