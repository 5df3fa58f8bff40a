"""
Subcommands of the ``holofem`` command line program.
"""
