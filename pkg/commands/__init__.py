"""
Commands package for the relmatch experiment runner.
"""
