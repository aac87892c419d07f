"""
Report models and JSON/CSV emission.
"""
