"""
Core functionality for deeptune - Configuration, errors, and shared utilities
"""
