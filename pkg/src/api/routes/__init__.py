"""
API routes package for deeptune.
"""
