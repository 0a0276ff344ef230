"""
Data models for deeptune - Pydantic schemas, signal containers and constants
"""
