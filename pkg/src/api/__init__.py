"""
API layer for deeptune - FastAPI application and endpoints
"""
