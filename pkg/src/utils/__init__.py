"""
Utility functions for deeptune - Helper functions and common utilities
"""
