"""
Test suite for deeptune.
""" 