"""
Tests pour relu-certify
"""
