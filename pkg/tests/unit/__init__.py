"""
Tests unitaires : un fichier par module de src/
"""
