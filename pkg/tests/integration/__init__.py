"""
Tests d'intégration : campagnes et valeurs de référence
"""
