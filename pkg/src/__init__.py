"""
relu-certify - Certification d'injectivité des couches ReLU par frames alpha-rectifiantes
"""

__version__ = "1.0.0"
__author__ = "relu-certify Team"
