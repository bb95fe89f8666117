"""dclab: Dunkl and Cherednik operators over root systems."""

__version__ = "0.1.0"
