"""GRAND-MO : décodage par devinette du bruit pour canaux de Markov à bursts."""

__version__ = "0.1.0"
