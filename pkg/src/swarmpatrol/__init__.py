"""Operator-in-the-loop patrol simulator for a swarm of surveillance UAVs."""

__version__ = "0.1.0"
