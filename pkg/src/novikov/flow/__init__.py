"""Gradient-flow experiments on the flat torus with a circle-valued Morse map."""
