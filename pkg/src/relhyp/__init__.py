"""Desk-scale coarse geometry of relatively hyperbolic groups: cusped spaces,
horizon discretizations of the Bowditch boundary, and quasiconformal
measurements of boundary maps induced by quasi-isometries."""

__version__ = "0.1.0"
