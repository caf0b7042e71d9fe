"""Numerical and symbolic toolkit for joint ergodicity of Hardy-field iterates.

Subpackages:

* ``fn``      closed-form functions, exact derivatives, growth diagnostics
* ``window``  Taylor families on short windows and the change of variables
* ``pet``     exact PET induction on tuples of variable polynomials
* ``torus``   torus rotations as an exact verification lab
* ``runner``  experiment configs, the staged pipeline and the CLI
"""
__version__ = "0.1.0"
