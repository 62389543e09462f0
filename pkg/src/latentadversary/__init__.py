#Latent Adversary - generative adversarial training at desk scale
#
#Copyright (c) 2026 The Latent Adversary developers
#
#Permission is hereby granted, free of charge, to any person obtaining a copy
#of this software and associated documentation files (the "Software"), to deal
#in the Software without restriction, including without limitation the rights
#to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
#copies of the Software, and to permit persons to whom the Software is
#furnished to do so, subject to the following conditions:
#
#The above copyright notice and this permission notice shall be included in all
#copies or substantial portions of the Software.
#
#THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
#IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
#FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
#AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
#LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
#OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
#SOFTWARE.

"""
This module defines the errors shared by all parts of latentadversary
"""
from os import path

try:
    with open(path.join(path.dirname(__file__),'VERSION')) as _fid:
        __version__ = _fid.read().strip()
except IOError:
    __version__ = 'unknown'

class GATError(Exception):
    """
    Common baseclass of all errors raised by latentadversary.
    """

class ShapeError(GATError, ValueError):
    """
    Operand shapes do not conform for an operation.
    """
    def __init__(self,operation,*shapes):
        """
        Create a new ShapeError

        :param str operation: name of the operation that rejected its operands
        :param shapes: the offending shapes
        """
        self.operation = operation
        "name of the operation"
        self.shapes = [tuple(s) for s in shapes]
        "shapes of the operands"
        GATError.__init__(
            self,
            "%s: incompatible shapes %s" %
            (operation,", ".join(str(s) for s in self.shapes))
        )

class ConfigError(GATError, ValueError):
    """
    A configuration value or document is invalid.
    """
    def __init__(self,field,message,line=None):
        self.field = field
        "dotted path of the offending field"
        self.line = line
        "line in the config file, if known"
        where = field if line is None else "%s (line %d)" % (field,line)
        GATError.__init__(self,"%s: %s" % (where,message))

class FormatError(GATError, ValueError):
    """
    A checkpoint or dataset container is malformed.
    """

class GraphError(GATError, RuntimeError):
    """
    The differentiation graph was used incorrectly.
    """

class NumericalError(GATError, RuntimeError):
    """
    A NaN or infinite value showed up where finite values are required.
    """
    def __init__(self,message,diagnostic=None):
        self.diagnostic = diagnostic or {}
        "dictionary with context about where the values appeared"
        GATError.__init__(self,message)

class GateError(GATError, RuntimeError):
    """
    A pretraining run did not pass its quality gate.
    """
    def __init__(self,message,curves=None):
        self.curves = curves or {}
        "training curves of the failed run, names to lists of values"
        GATError.__init__(self,message)

class AcceptanceError(GATError, RuntimeError):
    """
    The iteration-cap filter stopped accepting adversarial samples.
    """
    def __init__(self,message,rate=None):
        self.rate = rate
        "acceptance rate over the window that triggered the error"
        GATError.__init__(self,message)
