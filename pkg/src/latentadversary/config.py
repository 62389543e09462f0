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
This module defines the configuration objects and the run configuration
document read by the command line interface
"""
import hashlib
import json
import os
from collections import OrderedDict
from copy import deepcopy

from latentadversary import ConfigError

def _plain(value):
    if isinstance(value,Options):
        return value.to_dict()
    if isinstance(value,(tuple,list)):
        return [_plain(v) for v in value]
    if isinstance(value,dict):
        return OrderedDict((k,_plain(v)) for k,v in value.items())
    if hasattr(value,'item') and not isinstance(value,(str,bytes)):
        return value.item()
    return value

def canonical_json(value):
    "JSON text with sorted keys and no whitespace, for hashing"
    return json.dumps(_plain(value),sort_keys=True,separators=(',',':'))

def config_hash(value):
    """
    Short content hash of a configuration.

    :param value: an Options instance or a plain dictionary
    :rtype: str
    """
    return hashlib.sha256(canonical_json(value).encode('utf-8')).hexdigest()[:16]

class Options(object):
    """
    Abstract baseclass for configuration objects.

    Subclasses list their fields with defaults in :attr:`defaults`. The
    constructor takes keyword arguments, rejects unknown ones and calls
    :meth:`validate`.
    """
    defaults = OrderedDict()
    "ordered dictionary of field names to default values"
    section = 'options'
    "name used in error messages"

    def __init__(self,**kwargs):
        for name in kwargs:
            if name not in self.defaults:
                raise ConfigError("%s.%s" % (self.section,name),"unknown key")
        for name,default in self.defaults.items():
            setattr(self,name,kwargs[name] if name in kwargs else deepcopy(default))
        self.validate()

    def validate(self):
        """
        Check the invariants of this configuration

        :raises ConfigError: if an invariant is violated
        """

    def fail(self,name,message):
        raise ConfigError("%s.%s" % (self.section,name),message)

    def require(self,condition,name,message):
        if not condition:
            self.fail(name,message)

    def to_dict(self):
        """
        Fully resolved configuration with all defaults expanded

        :rtype: OrderedDict
        """
        return OrderedDict((n,_plain(getattr(self,n))) for n in self.defaults)

    @classmethod
    def from_dict(cls,values):
        if values is None:
            return cls()
        if not isinstance(values,dict):
            raise ConfigError(cls.section,"expected an object, got %s" % type(values).__name__)
        return cls(**values)

    def replace(self,**changes):
        "copy of this configuration with some fields changed"
        values = self.to_dict()
        values.update(changes)
        return type(self)(**values)

    def hash(self):
        return config_hash(self.to_dict())

    def __eq__(self,other):
        return type(self) is type(other) and self.to_dict() == other.to_dict()

    def __ne__(self,other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        args = ", ".join("%s=%r" % item for item in self.to_dict().items())
        return "%s(%s)" % (type(self).__name__,args)

def parse_ratio(text):
    """
    Parse a clean:adversarial ratio like '1:1' or '1:0'.

    :rtype: tuple of two ints
    :raises ConfigError: if the ratio is malformed
    """
    try:
        clean,adv = [int(p) for p in str(text).split(':')]
    except ValueError:
        raise ConfigError('train.ratio',"expected 'clean:adversarial', got %r" % (text,))
    if clean < 0 or adv < 0 or clean + adv == 0:
        raise ConfigError('train.ratio',"parts must be non-negative and not both zero")
    return clean,adv

class RunConfig(object):
    """
    The JSON run configuration: one section per configuration object and a
    top-level seed.
    """
    sections = ('data','models','pretrain','attack','pixel','inversion','segattack','train','eval')
    "names of the sections that are allowed in the document"

    def __init__(self,document=None,source=None,check_paths=True):
        """
        Create a new RunConfig

        :param dict document: the parsed JSON document
        :param str source: file name for diagnostics
        :param bool check_paths: whether checkpoint paths must exist
        :raises ConfigError: for unknown keys or invalid values
        """
        #imports are local because the option classes live in the modules
        #that use them, and those modules import this one
        from latentadversary.data import SynthSpec
        from latentadversary.attack import AttackConfig
        from latentadversary.pixel import PixelAttackConfig
        from latentadversary.inversion import InversionConfig
        from latentadversary.segattack import SegAttackConfig
        from latentadversary.training import TrainConfig
        from latentadversary.evaluation import EvalConfig
        from latentadversary.pretrain import PretrainConfig

        document = OrderedDict(document or {})
        self.source = source
        "file the document was read from"
        for key in document:
            if key not in self.sections and key != 'seed':
                raise ConfigError(key,"unknown section")
        self.seed = int(document.get('seed',0))
        "top-level seed, inherited by sections that do not set their own"
        classes = OrderedDict([
            ('data',SynthSpec),('models',ModelPaths),('pretrain',PretrainConfig),
            ('attack',AttackConfig),('pixel',PixelAttackConfig),('inversion',InversionConfig),
            ('segattack',SegAttackConfig),('train',TrainConfig),('eval',EvalConfig),
        ])
        for key,cls in classes.items():
            values = document.get(key)
            if values is not None and not isinstance(values,dict):
                raise ConfigError(key,"expected an object, got %s" % type(values).__name__)
            values = OrderedDict(values or {})
            if 'seed' in cls.defaults:
                values.setdefault('seed',self.seed)
            setattr(self,key,cls.from_dict(values))
        if check_paths:
            self.models.check_paths()

    @classmethod
    def load(cls,filename,check_paths=True,overrides=None):
        """
        Read a RunConfig from a JSON file.

        :param str filename: JSON document
        :param bool check_paths: whether checkpoint paths must exist
        :param dict overrides: values replacing those of the document, see
                               :func:`apply_overrides`
        :raises ConfigError: with line information for malformed JSON
        """
        with open(filename) as fid:
            text = fid.read()
        try:
            document = json.loads(text,object_pairs_hook=OrderedDict)
        except ValueError as e:
            raise ConfigError(filename,"malformed JSON: %s" % e.msg,
                              getattr(e,'lineno',None))
        if not isinstance(document,dict):
            raise ConfigError(filename,"top level must be an object")
        apply_overrides(document,overrides or {})
        try:
            return cls(document,filename,check_paths)
        except ConfigError as e:
            raise ConfigError(e.field,str(e).split(': ',1)[-1],
                              _find_line(text,e.field.split('.')[-1]))

    def to_dict(self):
        return OrderedDict([
            ('seed',self.seed),
            ('data',self.data.to_dict()),
            ('models',self.models.to_dict()),
            ('pretrain',self.pretrain.to_dict()),
            ('attack',self.attack.to_dict()),
            ('pixel',self.pixel.to_dict()),
            ('inversion',self.inversion.to_dict()),
            ('segattack',self.segattack.to_dict()),
            ('train',self.train.to_dict()),
            ('eval',self.eval.to_dict()),
        ])

def _find_line(text,key):
    needle = '"%s"' % key
    for number,line in enumerate(text.splitlines()):
        if needle in line:
            return number + 1
    return None

class ModelPaths(Options):
    """
    Checkpoint locations used by a run. Empty entries mean "not used".
    """
    section = 'models'
    defaults = OrderedDict([
        ('generators',[]),
        ('procedural_generators',False),
        ('classifier',''),
        ('segmenter',''),
        ('spade',''),
        ('defended',OrderedDict()),
    ])

    def validate(self):
        self.require(isinstance(self.generators,list),'generators',"expected a list of paths")
        self.require(isinstance(self.defended,dict),'defended',
                     "expected an object of model names to checkpoint paths")

    def check_paths(self,names=None):
        """
        Check that the referenced checkpoints exist

        :param names: fields to check, all by default
        :raises ConfigError: naming the first missing checkpoint
        """
        named = [('classifier',self.classifier),('segmenter',self.segmenter),('spade',self.spade)]
        named += [('generators[%d]' % i,p) for i,p in enumerate(self.generators)]
        named += [('defended.%s' % n,p) for n,p in self.defended.items()]
        for name,filename in named:
            if names is not None and name.split('[')[0].split('.')[0] not in names:
                continue
            if filename and not os.path.exists(filename):
                self.fail(name,"checkpoint %s does not exist" % filename)

def apply_overrides(document,overrides):
    """
    Replace values of a run configuration document in place.

    :param dict document: parsed run configuration
    :param dict overrides: dotted paths like 'attack.epsilon' to values; the
                           key 'seed' sets the top-level seed and the seed of
                           every section that names one
    :raises ConfigError: for malformed paths
    """
    for key,value in overrides.items():
        if key == 'seed':
            document['seed'] = value
            for section in document.values():
                if isinstance(section,dict) and 'seed' in section:
                    section['seed'] = value
            continue
        parts = key.split('.')
        if len(parts) != 2:
            raise ConfigError(key,"expected 'section.key'")
        section = document.get(parts[0])
        if section is None:
            section = document[parts[0]] = OrderedDict()
        if not isinstance(section,dict):
            raise ConfigError(parts[0],"expected an object")
        section[parts[1]] = value
    return document
