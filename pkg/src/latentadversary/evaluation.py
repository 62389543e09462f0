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
This module defines the evaluation harness: clean and attacked accuracies,
the cross-attack robustness matrix, out-of-domain accuracy, iteration
statistics and the export of reports
"""
import csv
import json
import logging
from collections import OrderedDict
from os import path

import numpy as np

import latentadversary
from latentadversary import FormatError
from latentadversary.attack import AttackConfig, batch_attack, attack_stats
from latentadversary.config import Options, config_hash
from latentadversary.pixel import PixelAttackConfig, KINDS as PIXEL_KINDS, attack_batch
from latentadversary.workers import parallel_map

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
"version of the report documents"

ATTACKS = ('clean','gat') + PIXEL_KINDS
"attack kinds known to the harness"

class EvalConfig(Options):
    section = 'eval'
    defaults = OrderedDict([
        ('samples',500),
        ('seeds',[0]),
        ('attacks',['gat','pgd','spatial','recolor']),
        ('max_iters',50),
    ])

    def validate(self):
        self.require(int(self.samples) >= 1,'samples',"must be at least 1")
        self.require(isinstance(self.seeds,list) and len(self.seeds) >= 1,'seeds',
                     "expected a non-empty list of seeds")
        for kind in self.attacks:
            self.require(kind in ATTACKS,'attacks',"Unknown attack kind: %s" % kind)
        self.require(int(self.max_iters) >= 1,'max_iters',"must be at least 1")

def clean_accuracy(model,dataset,batch_size=200):
    """
    Fraction of the dataset the classifier labels correctly

    :param Classifier model: classifier to evaluate
    :param Dataset dataset: labelled images
    :rtype: float
    """
    if not len(dataset):
        return 0.
    hits = 0
    for start in range(0,len(dataset),batch_size):
        stop = min(start + batch_size,len(dataset))
        hits += int((model.predict(dataset.images[start:stop]) == dataset.labels[start:stop]).sum())
    return hits/float(len(dataset))

class AttackSpec(object):
    """
    An attack column of the robustness matrix: a kind and its settings.
    """
    def __init__(self,kind,config=None,name=None):
        if kind not in ATTACKS:
            raise ValueError("Unknown attack kind: %s" % kind)
        self.kind = kind
        "clean, gat or a pixel attack kind"
        if config is None and kind == 'gat':
            config = AttackConfig()
        elif config is None and kind != 'clean':
            config = PixelAttackConfig.for_kind(kind)
        self.config = config
        "AttackConfig, PixelAttackConfig or None for clean"
        self.name = name or kind
        "column name"

    def for_seed(self,seed):
        if self.config is None:
            return None
        return self.config.replace(seed=seed)

    def hash(self):
        return config_hash({'kind' : self.kind,
                            'config' : None if self.config is None else self.config.to_dict()})

    def __repr__(self):
        return "AttackSpec(%s)" % self.name

def latent_seeds(seed,samples):
    "latent seeds of the generated evaluation set"
    return [int(s) for s in np.random.default_rng([seed,71]).integers(2**31,size=samples)]

def attack_records(model,spec,seed,samples,dataset=None,generators=None,threads=1,batch_size=100):
    """
    Per-sample results of one attack against one model. Latent attacks are
    evaluated on generated samples, pixel attacks and the clean column on the
    first samples of the dataset.

    :rtype: list of OrderedDicts with sample, label, prediction and correct
    """
    records = []
    if spec.kind == 'gat':
        if not generators:
            raise ValueError("The gat attack needs generators")
        config = spec.for_seed(seed)
        for o in batch_attack(latent_seeds(seed,samples),config,model,generators,threads):
            records.append(OrderedDict([('sample',o.seed),('label',o.label),
                                        ('prediction',o.final_prediction),
                                        ('correct',o.final_prediction == o.label),
                                        ('iterations',o.iterations_used)]))
        return records
    if dataset is None:
        raise ValueError("The %s column needs a dataset" % spec.kind)
    subset = dataset.subset(np.arange(min(samples,len(dataset))))
    if spec.kind == 'clean':
        predictions = np.concatenate([model.predict(subset.images[s:s + batch_size])
                                      for s in range(0,len(subset),batch_size)])
    else:
        adv,_ = attack_batch(subset.images,subset.labels,model,spec.for_seed(seed),batch_size)
        predictions = model.predict(adv)
    for i,(label,prediction) in enumerate(zip(subset.labels,predictions)):
        records.append(OrderedDict([('sample',i),('label',int(label)),('prediction',int(prediction)),
                                    ('correct',bool(label == prediction))]))
    return records

def attack_accuracy(model,spec,seed=0,samples=500,dataset=None,generators=None,threads=1):
    """
    Accuracy of a classifier on attacked inputs.

    :param Classifier model: classifier to evaluate
    :param AttackSpec spec: attack kind and settings
    :param int seed: seed of the evaluation set and the attack
    :param int samples: number of evaluated samples
    :param Dataset dataset: source of pixel attack inputs
    :param sequence generators: source of latent attack inputs
    :rtype: float
    """
    records = attack_records(model,spec,seed,samples,dataset,generators,threads)
    return float(np.mean([r['correct'] for r in records])) if records else 0.

class ModelEntry(object):
    """
    A row of the robustness matrix: a classifier and the attack kind it was
    trained against, None for an undefended model.
    """
    def __init__(self,name,model,trained_against=None):
        self.name = name
        self.model = model
        self.trained_against = trained_against

class RobustnessMatrix(object):
    """
    Accuracies of models (rows) under attacks (columns), averaged over a set
    of seeds, with the per-model mean over unseen attacks.
    """
    def __init__(self,models,attacks,seeds,samples,trained_against,attack_hashes):
        self.models = list(models)
        "row names"
        self.attacks = list(attacks)
        "column names"
        self.seeds = list(seeds)
        "seeds every cell was evaluated with"
        self.samples = samples
        "samples per cell and seed"
        self.trained_against = dict(trained_against)
        "row name to the attack kind the model was trained against"
        self.attack_hashes = OrderedDict(attack_hashes)
        "column name to the hash of its attack settings"
        self.kinds = OrderedDict()
        "column name to attack kind"
        self.per_seed = OrderedDict()
        "(row,column) to a list of per-seed accuracies"
        self.records = OrderedDict()
        "(row,column,seed) to per-sample records"

    def set_cell(self,model,attack,kind,accuracies,records=None):
        for a in accuracies:
            if not 0 <= a <= 1:
                raise ValueError("Accuracy %g of cell %s/%s outside [0,1]" % (a,model,attack))
        self.kinds[attack] = kind
        self.per_seed[(model,attack)] = list(accuracies)
        for seed,rec in zip(self.seeds,records or []):
            self.records[(model,attack,seed)] = rec

    def accuracy(self,model,attack):
        return float(np.mean(self.per_seed[(model,attack)]))

    def unseen(self,model):
        "columns that count as unseen attacks for a model"
        trained = self.trained_against.get(model)
        if trained == 'ifgsm-capped':
            trained = 'ifgsm'
        return [a for a in self.attacks if self.kinds.get(a,a) not in ('clean',trained)]

    def mean_unseen(self,model):
        "arithmetic mean over the unseen columns, None if there are none"
        cols = self.unseen(model)
        if not cols:
            return None
        return float(np.mean([self.accuracy(model,a) for a in cols]))

    def shape(self):
        return len(self.models),len(self.attacks)

    def rows(self):
        "table rows: model name, one accuracy per attack, mean over unseen"
        return [[m] + [self.accuracy(m,a) for a in self.attacks] + [self.mean_unseen(m)]
                for m in self.models]

    def header(self):
        return ['model'] + self.attacks + ['mean_unseen']

    def to_dict(self):
        return OrderedDict([
            ('models',self.models),
            ('attacks',self.attacks),
            ('seeds',self.seeds),
            ('samples',self.samples),
            ('trained_against',OrderedDict((m,self.trained_against.get(m)) for m in self.models)),
            ('attack_hashes',self.attack_hashes),
            ('cells',[OrderedDict([('model',m),('attack',a),('accuracy',self.accuracy(m,a)),
                                   ('per_seed',self.per_seed[(m,a)])])
                      for m in self.models for a in self.attacks]),
            ('mean_unseen',OrderedDict((m,self.mean_unseen(m)) for m in self.models)),
        ])

    def __repr__(self):
        return "RobustnessMatrix(%d models x %d attacks)" % self.shape()

def robustness_matrix(models,attacks,seeds,samples=500,dataset=None,generators=None,threads=1):
    """
    Evaluate every model under every attack with every seed. All models see
    the same attack settings and evaluation sets; cells run on the thread
    pool and do not depend on the evaluation order.

    :param sequence models: ModelEntry rows
    :param sequence attacks: AttackSpec columns
    :param sequence seeds: seeds of evaluation sets and attacks
    :rtype: RobustnessMatrix
    """
    names = [m.name for m in models]
    columns = [a.name for a in attacks]
    if len(set(names)) != len(names) or len(set(columns)) != len(columns):
        raise ValueError("Model and attack names must be unique")
    matrix = RobustnessMatrix(names,columns,seeds,samples,
                              [(m.name,m.trained_against) for m in models],
                              [(a.name,a.hash()) for a in attacks])
    jobs = [(m,a,seed) for m in models for a in attacks for seed in seeds]

    def cell(job):
        m,a,seed = job
        #attacks inside a cell run inline, the pool is shared across cells
        return attack_records(m.model,a,seed,samples,dataset,generators,1)

    results = iter(parallel_map(cell,jobs,threads,desc='matrix'))
    for m in models:
        for a in attacks:
            records = [next(results) for _ in seeds]
            accuracies = [float(np.mean([r['correct'] for r in rec])) if rec else 0. for rec in records]
            matrix.set_cell(m.name,a.name,a.kind,accuracies,records)
            logger.info("%s under %s: accuracy %.4f",m.name,a.name,matrix.accuracy(m.name,a.name))
    return matrix

def ood_eval(model,test,ood,batch_size=200):
    """
    In-domain and out-of-domain accuracy

    :rtype: tuple of two floats
    """
    return clean_accuracy(model,test,batch_size),clean_accuracy(model,ood,batch_size)

def iteration_statistics(classifier,generators,seeds,config,variables=('style','noise','both'),
                         targeted=True,threads=1):
    """
    Iterations needed to fool the classifier for every variable set, in
    nontargeted mode and, if requested, targeted at random classes.

    :param sequence seeds: latent seeds of the samples
    :param AttackConfig config: base attack settings
    :rtype: list of OrderedDicts with mode, variables and the attack_stats
    """
    modes = ['nontargeted'] + (['targeted'] if targeted else [])
    rows = []
    for mode in modes:
        for v in variables:
            cfg = config.replace(mode=mode,variables=v,
                                 target='random' if mode == 'targeted' else None)
            outcomes = batch_attack(seeds,cfg,classifier,generators,threads)
            row = OrderedDict([('mode',mode),('variables',v),('config_hash',cfg.hash())])
            row.update(attack_stats(outcomes))
            rows.append(row)
    return rows

def seed_summary(values):
    """
    Minimum, median and maximum over a seed set

    :param sequence values: one number per seed
    :rtype: OrderedDict
    """
    values = [v for v in values if v is not None]
    if not values:
        return OrderedDict([('min',None),('median',None),('max',None),('n',0)])
    return OrderedDict([('min',float(np.min(values))),('median',float(np.median(values))),
                        ('max',float(np.max(values))),('n',len(values))])

def plot_series(xs,ys):
    "(x,y) pairs of a plot-data series, skipping missing values"
    return [[x,y] for x,y in zip(xs,ys) if y is not None]

def report_document(obj,kind=None):
    """
    Report document of a RobustnessMatrix, a TrainRun, a SegTrajectory or a
    plain statistics value

    :rtype: OrderedDict
    """
    plot = OrderedDict()
    if isinstance(obj,RobustnessMatrix):
        kind,data = 'matrix',obj.to_dict()
    elif hasattr(obj,'curves') and hasattr(obj,'epochs'):
        kind,data = 'train',obj.to_dict()
        epochs = [e['epoch'] for e in obj.epochs]
        for name,values in obj.curves().items():
            plot['%s_vs_epoch' % name] = plot_series(epochs,values)
    elif hasattr(obj,'accuracies') and hasattr(obj,'to_records'):
        kind,data = 'segattack',OrderedDict([('records',obj.to_records())])
        plot['pixel_accuracy_vs_iteration'] = plot_series(
            [r['iteration'] for r in obj.records],obj.accuracies())
    else:
        kind,data = kind or 'stats',obj
    return OrderedDict([
        ('schema_version',SCHEMA_VERSION),
        ('kind',kind),
        ('version',latentadversary.__version__),
        ('data',data),
        ('plot_data',plot),
    ])

def export_report(obj,out_dir,name,kind=None):
    """
    Write the JSON report of obj and, for a matrix, the CSV table and the
    per-sample records of every cell.

    :param out_dir: existing output directory
    :param str name: file name stem
    :returns: list of written file names
    """
    written = []
    document = report_document(obj,kind)
    filename = path.join(out_dir,name + '.json')
    with open(filename,'w') as fid:
        json.dump(document,fid,indent=2)
    written.append(filename)
    if isinstance(obj,RobustnessMatrix):
        filename = path.join(out_dir,name + '.csv')
        write_matrix_csv(obj,filename)
        written.append(filename)
        filename = path.join(out_dir,name + '.samples.jsonl')
        with open(filename,'w') as fid:
            for (m,a,seed),records in obj.records.items():
                for r in records:
                    line = OrderedDict([('model',m),('attack',a),('seed',seed)])
                    line.update(r)
                    fid.write(json.dumps(line) + '\n')
        written.append(filename)
    logger.info("Wrote report %s",', '.join(written))
    return written

def _csv_value(value):
    return '' if value is None else ('%.6f' % value if isinstance(value,float) else value)

def write_matrix_csv(matrix,filename):
    with open(filename,'w',newline='',encoding='utf-8') as fid:
        writer = csv.writer(fid)
        writer.writerow(matrix.header())
        for row in matrix.rows():
            writer.writerow([_csv_value(v) for v in row])

def recompute_accuracies(filename):
    """
    Cell accuracies recomputed from an exported per-sample file

    :rtype: dict (model,attack) to accuracy averaged over seeds
    """
    hits = OrderedDict()
    with open(filename) as fid:
        for line in fid:
            if not line.strip():
                continue
            r = json.loads(line)
            hits.setdefault((r['model'],r['attack']),{}).setdefault(r['seed'],[]).append(r['correct'])
    return OrderedDict((cell,float(np.mean([np.mean(v) for v in seeds.values()])))
                       for cell,seeds in hits.items())

def load_schema(name='report'):
    with open(path.join(path.dirname(__file__),'schemas','%s.schema.json' % name)) as fid:
        return json.load(fid)

def validate_report(document,source='report'):
    """
    Check a report document against the shipped schema

    :param dict document: parsed report
    :param str source: name of the document for the error message
    :raises FormatError: if the document does not conform
    """
    import jsonschema
    try:
        jsonschema.validate(document,load_schema('report'))
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "document"
        raise FormatError("%s does not match the report schema at %s: %s" % (source,where,e.message))
