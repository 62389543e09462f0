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
This module defines the command line interface `gat`, which runs the stages
of the pipeline and writes their outputs and a manifest to an output
directory
"""
import argparse
import glob
import hashlib
import json
import logging
import os
import sys
from collections import OrderedDict
from os import path

import numpy as np

import latentadversary
from latentadversary import ConfigError
from latentadversary.attack import batch_attack, attack_stats, export_outcomes, sweep_steps, draw_latent
from latentadversary.checkpoint import save_checkpoint, load_checkpoint, load_generators
from latentadversary.config import RunConfig, apply_overrides
from latentadversary.data import synth_splits, synth_ood_dataset, synth_dataset, save_dataset,\
    load_dataset, label_nuisance_information, nearest_centroid_accuracy
from latentadversary.evaluation import AttackSpec, ModelEntry, robustness_matrix, ood_eval,\
    iteration_statistics, latent_seeds, seed_summary, export_report, report_document,\
    validate_report
from latentadversary.inversion import invert
from latentadversary.models import ProceduralGenerator
from latentadversary.pixel import PixelAttackConfig
from latentadversary.pretrain import pretrain_generator, pretrain_classifier, pretrain_segmenter,\
    pretrain_spade, class_consistency, new_classifier, new_segmenter
from latentadversary.segattack import SEG_VARIABLES, run_seg_attack
from latentadversary.training import ATTACK_KINDS, adversarial_train, baseline_adv_train,\
    seg_adversarial_train
from latentadversary.tensor import get_dtype
from latentadversary.workers import set_quiet

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILED = 2

OUT_DIR_VARIABLE = 'GAT_OUT_DIR'
"environment variable used when --out-dir is not given"

COMMAND_MODELS = {
    'pretrain-gan' : ['classifier'],
    'attack' : ['classifier','generators'],
    'invert' : ['classifier','generators'],
    'seg-attack' : ['segmenter','spade'],
    'eval-matrix' : ['classifier','defended','generators'],
    'ood-eval' : ['classifier','defended'],
}
"checkpoint fields of the models section each command reads"

def command_models(args):
    "checkpoint fields read by the command of the parsed arguments"
    if args.command == 'advtrain':
        return ['spade'] if args.task == 'segmenter' else ['generators']
    return COMMAND_MODELS.get(args.command,[])

class _Parser(argparse.ArgumentParser):
    def error(self,message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID,"%s: error: %s\n" % (self.prog,message))

def code_hash():
    "hash of the package sources"
    digest = hashlib.sha256()
    root = path.dirname(latentadversary.__file__)
    for filename in sorted(glob.glob(path.join(root,'*.py'))):
        with open(filename,'rb') as fid:
            digest.update(path.basename(filename).encode('utf-8'))
            digest.update(fid.read())
    return digest.hexdigest()[:16]

class Run(object):
    """
    State of one command: the resolved configuration, the output directory
    and what has been written to it.
    """
    def __init__(self,args):
        self.args = args
        self.command = args.command
        out_dir = args.out_dir or os.environ.get(OUT_DIR_VARIABLE)
        if not out_dir:
            raise ConfigError('out_dir',"pass --out-dir or set %s" % OUT_DIR_VARIABLE)
        self.out_dir = out_dir
        "directory all outputs are written to"
        self.data_dir = getattr(args,'data_dir',None) or out_dir
        "directory datasets are read from"
        overrides = overrides_from_args(args)
        if args.config:
            self.config = RunConfig.load(args.config,False,overrides)
        else:
            self.config = RunConfig(apply_overrides(OrderedDict(),overrides),None,False)
        self.outputs = []
        "file names written, relative to out_dir"
        self.metrics = OrderedDict()
        "numbers reported in the manifest"
        self.threads = args.threads
        if self.threads < 1:
            raise ConfigError('threads',"must be at least 1")
        self.config.models.check_paths(command_models(args))
        if not path.isdir(out_dir):
            os.makedirs(out_dir)

    def output(self,name):
        "path of an output file, recorded for the manifest"
        if name not in self.outputs:
            self.outputs.append(name)
        return path.join(self.out_dir,name)

    def report(self,obj,name,kind=None):
        for filename in export_report(obj,self.out_dir,name,kind):
            self.output(path.basename(filename))

    def dataset(self,name):
        """
        Dataset from the data directory, synthesized from the data section
        if no container exists there
        """
        filename = path.join(self.data_dir,name + '.gatd')
        if path.exists(filename):
            return load_dataset(filename)
        spec = self.config.data
        logger.info("No %s, synthesizing the %s split",filename,name)
        if name == 'train':
            return synth_dataset(spec,spec.train_size,0,self.threads)
        elif name == 'test':
            return synth_dataset(spec,spec.test_size,spec.train_size,self.threads)
        elif name == 'ood':
            return synth_ood_dataset(spec,None,self.threads)
        else:
            raise ValueError("Unknown split: %s" % name)

    def checkpoint(self,field,kind):
        filename = getattr(self.config.models,field)
        if not filename:
            raise ConfigError('models.%s' % field,"no checkpoint configured")
        self.config.models.check_paths([field])
        return load_checkpoint(filename,kind)

    def generators(self):
        models = self.config.models
        if models.procedural_generators:
            return ProceduralGenerator.family(self.config.data.classes)
        if not models.generators:
            raise ConfigError('models.generators',"no generators configured")
        models.check_paths(['generators'])
        return load_generators(models.generators)

    def defended(self):
        "ModelEntries of the undefended classifier and every defended one"
        models = self.config.models
        models.check_paths(['classifier','defended'])
        entries = []
        if models.classifier:
            entries.append(ModelEntry('original',load_checkpoint(models.classifier,'classifier')))
        for name,filename in models.defended.items():
            model = load_checkpoint(filename,'classifier')
            entries.append(ModelEntry(name,model,model.metadata.get('trained_against')))
        if not entries:
            raise ConfigError('models.classifier',"no classifiers configured")
        return entries

    def manifest(self):
        return OrderedDict([
            ('command',self.command),
            ('version',latentadversary.__version__),
            ('code_hash',code_hash()),
            ('seed',self.config.seed),
            ('threads',self.threads),
            ('config',self.config.to_dict()),
            ('outputs',self.outputs),
            ('metrics',self.metrics),
        ])

    def finish(self):
        with open(self.output('metrics.json'),'w') as fid:
            json.dump(self.metrics,fid,indent=2)
        filename = path.join(self.out_dir,'manifest.json')
        with open(filename,'w') as fid:
            json.dump(self.manifest(),fid,indent=2)
        logger.info("Wrote %s",filename)

def _target(text):
    return text if text == 'random' else int(text)

def overrides_from_args(args):
    "dotted config paths to the values of the override options"
    overrides = OrderedDict()
    if args.seed is not None:
        overrides['seed'] = args.seed
    simple = [('max_iters','attack.max_iters'),('epsilon','attack.epsilon'),('delta','attack.delta'),
              ('mode','attack.variables'),('attack_mode','attack.mode'),('ratio','train.ratio'),
              ('attack_kind','train.attack'),('seg_variables','segattack.variables')]
    for name,key in simple:
        value = getattr(args,name,None)
        if value is not None:
            overrides[key] = value
    if getattr(args,'max_iters',None) is not None:
        overrides['eval.max_iters'] = args.max_iters
    if getattr(args,'layers',None) is not None:
        overrides['attack.style_layers'] = args.layers
        overrides['attack.noise_layers'] = args.layers
    if getattr(args,'target',None) is not None:
        overrides['attack.target'] = args.target
        overrides.setdefault('attack.mode','targeted')
    return overrides

def cmd_datagen(run,args):
    spec = run.config.data
    train,test = synth_splits(spec,run.threads)
    ood = synth_ood_dataset(spec,None,run.threads)
    for name,dataset in (('train',train),('test',test),('ood',ood)):
        save_dataset(dataset,run.output(name + '.gatd'))
        run.output(name + '.gatd.jsonl')
        run.metrics['%s_size' % name] = len(dataset)
    run.metrics['label_nuisance_information'] = label_nuisance_information(spec,min(10000,max(len(train),1)))
    run.metrics['nearest_centroid_accuracy'] = nearest_centroid_accuracy(train,test)
    run.metrics['nearest_centroid_ood_accuracy'] = nearest_centroid_accuracy(train,ood)

def cmd_pretrain_gan(run,args):
    config = run.config
    classifier = None
    if config.models.classifier:
        classifier = run.checkpoint('classifier','classifier')
    if config.models.procedural_generators:
        if classifier is not None:
            for generator in ProceduralGenerator.family(config.data.classes):
                run.metrics['class_consistency_%d' % generator.class_index] = \
                    class_consistency(generator,classifier,config.pretrain.gate_samples,config.seed)
        return
    train,test = run.dataset('train'),run.dataset('test')
    for label in range(train.classes):
        generator = pretrain_generator(label,train.class_slice(label),config.pretrain,classifier,
                                       test.class_slice(label),not args.no_gate)
        save_checkpoint(generator,run.output('generator_%d.gatc' % label))
        for name,value in generator.metadata['metrics'].items():
            run.metrics['%s_%d' % (name,label)] = value

def cmd_pretrain_clf(run,args):
    train,test = run.dataset('train'),run.dataset('test')
    model,result = pretrain_classifier(train,test,run.config.train,run.config.pretrain,not args.no_gate)
    result.checkpoint = 'classifier.gatc'
    save_checkpoint(model,run.output(result.checkpoint))
    run.report(result,'pretrain-clf')
    run.metrics['test_accuracy'] = result.test_accuracy[-1] if result.test_accuracy else None
    run.metrics['train_accuracy'] = result.clean_accuracy[-1] if result.clean_accuracy else None

def cmd_pretrain_seg(run,args):
    train,test = run.dataset('train'),run.dataset('test')
    segmenter,result = pretrain_segmenter(train,test,run.config.train,run.config.pretrain,not args.no_gate)
    result.checkpoint = 'segmenter.gatc'
    save_checkpoint(segmenter,run.output(result.checkpoint))
    run.report(result,'pretrain-seg')
    run.metrics['test_pixel_accuracy'] = result.test_accuracy[-1] if result.test_accuracy else None
    spade = pretrain_spade(train,run.config.pretrain)
    save_checkpoint(spade,run.output('spade.gatc'))
    run.metrics['spade_final_mse'] = spade.metadata['final_mse']

def cmd_attack(run,args):
    config = run.config
    classifier = run.checkpoint('classifier','classifier')
    generators = run.generators()
    seeds = latent_seeds(config.seed,config.eval.samples)
    outcomes = batch_attack(seeds,config.attack,classifier,generators,run.threads)
    export_outcomes(outcomes,run.output('attack.jsonl'),config.attack)
    stats = attack_stats(outcomes)
    stats['config_hash'] = config.attack.hash()
    run.report(stats,'attack','attack')
    run.metrics.update(stats)
    if args.iteration_statistics:
        rows = iteration_statistics(classifier,generators,seeds,config.attack,
                                    targeted=classifier.classes > 2,threads=run.threads)
        run.report(rows,'iteration-statistics')
    if args.sweep_epsilons or args.sweep_deltas:
        rows = sweep_steps(seeds,config.attack,classifier,generators,
                           args.sweep_epsilons or [config.attack.epsilon],
                           args.sweep_deltas or [config.attack.delta],run.threads)
        run.report(rows,'sweep')

def cmd_invert(run,args):
    config = run.config
    classifier = run.checkpoint('classifier','classifier')
    generators = run.generators()
    if args.source == 'test':
        test = run.dataset('test')
        items = [(int(test.labels[i]),test.images[i]) for i in range(min(args.count,len(test)))]
    else:
        items = []
        for seed in latent_seeds(config.seed,args.count):
            label,state = draw_latent(generators,seed)
            items.append((label,generators[label](state).data[0]))
    records = []
    with open(run.output('inversion.jsonl'),'w') as fid:
        for index,(label,image) in enumerate(items):
            result = invert(image,generators[label],classifier,config.inversion.replace(seed=config.seed + index))
            record = OrderedDict([('index',index),('label',label),('distance',result.distance),
                                  ('rmse',result.rmse),('success',result.success),('steps',result.steps)])
            fid.write(json.dumps(record) + '\n')
            records.append(record)
    run.metrics['count'] = len(records)
    run.metrics['success_rate'] = float(np.mean([r['success'] for r in records])) if records else 0.
    run.metrics['mean_rmse'] = float(np.mean([r['rmse'] for r in records])) if records else None

def cmd_seg_attack(run,args):
    config = run.config
    segmenter = run.checkpoint('segmenter','segmenter')
    spade = run.checkpoint('spade','spade-generator')
    test = run.dataset('test')
    if test.layouts is None:
        raise ValueError("The test dataset has no layouts")
    layouts = test.layouts[:args.count].astype(int)
    rng = np.random.default_rng([config.seed,41])
    z = rng.standard_normal((len(layouts),spade.config.latent_dim)).astype(get_dtype())
    trajectory = run_seg_attack(layouts,z,config.segattack,segmenter,spade)
    trajectory.export(run.output('seg-attack.jsonl'))
    run.report(trajectory,'seg-attack')
    if args.save_images:
        save_dataset(trajectory.to_dataset(test.classes),run.output('seg-attack.gatd'))
        run.output('seg-attack.gatd.jsonl')
    accuracies = trajectory.accuracies()
    run.metrics['initial_pixel_accuracy'] = accuracies[0]
    run.metrics['final_pixel_accuracy'] = accuracies[-1]

def cmd_advtrain(run,args):
    config = run.config
    train,test = run.dataset('train'),run.dataset('test')
    tc = config.train
    if args.task == 'segmenter':
        spade = run.checkpoint('spade','spade-generator')
        model = new_segmenter(train.label_classes,tc,config.pretrain)
        result = seg_adversarial_train(model,train,spade,tc,config.segattack,test)
        name = 'segmenter_adv.gatc'
    else:
        model = new_classifier(train.classes,tc,config.pretrain)
        if tc.attack == 'gat':
            generators = run.generators() if tc.split()[1] else None
            result = adversarial_train(model,train,generators,tc,config.attack,test,run.threads)
        else:
            result = baseline_adv_train(model,train,tc.attack,tc,config.pixel,test)
        name = 'classifier_%s.gatc' % tc.attack
    model.metadata = result.metadata()
    result.checkpoint = name
    save_checkpoint(model,run.output(name))
    run.report(result,'advtrain')
    run.metrics['train_accuracy'] = result.clean_accuracy[-1] if result.clean_accuracy else None
    run.metrics['test_accuracy'] = result.test_accuracy[-1] if result.test_accuracy else None
    run.metrics['adversarial_accuracy'] = result.adversarial_accuracy[-1] if result.adversarial_accuracy else None
    run.metrics['acceptance_rate'] = result.acceptance_rate[-1] if result.acceptance_rate else None

def attack_specs(config):
    "matrix columns of the eval section, all models get the same settings"
    specs = []
    for kind in config.eval.attacks:
        if kind == 'gat':
            specs.append(AttackSpec(kind,config.attack.replace(max_iters=config.eval.max_iters)))
        elif kind == 'clean':
            specs.append(AttackSpec(kind))
        elif config.pixel.kind == kind:
            specs.append(AttackSpec(kind,config.pixel))
        else:
            specs.append(AttackSpec(kind,PixelAttackConfig.for_kind(kind,seed=config.pixel.seed)))
    return specs

def cmd_eval_matrix(run,args):
    config = run.config
    entries = run.defended()
    specs = attack_specs(config)
    generators = run.generators() if any(s.kind == 'gat' for s in specs) else None
    matrix = robustness_matrix(entries,specs,config.eval.seeds,config.eval.samples,
                               run.dataset('test'),generators,run.threads)
    run.report(matrix,'matrix')
    run.metrics['mean_unseen'] = OrderedDict((m,matrix.mean_unseen(m)) for m in matrix.models)

def cmd_ood_eval(run,args):
    test,ood = run.dataset('test'),run.dataset('ood')
    rows = []
    for entry in run.defended():
        in_domain,out_of_domain = ood_eval(entry.model,test,ood)
        rows.append(OrderedDict([('model',entry.name),('in_domain',in_domain),
                                 ('out_of_domain',out_of_domain)]))
        run.metrics[entry.name] = OrderedDict([('in_domain',in_domain),('out_of_domain',out_of_domain)])
    run.report(rows,'ood','ood')

def cmd_report(run,args):
    inputs = args.inputs or [run.out_dir]
    cells = OrderedDict()
    means = OrderedDict()
    train = OrderedDict()
    for directory in inputs:
        for filename in sorted(glob.glob(path.join(directory,'*.json'))):
            if path.basename(filename) in ('manifest.json','metrics.json','summary.json'):
                continue
            with open(filename) as fid:
                document = json.load(fid,object_pairs_hook=OrderedDict)
            validate_report(document,filename)
            data = document['data']
            if document['kind'] == 'matrix':
                for cell in data['cells']:
                    cells.setdefault('%s/%s' % (cell['model'],cell['attack']),[]).append(cell['accuracy'])
                for model,value in data['mean_unseen'].items():
                    means.setdefault(model,[]).append(value)
            elif document['kind'] == 'train' and data['epochs']:
                name = path.splitext(path.basename(filename))[0]
                train.setdefault(name,[]).append(data['epochs'][-1].get('test_accuracy'))
    summary = OrderedDict([
        ('inputs',len(inputs)),
        ('cells',OrderedDict((k,seed_summary(v)) for k,v in cells.items())),
        ('mean_unseen',OrderedDict((k,seed_summary(v)) for k,v in means.items())),
        ('test_accuracy',OrderedDict((k,seed_summary(v)) for k,v in train.items())),
    ])
    document = report_document(summary,'stats')
    with open(run.output('summary.json'),'w') as fid:
        json.dump(document,fid,indent=2)
    run.metrics['reports'] = len(cells) + len(train)

COMMANDS = OrderedDict([
    ('datagen',cmd_datagen),
    ('pretrain-gan',cmd_pretrain_gan),
    ('pretrain-clf',cmd_pretrain_clf),
    ('pretrain-seg',cmd_pretrain_seg),
    ('attack',cmd_attack),
    ('invert',cmd_invert),
    ('seg-attack',cmd_seg_attack),
    ('advtrain',cmd_advtrain),
    ('eval-matrix',cmd_eval_matrix),
    ('ood-eval',cmd_ood_eval),
    ('report',cmd_report),
])

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config',help='JSON run configuration')
    common.add_argument('--seed',type=int,help='seed of the run and all sections')
    common.add_argument('--out-dir',help='output directory, defaults to $%s' % OUT_DIR_VARIABLE)
    common.add_argument('--data-dir',help='directory with the datasets, defaults to the output directory')
    common.add_argument('--threads',type=int,default=1,help='worker threads')
    common.add_argument('-v','--verbose',action='store_true',help='log debug messages')
    common.add_argument('-q','--quiet',action='store_true',help='log warnings only, no progress bars')

    attack = argparse.ArgumentParser(add_help=False)
    attack.add_argument('--max-iters',type=int)
    attack.add_argument('--epsilon',type=float,help='style step size')
    attack.add_argument('--delta',type=float,help='noise step size')
    attack.add_argument('--layers',help="layer group 'lo:hi' for styles and noises")
    attack.add_argument('--mode',choices=['style','noise','both'],help='variables to attack')
    attack.add_argument('--attack-mode',choices=['nontargeted','targeted','nontargeted-ascent'])
    attack.add_argument('--target',type=_target,help="target class or 'random'")

    parser = _Parser(prog='gat',description='Generative adversarial training at desk scale')
    parser.add_argument('--version',action='version',version=latentadversary.__version__)
    sub = parser.add_subparsers(dest='command',parser_class=_Parser)
    sub.required = True

    sub.add_parser('datagen',parents=[common],help='synthesize the datasets')
    for name in ('pretrain-gan','pretrain-clf','pretrain-seg'):
        p = sub.add_parser(name,parents=[common],help='pretrain %s' % name.split('-')[1])
        p.add_argument('--no-gate',action='store_true',help='do not enforce the quality gates')
    p = sub.add_parser('attack',parents=[common,attack],help='latent attacks on generated samples')
    p.add_argument('--iteration-statistics',action='store_true')
    p.add_argument('--sweep-epsilons',type=float,nargs='+')
    p.add_argument('--sweep-deltas',type=float,nargs='+')
    p = sub.add_parser('invert',parents=[common],help='embed images into the generators')
    p.add_argument('--source',choices=['generated','test'],default='generated')
    p.add_argument('--count',type=int,default=10)
    p = sub.add_parser('seg-attack',parents=[common],help='attack the segmenter')
    p.add_argument('--seg-variables',choices=SEG_VARIABLES)
    p.add_argument('--count',type=int,default=100,help='number of layouts')
    p.add_argument('--save-images',action='store_true')
    p = sub.add_parser('advtrain',parents=[common,attack],help='adversarial training')
    p.add_argument('--ratio',help="clean:adversarial, like '1:1' or '1:0'")
    p.add_argument('--attack-kind',choices=ATTACK_KINDS)
    p.add_argument('--task',choices=['classifier','segmenter'],default='classifier')
    p = sub.add_parser('eval-matrix',parents=[common,attack],help='cross-attack robustness matrix')
    sub.add_parser('ood-eval',parents=[common],help='in-domain and out-of-domain accuracy')
    p = sub.add_parser('report',parents=[common],help='summarize reports over seed runs')
    p.add_argument('--inputs',nargs='+',help='run directories, defaults to the output directory')
    return parser

def _setup_logging(args):
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(level=level,format='%(levelname)s %(name)s: %(message)s')
    set_quiet(args.quiet)

def main(argv=None):
    """
    Entry point of the `gat` command

    :returns: 0 on success, 1 for invalid input, 2 for failures at runtime
    """
    args = build_parser().parse_args(argv)
    _setup_logging(args)
    try:
        run = Run(args)
        COMMANDS[args.command](run,args)
        run.finish()
    except ValueError as e:
        logger.error("%s",e)
        return EXIT_INVALID
    except (RuntimeError,OSError) as e:
        logger.error("%s",e)
        return EXIT_FAILED
    return EXIT_OK

if __name__ == '__main__':
    sys.exit(main())
