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
This module defines the worker pool used by the parallelizable stages and
the progress bars of long loops
"""
import logging
from concurrent.futures import ThreadPoolExecutor

from tqdm import tqdm

logger = logging.getLogger(__name__)

_settings = {'quiet' : False}

def set_quiet(quiet):
    "switch progress bars off (True) or back to automatic (False)"
    _settings['quiet'] = bool(quiet)

def progress(iterable,desc=None,total=None,leave=False):
    """
    Wrap an iterable in a progress bar. Bars are hidden when quiet or when
    stderr is not a terminal.
    """
    disable = True if _settings['quiet'] else None
    return tqdm(iterable,desc=desc,total=total,leave=leave,disable=disable)

def parallel_map(fn,items,threads=1,desc=None):
    """
    Apply fn to every item, using a pool of threads.

    Results are returned in input order, so they do not depend on
    scheduling. With threads=1 everything runs inline on the calling thread.

    :param callable fn: function of one item
    :param sequence items: inputs
    :param int threads: number of worker threads
    :param str desc: label of the progress bar
    :rtype: list
    """
    items = list(items)
    if threads < 1:
        raise ValueError("Number of threads must be positive, got %d" % threads)
    if threads == 1 or len(items) <= 1:
        return [fn(item) for item in progress(items,desc,len(items))]
    logger.debug("Mapping %d items on %d threads",len(items),threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(progress(pool.map(fn,items),desc,len(items)))
