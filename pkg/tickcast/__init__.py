# Copyright 2024 The tickcast Authors.

from tickcast.__version__ import version as __version__
from tickcast.backtest.montecarlo import *
from tickcast.backtest.scenario import *
from tickcast.backtest.scoring import *
from tickcast.backtest.tuning import *
from tickcast.coe.model import *
from tickcast.coe.srivc import *
from tickcast.config import *
from tickcast.errors import *
from tickcast.hawkes.estimation import *
from tickcast.hawkes.forecasting import *
from tickcast.hawkes.intensity import *
from tickcast.hawkes.likelihood import *
from tickcast.hawkes.simulation import *
from tickcast.lobdata.analysis import *
from tickcast.lobdata.features import *
from tickcast.lobdata.scenarios import *
from tickcast.lobdata.snapshots import *
from tickcast.predictors import *
from tickcast.synthetic import *
