"""Sequential locality of graphs: statistics, null models and tests."""
from .er_null import (canonical_h_distribution, exact_h1_distribution_iid,
                      exact_h_distribution_multigraph, sample_er, test_unoptimized)
from .errors import (DegenerateSizeError, EdgeListError, InfeasibleError, NotSupportedError,
                     SeqLocalError, SizeCapError)
from .graph import Graph, VertexSequence, load_edge_list, load_sequence
from .ordering import OrderingResult, rcm_ordering, spectral_ordering
from .orgm import EnvelopeSpec, OrgmParams, orgm_h1_moments, sample_orgm
from .orgm_fit import classify, fit_bandwidth, in_envelope_test, max_average_ratio
from .power import analytic_power, empirical_power, power_grid
from .random_seq import exact_seq_distribution, randseq_variance, sampled_seq_distribution, z1_factor
from .stats import AffinityMetric, h1, h_stat, hg, micro_locality, z1, zg
from .tables import DistributionTable, TestReport

__version__ = "0.1.0"
