"""Spatio-temporal popularity of food categories from geo-tagged posts.

Time-slot stratified kernel density hot spots and BIC hill-climbing
Bayesian networks over daily category counts.
"""

from .bn import (CountTable, Dag, ScoreReport, SearchTrace, bic_score, build_count_table, family_bic,
                 hill_climb, to_edge_list)
from .core import (CATEGORIES, NAMED_SLOTS, BusinessRecord, Dataset, FoodCategory, PostRecord, TimeSlot,
                   assign_time_slot, derive_hashtag, load_dataset, stratify)
from .geo import LocalFrame, PlanarPoint, make_frame, project, unproject
from .kde import (BandwidthSelection, DensityField, HotSpot, extract_hotspots, gaussian_kernel_1d, kde_at,
                  rasterize, select_bandwidth)

__version__ = "0.1.0"
