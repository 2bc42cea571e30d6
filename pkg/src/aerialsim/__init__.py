"""Downlink cellular simulator with Q-learning 3D aerial-BS placement."""

from .channel import (AtgEnvironment, RadioParams, URBAN, atg_pathloss,
                      elevation_angle, ground_pathloss, p_los, received_power)
from .deployment import (GroundBS, PlacementGrid, drop_users_ppp,
                         grid_index_to_position, hex_layout,
                         position_to_grid_index)
from .geometry import (ConfigurationError, DegenerateGeometryError, Position2D,
                       Position3D, ServiceArea, square_area)
from .mobility import MobilityParams, User, init_users, step
from .oracle import OracleResult, exhaustive_search, export_qos_csv
from .placement import (Action, LearnResult, LearningConfig, QTable,
                        apply_action, greedy_rollout, learn_placement,
                        load_qtable, q_update, reward, save_qtable,
                        select_action)
from .radio import (AERIAL_ID, AssociationMap, LinkReport, NetworkState,
                    aggregate_qos, associate_max_sinr, link_report, sinr,
                    throughput)
from .scenario import (ScenarioConfig, ScenarioRun, TimeSlotRecord,
                       build_config, emit_outputs, run_scenario, sinr_cdf,
                       spectral_efficiency_summary)

__version__ = "0.1.0"
