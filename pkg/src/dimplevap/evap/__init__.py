from .rates import (bec_time_estimate, cross_section, elastic_rate, evaporation_rate_and_energy,
                    hydro_smoothing, tbr_bound, tbr_terms)
from .schedule import (CONSTANT_OMEGA, CONSTANT_WAIST, Constant, ControlSchedule,
                       ExponentialDecay)
from .model import (BEC_REACHED, LEVITATED_G, STALLED, TIMEOUT, EvapSetup, EvapState,
                    TrapControls, Trajectory, evap_rhs, integrate, psd_rate)
