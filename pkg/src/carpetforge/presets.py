"""Figure presets: one scenario per plot family."""

PRESETS = {
    "fig-first": {"command": "carpet", "kind": "ISW", "packet": "spatial", "x0": "0.5",
                  "sigma_x": "0.003", "nbar": "60", "t_min": "0", "t_max": "1",
                  "t_unit": "T_R", "nx": "512", "nt": "512"},
    "fig-rev": {"command": "carpet", "kind": "ISW", "packet": "gaussian", "nbar": "40",
                "sigma_n": "2", "t_min": "0", "t_max": "1", "t_unit": "T_R",
                "nx": "256", "nt": "400"},
    "fig-sho-pd": {"command": "carpet", "kind": "SHO", "packet": "gaussian", "nbar": "6",
                   "sigma_n": "2", "x_min": "-6", "x_max": "6", "t_min": "0",
                   "t_max": "3", "t_unit": "T_cl", "nx": "256", "nt": "300"},
    "fig-isw-cuts": {"command": "carpet", "kind": "ISW", "packet": "spatial", "x0": "0.5",
                     "sigma_x": "0.003", "nbar": "60", "cuts": "0,1/2,1/4",
                     "t_unit": "T_R", "nx": "1001"},
    "fig-isw-frac": {"command": "carpet", "kind": "ISW", "packet": "spatial", "x0": "0.5",
                     "sigma_x": "0.003", "nbar": "60", "t_min": "0", "t_max": "1/8",
                     "t_unit": "T_R", "nx": "512", "nt": "512"},
    "fig-pt-psicl": {"command": "psicl", "kind": "PT", "packet": "gaussian", "nbar": "7",
                     "sigma_n": "1.5", "t_min": "0", "t_max": "2", "t_unit": "T_cl",
                     "nx": "256", "nt": "256"},
    "fig-mr-psicl": {"command": "psicl", "kind": "Morse", "packet": "gaussian", "nbar": "7",
                     "sigma_n": "1.5", "t_min": "0", "t_max": "2", "t_unit": "T_cl",
                     "nx": "256", "nt": "256"},
    "fig-qbeats-g": {"command": "beats", "dist": "gaussian", "dn": "8", "t2_over_t1": "200",
                     "t_min": "0", "t_max": "5", "nt": "2000"},
    "fig-qbeats-t": {"command": "beats", "dist": "tophat", "dn": "8", "t2_over_t1": "200",
                     "t_min": "0", "t_max": "5", "nt": "2000"},
    "fig-beatwell": {"command": "carpet", "kind": "ISW", "packet": "gaussian", "nbar": "30",
                     "sigma_n": "5", "method": "closed", "t_min": "0", "t_max": "4",
                     "t_unit": "T_cl", "nx": "241", "nt": "401"},
    "fig-beatwell-dephase": {"command": "carpet", "kind": "ISW", "packet": "gaussian",
                             "nbar": "30", "sigma_n": "5", "method": "both",
                             "overlay": "dephase", "A": "1", "branch": "lower",
                             "t_min": "0", "t_max": "4", "t_unit": "T_cl",
                             "nx": "241", "nt": "401"},
    "fig-trace-v": {"command": "traces", "kind": "ISW", "packet": "even", "n_lo": "1",
                    "n_hi": "10", "speeds": "1,2", "t_min": "0", "t_max": "1",
                    "t_unit": "T_R", "nx": "256", "nt": "256"},
    "fig-carpet-0": {"command": "traces", "kind": "ISW", "packet": "even", "n_lo": "1",
                     "n_hi": "10", "speeds": "full", "t_min": "0", "t_max": "1",
                     "t_unit": "T_R", "nx": "256", "nt": "256"},
    "fig-carpet-1": {"command": "traces", "kind": "ISW", "packet": "even", "n_lo": "1",
                     "n_hi": "10", "speeds": "1", "t_min": "0", "t_max": "1",
                     "t_unit": "T_R", "nx": "256", "nt": "256"},
    "fig-carpet-2": {"command": "traces", "kind": "ISW", "packet": "even", "n_lo": "1",
                     "n_hi": "10", "speeds": "2", "t_min": "0", "t_max": "1",
                     "t_unit": "T_R", "nx": "256", "nt": "256"},
    "fig-sho-sqr": {"command": "carpet", "kind": "SHO", "packet": "squares", "n_lo": "1",
                    "n_hi": "81", "nbar": "41", "x_min": "-15", "x_max": "15",
                    "t_min": "0", "t_max": "2", "t_unit": "T_cl", "nx": "384", "nt": "384"},
    "fig-farey": {"command": "farey", "n": "15"},
}
