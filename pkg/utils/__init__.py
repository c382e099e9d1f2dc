"""
Numerical modules for device-orientation LiFi channel and mobility modeling.

rotation            Euler-rotation geometry (normal, polar/azimuth/facing angles)
orientation_stats   truncated Laplace/Gaussian models, fitting, KSD diagnostics
incidence           exact and approximate laws of the incidence-angle cosine
channel             LOS gain and SNR distributions, gain process coherence
mobility            AR(1) polar angle, ORWP trajectories, handover rate
config              JSON run configuration loading and validation
tabulate            table builders for every scenario
oracles             validation checks run by `run_scenario.py validate`
general             stdout transcript, config hashing, git describe
"""
