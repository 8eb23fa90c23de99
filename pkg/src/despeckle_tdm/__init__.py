"""Speckle synthesis and variable-exponent diffusion / telegraph-diffusion despeckling."""
from .diffusivity import (DiffusivityConfig, DiffusivityField, diffusivity_constant_p,
                          diffusivity_field, exponent_field, gray_indicator)
from .grid import FLOOR_INTENSITY, GhostView, ImageGrid, load_pgm, minmax, save_pgm
from .metrics import (MetricsReport, despeckling_gain, enl, enl_trimmed, evaluate,
                      figure_of_merit, mor_vor, mssim, psnr, ratio_image, speckle_index)
from .phantoms import make_phantom
from .smoothing import GaussianKernel, gaussian_convolve, smoothed_gradient, smoothed_max
from .solvers import (SolverConfig, SolverState, cfl_max_tau, diffusion_step, flux_divergence,
                      run, telegraph_step)
from .speckle import SpeckleParams, apply_speckle, sample_speckle_field, speckle

__version__ = "0.1.0"
