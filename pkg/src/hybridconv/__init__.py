"""FFT convolution with hybrid (explicit plus implicit) zero padding."""
from .dealias1d import (HybridPlan1D, backward_residue, convolve, direct_conv, explicit_conv,
                        forward_residue, hybrid_conv_1d, hybrid_conv_1d_raw, pow2_split_conv,
                        residue_match)
from .dealias2d import (ConvMode, Kernel, direct_conv_2d, hybrid_conv_2d, image_convolve,
                        kernel_library, mode_window)
from .numeric import (ceilquotient, divisors, fft, generate_multiples, naive_dft,
                      primitive_root_power)

__version__ = "0.1.0"
