//! Matrix-valued signals on uniform grids of the torus `T^D`, Fourier
//! multipliers acting on the frequency leg, Fejér means, and the Gaussian
//! periodization probe.
//!
//! Grid point `m` sits at angle `2 pi m / N` on every axis. Coefficients are
//! indexed by `k` with each coordinate in the balanced range
//! `(-ceil(N/2), floor(N/2)]`, and `W(t) = sum_k W_k e^{i <k, t>}`.

mod io;
mod multiplier;
mod probe;
mod signal;
mod symbol;

pub use io::{read_signal, write_signal, SignalFormat};
pub use multiplier::{fejer, fejer_weight, fourier_multiplier_apply, partial_sum};
pub use probe::{periodization_probe, ProbeReport, TrigPolynomial};
pub use signal::{bin_of_frequency, frequency_of_bin, signal_norms, SignalNorms, TorusSignal};
pub use symbol::{smoothing_eval, symbol_eval, HomogeneousSymbol};
