#pragma once

#include <vector>

#include "cliporg/stft.hpp"

namespace cliporg {

/// A spectral peak: a strict local maximum of the log-magnitude grid.
struct Peak {
    int frame = 0;
    int bin = 0;
    float magnitude = 0.0f;
};

struct PeakParams {
    int neighborhood_frames = 10;   // peak must beat every cell within ±frames
    int neighborhood_bins = 15;     // ... and ±bins
    int max_per_frame = 5;          // keep the strongest peaks per frame
    float min_magnitude = 1e-6f;    // rejects numerical dust on near-silence
};

/// Strict local maxima over a (2*nt+1) x (2*nf+1) neighborhood, keeping at
/// most max_per_frame highest-magnitude peaks per frame (ties: lower bin
/// wins). Output is sorted by (frame, bin) and fully deterministic.
///
/// A peak's frequency neighborhood must lie fully inside the grid: cells in
/// the first or last neighborhood_bins rows compete against a truncated
/// window, which lets broadband noise win at the DC and Nyquist edges and
/// produce degenerate repeated landmarks. Time edges stay eligible.
std::vector<Peak> extract_peaks(const Spectrogram& spec, const PeakParams& params);

}  // namespace cliporg
