#pragma once

#include "driveiv/types.hpp"

namespace driveiv {

// Checks n >= d >= p >= 1, matching row counts, and finiteness of all
// entries. Returns the dataset unchanged on success.
const IVDataset& validate_dataset(const IVDataset& data);

// Projects X and Y onto the column space of Z via a thin QR factorization
// (the n x n projector is never formed) and computes the first-stage
// coefficient gamma_hat = (Z'Z)^{-1} Z'X and sigma_z_hat = Z'Z/n.
// Throws RankDeficientInstruments when the numerical rank of Z is below d
// at tolerance 1e-10 relative to the largest singular value.
ProjectedDesign project_onto_instruments(const IVDataset& data);

}  // namespace driveiv
